//! Dense two-phase simplex with Bland's rule.
//!
//! Problems are stated as `maximize c.x` subject to linear rows and
//! per-variable bounds. Internally every variable is shifted or split so
//! that all columns are non-negative, rows are sign-normalized to a
//! non-negative right-hand side, and slack/artificial columns are added.
//! Phase 1 drives the artificials to zero, phase 2 optimizes the real
//! objective. Every optimal point is re-checked against the original rows
//! and bounds before it is returned.

use std::fmt::Write as _;

use log::trace;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const NON_NEGATIVE: VarBounds = VarBounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    pub const FREE: VarBounds = VarBounds {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
}

impl Default for VarBounds {
    fn default() -> Self {
        Self::NON_NEGATIVE
    }
}

/// `maximize objective.x` subject to `constraints` and `bounds`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

impl LpProblem {
    /// `n_vars` non-negative variables, zero objective, no rows.
    pub fn new(n_vars: usize) -> Self {
        Self {
            objective: vec![0.0; n_vars],
            constraints: Vec::new(),
            bounds: vec![VarBounds::default(); n_vars],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds a row given as `(variable, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.n_vars()];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = VarBounds { lower, upper };
    }

    /// Adds `count` fresh variables with zero objective and default bounds,
    /// padding existing rows. Returns the index of the first new variable.
    pub fn add_vars(&mut self, count: usize) -> usize {
        let first = self.n_vars();
        self.objective.resize(first + count, 0.0);
        self.bounds.resize(first + count, VarBounds::default());
        for c in &mut self.constraints {
            c.coeffs.resize(first + count, 0.0);
        }
        first
    }

    fn check(&self) -> Result<()> {
        let n = self.n_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedLp(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp("non-finite objective".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedLp(format!(
                    "row {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::MalformedLp(format!("row {i} is not finite")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return Err(Error::MalformedLp(format!("variable {j} has bounds {b:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Smallest magnitude accepted as a pivot or as a positive reduced cost.
    pub pivot: f64,
    /// Allowed violation of rows and bounds, and phase 1 residual.
    pub feasibility: f64,
    /// Pivot budget across both phases.
    pub max_pivots: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            pivot: 1e-9,
            feasibility: 1e-8,
            max_pivots: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn status(&self) -> &'static str {
        match self {
            LpSolution::Optimal { .. } => "optimal",
            LpSolution::Infeasible => "infeasible",
            LpSolution::Unbounded => "unbounded",
        }
    }

    /// `(value, point)` for an optimal solution, otherwise an error naming
    /// the status.
    pub fn into_optimal(self) -> Result<(f64, Vec<f64>)> {
        match self {
            LpSolution::Optimal { value, point } => Ok((value, point)),
            other => Err(Error::UnexpectedStatus(other.status())),
        }
    }
}

/// How an original variable is recovered from non-negative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + sign * y[col]`
    Shift { col: usize, offset: f64, sign: f64 },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    /// Columns excluding the right-hand side.
    cols: usize,
    data: Vec<f64>,
    /// Reduced costs followed by the negated objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width();
        let p = self.at(r, j);
        {
            let row = &mut self.data[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[j] = 1.0;
        }
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[j];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(&mut self.obj);
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Resets reduced costs for the cost vector `c` (length `cols`).
    fn set_costs(&mut self, c: &[f64]) {
        self.obj[..self.cols].copy_from_slice(c);
        self.obj[self.cols] = 0.0;
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=self.cols {
                    self.obj[j] -= cb * self.at(i, j);
                }
            }
        }
    }

    /// Bland's rule simplex over columns `< allowed`.
    fn run(&mut self, allowed: usize, tol: &ToleranceConfig) -> Result<PhaseEnd> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] > tol.pivot) else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, enter);
                if a > tol.pivot {
                    let ratio = self.rhs(i).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-12 * best.abs().max(1.0)
                                || (ratio <= best + 1e-12 * best.abs().max(1.0)
                                    && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };
            if self.pivots >= tol.max_pivots {
                return Err(Error::NonConvergence {
                    pivots: self.pivots,
                });
            }
            self.pivot(r, enter);
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width();
        self.data.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Text dump of the tableau, one line per row plus the cost row.
    fn dump(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            let _ = write!(s, "x{:<4}|", self.basis[i]);
            for j in 0..=self.cols {
                let _ = write!(s, " {:>9.3e}", self.at(i, j));
            }
            s.push('\n');
        }
        s.push_str("obj  |");
        for v in &self.obj {
            let _ = write!(s, " {v:>9.3e}");
        }
        s.push('\n');
        s
    }
}

/// Solves `p`, returning an optimal point, or the status that prevents one.
pub fn solve(p: &LpProblem, tol: &ToleranceConfig) -> Result<LpSolution> {
    p.check()?;
    let n = p.n_vars();

    // Column layout for the original variables.
    let mut maps = Vec::with_capacity(n);
    let mut n_struct = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for b in &p.bounds {
        if b.lower > b.upper {
            return Ok(LpSolution::Infeasible);
        }
        let map = if b.lower.is_finite() {
            if b.upper.is_finite() {
                bound_rows.push((n_struct, b.upper - b.lower));
            }
            VarMap::Shift {
                col: n_struct,
                offset: b.lower,
                sign: 1.0,
            }
        } else if b.upper.is_finite() {
            VarMap::Shift {
                col: n_struct,
                offset: b.upper,
                sign: -1.0,
            }
        } else {
            n_struct += 1;
            VarMap::Split {
                pos: n_struct - 1,
                neg: n_struct,
            }
        };
        n_struct += 1;
        maps.push(map);
    }

    // Rows over structural columns, sign-normalized.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &p.constraints {
        let mut coeffs = vec![0.0; n_struct];
        let mut rhs = c.rhs;
        for (j, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset, sign } => {
                    coeffs[col] += a * sign;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for &(col, width) in &bound_rows {
        let mut coeffs = vec![0.0; n_struct];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, width));
    }
    for (coeffs, rel, rhs) in &mut rows {
        if *rhs < 0.0 {
            coeffs.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let first_artificial = n_struct + n_slack;
    let cols = first_artificial + n_art;
    let m = rows.len();
    let w = cols + 1;

    let mut t = Tableau {
        rows: m,
        cols,
        data: vec![0.0; m * w],
        obj: vec![0.0; w],
        basis: vec![0; m],
        first_artificial,
        pivots: 0,
    };
    let (mut slack, mut art) = (n_struct, first_artificial);
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let row = &mut t.data[i * w..(i + 1) * w];
        row[..n_struct].copy_from_slice(coeffs);
        row[cols] = *rhs;
        match rel {
            Relation::Le => {
                row[slack] = 1.0;
                t.basis[i] = slack;
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -1.0;
                slack += 1;
                row[art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
            Relation::Eq => {
                row[art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
        }
    }

    // Phase 1: maximize minus the sum of artificials.
    if n_art > 0 {
        let mut c1 = vec![0.0; cols];
        c1[first_artificial..].iter_mut().for_each(|c| *c = -1.0);
        t.set_costs(&c1);
        t.run(cols, tol)?;
        let residual = t.obj[cols];
        trace!("phase 1 finished after {} pivots, residual {residual:e}", t.pivots);
        if residual > tol.feasibility {
            return Ok(LpSolution::Infeasible);
        }
        // Pivot zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows {
            if t.basis[i] >= first_artificial {
                let j = (0..first_artificial)
                    .filter(|&j| t.at(i, j).abs() > tol.pivot)
                    .max_by(|&a, &b| t.at(i, a).abs().total_cmp(&t.at(i, b).abs()).then(b.cmp(&a)));
                match j {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.remove_row(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase 2.
    let mut c2 = vec![0.0; cols];
    for (j, &c) in p.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shift { col, sign, .. } => c2[col] += c * sign,
            VarMap::Split { pos, neg } => {
                c2[pos] += c;
                c2[neg] -= c;
            }
        }
    }
    t.set_costs(&c2);
    let end = t.run(t.first_artificial, tol)?;
    trace!("phase 2 finished after {} pivots\n{}", t.pivots, {
        if log::log_enabled!(log::Level::Trace) && t.cols < 64 {
            t.dump()
        } else {
            String::new()
        }
    });
    if let PhaseEnd::Unbounded = end {
        return Ok(LpSolution::Unbounded);
    }
    debug_assert!((0..t.first_artificial).all(|j| t.obj[j] <= tol.pivot));

    let mut y = vec![0.0; n_struct];
    for i in 0..t.rows {
        if t.basis[i] < n_struct {
            y[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let point: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, offset, sign } => offset + sign * y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    verify_point(p, &point, tol.feasibility)?;
    let value = p.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    Ok(LpSolution::Optimal { value, point })
}

/// Checks every row and bound of `p` at `x` within `tol` (scaled by the
/// magnitude of the right-hand side).
pub fn verify_point(p: &LpProblem, x: &[f64], tol: f64) -> Result<()> {
    for (i, c) in p.constraints.iter().enumerate() {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let slack = tol * (1.0 + c.rhs.abs());
        let violation = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        if violation > slack {
            return Err(Error::InfeasiblePoint {
                constraint: format!("row {i}"),
                violation,
            });
        }
    }
    for (j, (b, v)) in p.bounds.iter().zip(x).enumerate() {
        let violation = (b.lower - v).max(v - b.upper);
        if violation > tol * (1.0 + v.abs()) {
            return Err(Error::InfeasiblePoint {
                constraint: format!("bounds of variable {j}"),
                violation,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimum(p: &LpProblem) -> (f64, Vec<f64>) {
        solve(p, &ToleranceConfig::default())
            .unwrap()
            .into_optimal()
            .unwrap()
    }

    #[test]
    fn single_upper_constraint() {
        let mut p = LpProblem::new(1);
        p.objective = vec![1.0];
        p.add_constraint(vec![1.0], Relation::Le, 3.0);
        assert_eq!(optimum(&p).0, 3.0);
    }

    #[test]
    fn simplex_on_a_simplex() {
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 1.0];
        p.add_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        assert!((optimum(&p).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let mut p = LpProblem::new(1);
        p.objective = vec![1.0];
        assert_eq!(solve(&p, &ToleranceConfig::default()).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn infeasible_system() {
        let mut p = LpProblem::new(2);
        p.add_constraint(vec![1.0, 1.0], Relation::Ge, 3.0);
        p.add_constraint(vec![1.0, 0.0], Relation::Le, 1.0);
        p.add_constraint(vec![0.0, 1.0], Relation::Le, 1.0);
        assert_eq!(solve(&p, &ToleranceConfig::default()).unwrap(), LpSolution::Infeasible);
        let err = solve(&p, &ToleranceConfig::default()).unwrap().into_optimal().unwrap_err();
        assert_eq!(err, Error::UnexpectedStatus("infeasible"));
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // maximize -x + y with x free, x >= -2 via row, y <= 4 via bound
        let mut p = LpProblem::new(2);
        p.objective = vec![-1.0, 1.0];
        p.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        p.set_bounds(1, f64::NEG_INFINITY, 4.0);
        p.add_constraint(vec![1.0, 0.0], Relation::Ge, -2.0);
        let (v, x) = optimum(&p);
        assert!((v - 6.0).abs() < 1e-12);
        assert!((x[0] + 2.0).abs() < 1e-12 && (x[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // duplicated equality forces a redundant artificial row
        let mut p = LpProblem::new(3);
        p.objective = vec![1.0, 2.0, 3.0];
        p.add_constraint(vec![1.0, 1.0, 1.0], Relation::Eq, 1.0);
        p.add_constraint(vec![2.0, 2.0, 2.0], Relation::Eq, 2.0);
        p.add_constraint(vec![0.0, 0.0, 1.0], Relation::Le, 0.5);
        let (v, x) = optimum(&p);
        assert!((v - 2.5).abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let mut p = LpProblem::new(1);
        p.set_bounds(0, 1.0, 0.0);
        assert_eq!(solve(&p, &ToleranceConfig::default()).unwrap(), LpSolution::Infeasible);
    }

    #[test]
    fn pivot_budget_is_enforced() {
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 1.0];
        p.add_constraint(vec![1.0, 0.0], Relation::Le, 1.0);
        p.add_constraint(vec![0.0, 1.0], Relation::Le, 1.0);
        let tol = ToleranceConfig {
            max_pivots: 1,
            ..Default::default()
        };
        assert_eq!(solve(&p, &tol).unwrap_err(), Error::NonConvergence { pivots: 1 });
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let mut p = LpProblem::new(2);
        p.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve(&p, &ToleranceConfig::default()), Err(Error::MalformedLp(_))));
        let mut p = LpProblem::new(1);
        p.objective = vec![f64::NAN];
        assert!(matches!(solve(&p, &ToleranceConfig::default()), Err(Error::MalformedLp(_))));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut p = LpProblem::new(4);
        p.objective = vec![0.75, -150.0, 0.02, -6.0];
        p.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        p.add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        p.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let (v, _) = optimum(&p);
        assert!((v - 0.05).abs() < 1e-10);
    }

    #[test]
    fn deterministic_results() {
        let mut p = LpProblem::new(3);
        p.objective = vec![1.0, 1.0, 1.0];
        p.add_constraint(vec![1.0, 1.0, 0.0], Relation::Le, 1.0);
        p.add_constraint(vec![0.0, 1.0, 1.0], Relation::Le, 1.0);
        p.add_constraint(vec![1.0, 0.0, 1.0], Relation::Le, 1.0);
        assert_eq!(optimum(&p), optimum(&p));
        assert!((optimum(&p).0 - 1.5).abs() < 1e-12);
    }
}

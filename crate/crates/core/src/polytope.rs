//! Bounds of Bell functionals over the local polytope, the no-signaling
//! polytope, and the pairwise-local (GNS) sets.
//!
//! Local maxima are computed by exhaustive enumeration of deterministic
//! strategies. Everything else is a linear program over Collins-Gisin
//! coordinates constrained by [`NsConstraintSystem`]. Locality of a
//! restricted block is expressed through explicit convex weights on the
//! deterministic vertices of the restricted scenario.

use rayon::prelude::*;

use crate::cg::{BellFunctional, CgTable};
use crate::error::{Error, Result};
use crate::inequality::PairLabel;
use crate::lp::{self, LpProblem, LpSolution, Relation, ToleranceConfig};

/// Largest `n_a + n_b` accepted for vertex enumeration.
pub const MAX_ENUMERATION_SETTINGS: usize = 24;

/// Largest setting count per party accepted by the pairwise LPs.
pub const MAX_LP_SETTINGS: usize = 8;

/// Largest `n_a + n_b` for LPs that carry one weight per vertex of the
/// whole scenario.
pub const MAX_VERTEX_LP_SETTINGS: usize = 12;

/// Acceptance tolerance for claimed optima.
pub const CLAIM_TOL: f64 = 1e-7;

/// Pair maxima closer than this are treated as ties.
const TIE_TOL: f64 = 1e-9;

/// Outcome assignment for every setting of both parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: Vec<u8>,
    pub bob: Vec<u8>,
}

impl DeterministicStrategy {
    /// Strategy whose outcome string `alice ++ bob` is the binary expansion
    /// of `code`, most significant digit first. Numeric order of codes is
    /// lexicographic order of outcome strings.
    pub fn from_code(n_a: usize, n_b: usize, code: u64) -> Self {
        let total = n_a + n_b;
        let bit = |i: usize| ((code >> (total - 1 - i)) & 1) as u8;
        Self {
            alice: (0..n_a).map(bit).collect(),
            bob: (n_a..total).map(bit).collect(),
        }
    }

    pub fn code(&self) -> u64 {
        self.alice
            .iter()
            .chain(&self.bob)
            .fold(0u64, |acc, &o| (acc << 1) | u64::from(o))
    }

    /// Collins-Gisin table: `P(A_x) = [a(x) = 0]`, joint entries are the
    /// products.
    pub fn table(&self) -> CgTable {
        let mut t = CgTable::zeros(self.alice.len(), self.bob.len()).expect("nonempty strategy");
        for (x, &a) in self.alice.iter().enumerate() {
            t.set_alice(x, f64::from(a == 0));
        }
        for (y, &b) in self.bob.iter().enumerate() {
            t.set_bob(y, f64::from(b == 0));
            for (x, &a) in self.alice.iter().enumerate() {
                t.set_joint(x, y, f64::from(a == 0 && b == 0));
            }
        }
        t
    }
}

fn enumeration_guard(n_a: usize, n_b: usize) -> Result<()> {
    if n_a + n_b > MAX_ENUMERATION_SETTINGS {
        return Err(Error::Guard(format!(
            "{n_a}+{n_b} settings exceed the enumeration limit of {MAX_ENUMERATION_SETTINGS} (2^{} vertices)",
            n_a + n_b
        )));
    }
    if n_a == 0 || n_b == 0 {
        return Err(Error::Shape("setting counts must be at least 1".into()));
    }
    Ok(())
}

/// All `2^(n_a + n_b)` deterministic tables in code order.
pub fn det_vertices(n_a: usize, n_b: usize) -> Result<impl Iterator<Item = CgTable>> {
    enumeration_guard(n_a, n_b)?;
    let count = 1u64 << (n_a + n_b);
    Ok((0..count).map(move |c| DeterministicStrategy::from_code(n_a, n_b, c).table()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMax {
    pub value: f64,
    /// Lowest-code strategy attaining `value`.
    pub witness: DeterministicStrategy,
}

/// Exact maximum of `f` over deterministic strategies.
pub fn local_max(f: &BellFunctional) -> Result<LocalMax> {
    let (n_a, n_b) = (f.n_a(), f.n_b());
    enumeration_guard(n_a, n_b)?;
    let c = f.coefficients();
    let alice_codes = 1u64 << n_a;
    let bob_codes = 1u64 << n_b;

    // For a fixed Alice assignment the value is
    // alice_part + sum_y [b(y) = 0] * (bob_coef[y] + sum_x joint[y][x] [a(x) = 0]).
    let best = (0..alice_codes)
        .into_par_iter()
        .map(|ac| {
            let a_zero: Vec<bool> = (0..n_a).map(|x| (ac >> (n_a - 1 - x)) & 1 == 0).collect();
            let alice_part: f64 = (0..n_a).filter(|&x| a_zero[x]).map(|x| c.alice()[x]).sum();
            let weights: Vec<f64> = (0..n_b)
                .map(|y| {
                    let row = c.joint_row(y);
                    c.bob()[y] + (0..n_a).filter(|&x| a_zero[x]).map(|x| row[x]).sum::<f64>()
                })
                .collect();
            let mut best = (f64::NEG_INFINITY, 0u64);
            for bc in 0..bob_codes {
                let mut v = alice_part;
                for (y, w) in weights.iter().enumerate() {
                    if (bc >> (n_b - 1 - y)) & 1 == 0 {
                        v += w;
                    }
                }
                if v > best.0 {
                    best = (v, (ac << n_b) | bc);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    Ok(LocalMax {
        value: best.0,
        witness: DeterministicStrategy::from_code(n_a, n_b, best.1),
    })
}

/// One linear inequality `sum coef * coord <= rhs` over table coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NsInequality {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Positivity of every reconstructed outcome probability, written over
/// Collins-Gisin coordinates (see [`CgTable::coords`]). For each `(x, y)`:
/// `J >= 0`, `J <= P(A_x)`, `J <= P(B_y)`, `P(A_x) + P(B_y) - J <= 1`;
/// plus every marginal in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsConstraintSystem {
    n_a: usize,
    n_b: usize,
    rows: Vec<NsInequality>,
}

impl NsConstraintSystem {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        let t = CgTable::zeros(n_a, n_b)?;
        let mut rows = Vec::with_capacity(4 * n_a * n_b + 2 * (n_a + n_b));
        let mut push = |terms: Vec<(usize, f64)>, rhs: f64| rows.push(NsInequality { terms, rhs });
        for y in 0..n_b {
            for x in 0..n_a {
                let (a, b, j) = (t.alice_coord(x), t.bob_coord(y), t.joint_coord(x, y));
                push(vec![(j, -1.0)], 0.0);
                push(vec![(j, 1.0), (a, -1.0)], 0.0);
                push(vec![(j, 1.0), (b, -1.0)], 0.0);
                push(vec![(a, 1.0), (b, 1.0), (j, -1.0)], 1.0);
            }
        }
        let marginals = (0..n_a).map(|x| t.alice_coord(x)).chain((0..n_b).map(|y| t.bob_coord(y)));
        for m in marginals {
            push(vec![(m, -1.0)], 0.0);
            push(vec![(m, 1.0)], 1.0);
        }
        Ok(Self { n_a, n_b, rows })
    }

    pub fn rows(&self) -> &[NsInequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when `t` satisfies every row within `tol`.
    pub fn contains(&self, t: &CgTable, tol: f64) -> bool {
        let coords = t.coords();
        self.rows.iter().all(|r| {
            let lhs: f64 = r.terms.iter().map(|&(i, c)| c * coords[i]).sum();
            lhs <= r.rhs + tol
        })
    }

    /// Adds the system to `lp`, whose first `dim` variables are the table
    /// coordinates. Single-coordinate rows become variable bounds.
    pub fn apply(&self, lp: &mut LpProblem) {
        for r in &self.rows {
            match r.terms.as_slice() {
                &[(i, c)] if c < 0.0 => lp.bounds[i].lower = lp.bounds[i].lower.max(-r.rhs / -c),
                &[(i, c)] => lp.bounds[i].upper = lp.bounds[i].upper.min(r.rhs / c),
                terms => lp.add_sparse(terms, Relation::Le, r.rhs),
            }
        }
    }

    /// LP over the no-signaling polytope with objective `f`.
    pub fn lp(&self, f: &BellFunctional) -> Result<LpProblem> {
        if f.n_a() != self.n_a || f.n_b() != self.n_b {
            return Err(Error::Shape("functional does not match the scenario".into()));
        }
        let mut lp = LpProblem::new(f.coefficients().dim());
        lp.objective = f.coefficients().coords();
        self.apply(&mut lp);
        Ok(lp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpMax {
    pub value: f64,
    /// Maximizing no-signaling table.
    pub point: CgTable,
}

fn optimum(lp: &LpProblem, n_a: usize, n_b: usize) -> Result<LpMax> {
    let (_, x) = lp::solve(lp, &ToleranceConfig::default())?.into_optimal()?;
    let dim = n_a + n_b + n_a * n_b;
    let point = CgTable::from_coords(n_a, n_b, &x[..dim])?;
    // recomputed from the table so that auxiliary variables cannot leak in
    let value = lp.objective[..dim].iter().zip(&x[..dim]).map(|(c, v)| c * v).sum();
    Ok(LpMax { value, point })
}

/// Maximum of `f` over all no-signaling behaviors.
pub fn ns_max(f: &BellFunctional) -> Result<LpMax> {
    let lp = NsConstraintSystem::new(f.n_a(), f.n_b())?.lp(f)?;
    optimum(&lp, f.n_a(), f.n_b())
}

/// Adds weights over the deterministic vertices of the sub-scenario
/// `alice_keep x bob_keep` and binds the corresponding table coordinates
/// (variables `0..dim` of `lp`) to their convex combination.
fn bind_local_block(
    lp: &mut LpProblem,
    shape: &CgTable,
    alice_keep: &[usize],
    bob_keep: &[usize],
) -> Result<()> {
    let (k_a, k_b) = (alice_keep.len(), bob_keep.len());
    let vertices: Vec<Vec<f64>> = det_vertices(k_a, k_b)?.map(|v| v.coords()).collect();
    let first = lp.add_vars(vertices.len());
    let sub = CgTable::zeros(k_a, k_b)?;
    let bind = |lp: &mut LpProblem, full: usize, sub_i: usize| {
        let mut row = vec![(full, 1.0)];
        for (k, v) in vertices.iter().enumerate() {
            if v[sub_i] != 0.0 {
                row.push((first + k, -v[sub_i]));
            }
        }
        lp.add_sparse(&row, Relation::Eq, 0.0);
    };
    for (xi, &x) in alice_keep.iter().enumerate() {
        bind(lp, shape.alice_coord(x), sub.alice_coord(xi));
    }
    for (yi, &y) in bob_keep.iter().enumerate() {
        bind(lp, shape.bob_coord(y), sub.bob_coord(yi));
        for (xi, &x) in alice_keep.iter().enumerate() {
            bind(lp, shape.joint_coord(x, y), sub.joint_coord(xi, yi));
        }
    }
    let norm: Vec<(usize, f64)> = (0..vertices.len()).map(|k| (first + k, 1.0)).collect();
    lp.add_sparse(&norm, Relation::Eq, 1.0);
    Ok(())
}

/// Whether the restriction of `t` to the kept settings (0-based) is a
/// convex combination of deterministic strategies, within `tol` per
/// coordinate.
pub fn local_membership(
    t: &CgTable,
    alice_keep: &[usize],
    bob_keep: &[usize],
    tol: f64,
) -> Result<bool> {
    let r = t.restrict(alice_keep, bob_keep)?;
    if r.n_a() + r.n_b() > MAX_VERTEX_LP_SETTINGS {
        return Err(Error::Guard(format!(
            "membership LP limited to {MAX_VERTEX_LP_SETTINGS} settings in total"
        )));
    }
    let vertices: Vec<Vec<f64>> = det_vertices(r.n_a(), r.n_b())?.map(|v| v.coords()).collect();
    let target = r.coords();
    let mut lp = LpProblem::new(vertices.len());
    for (i, &ti) in target.iter().enumerate() {
        let row: Vec<f64> = vertices.iter().map(|v| v[i]).collect();
        lp.add_constraint(row.clone(), Relation::Le, ti + tol);
        lp.add_constraint(row, Relation::Ge, ti - tol);
    }
    lp.add_constraint(vec![1.0; vertices.len()], Relation::Eq, 1.0);
    match lp::solve(&lp, &ToleranceConfig::default())? {
        LpSolution::Optimal { .. } => Ok(true),
        LpSolution::Infeasible => Ok(false),
        LpSolution::Unbounded => Err(Error::UnexpectedStatus("unbounded")),
    }
}

fn lp_guard(f: &BellFunctional) -> Result<()> {
    if f.n_a() > MAX_LP_SETTINGS || f.n_b() > MAX_LP_SETTINGS {
        return Err(Error::Guard(format!(
            "pairwise LPs are limited to {MAX_LP_SETTINGS} settings per party, got {}x{}",
            f.n_a(),
            f.n_b()
        )));
    }
    Ok(())
}

/// Maximum of `f` over no-signaling behaviors that are local once Bob is
/// restricted to the settings of `pair` (all Alice settings kept).
pub fn pairwise_local_max(f: &BellFunctional, pair: PairLabel) -> Result<LpMax> {
    lp_guard(f)?;
    if pair.t() > f.n_b() {
        return Err(Error::Domain(format!(
            "pair {pair} exceeds {} Bob settings",
            f.n_b()
        )));
    }
    let mut lp = NsConstraintSystem::new(f.n_a(), f.n_b())?.lp(f)?;
    let alice_keep: Vec<usize> = (0..f.n_a()).collect();
    bind_local_block(&mut lp, f.coefficients(), &alice_keep, &pair.indices())?;
    optimum(&lp, f.n_a(), f.n_b())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnsMax {
    pub value: f64,
    /// Lexicographically smallest pair attaining `value`.
    pub worst_pair: PairLabel,
    /// Maximum for every pair, in lexicographic pair order.
    pub per_pair: Vec<(PairLabel, f64)>,
}

/// Maximum of `f` over mixtures of pairwise-local no-signaling behaviors,
/// i.e. the largest [`pairwise_local_max`] over all Bob pairs.
pub fn gns_max(f: &BellFunctional) -> Result<GnsMax> {
    lp_guard(f)?;
    if f.n_b() < 2 {
        return Err(Error::Domain("need at least two Bob settings".into()));
    }
    let pairs = PairLabel::all(f.n_b());
    let per_pair = pairs
        .par_iter()
        .map(|&p| pairwise_local_max(f, p).map(|m| (p, m.value)))
        .collect::<Result<Vec<_>>>()?;
    let (mut worst_pair, mut value) = per_pair[0];
    for &(p, v) in &per_pair[1..] {
        if v > value + TIE_TOL {
            worst_pair = p;
            value = v;
        }
    }
    Ok(GnsMax {
        value,
        worst_pair,
        per_pair,
    })
}

/// `max_T f(T) - g(T)` over no-signaling tables. A value `<= tol`
/// certifies that `f > 0` forces `g > 0`.
pub fn domination_check(f: &BellFunctional, g: &BellFunctional) -> Result<f64> {
    if f == g {
        return Ok(0.0);
    }
    Ok(ns_max(&f.minus(g)?)?.value)
}

/// Maximum of `f` over the convex hull of deterministic tables, solved as
/// an LP with one weight per vertex. Independent of [`local_max`].
pub fn local_max_lp(f: &BellFunctional) -> Result<f64> {
    let (n_a, n_b) = (f.n_a(), f.n_b());
    if n_a + n_b > MAX_VERTEX_LP_SETTINGS {
        return Err(Error::Guard(format!(
            "vertex LP limited to {MAX_VERTEX_LP_SETTINGS} settings in total"
        )));
    }
    let shape = f.coefficients();
    let mut lp = LpProblem::new(shape.dim());
    lp.objective = shape.coords();
    for b in &mut lp.bounds {
        *b = lp::VarBounds::FREE;
    }
    let alice: Vec<usize> = (0..n_a).collect();
    let bob: Vec<usize> = (0..n_b).collect();
    bind_local_block(&mut lp, shape, &alice, &bob)?;
    Ok(optimum(&lp, n_a, n_b)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cg::{evaluate, validate, DEFAULT_TOL};
    use crate::inequality::{chsh, m_nn22, reduced_chsh, sub_embedding};

    fn pair(s: usize, t: usize) -> PairLabel {
        PairLabel::new(s, t).unwrap()
    }

    fn pr_box() -> CgTable {
        // p(00|xy) = 1/2 unless x = y = 2, where outcomes anti-correlate.
        CgTable::from_parts(
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            vec![vec![0.5, 0.5], vec![0.5, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(det_vertices(1, 1).unwrap().count(), 4);
        assert_eq!(det_vertices(3, 3).unwrap().count(), 64);
        assert!(matches!(det_vertices(13, 12), Err(Error::Guard(_))));
    }

    #[test]
    fn vertices_are_valid_tables() {
        for v in det_vertices(3, 3).unwrap() {
            assert!(validate(&v, 0.0).is_empty());
        }
    }

    #[test]
    fn strategy_codes_round_trip() {
        let s = DeterministicStrategy::from_code(3, 2, 0b10110);
        assert_eq!(s.alice, vec![1, 0, 1]);
        assert_eq!(s.bob, vec![1, 0]);
        assert_eq!(s.code(), 0b10110);
    }

    #[test]
    fn chsh_local_and_ns_bounds() {
        let l = local_max(&chsh()).unwrap();
        assert_eq!(l.value, 0.0);
        // the all-zero-outcome strategy (code 0) already attains 0
        assert_eq!(l.witness.code(), 0);
        let ns = ns_max(&chsh()).unwrap();
        assert!((ns.value - 0.5).abs() < 1e-9);
        assert!((evaluate(&chsh(), &pr_box()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chsh_ns_max_matches_brute_vertex_search() {
        // Oracle: every vertex of the 2x2 no-signaling polytope is the
        // intersection of 8 linearly independent tight constraints. Scan all
        // 8-subsets of the 24 inequalities, solve, keep feasible points.
        let sys = NsConstraintSystem::new(2, 2).unwrap();
        let rows = sys.rows();
        let dim = 8;
        let coef = chsh().coefficients().coords();
        let mut best = f64::NEG_INFINITY;
        let mut vertices = Vec::new();
        let m = rows.len();
        let mut idx: Vec<usize> = (0..dim).collect();
        loop {
            let mut a = vec![vec![0.0; dim + 1]; dim];
            for (r, &k) in idx.iter().enumerate() {
                for &(i, c) in &rows[k].terms {
                    a[r][i] = c;
                }
                a[r][dim] = rows[k].rhs;
            }
            if let Some(x) = gauss_solve(a) {
                let t = CgTable::from_coords(2, 2, &x).unwrap();
                if sys.contains(&t, 1e-12) {
                    let v: f64 = coef.iter().zip(&x).map(|(c, v)| c * v).sum();
                    best = best.max(v);
                    if !vertices.iter().any(|w: &Vec<f64>| w.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-9)) {
                        vertices.push(x);
                    }
                }
            }
            // next combination
            let mut i = dim;
            while i > 0 && idx[i - 1] == m - dim + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..dim {
                idx[j] = idx[j - 1] + 1;
            }
        }
        // 16 deterministic vertices plus 8 PR boxes
        assert_eq!(vertices.len(), 24);
        assert!((best - 0.5).abs() < 1e-12);
        assert!((ns_max(&chsh()).unwrap().value - best).abs() < 1e-9);
    }

    fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
        let n = a.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-12 {
                return None;
            }
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
    }

    #[test]
    fn ns_system_size_and_agreement_with_validate() {
        for (n_a, n_b) in [(1, 1), (2, 3), (4, 4)] {
            let sys = NsConstraintSystem::new(n_a, n_b).unwrap();
            assert_eq!(sys.len(), 4 * n_a * n_b + 2 * (n_a + n_b));
        }
        let sys = NsConstraintSystem::new(2, 2).unwrap();
        assert!(sys.contains(&pr_box(), 0.0));
        let bad = CgTable::from_parts(vec![0.5, 0.5], vec![0.5, 0.5], vec![vec![0.6, 0.5], vec![0.5, 0.0]]).unwrap();
        assert!(!sys.contains(&bad, DEFAULT_TOL));
        assert!(!validate(&bad, DEFAULT_TOL).is_empty());
    }

    #[test]
    fn zero_functional_bounds() {
        let z = BellFunctional::zero(3, 3).unwrap();
        assert_eq!(ns_max(&z).unwrap().value, 0.0);
        assert_eq!(gns_max(&z).unwrap().value, 0.0);
        assert_eq!(local_max(&z).unwrap().value, 0.0);
    }

    #[test]
    fn membership() {
        for v in det_vertices(2, 2).unwrap() {
            assert!(local_membership(&v, &[0, 1], &[0, 1], 1e-9).unwrap());
        }
        let uniform = CgTable::from_parts(vec![0.5; 3], vec![0.5; 3], vec![vec![0.25; 3]; 3]).unwrap();
        assert!(local_membership(&uniform, &[0, 1, 2], &[0, 1, 2], 1e-9).unwrap());
        assert!(!local_membership(&pr_box(), &[0, 1], &[0, 1], 1e-9).unwrap());
        // restricting the PR box to one Bob setting leaves a local block
        assert!(local_membership(&pr_box(), &[0, 1], &[1], 1e-9).unwrap());
    }

    #[test]
    fn pairwise_bounds_for_small_cases() {
        assert!(pairwise_local_max(&chsh(), pair(1, 2)).unwrap().value.abs() <= CLAIM_TOL);
        let m3 = m_nn22(3).unwrap();
        assert!(pairwise_local_max(&m3, pair(1, 2)).unwrap().value.abs() <= CLAIM_TOL);
        let m4 = m_nn22(4).unwrap();
        assert!(pairwise_local_max(&m4, pair(2, 3)).unwrap().value.abs() <= CLAIM_TOL);
        assert!(matches!(pairwise_local_max(&m3, pair(2, 4)), Err(Error::Domain(_))));
        let big = m_nn22(9).unwrap();
        assert!(matches!(pairwise_local_max(&big, pair(1, 2)), Err(Error::Guard(_))));
    }

    #[test]
    fn gns_bounds() {
        let g3 = gns_max(&m_nn22(3).unwrap()).unwrap();
        assert!(g3.value.abs() <= CLAIM_TOL);
        assert_eq!(g3.per_pair.len(), 3);
        assert_eq!(g3.worst_pair, pair(1, 2));
        let g4 = gns_max(&m_nn22(4).unwrap()).unwrap();
        assert!(g4.value.abs() <= CLAIM_TOL);
        // CHSH is not bounded by 0 once one Bob pair is left unconstrained:
        // with a single pair in the 2-setting scenario everything is local.
        assert!(gns_max(&chsh()).unwrap().value.abs() <= CLAIM_TOL);
    }

    #[test]
    fn gns_dominates_local() {
        for n in 2..=4 {
            let f = reduced_chsh(n, pair(1, n)).unwrap();
            let g = gns_max(&f).unwrap().value;
            assert!(g >= local_max(&f).unwrap().value - 1e-8);
        }
    }

    #[test]
    fn domination_lemmas_small() {
        let m3 = m_nn22(3).unwrap();
        assert_eq!(domination_check(&m3, &m3).unwrap(), 0.0);
        for p in PairLabel::all(3) {
            let d = domination_check(&m3, &reduced_chsh(3, p).unwrap()).unwrap();
            assert!(d <= CLAIM_TOL, "{p}: {d}");
        }
        let lifted = sub_embedding(3).unwrap().lifted().unwrap();
        assert!(domination_check(&m3, &lifted).unwrap() <= CLAIM_TOL);
        // the converse direction is not a domination
        assert!(domination_check(&lifted, &m3).unwrap() > 0.1);
    }

    #[test]
    fn vertex_lp_matches_enumeration() {
        for f in [chsh(), m_nn22(3).unwrap(), reduced_chsh(4, pair(2, 4)).unwrap()] {
            let e = local_max(&f).unwrap().value;
            let l = local_max_lp(&f).unwrap();
            assert!((e - l).abs() <= 1e-8, "{e} vs {l}");
        }
    }
}

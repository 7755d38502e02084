//! Collins-Gisin tables.
//!
//! A two-outcome bipartite behavior with `n_a` Alice settings and `n_b` Bob
//! settings is fixed by the probabilities of outcome 0: Alice's marginals
//! `P(A_x)`, Bob's marginals `P(B_y)` and the joint block `P(A_x B_y)`.
//! Bell functionals are written in the same layout, one coefficient per
//! probability. The joint block is stored Bob-major: row `y`, column `x`.
//!
//! Library indices are 0-based. Anything printed for humans (errors,
//! violation reports) uses 1-based setting labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for probability checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Values laid out as a Collins-Gisin table.
///
/// Used both for behaviors (entries are probabilities) and for the
/// coefficients of a [`BellFunctional`]. Shape is checked on construction;
/// probabilistic validity is checked separately by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableDoc", into = "TableDoc")]
pub struct CgTable {
    n_a: usize,
    n_b: usize,
    alice: Vec<f64>,
    bob: Vec<f64>,
    joint: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    n_a: usize,
    n_b: usize,
    alice: Vec<f64>,
    bob: Vec<f64>,
    joint: Vec<Vec<f64>>,
}

impl TryFrom<TableDoc> for CgTable {
    type Error = Error;

    fn try_from(doc: TableDoc) -> Result<Self> {
        let table = CgTable::from_parts(doc.alice, doc.bob, doc.joint)?;
        if table.n_a != doc.n_a || table.n_b != doc.n_b {
            return Err(Error::Shape(format!(
                "declared {}x{} but entries describe {}x{}",
                doc.n_a, doc.n_b, table.n_a, table.n_b
            )));
        }
        Ok(table)
    }
}

impl From<CgTable> for TableDoc {
    fn from(t: CgTable) -> Self {
        let joint = t.joint.chunks(t.n_a).map(<[f64]>::to_vec).collect();
        TableDoc {
            n_a: t.n_a,
            n_b: t.n_b,
            alice: t.alice,
            bob: t.bob,
            joint,
        }
    }
}

impl CgTable {
    /// All-zero table. Read as a behavior this is the deterministic
    /// strategy where every setting yields outcome 1.
    pub fn zeros(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::Shape(format!(
                "setting counts must be at least 1, got {n_a}x{n_b}"
            )));
        }
        Ok(Self {
            n_a,
            n_b,
            alice: vec![0.0; n_a],
            bob: vec![0.0; n_b],
            joint: vec![0.0; n_a * n_b],
        })
    }

    /// Builds a table from Alice entries, Bob entries and joint rows
    /// (`joint[y][x]`).
    pub fn from_parts(alice: Vec<f64>, bob: Vec<f64>, joint: Vec<Vec<f64>>) -> Result<Self> {
        let (n_a, n_b) = (alice.len(), bob.len());
        if n_a == 0 || n_b == 0 {
            return Err(Error::Shape("empty marginal vector".into()));
        }
        if joint.len() != n_b {
            return Err(Error::Shape(format!(
                "joint block has {} rows, expected {n_b} (one per Bob setting)",
                joint.len()
            )));
        }
        if let Some((y, row)) = joint.iter().enumerate().find(|(_, r)| r.len() != n_a) {
            return Err(Error::Shape(format!(
                "joint row {} has {} entries, expected {n_a}",
                y + 1,
                row.len()
            )));
        }
        let all = alice.iter().chain(&bob).chain(joint.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Shape("table entries must be finite".into()));
        }
        Ok(Self {
            n_a,
            n_b,
            alice,
            bob,
            joint: joint.into_iter().flatten().collect(),
        })
    }

    /// Inverse of [`CgTable::coords`].
    pub fn from_coords(n_a: usize, n_b: usize, coords: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(n_a, n_b)?;
        if coords.len() != t.dim() {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                t.dim(),
                coords.len()
            )));
        }
        t.alice.copy_from_slice(&coords[..n_a]);
        t.bob.copy_from_slice(&coords[n_a..n_a + n_b]);
        t.joint.copy_from_slice(&coords[n_a + n_b..]);
        Ok(t)
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Number of free coordinates: `n_a + n_b + n_a * n_b`.
    pub fn dim(&self) -> usize {
        self.n_a + self.n_b + self.n_a * self.n_b
    }

    pub fn alice(&self) -> &[f64] {
        &self.alice
    }

    pub fn bob(&self) -> &[f64] {
        &self.bob
    }

    /// Entry `P(A_x B_y)` (or its coefficient).
    pub fn joint(&self, x: usize, y: usize) -> f64 {
        self.joint[y * self.n_a + x]
    }

    /// Joint row for Bob setting `y`, indexed by Alice setting.
    pub fn joint_row(&self, y: usize) -> &[f64] {
        &self.joint[y * self.n_a..(y + 1) * self.n_a]
    }

    pub fn set_alice(&mut self, x: usize, value: f64) {
        self.alice[x] = value;
    }

    pub fn set_bob(&mut self, y: usize, value: f64) {
        self.bob[y] = value;
    }

    pub fn set_joint(&mut self, x: usize, y: usize, value: f64) {
        self.joint[y * self.n_a + x] = value;
    }

    /// Coordinate index of `P(A_x)` in [`CgTable::coords`].
    pub fn alice_coord(&self, x: usize) -> usize {
        x
    }

    pub fn bob_coord(&self, y: usize) -> usize {
        self.n_a + y
    }

    pub fn joint_coord(&self, x: usize, y: usize) -> usize {
        self.n_a + self.n_b + y * self.n_a + x
    }

    /// Flat coordinate vector: Alice entries, Bob entries, then the joint
    /// block row by row.
    pub fn coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.alice);
        out.extend_from_slice(&self.bob);
        out.extend_from_slice(&self.joint);
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n_a != other.n_a || self.n_b != other.n_b {
            return Err(Error::Shape(format!(
                "{}x{} table combined with {}x{} table",
                self.n_a, self.n_b, other.n_a, other.n_b
            )));
        }
        Ok(())
    }

    /// Entrywise inner product.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        let pairs = self
            .alice
            .iter()
            .zip(&other.alice)
            .chain(self.bob.iter().zip(&other.bob))
            .chain(self.joint.iter().zip(&other.joint));
        Ok(pairs.map(|(a, b)| a * b).sum())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let comb = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&u, &v)| f(u, v)).collect();
        Ok(Self {
            n_a: self.n_a,
            n_b: self.n_b,
            alice: comb(&self.alice, &other.alice),
            bob: comb(&self.bob, &other.bob),
            joint: comb(&self.joint, &other.joint),
        })
    }

    /// Convex mixture `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        self.zip_with(other, |a, b| alpha * a + (1.0 - alpha) * b)
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Sub-table on the kept settings. Index lists are 0-based, nonempty and
    /// strictly increasing.
    pub fn restrict(&self, alice_keep: &[usize], bob_keep: &[usize]) -> Result<Self> {
        check_keep("Alice", alice_keep, self.n_a)?;
        check_keep("Bob", bob_keep, self.n_b)?;
        let alice = alice_keep.iter().map(|&x| self.alice[x]).collect();
        let bob = bob_keep.iter().map(|&y| self.bob[y]).collect();
        let joint = bob_keep
            .iter()
            .map(|&y| alice_keep.iter().map(|&x| self.joint(x, y)).collect())
            .collect();
        Self::from_parts(alice, bob, joint)
    }

    /// Zero-padded lift into an `n_a x n_b` scenario: setting `i` of this
    /// table lands on setting `alice_map[i]` (resp. `bob_map[i]`).
    pub fn lift(
        &self,
        n_a: usize,
        n_b: usize,
        alice_map: &[usize],
        bob_map: &[usize],
    ) -> Result<Self> {
        if alice_map.len() != self.n_a || bob_map.len() != self.n_b {
            return Err(Error::Shape("lift maps must cover every setting".into()));
        }
        check_keep("Alice", alice_map, n_a)?;
        check_keep("Bob", bob_map, n_b)?;
        let mut out = Self::zeros(n_a, n_b)?;
        for (x, &xx) in alice_map.iter().enumerate() {
            out.alice[xx] = self.alice[x];
        }
        for (y, &yy) in bob_map.iter().enumerate() {
            out.bob[yy] = self.bob[y];
            for (x, &xx) in alice_map.iter().enumerate() {
                out.set_joint(xx, yy, self.joint(x, y));
            }
        }
        Ok(out)
    }

    /// CSV rendering: a blank cell followed by the Alice entries, then one
    /// row per Bob setting holding the Bob entry and the joint row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let row = |lead: &str, vals: &[f64]| {
            let mut line = String::from(lead);
            for v in vals {
                line.push(',');
                line.push_str(&format_number(*v));
            }
            line.push('\n');
            line
        };
        out.push_str(&row("", &self.alice));
        for y in 0..self.n_b {
            out.push_str(&row(&format_number(self.bob[y]), self.joint_row(y)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_keep(party: &'static str, keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::Shape(format!("empty {party} index set")));
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange {
            party,
            index: bad + 1,
            max: n,
        });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Shape(format!(
            "{party} index set must be strictly increasing"
        )));
    }
    Ok(())
}

/// Shortest decimal form of `v`, with negative zero printed as `0`.
pub(crate) fn format_number(v: f64) -> String {
    format!("{}", v + 0.0)
}

/// A Bell functional: coefficients in Collins-Gisin layout plus the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionalDoc", into = "FunctionalDoc")]
pub struct BellFunctional {
    coefficients: CgTable,
    bound: f64,
}

#[derive(Serialize, Deserialize)]
struct FunctionalDoc {
    n_a: usize,
    n_b: usize,
    alice: Vec<f64>,
    bob: Vec<f64>,
    joint: Vec<Vec<f64>>,
    bound: f64,
}

impl TryFrom<FunctionalDoc> for BellFunctional {
    type Error = Error;

    fn try_from(doc: FunctionalDoc) -> Result<Self> {
        let coefficients = CgTable::try_from(TableDoc {
            n_a: doc.n_a,
            n_b: doc.n_b,
            alice: doc.alice,
            bob: doc.bob,
            joint: doc.joint,
        })?;
        BellFunctional::new(coefficients, doc.bound)
    }
}

impl From<BellFunctional> for FunctionalDoc {
    fn from(f: BellFunctional) -> Self {
        let doc = TableDoc::from(f.coefficients);
        FunctionalDoc {
            n_a: doc.n_a,
            n_b: doc.n_b,
            alice: doc.alice,
            bob: doc.bob,
            joint: doc.joint,
            bound: f.bound,
        }
    }
}

impl BellFunctional {
    pub fn new(coefficients: CgTable, bound: f64) -> Result<Self> {
        if !bound.is_finite() {
            return Err(Error::Shape("bound must be finite".into()));
        }
        Ok(Self {
            coefficients,
            bound,
        })
    }

    /// The functional that is identically zero, with bound 0.
    pub fn zero(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(CgTable::zeros(n_a, n_b)?, 0.0)
    }

    pub fn coefficients(&self) -> &CgTable {
        &self.coefficients
    }

    pub fn n_a(&self) -> usize {
        self.coefficients.n_a
    }

    pub fn n_b(&self) -> usize {
        self.coefficients.n_b
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Coefficient difference `self - other`. The bound of the result is
    /// `self.bound - other.bound`.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.coefficients.sub(&other.coefficients)?,
            self.bound - other.bound,
        )
    }

    /// True when every coefficient is an exact integer.
    pub fn is_integral(&self) -> bool {
        self.coefficients.coords().iter().all(|v| v.fract() == 0.0)
    }

    pub fn to_csv(&self) -> String {
        self.coefficients.to_csv()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("functional serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Value of the functional on a behavior.
pub fn evaluate(f: &BellFunctional, t: &CgTable) -> Result<f64> {
    f.coefficients.dot(t)
}

/// One failed validity condition, with 1-based settings.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    AliceMarginal { x: usize, value: f64 },
    BobMarginal { y: usize, value: f64 },
    /// Reconstructed `p(ab|xy)` below `-tol`.
    Probability {
        a: u8,
        b: u8,
        x: usize,
        y: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AliceMarginal { x, value } => {
                write!(f, "P(A{x}) = {value} outside [0, 1]")
            }
            Violation::BobMarginal { y, value } => write!(f, "P(B{y}) = {value} outside [0, 1]"),
            Violation::Probability { a, b, x, y, value } => {
                write!(f, "p({a}{b}|{x}{y}) = {value} is negative")
            }
        }
    }
}

/// The four outcome probabilities for setting pair `(x, y)` recovered from
/// a table, ordered `p(00), p(01), p(10), p(11)`.
pub fn outcome_probabilities(t: &CgTable, x: usize, y: usize) -> [f64; 4] {
    let (pa, pb, j) = (t.alice[x], t.bob[y], t.joint(x, y));
    [j, pa - j, pb - j, 1.0 - pa - pb + j]
}

/// Lists every violated positivity condition. Empty means the table is a
/// valid no-signaling behavior within `tol`.
pub fn validate(t: &CgTable, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let bad = |v: f64| v < -tol || v > 1.0 + tol;
    for (x, &v) in t.alice.iter().enumerate() {
        if bad(v) {
            out.push(Violation::AliceMarginal { x: x + 1, value: v });
        }
    }
    for (y, &v) in t.bob.iter().enumerate() {
        if bad(v) {
            out.push(Violation::BobMarginal { y: y + 1, value: v });
        }
    }
    for y in 0..t.n_b {
        for x in 0..t.n_a {
            for (k, &p) in outcome_probabilities(t, x, y).iter().enumerate() {
                if p < -tol {
                    out.push(Violation::Probability {
                        a: (k >> 1) as u8,
                        b: (k & 1) as u8,
                        x: x + 1,
                        y: y + 1,
                        value: p,
                    });
                }
            }
        }
    }
    out
}

/// Full behavior `p(ab|xy)` for two outcomes per setting.
#[derive(Debug, Clone, PartialEq)]
pub struct FullDistribution {
    n_a: usize,
    n_b: usize,
    /// `probs[x * n_b + y]` holds `[p(00), p(01), p(10), p(11)]`.
    probs: Vec<[f64; 4]>,
}

impl FullDistribution {
    /// `probs[x][y] = [p(00|xy), p(01|xy), p(10|xy), p(11|xy)]`.
    pub fn new(probs: Vec<Vec<[f64; 4]>>) -> Result<Self> {
        let n_a = probs.len();
        let n_b = probs.first().map_or(0, Vec::len);
        if n_a == 0 || n_b == 0 || probs.iter().any(|r| r.len() != n_b) {
            return Err(Error::Shape("ragged or empty distribution".into()));
        }
        Ok(Self {
            n_a,
            n_b,
            probs: probs.into_iter().flatten().collect(),
        })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// `p(ab|xy)` with 0-based settings.
    pub fn p(&self, a: u8, b: u8, x: usize, y: usize) -> f64 {
        self.probs[x * self.n_b + y][usize::from(a) * 2 + usize::from(b)]
    }
}

pub fn to_full(t: &CgTable) -> FullDistribution {
    let probs = (0..t.n_a)
        .flat_map(|x| (0..t.n_b).map(move |y| outcome_probabilities(t, x, y)))
        .collect();
    FullDistribution {
        n_a: t.n_a,
        n_b: t.n_b,
        probs,
    }
}

/// Collins-Gisin coordinates of a no-signaling distribution. Each marginal
/// is the average over the other party's settings; the spread of those
/// values must stay within `tol`.
pub fn from_full(d: &FullDistribution, tol: f64) -> Result<CgTable> {
    for x in 0..d.n_a {
        for y in 0..d.n_b {
            let total: f64 = d.probs[x * d.n_b + y].iter().sum();
            if (total - 1.0).abs() > tol {
                return Err(Error::Normalization {
                    x: x + 1,
                    y: y + 1,
                    total,
                });
            }
        }
    }
    let mut t = CgTable::zeros(d.n_a, d.n_b)?;
    let mut worst = 0.0f64;
    let mut spread = |vals: Vec<f64>| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(hi - lo);
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    for x in 0..d.n_a {
        let vals = (0..d.n_b)
            .map(|y| d.p(0, 0, x, y) + d.p(0, 1, x, y))
            .collect();
        t.alice[x] = spread(vals);
    }
    for y in 0..d.n_b {
        let vals = (0..d.n_a)
            .map(|x| d.p(0, 0, x, y) + d.p(1, 0, x, y))
            .collect();
        t.bob[y] = spread(vals);
    }
    if worst > tol {
        return Err(Error::Signaling {
            max_discrepancy: worst,
            tol,
        });
    }
    for x in 0..d.n_a {
        for y in 0..d.n_b {
            t.set_joint(x, y, d.p(0, 0, x, y));
        }
    }
    Ok(t)
}

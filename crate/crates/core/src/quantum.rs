//! Explicit quantum model for the `M_nn22` family.
//!
//! The state is Schmidt-diagonal in dimension `n`,
//! `sqrt((1 - eps^2)/(n - 1)) * sum_{k<n} |kk> + eps |nn>`, and every
//! setting measures a real rank-one projector (outcome 0) onto one of the
//! unit vectors built below. Everything here is real arithmetic.

use crate::cg::CgTable;
use crate::error::{Error, Result};

/// State amplitudes and measurement vectors for `n` settings per party.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumConstruction {
    n: usize,
    q0: f64,
    eps: f64,
    p_seq: Vec<f64>,
    q_seq: Vec<f64>,
    alice_vecs: Vec<Vec<f64>>,
    bob_vecs: Vec<Vec<f64>>,
    schmidt: Vec<f64>,
}

/// `eps^2 = (1 - q0^2) / (1 + ((n-1)^2 - 1) q0^2)`.
pub fn epsilon_squared(n: usize, q0: f64) -> f64 {
    let m = (n - 1) as f64;
    let q2 = q0 * q0;
    (1.0 - q2) / (1.0 + (m * m - 1.0) * q2)
}

/// Closed-form Bell value `eps^2 (n q0^2 - (n - 1))`.
pub fn bell_value_closed(n: usize, q0: f64) -> f64 {
    epsilon_squared(n, q0) * (q0 * q0 * n as f64 - (n - 1) as f64)
}

/// Left end of the violation window, `sqrt((n-1)/n)`.
pub fn violation_threshold(n: usize) -> f64 {
    ((n - 1) as f64 / n as f64).sqrt()
}

/// `s_{k+1} = sqrt(1 - 1/(n-k)^2) s_k` for `k >= 1`, seeded with `s_0, s_1`.
fn decay_sequence(n: usize, s0: f64, s1: f64) -> Vec<f64> {
    let mut seq = vec![s0, s1];
    for k in 1..n.saturating_sub(1) {
        let r = (n - k) as f64;
        let next = (1.0 - 1.0 / (r * r)).sqrt() * seq[k];
        seq.push(next);
    }
    seq.truncate(n.max(2));
    seq
}

/// Measurement vector for setting `x` (1-based, `x >= 2` or the generic
/// Bob pattern at `x = 1`). Coordinate `j` (1-based) multiplies `|j>`.
///
/// For `x < n`: coordinate `n - x` is `-s_x`, coordinate `n - k` is
/// `s_k / (n - k)` for `k = 1..x-1`, coordinate `n` is `s_0`.
/// For `x = n`: coordinate 1 is `+s_{n-1}`, the rest as for `x = n - 1`.
fn setting_vector(n: usize, x: usize, seq: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[n - 1] = seq[0];
    let upto = if x < n { x } else { n - 1 };
    for k in 1..upto {
        v[n - k - 1] = seq[k] / (n - k) as f64;
    }
    if x < n {
        v[n - x - 1] = -seq[x];
    } else {
        v[0] = seq[n - 1];
    }
    v
}

impl QuantumConstruction {
    /// Construction with `eps` tied to `q0` through [`epsilon_squared`].
    pub fn build(n: usize, q0: f64) -> Result<Self> {
        Self::check(n, q0)?;
        Self::with_eps(n, q0, epsilon_squared(n, q0).sqrt())
    }

    /// Construction with an independent `eps`. Only for exploration: the
    /// closed forms for `Q(A_x B_y)` hold for any `eps`, the Bell value
    /// formula only on the tied curve.
    pub fn with_eps(n: usize, q0: f64, eps: f64) -> Result<Self> {
        Self::check(n, q0)?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("eps = {eps} outside [0, 1]")));
        }
        let p_seq = decay_sequence(n, (1.0 / n as f64).sqrt(), violation_threshold(n));
        let q_seq = decay_sequence(n, q0, (1.0 - q0 * q0).max(0.0).sqrt());

        let mut alice_vecs = Vec::with_capacity(n);
        let mut first = vec![0.0; n];
        first[n - 1] = 1.0;
        alice_vecs.push(first);
        alice_vecs.extend((2..=n).map(|x| setting_vector(n, x, &p_seq)));
        let bob_vecs = (1..=n).map(|y| setting_vector(n, y, &q_seq)).collect();

        let bulk = ((1.0 - eps * eps) / (n - 1) as f64).sqrt();
        let mut schmidt = vec![bulk; n];
        schmidt[n - 1] = eps;

        Ok(Self {
            n,
            q0,
            eps,
            p_seq,
            q_seq,
            alice_vecs,
            bob_vecs,
            schmidt,
        })
    }

    fn check(n: usize, q0: f64) -> Result<()> {
        if n < 2 {
            return Err(Error::Domain(format!("n must be at least 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&q0) {
            return Err(Error::Domain(format!("q0 = {q0} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn p_seq(&self) -> &[f64] {
        &self.p_seq
    }

    pub fn q_seq(&self) -> &[f64] {
        &self.q_seq
    }

    pub fn alice_vecs(&self) -> &[Vec<f64>] {
        &self.alice_vecs
    }

    pub fn bob_vecs(&self) -> &[Vec<f64>] {
        &self.bob_vecs
    }

    pub fn schmidt(&self) -> &[f64] {
        &self.schmidt
    }

    /// Born-rule behavior: `P(A_x B_y) = (sum_k lambda_k a_x[k] b_y[k])^2`,
    /// `P(A_x) = sum_k lambda_k^2 a_x[k]^2`, likewise for Bob.
    pub fn behavior(&self) -> CgTable {
        let marginal = |v: &[f64]| -> f64 {
            v.iter()
                .zip(&self.schmidt)
                .map(|(c, l)| (l * c).powi(2))
                .sum()
        };
        let mut t = CgTable::zeros(self.n, self.n).expect("n >= 2");
        for (x, a) in self.alice_vecs.iter().enumerate() {
            t.set_alice(x, marginal(a));
        }
        for (y, b) in self.bob_vecs.iter().enumerate() {
            t.set_bob(y, marginal(b));
            for (x, a) in self.alice_vecs.iter().enumerate() {
                let amp: f64 = (0..self.n).map(|k| self.schmidt[k] * a[k] * b[k]).sum();
                t.set_joint(x, y, amp * amp);
            }
        }
        t
    }

    /// Compares the Born-rule table against the closed-form expressions
    /// for `Q(A_1)`, `Q(B_y)`, `Q(A_1 B_y)`, `Q(A_x B_x)` (`x >= 2`) and
    /// `Q(A_x B_y)` (`x > y`). Entries with `y > x >= 2` have no closed
    /// form and are not listed.
    pub fn closed_form_check(&self) -> ClosedFormReport {
        let t = self.behavior();
        let n = self.n;
        let e2 = self.eps * self.eps;
        let (p0, p1, q0, q1) = (self.p_seq[0], self.p_seq[1], self.q_seq[0], self.q_seq[1]);
        let bulk = self.schmidt[0];

        let marg_b = (1.0 - e2) / (n - 1) as f64 * (1.0 - q0 * q0) + e2 * q0 * q0;
        let diag = (bulk * p1 * q1 + self.eps * p0 * q0).powi(2);
        let below = (bulk * p1 * q1 / (1.0 - n as f64) + self.eps * p0 * q0).powi(2);

        let mut entries = vec![ClosedFormEntry::new("Q(A1)".into(), t.alice()[0], e2)];
        for y in 0..n {
            entries.push(ClosedFormEntry::new(format!("Q(B{})", y + 1), t.bob()[y], marg_b));
        }
        for y in 0..n {
            entries.push(ClosedFormEntry::new(
                format!("Q(A1B{})", y + 1),
                t.joint(0, y),
                e2 * q0 * q0,
            ));
        }
        for x in 1..n {
            entries.push(ClosedFormEntry::new(
                format!("Q(A{0}B{0})", x + 1),
                t.joint(x, x),
                diag,
            ));
        }
        for x in 1..n {
            for y in 0..x {
                entries.push(ClosedFormEntry::new(
                    format!("Q(A{}B{})", x + 1, y + 1),
                    t.joint(x, y),
                    below,
                ));
            }
        }
        ClosedFormReport { entries }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEntry {
    pub label: String,
    pub direct: f64,
    pub closed: f64,
    pub abs_diff: f64,
}

impl ClosedFormEntry {
    fn new(label: String, direct: f64, closed: f64) -> Self {
        Self {
            label,
            direct,
            closed,
            abs_diff: (direct - closed).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormReport {
    pub entries: Vec<ClosedFormEntry>,
}

impl ClosedFormReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.entries.iter().map(|e| e.abs_diff).fold(0.0, f64::max)
    }
}

/// Maximizer of [`bell_value_closed`] over `q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub q0: f64,
    pub value: f64,
}

const GRID_POINTS: usize = 10_000;

/// Default `q0` accuracy for [`optimize_q0`].
pub const DEFAULT_Q0_TOL: f64 = 1e-10;

/// Grid scan of the open window `(sqrt((n-1)/n), 1)` followed by golden
/// section refinement around the best grid point.
pub fn optimize_q0(n: usize, abs_tol: f64) -> Result<Optimum> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {abs_tol}")));
    }
    let f = |q: f64| bell_value_closed(n, q);
    let lo = violation_threshold(n);
    let step = (1.0 - lo) / (GRID_POINTS + 1) as f64;
    let grid = |i: usize| lo + step * i as f64;
    let best = (1..=GRID_POINTS)
        .max_by(|&i, &j| f(grid(i)).total_cmp(&f(grid(j))).then(j.cmp(&i)))
        .expect("nonempty grid");
    let q0 = golden_section_max(f, grid(best - 1), grid(best + 1), abs_tol);
    Ok(Optimum { q0, value: f(q0) })
}

/// Maximizes a unimodal `f` on `[a, b]` until the bracket is narrower
/// than `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        // the bracket stops shrinking once it reaches float resolution
        if b - a <= f64::EPSILON * b.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

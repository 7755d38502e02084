//! Generators for CHSH, the `I_nn22` / `M_nn22` families, and the reduced
//! functionals used to bound `M_nn22` on pairwise-local behaviors.
//!
//! All coefficients are small integers stored exactly in `f64`, and every
//! bound is 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cg::{BellFunctional, CgTable};
use crate::error::{Error, Result};

/// An unordered pair of Bob settings `(s, t)` with `1 <= s < t`, labelled
/// 1-based as in printed tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairLabel {
    s: usize,
    t: usize,
}

impl PairLabel {
    pub fn new(s: usize, t: usize) -> Result<Self> {
        if s == 0 || s >= t {
            return Err(Error::Domain(format!(
                "pair ({s}, {t}) must satisfy 1 <= s < t"
            )));
        }
        Ok(Self { s, t })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// 0-based Bob indices `[s - 1, t - 1]`.
    pub fn indices(&self) -> [usize; 2] {
        [self.s - 1, self.t - 1]
    }

    /// All `n(n-1)/2` pairs for `n` settings in lexicographic order.
    pub fn all(n: usize) -> Vec<PairLabel> {
        (1..=n)
            .flat_map(|s| (s + 1..=n).map(move |t| PairLabel { s, t }))
            .collect()
    }

    fn check_within(&self, n: usize) -> Result<()> {
        if self.t > n {
            return Err(Error::Domain(format!(
                "pair ({}, {}) exceeds {n} settings",
                self.s, self.t
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.t)
    }
}

impl std::str::FromStr for PairLabel {
    type Err = Error;

    /// Parses `"s,t"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse pair {s:?}, expected \"s,t\""));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        PairLabel::new(a, b)
    }
}

/// CHSH in Collins-Gisin form:
/// `p(00|11) + p(00|12) + p(00|21) - p(00|22) - p_A(0|1) - p_B(0|1) <= 0`.
pub fn chsh() -> BellFunctional {
    let coef = CgTable::from_parts(
        vec![-1.0, 0.0],
        vec![-1.0, 0.0],
        vec![vec![1.0, 1.0], vec![1.0, -1.0]],
    )
    .expect("fixed shape");
    BellFunctional::new(coef, 0.0).expect("finite bound")
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!("n must be at least {min}, got {n}")));
    }
    Ok(())
}

/// `M_nn22`: Alice coefficient `-(n-1)` on setting 1, Bob coefficient
/// `-(n-y)` on setting `y`, and joint coefficient `+1` when `x + y <= n + 1`,
/// `-1` when `x + y = n + 2`, 0 otherwise (1-based `x`, `y`).
pub fn m_nn22(n: usize) -> Result<BellFunctional> {
    check_n(n, 2)?;
    let mut coef = CgTable::zeros(n, n)?;
    coef.set_alice(0, -((n - 1) as f64));
    for y in 1..=n {
        coef.set_bob(y - 1, y as f64 - n as f64);
        for x in 1..=n {
            let c = match (x + y).cmp(&(n + 2)) {
                std::cmp::Ordering::Less => 1.0,
                std::cmp::Ordering::Equal => -1.0,
                std::cmp::Ordering::Greater => 0.0,
            };
            coef.set_joint(x - 1, y - 1, c);
        }
    }
    BellFunctional::new(coef, 0.0)
}

/// `I_nn22 = M_nn22 + (n - 2) P(A_1)`.
pub fn i_nn22(n: usize) -> Result<BellFunctional> {
    let m = m_nn22(n)?;
    let mut coef = m.coefficients().clone();
    coef.set_alice(0, -1.0);
    BellFunctional::new(coef, 0.0)
}

/// `M_(n-1)(n-1)22` together with the settings it lives on inside the
/// `n`-setting scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SubEmbedding {
    pub functional: BellFunctional,
    /// 0-based Alice settings kept: `0..n-1` (setting `n` dropped).
    pub alice_keep: Vec<usize>,
    /// 0-based Bob settings kept: `1..n` (setting 1 dropped).
    pub bob_keep: Vec<usize>,
}

impl SubEmbedding {
    /// The sub-functional zero-padded back to the `n`-setting scenario.
    pub fn lifted(&self) -> Result<BellFunctional> {
        let n = self.alice_keep.len() + 1;
        let coef = self
            .functional
            .coefficients()
            .lift(n, n, &self.alice_keep, &self.bob_keep)?;
        BellFunctional::new(coef, self.functional.bound())
    }
}

/// On every no-signaling table `T`,
/// `M_nn22(T) <= M_(n-1)(n-1)22(restrict(T, alice_keep, bob_keep))`.
pub fn sub_embedding(n: usize) -> Result<SubEmbedding> {
    check_n(n, 3)?;
    Ok(SubEmbedding {
        functional: m_nn22(n - 1)?,
        alice_keep: (0..n - 1).collect(),
        bob_keep: (1..n).collect(),
    })
}

/// The CHSH lifting that `M_nn22` dominates for Bob pair `(s, t)`.
///
/// Supported on Alice settings `{1, n + 2 - t}` and Bob settings `{s, t}`:
/// `+P(A_1 B_s) + P(A_p B_s) + P(A_1 B_t) - P(A_p B_t) - P(A_1) - P(B_s)`
/// with `p = n + 2 - t`.
pub fn reduced_chsh(n: usize, pair: PairLabel) -> Result<BellFunctional> {
    check_n(n, 2)?;
    pair.check_within(n)?;
    let [s, t] = pair.indices();
    let partner = n + 1 - pair.t();
    let mut coef = CgTable::zeros(n, n)?;
    coef.set_alice(0, -1.0);
    coef.set_bob(s, -1.0);
    coef.set_joint(0, s, 1.0);
    coef.set_joint(partner, s, 1.0);
    coef.set_joint(0, t, 1.0);
    coef.set_joint(partner, t, -1.0);
    BellFunctional::new(coef, 0.0)
}

/// Alice settings (0-based) carrying the reduced functional for `pair`.
pub fn reduced_support(n: usize, pair: PairLabel) -> [usize; 2] {
    [0, n + 1 - pair.t()]
}

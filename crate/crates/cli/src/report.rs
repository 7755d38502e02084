//! Verification reports and the claim pipeline behind `mnn22 verify`.

use std::collections::BTreeMap;
use std::time::Instant;

use log::info;
use mnn22_core::polytope::CLAIM_TOL;
use mnn22_core::quantum::DEFAULT_Q0_TOL;
use mnn22_core::{
    domination_check, evaluate, gns_max, local_max, m_nn22, optimize_q0, reduced_chsh,
    sub_embedding, PairLabel, QuantumConstruction, Result,
};
use serde::Serialize;
use serde_json::Value;

/// Default tolerance for the direct/closed-form agreement claim.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// How `computed` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    /// `|computed - expected| <= tolerance`
    Equal,
    /// `computed <= expected + tolerance`
    AtMost,
    /// `computed > expected + tolerance`
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub parameters: BTreeMap<String, Value>,
    pub computed: f64,
    pub expected: f64,
    pub kind: ClaimKind,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>, computed: f64, expected: f64, kind: ClaimKind, tolerance: f64) -> Self {
        let pass = match kind {
            ClaimKind::Equal => (computed - expected).abs() <= tolerance,
            ClaimKind::AtMost => computed <= expected + tolerance,
            ClaimKind::Exceeds => computed > expected + tolerance,
        };
        Self {
            claim: claim.into(),
            parameters: BTreeMap::new(),
            computed: computed + 0.0,
            expected: expected + 0.0,
            kind,
            tolerance,
            pass,
            runtime_ms: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum ClaimGroup {
    All,
    Local,
    Gns,
    Domination,
    Embedding,
    Quantum,
}

impl ClaimGroup {
    fn includes(self, other: ClaimGroup) -> bool {
        self == ClaimGroup::All || self == other
    }
}

/// Runs every claim of `group` for `n`, sorted by claim id. `tol` replaces
/// every per-claim default tolerance when given.
pub fn verify(n: usize, group: ClaimGroup, tol: Option<f64>, timing: bool) -> Result<Vec<VerificationReport>> {
    let lp_tol = tol.unwrap_or(CLAIM_TOL);
    let exact_tol = tol.unwrap_or(0.0);
    let mut out = Vec::new();
    let timed = |out: &mut Vec<VerificationReport>, run: &dyn Fn() -> Result<Vec<VerificationReport>>| {
        let start = Instant::now();
        let mut reports = run()?;
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut reports {
            info!("{} computed={} pass={}", r.claim, r.computed, r.pass);
            if timing {
                r.runtime_ms = Some(ms);
            }
        }
        out.extend(reports);
        Ok::<(), mnn22_core::Error>(())
    };
    let f = m_nn22(n)?;
    let pairs = PairLabel::all(n);

    if group.includes(ClaimGroup::Local) {
        timed(&mut out, &|| {
            let mut v = vec![VerificationReport::new("local.m_nn22", local_max(&f)?.value, 0.0, ClaimKind::Equal, exact_tol)
                .with("n", n)];
            for &p in &pairs {
                let value = local_max(&reduced_chsh(n, p)?)?.value;
                v.push(
                    VerificationReport::new(format!("local.reduced{p}"), value, 0.0, ClaimKind::Equal, exact_tol)
                        .with("n", n)
                        .with("pair", p.to_string()),
                );
            }
            Ok(v)
        })?;
    }
    if group.includes(ClaimGroup::Gns) {
        timed(&mut out, &|| {
            let g = gns_max(&f)?;
            let mut v = vec![VerificationReport::new("gns.max", g.value, 0.0, ClaimKind::AtMost, lp_tol)
                .with("n", n)
                .with("worst_pair", g.worst_pair.to_string())];
            for &(p, value) in &g.per_pair {
                v.push(
                    VerificationReport::new(format!("gns.pair{p}"), value, 0.0, ClaimKind::AtMost, lp_tol)
                        .with("n", n)
                        .with("pair", p.to_string()),
                );
            }
            Ok(v)
        })?;
    }
    if group.includes(ClaimGroup::Domination) {
        timed(&mut out, &|| {
            pairs
                .iter()
                .map(|&p| {
                    let d = domination_check(&f, &reduced_chsh(n, p)?)?;
                    Ok(VerificationReport::new(format!("domination.reduced{p}"), d, 0.0, ClaimKind::AtMost, lp_tol)
                        .with("n", n)
                        .with("pair", p.to_string()))
                })
                .collect()
        })?;
    }
    // the embedding needs a smaller member of the family, so n = 2 has none
    if group.includes(ClaimGroup::Embedding) && (n >= 3 || group == ClaimGroup::Embedding) {
        timed(&mut out, &|| {
            let lifted = sub_embedding(n)?.lifted()?;
            let d = domination_check(&f, &lifted)?;
            Ok(vec![VerificationReport::new("domination.embedding", d, 0.0, ClaimKind::AtMost, lp_tol).with("n", n)])
        })?;
    }
    if group.includes(ClaimGroup::Quantum) {
        timed(&mut out, &|| {
            let opt = optimize_q0(n, DEFAULT_Q0_TOL)?;
            let direct = evaluate(&f, &QuantumConstruction::build(n, opt.q0)?.behavior())?;
            let pos_tol = tol.unwrap_or(CLAIM_TOL);
            Ok(vec![
                VerificationReport::new("quantum.closed", opt.value, 0.0, ClaimKind::Exceeds, pos_tol)
                    .with("n", n)
                    .with("q0", opt.q0),
                VerificationReport::new("quantum.direct", direct, 0.0, ClaimKind::Exceeds, pos_tol)
                    .with("n", n)
                    .with("q0", opt.q0),
                VerificationReport::new(
                    "quantum.agreement",
                    direct,
                    opt.value,
                    ClaimKind::Equal,
                    tol.unwrap_or(AGREEMENT_TOL),
                )
                .with("n", n)
                .with("q0", opt.q0),
            ])
        })?;
    }
    out.sort_by(|a, b| a.claim.cmp(&b.claim));
    Ok(out)
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[VerificationReport]) -> String {
    reports
        .iter()
        .map(|r| serde_json::to_string(r).expect("report serializes") + "\n")
        .collect()
}

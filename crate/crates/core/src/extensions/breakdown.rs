//! BFDN when an adversary decides each round which robots may move.

use crate::bfdn::Bfdn;
use crate::engine::{MobilityMask, RunConfig, RunTrace, StopRule};
use crate::error::{EngineError, MaskError};
use crate::tree::{Tree, World};

/// `2n/k + D^2 (ln k + 2)`: the A(M) level by which exploration must be
/// complete.
pub fn breakdown_threshold(n: usize, depth: u32, k: usize) -> f64 {
    let d = f64::from(depth);
    2.0 * n as f64 / k as f64 + d * d * ((k as f64).ln() + 2.0)
}

/// Parses `ones`, `bernoulli:p`, `roundrobin`, `heaviest` or `file:path`.
/// `seed` drives the Bernoulli mask.
pub fn parse_mask(spec: &str, k: usize, seed: u64) -> Result<MobilityMask, MaskError> {
    let spec = spec.trim();
    match spec.split_once(':') {
        None => match spec {
            "ones" => Ok(MobilityMask::Ones),
            "roundrobin" => Ok(MobilityMask::RoundRobin),
            "heaviest" => Ok(MobilityMask::BlockHeaviestAnchor),
            _ => Err(MaskError::Unknown(spec.into())),
        },
        Some(("bernoulli", p)) => {
            let p: f64 = p.parse().map_err(|_| MaskError::Probability(p.into()))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(MaskError::Probability(p.to_string()));
            }
            Ok(MobilityMask::Bernoulli { p, seed })
        }
        Some(("file", path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| MaskError::Io { path: path.into(), msg: e.to_string() })?;
            Ok(MobilityMask::Explicit(read_mask_file(&text, k)?))
        }
        _ => Err(MaskError::Unknown(spec.into())),
    }
}

/// One row of exactly `k` bits per non-empty line; `#` starts a comment.
/// Rows repeat cyclically when the run outlasts the file.
pub fn read_mask_file(text: &str, k: usize) -> Result<Vec<Vec<bool>>, MaskError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let bits: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
        if bits.is_empty() {
            continue;
        }
        let row = bits
            .iter()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(MaskError::Line { line: idx + 1, msg: format!("unexpected character `{c}`") }),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        if row.len() != k {
            return Err(MaskError::Line { line: idx + 1, msg: format!("expected {k} bits, found {}", row.len()) });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(MaskError::Line { line: 0, msg: "no rows".into() });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct BreakdownRun {
    pub trace: RunTrace,
    pub threshold: f64,
    /// First round at which A(M) reached the threshold, if it did before
    /// exploration ended.
    pub threshold_round: Option<usize>,
    /// Every edge was traversed by the threshold round (or the run ended
    /// explored before reaching it).
    pub explored_at_threshold: bool,
}

/// Runs BFDN under `mask` until the tree is explored or A(M) reaches the
/// threshold, whichever comes first.
pub fn run_with_breakdowns(tree: &Tree, k: usize, mask: MobilityMask) -> Result<BreakdownRun, EngineError> {
    let threshold = breakdown_threshold(tree.n(), tree.depth(), k);
    let limit = (threshold.ceil() as usize + 1) * k.max(1) * 100 + 1000;
    let config = RunConfig {
        mobility_budget: Some(threshold),
        ..RunConfig::new(k).with_mask(mask).with_stop(StopRule::Explored).with_round_limit(limit)
    };
    let mut bfdn = Bfdn::new(tree, k);
    let trace = crate::engine::run(tree, &mut bfdn, &config)?;
    let rows = trace.mask_rows();
    let mut permitted = 0usize;
    let mut threshold_round = None;
    for (t, row) in rows.iter().enumerate() {
        permitted += row.iter().filter(|&&b| b).count();
        if permitted as f64 / k as f64 >= threshold {
            threshold_round = Some(t + 1);
            break;
        }
    }
    Ok(BreakdownRun { explored_at_threshold: trace.explored, threshold, threshold_round, trace })
}

//! Closed-form runtime bounds. Logarithms are natural.

use serde::Serialize;

pub use crate::bfdn::theorem1_bound as bfdn_bound;

/// `4n/k^{1/ℓ} + 2^{ℓ+1}(ℓ + 1 + min{ln Δ, ln k / ℓ}) D^{1+1/ℓ}`.
pub fn bfdn_ell_bound(n: usize, depth: u32, k: usize, max_degree: usize, ell: u32) -> f64 {
    let l = f64::from(ell.max(1));
    let kf = k.max(1) as f64;
    let lg = (max_degree.max(1) as f64).ln().min(kf.ln() / l);
    4.0 * n as f64 / kf.powf(1.0 / l) + 2f64.powf(l + 1.0) * (l + 1.0 + lg) * f64::from(depth).powf(1.0 + 1.0 / l)
}

/// Offline upper bound `2(n/k + D)`.
pub fn offline_bound(n: usize, depth: u32, k: usize) -> f64 {
    2.0 * (n as f64 / k.max(1) as f64 + f64::from(depth))
}

/// Offline lower bound `max{2n/k, 2D}`.
pub fn lower_bound(n: usize, depth: u32, k: usize) -> f64 {
    (2.0 * n as f64 / k.max(1) as f64).max(2.0 * f64::from(depth))
}

/// `runtime <= bound`, allowing only floating-point rounding in `bound`.
pub fn within(runtime: usize, bound: f64) -> bool {
    runtime as f64 <= bound + 1e-9 * bound.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub algorithm: String,
    pub value: f64,
    pub online: bool,
    /// Smallest value among the online algorithms.
    pub best_online: bool,
}

pub fn bound_table(n: usize, depth: u32, k: usize, max_degree: usize, ells: &[u32]) -> Vec<BoundRow> {
    let mut rows = vec![BoundRow {
        algorithm: "bfdn".into(),
        value: bfdn_bound(n, depth, k, max_degree),
        online: true,
        best_online: false,
    }];
    for &l in ells {
        rows.push(BoundRow {
            algorithm: format!("bfdn_ell{l}"),
            value: bfdn_ell_bound(n, depth, k, max_degree, l),
            online: true,
            best_online: false,
        });
    }
    rows.push(BoundRow {
        algorithm: "offline".into(),
        value: offline_bound(n, depth, k),
        online: false,
        best_online: false,
    });
    rows.push(BoundRow {
        algorithm: "lower".into(),
        value: lower_bound(n, depth, k),
        online: false,
        best_online: false,
    });
    let best = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.online)
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|(i, _)| i);
    if let Some(i) = best {
        rows[i].best_online = true;
    }
    rows
}

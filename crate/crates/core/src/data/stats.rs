use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DataPairSet, OutputTrajectories, ZERO_WINDOW_NORM};

/// Empirical index statistic `ξ_k(ω_N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub k: usize,
    /// `max_i ‖stack(y_k..y_{2k-1})‖ / ‖stack(y_0..y_{k-1})‖`; infinite when
    /// some prefix window vanishes.
    #[serde(with = "crate::serde_ext")]
    pub xi: f64,
}

/// `ξ_k` for each requested `k`. Every `k` must satisfy `1 ≤ k ≤ ⌊T/2⌋`.
pub fn xi_estimates(data: &OutputTrajectories, ks: impl IntoIterator<Item = usize>) -> Result<Vec<IndexEstimate>> {
    let half = data.horizon() / 2;
    ks.into_iter()
        .map(|k| {
            if k == 0 || k > half {
                return Err(Error::InvalidParameter(format!(
                    "index window k = {k} must lie in 1..={half} (T = {})",
                    data.horizon()
                )));
            }
            let mut xi: f64 = 0.0;
            for i in 0..data.len() {
                let v = data.window(i, 0, k).norm();
                let next = data.window(i, k, k).norm();
                let ratio = if v < ZERO_WINDOW_NORM { f64::INFINITY } else { next / v };
                xi = xi.max(ratio);
            }
            Ok(IndexEstimate { k, xi })
        })
        .collect()
}

/// Outcome of the threshold rule on a list of `ξ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDecision {
    pub estimates: Vec<IndexEstimate>,
    #[serde(with = "crate::serde_ext")]
    pub threshold: f64,
    /// Whether the threshold was supplied rather than derived from the data.
    pub user_threshold: bool,
    /// Smallest `k` with `ξ_k ≤ threshold`.
    pub h_hat: Option<usize>,
}

/// Applies the rule "smallest `k` with `ξ_k ≤ threshold`". Without a user
/// threshold the default is ten times the median of the finite `ξ_k`.
pub fn estimate_index(estimates: Vec<IndexEstimate>, threshold: Option<f64>) -> Result<IndexDecision> {
    let user_threshold = threshold.is_some();
    let threshold = match threshold {
        Some(t) if t.is_nan() || t < 0.0 => {
            return Err(Error::InvalidParameter(format!("index threshold {t} must be non-negative")))
        }
        Some(t) => t,
        None => {
            let mut finite: Vec<f64> = estimates.iter().map(|e| e.xi).filter(|x| x.is_finite()).collect();
            if finite.is_empty() {
                f64::NAN
            } else {
                finite.sort_by(f64::total_cmp);
                let m = finite.len();
                let median = if m % 2 == 1 {
                    finite[m / 2]
                } else {
                    0.5 * (finite[m / 2 - 1] + finite[m / 2])
                };
                10.0 * median
            }
        }
    };
    let mut sorted = estimates.clone();
    sorted.sort_by_key(|e| e.k);
    let h_hat = sorted.iter().find(|e| e.xi <= threshold).map(|e| e.k);
    Ok(IndexDecision {
        estimates,
        threshold,
        user_threshold,
        h_hat,
    })
}

/// Largest and smallest start-window norm over the pair set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaStats {
    pub zeta_max: f64,
    pub zeta_min: f64,
}

pub fn zeta_stats(pairs: &DataPairSet) -> Result<ZetaStats> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("zeta statistics need a nonempty pair set".into()));
    }
    let (zeta_max, zeta_min) = pairs
        .pairs
        .iter()
        .map(|d| d.v.norm())
        .fold((0.0_f64, f64::INFINITY), |(hi, lo), x| (hi.max(x), lo.min(x)));
    Ok(ZetaStats { zeta_max, zeta_min })
}

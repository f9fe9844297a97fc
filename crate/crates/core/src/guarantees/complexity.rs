//! Sample-size planning and the instability statement that follows from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bounds::scenario_dimension;
use super::special::{phi, reg_inc_beta};

/// Largest sample count any search will consider.
pub const MAX_SAMPLES: u64 = 1 << 50;

/// Inputs to the sample-complexity estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    /// Relative accuracy `ϵ` of `γ*` against the robust optimum.
    pub varepsilon: f64,
    pub beta: f64,
    pub n: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub k: usize,
    pub p: usize,
    #[serde(rename = "M")]
    pub modes: usize,
    pub c: f64,
    pub lambda_bar: f64,
    #[serde(rename = "chi_Q")]
    pub chi_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexity {
    pub epsilon_target: f64,
    pub d: u64,
    /// Smallest `N` with `φ(ε_target; d, N) ≤ β`.
    #[serde(rename = "N_upper")]
    pub n_upper: u64,
    /// `⌈d / (β ε_target)⌉`.
    pub closed_form: u64,
}

/// Smallest `N ≥ from` satisfying a predicate that is monotone in `N`, by
/// doubling then bisection. `None` when no `N ≤ MAX_SAMPLES` qualifies.
pub fn min_samples(from: u64, mut holds: impl FnMut(u64) -> Result<bool>) -> Result<Option<u64>> {
    let from = from.max(1);
    if holds(from)? {
        return Ok(Some(from));
    }
    let mut lo = from;
    let mut hi = from.saturating_mul(2);
    loop {
        if hi > MAX_SAMPLES {
            return Ok(None);
        }
        if holds(hi)? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub fn sample_complexity(params: &ComplexityParams) -> Result<SampleComplexity> {
    let ComplexityParams {
        varepsilon,
        beta,
        n,
        horizon,
        k,
        p,
        modes,
        c,
        lambda_bar,
        chi_q,
    } = *params;
    if !(varepsilon > 0.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sample complexity needs varepsilon > 0 and beta in (0, 1), got {varepsilon}, {beta}"
        )));
    }
    if n < 2 || k == 0 || p == 0 || modes == 0 {
        return Err(Error::InvalidParameter("sample complexity needs n >= 2 and positive k, p, M".into()));
    }
    if horizon <= k {
        return Err(Error::DegenerateHorizon);
    }
    if !(c >= 1.0 && lambda_bar >= 1.0 && chi_q >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "c, lambda_bar and chi_Q must be at least 1, got {c}, {lambda_bar}, {chi_q}"
        )));
    }
    let shift = (horizon - k) as f64;
    // 1 - (1+ϵ)^{-2(T-k)} without cancellation for small ϵ
    let level = -(-2.0 * shift * varepsilon.ln_1p()).exp_m1();
    let cap = reg_inc_beta(level, 0.5 * (n as f64 - 1.0), 0.5)?;
    let log_scale =
        horizon as f64 * (modes as f64).ln() + chi_q.ln() + 0.5 * (n as f64 - 1.0) * (c * lambda_bar).ln();
    let epsilon_target = (cap.ln() - log_scale).exp();
    if !(epsilon_target > 0.0 && epsilon_target < 1.0) {
        return Err(Error::ParameterInfeasible(format!(
            "target violation level {epsilon_target:e} is outside (0, 1)"
        )));
    }
    let d = scenario_dimension(k, p);
    let closed = (d as f64 / (beta * epsilon_target)).ceil();
    if !(closed <= MAX_SAMPLES as f64) {
        return Err(Error::ParameterInfeasible(format!(
            "closed-form sample size {closed:e} exceeds {MAX_SAMPLES}"
        )));
    }
    let n_upper = min_samples(d, |n_samples| Ok(phi(epsilon_target, d, n_samples)? <= beta))?
        .ok_or_else(|| Error::ParameterInfeasible(format!("no N up to {MAX_SAMPLES} reaches confidence {beta}")))?;
    Ok(SampleComplexity {
        epsilon_target,
        d,
        n_upper,
        closed_form: closed as u64,
    })
}

/// The risk statement for unstable systems instantiated with a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityRisk {
    pub gamma_star: f64,
    pub varepsilon: f64,
    pub beta: f64,
    /// `1/(1+ϵ)`.
    pub threshold: f64,
    #[serde(rename = "N")]
    pub n_samples: u64,
    #[serde(rename = "N_s")]
    pub n_required: u64,
    /// Whether `N ≥ N_s`, so that the statement holds.
    pub emitted: bool,
    /// `γ* < 1/(1+ϵ)`: the run lies in the event whose probability is bounded.
    pub below_threshold: bool,
    /// `γ*` equals the threshold up to rounding.
    pub boundary: bool,
    pub statement: String,
}

pub fn instability_risk(gamma_star: f64, varepsilon: f64, beta: f64, n_samples: u64, n_required: u64) -> InstabilityRisk {
    let threshold = 1.0 / (1.0 + varepsilon);
    let boundary = (gamma_star - threshold).abs() <= 1e-12 * threshold;
    let below_threshold = gamma_star < threshold && !boundary;
    let emitted = n_samples >= n_required;
    let statement = if !emitted {
        format!("warning: N = {n_samples} is below N_s = {n_required}; no instability statement at varepsilon = {varepsilon}")
    } else {
        let position = if boundary {
            "on the threshold"
        } else if below_threshold {
            "below the threshold"
        } else {
            "above the threshold, statement not applicable to this run"
        };
        format!(
            "if rho > 1 then P{{gamma* < {threshold}}} <= {beta} for N = {n_samples} >= N_s = {n_required}; observed gamma* = {gamma_star} ({position})"
        )
    };
    InstabilityRisk {
        gamma_star,
        varepsilon,
        beta,
        threshold,
        n_samples,
        n_required,
        emitted,
        below_threshold,
        boundary,
        statement,
    }
}

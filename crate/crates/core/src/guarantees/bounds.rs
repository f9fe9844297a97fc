//! Upper bounds on the joint spectral radius derived from a scenario
//! certificate, each holding with a quantified confidence over the sample.

use serde::{Deserialize, Serialize};

use crate::data::ZetaStats;
use crate::error::{Error, Result};
use crate::model::{self, SwitchedLinearSystem};
use crate::solver::CertificateSolution;

use super::special::{ln_delta, phi, phi_inv};

/// Scenario dimension `d = kp(kp + 1)/2`.
pub fn scenario_dimension(k: usize, p: usize) -> u64 {
    let kp = (k * p) as u64;
    kp * (kp + 1) / 2
}

/// Violation levels and confidence budget shared by the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceParams {
    /// `ε` with `φ(ε; d, N) = β`, used by the a-posteriori and a-priori bounds.
    pub epsilon: f64,
    pub beta: f64,
    /// Scenario level `ε̄` of the data-only bound.
    pub epsilon_bar: f64,
    /// Levels `ε`, `ε′` entering the singular-value surrogate `ψ`.
    pub epsilon_prime: f64,
    pub epsilon_second: f64,
    /// Fractions of `β` spent on `φ(ε̄)`, `(1-ε)^N` and `(1-ε′)^N`.
    pub split: [f64; 3],
    pub d: u64,
    #[serde(rename = "N")]
    pub n_samples: u64,
}

impl ConfidenceParams {
    /// Parameters with the data-only budget split evenly in thirds.
    pub fn new(beta: f64, k: usize, p: usize, n_samples: u64) -> Result<Self> {
        Self::with_split(beta, [1.0 / 3.0; 3], k, p, n_samples)
    }

    pub fn with_split(beta: f64, split: [f64; 3], k: usize, p: usize, n_samples: u64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0, 1), got {beta}")));
        }
        if split.iter().any(|s| !(*s > 0.0)) || (split.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "confidence split {split:?} must be positive and sum to 1"
            )));
        }
        let d = scenario_dimension(k, p);
        if d == 0 || n_samples < d {
            return Err(Error::ParameterInfeasible(format!(
                "N = {n_samples} samples is below the scenario dimension d = {d}"
            )));
        }
        let n = n_samples as f64;
        // (1 - ε)^N = s β  ⇔  ε = 1 - (s β)^{1/N}
        let tail_level = |share: f64| -((share * beta).ln() / n).exp_m1();
        Ok(Self {
            epsilon: phi_inv(beta, d, n_samples)?,
            beta,
            epsilon_bar: phi_inv(split[0] * beta, d, n_samples)?,
            epsilon_prime: tail_level(split[1]),
            epsilon_second: tail_level(split[2]),
            split,
            d,
            n_samples,
        })
    }

    /// `1 - φ(ε; d, N)`.
    pub fn confidence(&self) -> Result<f64> {
        Ok(1.0 - phi(self.epsilon, self.d, self.n_samples)?)
    }

    /// `1 - φ(ε̄; d, N) - (1-ε)^N - (1-ε′)^N`.
    pub fn explicit_confidence(&self) -> Result<f64> {
        let n = self.n_samples as f64;
        let tail = |e: f64| (n * (-e).ln_1p()).exp();
        Ok(1.0 - phi(self.epsilon_bar, self.d, self.n_samples)? - tail(self.epsilon_prime) - tail(self.epsilon_second))
    }
}

/// One bound value together with its logarithm. `value` is `+∞` when the
/// cap argument reaches one half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    #[serde(with = "crate::serde_ext")]
    pub value: f64,
    #[serde(with = "crate::serde_ext")]
    pub log_value: f64,
    /// `ln` of the argument handed to `δ`.
    #[serde(with = "crate::serde_ext")]
    pub log_delta_argument: f64,
    pub vacuous: bool,
}

impl Bound {
    /// `γ / δ(exp(log_arg))^{1/shift}` evaluated in log space.
    pub fn from_log_argument(gamma: f64, log_arg: f64, n: usize, shift: usize) -> Result<Self> {
        if !(gamma >= 0.0) || shift == 0 {
            return Err(Error::InvalidParameter(format!("bound needs gamma >= 0 and T > k, got {gamma}, {shift}")));
        }
        if log_arg.is_nan() {
            return Err(Error::InvalidParameter("bound argument is NaN".into()));
        }
        if log_arg >= 0.5_f64.ln() {
            return Ok(Self {
                value: f64::INFINITY,
                log_value: f64::INFINITY,
                log_delta_argument: log_arg,
                vacuous: true,
            });
        }
        let log_delta = ln_delta(log_arg.exp(), n)?;
        let log_value = gamma.ln() - log_delta / shift as f64;
        Ok(Self {
            value: log_value.exp(),
            log_value,
            log_delta_argument: log_arg,
            vacuous: false,
        })
    }
}

fn shift(cert: &CertificateSolution) -> Result<usize> {
    if cert.horizon <= cert.k {
        return Err(Error::DegenerateHorizon);
    }
    Ok(cert.horizon - cert.k)
}

/// `ln(ε M^T / 2)`.
fn log_base(epsilon: f64, modes: usize, horizon: usize) -> f64 {
    epsilon.ln() + horizon as f64 * (modes as f64).ln() - std::f64::consts::LN_2
}

/// A-posteriori bound with a known `χ_Σ(P*, k)`.
pub fn posteriori_from_chi(cert: &CertificateSolution, chi: f64, epsilon: f64, n: usize, modes: usize) -> Result<Bound> {
    if !(chi >= 1.0) {
        return Err(Error::InvalidParameter(format!("chi must be at least 1, got {chi}")));
    }
    let log_arg = log_base(epsilon, modes, cert.horizon) + chi.ln();
    Bound::from_log_argument(cert.gamma_star, log_arg, n, shift(cert)?)
}

/// A-posteriori bound: white-box, evaluates `χ_Σ(P*, k)` on the system.
pub fn bound_posteriori(
    cert: &CertificateSolution,
    sys: &SwitchedLinearSystem,
    params: &ConfidenceParams,
    budget: u64,
) -> Result<Bound> {
    if sys.p() != cert.p {
        return Err(Error::Dimension(format!("system has p = {}, certificate p = {}", sys.p(), cert.p)));
    }
    let chi = model::chi(sys, &cert.p_star, cert.k, budget)?;
    posteriori_from_chi(cert, chi, params.epsilon, sys.n(), sys.modes())
}

/// A-priori bound with a user-supplied model-class constant `c ≥ 1`.
pub fn bound_apriori(cert: &CertificateSolution, c: f64, params: &ConfidenceParams, n: usize, modes: usize) -> Result<Bound> {
    if !(c >= 1.0) {
        return Err(Error::InvalidParameter(format!("a-priori constant c must be at least 1, got {c}")));
    }
    let log_arg =
        log_base(params.epsilon, modes, cert.horizon) + 0.5 * (n as f64 - 1.0) * (c * cert.lambda_bar).ln();
    Bound::from_log_argument(cert.gamma_star, log_arg, n, shift(cert)?)
}

/// The sampled surrogate `ψ` for the observability singular-value ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSurrogate {
    /// `+∞` when the denominator is not positive.
    #[serde(with = "crate::serde_ext")]
    pub psi: f64,
    pub denominator: f64,
}

/// `ψ = 1/(δ(ε M^k/2) ζ̲/ζ̄ - sqrt(2 - 2δ(ε′ M^k/2)))`.
pub fn psi_surrogate(zeta: &ZetaStats, epsilon: f64, epsilon_prime: f64, n: usize, modes: usize, k: usize) -> Result<PsiSurrogate> {
    if !(zeta.zeta_max > 0.0) {
        return Err(Error::InvalidParameter("zeta statistics need a nonzero start window".into()));
    }
    let scale = (modes as f64).powi(k as i32) / 2.0;
    let d1 = ln_delta(epsilon * scale, n)?.exp();
    let d2 = ln_delta(epsilon_prime * scale, n)?.exp();
    let denominator = d1 * zeta.zeta_min / zeta.zeta_max - (2.0 - 2.0 * d2).max(0.0).sqrt();
    let psi = if denominator > 0.0 { 1.0 / denominator } else { f64::INFINITY };
    Ok(PsiSurrogate { psi, denominator })
}

/// Data-only bound together with the surrogate it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplicitBound {
    pub bound: Bound,
    pub psi: PsiSurrogate,
}

/// Data-only bound `γ* / δ(ε̄ M^T ψ^{n-1} sqrt(κ(P*)^{n-1}) / 2)^{1/(T-k)}`.
pub fn bound_explicit(
    cert: &CertificateSolution,
    zeta: &ZetaStats,
    params: &ConfidenceParams,
    n: usize,
    modes: usize,
) -> Result<ExplicitBound> {
    let psi = psi_surrogate(zeta, params.epsilon_prime, params.epsilon_second, n, modes, cert.k)?;
    let shift = shift(cert)?;
    let bound = if psi.psi.is_finite() {
        let log_arg = log_base(params.epsilon_bar, modes, cert.horizon)
            + (n as f64 - 1.0) * (psi.psi.ln() + 0.5 * cert.kappa_p.ln());
        Bound::from_log_argument(cert.gamma_star, log_arg, n, shift)?
    } else {
        Bound {
            value: f64::INFINITY,
            log_value: f64::INFINITY,
            log_delta_argument: f64::INFINITY,
            vacuous: true,
        }
    };
    Ok(ExplicitBound { bound, psi })
}

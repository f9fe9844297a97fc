use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::ZetaStats;
use crate::error::{Error, Result};
use crate::solver::{CertificateSolution, InnerSolver};

use super::bounds::{bound_apriori, bound_explicit, posteriori_from_chi, Bound, ConfidenceParams, ExplicitBound};
use super::complexity::min_samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedStable,
    Inconclusive,
}

/// Which bound decides the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Posteriori,
    Apriori,
    Explicit,
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "posteriori" => Ok(Self::Posteriori),
            "apriori" => Ok(Self::Apriori),
            "explicit" => Ok(Self::Explicit),
            other => Err(Error::InvalidParameter(format!("unknown route {other:?}"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Posteriori => "posteriori",
            Self::Apriori => "apriori",
            Self::Explicit => "explicit",
        })
    }
}

/// Certified-stable iff `γ* < 1` and the selected bound is below one.
pub fn verdict(gamma_star: f64, bound: &Bound) -> Verdict {
    if gamma_star >= 1.0 || bound.vacuous || !(bound.value < 1.0) {
        Verdict::Inconclusive
    } else {
        Verdict::CertifiedStable
    }
}

/// Everything the bounds need beyond the certificate itself.
#[derive(Debug, Clone)]
pub struct BoundInputs {
    /// State dimension.
    pub n: usize,
    pub modes: usize,
    pub params: ConfidenceParams,
    pub zeta: ZetaStats,
    /// `χ_Σ(P*, k)`, white-box only.
    pub chi: Option<f64>,
    /// Model-class constant for the a-priori bound.
    pub c: Option<f64>,
    /// Defaults to the a-posteriori bound when `χ` is known, else the
    /// data-only bound.
    pub route: Option<Route>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub posteriori: Option<Bound>,
    pub apriori: Option<Bound>,
    pub explicit: ExplicitBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confidence {
    pub posteriori: f64,
    pub apriori: f64,
    pub explicit: f64,
}

/// Smallest sample counts at which a bound would become finite, or fall
/// below one, with every other input of the run held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuityGuidance {
    pub route: Route,
    #[serde(rename = "N_finite")]
    pub n_finite: Option<u64>,
    #[serde(rename = "N_certified")]
    pub n_certified: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    #[serde(rename = "N")]
    pub n_samples: u64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub k: usize,
    pub p: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub modes: usize,
    pub lambda_bar: f64,
    pub tol_bisect: f64,
    pub tol_inner: f64,
    pub inner_solver: Option<InnerSolver>,
    /// SHA-256 of each input file, keyed by role.
    pub inputs: BTreeMap<String, String>,
    /// The full run configuration, when produced by the command line.
    pub config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub gamma_star: f64,
    pub gamma_certified: f64,
    #[serde(rename = "kappa_P")]
    pub kappa_p: f64,
    pub bounds: Bounds,
    pub confidence: Confidence,
    pub route: Route,
    #[serde(with = "crate::serde_ext")]
    pub selected_bound: f64,
    pub verdict: Verdict,
    pub params: ConfidenceParams,
    #[serde(with = "crate::serde_ext::option")]
    pub chi: Option<f64>,
    #[serde(with = "crate::serde_ext::option")]
    pub c: Option<f64>,
    pub zeta: ZetaStats,
    pub guidance: Vec<VacuityGuidance>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl CertificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn route_bound(cert: &CertificateSolution, inputs: &BoundInputs, params: &ConfidenceParams, route: Route) -> Result<Bound> {
    Ok(match route {
        Route::Posteriori => posteriori_from_chi(cert, inputs.chi.expect("route checked"), params.epsilon, inputs.n, inputs.modes)?,
        Route::Apriori => bound_apriori(cert, inputs.c.expect("route checked"), params, inputs.n, inputs.modes)?,
        Route::Explicit => bound_explicit(cert, &inputs.zeta, params, inputs.n, inputs.modes)?.bound,
    })
}

fn guidance(cert: &CertificateSolution, inputs: &BoundInputs, route: Route) -> Result<VacuityGuidance> {
    let base = inputs.params;
    let at = |n_samples: u64| -> Result<Bound> {
        let params = ConfidenceParams::with_split(base.beta, base.split, cert.k, cert.p, n_samples)?;
        route_bound(cert, inputs, &params, route)
    };
    let n_finite = min_samples(base.d, |n| Ok(!at(n)?.vacuous))?;
    let n_certified = if cert.gamma_star < 1.0 {
        min_samples(base.d, |n| Ok(verdict(cert.gamma_star, &at(n)?) == Verdict::CertifiedStable))?
    } else {
        None
    };
    Ok(VacuityGuidance {
        route,
        n_finite,
        n_certified,
    })
}

/// Evaluates every available bound and the verdict on the selected route.
pub fn certification_report(
    cert: &CertificateSolution,
    inputs: &BoundInputs,
    provenance: Provenance,
) -> Result<CertificationReport> {
    let params = inputs.params;
    if params.d != super::scenario_dimension(cert.k, cert.p) {
        return Err(Error::InvalidParameter(format!(
            "confidence parameters use d = {} but the certificate has kp = {}",
            params.d,
            cert.kp()
        )));
    }
    let route = inputs.route.unwrap_or(if inputs.chi.is_some() {
        Route::Posteriori
    } else {
        Route::Explicit
    });
    match route {
        Route::Posteriori if inputs.chi.is_none() => {
            return Err(Error::InvalidParameter("a-posteriori route needs chi from the system (white-box mode)".into()))
        }
        Route::Apriori if inputs.c.is_none() => {
            return Err(Error::InvalidParameter("a-priori route needs the constant c".into()))
        }
        _ => {}
    }
    let bounds = Bounds {
        posteriori: inputs
            .chi
            .map(|chi| posteriori_from_chi(cert, chi, params.epsilon, inputs.n, inputs.modes))
            .transpose()?,
        apriori: inputs.c.map(|c| bound_apriori(cert, c, &params, inputs.n, inputs.modes)).transpose()?,
        explicit: bound_explicit(cert, &inputs.zeta, &params, inputs.n, inputs.modes)?,
    };
    let selected = match route {
        Route::Posteriori => bounds.posteriori.expect("checked"),
        Route::Apriori => bounds.apriori.expect("checked"),
        Route::Explicit => bounds.explicit.bound,
    };
    let mut routes = Vec::new();
    if inputs.chi.is_some() {
        routes.push(Route::Posteriori);
    }
    if inputs.c.is_some() {
        routes.push(Route::Apriori);
    }
    routes.push(Route::Explicit);
    let guidance = routes.into_iter().map(|r| guidance(cert, inputs, r)).collect::<Result<Vec<_>>>()?;

    let mut notes = vec!["explicit bound evaluates the certificate factor with the condition number kappa(P*)".to_string()];
    if cert.gamma_star >= 1.0 {
        notes.push("gamma* >= 1: no bound can fall below one".into());
    }
    if bounds.explicit.psi.psi.is_infinite() {
        notes.push(format!(
            "psi denominator {:e} is not positive: the sampled singular-value surrogate is uninformative at this N",
            bounds.explicit.psi.denominator
        ));
    }
    Ok(CertificationReport {
        gamma_star: cert.gamma_star,
        gamma_certified: cert.gamma_certified,
        kappa_p: cert.kappa_p,
        confidence: Confidence {
            posteriori: params.confidence()?,
            apriori: params.confidence()?,
            explicit: params.explicit_confidence()?,
        },
        route,
        selected_bound: selected.value,
        verdict: verdict(cert.gamma_star, &selected),
        bounds,
        params,
        chi: inputs.chi,
        c: inputs.c,
        zeta: inputs.zeta,
        guidance,
        notes,
        provenance,
    })
}

//! The lexicographic scenario program: smallest rate `γ` admitting an output
//! quadratic form `P` with `I ⪯ P ⪯ λ̄I` and `zᵀPz ≤ γ^{2(T-k)} vᵀPv` on every
//! data pair, then the minimum-Frobenius-norm `P` at that rate.
//!
//! The outer loop is bisection on `γ`. Each probe is a convex feasibility
//! problem solved by one of two inner backends; see [`InnerSolver`].

mod barrier;
mod constraints;
mod projection;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::DataPairSet;
use crate::error::{Error, Result};
use crate::linalg;

use barrier::{Barrier, PhaseOne};
use constraints::PairConstraints;
use projection::Projected;

/// Eigenvalue slack allowed when verifying `I ⪯ P* ⪯ λ̄I`.
pub const BAND_TOL: f64 = 1e-8;
/// Pair residual slack, relative to `vᵀP*v`, allowed at the certified rate.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Relative residual under which a pair counts as active.
const ACTIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolver {
    /// Log-barrier interior-point method (default).
    Barrier,
    /// Alternating projections for probes, Dykstra's method for the norm stage.
    Projection,
}

impl std::str::FromStr for InnerSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "barrier" => Ok(Self::Barrier),
            "projection" => Ok(Self::Projection),
            other => Err(Error::InvalidParameter(format!("unknown inner solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative width at which bisection on `γ` stops.
    pub tol_bisect: f64,
    /// Inner residual tolerance on unit-normalized constraints.
    pub tol_inner: f64,
    /// Sweep cap for the projection backend.
    pub max_iter: usize,
    pub inner: InnerSolver,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_bisect: 1e-5,
            tol_inner: 1e-9,
            max_iter: 50_000,
            inner: InnerSolver::Barrier,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol_bisect > 0.0 && self.tol_bisect < 1.0) {
            return Err(Error::InvalidParameter(format!("bisection tolerance {} must lie in (0, 1)", self.tol_bisect)));
        }
        if !(self.tol_inner > 0.0 && self.tol_inner < 1e-3) {
            return Err(Error::InvalidParameter(format!("inner tolerance {} must lie in (0, 1e-3)", self.tol_inner)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("iteration cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioProblem {
    pub pairs: DataPairSet,
    pub lambda_bar: f64,
    pub options: SolverOptions,
}

impl ScenarioProblem {
    pub fn new(pairs: DataPairSet, lambda_bar: f64, options: SolverOptions) -> Result<Self> {
        if !(lambda_bar >= 1.0) || !lambda_bar.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda_bar = {lambda_bar} must be a finite value ≥ 1")));
        }
        if pairs.k == 0 || pairs.k >= pairs.horizon {
            return Err(Error::InvalidParameter(format!(
                "window k = {} must lie in 1..=T-1 (T = {})",
                pairs.k, pairs.horizon
            )));
        }
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("scenario program needs at least one data pair".into()));
        }
        options.validate()?;
        Ok(Self {
            pairs,
            lambda_bar,
            options,
        })
    }

    /// `T - k`, the gap between the start and end windows.
    pub fn shift(&self) -> usize {
        self.pairs.horizon - self.pairs.k
    }
}

/// Solver bookkeeping reported next to the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Bisection probes evaluated.
    pub probes: usize,
    /// Newton steps (barrier) or sweeps (projection) over all inner solves.
    pub iterations: usize,
    /// `max_i (z_iᵀP*z_i - γ_c^{2(T-k)} v_iᵀP*v_i) / v_iᵀP*v_i` at the certified rate.
    pub final_residual: f64,
    /// Final bisection interval width.
    pub interval_width: f64,
    /// Pairs whose relative residual at the certified rate exceeds `-1e-6`.
    pub active_constraints: usize,
    pub pairs_total: usize,
    /// Pairs left after exact deduplication.
    pub pairs_used: usize,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub tol_bisect: f64,
    pub tol_inner: f64,
    pub inner_solver: InnerSolver,
}

/// The optimizer `(γ*, P*)` of the scenario program.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateSolution {
    pub gamma_star: f64,
    /// Rate at which `P*` was computed and verified: `γ*` inflated by one
    /// bisection step.
    pub gamma_certified: f64,
    pub p_star: DMatrix<f64>,
    pub kappa_p: f64,
    pub k: usize,
    pub p: usize,
    pub horizon: usize,
    pub lambda_bar: f64,
    pub diagnostics: Diagnostics,
}

/// JSON layout of a [`CertificateSolution`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub gamma_star: f64,
    pub gamma_certified: f64,
    #[serde(rename = "P_star")]
    pub p_star: Vec<f64>,
    pub kp: usize,
    #[serde(rename = "kappa_P")]
    pub kappa_p: f64,
    pub k: usize,
    pub p: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub lambda_bar: f64,
    pub diagnostics: Diagnostics,
}

impl CertificateSolution {
    pub fn kp(&self) -> usize {
        self.k * self.p
    }

    pub fn to_file(&self) -> SolutionFile {
        SolutionFile {
            gamma_star: self.gamma_star,
            gamma_certified: self.gamma_certified,
            p_star: linalg::to_row_major(&self.p_star),
            kp: self.kp(),
            kappa_p: self.kappa_p,
            k: self.k,
            p: self.p,
            horizon: self.horizon,
            lambda_bar: self.lambda_bar,
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn from_file(f: SolutionFile) -> Result<Self> {
        if f.kp != f.k * f.p || f.p_star.len() != f.kp * f.kp {
            return Err(Error::Format("P_star does not match kp".into()));
        }
        Ok(Self {
            gamma_star: f.gamma_star,
            gamma_certified: f.gamma_certified,
            p_star: linalg::from_row_major(f.kp, f.kp, &f.p_star),
            kappa_p: f.kappa_p,
            k: f.k,
            p: f.p,
            horizon: f.horizon,
            lambda_bar: f.lambda_bar,
            diagnostics: f.diagnostics,
        })
    }
}

/// Result of a single feasibility probe.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(DMatrix<f64>),
    Infeasible,
    /// The inner solver could not decide; distinct from infeasible.
    Indeterminate(String),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }
}

/// `λ̄` this close to 1 is treated as the single point `P = I`.
const POINT_BAND: f64 = 1e-12;

struct Engine<'a> {
    pc: &'a PairConstraints,
    lambda_bar: f64,
    options: SolverOptions,
    iterations: usize,
}

impl Engine<'_> {
    fn center(&self) -> DVector<f64> {
        self.pc.coords.identity(0.5 * (1.0 + self.lambda_bar))
    }

    fn point_band(&self) -> bool {
        self.lambda_bar - 1.0 <= POINT_BAND
    }

    /// Feasibility at `c = γ^{2(T-k)}`. For the barrier backend the point is
    /// strictly interior whenever `strict` is set in the result.
    fn probe(&mut self, c: f64) -> (Feasibility, bool) {
        let kp = self.pc.coords.dim;
        let rows = self.pc.rows(c);
        if self.point_band() {
            let id = self.pc.coords.identity(1.0);
            let worst = if rows.nrows() == 0 { f64::NEG_INFINITY } else { (&rows * &id).max() };
            return if worst <= self.options.tol_inner {
                (Feasibility::Feasible(DMatrix::identity(kp, kp)), false)
            } else {
                (Feasibility::Infeasible, false)
            };
        }
        match self.options.inner {
            InnerSolver::Barrier => {
                let mut b = Barrier::new(&self.pc.coords, &rows, self.lambda_bar);
                let out = b.phase_one(&self.center(), self.options.tol_inner);
                self.iterations += b.newton_steps;
                match out {
                    PhaseOne::Feasible { x, slack } => (Feasibility::Feasible(self.pc.coords.to_matrix(&x)), slack < 0.0),
                    PhaseOne::Infeasible => (Feasibility::Infeasible, false),
                    PhaseOne::Indeterminate(r) => (Feasibility::Indeterminate(r), false),
                }
            }
            InnerSolver::Projection => {
                let out = projection::feasibility(
                    self.pc,
                    c,
                    self.lambda_bar,
                    self.options.tol_inner,
                    self.options.max_iter,
                    &mut self.iterations,
                );
                match out {
                    Projected::Feasible(p) => (Feasibility::Feasible(p), false),
                    Projected::Infeasible => (Feasibility::Infeasible, false),
                    Projected::Indeterminate(r) => (Feasibility::Indeterminate(r), false),
                }
            }
        }
    }

    /// Minimum-norm `P` at rate `c`, given a strictly feasible start for
    /// the barrier backend.
    fn min_norm(&mut self, c: f64, start: &DMatrix<f64>) -> std::result::Result<DMatrix<f64>, String> {
        let kp = self.pc.coords.dim;
        if self.point_band() {
            return Ok(DMatrix::identity(kp, kp));
        }
        match self.options.inner {
            InnerSolver::Barrier => {
                let rows = self.pc.rows(c);
                let mut b = Barrier::new(&self.pc.coords, &rows, self.lambda_bar);
                let x = b.min_norm(&self.pc.coords.to_coords(start), self.options.tol_inner);
                self.iterations += b.newton_steps;
                x.map(|x| self.pc.coords.to_matrix(&x))
            }
            InnerSolver::Projection => projection::min_norm(
                self.pc,
                c,
                self.lambda_bar,
                self.options.tol_inner,
                self.options.max_iter,
                &mut self.iterations,
            ),
        }
    }
}

/// Decides whether some `P` with `I ⪯ P ⪯ λ̄I` satisfies
/// `zᵀPz ≤ c·vᵀPv` on every pair.
pub fn feasibility(pairs: &DataPairSet, c: f64, lambda_bar: f64, options: &SolverOptions) -> Result<Feasibility> {
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("rate level c = {c} must be non-negative")));
    }
    if !(lambda_bar >= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda_bar = {lambda_bar} must be ≥ 1")));
    }
    options.validate()?;
    let pc = PairConstraints::build(pairs)?;
    let mut engine = Engine {
        pc: &pc,
        lambda_bar,
        options: *options,
        iterations: 0,
    };
    Ok(engine.probe(c).0)
}

/// Solves the scenario program by bisection on `γ` followed by the
/// minimum-norm stage at `γ*` inflated by one bisection step.
pub fn solve(problem: &ScenarioProblem) -> Result<CertificateSolution> {
    let opts = problem.options;
    let pc = PairConstraints::build(&problem.pairs)?;
    let kp = problem.pairs.kp();
    let exponent = (2 * problem.shift()) as f64;
    let rate = |gamma: f64| gamma.powf(exponent);
    let (max_ratio, _) = pc.ratio_extremes();
    let gamma_hi = max_ratio.powf(1.0 / exponent);
    let gamma_lo = gamma_hi / problem.lambda_bar.powf(1.0 / exponent);
    let mut engine = Engine {
        pc: &pc,
        lambda_bar: problem.lambda_bar,
        options: opts,
        iterations: 0,
    };

    let mut probes = 0;
    let mut lo = gamma_lo;
    let mut hi = gamma_hi;
    let gamma_star = if gamma_hi == 0.0 {
        0.0
    } else {
        probes += 1;
        match engine.probe(rate(gamma_lo)).0 {
            Feasibility::Feasible(_) => {
                hi = gamma_lo;
            }
            Feasibility::Infeasible => {
                while hi - lo > opts.tol_bisect * hi {
                    let mid = 0.5 * (lo + hi);
                    probes += 1;
                    match engine.probe(rate(mid)).0 {
                        Feasibility::Feasible(_) => hi = mid,
                        Feasibility::Infeasible => lo = mid,
                        Feasibility::Indeterminate(reason) => return Err(Error::Indeterminate { gamma: mid, reason }),
                    }
                }
            }
            Feasibility::Indeterminate(reason) => return Err(Error::Indeterminate { gamma: gamma_lo, reason }),
        }
        hi
    };

    // Stage 2 needs a strictly feasible start for the barrier backend; widen
    // the inflation until one exists, ending at a rate above γ_hi where a
    // multiple of the identity is strictly feasible.
    let ceiling = gamma_hi * (1.0 + opts.tol_bisect);
    let mut gamma_certified = gamma_star * (1.0 + opts.tol_bisect);
    let mut start = None;
    if gamma_hi == 0.0 || engine.point_band() || opts.inner == InnerSolver::Projection {
        start = Some(DMatrix::identity(kp, kp));
    } else {
        let mut step = opts.tol_bisect;
        while gamma_certified < ceiling {
            match engine.probe(rate(gamma_certified)) {
                (Feasibility::Feasible(p), true) => {
                    start = Some(p);
                    break;
                }
                (Feasibility::Indeterminate(reason), _) => {
                    return Err(Error::Indeterminate {
                        gamma: gamma_certified,
                        reason,
                    })
                }
                _ => {}
            }
            step *= 2.0;
            gamma_certified = gamma_star * (1.0 + step);
        }
        if start.is_none() {
            gamma_certified = ceiling;
            start = Some(pc.coords.to_matrix(&engine.center()));
        }
    }
    let start = start.expect("start point chosen above");
    let p_star = if gamma_hi == 0.0 {
        // every suffix vanishes, so no pair constrains P
        DMatrix::identity(kp, kp)
    } else {
        engine
            .min_norm(rate(gamma_certified), &start)
            .map_err(|reason| Error::Indeterminate {
                gamma: gamma_certified,
                reason,
            })?
    };
    let p_star = linalg::symmetrize(&p_star);

    let eig = linalg::sym_eigenvalues(&p_star);
    let (eig_min, eig_max) = (eig[0], eig[eig.len() - 1]);
    if eig_min < 1.0 - BAND_TOL || eig_max > problem.lambda_bar + BAND_TOL {
        return Err(Error::Indeterminate {
            gamma: gamma_certified,
            reason: format!("certificate spectrum [{eig_min}, {eig_max}] leaves the band [1, {}]", problem.lambda_bar),
        });
    }
    let c_cert = rate(gamma_certified);
    let relative: Vec<f64> = pc
        .v
        .iter()
        .zip(&pc.z)
        .map(|(v, z)| {
            let vpv = (v.transpose() * &p_star * v)[0];
            ((z.transpose() * &p_star * z)[0] - c_cert * vpv) / vpv
        })
        .collect();
    let final_residual = relative.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = RESIDUAL_TOL.max(opts.tol_inner * 10.0);
    if final_residual > slack {
        return Err(Error::Indeterminate {
            gamma: gamma_certified,
            reason: format!("certificate violates a pair constraint by {final_residual:e}"),
        });
    }
    let active_constraints = relative.iter().filter(|&&r| r > -ACTIVE_TOL * c_cert.max(f64::MIN_POSITIVE)).count();

    Ok(CertificateSolution {
        gamma_star,
        gamma_certified,
        kappa_p: eig_max / eig_min,
        p_star,
        k: problem.pairs.k,
        p: problem.pairs.p,
        horizon: problem.pairs.horizon,
        lambda_bar: problem.lambda_bar,
        diagnostics: Diagnostics {
            probes,
            iterations: engine.iterations,
            final_residual,
            interval_width: hi - lo.min(hi),
            active_constraints,
            pairs_total: pc.total,
            pairs_used: pc.len(),
            gamma_lo,
            gamma_hi,
            tol_bisect: opts.tol_bisect,
            tol_inner: opts.tol_inner,
            inner_solver: opts.inner,
        },
    })
}

/// `z_iᵀP*z_i - (γ*)^{2(T-k)} v_iᵀP*v_i` for every pair, in input order.
pub fn constraint_residuals(solution: &CertificateSolution, pairs: &DataPairSet) -> Vec<f64> {
    residuals_at(&solution.p_star, solution.gamma_star, pairs)
}

/// Pair residuals of an arbitrary `(γ, P)`.
pub fn residuals_at(p_mat: &DMatrix<f64>, gamma: f64, pairs: &DataPairSet) -> Vec<f64> {
    let c = gamma.powf((2 * (pairs.horizon - pairs.k)) as f64);
    pairs
        .pairs
        .iter()
        .map(|d| (d.z.transpose() * p_mat * &d.z)[0] - c * (d.v.transpose() * p_mat * &d.v)[0])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{collect, extract_pairs, DataPair};
    use crate::model::SwitchedLinearSystem;

    fn scalar_pairs(a: f64, n: usize, count: usize, horizon: usize, k: usize, seed: u64) -> DataPairSet {
        let sys = SwitchedLinearSystem::single(DMatrix::identity(n, n) * a, DMatrix::identity(n, n)).unwrap();
        extract_pairs(collect(&sys, count, horizon, seed).unwrap().outputs(), k).unwrap()
    }

    fn mixed_pairs(count: usize, seed: u64) -> DataPairSet {
        let sys = SwitchedLinearSystem::new(
            vec![
                DMatrix::from_row_slice(2, 2, &[0.6, 0.5, -0.2, 0.4]),
                DMatrix::from_row_slice(2, 2, &[0.3, -0.7, 0.6, 0.1]),
            ],
            vec![
                DMatrix::from_row_slice(1, 2, &[1.0, 0.3]),
                DMatrix::from_row_slice(1, 2, &[-0.2, 1.0]),
            ],
        )
        .unwrap();
        extract_pairs(collect(&sys, count, 4, seed).unwrap().outputs(), 2).unwrap()
    }

    fn solve_with(pairs: DataPairSet, lambda_bar: f64, inner: InnerSolver) -> CertificateSolution {
        let options = SolverOptions {
            inner,
            ..SolverOptions::default()
        };
        solve(&ScenarioProblem::new(pairs, lambda_bar, options).unwrap()).unwrap()
    }

    #[test]
    fn scalar_equality_case_is_feasible_at_identity() {
        let pairs = scalar_pairs(0.5, 2, 20, 4, 1, 3);
        let opts = SolverOptions::default();
        assert!(feasibility(&pairs, 0.5_f64.powi(6), 10.0, &opts).unwrap().is_feasible());
        // z = 0.125 v per pair: ratio 0.125² exceeds 0.4⁶ for every P
        assert_eq!(feasibility(&pairs, 0.4_f64.powi(6), 10.0, &opts).unwrap(), Feasibility::Infeasible);
        for inner in [InnerSolver::Barrier, InnerSolver::Projection] {
            let o = SolverOptions { inner, ..opts };
            assert_eq!(feasibility(&pairs, 0.4_f64.powi(6), 10.0, &o).unwrap(), Feasibility::Infeasible);
            assert!(feasibility(&pairs, 0.6_f64.powi(6), 10.0, &o).unwrap().is_feasible());
        }
    }

    #[test]
    fn point_band_reduces_to_direct_check() {
        let pairs = mixed_pairs(30, 1);
        let opts = SolverOptions::default();
        let worst = pairs
            .pairs
            .iter()
            .map(|d| d.z.norm_squared() / d.v.norm_squared())
            .fold(0.0, f64::max);
        assert_eq!(
            feasibility(&pairs, worst * 1.001, 1.0, &opts).unwrap(),
            Feasibility::Feasible(DMatrix::identity(2, 2))
        );
        assert_eq!(feasibility(&pairs, worst * 0.999, 1.0, &opts).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn scalar_system_optimum_is_forced() {
        for a in [0.5, 0.9, 1.3] {
            let s = solve_with(scalar_pairs(a, 3, 25, 6, 2, 4), 10.0, InnerSolver::Barrier);
            assert!((s.gamma_star - a).abs() <= 2e-5 * a, "a={a} got {}", s.gamma_star);
            assert!((&s.p_star - DMatrix::identity(6, 6)).norm() < 1e-6, "{}", s.p_star);
            assert!(s.kappa_p < 1.0 + 1e-6);
        }
    }

    #[test]
    fn zero_suffix_gives_zero_rate() {
        let pairs = DataPairSet {
            k: 1,
            p: 2,
            horizon: 2,
            seed: 0,
            pairs: vec![DataPair {
                v: DVector::from_vec(vec![1.0, 0.0]),
                z: DVector::zeros(2),
            }],
        };
        let s = solve_with(pairs, 5.0, InnerSolver::Barrier);
        assert_eq!(s.gamma_star, 0.0);
        assert_eq!(s.p_star, DMatrix::identity(2, 2));
    }

    #[test]
    fn residual_contract() {
        let pairs = mixed_pairs(60, 2);
        let s = solve_with(pairs.clone(), 20.0, InnerSolver::Barrier);
        let tol = s.diagnostics.tol_bisect;
        for r in residuals_at(&s.p_star, s.gamma_certified, &pairs) {
            assert!(r <= 1e-8, "{r}");
        }
        let lowered = residuals_at(&s.p_star, s.gamma_star * (1.0 - 10.0 * tol), &pairs);
        assert!(lowered.iter().any(|&r| r > 0.0));
        for r in residuals_at(&DMatrix::identity(2, 2), s.diagnostics.gamma_hi, &pairs) {
            assert!(r <= 1e-12);
        }
        assert!(s.diagnostics.active_constraints >= 1);
        assert!(s.gamma_star >= s.diagnostics.gamma_lo && s.gamma_star <= s.diagnostics.gamma_hi);
    }

    #[test]
    fn scale_invariance_and_lambda_monotonicity() {
        let pairs = mixed_pairs(40, 5);
        let base = solve_with(pairs.clone(), 10.0, InnerSolver::Barrier);
        let scaled = solve_with(pairs.scaled(37.5), 10.0, InnerSolver::Barrier);
        assert!((base.gamma_star - scaled.gamma_star).abs() <= 2e-5 * base.gamma_star);
        let mut prev = f64::INFINITY;
        for lb in [1.0, 2.0, 10.0, 100.0] {
            let g = solve_with(pairs.clone(), lb, InnerSolver::Barrier).gamma_star;
            assert!(g <= prev * (1.0 + 1e-5), "λ̄={lb}: {g} > {prev}");
            prev = g;
        }
    }

    #[test]
    fn backends_agree() {
        let pairs = mixed_pairs(12, 9);
        let b = solve_with(pairs.clone(), 5.0, InnerSolver::Barrier);
        let p = solve_with(pairs, 5.0, InnerSolver::Projection);
        assert!((b.gamma_star - p.gamma_star).abs() <= 1e-3 * b.gamma_star, "{} vs {}", b.gamma_star, p.gamma_star);
        assert!((&b.p_star - &p.p_star).norm() <= 1e-2 * b.p_star.norm(), "{}\n{}", b.p_star, p.p_star);
    }

    #[test]
    fn invalid_problems_rejected() {
        let pairs = mixed_pairs(5, 0);
        assert!(ScenarioProblem::new(pairs.clone(), 0.5, SolverOptions::default()).is_err());
        let mut bad = pairs.clone();
        bad.pairs[2].v = DVector::zeros(2);
        let problem = ScenarioProblem::new(bad, 2.0, SolverOptions::default()).unwrap();
        assert!(matches!(solve(&problem), Err(Error::DegeneratePair { index: 2, .. })));
    }

    #[test]
    fn json_round_trip() {
        let s = solve_with(mixed_pairs(20, 3), 4.0, InnerSolver::Barrier);
        let text = serde_json::to_string(&s.to_file()).unwrap();
        assert!(text.contains("\"P_star\"") && text.contains("\"kp\":2"));
        let back = CertificateSolution::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data::{self, IndexDecision, OutputTrajectories, SampleSet};
use crate::error::{Error, Result};
use crate::guarantees::{
    self, BoundInputs, CertificationReport, ComplexityParams, ConfidenceParams, Provenance, SampleComplexity, Verdict,
};
use crate::model::{self, JsrBracket, SwitchedLinearSystem, DEFAULT_BUDGET};
use crate::solver::{self, ScenarioProblem, SolverOptions};

use super::config::{Mode, RunConfig};
use super::StageError;

const DOMAIN_SYSTEM: u64 = 0x7379_735f_6765_6e30; // "sys_gen0"
pub const DEFAULT_K: usize = 3;
pub const DEFAULT_N_SAMPLES: usize = 1000;
pub const DEFAULT_LAMBDA_BAR: f64 = 10.0;
pub const DEFAULT_BETA: f64 = 0.1;
pub const DEFAULT_Q_MAX: usize = 6;
const RESCALE_ATTEMPTS: usize = 100;

type CmdResult<T> = std::result::Result<T, StageError>;

fn stage<T>(name: &'static str, r: Result<T>) -> CmdResult<T> {
    r.map_err(|source| StageError { stage: name, source })
}

fn require<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::InvalidParameter(format!("missing required setting --{flag}")))
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(text.as_bytes())?;
            f.write_all(b"\n")?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

/// A report for the non-certifying commands.
#[derive(Serialize)]
struct Report<T: Serialize> {
    #[serde(flatten)]
    body: T,
    inputs: BTreeMap<String, String>,
    config: serde_json::Value,
}

// ---- gen-system --------------------------------------------------------

/// Uniform `[-1, 1]` entries from a seeded stream, optionally rescaled until
/// the enumeration upper bound on the JSR drops below `spectral_target`.
pub fn generate_system(
    n: usize,
    modes: usize,
    p: usize,
    seed: u64,
    spectral_target: Option<f64>,
    q_max: usize,
) -> Result<SwitchedLinearSystem> {
    if n == 0 || modes == 0 || p == 0 {
        return Err(Error::InvalidParameter("n, M and p must be positive".into()));
    }
    let mut rng = data::stream_rng(seed, DOMAIN_SYSTEM, 0);
    let mut draw = |rows: usize, cols: usize| DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..=1.0));
    let mut a = Vec::with_capacity(modes);
    let mut c = Vec::with_capacity(modes);
    for _ in 0..modes {
        a.push(draw(n, n));
        c.push(draw(p, n));
    }
    let mut sys = SwitchedLinearSystem::new(a, c)?;
    if let Some(target) = spectral_target {
        if !(target > 0.0) {
            return Err(Error::InvalidParameter(format!("spectral target {target} must be positive")));
        }
        for _ in 0..RESCALE_ATTEMPTS {
            let upper = model::jsr_bracket(&sys, q_max, DEFAULT_BUDGET)?.upper;
            if upper < target {
                return Ok(sys);
            }
            sys = sys.scaled(0.999 * target / upper);
        }
        return Err(Error::ParameterInfeasible(format!(
            "rescaling did not bring the JSR upper bound below {target} in {RESCALE_ATTEMPTS} attempts"
        )));
    }
    Ok(sys)
}

pub fn gen_system(mut cfg: RunConfig) -> CmdResult<i32> {
    let (n, modes, p) = stage("config", (|| Ok((require(&cfg.n, "n")?, require(&cfg.modes, "M")?, require(&cfg.p, "p")?)))())?;
    let seed = *cfg.seed.get_or_insert(0);
    let q_max = *cfg.q_max.get_or_insert(DEFAULT_Q_MAX);
    let sys = stage("gen-system", generate_system(n, modes, p, seed, cfg.spectral_target, q_max))?;
    stage("output", emit(&cfg.out, &sys.to_json()))?;
    Ok(0)
}

// ---- simulate ----------------------------------------------------------

pub fn simulate(mut cfg: RunConfig) -> CmdResult<i32> {
    let path = stage("config", require(&cfg.system, "system"))?;
    let sys = stage("load", SwitchedLinearSystem::load(&path))?;
    let count = *cfg.n_samples.get_or_insert(DEFAULT_N_SAMPLES);
    let k = *cfg.k.get_or_insert(DEFAULT_K);
    let horizon = *cfg.horizon.get_or_insert(2 * k + 1);
    let seed = *cfg.seed.get_or_insert(0);
    let mut set = stage("simulate", data::collect(&sys, count, horizon, seed))?;
    if cfg.mode == Some(Mode::Black) {
        set = stage("simulate", SampleSet::new(set.n, set.modes, set.outputs().clone(), None))?;
    }
    let mut buf = Vec::new();
    stage("output", data::write_trajectories(&mut buf, &set))?;
    match &cfg.out {
        Some(p) => stage("output", std::fs::write(p, &buf).map_err(Error::from))?,
        None => stage("output", std::io::stdout().write_all(&buf).map_err(Error::from))?,
    }
    Ok(0)
}

// ---- certify -----------------------------------------------------------

/// Data and white-box context gathered before solving.
struct CertifyInputs {
    system: Option<SwitchedLinearSystem>,
    outputs: Option<OutputTrajectories>,
    pairs: data::DataPairSet,
    n: usize,
    modes: usize,
    seed: u64,
    hashes: BTreeMap<String, String>,
}

fn gather(cfg: &mut RunConfig) -> CmdResult<CertifyInputs> {
    let mode = *cfg.mode.get_or_insert(if cfg.system.is_some() { Mode::White } else { Mode::Black });
    let k = *cfg.k.get_or_insert(DEFAULT_K);
    let mut hashes = BTreeMap::new();
    if mode == Mode::Black && cfg.system.is_some() {
        return Err(StageError::config("black-box mode does not accept a system file"));
    }
    if cfg.trajectories.is_some() && cfg.pairs.is_some() {
        return Err(StageError::config("give either --trajectories or --pairs, not both"));
    }
    if let Some(t) = cfg.horizon {
        if k + 1 > t {
            return Err(StageError::config(&format!("k = {k} must satisfy k <= T - 1 (T = {t})")));
        }
    }

    let system = match &cfg.system {
        Some(path) => {
            hashes.insert("system".into(), stage("load", sha256_file(path))?);
            Some(stage("load", SwitchedLinearSystem::load(path))?)
        }
        None => None,
    };

    if let Some(path) = cfg.pairs.clone() {
        if mode == Mode::White {
            return Err(StageError::config("pair files carry no trajectories; use --trajectories in white-box mode"));
        }
        hashes.insert("pairs".into(), stage("load", sha256_file(&path))?);
        let pairs = stage("load", File::open(&path).map_err(Error::from).and_then(|f| data::read_pairs(BufReader::new(f))))?;
        if pairs.k != k {
            return Err(StageError::config(&format!("pair file has k = {} but k = {k} was requested", pairs.k)));
        }
        let n = stage("config", require(&cfg.n, "n"))?;
        let modes = stage("config", require(&cfg.modes, "M"))?;
        cfg.horizon = Some(pairs.horizon);
        cfg.n_samples = Some(pairs.len());
        cfg.seed = Some(pairs.seed);
        return Ok(CertifyInputs {
            system: None,
            outputs: None,
            seed: pairs.seed,
            pairs,
            n,
            modes,
            hashes,
        });
    }

    let set = match cfg.trajectories.clone() {
        Some(path) => {
            hashes.insert("trajectories".into(), stage("load", sha256_file(&path))?);
            let set = stage("load", File::open(&path).map_err(Error::from).and_then(|f| data::read_trajectories(BufReader::new(f))))?;
            if let Some(sys) = &system {
                if set.n != sys.n() || set.modes != sys.modes() || set.outputs().p() != sys.p() {
                    return Err(StageError::config("trajectory header does not match the system dimensions"));
                }
                if let Some(i) = stage("validate", set.first_mismatch(sys))? {
                    return Err(StageError::config(&format!("trajectory {i} is inconsistent with the system file")));
                }
            }
            cfg.horizon = Some(set.horizon());
            cfg.n_samples = Some(set.len());
            cfg.seed = Some(set.seed());
            set
        }
        None => {
            let sys = system
                .as_ref()
                .ok_or_else(|| StageError::config("need --trajectories, --pairs or --system to draw samples"))?;
            let count = *cfg.n_samples.get_or_insert(DEFAULT_N_SAMPLES);
            let horizon = *cfg.horizon.get_or_insert(2 * k + 1);
            let seed = *cfg.seed.get_or_insert(0);
            stage("collect", data::collect(sys, count, horizon, seed))?
        }
    };
    if let Some(n) = cfg.n {
        if n != set.n {
            return Err(StageError::config(&format!("--n {n} disagrees with the data header n = {}", set.n)));
        }
    }
    let (n, modes, seed) = (set.n, set.modes, set.seed());
    cfg.n = Some(n);
    cfg.modes = Some(modes);
    if k + 1 > set.horizon() {
        return Err(StageError::config(&format!("k = {k} must satisfy k <= T - 1 (T = {})", set.horizon())));
    }
    let outputs = set.into_outputs();
    let pairs = stage("extract", data::extract_pairs(&outputs, k))?;
    Ok(CertifyInputs {
        system,
        outputs: Some(outputs),
        pairs,
        n,
        modes,
        seed,
        hashes,
    })
}

fn solver_options(cfg: &mut RunConfig) -> SolverOptions {
    let d = SolverOptions::default();
    SolverOptions {
        tol_bisect: *cfg.tol_bisect.get_or_insert(d.tol_bisect),
        tol_inner: *cfg.tol_inner.get_or_insert(d.tol_inner),
        max_iter: *cfg.max_iter.get_or_insert(d.max_iter),
        inner: *cfg.inner.get_or_insert(d.inner),
    }
}

/// Runs the full certification and returns the report.
pub fn certify_report(mut cfg: RunConfig) -> CmdResult<CertificationReport> {
    let inputs = gather(&mut cfg)?;
    let k = inputs.pairs.k;
    let lambda_bar = *cfg.lambda_bar.get_or_insert(DEFAULT_LAMBDA_BAR);
    let beta = *cfg.beta.get_or_insert(DEFAULT_BETA);
    let budget = *cfg.budget.get_or_insert(DEFAULT_BUDGET);
    let split = cfg.split.get_or_insert(vec![1.0 / 3.0; 3]).clone();
    let options = solver_options(&mut cfg);
    let split: [f64; 3] = split
        .try_into()
        .map_err(|_| StageError::config("--split takes exactly three fractions"))?;

    if let Some(sys) = &inputs.system {
        match stage("validate", model::pathwise_index(sys, k, budget))? {
            Some(h) if h <= k => {}
            _ => {
                return Err(StageError::config(&format!(
                    "k = {k} is below the pathwise observability index of the system"
                )))
            }
        }
    }

    let pairs = inputs.pairs.clone();
    let problem = stage("solve", ScenarioProblem::new(inputs.pairs, lambda_bar, options))?;
    let cert = stage("solve", solver::solve(&problem))?;

    let params = stage(
        "bounds",
        ConfidenceParams::with_split(beta, split, k, pairs.p, pairs.len() as u64),
    )?;
    let zeta = stage("bounds", data::zeta_stats(&pairs))?;
    let (chi, c) = match &inputs.system {
        Some(sys) => {
            let chi = stage("bounds", model::chi(sys, &cert.p_star, k, budget))?;
            let c = match cfg.c {
                Some(c) => c,
                None => stage("bounds", model::observability_condition_number(sys, k, budget))?,
            };
            (Some(chi), Some(c))
        }
        None => (None, cfg.c),
    };
    if let Some(c) = c {
        cfg.c = Some(c);
    }
    let bound_inputs = BoundInputs {
        n: inputs.n,
        modes: inputs.modes,
        params,
        zeta,
        chi,
        c: c.filter(|c| c.is_finite()),
        route: cfg.route,
    };

    if let (Some(sweep), Some(csv), Some(outputs)) = (&cfg.sweep, &cfg.csv, &inputs.outputs) {
        let mut text = String::from("N,gamma_star\n");
        for &count in sweep {
            if count == 0 || count > outputs.len() {
                return Err(StageError::config(&format!("sweep size {count} outside 1..={}", outputs.len())));
            }
            let sub = stage("extract", data::extract_pairs(&outputs.truncated(count), k))?;
            let prob = stage("solve", ScenarioProblem::new(sub, lambda_bar, options))?;
            let g = stage("solve", solver::solve(&prob))?.gamma_star;
            text.push_str(&format!("{count},{g:e}\n"));
        }
        stage("output", std::fs::write(csv, text).map_err(Error::from))?;
    }

    let provenance = Provenance {
        seed: inputs.seed,
        n_samples: pairs.len() as u64,
        horizon: pairs.horizon,
        k,
        p: pairs.p,
        n: inputs.n,
        modes: inputs.modes,
        lambda_bar,
        tol_bisect: options.tol_bisect,
        tol_inner: options.tol_inner,
        inner_solver: Some(options.inner),
        inputs: inputs.hashes,
        config: Some(cfg.to_value()),
    };
    stage("bounds", guarantees::certification_report(&cert, &bound_inputs, provenance))
}

pub fn certify(cfg: RunConfig) -> CmdResult<i32> {
    let out = cfg.out.clone();
    let report = certify_report(cfg)?;
    stage("output", emit(&out, &report.to_json()))?;
    Ok(match report.verdict {
        Verdict::CertifiedStable => 0,
        Verdict::Inconclusive => 2,
    })
}

// ---- estimate-index ----------------------------------------------------

#[derive(Serialize)]
struct IndexReport {
    #[serde(flatten)]
    decision: IndexDecision,
    warning: Option<String>,
}

pub fn estimate_index(mut cfg: RunConfig) -> CmdResult<i32> {
    let path = stage("config", require(&cfg.trajectories, "trajectories"))?;
    let hash = stage("load", sha256_file(&path))?;
    let set = stage("load", File::open(&path).map_err(Error::from).and_then(|f| data::read_trajectories(BufReader::new(f))))?;
    let half = set.horizon() / 2;
    let k_max = *cfg.k_max.get_or_insert(half);
    if k_max == 0 || k_max > half {
        return Err(StageError::config(&format!(
            "k_max = {k_max} needs T >= 2 k_max (T = {})",
            set.horizon()
        )));
    }
    let estimates = stage("estimate", data::xi_estimates(set.outputs(), 1..=k_max))?;
    let decision = stage("estimate", data::estimate_index(estimates, cfg.threshold))?;
    let warning = decision
        .h_hat
        .is_none()
        .then(|| format!("no k <= {k_max} has xi_k below the threshold {}", decision.threshold));
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    if let Some(csv) = &cfg.csv {
        let mut text = String::from("k,xi\n");
        for e in &decision.estimates {
            text.push_str(&format!("{},{:e}\n", e.k, e.xi));
        }
        stage("output", std::fs::write(csv, text).map_err(Error::from))?;
    }
    let report = Report {
        body: IndexReport { decision, warning },
        inputs: BTreeMap::from([("trajectories".to_string(), hash)]),
        config: cfg.to_value(),
    };
    stage("output", emit(&cfg.out, &to_pretty(&report)))?;
    Ok(0)
}

// ---- oracle-jsr --------------------------------------------------------

#[derive(Serialize)]
struct OracleReport {
    bracket: JsrBracket,
}

pub fn oracle_jsr(mut cfg: RunConfig) -> CmdResult<i32> {
    let path = stage("config", require(&cfg.system, "system"))?;
    let hash = stage("load", sha256_file(&path))?;
    let sys = stage("load", SwitchedLinearSystem::load(&path))?;
    let q_max = *cfg.q_max.get_or_insert(DEFAULT_Q_MAX);
    let budget = *cfg.budget.get_or_insert(DEFAULT_BUDGET);
    let bracket = stage("oracle", model::jsr_bracket(&sys, q_max, budget))?;
    let report = Report {
        body: OracleReport { bracket },
        inputs: BTreeMap::from([("system".to_string(), hash)]),
        config: cfg.to_value(),
    };
    stage("output", emit(&cfg.out, &to_pretty(&report)))?;
    Ok(0)
}

// ---- sample-complexity -------------------------------------------------

#[derive(Serialize)]
struct PlanReport {
    params: ComplexityParams,
    #[serde(flatten)]
    result: SampleComplexity,
}

pub fn sample_complexity_params(cfg: &mut RunConfig) -> Result<ComplexityParams> {
    let k = *cfg.k.get_or_insert(DEFAULT_K);
    Ok(ComplexityParams {
        varepsilon: require(&cfg.varepsilon, "varepsilon")?,
        beta: *cfg.beta.get_or_insert(DEFAULT_BETA),
        n: require(&cfg.n, "n")?,
        horizon: *cfg.horizon.get_or_insert(2 * k + 1),
        k,
        p: require(&cfg.p, "p")?,
        modes: require(&cfg.modes, "M")?,
        c: require(&cfg.c, "c")?,
        lambda_bar: *cfg.lambda_bar.get_or_insert(DEFAULT_LAMBDA_BAR),
        chi_q: require(&cfg.chi_q, "chi-q")?,
    })
}

pub fn sample_complexity(mut cfg: RunConfig) -> CmdResult<i32> {
    let params = stage("config", sample_complexity_params(&mut cfg))?;
    let result = stage("sample-complexity", guarantees::sample_complexity(&params))?;
    let report = Report {
        body: PlanReport { params, result },
        inputs: BTreeMap::new(),
        config: cfg.to_value(),
    };
    stage("output", emit(&cfg.out, &to_pretty(&report)))?;
    Ok(0)
}

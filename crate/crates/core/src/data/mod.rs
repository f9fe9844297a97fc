//! Randomized data collection and the purely data-driven statistics.
//!
//! Certification code only ever sees [`OutputTrajectories`]; the initial
//! states and switching words that produced them live in the optional
//! [`Provenance`] list of a [`SampleSet`] and are used for white-box checks.

mod io;
mod sampling;
mod stats;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{SwitchedLinearSystem, SwitchingWord};

pub use io::{read_pairs, read_trajectories, write_pairs, write_trajectories, PairHeader, TrajectoryHeader};
pub use sampling::{sample_switching, sample_uniform_sphere, stream_rng};
pub use stats::{estimate_index, xi_estimates, zeta_stats, IndexDecision, IndexEstimate, ZetaStats};

/// Prefix windows shorter than this are treated as zero.
pub const ZERO_WINDOW_NORM: f64 = 1e-14;

/// Output data of `N` trajectories of length `T`. This is everything a
/// black-box consumer is allowed to read.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTrajectories {
    pub(crate) p: usize,
    pub(crate) horizon: usize,
    pub(crate) seed: u64,
    pub(crate) y: Vec<Vec<DVector<f64>>>,
}

impl OutputTrajectories {
    /// Validates that every trajectory has `horizon` outputs of length `p`.
    pub fn new(p: usize, horizon: usize, seed: u64, y: Vec<Vec<DVector<f64>>>) -> Result<Self> {
        if horizon == 0 || p == 0 {
            return Err(Error::InvalidParameter("p and T must be positive".into()));
        }
        for (i, traj) in y.iter().enumerate() {
            if traj.len() != horizon {
                return Err(Error::Dimension(format!(
                    "trajectory {i} has {} outputs, expected T = {horizon}",
                    traj.len()
                )));
            }
            if let Some(bad) = traj.iter().find(|v| v.len() != p) {
                return Err(Error::Dimension(format!(
                    "trajectory {i} has an output of length {}, expected p = {p}",
                    bad.len()
                )));
            }
            if traj.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
                return Err(Error::Format(format!("trajectory {i} contains a non-finite output")));
            }
        }
        Ok(Self { p, horizon, seed, y })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn trajectory(&self, i: usize) -> &[DVector<f64>] {
        &self.y[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[DVector<f64>]> {
        self.y.iter().map(Vec::as_slice)
    }

    /// First `count` trajectories; with the per-sample RNG streams this is
    /// exactly the data a collection of size `count` would have produced.
    pub fn truncated(&self, count: usize) -> Self {
        Self {
            y: self.y[..count.min(self.y.len())].to_vec(),
            ..self.clone()
        }
    }

    /// `stack(y_start, ..., y_{start+len-1})` of trajectory `i`.
    pub fn window(&self, i: usize, start: usize, len: usize) -> DVector<f64> {
        linalg::stack(&self.y[i][start..start + len])
    }
}

/// The initial state and switching word behind one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub x0: DVector<f64>,
    pub word: SwitchingWord,
}

/// The sample `ω_N` with its outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub n: usize,
    pub modes: usize,
    outputs: OutputTrajectories,
    provenance: Option<Vec<Provenance>>,
}

impl SampleSet {
    pub fn new(n: usize, modes: usize, outputs: OutputTrajectories, provenance: Option<Vec<Provenance>>) -> Result<Self> {
        if let Some(prov) = &provenance {
            if prov.len() != outputs.len() {
                return Err(Error::Dimension(format!(
                    "{} provenance records for {} trajectories",
                    prov.len(),
                    outputs.len()
                )));
            }
            for (i, rec) in prov.iter().enumerate() {
                if rec.x0.len() != n || rec.word.len() != outputs.horizon {
                    return Err(Error::Dimension(format!("provenance record {i} does not match n = {n}, T = {}", outputs.horizon)));
                }
                rec.word.validate(modes)?;
            }
        }
        Ok(Self {
            n,
            modes,
            outputs,
            provenance,
        })
    }

    pub fn outputs(&self) -> &OutputTrajectories {
        &self.outputs
    }

    pub fn into_outputs(self) -> OutputTrajectories {
        self.outputs
    }

    pub fn provenance(&self) -> Option<&[Provenance]> {
        self.provenance.as_deref()
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.outputs.horizon
    }

    pub fn seed(&self) -> u64 {
        self.outputs.seed
    }

    pub fn truncated(&self, count: usize) -> Self {
        Self {
            n: self.n,
            modes: self.modes,
            outputs: self.outputs.truncated(count),
            provenance: self
                .provenance
                .as_ref()
                .map(|p| p[..count.min(p.len())].to_vec()),
        }
    }

    /// Re-simulates every recorded `(x0, word)` and checks the stored
    /// outputs bit for bit. Returns the first mismatching index, if any.
    pub fn first_mismatch(&self, sys: &SwitchedLinearSystem) -> Result<Option<usize>> {
        let prov = self
            .provenance
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("sample set carries no provenance".into()))?;
        for (i, rec) in prov.iter().enumerate() {
            if sys.outputs(&rec.x0, &rec.word)? != self.outputs.y[i] {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// Draws `N` initial states on the unit sphere and `N` uniform words of
/// length `T`, and simulates the system on each.
pub fn collect(sys: &SwitchedLinearSystem, count: usize, horizon: usize, seed: u64) -> Result<SampleSet> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!("horizon T = {horizon} must be at least 2")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("sample count N must be at least 1".into()));
    }
    let (prov, y): (Vec<_>, Vec<_>) = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let x0 = sampling::sphere_point(sys.n(), seed, i);
            let word = sampling::switching_word(sys.modes(), horizon, seed, i);
            let y = sys.outputs(&x0, &word)?;
            Ok((Provenance { x0, word }, y))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(SampleSet {
        n: sys.n(),
        modes: sys.modes(),
        outputs: OutputTrajectories {
            p: sys.p(),
            horizon,
            seed,
            y,
        },
        provenance: Some(prov),
    })
}

/// One constraint pair: start window `v` and end window `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPair {
    pub v: DVector<f64>,
    pub z: DVector<f64>,
}

/// The set `D_k` of start/end output windows.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPairSet {
    pub k: usize,
    pub p: usize,
    pub horizon: usize,
    pub seed: u64,
    pub pairs: Vec<DataPair>,
}

impl DataPairSet {
    pub fn kp(&self) -> usize {
        self.k * self.p
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Multiplies every `v` and `z` by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            pairs: self
                .pairs
                .iter()
                .map(|d| DataPair {
                    v: &d.v * factor,
                    z: &d.z * factor,
                })
                .collect(),
            ..self.clone()
        }
    }
}

/// `v^i = stack(y_0..y_{k-1})`, `z^i = stack(y_{T-k}..y_{T-1})` per trajectory.
pub fn extract_pairs(data: &OutputTrajectories, k: usize) -> Result<DataPairSet> {
    let horizon = data.horizon;
    if k == 0 || k >= horizon {
        return Err(Error::InvalidParameter(format!(
            "window k = {k} must lie in 1..=T-1 (T = {horizon})"
        )));
    }
    let pairs = (0..data.len())
        .map(|i| DataPair {
            v: data.window(i, 0, k),
            z: data.window(i, horizon - k, k),
        })
        .collect();
    Ok(DataPairSet {
        k,
        p: data.p,
        horizon,
        seed: data.seed,
        pairs,
    })
}

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::observability::path_gram;
use super::{SwitchedLinearSystem, SwitchingWord};

/// Relative Frobenius residual under which two Gram matrices count as proportional.
const PROPORTIONALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegeneracyVerdict {
    NoEvidence,
    PossiblyDegenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub verdict: DegeneracyVerdict,
    /// Rate `γ` recovered from the proportionality factor, when one was found.
    pub gamma: Option<f64>,
    /// Smallest relative residual seen across the tested `P`.
    pub best_residual: f64,
    pub tested: usize,
}

/// Randomized screen for degenerate switching words: tests whether the
/// end-window Gram `A_preᵀ O_endᵀ P O_end A_pre` is an exact multiple of the
/// start-window Gram `O_startᵀ P O_start` for `P = I` and `trials` random
/// positive-definite `P`. A single proportional `P` is a witness.
///
/// The screen cannot prove non-degeneracy; `NoEvidence` only means no tested
/// `P` was a witness.
pub fn degeneracy_diagnostic(
    sys: &SwitchedLinearSystem,
    word: &SwitchingWord,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<DegeneracyReport> {
    let horizon = word.len();
    if k == 0 || k > horizon {
        return Err(Error::InvalidParameter(format!("window k = {k} must lie in 1..=T (T = {horizon})")));
    }
    if horizon == k {
        return Err(Error::DegenerateHorizon);
    }
    word.validate(sys.modes())?;
    let kp = k * sys.p();
    let shift = horizon - k;
    let prefix = sys.product(&word.window(0, shift))?;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut candidates = vec![DMatrix::identity(kp, kp)];
    for _ in 0..trials {
        let b = DMatrix::<f64>::from_fn(kp, kp, |_, _| StandardNormal.sample(&mut rng));
        candidates.push(b.transpose() * &b / kp as f64 + DMatrix::identity(kp, kp));
    }

    let mut best_residual = f64::INFINITY;
    let mut witness = None;
    for p_mat in &candidates {
        let start = path_gram(sys, p_mat, word, 0, k)?.matrix;
        let end_window = path_gram(sys, p_mat, word, shift, k)?.matrix;
        let end = prefix.transpose() * end_window * &prefix;
        let ss = start.norm_squared();
        if ss == 0.0 {
            continue;
        }
        let factor = start.dot(&end) / ss;
        let scale = end.norm().max(start.norm() * factor.abs());
        let residual = if scale == 0.0 {
            0.0
        } else {
            (&end - &start * factor).norm() / scale
        };
        best_residual = best_residual.min(residual);
        if residual < PROPORTIONALITY_TOL && factor >= 0.0 && witness.is_none() {
            witness = Some(factor.powf(1.0 / (2 * shift) as f64));
        }
    }
    Ok(DegeneracyReport {
        verdict: if witness.is_some() {
            DegeneracyVerdict::PossiblyDegenerate
        } else {
            DegeneracyVerdict::NoEvidence
        },
        gamma: witness,
        best_residual,
        tested: candidates.len(),
    })
}

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

use super::words::check_budget;
use super::SwitchedLinearSystem;

/// Interval `[lower, upper]` containing the joint spectral radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsrBracket {
    pub lower: f64,
    pub upper: f64,
    /// Longest product length explored.
    pub depth: usize,
}

impl JsrBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Per-level maxima `(max ρ(A_σ), max ‖A_σ‖₂)` over all words of each length.
type Levels = Vec<(f64, f64)>;

fn explore(sys: &SwitchedLinearSystem, prod: &DMatrix<f64>, depth: usize, q_max: usize, levels: &mut Levels) {
    let entry = &mut levels[depth - 1];
    entry.0 = entry.0.max(linalg::spectral_radius(prod));
    entry.1 = entry.1.max(linalg::norm2(prod));
    if depth == q_max {
        return;
    }
    for mode in 0..sys.modes() {
        let next = sys.a(mode) * prod;
        explore(sys, &next, depth + 1, q_max, levels);
    }
}

/// Brackets the JSR by enumerating every product of length `1..=q_max`:
/// the lower end is `max ρ(A_σ)^{1/q}`, the upper end `min_q max ‖A_σ‖₂^{1/q}`.
pub fn jsr_bracket(sys: &SwitchedLinearSystem, q_max: usize, budget: u64) -> Result<JsrBracket> {
    if q_max == 0 {
        return Err(Error::InvalidParameter("q_max must be at least 1".into()));
    }
    check_budget(sys.modes(), q_max, budget, 0)?;
    let per_root: Vec<Levels> = (0..sys.modes())
        .into_par_iter()
        .map(|mode| {
            let mut levels = vec![(0.0, 0.0); q_max];
            explore(sys, sys.a(mode), 1, q_max, &mut levels);
            levels
        })
        .collect();
    let mut levels = vec![(0.0_f64, 0.0_f64); q_max];
    for root in per_root {
        for (acc, lv) in levels.iter_mut().zip(root) {
            acc.0 = acc.0.max(lv.0);
            acc.1 = acc.1.max(lv.1);
        }
    }
    let mut lower: f64 = 0.0;
    let mut upper = f64::INFINITY;
    for (q, (rho, norm)) in levels.iter().enumerate() {
        let inv = 1.0 / (q + 1) as f64;
        lower = lower.max(rho.powf(inv));
        upper = upper.min(norm.powf(inv));
    }
    // ρ(A)^{1/q} ≤ ‖A‖^{1/q} holds exactly; clamp rounding noise
    if lower > upper {
        lower = upper;
    }
    Ok(JsrBracket {
        lower,
        upper,
        depth: q_max,
    })
}

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;

use super::words::{check_budget, word_at, word_count};
use super::{SwitchedLinearSystem, SwitchingWord};

/// Path-dependent observability matrix `O_Σ(σ)` of size `kp × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityMatrix {
    pub word: SwitchingWord,
    pub matrix: DMatrix<f64>,
}

impl ObservabilityMatrix {
    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.matrix.ncols()
    }
}

/// `O_Σ(σ_{ℓ:ℓ+k-1})ᵀ P O_Σ(σ_{ℓ:ℓ+k-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGram {
    pub word: SwitchingWord,
    pub offset: usize,
    pub window: usize,
    pub matrix: DMatrix<f64>,
}

pub fn observability_matrix(sys: &SwitchedLinearSystem, word: &SwitchingWord) -> Result<ObservabilityMatrix> {
    if word.is_empty() {
        return Err(Error::InvalidParameter("observability matrix needs a word of length >= 1".into()));
    }
    word.validate(sys.modes())?;
    let (n, p) = (sys.n(), sys.p());
    let mut o = DMatrix::zeros(word.len() * p, n);
    let mut prefix = DMatrix::identity(n, n);
    for (t, &s) in word.symbols().iter().enumerate() {
        o.rows_mut(t * p, p).copy_from(&(sys.c(s) * &prefix));
        prefix = sys.a(s) * prefix;
    }
    Ok(ObservabilityMatrix {
        word: word.clone(),
        matrix: o,
    })
}

pub fn path_gram(
    sys: &SwitchedLinearSystem,
    p_mat: &DMatrix<f64>,
    word: &SwitchingWord,
    offset: usize,
    window: usize,
) -> Result<PathGram> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be positive".into()));
    }
    if word.len() < offset + window {
        return Err(Error::Dimension(format!(
            "word of length {} is shorter than offset {offset} + window {window}",
            word.len()
        )));
    }
    let kp = window * sys.p();
    if p_mat.nrows() != kp || p_mat.ncols() != kp {
        return Err(Error::Dimension(format!(
            "P is {}x{}, expected {kp}x{kp}",
            p_mat.nrows(),
            p_mat.ncols()
        )));
    }
    let o = observability_matrix(sys, &word.window(offset, window))?;
    let g = o.matrix.transpose() * p_mat * &o.matrix;
    Ok(PathGram {
        word: word.clone(),
        offset,
        window,
        matrix: linalg::symmetrize(&g),
    })
}

fn full_rank_at(sys: &SwitchedLinearSystem, modes: usize, k: usize, index: u128) -> bool {
    let w = word_at(modes, k, index);
    observability_matrix(sys, &w)
        .map(|o| o.is_full_rank())
        .unwrap_or(false)
}

/// Observability index `h(Σ)`: smallest `k ≤ k_max` with at least one
/// observable word of length `k`.
pub fn observability_index(sys: &SwitchedLinearSystem, k_max: usize, budget: u64) -> Result<Option<usize>> {
    let m = sys.modes();
    for k in 1..=k_max {
        check_budget(m, k, budget, k - 1)?;
        let count = word_count(m, k) as u64;
        if (0..count).into_par_iter().any(|i| full_rank_at(sys, m, k, i as u128)) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Pathwise observability index `H(Σ)`: smallest `k ≤ k_max` with every word
/// of length `k` observable.
pub fn pathwise_index(sys: &SwitchedLinearSystem, k_max: usize, budget: u64) -> Result<Option<usize>> {
    let m = sys.modes();
    for k in 1..=k_max {
        check_budget(m, k, budget, k - 1)?;
        let count = word_count(m, k) as u64;
        if (0..count).into_par_iter().all(|i| full_rank_at(sys, m, k, i as u128)) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Deterministic arg-max over word indices: ties resolve to the smallest index.
fn max_over_words<F>(count: u64, f: F) -> Result<(f64, u64)>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let values: Vec<Result<f64>> = (0..count).into_par_iter().map(&f).collect();
    let mut best = (f64::NEG_INFINITY, 0u64);
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if v > best.0 {
            best = (v, i as u64);
        }
    }
    Ok(best)
}

/// `χ_Σ(P, k) = max_σ sqrt(det G_σ / λ_min(G_σ)^n)` with `G_σ = O(σ)ᵀ P O(σ)`.
pub fn chi(sys: &SwitchedLinearSystem, p_mat: &DMatrix<f64>, k: usize, budget: u64) -> Result<f64> {
    let m = sys.modes();
    let n = sys.n();
    check_budget(m, k, budget, 0)?;
    let count = word_count(m, k) as u64;
    let (log_chi, _) = max_over_words(count, |i| {
        let w = word_at(m, k, i as u128);
        let o = observability_matrix(sys, &w)?;
        if !o.is_full_rank() {
            return Err(Error::SingularGram {
                word: w.0.clone(),
                window: k,
            });
        }
        let g = path_gram(sys, p_mat, &w, 0, k)?;
        let ev = linalg::sym_eigenvalues(&g.matrix);
        if ev[0] <= 0.0 {
            return Err(Error::SingularGram { word: w.0, window: k });
        }
        let log_min = ev[0].ln();
        // log sqrt(det / λmin^n) = ½ Σ (ln λ_i − ln λ_min)
        Ok(0.5 * ev.iter().map(|l| l.ln() - log_min).sum::<f64>())
    })?;
    let value = log_chi.exp();

    if cfg!(debug_assertions) {
        let ck = observability_condition_number(sys, k, budget)?;
        let kp = linalg::sym_condition(p_mat);
        let ceiling = 0.5 * (n as f64 - 1.0) * (ck * kp).ln();
        debug_assert!(
            log_chi <= ceiling + 1e-9 * ceiling.abs().max(1.0),
            "chi exceeds its observability-condition ceiling: {log_chi} > {ceiling}"
        );
    }
    Ok(value)
}

/// `c_k = max_σ κ(O(σ)ᵀ O(σ))`; +inf when some word is unobservable.
pub fn observability_condition_number(sys: &SwitchedLinearSystem, k: usize, budget: u64) -> Result<f64> {
    let m = sys.modes();
    check_budget(m, k, budget, 0)?;
    let count = word_count(m, k) as u64;
    let (ck, _) = max_over_words(count, |i| {
        let o = observability_matrix(sys, &word_at(m, k, i as u128))?;
        let (smin, smax) = linalg::singular_extremes(&o.matrix);
        if smin <= 0.0 || smin / smax < linalg::RANK_TOL {
            return Ok(f64::INFINITY);
        }
        Ok((smax / smin).powi(2))
    })?;
    Ok(ck)
}

/// `max_σ σ_max(O(σ)) / min_σ σ_min(O(σ))`, the quantity the sampled ψ
/// surrogate bounds from above.
pub fn singular_value_ratio(sys: &SwitchedLinearSystem, k: usize, budget: u64) -> Result<f64> {
    let m = sys.modes();
    check_budget(m, k, budget, 0)?;
    let count = word_count(m, k) as u64;
    let extremes: Vec<Result<(f64, f64)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let o = observability_matrix(sys, &word_at(m, k, i as u128))?;
            Ok(linalg::singular_extremes(&o.matrix))
        })
        .collect();
    let mut smin = f64::INFINITY;
    let mut smax: f64 = 0.0;
    for e in extremes {
        let (lo, hi) = e?;
        smin = smin.min(lo);
        smax = smax.max(hi);
    }
    Ok(if smin <= 0.0 { f64::INFINITY } else { smax / smin })
}

/// White-box check of the matrix inequality
/// `A_{σ_{0:ℓ-1}}ᵀ G_ℓ A_{σ_{0:ℓ-1}} ⪯ γ^{2ℓ} G_0` over every word of length
/// `k + ℓ`, with an eigenvalue slack of `tol` relative to `‖G_0‖`.
pub fn lyapunov_condition_holds(
    sys: &SwitchedLinearSystem,
    p_mat: &DMatrix<f64>,
    gamma: f64,
    k: usize,
    ell: usize,
    budget: u64,
    tol: f64,
) -> Result<bool> {
    let m = sys.modes();
    let len = k + ell;
    check_budget(m, len, budget, 0)?;
    let count = word_count(m, len) as u64;
    let scale = gamma.powi(2 * ell as i32);
    let checks: Vec<Result<bool>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let w = word_at(m, len, i as u128);
            let start = path_gram(sys, p_mat, &w, 0, k)?.matrix;
            let end = path_gram(sys, p_mat, &w, ell, k)?.matrix;
            let prefix = sys.product(&w.window(0, ell))?;
            let lhs = prefix.transpose() * end * &prefix;
            let gap = linalg::symmetrize(&(&start * scale - lhs));
            let ev = linalg::sym_eigenvalues(&gap);
            Ok(ev[0] >= -tol * start.norm().max(1e-300))
        })
        .collect();
    for c in checks {
        if !c? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{WordIter, DEFAULT_BUDGET};

    fn rotation_system() -> SwitchedLinearSystem {
        SwitchedLinearSystem::single(
            DMatrix::from_row_slice(2, 2, &[0.0, -0.9, 0.9, 0.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        )
        .unwrap()
    }

    fn identity_system(modes: usize) -> SwitchedLinearSystem {
        SwitchedLinearSystem::new(
            vec![DMatrix::identity(2, 2); modes],
            vec![DMatrix::identity(2, 2); modes],
        )
        .unwrap()
    }

    #[test]
    fn identity_output_single_step() {
        let sys = identity_system(2);
        for w in WordIter::new(2, 1) {
            let o = observability_matrix(&sys, &w).unwrap();
            assert_eq!(o.matrix, DMatrix::identity(2, 2));
        }
    }

    #[test]
    fn rotation_observability_stack() {
        let o = observability_matrix(&rotation_system(), &vec![0, 0].into()).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.9]);
        assert!((&o.matrix - expected).norm() < 1e-15);
        assert_eq!(o.rank(), 2);
    }

    #[test]
    fn row_blocks_match_prefix_products() {
        let sys = SwitchedLinearSystem::new(
            vec![
                DMatrix::from_row_slice(2, 2, &[0.5, 0.2, -0.1, 0.7]),
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.3]),
                DMatrix::from_row_slice(2, 2, &[0.9, 0.0, 0.4, 0.2]),
            ],
            vec![
                DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
                DMatrix::from_row_slice(1, 2, &[0.3, 1.0]),
                DMatrix::from_row_slice(1, 2, &[0.0, 2.0]),
            ],
        )
        .unwrap();
        for len in 1..=4 {
            for w in WordIter::new(3, len) {
                let o = observability_matrix(&sys, &w).unwrap();
                for t in 0..len {
                    let block = sys.c(w.0[t]) * sys.product(&w.window(0, t)).unwrap();
                    assert!((o.matrix.rows(t, 1) - block).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn indices_of_simple_systems() {
        assert_eq!(observability_index(&identity_system(2), 4, DEFAULT_BUDGET).unwrap(), Some(1));
        assert_eq!(pathwise_index(&identity_system(2), 4, DEFAULT_BUDGET).unwrap(), Some(1));
        assert_eq!(observability_index(&rotation_system(), 4, DEFAULT_BUDGET).unwrap(), Some(2));
        assert_eq!(pathwise_index(&rotation_system(), 4, DEFAULT_BUDGET).unwrap(), Some(2));
        let blind = SwitchedLinearSystem::new(
            vec![DMatrix::identity(2, 2) * 0.5; 2],
            vec![DMatrix::zeros(1, 2); 2],
        )
        .unwrap();
        assert_eq!(observability_index(&blind, 4, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn mixed_mode_indices_match_enumeration_oracle() {
        // mode 0 sees nothing, mode 1 sees the first coordinate; A mixes coordinates
        let sys = SwitchedLinearSystem::new(
            vec![
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
                DMatrix::from_row_slice(2, 2, &[0.6, 0.8, -0.8, 0.6]),
            ],
            vec![
                DMatrix::zeros(1, 2),
                DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            ],
        )
        .unwrap();
        let oracle = |all: bool| -> Option<usize> {
            (1..=5).find(|&k| {
                let mut ranks = WordIter::new(2, k).map(|w| {
                    let o = observability_matrix(&sys, &w).unwrap();
                    o.matrix.clone().svd(false, false).rank(1e-10 * o.matrix.norm().max(1e-300)) == 2
                });
                if all {
                    ranks.all(|r| r)
                } else {
                    ranks.any(|r| r)
                }
            })
        };
        assert_eq!(observability_index(&sys, 5, DEFAULT_BUDGET).unwrap(), oracle(false));
        assert_eq!(observability_index(&sys, 5, DEFAULT_BUDGET).unwrap(), Some(2));
        // the all-zero-output word is never observable
        assert_eq!(pathwise_index(&sys, 5, DEFAULT_BUDGET).unwrap(), oracle(true));
        assert_eq!(pathwise_index(&sys, 5, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn index_budget_exceeded() {
        let sys = SwitchedLinearSystem::new(
            vec![DMatrix::identity(2, 2); 10],
            vec![DMatrix::zeros(1, 2); 10],
        )
        .unwrap();
        match observability_index(&sys, 8, 1000) {
            Err(Error::BudgetExceeded { completed, length, .. }) => {
                assert_eq!(completed, 3);
                assert_eq!(length, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn path_gram_identities() {
        let sys = identity_system(1);
        let w: SwitchingWord = vec![0].into();
        let g = path_gram(&sys, &DMatrix::identity(2, 2), &w, 0, 1).unwrap();
        assert_eq!(g.matrix, DMatrix::identity(2, 2));

        let rot = rotation_system();
        let w: SwitchingWord = vec![0, 0, 0, 0].into();
        let g1 = path_gram(&rot, &DMatrix::identity(2, 2), &w, 1, 2).unwrap().matrix;
        let o = observability_matrix(&rot, &w.window(1, 2)).unwrap().matrix;
        // Gram of stacked rows
        let mut gram = DMatrix::zeros(2, 2);
        for r in 0..o.nrows() {
            let row = o.row(r);
            gram += row.transpose() * row;
        }
        assert!((&g1 - gram).norm() < 1e-14);
        let g2 = path_gram(&rot, &(DMatrix::identity(2, 2) * 2.0), &w, 1, 2).unwrap().matrix;
        assert!((g2 - &g1 * 2.0).norm() < 1e-14);
        assert!(path_gram(&rot, &DMatrix::identity(3, 3), &w, 0, 2).is_err());
        assert!(path_gram(&rot, &DMatrix::identity(2, 2), &w, 3, 2).is_err());
    }

    #[test]
    fn chi_values() {
        let sys = identity_system(1);
        assert!((chi(&sys, &DMatrix::identity(2, 2), 1, DEFAULT_BUDGET).unwrap() - 1.0).abs() < 1e-14);
        // OᵀO = diag(1, 0.81): sqrt(0.81 / 0.81²) = 1/0.9
        let rot = rotation_system();
        let c = chi(&rot, &DMatrix::identity(2, 2), 2, DEFAULT_BUDGET).unwrap();
        assert!((c - 1.0 / 0.9).abs() < 1e-12, "{c}");
        // scale invariance in P
        let c3 = chi(&rot, &(DMatrix::identity(2, 2) * 3.7), 2, DEFAULT_BUDGET).unwrap();
        assert!((c3 - c).abs() < 1e-12);
        assert!(matches!(
            chi(&rot, &DMatrix::identity(1, 1), 1, DEFAULT_BUDGET),
            Err(Error::SingularGram { .. })
        ));
    }

    #[test]
    fn nonsingular_modes_give_pathwise_observability() {
        // 0.9·rotation with C = (1 0): P = I, γ = 0.9, k = ℓ = 2 satisfies the
        // Lyapunov condition, so every word of length 2 must be observable.
        let sys = rotation_system();
        assert!(lyapunov_condition_holds(&sys, &DMatrix::identity(2, 2), 0.9, 2, 2, DEFAULT_BUDGET, 1e-12).unwrap());
        assert!(!lyapunov_condition_holds(&sys, &DMatrix::identity(2, 2), 0.85, 2, 2, DEFAULT_BUDGET, 1e-12).unwrap());
        assert_eq!(pathwise_index(&sys, 2, DEFAULT_BUDGET).unwrap(), Some(2));
    }
}

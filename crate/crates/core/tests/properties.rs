//! Property tests for invariants that hold for every admissible input.

use jsrcert::cli::config::RunConfig;
use jsrcert::data::{self, extract_pairs, zeta_stats};
use jsrcert::guarantees::{delta, reg_inc_beta, reg_inc_beta_inv, Bound};
use jsrcert::model::{
    self, chi, jsr_bracket, lyapunov_condition_holds, observability_matrix, SwitchedLinearSystem, SwitchingWord,
    DEFAULT_BUDGET,
};
use jsrcert::solver::{residuals_at, solve, ScenarioProblem, SolverOptions, BAND_TOL, RESIDUAL_TOL};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, range: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-range..range, rows * cols).prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
}

/// Two-mode systems with `n = 2`, `p = 1`.
fn small_system() -> impl Strategy<Value = SwitchedLinearSystem> {
    (matrix(2, 2, 1.0), matrix(2, 2, 1.0), matrix(1, 2, 1.0), matrix(1, 2, 1.0))
        .prop_map(|(a0, a1, c0, c1)| SwitchedLinearSystem::new(vec![a0, a1], vec![c0, c1]).unwrap())
}

fn word(max_len: usize) -> impl Strategy<Value = SwitchingWord> {
    prop::collection::vec(0usize..2, 0..=max_len).prop_map(SwitchingWord::new)
}

/// Symmetric positive definite `n × n` matrix.
fn spd(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, n, 1.0).prop_map(move |b| &b * b.transpose() + DMatrix::identity(n, n) * 0.1)
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

// ---- model ---------------------------------------------------------------

proptest! {
    #[test]
    fn product_of_concatenation(sys in small_system(), w1 in word(4), w2 in word(4)) {
        let whole = sys.product(&w1.concat(&w2)).unwrap();
        let split = sys.product(&w2).unwrap() * sys.product(&w1).unwrap();
        prop_assert!(close(&whole, &split));
    }

    #[test]
    fn observability_rows_are_output_maps(sys in small_system(), w in word(5).prop_filter("nonempty", |w| !w.is_empty())) {
        let o = observability_matrix(&sys, &w).unwrap().matrix;
        prop_assert_eq!(o.nrows(), w.len() * sys.p());
        for t in 0..w.len() {
            let expected = sys.c(w.symbols()[t]) * sys.product(&w.window(0, t)).unwrap();
            prop_assert!(close(&o.rows(t * sys.p(), sys.p()).into_owned(), &expected));
        }
    }

    #[test]
    fn jsr_bracket_tightens_with_depth(sys in small_system(), q in 1usize..6) {
        let short = jsr_bracket(&sys, q, DEFAULT_BUDGET).unwrap();
        let long = jsr_bracket(&sys, q + 1, DEFAULT_BUDGET).unwrap();
        prop_assert!(short.lower <= short.upper + 1e-12);
        prop_assert!(long.lower >= short.lower - 1e-12);
        prop_assert!(long.upper <= short.upper + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chi_ignores_scale(p_mat in spd(2), c in 0.01f64..100.0) {
        let sys = SwitchedLinearSystem::new(
            vec![DMatrix::from_row_slice(2, 2, &[0.5, 0.2, -0.1, 0.6]), DMatrix::from_row_slice(2, 2, &[0.3, -0.4, 0.4, 0.3])],
            vec![DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), DMatrix::from_row_slice(1, 2, &[1.0, 0.5])],
        ).unwrap();
        let a = chi(&sys, &p_mat, 2, DEFAULT_BUDGET).unwrap();
        let b = chi(&sys, &(&p_mat * c), 2, DEFAULT_BUDGET).unwrap();
        prop_assert!(a >= 1.0 - 1e-12);
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn lyapunov_certificate_bounds_the_jsr(
        sys in small_system().prop_map(|s| SwitchedLinearSystem::new(
            (0..2).map(|i| s.a(i).clone()).collect(),
            vec![DMatrix::identity(2, 2); 2],
        ).unwrap()),
        p_mat in spd(2),
        gamma in 0.05f64..2.0,
    ) {
        if lyapunov_condition_holds(&sys, &p_mat, gamma, 1, 1, DEFAULT_BUDGET, 0.0).unwrap() {
            let bracket = jsr_bracket(&sys, 6, DEFAULT_BUDGET).unwrap();
            prop_assert!(gamma >= bracket.lower * (1.0 - 1e-9));
        }
    }
}

// ---- data ----------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pair_extraction_is_pure(seed in any::<u64>(), k in 1usize..4) {
        let sys = SwitchedLinearSystem::new(
            vec![DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.0, 0.8]), DMatrix::from_row_slice(2, 2, &[0.2, -0.7, 0.7, 0.2])],
            vec![DMatrix::from_row_slice(1, 2, &[1.0, 0.3]); 2],
        ).unwrap();
        let set = data::collect(&sys, 8, 2 * k + 1, seed).unwrap();
        let before = set.outputs().clone();
        let first = extract_pairs(set.outputs(), k).unwrap();
        prop_assert_eq!(set.outputs(), &before);
        prop_assert_eq!(first, extract_pairs(set.outputs(), k).unwrap());
    }

    #[test]
    fn zeta_extremes_widen_with_more_data(seed in any::<u64>(), cut in 1usize..40) {
        let sys = SwitchedLinearSystem::single(
            DMatrix::from_row_slice(2, 2, &[0.7, 0.4, -0.4, 0.7]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        ).unwrap();
        let set = data::collect(&sys, 40, 4, seed).unwrap();
        let small = zeta_stats(&extract_pairs(set.truncated(cut).outputs(), 2).unwrap()).unwrap();
        let large = zeta_stats(&extract_pairs(set.outputs(), 2).unwrap()).unwrap();
        prop_assert!(large.zeta_max >= small.zeta_max);
        prop_assert!(large.zeta_min <= small.zeta_min);
    }
}

// ---- solver --------------------------------------------------------------

fn solver_pairs(seed: u64, count: usize) -> data::DataPairSet {
    let sys = SwitchedLinearSystem::new(
        vec![DMatrix::from_row_slice(2, 2, &[0.6, 0.3, -0.2, 0.5]), DMatrix::from_row_slice(2, 2, &[0.4, -0.5, 0.3, 0.4])],
        vec![DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), DMatrix::from_row_slice(1, 2, &[0.5, 1.0])],
    )
    .unwrap();
    let set = data::collect(&sys, count, 4, seed).unwrap();
    extract_pairs(set.outputs(), 2).unwrap()
}

fn gamma_of(pairs: data::DataPairSet, lambda_bar: f64) -> jsrcert::solver::CertificateSolution {
    solve(&ScenarioProblem::new(pairs, lambda_bar, SolverOptions::default()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn optimum_grows_with_data(seed in any::<u64>(), cut in 5usize..30) {
        let all = solver_pairs(seed, 30);
        let mut part = all.clone();
        part.pairs.truncate(cut);
        let tol = SolverOptions::default().tol_bisect;
        prop_assert!(gamma_of(all, 10.0).gamma_star >= gamma_of(part, 10.0).gamma_star - 2.0 * tol);
    }

    #[test]
    fn optimum_ignores_data_scale(seed in any::<u64>(), factor in 0.01f64..100.0) {
        let pairs = solver_pairs(seed, 20);
        let tol = SolverOptions::default().tol_bisect;
        let a = gamma_of(pairs.clone(), 10.0).gamma_star;
        let b = gamma_of(pairs.scaled(factor), 10.0).gamma_star;
        prop_assert!((a - b).abs() <= 2.0 * tol);
    }

    #[test]
    fn wider_band_never_hurts(seed in any::<u64>(), narrow in 1.5f64..5.0) {
        let pairs = solver_pairs(seed, 20);
        let tol = SolverOptions::default().tol_bisect;
        prop_assert!(gamma_of(pairs.clone(), 2.0 * narrow).gamma_star <= gamma_of(pairs, narrow).gamma_star + 2.0 * tol);
    }

    #[test]
    fn solution_is_feasible(seed in any::<u64>()) {
        let pairs = solver_pairs(seed, 20);
        let cert = gamma_of(pairs.clone(), 10.0);
        let eig = cert.p_star.clone().symmetric_eigen().eigenvalues;
        prop_assert!(eig.min() >= 1.0 - BAND_TOL);
        prop_assert!(eig.max() <= 10.0 + BAND_TOL);
        prop_assert!(residuals_at(&cert.p_star, cert.gamma_certified, &pairs).iter().all(|&r| r <= RESIDUAL_TOL));
    }
}

// ---- guarantees ----------------------------------------------------------

proptest! {
    #[test]
    fn delta_nonincreasing(e1 in 1e-6f64..0.5, e2 in 1e-6f64..0.5, n in 2usize..20) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(delta(lo, n).unwrap() >= delta(hi, n).unwrap() - 1e-15);
    }

    #[test]
    fn inc_beta_increasing_and_invertible(x1 in 0.0f64..=1.0, x2 in 0.0f64..=1.0, a in 0.1f64..50.0, b in 0.1f64..50.0) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let (ilo, ihi) = (reg_inc_beta(lo, a, b).unwrap(), reg_inc_beta(hi, a, b).unwrap());
        prop_assert!(ilo <= ihi + 1e-14);
        if (1e-10..1.0 - 1e-10).contains(&ihi) {
            let back = reg_inc_beta_inv(ihi, a, b).unwrap();
            prop_assert!((reg_inc_beta(back, a, b).unwrap() - ihi).abs() <= 1e-9);
        }
    }

    #[test]
    fn bound_dominates_gamma(gamma in 0.0f64..3.0, log_arg in -60.0f64..1.0, n in 2usize..10, shift in 1usize..8) {
        let b = Bound::from_log_argument(gamma, log_arg, n, shift).unwrap();
        prop_assert!(b.value.is_infinite() || b.value >= gamma * (1.0 - 1e-12));
        prop_assert_eq!(b.vacuous, b.value.is_infinite());
    }

    #[test]
    fn bound_grows_with_chi(gamma in 0.01f64..3.0, base in -60.0f64..-1.0, c1 in 1.0f64..1e6, c2 in 1.0f64..1e6, n in 2usize..10) {
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        let a = Bound::from_log_argument(gamma, base + lo.ln(), n, 3).unwrap();
        let b = Bound::from_log_argument(gamma, base + hi.ln(), n, 3).unwrap();
        prop_assert!(b.value >= a.value * (1.0 - 1e-12));
    }
}

// ---- configuration -------------------------------------------------------

proptest! {
    #[test]
    fn flags_override_file(file_k in prop::option::of(1usize..9), flag_k in prop::option::of(1usize..9),
                           file_beta in prop::option::of(0.01f64..0.5), flag_beta in prop::option::of(0.01f64..0.5)) {
        let file = RunConfig { k: file_k, beta: file_beta, ..Default::default() };
        let flags = RunConfig { k: flag_k, beta: flag_beta, ..Default::default() };
        let merged = file.overlay(flags);
        prop_assert_eq!(merged.k, flag_k.or(file_k));
        prop_assert_eq!(merged.beta, flag_beta.or(file_beta));
    }
}

#[test]
fn empty_word_product_is_identity() {
    let sys = SwitchedLinearSystem::single(DMatrix::from_element(3, 3, 0.3), DMatrix::identity(3, 3)).unwrap();
    assert_eq!(sys.product(&SwitchingWord::empty()).unwrap(), DMatrix::identity(3, 3));
    assert!(model::observability_matrix(&sys, &SwitchingWord::empty()).is_err());
}

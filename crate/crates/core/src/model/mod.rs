//! Switched linear systems `x(t+1) = A_σ(t) x(t)`, `y(t) = C_σ(t) x(t)`, and
//! white-box oracles over them.
//!
//! Mode indices are zero-based throughout the crate and in every file format.

mod degeneracy;
mod jsr;
mod observability;
mod words;

pub use degeneracy::{degeneracy_diagnostic, DegeneracyReport, DegeneracyVerdict};
pub use jsr::{jsr_bracket, JsrBracket};
pub use observability::{
    chi, lyapunov_condition_holds, observability_condition_number, observability_index,
    observability_matrix, path_gram, pathwise_index, singular_value_ratio, ObservabilityMatrix,
    PathGram,
};
pub use words::{check_budget, word_count, WordIter, DEFAULT_BUDGET};

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A finite switching sequence `(σ_0, …, σ_{k-1})`. The empty word denotes the
/// identity product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwitchingWord(pub Vec<usize>);

impl SwitchingWord {
    pub fn new(symbols: Vec<usize>) -> Self {
        Self(symbols)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    /// The segment `σ_{start}, …, σ_{start+len-1}`.
    pub fn window(&self, start: usize, len: usize) -> SwitchingWord {
        SwitchingWord(self.0[start..start + len].to_vec())
    }

    /// Concatenation `self ++ other` (self is applied first).
    pub fn concat(&self, other: &SwitchingWord) -> SwitchingWord {
        let mut s = self.0.clone();
        s.extend_from_slice(&other.0);
        SwitchingWord(s)
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        match self.0.iter().find(|&&s| s >= modes) {
            Some(&mode) => Err(Error::InvalidMode { mode, modes }),
            None => Ok(()),
        }
    }
}

impl From<Vec<usize>> for SwitchingWord {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// The tuple `Σ = (n, {(A_i, C_i)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedLinearSystem {
    n: usize,
    p: usize,
    a: Vec<DMatrix<f64>>,
    c: Vec<DMatrix<f64>>,
}

/// A state trajectory together with its outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `T + 1` states, `states[0] = x0`.
    pub states: Vec<DVector<f64>>,
    /// `T` outputs, `outputs[t] = C_σt x_t`.
    pub outputs: Vec<DVector<f64>>,
}

impl SwitchedLinearSystem {
    pub fn new(a: Vec<DMatrix<f64>>, c: Vec<DMatrix<f64>>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidSystem("at least one mode is required".into()));
        }
        if a.len() != c.len() {
            return Err(Error::InvalidSystem(format!(
                "{} dynamics matrices but {} output matrices",
                a.len(),
                c.len()
            )));
        }
        let n = a[0].nrows();
        let p = c[0].nrows();
        if n == 0 || p == 0 {
            return Err(Error::InvalidSystem("dimensions must be positive".into()));
        }
        for (i, (ai, ci)) in a.iter().zip(&c).enumerate() {
            if ai.nrows() != n || ai.ncols() != n {
                return Err(Error::InvalidSystem(format!(
                    "A[{i}] is {}x{}, expected {n}x{n}",
                    ai.nrows(),
                    ai.ncols()
                )));
            }
            if ci.nrows() != p || ci.ncols() != n {
                return Err(Error::InvalidSystem(format!(
                    "C[{i}] is {}x{}, expected {p}x{n}",
                    ci.nrows(),
                    ci.ncols()
                )));
            }
            if ai.iter().chain(ci.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem(format!("mode {i} has non-finite entries")));
            }
        }
        Ok(Self { n, p, a, c })
    }

    /// Single-mode convenience constructor.
    pub fn single(a: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![a], vec![c])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, mode: usize) -> &DMatrix<f64> {
        &self.a[mode]
    }

    pub fn c(&self, mode: usize) -> &DMatrix<f64> {
        &self.c[mode]
    }

    /// Same output maps, every `A_i` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            p: self.p,
            a: self.a.iter().map(|m| m * factor).collect(),
            c: self.c.clone(),
        }
    }

    /// `A_{σ_{k-1}} ⋯ A_{σ_0}`; identity for the empty word.
    pub fn product(&self, word: &SwitchingWord) -> Result<DMatrix<f64>> {
        word.validate(self.modes())?;
        Ok(word
            .symbols()
            .iter()
            .fold(DMatrix::identity(self.n, self.n), |acc, &s| &self.a[s] * acc))
    }

    pub fn simulate(&self, x0: &DVector<f64>, word: &SwitchingWord) -> Result<Trajectory> {
        if x0.len() != self.n {
            return Err(Error::Dimension(format!(
                "initial state has length {}, system has n = {}",
                x0.len(),
                self.n
            )));
        }
        if word.is_empty() {
            return Err(Error::InvalidParameter("simulation horizon must be at least 1".into()));
        }
        word.validate(self.modes())?;
        let mut states = Vec::with_capacity(word.len() + 1);
        let mut outputs = Vec::with_capacity(word.len());
        let mut x = x0.clone();
        for &s in word.symbols() {
            outputs.push(&self.c[s] * &x);
            let next = &self.a[s] * &x;
            states.push(std::mem::replace(&mut x, next));
        }
        states.push(x);
        Ok(Trajectory { states, outputs })
    }

    /// Outputs only, without retaining states.
    pub fn outputs(&self, x0: &DVector<f64>, word: &SwitchingWord) -> Result<Vec<DVector<f64>>> {
        Ok(self.simulate(x0, word)?.outputs)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            n: self.n,
            modes: self.modes(),
            p: self.p,
            a: self.a.iter().map(linalg::to_row_major).collect(),
            c: self.c.iter().map(linalg::to_row_major).collect(),
        }
    }

    pub fn from_file(f: &SystemFile) -> Result<Self> {
        if f.a.len() != f.modes || f.c.len() != f.modes {
            return Err(Error::InvalidSystem(format!(
                "M = {} but file lists {} A and {} C matrices",
                f.modes,
                f.a.len(),
                f.c.len()
            )));
        }
        let mut a = Vec::with_capacity(f.modes);
        let mut c = Vec::with_capacity(f.modes);
        for (i, (ai, ci)) in f.a.iter().zip(&f.c).enumerate() {
            if ai.len() != f.n * f.n {
                return Err(Error::InvalidSystem(format!(
                    "A[{i}] has {} entries, expected n*n = {}",
                    ai.len(),
                    f.n * f.n
                )));
            }
            if ci.len() != f.p * f.n {
                return Err(Error::InvalidSystem(format!(
                    "C[{i}] has {} entries, expected p*n = {}",
                    ci.len(),
                    f.p * f.n
                )));
            }
            a.push(linalg::from_row_major(f.n, f.n, ai));
            c.push(linalg::from_row_major(f.p, f.n, ci));
        }
        let sys = Self::new(a, c)?;
        if sys.n != f.n || sys.p != f.p {
            return Err(Error::InvalidSystem("declared dimensions disagree with matrices".into()));
        }
        Ok(sys)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SystemFile = serde_json::from_str(text)?;
        Self::from_file(&f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("system serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// On-disk system description: row-major matrices per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    #[serde(rename = "M")]
    pub modes: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot90(scale: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, -scale, scale, 0.0])
    }

    #[test]
    fn empty_word_is_identity() {
        let sys = SystemFixture::half();
        assert_eq!(sys.product(&SwitchingWord::empty()).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn scalar_power() {
        let sys = SystemFixture::half();
        let p = sys.product(&vec![0, 0, 0].into()).unwrap();
        assert!((p - DMatrix::identity(2, 2) * 0.125).norm() < 1e-15);
    }

    #[test]
    fn two_mode_product_order() {
        let a1 = DMatrix::from_row_slice(2, 2, &[0.3, -0.7, 0.2, 0.9]);
        let a2 = DMatrix::from_row_slice(2, 2, &[-0.4, 0.1, 0.6, 0.5]);
        let c = DMatrix::identity(2, 2);
        let sys = SwitchedLinearSystem::new(vec![a1.clone(), a2.clone()], vec![c.clone(), c]).unwrap();
        // word (2,1) in one-based notation: σ_0 = mode 2, σ_1 = mode 1
        let p = sys.product(&vec![1, 0].into()).unwrap();
        // naive left fold: start with I, multiply on the left
        let mut naive = DMatrix::identity(2, 2);
        for m in [&a2, &a1] {
            naive = m * naive;
        }
        assert!((&p - &naive).norm() < 1e-15);
        assert!((&p - &a1 * &a2).norm() < 1e-15);
    }

    #[test]
    fn invalid_mode_rejected() {
        let sys = SystemFixture::half();
        assert!(matches!(
            sys.product(&vec![0, 1].into()),
            Err(Error::InvalidMode { mode: 1, modes: 1 })
        ));
    }

    #[test]
    fn simulate_diagonal_scaling() {
        let sys = SystemFixture::half();
        let tr = sys
            .simulate(&DVector::from_vec(vec![1.0, 0.0]), &vec![0, 0, 0].into())
            .unwrap();
        let expected = [[1.0, 0.0], [0.5, 0.0], [0.25, 0.0]];
        assert_eq!(tr.outputs.len(), 3);
        assert_eq!(tr.states.len(), 4);
        for (y, e) in tr.outputs.iter().zip(expected) {
            assert_eq!(y.as_slice(), &e);
        }
    }

    #[test]
    fn simulate_zero_state() {
        let sys = SystemFixture::half();
        let tr = sys.simulate(&DVector::zeros(2), &vec![0; 5].into()).unwrap();
        assert!(tr.states.iter().chain(&tr.outputs).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn simulate_rotation_unrolled_by_hand() {
        // A = 0.9·rot90 maps (a,b) -> (-0.9b, 0.9a); C = (1 0).
        // x0=(1,0) -> x1=(0,0.9) -> x2=(-0.81,0) -> x3=(0,-0.729) -> x4=(0.6561,0)
        let sys = SwitchedLinearSystem::single(
            rot90(0.9),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        )
        .unwrap();
        let tr = sys
            .simulate(&DVector::from_vec(vec![1.0, 0.0]), &vec![0; 4].into())
            .unwrap();
        let ys: Vec<f64> = tr.outputs.iter().map(|y| y[0]).collect();
        let expected = [1.0, 0.0, -0.81, 0.0];
        for (y, e) in ys.iter().zip(expected) {
            assert!((y - e).abs() < 1e-15, "{ys:?}");
        }
        assert!((tr.states[4][0] - 0.6561).abs() < 1e-15);
    }

    #[test]
    fn simulate_dimension_mismatch() {
        let sys = SystemFixture::half();
        assert!(matches!(
            sys.simulate(&DVector::zeros(3), &vec![0].into()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let sys = SystemFixture::half();
        let back = SwitchedLinearSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back, sys);
        let bad = r#"{"n":2,"M":1,"p":2,"A":[[1,0,0]],"C":[[1,0,0,1]]}"#;
        assert!(matches!(SwitchedLinearSystem::from_json(bad), Err(Error::InvalidSystem(_))));
        let nonfinite = SwitchedLinearSystem::new(
            vec![DMatrix::from_element(1, 1, f64::NAN)],
            vec![DMatrix::from_element(1, 1, 1.0)],
        );
        assert!(nonfinite.is_err());
    }

    struct SystemFixture;
    impl SystemFixture {
        fn half() -> SwitchedLinearSystem {
            SwitchedLinearSystem::single(DMatrix::identity(2, 2) * 0.5, DMatrix::identity(2, 2)).unwrap()
        }
    }
}

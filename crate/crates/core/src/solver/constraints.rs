//! Linearization of the pair constraints in the upper-triangle coordinates
//! of a symmetric matrix.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use crate::data::{DataPairSet, ZERO_WINDOW_NORM};
use crate::error::{Error, Result};

/// Coordinates `x_l = P_ij` for `i ≤ j`, row by row.
#[derive(Debug, Clone)]
pub(crate) struct SymCoords {
    pub dim: usize,
    pub index: Vec<(usize, usize)>,
}

impl SymCoords {
    pub fn new(dim: usize) -> Self {
        let index = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
        Self { dim, index }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn to_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (l, &(i, j)) in self.index.iter().enumerate() {
            m[(i, j)] = x[l];
            m[(j, i)] = x[l];
        }
        m
    }

    pub fn to_coords(&self, m: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.index.iter().map(|&(i, j)| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn identity(&self, scale: f64) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.index.iter().map(|&(i, j)| if i == j { scale } else { 0.0 }))
    }

    /// `q` with `q·x = uᵀ P u`.
    pub fn quadratic(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.index
                .iter()
                .map(|&(i, j)| if i == j { u[i] * u[i] } else { 2.0 * u[i] * u[j] }),
        )
    }

    /// `g` with `g·dx = ⟨W, dP⟩_F` for symmetric `W`.
    pub fn gradient_of(&self, w: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.index
                .iter()
                .map(|&(i, j)| if i == j { w[(i, j)] } else { w[(i, j)] + w[(j, i)] }),
        )
    }

    /// Adds the Hessian of `-log det(S)` in these coordinates, where
    /// `w = S⁻¹`: `H_lm = tr(W E_l W E_m)`.
    pub fn add_logdet_hessian(&self, w: &DMatrix<f64>, h: &mut DMatrix<f64>) {
        let perms = |(i, j): (usize, usize)| -> ([(usize, usize); 2], usize) {
            if i == j {
                ([(i, j), (i, j)], 1)
            } else {
                ([(i, j), (j, i)], 2)
            }
        };
        for (l, &el) in self.index.iter().enumerate() {
            let (pl, nl) = perms(el);
            for (m, &em) in self.index.iter().enumerate().skip(l) {
                let (pm, nm) = perms(em);
                let mut acc = 0.0;
                for &(i, j) in &pl[..nl] {
                    for &(a, b) in &pm[..nm] {
                        acc += w[(b, i)] * w[(j, a)];
                    }
                }
                h[(l, m)] += acc;
                if l != m {
                    h[(m, l)] += acc;
                }
            }
        }
    }

    /// Weights with `‖P‖_F² = Σ weight_l x_l²`.
    pub fn frobenius_weights(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.index.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }))
    }
}

/// Pair constraints after normalization to `‖v‖ = 1` and exact deduplication.
#[derive(Debug, Clone)]
pub(crate) struct PairConstraints {
    pub coords: SymCoords,
    /// Normalized pairs, as matrices `v vᵀ`/`z zᵀ` in coordinate form.
    pub zq: DMatrix<f64>,
    pub vq: DMatrix<f64>,
    /// Normalized windows for the matrix-space backend.
    pub v: Vec<DVector<f64>>,
    pub z: Vec<DVector<f64>>,
    pub total: usize,
}

impl PairConstraints {
    pub fn build(pairs: &DataPairSet) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("scenario program needs at least one data pair".into()));
        }
        let kp = pairs.kp();
        let coords = SymCoords::new(kp);
        let mut seen = HashSet::new();
        let mut v = Vec::new();
        let mut z = Vec::new();
        for (index, d) in pairs.pairs.iter().enumerate() {
            if d.v.len() != kp || d.z.len() != kp {
                return Err(Error::Dimension(format!("pair {index} does not have length kp = {kp}")));
            }
            let norm = d.v.norm();
            if !(norm >= ZERO_WINDOW_NORM) {
                return Err(Error::DegeneratePair { index, norm });
            }
            let key: Vec<u64> = d.v.iter().chain(d.z.iter()).map(|x| x.to_bits()).collect();
            if seen.insert(key) {
                v.push(&d.v / norm);
                z.push(&d.z / norm);
            }
        }
        let m = v.len();
        let d = coords.len();
        let mut zq = DMatrix::zeros(m, d);
        let mut vq = DMatrix::zeros(m, d);
        for i in 0..m {
            zq.set_row(i, &coords.quadratic(&z[i]).transpose());
            vq.set_row(i, &coords.quadratic(&v[i]).transpose());
        }
        Ok(Self {
            coords,
            zq,
            vq,
            v,
            z,
            total: pairs.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    /// Rows `(zzᵀ - c vvᵀ)` scaled to unit norm; rows that vanish identically
    /// (`z = ±√c v`) hold for every `P` and are dropped.
    pub fn rows(&self, c: f64) -> DMatrix<f64> {
        let mut kept = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let row = self.zq.row(i) - self.vq.row(i) * c;
            let scale = self.zq.row(i).norm() + c * self.vq.row(i).norm();
            let norm = row.norm();
            if norm > 1e-14 * scale {
                kept.push(row / norm);
            }
        }
        if kept.is_empty() {
            DMatrix::zeros(0, self.coords.len())
        } else {
            DMatrix::from_rows(&kept)
        }
    }

    /// Largest and smallest of `‖z‖²/‖v‖²` over the pairs.
    pub fn ratio_extremes(&self) -> (f64, f64) {
        self.z
            .iter()
            .map(|z| z.norm_squared())
            .fold((0.0_f64, f64::INFINITY), |(hi, lo), r| (hi.max(r), lo.min(r)))
    }
}

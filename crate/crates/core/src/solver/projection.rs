//! Matrix-space projection methods: cyclic projections for feasibility and
//! Dykstra's algorithm for the minimum-norm point.

use nalgebra::DMatrix;

use crate::linalg;

use super::constraints::PairConstraints;

/// Relative improvement the best violation must make within
/// [`STAGNATION_WINDOW`] sweeps before the probe is declared infeasible.
const STAGNATION_GAIN: f64 = 1e-3;
const STAGNATION_WINDOW: usize = 200;

#[derive(Debug, Clone)]
pub(crate) enum Projected {
    Feasible(DMatrix<f64>),
    Infeasible,
    Indeterminate(String),
}

/// Unit-norm halfspace normals `G_i = (z zᵀ - c v vᵀ)/‖·‖_F`; identically
/// vanishing ones are dropped.
pub(crate) fn normals(pc: &PairConstraints, c: f64) -> Vec<DMatrix<f64>> {
    pc.v
        .iter()
        .zip(&pc.z)
        .filter_map(|(v, z)| {
            let zz = z * z.transpose();
            let vv = v * v.transpose();
            let scale = zz.norm() + c * vv.norm();
            let g = zz - vv * c;
            let norm = g.norm();
            (norm > 1e-14 * scale).then(|| g / norm)
        })
        .collect()
}

pub(crate) fn project_band(p: &DMatrix<f64>, lambda_bar: f64) -> DMatrix<f64> {
    let eig = linalg::symmetrize(p).symmetric_eigen();
    let clipped = eig.eigenvalues.map(|l| l.clamp(1.0, lambda_bar));
    linalg::symmetrize(&(&eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()))
}

fn max_violation(p: &DMatrix<f64>, normals: &[DMatrix<f64>]) -> f64 {
    normals.iter().map(|g| p.dot(g)).fold(f64::NEG_INFINITY, f64::max)
}

fn project_halfspace(p: &mut DMatrix<f64>, g: &DMatrix<f64>) {
    let viol = p.dot(g);
    if viol > 0.0 {
        *p -= g * viol;
    }
}

/// Alternating projections between the band and the violated halfspaces.
pub(crate) fn feasibility(
    pc: &PairConstraints,
    c: f64,
    lambda_bar: f64,
    tol: f64,
    max_sweeps: usize,
    sweeps: &mut usize,
) -> Projected {
    let kp = pc.coords.dim;
    let gs = normals(pc, c);
    let mut p = DMatrix::identity(kp, kp);
    let mut best = max_violation(&p, &gs);
    if best <= tol {
        return Projected::Feasible(p);
    }
    let mut best_at = 0;
    for sweep in 1..=max_sweeps {
        *sweeps += 1;
        for g in &gs {
            project_halfspace(&mut p, g);
        }
        p = project_band(&p, lambda_bar);
        let viol = max_violation(&p, &gs);
        if viol <= tol {
            return Projected::Feasible(p);
        }
        if viol < best * (1.0 - STAGNATION_GAIN) {
            best = viol;
            best_at = sweep;
        } else if sweep - best_at >= STAGNATION_WINDOW {
            return Projected::Infeasible;
        }
    }
    Projected::Indeterminate(format!("no decision after {max_sweeps} sweeps (violation {best:e})"))
}

/// Projection of the zero matrix onto `band ∩ halfspaces` by Dykstra's method.
pub(crate) fn min_norm(
    pc: &PairConstraints,
    c: f64,
    lambda_bar: f64,
    tol: f64,
    max_sweeps: usize,
    sweeps: &mut usize,
) -> Result<DMatrix<f64>, String> {
    let kp = pc.coords.dim;
    let gs = normals(pc, c);
    let mut x = DMatrix::<f64>::zeros(kp, kp);
    let mut inc_half = vec![DMatrix::<f64>::zeros(kp, kp); gs.len()];
    let mut inc_band = DMatrix::<f64>::zeros(kp, kp);
    for _ in 0..max_sweeps {
        *sweeps += 1;
        let prev = x.clone();
        for (g, inc) in gs.iter().zip(inc_half.iter_mut()) {
            let mut y = &x + &*inc;
            let before = y.clone();
            project_halfspace(&mut y, g);
            *inc = before - &y;
            x = y;
        }
        let y = &x + &inc_band;
        let projected = project_band(&y, lambda_bar);
        inc_band = y - &projected;
        x = projected;
        let moved = (&x - prev).norm();
        if moved <= tol * x.norm().max(1.0) && max_violation(&x, &gs) <= tol {
            return Ok(x);
        }
    }
    Err(format!("Dykstra iteration did not converge in {max_sweeps} sweeps"))
}

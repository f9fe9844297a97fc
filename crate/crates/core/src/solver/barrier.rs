//! Log-barrier interior-point method for the inner problems.
//!
//! Phase I minimizes a common slack `s` subject to `a_iᵀx ≤ s` and the open
//! band `I ≺ P ≺ λ̄I`; the sign of the optimal slack decides feasibility, and
//! the central-path duality gap `(m + 2kp)/t` turns a positive lower bound on
//! it into an infeasibility certificate. The min-norm stage minimizes
//! `‖P‖_F²` over the strict interior starting from a Phase I point.
//!
//! Internally the iterate is `Q = P - I`, so the lower band margin is carried
//! exactly rather than as a difference of numbers near 1.

use nalgebra::{DMatrix, DVector};

use super::constraints::SymCoords;

const MAX_GROWTH: f64 = 10.0;
/// Worst-case barrier decrease one centering may need, `m(μ - 1 - ln μ)`.
const CENTERING_BUDGET: f64 = 25.0;
const MAX_OUTER: usize = 4000;
const MAX_CENTERING: usize = 2000;
const DECREMENT_TOL: f64 = 1e-10;
const ARMIJO: f64 = 0.25;

#[derive(Debug, Clone)]
pub(crate) enum PhaseOne {
    /// Interior point with the final slack; `slack < 0` is strict feasibility.
    Feasible { x: DVector<f64>, slack: f64 },
    Infeasible,
    Indeterminate(String),
}

#[derive(Clone, Copy, PartialEq)]
enum Objective {
    Slack,
    MinNorm,
}

pub(crate) struct Barrier<'a> {
    coords: &'a SymCoords,
    rows: &'a DMatrix<f64>,
    lambda_bar: f64,
    weights: DVector<f64>,
    /// Coordinates of `I` and the row offsets `a_iᵀ·I`.
    identity: DVector<f64>,
    offset: DVector<f64>,
    pub newton_steps: usize,
}

struct Band {
    logdet: f64,
    w_lower: DMatrix<f64>,
    w_upper: DMatrix<f64>,
}

impl<'a> Barrier<'a> {
    pub fn new(coords: &'a SymCoords, rows: &'a DMatrix<f64>, lambda_bar: f64) -> Self {
        Self {
            coords,
            rows,
            lambda_bar,
            weights: coords.frobenius_weights(),
            identity: coords.identity(1.0),
            offset: rows * coords.identity(1.0),
            newton_steps: 0,
        }
    }

    fn degrees(&self) -> f64 {
        (self.rows.nrows() + 2 * self.coords.dim) as f64
    }

    /// Growth factor for `t`. Damped Newton may need a number of steps
    /// proportional to `m(μ - 1 - ln μ)` per centering, so `μ` shrinks as
    /// the constraint count grows; `(μ-1)²/2` overestimates `μ - 1 - ln μ`.
    fn growth(&self) -> f64 {
        (1.0 + (2.0 * CENTERING_BUDGET / self.degrees()).sqrt()).min(MAX_GROWTH)
    }

    fn band(&self, x: &DVector<f64>, want_inverse: bool) -> Option<Band> {
        let lower = self.coords.to_matrix(x);
        let n = self.coords.dim;
        let upper = DMatrix::identity(n, n) * (self.lambda_bar - 1.0) - &lower;
        let cl = lower.cholesky()?;
        let cu = upper.cholesky()?;
        let logdet = 2.0 * (cl.l_dirty().diagonal().map(f64::ln).sum() + cu.l_dirty().diagonal().map(f64::ln).sum());
        if !logdet.is_finite() {
            return None;
        }
        let (w_lower, w_upper) = if want_inverse {
            (cl.inverse(), cu.inverse())
        } else {
            (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0))
        };
        Some(Band {
            logdet,
            w_lower,
            w_upper,
        })
    }

    fn split(&self, y: &DVector<f64>, obj: Objective) -> (DVector<f64>, f64) {
        let d = self.coords.len();
        let x = y.rows(0, d).into_owned();
        let s = if obj == Objective::Slack { y[d] } else { 0.0 };
        (x, s)
    }

    /// Slacks `r_i`, or `None` outside the domain.
    fn slacks(&self, x: &DVector<f64>, s: f64) -> Option<DVector<f64>> {
        let r = (self.rows * x + &self.offset).map(|ax| s - ax);
        if r.iter().all(|&ri| ri > 0.0 && ri.is_finite()) {
            Some(r)
        } else {
            None
        }
    }

    fn objective(&self, x: &DVector<f64>, s: f64, obj: Objective) -> f64 {
        match obj {
            Objective::Slack => s,
            Objective::MinNorm => x
                .iter()
                .zip(self.weights.iter())
                .zip(self.identity.iter())
                .map(|((a, w), e)| w * (a + e) * (a + e))
                .sum(),
        }
    }

    fn value(&self, y: &DVector<f64>, t: f64, obj: Objective) -> Option<f64> {
        let (x, s) = self.split(y, obj);
        let r = self.slacks(&x, s)?;
        let band = self.band(&x, false)?;
        Some(t * self.objective(&x, s, obj) - r.map(f64::ln).sum() - band.logdet)
    }

    fn derivatives(&self, y: &DVector<f64>, t: f64, obj: Objective) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = self.coords.len();
        let (x, s) = self.split(y, obj);
        let r = self.slacks(&x, s)?;
        let band = self.band(&x, true)?;
        let value = t * self.objective(&x, s, obj) - r.map(f64::ln).sum() - band.logdet;
        let dim = y.len();
        let inv_r = r.map(|ri| 1.0 / ri);
        let mut scaled = self.rows.clone();
        for (mut row, &w) in scaled.row_iter_mut().zip(inv_r.iter()) {
            row *= w;
        }
        let mut g = DVector::zeros(dim);
        let mut h = DMatrix::zeros(dim, dim);
        {
            let gx = scaled.transpose() * DVector::from_element(r.len(), 1.0)
                - self.coords.gradient_of(&band.w_lower)
                + self.coords.gradient_of(&band.w_upper);
            g.rows_mut(0, d).copy_from(&gx);
            let mut hxx = scaled.transpose() * &scaled;
            self.coords.add_logdet_hessian(&band.w_lower, &mut hxx);
            self.coords.add_logdet_hessian(&band.w_upper, &mut hxx);
            h.view_mut((0, 0), (d, d)).copy_from(&hxx);
        }
        match obj {
            Objective::Slack => {
                g[d] = t - inv_r.sum();
                let hxs = -(scaled.transpose() * &inv_r);
                h.view_mut((0, d), (d, 1)).copy_from(&hxs);
                h.view_mut((d, 0), (1, d)).copy_from(&hxs.transpose());
                h[(d, d)] = inv_r.norm_squared();
            }
            Objective::MinNorm => {
                for l in 0..d {
                    g[l] += 2.0 * t * self.weights[l] * (x[l] + self.identity[l]);
                    h[(l, l)] += 2.0 * t * self.weights[l];
                }
            }
        }
        Some((value, g, h))
    }

    fn newton_direction(h: DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
        let scale = h.diagonal().amax().max(f64::MIN_POSITIVE);
        let mut ridge = 0.0;
        for _ in 0..8 {
            let mut hr = h.clone();
            for i in 0..hr.nrows() {
                hr[(i, i)] += ridge;
            }
            if let Some(ch) = hr.cholesky() {
                let dir = ch.solve(&(-g));
                if dir.iter().all(|v| v.is_finite()) {
                    return Some(dir);
                }
            }
            ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
        }
        None
    }

    /// Centers at parameter `t`. `stop` is polled after every step and ends
    /// the centering early when it returns true.
    fn center(
        &mut self,
        y: &mut DVector<f64>,
        t: f64,
        obj: Objective,
        stop: &dyn Fn(&DVector<f64>) -> bool,
    ) -> Result<(), String> {
        for _ in 0..MAX_CENTERING {
            if stop(y) {
                return Ok(());
            }
            let (value, g, h) = self
                .derivatives(y, t, obj)
                .ok_or_else(|| "iterate left the barrier domain".to_string())?;
            let dir = Self::newton_direction(h, &g).ok_or_else(|| "singular Newton system".to_string())?;
            let slope = g.dot(&dir);
            // below this the decrease is lost in the rounding of the barrier value
            let floor = DECREMENT_TOL.max(64.0 * f64::EPSILON * value.abs());
            if -slope / 2.0 <= floor {
                return Ok(());
            }
            self.newton_steps += 1;
            let mut alpha = 1.0;
            loop {
                let trial = &*y + &dir * alpha;
                if let Some(v) = self.value(&trial, t, obj) {
                    if v <= value + ARMIJO * alpha * slope {
                        *y = trial;
                        if v >= value {
                            // accepted only through rounding: centered to working precision
                            return Ok(());
                        }
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-16 {
                    // no progress possible at working precision
                    return if -slope < 1e-6 * value.abs().max(1.0) {
                        Ok(())
                    } else {
                        Err(format!("line search stalled with Newton decrement {:e}", -slope))
                    };
                }
            }
        }
        Err("centering did not converge".into())
    }

    /// Decides feasibility of `{a_iᵀx ≤ 0} ∩ band` from the start `x0`,
    /// which must lie strictly inside the band. A final slack in `(0, tol]`
    /// is reported as (marginally) feasible.
    pub fn phase_one(&mut self, x0: &DVector<f64>, tol: f64) -> PhaseOne {
        let d = self.coords.len();
        if self.rows.nrows() == 0 {
            return PhaseOne::Feasible {
                x: x0.clone(),
                slack: f64::NEG_INFINITY,
            };
        }
        let q0 = x0 - &self.identity;
        let s0 = (self.rows * &q0 + &self.offset).max() + 1.0;
        let mut y = q0.resize_vertically(d + 1, s0);
        let mut t = 1.0;
        let stop = move |y: &DVector<f64>| y[d] < 0.0;
        for _ in 0..MAX_OUTER {
            if let Err(reason) = self.center(&mut y, t, Objective::Slack, &stop) {
                return PhaseOne::Indeterminate(reason);
            }
            let slack = y[d];
            if slack < 0.0 {
                return PhaseOne::Feasible {
                    x: y.rows(0, d) + &self.identity,
                    slack,
                };
            }
            let gap = self.degrees() / t;
            if slack - gap > 0.0 {
                return PhaseOne::Infeasible;
            }
            if gap <= tol {
                return if slack <= tol {
                    PhaseOne::Feasible {
                        x: y.rows(0, d) + &self.identity,
                        slack,
                    }
                } else {
                    PhaseOne::Infeasible
                };
            }
            t *= self.growth();
        }
        PhaseOne::Indeterminate("outer iteration cap reached".into())
    }

    /// Minimum-Frobenius-norm point of the strict interior, to relative
    /// accuracy `tol` in `‖P‖_F²`. `x0` must be strictly feasible.
    pub fn min_norm(&mut self, x0: &DVector<f64>, tol: f64) -> Result<DVector<f64>, String> {
        let mut y = x0 - &self.identity;
        let mut t = 1.0 / self.objective(&y, 0.0, Objective::MinNorm).max(1.0);
        let never = |_: &DVector<f64>| false;
        for _ in 0..MAX_OUTER {
            self.center(&mut y, t, Objective::MinNorm, &never)?;
            let f = self.objective(&y, 0.0, Objective::MinNorm);
            if self.degrees() / t <= tol * f.max(1.0) {
                return Ok(y + &self.identity);
            }
            t *= self.growth();
        }
        Err("outer iteration cap reached".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_band() {
        // kp = 1: P = x ∈ (1, 4), single row a = 1 means x ≤ s
        let coords = SymCoords::new(1);
        let rows = DMatrix::from_element(1, 1, 1.0);
        let mut b = Barrier::new(&coords, &rows, 4.0);
        // x ≤ 0 contradicts x > 1: optimal slack is 1
        assert!(matches!(b.phase_one(&DVector::from_element(1, 2.5), 1e-9), PhaseOne::Infeasible));
        let rows = DMatrix::from_element(1, 1, -1.0);
        let mut b = Barrier::new(&coords, &rows, 4.0);
        match b.phase_one(&DVector::from_element(1, 2.5), 1e-9) {
            PhaseOne::Feasible { slack, .. } => assert!(slack < 0.0),
            other => panic!("{other:?}"),
        }
        let x = b.min_norm(&DVector::from_element(1, 2.5), 1e-10).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-8, "{}", x[0]);
    }

    #[test]
    fn min_norm_with_active_halfspace() {
        // kp = 2, constraint P_11 ≥ 2 written as -P_11 + 2 ≤ 0 is affine; emulate
        // with P_11 - 2 P_22 ≥ 0 i.e. row (-1, 0, 2) ≤ 0 in (P11, P12, P22)
        let coords = SymCoords::new(2);
        let rows = DMatrix::from_row_slice(1, 3, &[-1.0, 0.0, 2.0]);
        let mut b = Barrier::new(&coords, &rows, 10.0);
        let start = match b.phase_one(&coords.identity(5.5), 1e-9) {
            PhaseOne::Feasible { x, slack } => {
                assert!(slack < 0.0);
                x
            }
            other => panic!("{other:?}"),
        };
        let x = b.min_norm(&start, 1e-11).unwrap();
        // minimize P11² + 2 P12² + P22² with P11 ≥ 2 P22, P ⪰ I: P = diag(2, 1)
        assert!((x[0] - 2.0).abs() < 1e-6 && x[1].abs() < 1e-6 && (x[2] - 1.0).abs() < 1e-6, "{x:?}");
    }
}

//! Regularized incomplete beta function, its inverse, the spherical-cap
//! shrink factor `δ(ε)` and the scenario confidence `φ(ε; d, N)`.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const CF_MAX_TERMS: usize = 200;
const CF_TOL: f64 = 1e-14;
const TINY: f64 = 1e-300;

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln Γ(x) - ((x - ½) ln x - x + ½ ln 2π)` for `x ≥ 10` (Stirling series).
fn ln_gamma_correction(x: f64) -> f64 {
    const COEF: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let r = 1.0 / (x * x);
    COEF.iter().rev().fold(0.0, |acc, c| acc * r + c) / x
}

/// `ln B(a, b)` without the cancellation of three large `ln Γ` values.
fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a < b { (a, b) } else { (b, a) };
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let s = p + q;
    if p >= 10.0 {
        let corr = ln_gamma_correction(p) + ln_gamma_correction(q) - ln_gamma_correction(s);
        -0.5 * q.ln() + half_ln_2pi + corr + (p - 0.5) * (p / s).ln() + q * (-p / s).ln_1p()
    } else if q >= 10.0 {
        let corr = ln_gamma_correction(q) - ln_gamma_correction(s);
        ln_gamma(p) + corr + p - p * s.ln() + (q - 0.5) * (-p / s).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(s)
    }
}

fn check_shape(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta shape parameters must be positive, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Modified Lentz evaluation of the continued fraction for `I(x; a, b)`.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_TOL {
            break;
        }
    }
    h
}

/// `ln(x^a (1-x)^b / (a B(a,b)))`, the prefactor of the continued fraction.
fn ln_front(x: f64, a: f64, b: f64) -> f64 {
    a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b) - a.ln()
}

/// Regularized incomplete beta function `I(x; a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_shape(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("incomplete beta argument {x} outside [0, 1]")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        ln_front(x, a, b).exp() * beta_cf(x, a, b)
    } else {
        1.0 - ln_front(1.0 - x, b, a).exp() * beta_cf(1.0 - x, b, a)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Beta density `x^{a-1}(1-x)^{b-1}/B(a,b)`, the derivative of `I(·; a, b)`.
fn beta_density(x: f64, a: f64, b: f64) -> f64 {
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)).exp()
}

/// Inverse of `x ↦ I(x; a, b)`: bisection safeguarded Newton iteration.
pub fn reg_inc_beta_inv(y: f64, a: f64, b: f64) -> Result<f64> {
    check_shape(a, b)?;
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::InvalidParameter(format!("incomplete beta level {y} outside [0, 1]")));
    }
    if y == 0.0 || y == 1.0 {
        return Ok(y);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = 0.5;
    for _ in 0..400 {
        let f = reg_inc_beta(x, a, b)? - y;
        if f.abs() <= 1e-15 * y.min(1.0 - y) {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
        let slope = beta_density(x, a, b);
        let newton = x - f / slope;
        x = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
    }
    Ok(x)
}

/// `ln δ(ε)` for the unit sphere in `ℝⁿ`; `-∞` once `ε ≥ 1/2`.
pub fn ln_delta(epsilon: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("delta needs n >= 2, got {n}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta needs epsilon >= 0, got {epsilon}")));
    }
    if epsilon >= 0.5 {
        return Ok(f64::NEG_INFINITY);
    }
    let a = 0.5 * (n as f64 - 1.0);
    // 1 - I⁻¹(2ε; a, ½) = I⁻¹(1 - 2ε; ½, a); the second form keeps precision
    // when the cap is nearly a hemisphere
    let one_minus = if 2.0 * epsilon < 0.5 {
        1.0 - reg_inc_beta_inv(2.0 * epsilon, a, 0.5)?
    } else {
        reg_inc_beta_inv(1.0 - 2.0 * epsilon, 0.5, a)?
    };
    Ok(0.5 * one_minus.ln())
}

/// Shrink factor `δ(ε)`: distance from the centre plane to the base of a
/// spherical cap of normalized measure `ε`.
pub fn delta(epsilon: f64, n: usize) -> Result<f64> {
    Ok(ln_delta(epsilon, n)?.exp())
}

/// Inverse of `δ` on `(0, 1]`: the cap measure whose shrink factor is `t`.
pub fn delta_inv(t: f64, n: usize) -> Result<f64> {
    if n < 2 || !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta_inv needs t in (0, 1] and n >= 2, got t = {t}, n = {n}")));
    }
    let a = 0.5 * (n as f64 - 1.0);
    Ok(0.5 * reg_inc_beta(1.0 - t * t, a, 0.5)?)
}

fn check_phi(epsilon: f64, d: u64, n_samples: u64) -> Result<()> {
    if d == 0 || n_samples < d {
        return Err(Error::InvalidParameter(format!("phi needs N >= d >= 1, got d = {d}, N = {n_samples}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("phi needs epsilon in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Scenario confidence deficit `φ(ε; d, N) = 1 - I(ε; d, N - d + 1)`.
pub fn phi(epsilon: f64, d: u64, n_samples: u64) -> Result<f64> {
    check_phi(epsilon, d, n_samples)?;
    // evaluated through the symmetry I(x; a, b) = 1 - I(1 - x; b, a) so small
    // deficits are not lost to cancellation
    reg_inc_beta(1.0 - epsilon, (n_samples - d + 1) as f64, d as f64)
}

/// `φ` as the binomial tail `Σ_{i<d} C(N,i) εⁱ (1-ε)^{N-i}`.
pub fn phi_binomial(epsilon: f64, d: u64, n_samples: u64) -> Result<f64> {
    check_phi(epsilon, d, n_samples)?;
    let n = n_samples as f64;
    let (le, l1e) = (epsilon.ln(), (-epsilon).ln_1p());
    let ln_choose = |i: f64| ln_gamma(n + 1.0) - ln_gamma(i + 1.0) - ln_gamma(n - i + 1.0);
    Ok((0..d)
        .map(|i| {
            let i = i as f64;
            (ln_choose(i) + i * le + (n - i) * l1e).exp()
        })
        .sum::<f64>()
        .min(1.0))
}

/// Scenario violation level `ε` at which `φ(ε; d, N) = deficit`.
pub fn phi_inv(deficit: f64, d: u64, n_samples: u64) -> Result<f64> {
    if d == 0 || n_samples < d {
        return Err(Error::InvalidParameter(format!("phi needs N >= d >= 1, got d = {d}, N = {n_samples}")));
    }
    if !(deficit > 0.0 && deficit < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence deficit must lie in (0, 1), got {deficit}")));
    }
    reg_inc_beta_inv(1.0 - deficit, d as f64, (n_samples - d + 1) as f64)
}

//! Complete elliptic integrals and the parametric ring integrals built on them.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `K(m)` and `E(m)` for the parameter `m = k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub k: f64,
    pub e: f64,
}

/// Complete elliptic integrals of the first and second kind by the
/// arithmetic-geometric mean.
///
/// ```text
/// K(m) = ∫₀^{π/2} dθ / √(1 − m sin²θ)
/// E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ
/// ```
pub fn elliptic_ke(m: f64) -> Result<EllipticPair> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("elliptic parameter m must lie in [0, 1), got {m}")));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    // Σ 2^{n-1} c_n², starting from c_0² = m
    let mut sum = 0.5 * m;
    let mut weight = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
        weight *= 2.0;
        sum += weight * c * c;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    let k = PI / (2.0 * a);
    Ok(EllipticPair { k, e: k * (1.0 - sum) })
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("ring integral needs |δ| < 1, got {delta}")))
    }
}

/// Below this `|δ|` the closed form of `I_s` loses digits to cancellation
/// and the power series is used instead.
pub const I_S_SERIES_THRESHOLD: f64 = 1e-2;

/// `I_s(δ) = ∫₀¹ sin 2πv / (1 − δ sin 2πv)^{3/2} dv`.
pub fn i_s(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta < 0.0 {
        // odd in δ (shift v by ½)
        return Ok(-i_s(-delta)?);
    }
    if delta < I_S_SERIES_THRESHOLD {
        return Ok(i_s_series(delta));
    }
    let m = 2.0 * delta / (1.0 + delta);
    let EllipticPair { k, e } = elliptic_ke(m)?;
    Ok(2.0 / PI * (e - (1.0 - delta) * k) / (delta * (1.0 - delta) * (1.0 + delta).sqrt()))
}

/// Odd power series of `I_s`: expand `(1 − δs)^{-3/2}` binomially and
/// integrate the even powers of `sin`.
fn i_s_series(delta: f64) -> f64 {
    // coefficient of x^n in (1 - x)^{-3/2}: Π_{j=1..n} (2j + 1) / (2j)
    // mean of sin^{2p}: Π_{j=1..p} (2j - 1) / (2j)
    let mut binom = 1.5; // n = 1
    let mut mean = 0.5; // p = 1
    let mut power = delta;
    let mut sum = 0.0;
    let mut n = 1usize;
    loop {
        let term = binom * mean * power;
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() || n > 200 {
            break;
        }
        // advance n by 2 and p by 1
        let (n1, n2) = ((n + 1) as f64, (n + 2) as f64);
        binom *= (2.0 * n1 + 1.0) / (2.0 * n1) * (2.0 * n2 + 1.0) / (2.0 * n2);
        let p = (n.div_ceil(2) + 1) as f64;
        mean *= (2.0 * p - 1.0) / (2.0 * p);
        power *= delta * delta;
        n += 2;
    }
    sum
}

/// `I_0(δ) = ∫₀¹ (1 − δ sin 2πv)^{-3/2} dv`.
pub fn i_0(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta < 0.0 {
        return i_0(-delta);
    }
    let m = 2.0 * delta / (1.0 + delta);
    let EllipticPair { e, .. } = elliptic_ke(m)?;
    Ok(2.0 / PI * e / ((1.0 - delta) * (1.0 + delta).sqrt()))
}

/// `I_c(δ) = ∫₀¹ cos 2πv / (1 − δ sin 2πv)^{3/2} dv`, which vanishes identically.
pub fn i_c(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(0.0)
}

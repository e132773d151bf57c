//! Bessel functions of the first kind and the Jacobi–Anger expansions of
//! cos(x cos φ) and sin(x cos φ).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest |x| accepted by the ascending series.
pub const SERIES_X_LIMIT: f64 = 30.0;
/// Largest order accepted.
pub const MAX_ORDER: u32 = 64;
/// Default truncation for expansions.
pub const DEFAULT_TERMS: usize = 30;

/// J_n(x) by the ascending series Σ (−1)^k (x/2)^{2k+n} / (k! (n+k)!).
///
/// ```
/// use kslant::bessel::bessel_j;
/// assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
/// assert!(bessel_j(0, 2.404825557695773).unwrap().abs() < 1e-12);
/// ```
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > SERIES_X_LIMIT {
        return Err(Error::RangeExceeded { x, limit: SERIES_X_LIMIT });
    }
    if n > MAX_ORDER {
        return Err(Error::BadParams(format!("Bessel order {n} exceeds {MAX_ORDER}")));
    }
    let half = 0.5 * x;
    // (x/2)^n / n!
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    if term == 0.0 {
        return Ok(0.0);
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..500u32 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() && k as f64 > half.abs() {
            break;
        }
    }
    Ok(sum)
}

/// J_n(x) = (1/2π)∫₀^{2π} cos(nφ − x sin φ) dφ by the periodic trapezoid
/// rule, which converges geometrically for this entire integrand.
pub fn bessel_j_integral(n: u32, x: f64, nodes: usize) -> f64 {
    let h = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|i| {
            let phi = i as f64 * h;
            (n as f64 * phi - x * phi.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

/// Truncation record of an expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselTruncation {
    pub terms: usize,
    /// Size of the first omitted terms, 2(|J_{2K+1}| + |J_{2K+2}|).
    pub tail_bound: f64,
}

impl BesselTruncation {
    pub fn new(x: f64, terms: usize) -> Result<Self> {
        let k = terms as u32;
        let tail = if 2 * k + 2 <= MAX_ORDER {
            2.0 * (bessel_j(2 * k + 1, x)?.abs() + bessel_j(2 * k + 2, x)?.abs())
        } else {
            0.0
        };
        Ok(BesselTruncation { terms, tail_bound: tail })
    }
}

/// Coefficients of cos(x cos φ) = Σ_j c_j cos(jφ), j = 0..=2K.
pub fn cos_coefficients(x: f64, terms: usize) -> Result<Vec<f64>> {
    let mut c = vec![0.0; 2 * terms + 1];
    c[0] = bessel_j(0, x)?;
    for k in 1..=terms {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * k] = 2.0 * sign * bessel_j(2 * k as u32, x)?;
    }
    Ok(c)
}

/// Coefficients of sin(x cos φ) = Σ_j c_j cos(jφ), j = 0..=2K.
pub fn sin_coefficients(x: f64, terms: usize) -> Result<Vec<f64>> {
    let mut c = vec![0.0; 2 * terms + 1];
    for k in 1..=terms {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        c[2 * k - 1] = 2.0 * sign * bessel_j(2 * k as u32 - 1, x)?;
    }
    Ok(c)
}

fn cosine_sum(c: &[f64], phi: f64) -> f64 {
    c.iter().enumerate().map(|(j, cj)| cj * (j as f64 * phi).cos()).sum()
}

/// J₀(x) + 2Σ_{k=1}^{K} (−1)^k J_{2k}(x) cos(2kφ) ≈ cos(x cos φ).
pub fn cos_expansion(x: f64, phi: f64, terms: usize) -> Result<f64> {
    Ok(cosine_sum(&cos_coefficients(x, terms)?, phi))
}

/// 2Σ_{k=1}^{K} (−1)^{k−1} J_{2k−1}(x) cos((2k−1)φ) ≈ sin(x cos φ).
pub fn sin_expansion(x: f64, phi: f64, terms: usize) -> Result<f64> {
    Ok(cosine_sum(&sin_coefficients(x, terms)?, phi))
}

/// The sine expansion with the sign pattern (−1)^k instead of (−1)^{k−1}.
/// It sums to −sin(x cos φ).
pub fn sin_expansion_flipped(x: f64, phi: f64, terms: usize) -> Result<f64> {
    Ok(-sin_expansion(x, phi, terms)?)
}

use num_complex::Complex64;
use std::f64::consts::PI;

use super::zeta::zeta_even;
use crate::error::{Error, Result};

/// Principal branch of the classical dilogarithm `li2(z) = -int_0^z log(1-t)/t dt`.
///
/// The cut is `[1, +inf)`; `z = 1` itself returns the limit `pi^2/6`.
pub fn dilog(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        if z.re == 1.0 {
            return Ok(Complex64::new(PI * PI / 6.0, 0.0));
        }
        return Err(Error::BranchCut { z });
    }
    if z.norm_sqr() <= 1.0 {
        return Ok(dilog_unit_disk(z));
    }
    // li2(z) + li2(1/z) = -pi^2/6 - log(-z)^2 / 2
    let log_neg = (-z).ln();
    Ok(-PI * PI / 6.0 - 0.5 * log_neg * log_neg - dilog_unit_disk(z.inv()))
}

fn dilog_unit_disk(z: Complex64) -> Complex64 {
    if z.re > 0.5 {
        if z == Complex64::new(1.0, 0.0) {
            return Complex64::new(PI * PI / 6.0, 0.0);
        }
        // li2(z) + li2(1-z) = pi^2/6 - log(z) log(1-z)
        let one_minus = Complex64::new(1.0, 0.0) - z;
        return PI * PI / 6.0 - z.ln() * one_minus.ln() - dilog_bernoulli(one_minus);
    }
    dilog_bernoulli(z)
}

/// Series in `w = -log(1-z)`: `sum_k B_k w^{k+1} / (k+1)!`.
/// Requires `|z| <= 1`, `Re z <= 1/2`, where `|w| < 1.3`.
fn dilog_bernoulli(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    let w = -(Complex64::new(1.0, 0.0) - z).ln();
    let w2 = w * w;
    let ratio = w2 / (4.0 * PI * PI);
    let mut sum = w - 0.25 * w2;
    let mut power = w;
    for k in 1..60u32 {
        power *= ratio;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = power * (sign * 2.0 * zeta_even(k) / (2.0 * k as f64 + 1.0));
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    sum
}

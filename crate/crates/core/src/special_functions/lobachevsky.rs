use std::f64::consts::PI;

use super::zeta::zeta_even;

const SERIES_CUTOFF: f64 = 1e-17;

/// Clausen function `Cl2(x) = sum_{k>=1} sin(k x) / k^2`.
///
/// Evaluated on `(-pi, pi]` through its Bernoulli expansion
/// `x - x ln|x| + sum_k zeta(2k) / (k (2k+1)) * x^{2k+1} / (2 pi)^{2k}`,
/// whose terms shrink at least like `4^{-k}` there.
pub fn clausen2(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x.rem_euclid(two_pi);
    if y > PI {
        y -= two_pi;
    }
    if y == 0.0 {
        return 0.0;
    }
    let ratio = (y / two_pi).powi(2);
    let mut power = y;
    let mut tail = 0.0;
    for k in 1..200u32 {
        power *= ratio;
        let kf = k as f64;
        let term = zeta_even(k) / (kf * (2.0 * kf + 1.0)) * power;
        tail += term;
        if term.abs() < SERIES_CUTOFF {
            break;
        }
    }
    y - y * y.abs().ln() + tail
}

/// Lobachevsky function `Lambda(theta) = -int_0^theta log|2 sin t| dt`.
///
/// Odd and pi-periodic; equal to `Cl2(2 theta) / 2`.
pub fn lobachevsky(theta: f64) -> f64 {
    0.5 * clausen2(2.0 * theta)
}

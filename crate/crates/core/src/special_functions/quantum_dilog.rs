use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::quadrature::integrate;
use crate::error::{Error, Result};

/// Quantum parameter; strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Hbar(f64);

impl Hbar {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter(format!("hbar must be positive, got {value}")))
        }
    }

    /// The value `2/n` attached to level `n`.
    pub fn from_level(n: u64) -> Result<Self> {
        Self::new(2.0 / n as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Hbar {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Hbar> for f64 {
    fn from(h: Hbar) -> f64 {
        h.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdlOptions {
    /// Absolute tolerance on the small quantum dilogarithm.
    pub tolerance: f64,
    /// Radius of the half circle avoiding `t = 0`.
    pub radius: f64,
    pub max_intervals: usize,
    pub pole_guard: f64,
}

impl Default for QdlOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            radius: 0.5,
            max_intervals: 4000,
            pole_guard: 1e-9,
        }
    }
}

/// Bounds of the open strip where the defining integral converges.
pub fn strip_bounds(hbar: Hbar) -> (f64, f64) {
    let h = hbar.value();
    (-PI * h / 2.0, PI + PI * h / 2.0)
}

pub fn small_qdl(z: Complex64, hbar: Hbar) -> Result<Complex64> {
    small_qdl_with(z, hbar, &QdlOptions::default())
}

/// `li2^hbar(z) = 2 pi i hbar * int_Omega e^{(2z-pi)t} / (4t sinh(pi t) sinh(pi hbar t)) dt`.
///
/// Omega runs along the real line and passes above `t = 0` on a half circle.
/// The two real rays are folded onto `[r, T]`, leaving an integrand in which
/// both exponentials decay.
pub fn small_qdl_with(z: Complex64, hbar: Hbar, opts: &QdlOptions) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    let h = hbar.value();
    let (lo, hi) = strip_bounds(hbar);
    if !(z.re > lo && z.re < hi) {
        return Err(Error::OutsideStrip { re: z.re, lo, hi, hbar: h });
    }
    // Nearest poles of the integrand off the real axis sit at i and i/hbar.
    let r = opts.radius.min(0.5 / h);
    let prefactor = Complex64::new(0.0, 2.0 * PI * h);
    let tol = opts.tolerance / prefactor.norm();

    let arc_integrand = |phi: f64| {
        let e = Complex64::from_polar(1.0, phi);
        let t = r * e;
        let num = ((2.0 * z - PI) * t).exp();
        let den = 4.0 * t * (PI * t).sinh() * (PI * h * t).sinh();
        // dt = i r e^{i phi} dphi, traversed from pi down to 0.
        -num / den * Complex64::new(0.0, r) * e
    };
    let arc = integrate(arc_integrand, &[0.0, PI / 2.0, PI], 0.2 * tol, opts.max_intervals)?;

    let rate_right = 2.0 * PI + PI * h - 2.0 * z.re;
    let rate_left = 2.0 * z.re + PI * h;
    let big_t = truncation_point(r, h, rate_right, rate_left, 0.1 * tol)?;
    let e_right = 2.0 * z - 2.0 * PI - PI * h;
    let e_left = -(2.0 * z + PI * h);
    let ray_integrand = |t: f64| {
        let num = (e_right * t).exp() - (e_left * t).exp();
        let den = t * -(-2.0 * PI * t).exp_m1() * -(-2.0 * PI * h * t).exp_m1();
        num / den
    };
    let mut breaks = vec![r];
    let mut x = 1.0f64.max(2.0 * r);
    while x < big_t {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(big_t);
    let rays = integrate(ray_integrand, &breaks, 0.7 * tol, opts.max_intervals)?;

    Ok(prefactor * (arc.value + rays.value))
}

/// Smallest doubling of `r` past which the folded integrand's tail is below `tol`.
fn truncation_point(r: f64, h: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut t = 4.0f64.max(2.0 * r);
    loop {
        let den = t * -(-2.0 * PI * t).exp_m1() * -(-2.0 * PI * h * t).exp_m1();
        let tail = ((-a * t).exp() / a + (-b * t).exp() / b) / den;
        if tail < tol {
            return Ok(t);
        }
        t *= 1.5;
        if t > 1e7 {
            return Err(Error::QuadratureNonconvergence {
                tolerance: tol,
                estimate: tail,
            });
        }
    }
}

pub fn big_qdl(z: Complex64, hbar: Hbar) -> Result<Complex64> {
    big_qdl_with(z, hbar, &QdlOptions::default())
}

pub fn big_qdl_with(z: Complex64, hbar: Hbar, opts: &QdlOptions) -> Result<Complex64> {
    Ok(big_qdl_log_with(z, hbar, opts)?.exp())
}

/// A logarithm of `Li2^hbar(z)`; the imaginary part is defined modulo `2 pi`.
pub fn big_qdl_log(z: Complex64, hbar: Hbar) -> Result<Complex64> {
    big_qdl_log_with(z, hbar, &QdlOptions::default())
}

/// `Li2^hbar(z) = exp(li2^hbar(z) / (2 pi i hbar))`, continued past the strip with
/// `Li(z) = Li(z+pi) (1 + e^{2iz/hbar})` and `Li(z) = Li(z+pi hbar) (1 - e^{2iz+pi i hbar})`.
pub fn big_qdl_log_with(z: Complex64, hbar: Hbar, opts: &QdlOptions) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    if z.re.abs() > 1e4 {
        return Err(Error::InvalidParameter(format!("|Re z| too large: {}", z.re)));
    }
    check_poles(z, hbar, opts.pole_guard)?;
    let h = hbar.value();
    let (lo, hi) = strip_bounds(hbar);
    let step = PI * h;
    let mut w = z;
    let mut log_factor = Complex64::new(0.0, 0.0);

    while w.re <= lo {
        log_factor += ln_one_plus_exp(Complex64::new(0.0, 2.0) * w / h);
        w += PI;
    }
    while w.re >= hi {
        w -= PI;
        log_factor -= ln_one_plus_exp(Complex64::new(0.0, 2.0) * w / h);
    }
    // Near the strip edges the integrand decays slowly; hbar-steps move the
    // point into the middle half of the strip when the step is short enough.
    let margin = PI / 4.0;
    if step <= margin {
        while w.re < margin {
            log_factor += ln_one_minus_exp(Complex64::new(0.0, 2.0) * w + Complex64::new(0.0, step));
            w += step;
        }
        while w.re > PI - margin {
            w -= step;
            log_factor -= ln_one_minus_exp(Complex64::new(0.0, 2.0) * w + Complex64::new(0.0, step));
        }
    }
    let li = small_qdl_with(w, hbar, opts)?;
    Ok(li / Complex64::new(0.0, 2.0 * PI * h) + log_factor)
}

/// Distance check against the poles `pi + pi hbar/2 + a pi + b pi hbar`, `a, b >= 0`.
fn check_poles(z: Complex64, hbar: Hbar, guard: f64) -> Result<()> {
    if z.im.abs() >= guard {
        return Ok(());
    }
    let h = hbar.value();
    let x = z.re - PI - PI * h / 2.0;
    if x < -guard {
        return Ok(());
    }
    let max_a = ((x + guard) / PI).floor() as i64;
    for a in 0..=max_a {
        let rest = x - a as f64 * PI;
        let b = (rest / (PI * h)).round().max(0.0);
        let distance = Complex64::new(rest - b * PI * h, z.im).norm();
        if distance < guard {
            return Err(Error::PoleProximity { z, distance });
        }
    }
    Ok(())
}

/// `log(1 + e^s)` without overflow for large `Re s`.
fn ln_one_plus_exp(s: Complex64) -> Complex64 {
    if s.re > 0.0 {
        s + (1.0 + (-s).exp()).ln()
    } else {
        (1.0 + s.exp()).ln()
    }
}

/// `log(1 - e^s)` without overflow for large `Re s`.
fn ln_one_minus_exp(s: Complex64) -> Complex64 {
    if s.re > 0.0 {
        s + Complex64::new(0.0, PI) + (1.0 - (-s).exp()).ln()
    } else {
        (1.0 - s.exp()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::dilog;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hb(v: f64) -> Hbar {
        Hbar::new(v).unwrap()
    }

    /// Independent evaluation: composite tanh-sinh on a wider half circle
    /// (radius 0.3) and on the two unfolded real rays.
    fn tanh_sinh_oracle(z: Complex64, h: f64) -> Complex64 {
        let r = 0.3;
        let f = |t: Complex64| {
            ((2.0 * z - PI) * t).exp() / (4.0 * t * (PI * t).sinh() * (PI * h * t).sinh())
        };
        // tanh-sinh on [a, b]
        let ts = |a: f64, b: f64, g: &dyn Fn(f64) -> Complex64| {
            let step = 1.0 / 64.0;
            let mut s = Complex64::new(0.0, 0.0);
            for k in -400..=400 {
                let x = k as f64 * step;
                let u = PI / 2.0 * x.sinh();
                let node = u.tanh();
                let w = PI / 2.0 * x.cosh() / u.cosh().powi(2);
                if w < 1e-300 {
                    continue;
                }
                let t = 0.5 * (a + b) + 0.5 * (b - a) * node;
                s += g(t) * w;
            }
            s * step * 0.5 * (b - a)
        };
        let arc = ts(0.0, PI, &|phi| {
            let e = Complex64::from_polar(1.0, phi);
            -f(r * e) * Complex64::new(0.0, r) * e
        });
        let mut rays = Complex64::new(0.0, 0.0);
        let mut a = r;
        while a < 80.0 {
            let b = a + 1.0;
            rays += ts(a, b, &|t| f(c(t, 0.0)) + f(c(-t, 0.0)));
            a = b;
        }
        c(0.0, 2.0 * PI * h) * (arc + rays)
    }

    #[test]
    fn strip_violation() {
        assert!(matches!(small_qdl(c(-0.5, 0.0), hb(0.1)), Err(Error::OutsideStrip { .. })));
        assert!(matches!(small_qdl(c(3.5, 0.0), hb(0.1)), Err(Error::OutsideStrip { .. })));
    }

    #[test]
    fn dual_quadrature_agreement() {
        for &(z, h) in &[(c(PI / 2.0, 0.3), 0.02), (c(1.0, -0.2), 0.1), (c(2.5, 0.1), 0.3)] {
            let ours = small_qdl(z, hb(h)).unwrap();
            let other = tanh_sinh_oracle(z, h);
            assert!((ours - other).norm() < 1e-10, "{z} {h}: {ours} vs {other}");
        }
    }

    #[test]
    fn radius_independence() {
        let z = c(0.9, 0.25);
        let h = hb(0.05);
        let a = small_qdl(z, h).unwrap();
        let opts = QdlOptions { radius: 0.2, ..QdlOptions::default() };
        let b = small_qdl_with(z, h, &opts).unwrap();
        assert!((a - b).norm() < 1e-11);
    }

    #[test]
    fn classical_limit_is_second_order() {
        let z = c(PI / 3.0, 0.0);
        let target = dilog((Complex64::new(0.0, 2.0) * z).exp()).unwrap();
        let e1 = (small_qdl(z, hb(0.01)).unwrap() - target).norm() / 0.01f64.powi(2);
        let e2 = (small_qdl(z, hb(0.005)).unwrap() - target).norm() / 0.005f64.powi(2);
        assert!((e1 / e2 - 1.0).abs() < 0.25, "{e1} {e2}");

        let near = small_qdl(c(PI / 2.0, 0.0), hb(0.02)).unwrap();
        assert!((near - c(-PI * PI / 12.0, 0.0)).norm() < 10.0 * 0.02f64.powi(2));
    }

    #[test]
    fn hbar_step_equation() {
        let h = hb(0.1);
        let z = c(PI / 2.0, 0.0);
        let lhs = big_qdl(z + PI * 0.1, h).unwrap()
            * (1.0 - (Complex64::new(0.0, 2.0) * z + Complex64::new(0.0, PI * 0.1)).exp());
        let rhs = big_qdl(z, h).unwrap();
        assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn pi_step_equation_inside_strip() {
        for &(z, h) in &[(c(0.1, 0.1), 0.2), (c(0.4, 0.1), 0.2)] {
            let hh = hb(h);
            let lhs = big_qdl(z + PI, hh).unwrap() * (1.0 + (Complex64::new(0.0, 2.0) * z / h).exp());
            let rhs = big_qdl(z, hh).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn zero_and_pole() {
        let h = 0.1;
        let at_zero = big_qdl(c(-PI * h / 2.0, 0.0), hb(h)).unwrap();
        assert!(at_zero.norm() < 1e-8);
        let pole = c(PI + PI * h / 2.0 + PI * h, 0.0);
        assert!(matches!(big_qdl(pole, hb(h)), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn hbar_rejects_nonpositive() {
        assert!(Hbar::new(0.0).is_err());
        assert!(Hbar::new(-1.0).is_err());
        assert!(Hbar::new(f64::NAN).is_err());
    }
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::str::FromStr;

use crate::edge_weights::LogLift;
use crate::error::{Error, Result};
use crate::skein_trace::{dq_pieces, sigma_sum_scaled, trace_params, QdlParams};
use crate::special_functions::{lobachevsky, quadrature};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Deliberate defects used to confirm that the convergence checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Mutation {
    #[default]
    None,
    /// Use `2^{+Im A/(4 pi)}` in `d_n`.
    FlipImAInD,
    /// Use the even-`k` formula of `c_n` for odd `k` and vice versa.
    SwapParityInC,
}

impl FromStr for Mutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Mutation::None),
            "flip-im-a" => Ok(Mutation::FlipImAInD),
            "swap-parity" => Ok(Mutation::SwapParityInC),
            other => Err(Error::InvalidParameter(format!("unknown mutation {other:?}"))),
        }
    }
}

/// Volume of the figure-eight knot complement, `6 Lambda(pi/3)`.
pub fn volume_figure_eight() -> f64 {
    6.0 * lobachevsky(PI / 3.0)
}

/// Growth rate of `|Sigma_n|` per level: `Lambda(pi/6) / (2 pi)`.
pub fn sigma_growth_rate() -> f64 {
    lobachevsky(PI / 6.0) / (2.0 * PI)
}

/// Growth rate of the trace per level: `Lambda(pi/6) / pi = vol / (4 pi)`.
pub fn trace_growth_rate() -> f64 {
    lobachevsky(PI / 6.0) / PI
}

pub fn c_n_constant(u: Complex64, v: Complex64, k_hat: i64, n_mod_8: u64) -> Result<Complex64> {
    c_n_constant_with(u, v, k_hat, n_mod_8, Mutation::None)
}

/// Leading constant of `Sigma_n ~ c_n sqrt(n) e^{n Lambda(pi/6)/(2 pi)}`.
pub fn c_n_constant_with(
    u: Complex64,
    v: Complex64,
    k_hat: i64,
    n_mod_8: u64,
    mutation: Mutation,
) -> Result<Complex64> {
    if ![1, 3, 5, 7].contains(&n_mod_8) {
        return Err(Error::InvalidParameter(format!("n mod 8 must be odd, got {n_mod_8}")));
    }
    let one_plus = 1.0 + u.exp();
    if !((v.exp() - one_plus).norm() < 1e-8 * one_plus.norm()) {
        return Err(Error::InvalidParameter("e^V must equal 1 + e^U".into()));
    }
    let pow2 = (LN_2 * (u - 2.0 * PI * I) / (4.0 * PI * I)).exp();
    // ((1 - i sqrt 3)/2)^w with the principal logarithm -i pi/3
    let w = (2.0 * PI * I - u) / (4.0 * PI * I);
    let root = (-I * PI / 3.0 * w).exp();
    let base = 3f64.powf(-0.25) * pow2 * root;
    let mut odd = k_hat.rem_euclid(2) == 1;
    if mutation == Mutation::SwapParityInC {
        odd = !odd;
    }
    let kf = k_hat as f64;
    if odd {
        Ok(base * (-I * kf * PI / 6.0).exp() * (-v / 6.0).exp())
    } else {
        let nf = n_mod_8 as f64;
        let i_pow_n = I.powu(n_mod_8 as u32);
        Ok(base
            * (-I * nf * PI / 4.0).exp()
            * (-2.0 * I * kf * PI / 3.0).exp()
            * (-2.0 * v / 3.0).exp()
            * (1.0 - i_pow_n * (u / 2.0).exp()))
    }
}

/// `|c_n|` from the real-part formula.
pub fn c_n_modulus(u: Complex64, v: Complex64, k_hat: i64, n_mod_4: u64) -> f64 {
    let common = 3f64.powf(-0.25) * 2f64.powf((u.im - 2.0 * PI) / (4.0 * PI)) * (u.re / 12.0).exp();
    if k_hat.rem_euclid(2) == 1 {
        common * (-v.re / 6.0).exp()
    } else {
        let i_pow_n = I.powu((n_mod_4 % 4) as u32);
        common * (-2.0 * v.re / 3.0).exp() * (1.0 - i_pow_n * (u / 2.0).exp()).norm()
    }
}

pub fn d_n_limit(a: Complex64, n_mod_4: u64) -> Result<f64> {
    d_n_limit_with(a, n_mod_4, Mutation::None)
}

/// Limit of `|D(q e^{-A/n})|^{1/n}` along `n = n_mod_4 (mod 4)`.
pub fn d_n_limit_with(a: Complex64, n_mod_4: u64, mutation: Mutation) -> Result<f64> {
    if (a.exp() + 1.0).norm() < 1e-10 {
        return Err(Error::Singular(format!("e^A = -1 at A = {a}")));
    }
    let (num, den) = match n_mod_4 {
        1 => (((a - PI * I) / 4.0).cosh(), ((a + PI * I) / 4.0).cosh()),
        3 => (((a - PI * I) / 4.0).sinh(), ((a + PI * I) / 4.0).sinh()),
        other => {
            return Err(Error::InvalidParameter(format!("n mod 4 must be 1 or 3, got {other}")))
        }
    };
    if den.norm() < 1e-300 {
        return Err(Error::Singular(format!("vanishing denominator at A = {a}")));
    }
    let sign = if mutation == Mutation::FlipImAInD { 1.0 } else { -1.0 };
    Ok(2f64.powf(sign * a.im / (4.0 * PI)) * (num / den).norm().powf(0.25))
}

/// Constants of the asymptotic trace formula for one congruence class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub congruence: u64,
    pub c1_mod: f64,
    pub c2_mod: f64,
    pub d1: f64,
    pub d2: f64,
    pub growth_rate: f64,
}

impl AsymptoticPrediction {
    pub fn new(lift: &LogLift, n_mod_4: u64) -> Result<Self> {
        Self::with_mutation(lift, n_mod_4, Mutation::None)
    }

    pub fn with_mutation(lift: &LogLift, n_mod_4: u64, mutation: Mutation) -> Result<Self> {
        // Moduli depend on n mod 4 only; n mod 8 representative n_mod_4 itself.
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let c = |k: usize, k_hat: i64| -> Result<f64> {
            Ok(c_n_constant_with(two_pi_i - lift.a[k], lift.v[k], k_hat, n_mod_4, mutation)?.norm())
        };
        Ok(Self {
            congruence: n_mod_4,
            c1_mod: c(1, lift.l_hat)?,
            c2_mod: c(2, lift.m_hat)?,
            d1: d_n_limit_with(lift.a[1], n_mod_4, mutation)?,
            d2: d_n_limit_with(lift.a[2], n_mod_4, mutation)?,
            growth_rate: trace_growth_rate(),
        })
    }

    /// `K = c1 c2 / (d1 d2)`, the prefactor of `e^{n vol/(4 pi)}`.
    pub fn prefactor(&self) -> f64 {
        self.c1_mod * self.c2_mod / (self.d1 * self.d2)
    }

    pub fn log_predicted_modulus(&self, n: u64) -> f64 {
        self.prefactor().ln() + n as f64 * self.growth_rate
    }

    pub fn predicted_modulus(&self, n: u64) -> f64 {
        self.log_predicted_modulus(n).exp()
    }
}

pub fn predicted_trace(lift: &LogLift, n: u64) -> Result<f64> {
    predicted_trace_with(lift, n, Mutation::None)
}

pub fn predicted_trace_with(lift: &LogLift, n: u64, mutation: Mutation) -> Result<f64> {
    crate::skein_trace::check_level(n)?;
    Ok(AsymptoticPrediction::with_mutation(lift, n % 4, mutation)?.predicted_modulus(n))
}

/// `|Sigma_n| / (|c_n| sqrt(n) e^{n Lambda(pi/6)/(2 pi)})`.
pub fn sigma_ratio(p: &QdlParams, k_hat: i64, mutation: Mutation) -> Result<f64> {
    let n = p.n();
    let c = c_n_constant_with(p.big_u(), p.big_v(), k_hat, n % 8, mutation)?;
    let s = sigma_sum_scaled(p, k_hat);
    let log = s.ln_abs() - c.norm().ln() - 0.5 * (n as f64).ln() - n as f64 * sigma_growth_rate();
    Ok(log.exp())
}

/// `|Trace| / predicted` through the factored single sums, in the log domain.
pub fn trace_ratio(lift: &LogLift, n: u64, mutation: Mutation) -> Result<f64> {
    let [p1, p2] = trace_params(lift, n)?;
    let log_trace = sigma_sum_scaled(&p1, lift.l_hat).ln_abs() + sigma_sum_scaled(&p2, lift.m_hat).ln_abs()
        - (n as f64).ln()
        - crate::skein_trace::dq_direct(&p1)?
        - crate::skein_trace::dq_direct(&p2)?;
    let pred = AsymptoticPrediction::with_mutation(lift, n % 4, mutation)?;
    Ok((log_trace - pred.log_predicted_modulus(n)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceOutcome {
    pub sum: Complex64,
    /// `g(x0) / sqrt(-2 pi f''(x0)) sqrt(n) e^{n f(x0)}`
    pub estimate: Complex64,
    pub x0: f64,
    pub second_derivative: f64,
}

/// `sum_j g(2 pi j/n) e^{n f(2 pi j/n)}` over grid points in `[a, b]`, optionally
/// with `(-1)^j`, next to its Laplace-type leading estimate.
pub fn laplace_sum_reference(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> Complex64,
    interval: (f64, f64),
    n: u64,
    alternating: bool,
) -> Result<LaplaceOutcome> {
    let (a, b) = interval;
    if !(a < b) || n == 0 {
        return Err(Error::InvalidParameter("need a < b and n >= 1".into()));
    }
    let x0 = argmax(f, a, b);
    let margin = 1e-6 * (b - a);
    if x0 - a < margin || b - x0 < margin {
        return Err(Error::MaximumOnBoundary { a, b, at: x0 });
    }
    let h = 1e-4 * (b - a);
    let f2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
    if !(f2 < 0.0) {
        return Err(Error::Degenerate(format!("f'' = {f2} at the maximum")));
    }
    let nf = n as f64;
    let step = 2.0 * PI / nf;
    let j_lo = (a / step).ceil() as i64;
    let j_hi = (b / step).floor() as i64;
    let fmax = f(x0);
    let sum: Complex64 = (j_lo..=j_hi)
        .map(|j| {
            let t = j as f64 * step;
            let sign = if alternating && j.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            g(t) * (sign * (nf * (f(t) - fmax)).exp())
        })
        .collect::<crate::summation::ComplexCompensatedSum>()
        .value();
    let scale = (nf * fmax).exp();
    let estimate = g(x0) / (-2.0 * PI * f2).sqrt() * nf.sqrt() * scale;
    Ok(LaplaceOutcome {
        sum: sum * scale,
        estimate,
        x0,
        second_derivative: f2,
    })
}

fn argmax(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let grid = 4096;
    let dx = (b - a) / grid as f64;
    let best = (0..=grid)
        .map(|k| a + k as f64 * dx)
        .max_by(|x, y| f(*x).total_cmp(&f(*y)))
        .expect("nonempty grid");
    // golden-section refinement within one grid cell on each side
    let (mut lo, mut hi) = ((best - dx).max(a), (best + dx).min(b));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = hi - r * (hi - lo);
        let x2 = lo + r * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartialLimit {
    FirstSum1Mod4,
    FirstSum3Mod4,
    SecondSum1Mod4,
    SecondSum3Mod4,
    Isolated3Mod4,
}

impl PartialLimit {
    pub const ALL: [PartialLimit; 5] = [
        PartialLimit::FirstSum1Mod4,
        PartialLimit::FirstSum3Mod4,
        PartialLimit::SecondSum1Mod4,
        PartialLimit::SecondSum3Mod4,
        PartialLimit::Isolated3Mod4,
    ];

    pub fn class(self) -> u64 {
        match self {
            PartialLimit::FirstSum1Mod4 | PartialLimit::SecondSum1Mod4 => 1,
            _ => 3,
        }
    }

    /// Closed-form limit as `m -> infinity`.
    pub fn limit(self, a: Complex64) -> Result<f64> {
        if (a.exp() + 1.0).norm() < 1e-10 {
            return Err(Error::Singular(format!("e^A = -1 at A = {a}")));
        }
        let pi_i = PI * I;
        Ok(match self {
            PartialLimit::FirstSum1Mod4 | PartialLimit::FirstSum3Mod4 => -LN_2 / (4.0 * PI) * a.im,
            PartialLimit::SecondSum1Mod4 => {
                0.25 * (((a - pi_i) / 4.0).cosh() / ((a + pi_i) / 4.0).cosh()).norm().ln()
            }
            PartialLimit::SecondSum3Mod4 => {
                let num = (a + pi_i) * ((a - pi_i) / 4.0).sinh();
                let den = (a - pi_i) * ((a + pi_i) / 4.0).sinh();
                0.25 * (num / den).norm().ln()
            }
            PartialLimit::Isolated3Mod4 => 0.25 * ((a - pi_i).norm() / (a.conj() - pi_i).norm()).ln(),
        })
    }
}

/// `(finite-m value, limit)` of one group of the rearranged `(1/n) log |D|`.
pub fn dq_partial_limits(a: Complex64, which: PartialLimit, m: u64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let n = 4 * m + which.class();
    let pieces = dq_pieces(a, n)?;
    let finite = match which {
        PartialLimit::FirstSum1Mod4 | PartialLimit::FirstSum3Mod4 => pieces.first_sum,
        PartialLimit::SecondSum1Mod4 | PartialLimit::SecondSum3Mod4 => pieces.second_sum,
        PartialLimit::Isolated3Mod4 => pieces.isolated,
    };
    Ok((finite, which.limit(a)?))
}

/// `int_0^{1/4} t cot(2 pi t) dt`, whose exact value is `log 2 / (8 pi)`.
pub fn auxiliary_cot_integral() -> Result<f64> {
    let integrand = |t: f64| {
        let x = 2.0 * PI * t;
        let v = if x.abs() < 1e-4 {
            // t cot(2 pi t) = (1/(2 pi)) (1 - x^2/3 - x^4/45)
            (1.0 - x * x / 3.0 - x.powi(4) / 45.0) / (2.0 * PI)
        } else {
            t / x.tan()
        };
        Complex64::new(v, 0.0)
    };
    Ok(quadrature::integrate(integrand, &[0.0, 0.125, 0.25], 1e-15, 200)?.value.re)
}

/// `prod_{j <= J} (1 + (-A + pi i)^2 / (16 pi^2 (j - 1/2)^2))`, which tends to `cosh((A - pi i)/4)`.
pub fn euler_product_cosh(a: Complex64, terms: u64) -> Complex64 {
    let w = (-a + PI * I).powi(2) / (16.0 * PI * PI);
    (1..=terms)
        .map(|j| 1.0 + w / (j as f64 - 0.5).powi(2))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_weights::Preset;
    use crate::skein_trace::dq_direct;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn volume() {
        let v = volume_figure_eight();
        assert!((v - 2.029883).abs() < 1e-5);
        assert!((v - 4.0 * lobachevsky(PI / 6.0)).abs() < 1e-13);
        assert!((trace_growth_rate() - v / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn c_n_class_structure() {
        let u = c(1.0, 2.0);
        let v = (1.0 + u.exp()).ln();
        let odd: Vec<_> = [1, 3, 5, 7].iter().map(|&r| c_n_constant(u, v, 5, r).unwrap()).collect();
        assert!(odd.iter().all(|z| (z - odd[0]).norm() < 1e-15));
        let even: Vec<_> = [1, 3, 5, 7].iter().map(|&r| c_n_constant(u, v, 4, r).unwrap().norm()).collect();
        assert!((even[0] - even[2]).abs() < 1e-14 && (even[1] - even[3]).abs() < 1e-14);
        assert!((even[0] - even[1]).abs() > 1e-6);
        assert!(c_n_constant(u, v, 4, 2).is_err());
    }

    #[test]
    fn c_n_modulus_formula() {
        for u in [c(1.0, 2.0), c(-2.58581, 6.05389), c(0.3, -1.0)] {
            let v = (1.0 + u.exp()).ln();
            for k in [3, 4] {
                for r in [1, 3, 5, 7] {
                    let z = c_n_constant(u, v, k, r).unwrap().norm();
                    assert!((z - c_n_modulus(u, v, k, r % 4)).abs() < 1e-13 * z);
                }
            }
        }
    }

    #[test]
    fn d_n_real_a_is_one() {
        for r in [1, 3] {
            assert!((d_n_limit(c(0.7, 0.0), r).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(d_n_limit(c(0.0, PI), 3).is_err());
        assert!(d_n_limit(c(1.0, 0.0), 2).is_err());
    }

    #[test]
    fn d_n_matches_sequence() {
        let a = c(0.0, 2.0);
        for (r, ns) in [(1, [101, 401, 1601]), (3, [103, 403, 1603])] {
            let target = d_n_limit(a, r).unwrap().ln();
            let devs: Vec<f64> = ns
                .iter()
                .map(|&n| {
                    let p = QdlParams::from_u(c(0.0, 2.0 * PI) - a, n).unwrap();
                    (dq_direct(&p).unwrap() - target).abs()
                })
                .collect();
            assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
        }
    }

    #[test]
    fn partial_limits_sum_to_log_d() {
        let a = c(0.4, -1.3);
        let l = |w: PartialLimit| w.limit(a).unwrap();
        let class1 = l(PartialLimit::FirstSum1Mod4) + l(PartialLimit::SecondSum1Mod4);
        let class3 = l(PartialLimit::FirstSum3Mod4) + l(PartialLimit::SecondSum3Mod4) + l(PartialLimit::Isolated3Mod4);
        assert!((class1 - d_n_limit(a, 1).unwrap().ln()).abs() < 1e-12);
        assert!((class3 - d_n_limit(a, 3).unwrap().ln()).abs() < 1e-12);
        for w in PartialLimit::ALL {
            assert!(w.limit(c(0.9, 0.0)).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn first_sum_approaches_limit() {
        let a = c(1.0, 2.0);
        let devs: Vec<f64> = [100, 400, 1600]
            .iter()
            .map(|&m| {
                let (finite, limit) = dq_partial_limits(a, PartialLimit::FirstSum1Mod4, m).unwrap();
                assert!((limit + LN_2 / (4.0 * PI) * 2.0).abs() < 1e-15);
                (finite - limit).abs()
            })
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    }

    #[test]
    fn cot_integral() {
        assert!((auxiliary_cot_integral().unwrap() - LN_2 / (8.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn euler_product() {
        let a = c(0.3, 1.1);
        let target = ((a - PI * I) / 4.0).cosh();
        let e1 = (euler_product_cosh(a, 1000) - target).norm();
        let e2 = (euler_product_cosh(a, 2000) - target).norm();
        assert!(e2 < e1 && e1 * 1000.0 < 1.0);
        assert!((e1 / e2 - 2.0).abs() < 0.1);
    }

    #[test]
    fn laplace_gaussian() {
        let f = |t: f64| -(t - 1.0) * (t - 1.0);
        let one = |_: f64| c(1.0, 0.0);
        let out = laplace_sum_reference(&f, &one, (0.0, 2.0), 10_000, false).unwrap();
        let ratio = (out.sum / out.estimate).re;
        assert!((0.99..=1.01).contains(&ratio), "{ratio}");
        assert!((out.x0 - 1.0).abs() < 1e-6);
        let alt = laplace_sum_reference(&f, &one, (0.0, 2.0), 10_000, true).unwrap();
        assert!(alt.sum.norm() / 100.0 < 0.01);
        let lin = |t: f64| c(t, 0.0);
        let out = laplace_sum_reference(&f, &lin, (0.0, 2.0), 10_000, false).unwrap();
        let expected = 1.0 / (2.0 * PI * 2.0f64).sqrt() * 100.0;
        assert!((out.sum.re / expected - 1.0).abs() < 0.01);
    }

    #[test]
    fn laplace_boundary_maximum() {
        let f = |t: f64| t;
        let one = |_: f64| c(1.0, 0.0);
        assert!(matches!(
            laplace_sum_reference(&f, &one, (0.0, 1.0), 100, false),
            Err(Error::MaximumOnBoundary { .. })
        ));
    }

    #[test]
    fn prediction_growth_is_exact() {
        let (_, lift) = Preset::Hyperbolic.lr_lift().unwrap();
        let p1 = predicted_trace(&lift, 401).unwrap();
        let p2 = predicted_trace(&lift, 405).unwrap();
        assert!(((p2 / p1).ln() / 4.0 - trace_growth_rate()).abs() < 1e-12);
    }
}

//! Compensated accumulation and log-scaled complex numbers.
//!
//! Terms of the quantum sums grow like `e^{0.08 n}`, so anything that is
//! summed or multiplied over a full period is carried either through a
//! Neumaier accumulator or as a [`ScaledComplex`] (mantissa times
//! `e^{log_scale}`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// Component-wise compensated sum of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexCompensatedSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexCompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexCompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of a slice, split into `partitions` contiguous blocks
/// whose partial sums are combined pairwise.
///
/// The result depends only on the data and the partition count.
pub fn partitioned_sum(terms: &[Complex64], partitions: usize) -> Complex64 {
    let partitions = partitions.clamp(1, terms.len().max(1));
    let chunk = terms.len().div_ceil(partitions).max(1);
    let mut partials: Vec<Complex64> = terms
        .chunks(chunk)
        .map(|block| block.iter().copied().collect::<ComplexCompensatedSum>().value())
        .collect();
    while partials.len() > 1 {
        partials = partials
            .chunks(2)
            .map(|pair| pair.iter().copied().collect::<ComplexCompensatedSum>().value())
            .collect();
    }
    partials.pop().unwrap_or_default()
}

/// A complex number stored as `mantissa * exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        Self { mantissa, log_scale }
    }

    /// `exp(log_value)` without leaving the representable range.
    pub fn from_log(log_value: Complex64) -> Self {
        Self {
            mantissa: Complex64::from_polar(1.0, log_value.im),
            log_scale: log_value.re,
        }
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// The plain value, `None` if it overflows `f64`.
    pub fn to_complex(&self) -> Option<Complex64> {
        let z = self.mantissa * self.log_scale.exp();
        (z.re.is_finite() && z.im.is_finite()).then_some(z)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
    }
}

/// Sums `exp(log_terms[k])` relative to the largest real part.
pub fn sum_exp_logs(log_terms: &[Complex64], partitions: usize) -> ScaledComplex {
    let peak = log_terms
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return ScaledComplex::new(Complex64::new(0.0, 0.0), 0.0);
    }
    let shifted: Vec<Complex64> = log_terms
        .iter()
        .map(|z| (z - peak).exp())
        .collect();
    ScaledComplex::new(partitioned_sum(&shifted, partitions), peak)
}

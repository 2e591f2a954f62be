use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::edge_weights::{LogLift, WordLift};
use crate::error::{Error, Result};
use crate::special_functions::{big_qdl_log, lobachevsky, Hbar};
use crate::summation::{sum_exp_logs, ComplexCompensatedSum, CompensatedSum, ScaledComplex};

/// Largest level accepted without an explicit override.
pub const DEFAULT_N_CAP: u64 = 8191;
/// Largest number of terms a term cloud may hold.
pub const CLOUD_TERM_CAP: u64 = 301 * 301 * 301;
const EXP_GUARD: f64 = 700.0;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(U, V)` with `e^V = 1 + e^U`, at an odd level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QdlParams {
    #[serde(rename = "U")]
    big_u: Complex64,
    #[serde(rename = "V")]
    big_v: Complex64,
    n: u64,
}

impl QdlParams {
    pub fn new(big_u: Complex64, big_v: Complex64, n: u64) -> Result<Self> {
        if n > DEFAULT_N_CAP {
            return Err(Error::ResourceLimit(format!(
                "n = {n} exceeds the cap {DEFAULT_N_CAP}; use new_uncapped to override"
            )));
        }
        Self::new_uncapped(big_u, big_v, n)
    }

    pub fn new_uncapped(big_u: Complex64, big_v: Complex64, n: u64) -> Result<Self> {
        check_level(n)?;
        for z in [big_u, big_v] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite parameter {z}")));
            }
        }
        let one_plus = 1.0 + big_u.exp();
        if one_plus.norm() < 1e-12 {
            return Err(Error::Singular(format!("e^U = -1 at U = {big_u}")));
        }
        let mismatch = (big_v.exp() - one_plus).norm() / one_plus.norm();
        if !(mismatch < 1e-8) {
            return Err(Error::InvalidParameter(format!(
                "e^V differs from 1 + e^U by {mismatch:.3e} (relative)"
            )));
        }
        Ok(Self { big_u, big_v, n })
    }

    /// Uses the principal `V = Log(1 + e^U)`.
    pub fn from_u(big_u: Complex64, n: u64) -> Result<Self> {
        Self::new(big_u, (1.0 + big_u.exp()).ln(), n)
    }

    pub fn big_u(&self) -> Complex64 {
        self.big_u
    }
    pub fn big_v(&self) -> Complex64 {
        self.big_v
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn q(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / self.n as f64)
    }
    pub fn u(&self) -> Complex64 {
        (self.big_u / self.n as f64).exp()
    }
    pub fn v(&self) -> Complex64 {
        (self.big_v / self.n as f64).exp()
    }
}

pub fn check_level(n: u64) -> Result<()> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidParameter(format!("level n must be odd and positive, got {n}")));
    }
    Ok(())
}

/// `e^{2 pi i m / n}` for an integer exponent reduced mod `n`.
fn root_of_unity_log(m: i128, n: u64) -> Complex64 {
    let r = m.rem_euclid(n as i128) as f64;
    Complex64::new(0.0, 2.0 * PI * r / n as f64)
}

/// Logarithms of `QDL(u, v | j)` for `j = 0..n`, by compensated prefix sums of
/// `log(1 + u q^{-2k}) - V/n`.
pub fn qdl_log_table(p: &QdlParams) -> Vec<Complex64> {
    let n = p.n;
    let nf = n as f64;
    let base = p.big_u / nf;
    let step = p.big_v / nf;
    let mut out = Vec::with_capacity(n as usize);
    out.push(Complex64::new(0.0, 0.0));
    let mut acc = ComplexCompensatedSum::new();
    for k in 1..n {
        let phase = -2.0 * PI * ((2 * k) % n) as f64 / nf;
        let factor = 1.0 + (base + Complex64::new(0.0, phase)).exp();
        acc.add(factor.ln() - step);
        out.push(acc.value());
    }
    out
}

/// `QDL(u, v | j) = v^{-j} prod_{k=1}^{j} (1 + u q^{-2k})`, periodic in `j` with period `n`.
pub fn qdl_discrete(p: &QdlParams, j: i64) -> Complex64 {
    qdl_discrete_log(p, j).exp()
}

pub fn qdl_discrete_log(p: &QdlParams, j: i64) -> Complex64 {
    let n = p.n;
    let r = j.rem_euclid(n as i64) as u64;
    let nf = n as f64;
    let base = p.big_u / nf;
    let mut acc = ComplexCompensatedSum::new();
    for k in 1..=r {
        let phase = -2.0 * PI * ((2 * k) % n) as f64 / nf;
        acc.add((1.0 + (base + Complex64::new(0.0, phase)).exp()).ln());
    }
    acc.value() - p.big_v * (r as f64 / nf)
}

/// `|QDL(j) - e^{-jV/n} Li(z_j) / Li(z_0)|` with `hbar = 2/n`,
/// `z_j = pi/2 - pi/n + U/(2ni) - 2 pi j/n`.
pub fn qdl_vs_continuous(p: &QdlParams, j: i64) -> Result<f64> {
    let n = p.n as f64;
    let hbar = Hbar::from_level(p.n)?;
    let z0 = PI / 2.0 - PI / n + p.big_u / (2.0 * n * I);
    let zj = z0 - 2.0 * PI * j as f64 / n;
    let discrete = qdl_discrete(p, j);
    if j == 0 {
        return Ok((discrete - 1.0).norm());
    }
    let log_ratio = big_qdl_log(zj, hbar)? - big_qdl_log(z0, hbar)? - p.big_v * (j as f64 / n);
    Ok((discrete - log_ratio.exp()).norm())
}

fn sigma_guard(n: u64) -> Result<()> {
    let growth = n as f64 * lobachevsky(PI / 6.0) / (2.0 * PI);
    if growth > EXP_GUARD {
        return Err(Error::Overflow { log_magnitude: growth });
    }
    Ok(())
}

/// Log-terms of `Sigma_n = sum_{i=1}^n QDL(2i) q^{2i^2 - k i}`, indexed by `i`.
pub fn sigma_log_terms(p: &QdlParams, k_hat: i64) -> Vec<Complex64> {
    let table = qdl_log_table(p);
    let n = p.n;
    (1..=n)
        .map(|i| {
            let ii = i as i128;
            let e = 2 * ii * ii - k_hat as i128 * ii;
            table[((2 * i) % n) as usize] + root_of_unity_log(e, n)
        })
        .collect()
}

/// Log-terms of the same sum in the form `sum_{j=1}^n QDL(j) w^{j^2 - k j}`,
/// `w = -e^{pi i/n}`, indexed by `j`.
pub fn sigma_log_terms_omega(p: &QdlParams, k_hat: i64) -> Vec<Complex64> {
    let table = qdl_log_table(p);
    let n = p.n;
    (1..=n)
        .map(|j| {
            let jj = j as i128;
            let m = (jj * jj - k_hat as i128 * jj).rem_euclid(n as i128);
            // w^m = (-1)^m e^{pi i m/n}, and w^n = 1
            let phase = PI * m as f64 / n as f64 + if m % 2 == 1 { PI } else { 0.0 };
            table[(j % n) as usize] + Complex64::new(0.0, phase)
        })
        .collect()
}

pub fn sigma_sum_scaled(p: &QdlParams, k_hat: i64) -> ScaledComplex {
    sum_exp_logs(&sigma_log_terms(p, k_hat), 1)
}

pub fn sigma_sum_omega_scaled(p: &QdlParams, k_hat: i64) -> ScaledComplex {
    sum_exp_logs(&sigma_log_terms_omega(p, k_hat), 1)
}

/// `Sigma_n` in scaled form; both index forms are evaluated and must agree.
pub fn sigma_sum_checked(p: &QdlParams, k_hat: i64) -> Result<ScaledComplex> {
    sigma_guard(p.n)?;
    let a = sigma_sum_scaled(p, k_hat);
    let b = sigma_sum_omega_scaled(p, k_hat);
    // Cancellation between petals leaves the sum well below its largest term.
    let top = sigma_log_terms(p, k_hat)
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let rel = |x: &ScaledComplex| x.mantissa * (x.log_scale - top).exp();
    let (za, zb) = (rel(&a), rel(&b));
    let mismatch = (za - zb).norm() / za.norm().max(1.0);
    if !(mismatch < 1e-10) {
        return Err(Error::Residual {
            what: "index forms of Sigma_n".into(),
            residual: mismatch,
            tolerance: 1e-10,
        });
    }
    Ok(a)
}

/// `Sigma_n` as a plain complex number.
pub fn sigma_sum(p: &QdlParams, k_hat: i64) -> Result<Complex64> {
    let a = sigma_sum_checked(p, k_hat)?;
    a.to_complex().ok_or(Error::Overflow { log_magnitude: a.ln_abs() })
}

/// `(1/n) log |D(u)|` from `(1+u^n)^{-(n+1)/2} prod_j (1 + u q^{-2j})^{n-j+1}`.
pub fn dq_direct(p: &QdlParams) -> Result<f64> {
    let n = p.n;
    let nf = n as f64;
    let one_plus = 1.0 + p.big_u.exp();
    if one_plus.norm() < 1e-12 {
        return Err(Error::Singular(format!("1 + u^n vanishes at U = {}", p.big_u)));
    }
    let base = p.big_u / nf;
    let mut acc = CompensatedSum::new();
    acc.add(-(nf + 1.0) / 2.0 * one_plus.norm().ln());
    for j in 1..=n {
        let phase = -2.0 * PI * ((2 * j) % n) as f64 / nf;
        let factor = 1.0 + (base + Complex64::new(0.0, phase)).exp();
        acc.add((n - j + 1) as f64 * factor.norm().ln());
    }
    Ok(acc.value() / nf)
}

/// `(1/n) log |prod_{i=1}^n QDL(i)|`, summed term by term.
pub fn dq_from_products(p: &QdlParams) -> f64 {
    let table = qdl_log_table(p);
    let s: CompensatedSum = table.iter().map(|l| l.re).collect();
    s.value() / p.n as f64
}

/// Pieces of the rearranged `(1/n) log |D(q e^{-A/n})|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DqPieces {
    /// Only present when `n = 3 mod 4`.
    pub isolated: f64,
    pub first_sum: f64,
    pub second_sum: f64,
}

impl DqPieces {
    pub fn total(&self) -> f64 {
        self.isolated + self.first_sum + self.second_sum
    }
}

fn log_abs_ratio(a: Complex64, shift: f64, n: f64) -> f64 {
    let num = ((-a + I * shift) / n).exp() - 1.0;
    let den = ((-a.conj() + I * shift) / n).exp() - 1.0;
    num.norm().ln() - den.norm().ln()
}

/// The grouped sums for `n = 4m+1` and `n = 4m+3`.
pub fn dq_pieces(a: Complex64, n: u64) -> Result<DqPieces> {
    check_level(n)?;
    if (a.exp() + 1.0).norm() < 1e-10 {
        return Err(Error::Singular(format!("e^A = -1 at A = {a}")));
    }
    let nf = n as f64;
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    let mut isolated = 0.0;
    if n % 4 == 1 {
        let m = (n - 1) / 4;
        for j in 1..=m {
            let jf = j as f64;
            let r1 = log_abs_ratio(a, 4.0 * PI * jf - PI, nf);
            let r3 = log_abs_ratio(a, 4.0 * PI * jf - 3.0 * PI, nf);
            first.add((2.0 * jf - 1.0) / nf * r1);
            second.add((m - j + 1) as f64 / nf * (r1 - r3));
        }
    } else {
        let m = (n - 3) / 4;
        isolated = (m + 1) as f64 / nf * log_abs_ratio(a, PI, nf);
        for j in 1..=m {
            let jf = j as f64;
            let rp = log_abs_ratio(a, 4.0 * PI * jf + PI, nf);
            let rm = log_abs_ratio(a, 4.0 * PI * jf - PI, nf);
            first.add(2.0 * jf / nf * rp);
            second.add((m - j + 1) as f64 / nf * (rp - rm));
        }
    }
    Ok(DqPieces {
        isolated,
        first_sum: first.value(),
        second_sum: second.value(),
    })
}

/// `(1/n) log |D(q e^{-A/n})|` through the paired-factor rearrangement.
pub fn dq_rearranged(a: Complex64, n: u64) -> Result<f64> {
    Ok(dq_pieces(a, n)?.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceComponents {
    pub sigma_1: ScaledComplex,
    pub sigma_2: ScaledComplex,
    /// `(1/n) log |D(u_1)|`
    pub dq_1: f64,
    /// `(1/n) log |D(u_2)|`
    pub dq_2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub n: u64,
    pub congruence: u64,
    /// `None` once `|Trace|` leaves the `f64` range.
    pub modulus: Option<f64>,
    pub log_modulus: f64,
    pub log_modulus_over_n: f64,
    pub components: TraceComponents,
}

/// Parameters `(U_k, V_k)` of the two single sums, `U_k = 2 pi i - A_k`.
pub fn trace_params(lift: &LogLift, n: u64) -> Result<[QdlParams; 2]> {
    trace_params_capped(lift, n, DEFAULT_N_CAP)
}

pub fn trace_params_capped(lift: &LogLift, n: u64, n_cap: u64) -> Result<[QdlParams; 2]> {
    if n > n_cap {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the cap {n_cap}")));
    }
    let mk = |k: usize| {
        QdlParams::new_uncapped(Complex64::new(0.0, 2.0 * PI) - lift.a[k], lift.v[k], n)
    };
    Ok([mk(1)?, mk(2)?])
}

/// `|Trace| = |S_1| |S_2| / (n |D(u_1)|^{1/n} |D(u_2)|^{1/n})`.
pub fn trace_lr(lift: &LogLift, n: u64) -> Result<TraceResult> {
    trace_lr_capped(lift, n, DEFAULT_N_CAP)
}

pub fn trace_lr_capped(lift: &LogLift, n: u64, n_cap: u64) -> Result<TraceResult> {
    let [p1, p2] = trace_params_capped(lift, n, n_cap)?;
    let s1 = sigma_sum_checked(&p1, lift.l_hat)?;
    let s2 = sigma_sum_checked(&p2, lift.m_hat)?;
    let dq_1 = dq_direct(&p1)?;
    let dq_2 = dq_direct(&p2)?;
    let nf = n as f64;
    let log_modulus = s1.ln_abs() + s2.ln_abs() - nf.ln() - dq_1 - dq_2;
    Ok(TraceResult {
        n,
        congruence: n % 4,
        modulus: (log_modulus <= EXP_GUARD).then(|| log_modulus.exp()),
        log_modulus,
        log_modulus_over_n: log_modulus / nf,
        components: TraceComponents { sigma_1: s1, sigma_2: s2, dq_1, dq_2 },
    })
}

/// The unfactored double sum
/// `sum_{i1,i2} QDL_1(2 i1) QDL_2(2 i2) q^{2 i1^2 + 2 i2^2 - l i1 + ((l - m + n)/2) i2}`.
pub fn trace_double_sum(lift: &LogLift, n: u64) -> Result<ScaledComplex> {
    let logs = double_sum_log_terms(lift, n)?;
    Ok(sum_exp_logs(&logs.into_iter().map(|(_, l)| l).collect::<Vec<_>>(), 1))
}

fn double_sum_log_terms(lift: &LogLift, n: u64) -> Result<Vec<([u64; 2], Complex64)>> {
    let [p1, p2] = trace_params(lift, n)?;
    let t1 = qdl_log_table(&p1);
    let t2 = qdl_log_table(&p2);
    let twice = lift.l_hat - lift.m_hat + lift.n_hat;
    if twice % 2 != 0 {
        return Err(Error::InvalidParameter("l - m + n must be even".into()));
    }
    let half = (twice / 2) as i128;
    let l = lift.l_hat as i128;
    let mut out = Vec::with_capacity((n * n) as usize);
    for i1 in 1..=n {
        for i2 in 1..=n {
            let (a, b) = (i1 as i128, i2 as i128);
            let e = 2 * a * a + 2 * b * b - l * a + half * b;
            let log = t1[((2 * i1) % n) as usize] + t2[((2 * i2) % n) as usize] + root_of_unity_log(e, n);
            out.push(([i1, i2], log));
        }
    }
    Ok(out)
}

/// What a term cloud is drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum CloudSource {
    /// `Sigma_n` in the `w`-form, one term per `j = 1..n`.
    Sigma { params: QdlParams, k_hat: i64 },
    /// The unfactored `LR` double sum.
    TraceDoubleSum { lift: LogLift, n: u64 },
    /// One factor `QDL(q e^{-A_s/n}, e^{V_s/n} | 2 i_s) q^{2 i_s^2 - k_s i_s}` per
    /// letter of a word, `k_s` cycling through the winding integers.
    Word { lift: WordLift, n: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMetadata {
    pub kind: String,
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub big_u: Option<Complex64>,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    pub big_v: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_hat: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windings: Option<[i64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermCloud {
    pub n: u64,
    /// Number of indices per term.
    pub arity: usize,
    pub indices: Vec<[u64; 3]>,
    pub values: Vec<Complex64>,
    pub metadata: CloudMetadata,
}

impl TermCloud {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().copied().collect::<ComplexCompensatedSum>().value()
    }

    /// Position of the largest-modulus term.
    pub fn argmax(&self) -> Option<usize> {
        (0..self.len()).max_by(|&a, &b| self.values[a].norm().total_cmp(&self.values[b].norm()))
    }

    /// `|sum|` of the terms whose first index satisfies `|2 pi j/n - center| < half_width`.
    pub fn petal_contribution(&self, center: f64, half_width: f64) -> f64 {
        let n = self.n as f64;
        self.indices
            .iter()
            .zip(&self.values)
            .filter(|(idx, _)| {
                let t = 2.0 * PI * (idx[0] % self.n) as f64 / n;
                let d = (t - center).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d) < half_width
            })
            .map(|(_, v)| *v)
            .collect::<ComplexCompensatedSum>()
            .value()
            .norm()
    }
}

/// Petal centers `pi/3` and `4 pi/3` of a `Sigma_n` cloud.
pub const PETAL_CENTERS: [f64; 2] = [PI / 3.0, 4.0 * PI / 3.0];

/// The petal center whose terms add up to the larger contribution.
pub fn dominant_petal(cloud: &TermCloud) -> f64 {
    let [a, b] = PETAL_CENTERS;
    if cloud.petal_contribution(a, 0.5) >= cloud.petal_contribution(b, 0.5) {
        a
    } else {
        b
    }
}

fn finite_values(logs: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let worst = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    if worst > EXP_GUARD {
        return Err(Error::Overflow { log_magnitude: worst });
    }
    Ok(logs.into_iter().map(|l| l.exp()).collect())
}

pub fn term_cloud(source: &CloudSource) -> Result<TermCloud> {
    match source {
        CloudSource::Sigma { params, k_hat } => {
            let logs = sigma_log_terms_omega(params, *k_hat);
            Ok(TermCloud {
                n: params.n,
                arity: 1,
                indices: (1..=params.n).map(|j| [j, 0, 0]).collect(),
                values: finite_values(logs)?,
                metadata: CloudMetadata {
                    kind: "sigma".into(),
                    big_u: Some(params.big_u),
                    big_v: Some(params.big_v),
                    k_hat: Some(*k_hat),
                    word: None,
                    windings: None,
                },
            })
        }
        CloudSource::TraceDoubleSum { lift, n } => {
            guard_cloud(*n, 2)?;
            let terms = double_sum_log_terms(lift, *n)?;
            let (idx, logs): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
            Ok(TermCloud {
                n: *n,
                arity: 2,
                indices: idx.into_iter().map(|[a, b]| [a, b, 0]).collect(),
                values: finite_values(logs)?,
                metadata: CloudMetadata {
                    kind: "trace-double-sum".into(),
                    big_u: None,
                    big_v: None,
                    k_hat: None,
                    word: Some("LR".into()),
                    windings: Some([lift.l_hat, lift.m_hat, lift.n_hat]),
                },
            })
        }
        CloudSource::Word { lift, n } => word_cloud(lift, *n),
    }
}

fn guard_cloud(n: u64, arity: u32) -> Result<()> {
    check_level(n)?;
    if n > DEFAULT_N_CAP {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the cap {DEFAULT_N_CAP}")));
    }
    let count = (n as u128).pow(arity);
    if count > CLOUD_TERM_CAP as u128 {
        return Err(Error::ResourceLimit(format!(
            "{count} terms exceed the cloud cap {CLOUD_TERM_CAP} (n = {n}, {arity} indices)"
        )));
    }
    Ok(())
}

fn word_cloud(lift: &WordLift, n: u64) -> Result<TermCloud> {
    let k = lift.word.len();
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!("word length {k} not in 1..=3")));
    }
    guard_cloud(n, k as u32)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let tables = (1..=k)
        .map(|s| Ok(qdl_log_table(&QdlParams::new(two_pi_i - lift.a[s], lift.v[s], n)?)))
        .collect::<Result<Vec<_>>>()?;
    // Per-index log factor QDL(2i) q^{2i^2 - k_s i}.
    let factors: Vec<Vec<Complex64>> = tables
        .iter()
        .enumerate()
        .map(|(s, t)| {
            let ks = lift.windings[s % 3] as i128;
            (1..=n)
                .map(|i| {
                    let ii = i as i128;
                    t[((2 * i) % n) as usize] + root_of_unity_log(2 * ii * ii - ks * ii, n)
                })
                .collect()
        })
        .collect();
    let total = (n as usize).pow(k as u32);
    let mut indices = Vec::with_capacity(total);
    let mut logs = Vec::with_capacity(total);
    let mut idx = [1u64; 3];
    for _ in 0..total {
        let log: Complex64 = (0..k).map(|s| factors[s][(idx[s] - 1) as usize]).sum();
        let mut stored = [0u64; 3];
        stored[..k].copy_from_slice(&idx[..k]);
        indices.push(stored);
        logs.push(log);
        // odometer, last index fastest
        for s in (0..k).rev() {
            if idx[s] < n {
                idx[s] += 1;
                break;
            }
            idx[s] = 1;
        }
    }
    Ok(TermCloud {
        n,
        arity: k,
        indices,
        values: finite_values(logs)?,
        metadata: CloudMetadata {
            kind: "word".into(),
            big_u: None,
            big_v: None,
            k_hat: None,
            word: Some(lift.word.to_string()),
            windings: Some(lift.windings),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_weights::{default_theta, lift_logarithms, solve_periodic, Preset, Sign};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Literal product definition.
    fn qdl_brute(p: &QdlParams, j: u64) -> Complex64 {
        let (q, u, v) = (p.q(), p.u(), p.v());
        let mut prod = v.powi(-(j as i32));
        for k in 1..=j {
            prod *= 1.0 + u * q.powi(-2 * k as i32);
        }
        prod
    }

    #[test]
    fn qdl_endpoints_and_period() {
        let p = QdlParams::from_u(c(0.3, 0.2), 5).unwrap();
        assert_eq!(qdl_discrete(&p, 0), c(1.0, 0.0));
        assert!((qdl_discrete_log(&p, 5).exp() - 1.0).norm() < 1e-15);
        assert!((qdl_brute(&p, 5) - 1.0).norm() < 1e-12);
        assert!((qdl_discrete(&p, 7) - qdl_brute(&p, 2)).norm() < 1e-12);
        for j in 0..5 {
            assert!((qdl_discrete(&p, j) - qdl_brute(&p, j as u64)).norm() < 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(QdlParams::from_u(c(0.1, 0.0), 4).is_err());
        assert!(QdlParams::new(c(0.1, 0.0), c(0.0, 0.0), 5).is_err());
        assert!(matches!(QdlParams::from_u(c(0.0, PI), 5), Err(Error::Singular(_))));
        assert!(matches!(QdlParams::from_u(c(0.1, 0.0), 8193), Err(Error::ResourceLimit(_))));
        assert!(QdlParams::new_uncapped(c(0.1, 0.0), (1.0 + c(0.1, 0.0).exp()).ln(), 8193).is_ok());
    }

    #[test]
    fn sigma_small_n_brute_force() {
        let p = QdlParams::from_u(c(-0.4, 1.1), 5).unwrap();
        for k_hat in [-2, 0, 3] {
            let q = p.q();
            let brute: Complex64 = (1..=5i32)
                .map(|i| qdl_brute(&p, (2 * i as u64) % 5) * q.powi(2 * i * i - k_hat as i32 * i))
                .sum();
            let s = sigma_sum(&p, k_hat).unwrap();
            assert!((s - brute).norm() < 1e-13 * brute.norm().max(1.0), "{s} vs {brute}");
        }
    }

    #[test]
    fn index_forms_agree() {
        let p = QdlParams::from_u(c(-2.58581, 6.05389), 101).unwrap();
        for k_hat in [4, 5] {
            let a = sigma_sum_scaled(&p, k_hat).to_complex().unwrap();
            let b = sigma_sum_omega_scaled(&p, k_hat).to_complex().unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn dq_against_products() {
        let p = QdlParams::from_u(c(0.2, 0.5), 5).unwrap();
        let brute: Complex64 = (1..=5).map(|i| qdl_brute(&p, i)).product();
        let direct = dq_direct(&p).unwrap();
        assert!((direct - brute.norm().ln() / 5.0).abs() < 1e-12);
        assert!((dq_from_products(&p) - direct).abs() < 1e-12);
    }

    #[test]
    fn dq_real_a_vanishes() {
        for n in [9, 11, 101, 103] {
            let a = c(1.3, 0.0);
            let p = QdlParams::from_u(c(0.0, 2.0 * PI) - a, n).unwrap();
            assert!(dq_direct(&p).unwrap().abs() < 1e-12);
            assert!(dq_rearranged(a, n).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn dq_rearranged_matches_direct() {
        for (a, n) in [(c(1.0, 1.0), 9), (c(1.0, 1.0), 11), (c(1.0, 2.0), 101), (c(-0.5, 3.0), 103)] {
            let p = QdlParams::from_u(c(0.0, 2.0 * PI) - a, n).unwrap();
            let d = dq_direct(&p).unwrap();
            let r = dq_rearranged(a, n).unwrap();
            assert!((d - r).abs() < 1e-12, "n = {n}: {d} vs {r}");
        }
        assert!(matches!(dq_rearranged(c(0.0, PI), 9), Err(Error::Singular(_))));
    }

    #[test]
    fn factorization_n5() {
        let (_, lift) = Preset::ExampleLr.lr_lift().unwrap();
        let tr = trace_lr(&lift, 5).unwrap();
        let double = trace_double_sum(&lift, 5).unwrap();
        let single = tr.components.sigma_1.mul(&tr.components.sigma_2).to_complex().unwrap();
        assert!((double.to_complex().unwrap() - single).norm() < 1e-12 * single.norm());
    }

    #[test]
    fn trace_modulus_consistent_with_components() {
        let (_, lift) = Preset::Hyperbolic.lr_lift().unwrap();
        let tr = trace_lr(&lift, 101).unwrap();
        let c = tr.components;
        let m = c.sigma_1.ln_abs().exp() * c.sigma_2.ln_abs().exp()
            / (101.0 * c.dq_1.exp() * c.dq_2.exp());
        assert!((tr.modulus.unwrap() / m - 1.0).abs() < 1e-12);
        assert_eq!(tr.congruence, 1);
        let far = trace_lr(&lift, 8191).unwrap();
        assert!(far.modulus.is_none() && far.log_modulus_over_n.is_finite());
    }

    #[test]
    fn branch_invariance() {
        let sys = solve_periodic(c(0.4, 0.9), Sign::Minus).unwrap();
        let theta = default_theta(&sys.triples[0]);
        let base = trace_lr(&lift_logarithms(&sys, theta, [0, 0, 0]).unwrap(), 21).unwrap();
        for br in [[1, 0, 0], [0, -1, 0], [2, 1, 0], [-1, 3, 0], [4, -2, 0]] {
            let other = trace_lr(&lift_logarithms(&sys, theta, br).unwrap(), 21).unwrap();
            assert!((other.log_modulus - base.log_modulus).abs() < 1e-9, "{br:?}");
        }
    }

    #[test]
    fn bridge_to_continuous() {
        let p = QdlParams::from_u(c(0.4, 0.3), 101).unwrap();
        assert!(qdl_vs_continuous(&p, 0).unwrap() < 1e-12);
        let r = qdl_vs_continuous(&p, 10).unwrap();
        assert!(r < 1e-7, "residual {r}");
        let p = QdlParams::from_u(c(0.4, 0.3), 51).unwrap();
        let r = qdl_vs_continuous(&p, 25).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn small_clouds() {
        let p = QdlParams::from_u(c(0.2, -0.3), 5).unwrap();
        let cloud = term_cloud(&CloudSource::Sigma { params: p, k_hat: 1 }).unwrap();
        assert_eq!(cloud.len(), 5);
        assert!((cloud.sum() - sigma_sum(&p, 1).unwrap()).norm() < 1e-13);
        let (_, lift) = Preset::ExampleLlr.build().unwrap();
        assert!(matches!(
            term_cloud(&CloudSource::Word { lift: lift.clone(), n: 303 }),
            Err(Error::ResourceLimit(_))
        ));
        let cloud = term_cloud(&CloudSource::Word { lift, n: 7 }).unwrap();
        assert_eq!(cloud.len(), 343);
    }

    #[test]
    fn lr_word_cloud_is_the_double_sum() {
        let (_, wl) = Preset::ExampleLr.build().unwrap();
        let (_, lift) = Preset::ExampleLr.lr_lift().unwrap();
        let a = term_cloud(&CloudSource::Word { lift: wl, n: 9 }).unwrap();
        let b = term_cloud(&CloudSource::TraceDoubleSum { lift, n: 9 }).unwrap();
        assert_eq!(a.indices, b.indices);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-12 * x.norm().max(1.0));
        }
    }
}

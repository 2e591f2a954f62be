use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::io;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::asymptotics::{
    auxiliary_cot_integral, d_n_limit, laplace_sum_reference, sigma_ratio, trace_growth_rate,
    trace_ratio, volume_figure_eight, Mutation, PartialLimit,
};
use crate::edge_weights::{default_theta, lift_logarithms, solve_periodic, LogLift, Preset, Sign};
use crate::error::Result;
use crate::io::write_cloud_csv;
use crate::skein_trace::{
    dominant_petal, dq_direct, dq_rearranged, qdl_vs_continuous, term_cloud, trace_double_sum,
    trace_lr, trace_params, CloudSource, QdlParams, PETAL_CENTERS,
};
use crate::special_functions::{dilog, lobachevsky};

/// The single-sum example: `U`, with `k = 5`, at `n = 4001`.
pub const CLOUD_U: Complex64 = Complex64::new(-2.58581, 6.05389);
pub const CLOUD_K_HAT: i64 = 5;
pub const CLOUD_N: u64 = 4001;

const SEED: u64 = 0x5eed_1a7e;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub tags: Vec<String>,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mutation: Mutation,
    pub criteria: Vec<CriterionReport>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Run only criteria whose id, name or tag matches.
    pub only: Option<String>,
    pub mutation: Mutation,
    /// Where to write the figure CSVs; discarded when absent.
    pub figure_dir: Option<std::path::PathBuf>,
}

struct Criterion {
    id: u32,
    name: &'static str,
    tags: &'static [&'static str],
    budget: Option<Duration>,
}

const CRITERIA: [Criterion; 13] = [
    Criterion { id: 1, name: "volume", tags: &["special", "volume"], budget: Some(Duration::from_millis(1)) },
    Criterion { id: 2, name: "dilog-lobachevsky", tags: &["special", "dilog"], budget: Some(Duration::from_secs(1)) },
    Criterion { id: 3, name: "discrete-continuous", tags: &["qdl", "special"], budget: Some(Duration::from_secs(30)) },
    Criterion { id: 4, name: "factorization", tags: &["trace"], budget: Some(Duration::from_secs(1)) },
    Criterion { id: 5, name: "dq-identities", tags: &["dq"], budget: Some(Duration::from_secs(5)) },
    Criterion { id: 6, name: "dq-limits", tags: &["dq", "asymptotics"], budget: Some(Duration::from_secs(10)) },
    Criterion { id: 7, name: "partial-limits", tags: &["dq", "asymptotics"], budget: Some(Duration::from_secs(5)) },
    Criterion { id: 8, name: "sigma-asymptotics", tags: &["sigma", "asymptotics"], budget: None },
    Criterion { id: 9, name: "volume-conjecture", tags: &["trace", "asymptotics"], budget: Some(Duration::from_secs(60)) },
    Criterion { id: 10, name: "trace-asymptotics", tags: &["trace", "asymptotics"], budget: None },
    Criterion { id: 11, name: "laplace", tags: &["asymptotics"], budget: Some(Duration::from_secs(1)) },
    Criterion { id: 12, name: "figures", tags: &["cloud", "sigma"], budget: Some(Duration::from_secs(30)) },
    Criterion { id: 13, name: "mutation-sensitivity", tags: &["mutation"], budget: None },
];

fn matches(c: &Criterion, filter: &str) -> bool {
    let f = filter.trim().to_ascii_lowercase();
    f == c.id.to_string() || f == c.name || c.tags.iter().any(|t| *t == f)
}

pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let criteria: Vec<CriterionReport> = CRITERIA
        .iter()
        .filter(|s| opts.only.as_deref().map_or(true, |f| matches(s, f)))
        .map(|s| run_one(s, opts))
        .collect();
    let all_passed = criteria.iter().all(|c| c.passed);
    VerifyReport { mutation: opts.mutation, criteria, all_passed }
}

/// Runs a single criterion by id.
pub fn run_criterion(id: u32, opts: &VerifyOptions) -> Option<CriterionReport> {
    CRITERIA.iter().find(|s| s.id == id).map(|s| run_one(s, opts))
}

fn run_one(c: &Criterion, opts: &VerifyOptions) -> CriterionReport {
    let start = Instant::now();
    let outcome = match c.id {
        1 => c1_volume(),
        2 => c2_dilog(),
        3 => c3_bridge(),
        4 => c4_factorization(),
        5 => c5_dq_identities(),
        6 => c6_dq_limits(),
        7 => c7_partial_limits(),
        8 => c8_sigma(opts.mutation),
        9 => c9_volume_conjecture(),
        10 => c10_trace(opts.mutation),
        11 => c11_laplace(),
        12 => c12_figures(opts.figure_dir.as_deref()),
        13 => c13_mutations(),
        _ => unreachable!("criterion ids are fixed"),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(budget) = c.budget {
        if elapsed > budget {
            passed = false;
            detail.push_str(&format!("; runtime {elapsed:?} over budget {budget:?}"));
        }
    }
    CriterionReport {
        id: c.id,
        name: c.name.to_string(),
        tags: c.tags.iter().map(|t| t.to_string()).collect(),
        passed,
        detail,
        elapsed_ms: elapsed.as_secs_f64() * 1e3,
    }
}

type Outcome = Result<(bool, String)>;

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn c1_volume() -> Outcome {
    let v = volume_figure_eight();
    let alt = 4.0 * lobachevsky(PI / 6.0);
    let ok = (v - 2.029883).abs() < 1e-5 && (v - alt).abs() < 1e-13 && v > 0.0;
    Ok((ok, format!("vol = {v:.15}, |vol - 4 Lambda(pi/6)| = {:.1e}", (v - alt).abs())))
}

fn c2_dilog() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..100 {
        let theta = 0.05 + (PI - 0.1) * k as f64 / 99.0;
        let z = Complex64::from_polar(1.0, 2.0 * theta);
        let expected = Complex64::new(PI * PI / 6.0 - theta * (PI - theta), 2.0 * lobachevsky(theta));
        worst = worst.max((dilog(z)? - expected).norm());
    }
    Ok((worst < 1e-10, format!("max error {worst:.2e} over 100 angles")))
}

fn c3_bridge() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for n in [51u64, 101] {
        let p = QdlParams::from_u(Complex64::new(0.4, 0.3), n)?;
        for _ in 0..10 {
            let j = rng.gen_range(1..n as i64);
            worst = worst.max(qdl_vs_continuous(&p, j)?);
        }
    }
    Ok((worst < 1e-6, format!("max residual {worst:.2e} over 20 (n, j) pairs")))
}

/// A random valid `LR` lift: `b0` in an annulus, random sign and branches.
pub fn random_lift(rng: &mut StdRng) -> Result<LogLift> {
    loop {
        let r = rng.gen_range(0.3..3.0);
        let phi = rng.gen_range(-PI..PI);
        let b0 = Complex64::from_polar(r, phi);
        if (b0 + 1.0).norm() < 0.1 {
            continue;
        }
        let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let Ok(sys) = solve_periodic(b0, sign) else { continue };
        let t0 = sys.triples[0];
        if [t0.a, t0.c].iter().any(|x| (x + 1.0).norm() < 0.05 || x.norm() < 0.05) {
            continue;
        }
        let branches = [rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-1..=1)];
        match lift_logarithms(&sys, default_theta(&t0), branches) {
            Ok(lift) => return Ok(lift),
            Err(_) => continue,
        }
    }
}

fn c4_factorization() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let lift = random_lift(&mut rng)?;
        for n in (1..=15).step_by(2) {
            let [p1, p2] = trace_params(&lift, n)?;
            let s1 = crate::skein_trace::sigma_sum_scaled(&p1, lift.l_hat);
            let s2 = crate::skein_trace::sigma_sum_scaled(&p2, lift.m_hat);
            let product = s1.mul(&s2);
            let double = trace_double_sum(&lift, n)?;
            let rel = (double.log_scale - product.log_scale).exp() * double.mantissa - product.mantissa;
            worst = worst.max(rel.norm() / product.mantissa.norm());
        }
    }
    Ok((worst < 1e-12, format!("max relative mismatch {worst:.2e} (10 lifts, odd n <= 15)")))
}

fn random_a(rng: &mut StdRng) -> Complex64 {
    loop {
        let a = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-6.0..6.0));
        if (a.exp() + 1.0).norm() > 0.05 {
            return a;
        }
    }
}

fn c5_dq_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let a = random_a(&mut rng);
        // alternate congruence classes
        let m = rng.gen_range(1..=49u64);
        let n = 4 * m + if k % 2 == 0 { 1 } else { 3 };
        let direct = dq_direct(&QdlParams::from_u(two_pi_i - a, n)?)?;
        worst = worst.max((direct - dq_rearranged(a, n)?).abs());
    }
    let mut worst_real = 0.0f64;
    for &(a, n) in &[(0.7, 101u64), (-1.9, 103), (2.4, 201), (0.0, 199)] {
        let a = Complex64::new(a, 0.0);
        worst_real = worst_real
            .max(dq_direct(&QdlParams::from_u(two_pi_i - a, n)?)?.abs())
            .max(dq_rearranged(a, n)?.abs());
    }
    Ok((
        worst < 1e-10 && worst_real < 1e-12,
        format!("direct vs rearranged {worst:.2e}; real A {worst_real:.2e}"),
    ))
}

fn c6_dq_limits() -> Outcome {
    let a = Complex64::new(0.0, 2.0);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut ok = true;
    let mut detail = Vec::new();
    for (class, ns) in [(1u64, [101u64, 401, 1601]), (3, [103, 403, 1603])] {
        let target = d_n_limit(a, class)?.ln();
        let devs = ns
            .iter()
            .map(|&n| Ok((dq_direct(&QdlParams::from_u(two_pi_i - a, n)?)? - target).abs()))
            .collect::<Result<Vec<f64>>>()?;
        ok &= strictly_decreasing(&devs);
        detail.push(format!("class {class}: {}", fmt_list(&devs)));
    }
    Ok((ok, detail.join("; ")))
}

fn c7_partial_limits() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = random_a(&mut rng);
        let l = |w: PartialLimit| w.limit(a);
        let c1 = l(PartialLimit::FirstSum1Mod4)? + l(PartialLimit::SecondSum1Mod4)?;
        let c3 = l(PartialLimit::FirstSum3Mod4)?
            + l(PartialLimit::SecondSum3Mod4)?
            + l(PartialLimit::Isolated3Mod4)?;
        worst = worst
            .max((c1 - d_n_limit(a, 1)?.ln()).abs())
            .max((c3 - d_n_limit(a, 3)?.ln()).abs());
    }
    let aux = auxiliary_cot_integral()?;
    let aux_err = (aux - LN_2 / (8.0 * PI)).abs();
    Ok((
        worst < 1e-12 && aux_err < 1e-10,
        format!("limit-sum mismatch {worst:.2e}; auxiliary integral error {aux_err:.2e}"),
    ))
}

/// Levels `n = 1 (mod 8)`, roughly quadrupling, ending at the example level.
pub const SIGMA_LEVELS: [u64; 4] = [65, 249, 1001, 4001];

fn c8_sigma(mutation: Mutation) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for k_hat in [CLOUD_K_HAT, 4] {
        let devs = SIGMA_LEVELS
            .iter()
            .map(|&n| Ok((sigma_ratio(&QdlParams::from_u(CLOUD_U, n)?, k_hat, mutation)? - 1.0).abs()))
            .collect::<Result<Vec<f64>>>()?;
        let last = devs[devs.len() - 1];
        ok &= strictly_decreasing(&devs) && last < 0.10;
        detail.push(format!("k = {k_hat}: |ratio - 1| = {}", fmt_list(&devs)));
    }
    Ok((ok, detail.join("; ")))
}

/// Hyperbolic levels `401, 801, ..., 2801` and their class-3 neighbours.
pub fn conjecture_levels(class: u64) -> Vec<u64> {
    (0..7).map(|k| 401 + 400 * k + (class - 1)).collect()
}

fn c9_volume_conjecture() -> Outcome {
    let (_, lift) = Preset::Hyperbolic.lr_lift()?;
    let rate = trace_growth_rate();
    let mut ok = true;
    let mut detail = Vec::new();
    let mut tops = Vec::new();
    for class in [1u64, 3] {
        let mut devs = Vec::new();
        let mut ks = Vec::new();
        for n in conjecture_levels(class) {
            let t = trace_lr(&lift, n)?;
            devs.push((t.log_modulus_over_n - rate).abs());
            ks.push((t.log_modulus - n as f64 * rate).exp());
        }
        let top_ratio = ks[ks.len() - 1] / ks[ks.len() - 2];
        ok &= strictly_decreasing(&devs) && (top_ratio - 1.0).abs() < 0.05;
        tops.push(ks[ks.len() - 1]);
        detail.push(format!(
            "class {class}: deviation {}, K -> {:.6} (last ratio {top_ratio:.5})",
            fmt_list(&devs),
            ks[ks.len() - 1]
        ));
    }
    ok &= (tops[0] / tops[1] - 1.0).abs() > 0.05;
    Ok((ok, detail.join("; ")))
}

/// Levels for the end-to-end ratio, doubling within each class.
pub fn ratio_levels(class: u64) -> [u64; 4] {
    [401, 801, 1601, 3201].map(|n| n + class - 1)
}

fn c10_trace(mutation: Mutation) -> Outcome {
    let (_, lift) = Preset::Hyperbolic.lr_lift()?;
    let mut ok = true;
    let mut detail = Vec::new();
    for class in [1u64, 3] {
        let devs = ratio_levels(class)
            .iter()
            .map(|&n| Ok((trace_ratio(&lift, n, mutation)? - 1.0).abs()))
            .collect::<Result<Vec<f64>>>()?;
        ok &= strictly_decreasing(&devs) && devs[3] < 0.5 * devs[0];
        detail.push(format!("class {class}: |ratio - 1| = {}", fmt_list(&devs)));
    }
    Ok((ok, detail.join("; ")))
}

fn c11_laplace() -> Outcome {
    let f = |t: f64| -(t - 1.0) * (t - 1.0);
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let n = 10_000;
    let plain = laplace_sum_reference(&f, &one, (0.0, 2.0), n, false)?;
    let ratio = (plain.sum / plain.estimate).norm();
    let alt = laplace_sum_reference(&f, &one, (0.0, 2.0), n, true)?;
    let suppression = alt.sum.norm() / ((n as f64).sqrt() * (n as f64 * f(alt.x0)).exp());
    Ok((
        (0.99..=1.01).contains(&ratio) && suppression < 0.01,
        format!("plain ratio {ratio:.6}; alternating {suppression:.2e}"),
    ))
}

fn write_figure(cloud: &crate::skein_trace::TermCloud, dir: Option<&Path>, name: &str) -> Result<()> {
    let io_err = |e: io::Error| crate::error::Error::InvalidParameter(e.to_string());
    match dir {
        Some(d) => {
            let file = std::fs::File::create(d.join(name)).map_err(io_err)?;
            write_cloud_csv(cloud, io::BufWriter::new(file), true).map_err(io_err)
        }
        None => write_cloud_csv(cloud, io::sink(), true).map_err(io_err),
    }
}

fn c12_figures(dir: Option<&Path>) -> Outcome {
    let p = QdlParams::from_u(CLOUD_U, CLOUD_N)?;
    let cloud = term_cloud(&CloudSource::Sigma { params: p, k_hat: CLOUD_K_HAT })?;
    let j = cloud.indices[cloud.argmax().expect("nonempty")][0];
    let t = 2.0 * PI * j as f64 / CLOUD_N as f64;
    let dist = PETAL_CENTERS.iter().map(|c| (t - c).abs()).fold(f64::INFINITY, f64::min);
    let predicted = if CLOUD_K_HAT.rem_euclid(2) == 1 { PETAL_CENTERS[0] } else { PETAL_CENTERS[1] };
    let dominant = dominant_petal(&cloud);
    write_figure(&cloud, dir, "single_sum.csv")?;

    let (_, lr) = Preset::ExampleLr.lr_lift()?;
    let left = term_cloud(&CloudSource::TraceDoubleSum { lift: lr, n: 801 })?;
    write_figure(&left, dir, "lr_double_sum.csv")?;
    let (_, llr) = Preset::ExampleLlr.build()?;
    let right = term_cloud(&CloudSource::Word { lift: llr, n: 111 })?;
    write_figure(&right, dir, "llr_triple_sum.csv")?;

    let ok = dist < 0.05 && dominant == predicted && left.len() == 801 * 801 && right.len() == 111 * 111 * 111;
    Ok((
        ok,
        format!(
            "largest term at t = {t:.4} ({dist:.1e} from a petal center); dominant petal {dominant:.4}, predicted {predicted:.4}; {} + {} figure rows",
            left.len(),
            right.len()
        ),
    ))
}

fn c13_mutations() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for m in [Mutation::FlipImAInD, Mutation::SwapParityInC] {
        let (p8, _) = c8_sigma(m)?;
        let (p10, _) = c10_trace(m)?;
        let caught = !p8 || !p10;
        ok &= caught;
        detail.push(format!("{m:?}: criterion 8 {}, criterion 10 {}", verdict(p8), verdict(p10)));
    }
    let (b8, _) = c8_sigma(Mutation::None)?;
    let (b10, _) = c10_trace(Mutation::None)?;
    ok &= b8 && b10;
    Ok((ok, detail.join("; ")))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "passes"
    } else {
        "fails"
    }
}

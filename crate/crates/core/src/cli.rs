use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::str::FromStr;

use crate::asymptotics::{trace_growth_rate, AsymptoticPrediction, Mutation};
use crate::edge_weights::{
    default_theta, lift_logarithms, lift_word, solve_periodic, solve_periodic_word, LogLift,
    PeriodicWeightSystem, Preset, Sign, WeightTriple, Word, WordLift,
};
use crate::error::{Error, Result};
use crate::skein_trace::{
    term_cloud, trace_lr_capped, CloudSource, QdlParams, TermCloud, TraceResult, DEFAULT_N_CAP,
};
use crate::verify::{self, VerifyOptions, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    Weights,
    Trace,
    Converge,
    Cloud,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

/// Parses `re,im`, a bare real, or `re+imi`-free pairs such as `-1,0`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidParameter(format!("cannot parse complex number {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.parse().map_err(|_| bad())?,
            im.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

pub fn parse_triple(s: &str) -> Result<[i64; 3]> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse integer triple {s:?}")))?;
    v.try_into()
        .map_err(|_| Error::InvalidParameter(format!("expected three integers, got {s:?}")))
}

/// Odd levels `start, start + stride, ..., <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub start: u64,
    pub end: u64,
    pub stride: u64,
}

impl FromStr for NRange {
    type Err = Error;
    /// `start:end:stride`, `start:end` (stride 2) or a single level.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse range {s:?}"));
        let p = s
            .split(':')
            .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match p.as_slice() {
            [n] => Ok(NRange { start: *n, end: *n, stride: 2 }),
            [a, b] => Ok(NRange { start: *a, end: *b, stride: 2 }),
            [a, b, c] => Ok(NRange { start: *a, end: *b, stride: *c }),
            _ => Err(bad()),
        }
    }
}

impl NRange {
    /// Expands and validates; with a class, every level must sit in it.
    pub fn levels(&self, class: Option<u64>) -> Result<Vec<u64>> {
        if self.stride == 0 || !self.stride.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "stride {} must be a positive even number",
                self.stride
            )));
        }
        if self.start.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("n = {} is even", self.start)));
        }
        if let Some(c) = class {
            if c != 1 && c != 3 {
                return Err(Error::InvalidParameter(format!("class must be 1 or 3, got {c}")));
            }
            if self.start % 4 != c || !self.stride.is_multiple_of(4) {
                return Err(Error::InvalidParameter(format!(
                    "range does not stay in class {c} mod 4 (start {}, stride {})",
                    self.start, self.stride
                )));
            }
        }
        let v: Vec<u64> = (self.start..=self.end).step_by(self.stride as usize).collect();
        if v.is_empty() {
            return Err(Error::InvalidParameter("empty range of levels".into()));
        }
        Ok(v)
    }
}

/// Where the edge weights come from.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    Preset(Preset),
    B0 { b0: Complex64, sign: Sign },
    File(PathBuf),
}

impl WeightSource {
    /// `hyperbolic`, `example-lr`, `example-llr`, or a complex number `re,im`.
    pub fn parse(b0: &str, sign: Sign) -> Result<Self> {
        match b0.parse::<Preset>() {
            Ok(p) => Ok(WeightSource::Preset(p)),
            Err(_) => Ok(WeightSource::B0 { b0: parse_complex(b0)?, sign }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub weights: WeightSource,
    pub theta_branch: [i64; 3],
    pub theta: Option<Complex64>,
    pub levels: Vec<u64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub n_cap: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Trace,
            weights: WeightSource::Preset(Preset::Hyperbolic),
            theta_branch: [0, 0, 0],
            theta: None,
            levels: Vec::new(),
            output: None,
            format: Format::Csv,
            n_cap: DEFAULT_N_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub fixed_point: f64,
    pub exponential: f64,
    pub winding_sum: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsDocument {
    pub word: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub system: Option<PeriodicWeightSystem>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lift: Option<LogLift>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub word_triples: Option<Vec<WeightTriple>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub word_lift: Option<WordLift>,
    pub residuals: Residuals,
}

fn lr_document(sys: PeriodicWeightSystem, lift: LogLift) -> WeightsDocument {
    WeightsDocument {
        word: "LR".into(),
        residuals: Residuals {
            fixed_point: sys.residual().unwrap_or(f64::INFINITY),
            exponential: lift.exp_residual(&sys),
            winding_sum: lift.l_hat + lift.m_hat + lift.n_hat,
        },
        system: Some(sys),
        lift: Some(lift),
        word_triples: None,
        word_lift: None,
    }
}

fn word_document(triples: Vec<WeightTriple>, lift: WordLift) -> WeightsDocument {
    let end = triples.len() - 1;
    let t0 = triples[0];
    let d = |x: Complex64, y: Complex64| (x - y).norm() / x.norm().max(1.0);
    let fixed_point = d(t0.a, triples[end].a).max(d(t0.b, triples[end].b)).max(d(t0.c, triples[end].c));
    let mut exponential = 0.0f64;
    for (k, t) in triples.iter().enumerate() {
        for (log, val) in [(lift.a[k], t.a), (lift.b[k], t.b), (lift.c[k], t.c), (lift.v[k], 1.0 + t.a.inv())] {
            exponential = exponential.max((log.exp() - val).norm() / val.norm());
        }
    }
    WeightsDocument {
        word: lift.word.to_string(),
        system: None,
        lift: None,
        residuals: Residuals { fixed_point, exponential, winding_sum: lift.windings.iter().sum() },
        word_triples: Some(triples),
        word_lift: Some(lift),
    }
}

/// Solve, lift and report the edge weights described by the config.
pub fn cmd_weights(cfg: &RunConfig) -> Result<WeightsDocument> {
    match &cfg.weights {
        WeightSource::Preset(Preset::ExampleLlr) => {
            let (ts, lift) = Preset::ExampleLlr.build()?;
            Ok(word_document(ts, lift))
        }
        WeightSource::Preset(p) if cfg.theta.is_none() && cfg.theta_branch == [0, 0, 0] => {
            let (sys, lift) = p.lr_lift()?;
            Ok(lr_document(sys, lift))
        }
        WeightSource::Preset(p) => {
            let (b0, sign) = p.b0_and_sign().expect("LR preset");
            lift_from_b0(b0, sign, cfg)
        }
        WeightSource::B0 { b0, sign } => lift_from_b0(*b0, *sign, cfg),
        WeightSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(e.to_string()))
        }
    }
}

fn lift_from_b0(b0: Complex64, sign: Sign, cfg: &RunConfig) -> Result<WeightsDocument> {
    let sys = solve_periodic(b0, sign)?;
    let theta = cfg.theta.unwrap_or_else(|| default_theta(&sys.triples[0]));
    let lift = lift_logarithms(&sys, theta, cfg.theta_branch)?;
    Ok(lr_document(sys, lift))
}

/// The `LR` lift described by the config, or from a weights/lift JSON file.
pub fn resolve_lift(cfg: &RunConfig) -> Result<LogLift> {
    if let WeightSource::File(path) = &cfg.weights {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        if let Ok(doc) = serde_json::from_str::<WeightsDocument>(&text) {
            return doc
                .lift
                .ok_or_else(|| Error::InvalidParameter("document holds no LR lift".into()));
        }
        return serde_json::from_str::<LogLift>(&text)
            .map_err(|e| Error::InvalidParameter(format!("not a lift document: {e}")));
    }
    cmd_weights(cfg)?
        .lift
        .ok_or_else(|| Error::InvalidParameter("trace needs an LR system".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: u64,
    pub congruence: u64,
    pub modulus: Option<f64>,
    pub log_modulus_over_n: f64,
    /// `None` once the prediction leaves the `f64` range, like `modulus`.
    pub predicted: Option<f64>,
    pub log_predicted: f64,
    pub ratio: f64,
    pub result: TraceResult,
}

pub fn cmd_trace(cfg: &RunConfig) -> Result<Vec<TraceRow>> {
    if cfg.levels.is_empty() {
        return Err(Error::InvalidParameter("no levels requested".into()));
    }
    let lift = resolve_lift(cfg)?;
    cfg.levels
        .iter()
        .map(|&n| {
            let result = trace_lr_capped(&lift, n, cfg.n_cap)?;
            let log_predicted = AsymptoticPrediction::new(&lift, n % 4)?.log_predicted_modulus(n);
            Ok(TraceRow {
                n,
                congruence: n % 4,
                modulus: result.modulus,
                log_modulus_over_n: result.log_modulus_over_n,
                predicted: (log_predicted <= 700.0).then(|| log_predicted.exp()),
                log_predicted,
                ratio: (result.log_modulus - log_predicted).exp(),
                result,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergeRow {
    pub n: u64,
    pub congruence: u64,
    pub log_modulus_over_n: f64,
    /// `(1/n) log |Trace| - vol/(4 pi)`
    pub deviation: f64,
    /// `|Trace| e^{-n vol/(4 pi)}`
    pub k_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub congruence: u64,
    /// Estimate at the largest level of the class.
    pub k_estimate: f64,
    /// `|c_1| |c_2| / (d_1 d_2)`
    pub k_predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeTable {
    pub rate: f64,
    pub rows: Vec<ConvergeRow>,
    pub classes: Vec<ClassSummary>,
}

pub fn cmd_converge(cfg: &RunConfig) -> Result<ConvergeTable> {
    if cfg.levels.is_empty() {
        return Err(Error::InvalidParameter("no levels requested".into()));
    }
    let lift = resolve_lift(cfg)?;
    let rate = trace_growth_rate();
    let mut rows = cfg
        .levels
        .iter()
        .map(|&n| {
            let t = trace_lr_capped(&lift, n, cfg.n_cap)?;
            Ok(ConvergeRow {
                n,
                congruence: n % 4,
                log_modulus_over_n: t.log_modulus_over_n,
                deviation: t.log_modulus_over_n - rate,
                k_estimate: (t.log_modulus - n as f64 * rate).exp(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.congruence, r.n));
    let mut classes = Vec::new();
    for class in [1u64, 3] {
        if let Some(last) = rows.iter().rfind(|r| r.congruence == class) {
            classes.push(ClassSummary {
                congruence: class,
                k_estimate: last.k_estimate,
                k_predicted: AsymptoticPrediction::new(&lift, class)?.prefactor(),
            });
        }
    }
    Ok(ConvergeTable { rate, rows, classes })
}

/// Which sum a cloud comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CloudRequest {
    Sigma { big_u: Complex64, big_v: Option<Complex64>, k_hat: i64 },
    Lr,
    Word { word: Word, seeds: Option<(Complex64, Complex64, Complex64)> },
}

pub fn cmd_cloud(cfg: &RunConfig, request: &CloudRequest) -> Result<TermCloud> {
    let n = match cfg.levels.as_slice() {
        [n] => *n,
        [] => return Err(Error::InvalidParameter("cloud needs a level n".into())),
        _ => return Err(Error::InvalidParameter("cloud takes a single level".into())),
    };
    if n > cfg.n_cap {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the cap {}", cfg.n_cap)));
    }
    let source = match request {
        CloudRequest::Sigma { big_u, big_v, k_hat } => {
            let params = match big_v {
                Some(v) => QdlParams::new(*big_u, *v, n)?,
                None => QdlParams::from_u(*big_u, n)?,
            };
            CloudSource::Sigma { params, k_hat: *k_hat }
        }
        CloudRequest::Lr => CloudSource::TraceDoubleSum { lift: resolve_lift(cfg)?, n },
        CloudRequest::Word { word, seeds } => {
            let lift = match (&cfg.weights, seeds) {
                (WeightSource::Preset(p), None) if p.word() == *word => p.build()?.1,
                (_, Some((b0, a0, c0))) => {
                    let ts = solve_periodic_word(word, *b0, *a0, *c0)?;
                    let theta = cfg.theta.unwrap_or_else(|| default_theta(&ts[0]));
                    lift_word(word, &ts, theta, cfg.theta_branch)?
                }
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "word {word} needs a matching preset or Newton seeds"
                    )))
                }
            };
            CloudSource::Word { lift, n }
        }
    };
    term_cloud(&source)
}

pub fn cmd_verify(only: Option<String>, mutation: Mutation, figure_dir: Option<PathBuf>) -> VerifyReport {
    verify::run(&VerifyOptions { only, mutation, figure_dir })
}

/// Process exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ResourceLimit(_) | Error::Overflow { .. } => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r: NRange = "401:2801:400".parse().unwrap();
        assert_eq!(r.levels(Some(1)).unwrap().len(), 7);
        assert!(r.levels(Some(3)).is_err());
        assert!("402:500:4".parse::<NRange>().unwrap().levels(None).is_err());
        assert!("401:399:2".parse::<NRange>().unwrap().levels(None).is_err());
        assert!("401:499:3".parse::<NRange>().unwrap().levels(None).is_err());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("-1,0").unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(parse_complex("2.5").unwrap(), Complex64::new(2.5, 0.0));
        assert!(parse_complex("a,b").is_err());
        assert_eq!(parse_triple("1,-2,3").unwrap(), [1, -2, 3]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::ResourceLimit("x".into())), 3);
        assert_eq!(exit_code(&Error::Degenerate("x".into())), 2);
    }
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);
const RESIDUAL_TOL: f64 = 1e-8;
const WINDING_TOL: f64 = 1e-6;

/// Edge weights `(a, b, c)` of the three edges of the punctured-torus triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightTriple {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl WeightTriple {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    fn distance(&self, other: &Self) -> f64 {
        [(self.a, other.a), (self.b, other.b), (self.c, other.c)]
            .iter()
            .map(|(x, y)| (x - y).norm() / x.norm().max(1.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(Error::InvalidParameter(format!("unknown sign {other:?}"))),
        }
    }
}

fn check_move(x: Complex64, which: &str) -> Result<()> {
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite weight {which} = {x}")));
    }
    if x.norm() < 1e-300 || (x + 1.0).norm() < 1e-300 {
        return Err(Error::Degenerate(format!("{which} = {x} is 0 or -1")));
    }
    Ok(())
}

/// Left move: `(a, b, c) -> (1/b, (1+b)^2 a, b^2 c / (1+b)^2)`.
pub fn evolve_l(t: WeightTriple) -> Result<WeightTriple> {
    check_move(t.b, "b")?;
    let s = (1.0 + t.b).powi(2);
    Ok(WeightTriple::new(t.b.inv(), s * t.a, t.b * t.b * t.c / s))
}

/// Right move: `(a, b, c) -> (1/c, (1+c)^2 b, c^2 a / (1+c)^2)`.
pub fn evolve_r(t: WeightTriple) -> Result<WeightTriple> {
    check_move(t.c, "c")?;
    let s = (1.0 + t.c).powi(2);
    Ok(WeightTriple::new(t.c.inv(), s * t.b, t.c * t.c * t.a / s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    L,
    R,
}

/// A word in the moves `L` and `R`, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn lr() -> Self {
        Word(vec![Letter::L, Letter::R])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All triples `t_0, ..., t_len` along the sweep.
    pub fn sweep(&self, start: WeightTriple) -> Result<Vec<WeightTriple>> {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(start);
        let mut t = start;
        for letter in &self.0 {
            t = match letter {
                Letter::L => evolve_l(t)?,
                Letter::R => evolve_r(t)?,
            };
            out.push(t);
        }
        Ok(out)
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'L' => Ok(Letter::L),
                'R' => Ok(Letter::R),
                other => Err(Error::InvalidParameter(format!("bad letter {other:?} in word"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidParameter("empty word".into()));
        }
        Ok(Word(letters))
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::L => "L",
                Letter::R => "R",
            })?;
        }
        Ok(())
    }
}

/// A periodic edge weight system for `LR`: `triples[1] = L(triples[0])`,
/// `triples[2] = R(triples[1])`, `triples[2] = triples[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicWeightSystem {
    pub triples: [WeightTriple; 3],
    pub sign_branch: Sign,
}

impl PeriodicWeightSystem {
    /// Largest relative mismatch among the three closure conditions.
    pub fn residual(&self) -> Result<f64> {
        let [t0, t1, t2] = self.triples;
        let r1 = evolve_l(t0)?.distance(&t1);
        let r2 = evolve_r(t1)?.distance(&t2);
        Ok(r1.max(r2).max(t2.distance(&t0)))
    }
}

/// Closed-form periodic system through `b0`, with `sign` choosing the square root.
pub fn solve_periodic(b0: Complex64, sign: Sign) -> Result<PeriodicWeightSystem> {
    if !(b0.re.is_finite() && b0.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite b0 = {b0}")));
    }
    if b0.norm() < 1e-12 || (b0 + 1.0).norm() < 1e-12 {
        return Err(Error::Degenerate(format!("b0 = {b0} must avoid 0 and -1")));
    }
    let b2 = b0 * b0;
    let root = (-b2 * b0 - 1.75 * b2 - b0).sqrt();
    let base = -1.0 - 1.5 * b0 - b2;
    let n_s = base + sign.value() * root;
    let n_o = base - sign.value() * root;
    let s = (1.0 + b0).powi(2);
    let t0 = WeightTriple::new(n_s / s, b0, n_o / b2);
    let t1 = WeightTriple::new(b0.inv(), n_s, n_o / s);
    let sys = PeriodicWeightSystem {
        triples: [t0, t1, t0],
        sign_branch: sign,
    };
    let residual = sys.residual()?;
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::Residual {
            what: "periodic closed form".into(),
            residual,
            tolerance: RESIDUAL_TOL,
        });
    }
    Ok(sys)
}

/// Chosen logarithms along an arbitrary word, `k = 0..=len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordLift {
    pub word: Word,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub theta_v: Complex64,
    /// `(A_0 - A_end, B_0 - B_end, C_0 - C_end) / (2 pi i)`.
    pub windings: [i64; 3],
}

/// Lifted logarithms for the `LR` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLift {
    #[serde(rename = "A")]
    pub a: [Complex64; 3],
    #[serde(rename = "B")]
    pub b: [Complex64; 3],
    #[serde(rename = "C")]
    pub c: [Complex64; 3],
    #[serde(rename = "V")]
    pub v: [Complex64; 3],
    pub theta_v: Complex64,
    pub l_hat: i64,
    pub m_hat: i64,
    pub n_hat: i64,
}

impl LogLift {
    /// Largest relative error in `e^{A_k} = a_k` and its siblings.
    pub fn exp_residual(&self, sys: &PeriodicWeightSystem) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..3 {
            let t = sys.triples[k];
            for (log, val) in [
                (self.a[k], t.a),
                (self.b[k], t.b),
                (self.c[k], t.c),
                (self.v[k], 1.0 + t.a.inv()),
            ] {
                worst = worst.max((log.exp() - val).norm() / val.norm());
            }
        }
        worst
    }
}

impl TryFrom<WordLift> for LogLift {
    type Error = Error;
    fn try_from(w: WordLift) -> Result<Self> {
        if w.word != Word::lr() {
            return Err(Error::InvalidParameter(format!("expected word LR, got {}", w.word)));
        }
        let arr = |v: &[Complex64]| [v[0], v[1], v[2]];
        Ok(LogLift {
            a: arr(&w.a),
            b: arr(&w.b),
            c: arr(&w.c),
            v: arr(&w.v),
            theta_v: w.theta_v,
            l_hat: w.windings[0],
            m_hat: w.windings[1],
            n_hat: w.windings[2],
        })
    }
}

/// `Log a0 + Log b0 + Log c0` with principal logarithms.
pub fn default_theta(t: &WeightTriple) -> Complex64 {
    t.a.ln() + t.b.ln() + t.c.ln()
}

/// Lift logarithms for the `LR` system.
///
/// `base_branches = (k_A, k_B, k_C)` shifts `A_0`, `B_0` and the puncture weight
/// by `2 pi i` times the given integer; `C_0` is then `theta_v - A_0 - B_0`.
pub fn lift_logarithms(
    sys: &PeriodicWeightSystem,
    theta_v: Complex64,
    base_branches: [i64; 3],
) -> Result<LogLift> {
    let lift = lift_word(&Word::lr(), &sys.triples, theta_v, base_branches)?;
    LogLift::try_from(lift)
}

/// Lift along an arbitrary periodic sweep `triples[0..=len]` of `word`.
pub fn lift_word(
    word: &Word,
    triples: &[WeightTriple],
    theta_v: Complex64,
    base_branches: [i64; 3],
) -> Result<WordLift> {
    if triples.len() != word.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} triples for a word of length {}",
            triples.len(),
            word.len()
        )));
    }
    let t0 = triples[0];
    let product = t0.a * t0.b * t0.c;
    let mismatch = (theta_v.exp() - product).norm() / product.norm();
    if !(mismatch < 1e-8) {
        return Err(Error::ThetaMismatch { mismatch });
    }
    let theta_v = theta_v + TWO_PI_I * base_branches[2] as f64;
    let a0 = t0.a.ln() + TWO_PI_I * base_branches[0] as f64;
    let b0 = t0.b.ln() + TWO_PI_I * base_branches[1] as f64;
    let mut a = vec![a0];
    let mut b = vec![b0];
    let mut c = vec![theta_v - a0 - b0];
    let mut v = vec![(1.0 + t0.a.inv()).ln()];
    for (k, letter) in word.letters().iter().enumerate() {
        let next = triples[k + 1];
        let vn = (1.0 + next.a.inv()).ln();
        let (ap, bp, cp) = (a[k], b[k], c[k]);
        let (an, bn, cn) = match letter {
            Letter::L => (-bp, 2.0 * vn + ap, -2.0 * vn + 2.0 * bp + cp),
            Letter::R => (-cp, 2.0 * vn + bp, -2.0 * vn + 2.0 * cp + ap),
        };
        a.push(an);
        b.push(bn);
        c.push(cn);
        v.push(vn);
    }
    let end = word.len();
    let wind = |x0: Complex64, x1: Complex64, which: &'static str| -> Result<i64> {
        let w = (x0 - x1) / TWO_PI_I;
        let k = w.re.round();
        let residual = (w - k).norm();
        if residual < WINDING_TOL {
            Ok(k as i64)
        } else {
            Err(Error::NonIntegerWinding { which, residual })
        }
    };
    let windings = [
        wind(a[0], a[end], "l_hat")?,
        wind(b[0], b[end], "m_hat")?,
        wind(c[0], c[end], "n_hat")?,
    ];
    Ok(WordLift {
        word: word.clone(),
        a,
        b,
        c,
        v,
        theta_v,
        windings,
    })
}

/// Branch integers putting `(Log a0, Log b0, Log c0)` nearest to the given logarithms.
pub fn branches_near(t: &WeightTriple, logs: [Complex64; 3]) -> [i64; 3] {
    let k = |x: Complex64, target: Complex64| ((target - x.ln()).im / (2.0 * PI)).round() as i64;
    let ka = k(t.a, logs[0]);
    let kb = k(t.b, logs[1]);
    let kc = k(t.c, logs[2]);
    [ka, kb, ka + kb + kc]
}

/// Periodic sweep of an arbitrary word through `b0`, found by Newton's method
/// on `(a0, c0)` from the given seed.
pub fn solve_periodic_word(
    word: &Word,
    b0: Complex64,
    seed_a0: Complex64,
    seed_c0: Complex64,
) -> Result<Vec<WeightTriple>> {
    let defect = |a0: Complex64, c0: Complex64| -> Result<[Complex64; 2]> {
        let ts = word.sweep(WeightTriple::new(a0, b0, c0))?;
        let end = ts[ts.len() - 1];
        Ok([end.a - a0, end.b - b0])
    };
    let (mut a0, mut c0) = (seed_a0, seed_c0);
    for _ in 0..100 {
        let f = defect(a0, c0)?;
        let size = f[0].norm() + f[1].norm();
        if size < 1e-14 * (1.0 + a0.norm() + b0.norm()) {
            let ts = word.sweep(WeightTriple::new(a0, b0, c0))?;
            return Ok(ts);
        }
        let ha = 1e-7 * a0.norm().max(1e-3);
        let hc = 1e-7 * c0.norm().max(1e-3);
        let fa = defect(a0 + ha, c0)?;
        let fc = defect(a0, c0 + hc)?;
        let j = [
            [(fa[0] - f[0]) / ha, (fc[0] - f[0]) / hc],
            [(fa[1] - f[1]) / ha, (fc[1] - f[1]) / hc],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm() < 1e-300 {
            return Err(Error::Singular("Newton Jacobian".into()));
        }
        let da = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let dc = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        a0 -= da;
        c0 -= dc;
    }
    let f = defect(a0, c0)?;
    Err(Error::Residual {
        what: format!("periodic sweep for {word}"),
        residual: f[0].norm() + f[1].norm(),
        tolerance: 1e-14,
    })
}

/// Named parameter sets used throughout the tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// The complete hyperbolic structure, `b0 = e^{2 pi i/3}`.
    Hyperbolic,
    /// The `LR` example at `n = 801`.
    ExampleLr,
    /// The `LLR` example at `n = 111`.
    ExampleLlr,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hyperbolic" | "hyp" => Ok(Preset::Hyperbolic),
            "example-lr" | "lr" => Ok(Preset::ExampleLr),
            "example-llr" | "llr" => Ok(Preset::ExampleLlr),
            other => Err(Error::InvalidParameter(format!("unknown preset {other:?}"))),
        }
    }
}

/// Rounded logarithms `(A_0, B_0, C_0)` quoted for the `LR` example.
pub const EXAMPLE_LR_LOGS: [Complex64; 3] = [
    Complex64::new(-0.0253997, 34.3024),
    Complex64::new(-2.58581, -0.229299),
    Complex64::new(5.33887, -2.45979),
];
/// Rounded logarithms `(A_0, B_0, C_0)` quoted for the `LLR` example.
pub const EXAMPLE_LLR_LOGS: [Complex64; 3] = [
    Complex64::new(-0.0223073, 3.93489),
    Complex64::new(0.790951, 2.38093),
    Complex64::new(-0.42207, 0.752766),
];

impl Preset {
    pub fn word(self) -> Word {
        match self {
            Preset::Hyperbolic | Preset::ExampleLr => Word::lr(),
            Preset::ExampleLlr => "LLR".parse().expect("static word"),
        }
    }

    /// `b0` and square-root sign for the `LR` presets.
    pub fn b0_and_sign(self) -> Option<(Complex64, Sign)> {
        match self {
            Preset::Hyperbolic => Some((Complex64::from_polar(1.0, 2.0 * PI / 3.0), Sign::Plus)),
            Preset::ExampleLr => Some((EXAMPLE_LR_LOGS[1].exp(), Sign::Plus)),
            Preset::ExampleLlr => None,
        }
    }

    /// The periodic sweep and its lift.
    pub fn build(self) -> Result<(Vec<WeightTriple>, WordLift)> {
        match self {
            Preset::Hyperbolic => {
                let (b0, sign) = self.b0_and_sign().expect("LR preset");
                let sys = solve_periodic(b0, sign)?;
                let theta = default_theta(&sys.triples[0]);
                let lift = lift_word(&Word::lr(), &sys.triples, theta, [0, 0, 0])?;
                Ok((sys.triples.to_vec(), lift))
            }
            Preset::ExampleLr => {
                let (b0, sign) = self.b0_and_sign().expect("LR preset");
                let sys = solve_periodic(b0, sign)?;
                let t0 = sys.triples[0];
                let branches = branches_near(&t0, EXAMPLE_LR_LOGS);
                let lift = lift_word(&Word::lr(), &sys.triples, default_theta(&t0), branches)?;
                Ok((sys.triples.to_vec(), lift))
            }
            Preset::ExampleLlr => {
                let [a, b, c] = EXAMPLE_LLR_LOGS;
                let word = self.word();
                let ts = solve_periodic_word(&word, b.exp(), a.exp(), c.exp())?;
                let branches = branches_near(&ts[0], EXAMPLE_LLR_LOGS);
                let lift = lift_word(&word, &ts, default_theta(&ts[0]), branches)?;
                Ok((ts, lift))
            }
        }
    }

    /// Convenience for the `LR` presets.
    pub fn lr_lift(self) -> Result<(PeriodicWeightSystem, LogLift)> {
        let (b0, sign) = self
            .b0_and_sign()
            .ok_or_else(|| Error::InvalidParameter("preset is not an LR system".into()))?;
        let sys = solve_periodic(b0, sign)?;
        let (_, lift) = self.build()?;
        Ok((sys, LogLift::try_from(lift)?))
    }
}

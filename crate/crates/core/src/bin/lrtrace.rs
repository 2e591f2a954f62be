use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use lrtrace::asymptotics::Mutation;
use lrtrace::cli::{
    cmd_cloud, cmd_converge, cmd_trace, cmd_verify, cmd_weights, exit_code, parse_complex,
    parse_triple, CloudRequest, Command, Format, NRange, RunConfig, WeightSource,
};
use lrtrace::edge_weights::{Sign, Word};
use lrtrace::io::{fmt_f64, to_json, write_cloud_csv, write_rows_csv};
use lrtrace::skein_trace::DEFAULT_N_CAP;

#[derive(Parser)]
#[command(name = "lrtrace", version, about = "Quantum trace of LR-periodic edge weights")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Preset name (hyperbolic, example-lr, example-llr) or b0 as `re,im`
    #[arg(long, default_value = "hyperbolic", allow_hyphen_values = true)]
    b0: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
    /// Base branches `kA,kB,kC` for the logarithms
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    branches: String,
    /// Override the square root theta as `re,im`
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Weights or lift JSON produced by `lrtrace weights`
    #[arg(long, conflicts_with = "b0")]
    lift: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OutArgs {
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve and lift the periodic edge weights
    Weights {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// |Trace| over a range of odd levels
    Trace {
        #[command(flatten)]
        weights: WeightArgs,
        /// `start:end:stride` or a single level
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Deviation from the growth rate, split by n mod 4
    Converge {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        n: String,
        #[arg(long)]
        class: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Individual summands of a state sum
    Cloud {
        #[command(flatten)]
        weights: WeightArgs,
        /// sigma, lr or word
        #[arg(long, default_value = "sigma")]
        source: String,
        #[arg(long)]
        n: u64,
        /// U for the sigma cloud, `re,im`
        #[arg(long, default_value = "0.4,0.3", allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
        k_hat: i64,
        #[arg(long)]
        word: Option<String>,
        /// Newton seeds `b0;a0;c0` for a word without a preset
        #[arg(long, allow_hyphen_values = true)]
        seeds: Option<String>,
        /// Prefix a `#` comment header for plotting tools
        #[arg(long)]
        gnuplot: bool,
        #[arg(long, default_value_t = DEFAULT_N_CAP)]
        n_cap: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the acceptance criteria
    Verify {
        /// Criterion id, name or tag
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value = "none")]
        mutation: String,
        #[arg(long)]
        figure_dir: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn config(command: Command, w: &WeightArgs) -> Result<RunConfig> {
    let sign: Sign = w.sign.parse()?;
    let weights = match &w.lift {
        Some(p) => WeightSource::File(p.clone()),
        None => WeightSource::parse(&w.b0, sign)?,
    };
    Ok(RunConfig {
        command,
        weights,
        theta_branch: parse_triple(&w.branches)?,
        theta: w.theta.as_deref().map(parse_complex).transpose()?,
        ..RunConfig::default()
    })
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Weights { weights, output } => {
            let doc = cmd_weights(&config(Command::Weights, &weights)?)?;
            let mut w = sink(&output)?;
            writeln!(w, "{}", to_json(&doc)?)?;
        }
        Cmd::Trace { weights, n, n_cap, out } => {
            let mut cfg = config(Command::Trace, &weights)?;
            cfg.levels = n.parse::<NRange>()?.levels(None)?;
            cfg.n_cap = n_cap;
            let rows = cmd_trace(&cfg)?;
            let mut w = sink(&out.output)?;
            match out.format.parse::<Format>()? {
                Format::Json => writeln!(w, "{}", to_json(&rows)?)?,
                Format::Csv => write_rows_csv(
                    &["n", "n_mod_4", "modulus", "log_modulus_over_n", "predicted", "ratio"],
                    &rows.iter().map(|r| {
                        vec![
                            r.n.to_string(),
                            r.congruence.to_string(),
                            r.modulus.map_or_else(String::new, fmt_f64),
                            fmt_f64(r.log_modulus_over_n),
                            r.predicted.map_or_else(String::new, fmt_f64),
                            fmt_f64(r.ratio),
                        ]
                    }).collect::<Vec<_>>(),
                    &mut w,
                )?,
            }
        }
        Cmd::Converge { weights, n, class, n_cap, out } => {
            let mut cfg = config(Command::Converge, &weights)?;
            cfg.levels = n.parse::<NRange>()?.levels(class)?;
            cfg.n_cap = n_cap;
            let table = cmd_converge(&cfg)?;
            let mut w = sink(&out.output)?;
            match out.format.parse::<Format>()? {
                Format::Json => writeln!(w, "{}", to_json(&table)?)?,
                Format::Csv => {
                    for c in &table.classes {
                        writeln!(
                            w,
                            "# class {}: K estimate {}, predicted {}",
                            c.congruence,
                            fmt_f64(c.k_estimate),
                            fmt_f64(c.k_predicted)
                        )?;
                    }
                    write_rows_csv(
                        &["n", "n_mod_4", "log_modulus_over_n", "deviation", "k_estimate"],
                        &table.rows.iter().map(|r| {
                            vec![
                                r.n.to_string(),
                                r.congruence.to_string(),
                                fmt_f64(r.log_modulus_over_n),
                                fmt_f64(r.deviation),
                                fmt_f64(r.k_estimate),
                            ]
                        }).collect::<Vec<_>>(),
                        &mut w,
                    )?
                }
            }
        }
        Cmd::Cloud { weights, source, n, u, v, k_hat, word, seeds, gnuplot, n_cap, out } => {
            let mut cfg = config(Command::Cloud, &weights)?;
            cfg.levels = vec![n];
            cfg.n_cap = n_cap;
            let request = match source.as_str() {
                "sigma" => CloudRequest::Sigma {
                    big_u: parse_complex(&u)?,
                    big_v: v.as_deref().map(parse_complex).transpose()?,
                    k_hat,
                },
                "lr" => CloudRequest::Lr,
                "word" => {
                    let word: Word = match (&word, &cfg.weights) {
                        (Some(s), _) => s.parse()?,
                        (None, WeightSource::Preset(p)) => p.word(),
                        (None, _) => anyhow::bail!("--word is required"),
                    };
                    let seeds = match seeds {
                        Some(s) => {
                            let p: Vec<_> = s.split(';').map(parse_complex).collect::<Result<_, _>>()?;
                            anyhow::ensure!(p.len() == 3, "--seeds expects `b0;a0;c0`");
                            Some((p[0], p[1], p[2]))
                        }
                        None => None,
                    };
                    CloudRequest::Word { word, seeds }
                }
                other => anyhow::bail!("unknown cloud source {other:?}"),
            };
            let cloud = cmd_cloud(&cfg, &request)?;
            let mut w = sink(&out.output)?;
            match out.format.parse::<Format>()? {
                Format::Json => writeln!(w, "{}", to_json(&cloud)?)?,
                Format::Csv => write_cloud_csv(&cloud, &mut w, gnuplot)?,
            }
        }
        Cmd::Verify { only, mutation, figure_dir, json } => {
            let mutation: Mutation = mutation.parse()?;
            let report = cmd_verify(only, mutation, figure_dir);
            if json {
                println!("{}", to_json(&report)?);
            } else {
                for c in &report.criteria {
                    println!(
                        "[{}] {:>2} {:<22} {:>10.1} ms  {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.id,
                        c.name,
                        c.elapsed_ms,
                        c.detail
                    );
                }
            }
            if report.criteria.is_empty() {
                anyhow::bail!("no criterion matches the filter");
            }
            if !report.all_passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err)
            if err
                .downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<lrtrace::Error>()
                .map_or(2, exit_code);
            ExitCode::from(code as u8)
        }
    }
}

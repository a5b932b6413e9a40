//! `paulicap`: capacity, analytic conditions, sweeps and self-checks for
//! correlated Pauli channels.

#![allow(clippy::needless_range_loop)]

mod grid;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pauli_memory::conditions::{solvable_threshold, sufficient_condition, symmetric_threshold};
use pauli_memory::optimizer::{analyze, Analysis};
use pauli_memory::perturbation::perturbation_conditions;
use pauli_memory::{par, verify, ChannelParams, Error, OptimizerConfig};

use grid::{expand, parse_axis, GridError};
use output::{sig12, to_csv, to_json_lines, SweepRow};

const FAMILY_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "paulicap", version, about = "Two-use capacity of correlated Pauli channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal output entropy and capacity of one channel.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long)]
        json: bool,
    },
    /// Analytic thresholds on mu and whether the channel meets them.
    Condition {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        json: bool,
    },
    /// Capacity over a parameter grid.
    Sweep(SweepArgs),
    /// Run the built-in property suites.
    Verify {
        /// Reduced trial counts.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long, allow_negative_numbers = true)]
    q0: f64,
    #[arg(long, allow_negative_numbers = true)]
    q1: f64,
    #[arg(long, allow_negative_numbers = true)]
    q2: f64,
    #[arg(long, allow_negative_numbers = true)]
    q3: f64,
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
}

impl ChannelArgs {
    fn build(&self) -> Result<ChannelParams, Error> {
        ChannelParams::new([self.q0, self.q1, self.q2, self.q3], self.mu)
    }
}

#[derive(Args)]
struct OptArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random restarts in addition to the structured starting points.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// q = (q0, q1, q2, q3) taken from the grid.
    General,
    /// q = (x, x, 1/2 - x, 1/2 - x).
    Solvable,
    /// q = (x, (1 - x)/3, (1 - x)/3, (1 - x)/3).
    Symmetric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "general")]
    family: Family,
    /// `name=value` or `name=start:stop:step` for q0..q3, x or mu; repeatable.
    #[arg(long = "grid", required = true)]
    grid: Vec<String>,
    /// Rescale q to unit sum at each point.
    #[arg(long)]
    normalize: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[command(flatten)]
    opt: OptArgs,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Capacity { channel, opt, json } => capacity(&channel.build()?, &opt.config(), json),
        Command::Condition { channel, json } => condition(&channel.build()?, json),
        Command::Sweep(args) => sweep(&args),
        Command::Verify { quick, seed, json } => run_verify(quick, seed, json),
    }
}

#[derive(Serialize)]
struct CapacityReport {
    q: [f64; 4],
    mu: f64,
    capacity_bits: f64,
    min_entropy_bits: f64,
    extremal_class: String,
    /// Bell-basis amplitudes `[re, im]` in the order Φ+, Ψ+, Ψ−, Φ−.
    argmin: [[f64; 2]; 4],
    converged: bool,
    enhanced: bool,
    bell_entropy_bits: f64,
    best_non_bell_entropy_bits: f64,
}

impl CapacityReport {
    fn from_analysis(a: &Analysis) -> Self {
        let c = &a.capacity;
        Self {
            q: a.channel.q(),
            mu: a.channel.mu(),
            capacity_bits: c.capacity_bits,
            min_entropy_bits: c.min_entropy_bits,
            extremal_class: c.extremal_class.as_str().into(),
            argmin: c.argmin.amplitudes().map(|z| [z.re, z.im]),
            converged: c.converged,
            enhanced: a.enhancement.enhanced,
            bell_entropy_bits: a.enhancement.bell_entropy,
            best_non_bell_entropy_bits: a.enhancement.non_bell_entropy,
        }
    }
}

fn capacity(ch: &ChannelParams, cfg: &OptimizerConfig, json: bool) -> Result<(), Failure> {
    let r = CapacityReport::from_analysis(&analyze(ch, cfg)?);
    if json {
        println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
        return Ok(());
    }
    println!("capacity_bits     {:.12}", r.capacity_bits);
    println!("min_entropy_bits  {:.12}", r.min_entropy_bits);
    println!("extremal_class    {}", r.extremal_class);
    let amps: Vec<String> = r.argmin.iter().map(|[re, im]| format!("{re:+.9}{im:+.9}i")).collect();
    println!("argmin (Φ+,Ψ+,Ψ−,Φ−)  [{}]", amps.join(", "));
    println!("converged         {}", r.converged);
    println!("enhanced          {}", r.enhanced);
    Ok(())
}

#[derive(Serialize)]
struct ThresholdLine {
    name: String,
    threshold_mu: Option<f64>,
    satisfied: Option<bool>,
    note: Option<String>,
}

#[derive(Serialize)]
struct ConditionOutput {
    q: [f64; 4],
    mu: f64,
    families: Vec<String>,
    regularization: String,
    conditions: Vec<ThresholdLine>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FAMILY_TOL
}

fn condition(ch: &ChannelParams, json: bool) -> Result<(), Failure> {
    let q = ch.q();
    let mu = ch.mu();
    let mut families = Vec::new();
    let mut lines = Vec::new();

    let suff = sufficient_condition(ch);
    lines.push(ThresholdLine {
        name: "general sufficient (2q0q1 - q2^2 - q3^2)".into(),
        threshold_mu: Some(suff.report.threshold_mu),
        satisfied: Some(suff.satisfied),
        note: suff
            .degenerate
            .then(|| "0/0 ratio for the noiseless channel; reported as 0".into()),
    });
    lines.push(ThresholdLine {
        name: "coefficient form A0 - A1 > A4 + A5".into(),
        threshold_mu: None,
        satisfied: Some(suff.a_form_satisfied),
        note: Some(format!("gap {} coupling {}", sig12(suff.gap), sig12(suff.coupling))),
    });
    if close(q[0], q[1]) && close(q[2], q[3]) {
        families.push(format!("solvable x={}", sig12(q[0])));
        let r = solvable_threshold(q[0])?;
        lines.push(ThresholdLine {
            name: "solvable |4x - 1|".into(),
            threshold_mu: Some(r.threshold_mu),
            satisfied: Some(r.satisfied_at(mu)),
            note: None,
        });
    }
    if close(q[1], q[2]) && close(q[2], q[3]) {
        families.push(format!("symmetric x={}", sig12(q[0])));
        let r = symmetric_threshold(q[0])?;
        lines.push(ThresholdLine {
            name: "symmetric (|4x-1|/3)/(1+|4x-1|/3)".into(),
            threshold_mu: Some(r.threshold_mu),
            satisfied: Some(r.satisfied_at(mu)),
            note: None,
        });
    }
    let pc = perturbation_conditions(ch);
    lines.push(ThresholdLine {
        name: "local Bell 1 - 1/(2(q0+q1))".into(),
        threshold_mu: Some(pc.bell_local_threshold),
        satisfied: Some(pc.bell_local),
        note: None,
    });
    if pc.majorization_verifiable {
        lines.push(ThresholdLine {
            name: "local degenerate pair 4(A0-A2)(A1-A2) > (A4+A5)^2".into(),
            threshold_mu: None,
            satisfied: pc.degenerate_local,
            note: None,
        });
        lines.push(ThresholdLine {
            name: "local product A4 + A5 > A0 - A1".into(),
            threshold_mu: None,
            satisfied: pc.product_local,
            note: None,
        });
    } else {
        lines.push(ThresholdLine {
            name: "product extremality".into(),
            threshold_mu: None,
            satisfied: None,
            note: Some("A2 != A3: not verifiable by majorization".into()),
        });
    }
    let out = ConditionOutput {
        q,
        mu,
        families,
        regularization: ch.regularize().1.describe(),
        conditions: lines,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(());
    }
    println!(
        "q = ({}, {}, {}, {})  mu = {}",
        sig12(q[0]),
        sig12(q[1]),
        sig12(q[2]),
        sig12(q[3]),
        sig12(mu)
    );
    println!(
        "family: {}",
        if out.families.is_empty() {
            "general".to_string()
        } else {
            out.families.join(", ")
        }
    );
    println!("regularization: {}", out.regularization);
    for l in &out.conditions {
        let thr = l.threshold_mu.map(|t| format!("mu > {}", sig12(t))).unwrap_or_default();
        let sat = match l.satisfied {
            Some(true) => "satisfied",
            Some(false) => "not satisfied",
            None => "n/a",
        };
        let note = l.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default();
        println!("{:<44} {:<22} {}{}", l.name, thr, sat, note);
    }
    Ok(())
}

fn point_channel(family: Family, point: &[(&'static str, f64)], normalize: bool) -> Result<ChannelParams, Failure> {
    let get = |name: &str| point.iter().find(|(n, _)| *n == name).map(|p| p.1);
    let need = |name: &str| get(name).ok_or_else(|| Failure::Usage(format!("InvalidGrid: missing parameter '{name}'")));
    let mu = need("mu")?;
    let ch = match family {
        Family::General => {
            let mut q = [need("q0")?, need("q1")?, need("q2")?, need("q3")?];
            if normalize {
                let s: f64 = q.iter().sum();
                if s > 0.0 {
                    q = q.map(|v| v / s);
                }
            }
            ChannelParams::new(q, mu)?
        }
        Family::Solvable => ChannelParams::solvable(need("x")?, mu)?,
        Family::Symmetric => ChannelParams::symmetric(need("x")?, mu)?,
    };
    let allowed: &[&str] = match family {
        Family::General => &["q0", "q1", "q2", "q3", "mu"],
        _ => &["x", "mu"],
    };
    if let Some((n, _)) = point.iter().find(|(n, _)| !allowed.contains(n)) {
        return Err(Failure::Usage(format!(
            "InvalidGrid: '{n}' does not apply to this family"
        )));
    }
    Ok(ch)
}

fn sweep_row(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<SweepRow, Error> {
    let a = analyze(ch, cfg)?;
    let s = sufficient_condition(ch);
    let q = ch.q();
    Ok(SweepRow {
        q0: q[0],
        q1: q[1],
        q2: q[2],
        q3: q[3],
        mu: ch.mu(),
        capacity_bits: a.capacity.capacity_bits,
        min_entropy_bits: a.capacity.min_entropy_bits,
        extremal_class: a.capacity.extremal_class.as_str().into(),
        sufficient_threshold: s.report.threshold_mu,
        sufficient_met: s.satisfied,
        enhanced_numeric: a.enhancement.enhanced,
    })
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let axes = args.grid.iter().map(|g| parse_axis(g)).collect::<Result<Vec<_>, _>>()?;
    let points = expand(&axes)?;
    let channels = points
        .iter()
        .map(|p| point_channel(args.family, p, args.normalize))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = args.opt.config();
    cfg.validate()?;

    let rows = par::with_threads(args.parallel, || par::map(channels, |ch| sweep_row(&ch, &cfg)));
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let text = match args.format {
        Format::Csv => to_csv(&rows).map_err(|e| Failure::Usage(format!("IoError: {e}")))?,
        Format::Json => to_json_lines(&rows).map_err(|e| Failure::Usage(format!("IoError: {e}")))?,
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = fs::remove_file(path);
                return Err(Failure::Usage(format!("IoError: {}: {e}", path.display())));
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run_verify(quick: bool, seed: u64, json: bool) -> Result<(), Failure> {
    let results = verify::run_all(quick, seed);
    if json {
        println!("{}", serde_json::to_string_pretty(&results).expect("serializable"));
    } else {
        for r in &results {
            println!(
                "{} {:<24} checks {:>6}  failures {:>4}  worst {:.3e}{}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.checks,
                r.failures,
                r.worst,
                r.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default()
            );
        }
    }
    match results.iter().find(|r| !r.passed) {
        Some(r) => Err(Failure::Verification(r.name.to_string())),
        None => Ok(()),
    }
}

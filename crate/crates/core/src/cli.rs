//! The `towertree` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{emit_solenoid, emit_tower, parse_tower, FormatError, TowerInput};
use crate::generators::{
    gen_biholder, gen_example_nonretract, gen_random_tower, gen_solenoid, BiHolderTable, GenError,
    NonRetract, DEFAULT_C_GRID, DEFAULT_L_GRID,
};
use crate::progroup::limit_threads;
use crate::report::{
    analyze, export_dot, render_roundtrip, render_text, run_roundtrip, AnalysisReport, CrossCheck,
    RoundtripConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "towertree",
    version,
    about = "Towers of finite sets as rooted trees"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,
    /// Check levels 1..=N only.
    #[arg(long, global = true)]
    pub depth_horizon: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ML verdict, core, end space and retraction of a tower file.
    Analyze {
        file: Option<PathBuf>,
        /// Analyze a solenoid instead of a file.
        #[arg(long, conflicts_with = "file")]
        solenoid: bool,
        #[command(flatten)]
        params: SolenoidParams,
    },
    /// Graphviz source for the tree of a tower file.
    ExportDot { file: PathBuf },
    /// Run the functor-law corpus.
    Roundtrip {
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        /// Use identity morphisms only.
        #[arg(long)]
        identities: bool,
        #[arg(long, hide = true)]
        mutant: bool,
    },
    /// Generate example data.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Args)]
pub struct SolenoidParams {
    /// Bond factors; the last one repeats.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub primes: Vec<i64>,
    #[arg(long, default_value_t = 1024)]
    pub window: i64,
    #[arg(long, default_value_t = 11)]
    pub depth: usize,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// The windowed integers with bonds z -> p z.
    Solenoid(SolenoidParams),
    /// Levels separating consecutive shape morphisms, and Hölder violations.
    Biholder {
        #[arg(long, default_value_t = 64)]
        k_max: u32,
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<f64>>,
    },
    /// Distances showing the core of a tree need not be a retract.
    Nonretract {
        #[arg(long, default_value_t = 10)]
        count: u32,
    },
    /// A seeded random tower file.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 0.5)]
        bias: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("missing input file")]
    MissingInput,
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Format(_) | CliError::MissingInput => 2,
            CliError::Gen(GenError::InvalidParameter(_)) => 2,
            CliError::Gen(_) | CliError::Internal(_) => 3,
        }
    }
}

/// What a command printed and how it ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { code: 0, stdout }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolenoidSummary {
    pub primes: Vec<i64>,
    pub window: i64,
    pub depth: usize,
    pub threads: usize,
    /// Element ids along the core, level by level.
    pub core_levels: Vec<Vec<String>>,
    pub report: AnalysisReport,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn machine<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn report_output(
    r: &AnalysisReport,
    format: OutputFormat,
    mut text: String,
) -> Result<Output, CliError> {
    let code = if r.cross_check == CrossCheck::Inconsistent {
        1
    } else {
        0
    };
    let stdout = match format {
        OutputFormat::Machine => machine(r)?,
        OutputFormat::Text => {
            text.push_str(&render_text(r));
            text
        }
    };
    Ok(Output { code, stdout })
}

fn solenoid(p: &SolenoidParams, cli: &Cli) -> Result<Output, CliError> {
    let s = gen_solenoid(&p.primes, p.window, p.depth)?;
    let report = analyze(
        &TowerInput::Solenoid(s.generator.clone()),
        cli.depth_horizon,
    );
    let core = s.tower.surjective_core();
    let summary = SolenoidSummary {
        primes: p.primes.clone(),
        window: p.window,
        depth: p.depth,
        threads: limit_threads(&s.group).len(),
        core_levels: core.levels().iter().map(|l| l.ids().to_vec()).collect(),
        report,
    };
    if cli.format == OutputFormat::Machine {
        let code = if summary.report.cross_check == CrossCheck::Inconsistent {
            1
        } else {
            0
        };
        return Ok(Output {
            code,
            stdout: machine(&summary)?,
        });
    }
    let mut text = emit_solenoid(&s.generator, p.depth);
    text.push('\n');
    text.push_str(&format!("threads: {}\n", summary.threads));
    let core: Vec<String> = summary.core_levels.iter().map(|l| l.join(",")).collect();
    text.push_str(&format!("core levels: {}\n", core.join(" | ")));
    report_output(&summary.report, OutputFormat::Text, text)
}

fn biholder_text(t: &BiHolderTable) -> String {
    let mut out = String::from("k  d            level   e^-level        certified\n");
    for r in &t.rows {
        out.push_str(&format!(
            "{:<2} {:<12} {:<5} {:<13.6e} {}\n",
            r.k, r.d, r.separation_level, r.level_distance, r.certified
        ));
    }
    for s in &t.searches {
        let found = match s.first_violation {
            Some(k) => format!("violated at k = {k}"),
            None => format!("not found up to k = {}", t.k_max),
        };
        out.push_str(&format!("C = {}, l = {}: {found}\n", s.c, s.l));
    }
    out
}

fn nonretract_text(r: &NonRetract) -> String {
    let mut out = String::from("i  branch point  distance to x\n");
    for (i, radius, dist) in &r.branch_points {
        out.push_str(&format!("{i:<2} {radius:<13} {dist}\n"));
    }
    out.push_str(&format!(
        "infimum: {} (attained: {})\n",
        r.infimum, r.attained
    ));
    out.push_str(&format!("x in core: {}\n", r.x_in_core));
    out
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Analyze {
            solenoid: true,
            params,
            ..
        } => solenoid(params, cli),
        Command::Analyze { file, .. } => {
            let path = file.as_ref().ok_or(CliError::MissingInput)?;
            let input = parse_tower(&read(path)?)?;
            let r = analyze(&input, cli.depth_horizon);
            report_output(&r, cli.format, String::new())
        }
        Command::ExportDot { file } => {
            let input = parse_tower(&read(file)?)?;
            Ok(Output::ok(export_dot(&input.materialize())))
        }
        Command::Roundtrip {
            seeds,
            identities,
            mutant,
        } => {
            let cfg = RoundtripConfig {
                seeds: *seeds,
                identities_only: *identities,
                mutant: *mutant,
            };
            let s = run_roundtrip(&cfg);
            let stdout = match cli.format {
                OutputFormat::Machine => machine(&s)?,
                OutputFormat::Text => render_roundtrip(&s),
            };
            Ok(Output {
                code: if s.all_passed() { 0 } else { 1 },
                stdout,
            })
        }
        Command::Gen(GenCommand::Solenoid(p)) => solenoid(p, cli),
        Command::Gen(GenCommand::Biholder { k_max, c, l }) => {
            let c = c.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
            let l = l.clone().unwrap_or_else(|| DEFAULT_L_GRID.to_vec());
            let t = gen_biholder(*k_max, &c, &l)?;
            Ok(Output::ok(match cli.format {
                OutputFormat::Machine => machine(&t)?,
                OutputFormat::Text => biholder_text(&t),
            }))
        }
        Command::Gen(GenCommand::Nonretract { count }) => {
            let r = gen_example_nonretract(*count)?;
            Ok(Output::ok(match cli.format {
                OutputFormat::Machine => machine(&r)?,
                OutputFormat::Text => nonretract_text(&r),
            }))
        }
        Command::Gen(GenCommand::Random {
            seed,
            depth,
            size,
            bias,
        }) => {
            let t = gen_random_tower(*seed, *depth, *size, *bias)?;
            Ok(Output::ok(emit_tower(&t) + "\n"))
        }
    }
}

/// Parses arguments, runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

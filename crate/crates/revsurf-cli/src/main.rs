//! Command-line harness: catenoid and Willmore tables, verification
//! sweeps, and the critical ring-separation ratio.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use revsurf::experiments::{
    self, OutputFormat, RunConfig, TableKind, TableRow,
};
use revsurf::willmore::{GaussVariant, ModelParams};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KVariantArg {
    /// Meridian-reduced curvature coefficient (as-published reduction).
    Paper,
    /// Principal-curvature product (geometric Gauss curvature).
    Principal,
}

impl From<KVariantArg> for GaussVariant {
    fn from(v: KVariantArg) -> Self {
        match v {
            KVariantArg::Paper => GaussVariant::MeridianReduced,
            KVariantArg::Principal => GaussVariant::PrincipalProduct,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Dat,
}

impl From<FormatArg> for OutputFormat {
    fn from(v: FormatArg) -> Self {
        match v {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Dat => OutputFormat::Dat,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "revsurf", version, about = "Catenoid and Willmore-type surfaces of revolution")]
struct Cli {
    /// Grid resolution for solver-backed subcommands.
    #[arg(long, global = true, default_value_t = 1001)]
    grid_n: usize,

    /// Hölder exponent used by norm-based checks.
    #[arg(long, global = true, default_value_t = 0.5)]
    holder_alpha: f64,

    /// Gauss-curvature variant entering the fourth-order system.
    #[arg(long, global = true, value_enum, default_value_t = KVariantArg::Paper)]
    k_variant: KVariantArg,

    /// Table output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Catenoid area table over increasing ring separation.
    CatenoidTable {
        #[arg(long, default_value_t = experiments::REFERENCE_RADIUS)]
        radius: f64,
        /// Separation increment per row.
        #[arg(long, default_value_t = 0.1)]
        dh: f64,
        /// Number of rows.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Area and Willmore energy along the solution branch.
    WillmoreTable {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Separations as START:STEP:END (inclusive).
        #[arg(long)]
        heights: String,
        /// Weight of the area term.
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Weight of the squared-mean-curvature term.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Weight of the Gauss-curvature term.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Seeded verification sweeps; exit code 1 on any failure.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
    /// Critical ring-separation ratio with its reference bracket.
    CriticalRatio,
}

fn parse_heights(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("heights must be START:STEP:END, got `{spec}`"));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| format!("invalid number `{s}` in heights"))
    };
    let start = parse(parts[0])?;
    let step = parse(parts[1])?;
    let end = parse(parts[2])?;
    if step <= 0.0 || end < start {
        return Err("heights require STEP > 0 and END >= START".to_string());
    }
    let mut hs = Vec::new();
    let mut k = 0usize;
    loop {
        let h = start + step * k as f64;
        if h > end + 1e-9 * step {
            break;
        }
        hs.push(h);
        k += 1;
    }
    Ok(hs)
}

fn emit(content: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run(cli: Cli) -> ExitCode {
    let config = RunConfig {
        grid_n: cli.grid_n,
        alpha_holder: cli.holder_alpha,
        k_variant: cli.k_variant.into(),
        ..RunConfig::default()
    };
    if let Err(msg) = config.validate() {
        return usage_error(&msg);
    }
    let format: OutputFormat = cli.format.into();

    match cli.command {
        Command::CatenoidTable {
            radius,
            dh,
            steps,
            out,
        } => {
            if radius <= 0.0 || dh <= 0.0 || steps == 0 {
                return usage_error("catenoid-table requires radius > 0, dh > 0, steps >= 1");
            }
            let rows = experiments::catenoid_table(radius, dh, steps, &config);
            let rendered = experiments::render_table(&rows, TableKind::Catenoid, format);
            if emit(&rendered, &out.out).is_err() {
                return usage_error("cannot write output file");
            }
            ExitCode::SUCCESS
        }
        Command::WillmoreTable {
            radius,
            heights,
            alpha,
            beta,
            gamma,
            out,
        } => {
            if beta == 0.0 {
                return usage_error("willmore-table requires beta != 0");
            }
            if radius <= 0.0 {
                return usage_error("willmore-table requires radius > 0");
            }
            let hs = match parse_heights(&heights) {
                Ok(hs) => hs,
                Err(msg) => return usage_error(&msg),
            };
            let params = ModelParams { alpha, beta, gamma };
            let rows: Vec<TableRow> = experiments::willmore_table(radius, &hs, &params, &config);
            let rendered = experiments::render_table(&rows, TableKind::Willmore, format);
            if emit(&rendered, &out.out).is_err() {
                return usage_error("cannot write output file");
            }
            ExitCode::SUCCESS
        }
        Command::Verify { seed, cases } => {
            if cases == 0 {
                return usage_error("verify requires cases >= 1");
            }
            let config = RunConfig { seed, ..config };
            let report = experiments::verify_suite(config.seed, cases, &config);
            println!(
                "checks run: {}, failures: {}, skipped: {}",
                report.checks,
                report.failures.len(),
                report.skipped.len()
            );
            for s in &report.skipped {
                println!("SKIP {}: {}", s.case, s.detail);
            }
            if report.min_slack.is_finite() {
                println!("minimum observed slack: {:.6e}", report.min_slack);
            }
            if report.passed() {
                println!("verification passed");
                ExitCode::SUCCESS
            } else {
                for f in &report.failures {
                    eprintln!("FAIL {}: {}", f.case, f.detail);
                }
                ExitCode::from(1)
            }
        }
        Command::CriticalRatio => {
            let report = experiments::critical_ratio_report();
            println!("critical h/r ratio: {:.6}", report.value);
            println!(
                "reference table bracket: last spanned {}, first empty {}",
                experiments::format_sig6(report.last_spanned),
                experiments::format_sig6(report.first_empty)
            );
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}

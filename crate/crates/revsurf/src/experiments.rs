//! Table generators and verification sweeps behind the CLI: the catenoid
//! area table, the Willmore-branch table, the seeded estimate/maximum-
//! principle suites, and deterministic CSV/DAT rendering.
//!
//! Everything here is plain `f64`: this is the harness layer, not the
//! generic core. Rows are computed by a deterministic parallel map
//! (ordered by input index) and all randomness is ChaCha-seeded per case,
//! so repeated runs are byte-identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bvp::{self, SturmLiouvilleProblem};
use crate::catenary::{self, RingBoundary};
use crate::error::Result;
use crate::grid::{self, Grid, SampledFunction};
use crate::schauder;
use crate::stability;
use crate::willmore::{self, GaussVariant, ModelParams, WillmoreBvpConfig};

/// Ring radius used by the reference catenoid table.
pub const REFERENCE_RADIUS: f64 = 1.508_879_5;

/// Outcome of one table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// No connected minimal surface: the two-disc configuration wins and
    /// its area `2πr²` is reported.
    Goldschmidt,
    NoConvergence,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Goldschmidt => "goldschmidt",
            RowStatus::NoConvergence => "no_convergence",
        }
    }
}

/// One row of a generated table.
#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    /// `h/r` for the catenoid table, `h` for the Willmore table.
    pub key: f64,
    pub area: f64,
    pub energy: Option<f64>,
    pub status: RowStatus,
}

/// Harness-level configuration shared by the subcommands.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub grid_n: usize,
    pub residual_tol: f64,
    pub fixedpoint_tol: f64,
    pub alpha_holder: f64,
    pub k_variant: GaussVariant,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_n: 1001,
            residual_tol: 1e-6,
            fixedpoint_tol: 1e-10,
            alpha_holder: 0.5,
            k_variant: GaussVariant::MeridianReduced,
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.grid_n < 101 {
            return Err(format!("grid-n must be at least 101, got {}", self.grid_n));
        }
        if self.residual_tol <= 0.0 || self.fixedpoint_tol <= 0.0 {
            return Err("tolerances must be positive".to_string());
        }
        if !(self.alpha_holder > 0.0 && self.alpha_holder < 1.0) {
            return Err(format!(
                "holder-alpha must lie in (0,1), got {}",
                self.alpha_holder
            ));
        }
        Ok(())
    }
}

/// Catenoid area against ring separation: rows `h = dh, 2dh, …`, each
/// fitted in closed form; separations past the critical ratio report the
/// two-disc (Goldschmidt) area `2πr²`.
pub fn catenoid_table(r: f64, dh: f64, steps: usize, _config: &RunConfig) -> Vec<TableRow> {
    (1..=steps)
        .into_par_iter()
        .map(|k| {
            let h = dh * k as f64;
            let key = h / r;
            match catenary::fit(&RingBoundary { r, h }) {
                Ok(branches) => TableRow {
                    key,
                    area: branches.outer.area_between(-h / 2.0, h / 2.0),
                    energy: None,
                    status: RowStatus::Ok,
                },
                Err(_) => TableRow {
                    key,
                    area: 2.0 * std::f64::consts::PI * r * r,
                    energy: None,
                    status: RowStatus::Goldschmidt,
                },
            }
        })
        .collect()
}

/// Area and Willmore energy along the solution branch for the requested
/// separations; rows the solver cannot reach are marked, not dropped.
pub fn willmore_table(
    r: f64,
    heights: &[f64],
    params: &ModelParams<f64>,
    config: &RunConfig,
) -> Vec<TableRow> {
    let bvp_config = WillmoreBvpConfig {
        grid_n: config.grid_n,
        residual_tol: config.residual_tol,
        k_variant: config.k_variant,
        ..WillmoreBvpConfig::default()
    };
    heights
        .par_iter()
        .map(|&h| {
            let rings = match RingBoundary::new(r, h) {
                Ok(b) => b,
                Err(_) => {
                    return TableRow {
                        key: h,
                        area: f64::NAN,
                        energy: None,
                        status: RowStatus::NoConvergence,
                    }
                }
            };
            match willmore::solve_willmore_bvp(&rings, params, &bvp_config) {
                Ok(surface) => {
                    let area = catenary::area_of_profile(&surface.f).unwrap_or(f64::NAN);
                    let energy = willmore::willmore_energy(&surface.f, &surface.h)
                        .unwrap_or(f64::NAN);
                    TableRow {
                        key: h,
                        area,
                        energy: Some(energy),
                        status: RowStatus::Ok,
                    }
                }
                Err(_) => TableRow {
                    key: h,
                    area: f64::NAN,
                    energy: Some(f64::NAN),
                    status: RowStatus::NoConvergence,
                },
            }
        })
        .collect()
}

/// Critical separation ratio with the adjacent keys of the reference table.
#[derive(Debug, Clone, Copy)]
pub struct CriticalRatioReport {
    pub value: f64,
    /// Largest reference-table ratio below breakdown.
    pub last_spanned: f64,
    /// First reference-table ratio past breakdown.
    pub first_empty: f64,
}

pub fn critical_ratio_report() -> CriticalRatioReport {
    CriticalRatioReport {
        value: catenary::critical_ratio::<f64>(),
        last_spanned: 1.9 / REFERENCE_RADIUS,
        first_empty: 2.0 / REFERENCE_RADIUS,
    }
}

/// A smooth random trigonometric polynomial with analytic derivatives.
#[derive(Debug, Clone)]
struct TrigPoly {
    c0: f64,
    terms: Vec<(f64, f64, f64)>,
}

impl TrigPoly {
    fn random(rng: &mut ChaCha8Rng, amp: f64) -> Self {
        let terms = (1..=2)
            .map(|k| {
                (
                    amp * rng.gen_range(-1.0..1.0),
                    amp * rng.gen_range(-1.0..1.0),
                    k as f64 * rng.gen_range(0.6..1.1),
                )
            })
            .collect();
        TrigPoly {
            c0: rng.gen_range(-amp..amp),
            terms,
        }
    }

    /// Shift so the function stays `>= floor` (uses the amplitude bound).
    fn positive(mut self, floor: f64) -> Self {
        let bound: f64 = self.terms.iter().map(|(a, b, _)| a.abs() + b.abs()).sum();
        self.c0 = floor + bound + self.c0.abs();
        self
    }

    /// Shift so the function stays `<= 0`.
    fn nonpositive(mut self) -> Self {
        let bound: f64 = self.terms.iter().map(|(a, b, _)| a.abs() + b.abs()).sum();
        self.c0 = -(bound + self.c0.abs());
        self
    }

    fn eval(&self, x: f64) -> f64 {
        self.c0
            + self
                .terms
                .iter()
                .map(|(a, b, w)| a * (w * x).sin() + b * (w * x).cos())
                .sum::<f64>()
    }

    fn d1(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, b, w)| a * w * (w * x).cos() - b * w * (w * x).sin())
            .sum()
    }

    fn d2(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, b, w)| -a * w * w * (w * x).sin() - b * w * w * (w * x).cos())
            .sum()
    }

    fn sample(&self, g: Grid<f64>) -> SampledFunction<f64> {
        SampledFunction::from_fn_c2(g, |x| self.eval(x), |x| self.d1(x), |x| self.d2(x))
            .expect("trig polynomial samples are finite")
    }
}

/// Seeded random Sturm–Liouville problem with `q <= 0`.
fn random_problem(seed: u64, nonneg_rhs: bool, zero_bc: bool) -> SturmLiouvilleProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(-1.0..1.0);
    let l = rng.gen_range(0.5..1.2);
    let g = Grid::new(a, a + l, 201).unwrap();
    let p = TrigPoly::random(&mut rng, 0.2).positive(0.7).sample(g.clone());
    let q = TrigPoly::random(&mut rng, 0.6).nonpositive().sample(g.clone());
    let f = if nonneg_rhs {
        TrigPoly::random(&mut rng, 0.7).positive(0.0).sample(g)
    } else {
        TrigPoly::random(&mut rng, 0.9).sample(g)
    };
    let (eta1, eta2) = if zero_bc {
        (0.0, 0.0)
    } else {
        (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    };
    SturmLiouvilleProblem::new(p, q, f, eta1, eta2).unwrap()
}

/// One verification finding.
#[derive(Debug, Clone)]
pub struct Finding {
    pub case: String,
    pub detail: String,
}

/// Aggregate result of the verification suite.
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: usize,
    pub failures: Vec<Finding>,
    pub skipped: Vec<Finding>,
    /// Smallest observed slack across all asserted estimates.
    pub min_slack: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn absorb(&mut self, other: VerifyReport) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self.skipped.extend(other.skipped);
        self.min_slack = self.min_slack.min(other.min_slack);
    }
}

fn estimate_sweep_case(seed: u64, alpha: f64) -> VerifyReport {
    let mut report = VerifyReport {
        min_slack: f64::INFINITY,
        ..VerifyReport::default()
    };
    let problem = random_problem(seed, false, false);
    let label = format!("estimate case {seed}");
    let u = match bvp::solve(&problem) {
        Ok(u) => u,
        Err(e) => {
            report.failures.push(Finding {
                case: label,
                detail: format!("solve failed: {e}"),
            });
            return report;
        }
    };
    let mut run = |reports: Result<Vec<schauder::EstimateReport<f64>>>| match reports {
        Ok(rs) => {
            for r in rs {
                report.checks += 1;
                if r.holds {
                    if r.lhs > 0.0 {
                        report.min_slack = report.min_slack.min(r.slack);
                    }
                } else {
                    report.failures.push(Finding {
                        case: format!("estimate case {seed}"),
                        detail: format!("{}: lhs {} > rhs {}", r.which, r.lhs, r.rhs),
                    });
                }
            }
        }
        Err(e) => report.failures.push(Finding {
            case: format!("estimate case {seed}"),
            detail: format!("verifier error: {e}"),
        }),
    };
    let ledger = match schauder::ledger_for_problem(&problem, alpha) {
        Ok(l) => l,
        Err(e) => {
            report.failures.push(Finding {
                case: label,
                detail: format!("ledger failed: {e}"),
            });
            return report;
        }
    };
    run(schauder::verify_c0_estimate(&problem, &u).map(|r| vec![r]));
    run(schauder::verify_intermediate_estimates(&problem, &u, &ledger));
    run(schauder::verify_global_estimate(&problem, &u, &ledger).map(|r| vec![r]));
    // Poisson chain on the reduced second-derivative data of the solution
    let big_f = grid::fd_derivative(&u, 2).expect("second differences exist");
    run(schauder::verify_poisson_estimates(&u, &big_f, alpha, ledger.mu));
    report
}

fn max_principle_case(seed: u64) -> VerifyReport {
    let mut report = VerifyReport {
        min_slack: f64::INFINITY,
        ..VerifyReport::default()
    };
    let problem = random_problem(seed, true, true);
    report.checks += 1;
    match bvp::solve(&problem) {
        Ok(u) => {
            // rhs >= 0, q <= 0, zero data: no inner positive maximum
            let max_u = u.values().iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            if max_u > 1e-10 {
                report.failures.push(Finding {
                    case: format!("max-principle case {seed}"),
                    detail: format!("solution attains {max_u} > 1e-10"),
                });
            }
        }
        Err(e) => report.failures.push(Finding {
            case: format!("max-principle case {seed}"),
            detail: format!("solve failed: {e}"),
        }),
    }
    report
}

fn interpolation_case(seed: u64, alpha: f64) -> VerifyReport {
    let mut report = VerifyReport {
        min_slack: f64::INFINITY,
        ..VerifyReport::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(-1.0..1.0);
    let l = rng.gen_range(0.5..2.0);
    let g = Grid::new(a, a + l, 201).unwrap();
    // mix a random polynomial into the trigonometric sample
    let tp = TrigPoly::random(&mut rng, 1.0);
    let (c3, c2, c1) = (
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let u = SampledFunction::from_fn_c2(
        g,
        |x| tp.eval(x) + c3 * x * x * x + c2 * x * x + c1 * x,
        |x| tp.d1(x) + 3.0 * c3 * x * x + 2.0 * c2 * x + c1,
        |x| tp.d2(x) + 6.0 * c3 * x + 2.0 * c2,
    )
    .unwrap();
    let factor = 1.0 + l.powf(1.0 - alpha);
    let label = format!("interpolation case {seed}");
    let u_a = grid::holder_norm(&u, 0, alpha).unwrap();
    let u_1a = grid::holder_norm(&u, 1, alpha).unwrap();
    let u_2a = grid::holder_norm(&u, 2, alpha).unwrap();
    report.checks += 2;
    if u_a > factor * u_1a {
        report.failures.push(Finding {
            case: label.clone(),
            detail: format!("first interpolation inequality: {u_a} > {}", factor * u_1a),
        });
    } else {
        report.min_slack = report.min_slack.min(factor * u_1a - u_a);
    }
    if u_a > factor * factor * u_2a {
        report.failures.push(Finding {
            case: label,
            detail: format!(
                "second interpolation inequality: {u_a} > {}",
                factor * factor * u_2a
            ),
        });
    } else {
        report.min_slack = report.min_slack.min(factor * factor * u_2a - u_a);
    }
    report
}

fn contraction_check(config: &RunConfig) -> VerifyReport {
    let mut report = VerifyReport {
        min_slack: f64::INFINITY,
        ..VerifyReport::default()
    };
    report.checks += 1;
    let run = || -> Result<()> {
        let f = stability::cosh_profile(0.4, config.grid_n.min(801))?;
        let cert = stability::stability_function(&f)?;
        let op = stability::operator_l(&f, &cert)?;
        let consts = stability::step_constants(&f, &cert, &op, config.alpha_holder)?;
        let epsilon = 0.5;
        let a_max = stability::admissible_boundary_magnitude(
            consts.c_lip * consts.c_rhs * consts.c_bc,
            epsilon,
        );
        let pconfig = stability::PerturbConfig {
            tol: config.fixedpoint_tol,
            holder_alpha: config.alpha_holder,
            ..stability::PerturbConfig::default()
        };
        let result = stability::perturb(&f, 0.9 * a_max, 0.9 * a_max, epsilon, &pconfig)?;
        if !result.trace.converged {
            return Err(crate::Error::NotContracting {
                ratio: f64::NAN,
                step: result.trace.steps,
            });
        }
        for &ratio in &result.trace.ratios {
            if ratio > epsilon + 0.05 {
                return Err(crate::Error::NotContracting {
                    ratio,
                    step: result.trace.steps,
                });
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        report.failures.push(Finding {
            case: "fixed-point contraction".to_string(),
            detail: e.to_string(),
        });
    }
    report
}

/// The seeded verification suite: estimate sweeps, maximum-principle
/// sweeps, interpolation inequalities, and a contraction check. The
/// deliberate `q > 0` case is recorded as skipped-with-reason.
pub fn verify_suite(seed: u64, cases: usize, config: &RunConfig) -> VerifyReport {
    let alpha = config.alpha_holder;
    let mut report = VerifyReport {
        min_slack: f64::INFINITY,
        ..VerifyReport::default()
    };
    let estimates: Vec<VerifyReport> = (0..cases)
        .into_par_iter()
        .map(|i| estimate_sweep_case(seed.wrapping_add(i as u64), alpha))
        .collect();
    for r in estimates {
        report.absorb(r);
    }
    let mp: Vec<VerifyReport> = (0..cases)
        .into_par_iter()
        .map(|i| max_principle_case(seed.wrapping_add(1000 + i as u64)))
        .collect();
    for r in mp {
        report.absorb(r);
    }
    let interp: Vec<VerifyReport> = (0..cases.max(100))
        .into_par_iter()
        .map(|i| interpolation_case(seed.wrapping_add(2000 + i as u64), alpha))
        .collect();
    for r in interp {
        report.absorb(r);
    }
    report.absorb(contraction_check(config));

    // deliberately inapplicable case: q > 0 must be skipped, not failed
    let g = Grid::new(0.0, 1.0, 201).unwrap();
    let p = SampledFunction::from_fn_c2(g.clone(), |_| 1.0, |_| 0.0, |_| 0.0).unwrap();
    let q = SampledFunction::from_fn_c2(g.clone(), |_| 0.5, |_| 0.0, |_| 0.0).unwrap();
    let f = SampledFunction::from_fn_c2(g.clone(), |_| 1.0, |_| 0.0, |_| 0.0).unwrap();
    let problem = SturmLiouvilleProblem::new(p, q, f, 0.0, 0.0).unwrap();
    let u = SampledFunction::from_fn(g, |_| 0.0).unwrap();
    match schauder::verify_c0_estimate(&problem, &u) {
        Err(crate::Error::MaxPrincipleInapplicable { max_q }) => report.skipped.push(Finding {
            case: "injected q > 0 case".to_string(),
            detail: format!("skipped: maximum principle inapplicable (max q = {max_q})"),
        }),
        other => report.failures.push(Finding {
            case: "injected q > 0 case".to_string(),
            detail: format!("expected MaxPrincipleInapplicable, got {other:?}"),
        }),
    }
    report
}

/// Render a value with six significant digits, '.' decimal separator.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let v = x.abs();
    if (1e-4..1e7).contains(&v) {
        let decimals = (5 - v.log10().floor() as i64).clamp(0, 10) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

/// Output format of the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Dat,
}

/// Which header the table carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Catenoid,
    Willmore,
}

/// Serialize rows deterministically; CSV headers are fixed, DAT uses
/// whitespace columns with a comment header for plotting.
pub fn render_table(rows: &[TableRow], kind: TableKind, format: OutputFormat) -> String {
    let header = match (kind, format) {
        (TableKind::Catenoid, OutputFormat::Csv) => "h_over_r,area,status".to_string(),
        (TableKind::Willmore, OutputFormat::Csv) => "h,area,willmore_energy,status".to_string(),
        (TableKind::Catenoid, OutputFormat::Dat) => "# h_over_r area status".to_string(),
        (TableKind::Willmore, OutputFormat::Dat) => "# h area willmore_energy status".to_string(),
    };
    let sep = match format {
        OutputFormat::Csv => ",",
        OutputFormat::Dat => " ",
    };
    let mut out = String::new();
    out.push_str(&header);
    out.push('\n');
    for row in rows {
        let mut cols = vec![format_sig6(row.key), format_sig6(row.area)];
        if kind == TableKind::Willmore {
            cols.push(format_sig6(row.energy.unwrap_or(f64::NAN)));
        }
        cols.push(row.status.as_str().to_string());
        out.push_str(&cols.join(sep));
        out.push('\n');
    }
    out
}

//! Fully explicit a-priori constants for the global C^{2+α} estimate of
//! Sturm–Liouville solutions, plus empirical verification of every
//! intermediate estimate in the chain.
//!
//! The ledger is built by literal transcription from the coefficient
//! bounds: `nu` and the C⁰ bound, `c1..c3` (C^{1+α} step), `c4..c6`
//! (compact C^{1+α} form), `c7..c9` (sup bound of the reduced second
//! derivative), `c10..c12` (its Hölder bound), `c13..c15` (pre-absorption
//! collection) and finally
//!
//! ```text
//! ‖u‖_{2+α} <= C1 ‖f‖_α + C2 ‖u‖_0,   C1 = c13/(1-μ c15),  C2 = c14/(1-μ c15)
//! ```
//!
//! valid for any μ ∈ (0, 1/2) with `1 - μ c15 > 0`. The constants are far
//! from sharp; the verifiers assert the estimates outright with discrete
//! norms and record the observed slack.

use crate::bvp::{self, CoefficientBounds, SturmLiouvilleProblem};
use crate::error::{Error, Result};
use crate::grid::{self, SampledFunction};
use crate::scalar::{lit, to_f64, Scalar};

/// Which estimate a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateId {
    /// `‖u‖_0 <= 3 max_∂|u| + ‖f‖_0 e^{ν(b-a)} / (ν e^{νa})` (needs q <= 0).
    C0Bound,
    /// `‖u‖_1` bound with the μ-split of the second derivative.
    C1Bound,
    /// `‖u‖_α <= ‖u‖_0 + (b-a)^{1-α} ‖u‖_1`.
    AlphaBound,
    /// `‖u‖_{1+α}` bound through `c1, c2, c3`.
    C1AlphaBound,
    /// Compact form `‖u‖_{1+α} <= c4‖f‖_0 + c5‖u‖_0 + μ c6‖u‖_{2+α}`.
    C1AlphaCompact,
    /// Pre-absorption `‖u‖_{2+α} <= c13‖f‖_α + c14‖u‖_0 + μ c15‖u‖_{2+α}`.
    PreAbsorption,
    /// Global `‖u‖_{2+α} <= C1‖f‖_α + C2‖u‖_0`.
    GlobalC2Alpha,
    /// Poisson `u″ = F`: C⁰ bound with `e^{b-2a}`.
    PoissonC0,
    /// Poisson C¹ bound.
    PoissonC1,
    /// Poisson C² bound.
    PoissonC2,
    /// Poisson Cᵅ bound.
    PoissonAlpha,
    /// Poisson C^{1+α} bound.
    PoissonC1Alpha,
    /// Poisson C^{2+α} bound `‖u‖_{2+α} <= ‖u‖_2 + ‖F‖_α`.
    PoissonC2Alpha,
}

impl std::fmt::Display for EstimateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EstimateId::C0Bound => "c0-bound",
            EstimateId::C1Bound => "c1-bound",
            EstimateId::AlphaBound => "alpha-bound",
            EstimateId::C1AlphaBound => "c1-alpha-bound",
            EstimateId::C1AlphaCompact => "c1-alpha-compact",
            EstimateId::PreAbsorption => "pre-absorption",
            EstimateId::GlobalC2Alpha => "global-c2-alpha",
            EstimateId::PoissonC0 => "poisson-c0",
            EstimateId::PoissonC1 => "poisson-c1",
            EstimateId::PoissonC2 => "poisson-c2",
            EstimateId::PoissonAlpha => "poisson-alpha",
            EstimateId::PoissonC1Alpha => "poisson-c1-alpha",
            EstimateId::PoissonC2Alpha => "poisson-c2-alpha",
        };
        f.write_str(s)
    }
}

/// One verified inequality: `holds ⇔ lhs <= rhs`.
#[derive(Debug, Clone, Copy)]
pub struct EstimateReport<F> {
    pub which: EstimateId,
    pub lhs: F,
    pub rhs: F,
    pub holds: bool,
    pub slack: F,
}

impl<F: Scalar> EstimateReport<F> {
    fn new(which: EstimateId, lhs: F, rhs: F) -> Self {
        EstimateReport {
            which,
            lhs,
            rhs,
            holds: lhs <= rhs,
            slack: rhs - lhs,
        }
    }
}

/// The complete constant ledger for one coefficient-bound set.
#[derive(Debug, Clone)]
pub struct ConstantLedger<F> {
    pub mu: F,
    pub nu: F,
    /// `c_1 … c_15` in order (index 0 holds c_1).
    pub c: [F; 15],
    pub c1_global: F,
    pub c2_global: F,
    pub inputs: CoefficientBounds<F>,
    pub interval_length: F,
    pub alpha: F,
}

impl<F: Scalar> ConstantLedger<F> {
    /// `c_k` with the conventional 1-based index.
    pub fn ck(&self, k: usize) -> F {
        self.c[k - 1]
    }
}

/// Build the ledger by literal transcription of the defining formulas.
///
/// Fails with [`Error::MuTooLarge`] when `1 - μ c15 <= 0`, i.e. the final
/// absorption step is impossible for this μ.
pub fn compute_ledger<F: Scalar>(
    bounds: &CoefficientBounds<F>,
    interval_length: F,
    alpha: F,
    mu: F,
) -> Result<ConstantLedger<F>> {
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::InvalidExponent {
            alpha: to_f64(alpha),
        });
    }
    let half = lit::<F>(0.5);
    let mu_valid = mu > F::zero() && mu < half && interval_length > F::zero();
    if !mu_valid {
        return Err(Error::MuTooLarge {
            mu: to_f64(mu),
            mu_c15: f64::NAN,
        });
    }
    let one = F::one();
    let two = lit::<F>(2.0);
    let l = interval_length;
    let p0 = bounds.p0;
    let p1 = bounds.p1;
    let p1p = bounds.p1_prime;
    let q1 = bounds.q1;
    let q1h = bounds.q1_hat;
    let p1ph = bounds.p1_prime_hat;

    let l_pow = l.powf(one - alpha);
    let nu = (one + p1p) / p0;

    let c1 = l_pow * (p1p / p0 + two * p1 * p1p / (mu * p0 * p0 * l) + p1p * q1 * l / (two * p0 * p0) + q1 / p0);
    let c2 = l_pow * (p1p * l / (two * p0 * p0) + one / p0);
    let c3 = p1 * p1p * l.powf(two - alpha) / (two * p0 * p0);

    let c4 = c2 + l / (two * p0);
    let c5 = one + c1 + two * p1 / (mu * p0 * l) + q1 * l / (two * p0);
    let c6 = c3 + p1 * l / (two * p0);

    let c7 = (one + p1p * c4) / p0;
    let c8 = (p1p * c5 + q1) / p0;
    let c9 = p1p * c6 / p0;

    let c10 = (one + p1ph * c4 + q1h * l_pow * c4) / p0;
    let c11 = (p1ph * c5 + q1h + q1h * l_pow * c5) / p0;
    let c12 = (p1ph * c6 + q1h * l_pow * c6) / p0;

    let front = (two + (one + mu) * l) / two;
    let c13 = front * c7 + c10;
    let c14 = front * c8 + (two + mu * l) / (mu * l) + c11;
    let c15 = front * c9 + c12;

    let denom = one - mu * c15;
    if denom <= F::zero() {
        return Err(Error::MuTooLarge {
            mu: to_f64(mu),
            mu_c15: to_f64(mu * c15),
        });
    }
    Ok(ConstantLedger {
        mu,
        nu,
        c: [
            c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14, c15,
        ],
        c1_global: c13 / denom,
        c2_global: c14 / denom,
        inputs: *bounds,
        interval_length,
        alpha,
    })
}

/// Scan grid for the automated μ choice, largest first.
const MU_GRID: [f64; 11] = [
    0.49, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10, 0.05, 0.01,
];

/// Largest μ on the scan grid with `μ c15(μ) < 1/2`; deterministic.
pub fn choose_mu<F: Scalar>(
    bounds: &CoefficientBounds<F>,
    interval_length: F,
    alpha: F,
) -> Result<F> {
    for &m in MU_GRID.iter() {
        let mu = lit::<F>(m);
        if let Ok(ledger) = compute_ledger(bounds, interval_length, alpha, mu) {
            if mu * ledger.ck(15) < lit::<F>(0.5) {
                return Ok(mu);
            }
        }
    }
    Err(Error::NoValidMu)
}

/// Ledger for a concrete problem: bounds, automatic μ, constants.
pub fn ledger_for_problem<F: Scalar>(
    problem: &SturmLiouvilleProblem<F>,
    alpha: F,
) -> Result<ConstantLedger<F>> {
    let bounds = bvp::coefficient_bounds(problem, alpha)?;
    let l = problem.grid().interval_length();
    let mu = choose_mu(&bounds, l, alpha)?;
    compute_ledger(&bounds, l, alpha, mu)
}

/// The two constants of the combined solution estimate
/// `‖u‖_{2+α} <= K_rhs ‖Φ‖_α + K_bc max_∂|u|` for the normalized problem
/// `(p u′)′ + q u = p Φ` with q <= 0: the global C^{2+α} estimate with the
/// C⁰ bound folded in.
pub fn solution_estimate_constants<F: Scalar>(
    problem: &SturmLiouvilleProblem<F>,
    ledger: &ConstantLedger<F>,
) -> (F, F) {
    let three = lit::<F>(3.0);
    let a = problem.grid().a();
    let l = problem.grid().interval_length();
    let nu = ledger.nu;
    let growth = (nu * l).exp() / (nu * (nu * a).exp());
    let k_rhs = ledger.c1_global * ledger.inputs.p1_hat + ledger.c2_global * ledger.inputs.p1 * growth;
    let k_bc = three * ledger.c2_global;
    (k_rhs, k_bc)
}

fn boundary_max<F: Scalar>(u: &SampledFunction<F>) -> F {
    u.value(0).abs().max(u.value(u.len() - 1).abs())
}

/// C⁰ bound `‖u‖_0 <= 3 max_∂|u| + ‖f‖_0 e^{ν(b-a)}/(ν e^{νa})`;
/// requires the maximum principle, i.e. q <= 0.
pub fn verify_c0_estimate<F: Scalar>(
    problem: &SturmLiouvilleProblem<F>,
    u: &SampledFunction<F>,
) -> Result<EstimateReport<F>> {
    let max_q = problem
        .q
        .values()
        .iter()
        .fold(F::neg_infinity(), |m, &v| m.max(v));
    if max_q > F::zero() {
        return Err(Error::MaxPrincipleInapplicable {
            max_q: to_f64(max_q),
        });
    }
    let bounds = bvp::coefficient_bounds(problem, lit::<F>(0.5))?;
    let nu = (F::one() + bounds.p1_prime) / bounds.p0;
    let a = problem.grid().a();
    let l = problem.grid().interval_length();
    let three = lit::<F>(3.0);
    let lhs = grid::ck_norm(u, 0);
    let rhs = three * boundary_max(u)
        + grid::ck_norm(&problem.rhs, 0) / (nu * (nu * a).exp()) * (nu * l).exp();
    Ok(EstimateReport::new(EstimateId::C0Bound, lhs, rhs))
}

/// The intermediate estimates for a solution of the full problem, at the
/// ledger's μ: C¹, Cᵅ, C^{1+α} (both forms), pre-absorption and global.
pub fn verify_intermediate_estimates<F: Scalar>(
    problem: &SturmLiouvilleProblem<F>,
    u: &SampledFunction<F>,
    ledger: &ConstantLedger<F>,
) -> Result<Vec<EstimateReport<F>>> {
    let b = bvp::coefficient_bounds(problem, ledger.alpha)?;
    if (to_f64(b.p0) - to_f64(ledger.inputs.p0)).abs() > 1e-9 * to_f64(b.p0).abs().max(1.0)
        || (to_f64(b.q1) - to_f64(ledger.inputs.q1)).abs() > 1e-9 * to_f64(b.q1).abs().max(1.0)
    {
        return Err(Error::LedgerMismatch);
    }
    let one = F::one();
    let two = lit::<F>(2.0);
    let alpha = ledger.alpha;
    let mu = ledger.mu;
    let l = problem.grid().interval_length();
    let l_pow = l.powf(one - alpha);

    let u0 = grid::ck_norm(u, 0);
    let u1 = grid::ck_norm(u, 1);
    let u_alpha = grid::holder_norm(u, 0, alpha)?;
    let u_1alpha = grid::holder_norm(u, 1, alpha)?;
    let u_2alpha = grid::holder_norm(u, 2, alpha)?;
    let f0 = grid::ck_norm(&problem.rhs, 0);
    let f_alpha = grid::holder_norm(&problem.rhs, 0, alpha)?;

    let mut reports = Vec::new();

    // C¹ with the μ-split
    let rhs_c1 = l / (two * b.p0) * f0
        + (one + two * b.p1 / (mu * b.p0 * l) + b.q1 * l / (two * b.p0)) * u0
        + mu * b.p1 * l / (two * b.p0) * u_2alpha;
    reports.push(EstimateReport::new(EstimateId::C1Bound, u1, rhs_c1));

    // Cᵅ through the C¹ norm
    reports.push(EstimateReport::new(
        EstimateId::AlphaBound,
        u_alpha,
        u0 + l_pow * u1,
    ));

    // C^{1+α}, explicit and compact forms
    let rhs_1a = u1 + ledger.ck(1) * u0 + ledger.ck(2) * f0 + mu * ledger.ck(3) * u_2alpha;
    reports.push(EstimateReport::new(EstimateId::C1AlphaBound, u_1alpha, rhs_1a));
    let rhs_1a_compact = ledger.ck(4) * f0 + ledger.ck(5) * u0 + mu * ledger.ck(6) * u_2alpha;
    reports.push(EstimateReport::new(
        EstimateId::C1AlphaCompact,
        u_1alpha,
        rhs_1a_compact,
    ));

    // pre-absorption chain and the absorbed global estimate
    let rhs_pre = ledger.ck(13) * f_alpha + ledger.ck(14) * u0 + mu * ledger.ck(15) * u_2alpha;
    reports.push(EstimateReport::new(EstimateId::PreAbsorption, u_2alpha, rhs_pre));
    let rhs_global = ledger.c1_global * f_alpha + ledger.c2_global * u0;
    reports.push(EstimateReport::new(
        EstimateId::GlobalC2Alpha,
        u_2alpha,
        rhs_global,
    ));
    Ok(reports)
}

/// The six Poisson-equation estimates for `u″ = F`, evaluated at a given μ.
///
/// These reuse the general machinery with `p ≡ 1`, `q ≡ 0`; the caller
/// supplies the sample pair and we check it really is a Poisson solution.
pub fn verify_poisson_estimates<F: Scalar>(
    u: &SampledFunction<F>,
    big_f: &SampledFunction<F>,
    alpha: F,
    mu: F,
) -> Result<Vec<EstimateReport<F>>> {
    if !u.grid().compatible(big_f.grid()) {
        return Err(Error::GridMismatch);
    }
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::InvalidExponent {
            alpha: to_f64(alpha),
        });
    }
    let n = u.len();
    let mut res = F::zero();
    for i in 1..n - 1 {
        res = res.max((u.d2(i) - big_f.value(i)).abs());
    }
    let scale = F::one().max(big_f.max_abs());
    if res > lit::<F>(1e-6) * scale {
        return Err(Error::NotAPoissonSolution {
            residual: to_f64(res),
        });
    }
    let one = F::one();
    let two = lit::<F>(2.0);
    let three = lit::<F>(3.0);
    let a = u.grid().a();
    let bnd = u.grid().b();
    let l = u.grid().interval_length();
    let l_pow = l.powf(one - alpha);

    let u0 = grid::ck_norm(u, 0);
    let u1 = grid::ck_norm(u, 1);
    let u2 = grid::ck_norm(u, 2);
    let u_alpha = grid::holder_norm(u, 0, alpha)?;
    let u_1alpha = grid::holder_norm(u, 1, alpha)?;
    let u_2alpha = grid::holder_norm(u, 2, alpha)?;
    let seminorm_u1 = u
        .d1_values()
        .iter()
        .fold(F::zero(), |m, v| m.max(v.abs()));
    let seminorm_u2 = u
        .d2_values()
        .iter()
        .fold(F::zero(), |m, v| m.max(v.abs()));
    let f0 = grid::ck_norm(big_f, 0);
    let f_alpha = grid::holder_norm(big_f, 0, alpha)?;

    let mut reports = vec![EstimateReport::new(
        EstimateId::PoissonC0,
        u0,
        three * boundary_max(u) + f0 * (bnd - two * a).exp(),
    )];
    reports.push(EstimateReport::new(
        EstimateId::PoissonC1,
        u1,
        (one + mu) * l / two * f0 + (two + mu * l) / (mu * l) * u0,
    ));
    reports.push(EstimateReport::new(
        EstimateId::PoissonC2,
        u2,
        (two + (one + mu) * l) / two * f0 + (two + mu * l) / (mu * l) * u0,
    ));
    reports.push(EstimateReport::new(
        EstimateId::PoissonAlpha,
        u_alpha,
        u0 + l_pow * seminorm_u1,
    ));
    reports.push(EstimateReport::new(
        EstimateId::PoissonC1Alpha,
        u_1alpha,
        u1 + l_pow * seminorm_u2,
    ));
    reports.push(EstimateReport::new(
        EstimateId::PoissonC2Alpha,
        u_2alpha,
        u2 + f_alpha,
    ));
    Ok(reports)
}

/// Global estimate `‖u‖_{2+α} <= C1 ‖f‖_α + C2 ‖u‖_0` for a solved problem.
pub fn verify_global_estimate<F: Scalar>(
    problem: &SturmLiouvilleProblem<F>,
    u: &SampledFunction<F>,
    ledger: &ConstantLedger<F>,
) -> Result<EstimateReport<F>> {
    let b = bvp::coefficient_bounds(problem, ledger.alpha)?;
    let close = |x: F, y: F| (to_f64(x) - to_f64(y)).abs() <= 1e-9 * to_f64(y).abs().max(1.0);
    if !(close(b.p0, ledger.inputs.p0)
        && close(b.p1, ledger.inputs.p1)
        && close(b.q1, ledger.inputs.q1))
    {
        return Err(Error::LedgerMismatch);
    }
    let lhs = grid::norm_2_alpha(u, ledger.alpha)?;
    let rhs = ledger.c1_global * grid::holder_norm(&problem.rhs, 0, ledger.alpha)?
        + ledger.c2_global * grid::ck_norm(u, 0);
    Ok(EstimateReport::new(EstimateId::GlobalC2Alpha, lhs, rhs))
}

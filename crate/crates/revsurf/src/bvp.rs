//! Sturm–Liouville two-point boundary value problems
//! `(p u′)′ + q u = f` with Dirichlet data, discretized in conservative
//! flux form with midpoint averaging of `p`:
//!
//! ```text
//! (p_{i+1/2}(u_{i+1}-u_i) - p_{i-1/2}(u_i-u_{i-1})) / h² + q_i u_i = f_i
//! ```
//!
//! The flux form keeps the interior matrix symmetric, which the
//! maximum-principle sweeps and the smallest-eigenvalue singularity
//! detector rely on.
//!
//! Solvability: the discrete analogue of the classical alternative is
//! "unique solvability iff the interior matrix has trivial kernel". A
//! near-kernel is detected two ways — a collapsing Thomas pivot, and an
//! inverse-iteration estimate of the smallest eigenvalue relative to the
//! matrix scale. Either one below `SINGULAR_TOL` raises
//! [`Error::SingularSystem`]. Detection sharpens with grid resolution:
//! a continuum kernel shows up once the grid resolves it.

use crate::error::{Error, Result};
use crate::grid::{self, Grid, SampledFunction};
use crate::scalar::{lit, to_f64, Scalar};

/// Relative threshold below which the discrete operator counts as singular.
pub const SINGULAR_TOL: f64 = 1e-10;

/// `(p u′)′ + q u = f` on a grid, with `u(a) = eta1`, `u(b) = eta2`.
#[derive(Debug, Clone)]
pub struct SturmLiouvilleProblem<F> {
    pub p: SampledFunction<F>,
    pub q: SampledFunction<F>,
    pub rhs: SampledFunction<F>,
    pub eta1: F,
    pub eta2: F,
}

impl<F: Scalar> SturmLiouvilleProblem<F> {
    pub fn new(
        p: SampledFunction<F>,
        q: SampledFunction<F>,
        rhs: SampledFunction<F>,
        eta1: F,
        eta2: F,
    ) -> Result<Self> {
        if !p.grid().compatible(q.grid()) || !p.grid().compatible(rhs.grid()) {
            return Err(Error::GridMismatch);
        }
        if p.min_value() <= F::zero() {
            return Err(Error::NonFiniteCoefficient);
        }
        Ok(SturmLiouvilleProblem {
            p,
            q,
            rhs,
            eta1,
            eta2,
        })
    }

    pub fn grid(&self) -> &Grid<F> {
        self.p.grid()
    }
}

/// Constant bounds on the coefficients, feeding the a-priori ledger:
/// plain sup bounds `p0 <= p <= p1`, `|p′| <= p1'`, `q1 = max|q|`,
/// and the Hölder-norm ("hat") versions.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientBounds<F> {
    pub p0: F,
    pub p1: F,
    pub p1_prime: F,
    pub q1: F,
    pub p1_hat: F,
    pub q1_hat: F,
    pub p1_prime_hat: F,
    pub alpha: F,
}

/// Rewrite `u″ + p̃ u′ + q̃ u = f̃` in Sturm–Liouville form by multiplying
/// with `p(x) = exp ∫ p̃`; the integral is the cumulative trapezoid from
/// the left endpoint, so `p > 0` by construction.
pub fn normalize_to_sl<F: Scalar>(
    p_tilde: &SampledFunction<F>,
    q_tilde: &SampledFunction<F>,
    f_tilde: &SampledFunction<F>,
    eta1: F,
    eta2: F,
) -> Result<SturmLiouvilleProblem<F>> {
    let g = p_tilde.grid();
    if !g.compatible(q_tilde.grid()) || !g.compatible(f_tilde.grid()) {
        return Err(Error::GridMismatch);
    }
    if p_tilde.values().iter().any(|v| !v.is_finite())
        || q_tilde.values().iter().any(|v| !v.is_finite())
        || f_tilde.values().iter().any(|v| !v.is_finite())
    {
        return Err(Error::NonFiniteCoefficient);
    }
    let n = g.len();
    let h = g.spacing();
    let half = lit::<F>(0.5);
    let mut integral = F::zero();
    let mut p_vals = Vec::with_capacity(n);
    let mut p_d1 = Vec::with_capacity(n);
    let mut p_d2 = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            integral = integral + half * h * (p_tilde.value(i - 1) + p_tilde.value(i));
        }
        let p = integral.exp();
        // p′ = p̃ p and p″ = (p̃′ + p̃²) p follow from the definition
        p_vals.push(p);
        p_d1.push(p_tilde.value(i) * p);
        p_d2.push((p_tilde.d1(i) + p_tilde.value(i) * p_tilde.value(i)) * p);
    }
    let p = SampledFunction::with_derivatives(g.clone(), p_vals, p_d1, p_d2)?;
    let q = p.mul(q_tilde)?;
    let rhs = p.mul(f_tilde)?;
    SturmLiouvilleProblem::new(p, q, rhs, eta1, eta2)
}

/// Interior tridiagonal system of the flux-form discretization.
struct InteriorSystem<F> {
    sub: Vec<F>,
    diag: Vec<F>,
    sup: Vec<F>,
    rhs: Vec<F>,
}

fn assemble<F: Scalar>(problem: &SturmLiouvilleProblem<F>) -> InteriorSystem<F> {
    let g = problem.grid();
    let n = g.len();
    let m = n - 2;
    let h2 = g.spacing() * g.spacing();
    let half = lit::<F>(0.5);
    let p_mid = |i: usize, j: usize| half * (problem.p.value(i) + problem.p.value(j));
    let mut sub = vec![F::zero(); m];
    let mut diag = vec![F::zero(); m];
    let mut sup = vec![F::zero(); m];
    let mut rhs = vec![F::zero(); m];
    for k in 0..m {
        let i = k + 1;
        let pl = p_mid(i - 1, i);
        let pr = p_mid(i, i + 1);
        diag[k] = -(pl + pr) / h2 + problem.q.value(i);
        if k > 0 {
            sub[k] = pl / h2;
        }
        if k + 1 < m {
            sup[k] = pr / h2;
        }
        rhs[k] = problem.rhs.value(i);
        if i == 1 {
            rhs[k] = rhs[k] - pl / h2 * problem.eta1;
        }
        if i == n - 2 {
            rhs[k] = rhs[k] - pr / h2 * problem.eta2;
        }
    }
    InteriorSystem {
        sub,
        diag,
        sup,
        rhs,
    }
}

/// Thomas elimination; returns the solution and (min, max) pivot magnitudes.
fn thomas<F: Scalar>(sys: &InteriorSystem<F>, rhs: &[F]) -> Result<(Vec<F>, F, F)> {
    let m = sys.diag.len();
    let mut c_prime = vec![F::zero(); m];
    let mut d_prime = vec![F::zero(); m];
    let mut min_piv = F::infinity();
    let mut max_piv = F::zero();
    let mut denom = sys.diag[0];
    let track = |d: F, lo: &mut F, hi: &mut F| {
        let a = d.abs();
        *lo = lo.min(a);
        *hi = hi.max(a);
    };
    track(denom, &mut min_piv, &mut max_piv);
    if denom == F::zero() {
        return Err(Error::SingularSystem {
            pivot_ratio: 0.0,
            eigen_ratio: f64::NAN,
        });
    }
    if m > 1 {
        c_prime[0] = sys.sup[0] / denom;
    }
    d_prime[0] = rhs[0] / denom;
    for i in 1..m {
        denom = sys.diag[i] - sys.sub[i] * c_prime[i - 1];
        track(denom, &mut min_piv, &mut max_piv);
        if denom == F::zero() {
            return Err(Error::SingularSystem {
                pivot_ratio: 0.0,
                eigen_ratio: f64::NAN,
            });
        }
        if i + 1 < m {
            c_prime[i] = sys.sup[i] / denom;
        }
        d_prime[i] = (rhs[i] - sys.sub[i] * d_prime[i - 1]) / denom;
    }
    let mut x = vec![F::zero(); m];
    x[m - 1] = d_prime[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    Ok((x, min_piv, max_piv))
}

/// Smallest-eigenvalue estimate of the (symmetric) interior matrix by
/// inverse iteration, relative to the Gershgorin row-sum scale.
fn smallest_eigen_ratio<F: Scalar>(sys: &InteriorSystem<F>) -> Result<f64> {
    let m = sys.diag.len();
    let mut scale = F::zero();
    for i in 0..m {
        let row = sys.diag[i].abs() + sys.sub[i].abs() + sys.sup[i].abs();
        scale = scale.max(row);
    }
    // deterministic start vector with components in every eigen-direction
    let mut x: Vec<F> = (0..m)
        .map(|i| lit::<F>(1.0 + (0.7 * (i as f64 + 1.0)).sin()))
        .collect();
    let norm = |v: &[F]| v.iter().fold(F::zero(), |s, &t| s + t * t).sqrt();
    let nx = norm(&x);
    for v in &mut x {
        *v = *v / nx;
    }
    let mut lambda = F::zero();
    for _ in 0..12 {
        let (y, _, _) = thomas(sys, &x)?;
        let ny = norm(&y);
        if !ny.is_finite() || ny == F::zero() {
            break;
        }
        for v in x.iter_mut().zip(&y) {
            *v.0 = *v.1 / ny;
        }
        // Rayleigh quotient of the normalized iterate
        let mut ax = vec![F::zero(); m];
        for i in 0..m {
            let mut s = sys.diag[i] * x[i];
            if i > 0 {
                s = s + sys.sub[i] * x[i - 1];
            }
            if i + 1 < m {
                s = s + sys.sup[i] * x[i + 1];
            }
            ax[i] = s;
        }
        lambda = x.iter().zip(&ax).fold(F::zero(), |s, (&a, &b)| s + a * b);
    }
    Ok((to_f64(lambda) / to_f64(scale)).abs())
}

/// Solve the boundary value problem.
///
/// Errors with [`Error::SingularSystem`] when the discrete homogeneous
/// problem has a (near-)nontrivial kernel — the alternative case of the
/// classical existence theorem.
pub fn solve<F: Scalar>(problem: &SturmLiouvilleProblem<F>) -> Result<SampledFunction<F>> {
    let sys = assemble(problem);
    let (interior, min_piv, max_piv) = thomas(&sys, &sys.rhs)?;
    let pivot_ratio = to_f64(min_piv) / to_f64(max_piv);
    let eigen_ratio = smallest_eigen_ratio(&sys)?;
    if pivot_ratio < SINGULAR_TOL || eigen_ratio < SINGULAR_TOL {
        return Err(Error::SingularSystem {
            pivot_ratio,
            eigen_ratio,
        });
    }
    let mut values = Vec::with_capacity(problem.grid().len());
    values.push(problem.eta1);
    values.extend(interior);
    values.push(problem.eta2);
    SampledFunction::from_values(problem.grid().clone(), values)
}

/// True iff `q <= 0` at every node, the hypothesis under which solutions
/// admit no inner positive maximum.
pub fn max_principle_applies<F: Scalar>(problem: &SturmLiouvilleProblem<F>) -> bool {
    problem.q.values().iter().all(|&q| q <= F::zero())
}

/// Sup bounds and Hölder norms of the coefficients.
pub fn coefficient_bounds<F: Scalar>(
    problem: &SturmLiouvilleProblem<F>,
    alpha: F,
) -> Result<CoefficientBounds<F>> {
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::InvalidExponent {
            alpha: to_f64(alpha),
        });
    }
    let p = &problem.p;
    let q = &problem.q;
    let p0 = p.min_value();
    let p1 = p.max_abs();
    let p1_prime = p.d1_values().iter().fold(F::zero(), |m, v| m.max(v.abs()));
    let q1 = q.max_abs();
    let p1_hat = grid::holder_norm(p, 0, alpha)?;
    let q1_hat = grid::holder_norm(q, 0, alpha)?;
    let p1_prime_hat = grid::holder_norm(p, 1, alpha)?;
    Ok(CoefficientBounds {
        p0,
        p1,
        p1_prime,
        q1,
        p1_hat,
        q1_hat,
        p1_prime_hat,
        alpha,
    })
}

/// Max over interior nodes of `|(p u′)′ + q u - f|`, derivatives taken by
/// finite differences of the given samples.
pub fn residual<F: Scalar>(problem: &SturmLiouvilleProblem<F>, u: &SampledFunction<F>) -> Result<F> {
    if !u.grid().compatible(problem.grid()) {
        return Err(Error::GridMismatch);
    }
    let g = problem.grid();
    let n = g.len();
    let h2 = g.spacing() * g.spacing();
    let half = lit::<F>(0.5);
    let mut worst = F::zero();
    for i in 1..n - 1 {
        let pl = half * (problem.p.value(i - 1) + problem.p.value(i));
        let pr = half * (problem.p.value(i) + problem.p.value(i + 1));
        let flux = (pr * (u.value(i + 1) - u.value(i)) - pl * (u.value(i) - u.value(i - 1))) / h2;
        let r = flux + problem.q.value(i) * u.value(i) - problem.rhs.value(i);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn constant_problem(
        n: usize,
        a: f64,
        b: f64,
        pc: f64,
        qc: f64,
        fc: f64,
        eta: (f64, f64),
    ) -> SturmLiouvilleProblem<f64> {
        let g: Grid<f64> = Grid::new(a, b, n).unwrap();
        let p = SampledFunction::from_fn_c2(g.clone(), |_| pc, |_| 0.0, |_| 0.0).unwrap();
        let q = SampledFunction::from_fn_c2(g.clone(), |_| qc, |_| 0.0, |_| 0.0).unwrap();
        let f = SampledFunction::from_fn_c2(g, |_| fc, |_| 0.0, |_| 0.0).unwrap();
        SturmLiouvilleProblem::new(p, q, f, eta.0, eta.1).unwrap()
    }

    #[test]
    fn poisson_closed_form() {
        // u'' = 1, u(0)=u(1)=0 has u(x) = x(x-1)/2
        let problem = constant_problem(101, 0.0, 1.0, 1.0, 0.0, 1.0, (0.0, 0.0));
        let u = solve(&problem).unwrap();
        let mid = u.value(50);
        assert!((mid - (-0.125)).abs() < 1e-12, "u(1/2) = {mid}");
        for (i, &x) in problem.grid().nodes().iter().enumerate() {
            assert!((u.value(i) - 0.5 * x * (x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_problem_is_singular() {
        // u'' + u = 1 on [0, pi] with u(0)=0, u(pi)=1: the homogeneous
        // problem has kernel sin(x), so the discrete operator must be
        // flagged once the grid resolves it.
        let problem = constant_problem(1001, 0.0, std::f64::consts::PI, 1.0, 1.0, 1.0, (0.0, 1.0));
        match solve(&problem) {
            Err(Error::SingularSystem { eigen_ratio, .. }) => {
                assert!(eigen_ratio < SINGULAR_TOL);
            }
            other => panic!("expected SingularSystem, got {other:?}"),
        }
    }

    #[test]
    fn modified_helmholtz_closed_form_and_order() {
        // u'' - u = 1, u(0)=u(1)=0: u(x) = cosh(x-1/2)/cosh(1/2) - 1
        let exact = |x: f64| (x - 0.5).cosh() / 0.5f64.cosh() - 1.0;
        let err = |n: usize| {
            let problem = constant_problem(n, 0.0, 1.0, 1.0, -1.0, 1.0, (0.0, 0.0));
            let u = solve(&problem).unwrap();
            problem
                .grid()
                .nodes()
                .iter()
                .zip(u.values())
                .map(|(&x, &v)| (v - exact(x)).abs())
                .fold(0.0f64, f64::max)
        };
        let problem = constant_problem(1001, 0.0, 1.0, 1.0, -1.0, 1.0, (0.0, 0.0));
        let u = solve(&problem).unwrap();
        let mid = u.value(500);
        let expected = 1.0 / 0.5f64.cosh() - 1.0;
        assert!(
            (mid - expected).abs() < 1e-6,
            "u(1/2) = {mid}, closed form {expected}"
        );
        // order-2 convergence under grid doubling
        let r = err(101) / err(201);
        assert!((3.5..=4.5).contains(&r), "convergence ratio {r}");
    }

    #[test]
    fn normalize_identity_when_p_tilde_zero() {
        let g: Grid<f64> = Grid::new(0.0, 1.0, 51).unwrap();
        let zero = SampledFunction::from_fn_c2(g.clone(), |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
        let q = SampledFunction::from_fn(g.clone(), |x| -x).unwrap();
        let f = SampledFunction::from_fn(g, |x| x * x).unwrap();
        let sl = normalize_to_sl(&zero, &q, &f, 0.0, 0.0).unwrap();
        for i in 0..sl.grid().len() {
            assert!((sl.p.value(i) - 1.0).abs() < 1e-15);
            assert!((sl.q.value(i) - q.value(i)).abs() < 1e-15);
            assert!((sl.rhs.value(i) - f.value(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_exponential() {
        let g: Grid<f64> = Grid::new(0.0, 1.0, 2001).unwrap();
        let one = SampledFunction::from_fn_c2(g.clone(), |_| 1.0, |_| 0.0, |_| 0.0).unwrap();
        let zero = SampledFunction::from_fn_c2(g.clone(), |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
        let sl = normalize_to_sl(&one, &zero, &zero, 0.0, 0.0).unwrap();
        for (i, &x) in g.nodes().iter().enumerate() {
            assert!(
                (sl.p.value(i) - x.exp()).abs() < 1e-7,
                "trapezoid exp at {x}"
            );
        }
    }

    #[test]
    fn normalize_catenary_coefficient() {
        // p̃ = -2 f'/f with f = cosh gives p = cosh(a)²/cosh(x)²
        let g: Grid<f64> = Grid::new(-0.5, 0.5, 2001).unwrap();
        let pt = SampledFunction::from_fn(g.clone(), |x| -2.0 * x.tanh()).unwrap();
        let zero = SampledFunction::from_fn_c2(g.clone(), |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
        let sl = normalize_to_sl(&pt, &zero, &zero, 0.0, 0.0).unwrap();
        let c = 0.5f64.cosh();
        for (i, &x) in g.nodes().iter().enumerate() {
            let expected = c * c / (x.cosh() * x.cosh());
            assert!((sl.p.value(i) - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn max_principle_flag() {
        assert!(max_principle_applies(&constant_problem(
            51,
            0.0,
            1.0,
            1.0,
            -1.0,
            0.0,
            (0.0, 0.0)
        )));
        assert!(max_principle_applies(&constant_problem(
            51,
            0.0,
            1.0,
            1.0,
            0.0,
            0.0,
            (0.0, 0.0)
        )));
        let g: Grid<f64> = Grid::new(0.0, 1.0, 51).unwrap();
        let p = SampledFunction::from_fn(g.clone(), |_| 1.0).unwrap();
        let q = SampledFunction::from_fn(g.clone(), |x| x - 0.5).unwrap();
        let f = SampledFunction::from_fn(g, |_| 0.0).unwrap();
        let pr = SturmLiouvilleProblem::new(p, q, f, 0.0, 0.0).unwrap();
        assert!(!max_principle_applies(&pr));
    }

    #[test]
    fn coefficient_bounds_examples() {
        let pr = constant_problem(101, 0.0, 1.0, 1.0, 0.0, 0.0, (0.0, 0.0));
        let b = coefficient_bounds(&pr, 0.5).unwrap();
        assert!((b.p0 - 1.0).abs() < 1e-14);
        assert!((b.p1 - 1.0).abs() < 1e-14);
        assert!(b.p1_prime.abs() < 1e-12);
        assert!(b.q1.abs() < 1e-14);
        assert!((b.p1_hat - 1.0).abs() < 1e-12);
        assert!(b.q1_hat.abs() < 1e-12);
        assert!((b.p1_prime_hat - 1.0).abs() < 1e-11);

        let g: Grid<f64> = Grid::new(0.0, 1.0, 1001).unwrap();
        let p = SampledFunction::from_fn_c2(g.clone(), |x| 2.0 + x.sin(), f64::cos, |x| -x.sin())
            .unwrap();
        let q = SampledFunction::from_fn(g.clone(), |_| -3.0).unwrap();
        let f = SampledFunction::from_fn(g, |_| 0.0).unwrap();
        let pr = SturmLiouvilleProblem::new(p, q, f, 0.0, 0.0).unwrap();
        let b = coefficient_bounds(&pr, 0.5).unwrap();
        assert!((b.p0 - 2.0).abs() < 1e-12);
        assert!((b.p1 - (2.0 + 1.0f64.sin())).abs() < 1e-12);
        assert!((b.q1 - 3.0).abs() < 1e-14);
        assert!((b.q1_hat - 3.0).abs() < 1e-14);
    }

    #[test]
    fn residual_of_discrete_solution_vanishes() {
        let pr = constant_problem(201, 0.0, 1.0, 1.0, -1.0, 1.0, (0.0, 0.0));
        let u = solve(&pr).unwrap();
        assert!(residual(&pr, &u).unwrap() < 1e-10);

        let zero = constant_problem(201, 0.0, 1.0, 1.0, 0.0, 0.0, (0.0, 0.0));
        let u0 = solve(&zero).unwrap();
        assert!(residual(&zero, &u0).unwrap() < 1e-14);
    }

    #[test]
    fn manufactured_solution_residual_order() {
        // u = sin(pi x) with p = 1, q = 0 forces f = -pi^2 sin(pi x)
        let res = |n: usize| {
            let g: Grid<f64> = Grid::new(0.0, 1.0, n).unwrap();
            let p = SampledFunction::from_fn_c2(g.clone(), |_| 1.0, |_| 0.0, |_| 0.0).unwrap();
            let q = SampledFunction::from_fn_c2(g.clone(), |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
            let pi = std::f64::consts::PI;
            let f = SampledFunction::from_fn(g.clone(), |x| -pi * pi * (pi * x).sin()).unwrap();
            let pr = SturmLiouvilleProblem::new(p, q, f, 0.0, 0.0).unwrap();
            let u = SampledFunction::from_fn(g, |x| (pi * x).sin()).unwrap();
            residual(&pr, &u).unwrap()
        };
        let r = res(101) / res(201);
        assert!((3.5..=4.5).contains(&r), "residual order ratio {r}");
    }

    #[test]
    fn deterministic_solves_are_bit_identical() {
        let pr = constant_problem(401, 0.0, 1.0, 1.0, -1.0, 1.0, (0.3, -0.7));
        let u1 = solve(&pr).unwrap();
        let u2 = solve(&pr).unwrap();
        assert_eq!(u1.values(), u2.values());
    }
}

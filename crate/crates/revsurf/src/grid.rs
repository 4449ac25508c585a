//! Uniform 1-D grids, second-order finite differences, and the discrete
//! C^k / Hölder norms every other module consumes.
//!
//! Norm conventions (k = 0, 1, 2, exponent α ∈ (0,1)):
//!
//! * `‖u‖_k` — running sum of grid maxima of |u|, |u′|, …, |u^(k)|,
//! * `[u]_{k+α}` — exhaustive pairwise Hölder quotient of u^(k),
//! * `‖u‖_{k+α} = ‖u‖_k + [u]_{k+α}`.
//!
//! Hölder seminorms are computed by a full O(n²) pair scan; correctness as
//! a test oracle outranks speed at the grid sizes used here.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Scalar};

#[derive(Debug)]
struct GridInner<F> {
    a: F,
    b: F,
    n: usize,
    spacing: F,
    nodes: Vec<F>,
}

/// Uniform grid on `[a, b]` with `n >= 3` nodes.
///
/// Node `i` is `a + (b-a)*i/(n-1)`, so both endpoints are reproduced
/// exactly and every node is bit-identical across calls.
#[derive(Debug, Clone)]
pub struct Grid<F>(Arc<GridInner<F>>);

impl<F: Scalar> Grid<F> {
    pub fn new(a: F, b: F, n: usize) -> Result<Self> {
        let valid = b > a && n >= 3 && a.is_finite() && b.is_finite();
        if !valid {
            return Err(Error::DegenerateInterval {
                a: to_f64(a),
                b: to_f64(b),
                n,
            });
        }
        let len = b - a;
        let denom = from_usize::<F>(n - 1);
        let spacing = len / denom;
        let nodes = (0..n)
            .map(|i| a + len * from_usize::<F>(i) / denom)
            .collect();
        Ok(Grid(Arc::new(GridInner {
            a,
            b,
            n,
            spacing,
            nodes,
        })))
    }

    pub fn a(&self) -> F {
        self.0.a
    }

    pub fn b(&self) -> F {
        self.0.b
    }

    pub fn len(&self) -> usize {
        self.0.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> F {
        self.0.spacing
    }

    /// Interval length b - a.
    pub fn interval_length(&self) -> F {
        self.0.b - self.0.a
    }

    pub fn node(&self, i: usize) -> F {
        self.0.nodes[i]
    }

    pub fn nodes(&self) -> &[F] {
        &self.0.nodes
    }

    /// Two grids are compatible when they discretize the same interval
    /// with the same resolution.
    pub fn compatible(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.a == other.0.a && self.0.b == other.0.b && self.0.n == other.0.n)
    }
}

/// Convenience constructor mirroring the library's naming elsewhere.
pub fn uniform_grid<F: Scalar>(a: F, b: F, n: usize) -> Result<Grid<F>> {
    Grid::new(a, b, n)
}

/// A function sampled on a uniform grid, carrying first and second
/// derivatives: analytic when supplied, second-order finite differences
/// otherwise (computed once at construction).
#[derive(Debug, Clone)]
pub struct SampledFunction<F> {
    grid: Grid<F>,
    values: Vec<F>,
    d1: Vec<F>,
    d2: Vec<F>,
    analytic: bool,
}

fn ensure_finite<F: Scalar>(vs: &[F]) -> Result<()> {
    if vs.iter().any(|v| !v.is_finite()) {
        Err(Error::NonFiniteSample)
    } else {
        Ok(())
    }
}

/// Second-order finite differences of raw samples: central stencils at
/// interior nodes, one-sided second-order stencils at the endpoints.
fn fd_values<F: Scalar>(values: &[F], h: F, order: u8) -> Vec<F> {
    let n = values.len();
    let two = lit::<F>(2.0);
    let mut out = vec![F::zero(); n];
    match order {
        1 => {
            let half = lit::<F>(0.5);
            for i in 1..n - 1 {
                out[i] = (values[i + 1] - values[i - 1]) * half / h;
            }
            let three = lit::<F>(3.0);
            let four = lit::<F>(4.0);
            out[0] = (-three * values[0] + four * values[1] - values[2]) * half / h;
            out[n - 1] = (three * values[n - 1] - four * values[n - 2] + values[n - 3]) * half / h;
        }
        2 => {
            let h2 = h * h;
            for i in 1..n - 1 {
                out[i] = (values[i + 1] - two * values[i] + values[i - 1]) / h2;
            }
            if n >= 4 {
                let five = lit::<F>(5.0);
                let four = lit::<F>(4.0);
                out[0] = (two * values[0] - five * values[1] + four * values[2] - values[3]) / h2;
                out[n - 1] = (two * values[n - 1] - five * values[n - 2] + four * values[n - 3]
                    - values[n - 4])
                    / h2;
            } else {
                // n = 3: the central value is the only second difference
                out[0] = out[1];
                out[2] = out[1];
            }
        }
        _ => unreachable!("derivative order is 1 or 2"),
    }
    out
}

impl<F: Scalar> SampledFunction<F> {
    /// Sample with finite-difference derivatives.
    pub fn from_values(grid: Grid<F>, values: Vec<F>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        ensure_finite(&values)?;
        let d1 = fd_values(&values, grid.spacing(), 1);
        let d2 = fd_values(&values, grid.spacing(), 2);
        Ok(SampledFunction {
            grid,
            values,
            d1,
            d2,
            analytic: false,
        })
    }

    /// Sample with analytic derivatives supplied by the caller.
    pub fn with_derivatives(grid: Grid<F>, values: Vec<F>, d1: Vec<F>, d2: Vec<F>) -> Result<Self> {
        if values.len() != grid.len() || d1.len() != grid.len() || d2.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        ensure_finite(&values)?;
        ensure_finite(&d1)?;
        ensure_finite(&d2)?;
        Ok(SampledFunction {
            grid,
            values,
            d1,
            d2,
            analytic: true,
        })
    }

    pub fn from_fn(grid: Grid<F>, f: impl Fn(F) -> F) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::from_values(grid, values)
    }

    /// Sample a C² function together with its analytic derivatives.
    pub fn from_fn_c2(
        grid: Grid<F>,
        f: impl Fn(F) -> F,
        df: impl Fn(F) -> F,
        ddf: impl Fn(F) -> F,
    ) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        let d1 = grid.nodes().iter().map(|&x| df(x)).collect();
        let d2 = grid.nodes().iter().map(|&x| ddf(x)).collect();
        Self::with_derivatives(grid, values, d1, d2)
    }

    pub fn grid(&self) -> &Grid<F> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> F {
        self.values[i]
    }

    pub fn d1(&self, i: usize) -> F {
        self.d1[i]
    }

    pub fn d2(&self, i: usize) -> F {
        self.d2[i]
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn d1_values(&self) -> &[F] {
        &self.d1
    }

    pub fn d2_values(&self) -> &[F] {
        &self.d2
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.analytic
    }

    fn order_values(&self, k: u8) -> &[F] {
        match k {
            0 => &self.values,
            1 => &self.d1,
            2 => &self.d2,
            _ => unreachable!("derivative order is 0, 1 or 2"),
        }
    }

    pub fn min_value(&self) -> F {
        self.values.iter().copied().fold(self.values[0], F::min)
    }

    pub fn max_abs(&self) -> F {
        self.values.iter().fold(F::zero(), |m, v| m.max(v.abs()))
    }

    /// Nodewise combination of two samples sharing a grid; no derivative
    /// propagation (the result carries finite-difference derivatives).
    pub fn zip_values(&self, other: &Self, f: impl Fn(F, F) -> F) -> Result<Self> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(self.grid.clone(), values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let n = self.len();
        let mut values = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            values.push(self.values[i] + other.values[i]);
            d1.push(self.d1[i] + other.d1[i]);
            d2.push(self.d2[i] + other.d2[i]);
        }
        Self::with_derivatives(self.grid.clone(), values, d1, d2)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-F::one()))
    }

    /// Product with derivative propagation by the product rule.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let n = self.len();
        let two = lit::<F>(2.0);
        let mut values = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            let (u, up, upp) = (self.values[i], self.d1[i], self.d2[i]);
            let (v, vp, vpp) = (other.values[i], other.d1[i], other.d2[i]);
            values.push(u * v);
            d1.push(up * v + u * vp);
            d2.push(upp * v + two * up * vp + u * vpp);
        }
        Self::with_derivatives(self.grid.clone(), values, d1, d2)
    }

    /// Quotient with derivative propagation.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let n = self.len();
        let two = lit::<F>(2.0);
        let mut values = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            let (u, up, upp) = (self.values[i], self.d1[i], self.d2[i]);
            let (v, vp, vpp) = (other.values[i], other.d1[i], other.d2[i]);
            let w = u / v;
            let wp = (up - w * vp) / v;
            let wpp = (upp - two * wp * vp - w * vpp) / v;
            values.push(w);
            d1.push(wp);
            d2.push(wpp);
        }
        Self::with_derivatives(self.grid.clone(), values, d1, d2)
    }

    pub fn scale(&self, c: F) -> Self {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| c * v).collect(),
            d1: self.d1.iter().map(|&v| c * v).collect(),
            d2: self.d2.iter().map(|&v| c * v).collect(),
            analytic: self.analytic,
        }
    }

    /// Composite Simpson quadrature of the sample values (3/8 rule on the
    /// final three intervals when the interval count is odd).
    pub fn integrate(&self) -> F {
        simpson(&self.values, self.grid.spacing())
    }
}

/// Finite-difference derivative of `u` as a new sample on the same grid.
///
/// Central second-order stencils at interior nodes, one-sided second-order
/// stencils at the endpoints; the stencils are exact on linear (order 1)
/// and quadratic (order 2) data.
pub fn fd_derivative<F: Scalar>(u: &SampledFunction<F>, order: u8) -> Result<SampledFunction<F>> {
    if !(order == 1 || order == 2) {
        return Err(Error::MissingDerivative { order });
    }
    let values = fd_values(u.values(), u.grid().spacing(), order);
    SampledFunction::from_values(u.grid().clone(), values)
}

fn max_abs<F: Scalar>(vs: &[F]) -> F {
    vs.iter().fold(F::zero(), |m, v| m.max(v.abs()))
}

/// Discrete C^k norm: `max|u| + max|u′| + … + max|u^(k)|`.
pub fn ck_norm<F: Scalar>(u: &SampledFunction<F>, k: u8) -> F {
    let mut total = F::zero();
    for order in 0..=k.min(2) {
        total = total + max_abs(u.order_values(order));
    }
    total
}

/// Discrete Hölder seminorm `[u^(k)]_α`: exhaustive maximum of
/// `|u^(k)(x_i) - u^(k)(x_j)| / |x_i - x_j|^α` over all node pairs.
pub fn holder_seminorm<F: Scalar>(u: &SampledFunction<F>, k: u8, alpha: F) -> Result<F> {
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::InvalidExponent {
            alpha: to_f64(alpha),
        });
    }
    let vs = u.order_values(k);
    let n = vs.len();
    let h = u.grid().spacing();
    // |x_i - x_j| = (j - i) * spacing; powers precomputed once per offset
    let mut weights = Vec::with_capacity(n);
    weights.push(F::zero());
    for d in 1..n {
        weights.push(F::one() / (from_usize::<F>(d) * h).powf(alpha));
    }
    let mut best = F::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let q = (vs[i] - vs[j]).abs() * weights[j - i];
            best = best.max(q);
        }
    }
    Ok(best)
}

/// Discrete Hölder norm `‖u‖_{k+α} = ‖u‖_k + [u^(k)]_α`.
pub fn holder_norm<F: Scalar>(u: &SampledFunction<F>, k: u8, alpha: F) -> Result<F> {
    Ok(ck_norm(u, k) + holder_seminorm(u, k, alpha)?)
}

/// `‖u‖_{2+α}`, the norm the fixed-point schemes contract in.
pub fn norm_2_alpha<F: Scalar>(u: &SampledFunction<F>, alpha: F) -> Result<F> {
    holder_norm(u, 2, alpha)
}

/// All norms of a sample at the requested Hölder exponents.
#[derive(Debug, Clone)]
pub struct NormReport<F> {
    pub c0: F,
    pub c1: F,
    pub c2: F,
    /// `[u^(k)]_α` keyed by (k, α in micro-units) for reproducible ordering.
    pub holder_semis: BTreeMap<(u8, u64), F>,
    /// `‖u‖_{k+α}` keyed the same way.
    pub holder_norms: BTreeMap<(u8, u64), F>,
}

fn alpha_key<F: Scalar>(alpha: F) -> u64 {
    (to_f64(alpha) * 1e6).round() as u64
}

pub fn norm_report<F: Scalar>(u: &SampledFunction<F>, alphas: &[F]) -> Result<NormReport<F>> {
    let c0 = ck_norm(u, 0);
    let c1 = ck_norm(u, 1);
    let c2 = ck_norm(u, 2);
    let mut holder_semis = BTreeMap::new();
    let mut holder_norms = BTreeMap::new();
    for &alpha in alphas {
        for k in 0..=2u8 {
            let semi = holder_seminorm(u, k, alpha)?;
            let ck = ck_norm(u, k);
            holder_semis.insert((k, alpha_key(alpha)), semi);
            holder_norms.insert((k, alpha_key(alpha)), ck + semi);
        }
    }
    Ok(NormReport {
        c0,
        c1,
        c2,
        holder_semis,
        holder_norms,
    })
}

/// Composite Simpson quadrature with uniform spacing; falls back to the
/// 3/8 rule on the trailing three intervals when the count is odd.
pub fn simpson<F: Scalar>(values: &[F], h: F) -> F {
    let n = values.len();
    assert!(n >= 2, "quadrature needs at least two nodes");
    let two = lit::<F>(2.0);
    let three = lit::<F>(3.0);
    let four = lit::<F>(4.0);
    let intervals = n - 1;
    if intervals == 1 {
        return h * (values[0] + values[1]) / two;
    }
    if intervals == 2 {
        return h / three * (values[0] + four * values[1] + values[2]);
    }
    let (simpson_end, tail) = if intervals.is_multiple_of(2) {
        (n - 1, F::zero())
    } else {
        // 3/8 rule on the last three intervals keeps global order 4
        let m = n - 4;
        let eighth = lit::<F>(0.375);
        let t = eighth
            * h
            * (values[m] + three * values[m + 1] + three * values[m + 2] + values[m + 3]);
        (m, t)
    };
    let mut acc = F::zero();
    if simpson_end >= 2 {
        acc = values[0] + values[simpson_end];
        let mut i = 1;
        while i < simpson_end {
            acc = acc + four * values[i];
            i += 2;
        }
        let mut i = 2;
        while i < simpson_end {
            acc = acc + two * values[i];
            i += 2;
        }
        acc = acc * h / three;
    }
    acc + tail
}

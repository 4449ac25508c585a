//! Catenaries `f(x) = c1 cosh(x/c1 + c2)` — the minimal surfaces of
//! revolution — with boundary fitting between coaxial rings, closed-form
//! area, and the critical ring-separation ratio past which no catenoid
//! spans the rings.
//!
//! For equal-radius rings the fit reduces to roots of
//! `g(c) = c cosh(h/(2c)) - r`. `g` is strictly decreasing up to a single
//! interior minimum and increasing after it, so there are at most two
//! roots: the outer branch (larger `c`, the stable one) and the inner
//! branch. Existence is decided from the minimum of `g`, located by
//! ternary search, and each root is then bisected to full precision.

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::scalar::{lit, to_f64, Scalar};

/// `f(x) = c1 cosh(x/c1 + c2)`; satisfies `f f″ = 1 + f′²` identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Catenary<F> {
    pub c1: F,
    pub c2: F,
}

/// Two coaxial rings of common radius `r > 0` at distance `h > 0`,
/// centered on `x ∈ [-h/2, h/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingBoundary<F> {
    pub r: F,
    pub h: F,
}

impl<F: Scalar> RingBoundary<F> {
    pub fn new(r: F, h: F) -> Result<Self> {
        if !(r > F::zero() && h > F::zero()) || !r.is_finite() || !h.is_finite() {
            return Err(Error::DegenerateInterval {
                a: 0.0,
                b: to_f64(h),
                n: 0,
            });
        }
        Ok(RingBoundary { r, h })
    }

    pub fn interval(&self, n: usize) -> Result<Grid<F>> {
        let half = lit::<F>(0.5);
        Grid::new(-half * self.h, half * self.h, n)
    }
}

/// Both catenary branches through equal-radius rings, labeled by scale.
#[derive(Debug, Clone, Copy)]
pub struct CatenaryBranches<F> {
    /// Larger scale; the stable branch.
    pub outer: Catenary<F>,
    /// Smaller scale, when distinct from the outer branch.
    pub inner: Option<Catenary<F>>,
}

impl<F: Scalar> Catenary<F> {
    pub fn eval(&self, x: F) -> F {
        self.c1 * (x / self.c1 + self.c2).cosh()
    }

    pub fn deriv(&self, x: F) -> F {
        (x / self.c1 + self.c2).sinh()
    }

    pub fn deriv2(&self, x: F) -> F {
        (x / self.c1 + self.c2).cosh() / self.c1
    }

    /// Sample onto a grid with analytic derivatives.
    pub fn sample(&self, grid: Grid<F>) -> Result<SampledFunction<F>> {
        SampledFunction::from_fn_c2(
            grid,
            |x| self.eval(x),
            |x| self.deriv(x),
            |x| self.deriv2(x),
        )
    }

    /// Closed-form area of the surface of revolution over `[xl, xr]`:
    /// `2π c² [u/2 + sinh(2u)/4]` evaluated between `u = x/c + c2`.
    pub fn area_between(&self, xl: F, xr: F) -> F {
        let two = lit::<F>(2.0);
        let four = lit::<F>(4.0);
        let pi = lit::<F>(std::f64::consts::PI);
        let ul = xl / self.c1 + self.c2;
        let ur = xr / self.c1 + self.c2;
        let prim = |u: F| u / two + (two * u).sinh() / four;
        two * pi * self.c1 * self.c1 * (prim(ur) - prim(ul))
    }
}

/// `g(c) = c cosh(h/(2c)) - r`, the symmetric fit residual.
fn fit_residual<F: Scalar>(c: F, r: F, h: F) -> F {
    let half = lit::<F>(0.5);
    c * (half * h / c).cosh() - r
}

fn bisect<F: Scalar>(mut lo: F, mut hi: F, f: impl Fn(F) -> F, tol: F) -> F {
    let half = lit::<F>(0.5);
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = half * (lo + hi);
        if hi - lo < tol {
            return mid;
        }
        let fm = f(mid);
        if (fm >= F::zero()) == (flo >= F::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    half * (lo + hi)
}

/// Fit the symmetric equal-radius ring problem.
///
/// Returns the outer (stable) branch and, when distinct, the inner one;
/// fails with [`Error::NoSolution`] past the critical separation.
pub fn fit<F: Scalar>(boundary: &RingBoundary<F>) -> Result<CatenaryBranches<F>> {
    let r = boundary.r;
    let h = boundary.h;
    let g = |c: F| fit_residual(c, r, h);
    let third = lit::<F>(1.0 / 3.0);
    let two_thirds = lit::<F>(2.0 / 3.0);
    // g is unimodal with a single interior minimum: ternary search on a
    // bracket wide enough for every ring configuration that can span
    let mut lo = h / lit::<F>(40.0);
    let mut hi = r.max(h);
    for _ in 0..300 {
        let m1 = lo + (hi - lo) * third;
        let m2 = lo + (hi - lo) * two_thirds;
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < lit::<F>(1e-14) * hi.max(F::one()) {
            break;
        }
    }
    let c_min = lit::<F>(0.5) * (lo + hi);
    let g_min = g(c_min);
    if g_min > F::zero() {
        return Err(Error::NoSolution {
            ratio: to_f64(h / r),
        });
    }
    let tol = lit::<F>(1e-13) * r.max(F::one());
    // outer root: g increases on [c_min, hi_outer]; g(r) >= 0 always
    let hi_outer = r.max(h).max(c_min + c_min);
    let outer_c = bisect(c_min, hi_outer, g, tol);
    // inner root: g decreases on (0, c_min]
    let mut lo_inner = c_min * lit::<F>(0.5);
    while g(lo_inner) < F::zero() {
        lo_inner = lo_inner * lit::<F>(0.5);
        if lo_inner < lit::<F>(1e-300) {
            break;
        }
    }
    let inner_c = bisect(lo_inner, c_min, |c| -g(c), tol);
    let outer = Catenary {
        c1: outer_c,
        c2: F::zero(),
    };
    let inner = if (outer_c - inner_c).abs() > lit::<F>(1e-9) * outer_c {
        Some(Catenary {
            c1: inner_c,
            c2: F::zero(),
        })
    } else {
        None
    };
    Ok(CatenaryBranches { outer, inner })
}

/// Fit a catenary through two arbitrary positive boundary points by a
/// 2-D Newton iteration on `(c1, c2)`, seeded by the caller.
pub fn fit_through_points<F: Scalar>(
    xl: F,
    yl: F,
    xr: F,
    yr: F,
    seed: Catenary<F>,
) -> Result<Catenary<F>> {
    let mut c1 = seed.c1;
    let mut c2 = seed.c2;
    let tol = lit::<F>(1e-14) * (yl.abs() + yr.abs());
    for _ in 0..100 {
        let cat = Catenary { c1, c2 };
        let f1 = cat.eval(xl) - yl;
        let f2 = cat.eval(xr) - yr;
        if f1.abs() + f2.abs() < tol {
            return Ok(cat);
        }
        // partials of c1 cosh(x/c1 + c2)
        let d = |x: F| {
            let u = x / c1 + c2;
            let dc1 = u.cosh() - (x / c1) * u.sinh();
            let dc2 = c1 * u.sinh();
            (dc1, dc2)
        };
        let (a11, a12) = d(xl);
        let (a21, a22) = d(xr);
        let det = a11 * a22 - a12 * a21;
        if det.abs() < lit::<F>(1e-300) {
            break;
        }
        let s1 = (f1 * a22 - f2 * a12) / det;
        let s2 = (a11 * f2 - a21 * f1) / det;
        let mut step = F::one();
        // keep c1 positive
        while c1 - step * s1 <= F::zero() {
            step = step * lit::<F>(0.5);
            if step < lit::<F>(1e-12) {
                break;
            }
        }
        c1 = c1 - step * s1;
        c2 = c2 - step * s2;
    }
    let cat = Catenary { c1, c2 };
    let res = (cat.eval(xl) - yl).abs() + (cat.eval(xr) - yr).abs();
    if res < lit::<F>(1e-9) * (yl.abs() + yr.abs()) {
        Ok(cat)
    } else {
        Err(Error::NoSolution {
            ratio: to_f64(res),
        })
    }
}

/// Area functional `2π ∫ f √(1+f′²) dx` of a sampled profile (Simpson).
pub fn area_of_profile<F: Scalar>(f: &SampledFunction<F>) -> Result<F> {
    let min = f.min_value();
    if min <= F::zero() {
        return Err(Error::NonPositiveProfile {
            min_value: to_f64(min),
        });
    }
    let two_pi = lit::<F>(2.0 * std::f64::consts::PI);
    let integrand: Vec<F> = (0..f.len())
        .map(|i| {
            let fp = f.d1(i);
            f.value(i) * (F::one() + fp * fp).sqrt()
        })
        .collect();
    Ok(two_pi * crate::grid::simpson(&integrand, f.grid().spacing()))
}

/// Max interior residual of the minimal-surface equation `f f″ = 1 + f′²`.
pub fn minimal_residual<F: Scalar>(f: &SampledFunction<F>) -> Result<F> {
    let min = f.min_value();
    if min <= F::zero() {
        return Err(Error::NonPositiveProfile {
            min_value: to_f64(min),
        });
    }
    let mut worst = F::zero();
    for i in 1..f.len() - 1 {
        let fp = f.d1(i);
        let r = f.value(i) * f.d2(i) - F::one() - fp * fp;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Critical ratio `h/r` past which the symmetric fit has no solution,
/// found by bisection on solvability, converged to 1e-8.
pub fn critical_ratio<F: Scalar>() -> F {
    let solvable = |ratio: F| {
        fit(&RingBoundary {
            r: F::one(),
            h: ratio,
        })
        .is_ok()
    };
    let mut lo = lit::<F>(1.2);
    let mut hi = lit::<F>(1.4);
    debug_assert!(solvable(lo) && !solvable(hi));
    let half = lit::<F>(0.5);
    // 0.2 / 2^60 is far below the 1e-8 target; the early break handles
    // scalar types whose precision bottoms out sooner
    for _ in 0..60 {
        if hi - lo <= lit::<F>(1e-9) {
            break;
        }
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if solvable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    half * (lo + hi)
}

//! The core compiles and runs for any `num_traits` float; `f32` exercises
//! the generic path end to end (with tolerances scaled to its precision).

use revsurf::bvp::{self, SturmLiouvilleProblem};
use revsurf::catenary::{self, RingBoundary};
use revsurf::grid::{self, Grid, SampledFunction};

#[test]
fn grid_and_norms_work_in_f32() {
    let g: Grid<f32> = Grid::new(0.0f32, 1.0, 101).unwrap();
    assert!((g.spacing() - 0.01).abs() < 1e-6);
    let u = SampledFunction::from_fn(g, |x: f32| x * x).unwrap();
    let du = grid::fd_derivative(&u, 1).unwrap();
    for (i, &x) in u.grid().nodes().iter().enumerate() {
        assert!((du.value(i) - 2.0 * x).abs() < 1e-4);
    }
    assert!((grid::ck_norm(&u, 1) - 3.0).abs() < 1e-4);
    let semi = grid::holder_seminorm(&u, 0, 0.5f32).unwrap();
    assert!(semi > 1.0 && semi < 1.2);
}

#[test]
fn bvp_solves_in_f32() {
    let g: Grid<f32> = Grid::new(0.0f32, 1.0, 201).unwrap();
    let one = SampledFunction::from_fn_c2(g.clone(), |_| 1.0f32, |_| 0.0, |_| 0.0).unwrap();
    let zero = SampledFunction::from_fn_c2(g.clone(), |_| 0.0f32, |_| 0.0, |_| 0.0).unwrap();
    let rhs = SampledFunction::from_fn_c2(g.clone(), |_| 1.0f32, |_| 0.0, |_| 0.0).unwrap();
    let problem = SturmLiouvilleProblem::new(one, zero, rhs, 0.0, 0.0).unwrap();
    let u = bvp::solve(&problem).unwrap();
    for (i, &x) in g.nodes().iter().enumerate() {
        assert!((u.value(i) - 0.5 * x * (x - 1.0)).abs() < 1e-4);
    }
}

#[test]
fn catenary_fit_works_in_f32() {
    let rings: RingBoundary<f32> = RingBoundary::new(1.0f32, 1.0).unwrap();
    let branches = catenary::fit(&rings).unwrap();
    assert!((branches.outer.c1 - 0.8483).abs() < 1e-3);
    let area = branches.outer.area_between(-0.5, 0.5);
    assert!((area - 5.9918).abs() < 1e-2);
}

#[test]
fn critical_ratio_terminates_in_f32() {
    let rho: f32 = catenary::critical_ratio();
    assert!((rho - 1.32549).abs() < 1e-3, "f32 critical ratio {rho}");
}

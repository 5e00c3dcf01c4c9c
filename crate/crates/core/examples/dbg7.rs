use feq_core::deviation::{single_radius_scan, SineKernel};
use feq_core::families::construct_case;
use feq_core::oracle::draw_params;
use feq_core::*;
use num_complex::Complex64;
use std::sync::Arc;

fn main() {
    let zg = Arc::new(GroupSpec::z());
    let params = draw_params(5, 1, 0.01);
    let b = construct_case(Arc::clone(&zg), &params).unwrap();
    let (f, g, h) = (&b.f, &b.g, &b.h);
    let sched = default_schedule();
    let PairDependence::Dependent { lambda, residual: phi_dep, .. } =
        dependence_mod_bounded(f, h, &sched, DEFAULT_TAU).unwrap() else { panic!() };
    let phi_hat = GFunction::combine(&[
        (Complex64::ONE, g),
        (lambda * lambda * 0.5, f),
        (lambda, &phi_dep),
    ]).unwrap();
    let kernel = SineKernel { f0: f, g0: &phi_hat };
    for r in [16u32, 32, 64, 128, 256, 384, 512] {
        let (sup, rel) = single_radius_scan(&kernel, zg.as_ref(), r).unwrap();
        println!("r {r}: sup {sup:.6e} rel {rel:.3e}");
    }
}

use feq_core::classifier::fits::*;
use feq_core::funcspace::FnDescriptor;
use feq_core::families::construct_case;
use feq_core::oracle::draw_params;
use feq_core::hyers::twist_by_character;
use feq_core::*;
use num_complex::Complex64;
use std::sync::Arc;

fn main() {
    let zg = Arc::new(GroupSpec::z());
    let params = draw_params(7, 3, 0.01);
    let build = construct_case(Arc::clone(&zg), &params).unwrap();
    let (f, g, h) = (&build.f, &build.g, &build.h);
    // triple fit
    let sched = default_schedule();
    let TripleDependence::Dependent { alpha, beta, residual, .. } =
        triple_dependence(g, f, h, &sched, DEFAULT_TAU).unwrap() else { panic!() };
    println!("alpha {alpha} beta {beta}");
    let phi3 = residual;
    let mut angles = rough_character_angles(&phi3).unwrap();
    println!("rough theta: {}", angles[0]);
    refine_character_angles(f, &mut angles, 4.0).unwrap();
    println!("refined theta (shrink4 vs f): {}", angles[0]);
    let m1 = f.with_desc(character_descriptor(&angles)).unwrap();
    let u1 = twist_by_character(f, &m1).unwrap();
    let probes1 = probe_second_differences(&u1, 128, 0.05).unwrap();
    println!("probe1 ratio: {:?}", probes1[0].growth_ratio);
    let fit1 = fit_exp_structure(&u1, &probes1).unwrap();
    println!("fit1 mu {} l2 {} a {}", fit1.mu[0], fit1.lambda_sq, fit1.a[0]);
    // theta correction
    let mprime = f.with_desc(FnDescriptor::ExpChar { mu: fit1.mu.clone() }).unwrap();
    let w = GFunction::combine(&[(Complex64::ONE, &u1), (-fit1.lambda_sq, &mprime)]).unwrap();
    let dirs = vec![if fit1.mu[0].re > 0.0 { -1i64 } else { 1 }];
    let mut eps = vec![0.0];
    refine_character_angles_directional(&w, &mut eps, 2.0, &dirs).unwrap();
    println!("eps correction: {}", eps[0]);
    let theta2 = angles[0] + eps[0];
    println!("theta2: {theta2}  (drawn theta 3.4437163860283833, wrapped {})", 3.4437163860283833 - 2.0*std::f64::consts::PI);
    let m2 = f.with_desc(character_descriptor(&[theta2])).unwrap();
    let u2 = twist_by_character(f, &m2).unwrap();
    let probes2 = probe_second_differences(&u2, 128, 0.05).unwrap();
    println!("probe2 ratio: {:?}", probes2[0].growth_ratio);
    let fit2 = fit_exp_structure(&u2, &probes2).unwrap();
    println!("fit2 mu {} l2 {} a {}", fit2.mu[0], fit2.lambda_sq, fit2.a[0]);
}

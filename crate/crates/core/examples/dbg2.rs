use feq_core::classifier::{classify, ClassifierConfig};
use feq_core::funcspace::FnDescriptor;
use feq_core::oracle::draw_params;
use feq_core::families::construct_case;
use feq_core::*;
use num_complex::Complex64;
use std::sync::Arc;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    let zg = Arc::new(GroupSpec::z());
    if which == "doubling" {
        let gf = |d: FnDescriptor| GFunction::new(Arc::clone(&zg), d).unwrap();
        let two_x = FnDescriptor::ExpChar { mu: vec![Complex64::new(2f64.ln(), 0.0)] };
        let x = FnDescriptor::additive1(Complex64::ONE);
        let f = gf(FnDescriptor::sum(vec![two_x.clone(), x]));
        let g = gf(FnDescriptor::one());
        let h = gf(two_x.minus(FnDescriptor::one()));
        let cfg = ClassifierConfig { schedule: vec![8, 16, 24], ..ClassifierConfig::default() };
        // direct triple test
        match triple_dependence(&g, &f, &h, &cfg.schedule, cfg.tau) {
            Ok(t) => match t {
                TripleDependence::Dependent { alpha, beta, residual_bound, .. } =>
                    println!("triple dep: alpha {alpha} beta {beta} bound {residual_bound}"),
                TripleDependence::Independent { residual_growth } =>
                    println!("triple INDEP growth {residual_growth}"),
            },
            Err(e) => println!("triple err {e}"),
        }
        let report = classify(&f, &g, &h, &cfg).unwrap();
        println!("{}", serde_json::to_string_pretty(&report.branch_trace).unwrap());
    } else {
        let params = draw_params(7, 3, 0.01);
        println!("params: {}", serde_json::to_string(&params).unwrap());
        let build = construct_case(Arc::clone(&zg), &params).unwrap();
        let report = classify(&build.f, &build.g, &build.h, &ClassifierConfig::default()).unwrap();
        println!("{}", serde_json::to_string_pretty(&report.branch_trace).unwrap());
    }
}

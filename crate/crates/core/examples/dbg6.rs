use feq_core::classifier::{classify, ClassifierConfig};
use feq_core::deviation::{kernel_verdict_hardened, CosineSineKernel, SineKernel};
use feq_core::families::construct_case;
use feq_core::oracle::draw_params;
use feq_core::*;
use std::sync::Arc;

fn main() {
    let case: u8 = std::env::args().nth(1).unwrap().parse().unwrap();
    let seed: u64 = std::env::args().nth(2).unwrap().parse().unwrap();
    let zg = Arc::new(GroupSpec::z());
    let params = draw_params(case, seed, 0.01);
    println!("params: {}", serde_json::to_string(&params).unwrap());
    let b = construct_case(Arc::clone(&zg), &params).unwrap();
    let cfg = ClassifierConfig::default();
    let (rep, verdict) = kernel_verdict_hardened(
        &CosineSineKernel { f: &b.f, g: &b.g, h: &b.h },
        b.f.group(),
        &cfg.schedule,
        cfg.tau,
    ).unwrap();
    println!("psi sup {} verdict {:?} trace {:?}", rep.sup, verdict, rep.trace);
    let report = classify(&b.f, &b.g, &b.h, &cfg).unwrap();
    for step in &report.branch_trace {
        println!("{} -> {} {}", step.step, step.verdict, serde_json::to_string(&step.values).unwrap().chars().take(220).collect::<String>());
    }
    // for case 5: also test the sine kernel of (f, g0-true)
    if case == 5 {
        let g0 = GFunction::new(Arc::clone(&zg), params.m1.clone().map(|m1| {
            feq_core::funcspace::FnDescriptor::scale(num_complex::Complex64::new(0.5,0.0),
                feq_core::funcspace::FnDescriptor::sum(vec![m1, params.m2.clone().unwrap()]))
        }).unwrap_or(params.m.clone().unwrap())).unwrap();
        let (rep2, v2) = kernel_verdict_hardened(&SineKernel { f0: &b.f, g0: &g0 }, b.f.group(), &cfg.schedule, cfg.tau).unwrap();
        println!("sine kernel vs TRUE g0: sup {} verdict {:?}", rep2.sup, v2);
    }
}

use feq_core::classifier::fits::{fit_exp_structure, probe_second_differences, ratio_mean, axis_samples};
use feq_core::funcspace::FnDescriptor;
use feq_core::*;
use num_complex::Complex64;
use std::sync::Arc;

fn main() {
    let zg = Arc::new(GroupSpec::z());
    // Synthetic U matching the seed-3 case-7 instance after the twist:
    // U = lambda^2 e^{mu x} + a x + bounded noise.
    let lambda = Complex64::new(0.5397874649392508, -1.5586652707166808);
    let l2 = lambda * lambda;
    let mu = Complex64::new(0.038075276324477346, -0.5925437014913006);
    let a = Complex64::new(-0.5535839717914772, 1.714877074806012);
    let u = GFunction::new(Arc::clone(&zg), FnDescriptor::sum(vec![
        FnDescriptor::scale(l2, FnDescriptor::ExpChar { mu: vec![mu] }),
        FnDescriptor::Additive { coeffs: vec![a] },
        FnDescriptor::noise(77, 0.02),
    ])).unwrap();
    println!("true l2 {l2} mu {mu} a {a}");
    let probes = probe_second_differences(&u, 128, 0.05).unwrap();
    println!("probe growing: {:?} ratio {:?}", probes[0].growing, probes[0].growth_ratio);
    // raw ratio mean on d2 from axis samples
    let s = axis_samples(&u, 0, 512).unwrap();
    let d2: Vec<Complex64> = s.windows(3).map(|w| w[2] - (w[1]+w[1]) + w[0]).collect();
    let n = d2.len();
    println!("ratio_mean top half: {:?}", ratio_mean(&d2[(3*n/4)..]));
    match fit_exp_structure(&u, &probes) {
        Ok(fit) => println!("fit: mu {} l2 {} a {}", fit.mu[0], fit.lambda_sq, fit.a[0]),
        Err(e) => println!("fit err {e}"),
    }
}

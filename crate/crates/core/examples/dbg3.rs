use feq_core::dependence::lawson_minimax;
use feq_core::funcspace::FnDescriptor;
use feq_core::*;
use num_complex::Complex64;
use std::sync::Arc;

fn main() {
    let zg = Arc::new(GroupSpec::z());
    let gf = |d: FnDescriptor| GFunction::new(Arc::clone(&zg), d).unwrap();
    let two_x = FnDescriptor::ExpChar { mu: vec![Complex64::new(2f64.ln(), 0.0)] };
    let x = FnDescriptor::additive1(Complex64::ONE);
    let f = gf(FnDescriptor::sum(vec![two_x.clone(), x]));
    let g = gf(FnDescriptor::one());
    let h = gf(two_x.minus(FnDescriptor::one()));
    // narrow window = 48
    let w = zg.window(48);
    let fv = f.eval_many(&w).unwrap();
    let hv = h.eval_many(&w).unwrap();
    let gv = g.eval_many(&w).unwrap();
    match lawson_minimax(&[fv.clone(), hv.clone()], &gv, 80) {
        Ok(c) => println!("narrow fit: {} {}", c[0], c[1]),
        Err(e) => println!("narrow fit err: {e}"),
    }
    // far point values
    for xx in [512i64, -1048576] {
        let p = Element::LatticePoint(vec![xx]);
        println!("x={xx}: f={:?} h={:?} g={:?}", f.eval(&p).map(|v| v.norm()), h.eval(&p).map(|v| v.norm()), g.eval(&p).map(|v| v.norm()));
    }
}

use feq_core::classifier::ClassifierConfig;
use feq_core::oracle::roundtrip;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cases: Vec<u8> = if args.len() > 1 {
        args[1].split(',').map(|s| s.parse().unwrap()).collect()
    } else {
        vec![1, 2, 3, 4, 5, 6, 7, 8, 10]
    };
    let seeds: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(12);
    let amp: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.01);
    let cfg = ClassifierConfig::default();
    for case in cases {
        let mut pass = 0;
        let mut fails = Vec::new();
        for seed in 1..=seeds {
            match roundtrip(case, seed, amp, &cfg) {
                Ok(out) => {
                    if out.passed {
                        pass += 1;
                    } else {
                        fails.push(format!(
                            "seed {} -> {:?} exact={} err={:.2e} wrong={} {}",
                            seed, out.case_out, out.exact, out.param_error, out.wrong_case,
                            out.unclassified.unwrap_or_default()
                        ));
                    }
                }
                Err(e) => fails.push(format!("seed {seed} -> ERROR {e}")),
            }
        }
        println!("case {case}: {pass}/{seeds}");
        for f in fails.iter().take(4) {
            println!("   {f}");
        }
    }
}

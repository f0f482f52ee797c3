//! Metropolis steps per second and adaptive iteration counts for a few codes.
//!
//! cargo run --release -p rmcount --example throughput [m r constraint tau t delta]
//!
//! RMCOUNT_INIT=zero|random and RMCOUNT_WARM=1 adjust the adaptive run.

use std::time::Instant;

use rmcount::{estimate_adaptive, ChainState, Constraint, EstimatorConfig, Metropolis, RmCode, RngStream};

fn steps_per_second(m: usize, r: usize, c: Constraint) -> f64 {
    let code = RmCode::new(m, r).unwrap();
    let mut g = RngStream::new(0).generator();
    let mut state = ChainState::new(code.random_codeword(&mut g), &c);
    let mut kernel = Metropolis::new(&code, &c, 1.0);
    let steps = 2_000_000;
    let start = Instant::now();
    kernel.run(&mut state, steps, &mut g);
    steps as f64 / start.elapsed().as_secs_f64()
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() == 6 {
        let code = RmCode::new(args[0].parse().unwrap(), args[1].parse().unwrap()).unwrap();
        let c: Constraint = args[2].parse().unwrap();
        let mut cfg = EstimatorConfig::with_samples(args[4].parse().unwrap(), args[3].parse().unwrap());
        if let Ok(init) = std::env::var("RMCOUNT_INIT") {
            cfg.init = init.parse().unwrap();
        }
        cfg.warm_start = std::env::var("RMCOUNT_WARM").is_ok();
        let start = Instant::now();
        let est = estimate_adaptive(&code, &c, args[5].parse().unwrap(), &cfg, 0).unwrap();
        println!("{est}  ({:.1}s)", start.elapsed().as_secs_f64());
        return;
    }
    for (m, r, c) in [
        (3, 1, Constraint::Rll(1)),
        (5, 3, Constraint::Rll(1)),
        (7, 3, Constraint::Rll(1)),
        (8, 5, Constraint::Rll(1)),
        (9, 4, Constraint::ConstantWeight(80)),
    ] {
        println!("RM({m},{r}) {c}: {:.2e} steps/s", steps_per_second(m, r, c));
    }
}

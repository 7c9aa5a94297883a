use recnum::experiment::{build_population, ExperimentConfig};
use recnum::learner::*;
use recnum::regress::fit_ols;

fn main() {
    let config = ExperimentConfig { master_seed: 2, ..ExperimentConfig::default() };
    let (population, _) = build_population(&config).unwrap();
    let p = NeedDistribution::power_law();
    let mut pts_power = Vec::new();
    let mut pts_unif = Vec::new();
    for entry in &population {
        let sys = &entry.system;
        let bits = recnum::mdl::irregularity(sys, 1, 99).unwrap().bits;
        let mut auc_p = 0.0;
        let mut auc_u = 0.0;
        const REPS: u64 = 3;
        for rep in 0..REPS {
            let run_seed = recnum::seed::derive(2, &[recnum::seed::tag(sys.name()), recnum::seed::tag("run"), rep]);
            let tc = TrainConfig { epochs: 10_000, seed: run_seed, ..TrainConfig::default() };
            let mut trace_p = Vec::new();
            let mut trace_u = Vec::new();
            train_run(sys, &p, tc, 100, |epoch, params| {
                let mut accp = 0.0;
                let mut accu = 0.0;
                for n in 1..=99u32 {
                    let mu = params.forward(sys.numeral(n).unwrap()).unwrap();
                    if (100.0 * mu).round() == f64::from(n) {
                        accp += p.pmf(n);
                        accu += 1.0 / 99.0;
                    }
                }
                trace_p.push((epoch, accp));
                trace_u.push((epoch, accu));
            }).unwrap();
            auc_p += recnum::harness::auc(&trace_p).unwrap() / REPS as f64;
            auc_u += recnum::harness::auc(&trace_u).unwrap() / REPS as f64;
        }
        println!("{:28} bits {:8.1} auc_power {:.4} auc_unif {:.4}", sys.name(), bits, auc_p, auc_u);
        pts_power.push((bits, auc_p));
        pts_unif.push((bits, auc_u));
    }
    let f1 = fit_ols(&pts_power).unwrap();
    let f2 = fit_ols(&pts_unif).unwrap();
    println!("TRUE slope power   {:+.3e}", f1.slope);
    println!("TRUE slope uniform {:+.3e}", f2.slope);
}

use crossbar_vmm::rng::CounterRng;
use crossbar_vmm::stats::select_best_fit;
use std::time::Instant;

#[test]
fn probe_select_seeds() {
    for data_seed in [1u64, 2, 3, 4, 5, 6, 7, 8] {
        let mut rng = CounterRng::new(data_seed);
        let samples: Vec<f64> = (0..32_000).map(|_| rng.next_normal()).collect();
        let t = Instant::now();
        let best = select_best_fit(&samples, 42).unwrap();
        println!(
            "data seed {data_seed}: {} aic={:.2} ks={:.4} elapsed={:.1}s",
            best.family_name(),
            best.aic,
            best.ks_stat,
            t.elapsed().as_secs_f64()
        );
    }
}

use std::sync::Arc;
use std::time::Instant;
use learnrec_core::evaluator::{evaluate, generate_synthetic, EvalConfig, MetricKs, SynthConfig};
use learnrec_core::profiles::{AlgorithmId, ProfileRegistry};

fn main() {
    let profiles = Arc::new(ProfileRegistry::with_builtins());
    let config = EvalConfig {
        algorithms: vec![
            AlgorithmId::Popular,
            AlgorithmId::CfInteractions,
            AlgorithmId::CfTags,
        ],
        test_fraction: 0.2,
        ks: MetricKs::default(),
    };
    for tail in [1.05f64, 1.1, 1.2, 1.3] {
        let start = Instant::now();
        let mut wins_recall = 0;
        let mut wins_cov = 0;
        let mut mp_cov_ok = 0;
        let mut mp_below = 0;
        let mut sums = [0.0f64; 6];
        let mut n_int_total = 0usize;
        for seed in 0..10u64 {
            let dataset = generate_synthetic(&SynthConfig {
                n_users: 2000,
                n_resources: 300,
                n_topics: 10,
                p_topic_click: 0.6,
                q_topic_tag: 0.95,
                activity_tail: tail,
                seed,
            })
            .unwrap();
            n_int_total += dataset.interactions.len();
            let report = evaluate(&dataset, &config, &profiles).unwrap();
            let mp = &report.rows[0];
            let cf_i = &report.rows[1];
            let cf_t = &report.rows[2];
            if cf_t.recall > cf_i.recall { wins_recall += 1; }
            if cf_t.coverage > cf_i.coverage { wins_cov += 1; }
            if mp.coverage == 1.0 { mp_cov_ok += 1; }
            if mp.recall < cf_i.recall && mp.recall < cf_t.recall { mp_below += 1; }
            sums[0] += mp.recall; sums[1] += mp.coverage;
            sums[2] += cf_i.recall; sums[3] += cf_i.coverage;
            sums[4] += cf_t.recall; sums[5] += cf_t.coverage;
        }
        println!(
            "tail={tail}: ints/seed={} | MP r={:.4} | CFi r={:.4} c={:.2} | CFt r={:.4} c={:.2} | recall {wins_recall}/10 cov {wins_cov}/10 mpcov {mp_cov_ok}/10 mp_below {mp_below}/10 | {:?}",
            n_int_total / 10, sums[0]/10.0, sums[2]/10.0, sums[3]/10.0, sums[4]/10.0, sums[5]/10.0, start.elapsed()
        );
    }
}

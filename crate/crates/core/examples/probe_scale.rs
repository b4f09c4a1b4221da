use std::sync::Arc;
use std::time::Instant;
use learnrec_core::engine::Engine;
use learnrec_core::evaluator::{generate_synthetic, SynthConfig};
use learnrec_core::profiles::{ProfileRegistry, Signal};

fn main() {
    // exact ndcg constant
    let idcg = 1.0f64 + 1.0 / 3.0f64.log2();
    println!("idcg = {:.12}, ndcg = {:.12}", idcg, 1.5 / idcg);

    for (nu, nr, tail) in [(20000u32, 2000u32, 1.25f64), (15000, 2000, 1.18), (12000, 1500, 1.15)] {
        let t0 = Instant::now();
        let ds = generate_synthetic(&SynthConfig {
            n_users: nu, n_resources: nr, n_topics: 20,
            p_topic_click: 0.6, q_topic_tag: 0.95,
            activity_tail: tail, seed: 42,
        }).unwrap();
        let n = ds.interactions.len();
        let store = Arc::new(ds.into_store());
        let built = t0.elapsed();
        let engine = Engine::new(Arc::clone(&store), Arc::new(ProfileRegistry::with_builtins()));

        let users: Vec<String> = store.user_ids();
        let t1 = Instant::now();
        let mut worst = std::time::Duration::ZERO;
        let sample: Vec<&String> = users.iter().step_by(users.len() / 200).collect();
        for u in &sample {
            let t = Instant::now();
            let _ = engine.recommend_cf(u, Some(20), Some(Signal::Interactions)).unwrap();
            worst = worst.max(t.elapsed());
        }
        let cf_avg = t1.elapsed() / sample.len() as u32;
        let t2 = Instant::now();
        for u in sample.iter().take(50) {
            let _ = engine.recommend_cbf(u, Some(20)).unwrap();
        }
        let cbf_avg = t2.elapsed() / 50;
        let t3 = Instant::now();
        for _ in 0..50 {
            let _ = engine.recommend_popular(Some(20)).unwrap();
        }
        let pop_avg = t3.elapsed() / 50;
        println!("users={nu} res={nr} tail={tail}: ints={n} build={built:?} cf_avg={cf_avg:?} cf_worst={worst:?} cbf_avg={cbf_avg:?} pop_avg={pop_avg:?}");
    }
}

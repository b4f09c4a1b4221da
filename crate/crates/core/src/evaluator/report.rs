//! Evaluation report rendering: CSV and an aligned plain-text table.
//! Numbers are fixed at 4 decimals so golden-file comparisons stay stable.

use super::{EvaluationReport, MetricKs};

fn metric_headers(ks: &MetricKs) -> [String; 6] {
    [
        format!("r@{}", ks.recall),
        format!("p@{}", ks.precision),
        format!("f1@{}", ks.f1),
        format!("mrr@{}", ks.mrr),
        format!("map@{}", ks.map),
        format!("ndcg@{}", ks.ndcg),
    ]
}

impl EvaluationReport {
    pub fn to_csv(&self) -> String {
        let metrics = metric_headers(&self.ks);
        let mut out = format!("algorithm,{},coverage,n_test_users\n", metrics.join(","));
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{}\n",
                row.algorithm,
                row.recall,
                row.precision,
                row.f1,
                row.mrr,
                row.map,
                row.ndcg,
                row.coverage,
                row.n_test_users,
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let metrics = metric_headers(&self.ks);
        let mut out = format!(
            "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            "approach",
            metrics[0],
            metrics[1],
            metrics[2],
            metrics[3],
            metrics[4],
            metrics[5],
            "coverage"
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{:<10} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}\n",
                row.algorithm.label(),
                row.recall,
                row.precision,
                row.f1,
                row.mrr,
                row.map,
                row.ndcg,
                row.coverage,
            ));
        }
        out.push_str(&format!("test users: {}\n", self.n_test_users));
        out
    }
}

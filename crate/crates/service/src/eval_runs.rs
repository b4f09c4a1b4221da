//! Registry of asynchronous evaluation runs. A full evaluation outlives
//! reasonable request timeouts, so POST /eval/run returns a polling id.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use learnrec_core::evaluator::EvaluationReport;

#[derive(Debug, Clone)]
pub enum RunState {
    Running,
    Done(EvaluationReport),
    Failed(String),
}

#[derive(Clone, Default)]
pub struct EvalRuns {
    runs: Arc<Mutex<HashMap<String, RunState>>>,
}

impl EvalRuns {
    pub fn start(&self) -> String {
        let run_id = uuid::Uuid::new_v4().to_string();
        self.runs
            .lock()
            .expect("eval runs lock")
            .insert(run_id.clone(), RunState::Running);
        run_id
    }

    pub fn finish(&self, run_id: &str, result: Result<EvaluationReport, String>) {
        let state = match result {
            Ok(report) => RunState::Done(report),
            Err(message) => RunState::Failed(message),
        };
        self.runs
            .lock()
            .expect("eval runs lock")
            .insert(run_id.to_owned(), state);
    }

    pub fn get(&self, run_id: &str) -> Option<RunState> {
        self.runs.lock().expect("eval runs lock").get(run_id).cloned()
    }
}

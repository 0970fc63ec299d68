use std::num::NonZeroUsize;
use std::thread;

use sisfront_core::dynamics::{ProbeExecutor, ProbeFn, ProbeRecord};
use sisfront_core::AnalysisError;

/// Runs threshold probes on scoped threads, at most `workers` at a time.
/// Results are returned in input order regardless of completion order.
#[derive(Debug, Clone, Copy)]
pub struct ThreadedExecutor {
    workers: usize,
}

impl ThreadedExecutor {
    /// `0` selects the available parallelism.
    pub fn new(workers: usize) -> Self {
        let workers = if workers == 0 {
            thread::available_parallelism().map_or(1, NonZeroUsize::get)
        } else {
            workers
        };
        ThreadedExecutor { workers }
    }
}

impl ProbeExecutor for ThreadedExecutor {
    fn workers(&self) -> usize {
        self.workers
    }

    fn execute(&self, mus: &[f64], probe: &ProbeFn<'_>) -> Vec<Result<ProbeRecord, AnalysisError>> {
        let mut out = Vec::with_capacity(mus.len());
        for chunk in mus.chunks(self.workers) {
            thread::scope(|s| {
                let handles: Vec<_> = chunk.iter().map(|&mu| s.spawn(move || probe(mu))).collect();
                for h in handles {
                    out.push(h.join().expect("probe thread panicked"));
                }
            });
        }
        out
    }
}

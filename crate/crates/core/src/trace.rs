//! Per-iteration records produced by the outer loops and the harness.

/// One row of a run trace.
///
/// `index` is the outer iteration `k` for single-epoch runs and the epoch `e`
/// for restarted runs; row `0` describes the starting point. Metrics are
/// present only when the problem's solution is known.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub run_id: u64,
    pub seed: u64,
    pub index: u64,
    /// Cumulative oracle calls.
    pub sfo_calls: u64,
    /// `f(x̃) − f*`.
    pub primal_gap: Option<f64>,
    /// `‖x − x*‖²` (or `‖z − z*‖²` for solvers on the stacked variable).
    pub dist_primal_sq: Option<f64>,
    /// `‖ỹ*(x̃) − y‖²`.
    pub dist_dual_sq: Option<f64>,
    /// `f(x̃) − f* + c‖ỹ*(x̃) − y‖²`.
    pub composite_gap: Option<f64>,
    pub wall_ms: f64,
}

impl TraceRow {
    pub fn new(seed: u64, index: u64, sfo_calls: u64) -> Self {
        Self {
            run_id: 0,
            seed,
            index,
            sfo_calls,
            primal_gap: None,
            dist_primal_sq: None,
            dist_dual_sq: None,
            composite_gap: None,
            wall_ms: 0.0,
        }
    }
}

/// Ordered rows of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stamps every row with `run_id`.
    pub fn with_run_id(mut self, run_id: u64) -> Self {
        self.rows.iter_mut().for_each(|r| r.run_id = run_id);
        self
    }

    /// Cumulative oracle counts never decrease.
    pub fn sfo_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].sfo_calls <= w[1].sfo_calls)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_id_and_monotonicity() {
        let mut t = RunTrace::default();
        t.push(TraceRow::new(7, 0, 0));
        t.push(TraceRow::new(7, 1, 8));
        let t = t.with_run_id(3);
        assert!(t.rows.iter().all(|r| r.run_id == 3));
        assert!(t.sfo_monotone());
        let mut bad = t.clone();
        bad.rows[1].sfo_calls = 0;
        bad.rows[0].sfo_calls = 1;
        assert!(!bad.sfo_monotone());
    }
}

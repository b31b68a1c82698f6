//! Least-squares rate fits on log-gaps.

use std::collections::BTreeMap;

use ckit_core::TraceRow;

use crate::error::{BenchError, Result};

pub const MIN_ROWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    /// `gap ≈ C·k^p`: slope of `log gap` against `log k`.
    Power,
    /// `gap ≈ C·q^k`: slope of `log gap` against `k`.
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    /// Exponent `p` (power) or factor `q` (geometric).
    pub rate: f64,
    /// `log C`.
    pub intercept: f64,
    /// Root mean square residual in log space.
    pub residual: f64,
    pub rows: usize,
}

/// Fits `points` of `(k, gap)`; nonpositive gaps (and `k = 0` for the power
/// model) are dropped.
pub fn fit_points(points: &[(f64, f64)], model: Model) -> Result<Fit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(k, g)| g > 0.0 && g.is_finite() && (model == Model::Geometric || k > 0.0))
        .map(|&(k, g)| {
            let x = match model {
                Model::Power => k.ln(),
                Model::Geometric => k,
            };
            (x, g.ln())
        })
        .collect();
    if usable.len() < MIN_ROWS {
        return Err(BenchError::InsufficientData {
            usable: usable.len(),
            needed: MIN_ROWS,
        });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let rate = match model {
        Model::Power => slope,
        Model::Geometric => slope.exp(),
    };
    Ok(Fit {
        rate,
        intercept,
        residual: (sse / n).sqrt(),
        rows: usable.len(),
    })
}

/// The metric a trace row is fitted on: the composite gap when present, else
/// the primal gap, else the squared distance to the solution.
pub fn row_metric(row: &TraceRow) -> Option<f64> {
    row.composite_gap
        .or(row.primal_gap)
        .or(match (row.dist_primal_sq, row.dist_dual_sq) {
            (Some(a), Some(b)) => Some(a + b),
            (Some(a), None) => Some(a),
            _ => None,
        })
}

/// Averages the metric over runs at each index, then fits.
pub fn fit_trace(rows: &[TraceRow], model: Model) -> Result<Fit> {
    let mut by_index: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for row in rows {
        if let Some(v) = row_metric(row) {
            let e = by_index.entry(row.index).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    let points: Vec<(f64, f64)> = by_index
        .into_iter()
        .map(|(k, (s, n))| (k as f64, s / n as f64))
        .collect();
    fit_points(&points, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=50).map(|k| (k as f64, 7.0 / (k * k) as f64)).collect();
        let f = fit_points(&pts, Model::Power).unwrap();
        assert!((f.rate + 2.0).abs() < 0.01);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-9);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn exact_geometric_law() {
        let pts: Vec<(f64, f64)> = (0..30).map(|k| (k as f64, 0.5f64.powi(k))).collect();
        let f = fit_points(&pts, Model::Geometric).unwrap();
        assert!((f.rate - 0.5).abs() < 0.001);
    }

    #[test]
    fn drops_nonpositive_rows_and_needs_ten() {
        let mut pts: Vec<(f64, f64)> = (1..=10).map(|k| (k as f64, 1.0 / k as f64)).collect();
        pts.push((11.0, 0.0));
        pts.push((12.0, -1.0));
        assert_eq!(fit_points(&pts, Model::Power).unwrap().rows, 10);
        pts.remove(0);
        assert!(matches!(
            fit_points(&pts, Model::Power),
            Err(BenchError::InsufficientData { usable: 9, .. })
        ));
    }

    #[test]
    fn averages_runs_by_index() {
        let mut rows = Vec::new();
        for run in 0..2u64 {
            for k in 1..=12u64 {
                let mut r = TraceRow::new(run, k, 0);
                r.primal_gap = Some((1 + run) as f64 / (k * k) as f64);
                rows.push(r);
            }
        }
        let f = fit_trace(&rows, Model::Power).unwrap();
        assert!((f.rate + 2.0).abs() < 1e-9);
        assert!((f.intercept - 1.5f64.ln()).abs() < 1e-9);
    }
}

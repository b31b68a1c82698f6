//! Trace CSV with columns `run_id, seed, index, sfo_calls, primal_gap,
//! dist_primal_sq, dist_dual_sq, composite_gap, wall_ms`; absent metrics are
//! empty fields.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ckit_core::TraceRow;
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    run_id: u64,
    seed: u64,
    index: u64,
    sfo_calls: u64,
    primal_gap: Option<f64>,
    dist_primal_sq: Option<f64>,
    dist_dual_sq: Option<f64>,
    composite_gap: Option<f64>,
    wall_ms: f64,
}

impl From<&TraceRow> for Record {
    fn from(r: &TraceRow) -> Self {
        Record {
            run_id: r.run_id,
            seed: r.seed,
            index: r.index,
            sfo_calls: r.sfo_calls,
            primal_gap: r.primal_gap,
            dist_primal_sq: r.dist_primal_sq,
            dist_dual_sq: r.dist_dual_sq,
            composite_gap: r.composite_gap,
            wall_ms: r.wall_ms,
        }
    }
}

impl From<Record> for TraceRow {
    fn from(r: Record) -> Self {
        let mut row = TraceRow::new(r.seed, r.index, r.sfo_calls);
        row.run_id = r.run_id;
        row.primal_gap = r.primal_gap;
        row.dist_primal_sq = r.dist_primal_sq;
        row.dist_dual_sq = r.dist_dual_sq;
        row.composite_gap = r.composite_gap;
        row.wall_ms = r.wall_ms;
        row
    }
}

/// Writes rows with a header line.
pub fn write_rows<'a, W: Write>(rows: impl IntoIterator<Item = &'a TraceRow>, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(Record::from(row))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<TraceRow>> {
    let mut input = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in input.deserialize::<Record>() {
        rows.push(rec?.into());
    }
    Ok(rows)
}

pub fn write_file<'a>(rows: impl IntoIterator<Item = &'a TraceRow>, path: impl AsRef<Path>) -> Result<()> {
    if let Some(dir) = path.as_ref().parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_rows(rows, File::create(path)?)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    read_rows(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<TraceRow> {
        let mut a = TraceRow::new(17, 0, 0);
        a.primal_gap = Some(0.1 + 0.2);
        a.dist_primal_sq = Some(1e-300);
        a.wall_ms = 0.125;
        let mut b = TraceRow::new(17, 1, 16);
        b.run_id = 3;
        b.composite_gap = Some(std::f64::consts::PI / 3.0);
        b.dist_dual_sq = Some(5e-324);
        vec![a, b]
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = sample();
        let mut buf = Vec::new();
        write_rows(&rows, &mut buf).unwrap();
        assert_eq!(read_rows(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn header_order() {
        let mut buf = Vec::new();
        write_rows(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "run_id,seed,index,sfo_calls,primal_gap,dist_primal_sq,dist_dual_sq,composite_gap,wall_ms"
        );
        assert!(text.lines().nth(1).unwrap().contains(",,"));
    }
}

//! Output sinks and table layouts. CSV floats carry 17 significant digits.

use anyhow::{Context, Result};
use gdkp::boundary::EdgeSweepRow;
use gdkp::real::fmt17;
use gdkp::zak::ZakRow;
use gdkp::{Coupling, EdgeSpectrum, ZakResult};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub struct Out {
    path: Option<PathBuf>,
}

impl Out {
    pub fn new(path: Option<PathBuf>) -> Self {
        Self { path }
    }

    pub fn text(&self, s: &str) -> Result<()> {
        match &self.path {
            Some(p) => std::fs::write(p, s).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut o = std::io::stdout().lock();
                o.write_all(s.as_bytes())?;
                Ok(o.flush()?)
            }
        }
    }

    pub fn json<T: Serialize>(&self, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.text(&s)
    }
}

#[derive(Serialize)]
pub struct ZakOut {
    #[serde(flatten)]
    pub zak: ZakResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translated_phase: Option<f64>,
}

#[derive(Serialize)]
pub struct KurasovOut {
    pub coupling: Coupling,
    /// `None` for couplings without finite strengths.
    pub strengths: Option<[f64; 4]>,
}

/// Single records go out as JSON objects or as a two-line CSV of their scalar fields.
pub fn emit<T: Serialize>(out: &Out, format: Format, v: &T) -> Result<()> {
    match format {
        Format::Json => out.json(v),
        Format::Csv => out.text(&record_csv(v)?),
    }
}

fn cell(v: &serde_json::Value) -> String {
    use serde_json::Value;
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => fmt17(n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, head: &mut Vec<String>, row: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, head, row);
            }
        }
        _ => {
            head.push(prefix.to_string());
            row.push(cell(v));
        }
    }
}

fn record_csv<T: Serialize>(v: &T) -> Result<String> {
    let (mut head, mut row) = (Vec::new(), Vec::new());
    flatten("", &serde_json::to_value(v)?, &mut head, &mut row);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&head)?;
    w.write_record(&row)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

pub fn edges_csv(spec: &EdgeSpectrum) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "gap_id",
        "below_band",
        "above_band",
        "gap_lo",
        "gap_hi",
        "N",
        "eps",
        "decay_rate",
        "residual",
        "boundary_touching",
    ])?;
    for (id, g) in spec.gaps.iter().enumerate() {
        let head = [
            id.to_string(),
            g.gap.below_band.to_string(),
            g.gap.above_band.to_string(),
            fmt17(g.gap.lo),
            fmt17(g.gap.hi),
            g.count.to_string(),
        ];
        if g.states.is_empty() {
            w.write_record(head.iter().cloned().chain(["", "", "", ""].map(String::from)))?;
        }
        for s in &g.states {
            let tail = [fmt17(s.eps), fmt17(s.decay_rate), fmt17(s.residual), s.boundary_touching.to_string()];
            w.write_record(head.iter().cloned().chain(tail))?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn zak_rows_csv(rows: &[ZakRow<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theta", "m2", "band", "phase", "phase_unwrapped", "convergence", "flags", "error"])?;
    for r in rows {
        w.write_record([
            fmt17(r.theta),
            fmt17(r.m2),
            r.band.to_string(),
            opt(r.phase),
            opt(r.phase_unwrapped),
            opt(r.convergence),
            r.flags.join(";"),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn edge_rows_csv(rows: &[EdgeSweepRow<f64>], gaps: &[(i32, i32)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theta", "m2", "d", "alpha", "gap_id", "below_band", "above_band", "N", "flags", "error"])?;
    for r in rows {
        let id = gaps.iter().position(|&g| g == (r.below_band, r.above_band)).unwrap_or(usize::MAX);
        w.write_record([
            fmt17(r.theta),
            fmt17(r.m2),
            fmt17(r.d),
            fmt17(r.alpha),
            id.to_string(),
            r.below_band.to_string(),
            r.above_band.to_string(),
            r.count.map(|n| n.to_string()).unwrap_or_default(),
            r.flags.join(";"),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

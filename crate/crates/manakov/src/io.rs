//! Plot-ready result files: trajectory and conserved-quantity CSV,
//! regime-report JSON, and the CLI's machine-readable error envelope.
//!
//! Numbers are written in Rust's shortest round-trip decimal form, so
//! identical runs produce byte-identical files and parsing a file back
//! recovers the exact binary values. Parsers are strict: malformed rows,
//! non-finite numbers, and out-of-order times are errors, never guesses.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ctc::{delta_proxy, positions_from_state, CtcTrajectory};
use crate::error::{Error, Result};
use crate::lax::RegimeReport;
use crate::tracking::TrajectorySet;

/// Shortest round-trip decimal form of `x`.
fn fmt(x: f64) -> String {
    format!("{x}")
}

fn parse_finite(field: &str, what: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: {what} `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: {what} `{field}` is not finite")));
    }
    Ok(v)
}

/// Write positions-only trajectories: header `t,xi_1..xi_N`, one row per
/// sample, empty cells where a track is missing.
pub fn write_trajectories_csv(mut w: impl Write, ts: &TrajectorySet) -> Result<()> {
    write!(w, "t")?;
    for k in 1..=ts.n_tracks() {
        write!(w, ",xi_{k}")?;
    }
    writeln!(w)?;
    for (j, &t) in ts.times.iter().enumerate() {
        write!(w, "{}", fmt(t))?;
        for track in &ts.tracks {
            match track[j] {
                Some(x) => write!(w, ",{}", fmt(x))?,
                None => write!(w, ",")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Write a chain trajectory with the full per-soliton state: header
/// `t,xi_1,nu_1,mu_1,delta_proxy_1,…`; every cell is present.
pub fn write_ctc_trajectories_csv(mut w: impl Write, traj: &CtcTrajectory) -> Result<()> {
    let n = traj.states.first().map_or(0, |s| s.len());
    write!(w, "t")?;
    for k in 1..=n {
        write!(w, ",xi_{k},nu_{k},mu_{k},delta_proxy_{k}")?;
    }
    writeln!(w)?;
    for (j, state) in traj.states.iter().enumerate() {
        write!(w, "{}", fmt(traj.times[j]))?;
        let coords = positions_from_state(state);
        for (k, c) in coords.iter().enumerate() {
            write!(
                w,
                ",{},{},{},{}",
                fmt(c.xi),
                fmt(c.nu),
                fmt(c.mu),
                fmt(delta_proxy(state, k))
            )?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Read trajectories from either CSV layout above. The `t` column must
/// come first; track positions are taken from the `xi_1..xi_N` columns
/// (any other columns are ignored), and empty `xi` cells become missing
/// samples.
pub fn read_trajectories_csv(r: impl BufRead) -> Result<TrajectorySet> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trajectory file".into()))?;
    let header = header?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") {
        return Err(Error::Parse(format!(
            "trajectory header must start with `t`, got `{header}`"
        )));
    }
    let mut xi_cols: Vec<usize> = Vec::new();
    for (i, name) in cols.iter().enumerate() {
        if let Some(suffix) = name.strip_prefix("xi_") {
            let k: usize = suffix.parse().map_err(|_| {
                Error::Parse(format!("malformed trajectory column name `{name}`"))
            })?;
            if k != xi_cols.len() + 1 {
                return Err(Error::Parse(format!(
                    "trajectory columns must be xi_1..xi_N in order; found `{name}` at track {}",
                    xi_cols.len() + 1
                )));
            }
            xi_cols.push(i);
        }
    }
    if xi_cols.is_empty() {
        return Err(Error::Parse("trajectory file has no xi_k columns".into()));
    }
    let mut times: Vec<f64> = Vec::new();
    let mut tracks: Vec<Vec<Option<f64>>> = vec![Vec::new(); xi_cols.len()];
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!(
                "line {}: {} fields, header has {}",
                idx + 1,
                fields.len(),
                cols.len()
            )));
        }
        times.push(parse_finite(fields[0], "time", idx + 1)?);
        for (k, &ci) in xi_cols.iter().enumerate() {
            let cell = fields[ci].trim();
            if cell.is_empty() {
                tracks[k].push(None);
            } else {
                tracks[k].push(Some(parse_finite(cell, "position", idx + 1)?));
            }
        }
    }
    TrajectorySet::new(times, tracks)
}

/// One conserved-quantity sample of the PDE run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedSample {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
}

/// Write `t,norm,energy` rows.
pub fn write_conserved_csv(mut w: impl Write, rows: &[ConservedSample]) -> Result<()> {
    writeln!(w, "t,norm,energy")?;
    for row in rows {
        writeln!(w, "{},{},{}", fmt(row.t), fmt(row.norm), fmt(row.energy))?;
    }
    Ok(())
}

pub fn read_conserved_csv(r: impl BufRead) -> Result<Vec<ConservedSample>> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty conserved-quantity file".into()))?;
    if header?.trim() != "t,norm,energy" {
        return Err(Error::Parse("conserved-quantity header must be `t,norm,energy`".into()));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 fields", idx + 1)));
        }
        rows.push(ConservedSample {
            t: parse_finite(fields[0], "time", idx + 1)?,
            norm: parse_finite(fields[1], "norm", idx + 1)?,
            energy: parse_finite(fields[2], "energy", idx + 1)?,
        });
    }
    Ok(rows)
}

/// JSON shape of a regime report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeJson {
    /// "AFR", "BSR", or "MAR".
    pub label: String,
    /// Eigenvalues as `[re, im]` pairs, sorted by real part.
    pub eigenvalues: Vec<[f64; 2]>,
    /// Real parts (half asymptotic velocities).
    pub kappa: Vec<f64>,
    /// Imaginary parts (asymptotic amplitudes).
    pub eta: Vec<f64>,
    /// Index partition by common velocity.
    pub clusters: Vec<Vec<usize>>,
    pub degenerate: bool,
    pub cluster_tol: f64,
}

impl From<&RegimeReport> for RegimeJson {
    fn from(r: &RegimeReport) -> Self {
        RegimeJson {
            label: r.label.as_str().to_string(),
            eigenvalues: r.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            kappa: r.kappa.clone(),
            eta: r.eta.clone(),
            clusters: r.clusters.clone(),
            degenerate: r.degenerate,
            cluster_tol: r.tol,
        }
    }
}

pub fn regime_json_string(report: &RegimeReport) -> String {
    serde_json::to_string_pretty(&RegimeJson::from(report)).expect("regime reports serialize")
}

/// Machine-readable error envelope printed by the CLI on failure.
pub fn error_json(err: &Error) -> String {
    serde_json::to_string(&serde_json::json!({
        "error": { "kind": err.kind(), "message": err.to_string() }
    }))
    .expect("error envelopes serialize")
}

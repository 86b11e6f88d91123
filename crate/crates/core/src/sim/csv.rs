//! CSV emitters. Every file starts with a `#` comment block (command,
//! config hash, seed and any run-level notes) followed by one header row.
//! Floats use Rust's shortest round-trip formatting; lines end in LF.

use std::fmt::Write;

use super::monte_carlo::RunReport;
use super::pipelines::{DopplerOutput, GdopRow, SweepRow};
use crate::trajopt::TrajOptResult;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvHeader {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub notes: Vec<(String, String)>,
}

impl CsvHeader {
    pub fn new(command: &str, config_hash: &str, seed: u64) -> Self {
        Self { command: command.into(), config_hash: config_hash.into(), seed, notes: Vec::new() }
    }

    pub fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.into(), value.to_string()));
        self
    }

    fn write(&self, out: &mut String, columns: &[&str]) {
        let _ = writeln!(out, "# gasloc {}", self.command);
        let _ = writeln!(out, "# config_sha256: {}", self.config_hash);
        let _ = writeln!(out, "# seed: {}", self.seed);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&columns.join(","));
        out.push('\n');
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per trial; failed trials leave the estimate and error columns empty.
pub fn simulate_csv(header: CsvHeader, report: &RunReport) -> String {
    let mut header = header
        .note("rng", "ChaCha8 per trial, seed = splitmix64(master ^ splitmix64(trial))")
        .note("trials", report.trials.len())
        .note("failures", report.failures);
    if let Some(s) = report.summary {
        header = header
            .note("rmse_3d_m", s.rmse_3d)
            .note("median_3d_m", s.median_3d)
            .note("p90_3d_m", s.p90_3d)
            .note("p95_3d_m", s.p95_3d)
            .note("median_horizontal_m", s.median_horizontal)
            .note("median_vertical_m", s.median_vertical);
    }
    let mut out = String::new();
    header.write(
        &mut out,
        &[
            "trial", "status", "true_x_m", "true_y_m", "true_z_m", "est_x_m", "est_y_m", "est_z_m", "ex_m", "ey_m",
            "ez_m", "error_h_m", "error_3d_m",
        ],
    );
    for t in &report.trials {
        let e = t.error;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            t.trial,
            t.status.as_str(),
            t.target.x,
            t.target.y,
            t.target.z,
            opt(t.estimate.map(|p| p.x)),
            opt(t.estimate.map(|p| p.y)),
            opt(t.estimate.map(|p| p.z)),
            opt(e.map(|e| e.ex)),
            opt(e.map(|e| e.ey)),
            opt(e.map(|e| e.ez)),
            opt(e.map(|e| e.horizontal())),
            opt(e.map(|e| e.error_3d)),
        );
    }
    out
}

pub fn gdop_csv(header: CsvHeader, rows: &[GdopRow]) -> String {
    let mut out = String::new();
    header.write(&mut out, &["x_m", "y_m", "z_m", "gdop", "hdop", "vdop", "status"]);
    for r in rows {
        let p = r.position;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.x,
            p.y,
            p.z,
            opt(r.dop.map(|d| d.gdop)),
            opt(r.dop.map(|d| d.hdop)),
            opt(r.dop.map(|d| d.vdop)),
            r.status
        );
    }
    out
}

pub fn sweep_csv(header: CsvHeader, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    header.write(&mut out, &["altitude_m", "vertical_error_m", "mean_projected_error_m", "samples"]);
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.altitude_m, r.vertical_error_m, r.mean_error_m, r.samples);
    }
    out
}

pub fn doppler_csv(header: CsvHeader, output: &DopplerOutput) -> String {
    let u = output.user;
    let mut header = header.note("user_ecef_m", format!("{} {} {}", u.x, u.y, u.z));
    if let Some(n) = &output.notice {
        header = header.note("notice", n);
    }
    let mut out = String::new();
    header.write(&mut out, &["satellite", "pass", "time_s", "elevation_deg", "doppler_hz", "doppler_rate_hz_per_s"]);
    for r in &output.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.satellite,
            r.pass,
            r.time_s,
            r.elevation_rad.to_degrees(),
            r.doppler_hz,
            r.doppler_rate_hz_s
        );
    }
    out
}

/// Waypoint list of the optimised trajectory; `duration_s` is the time to
/// the next waypoint (empty on the last one).
pub fn trajopt_csv(header: CsvHeader, result: &TrajOptResult) -> String {
    let ev = &result.evaluation;
    let mut header = header
        .note("objective", ev.objective)
        .note("energy_j", ev.energy_j)
        .note("feasible", ev.feasible())
        .note("evaluations", result.evaluations)
        .note("chain", result.chain);
    for s in &ev.slacks {
        header = header.note(&format!("slack_{}", s.name), s.value);
    }
    let mut out = String::new();
    header.write(&mut out, &["index", "x_m", "y_m", "z_m", "duration_s"]);
    let t = &result.trajectory;
    for (i, w) in t.waypoints().iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{},{}", i, w.x, w.y, w.z, opt(t.durations().get(i).copied()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_block_then_columns() {
        let mut out = String::new();
        CsvHeader::new("gdop-map", "abc", 7).note("k", 1.5).write(&mut out, &["a", "b"]);
        assert_eq!(out, "# gasloc gdop-map\n# config_sha256: abc\n# seed: 7\n# k: 1.5\na,b\n");
    }
}

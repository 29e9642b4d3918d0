//! CSV emission. Floats are printed in Rust's shortest round-trip form, so
//! identical inputs give identical bytes.

use std::fmt::Write as _;

use super::stats::{MeanSe, SummaryRow};
use crate::metrics::MetricsSample;

pub const SUMMARY_COLUMNS: [&str; 29] = [
    "model",
    "q",
    "n_agents",
    "p_min",
    "p_max",
    "delta",
    "seed",
    "replicates",
    "samples",
    "skipped",
    "phi",
    "neg_lg_one_minus_phi",
    "censored",
    "mean_degree",
    "se_degree",
    "mean_power",
    "se_power",
    "avg_distance",
    "se_avg_distance",
    "diameter",
    "se_diameter",
    "rho",
    "se_rho",
    "spectral_gap",
    "se_gap",
    "delta_avg_distance",
    "se_delta_avg_distance",
    "delta_diameter",
    "se_delta_diameter",
];

pub const SERIES_COLUMNS: [&str; 13] = [
    "step",
    "mean_degree",
    "mean_power",
    "min_power",
    "max_power",
    "connected",
    "avg_distance",
    "diameter",
    "rho",
    "spectral_gap",
    "spectral_converged",
    "delta_avg_distance",
    "delta_diameter",
];

/// `# `-prefixed comment lines.
pub fn comment_block(lines: &[String]) -> String {
    let mut out = String::new();
    for line in lines {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn push_mean_se(fields: &mut Vec<String>, m: &MeanSe) {
    fields.push(m.mean.to_string());
    fields.push(m.se.to_string());
}

pub fn summary_header() -> String {
    SUMMARY_COLUMNS.join(",")
}

pub fn summary_line(row: &SummaryRow) -> String {
    let mut f = vec![
        row.model.to_string(),
        row.q.to_string(),
        row.n_agents.to_string(),
        row.p_min.to_string(),
        row.p_max.to_string(),
        row.delta.to_string(),
        row.seed.to_string(),
        row.replicates.to_string(),
        row.samples.to_string(),
        row.skipped.to_string(),
        row.phi.to_string(),
        row.neg_lg_one_minus_phi.to_string(),
        row.censored.to_string(),
    ];
    for m in [
        &row.degree,
        &row.power,
        &row.avg_distance,
        &row.diameter,
        &row.rho,
        &row.spectral_gap,
        &row.delta_avg_distance,
        &row.delta_diameter,
    ] {
        push_mean_se(&mut f, m);
    }
    f.join(",")
}

/// Comments, header and one line per row.
pub fn summary_csv(comments: &[String], rows: &[SummaryRow]) -> String {
    let mut out = comment_block(comments);
    out.push_str(&summary_header());
    out.push('\n');
    for row in rows {
        out.push_str(&summary_line(row));
        out.push('\n');
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn series_csv(comments: &[String], samples: &[MetricsSample]) -> String {
    let mut out = comment_block(comments);
    out.push_str(&SERIES_COLUMNS.join(","));
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.step,
            s.mean_degree,
            s.mean_power,
            s.min_power,
            s.max_power,
            s.connected,
            opt(s.avg_distance),
            opt(s.diameter),
            opt(s.rho),
            opt(s.spectral_gap),
            s.spectral_converged
                .map_or_else(String::new, |c| c.to_string()),
            opt(s.delta_avg_distance),
            opt(s.delta_diameter),
        );
    }
    out
}

//! Plain-text network snapshots.
//!
//! ```text
//! # model A
//! # n_agents 2
//! ...                      one `# key value` line per parameter
//! node <id> <x> <y> <local|random> <P>
//! edge <i> <j> <p(i,j)> <local|random>
//! ```
//!
//! Nodes are listed by ascending id, edges by ascending `(i, j)` with
//! `i < j`. The edge tag records the strategy that created the link. `P` is
//! summed in ascending neighbour order, so export → import → export is
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::geometry::{pair_power, Position};
use crate::network::{AgentId, Attachment, Network, LEDGER_TOLERANCE_EPS};
use crate::params::Params;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
}

pub fn render_snapshot(net: &Network, params: &Params) -> String {
    let mut out = String::new();
    for (key, value) in params.to_pairs() {
        let _ = writeln!(out, "# {key} {value}");
    }
    for agent in net.agents() {
        let _ = writeln!(
            out,
            "node {} {} {} {} {}",
            agent.id,
            agent.pos.x,
            agent.pos.y,
            agent.kind.as_str(),
            net.recompute_power(agent.id).unwrap()
        );
    }
    for (i, j, p, origin) in net.edges() {
        let _ = writeln!(out, "edge {i} {j} {p} {}", origin.as_str());
    }
    out
}

pub fn export_snapshot(net: &Network, params: &Params, path: &Path) -> Result<(), SnapshotError> {
    fs::write(path, render_snapshot(net, params))?;
    Ok(())
}

pub fn import_snapshot(path: &Path) -> Result<(Network, Params), SnapshotError> {
    parse_snapshot(&fs::read_to_string(path)?)
}

fn parse_err(line: usize, message: impl Into<String>) -> SnapshotError {
    SnapshotError::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(
    line: usize,
    what: &str,
    s: Option<&str>,
) -> Result<T, SnapshotError> {
    let s = s.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    s.parse::<T>()
        .map_err(|_| parse_err(line, format!("invalid {what} '{s}'")))
}

/// Parses snapshot text and rebuilds the network, checking every structural
/// invariant and the stored ledger values.
pub fn parse_snapshot(text: &str) -> Result<(Network, Params), SnapshotError> {
    let mut header = crate::harness::Config::default();
    let mut nodes: Vec<(usize, AgentId, Position, Attachment, f64)> = Vec::new();
    let mut edges: Vec<(usize, AgentId, AgentId, f64, Attachment)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(no, "expected '# key value'"));
            };
            header
                .set(key, value)
                .map_err(|e| parse_err(no, e.to_string()))?;
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("node") => {
                let id = AgentId(field(no, "node id", parts.next())?);
                let x: f64 = field(no, "x", parts.next())?;
                let y: f64 = field(no, "y", parts.next())?;
                let pos = Position::new(x, y)
                    .ok_or_else(|| parse_err(no, "position outside the unit square"))?;
                let kind_str: String = field(no, "kind", parts.next())?;
                let kind = Attachment::parse(&kind_str)
                    .ok_or_else(|| parse_err(no, format!("invalid kind '{kind_str}'")))?;
                let power: f64 = field(no, "power", parts.next())?;
                nodes.push((no, id, pos, kind, power));
            }
            Some("edge") => {
                let i = AgentId(field(no, "edge endpoint", parts.next())?);
                let j = AgentId(field(no, "edge endpoint", parts.next())?);
                let p: f64 = field(no, "edge power", parts.next())?;
                let tag: String = field(no, "edge tag", parts.next())?;
                let origin = Attachment::parse(&tag)
                    .ok_or_else(|| parse_err(no, format!("invalid edge tag '{tag}'")))?;
                edges.push((no, i, j, p, origin));
            }
            Some(other) => return Err(parse_err(no, format!("unknown record '{other}'"))),
            None => unreachable!(),
        }
        if parts.next().is_some() {
            return Err(parse_err(no, "trailing fields"));
        }
    }

    let (params, _) = header
        .to_params()
        .map_err(|e| SnapshotError::Corrupt(format!("header: {e}")))?;
    let mut net = Network::new(params.delta, params.p_max);
    for &(no, id, pos, kind, _) in &nodes {
        net.insert_agent(id, pos, kind)
            .map_err(|e| SnapshotError::Corrupt(format!("line {no}: {e}")))?;
    }
    if net.len() != params.n_agents {
        return Err(SnapshotError::Corrupt(format!(
            "{} nodes listed but n_agents is {}",
            net.len(),
            params.n_agents
        )));
    }
    for &(no, i, j, stored, origin) in &edges {
        let corrupt = |msg: String| SnapshotError::Corrupt(format!("line {no}: {msg}"));
        let (Some(a), Some(b)) = (net.agent(i), net.agent(j)) else {
            return Err(corrupt(format!("edge {i}-{j} references a missing node")));
        };
        let fresh = pair_power(a.pos, b.pos, params.delta);
        if (fresh - stored).abs() > LEDGER_TOLERANCE_EPS * f64::EPSILON * fresh {
            return Err(corrupt(format!(
                "edge {i}-{j} stores power {stored}, positions give {fresh}"
            )));
        }
        net.add_link(i, j, origin)
            .map_err(|e| corrupt(format!("edge {i}-{j}: {e}")))?;
    }
    for &(no, id, _, _, stored) in &nodes {
        let fresh = net.recompute_power(id).unwrap();
        if (fresh - stored).abs() > LEDGER_TOLERANCE_EPS * f64::EPSILON * fresh.max(stored.abs()) {
            return Err(SnapshotError::Corrupt(format!(
                "line {no}: node {id} stores power {stored}, its edges sum to {fresh}"
            )));
        }
    }
    net.check_invariants()
        .map_err(|e| SnapshotError::Corrupt(e.to_string()))?;
    Ok((net, params))
}

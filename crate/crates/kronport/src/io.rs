//! Text formats shared by the CLI and the examples: the edge-list graph
//! format, one-number-per-line vector files, CSV emitters for trajectories
//! and region rasters, and input digests.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::analysis::RegionReport;
use crate::dynamics::Trajectory;
use crate::graph::SignedGraph;
use crate::{Error, Result};

fn parse_failure(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// Parses the edge-list format: a header line `n m`, then m lines `i j w`.
/// Blank lines and lines starting with `#` are skipped everywhere. `path` is
/// only used to label errors.
pub fn parse_graph(text: &str, path: &str) -> Result<SignedGraph> {
    let mut significant = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = significant
        .next()
        .ok_or_else(|| parse_failure(path, 1, "missing header line `n m`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_failure(
            path,
            header_line,
            format!("header must be `n m`, got {} fields", fields.len()),
        ));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_failure(path, header_line, format!("bad node count `{}`", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| parse_failure(path, header_line, format!("bad edge count `{}`", fields[1])))?;

    let mut edges = Vec::with_capacity(m);
    let mut last_line = header_line;
    for (line, content) in significant {
        if edges.len() == m {
            return Err(parse_failure(
                path,
                line,
                format!("expected {m} edges, found extra data"),
            ));
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_failure(
                path,
                line,
                format!("edge line must be `i j w`, got {} fields", fields.len()),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_failure(path, line, format!("bad node index `{}`", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_failure(path, line, format!("bad node index `{}`", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_failure(path, line, format!("bad weight `{}`", fields[2])))?;
        if !w.is_finite() {
            return Err(parse_failure(path, line, "weight must be finite"));
        }
        edges.push((i, j, w));
        last_line = line;
    }
    if edges.len() != m {
        return Err(parse_failure(
            path,
            last_line,
            format!("expected {m} edges, found {}", edges.len()),
        ));
    }
    SignedGraph::build(n, &edges)
}

pub fn read_graph(path: &Path) -> Result<SignedGraph> {
    let text = fs::read_to_string(path)?;
    parse_graph(&text, &path.display().to_string())
}

/// Emits the edge-list format. Weights use the shortest representation that
/// parses back to the identical float, so format/parse round-trips exactly.
pub fn format_graph(g: &SignedGraph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.i, e.j, e.weight));
    }
    out
}

/// Parses a vector file: one decimal per line, `#` comments and blank lines
/// skipped.
pub fn parse_vector(text: &str, path: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.split_whitespace().count() != 1 {
            return Err(parse_failure(path, k + 1, "expected one number per line"));
        }
        let v: f64 = line
            .parse()
            .map_err(|_| parse_failure(path, k + 1, format!("bad number `{line}`")))?;
        if !v.is_finite() {
            return Err(parse_failure(path, k + 1, "value must be finite"));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(parse_failure(path, 1, "file holds no values"));
    }
    Ok(values)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    parse_vector(&text, &path.display().to_string())
}

/// 12 significant digits, the CSV-wide float convention.
pub fn csv_number(x: f64) -> String {
    format!("{x:.11e}")
}

/// One row per sample: `t,x1,...,xn`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        out.push_str(&csv_number(*t));
        for x in state {
            out.push(',');
            out.push_str(&csv_number(*x));
        }
        out.push('\n');
    }
    out
}

/// One row per grid point: `a1,a2,admissible,margin`, admissible as 0/1.
pub fn region_csv(report: &RegionReport) -> String {
    let mut out = String::from("a1,a2,admissible,margin\n");
    for s in &report.samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_number(s.a1),
            csv_number(s.a2),
            u8::from(s.admissible),
            csv_number(s.margin)
        ));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

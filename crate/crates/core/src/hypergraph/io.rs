//! Plain-text hypergraph format.
//!
//! ```text
//! # optional comments and blank lines
//! 13 4
//! 1 2 3 4
//! 1 5 6 7
//! ```
//!
//! The first content line is `D N`; every following line is one edge given as
//! space-separated 1-based vertices.

use std::fmt::Write as _;

use super::Hypergraph;
use crate::error::{Error, Result};
use crate::fock::BitIter;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| {
                    parse_err(lineno, format!("'{tok}' is not a non-negative integer"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match header {
            None => {
                if nums.len() != 2 {
                    return Err(parse_err(lineno, "header must be 'D N'"));
                }
                header = Some((nums[0], nums[1]));
            }
            Some((d, _)) => {
                if let Some(&bad) = nums.iter().find(|&&v| v == 0 || v > d) {
                    return Err(parse_err(lineno, format!("vertex {bad} outside 1..={d}")));
                }
                edges.push(nums);
            }
        }
    }
    let (d, n) = header.ok_or_else(|| parse_err(1, "missing 'D N' header"))?;
    Hypergraph::from_lists(d, n, &edges).map_err(|e| match e {
        // repeated vertices inside one edge are reported by the subset builder
        Error::InvalidArgument(m) => Error::Validation(m),
        other => other,
    })
}

pub fn write_hypergraph(hg: &Hypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", hg.num_vertices(), hg.edge_size());
    for &e in hg.edges() {
        let verts: Vec<String> = BitIter(e).map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(out, "{}", verts.join(" "));
    }
    out
}

//! Edge-list files.
//!
//! ```text
//! # comment
//! n m            (or: n m directed)
//! u v
//! ...
//! ```
//!
//! Undirected files are written with `u < v` in lexicographic order; in
//! directed files each line `u v` is the arc `u -> v`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::orient::Orientation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeList {
    Undirected(Graph),
    Directed(Orientation),
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = String::with_capacity(16 + 12 * g.edge_count());
    let _ = writeln!(s, "{} {}", g.n(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn write_orientation(d: &Orientation) -> String {
    let mut arcs: Vec<_> = d.arcs().collect();
    arcs.sort_unstable();
    let mut s = String::with_capacity(24 + 12 * arcs.len());
    let _ = writeln!(s, "{} {} directed", d.n(), arcs.len());
    for (u, v) in arcs {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let directed = match fields.as_slice() {
        [_, _] => false,
        [_, _, "directed"] => true,
        _ => return Err(parse_err(hline, "header must be `n m` or `n m directed`")),
    };
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, "bad vertex count"))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, "bad edge count"))?;
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let mut next = || -> Result<Vertex> {
            it.next()
                .ok_or_else(|| parse_err(ln, "expected `u v`"))?
                .parse()
                .map_err(|_| parse_err(ln, "bad vertex id"))
        };
        let (u, v) = (next()?, next()?);
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing fields"));
        }
        pairs.push((u, v));
    }
    if pairs.len() != m {
        return Err(parse_err(
            hline,
            format!("header announces {m} edges, found {}", pairs.len()),
        ));
    }
    let g = Graph::new(n, pairs.iter().copied())?;
    Ok(if directed {
        EdgeList::Directed(Orientation::from_arcs(g, &pairs)?)
    } else {
        EdgeList::Undirected(g)
    })
}

/// Reads an undirected graph; a directed file is accepted and its underlying
/// graph returned.
pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    Ok(match parse_edge_list(&fs::read_to_string(path)?)? {
        EdgeList::Undirected(g) => g,
        EdgeList::Directed(d) => d.base().clone(),
    })
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_graph(g))?;
    Ok(())
}

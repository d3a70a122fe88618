//! Edge-expansion check over small connected vertex sets.
//!
//! For a `d`-regular host, a set of minimum boundary among the violators can be
//! taken connected: if `X` splits into parts with no edges between them then
//! `|∂X| = Σ |∂X_i|`, singletons contribute `d` each and larger parts are
//! either fine or smaller violators themselves.

use serde::Serialize;

use crate::density::CheckStatus;
use crate::enumerate::for_each_connected_subset;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub status: CheckStatus,
    pub min_size: usize,
    pub max_size: usize,
    pub bound: usize,
    /// Smallest boundary over the examined sets and a set attaining it
    /// (smallest size, then lexicographically first).
    pub min_boundary: Option<usize>,
    pub witness: Option<VertexSet>,
    /// Smallest vertex degree, i.e. the smallest singleton boundary.
    pub singleton_min_boundary: usize,
    pub sets_examined: u64,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Passed
    }
}

pub fn expansion_check(
    g: &Graph,
    min_size: usize,
    max_size: usize,
    bound: usize,
    budget: u64,
) -> Result<ExpansionReport> {
    if min_size == 0 || min_size > max_size {
        return Err(Error::param(format!(
            "need 1 <= min_size <= max_size, got {min_size}..{max_size}"
        )));
    }
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    let outcome = for_each_connected_subset(g, max_size, budget, |s| {
        if s.len() < min_size {
            return;
        }
        let key = (s.boundary(), s.len());
        let better = match &best {
            None => true,
            Some((b, m, w)) => key < (*b, *m) || (key == (*b, *m) && s.sorted() < *w),
        };
        if better {
            best = Some((key.0, key.1, s.sorted()));
        }
    });
    let min_boundary = best.as_ref().map(|b| b.0);
    let (status, sets_examined) = match outcome {
        Err(_) => (CheckStatus::Inconclusive, budget),
        Ok(count) => match min_boundary {
            Some(b) if b < bound => (CheckStatus::Failed, count),
            _ => (CheckStatus::Passed, count),
        },
    };
    Ok(ExpansionReport {
        status,
        min_size,
        max_size,
        bound,
        min_boundary,
        witness: best.map(|b| VertexSet::from_sorted(b.2)),
        singleton_min_boundary: g.min_degree(),
        sets_examined,
    })
}

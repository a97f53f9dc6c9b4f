//! Enumeration of all connected induced subdiagrams of a model, up to a
//! node budget.
//!
//! Connectivity is judged on the undirected union of flow and trigger
//! arcs. Each subdiagram is produced exactly once via ESU-style
//! extension: a subgraph is grown only from its minimum node, and only
//! with exclusive neighbors carrying a larger id, so no deduplication
//! pass is needed. Roots are independent, which is what the `parallel`
//! feature exploits.

use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::model::{ActionId, Region, StaticModel};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default ceiling on the number of enumerated regions.
pub const DEFAULT_CAP: usize = 1 << 20;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("max_nodes must be at least 1")]
    InvalidMaxNodes,
    #[error("region enumeration exceeds the configured cap of {cap}")]
    BudgetExceeded { cap: usize },
}

/// Enumerates every connected induced subdiagram with at most `max_nodes`
/// nodes, in canonical order (lexicographic over sorted node-id sets).
pub fn enumerate_regions(
    model: &StaticModel,
    max_nodes: usize,
    cap: usize,
) -> Result<Vec<Region>, EnumError> {
    #[cfg(feature = "parallel")]
    {
        enumerate_regions_par(model, max_nodes, cap)
    }
    #[cfg(not(feature = "parallel"))]
    {
        enumerate_regions_seq(model, max_nodes, cap)
    }
}

/// Sequential enumeration. Kept callable with the `parallel` feature on,
/// so the two code paths can be compared directly.
pub fn enumerate_regions_seq(
    model: &StaticModel,
    max_nodes: usize,
    cap: usize,
) -> Result<Vec<Region>, EnumError> {
    if max_nodes == 0 {
        return Err(EnumError::InvalidMaxNodes);
    }
    let adj = model.undirected_adjacency();
    let counter = AtomicUsize::new(0);
    let mut sets = Vec::new();
    for root in 0..adj.len() as u32 {
        sets.extend(from_root(&adj, root, max_nodes, &counter, cap)?);
    }
    Ok(finish(model, sets))
}

#[cfg(feature = "parallel")]
pub fn enumerate_regions_par(
    model: &StaticModel,
    max_nodes: usize,
    cap: usize,
) -> Result<Vec<Region>, EnumError> {
    if max_nodes == 0 {
        return Err(EnumError::InvalidMaxNodes);
    }
    let adj = model.undirected_adjacency();
    let counter = AtomicUsize::new(0);
    let per_root: Result<Vec<Vec<Vec<u32>>>, EnumError> = (0..adj.len() as u32)
        .into_par_iter()
        .map(|root| from_root(&adj, root, max_nodes, &counter, cap))
        .collect();
    let sets: Vec<Vec<u32>> = per_root?.into_iter().flatten().collect();
    Ok(finish(model, sets))
}

fn finish(model: &StaticModel, mut sets: Vec<Vec<u32>>) -> Vec<Region> {
    sets.sort();
    sets.into_iter()
        .map(|nodes| {
            let nodes: std::collections::BTreeSet<ActionId> =
                nodes.into_iter().map(ActionId).collect();
            let arcs = model.induced_arcs(&nodes);
            Region { nodes, arcs }
        })
        .collect()
}

/// All connected subgraphs whose minimum node is `root`.
fn from_root(
    adj: &[Vec<u32>],
    root: u32,
    max_nodes: usize,
    counter: &AtomicUsize,
    cap: usize,
) -> Result<Vec<Vec<u32>>, EnumError> {
    let mut out = Vec::new();
    let mut nbhd = vec![false; adj.len()];
    nbhd[root as usize] = true;
    let mut ext: Vec<u32> = Vec::new();
    for &u in &adj[root as usize] {
        if u > root {
            nbhd[u as usize] = true;
            ext.push(u);
        }
    }
    let mut sub = vec![root];
    extend(
        adj, root, &mut sub, &ext, &mut nbhd, max_nodes, counter, cap, &mut out,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    adj: &[Vec<u32>],
    root: u32,
    sub: &mut Vec<u32>,
    ext: &[u32],
    nbhd: &mut [bool],
    max_nodes: usize,
    counter: &AtomicUsize,
    cap: usize,
    out: &mut Vec<Vec<u32>>,
) -> Result<(), EnumError> {
    if counter.fetch_add(1, Ordering::Relaxed) >= cap {
        return Err(EnumError::BudgetExceeded { cap });
    }
    let mut emitted = sub.clone();
    emitted.sort_unstable();
    out.push(emitted);
    if sub.len() == max_nodes {
        return Ok(());
    }
    for i in 0..ext.len() {
        let w = ext[i];
        // Exclusive neighbors of w, judged before w's neighborhood is
        // merged in.
        let mut ext2: Vec<u32> = ext[i + 1..].to_vec();
        for &u in &adj[w as usize] {
            if u > root && !nbhd[u as usize] {
                ext2.push(u);
            }
        }
        let mut marked = Vec::new();
        for &u in &adj[w as usize] {
            if !nbhd[u as usize] {
                nbhd[u as usize] = true;
                marked.push(u);
            }
        }
        sub.push(w);
        let res = extend(adj, root, sub, &ext2, nbhd, max_nodes, counter, cap, out);
        sub.pop();
        for u in marked {
            nbhd[u as usize] = false;
        }
        res?;
    }
    Ok(())
}

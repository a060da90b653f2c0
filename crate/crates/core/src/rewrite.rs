//! Rewriting chirotope trees to their canonical form.
//!
//! Two moves are allowed: contract an edge joining two convex nodes, and
//! split a nonconvex node along a nontrivial module. A tree where neither
//! applies is canonical, and every order of moves reaches the same one.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bowtie::{find_nontrivial_module, nontrivial_modules};
use crate::chirotope::Chirotope;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::tree::{ChirotopeTree, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteStep {
    /// Contract edge `edge`, which joins the convex nodes `u` and `v`.
    Contract { edge: usize, u: NodeId, v: NodeId },
    /// Split nonconvex node `node` along `module`.
    Split { node: NodeId, module: Vec<Label> },
}

/// How to pick among applicable moves.
#[derive(Clone, Debug)]
pub enum Strategy {
    /// The first applicable move: contractions by edge index, then splits
    /// by node id using the smallest module.
    Deterministic,
    /// A uniformly random applicable move, splits ranging over all modules.
    Random(ChaCha8Rng),
}

impl Strategy {
    pub fn seeded(seed: u64) -> Self {
        Strategy::Random(ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Lexicographic pair (multiset of nonconvex node sizes, number of convex
/// nodes); every move strictly decreases it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminationMeasure {
    /// Nonconvex node sizes in decreasing order. Comparing these vectors
    /// lexicographically is the multiset order.
    pub nonconvex_sizes: Vec<usize>,
    pub convex_count: usize,
}

impl Ord for TerminationMeasure {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nonconvex_sizes.cmp(&other.nonconvex_sizes).then(self.convex_count.cmp(&other.convex_count))
    }
}

impl PartialOrd for TerminationMeasure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn termination_measure(tree: &ChirotopeTree) -> TerminationMeasure {
    let mut nonconvex_sizes: Vec<usize> = tree.nodes().filter(|(_, c)| !c.is_convex()).map(|(_, c)| c.len()).collect();
    nonconvex_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let convex_count = tree.nodes().filter(|(_, c)| c.is_convex()).count();
    TerminationMeasure { nonconvex_sizes, convex_count }
}

fn convex_edges(tree: &ChirotopeTree) -> Vec<RewriteStep> {
    tree.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| tree.node(e.u).unwrap().is_convex() && tree.node(e.v).unwrap().is_convex())
        .map(|(i, e)| RewriteStep::Contract { edge: i, u: e.u, v: e.v })
        .collect()
}

fn nonconvex(tree: &ChirotopeTree) -> impl Iterator<Item = (NodeId, &Chirotope)> {
    tree.nodes().filter(|(_, c)| !c.is_convex())
}

/// Every move available in `tree`.
pub fn applicable_steps(tree: &ChirotopeTree, cap: usize) -> Result<Vec<RewriteStep>> {
    let mut steps = convex_edges(tree);
    for (id, chi) in nonconvex(tree) {
        for module in nontrivial_modules(chi, cap)? {
            steps.push(RewriteStep::Split { node: id, module });
        }
    }
    Ok(steps)
}

fn first_step(tree: &ChirotopeTree, cap: usize) -> Result<Option<RewriteStep>> {
    if let Some(step) = convex_edges(tree).into_iter().next() {
        return Ok(Some(step));
    }
    for (id, chi) in nonconvex(tree) {
        if let Some(module) = find_nontrivial_module(chi, cap)? {
            return Ok(Some(RewriteStep::Split { node: id, module }));
        }
    }
    Ok(None)
}

pub fn apply_step(tree: &ChirotopeTree, step: &RewriteStep) -> Result<ChirotopeTree> {
    match step {
        RewriteStep::Contract { edge, .. } => tree.contract_edge(*edge),
        RewriteStep::Split { node, module } => tree.split_node(*node, module),
    }
}

/// Performs one move, or returns `None` when the tree is canonical.
pub fn rewrite_once(tree: &ChirotopeTree, strategy: &mut Strategy, cap: usize) -> Result<Option<(ChirotopeTree, RewriteStep)>> {
    let step = match strategy {
        Strategy::Deterministic => first_step(tree, cap)?,
        Strategy::Random(rng) => {
            let mut steps = applicable_steps(tree, cap)?;
            if steps.is_empty() {
                None
            } else {
                let i = rng.gen_range(0..steps.len());
                Some(steps.swap_remove(i))
            }
        }
    };
    match step {
        None => Ok(None),
        Some(step) => Ok(Some((apply_step(tree, &step)?, step))),
    }
}

/// Every node is convex or indecomposable, and no edge joins two convex nodes.
pub fn is_canonical(tree: &ChirotopeTree, cap: usize) -> Result<bool> {
    Ok(first_step(tree, cap)?.is_none())
}

/// Rewrites until canonical, calling `observe(before, step, after)` on each
/// move.
pub fn canonicalize_traced(
    tree: &ChirotopeTree,
    strategy: &mut Strategy,
    cap: usize,
    mut observe: impl FnMut(&ChirotopeTree, &RewriteStep, &ChirotopeTree),
) -> Result<ChirotopeTree> {
    let ceiling = 4 * tree.total_element_count();
    let mut current = tree.clone();
    for _ in 0..=ceiling {
        match rewrite_once(&current, strategy, cap)? {
            None => return Ok(current),
            Some((next, step)) => {
                observe(&current, &step, &next);
                current = next;
            }
        }
    }
    Err(Error::RewriteCeiling(ceiling))
}

pub fn canonicalize(tree: &ChirotopeTree, strategy: &mut Strategy, cap: usize) -> Result<ChirotopeTree> {
    canonicalize_traced(tree, strategy, cap, |_, _, _| {})
}

/// The canonical tree of a single chirotope: its modular decomposition.
pub fn canonical_tree(chi: &Chirotope, cap: usize) -> Result<ChirotopeTree> {
    canonicalize(&ChirotopeTree::single(chi.clone()), &mut Strategy::Deterministic, cap)
}

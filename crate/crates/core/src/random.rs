//! Seeded random point configurations and chirotope trees.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chirotope::Chirotope;
use crate::error::{Error, Result};
use crate::geometry::PointConfig;
use crate::label::Label;
use crate::tree::{ChirotopeTree, Edge, NodeId};

/// Attempts allowed per node before giving up.
const ATTEMPTS: usize = 10_000;

/// Shape and size limits for random trees.
#[derive(Clone, Copy, Debug)]
pub struct RandomTreeSpec {
    pub nodes: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub max_degree: usize,
    /// Coordinates are drawn from `0..grid`.
    pub grid: i64,
}

impl RandomTreeSpec {
    pub fn uniform(nodes: usize, node_size: usize, max_degree: usize) -> Self {
        RandomTreeSpec { nodes, min_size: node_size, max_size: node_size, max_degree, grid: 64 }
    }
}

/// A random tree together with the points that realize each node.
#[derive(Clone, Debug)]
pub struct RandomTree {
    pub tree: ChirotopeTree,
    pub points: BTreeMap<NodeId, PointConfig>,
}

fn orient(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> i64 {
    ((q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)).signum()
}

/// Random integer points in general position with at least `min_extremes`
/// of them on the convex hull.
pub fn random_points<R: Rng>(rng: &mut R, labels: Vec<Label>, grid: i64, min_extremes: usize) -> Result<PointConfig> {
    let n = labels.len();
    'attempt: for _ in 0..ATTEMPTS {
        let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
        while pts.len() < n {
            let p = (rng.gen_range(0..grid), rng.gen_range(0..grid));
            let collinear = pts.iter().enumerate().any(|(i, &a)| a == p || pts[i + 1..].iter().any(|&b| orient(a, b, p) == 0));
            if collinear {
                continue 'attempt;
            }
            pts.push(p);
        }
        let pc = PointConfig::new(labels.iter().cloned().zip(pts.iter().map(|&(x, y)| crate::geometry::Point::from_ints(x, y))))?;
        if n < 3 || pc.chirotope()?.extreme_count() >= min_extremes {
            return Ok(pc);
        }
    }
    Err(Error::GenerationBudgetExceeded(ATTEMPTS))
}

/// Random tree shape: each new node attaches to a uniformly chosen earlier
/// node that still has room under the degree cap.
fn random_shape<R: Rng>(rng: &mut R, nodes: usize, max_degree: usize) -> Result<Vec<(usize, usize)>> {
    if nodes > 2 && max_degree < 2 || nodes == 2 && max_degree < 1 {
        return Err(Error::TooSmall { min: 2, got: max_degree });
    }
    let mut degree = vec![0usize; nodes];
    let mut edges = Vec::new();
    for child in 1..nodes {
        let open: Vec<usize> = (0..child).filter(|&p| degree[p] < max_degree).collect();
        let &parent = open.choose(rng).ok_or(Error::GenerationBudgetExceeded(0))?;
        degree[parent] += 1;
        degree[child] += 1;
        edges.push((parent, child));
    }
    Ok(edges)
}

/// A random chirotope tree whose nodes are random point sets.
pub fn random_point_tree(spec: &RandomTreeSpec, seed: u64) -> Result<RandomTree> {
    if spec.nodes == 0 {
        return Err(Error::TooSmall { min: 1, got: 0 });
    }
    if spec.min_size < 3 || spec.max_size < spec.min_size {
        return Err(Error::TooSmall { min: 3, got: spec.min_size });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = random_shape(&mut rng, spec.nodes, spec.max_degree)?;
    let mut degree = vec![0usize; spec.nodes];
    for &(a, b) in &shape {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut points = BTreeMap::new();
    let mut chis: Vec<Chirotope> = Vec::new();
    for (id, &deg) in degree.iter().enumerate() {
        let size = rng.gen_range(spec.min_size..=spec.max_size).max(deg).max(3);
        let labels: Vec<Label> = (0..size).map(|j| Label::new(format!("n{id}.{j}"))).collect();
        let pc = random_points(&mut rng, labels, spec.grid, deg)?;
        chis.push(pc.chirotope()?);
        points.insert(NodeId(id as u32), pc);
    }
    // Hand out distinct extreme elements of each node as proxies.
    let mut free: Vec<Vec<Label>> = chis
        .iter()
        .map(|c| {
            let mut e = c.extremes();
            e.shuffle(&mut rng);
            e
        })
        .collect();
    let edges = shape
        .iter()
        .map(|&(a, b)| {
            let pa = free[a].pop().expect("enough extremes");
            let pb = free[b].pop().expect("enough extremes");
            Edge::new(NodeId(a as u32), pa, NodeId(b as u32), pb)
        })
        .collect();
    let tree = ChirotopeTree::new(chis.into_iter().enumerate().map(|(i, c)| (NodeId(i as u32), c)), edges)?;
    Ok(RandomTree { tree, points })
}

/// A random tree with `nodes` nodes of `node_size` elements (more where the
/// degree requires it) and no node of degree above `max_degree`.
pub fn random_tree(nodes: usize, node_size: usize, max_degree: usize, seed: u64) -> Result<ChirotopeTree> {
    Ok(random_point_tree(&RandomTreeSpec::uniform(nodes, node_size, max_degree), seed)?.tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_tree() {
        let a = random_tree(5, 4, 3, 7).unwrap();
        let b = random_tree(5, 4, 3, 7).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = random_tree(5, 4, 3, 8).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn respects_degree_cap_and_realizations() {
        for seed in 0..20 {
            let r = random_point_tree(&RandomTreeSpec { nodes: 8, min_size: 3, max_size: 6, max_degree: 3, grid: 64 }, seed).unwrap();
            r.tree.validate().unwrap();
            for (id, chi) in r.tree.nodes() {
                assert!(r.tree.degree(id) <= 3);
                assert_eq!(r.points[&id].chirotope().unwrap(), *chi);
            }
        }
    }

    #[test]
    fn impossible_shapes_are_rejected() {
        assert!(random_tree(4, 4, 1, 0).is_err());
        assert!(random_tree(2, 4, 1, 0).is_ok());
    }
}

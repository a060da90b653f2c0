//! Exact triangulation counts for bowtie products and chirotope trees.
//!
//! A triangulation of a bowtie product splits into a triangulation of each
//! factor plus a maximal non-crossing set of segments between the two
//! sides. If the proxies have degrees `a` and `b` in the factors, those
//! sets are in bijection with compositions of `a + b - 1` into `b` parts,
//! which gives all the binomial weights below.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::poly::{binomial, pair_bit, BiPoly, FullPolynomial, Monomial, MultiPoly, UniPoly};
use crate::tree::{ChirotopeTree, NodeId};
use crate::triangulation::{full_polynomial, DEFAULT_POLYNOMIAL_CAP};

/// Number of maximal non-crossing segment sets between a side of `a`
/// elements and a side of `b` elements in which `fixed.len() < b` chosen
/// elements of the second side have the given degrees. With nothing fixed
/// this is `C(a + b - 2, b - 1)`.
pub fn count_noncrossing_matchings(a: u32, b: u32, fixed: &[u32]) -> BigInt {
    let (a, b, k) = (a as i64, b as i64, fixed.len() as i64);
    if a < 1 || b < 1 || k >= b || fixed.contains(&0) {
        return BigInt::default();
    }
    let sum: i64 = fixed.iter().map(|&i| i as i64).sum();
    binomial(a + b - sum - 2, b - (k + 1))
}

/// Weight polynomial `R_{a,b}` in `r` variables.
///
/// It counts the maximal non-crossing segment sets between a side whose
/// proxy had degree `a` and a side whose proxy had degree `b`, recording for
/// each of `r` marked elements of the second side its number of segments
/// beyond the first. Marked elements are neighbors of the second proxy, so
/// each receives at least one segment.
pub fn r_poly(a: u32, b: u32, r: usize) -> MultiPoly {
    let mut out = MultiPoly::zero(r);
    let (ai, bi, ri) = (a as i64, b as i64, r as i64);
    if a == 0 || bi < ri {
        return out;
    }
    let mut exps = vec![0u32; r];
    let mut visit = |exps: &[u32]| {
        let sum: i64 = exps.iter().map(|&e| e as i64).sum();
        let c = if bi == ri {
            if sum == ai - 1 {
                BigInt::from(1)
            } else {
                BigInt::default()
            }
        } else {
            binomial(ai + bi - sum - ri - 2, bi - (ri + 1))
        };
        out.add_term(exps.to_vec(), &c);
    };
    compositions_up_to(&mut exps, 0, a - 1, &mut visit);
    out
}

/// Visits every vector in `exps[pos..]` with entries summing to at most `budget`.
fn compositions_up_to(exps: &mut [u32], pos: usize, budget: u32, visit: &mut dyn FnMut(&[u32])) {
    if pos == exps.len() {
        visit(exps);
        return;
    }
    for e in 0..=budget {
        exps[pos] = e;
        compositions_up_to(exps, pos + 1, budget - e, visit);
    }
    exps[pos] = 0;
}

/// Triangulation count of the bowtie product of two factors, given the
/// degree polynomials of their proxies.
pub fn count_bowtie(p: &UniPoly, q: &UniPoly) -> BigInt {
    let mut total = BigInt::default();
    for (a, pa) in p.terms() {
        for (b, qb) in q.terms() {
            total += pa * qb * binomial(a as i64 + b as i64 - 2, a as i64 - 1);
        }
    }
    total
}

/// Degree polynomial of `z_star` in `chi ⋈ xi`, where the factor `xi` holds
/// both the gluing proxy `y_star` and `z_star`.
///
/// `p` is the degree polynomial of the proxy of `chi`; `q_in` and `q_out`
/// count triangulations of `xi` by `(deg y_star, deg z_star)` that contain,
/// respectively avoid, the segment `y_star z_star`.
pub fn merge_degree_polynomial(p: &UniPoly, q_in: &BiPoly, q_out: &BiPoly) -> UniPoly {
    let mut out = UniPoly::default();
    for (a, pa) in p.terms() {
        for (&(b, c), q) in q_out.terms() {
            out.add_term(c, &(pa * q * binomial(a as i64 + b as i64 - 2, a as i64 - 1)));
        }
        for (&(b, c), q) in q_in.terms() {
            for (exps, w) in r_poly(a as u32, b as u32, 1).terms() {
                out.add_term(c + exps[0] as usize, &(pa * q * w));
            }
        }
    }
    out
}

/// Folds a leaf into its parent: the parent's proxy `consumed` is glued to
/// the leaf's only proxy, whose degree polynomial is `leaf`.
pub fn merge_leaf(parent: &FullPolynomial, consumed: &Label, leaf: &UniPoly) -> Result<FullPolynomial> {
    let m = parent.proxy_index(consumed)?;
    let k = parent.proxies().len();
    let rest: Vec<usize> = (0..k).filter(|&i| i != m).collect();
    let mut out = FullPolynomial::new(rest.iter().map(|&i| parent.proxies()[i].clone()).collect())?;
    let mut cache: HashMap<(u32, u32, usize), MultiPoly> = HashMap::new();
    for (mono, c) in parent.terms() {
        let b = mono.degrees[m];
        // Remaining proxies adjacent to the consumed one, in new positions.
        let marked: Vec<usize> = (0..rest.len()).filter(|&n| mono.has_edge(rest[n], m)).collect();
        let mut base = Monomial { degrees: rest.iter().map(|&i| mono.degrees[i]).collect(), edges: 0 };
        for (n1, &i) in rest.iter().enumerate() {
            for (n2, &j) in rest.iter().enumerate().skip(n1 + 1) {
                if mono.has_edge(i, j) {
                    base.edges |= pair_bit(n1, n2);
                }
            }
        }
        for (a, pa) in leaf.terms() {
            let weights = cache.entry((a as u32, b, marked.len())).or_insert_with(|| r_poly(a as u32, b, marked.len()));
            for (exps, w) in weights.terms() {
                let mut term = base.clone();
                for (slot, &n) in marked.iter().enumerate() {
                    term.degrees[n] += exps[slot];
                }
                out.add_term(term, &(c * pa * w));
            }
        }
    }
    Ok(out)
}

/// Order in which leaves are folded into their parents.
#[derive(Clone, Copy, Debug, Default)]
pub enum LeafOrder {
    /// Always the leaf with the smallest node id.
    #[default]
    Smallest,
    /// A random leaf at each step.
    Seeded(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Largest node for which a node polynomial is computed.
    pub polynomial_cap: usize,
    pub leaf_order: LeafOrder,
    /// Compute node polynomials on the rayon thread pool.
    pub parallel: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { polynomial_cap: DEFAULT_POLYNOMIAL_CAP, leaf_order: LeafOrder::Smallest, parallel: true }
    }
}

/// Exact number of triangulations of the chirotope represented by `tree`.
pub fn count_tree(tree: &ChirotopeTree, opts: &CountOptions) -> Result<BigInt> {
    let ids: Vec<NodeId> = tree.node_ids().collect();
    let node_poly = |id: &NodeId| -> Result<(NodeId, FullPolynomial)> {
        let chi = tree.node(*id)?;
        Ok((*id, full_polynomial(chi, &tree.proxies(*id), opts.polynomial_cap)?))
    };
    let polys: Vec<(NodeId, FullPolynomial)> = if opts.parallel {
        ids.par_iter().map(node_poly).collect::<Result<_>>()?
    } else {
        ids.iter().map(node_poly).collect::<Result<_>>()?
    };
    let mut polys: BTreeMap<NodeId, FullPolynomial> = polys.into_iter().collect();
    // Remaining edges as (node, proxy, node, proxy).
    let mut edges: Vec<(NodeId, Label, NodeId, Label)> =
        tree.edges().iter().map(|e| (e.u, e.u_proxy.clone(), e.v, e.v_proxy.clone())).collect();
    let mut rng = match opts.leaf_order {
        LeafOrder::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        LeafOrder::Smallest => None,
    };
    while !edges.is_empty() {
        let mut leaves: Vec<NodeId> = polys
            .keys()
            .copied()
            .filter(|&n| edges.iter().filter(|e| e.0 == n || e.2 == n).count() == 1)
            .collect();
        if let Some(rng) = rng.as_mut() {
            leaves.shuffle(rng);
        }
        let leaf = leaves[0];
        let ei = edges.iter().position(|e| e.0 == leaf || e.2 == leaf).unwrap();
        let (u, up, v, vp) = edges.swap_remove(ei);
        let (parent, consumed) = if u == leaf { (v, vp) } else { (u, up) };
        let leaf_poly = polys.remove(&leaf).unwrap().to_degree_polynomial()?;
        let merged = merge_leaf(&polys[&parent], &consumed, &leaf_poly)?;
        polys.insert(parent, merged);
    }
    let last = polys.into_values().next().ok_or(Error::UnknownNode(0))?;
    Ok(last.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::FullPolynomial;

    #[test]
    fn r_poly_small_cases() {
        // R_{3,3}(u) = 3 + 2u + u^2
        let r = r_poly(3, 3, 1);
        assert_eq!(r.coeff(&[0]), BigInt::from(3));
        assert_eq!(r.coeff(&[1]), BigInt::from(2));
        assert_eq!(r.coeff(&[2]), BigInt::from(1));
        // With no marked elements, C(a + b - 2, b - 1).
        assert_eq!(r_poly(4, 3, 0).coeff(&[]), BigInt::from(10));
        // b = r: all compositions of a - 1.
        let r = r_poly(3, 2, 2);
        assert_eq!(r.terms().count(), 3);
        assert!(r.terms().all(|(e, c)| e.iter().sum::<u32>() == 2 && *c == BigInt::from(1)));
        assert!(r_poly(3, 1, 2).is_zero());
    }

    #[test]
    fn r_poly_sums_match_binomials() {
        for a in 1..7u32 {
            for b in 1..7u32 {
                for r in 0..b.min(3) as usize {
                    let total = r_poly(a, b, r).at_ones();
                    assert_eq!(total, binomial(a as i64 + b as i64 - 2, b as i64 - 1), "a={a} b={b} r={r}");
                }
            }
        }
    }

    #[test]
    fn two_triangles() {
        let p = UniPoly::from_i64(&[0, 0, 1]);
        assert_eq!(count_bowtie(&p, &p), BigInt::from(2));
    }

    #[test]
    fn merge_leaf_into_single_proxy_matches_count_bowtie() {
        let p = UniPoly::from_i64(&[0, 0, 0, 1, 1]);
        let mut parent = FullPolynomial::new(vec![Label::new("y")]).unwrap();
        parent.add_term(Monomial { degrees: vec![2], edges: 0 }, &BigInt::from(1));
        parent.add_term(Monomial { degrees: vec![3], edges: 0 }, &BigInt::from(1));
        parent.add_term(Monomial { degrees: vec![4], edges: 0 }, &BigInt::from(1));
        let merged = merge_leaf(&parent, &"y".into(), &p).unwrap();
        assert!(merged.proxies().is_empty());
        assert_eq!(merged.total(), count_bowtie(&p, &UniPoly::from_i64(&[0, 0, 1, 1, 1])));
        assert!(merge_leaf(&parent, &"zz".into(), &p).is_err());
    }
}

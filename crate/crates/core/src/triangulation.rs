//! Triangulations of chirotopes: maximal sets of pairwise non-crossing
//! segments, enumerated as maximal cliques of the compatibility graph.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::chirotope::{Chirotope, SignFunction};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::poly::{pair_bit, BiPoly, FullPolynomial, Monomial, UniPoly};

/// Default largest ground set for listing triangulations.
pub const DEFAULT_ENUMERATION_CAP: usize = 11;
/// Default largest node for computing a node polynomial.
pub const DEFAULT_POLYNOMIAL_CAP: usize = 14;
/// Segment sets are stored in 128-bit masks, so `C(n, 2) <= 128`.
pub const MAX_ENUMERATION: usize = 16;

/// A triangulation as a sorted list of segments, each with its endpoints
/// in increasing order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Triangulation {
    edges: Vec<(Label, Label)>,
}

impl Triangulation {
    pub fn new(edges: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let set: BTreeSet<(Label, Label)> =
            edges.into_iter().filter(|(a, b)| a != b).map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        Triangulation { edges: set.into_iter().collect() }
    }

    pub fn edges(&self) -> &[(Label, Label)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, a: &Label, b: &Label) -> bool {
        let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degree(&self, x: &Label) -> usize {
        self.edges.iter().filter(|(a, b)| a == x || b == x).count()
    }

    /// Whether the segments are pairwise non-crossing and no segment of the
    /// ground set can be added.
    pub fn is_triangulation_of(&self, sf: &SignFunction) -> bool {
        let idx: Option<Vec<(usize, usize)>> =
            self.edges.iter().map(|(a, b)| Some((sf.index_of(a)?, sf.index_of(b)?))).collect();
        let Some(idx) = idx else { return false };
        let crosses = |(a, b): (usize, usize), (c, d): (usize, usize)| sf.cross_idx(a, b, c, d);
        for (i, &s) in idx.iter().enumerate() {
            if idx[i + 1..].iter().any(|&t| crosses(s, t)) {
                return false;
            }
        }
        let n = sf.len();
        for a in 0..n {
            for b in a + 1..n {
                if !idx.contains(&(a, b)) && !idx.contains(&(b, a)) && idx.iter().all(|&t| !crosses((a, b), t)) {
                    return false;
                }
            }
        }
        true
    }
}

struct SegmentGraph {
    segments: Vec<(usize, usize)>,
    compatible: Vec<u128>,
}

impl SegmentGraph {
    fn new(sf: &SignFunction) -> Self {
        let n = sf.len();
        let segments: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let compatible = segments
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                segments.iter().enumerate().fold(0u128, |acc, (j, &(c, d))| {
                    if i != j && !sf.cross_idx(a, b, c, d) {
                        acc | 1 << j
                    } else {
                        acc
                    }
                })
            })
            .collect();
        SegmentGraph { segments, compatible }
    }

    /// Bron–Kerbosch with pivoting; `report` receives each maximal clique.
    fn maximal_cliques(&self, r: u128, mut p: u128, mut x: u128, report: &mut dyn FnMut(u128)) {
        if p == 0 {
            if x == 0 {
                report(r);
            }
            return;
        }
        let candidates = p | x;
        let pivot = bits(candidates).max_by_key(|&u| (p & self.compatible[u]).count_ones()).unwrap();
        for v in bits(p & !self.compatible[pivot]) {
            let nv = self.compatible[v];
            self.maximal_cliques(r | 1 << v, p & nv, x & nv, report);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_ENUMERATION);
    if n > cap {
        Err(Error::SizeCapExceeded { what: "ground set", size: n, cap })
    } else {
        Ok(())
    }
}

/// Calls `f` with the index segments of every triangulation.
pub(crate) fn for_each_triangulation(sf: &SignFunction, cap: usize, mut f: impl FnMut(&[(usize, usize)])) -> Result<()> {
    check_cap(sf.len(), cap)?;
    let g = SegmentGraph::new(sf);
    let all = if g.segments.len() == 128 { u128::MAX } else { (1u128 << g.segments.len()) - 1 };
    let mut buf = Vec::new();
    g.maximal_cliques(0, all, 0, &mut |clique| {
        buf.clear();
        buf.extend(bits(clique).map(|i| g.segments[i]));
        f(&buf);
    });
    Ok(())
}

/// Every triangulation, sorted.
pub fn enumerate_triangulations(sf: &SignFunction, cap: usize) -> Result<Vec<Triangulation>> {
    let mut out = Vec::new();
    for_each_triangulation(sf, cap, |segs| {
        out.push(Triangulation::new(segs.iter().map(|&(a, b)| (sf.labels()[a].clone(), sf.labels()[b].clone()))));
    })?;
    out.sort();
    Ok(out)
}

/// Number of triangulations by direct enumeration.
pub fn count_triangulations_brute(sf: &SignFunction, cap: usize) -> Result<BigInt> {
    let mut count = 0u64;
    for_each_triangulation(sf, cap, |_| count += 1)?;
    Ok(count.into())
}

/// Counts triangulations by the degrees of `proxies` and by which pairs of
/// proxies they join.
pub fn full_polynomial(sf: &SignFunction, proxies: &[Label], cap: usize) -> Result<FullPolynomial> {
    let pidx: Vec<usize> = proxies.iter().map(|p| sf.require(p)).collect::<Result<_>>()?;
    if let Some(w) = proxies.iter().enumerate().find(|(i, p)| proxies[..*i].contains(p)) {
        return Err(Error::RepeatedLabel(w.1.clone()));
    }
    let mut slot = vec![usize::MAX; sf.len()];
    for (k, &i) in pidx.iter().enumerate() {
        slot[i] = k;
    }
    let mut poly = FullPolynomial::new(proxies.to_vec())?;
    let one = BigInt::one();
    for_each_triangulation(sf, cap, |segs| {
        let mut m = Monomial { degrees: vec![0; pidx.len()], edges: 0 };
        for &(a, b) in segs {
            let (sa, sb) = (slot[a], slot[b]);
            if sa != usize::MAX {
                m.degrees[sa] += 1;
            }
            if sb != usize::MAX {
                m.degrees[sb] += 1;
            }
            if sa != usize::MAX && sb != usize::MAX {
                m.edges |= pair_bit(sa.min(sb), sa.max(sb));
            }
        }
        poly.add_term(m, &one);
    })?;
    Ok(poly)
}

/// Triangulations counted by the degree of `x_star`.
pub fn degree_polynomial(chi: &Chirotope, x_star: &Label, cap: usize) -> Result<UniPoly> {
    full_polynomial(chi, std::slice::from_ref(x_star), cap)?.to_degree_polynomial()
}

/// Triangulations counted by the degrees of `y_star` and `z_star`, split by
/// whether they contain the segment `y_star z_star`.
pub fn edge_split_polynomials(chi: &Chirotope, y_star: &Label, z_star: &Label, cap: usize) -> Result<(BiPoly, BiPoly)> {
    full_polynomial(chi, &[y_star.clone(), z_star.clone()], cap)?.to_edge_split()
}

/// Maps every element outside `module` to `proxy`, dropping loops and
/// duplicate segments.
pub fn project_triangulation(t: &Triangulation, module: &[Label], proxy: &Label) -> Triangulation {
    let map = |l: &Label| if module.contains(l) { l.clone() } else { proxy.clone() };
    Triangulation::new(t.edges().iter().map(|(a, b)| (map(a), map(b))))
}

/// Segments of `t` with exactly one endpoint in `module`.
pub fn crossing_segments(t: &Triangulation, module: &[Label]) -> Vec<(Label, Label)> {
    t.edges().iter().filter(|(a, b)| module.contains(a) != module.contains(b)).cloned().collect()
}

/// Rebuilds a triangulation of a bowtie product from triangulations of the
/// two factors and the segments running between the two sides.
pub fn lift_triangulation(
    left: &Triangulation,
    x_star: &Label,
    right: &Triangulation,
    y_star: &Label,
    between: &[(Label, Label)],
) -> Triangulation {
    let inner = |t: &Triangulation, proxy: &Label| {
        t.edges().iter().filter(|(a, b)| a != proxy && b != proxy).cloned().collect::<Vec<_>>()
    };
    Triangulation::new(inner(left, x_star).into_iter().chain(inner(right, y_star)).chain(between.iter().cloned()))
}

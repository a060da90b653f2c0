//! Sign functions on labeled ground sets and the chirotopes among them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use crate::error::{Axiom, Error, Result};
use crate::label::Label;

/// Largest ground set a sign table is allowed to cover.
pub const MAX_GROUND: usize = 512;

/// Position of the sorted index triple `i < j < k` in a dense sign table.
#[inline]
pub(crate) fn triple_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    k * (k - 1) * (k - 2) / 6 + j * (j - 1) / 2 + i
}

#[inline]
fn triple_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// All permutations of `0..k` in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Calls `f` on every sorted `k`-subset of `0..n`, in lexicographic order,
/// until it returns `false`.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A map from ordered triples of distinct labels to `{+1, -1}` that is
/// alternating: swapping two arguments flips the sign.
///
/// Only sorted triples are stored; other orders are derived from the
/// permutation parity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignFunction {
    labels: Vec<Label>,
    signs: Vec<i8>,
}

impl SignFunction {
    /// Builds a sign function by querying `f` on every sorted triple of labels.
    pub fn from_fn(
        labels: impl IntoIterator<Item = Label>,
        mut f: impl FnMut(&Label, &Label, &Label) -> i8,
    ) -> Result<Self> {
        let labels = sorted_unique(labels)?;
        let mut signs = vec![0i8; triple_count(labels.len())];
        for k in 2..labels.len() {
            for j in 1..k {
                for i in 0..j {
                    let s = f(&labels[i], &labels[j], &labels[k]);
                    if s != 1 && s != -1 {
                        return Err(Error::InvalidSign {
                            a: labels[i].clone(),
                            b: labels[j].clone(),
                            c: labels[k].clone(),
                            sign: s as i64,
                        });
                    }
                    signs[triple_index(i, j, k)] = s;
                }
            }
        }
        Ok(SignFunction { labels, signs })
    }

    /// Builds from a sorted triple map; every sorted triple must be present.
    pub fn from_sorted_triples(
        labels: impl IntoIterator<Item = Label>,
        triples: &BTreeMap<[Label; 3], i8>,
    ) -> Result<Self> {
        let labels = sorted_unique(labels)?;
        for key in triples.keys() {
            for l in key {
                if labels.binary_search(l).is_err() {
                    return Err(Error::UnknownLabel(l.clone()));
                }
            }
        }
        let mut missing = None;
        let sf = Self::from_fn(labels, |a, b, c| {
            match triples.get(&[a.clone(), b.clone(), c.clone()]) {
                Some(&s) => s,
                None => {
                    missing.get_or_insert_with(|| (a.clone(), b.clone(), c.clone()));
                    1
                }
            }
        })?;
        if let Some((a, b, c)) = missing {
            return Err(Error::MissingSign(a, b, c));
        }
        Ok(sf)
    }

    /// Builds from labels that are already sorted and unique, querying `f`
    /// with sorted index triples.
    pub(crate) fn from_index_fn(labels: Vec<Label>, mut f: impl FnMut(usize, usize, usize) -> i8) -> Self {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let mut signs = vec![0i8; triple_count(labels.len())];
        for k in 2..labels.len() {
            for j in 1..k {
                for i in 0..j {
                    let s = f(i, j, k);
                    debug_assert!(s == 1 || s == -1);
                    signs[triple_index(i, j, k)] = s;
                }
            }
        }
        SignFunction { labels, signs }
    }

    /// Ground set in increasing order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.index_of(l).is_some()
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.labels.binary_search(l).ok()
    }

    pub(crate) fn require(&self, l: &Label) -> Result<usize> {
        self.index_of(l).ok_or_else(|| Error::UnknownLabel(l.clone()))
    }

    /// Sign of the ordered triple `(a, b, c)` of distinct labels.
    pub fn sign(&self, a: &Label, b: &Label, c: &Label) -> Result<i8> {
        let (i, j, k) = (self.require(a)?, self.require(b)?, self.require(c)?);
        if i == j || i == k {
            return Err(Error::RepeatedLabel(a.clone()));
        }
        if j == k {
            return Err(Error::RepeatedLabel(b.clone()));
        }
        Ok(self.sign_idx(i, j, k))
    }

    /// Sign of the ordered triple of distinct ground indices.
    #[inline]
    pub fn sign_idx(&self, i: usize, j: usize, k: usize) -> i8 {
        let (mut a, mut b, mut c) = (i, j, k);
        let mut s = 1i8;
        if a > b {
            std::mem::swap(&mut a, &mut b);
            s = -s;
        }
        if b > c {
            std::mem::swap(&mut b, &mut c);
            s = -s;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
            s = -s;
        }
        s * self.signs[triple_index(a, b, c)]
    }

    /// Iterates over `(a, b, c, sign)` for every sorted triple.
    pub fn sorted_triples(&self) -> impl Iterator<Item = (&Label, &Label, &Label, i8)> + '_ {
        let n = self.labels.len();
        (2..n).flat_map(move |k| {
            (1..k).flat_map(move |j| {
                (0..j).map(move |i| {
                    (&self.labels[i], &self.labels[j], &self.labels[k], self.signs[triple_index(i, j, k)])
                })
            })
        })
    }

    /// Restriction to a subset of the ground set.
    pub fn restrict(&self, subset: &[Label]) -> Result<SignFunction> {
        let sub = sorted_unique(subset.iter().cloned())?;
        let idx = sub.iter().map(|l| self.require(l)).collect::<Result<Vec<_>>>()?;
        Ok(SignFunction::from_index_fn(sub, |i, j, k| self.sign_idx(idx[i], idx[j], idx[k])))
    }

    /// Renames elements; labels missing from `map` keep their name. The
    /// resulting labels must be distinct.
    pub fn relabel(&self, map: &BTreeMap<Label, Label>) -> Result<SignFunction> {
        for k in map.keys() {
            self.require(k)?;
        }
        let renamed: Vec<Label> =
            self.labels.iter().map(|l| map.get(l).cloned().unwrap_or_else(|| l.clone())).collect();
        let mut order: Vec<usize> = (0..renamed.len()).collect();
        order.sort_by(|&a, &b| renamed[a].cmp(&renamed[b]));
        for w in order.windows(2) {
            if renamed[w[0]] == renamed[w[1]] {
                return Err(Error::NotBijective(format!("two elements map to `{}`", renamed[w[0]])));
            }
        }
        let new_labels: Vec<Label> = order.iter().map(|&o| renamed[o].clone()).collect();
        Ok(SignFunction::from_index_fn(new_labels, |i, j, k| self.sign_idx(order[i], order[j], order[k])))
    }

    /// Sign function with every sign flipped (the mirror image).
    pub fn mirrored(&self) -> SignFunction {
        SignFunction { labels: self.labels.clone(), signs: self.signs.iter().map(|s| -s).collect() }
    }

    /// Checks both axioms by brute force and reports the first failing tuple.
    ///
    /// Tuples are visited by sorted subset in lexicographic order, and within a
    /// subset by argument order in lexicographic order.
    pub fn validate_axioms(&self) -> Result<()> {
        let n = self.len();
        let mut violation = None;
        let perms4 = permutations(4);
        for_each_subset(n, 4, |s| {
            for p in &perms4 {
                let (t, x, y, z) = (s[p[0]], s[p[1]], s[p[2]], s[p[3]]);
                if self.sign_idx(t, y, z) == 1
                    && self.sign_idx(x, t, z) == 1
                    && self.sign_idx(x, y, t) == 1
                    && self.sign_idx(x, y, z) != 1
                {
                    violation = Some((Axiom::Interiority, vec![t, x, y, z]));
                    return false;
                }
            }
            true
        });
        if violation.is_none() {
            let perms5 = permutations(5);
            for_each_subset(n, 5, |s| {
                for p in &perms5 {
                    let (u, t, x, y, z) = (s[p[0]], s[p[1]], s[p[2]], s[p[3]], s[p[4]]);
                    if self.sign_idx(t, u, x) == 1
                        && self.sign_idx(t, u, y) == 1
                        && self.sign_idx(t, u, z) == 1
                        && self.sign_idx(x, y, t) == 1
                        && self.sign_idx(y, z, t) == 1
                        && self.sign_idx(x, z, t) != 1
                    {
                        violation = Some((Axiom::Transitivity, vec![u, t, x, y, z]));
                        return false;
                    }
                }
                true
            });
        }
        match violation {
            None => Ok(()),
            Some((axiom, tuple)) => Err(Error::AxiomViolation {
                axiom,
                tuple: tuple.into_iter().map(|i| self.labels[i].clone()).collect(),
            }),
        }
    }

    /// Whether the segments `ab` and `cd` (four distinct labels) cross.
    pub fn segments_cross(&self, ab: (&Label, &Label), cd: (&Label, &Label)) -> Result<bool> {
        let (a, b, c, d) = (self.require(ab.0)?, self.require(ab.1)?, self.require(cd.0)?, self.require(cd.1)?);
        if a == b || c == d {
            return Err(Error::RepeatedLabel(if a == b { ab.0.clone() } else { cd.0.clone() }));
        }
        Ok(self.cross_idx(a, b, c, d))
    }

    /// Crossing test on indices; segments sharing an endpoint never cross.
    #[inline]
    pub(crate) fn cross_idx(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        if a == c || a == d || b == c || b == d {
            return false;
        }
        self.sign_idx(a, b, c) == -self.sign_idx(a, b, d) && self.sign_idx(c, d, a) == -self.sign_idx(c, d, b)
    }
}

impl fmt::Debug for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table: String = self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        f.debug_struct("SignFunction").field("labels", &self.labels).field("signs", &table).finish()
    }
}

fn sorted_unique(labels: impl IntoIterator<Item = Label>) -> Result<Vec<Label>> {
    let mut labels: Vec<Label> = labels.into_iter().collect();
    labels.sort();
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::RepeatedLabel(w[0].clone()));
    }
    if labels.len() > MAX_GROUND {
        return Err(Error::SizeCapExceeded { what: "ground set", size: labels.len(), cap: MAX_GROUND });
    }
    Ok(labels)
}

/// A sign function satisfying the interiority and transitivity axioms,
/// together with its extreme elements and hull cycle.
#[derive(Clone)]
pub struct Chirotope {
    sf: SignFunction,
    extreme: Vec<bool>,
    hull: Vec<usize>,
}

impl PartialEq for Chirotope {
    fn eq(&self, other: &Self) -> bool {
        self.sf == other.sf
    }
}

impl Eq for Chirotope {}

impl fmt::Debug for Chirotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.sf.fmt(f)
    }
}

impl Deref for Chirotope {
    type Target = SignFunction;

    fn deref(&self) -> &SignFunction {
        &self.sf
    }
}

impl Chirotope {
    /// Validates the axioms and wraps the sign function.
    pub fn new(sf: SignFunction) -> Result<Self> {
        if sf.len() < 3 {
            return Err(Error::TooSmall { min: 3, got: sf.len() });
        }
        sf.validate_axioms()?;
        Ok(Self::from_trusted(sf))
    }

    /// Wraps a sign function known to satisfy the axioms by construction.
    pub(crate) fn from_trusted(sf: SignFunction) -> Self {
        let n = sf.len();
        let extreme: Vec<bool> = (0..n).map(|x| extreme_partner(&sf, x).is_some()).collect();
        let mut hull: Vec<usize> = (0..n).filter(|&x| extreme[x]).collect();
        if let Some(&a) = hull.first() {
            hull[1..].sort_by(|&p, &q| radial_cmp(&sf, a, p, q));
        }
        Chirotope { sf, extreme, hull }
    }

    pub fn sign_function(&self) -> &SignFunction {
        &self.sf
    }

    pub fn into_sign_function(self) -> SignFunction {
        self.sf
    }

    pub fn is_extreme(&self, x: &Label) -> Result<bool> {
        Ok(self.extreme[self.require(x)?])
    }

    /// Extreme elements in increasing label order.
    pub fn extremes(&self) -> Vec<Label> {
        (0..self.len()).filter(|&x| self.extreme[x]).map(|x| self.labels()[x].clone()).collect()
    }

    pub fn extreme_count(&self) -> usize {
        self.hull.len()
    }

    /// Whether every element is extreme.
    pub fn is_convex(&self) -> bool {
        self.hull.len() == self.len()
    }

    /// Extreme elements in counterclockwise order, starting from the
    /// smallest extreme label.
    pub fn hull_cycle(&self) -> Vec<Label> {
        self.hull.iter().map(|&i| self.labels()[i].clone()).collect()
    }

    /// The other elements sorted counterclockwise around the extreme element
    /// `a`: `p` precedes `q` exactly when `(a, p, q)` is positive.
    pub fn radial_order(&self, a: &Label) -> Result<Vec<Label>> {
        let ai = self.require(a)?;
        if !self.extreme[ai] {
            return Err(Error::NotExtreme(a.clone()));
        }
        let mut rest: Vec<usize> = (0..self.len()).filter(|&p| p != ai).collect();
        rest.sort_by(|&p, &q| radial_cmp(&self.sf, ai, p, q));
        Ok(rest.into_iter().map(|i| self.labels()[i].clone()).collect())
    }

    /// For a non-extreme `t`, a triple `(a, b, c)` whose three triangles
    /// around `t` are all positive. Extreme elements have none.
    pub fn caratheodory_witness(&self, t: &Label) -> Result<Option<[Label; 3]>> {
        let ti = self.require(t)?;
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if a == ti || b == ti || a == b || self.sign_idx(ti, a, b) != 1 {
                    continue;
                }
                for c in a + 1..n {
                    if c == ti || c == b {
                        continue;
                    }
                    if self.sign_idx(ti, b, c) == 1 && self.sign_idx(ti, c, a) == 1 {
                        let l = self.labels();
                        return Ok(Some([l[a].clone(), l[b].clone(), l[c].clone()]));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn restrict(&self, subset: &[Label]) -> Result<Chirotope> {
        let sf = self.sf.restrict(subset)?;
        if sf.len() < 3 {
            return Err(Error::TooSmall { min: 3, got: sf.len() });
        }
        Ok(Chirotope::from_trusted(sf))
    }

    pub fn relabel(&self, map: &BTreeMap<Label, Label>) -> Result<Chirotope> {
        Ok(Chirotope::from_trusted(self.sf.relabel(map)?))
    }

    pub fn mirrored(&self) -> Chirotope {
        Chirotope::from_trusted(self.sf.mirrored())
    }
}

/// An element `y` such that `(x, y, z)` has the same sign for every `z`.
fn extreme_partner(sf: &SignFunction, x: usize) -> Option<usize> {
    let n = sf.len();
    (0..n).filter(|&y| y != x).find(|&y| {
        let mut sign = 0;
        (0..n).filter(|&z| z != x && z != y).all(|z| {
            let s = sf.sign_idx(x, y, z);
            if sign == 0 {
                sign = s;
            }
            s == sign
        })
    })
}

fn radial_cmp(sf: &SignFunction, a: usize, p: usize, q: usize) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    if p == q {
        Equal
    } else if sf.sign_idx(a, p, q) == 1 {
        Less
    } else {
        Greater
    }
}

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use chirotope::random::{random_point_tree, random_points, RandomTree, RandomTreeSpec};
use chirotope::{Chirotope, Label, Point, PointConfig, SignFunction};

pub fn decimal_config(pts: &[(&str, &str, &str)]) -> Chirotope {
    PointConfig::new(pts.iter().map(|(l, x, y)| (Label::new(l), Point::parse(x, y).unwrap())))
        .unwrap()
        .chirotope()
        .unwrap()
}

/// Two overlapping four-element modules whose intersection `{x, y}` is not one.
pub fn six_points() -> Chirotope {
    decimal_config(&[
        ("x", "0", "0.7"),
        ("y", "0", "-0.7"),
        ("a", "-1.12", "0.15"),
        ("b", "-1", "-0.15"),
        ("c", "1", "0.15"),
        ("d", "0.91", "-0.25"),
    ])
}

/// `{a, b, c, d}` is a quasi-module but not a module.
pub fn quasi_example() -> Chirotope {
    decimal_config(&[
        ("a", "0", "0"),
        ("b", "0.2", "0.2"),
        ("c", "0.7", "-0.2"),
        ("d", "0.4", "-0.5"),
        ("q", "-0.7", "-0.2"),
        ("p", "-1.5", "0"),
        ("r", "1.5", "-0.1"),
    ])
}

pub fn names(prefix: &str, n: usize) -> Vec<Label> {
    (0..n).map(|i| Label::new(format!("{prefix}{i}"))).collect()
}

/// Random points in general position labeled `{prefix}0, {prefix}1, ...`.
pub fn random_config(rng: &mut ChaCha8Rng, prefix: &str, n: usize) -> PointConfig {
    random_points(rng, names(prefix, n), 40, 0).unwrap()
}

pub fn random_chirotope(rng: &mut ChaCha8Rng, prefix: &str, n: usize) -> Chirotope {
    random_config(rng, prefix, n).chirotope().unwrap()
}

pub fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

/// A random point-decorated tree with node sizes in `3..=max_size`, redrawn
/// until its expansion has at most `max_expand` elements.
pub fn small_tree(seed: u64, max_nodes: usize, max_size: usize, max_expand: usize) -> RandomTree {
    for attempt in 0u64.. {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let nodes = 1 + (s % max_nodes as u64) as usize;
        let spec = RandomTreeSpec { nodes, min_size: 3, max_size, max_degree: 3, grid: 48 };
        let r = random_point_tree(&spec, s).unwrap();
        if r.tree.labels().len() <= max_expand {
            return r;
        }
    }
    unreachable!()
}

/// Whether segments `ab` and `cd` with four distinct ends cross, read
/// directly from the signs.
pub fn crossing(sf: &SignFunction, a: &Label, b: &Label, c: &Label, d: &Label) -> bool {
    let s = |p: &Label, q: &Label, r: &Label| sf.sign(p, q, r).unwrap();
    s(a, b, c) != s(a, b, d) && s(c, d, a) != s(c, d, b)
}

/// Every inclusion-maximal set of pairwise non-crossing segments between
/// `xs` and `ys`, found by trying each segment in and out in turn.
pub fn maximal_noncrossing_between(sf: &SignFunction, xs: &[Label], ys: &[Label]) -> Vec<Vec<(Label, Label)>> {
    let segs: Vec<(Label, Label)> = xs.iter().flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let m = segs.len();
    let compatible: Vec<Vec<bool>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let ((a, b), (c, d)) = (&segs[i], &segs[j]);
                    a == c || b == d || !crossing(sf, a, b, c, d)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn go(i: usize, m: usize, ok: &[Vec<bool>], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == m {
            if (0..m).all(|s| chosen.contains(&s) || chosen.iter().any(|&c| !ok[s][c])) {
                out.push(chosen.clone());
            }
            return;
        }
        if chosen.iter().all(|&c| ok[i][c]) {
            chosen.push(i);
            go(i + 1, m, ok, chosen, out);
            chosen.pop();
        }
        go(i + 1, m, ok, chosen, out);
    }
    let mut raw = Vec::new();
    go(0, m, &compatible, &mut chosen, &mut raw);
    for set in raw {
        out.push(set.into_iter().map(|i| segs[i].clone()).collect());
    }
    out
}

/// Degree of every label in a segment set.
pub fn degrees(set: &[(Label, Label)]) -> BTreeMap<Label, u32> {
    let mut d = BTreeMap::new();
    for (a, b) in set {
        *d.entry(a.clone()).or_insert(0) += 1;
        *d.entry(b.clone()).or_insert(0) += 1;
    }
    d
}

/// Interiority checked straight from its statement over all ordered
/// quadruples.
pub fn satisfies_interiority(sf: &SignFunction) -> bool {
    let l = sf.labels();
    let n = l.len();
    for t in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let distinct = t != x && t != y && t != z && x != y && x != z && y != z;
                    if !distinct {
                        continue;
                    }
                    let s = |a: usize, b: usize, c: usize| sf.sign(&l[a], &l[b], &l[c]).unwrap();
                    if s(t, x, y) == 1 && s(t, y, z) == 1 && s(t, z, x) == 1 && s(x, y, z) != 1 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

//! Exact rational realizations of bowtie products and chirotope trees.
//!
//! To realize `chi ⋈ xi` from point sets `P` and `Q`, place `P` so that its
//! proxy sits at the origin with an escape ray along the positive x-axis
//! that meets no line spanned by two other points of `P`; place `Q` the
//! same way along the negative x-axis; then translate `Q` far to the right.
//! When the proxy has no escape ray, a projective map first sends a line
//! just beyond the proxy to infinity. Every candidate is checked exactly
//! against the target chirotope, and only checked output is returned.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bowtie::bowtie;
use crate::chirotope::Chirotope;
use crate::error::{Error, Result};
use crate::geometry::{Point, PointConfig};
use crate::label::Label;
use crate::tree::{ChirotopeTree, NodeId};

#[derive(Clone, Copy, Debug)]
pub struct RealizeOptions {
    /// How many times the separation is doubled per placement.
    pub doublings: usize,
    /// Largest allowed numerator or denominator bit length.
    pub max_bits: u64,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions { doublings: 48, max_bits: 1 << 14 }
    }
}

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn sub(a: &Point, b: &Point) -> Point {
    Point::new(&a.x - &b.x, &a.y - &b.y)
}

fn cross(a: &Point, b: &Point) -> Q {
    &a.x * &b.y - &a.y * &b.x
}

fn dot(a: &Point, b: &Point) -> Q {
    &a.x * &b.x + &a.y * &b.y
}

fn sgn(v: &Q) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn l1(a: &Point) -> Q {
    a.x.abs() + a.y.abs()
}

/// Angular comparison of nonzero vectors, counterclockwise from the
/// positive x-axis.
fn angle_cmp(a: &Point, b: &Point) -> Ordering {
    let half = |v: &Point| if v.y.is_positive() || (v.y.is_zero() && v.x.is_positive()) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| match sgn(&cross(a, b)) {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    })
}

/// A direction along which the ray from `p` meets no line through two of
/// `others`, strictly inside the set of such directions.
fn escape_direction(p: &Point, others: &[Point]) -> Option<Point> {
    let mut lines = Vec::new();
    for (i, a) in others.iter().enumerate() {
        for b in &others[i + 1..] {
            let u = sub(b, a);
            let side = sgn(&cross(&u, &sub(p, a)));
            lines.push((u, side));
        }
    }
    let feasible = |d: &Point| lines.iter().all(|(u, side)| sgn(&cross(u, d)) == *side);
    if lines.is_empty() {
        return Some(Point::from_ints(1, 0));
    }
    let mut dirs: Vec<Point> = lines.iter().flat_map(|(u, _)| [u.clone(), Point::new(-&u.x, -&u.y)]).collect();
    dirs.sort_by(angle_cmp);
    dirs.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);
    for i in 0..dirs.len() {
        let (a, b) = (&dirs[i], &dirs[(i + 1) % dirs.len()]);
        let candidate = if sgn(&cross(a, b)) > 0 {
            let (na, nb) = (l1(a), l1(b));
            Point::new(&a.x / &na + &b.x / &nb, &a.y / &na + &b.y / &nb)
        } else {
            Point::new(-&a.y, a.x.clone())
        };
        if feasible(&candidate) {
            return Some(candidate);
        }
    }
    None
}

/// Moves `p` to the origin and turns `dir` onto the positive x-axis (or the
/// negative one when `flip`), using a rotation-scaling of positive
/// determinant.
fn normalize(config: &PointConfig, proxy: &Point, dir: &Point, flip: bool) -> PointConfig {
    let s = if flip { q(-1) } else { q(1) };
    config.map_points(|z| {
        let v = sub(z, proxy);
        let x = &dir.x * &v.x + &dir.y * &v.y;
        let y = &dir.x * &v.y - &dir.y * &v.x;
        Point::new(&s * x, &s * y)
    })
}

/// The projective map `z -> (z - p) / ((r - z) . d)`, which preserves
/// orientation on the side of the line `(z - r) . d = 0` containing `p`.
fn projective(config: &PointConfig, p: &Point, r: &Point, d: &Point) -> PointConfig {
    config.map_points(|z| {
        let w = dot(&sub(r, z), d);
        let v = sub(z, p);
        Point::new(&v.x / &w, &v.y / &w)
    })
}

/// Candidate placements of `config` with `proxy` at the origin and a free
/// ray along the positive x-axis (negative when `flip`).
fn placements(config: &PointConfig, chi: &Chirotope, proxy: &Label, flip: bool) -> Vec<PointConfig> {
    let p = config.get(proxy).expect("proxy in configuration").clone();
    let others: Vec<Point> = config.iter().filter(|(l, _)| *l != proxy).map(|(_, z)| z.clone()).collect();
    let mut out = Vec::new();
    if let Some(dir) = escape_direction(&p, &others) {
        out.push(normalize(config, &p, &dir, flip));
    }
    // Outward directions at the proxy: away from the centroid, and the
    // outer normals of the two hull edges at the proxy.
    let n = q(others.len() as i64);
    let centroid = Point::new(
        others.iter().map(|z| z.x.clone()).sum::<Q>() / &n,
        others.iter().map(|z| z.y.clone()).sum::<Q>() / &n,
    );
    let hull = chi.hull_cycle();
    let at = hull.iter().position(|l| l == proxy).expect("proxy is extreme");
    let next = config.get(&hull[(at + 1) % hull.len()]).unwrap();
    let prev = config.get(&hull[(at + hull.len() - 1) % hull.len()]).unwrap();
    let e1 = sub(next, &p);
    let e2 = sub(&p, prev);
    let n1 = Point::new(e1.y.clone(), -&e1.x);
    let n2 = Point::new(e2.y.clone(), -&e2.x);
    let both = Point::new(&n1.x + &n2.x, &n1.y + &n2.y);
    for d in [sub(&p, &centroid), both, n1, n2] {
        let pd = dot(&p, &d);
        if d.x.is_zero() && d.y.is_zero() || others.iter().any(|z| dot(z, &d) >= pd) {
            continue;
        }
        // Stop halfway to the first spanned line along the ray.
        let mut t_first: Option<Q> = None;
        for (i, a) in others.iter().enumerate() {
            for b in &others[i + 1..] {
                let u = sub(b, a);
                let denom = cross(&u, &d);
                if denom.is_zero() {
                    continue;
                }
                let t = cross(&u, &sub(a, &p)) / -denom;
                if t.is_positive() && t_first.as_ref().is_none_or(|f| &t < f) {
                    t_first = Some(t);
                }
            }
        }
        let half = t_first.unwrap_or_else(|| q(2)) / q(2);
        let r = Point::new(&p.x + &half * &d.x, &p.y + &half * &d.y);
        let mapped = projective(config, &p, &r, &d);
        let origin = Point::from_ints(0, 0);
        let mapped_others: Vec<Point> = mapped.iter().filter(|(l, _)| *l != proxy).map(|(_, z)| z.clone()).collect();
        if let Some(dir) = escape_direction(&origin, &mapped_others) {
            out.push(normalize(&mapped, &origin, &dir, flip));
        }
    }
    out
}

fn radius(config: &PointConfig) -> Q {
    config.points().iter().map(l1).fold(q(0), |a, b| if b > a { b } else { a })
}

/// `config` snapped to a `2^p` grid over its bounding box, rounding to the
/// nearest node.
fn snap(config: &PointConfig, min: &Point, extent: &Q, p: u64) -> PointConfig {
    let scale = Q::from_integer(num_bigint::BigInt::from(1) << p) / extent;
    let half = Q::new(1.into(), 2.into());
    config.map_points(|z| Point::new(((&z.x - &min.x) * &scale + &half).floor(), ((&z.y - &min.y) * &scale + &half).floor()))
}

/// An integer configuration with the same chirotope as `config`, on as
/// coarse a grid as a doubling-then-bisection search finds. General
/// position makes every fine enough grid work; `config` itself is returned
/// when none up to its own precision does.
fn round_to_grid(config: &PointConfig, chi: &Chirotope) -> PointConfig {
    let pts = config.points();
    let min_of = |f: fn(&Point) -> &Q| pts.iter().map(f).min().unwrap().clone();
    let max_of = |f: fn(&Point) -> &Q| pts.iter().map(f).max().unwrap().clone();
    let min = Point::new(min_of(|z| &z.x), min_of(|z| &z.y));
    let extent = std::cmp::max(max_of(|z| &z.x) - &min.x, max_of(|z| &z.y) - &min.y);
    if !extent.is_positive() {
        return config.clone();
    }
    let fits = |p: u64| {
        let c = snap(config, &min, &extent, p);
        (c.sign_function().ok().as_ref() == Some(chi.sign_function())).then_some(c)
    };
    let limit = 2 * config.bit_length() + 64;
    let (mut lo, mut hi) = (0, 8);
    let mut best = loop {
        if hi > limit {
            return config.clone();
        }
        if let Some(c) = fits(hi) {
            break c;
        }
        lo = hi;
        hi *= 2;
    };
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match fits(mid) {
            Some(c) => {
                best = c;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    best
}

/// Points realizing `bowtie(chi(p), x_star, chi(q), y_star)`, checked exactly.
pub fn realize_bowtie(p: &PointConfig, x_star: &Label, qc: &PointConfig, y_star: &Label, opts: &RealizeOptions) -> Result<PointConfig> {
    let chi = p.chirotope()?;
    let xi = qc.chirotope()?;
    let target = bowtie(&chi, x_star, &xi, y_star)?;
    let mut attempts = 0;
    for left in placements(p, &chi, x_star, false) {
        for right in placements(qc, &xi, y_star, true) {
            let mut shift = (radius(&left) + radius(&right)) * q(2) + q(1);
            for _ in 0..opts.doublings {
                attempts += 1;
                let placed = left
                    .iter()
                    .filter(|(l, _)| *l != x_star)
                    .map(|(l, z)| (l.clone(), z.clone()))
                    .chain(right.iter().filter(|(l, _)| *l != y_star).map(|(l, z)| (l.clone(), Point::new(&z.x + &shift, z.y.clone()))));
                let candidate = PointConfig::new(placed)?;
                if candidate.bit_length() > opts.max_bits {
                    break;
                }
                if candidate.sign_function().ok().as_ref() == Some(target.sign_function()) {
                    return Ok(round_to_grid(&candidate, &target));
                }
                shift = shift * q(2);
            }
        }
    }
    Err(Error::RealizationNotFound { attempts, node: None })
}

/// Points realizing the chirotope of `tree`, given a realization of every
/// node, built by merging leaves into their parents. The result is checked
/// against the expanded tree.
pub fn realize_tree(tree: &ChirotopeTree, nodes: &BTreeMap<NodeId, PointConfig>, opts: &RealizeOptions) -> Result<PointConfig> {
    let mut configs: BTreeMap<NodeId, PointConfig> = BTreeMap::new();
    for (id, chi) in tree.nodes() {
        let pc = nodes.get(&id).ok_or(Error::UnknownNode(id.0))?;
        if pc.sign_function().ok().as_ref() != Some(chi.sign_function()) {
            return Err(Error::RealizationMismatch(id.0));
        }
        configs.insert(id, pc.clone());
    }
    let mut edges: Vec<(NodeId, Label, NodeId, Label)> =
        tree.edges().iter().map(|e| (e.u, e.u_proxy.clone(), e.v, e.v_proxy.clone())).collect();
    while !edges.is_empty() {
        let leaf = *configs.keys().find(|&&n| edges.iter().filter(|e| e.0 == n || e.2 == n).count() == 1).unwrap();
        let ei = edges.iter().position(|e| e.0 == leaf || e.2 == leaf).unwrap();
        let (u, up, v, vp) = edges.swap_remove(ei);
        let ((parent, pp), lp) = if u == leaf { ((v, vp), up) } else { ((u, up), vp) };
        let leaf_pc = configs.remove(&leaf).unwrap();
        let merged = realize_bowtie(&configs[&parent], &pp, &leaf_pc, &lp, opts).map_err(|e| match e {
            Error::RealizationNotFound { attempts, .. } => Error::RealizationNotFound { attempts, node: Some(leaf.0) },
            other => other,
        })?;
        configs.insert(parent, merged);
    }
    let result = configs.into_values().next().ok_or(Error::UnknownNode(0))?;
    if result.sign_function()? != *tree.expand().sign_function() {
        return Err(Error::RealizationNotFound { attempts: 0, node: None });
    }
    Ok(result)
}

/// Integer points with chirotope `chi`, found by placing the elements one
/// at a time at random grid positions consistent with those already placed.
/// Each of the `attempts` restarts uses a larger grid.
pub fn search_points(chi: &Chirotope, attempts: usize, seed: u64) -> Result<PointConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = chi.len();
    for attempt in 0..attempts {
        let grid = 16i64 << (attempt % 10);
        let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
        'place: while pts.len() < n {
            let k = pts.len();
            for _ in 0..4 * grid {
                let z = (rng.gen_range(0..grid), rng.gen_range(0..grid));
                let fits = (0..k).all(|j| {
                    (j + 1..k).all(|i| {
                        let (a, b) = (pts[j], pts[i]);
                        let o = ((b.0 - a.0) * (z.1 - a.1) - (b.1 - a.1) * (z.0 - a.0)).signum() as i8;
                        o == chi.sign_idx(j, i, k)
                    })
                }) && !pts.contains(&z);
                if fits {
                    pts.push(z);
                    continue 'place;
                }
            }
            break;
        }
        if pts.len() == n {
            let pc = PointConfig::new(chi.labels().iter().cloned().zip(pts.iter().map(|&(x, y)| Point::from_ints(x, y))))?;
            if pc.sign_function().ok().as_ref() == Some(chi.sign_function()) {
                return Ok(pc);
            }
        }
    }
    Err(Error::RealizationNotFound { attempts, node: None })
}

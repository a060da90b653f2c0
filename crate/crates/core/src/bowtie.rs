//! Bowtie products, modules and their factorizations, and quasi-modules.

use std::collections::BTreeMap;

use crate::chirotope::{for_each_subset, Chirotope, SignFunction};
use crate::error::{Error, Result};
use crate::label::Label;

/// Default largest ground set for subset enumeration.
pub const DEFAULT_MODULE_CAP: usize = 16;

#[derive(Clone, Copy)]
enum Side {
    Left(usize),
    Right(usize),
}

/// Sign map of the bowtie product without any extremeness requirement.
///
/// The product lives on `X ∪ Y`, where `X` is the ground of `chi` minus
/// `x_star` and `Y` the ground of `xi` minus `y_star`. A triple with at least
/// two elements of `X` is evaluated in `chi` with its `Y` element replaced by
/// `x_star`; otherwise it is evaluated in `xi` with its `X` element replaced
/// by `y_star`.
pub fn bowtie_sign_function(chi: &SignFunction, x_star: &Label, xi: &SignFunction, y_star: &Label) -> Result<SignFunction> {
    let xs = chi.require(x_star)?;
    let ys = xi.require(y_star)?;
    let mut sides: BTreeMap<Label, Side> = BTreeMap::new();
    for (i, l) in chi.labels().iter().enumerate().filter(|&(i, _)| i != xs) {
        sides.insert(l.clone(), Side::Left(i));
    }
    for (j, l) in xi.labels().iter().enumerate().filter(|&(j, _)| j != ys) {
        if sides.insert(l.clone(), Side::Right(j)).is_some() {
            return Err(Error::GroundOverlap(l.clone()));
        }
    }
    let left = chi.len() - 1;
    let right = xi.len() - 1;
    if left < 2 || right < 2 {
        return Err(Error::TooSmall { min: 2, got: left.min(right) });
    }
    let (labels, sides): (Vec<Label>, Vec<Side>) = sides.into_iter().unzip();
    Ok(SignFunction::from_index_fn(labels, |i, j, k| {
        let t = [sides[i], sides[j], sides[k]];
        let in_left = t.iter().filter(|s| matches!(s, Side::Left(_))).count();
        let [a, b, c] = t.map(|s| match (s, in_left >= 2) {
            (Side::Left(p), true) => p,
            (Side::Right(_), true) => xs,
            (Side::Left(_), false) => ys,
            (Side::Right(q), false) => q,
        });
        if in_left >= 2 {
            chi.sign_idx(a, b, c)
        } else {
            xi.sign_idx(a, b, c)
        }
    }))
}

/// Bowtie product of two chirotopes glued at the extreme proxies `x_star`
/// and `y_star`; the result is a chirotope on the union of the other
/// elements.
pub fn bowtie(chi: &Chirotope, x_star: &Label, xi: &Chirotope, y_star: &Label) -> Result<Chirotope> {
    if !chi.is_extreme(x_star)? {
        return Err(Error::NotExtreme(x_star.clone()));
    }
    if !xi.is_extreme(y_star)? {
        return Err(Error::NotExtreme(y_star.clone()));
    }
    Ok(Chirotope::from_trusted(bowtie_sign_function(chi, x_star, xi, y_star)?))
}

fn indices_of(sf: &SignFunction, set: &[Label]) -> Result<Vec<bool>> {
    let mut inside = vec![false; sf.len()];
    for l in set {
        let i = sf.require(l)?;
        if inside[i] {
            return Err(Error::RepeatedLabel(l.clone()));
        }
        inside[i] = true;
    }
    Ok(inside)
}

/// Module test on a membership mask.
pub(crate) fn is_module_mask(sf: &SignFunction, inside: &[bool]) -> bool {
    let ins: Vec<usize> = (0..sf.len()).filter(|&i| inside[i]).collect();
    let outs: Vec<usize> = (0..sf.len()).filter(|&i| !inside[i]).collect();
    if ins.len() <= 1 || outs.len() <= 1 {
        return true;
    }
    let uniform = |pairs: &[usize], others: &[usize]| {
        pairs.iter().enumerate().all(|(n, &a)| {
            pairs[n + 1..].iter().all(|&b| {
                let s = sf.sign_idx(a, b, others[0]);
                others[1..].iter().all(|&o| sf.sign_idx(a, b, o) == s)
            })
        })
    };
    // Pairs inside see all outside points on one side, and pairs outside see
    // all inside points on one side.
    uniform(&ins, &outs) && uniform(&outs, &ins)
}

/// Whether `set` is a module: every pair inside sees every outside element
/// on the same side, and every pair outside sees every inside element on the
/// same side. Sets with at most one element inside or outside are trivial
/// modules.
pub fn is_module(sf: &SignFunction, set: &[Label]) -> Result<bool> {
    Ok(is_module_mask(sf, &indices_of(sf, set)?))
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::SizeCapExceeded { what: "ground set", size: n, cap })
    } else {
        Ok(())
    }
}

/// Smallest nontrivial module, ties broken by the lexicographically smallest
/// member list. `None` means the chirotope is indecomposable.
pub fn find_nontrivial_module(sf: &SignFunction, cap: usize) -> Result<Option<Vec<Label>>> {
    let n = sf.len();
    check_cap(n, cap)?;
    let mut found = None;
    for size in 2..=n / 2 {
        let mut mask = vec![false; n];
        for_each_subset(n, size, |s| {
            s.iter().for_each(|&i| mask[i] = true);
            let hit = is_module_mask(sf, &mask);
            s.iter().for_each(|&i| mask[i] = false);
            if hit {
                found = Some(s.iter().map(|&i| sf.labels()[i].clone()).collect());
            }
            !hit
        });
        if found.is_some() {
            break;
        }
    }
    Ok(found)
}

/// Every nontrivial module, listed once per complementary pair: the member
/// of the pair that excludes the smallest label.
pub fn nontrivial_modules(sf: &SignFunction, cap: usize) -> Result<Vec<Vec<Label>>> {
    let n = sf.len();
    check_cap(n, cap)?;
    let mut out = Vec::new();
    if n < 4 {
        return Ok(out);
    }
    let mut mask = vec![false; n];
    for size in 2..=n - 2 {
        for_each_subset(n - 1, size, |s| {
            s.iter().for_each(|&i| mask[i + 1] = true);
            if is_module_mask(sf, &mask) {
                out.push(s.iter().map(|&i| sf.labels()[i + 1].clone()).collect());
            }
            s.iter().for_each(|&i| mask[i + 1] = false);
            true
        });
    }
    Ok(out)
}

pub fn is_decomposable(sf: &SignFunction, cap: usize) -> Result<bool> {
    Ok(find_nontrivial_module(sf, cap)?.is_some())
}

/// The two factors of a chirotope split along a module.
#[derive(Clone, Debug)]
pub struct Factors {
    /// Restriction to the module plus `x_star`, which stands for the rest.
    pub chi: Chirotope,
    pub x_star: Label,
    /// Restriction to the complement plus `y_star`, which stands for the module.
    pub xi: Chirotope,
    pub y_star: Label,
}

/// Splits `kappa` along the nontrivial module `module` so that
/// `bowtie(chi, x_star, xi, y_star)` reproduces `kappa`.
pub fn factorize(kappa: &Chirotope, module: &[Label], x_star: &Label, y_star: &Label) -> Result<Factors> {
    let inside = indices_of(kappa, module)?;
    for s in [x_star, y_star] {
        if kappa.contains(s) {
            return Err(Error::LabelCollision(s.clone()));
        }
    }
    if x_star == y_star {
        return Err(Error::LabelCollision(x_star.clone()));
    }
    let k = module.len();
    if k < 2 || kappa.len() - k < 2 || !is_module_mask(kappa, &inside) {
        return Err(Error::NotAModule);
    }
    let first_out = inside.iter().position(|&b| !b).unwrap();
    let first_in = inside.iter().position(|&b| b).unwrap();
    let side = |keep: bool, stand_in: usize, proxy: &Label| -> Result<Chirotope> {
        let mut ground: Vec<Label> =
            kappa.labels().iter().enumerate().filter(|&(i, _)| inside[i] == keep).map(|(_, l)| l.clone()).collect();
        ground.push(kappa.labels()[stand_in].clone());
        let restricted = kappa.restrict(&ground)?;
        let rename: BTreeMap<Label, Label> = [(kappa.labels()[stand_in].clone(), proxy.clone())].into();
        restricted.relabel(&rename)
    };
    Ok(Factors {
        chi: side(true, first_out, x_star)?,
        x_star: x_star.clone(),
        xi: side(false, first_in, y_star)?,
        y_star: y_star.clone(),
    })
}

/// The bipartition of the outside induced by the pair `(a, b)`, as a mask
/// normalized to contain the first outside element.
fn pair_split(sf: &SignFunction, a: usize, b: usize, outs: &[usize]) -> u64 {
    let mut mask = 0u64;
    for (bit, &o) in outs.iter().enumerate() {
        if sf.sign_idx(a, b, o) == 1 {
            mask |= 1 << bit;
        }
    }
    if mask & 1 == 0 {
        mask ^= (1u64 << outs.len()) - 1;
    }
    mask
}

fn quasi_module_mask(sf: &SignFunction, inside: &[bool]) -> bool {
    let ins: Vec<usize> = (0..sf.len()).filter(|&i| inside[i]).collect();
    let outs: Vec<usize> = (0..sf.len()).filter(|&i| !inside[i]).collect();
    if ins.len() < 2 || outs.len() < 2 {
        return false;
    }
    let full = (1u64 << outs.len()) - 1;
    let split = pair_split(sf, ins[0], ins[1], &outs);
    if split == full {
        return false;
    }
    ins.iter()
        .enumerate()
        .all(|(n, &a)| ins[n + 1..].iter().all(|&b| pair_split(sf, a, b, &outs) == split))
}

/// Whether every pair of `set` cuts the remaining elements into the same
/// two nonempty parts.
pub fn is_quasi_module(sf: &SignFunction, set: &[Label]) -> Result<bool> {
    Ok(quasi_module_mask(sf, &indices_of(sf, set)?))
}

/// All quasi-modules with at least `min_size` elements, ordered by size and
/// then lexicographically.
pub fn quasi_modules(sf: &SignFunction, min_size: usize, cap: usize) -> Result<Vec<Vec<Label>>> {
    let n = sf.len();
    check_cap(n, cap.min(63))?;
    let mut out = Vec::new();
    let mut mask = vec![false; n];
    for size in min_size.max(2)..=n.saturating_sub(2) {
        for_each_subset(n, size, |s| {
            s.iter().for_each(|&i| mask[i] = true);
            if quasi_module_mask(sf, &mask) {
                out.push(s.iter().map(|&i| sf.labels()[i].clone()).collect());
            }
            s.iter().for_each(|&i| mask[i] = false);
            true
        });
    }
    Ok(out)
}

/// The two elements of a quasi-module that every outside element sees as
/// the first and last in counterclockwise order, returned sorted.
pub fn antipodal_elements(chi: &Chirotope, set: &[Label]) -> Result<(Label, Label)> {
    let inside = indices_of(chi, set)?;
    if !quasi_module_mask(chi, &inside) {
        return Err(Error::NotQuasiModule);
    }
    let ins: Vec<usize> = (0..chi.len()).filter(|&i| inside[i]).collect();
    let outs: Vec<usize> = (0..chi.len()).filter(|&i| !inside[i]).collect();
    let b = outs[0];
    let mut order = ins.clone();
    order.sort_by(|&p, &q| {
        if p == q {
            std::cmp::Ordering::Equal
        } else if chi.sign_idx(b, p, q) == 1 {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let (w1, w2) = (order[0], order[order.len() - 1]);
    let holds = outs.iter().all(|&a| {
        let mut common = 0;
        ins.iter().filter(|&&w| w != w1 && w != w2).all(|&w| {
            let s = chi.sign_idx(a, w1, w);
            if common == 0 {
                common = s;
            }
            s == chi.sign_idx(a, w, w2) && s == common
        })
    });
    if !holds {
        return Err(Error::NotQuasiModule);
    }
    let (l1, l2) = (chi.labels()[w1].clone(), chi.labels()[w2].clone());
    Ok(if l1 < l2 { (l1, l2) } else { (l2, l1) })
}

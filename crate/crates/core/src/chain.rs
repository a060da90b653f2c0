//! Chains of four-point blocks glued end to end.
//!
//! Each block is a triangle `x*, y*, z` with an interior point `c`, in one
//! of two mirror-image orientations. Gluing `y*` of block `i` to `x*` of
//! block `i + 1` gives a chirotope on `2k + 2` points whose triangulation
//! count does not depend on the orientations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::chirotope::Chirotope;
use crate::error::{Error, Result};
use crate::geometry::PointConfig;
use crate::label::Label;
use crate::poly::{binomial, UniPoly};
use crate::tree::{ChirotopeTree, Edge, NodeId};

/// Labels `(x*, y*, z, c)` of block `i`.
pub fn block_labels(i: usize) -> [Label; 4] {
    [format!("x{i}*"), format!("y{i}*"), format!("z{i}"), format!("c{i}")].map(Label::from)
}

/// Block `i` in orientation `flip`: `z` above the proxies, or below them.
pub fn chain_block(i: usize, flip: bool) -> Chirotope {
    let [x, y, z, c] = block_labels(i);
    let s = if flip { -1 } else { 1 };
    PointConfig::from_ints([(x.as_str(), (-6, -4 * s)), (y.as_str(), (6, -4 * s)), (z.as_str(), (0, 7 * s)), (c.as_str(), (0, 0))])
        .and_then(|p| p.chirotope())
        .expect("block points are in general position")
}

/// The chain tree for the orientation word `sigma` (one block per entry).
pub fn chain_tree(sigma: &[bool]) -> Result<ChirotopeTree> {
    if sigma.is_empty() {
        return Err(Error::TooSmall { min: 1, got: 0 });
    }
    let nodes = sigma.iter().enumerate().map(|(i, &b)| (NodeId(i as u32), chain_block(i, b)));
    let edges = (1..sigma.len())
        .map(|i| Edge::new(NodeId(i as u32 - 1), block_labels(i - 1)[1].clone(), NodeId(i as u32), block_labels(i)[0].clone()))
        .collect();
    ChirotopeTree::new(nodes, edges)
}

/// Parses a word over `{0, 1}`.
pub fn parse_sigma(word: &str) -> Result<Vec<bool>> {
    word.chars()
        .enumerate()
        .map(|(i, ch)| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse { line: 1, column: i + 1, msg: format!("expected 0 or 1, found `{ch}`") }),
        })
        .collect()
}

fn exact_div(n: &BigInt, d: &BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = n.div_rem(d);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::DivisionRemainder(format!("{what}: {n} / {d}")))
    }
}

/// Closed-form triangulation count of a chain of `k` blocks:
/// `3(2k+1) C(4k+2, 2k+1) / ((2k+2)(4k+1)) - 4^k C(2k+2, k+1) / (2k+1)`.
pub fn chain_count(k: usize) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::TooSmall { min: 1, got: 0 });
    }
    let k = k as i64;
    let first = exact_div(
        &(BigInt::from(3 * (2 * k + 1)) * binomial(4 * k + 2, 2 * k + 1)),
        &BigInt::from((2 * k + 2) * (4 * k + 1)),
        "first term",
    )?;
    let second = exact_div(
        &(num_traits::pow(BigInt::from(4), k as usize) * binomial(2 * k + 2, k + 1)),
        &BigInt::from(2 * k + 1),
        "second term",
    )?;
    Ok(first - second)
}

/// Degree polynomial of the last proxy of a chain of `k` blocks, from
/// `P_1 = s^3` and
/// `P_{k+1}(s) = [s^4 (P_k(s) - P_k(1)) + s^3 (1 - s) P_k'(1)] / (1 - s)^2`.
pub fn chain_degree_poly(k: usize) -> Result<UniPoly> {
    if k == 0 {
        return Err(Error::TooSmall { min: 1, got: 0 });
    }
    let mut p = UniPoly::from_i64(&[0, 0, 0, 1]);
    for _ in 1..k {
        let shifted = p.add(&UniPoly::monomial(0, -p.at_one())).mul(&UniPoly::monomial(4, 1.into()));
        let slope = UniPoly::from_i64(&[0, 0, 0, 1, -1]).scale(&p.derivative_at_one());
        // (1 - s)^2 = (s - 1)^2, so two exact divisions by (s - 1).
        p = shifted.add(&slope).div_by_s_minus_one()?.div_by_s_minus_one()?;
    }
    Ok(p)
}

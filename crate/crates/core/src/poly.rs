//! Exact integer polynomials used for triangulation counting.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::label::Label;

/// `C(n, k)`, zero when `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn accumulate<K: Ord>(terms: &mut BTreeMap<K, BigInt>, key: K, c: &BigInt) {
    match terms.entry(key) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c.clone());
            }
        }
    }
}

/// Dense univariate polynomial with big-integer coefficients.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn monomial(degree: usize, c: BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Nonzero terms as `(degree, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn add_term(&mut self, d: usize, c: &BigInt) {
        if self.coeffs.len() <= d {
            self.coeffs.resize(d + 1, BigInt::zero());
        }
        self.coeffs[d] += c;
        self.trim();
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Sum of the coefficients.
    pub fn at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Derivative evaluated at 1.
    pub fn derivative_at_one(&self) -> BigInt {
        self.coeffs.iter().enumerate().map(|(d, c)| c * BigInt::from(d)).sum()
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|d| self.coeff(d) + other.coeff(d)).collect())
    }

    pub fn scale(&self, c: &BigInt) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Exact division by `s - 1`; fails on a nonzero remainder.
    pub fn div_by_s_minus_one(&self) -> Result<UniPoly> {
        if self.is_zero() {
            return Ok(UniPoly::default());
        }
        // Synthetic division from the top coefficient down.
        let n = self.coeffs.len();
        let mut quotient = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for d in (1..n).rev() {
            carry += &self.coeffs[d];
            quotient[d - 1] = carry.clone();
        }
        let remainder = carry + &self.coeffs[0];
        if !remainder.is_zero() {
            return Err(Error::DivisionRemainder(format!("{self} by (s - 1) leaves {remainder}")));
        }
        Ok(UniPoly::new(quotient))
    }

    /// Formats with the given variable name.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (d, c) in self.terms() {
            let neg = c.is_negative();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            match d {
                0 => out.push_str(&mag.to_string()),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&mag.to_string());
                    }
                    out.push_str(var);
                    if d > 1 {
                        out.push_str(&format!("^{d}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("s"))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

/// Sparse polynomial in two variables `t` and `u`, keyed by `(deg_t, deg_u)`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), BigInt>,
}

impl BiPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), BigInt)>) -> Self {
        let mut p = BiPoly::default();
        for (k, c) in terms {
            p.add_term(k, &c);
        }
        p
    }

    pub fn add_term(&mut self, key: (usize, usize), c: &BigInt) {
        accumulate(&mut self.terms, key, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: usize, u: usize) -> BigInt {
        self.terms.get(&(t, u)).cloned().unwrap_or_default()
    }

    /// Sets `u = 1`, leaving a polynomial in `t`.
    pub fn forget_u(&self) -> UniPoly {
        let mut p = UniPoly::default();
        for (&(t, _), c) in &self.terms {
            p.add_term(t, c);
        }
        p
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut p = self.clone();
        for (&k, c) in &other.terms {
            p.add_term(k, c);
        }
        p
    }
}

/// Sparse polynomial in `nvars` variables, keyed by exponent vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: &BigInt) {
        debug_assert_eq!(exps.len(), self.nvars);
        accumulate(&mut self.terms, exps, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value with every variable set to 1.
    pub fn at_ones(&self) -> BigInt {
        self.terms.values().sum()
    }
}

/// Largest number of proxies a full polynomial tracks.
pub const MAX_PROXIES: usize = 11;

/// Bit of the proxy-pair variable `y_{i,j}` for `i < j`.
#[inline]
pub fn pair_bit(i: usize, j: usize) -> u64 {
    debug_assert!(i < j);
    1u64 << (j * (j - 1) / 2 + i)
}

/// A monomial `prod x_i^{d_i} * prod_{(i,j) in edges} y_{i,j}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    pub degrees: Vec<u32>,
    pub edges: u64,
}

impl Monomial {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges & pair_bit(a, b) != 0
    }
}

/// Triangulations of a chirotope counted by the degrees of its proxies and
/// by which proxy pairs they join.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FullPolynomial {
    proxies: Vec<Label>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl FullPolynomial {
    pub fn new(proxies: Vec<Label>) -> Result<Self> {
        if proxies.len() > MAX_PROXIES {
            return Err(Error::SizeCapExceeded { what: "proxy list", size: proxies.len(), cap: MAX_PROXIES });
        }
        Ok(FullPolynomial { proxies, terms: BTreeMap::new() })
    }

    pub fn proxies(&self) -> &[Label] {
        &self.proxies
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: &BigInt) {
        debug_assert_eq!(m.degrees.len(), self.proxies.len());
        accumulate(&mut self.terms, m, c);
    }

    /// Total number of triangulations counted.
    pub fn total(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn proxy_index(&self, l: &Label) -> Result<usize> {
        self.proxies
            .iter()
            .position(|p| p == l)
            .ok_or_else(|| Error::VariableMismatch(format!("`{l}` is not a proxy of this polynomial")))
    }

    /// The polynomial in the degree of the single proxy.
    pub fn to_degree_polynomial(&self) -> Result<UniPoly> {
        if self.proxies.len() != 1 {
            return Err(Error::VariableMismatch(format!("expected one proxy, found {}", self.proxies.len())));
        }
        let mut p = UniPoly::default();
        for (m, c) in &self.terms {
            p.add_term(m.degrees[0] as usize, c);
        }
        Ok(p)
    }

    /// For two proxies `[y, z]`, the polynomials in `(deg y, deg z)` over
    /// triangulations containing, respectively avoiding, the segment `yz`.
    pub fn to_edge_split(&self) -> Result<(BiPoly, BiPoly)> {
        if self.proxies.len() != 2 {
            return Err(Error::VariableMismatch(format!("expected two proxies, found {}", self.proxies.len())));
        }
        let (mut with, mut without) = (BiPoly::default(), BiPoly::default());
        for (m, c) in &self.terms {
            let key = (m.degrees[0] as usize, m.degrees[1] as usize);
            if m.has_edge(0, 1) {
                with.add_term(key, c);
            } else {
                without.add_term(key, c);
            }
        }
        Ok((with, without))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(4, 0), BigInt::one());
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(binomial(-1, 0), BigInt::zero());
        for n in 0..12 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn exact_division_by_a_double_root() {
        // s^3 (s^4 - 4 s + 3) = s^3 (s - 1)^2 (s^2 + 2 s + 3)
        let n = UniPoly::from_i64(&[0, 0, 0, 3, -4, 0, 0, 1]);
        let q = n.div_by_s_minus_one().unwrap().div_by_s_minus_one().unwrap();
        assert_eq!(q, UniPoly::from_i64(&[0, 0, 0, 3, 2, 1]));
        let bad = UniPoly::from_i64(&[1, 1]);
        assert!(matches!(bad.div_by_s_minus_one(), Err(Error::DivisionRemainder(_))));
    }

    #[test]
    fn arithmetic_and_display() {
        let p = UniPoly::from_i64(&[0, 0, 0, 1, 1]);
        assert_eq!(p.to_string(), "s^3 + s^4");
        assert_eq!(p.at_one(), BigInt::from(2));
        assert_eq!(p.derivative_at_one(), BigInt::from(7));
        assert_eq!(p.eval(&BigInt::from(2)), BigInt::from(24));
        let q = UniPoly::from_i64(&[1, -1]);
        assert_eq!(p.mul(&q), UniPoly::from_i64(&[0, 0, 0, 1, 0, -1]));
        assert_eq!(q.display_in("u"), "1 - u");
        assert_eq!(p.add(&p.scale(&BigInt::from(-1))), UniPoly::default());
    }

    #[test]
    fn multipoly_drops_cancelled_terms() {
        let mut m = MultiPoly::zero(2);
        m.add_term(vec![1, 0], &BigInt::from(3));
        m.add_term(vec![0, 1], &BigInt::from(2));
        m.add_term(vec![1, 0], &BigInt::from(-3));
        assert_eq!(m.terms().count(), 1);
        assert_eq!(m.at_ones(), BigInt::from(2));
    }
}

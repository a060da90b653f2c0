//! Exact rational point configurations and their orientation signs.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::chirotope::{Chirotope, SignFunction};
use crate::error::{Error, Result};
use crate::label::Label;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    /// Parses coordinates written as integers, fractions `p/q` or decimals.
    pub fn parse(x: &str, y: &str) -> Option<Self> {
        Some(Point { x: parse_rational(x)?, y: parse_rational(y)? })
    }

    /// Largest bit length among the numerators and denominators.
    pub fn bit_length(&self) -> u64 {
        [self.x.numer(), self.x.denom(), self.y.numer(), self.y.denom()].iter().map(|v| v.bits()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Parses `"12"`, `"-3/4"` or `"0.125"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().ok()?,
        };
        let frac_part: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = int_part.abs() * &scale + frac_part;
        let numer = if negative { -mag } else { mag };
        return Some(BigRational::new(numer, scale));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Sign of the determinant of `(q - p, r - p)`: `+1` for a counterclockwise
/// turn, `-1` clockwise, `0` collinear.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> i8 {
    let d = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    if d.is_positive() {
        1
    } else if d.is_negative() {
        -1
    } else {
        0
    }
}

/// Labeled points, kept sorted by label.
#[derive(Clone, PartialEq, Eq)]
pub struct PointConfig {
    labels: Vec<Label>,
    points: Vec<Point>,
}

impl fmt::Debug for PointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.labels.iter().zip(&self.points)).finish()
    }
}

impl PointConfig {
    pub fn new(entries: impl IntoIterator<Item = (Label, Point)>) -> Result<Self> {
        let mut entries: Vec<(Label, Point)> = entries.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::RepeatedLabel(w[0].0.clone()));
        }
        let (labels, points) = entries.into_iter().unzip();
        Ok(PointConfig { labels, points })
    }

    pub fn from_ints<S: AsRef<str>>(entries: impl IntoIterator<Item = (S, (i64, i64))>) -> Result<Self> {
        Self::new(entries.into_iter().map(|(l, (x, y))| (Label::new(l), Point::from_ints(x, y))))
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, l: &Label) -> Option<&Point> {
        self.labels.binary_search(l).ok().map(|i| &self.points[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Point)> {
        self.labels.iter().zip(&self.points)
    }

    /// Applies `f` to every point.
    pub fn map_points(&self, mut f: impl FnMut(&Point) -> Point) -> PointConfig {
        PointConfig { labels: self.labels.clone(), points: self.points.iter().map(&mut f).collect() }
    }

    pub fn bit_length(&self) -> u64 {
        self.points.iter().map(Point::bit_length).max().unwrap_or(0)
    }

    /// Orientation signs of the configuration; fails on a collinear triple.
    pub fn sign_function(&self) -> Result<SignFunction> {
        let mut collinear = None;
        let small = self.small_ints();
        let sf = SignFunction::from_fn(self.labels.iter().cloned(), |a, b, c| {
            let (i, j, k) = (self.index(a), self.index(b), self.index(c));
            let o = match &small {
                Some(v) => {
                    let (p, q, r) = (v[i], v[j], v[k]);
                    ((q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)).signum() as i8
                }
                None => orientation(&self.points[i], &self.points[j], &self.points[k]),
            };
            match o {
                0 => {
                    collinear.get_or_insert_with(|| (a.clone(), b.clone(), c.clone()));
                    1
                }
                s => s,
            }
        })?;
        match collinear {
            Some((a, b, c)) => Err(Error::Collinear(a, b, c)),
            None => Ok(sf),
        }
    }

    /// The chirotope of a configuration in general position.
    pub fn chirotope(&self) -> Result<Chirotope> {
        if self.len() < 3 {
            return Err(Error::TooSmall { min: 3, got: self.len() });
        }
        Ok(Chirotope::from_trusted(self.sign_function()?))
    }

    /// The coordinates as `i128`, when all are integers below 2^60 in
    /// absolute value, so determinants cannot overflow.
    fn small_ints(&self) -> Option<Vec<(i128, i128)>> {
        let conv = |v: &BigRational| -> Option<i128> {
            if !v.is_integer() || v.numer().bits() > 60 {
                return None;
            }
            i128::try_from(v.numer()).ok()
        };
        self.points.iter().map(|z| Some((conv(&z.x)?, conv(&z.y)?))).collect()
    }

    fn index(&self, l: &Label) -> usize {
        self.labels.binary_search(l).expect("label from this configuration")
    }
}

/// Chirotope of a labeled point set in general position.
pub fn chirotope_of_points(points: &PointConfig) -> Result<Chirotope> {
    points.chirotope()
}

//! Exact rational linear algebra.
//!
//! Everything here works over `BigRational`; no floating point is involved.
//! Rank and linear solves use fraction-free (Bareiss) elimination on rows
//! that have been cleared of denominators, so intermediate values stay
//! integral and are exact minors of the input.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("empty system")]
    Empty,
}

/// Builds a rational from a numerator/denominator pair.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `n` or `n/d`.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A vector of exact rationals. Entries are always in reduced form with a
/// positive denominator (guaranteed by `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RationalVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RationalVector(entries.iter().map(|&n| int(n)).collect())
    }

    /// Integer entries divided by a common denominator.
    pub fn from_scaled_ints(entries: &[i64], den: i64) -> Self {
        RationalVector(entries.iter().map(|&n| ratio(n, den)).collect())
    }

    /// The `i`-th standard basis vector of `R^dim` (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot product of mismatched vectors");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, s: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|x| x * s).collect())
    }

    /// Least common multiple of the entry denominators.
    fn denominator_lcm(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// The positive multiple of `self` with coprime integer entries.
    /// Returns `None` for the zero vector.
    pub fn primitive_integer(&self) -> Option<Vec<BigInt>> {
        if self.is_zero() {
            return None;
        }
        let l = self.denominator_lcm();
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|x| x.numer() * (&l / x.denom()))
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        Some(ints.into_iter().map(|x| x / &g).collect())
    }

    /// Like [`primitive_integer`](Self::primitive_integer) but as a rational
    /// vector.
    pub fn primitive(&self) -> Option<RationalVector> {
        self.primitive_integer()
            .map(|v| RationalVector(v.into_iter().map(BigRational::from_integer).collect()))
    }

    /// True iff `self = c * other` for some rational `c > 0`.
    pub fn positively_proportional(&self, other: &RationalVector) -> bool {
        match (self.primitive_integer(), other.primitive_integer()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Converts to `f64` entries; for display and cross-checks only.
    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(x))?;
        }
        write!(f, ")")
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim());
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim());
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&RationalVector> for &Rational {
    type Output = RationalVector;
    fn mul(self, rhs: &RationalVector) -> RationalVector {
        rhs.scale(self)
    }
}

fn bigint_to_i64<E: serde::ser::Error>(x: &BigInt) -> Result<i64, E> {
    x.to_i64()
        .ok_or_else(|| E::custom(format!("integer {x} does not fit in 64 bits")))
}

/// Rationals are written as `[numerator, denominator]` pairs of JSON integers.
pub(crate) struct RationalPair<'a>(pub &'a Rational);

impl Serialize for RationalPair<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&bigint_to_i64::<S::Error>(self.0.numer())?)?;
        seq.serialize_element(&bigint_to_i64::<S::Error>(self.0.denom())?)?;
        seq.end()
    }
}

pub(crate) struct OwnedRationalPair(pub Rational);

impl<'de> Deserialize<'de> for OwnedRationalPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (num, den): (i64, i64) = Deserialize::deserialize(d)?;
        if den == 0 {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(OwnedRationalPair(ratio(num, den)))
    }
}

/// Serde helpers for a single rational stored as `[num, den]`.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalPair(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        OwnedRationalPair::deserialize(d).map(|p| p.0)
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            seq.serialize_element(&RationalPair(x))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RationalVector;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a sequence of [numerator, denominator] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<RationalVector, A::Error> {
                let mut out = Vec::new();
                while let Some(OwnedRationalPair(x)) = seq.next_element()? {
                    out.push(x);
                }
                Ok(RationalVector(out))
            }
        }
        d.deserialize_seq(V)
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: &[RationalVector]) -> Result<Self, LinAlgError> {
        let cols = rows.first().map_or(0, RationalVector::dim);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.dim() != cols {
                return Err(LinAlgError::DimensionMismatch {
                    expected: cols,
                    found: r.dim(),
                });
            }
            entries.extend(r.entries().iter().cloned());
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self, LinAlgError> {
        let rows: Vec<RationalVector> = rows.iter().map(|r| RationalVector::from_ints(r)).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        let rows: Vec<RationalVector> = (0..n).map(|i| RationalVector::basis(n, i)).collect();
        Self::from_rows(&rows).expect("square identity")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> RationalVector {
        RationalVector::new(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        RationalMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Each row scaled by the lcm of its denominators. Row scaling preserves
    /// the row space and the solution set of a linear system.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }
}

/// Fraction-free row echelon form. Returns the pivot columns; `m` is
/// overwritten with the echelon form (rows past the rank are zero).
fn bareiss_echelon(m: &mut [Vec<BigInt>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = num / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Dimension of the row space.
pub fn rank(a: &RationalMatrix) -> usize {
    let mut m = a.integer_rows();
    bareiss_echelon(&mut m, a.cols).len()
}

/// Rank of a family of vectors (all of the same dimension).
pub fn rank_of(vectors: &[RationalVector]) -> Result<usize, LinAlgError> {
    Ok(rank(&RationalMatrix::from_rows(vectors)?))
}

/// A particular solution of a linear system and whether it is the only one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub x: RationalVector,
    /// True iff the coefficient matrix has trivial kernel.
    pub unique: bool,
}

/// Solves `a x = b` exactly. Free variables are set to zero.
pub fn solve(a: &RationalMatrix, b: &RationalVector) -> Result<LinearSolution, LinAlgError> {
    if b.dim() != a.rows {
        return Err(LinAlgError::DimensionMismatch {
            expected: a.rows,
            found: b.dim(),
        });
    }
    let n = a.cols;
    let mut aug: Vec<Vec<BigInt>> = {
        let mut rows = Vec::with_capacity(a.rows);
        for i in 0..a.rows {
            let mut row: Vec<Rational> = a.entries[i * n..(i + 1) * n].to_vec();
            row.push(b.entries()[i].clone());
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            rows.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
        }
        rows
    };
    let pivots = bareiss_echelon(&mut aug, n + 1);
    if pivots.last() == Some(&n) {
        return Err(LinAlgError::Inconsistent);
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::from_integer(aug[r][n].clone());
        for j in c + 1..n {
            if !x[j].is_zero() {
                acc -= BigRational::from_integer(aug[r][j].clone()) * &x[j];
            }
        }
        x[c] = acc / BigRational::from_integer(aug[r][c].clone());
    }
    Ok(LinearSolution {
        x: RationalVector::new(x),
        unique: pivots.len() == n,
    })
}

/// Finds `X` with `<f_i, X> = -1` for every `f_i`.
pub fn solve_affine_one(functionals: &[RationalVector]) -> Result<LinearSolution, LinAlgError> {
    if functionals.is_empty() {
        return Err(LinAlgError::Empty);
    }
    let a = RationalMatrix::from_rows(functionals)?;
    let rhs = RationalVector::new(vec![-Rational::one(); functionals.len()]);
    solve(&a, &rhs)
}

/// True iff `u` lies in the open cone `{s v + t w : s, t > 0}` up to a
/// positive factor. Linearly dependent `v`, `w` span a degenerate cone and
/// always give `false`.
pub fn in_open_cone2(
    u: &RationalVector,
    v: &RationalVector,
    w: &RationalVector,
) -> Result<bool, LinAlgError> {
    let d = u.dim();
    for x in [v, w] {
        if x.dim() != d {
            return Err(LinAlgError::DimensionMismatch {
                expected: d,
                found: x.dim(),
            });
        }
    }
    let (Some(u), Some(v), Some(w)) = (
        u.primitive_integer(),
        v.primitive_integer(),
        w.primitive_integer(),
    ) else {
        return Err(LinAlgError::ZeroVector);
    };
    let small = |x: &[BigInt]| x.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>();
    if let (Some(us), Some(vs), Some(ws)) = (small(&u), small(&v), small(&w)) {
        if let Some(b) = open_cone2_int(&us, &vs, &ws) {
            return Ok(b);
        }
    }
    Ok(open_cone2_big(&u, &v, &w))
}

/// Integer fast path; `None` on overflow.
///
/// Picks a pair of coordinates where `v, w` are independent, solves
/// `u = a v + b w` there by Cramer's rule (with `a = a_num / det`,
/// `b = b_num / det`) and checks the remaining coordinates.
pub(crate) fn open_cone2_int(u: &[i64], v: &[i64], w: &[i64]) -> Option<bool> {
    let d = u.len();
    let m = |a: i64, b: i64| (a as i128).checked_mul(b as i128);
    let mut pivot = None;
    'search: for i in 0..d {
        for j in i + 1..d {
            let det = m(v[i], w[j])?.checked_sub(m(v[j], w[i])?)?;
            if det != 0 {
                pivot = Some((i, j, det));
                break 'search;
            }
        }
    }
    let Some((i, j, det)) = pivot else {
        return Some(false);
    };
    let a_num = m(u[i], w[j])?.checked_sub(m(u[j], w[i])?)?;
    let b_num = m(v[i], u[j])?.checked_sub(m(v[j], u[i])?)?;
    for k in 0..d {
        let lhs = det.checked_mul(u[k] as i128)?;
        let rhs = a_num
            .checked_mul(v[k] as i128)?
            .checked_add(b_num.checked_mul(w[k] as i128)?)?;
        if lhs != rhs {
            return Some(false);
        }
    }
    Some(a_num.signum() == det.signum() && b_num.signum() == det.signum())
}

fn open_cone2_big(u: &[BigInt], v: &[BigInt], w: &[BigInt]) -> bool {
    let d = u.len();
    let mut pivot = None;
    'search: for i in 0..d {
        for j in i + 1..d {
            let det = &v[i] * &w[j] - &v[j] * &w[i];
            if !det.is_zero() {
                pivot = Some((i, j, det));
                break 'search;
            }
        }
    }
    let Some((i, j, det)) = pivot else {
        return false;
    };
    let a_num = &u[i] * &w[j] - &u[j] * &w[i];
    let b_num = &v[i] * &u[j] - &v[j] * &u[i];
    let consistent = (0..d).all(|k| &det * &u[k] == &a_num * &v[k] + &b_num * &w[k]);
    consistent && a_num.signum() == det.signum() && b_num.signum() == det.signum()
}

//! Restricted root systems with explicit simple systems, maximal parabolic
//! complements and the minimal resonant codimension.
//!
//! Coordinates:
//! - `A_l` lives in `R^{l+1}`, `B_l`, `C_l`, `BC_l`, `D_l` in `R^l`, all with
//!   Bourbaki simple roots.
//! - `G_2` lives in the plane `x1 + x2 + x3 = 0` of `R^3`, with
//!   `a1 = e1 - e2` short and `a2 = -2e1 + e2 + e3` long.
//! - `F_4` uses `a1 = e2 - e3`, `a2 = e3 - e4`, `a3 = e4`,
//!   `a4 = (e1 - e2 - e3 - e4)/2`.
//! - `E_8` uses `a8 = (e8 - e7 - ... - e2 + e1)/2`, `a7 = e2 + e1`,
//!   `a6 = e2 - e1`, ..., `a1 = e7 - e6` (reverse of Bourbaki order).
//! - `E_7` sits in the orthogonal complement of `e8 + e7` in `R^8`, with
//!   `a7 = (e8 - e7 - ... - e2 + e1)/2`, `a6 = e2 + e1`, `a5 = e2 - e1`, ...,
//!   `a1 = e6 - e5`.
//! - `E_6` uses Bourbaki coordinates in `R^8` and Bourbaki numbering.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exactlin::{self, int, RationalMatrix, RationalVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSystemError {
    #[error("invalid root system type {family}{rank}")]
    InvalidType { family: Family, rank: usize },
    #[error("cannot parse root system type {0:?}")]
    Parse(String),
    #[error("simple root index {j0} out of range 1..={rank}")]
    IndexOutOfRange { j0: usize, rank: usize },
    #[error("malformed root system: {0}")]
    Malformed(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::BC,
        Family::E,
        Family::F,
        Family::G,
    ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::BC => "BC",
            Family::E => "E",
            Family::F => "F",
            Family::G => "G",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = RootSystemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "BC" => Family::BC,
            "E" => Family::E,
            "F" => Family::F,
            "G" => Family::G,
            _ => return Err(RootSystemError::Parse(s.to_string())),
        })
    }
}

/// Family and rank of an irreducible restricted root system.
///
/// `D_l` requires `l >= 4`: `D_3` coincides with `A_3` and `D_2` is not
/// irreducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSystemType {
    family: Family,
    rank: usize,
}

impl RootSystemType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSystemError> {
        let ok = match family {
            Family::A | Family::BC => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(RootSystemType { family, rank })
        } else {
            Err(RootSystemError::InvalidType { family, rank })
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(self.family, Family::E | Family::F | Family::G)
    }

    pub fn is_reduced(&self) -> bool {
        self.family != Family::BC
    }

    /// The reduced type used for parabolic computations: `BC_l -> B_l`
    /// (`BC_1 -> A_1`, since `B_1` and `A_1` coincide).
    pub fn reduced(&self) -> RootSystemType {
        match (self.family, self.rank) {
            (Family::BC, 1) => RootSystemType { family: Family::A, rank: 1 },
            (Family::BC, l) => RootSystemType { family: Family::B, rank: l },
            _ => *self,
        }
    }

    /// Number of roots predicted by the classification.
    pub fn expected_root_count(&self) -> usize {
        let l = self.rank;
        match self.family {
            Family::A => l * l + l,
            Family::B | Family::C => 2 * l * l,
            Family::BC => 2 * l * l + 2 * l,
            Family::D => 2 * l * l - 2 * l,
            Family::E => match l {
                6 => 72,
                7 => 126,
                _ => 240,
            },
            Family::F => 48,
            Family::G => 12,
        }
    }

    pub fn exceptional_types() -> Vec<RootSystemType> {
        [(Family::E, 6), (Family::E, 7), (Family::E, 8), (Family::F, 4), (Family::G, 2)]
            .into_iter()
            .map(|(f, l)| RootSystemType { family: f, rank: l })
            .collect()
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl FromStr for RootSystemType {
    type Err = RootSystemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| RootSystemError::Parse(s.to_string()))?;
        let family: Family = s[..split].parse()?;
        let rank: usize = s[split..]
            .parse()
            .map_err(|_| RootSystemError::Parse(s.to_string()))?;
        RootSystemType::new(family, rank)
    }
}

impl Serialize for RootSystemType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootSystemType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A root system with an ordered simple system `(a_1, ..., a_l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    ty: RootSystemType,
    ambient_dim: usize,
    roots: Vec<RationalVector>,
    simple: Vec<RationalVector>,
    /// Simple-root coordinates of `roots[i]`.
    coefficients: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RootSystemDoc {
    schema_version: u32,
    #[serde(rename = "type")]
    ty: RootSystemType,
    ambient_dim: usize,
    roots: Vec<RationalVector>,
    simple: Vec<RationalVector>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl RootSystem {
    /// Assembles a root system and checks its invariants: closure under
    /// negation, integral sign-coherent simple coordinates, and the
    /// classified root count.
    pub fn from_parts(
        ty: RootSystemType,
        ambient_dim: usize,
        roots: Vec<RationalVector>,
        simple: Vec<RationalVector>,
    ) -> Result<Self, RootSystemError> {
        let malformed = |m: String| Err(RootSystemError::Malformed(m));
        if simple.len() != ty.rank() {
            return malformed(format!("{} simple roots for rank {}", simple.len(), ty.rank()));
        }
        if let Some(bad) = roots.iter().chain(&simple).find(|r| r.dim() != ambient_dim) {
            return malformed(format!("root {bad} is not in dimension {ambient_dim}"));
        }
        if roots.len() != ty.expected_root_count() {
            return malformed(format!(
                "{} roots, expected {}",
                roots.len(),
                ty.expected_root_count()
            ));
        }
        let set: BTreeSet<&RationalVector> = roots.iter().collect();
        if set.len() != roots.len() {
            return malformed("repeated root".into());
        }
        if let Some(r) = roots.iter().find(|r| !set.contains(&-*r)) {
            return malformed(format!("negative of {r} missing"));
        }
        if let Some(a) = simple.iter().find(|a| !set.contains(a)) {
            return malformed(format!("simple root {a} is not a root"));
        }
        let coords = SimpleCoordinates::new(&simple)?;
        let mut coefficients = Vec::with_capacity(roots.len());
        for r in &roots {
            let c = coords
                .of(r)
                .ok_or_else(|| RootSystemError::Malformed(format!("{r} not in the span of the simple roots")))?;
            let nonneg = c.iter().all(|&x| x >= 0);
            let nonpos = c.iter().all(|&x| x <= 0);
            if !(nonneg || nonpos) {
                return malformed(format!("{r} has mixed-sign simple coordinates {c:?}"));
            }
            coefficients.push(c);
        }
        Ok(RootSystem {
            ty,
            ambient_dim,
            roots,
            simple,
            coefficients,
        })
    }

    pub fn ty(&self) -> RootSystemType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.ty.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn roots(&self) -> &[RationalVector] {
        &self.roots
    }

    pub fn simple(&self) -> &[RationalVector] {
        &self.simple
    }

    /// Simple-root coordinates of every root, parallel to [`roots`](Self::roots).
    pub fn coefficients(&self) -> &[Vec<i64>] {
        &self.coefficients
    }

    pub fn coefficients_of(&self, root: &RationalVector) -> Option<&[i64]> {
        self.roots
            .iter()
            .position(|r| r == root)
            .map(|i| self.coefficients[i].as_slice())
    }

    pub fn contains(&self, v: &RationalVector) -> bool {
        self.roots.contains(v)
    }

    /// The reduced system used for parabolic data (`B_l` for `BC_l`).
    pub fn reduced(&self) -> RootSystem {
        if self.ty.is_reduced() {
            self.clone()
        } else {
            build(self.ty.reduced()).expect("reduced type of a valid type is valid")
        }
    }

    pub fn to_json(&self) -> Result<String, RootSystemError> {
        let doc = RootSystemDoc {
            schema_version: SCHEMA_VERSION,
            ty: self.ty,
            ambient_dim: self.ambient_dim,
            roots: self.roots.clone(),
            simple: self.simple.clone(),
        };
        serde_json::to_string(&doc).map_err(|e| RootSystemError::Json(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, RootSystemError> {
        let doc: RootSystemDoc =
            serde_json::from_str(s).map_err(|e| RootSystemError::Json(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(RootSystemError::Json(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        RootSystem::from_parts(doc.ty, doc.ambient_dim, doc.roots, doc.simple)
    }
}

/// Maps a vector in the span of the simple roots to its simple coordinates,
/// via the inverse Gram matrix of the simple system.
struct SimpleCoordinates {
    simple: Vec<RationalVector>,
    inverse_gram: Vec<RationalVector>,
}

impl SimpleCoordinates {
    fn new(simple: &[RationalVector]) -> Result<Self, RootSystemError> {
        let l = simple.len();
        let gram_rows: Vec<RationalVector> = simple
            .iter()
            .map(|a| RationalVector::new(simple.iter().map(|b| a.dot(b)).collect()))
            .collect();
        let gram = RationalMatrix::from_rows(&gram_rows)
            .map_err(|e| RootSystemError::Malformed(e.to_string()))?;
        let mut columns = Vec::with_capacity(l);
        for i in 0..l {
            let sol = exactlin::solve(&gram, &RationalVector::basis(l, i))
                .ok()
                .filter(|s| s.unique)
                .ok_or_else(|| RootSystemError::Malformed("simple roots are dependent".into()))?;
            columns.push(sol.x);
        }
        // the Gram matrix is symmetric, so its inverse's columns are its rows
        Ok(SimpleCoordinates {
            simple: simple.to_vec(),
            inverse_gram: columns,
        })
    }

    fn of(&self, v: &RationalVector) -> Option<Vec<i64>> {
        let pairings = RationalVector::new(self.simple.iter().map(|a| a.dot(v)).collect());
        let c: Vec<_> = self.inverse_gram.iter().map(|row| row.dot(&pairings)).collect();
        let mut back = RationalVector::zeros(v.dim());
        for (ci, a) in c.iter().zip(&self.simple) {
            back = &back + &a.scale(ci);
        }
        if &back != v {
            return None;
        }
        c.iter()
            .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
            .collect()
    }
}

fn e(dim: usize, i: usize) -> RationalVector {
    RationalVector::basis(dim, i - 1)
}

/// `+-e_i +- e_j` for `i < j` in `idx`.
fn signed_pairs(dim: usize, idx: &[usize]) -> Vec<RationalVector> {
    let mut out = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            for si in [1, -1] {
                for sj in [1, -1] {
                    out.push(&e(dim, i).scale(&int(si)) + &e(dim, j).scale(&int(sj)));
                }
            }
        }
    }
    out
}

/// `+- k e_i` for `i` in `idx`.
fn signed_multiples(dim: usize, idx: &[usize], k: i64) -> Vec<RationalVector> {
    idx.iter()
        .flat_map(|&i| [e(dim, i).scale(&int(k)), e(dim, i).scale(&int(-k))])
        .collect()
}

/// `(1/2) * (sum of s_i e_i)` over sign patterns on `free` coordinates whose
/// number of minus signs has the given parity, with `fixed` coordinates
/// carrying prescribed signs. If `both_signs`, the negatives are added too.
fn half_spin(
    dim: usize,
    free: &[usize],
    fixed: &[(usize, i64)],
    minus_parity: usize,
    both_signs: bool,
) -> Vec<RationalVector> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << free.len()) {
        if mask.count_ones() as usize % 2 != minus_parity {
            continue;
        }
        let mut x = vec![0i64; dim];
        for (b, &i) in free.iter().enumerate() {
            x[i - 1] = if mask >> b & 1 == 1 { -1 } else { 1 };
        }
        for &(i, s) in fixed {
            x[i - 1] = s;
        }
        let v = RationalVector::from_scaled_ints(&x, 2);
        if both_signs {
            out.push(-&v);
        }
        out.push(v);
    }
    out
}

fn half(x: &[i64]) -> RationalVector {
    RationalVector::from_scaled_ints(x, 2)
}

/// Builds the root system of the given type in the coordinates described in
/// the module documentation.
pub fn build(ty: RootSystemType) -> Result<RootSystem, RootSystemError> {
    let ty = RootSystemType::new(ty.family(), ty.rank())?;
    let l = ty.rank();
    let idx: Vec<usize> = (1..=l).collect();
    let (dim, roots, simple): (usize, Vec<RationalVector>, Vec<RationalVector>) = match ty.family() {
        Family::A => {
            let d = l + 1;
            let mut roots = Vec::new();
            for i in 1..=d {
                for j in 1..=d {
                    if i != j {
                        roots.push(&e(d, i) - &e(d, j));
                    }
                }
            }
            let simple = (1..=l).map(|i| &e(d, i) - &e(d, i + 1)).collect();
            (d, roots, simple)
        }
        Family::B | Family::C | Family::BC | Family::D => {
            let d = l;
            let mut roots = signed_pairs(d, &idx);
            let mut simple: Vec<RationalVector> = (1..l).map(|i| &e(d, i) - &e(d, i + 1)).collect();
            match ty.family() {
                Family::B => {
                    roots.extend(signed_multiples(d, &idx, 1));
                    simple.push(e(d, l));
                }
                Family::C => {
                    roots.extend(signed_multiples(d, &idx, 2));
                    simple.push(e(d, l).scale(&int(2)));
                }
                Family::BC => {
                    roots.extend(signed_multiples(d, &idx, 1));
                    roots.extend(signed_multiples(d, &idx, 2));
                    simple.push(e(d, l));
                }
                _ => simple.push(&e(d, l - 1) + &e(d, l)),
            }
            (d, roots, simple)
        }
        Family::G => {
            let d = 3;
            let mut roots = Vec::new();
            for i in 1..=3 {
                for j in 1..=3 {
                    if i != j {
                        roots.push(&e(d, i) - &e(d, j));
                    }
                }
                let others: RationalVector =
                    (1..=3).filter(|&k| k != i).fold(RationalVector::zeros(d), |acc, k| &acc + &e(d, k));
                let long = &e(d, i).scale(&int(2)) - &others;
                roots.push(-&long);
                roots.push(long);
            }
            let simple = vec![
                &e(d, 1) - &e(d, 2),
                RationalVector::from_ints(&[-2, 1, 1]),
            ];
            (d, roots, simple)
        }
        Family::F => {
            let d = 4;
            let mut roots = signed_pairs(d, &idx);
            roots.extend(signed_multiples(d, &idx, 1));
            roots.extend(half_spin(d, &[1, 2, 3, 4], &[], 0, false));
            roots.extend(half_spin(d, &[1, 2, 3, 4], &[], 1, false));
            let simple = vec![
                &e(d, 2) - &e(d, 3),
                &e(d, 3) - &e(d, 4),
                e(d, 4),
                half(&[1, -1, -1, -1]),
            ];
            (d, roots, simple)
        }
        Family::E => {
            let d = 8;
            match l {
                8 => {
                    let all: Vec<usize> = (1..=8).collect();
                    let mut roots = signed_pairs(d, &all);
                    roots.extend(half_spin(d, &all, &[], 0, false));
                    // a1 = e7 - e6, ..., a5 = e3 - e2, a6 = e2 - e1, a7 = e2 + e1
                    let mut simple: Vec<RationalVector> =
                        (2..=7).rev().map(|i| &e(d, i) - &e(d, i - 1)).collect();
                    simple.push(&e(d, 2) + &e(d, 1));
                    simple.push(half(&[1, -1, -1, -1, -1, -1, -1, 1]));
                    (d, roots, simple)
                }
                7 => {
                    let six: Vec<usize> = (1..=6).collect();
                    let mut roots = signed_pairs(d, &six);
                    let e87 = &e(d, 8) - &e(d, 7);
                    roots.push(-&e87);
                    roots.push(e87);
                    roots.extend(half_spin(d, &six, &[(8, 1), (7, -1)], 1, true));
                    // a1 = e6 - e5, ..., a4 = e3 - e2, a5 = e2 - e1, a6 = e2 + e1
                    let mut simple: Vec<RationalVector> =
                        (2..=6).rev().map(|i| &e(d, i) - &e(d, i - 1)).collect();
                    simple.push(&e(d, 2) + &e(d, 1));
                    simple.push(half(&[1, -1, -1, -1, -1, -1, -1, 1]));
                    (d, roots, simple)
                }
                _ => {
                    let five: Vec<usize> = (1..=5).collect();
                    let mut roots = signed_pairs(d, &five);
                    roots.extend(half_spin(d, &five, &[(8, 1), (7, -1), (6, -1)], 0, true));
                    let mut simple = vec![
                        half(&[1, -1, -1, -1, -1, -1, -1, 1]),
                        &e(d, 1) + &e(d, 2),
                    ];
                    simple.extend((2..=5).map(|i| &e(d, i) - &e(d, i - 1)));
                    (d, roots, simple)
                }
            }
        }
    };
    let mut roots = roots;
    roots.sort();
    RootSystem::from_parts(ty, dim, roots, simple)
}

/// Roots with nonnegative simple coordinates.
pub fn positive_roots(rs: &RootSystem) -> Vec<RationalVector> {
    rs.roots
        .iter()
        .zip(&rs.coefficients)
        .filter(|(_, c)| c.iter().all(|&x| x >= 0))
        .map(|(r, _)| r.clone())
        .collect()
}

/// The negative roots outside the maximal parabolic that omits `a_{j0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParabolicComplement {
    /// 1-based index of the omitted simple root.
    pub j0: usize,
    pub complement: Vec<RationalVector>,
    pub codim: usize,
}

/// Negative roots with nonzero `a_{j0}` coordinate (`j0` is 1-based).
/// For `BC_l` the computation runs on the reduced system `B_l`.
pub fn parabolic_complement(rs: &RootSystem, j0: usize) -> Result<ParabolicComplement, RootSystemError> {
    let rank = rs.rank();
    if j0 == 0 || j0 > rank {
        return Err(RootSystemError::IndexOutOfRange { j0, rank });
    }
    let reduced;
    let rs = if rs.ty.is_reduced() {
        rs
    } else {
        reduced = rs.reduced();
        &reduced
    };
    let complement: Vec<RationalVector> = rs
        .roots
        .iter()
        .zip(&rs.coefficients)
        .filter(|(_, c)| c[j0 - 1] < 0)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(ParabolicComplement {
        j0,
        codim: complement.len(),
        complement,
    })
}

/// Parabolic codimension for every `j0`, in order `1..=l`.
pub fn codims(ty: RootSystemType) -> Result<Vec<usize>, RootSystemError> {
    let rs = build(ty.reduced())?;
    (1..=rs.rank())
        .map(|j0| parabolic_complement(&rs, j0).map(|p| p.codim))
        .collect()
}

/// Minimum codimension of a proper parabolic subalgebra of the split form
/// of the reduced type.
pub fn minimal_resonant_codim(ty: RootSystemType) -> Result<usize, RootSystemError> {
    Ok(codims(ty)?.into_iter().min().expect("rank >= 1"))
}

/// All `j0` (1-based) attaining the minimal codimension.
pub fn minimizing_j0(ty: RootSystemType) -> Result<Vec<usize>, RootSystemError> {
    let c = codims(ty)?;
    let min = *c.iter().min().expect("rank >= 1");
    Ok(c.iter()
        .enumerate()
        .filter(|(_, &x)| x == min)
        .map(|(i, _)| i + 1)
        .collect())
}

/// `v` written in simple coordinates, if it is an integral combination.
pub fn simple_coordinates(rs: &RootSystem, v: &RationalVector) -> Option<Vec<i64>> {
    SimpleCoordinates::new(&rs.simple).ok()?.of(v)
}

/// Parses e.g. `"F4"`, or a bare family letter combined with an explicit rank.
pub fn parse_type(name: &str, rank: Option<usize>) -> Result<RootSystemType, RootSystemError> {
    match rank {
        Some(l) if name.chars().all(|c| c.is_ascii_alphabetic()) => RootSystemType::new(name.parse()?, l),
        _ => name.parse(),
    }
}

//! Structural checks on declared Lyapunov spectra of conformal cocycles.
//!
//! A spectrum for `CO(p, q)` is a list of blocks: a linear functional
//! `chi_i`, the dimension of its Oseledec space `E_i`, and whether `E_i`
//! is totally isotropic or carries a non-degenerate signature. Together
//! with the distortion functional `chi` these must satisfy the rules in
//! [`Rule`].

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::exactlin::{int, ratio, Rational, RationalVector};
use crate::resonance::Configuration;
use crate::rootsys::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectrumError {
    #[error("signature (p, q) must have p + q >= 1")]
    EmptySignature,
    #[error("spectrum has no blocks")]
    Empty,
    #[error("block {0} has multiplicity 0")]
    ZeroMultiplicity(usize),
    #[error("multiplicities sum to {found}, expected p + q = {expected}")]
    MultiplicityMismatch { expected: usize, found: usize },
    #[error("blocks {0} and {1} carry the same functional")]
    DuplicateFunctional(usize, usize),
    #[error("functionals and chi must share one dimension")]
    DimensionMismatch,
    #[error("block {0}: signature does not add up to its multiplicity")]
    SignatureMismatch(usize),
    #[error("no linear functional separates the declared functionals")]
    NoSeparatingWitness,
    #[error("cannot import a configuration with r = {r} into CO({p},{q})")]
    ImportInfeasible { r: usize, p: usize, q: usize },
    #[error("invalid spectrum document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockSignature {
    Isotropic,
    Signature { p: usize, q: usize },
}

impl BlockSignature {
    fn swapped(self) -> Self {
        match self {
            BlockSignature::Signature { p, q } => BlockSignature::Signature { p: q, q: p },
            iso => iso,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub functional: RationalVector,
    pub multiplicity: usize,
    pub signature: BlockSignature,
}

impl Block {
    pub fn isotropic(functional: RationalVector, multiplicity: usize) -> Self {
        Block {
            functional,
            multiplicity,
            signature: BlockSignature::Isotropic,
        }
    }
}

/// A declared spectrum, stored with `p <= q` and blocks in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformalSpectrum {
    p: usize,
    q: usize,
    blocks: Vec<Block>,
    chi: RationalVector,
    #[serde(skip)]
    witness: RationalVector,
}

impl ConformalSpectrum {
    /// Validates shape, normalizes `p <= q` (swapping block signatures with
    /// it) and sorts blocks by their value on a separating witness.
    pub fn new(p: usize, q: usize, blocks: Vec<Block>, chi: RationalVector) -> Result<Self, SpectrumError> {
        if p + q == 0 {
            return Err(SpectrumError::EmptySignature);
        }
        if blocks.is_empty() {
            return Err(SpectrumError::Empty);
        }
        let d = chi.dim();
        let mut total = 0;
        for (i, b) in blocks.iter().enumerate() {
            if b.functional.dim() != d {
                return Err(SpectrumError::DimensionMismatch);
            }
            if b.multiplicity == 0 {
                return Err(SpectrumError::ZeroMultiplicity(i));
            }
            if let BlockSignature::Signature { p, q } = b.signature {
                if p + q != b.multiplicity {
                    return Err(SpectrumError::SignatureMismatch(i));
                }
            }
            if let Some(j) = blocks[..i].iter().position(|c| c.functional == b.functional) {
                return Err(SpectrumError::DuplicateFunctional(j, i));
            }
            total += b.multiplicity;
        }
        if total != p + q {
            return Err(SpectrumError::MultiplicityMismatch {
                expected: p + q,
                found: total,
            });
        }
        let (p, q, mut blocks) = if p > q {
            let swapped = blocks
                .into_iter()
                .map(|b| Block {
                    signature: b.signature.swapped(),
                    ..b
                })
                .collect();
            (q, p, swapped)
        } else {
            (p, q, blocks)
        };
        let functionals: Vec<RationalVector> = blocks.iter().map(|b| b.functional.clone()).collect();
        let witness = separating_witness(&functionals).ok_or(SpectrumError::NoSeparatingWitness)?;
        blocks.sort_by_cached_key(|b| b.functional.dot(&witness));
        Ok(ConformalSpectrum {
            p,
            q,
            blocks,
            chi,
            witness,
        })
    }

    /// Like [`ConformalSpectrum::new`] with `chi` computed by [`derive_chi`].
    pub fn with_derived_chi(p: usize, q: usize, blocks: Vec<Block>) -> Result<Self, SpectrumError> {
        let chi = derive_chi(&blocks)?;
        Self::new(p, q, blocks, chi)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Number of distinct functionals.
    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn chi(&self) -> &RationalVector {
        &self.chi
    }

    /// The vector `X0` whose values order the blocks.
    pub fn witness(&self) -> &RationalVector {
        &self.witness
    }

    pub fn to_json(&self) -> Result<String, SpectrumError> {
        let doc = SpectrumDocument {
            schema_version: SCHEMA_VERSION,
            p: self.p,
            q: self.q,
            blocks: self.blocks.clone(),
            chi: Some(self.chi.clone()),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| SpectrumError::Json(e.to_string()))
    }

    /// Parses a spectrum document; a missing `chi` is derived.
    pub fn from_json(s: &str) -> Result<Self, SpectrumError> {
        let doc: SpectrumDocument = serde_json::from_str(s).map_err(|e| SpectrumError::Json(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(SpectrumError::Json(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        match doc.chi {
            Some(chi) => Self::new(doc.p, doc.q, doc.blocks, chi),
            None => Self::with_derived_chi(doc.p, doc.q, doc.blocks),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumDocument {
    schema_version: u32,
    p: usize,
    q: usize,
    blocks: Vec<Block>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chi: Option<RationalVector>,
}

/// Finds `X0 = (1, t, t^2, ...)` on which the functionals take pairwise
/// distinct values. Returns `None` only if two functionals coincide.
pub fn separating_witness(functionals: &[RationalVector]) -> Option<RationalVector> {
    let d = functionals.first().map_or(0, RationalVector::dim);
    // each nonzero difference vanishes for at most d - 1 values of t
    let pairs = functionals.len() * functionals.len().saturating_sub(1) / 2;
    let max_t = (pairs * d.saturating_sub(1) + 1) as i64;
    (1..=max_t).find_map(|t| {
        let mut power = Rational::one();
        let x = RationalVector::new(
            (0..d)
                .map(|_| {
                    let v = power.clone();
                    power *= int(t);
                    v
                })
                .collect(),
        );
        let mut values: Vec<Rational> = functionals.iter().map(|f| f.dot(&x)).collect();
        values.sort();
        values.windows(2).all(|w| w[0] != w[1]).then_some(x)
    })
}

/// `chi = (2 / n) * sum_i dim E_i * chi_i` with `n` the total multiplicity.
pub fn derive_chi(blocks: &[Block]) -> Result<RationalVector, SpectrumError> {
    let first = blocks.first().ok_or(SpectrumError::Empty)?;
    let d = first.functional.dim();
    let mut sum = RationalVector::zeros(d);
    let mut n = 0usize;
    for b in blocks {
        if b.functional.dim() != d {
            return Err(SpectrumError::DimensionMismatch);
        }
        sum = &sum + &b.functional.scale(&int(b.multiplicity as i64));
        n += b.multiplicity;
    }
    if n == 0 {
        return Err(SpectrumError::ZeroMultiplicity(0));
    }
    Ok(sum.scale(&ratio(2, n as i64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// `r <= 2p + 1`, and `r <= 2p` when `r` is even.
    R1,
    /// `chi_i + chi_{r+1-i} = chi`.
    R2,
    /// `dim E_i = dim E_{r+1-i}`.
    R3,
    /// `r` even forces `p = q` and every block isotropic.
    R4,
    /// `r` odd forces a non-degenerate middle block and isotropic others.
    R5,
    /// `sum_i dim E_i chi_i = n chi / 2`.
    R6,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
    /// 1-based block indices in canonical order.
    pub indices: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

fn violation(rule: Rule, detail: String, indices: Vec<usize>) -> Violation {
    Violation {
        rule,
        detail,
        indices,
    }
}

/// Every broken rule, in rule order. Empty means the spectrum is consistent.
pub fn validate(s: &ConformalSpectrum) -> Vec<Violation> {
    let r = s.r();
    let b = &s.blocks;
    let mut out = Vec::new();

    let r1_limit = if r % 2 == 0 { 2 * s.p } else { 2 * s.p + 1 };
    if r > r1_limit {
        out.push(violation(
            Rule::R1,
            format!("r = {r} exceeds {r1_limit} for p = {}", s.p),
            Vec::new(),
        ));
    }

    for i in 1..=r.div_ceil(2) {
        let j = r + 1 - i;
        let sum = &b[i - 1].functional + &b[j - 1].functional;
        if sum != s.chi {
            out.push(violation(
                Rule::R2,
                format!("chi_{i} + chi_{j} = {sum}, expected {}", s.chi),
                vec![i, j],
            ));
        }
    }

    for i in 1..=r / 2 {
        let j = r + 1 - i;
        let (mi, mj) = (b[i - 1].multiplicity, b[j - 1].multiplicity);
        if mi != mj {
            out.push(violation(
                Rule::R3,
                format!("dim E_{i} = {mi} but dim E_{j} = {mj}"),
                vec![i, j],
            ));
        }
    }

    if r % 2 == 0 {
        if s.p != s.q {
            out.push(violation(
                Rule::R4,
                format!("r = {r} is even but p = {} != q = {}", s.p, s.q),
                Vec::new(),
            ));
        }
        let bad = non_isotropic(b, None);
        if !bad.is_empty() {
            out.push(violation(
                Rule::R4,
                "r is even but some blocks are not totally isotropic".to_string(),
                bad,
            ));
        }
    } else {
        let mid = r.div_ceil(2);
        if b[mid - 1].signature == BlockSignature::Isotropic {
            out.push(violation(
                Rule::R5,
                format!("middle block E_{mid} is isotropic"),
                vec![mid],
            ));
        }
        let bad = non_isotropic(b, Some(mid));
        if !bad.is_empty() {
            out.push(violation(
                Rule::R5,
                "blocks off the middle must be totally isotropic".to_string(),
                bad,
            ));
        }
    }

    let d = s.chi.dim();
    let weighted = b.iter().fold(RationalVector::zeros(d), |acc, blk| {
        &acc + &blk.functional.scale(&int(blk.multiplicity as i64))
    });
    let expected = s.chi.scale(&ratio(s.n() as i64, 2));
    if weighted != expected {
        out.push(violation(
            Rule::R6,
            format!("sum of dim E_i chi_i is {weighted}, expected {expected}"),
            Vec::new(),
        ));
    }
    out
}

fn non_isotropic(blocks: &[Block], skip: Option<usize>) -> Vec<usize> {
    blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (i + 1, b))
        .filter(|&(i, b)| Some(i) != skip && b.signature != BlockSignature::Isotropic)
        .map(|(i, _)| i)
        .collect()
}

/// Pairs `(i, j)`, `i <= j`, with `chi_i + chi_j != chi`; these Oseledec
/// spaces are forced to be orthogonal.
pub fn orthogonality_obligations(s: &ConformalSpectrum) -> Vec<(usize, usize)> {
    let r = s.r();
    let mut out = Vec::new();
    for i in 1..=r {
        for j in i..=r {
            if &s.blocks[i - 1].functional + &s.blocks[j - 1].functional != s.chi {
                out.push((i, j));
            }
        }
    }
    out
}

/// Spectrum of `CO(p, q)` induced by a configuration: multiplicity-one
/// isotropic blocks off the center, and a central block holding the
/// remaining `n - (r - 1)` dimensions with signature
/// `(p - (r-1)/2, q - (r-1)/2)`.
pub fn spectrum_from_configuration(c: &Configuration, p: usize, q: usize) -> Result<ConformalSpectrum, SpectrumError> {
    let (p, q) = (p.min(q), p.max(q));
    let half = (c.r - 1) / 2;
    if c.r % 2 == 0 || half > p || (p - half) + (q - half) == 0 {
        return Err(SpectrumError::ImportInfeasible { r: c.r, p, q });
    }
    let blocks = c
        .functionals
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if i + 1 == c.center_index {
                Block {
                    functional: f.clone(),
                    multiplicity: p + q - 2 * half,
                    signature: BlockSignature::Signature {
                        p: p - half,
                        q: q - half,
                    },
                }
            } else {
                Block::isotropic(f.clone(), 1)
            }
        })
        .collect();
    ConformalSpectrum::new(p, q, blocks, c.chi.clone())
}

/// Whether every functional is a nonzero multiple of some vector in
/// `roots`; used to check that an imported spectrum stays on root rays.
pub fn functionals_on_rays(s: &ConformalSpectrum, roots: &[RationalVector]) -> bool {
    s.blocks.iter().all(|b| {
        !b.functional.is_zero()
            && roots
                .iter()
                .any(|r| !r.is_zero() && r.positively_proportional(&b.functional))
    })
}

impl ConformalSpectrum {
    /// Values `chi_i(X0)` on the ordering witness, mainly for display.
    pub fn witness_values(&self) -> Vec<Rational> {
        self.blocks.iter().map(|b| b.functional.dot(&self.witness)).collect()
    }
}

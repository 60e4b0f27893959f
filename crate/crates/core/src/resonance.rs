//! Limit-case configuration engine and optimal-index bounds.
//!
//! In the limit case `r(g) = 2p + 1` the Lyapunov functionals are positive
//! multiples of the roots in a minimal parabolic complement, and they satisfy
//! `chi_i + chi_{r+1-i} = 2 chi_center`. The engine searches the complement
//! for admissible centers, pairs the remaining rays around the center,
//! solves for the scalings and looks for a direction `X` on which every
//! functional takes the value `-1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exactlin::{
    self, open_cone2_int, LinAlgError, Rational, RationalMatrix, RationalVector,
};
use crate::rootsys::{self, ParabolicComplement, RootSystemError, RootSystemType, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResonanceError {
    #[error("need at least 3 rays, got {0}")]
    TooFewRays(usize),
    #[error("zero vector in ray set")]
    ZeroVector,
    #[error("rays {0} and {1} are positively proportional")]
    ProportionalRays(usize, usize),
    #[error("rays have mismatched dimensions")]
    DimensionMismatch,
    #[error("ray {0} is not an admissible center")]
    NotACenter(usize),
    #[error("no perfect matching of the remaining rays around the center")]
    NoPerfectMatching,
    #[error("{count} admissible perfect matchings; the pairing is not unique")]
    AmbiguousMatching { count: usize },
    #[error("scalings for the pairing have no positive solution")]
    ScalingInfeasible,
    #[error("{0} is not an exceptional root system")]
    NotExceptional(RootSystemType),
    #[error("{0} has real rank below 2")]
    RankTooLow(RootSystemType),
    #[error("root system {0} is not reduced")]
    NotReduced(RootSystemType),
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Pairwise non-proportional rays, each stored by its primitive integer
/// representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaySet {
    rays: Vec<RationalVector>,
    small: Option<Vec<Vec<i64>>>,
    space_dim: usize,
}

impl RaySet {
    pub fn new(vectors: &[RationalVector]) -> Result<Self, ResonanceError> {
        let d = vectors.first().map_or(0, RationalVector::dim);
        Self::with_space_dim(vectors, d)
    }

    /// `space_dim` is the dimension of the space the rays are meant to span
    /// (the real rank); it can be smaller than the ambient dimension.
    pub fn with_space_dim(vectors: &[RationalVector], space_dim: usize) -> Result<Self, ResonanceError> {
        let d = vectors.first().map_or(0, RationalVector::dim);
        let mut rays = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.dim() != d {
                return Err(ResonanceError::DimensionMismatch);
            }
            let p = v.primitive().ok_or(ResonanceError::ZeroVector)?;
            if let Some(j) = rays.iter().position(|r| r == &p) {
                return Err(ResonanceError::ProportionalRays(j, rays.len()));
            }
            rays.push(p);
        }
        let small = rays
            .iter()
            .map(|r| r.entries().iter().map(|x| x.numer().to_i64()).collect())
            .collect();
        Ok(RaySet {
            rays,
            small,
            space_dim,
        })
    }

    pub fn from_complement(pc: &ParabolicComplement, rank: usize) -> Result<Self, ResonanceError> {
        Self::with_space_dim(&pc.complement, rank)
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn rays(&self) -> &[RationalVector] {
        &self.rays
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// Whether ray `u` lies strictly inside the cone spanned by rays `v`, `w`.
    fn cone(&self, u: usize, v: usize, w: usize) -> bool {
        if let Some(s) = &self.small {
            if let Some(b) = open_cone2_int(&s[u], &s[v], &s[w]) {
                return b;
            }
        }
        exactlin::in_open_cone2(&self.rays[u], &self.rays[v], &self.rays[w])
            .expect("rays are nonzero and share a dimension")
    }

    fn is_center(&self, u: usize) -> bool {
        let n = self.len();
        (0..n)
            .filter(|&v| v != u)
            .all(|v| (0..n).any(|w| w != u && w != v && self.cone(u, v, w)))
    }

    /// For each ray other than `center`, the rays it can be paired with.
    fn admissible_partners(&self, center: usize) -> Vec<Vec<usize>> {
        let n = self.len();
        (0..n)
            .map(|v| {
                if v == center {
                    return Vec::new();
                }
                (0..n)
                    .filter(|&w| w != v && w != center && self.cone(center, v, w))
                    .collect()
            })
            .collect()
    }
}

/// Indices `u` such that for every other ray `v` some third ray `w` puts
/// `u` strictly inside the cone spanned by `v` and `w`.
pub fn find_centers(rays: &RaySet) -> Result<Vec<usize>, ResonanceError> {
    if rays.len() < 3 {
        return Err(ResonanceError::TooFewRays(rays.len()));
    }
    Ok((0..rays.len()).filter(|&u| rays.is_center(u)).collect())
}

/// Perfect matchings of all rays except `center` in which every pair
/// straddles the center. Stops after `limit` matchings.
pub fn admissible_matchings(rays: &RaySet, center: usize, limit: usize) -> Vec<Vec<(usize, usize)>> {
    let partners = rays.admissible_partners(center);
    let mut used = vec![false; rays.len()];
    used[center] = true;
    let mut current = Vec::new();
    let mut out = Vec::new();
    extend_matching(&partners, &mut used, &mut current, &mut out, limit);
    out
}

fn extend_matching(
    partners: &[Vec<usize>],
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let Some(v) = used.iter().position(|&b| !b) else {
        out.push(current.clone());
        return;
    };
    used[v] = true;
    for &w in &partners[v] {
        if used[w] {
            continue;
        }
        used[w] = true;
        current.push((v, w));
        extend_matching(partners, used, current, out, limit);
        current.pop();
        used[w] = false;
    }
    used[v] = false;
}

/// A family of Lyapunov functionals `chi_1, ..., chi_r` built from rays.
///
/// Indices are 1-based as in `chi_i`; `chi_i` and `chi_{r+1-i}` are paired
/// and `chi_{(r+1)/2}` is the center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Configuration {
    pub r: usize,
    pub center_index: usize,
    /// `(i, r + 1 - i)` for `i < center_index`.
    pub pairs: Vec<(usize, usize)>,
    /// `chi_i = scalings[i-1] * rays[ray_indices[i-1]]`.
    #[serde(serialize_with = "ser_rationals")]
    pub scalings: Vec<Rational>,
    /// Index into the originating [`RaySet`] of each functional.
    pub ray_indices: Vec<usize>,
    pub functionals: Vec<RationalVector>,
    /// `chi = 2 chi_center = chi_i + chi_{r+1-i}`.
    pub chi: RationalVector,
    /// Dimension of the Cartan subspace the functionals live on.
    pub space_dim: usize,
}

fn ser_rationals<S: serde::Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&exactlin::RationalPair(x))?;
    }
    seq.end()
}

impl Configuration {
    pub fn functional(&self, i: usize) -> &RationalVector {
        &self.functionals[i - 1]
    }

    /// Checks `chi_i + chi_{r+1-i} = chi` for every `i`, including the
    /// center against itself.
    pub fn relations_hold(&self) -> bool {
        (1..=self.r).all(|i| &(self.functional(i) + self.functional(self.r + 1 - i)) == &self.chi)
    }
}

/// Builds the configuration around `center`, requiring the pairing of the
/// remaining rays to exist and be unique.
pub fn build_configuration(rays: &RaySet, center: usize) -> Result<Configuration, ResonanceError> {
    if center >= rays.len() || !rays.is_center(center) {
        return Err(ResonanceError::NotACenter(center));
    }
    let matchings = admissible_matchings(rays, center, 2);
    match matchings.len() {
        0 => Err(ResonanceError::NoPerfectMatching),
        1 => configuration_for_matching(rays, center, &matchings[0]),
        _ => {
            let count = admissible_matchings(rays, center, MATCHING_LIMIT).len();
            Err(ResonanceError::AmbiguousMatching { count })
        }
    }
}

/// Cap on the number of matchings enumerated when reporting ambiguity.
pub const MATCHING_LIMIT: usize = 1024;

/// Solves the scalings for a given pairing and normalizes the result.
///
/// With `chi_center` set to the center ray, each pair `(v, w)` gets the
/// unique `s, t` with `s v + t w = 2 chi_center`. If a uniform direction
/// exists, everything is rescaled so that it is a primitive integer vector
/// `X` with `<chi_i, X> = -1`; otherwise `chi_center` stays the primitive
/// center ray.
pub fn configuration_for_matching(
    rays: &RaySet,
    center: usize,
    matching: &[(usize, usize)],
) -> Result<Configuration, ResonanceError> {
    let r = 2 * matching.len() + 1;
    let c = &rays.rays[center];
    let two_c = c.scale(&exactlin::int(2));
    let mut low = Vec::with_capacity(matching.len());
    let mut high = Vec::with_capacity(matching.len());
    for &(v, w) in matching {
        let a = RationalMatrix::from_rows(&[rays.rays[v].clone(), rays.rays[w].clone()])?.transpose();
        let sol = exactlin::solve(&a, &two_c).map_err(|_| ResonanceError::ScalingInfeasible)?;
        let (s, t) = (&sol.x.entries()[0], &sol.x.entries()[1]);
        if !sol.unique || !s.is_positive() || !t.is_positive() {
            return Err(ResonanceError::ScalingInfeasible);
        }
        low.push((v, s.clone()));
        high.push((w, t.clone()));
    }
    let mut ray_indices = Vec::with_capacity(r);
    let mut scalings = Vec::with_capacity(r);
    for (v, s) in low {
        ray_indices.push(v);
        scalings.push(s);
    }
    ray_indices.push(center);
    scalings.push(Rational::one());
    for (w, t) in high.into_iter().rev() {
        ray_indices.push(w);
        scalings.push(t);
    }
    let mut config = assemble(rays, r, ray_indices, scalings);
    if let Some(x) = uniform_direction(&config) {
        // x solves <chi_i, x> = -1; rescale x to a primitive integer vector
        let k = primitive_factor(&x.x);
        config.scalings = config.scalings.iter().map(|s| s / &k).collect();
        config = assemble(rays, r, config.ray_indices, config.scalings);
    }
    Ok(config)
}

fn assemble(rays: &RaySet, r: usize, ray_indices: Vec<usize>, scalings: Vec<Rational>) -> Configuration {
    let functionals: Vec<RationalVector> = ray_indices
        .iter()
        .zip(&scalings)
        .map(|(&i, s)| rays.rays[i].scale(s))
        .collect();
    let center_index = r.div_ceil(2);
    let chi = functionals[center_index - 1].scale(&exactlin::int(2));
    Configuration {
        r,
        center_index,
        pairs: (1..center_index).map(|i| (i, r + 1 - i)).collect(),
        scalings,
        ray_indices,
        functionals,
        chi,
        space_dim: rays.space_dim,
    }
}

/// The positive `k` making `k * x` a primitive integer vector.
fn primitive_factor(x: &RationalVector) -> Rational {
    let den = x
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    let num = x
        .entries()
        .iter()
        .fold(BigInt::zero(), |acc, e| acc.gcd(&(e.numer() * (&den / e.denom()))));
    BigRational::new(den, num)
}

/// Rank of the functional family.
pub fn span_dimension(c: &Configuration) -> usize {
    exactlin::rank_of(&c.functionals).expect("functionals share a dimension")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformDirection {
    pub x: RationalVector,
    /// True iff the functionals span the whole Cartan subspace.
    pub unique: bool,
}

/// The `X` in the span of the functionals with `<chi_i, X> = -1` for all
/// `i`, or `None` if no such `X` exists.
pub fn uniform_direction(c: &Configuration) -> Option<UniformDirection> {
    // X = F^T y with F F^T y = -1 picks the solution inside span(chi_i)
    let f = RationalMatrix::from_rows(&c.functionals).ok()?;
    let ft = f.transpose();
    let gram_rows: Vec<RationalVector> = c
        .functionals
        .iter()
        .map(|a| RationalVector::new(c.functionals.iter().map(|b| a.dot(b)).collect()))
        .collect();
    let gram = RationalMatrix::from_rows(&gram_rows).ok()?;
    let rhs = RationalVector::new(vec![-Rational::one(); c.r]);
    let y = exactlin::solve(&gram, &rhs).ok()?.x;
    let x = RationalVector::new(
        (0..ft.rows())
            .map(|i| ft.row(i).dot(&y))
            .collect(),
    );
    debug_assert!(c.functionals.iter().all(|f| f.dot(&x) == -Rational::one()));
    Some(UniformDirection {
        x,
        unique: span_dimension(c) == c.space_dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitCaseVerdict {
    /// The limit case `r(g) = 2p + 1` cannot occur (`r(g)` even) or the
    /// type is classical.
    NotApplicable,
    /// Every minimizing `j0` admits configurations, all with a uniform
    /// direction.
    ConformallyFlat,
    /// Configurations exist for some `j0`, but not all of them have a
    /// uniform direction.
    Mixed,
    /// No minimizing `j0` admits any configuration.
    Infeasible,
}

impl LimitCaseVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitCaseVerdict::NotApplicable => "NotApplicable",
            LimitCaseVerdict::ConformallyFlat => "ConformallyFlat",
            LimitCaseVerdict::Mixed => "Mixed",
            LimitCaseVerdict::Infeasible => "Infeasible",
        }
    }
}

/// Analysis of one minimal parabolic complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct J0Case {
    pub j0: usize,
    pub complement_size: usize,
    pub centers: Vec<RationalVector>,
    /// Number of admissible (center, pairing) choices, capped at
    /// [`MATCHING_LIMIT`] per center.
    pub admissible_configurations: usize,
    /// How many of those admit a uniform direction.
    pub with_uniform_direction: usize,
    /// The configuration when it is unique.
    pub configuration: Option<Configuration>,
    pub uniform_direction: Option<UniformDirection>,
}

/// Analyses one `j0`: centers, every admissible pairing, uniform directions.
pub fn analyze_j0(ty: RootSystemType, j0: usize) -> Result<J0Case, ResonanceError> {
    let rs = rootsys::build(ty)?;
    let pc = rootsys::parabolic_complement(&rs, j0)?;
    let rays = RaySet::from_complement(&pc, rs.rank())?;
    let centers = find_centers(&rays)?;
    let mut configs = Vec::new();
    for &c in &centers {
        for m in admissible_matchings(&rays, c, MATCHING_LIMIT) {
            match configuration_for_matching(&rays, c, &m) {
                Ok(conf) => configs.push(conf),
                Err(ResonanceError::ScalingInfeasible) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let directions: Vec<Option<UniformDirection>> = configs.iter().map(uniform_direction).collect();
    let with_uniform_direction = directions.iter().filter(|d| d.is_some()).count();
    let (configuration, uniform_direction) = if configs.len() == 1 {
        (configs.pop(), directions.into_iter().next().flatten())
    } else {
        (None, None)
    };
    Ok(J0Case {
        j0,
        complement_size: pc.codim,
        centers: centers.iter().map(|&i| rays.rays[i].clone()).collect(),
        admissible_configurations: configs.len().max(configuration.is_some() as usize),
        with_uniform_direction,
        configuration,
        uniform_direction,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitCaseReport {
    #[serde(rename = "type")]
    pub ty: RootSystemType,
    pub r_g: usize,
    /// The index `p` of the limit case `r(g) = 2p + 1`, when `r(g)` is odd.
    pub limit_index: Option<usize>,
    pub j0_cases: Vec<J0Case>,
    pub verdict: LimitCaseVerdict,
    /// Final lower bound on the optimal index.
    pub k_bound: usize,
    /// Set when the limit case is infeasible and the bound moves up by one.
    pub refined_bound: Option<usize>,
    pub schema_version: u32,
}

/// Runs the limit-case pipeline on every minimizing `j0` of an exceptional
/// type. `E_6` has even `r(g)` and is reported as not applicable.
pub fn limit_case_report(ty: RootSystemType) -> Result<LimitCaseReport, ResonanceError> {
    if !ty.is_exceptional() {
        return Err(ResonanceError::NotExceptional(ty));
    }
    let r_g = rootsys::minimal_resonant_codim(ty)?;
    if r_g % 2 == 0 {
        return Ok(LimitCaseReport {
            ty,
            r_g,
            limit_index: None,
            j0_cases: Vec::new(),
            verdict: LimitCaseVerdict::NotApplicable,
            k_bound: unrefined_bound(ty, r_g),
            refined_bound: None,
            schema_version: SCHEMA_VERSION,
        });
    }
    let j0s = rootsys::minimizing_j0(ty)?;
    let j0_cases = j0s
        .par_iter()
        .map(|&j0| analyze_j0(ty, j0))
        .collect::<Result<Vec<_>, _>>()?;
    let any = j0_cases.iter().any(|c| c.admissible_configurations > 0);
    let all_flat = j0_cases
        .iter()
        .all(|c| c.admissible_configurations > 0 && c.with_uniform_direction == c.admissible_configurations);
    let verdict = if !any {
        LimitCaseVerdict::Infeasible
    } else if all_flat {
        LimitCaseVerdict::ConformallyFlat
    } else {
        LimitCaseVerdict::Mixed
    };
    let infeasible = verdict == LimitCaseVerdict::Infeasible;
    let k_bound = unrefined_bound(ty, r_g) + usize::from(infeasible);
    Ok(LimitCaseReport {
        ty,
        r_g,
        limit_index: Some((r_g - 1) / 2),
        j0_cases,
        verdict,
        k_bound,
        refined_bound: infeasible.then_some(k_bound),
        schema_version: SCHEMA_VERSION,
    })
}

fn unrefined_bound(ty: RootSystemType, r_g: usize) -> usize {
    ty.rank().saturating_sub(1).max(r_g.saturating_sub(1).div_ceil(2))
}

/// Outcome of the limit case as recorded in a [`BoundRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitCase {
    NotApplicable,
    ConfigurationExists { conformally_flat: bool },
    Infeasible,
}

impl From<LimitCaseVerdict> for LimitCase {
    fn from(v: LimitCaseVerdict) -> Self {
        match v {
            LimitCaseVerdict::NotApplicable => LimitCase::NotApplicable,
            LimitCaseVerdict::ConformallyFlat => LimitCase::ConfigurationExists {
                conformally_flat: true,
            },
            LimitCaseVerdict::Mixed => LimitCase::ConfigurationExists {
                conformally_flat: false,
            },
            LimitCaseVerdict::Infeasible => LimitCase::Infeasible,
        }
    }
}

impl std::fmt::Display for LimitCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitCase::NotApplicable => f.write_str("not applicable"),
            LimitCase::ConfigurationExists { conformally_flat: true } => {
                f.write_str("configuration exists (conformally flat)")
            }
            LimitCase::ConfigurationExists { conformally_flat: false } => {
                f.write_str("configuration exists (not flat)")
            }
            LimitCase::Infeasible => f.write_str("infeasible"),
        }
    }
}

/// Lower bound on the optimal index of a cocompact lattice with restricted
/// root system of the given type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRecord {
    #[serde(rename = "type")]
    pub ty: RootSystemType,
    pub r_g: usize,
    /// `l - 1`, from the real-rank bound.
    pub rank_bound: usize,
    /// `ceil((r(g) - 1) / 2)`, from `r(g) <= 2p + 1`.
    pub resonance_bound: usize,
    pub limit_case: LimitCase,
    pub k_bound: usize,
}

pub fn optimal_index_bound(ty: RootSystemType) -> Result<BoundRecord, ResonanceError> {
    if ty.rank() < 2 {
        return Err(ResonanceError::RankTooLow(ty));
    }
    let r_g = rootsys::minimal_resonant_codim(ty)?;
    let rank_bound = ty.rank() - 1;
    let resonance_bound = (r_g - 1).div_ceil(2);
    let limit_case: LimitCase = if ty.is_exceptional() {
        limit_case_report(ty)?.verdict.into()
    } else {
        LimitCase::NotApplicable
    };
    let bump = usize::from(limit_case == LimitCase::Infeasible);
    Ok(BoundRecord {
        ty,
        r_g,
        rank_bound,
        resonance_bound,
        limit_case,
        k_bound: rank_bound.max(resonance_bound) + bump,
    })
}

/// Ray set of the `j0` complement of a reduced type.
pub fn complement_rays(ty: RootSystemType, j0: usize) -> Result<RaySet, ResonanceError> {
    if !ty.is_reduced() {
        return Err(ResonanceError::NotReduced(ty));
    }
    let rs = rootsys::build(ty)?;
    let pc = rootsys::parabolic_complement(&rs, j0)?;
    RaySet::from_complement(&pc, rs.rank())
}

//! Random `CO(p, q)` cocycles, Lyapunov exponent estimates and a uniform
//! regularity classifier for matrix sequences.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("signature (p, q) must have p + q >= 1")]
    EmptySignature,
    #[error("sampler scales must be finite and non-negative")]
    InvalidScale,
    #[error("need at least one step")]
    NoSteps,
    #[error("re-orthonormalization interval must be in 1..={max}, got {found}")]
    InvalidInterval { found: usize, max: usize },
    #[error("frame overflowed after {step} steps; shorten the re-orthonormalization interval")]
    NumericalOverflow { step: usize },
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("matrix sequence needs at least 3 terms, got {0}")]
    SequenceTooShort(usize),
    #[error("matrices and times differ in length or shape")]
    ShapeMismatch,
    #[error("times must be positive and strictly increasing")]
    InvalidTimes,
    #[error("matrix {0} is singular")]
    SingularMatrix(usize),
}

pub const MAX_INTERVAL: usize = 20;

/// Distributions used to draw each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    /// Standard deviation of the rapidity in each mixed plane.
    pub boost_scale: f64,
    /// Standard deviation of the angle in each definite plane.
    pub rotation_scale: f64,
    /// The log conformal factor `c` is drawn from a normal law with this
    /// mean and `conformal_log_spread` as standard deviation.
    pub conformal_log_mean: f64,
    pub conformal_log_spread: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            boost_scale: 0.3,
            rotation_scale: 1.0,
            conformal_log_mean: -0.1,
            conformal_log_spread: 0.2,
        }
    }
}

impl SamplerSpec {
    pub fn identity() -> Self {
        SamplerSpec {
            boost_scale: 0.0,
            rotation_scale: 0.0,
            conformal_log_mean: 0.0,
            conformal_log_spread: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CocycleModel {
    pub p: usize,
    pub q: usize,
    #[serde(flatten)]
    pub sampler: SamplerSpec,
    pub seed: u64,
}

impl CocycleModel {
    pub fn new(p: usize, q: usize, sampler: SamplerSpec, seed: u64) -> Result<Self, SimError> {
        if p + q == 0 {
            return Err(SimError::EmptySignature);
        }
        let s = &sampler;
        let ok = [s.boost_scale, s.rotation_scale, s.conformal_log_spread]
            .iter()
            .all(|x| x.is_finite() && *x >= 0.0)
            && s.conformal_log_mean.is_finite();
        if !ok {
            return Err(SimError::InvalidScale);
        }
        Ok(CocycleModel { p, q, sampler, seed })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// `J = diag(-1 x p, +1 x q)`.
    pub fn form(&self) -> DMatrix<f64> {
        form(self.p, self.q)
    }
}

pub fn form(p: usize, q: usize) -> DMatrix<f64> {
    DMatrix::from_fn(p + q, p + q, |i, j| match (i == j, i < p) {
        (false, _) => 0.0,
        (true, true) => -1.0,
        (true, false) => 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlaneKind {
    Rotation,
    Boost,
}

/// A rotation by `param` radians, or a boost with rapidity `param`, acting
/// on coordinates `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneOp {
    pub i: usize,
    pub j: usize,
    pub kind: PlaneKind,
    pub param: f64,
}

impl PlaneOp {
    fn apply_rows(&self, m: &mut DMatrix<f64>) {
        let (a, b) = match self.kind {
            PlaneKind::Rotation => (self.param.cos(), self.param.sin()),
            PlaneKind::Boost => (self.param.cosh(), self.param.sinh()),
        };
        // rotation: [c -s; s c], boost: [ch sh; sh ch]
        let sign = match self.kind {
            PlaneKind::Rotation => -1.0,
            PlaneKind::Boost => 1.0,
        };
        for col in 0..m.ncols() {
            let x = m[(self.i, col)];
            let y = m[(self.j, col)];
            m[(self.i, col)] = a * x + sign * b * y;
            m[(self.j, col)] = b * x + a * y;
        }
    }
}

/// `g = e^c O` with `O` the product of the plane operations, the first
/// one applied first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalStep {
    pub log_scale: f64,
    pub planes: Vec<PlaneOp>,
}

impl ConformalStep {
    pub fn identity() -> Self {
        ConformalStep {
            log_scale: 0.0,
            planes: Vec::new(),
        }
    }

    /// Replaces `m` by `O m`, leaving out the scalar factor.
    pub fn apply_orthogonal_left(&self, m: &mut DMatrix<f64>) {
        for op in &self.planes {
            op.apply_rows(m);
        }
    }

    /// Replaces `m` by `g m`.
    pub fn apply_left(&self, m: &mut DMatrix<f64>) {
        self.apply_orthogonal_left(m);
        *m *= self.log_scale.exp();
    }

    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n, n);
        self.apply_left(&mut m);
        m
    }

    /// Log of the distortion `lambda` in `g^T J g = lambda J`.
    pub fn log_distortion(&self) -> f64 {
        2.0 * self.log_scale
    }
}

/// Draws one step: a rotation in every definite coordinate plane, a boost
/// in every mixed plane, then the conformal factor.
pub fn sample_step<R: Rng>(model: &CocycleModel, rng: &mut R) -> ConformalStep {
    let n = model.n();
    let s = &model.sampler;
    let mut planes = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let mixed = (i < model.p) != (j < model.p);
            let (kind, scale) = if mixed {
                (PlaneKind::Boost, s.boost_scale)
            } else {
                (PlaneKind::Rotation, s.rotation_scale)
            };
            let z: f64 = rng.sample(StandardNormal);
            if scale > 0.0 {
                planes.push(PlaneOp {
                    i,
                    j,
                    kind,
                    param: scale * z,
                });
            }
        }
    }
    let z: f64 = rng.sample(StandardNormal);
    ConformalStep {
        log_scale: s.conformal_log_mean + s.conformal_log_spread * z,
        planes,
    }
}

/// Log distortion of `g` recovered from `|det g| = lambda^{n/2}`.
pub fn log_distortion_from_matrix(g: &DMatrix<f64>) -> Option<f64> {
    let n = g.nrows();
    log_abs_det(g).map(|d| 2.0 * d / n as f64)
}

/// `log |det g|` from the LU factors, without forming the determinant.
pub fn log_abs_det(g: &DMatrix<f64>) -> Option<f64> {
    let lu = g.clone().lu();
    let u = lu.u();
    let mut sum = 0.0;
    for k in 0..u.nrows() {
        let d = u[(k, k)].abs();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        sum += d.ln();
    }
    Some(sum)
}

/// Max-norm of `g^T J g - lambda J` with `lambda` the mean diagonal ratio.
pub fn co_defect(g: &DMatrix<f64>, p: usize, q: usize) -> f64 {
    let j = form(p, q);
    let m = g.transpose() * &j * g;
    let n = p + q;
    let lambda = (0..n).map(|k| m[(k, k)] * j[(k, k)]).sum::<f64>() / n as f64;
    (m - j * lambda).amax()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub p: usize,
    pub q: usize,
    /// Ascending, one entry per dimension.
    pub exponents: Vec<f64>,
    pub chi_hat: f64,
    /// Distortion exponent recovered from the frame's volume growth.
    pub chi_from_volume: f64,
    pub steps: usize,
    /// Blocks of exponent indices at the default threshold.
    pub grouping: Vec<Vec<usize>>,
}

impl LyapunovEstimate {
    pub fn n(&self) -> usize {
        self.p + self.q
    }
}

/// Default tolerance used for the grouping stored in an estimate.
pub const DEFAULT_TOL: f64 = 5e-2;

/// Gap threshold `max(10 tol, 5 / sqrt(N))`.
pub fn grouping_threshold(tol: f64, steps: usize) -> f64 {
    (10.0 * tol).max(5.0 / (steps as f64).sqrt())
}

/// Splits sorted exponents wherever consecutive values differ by more than
/// `threshold`.
pub fn group_exponents(exponents: &[f64], threshold: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &x) in exponents.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if x - exponents[*g.last().unwrap()] <= threshold => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Simulates `steps` steps of the model.
pub fn estimate_exponents(model: &CocycleModel, steps: usize, interval: usize) -> Result<LyapunovEstimate, SimError> {
    let mut rng = model.rng();
    estimate_from_steps(
        model.p,
        model.q,
        (0..steps).map(|_| sample_step(model, &mut rng)),
        interval,
    )
}

/// One factor of a cocycle product, split as `e^c` times a matrix.
pub trait CocycleStep {
    /// The log conformal factor `c`.
    fn log_scale(&self) -> f64;
    /// Replaces `m` by `e^{-c} g m`.
    fn apply_normalized_left(&self, m: &mut DMatrix<f64>);
}

impl CocycleStep for ConformalStep {
    fn log_scale(&self) -> f64 {
        self.log_scale
    }

    fn apply_normalized_left(&self, m: &mut DMatrix<f64>) {
        self.apply_orthogonal_left(m);
    }
}

/// A general invertible matrix; `c` is read off `|det g| = e^{nc}`.
impl CocycleStep for DMatrix<f64> {
    fn log_scale(&self) -> f64 {
        log_abs_det(self).map_or(f64::NEG_INFINITY, |d| d / self.nrows() as f64)
    }

    fn apply_normalized_left(&self, m: &mut DMatrix<f64>) {
        *m = self * &*m * (-self.log_scale()).exp();
    }
}

/// QR estimate over an arbitrary step stream. The frame is re-orthonormalized
/// every `interval` steps and after the last one.
pub fn estimate_from_steps<I>(p: usize, q: usize, steps: I, interval: usize) -> Result<LyapunovEstimate, SimError>
where
    I: IntoIterator,
    I::Item: CocycleStep,
{
    let n = p + q;
    if n == 0 {
        return Err(SimError::EmptySignature);
    }
    if interval == 0 || interval > MAX_INTERVAL {
        return Err(SimError::InvalidInterval {
            found: interval,
            max: MAX_INTERVAL,
        });
    }
    let mut frame = DMatrix::<f64>::identity(n, n);
    let mut log_r = vec![0.0; n];
    let mut log_scale_sum = 0.0;
    let mut count = 0usize;
    let mut pending = 0usize;
    for step in steps {
        let c = step.log_scale();
        if !c.is_finite() {
            return Err(SimError::SingularMatrix(count));
        }
        step.apply_normalized_left(&mut frame);
        log_scale_sum += c;
        count += 1;
        pending += 1;
        if pending == interval {
            reorthonormalize(&mut frame, &mut log_r, count)?;
            pending = 0;
        }
    }
    if count == 0 {
        return Err(SimError::NoSteps);
    }
    if pending > 0 {
        reorthonormalize(&mut frame, &mut log_r, count)?;
    }
    let nf = count as f64;
    let mean_scale = log_scale_sum / nf;
    let mut exponents: Vec<f64> = log_r.iter().map(|x| x / nf + mean_scale).collect();
    exponents.sort_by(f64::total_cmp);
    let volume: f64 = exponents.iter().sum();
    let grouping = group_exponents(&exponents, grouping_threshold(DEFAULT_TOL, count));
    Ok(LyapunovEstimate {
        p,
        q,
        exponents,
        chi_hat: 2.0 * mean_scale,
        chi_from_volume: 2.0 * volume / n as f64,
        steps: count,
        grouping,
    })
}

fn reorthonormalize(frame: &mut DMatrix<f64>, log_r: &mut [f64], step: usize) -> Result<(), SimError> {
    if frame.iter().any(|x| !x.is_finite() || x.abs() > 1e150) {
        return Err(SimError::NumericalOverflow { step });
    }
    let qr = std::mem::replace(frame, DMatrix::zeros(0, 0)).qr();
    let r = qr.r();
    for (k, acc) in log_r.iter_mut().enumerate() {
        let d = r[(k, k)].abs();
        if d == 0.0 {
            return Err(SimError::NumericalOverflow { step });
        }
        *acc += d.ln();
    }
    *frame = qr.q();
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleCheck {
    pub rule: String,
    pub pass: bool,
    pub residual: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub tol: f64,
    pub threshold: f64,
    pub grouping: Vec<Vec<usize>>,
    /// Mean exponent of each block.
    pub block_exponents: Vec<f64>,
    /// `|mean_i + mean_{r+1-i} - chi_hat|` per block pair.
    pub pair_residuals: Vec<f64>,
    /// `|lambda_j + lambda_{n+1-j} - chi_hat|` per exponent pair.
    pub exponent_pair_residuals: Vec<f64>,
    pub determinant_residual: f64,
    pub checks: Vec<RuleCheck>,
    pub pass: bool,
}

impl PairingReport {
    pub fn max_pair_residual(&self) -> f64 {
        self.pair_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_exponent_pair_residual(&self) -> f64 {
        self.exponent_pair_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks the pairing structure of an estimate: block pairs and exponent
/// pairs sum to `chi_hat`, the exponents sum to `n chi_hat / 2`, and the
/// number of blocks respects `r <= 2 min(p, q) + 1` (`2 min(p, q)` when
/// there is no central block).
pub fn check_pairing(est: &LyapunovEstimate, tol: f64) -> Result<PairingReport, SimError> {
    if !(tol > 0.0) {
        return Err(SimError::InvalidTolerance);
    }
    let n = est.n();
    let ex = &est.exponents;
    let threshold = grouping_threshold(tol, est.steps);
    let grouping = group_exponents(ex, threshold);
    let block_exponents: Vec<f64> = grouping
        .iter()
        .map(|g| g.iter().map(|&k| ex[k]).sum::<f64>() / g.len() as f64)
        .collect();
    let r = grouping.len();
    let pair_residuals: Vec<f64> = (0..r.div_ceil(2))
        .map(|i| (block_exponents[i] + block_exponents[r - 1 - i] - est.chi_hat).abs())
        .collect();
    let exponent_pair_residuals: Vec<f64> = (0..n.div_ceil(2))
        .map(|j| (ex[j] + ex[n - 1 - j] - est.chi_hat).abs())
        .collect();
    let determinant_residual = (ex.iter().sum::<f64>() - n as f64 * est.chi_hat / 2.0).abs();

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let pmin = est.p.min(est.q);
    // a central block contains the middle of the spectrum
    let central = r % 2 == 1;
    let r_limit = if central { 2 * pmin + 1 } else { 2 * pmin };
    let checks = vec![
        RuleCheck {
            rule: "block_pairing".into(),
            pass: max(&pair_residuals) <= tol,
            residual: max(&pair_residuals),
            bound: tol,
        },
        RuleCheck {
            rule: "exponent_pairing".into(),
            pass: max(&exponent_pair_residuals) <= tol,
            residual: max(&exponent_pair_residuals),
            bound: tol,
        },
        RuleCheck {
            rule: "determinant_sum".into(),
            pass: determinant_residual <= n as f64 * tol,
            residual: determinant_residual,
            bound: n as f64 * tol,
        },
        RuleCheck {
            rule: "block_count".into(),
            pass: r <= r_limit,
            residual: r as f64,
            bound: r_limit as f64,
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(PairingReport {
        tol,
        threshold,
        grouping,
        block_exponents,
        pair_residuals,
        exponent_pair_residuals,
        determinant_residual,
        checks,
        pass,
    })
}

/// Invertible matrices `g_k` observed at times `T_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSequence {
    mats: Vec<DMatrix<f64>>,
    times: Vec<f64>,
}

impl MatrixSequence {
    pub fn new(mats: Vec<DMatrix<f64>>, times: Vec<f64>) -> Result<Self, SimError> {
        if mats.len() != times.len() {
            return Err(SimError::ShapeMismatch);
        }
        let n = mats.first().map_or(0, |m| m.nrows());
        if n == 0 || mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(SimError::ShapeMismatch);
        }
        let increasing = times.windows(2).all(|w| w[0] < w[1]);
        if !increasing || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(SimError::InvalidTimes);
        }
        Ok(MatrixSequence { mats, times })
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[DMatrix<f64>] {
        &self.mats
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `(T_k, log|det g_k|, log ||g_k||)` for every term.
    pub fn logs(&self) -> Result<Vec<(f64, f64, f64)>, SimError> {
        self.mats
            .iter()
            .zip(&self.times)
            .enumerate()
            .map(|(k, (g, &t))| {
                let det = log_abs_det(g).ok_or(SimError::SingularMatrix(k))?;
                let norm = g.clone().singular_values().max();
                if !(norm > 0.0) {
                    return Err(SimError::SingularMatrix(k));
                }
                Ok((t, det, norm.ln()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regularity {
    Uniform { exponent: f64 },
    NotUniform,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub verdict: Regularity,
    /// Tail slope of `log|det g_k|` against `T_k`.
    pub chi_det: f64,
    pub chi_det_stderr: f64,
    /// Tail slope of `log ||g_k||` against `T_k`.
    pub top_exponent: f64,
    pub top_exponent_stderr: f64,
    /// `top_exponent - chi_det / n`.
    pub gap: f64,
    /// Last `a_k = log|det g_k| / T_k`.
    pub a_last: f64,
    /// Last `b_k = log ||g_k|| / T_k`.
    pub b_last: f64,
    pub tail_start: usize,
}

/// Index where the tail used by the classifier begins.
pub fn tail_start(len: usize) -> usize {
    len / 4
}

/// Decides whether `(g_k)` has a single Lyapunov exponent along `(T_k)`.
///
/// The limits of `a_k` and `b_k` are estimated as least-squares slopes of
/// `log|det g_k|` and `log ||g_k||` against `T_k` over the tail, which
/// discards bounded multiplicative perturbations. The verdict is `Uniform`
/// when both slopes are determined within `tol` and `b` matches `a / n`
/// within `tol`; `NotUniform` when the gap exceeds `3 tol` beyond three
/// standard errors; `Inconclusive` otherwise.
pub fn classify_uniform_regularity(s: &MatrixSequence, tol: f64) -> Result<RegularityReport, SimError> {
    if !(tol > 0.0) {
        return Err(SimError::InvalidTolerance);
    }
    if s.len() < 3 {
        return Err(SimError::SequenceTooShort(s.len()));
    }
    let logs = s.logs()?;
    let n = s.dim() as f64;
    let start = tail_start(logs.len()).min(logs.len() - 3);
    let tail = &logs[start..];
    let t: Vec<f64> = tail.iter().map(|x| x.0).collect();
    let (chi_det, se_det) = slope(&t, &tail.iter().map(|x| x.1).collect::<Vec<_>>());
    let (top, se_top) = slope(&t, &tail.iter().map(|x| x.2).collect::<Vec<_>>());
    let gap = top - chi_det / n;
    let se = se_top.max(se_det / n);
    let verdict = if se_det <= tol && se_top <= tol && gap.abs() <= tol {
        Regularity::Uniform {
            exponent: chi_det / n,
        }
    } else if gap.abs() - 3.0 * se > 3.0 * tol {
        Regularity::NotUniform
    } else {
        Regularity::Inconclusive
    };
    let last = logs[logs.len() - 1];
    Ok(RegularityReport {
        verdict,
        chi_det,
        chi_det_stderr: se_det,
        top_exponent: top,
        top_exponent_stderr: se_top,
        gap,
        a_last: last.1 / last.0,
        b_last: last.2 / last.0,
        tail_start: start,
    })
}

/// Least-squares slope of `y` against `x` and its standard error.
fn slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, c)| (c - my - b * (a - mx)).powi(2))
        .sum();
    let se = if x.len() > 2 {
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (b, se)
}

/// Example sequences: `e^{-T_k} I_n` with `T_k = k`.
pub fn scalar_family(n: usize, len: usize) -> MatrixSequence {
    let times: Vec<f64> = (1..=len).map(|k| k as f64).collect();
    let mats = times
        .iter()
        .map(|t| DMatrix::identity(n, n) * (-t).exp())
        .collect();
    MatrixSequence::new(mats, times).expect("well-formed family")
}

/// `diag(e^{-T_k}, e^{-2 T_k})` with `T_k = k`.
pub fn split_family(len: usize) -> MatrixSequence {
    diagonal_family(&[1.0, 2.0], len)
}

/// `diag(e^{-r_1 T_k}, ..., e^{-r_n T_k})` with `T_k = k`.
pub fn diagonal_family(rates: &[f64], len: usize) -> MatrixSequence {
    let times: Vec<f64> = (1..=len).map(|k| k as f64).collect();
    let mats = times
        .iter()
        .map(|t| {
            let d: Vec<f64> = rates.iter().map(|r| (-r * t).exp()).collect();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
        })
        .collect();
    MatrixSequence::new(mats, times).expect("well-formed family")
}

/// A random matrix with `||l|| <= bound` and `||l^{-1}|| <= bound`:
/// `U diag(s) V^T` with Haar-ish orthogonal factors and log-uniform `s`.
pub fn bounded_multiplier<R: Rng>(n: usize, bound: f64, rng: &mut R) -> DMatrix<f64> {
    let lb = bound.ln();
    let s = nalgebra::DVector::from_fn(n, |_, _| (rng.random_range(-lb..=lb)).exp());
    random_orthogonal(n, rng) * DMatrix::from_diagonal(&s) * random_orthogonal(n, rng)
}

fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    a.qr().q()
}

/// `l_k g_k l'_k` with fresh bounded multipliers for every term.
pub fn perturb<R: Rng>(s: &MatrixSequence, bound: f64, rng: &mut R) -> MatrixSequence {
    let n = s.dim();
    let mats = s
        .mats
        .iter()
        .map(|g| bounded_multiplier(n, bound, rng) * g * bounded_multiplier(n, bound, rng))
        .collect();
    MatrixSequence::new(mats, s.times.clone()).expect("perturbation keeps shape")
}

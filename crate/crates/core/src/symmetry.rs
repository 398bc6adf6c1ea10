//! Left and right symmetry of Birkhoff-James orthogonality.
//!
//! A unit vector `x` is left symmetric when `x ⊥_B y ⇒ y ⊥_B x` for every
//! `y`, and right symmetric when `y ⊥_B x ⇒ x ⊥_B y`. The same words apply
//! to an operator `T` with `⊥_B` taken in the operator space.
//!
//! Symmetry quantifies over every direction (or every operator), so it is
//! never certified: the verdicts say "no counterexample at this resolution".
//! Failures are certified by an explicit counterexample that is re-checked
//! from scratch before it is reported.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cones::{bj_orthogonal_vectors, circle_roots, orthogonal_arc_2d, right_orthogonal_direction, TriState};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, euclid, projective_distance, scaled};
use crate::operators::{
    bj_orthogonal_operators, bj_orthogonal_operators_given, operator_norm, Hyperplane, NormAttainment,
    OperatorMatrix,
};
use crate::par;
use crate::sampling::{face_functional, gaussian_operator, gaussian_vec, trial_rng, unit_vec};
use crate::spaces::Space;

/// Fixed seed for the direction samples of vector-level scans in dimension
/// three and above, which take no seed argument.
const VECTOR_SCAN_SEED: u64 = 0x005e_ed0f_5ca1;

/// Relative singular-value cutoff for rank and kernel computations.
const RANK_RTOL: f64 = 1e-8;

type CandidateBuilder = fn(&Space, &OperatorMatrix, &NormAttainment) -> Result<Option<OperatorMatrix>>;

/// Trials evaluated per batch; the search stops after the first batch that
/// contains a counterexample and reports the lowest trial index in it.
const BATCH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryKind {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryOutcome {
    SymmetricUpToResolution,
    NotSymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counterexample {
    Vector(Vec<f64>),
    Operator(OperatorMatrix),
}

/// How a counterexample was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Exhaustive scan of the planar orthogonality cones.
    ConeScan,
    /// Seeded direction sampling in dimension three and above.
    DirectionSampling,
    /// `A = Ty ⊗ f_y` for `y ⊥_B x`, `x ∈ M_T`, `Ty ≠ 0`.
    KernelRankOne,
    /// `A = y₁ ⊗ f_{x₁}` with `y₁` a non-symmetric partner of `Tx₁`.
    PartnerRankOne,
    /// `A = ½I + ½ u₀ ⊗ f_{u₀}` with `u₀ ∈ ker T`.
    HalfIdentity,
    /// Random operators conditioned on the forward orthogonality.
    ConditionedSampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub kind: SymmetryKind,
    pub verdict: SymmetryOutcome,
    pub counterexample: Option<Counterexample>,
    /// Directions scanned, or operator trials evaluated.
    pub trials_or_resolution: usize,
    pub strategy: Option<Strategy>,
    /// Candidates whose reverse test landed in the indeterminate band.
    pub indeterminate: usize,
}

impl SymmetryVerdict {
    fn symmetric(kind: SymmetryKind, count: usize, indeterminate: usize) -> SymmetryVerdict {
        SymmetryVerdict {
            kind,
            verdict: SymmetryOutcome::SymmetricUpToResolution,
            counterexample: None,
            trials_or_resolution: count,
            strategy: None,
            indeterminate,
        }
    }

    fn broken(kind: SymmetryKind, c: Counterexample, count: usize, strategy: Strategy) -> SymmetryVerdict {
        SymmetryVerdict {
            kind,
            verdict: SymmetryOutcome::NotSymmetric,
            counterexample: Some(c),
            trials_or_resolution: count,
            strategy: Some(strategy),
            indeterminate: 0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.verdict == SymmetryOutcome::SymmetricUpToResolution
    }
}

// ---------------------------------------------------------------------------
// Vector level

/// Directions where the face structure of a polygon can change, modulo `π`:
/// vertex angles plus the ends of the orthogonality arc of `x`. Both
/// `x ⊥_B y` and `y ⊥_B x` are constant in `y` between consecutive
/// breakpoints, so the breakpoints and the midpoints between them are an
/// exhaustive set of test directions.
fn polygon_candidates(space: &Space, x: &[f64], resolution: usize) -> Result<Vec<Vec<f64>>> {
    let verts = space.polygon_vertices().expect("planar polyhedral space");
    let (start, len) = orthogonal_arc_2d(space, x, resolution)?;
    let mut angles: Vec<f64> = verts.iter().map(|v| v[1].atan2(v[0]).rem_euclid(PI)).collect();
    angles.push(start.rem_euclid(PI));
    angles.push((start + len).rem_euclid(PI));
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let m = angles.len();
    let mut out = Vec::with_capacity(2 * m);
    for k in 0..m {
        let a = angles[k];
        let b = if k + 1 < m { angles[k + 1] } else { angles[0] + PI };
        out.push(space.unit_at(a));
        out.push(space.unit_at(0.5 * (a + b)));
    }
    Ok(out)
}

/// Directions `y` with `x ⊥_B y` to test for the reverse relation.
fn left_candidates(space: &Space, x: &[f64], resolution: usize) -> Result<(Vec<Vec<f64>>, Strategy)> {
    if space.dim() == 2 {
        if space.polygon_vertices().is_some() {
            let all = polygon_candidates(space, x, resolution)?;
            let keep = all
                .into_iter()
                .filter(|y| bj_orthogonal_vectors(space, x, y).map(|t| t.holds()).unwrap_or(false))
                .collect();
            return Ok((keep, Strategy::ConeScan));
        }
        // Smooth plane: the cone is the single line ker f_x.
        let g = space.smooth_gradient(x);
        return Ok((vec![space.normalize(&[-g[1], g[0]])?], Strategy::ConeScan));
    }
    let ys = par::map_range(resolution, |k| {
        let mut rng = trial_rng(VECTOR_SCAN_SEED, k as u64);
        let f = face_functional(space, x, &mut rng);
        let s = gaussian_vec(&mut rng, space.dim());
        let y = axpy(&s, -dot(&f, &s) / dot(&f, x), x);
        space.normalize(&y).ok()
    });
    Ok((ys.into_iter().flatten().collect(), Strategy::DirectionSampling))
}

/// Directions `y` with `y ⊥_B x` to test for the reverse relation.
fn right_candidates(space: &Space, x: &[f64], resolution: usize) -> Result<(Vec<Vec<f64>>, Strategy)> {
    if space.dim() == 2 {
        if space.polygon_vertices().is_some() {
            let all = polygon_candidates(space, x, resolution)?;
            let keep = all
                .into_iter()
                .filter(|y| bj_orthogonal_vectors(space, y, x).map(|t| t.holds()).unwrap_or(false))
                .collect();
            return Ok((keep, Strategy::ConeScan));
        }
        // Smooth plane: y ⊥_B x iff the gradient at y annihilates x.
        let g = |t: f64| dot(&space.smooth_gradient(&[t.cos(), t.sin()]), x);
        let mut roots: Vec<f64> = circle_roots(g, resolution.max(8), 0.0)
            .into_iter()
            .map(|t| t.rem_euclid(PI))
            .collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 || (*a - *b).abs() > PI - 1e-9);
        return Ok((roots.into_iter().map(|t| space.unit_at(t)).collect(), Strategy::ConeScan));
    }
    let ys = par::map_range(resolution, |k| {
        let mut rng = trial_rng(VECTOR_SCAN_SEED, k as u64);
        let s = gaussian_vec(&mut rng, space.dim());
        right_orthogonal_direction(space, x, &s).ok()
    });
    Ok((ys.into_iter().flatten().collect(), Strategy::DirectionSampling))
}

fn vector_point_test(space: &Space, x: &[f64], resolution: usize, kind: SymmetryKind) -> Result<SymmetryVerdict> {
    let x = space.normalize(x)?;
    let (cands, strategy) = match kind {
        SymmetryKind::Left => left_candidates(space, &x, resolution)?,
        SymmetryKind::Right => right_candidates(space, &x, resolution)?,
    };
    let mut indeterminate = 0;
    for y in &cands {
        let reverse = match kind {
            SymmetryKind::Left => bj_orthogonal_vectors(space, y, &x)?,
            SymmetryKind::Right => bj_orthogonal_vectors(space, &x, y)?,
        };
        if reverse.fails() {
            if recheck_vector_counterexample(space, &x, kind, y)? {
                return Ok(SymmetryVerdict::broken(kind, Counterexample::Vector(y.clone()), resolution, strategy));
            }
        } else if reverse.is_indeterminate() {
            indeterminate += 1;
        }
    }
    Ok(SymmetryVerdict::symmetric(kind, resolution, indeterminate))
}

/// Test whether `x ⊥_B y` implies `y ⊥_B x`.
///
/// Planar spaces are scanned exhaustively (one direction for smooth points,
/// the breakpoints of the cone otherwise). In higher dimension `resolution`
/// seeded directions orthogonal to `x` are drawn.
pub fn is_left_symmetric_point(space: &Space, x: &[f64], resolution: usize) -> Result<SymmetryVerdict> {
    vector_point_test(space, x, resolution, SymmetryKind::Left)
}

/// Test whether `y ⊥_B x` implies `x ⊥_B y`. Planar smooth spaces locate
/// the directions `y` by a sign-change scan at `resolution` angles.
pub fn is_right_symmetric_point(space: &Space, x: &[f64], resolution: usize) -> Result<SymmetryVerdict> {
    vector_point_test(space, x, resolution, SymmetryKind::Right)
}

/// Fresh check of a vector counterexample: the forward relation holds and
/// the reverse one fails.
pub fn recheck_vector_counterexample(space: &Space, x: &[f64], kind: SymmetryKind, y: &[f64]) -> Result<bool> {
    let (a, b) = match kind {
        SymmetryKind::Left => (x, y),
        SymmetryKind::Right => (y, x),
    };
    Ok(bj_orthogonal_vectors(space, a, b)?.holds() && bj_orthogonal_vectors(space, b, a)?.fails())
}

/// Smallest reverse-relation margin over the test directions of `x`
/// (`+∞` when there are none).
pub fn reverse_margin(space: &Space, x: &[f64], kind: SymmetryKind, resolution: usize) -> Result<f64> {
    let x = space.normalize(x)?;
    let (cands, _) = match kind {
        SymmetryKind::Left => left_candidates(space, &x, resolution)?,
        SymmetryKind::Right => right_candidates(space, &x, resolution)?,
    };
    let mut m = f64::INFINITY;
    for y in &cands {
        let t = match kind {
            SymmetryKind::Left => bj_orthogonal_vectors(space, y, &x)?,
            SymmetryKind::Right => bj_orthogonal_vectors(space, &x, y)?,
        };
        m = m.min(t.margin);
    }
    Ok(m)
}

/// A run of consecutive symmetric scan points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCluster {
    /// Middle point of the run.
    pub point: Vec<f64>,
    /// Polar angle of `point` (planar scans only).
    pub angle: Option<f64>,
    /// First and last polar angles of the run (planar scans only).
    pub arc: Option<[f64; 2]>,
    pub scan_points: usize,
    /// Reverse-relation margin at `point`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricScan {
    pub kind: SymmetryKind,
    /// `exhaustive` for planar scans, `sampled` otherwise.
    pub mode: String,
    pub resolution: usize,
    pub scanned: usize,
    pub symmetric: usize,
    pub indeterminate: usize,
    pub all_symmetric: bool,
    pub clusters: Vec<SymmetricCluster>,
}

/// Cap on the points and test directions of a sampled scan, which costs
/// their product.
const SAMPLED_SCAN_CAP: usize = 512;

/// Scan the unit sphere for left or right symmetric points.
///
/// In the plane every mesh angle is tested, along with the vertex and edge
/// midpoint angles of a polygon; runs of consecutive symmetric angles are
/// merged into clusters. In higher dimension a deterministic sphere sample
/// is tested and each symmetric sample is its own cluster.
pub fn scan_symmetric_points(space: &Space, kind: SymmetryKind, resolution: usize) -> Result<SymmetricScan> {
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!("resolution must be at least 8 (got {resolution})")));
    }
    let planar = space.dim() == 2;
    let (points, angles, inner): (Vec<Vec<f64>>, Vec<Option<f64>>, usize) = if planar {
        let mut th: Vec<f64> = (0..resolution).map(|k| 2.0 * PI * k as f64 / resolution as f64).collect();
        if let Some(v) = space.polygon_vertices() {
            for k in 0..v.len() {
                let w = v[(k + 1) % v.len()];
                th.push(v[k][1].atan2(v[k][0]).rem_euclid(2.0 * PI));
                th.push((v[k][1] + w[1]).atan2(v[k][0] + w[0]).rem_euclid(2.0 * PI));
            }
        }
        th.sort_by(f64::total_cmp);
        th.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        (th.iter().map(|&t| space.unit_at(t)).collect(), th.into_iter().map(Some).collect(), resolution)
    } else {
        let pts = space.sphere_mesh(resolution.min(SAMPLED_SCAN_CAP))?;
        let n = pts.len();
        (pts, vec![None; n], resolution.min(SAMPLED_SCAN_CAP))
    };
    let verdicts = par::map_range(points.len(), |k| vector_point_test(space, &points[k], inner, kind));
    let mut sym = Vec::with_capacity(points.len());
    let mut indeterminate = 0;
    for v in verdicts {
        let v = v?;
        indeterminate += usize::from(v.is_symmetric() && v.indeterminate > 0);
        sym.push(v.is_symmetric());
    }
    let count = sym.iter().filter(|s| **s).count();
    let all_symmetric = count == points.len();

    // Runs of consecutive symmetric indices; in the plane the last run wraps
    // into the first.
    let mut runs: Vec<Vec<usize>> = Vec::new();
    if !all_symmetric {
        let m = points.len();
        let start = if planar { (0..m).find(|&k| !sym[k]).unwrap_or(0) } else { 0 };
        let mut current: Vec<usize> = Vec::new();
        for step in 0..m {
            let k = (start + step) % m;
            if sym[k] && (planar || current.is_empty()) {
                current.push(k);
            } else {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
                if sym[k] {
                    current.push(k);
                }
            }
        }
        if !current.is_empty() {
            runs.push(current);
        }
    }
    let mut clusters = Vec::with_capacity(runs.len());
    for run in runs {
        let mid = run[run.len() / 2];
        clusters.push(SymmetricCluster {
            point: points[mid].clone(),
            angle: angles[mid],
            arc: angles[run[0]].zip(angles[*run.last().expect("nonempty")]).map(|(a, b)| [a, b]),
            scan_points: run.len(),
            margin: reverse_margin(space, &points[mid], kind, inner)?,
        });
    }
    Ok(SymmetricScan {
        kind,
        mode: if planar { "exhaustive" } else { "sampled" }.into(),
        resolution,
        scanned: points.len(),
        symmetric: count,
        indeterminate,
        all_symmetric,
        clusters,
    })
}

fn require_smooth(space: &Space) -> Result<()> {
    if !space.is_smooth() {
        return Err(Error::Precondition("space is not smooth".into()));
    }
    Ok(())
}

fn require_strictly_convex(space: &Space) -> Result<()> {
    if !space.is_strictly_convex() {
        return Err(Error::Precondition("space is not strictly convex".into()));
    }
    Ok(())
}

/// Norming functional of a nonzero point of a smooth space.
fn norming_functional(space: &Space, x: &[f64]) -> Result<Vec<f64>> {
    require_smooth(space)?;
    Ok(space.support_face(x)?.functionals().swap_remove(0))
}

/// The hyperplane `H = ker f` with `f` the norming functional of `x`, so that
/// `x ⊥_B h` for every `h ∈ H`.
pub fn norming_hyperplane(space: &Space, x: &[f64]) -> Result<Hyperplane> {
    Hyperplane::kernel_of(&norming_functional(space, x)?)
}

// ---------------------------------------------------------------------------
// Witness constructions

fn check_dim(space: &Space, t: &OperatorMatrix) -> Result<()> {
    if t.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: t.dim() });
    }
    Ok(())
}

/// The rank-one `A` with `Ax₁ = y₁` and `A = 0` on `H`.
///
/// When `x₁ ∈ M_T`, `Tx₁ ⊥_B y₁` and `y₁ ⊥̸_B Tx₁`, and `H` is the norming
/// hyperplane of `x₁`, strict convexity gives `M_A = {±x₁}`, so `T ⊥_B A`
/// while `A ⊥̸_B T`.
pub fn witness_left_asym_thm24(
    space: &Space,
    t: &OperatorMatrix,
    x1: &[f64],
    y1: &[f64],
    h: &Hyperplane,
) -> Result<OperatorMatrix> {
    require_strictly_convex(space)?;
    check_dim(space, t)?;
    space.norm(x1)?;
    space.norm(y1)?;
    let f = &h.normal_functional;
    let fx = dot(f, x1);
    if fx.abs() <= 1e-12 * euclid(f) * euclid(x1) {
        return Err(Error::Precondition("x1 lies in the hyperplane".into()));
    }
    OperatorMatrix::rank_one(y1, &scaled(f, 1.0 / fx))
}

/// `A = Ty ⊗ f_y / f_y(y)`: zero on the norming hyperplane of `y` (which
/// contains `x` because `y ⊥_B x`), and `Ay = Ty`.
pub fn witness_left_asym_thm25(space: &Space, t: &OperatorMatrix, x: &[f64], y: &[f64]) -> Result<OperatorMatrix> {
    require_smooth(space)?;
    require_strictly_convex(space)?;
    check_dim(space, t)?;
    space.norm(x)?;
    let f = norming_functional(space, y)?;
    let ty = t.apply(y)?;
    let scale_t = (0..t.dim()).map(|j| space.norm_unchecked(&t.column(j))).fold(0.0, f64::max);
    if space.norm(&ty)? <= 1e-12 * scale_t.max(f64::MIN_POSITIVE) * space.norm(y)? {
        return Err(Error::Precondition("Ty = 0".into()));
    }
    let rel = dot(&f, x).abs() / space.norm(x)?;
    if rel > 1e-9 {
        return Err(Error::Precondition(format!("y is not orthogonal to x (f_y(x)/‖x‖ = {rel:.3e})")));
    }
    OperatorMatrix::rank_one(&ty, &scaled(&f, 1.0 / dot(&f, y)))
}

/// `½I + ½ u ⊗ f_u` for a unit `u`: fixes `u` and halves its norming
/// hyperplane.
fn half_identity_witness(space: &Space, u: &[f64]) -> Result<OperatorMatrix> {
    let f = norming_functional(space, u)?;
    let n = space.dim();
    let r = OperatorMatrix::rank_one(u, &scaled(&f, 0.5 / dot(&f, u)))?;
    OperatorMatrix::identity(n).scale(0.5).add_scaled(1.0, &r)
}

/// `M_T` as a single antipodal pair `±x₀`, or an error.
fn single_attainment(space: &Space, m: &NormAttainment) -> Result<Vec<f64>> {
    let single = m.witnesses.len() == 1
        && match &m.arcs_2d {
            Some(a) => a.arcs.iter().all(|[lo, hi]| hi - lo < 1e-6),
            None => m.samples.iter().all(|s| projective_distance(s, &m.witnesses[0]) < 1e-3),
        };
    if !single {
        return Err(Error::Precondition("M_T is not a single antipodal pair".into()));
    }
    space.normalize(&m.witnesses[0])
}

/// Whether `x` is known to be left symmetric: always in Euclidean spaces,
/// otherwise by a direction scan.
fn known_left_symmetric(space: &Space, x: &[f64]) -> Result<bool> {
    if space.is_euclidean() {
        return Ok(true);
    }
    Ok(is_left_symmetric_point(space, x, space.settings().resolution.min(2048))?.is_symmetric())
}

fn svd_rank(t: &OperatorMatrix) -> usize {
    let s = crate::linalg::singular_values(t.row_major(), t.dim());
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|v| **v > RANK_RTOL * top).count()
}

/// `A = ½I + ½ u₀ ⊗ f_{u₀}` with `u₀ ∈ ker T ∩ ker f_{x₀}`, for `T` with
/// `M_T = {±x₀}`, `x₀` a left-symmetric eigenvector with nonzero eigenvalue
/// and `rank T < n − 1`. Then `A ⊥_B T` (at `u₀`, where `Tu₀ = 0`) while
/// `T ⊥̸_B A` (at `x₀`, where `Ax₀ = ½x₀` is parallel to `Tx₀`).
pub fn witness_right_asym_thm26(space: &Space, t: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = space.dim();
    if n <= 2 {
        return Err(Error::Precondition("the construction is vacuous for n <= 2".into()));
    }
    require_smooth(space)?;
    require_strictly_convex(space)?;
    check_dim(space, t)?;
    if t.is_zero() {
        return Err(Error::Precondition("T = 0".into()));
    }
    if svd_rank(t) >= n - 1 {
        return Err(Error::Precondition("rank T >= n - 1".into()));
    }
    let m = operator_norm(space, t)?;
    let x0 = single_attainment(space, &m)?;
    let tx = t.apply_unchecked(&x0);
    let lambda = dot(&tx, &x0) / dot(&x0, &x0);
    let resid = euclid(&axpy(&tx, -lambda, &x0));
    if lambda.abs() <= RANK_RTOL * m.value || resid > 1e-7 * m.value {
        return Err(Error::Precondition("the attainment point is not an eigenvector with nonzero eigenvalue".into()));
    }
    if !known_left_symmetric(space, &x0)? {
        return Err(Error::Precondition("no left-symmetric attainment point".into()));
    }
    let g = norming_functional(space, &x0)?;
    let kernel = crate::linalg::null_space(t.row_major(), n, RANK_RTOL);
    let gk: Vec<f64> = kernel.iter().map(|k| dot(&g, k)).collect();
    let i = (0..kernel.len()).fold(0, |best, k| if gk[k].abs() > gk[best].abs() { k } else { best });
    let u = if gk[i].abs() <= 1e-14 {
        kernel[i].clone()
    } else {
        let j = if i == 0 { 1 } else { 0 };
        axpy(&scaled(&kernel[j], gk[i]), -gk[j], &kernel[i])
    };
    let u0 = space.normalize(&u)?;
    half_identity_witness(space, &u0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DichotomyBranch {
    /// `I ⊥_B T` and `T ⊥_B I`.
    MutualWithIdentity,
    /// `T ⊥̸_B I`; a witness against right symmetry is attached.
    Witness,
    /// `T ⊥_B I` landed in the indeterminate band.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub x0: Vec<f64>,
    pub u0: Vec<f64>,
    pub identity_orth_t: TriState,
    pub t_orth_identity: TriState,
    pub branch: DichotomyBranch,
    pub witness: Option<OperatorMatrix>,
    /// `A ⊥_B T` for the witness (expected to hold).
    pub witness_forward: Option<TriState>,
    /// `T ⊥_B A` for the witness (expected to fail).
    pub witness_reverse: Option<TriState>,
}

/// For `M_T = {±x₀}` and a left-symmetric unit `u₀ ∈ ker T`: either
/// `I ⊥_B T` and `T ⊥_B I`, or `A = ½I + ½ u₀ ⊗ f_{u₀}` shows that `T` is
/// not right symmetric.
pub fn witness_right_asym_thm27(space: &Space, t: &OperatorMatrix, u0: &[f64]) -> Result<DichotomyReport> {
    require_smooth(space)?;
    require_strictly_convex(space)?;
    check_dim(space, t)?;
    let m = operator_norm(space, t)?;
    let x0 = single_attainment(space, &m)?;
    let u0 = space.normalize(u0)?;
    if space.norm(&t.apply_unchecked(&u0))? > 1e-9 * m.value {
        return Err(Error::Precondition("u0 is not in the kernel of T".into()));
    }
    if !known_left_symmetric(space, &u0)? {
        return Err(Error::Precondition("u0 is not known to be left symmetric".into()));
    }
    let id = OperatorMatrix::identity(space.dim());
    // Every unit vector attains the norm of I; u0 is added to the sampled
    // attainment set because it decides the relation exactly.
    let mut mi = operator_norm(space, &id)?;
    mi.samples.push(u0.clone());
    let identity_orth_t = bj_orthogonal_operators_given(space, &id, &mi, t)?.verdict;
    let t_orth_identity = bj_orthogonal_operators_given(space, t, &m, &id)?.verdict;
    let mut report = DichotomyReport {
        x0,
        u0: u0.clone(),
        identity_orth_t,
        t_orth_identity,
        branch: DichotomyBranch::MutualWithIdentity,
        witness: None,
        witness_forward: None,
        witness_reverse: None,
    };
    if t_orth_identity.is_indeterminate() {
        report.branch = DichotomyBranch::Undecided;
    } else if t_orth_identity.fails() {
        let a = half_identity_witness(space, &u0)?;
        report.witness_forward = Some(bj_orthogonal_operators(space, &a, t)?.verdict);
        report.witness_reverse = Some(bj_orthogonal_operators_given(space, t, &m, &a)?.verdict);
        report.witness = Some(a);
        report.branch = DichotomyBranch::Witness;
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Operator falsifiers

/// Fresh check of an operator counterexample. Left: `T ⊥_B A` holds and
/// `A ⊥_B T` fails. Right: `A ⊥_B T` holds and `T ⊥_B A` fails.
pub fn recheck_operator_counterexample(
    space: &Space,
    t: &OperatorMatrix,
    kind: SymmetryKind,
    a: &OperatorMatrix,
) -> Result<bool> {
    let (first, second) = match kind {
        SymmetryKind::Left => (t, a),
        SymmetryKind::Right => (a, t),
    };
    Ok(bj_orthogonal_operators(space, first, second)?.verdict.holds()
        && bj_orthogonal_operators(space, second, first)?.verdict.fails())
}

struct SearchOutcome {
    found: Option<(usize, OperatorMatrix)>,
    evaluated: usize,
    indeterminate: usize,
}

enum Trial {
    Rejected,
    Indeterminate,
    Clean,
    Hit(OperatorMatrix),
}

/// Run `trials` independent trials in batches and return the lowest-index
/// hit of the first batch that has one.
fn search<F>(trials: usize, trial: F) -> Result<SearchOutcome>
where
    F: Fn(usize) -> Result<Trial> + Sync + Send,
{
    let mut indeterminate = 0;
    let mut start = 0;
    while start < trials {
        let len = BATCH.min(trials - start);
        let results = par::map_range(len, |k| trial(start + k));
        for (k, r) in results.into_iter().enumerate() {
            match r? {
                Trial::Hit(a) => {
                    return Ok(SearchOutcome { found: Some((start + k, a)), evaluated: start + k + 1, indeterminate })
                }
                Trial::Indeterminate => indeterminate += 1,
                Trial::Rejected | Trial::Clean => {}
            }
        }
        start += len;
    }
    Ok(SearchOutcome { found: None, evaluated: trials, indeterminate })
}

/// Conditioned operator for the left falsifier: `Ax = w` with `x ∈ M_T` and
/// `Tx ⊥_B w`, random elsewhere. Then `T ⊥_B A` holds at `x`.
fn conditioned_left_operator(space: &Space, t: &OperatorMatrix, m: &NormAttainment, seed: u64, k: usize) -> OperatorMatrix {
    let n = space.dim();
    let mut rng = trial_rng(seed, k as u64);
    let pick = (rand::Rng::random::<u64>(&mut rng) % m.samples.len() as u64) as usize;
    let x = &m.samples[pick];
    let tx = t.apply_unchecked(x);
    let f = face_functional(space, &tx, &mut rng);
    let s = gaussian_vec(&mut rng, n);
    let w = axpy(&s, -dot(&f, &s) / dot(&f, &tx), &tx);
    let r = gaussian_operator(&mut rng, n);
    let mut h = gaussian_vec(&mut rng, n);
    while dot(&h, x).abs() < 0.1 * euclid(&h) * euclid(x) {
        h = gaussian_vec(&mut rng, n);
    }
    let corr = axpy(&w, -1.0, &r.apply_unchecked(x));
    let fix = OperatorMatrix::rank_one(&corr, &scaled(&h, 1.0 / dot(&h, x))).expect("dimensions agree");
    r.add_scaled_unchecked(1.0, &fix)
}

/// Conditioned sampling alone: random `A` with `T ⊥_B A` built in, then the
/// reverse relation `A ⊥_B T` is tested.
pub fn falsify_left_symmetry_sampled(space: &Space, t: &OperatorMatrix, trials: usize, seed: u64) -> Result<SymmetryVerdict> {
    check_dim(space, t)?;
    if t.is_zero() {
        return Ok(SymmetryVerdict::symmetric(SymmetryKind::Left, 0, 0));
    }
    let m = operator_norm(space, t)?;
    sampled_left(space, t, &m, trials, seed)
}

fn sampled_left(space: &Space, t: &OperatorMatrix, m: &NormAttainment, trials: usize, seed: u64) -> Result<SymmetryVerdict> {
    let out = search(trials, |k| {
        let a = conditioned_left_operator(space, t, m, seed, k);
        if !bj_orthogonal_operators_given(space, t, m, &a)?.verdict.holds() {
            return Ok(Trial::Rejected);
        }
        let rev = bj_orthogonal_operators(space, &a, t)?.verdict;
        Ok(if rev.fails() {
            if recheck_operator_counterexample(space, t, SymmetryKind::Left, &a)? {
                Trial::Hit(a)
            } else {
                Trial::Indeterminate
            }
        } else if rev.is_indeterminate() {
            Trial::Indeterminate
        } else {
            Trial::Clean
        })
    })?;
    Ok(finish(SymmetryKind::Left, out, Strategy::ConditionedSampling))
}

fn finish(kind: SymmetryKind, out: SearchOutcome, strategy: Strategy) -> SymmetryVerdict {
    match out.found {
        Some((_, a)) => SymmetryVerdict::broken(kind, Counterexample::Operator(a), out.evaluated, strategy),
        None => SymmetryVerdict::symmetric(kind, out.evaluated, out.indeterminate),
    }
}

/// Deterministic construction for smooth, strictly convex spaces: find
/// `x ∈ M_T` and `y ⊥_B x` with `Ty ≠ 0`.
fn kernel_rank_one_candidate(space: &Space, t: &OperatorMatrix, m: &NormAttainment) -> Result<Option<OperatorMatrix>> {
    let n = space.dim();
    for x in &m.witnesses {
        let starts: Vec<Vec<f64>> = if n == 2 {
            vec![vec![-x[1], x[0]]]
        } else {
            (0..n).map(|i| crate::linalg::unit_vector(n, i)).collect()
        };
        let best = starts
            .iter()
            .filter_map(|s| right_orthogonal_direction(space, x, s).ok())
            .map(|y| (space.norm_unchecked(&t.apply_unchecked(&y)), y))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((ty, y)) = best {
            if ty > 1e-8 * m.value {
                if let Ok(a) = witness_left_asym_thm25(space, t, x, &y) {
                    return Ok(Some(a));
                }
            }
        }
    }
    Ok(None)
}

/// Deterministic construction for strictly convex spaces: some `Tx₁`,
/// `x₁ ∈ M_T`, is not a left-symmetric point.
fn partner_rank_one_candidate(space: &Space, t: &OperatorMatrix, m: &NormAttainment) -> Result<Option<OperatorMatrix>> {
    let res = space.settings().resolution.min(1024);
    for x1 in &m.witnesses {
        let tx = t.apply_unchecked(x1);
        let v = is_left_symmetric_point(space, &tx, res)?;
        if let Some(Counterexample::Vector(y1)) = v.counterexample {
            let h = norming_hyperplane(space, x1)?;
            if let Ok(a) = witness_left_asym_thm24(space, t, x1, &y1, &h) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

/// Search for `A` with `T ⊥_B A` but `A ⊥̸_B T`.
///
/// Smooth, strictly convex spaces first try two rank-one constructions;
/// otherwise (or if they do not apply) `trials` conditioned random operators
/// are tested. Deterministic per `seed`.
pub fn falsify_left_symmetry(space: &Space, t: &OperatorMatrix, trials: usize, seed: u64) -> Result<SymmetryVerdict> {
    check_dim(space, t)?;
    if t.is_zero() {
        return Ok(SymmetryVerdict::symmetric(SymmetryKind::Left, 0, 0));
    }
    let m = operator_norm(space, t)?;
    if space.is_smooth() && space.is_strictly_convex() {
        let ladder: [(Strategy, CandidateBuilder); 2] = [
            (Strategy::KernelRankOne, kernel_rank_one_candidate),
            (Strategy::PartnerRankOne, partner_rank_one_candidate),
        ];
        for (strategy, build) in ladder {
            if let Some(a) = build(space, t, &m)? {
                if recheck_operator_counterexample(space, t, SymmetryKind::Left, &a)? {
                    return Ok(SymmetryVerdict::broken(SymmetryKind::Left, Counterexample::Operator(a), 0, strategy));
                }
            }
        }
    }
    sampled_left(space, t, &m, trials, seed)
}

/// Conditioned operator for the right falsifier: `A = w ⊗ f` with `f`
/// norming a random unit `v` and `w ⊥_B Tv`, so `v ∈ M_A` and `A ⊥_B T`.
/// Odd trials add a perturbation vanishing at `v`.
fn conditioned_right_operator(space: &Space, t: &OperatorMatrix, seed: u64, k: usize) -> OperatorMatrix {
    let n = space.dim();
    let mut rng = trial_rng(seed, k as u64);
    let v = unit_vec(space, &mut rng);
    let f = face_functional(space, &v, &mut rng);
    let tv = t.apply_unchecked(&v);
    let s = gaussian_vec(&mut rng, n);
    let w = if crate::linalg::is_zero(&tv) {
        s
    } else {
        let g = face_functional(space, &tv, &mut rng);
        axpy(&s, -dot(&g, &s) / dot(&g, &tv), &tv)
    };
    let a = OperatorMatrix::rank_one(&w, &f).expect("dimensions agree");
    if k.is_multiple_of(2) {
        return a;
    }
    let r = gaussian_operator(&mut rng, n);
    let rv = r.apply_unchecked(&v);
    let b = r.add_scaled_unchecked(-1.0, &OperatorMatrix::rank_one(&rv, &f).expect("dimensions agree"));
    let size = b.row_major().iter().map(|c| c * c).sum::<f64>().sqrt();
    if size == 0.0 {
        return a;
    }
    let eps = 0.3 * rand::Rng::random::<f64>(&mut rng) * euclid(&w) / size;
    a.add_scaled_unchecked(eps, &b)
}

fn sampled_right(space: &Space, t: &OperatorMatrix, m: &NormAttainment, trials: usize, seed: u64) -> Result<SymmetryVerdict> {
    let out = search(trials, |k| {
        let a = conditioned_right_operator(space, t, seed, k);
        if a.is_zero() || !bj_orthogonal_operators(space, &a, t)?.verdict.holds() {
            return Ok(Trial::Rejected);
        }
        let rev = bj_orthogonal_operators_given(space, t, m, &a)?.verdict;
        Ok(if rev.fails() {
            if recheck_operator_counterexample(space, t, SymmetryKind::Right, &a)? {
                Trial::Hit(a)
            } else {
                Trial::Indeterminate
            }
        } else if rev.is_indeterminate() {
            Trial::Indeterminate
        } else {
            Trial::Clean
        })
    })?;
    Ok(finish(SymmetryKind::Right, out, Strategy::ConditionedSampling))
}

/// Search for `A` with `A ⊥_B T` but `T ⊥̸_B A`.
///
/// Smooth, strictly convex spaces first try the half-identity constructions
/// built from a kernel vector of `T`; then `trials` conditioned random
/// operators are tested. Deterministic per `seed`.
pub fn falsify_right_symmetry(space: &Space, t: &OperatorMatrix, trials: usize, seed: u64) -> Result<SymmetryVerdict> {
    check_dim(space, t)?;
    if t.is_zero() {
        return Ok(SymmetryVerdict::symmetric(SymmetryKind::Right, 0, 0));
    }
    let m = operator_norm(space, t)?;
    if space.is_smooth() && space.is_strictly_convex() {
        let mut candidates = Vec::new();
        if let Ok(a) = witness_right_asym_thm26(space, t) {
            candidates.push(a);
        }
        if single_attainment(space, &m).is_ok() {
            for k in crate::linalg::null_space(t.row_major(), t.dim(), RANK_RTOL) {
                if let Ok(rep) = witness_right_asym_thm27(space, t, &k) {
                    candidates.extend(rep.witness);
                }
            }
        }
        for a in candidates {
            if recheck_operator_counterexample(space, t, SymmetryKind::Right, &a)? {
                return Ok(SymmetryVerdict::broken(SymmetryKind::Right, Counterexample::Operator(a), 0, Strategy::HalfIdentity));
            }
        }
    }
    sampled_right(space, t, &m, trials, seed)
}

//! Multiscale estimation of the four tangent cones at a base point.
//!
//! For a sampled set F, base point x, unit direction v and scale ladder
//! λ_0 > λ_1 > ... > λ_{K−1}, the per-direction scores are
//!
//!   upper tangent      s⁺(v)  = min_k  dist(x + λ_k v, F) / λ_k
//!   lower tangent      s⁻(v)  = max_k  dist(x + λ_k v, F) / λ_k
//!   upper paratangent  ps⁺(v) = min_k  min_{y ∈ Y_k}  dist(y + λ_k v, F) / λ_k
//!   lower paratangent  ps⁻(v) = max_k  max_{y ∈ Y_k}  dist(y + λ_k v, F) / λ_k
//!
//! where Y_k = {x} ∪ {samples within ρ_k of x}. Including x itself in Y_k
//! makes the chain ps⁻(v) ≥ s⁻(v) ≥ s⁺(v) ≥ ps⁺(v) hold exactly in floating
//! point, so the estimated member sets always satisfy the inclusion chain
//! lower paratangent ⊂ lower tangent ⊂ upper tangent ⊂ upper paratangent.
//!
//! A direction is a member of the estimated cone when its score is at most
//! the threshold τ. Scores are always retained so reports can be
//! re-thresholded without re-scoring.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConelabError, Result};
use crate::setmodel::SampledSet;

/// Scale floor constant: the smallest ladder scale must satisfy
/// λ_min ≥ C_FLOOR·δ so the resolution error δ/λ stays at most 1/C_FLOOR.
pub const C_FLOOR: f64 = 8.0;

/// Default membership threshold.
pub const DEFAULT_TAU: f64 = 0.15;

/// Default ladder ratio.
pub const DEFAULT_RATIO: f64 = 0.5;

/// Default ladder length.
pub const DEFAULT_COUNT: usize = 10;

/// Constant in the discretization error budget 2·θ_mesh + C·δ/λ_min used by
/// approximate properties (e.g. bilaterality of the upper paratangent cone).
pub const ERROR_BUDGET_C: f64 = 4.0;

/// Geometric scale ladder λ_k = λ_0·r^k, k = 0..K−1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleLadder {
    pub lambda0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl ScaleLadder {
    pub fn new(lambda0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(lambda0 > 0.0) {
            return Err(ConelabError::Config(format!("lambda0 must be > 0, got {lambda0}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(ConelabError::Config(format!("ratio must be in (0,1), got {ratio}")));
        }
        if count < 2 {
            return Err(ConelabError::Config(format!("count must be >= 2, got {count}")));
        }
        Ok(Self {
            lambda0,
            ratio,
            count,
        })
    }

    /// Default ladder for a set: λ_0 = 0.1·(region radius), r = 1/2, K = 10.
    pub fn default_for(set: &SampledSet) -> Result<Self> {
        Self::new(0.1 * set.region().radius, DEFAULT_RATIO, DEFAULT_COUNT)
    }

    pub fn scales(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.lambda0 * self.ratio.powi(k as i32))
            .collect()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda0 * self.ratio.powi(self.count as i32 - 1)
    }

    /// Floor gate: λ_min ≥ C_FLOOR·δ.
    pub fn validate_against(&self, delta: f64) -> Result<()> {
        let bound = C_FLOOR * delta;
        if self.lambda_min() < bound {
            return Err(ConelabError::ScaleFloor {
                lambda_min: self.lambda_min(),
                bound,
            });
        }
        Ok(())
    }
}

/// The four cone kinds, ordered by estimator score (largest first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeKind {
    LowerParatangent,
    LowerTangent,
    UpperTangent,
    UpperParatangent,
}

impl ConeKind {
    pub const ALL: [ConeKind; 4] = [
        ConeKind::LowerParatangent,
        ConeKind::LowerTangent,
        ConeKind::UpperTangent,
        ConeKind::UpperParatangent,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ConeKind::LowerParatangent => "lower-paratangent",
            ConeKind::LowerTangent => "lower-tangent",
            ConeKind::UpperTangent => "upper-tangent",
            ConeKind::UpperParatangent => "upper-paratangent",
        }
    }
}

/// Direction-grid construction scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    Signs1d,
    Angular2d,
    Fibonacci3d,
    RandomQuasiUniformNd,
    /// Directions taken from normalized sample secants (data-driven grids
    /// for high-dimensional thin cones, e.g. matrix groups in R^{n²}).
    Secants,
}

/// A set of unit directions with a bound θ_mesh on the angular gap to the
/// nearest grid direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionGrid {
    pub dirs: Vec<Vec<f64>>,
    pub scheme: GridScheme,
    pub theta_mesh: f64,
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

impl DirectionGrid {
    /// {+1, −1} on the line.
    pub fn signs_1d() -> Self {
        Self {
            dirs: vec![vec![1.0], vec![-1.0]],
            scheme: GridScheme::Signs1d,
            theta_mesh: 0.0,
        }
    }

    /// `count` equally spaced directions on the unit circle; even counts
    /// contain every ±v pair. Default count 720 (θ_mesh = 0.25°... the gap
    /// to the nearest direction is π/count).
    pub fn angular_2d(count: usize) -> Self {
        let dirs = (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        Self {
            dirs,
            scheme: GridScheme::Angular2d,
            theta_mesh: std::f64::consts::PI / count as f64,
        }
    }

    /// Spherical Fibonacci directions in R³. Default count 2000.
    pub fn fibonacci_3d(count: usize) -> Self {
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let dirs = (0..count)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                let phi = 2.0 * std::f64::consts::PI * (k as f64 / golden).fract();
                let s = (1.0 - z * z).max(0.0).sqrt();
                vec![s * phi.cos(), s * phi.sin(), z]
            })
            .collect();
        // Lattice coverage radius stays below the mean spacing sqrt(4π/n).
        let theta_mesh = (4.0 * std::f64::consts::PI / count as f64).sqrt();
        Self {
            dirs,
            scheme: GridScheme::Fibonacci3d,
            theta_mesh,
        }
    }

    /// Seeded quasi-uniform directions in Rⁿ (n ≥ 4), as ±v pairs.
    /// Default count 50·n².
    pub fn quasi_uniform(n: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dirs = Vec::with_capacity(count);
        while dirs.len() + 1 < count + 1 {
            // Standard normal via Box-Muller; isotropic after normalization.
            let mut v = vec![0.0; n];
            for pair in v.chunks_mut(2) {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen::<f64>();
                let r = (-2.0 * u1.ln()).sqrt();
                let a = 2.0 * std::f64::consts::PI * u2;
                pair[0] = r * a.cos();
                if pair.len() > 1 {
                    pair[1] = r * a.sin();
                }
            }
            if normalize(&mut v) <= 0.0 {
                continue;
            }
            let neg = v.iter().map(|x| -x).collect();
            dirs.push(v);
            dirs.push(neg);
            if dirs.len() >= count {
                break;
            }
        }
        // Coverage heuristic for random unit directions in Rⁿ.
        let theta_mesh = 2.0 * (count as f64).powf(-1.0 / (n as f64 - 1.0)) * 2.0;
        Self {
            dirs,
            scheme: GridScheme::RandomQuasiUniformNd,
            theta_mesh,
        }
    }

    /// Directions from normalized secants p − base for samples p within
    /// `radius` of `base`, deduplicated at angular resolution `dedup_angle`.
    pub fn from_secants(set: &SampledSet, base: &[f64], radius: f64, dedup_angle: f64) -> Self {
        let ids = set.neighbors_within(base, radius);
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        let cos_tol = dedup_angle.cos();
        for i in ids {
            let p = set.point(i);
            let mut v: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
            if normalize(&mut v) <= 1e-14 {
                continue;
            }
            let dup = dirs.iter().any(|d| {
                let dot: f64 = d.iter().zip(&v).map(|(a, b)| a * b).sum();
                dot >= cos_tol
            });
            if !dup {
                dirs.push(v);
            }
        }
        Self {
            dirs,
            scheme: GridScheme::Secants,
            theta_mesh: dedup_angle,
        }
    }

    /// Explicit directions (normalized on construction).
    pub fn from_directions(mut dirs: Vec<Vec<f64>>, theta_mesh: f64) -> Self {
        for v in &mut dirs {
            normalize(v);
        }
        Self {
            dirs,
            scheme: GridScheme::RandomQuasiUniformNd,
            theta_mesh,
        }
    }

    /// Default grid for an ambient dimension.
    pub fn default_for_dim(n: usize, seed: u64) -> Self {
        match n {
            1 => Self::signs_1d(),
            2 => Self::angular_2d(720),
            3 => Self::fibonacci_3d(2000),
            _ => Self::quasi_uniform(n, 50 * n * n, seed),
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// Paratangent base-point parameters: radii ρ_k = ρ_0·sqrt(λ_k/λ_0) with
/// ρ_0 ≥ λ_0 (default ρ_0 = λ_0, giving ρ_k = sqrt(λ_0·λ_k)), and an optional
/// deterministic cap on the number of moving base points per scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParaParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(default = "default_cap")]
    pub max_base_points: usize,
}

fn default_cap() -> usize {
    usize::MAX
}

impl Default for ParaParams {
    fn default() -> Self {
        Self {
            rho0: None,
            max_base_points: usize::MAX,
        }
    }
}

impl ParaParams {
    fn rho0_for(&self, ladder: &ScaleLadder) -> Result<f64> {
        let rho0 = self.rho0.unwrap_or(ladder.lambda0);
        if rho0 < ladder.lambda0 {
            return Err(ConelabError::Config(format!(
                "rho0 {rho0} below lambda0 {}; base radii must dominate the scales",
                ladder.lambda0
            )));
        }
        Ok(rho0)
    }

    /// ρ_k for every ladder scale.
    pub fn radii(&self, ladder: &ScaleLadder) -> Result<Vec<f64>> {
        let rho0 = self.rho0_for(ladder)?;
        Ok(ladder
            .scales()
            .iter()
            .map(|l| rho0 * (l / ladder.lambda0).sqrt())
            .collect())
    }
}

/// Scored direction set approximating one cone at a base point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeEstimate {
    pub schema_version: u32,
    pub base_point: Vec<f64>,
    pub kind: ConeKind,
    pub tau: f64,
    pub ladder: ScaleLadder,
    pub directions: Vec<DirectionScore>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionScore {
    pub v: Vec<f64>,
    pub score: f64,
}

impl ConeEstimate {
    pub fn is_member(&self, i: usize) -> bool {
        self.directions[i].score <= self.tau
    }

    pub fn member_indices(&self) -> Vec<usize> {
        (0..self.directions.len())
            .filter(|&i| self.is_member(i))
            .collect()
    }

    pub fn members(&self) -> Vec<&[f64]> {
        self.member_indices()
            .into_iter()
            .map(|i| self.directions[i].v.as_slice())
            .collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.directions.iter().map(|d| d.score).collect()
    }
}

fn check_point(set: &SampledSet, x: &[f64]) -> Result<()> {
    if x.len() != set.ambient_dim() {
        return Err(ConelabError::DimensionMismatch(set.ambient_dim(), x.len()));
    }
    Ok(())
}

fn query_scaled(set: &SampledSet, y: &[f64], v: &[f64], lambda: f64, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(y.iter().zip(v).map(|(a, b)| a + lambda * b));
    set.dist_query(buf) / lambda
}

/// Upper tangent score: min over scales of dist(x + λv, F)/λ.
pub fn score_upper_tangent(
    set: &SampledSet,
    x: &[f64],
    v: &[f64],
    ladder: &ScaleLadder,
) -> Result<f64> {
    check_point(set, x)?;
    ladder.validate_against(set.delta())?;
    let mut buf = Vec::new();
    Ok(ladder
        .scales()
        .iter()
        .map(|&l| query_scaled(set, x, v, l, &mut buf))
        .fold(f64::INFINITY, f64::min))
}

/// Lower tangent score: max over scales of dist(x + λv, F)/λ.
pub fn score_lower_tangent(
    set: &SampledSet,
    x: &[f64],
    v: &[f64],
    ladder: &ScaleLadder,
) -> Result<f64> {
    check_point(set, x)?;
    ladder.validate_against(set.delta())?;
    let mut buf = Vec::new();
    Ok(ladder
        .scales()
        .iter()
        .map(|&l| query_scaled(set, x, v, l, &mut buf))
        .fold(0.0, f64::max))
}

/// Deterministic cap: keep at most `cap` indices, evenly strided, ends kept.
fn subsample(ids: &[usize], cap: usize) -> Vec<usize> {
    if ids.len() <= cap || cap == 0 {
        return ids.to_vec();
    }
    let n = ids.len();
    (0..cap)
        .map(|i| ids[i * (n - 1) / (cap - 1).max(1)])
        .collect()
}

/// Moving base points per scale: the center x plus capped neighbors in ρ_k.
fn base_points_per_scale(
    set: &SampledSet,
    x: &[f64],
    ladder: &ScaleLadder,
    para: &ParaParams,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let radii = para.radii(ladder)?;
    let mut out = Vec::with_capacity(radii.len());
    for rho in radii {
        let ids = set.neighbors_within(x, rho);
        let ids = subsample(&ids, para.max_base_points);
        let mut ys: Vec<Vec<f64>> = Vec::with_capacity(ids.len() + 1);
        ys.push(x.to_vec());
        ys.extend(ids.into_iter().map(|i| set.point(i).to_vec()));
        out.push(ys);
    }
    Ok(out)
}

/// Upper paratangent score: min over scales and moving base points.
pub fn score_upper_paratangent(
    set: &SampledSet,
    x: &[f64],
    v: &[f64],
    ladder: &ScaleLadder,
    para: &ParaParams,
) -> Result<f64> {
    check_point(set, x)?;
    ladder.validate_against(set.delta())?;
    let bases = base_points_per_scale(set, x, ladder, para)?;
    let mut buf = Vec::new();
    let mut best = f64::INFINITY;
    for (l, ys) in ladder.scales().iter().zip(&bases) {
        for y in ys {
            best = best.min(query_scaled(set, y, v, *l, &mut buf));
        }
    }
    Ok(best)
}

/// Lower paratangent score: max over scales and moving base points.
pub fn score_lower_paratangent(
    set: &SampledSet,
    x: &[f64],
    v: &[f64],
    ladder: &ScaleLadder,
    para: &ParaParams,
) -> Result<f64> {
    check_point(set, x)?;
    ladder.validate_against(set.delta())?;
    let bases = base_points_per_scale(set, x, ladder, para)?;
    let mut buf = Vec::new();
    let mut worst: f64 = 0.0;
    for (l, ys) in ladder.scales().iter().zip(&bases) {
        for y in ys {
            worst = worst.max(query_scaled(set, y, v, *l, &mut buf));
        }
    }
    Ok(worst)
}

/// Estimate one cone over a direction grid.
pub fn estimate_cone(
    set: &SampledSet,
    x: &[f64],
    kind: ConeKind,
    ladder: &ScaleLadder,
    grid: &DirectionGrid,
    tau: f64,
    para: &ParaParams,
) -> Result<ConeEstimate> {
    Ok(estimate_cones(set, x, &[kind], ladder, grid, tau, para)?
        .pop()
        .expect("one kind requested"))
}

/// Estimate several cones at once, sharing neighbor lookups across kinds and
/// directions. Returns estimates in the order of `kinds`.
pub fn estimate_cones(
    set: &SampledSet,
    x: &[f64],
    kinds: &[ConeKind],
    ladder: &ScaleLadder,
    grid: &DirectionGrid,
    tau: f64,
    para: &ParaParams,
) -> Result<Vec<ConeEstimate>> {
    check_point(set, x)?;
    ladder.validate_against(set.delta())?;
    let needs_para = kinds
        .iter()
        .any(|k| matches!(k, ConeKind::LowerParatangent | ConeKind::UpperParatangent));
    let bases = if needs_para {
        Some(base_points_per_scale(set, x, ladder, para)?)
    } else {
        None
    };
    let scales = ladder.scales();
    let mut buf = Vec::new();
    // Per direction: (min_k, max_k over center; min, max over all (k, y)).
    let mut per_dir: Vec<[f64; 4]> = Vec::with_capacity(grid.len());
    for v in &grid.dirs {
        let mut center_min = f64::INFINITY;
        let mut center_max: f64 = 0.0;
        let mut para_min = f64::INFINITY;
        let mut para_max: f64 = 0.0;
        for (ki, &l) in scales.iter().enumerate() {
            let d_center = query_scaled(set, x, v, l, &mut buf);
            center_min = center_min.min(d_center);
            center_max = center_max.max(d_center);
            if let Some(bases) = &bases {
                // ys[0] == x; reuse the center value for exact chain ordering.
                para_min = para_min.min(d_center);
                para_max = para_max.max(d_center);
                for y in &bases[ki][1..] {
                    let d = query_scaled(set, y, v, l, &mut buf);
                    para_min = para_min.min(d);
                    para_max = para_max.max(d);
                }
            }
        }
        per_dir.push([para_max, center_max, center_min, para_min]);
    }
    let mut out = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let slot = match kind {
            ConeKind::LowerParatangent => 0,
            ConeKind::LowerTangent => 1,
            ConeKind::UpperTangent => 2,
            ConeKind::UpperParatangent => 3,
        };
        out.push(ConeEstimate {
            schema_version: 1,
            base_point: x.to_vec(),
            kind: *kind,
            tau,
            ladder: ladder.clone(),
            directions: grid
                .dirs
                .iter()
                .zip(&per_dir)
                .map(|(v, s)| DirectionScore {
                    v: v.clone(),
                    score: s[slot],
                })
                .collect(),
        });
    }
    Ok(out)
}

/// Integer-scale lower tangent cone: score(v) = max over m in [m_lo, m_max]
/// of m·dist(x + v/m, F). Agrees with the geometric-ladder lower cone in the
/// limit; the window is the documented finite proxy.
pub fn integer_scale_lower_cone(
    set: &SampledSet,
    x: &[f64],
    m_lo: usize,
    m_max: usize,
    grid: &DirectionGrid,
    tau: f64,
) -> Result<ConeEstimate> {
    check_point(set, x)?;
    if m_max < 2 || m_lo < 1 || m_lo > m_max {
        return Err(ConelabError::Config(format!(
            "invalid integer window [{m_lo}, {m_max}]"
        )));
    }
    let lambda_min = 1.0 / m_max as f64;
    if lambda_min < C_FLOOR * set.delta() {
        return Err(ConelabError::ScaleFloor {
            lambda_min,
            bound: C_FLOOR * set.delta(),
        });
    }
    let mut buf = Vec::new();
    let directions = grid
        .dirs
        .iter()
        .map(|v| {
            let mut worst: f64 = 0.0;
            for m in m_lo..=m_max {
                let l = 1.0 / m as f64;
                worst = worst.max(query_scaled(set, x, v, l, &mut buf));
            }
            DirectionScore {
                v: v.clone(),
                score: worst,
            }
        })
        .collect();
    Ok(ConeEstimate {
        schema_version: 1,
        base_point: x.to_vec(),
        kind: ConeKind::LowerTangent,
        tau,
        ladder: ScaleLadder {
            lambda0: 1.0 / m_lo as f64,
            ratio: m_lo as f64 / (m_lo as f64 + 1.0),
            count: m_max - m_lo + 1,
        },
        directions,
    })
}

/// Number of trailing term ratios inspected by [`ratio_test_1d`].
pub const RATIO_WINDOW: usize = 10;

/// Tolerance on |x_{m+1}/x_m − 1| over the inspected window.
pub const RATIO_TOL: f64 = 0.02;

/// Tail-ratio criterion for membership of +1 in the lower tangent cone of a
/// 1-D sequence set {0} ∪ {x_m} at 0: true iff the trailing ratios
/// x_{m+1}/x_m lie within [`RATIO_TOL`] of 1.
pub fn ratio_test_1d(terms: &[f64]) -> Result<bool> {
    if terms.len() < 4 {
        return Err(ConelabError::InsufficientData(format!(
            "ratio test needs at least 4 terms, got {}",
            terms.len()
        )));
    }
    for w in terms.windows(2) {
        if !(w[1] > 0.0 && w[1] < w[0]) {
            return Err(ConelabError::Config(
                "terms must be strictly decreasing and positive".into(),
            ));
        }
    }
    let start = terms.len().saturating_sub(RATIO_WINDOW + 1);
    Ok(terms[start..]
        .windows(2)
        .all(|w| (w[1] / w[0] - 1.0).abs() <= RATIO_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setmodel::{build_example, ExampleParams, SequenceRule};

    fn defaults() -> (ScaleLadder, ParaParams) {
        (
            ScaleLadder::new(0.1, DEFAULT_RATIO, DEFAULT_COUNT).unwrap(),
            ParaParams::default(),
        )
    }

    #[test]
    fn half_line_upper_tangent_directions() {
        let set = build_example("half-line", &ExampleParams::default()).unwrap();
        let (ladder, _) = defaults();
        let plus = score_upper_tangent(&set, &[0.0], &[1.0], &ladder).unwrap();
        let minus = score_upper_tangent(&set, &[0.0], &[-1.0], &ladder).unwrap();
        assert!(plus < 0.01, "forward score {plus}");
        assert!((minus - 1.0).abs() < 0.01, "backward score {minus}");
    }

    #[test]
    fn half_line_lower_cone_contains_forward() {
        let set = build_example("half-line", &ExampleParams::default()).unwrap();
        let (ladder, _) = defaults();
        let plus = score_lower_tangent(&set, &[0.0], &[1.0], &ladder).unwrap();
        // Bounded by the resolution error delta/lambda_min, not by zero.
        assert!(plus <= set.delta() / ladder.lambda_min(), "forward score {plus}");
        assert!(plus <= DEFAULT_TAU);
    }

    #[test]
    fn factorial_sequence_cone_profile() {
        let set = build_example("factorial-sequence", &ExampleParams::default()).unwrap();
        let (ladder, para) = defaults();
        let up = score_upper_tangent(&set, &[0.0], &[1.0], &ladder).unwrap();
        let low = score_lower_tangent(&set, &[0.0], &[1.0], &ladder).unwrap();
        assert!(up <= DEFAULT_TAU, "upper tangent forward {up}");
        assert!(low > DEFAULT_TAU, "lower tangent forward {low}");
        let pu_minus = score_upper_paratangent(&set, &[0.0], &[-1.0], &ladder, &para).unwrap();
        assert!(pu_minus <= DEFAULT_TAU, "upper paratangent backward {pu_minus}");
    }

    #[test]
    fn harmonic_sequence_lower_vs_clarke() {
        let set = build_example("harmonic-sequence", &ExampleParams::default()).unwrap();
        let (ladder, para) = defaults();
        let low = score_lower_tangent(&set, &[0.0], &[1.0], &ladder).unwrap();
        assert!(low <= DEFAULT_TAU, "lower tangent forward {low}");
        let clarke = score_lower_paratangent(&set, &[0.0], &[1.0], &ladder, &para).unwrap();
        assert!(clarke > DEFAULT_TAU, "lower paratangent forward {clarke}");
    }

    #[test]
    fn singleton_has_trivial_cones() {
        let set = build_example("singleton", &ExampleParams::default()).unwrap();
        let (ladder, para) = defaults();
        for v in [[1.0], [-1.0]] {
            let s = score_upper_paratangent(&set, &[0.0], &v, &ladder, &para).unwrap();
            assert!((s - 1.0).abs() < 1e-9, "score {s}");
        }
    }

    #[test]
    fn chain_order_exact_on_catalog_sets() {
        let (ladder, para) = defaults();
        for name in ["factorial-sequence", "harmonic-sequence", "half-line"] {
            let set = build_example(name, &ExampleParams::default()).unwrap();
            let grid = DirectionGrid::signs_1d();
            let est = estimate_cones(
                &set,
                &[0.0],
                &ConeKind::ALL,
                &ladder,
                &grid,
                DEFAULT_TAU,
                &para,
            )
            .unwrap();
            for i in 0..grid.len() {
                let s: Vec<f64> = est.iter().map(|e| e.directions[i].score).collect();
                assert!(s[0] >= s[1] && s[1] >= s[2] && s[2] >= s[3], "{name}: {s:?}");
            }
        }
    }

    #[test]
    fn scale_invariance_of_scores() {
        // Rescale the half-line set, the base point and the ladder jointly.
        let base = build_example("half-line", &ExampleParams::default()).unwrap();
        let factor = 7.5;
        let scaled_pts: Vec<Vec<f64>> = (0..base.len())
            .map(|i| base.point(i).iter().map(|c| c * factor).collect())
            .collect();
        let scaled = crate::setmodel::SampledSet::from_points(
            &scaled_pts,
            base.delta() * factor,
            crate::setmodel::Region::centered_at_origin(1, factor),
        )
        .unwrap();
        let l1 = ScaleLadder::new(0.05, 0.5, 5).unwrap();
        let l2 = ScaleLadder::new(0.05 * factor, 0.5, 5).unwrap();
        for v in [[1.0], [-1.0]] {
            let a = score_lower_tangent(&base, &[0.0], &v, &l1).unwrap();
            let b = score_lower_tangent(&scaled, &[0.0], &v, &l2).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn ladder_floor_gate_rejects_coarse_sets() {
        let set = build_example(
            "half-line",
            &ExampleParams {
                delta: Some(0.01),
                ..Default::default()
            },
        )
        .unwrap();
        let ladder = ScaleLadder::new(0.1, 0.5, 10).unwrap();
        assert!(matches!(
            score_upper_tangent(&set, &[0.0], &[1.0], &ladder),
            Err(ConelabError::ScaleFloor { .. })
        ));
    }

    #[test]
    fn ratio_test_classifies_named_sequences() {
        let cases = [
            (SequenceRule::Harmonic { c: 1.0 }, true),
            (SequenceRule::FactorialReciprocal, false),
            (SequenceRule::Geometric { r: 0.5 }, false),
            (SequenceRule::HarmonicLog { p: 1.0 }, true),
        ];
        for (rule, expected) in cases {
            let m_max = if rule == SequenceRule::FactorialReciprocal {
                40
            } else {
                2000
            };
            let terms = rule.terms(1, m_max);
            assert_eq!(ratio_test_1d(&terms).unwrap(), expected, "{rule:?}");
        }
    }

    #[test]
    fn ratio_test_rejects_short_input() {
        assert!(matches!(
            ratio_test_1d(&[1.0, 0.5, 0.25]),
            Err(ConelabError::InsufficientData(_))
        ));
    }

    #[test]
    fn integer_scale_half_line_and_factorial() {
        let grid = DirectionGrid::signs_1d();
        let half = build_example("half-line", &ExampleParams::default()).unwrap();
        let est = integer_scale_lower_cone(&half, &[0.0], 10, 1000, &grid, DEFAULT_TAU).unwrap();
        assert!(est.is_member(0), "forward score {}", est.directions[0].score);
        assert!(!est.is_member(1));

        let fact = build_example("factorial-sequence", &ExampleParams::default()).unwrap();
        let est = integer_scale_lower_cone(&fact, &[0.0], 10, 1000, &grid, DEFAULT_TAU).unwrap();
        assert!(!est.is_member(0), "forward score {}", est.directions[0].score);
    }

    #[test]
    fn grids_are_unit_norm_with_sign_pairs() {
        let g2 = DirectionGrid::angular_2d(720);
        let g3 = DirectionGrid::fibonacci_3d(500);
        let g4 = DirectionGrid::quasi_uniform(4, 64, 7);
        for g in [&g2, &g3, &g4] {
            for v in &g.dirs {
                let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
        // angular-2d and quasi-uniform contain -v for every v.
        for g in [&g2, &g4] {
            for v in &g.dirs {
                let neg: Vec<f64> = v.iter().map(|x| -x).collect();
                let found = g
                    .dirs
                    .iter()
                    .any(|w| w.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-9));
                assert!(found);
            }
        }
    }

    #[test]
    fn estimate_cone_threshold_consistency() {
        let set = build_example("harmonic-sequence", &ExampleParams::default()).unwrap();
        let (ladder, para) = defaults();
        let est = estimate_cone(
            &set,
            &[0.0],
            ConeKind::UpperTangent,
            &ladder,
            &DirectionGrid::signs_1d(),
            DEFAULT_TAU,
            &para,
        )
        .unwrap();
        for (i, d) in est.directions.iter().enumerate() {
            assert_eq!(est.is_member(i), d.score <= est.tau);
        }
        assert_eq!(est.member_indices(), vec![0]);
    }

    #[test]
    fn accumulation_test_nonzero_members_iff_not_isolated() {
        let (ladder, para) = defaults();
        let grid = DirectionGrid::signs_1d();
        // Non-isolated base point: harmonic sequence at 0.
        let harmonic = build_example("harmonic-sequence", &ExampleParams::default()).unwrap();
        let est = estimate_cone(
            &harmonic,
            &[0.0],
            ConeKind::UpperTangent,
            &ladder,
            &grid,
            DEFAULT_TAU,
            &para,
        )
        .unwrap();
        assert!(!est.member_indices().is_empty());
        // Isolated base point: the singleton.
        let single = build_example("singleton", &ExampleParams::default()).unwrap();
        let est = estimate_cone(
            &single,
            &[0.0],
            ConeKind::UpperTangent,
            &ladder,
            &grid,
            DEFAULT_TAU,
            &para,
        )
        .unwrap();
        assert!(est.member_indices().is_empty());
    }
}

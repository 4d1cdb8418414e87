//! Point-level regularity tests built on the four cone estimates, each
//! returning a tri-state verdict with a numeric margin.
//!
//! Every test reduces to a scalar margin with the convention
//!
//!   margin ≤ 0                      → pass
//!   0 < margin ≤ error budget       → inconclusive
//!   margin > error budget           → fail
//!
//! where the error budget 2·θ_mesh + C·δ/λ_min accounts for the direction
//! grid mesh and the sampling resolution at the finest scale. A defect that
//! only slightly exceeds its tolerance cannot be distinguished from
//! discretization noise, so it is reported as inconclusive rather than fail.

use std::collections::BTreeSet;
use std::io::Write as IoWrite;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cones::{
    estimate_cones, ConeEstimate, ConeKind, DirectionGrid, ParaParams, ScaleLadder,
    DEFAULT_TAU, ERROR_BUDGET_C,
};
use crate::error::{ConelabError, Result};
use crate::exterior::{dist_to_subspace, subspace_angle, Subspace};
use crate::setmodel::SampledSet;
use crate::subspaces::{is_vector_space, linear_hull, DEFAULT_SIGMA_TOL};

/// Angular slack added to 2·θ_mesh in the default coincidence-defect
/// tolerance.
pub const DEFECT_SLACK: f64 = 0.05;

/// Tri-state verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Conjunction: fail dominates, then inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Margin-to-verdict map; see the module docs for the convention.
pub fn tri_state(margin: f64, budget: f64) -> Verdict {
    if margin <= 0.0 {
        Verdict::Pass
    } else if margin <= budget {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Shared configuration for all classifiers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub ladder: ScaleLadder,
    pub grid: DirectionGrid,
    pub tau: f64,
    pub para: ParaParams,
    pub sigma_tol: f64,
    /// Extra score slack on top of τ in the vector-space check.
    pub vs_tol: f64,
    /// Angular slack for "direction lies in the hull" membership.
    pub hull_angle_tol: f64,
    pub probe_radius: f64,
    /// Minimum allowed projection contraction ratio in the Valiron test.
    pub injectivity_tol: f64,
    /// Cap on samples drawn from probe balls for pairwise tests.
    pub pair_sample_cap: usize,
    /// Cap on moving hull centers in the angle-condition scores.
    pub moving_center_cap: usize,
    /// Override for the coincidence-defect tolerance (default 2θ_mesh + 0.05).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect_tol_override: Option<f64>,
}

impl ClassifierParams {
    pub fn defaults_for(set: &SampledSet, seed: u64) -> Result<Self> {
        Ok(Self {
            ladder: ScaleLadder::default_for(set)?,
            grid: DirectionGrid::default_for_dim(set.ambient_dim(), seed),
            tau: DEFAULT_TAU,
            para: ParaParams::default(),
            sigma_tol: DEFAULT_SIGMA_TOL,
            vs_tol: 0.1,
            hull_angle_tol: 0.02,
            probe_radius: 0.05 * set.region().radius,
            injectivity_tol: 0.1,
            pair_sample_cap: 60,
            moving_center_cap: 8,
            defect_tol_override: None,
        })
    }

    pub fn defect_tol(&self) -> f64 {
        self.defect_tol_override
            .unwrap_or(2.0 * self.grid.theta_mesh + DEFECT_SLACK)
    }

    /// Discretization error budget for tri-state verdicts.
    pub fn error_budget(&self, delta: f64) -> f64 {
        2.0 * self.grid.theta_mesh + ERROR_BUDGET_C * delta / self.ladder.lambda_min()
    }

    pub fn validate(&self, set: &SampledSet) -> Result<()> {
        self.ladder.validate_against(set.delta())
    }
}

/// Per-point outcome of a classifier run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointOutcome {
    pub point: Vec<f64>,
    /// Linear-hull dimensions of the four cones, in chain order
    /// (lower paratangent, lower tangent, upper tangent, upper paratangent).
    pub cone_dims: [usize; 4],
    pub coincidence_defect: f64,
    pub hull_angle: f64,
    pub vector_space_margin: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub theorem: String,
    pub defect_tol: f64,
    pub error_budget: f64,
    pub points: Vec<PointOutcome>,
    pub verdict: Verdict,
}

impl ClassificationReport {
    fn assemble(
        theorem: &str,
        defect_tol: f64,
        error_budget: f64,
        points: Vec<PointOutcome>,
    ) -> Self {
        let verdict = points
            .iter()
            .map(|p| p.verdict)
            .fold(Verdict::Pass, Verdict::and);
        Self {
            schema_version: 1,
            theorem: theorem.to_string(),
            defect_tol,
            error_budget,
            points,
            verdict,
        }
    }

    /// Flat CSV: one row per point with verdict and margin.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "point,test,verdict,margin")?;
        for p in &self.points {
            let coords = p
                .point
                .iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(
                w,
                "{coords},{},{},{}",
                self.theorem,
                p.verdict.label(),
                p.margin
            )?;
        }
        Ok(())
    }
}

fn check_on_set(set: &SampledSet, x: &[f64]) -> Result<()> {
    let dist = set.dist_query(x);
    if dist > set.delta() * (1.0 + 1e-9) {
        return Err(ConelabError::PointNotOnSet {
            dist,
            delta: set.delta(),
        });
    }
    Ok(())
}

fn angle_between(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    dot.clamp(-1.0, 1.0).acos()
}

/// Directed coincidence defect between two direction sets: max over members
/// of the larger cone of the angle to the nearest member of the smaller.
/// An empty smaller cone against a nonempty larger one counts as π/2; two
/// empty cones coincide.
pub fn coincidence_defect(larger: &ConeEstimate, smaller: &ConeEstimate) -> f64 {
    let big = larger.members();
    let small = smaller.members();
    if big.is_empty() {
        return 0.0;
    }
    if small.is_empty() {
        return std::f64::consts::FRAC_PI_2;
    }
    big.iter()
        .map(|v| {
            small
                .iter()
                .map(|w| angle_between(v, w))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// All four cones at a point, in chain order.
pub fn cones_at(
    set: &SampledSet,
    x: &[f64],
    params: &ClassifierParams,
) -> Result<Vec<ConeEstimate>> {
    estimate_cones(
        set,
        x,
        &ConeKind::ALL,
        &params.ladder,
        &params.grid,
        params.tau,
        &params.para,
    )
}

fn hull_dims(cones: &[ConeEstimate], sigma_tol: f64) -> [usize; 4] {
    let mut dims = [0usize; 4];
    for (i, c) in cones.iter().enumerate() {
        dims[i] = linear_hull(c, sigma_tol).dim();
    }
    dims
}

/// Max angle from the members of a cone estimate to a subspace (π/2 against
/// the zero subspace when members exist).
fn members_to_subspace_angle(cone: &ConeEstimate, sub: &Subspace) -> Result<f64> {
    let members = cone.members();
    if members.is_empty() {
        return Ok(0.0);
    }
    if sub.dim() == 0 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let mut worst: f64 = 0.0;
    for v in members {
        let d = dist_to_subspace(&DVector::from_column_slice(v), sub)?;
        worst = worst.max(d.clamp(-1.0, 1.0).asin());
    }
    Ok(worst)
}

/// Coincidence of the lower and upper paratangent cones at every test point.
pub fn four_cones_classify(
    set: &SampledSet,
    test_points: &[Vec<f64>],
    params: &ClassifierParams,
) -> Result<ClassificationReport> {
    params.validate(set)?;
    let tol = params.defect_tol();
    let budget = params.error_budget(set.delta());
    let mut points = Vec::with_capacity(test_points.len());
    for x in test_points {
        check_on_set(set, x)?;
        let cones = cones_at(set, x, params)?;
        let defect = coincidence_defect(&cones[3], &cones[0]);
        let vs = is_vector_space(&cones[3], params.sigma_tol, params.vs_tol, params.hull_angle_tol)?;
        let margin = defect - tol;
        points.push(PointOutcome {
            point: x.clone(),
            cone_dims: hull_dims(&cones, params.sigma_tol),
            coincidence_defect: defect,
            hull_angle: 0.0,
            vector_space_margin: vs.margin,
            margin,
            verdict: tri_state(margin, budget),
        });
    }
    Ok(ClassificationReport::assemble("four-cones", tol, budget, points))
}

/// Upper tangent cone is a d-dimensional vector space and absorbs the upper
/// paratangent cone, at every test point.
pub fn tierno_classify(
    set: &SampledSet,
    test_points: &[Vec<f64>],
    d: usize,
    params: &ClassifierParams,
) -> Result<ClassificationReport> {
    params.validate(set)?;
    if d > set.ambient_dim() {
        return Err(ConelabError::Config(format!(
            "target dimension {d} exceeds ambient {}",
            set.ambient_dim()
        )));
    }
    let tol = params.defect_tol();
    let budget = params.error_budget(set.delta());
    let mut points = Vec::with_capacity(test_points.len());
    for x in test_points {
        check_on_set(set, x)?;
        let cones = cones_at(set, x, params)?;
        let dims = hull_dims(&cones, params.sigma_tol);
        let hull = linear_hull(&cones[2], params.sigma_tol);
        let vs = is_vector_space(&cones[2], params.sigma_tol, params.vs_tol, params.hull_angle_tol)?;
        let hull_angle = members_to_subspace_angle(&cones[3], &hull)?;
        // Members of a cone estimated at threshold τ legitimately spread up
        // to asin(τ) around the underlying set of directions, so the
        // absorption tolerance carries that term.
        let absorb_tol = params.tau.min(1.0).asin() + tol;
        // A wrong hull dimension is a definitive failure, not a near-miss.
        let margin = if dims[2] != d {
            std::f64::consts::FRAC_PI_2 + tol + budget
        } else {
            (hull_angle - absorb_tol).max(vs.margin)
        };
        points.push(PointOutcome {
            point: x.clone(),
            cone_dims: dims,
            coincidence_defect: 0.0,
            hull_angle,
            vector_space_margin: vs.margin,
            margin,
            verdict: tri_state(margin, budget),
        });
    }
    Ok(ClassificationReport::assemble("tierno", tol, budget, points))
}

/// Upper tangent and upper paratangent cones coincide and the hull has
/// dimension d, at every test point.
pub fn shchepin_repovs_classify(
    set: &SampledSet,
    test_points: &[Vec<f64>],
    d: usize,
    params: &ClassifierParams,
) -> Result<ClassificationReport> {
    params.validate(set)?;
    let tol = params.defect_tol();
    let budget = params.error_budget(set.delta());
    let mut points = Vec::with_capacity(test_points.len());
    for x in test_points {
        check_on_set(set, x)?;
        let cones = cones_at(set, x, params)?;
        let dims = hull_dims(&cones, params.sigma_tol);
        let defect = coincidence_defect(&cones[3], &cones[2]);
        let margin = if dims[2] != d {
            std::f64::consts::FRAC_PI_2 + tol + budget
        } else {
            defect - tol
        };
        points.push(PointOutcome {
            point: x.clone(),
            cone_dims: dims,
            coincidence_defect: defect,
            hull_angle: 0.0,
            vector_space_margin: 0.0,
            margin,
            verdict: tri_state(margin, budget),
        });
    }
    Ok(ClassificationReport::assemble(
        "shchepin-repovs",
        tol,
        budget,
        points,
    ))
}

/// Deterministic stride subsample of ids, ends kept.
fn cap_ids(ids: &[usize], cap: usize) -> Vec<usize> {
    if ids.len() <= cap || cap < 2 {
        return ids.to_vec();
    }
    let n = ids.len();
    let picked: BTreeSet<usize> = (0..cap).map(|i| ids[i * (n - 1) / (cap - 1)]).collect();
    picked.into_iter().collect()
}

/// Scalar result with a margin (negative margins certify the verdict).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestOutcome {
    pub verdict: Verdict,
    pub margin: f64,
}

/// Injectivity of the orthogonal projection onto the upper tangent hull over
/// a probe ball: no well-separated sample pair may collapse under the
/// projection.
pub fn valiron_condition(
    set: &SampledSet,
    x: &[f64],
    params: &ClassifierParams,
) -> Result<TestOutcome> {
    params.validate(set)?;
    check_on_set(set, x)?;
    let cones = cones_at(set, x, params)?;
    let hull = linear_hull(&cones[2], params.sigma_tol);
    if hull.dim() == 0 {
        return Err(ConelabError::InsufficientData(
            "upper tangent hull is zero-dimensional".into(),
        ));
    }
    let ids = set.neighbors_within(x, params.probe_radius);
    let ids = cap_ids(&ids, params.pair_sample_cap);
    let sep = 2.0 * set.delta();
    let mut min_ratio = f64::INFINITY;
    for (a, &i) in ids.iter().enumerate() {
        let p = DVector::from_column_slice(set.point(i));
        for &j in &ids[a + 1..] {
            let q = DVector::from_column_slice(set.point(j));
            let diff = &p - &q;
            let dist = diff.norm();
            if dist <= sep {
                continue;
            }
            let ratio = hull.project(&diff).norm() / dist;
            min_ratio = min_ratio.min(ratio);
        }
    }
    if !min_ratio.is_finite() {
        return Err(ConelabError::InsufficientData(
            "no well-separated sample pairs in the probe ball".into(),
        ));
    }
    let margin = params.injectivity_tol - min_ratio;
    Ok(TestOutcome {
        verdict: if margin <= 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        margin,
    })
}

/// Upper paratangent hull dimension is at most d; margin is the relative
/// singular-value excess at the threshold.
pub fn severi_simplicity(
    set: &SampledSet,
    x: &[f64],
    d: usize,
    params: &ClassifierParams,
) -> Result<TestOutcome> {
    params.validate(set)?;
    check_on_set(set, x)?;
    let cones = cones_at(set, x, params)?;
    let members = cones[3].members();
    if members.is_empty() {
        return Ok(TestOutcome {
            verdict: Verdict::Pass,
            margin: -params.sigma_tol,
        });
    }
    let n = set.ambient_dim();
    let mat = DMatrix::from_fn(n, members.len(), |r, c| members[c][r]);
    let mut sv: Vec<f64> = mat.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top = sv[0];
    // margin = relative weight of the (d+1)-th singular direction above the
    // threshold; ≤ 0 means the hull fits in d dimensions.
    let margin = if d < sv.len() {
        sv[d] / top - params.sigma_tol
    } else {
        -params.sigma_tol
    };
    let budget = ERROR_BUDGET_C * set.delta() / params.ladder.lambda_min();
    Ok(TestOutcome {
        verdict: tri_state(margin, budget),
        margin,
    })
}

/// Secant-map continuity for curve samples: secant lines over shrinking
/// balls must align with a single limit line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GluckOutcome {
    pub verdict: Verdict,
    pub supported: bool,
    /// Max secant-to-candidate-line angle per dyadic radius (largest first).
    pub defects: Vec<f64>,
    pub final_defect: f64,
}

pub fn gluck_secant_test(
    set: &SampledSet,
    x: &[f64],
    params: &ClassifierParams,
) -> Result<GluckOutcome> {
    params.validate(set)?;
    check_on_set(set, x)?;
    if set.ambient_dim() > 3 {
        return Ok(GluckOutcome {
            verdict: Verdict::Inconclusive,
            supported: false,
            defects: Vec::new(),
            final_defect: f64::NAN,
        });
    }
    let cones = cones_at(set, x, params)?;
    // Candidate limit line: dominant direction of the upper paratangent
    // members (falls back to the dominant secant direction).
    let members = cones[3].members();
    let n = set.ambient_dim();
    let line = if members.is_empty() {
        None
    } else {
        let mat = DMatrix::from_fn(n, members.len(), |r, c| members[c][r]);
        let svd = mat.svd(true, false);
        let u = svd.u.as_ref().unwrap();
        let col = u.column(0).into_owned();
        Some(Subspace::line(&col)?)
    };
    let radii: Vec<f64> = (0..3).map(|j| params.probe_radius * 0.5_f64.powi(j)).collect();
    let sep = 2.0 * set.delta();
    let mut defects = Vec::with_capacity(3);
    for &r in &radii {
        let ids = cap_ids(&set.neighbors_within(x, r), params.pair_sample_cap);
        let mut secants: Vec<DVector<f64>> = Vec::new();
        for (a, &i) in ids.iter().enumerate() {
            let p = DVector::from_column_slice(set.point(i));
            for &j in &ids[a + 1..] {
                let q = DVector::from_column_slice(set.point(j));
                let diff = &p - &q;
                let dist = diff.norm();
                if dist > sep {
                    secants.push(diff / dist);
                }
            }
        }
        if secants.len() < 3 {
            return Err(ConelabError::InsufficientData(format!(
                "only {} secant pairs at radius {r}",
                secants.len()
            )));
        }
        let line = match &line {
            Some(l) => l.clone(),
            None => {
                let mat = DMatrix::from_fn(n, secants.len(), |r2, c| secants[c][r2]);
                let svd = mat.svd(true, false);
                Subspace::line(&svd.u.as_ref().unwrap().column(0).into_owned())?
            }
        };
        let defect = secants
            .iter()
            .map(|s| dist_to_subspace(s, &line).unwrap().clamp(-1.0, 1.0).asin())
            .fold(0.0, f64::max);
        defects.push(defect);
    }
    let tol = params.defect_tol();
    let slack = params.grid.theta_mesh + 0.01;
    let decreasing = defects.windows(2).all(|w| w[1] <= w[0] + slack);
    let final_defect = *defects.last().unwrap();
    let margin = final_defect - tol;
    let verdict = if !decreasing {
        Verdict::Fail
    } else {
        tri_state(margin, params.error_budget(set.delta()))
    };
    Ok(GluckOutcome {
        verdict,
        supported: true,
        defects,
        final_defect,
    })
}

/// Interior-point criterion: every grid direction belongs to the lower
/// paratangent cone.
pub fn open_set_test(
    set: &SampledSet,
    x: &[f64],
    params: &ClassifierParams,
) -> Result<TestOutcome> {
    params.validate(set)?;
    check_on_set(set, x)?;
    let cones = cones_at(set, x, params)?;
    let worst = cones[0]
        .directions
        .iter()
        .map(|d| d.score)
        .fold(0.0, f64::max);
    let margin = worst - params.tau;
    let budget = ERROR_BUDGET_C * set.delta() / params.ladder.lambda_min();
    Ok(TestOutcome {
        verdict: tri_state(margin, budget),
        margin,
    })
}

/// Lipschitz criterion for graph samples: no upper paratangent member close
/// to the vertical subspace {0}×Rᵐ.
pub fn no_vertical_lines_test(
    set: &SampledSet,
    x: &[f64],
    params: &ClassifierParams,
) -> Result<TestOutcome> {
    let k = set.graph_split().ok_or(ConelabError::MissingGraphSplit)?;
    params.validate(set)?;
    check_on_set(set, x)?;
    let n = set.ambient_dim();
    let cones = cones_at(set, x, params)?;
    // Min angle from any member to the vertical subspace.
    let vertical = Subspace::from_orthonormal(DMatrix::from_fn(n, n - k, |r, c| {
        if r == k + c {
            1.0
        } else {
            0.0
        }
    }))?;
    let members = cones[3].members();
    let mut min_angle = std::f64::consts::FRAC_PI_2;
    for v in members {
        let d = dist_to_subspace(&DVector::from_column_slice(v), &vertical)?;
        min_angle = min_angle.min(d.clamp(-1.0, 1.0).asin());
    }
    let vert_tol = params.hull_angle_tol + params.grid.theta_mesh;
    let margin = vert_tol - min_angle;
    Ok(TestOutcome {
        verdict: tri_state(margin, params.grid.theta_mesh),
        margin,
    })
}

/// Strict differentiability for graph samples: the upper paratangent hull is
/// the graph of a linear map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrictDiffOutcome {
    pub verdict: Verdict,
    pub hull_dim: usize,
    /// Candidate differential, row-major (codomain × domain), present only
    /// on pass.
    pub differential: Option<Vec<Vec<f64>>>,
}

pub fn strict_differentiability_test(
    set: &SampledSet,
    x: &[f64],
    params: &ClassifierParams,
) -> Result<StrictDiffOutcome> {
    let k = set.graph_split().ok_or(ConelabError::MissingGraphSplit)?;
    params.validate(set)?;
    check_on_set(set, x)?;
    let n = set.ambient_dim();
    let cones = cones_at(set, x, params)?;
    let hull = linear_hull(&cones[3], params.sigma_tol);
    let d = hull.dim();
    if d != k {
        return Ok(StrictDiffOutcome {
            verdict: Verdict::Fail,
            hull_dim: d,
            differential: None,
        });
    }
    // Split the hull basis into domain and codomain blocks; a vertical
    // direction inside the hull makes the domain block singular.
    let basis = hull.basis();
    let dom = basis.rows(0, k).into_owned();
    let cod = basis.rows(k, n - k).into_owned();
    let svd = dom.clone().svd(false, false);
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if sigma_min < params.sigma_tol {
        return Ok(StrictDiffOutcome {
            verdict: Verdict::Fail,
            hull_dim: d,
            differential: None,
        });
    }
    // Hull = graph of L with L = cod · dom⁻¹.
    let dom_inv = dom
        .try_inverse()
        .ok_or_else(|| ConelabError::Config("singular domain block".into()))?;
    let l = cod * dom_inv;
    let rows = (0..n - k)
        .map(|r| (0..k).map(|c| l[(r, c)]).collect())
        .collect();
    Ok(StrictDiffOutcome {
        verdict: Verdict::Pass,
        hull_dim: d,
        differential: Some(rows),
    })
}

/// Secant-alignment scores per dyadic probe radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleConditionScores {
    pub radii: Vec<f64>,
    /// Max secant deviation from the hull at the fixed center, per radius.
    pub fixed_center: Vec<f64>,
    /// Same with the hull recomputed at moving centers, per radius.
    pub moving_center: Vec<f64>,
    /// Max angle between moving-center hulls and the fixed hull.
    pub ls_alignment: f64,
}

pub fn angle_condition_scores(
    set: &SampledSet,
    x_hat: &[f64],
    params: &ClassifierParams,
) -> Result<AngleConditionScores> {
    params.validate(set)?;
    check_on_set(set, x_hat)?;
    let cones = cones_at(set, x_hat, params)?;
    let hull = linear_hull(&cones[2], params.sigma_tol);
    if hull.dim() == 0 {
        return Err(ConelabError::InsufficientData(
            "upper tangent hull is zero-dimensional at the center".into(),
        ));
    }
    let radii: Vec<f64> = (0..3).map(|j| params.probe_radius * 0.5_f64.powi(j)).collect();
    let sep = 2.0 * set.delta();
    let mut fixed = Vec::with_capacity(3);
    let mut moving = Vec::with_capacity(3);
    let mut ls_alignment: f64 = 0.0;
    for &r in &radii {
        let ids = cap_ids(&set.neighbors_within(x_hat, r), params.pair_sample_cap);
        let mut fixed_score: f64 = 0.0;
        for (a, &i) in ids.iter().enumerate() {
            let p = DVector::from_column_slice(set.point(i));
            for &j in &ids[a + 1..] {
                let q = DVector::from_column_slice(set.point(j));
                let diff = &p - &q;
                let dist = diff.norm();
                if dist > sep {
                    fixed_score = fixed_score.max(dist_to_subspace(&diff, &hull)? / dist);
                }
            }
        }
        fixed.push(fixed_score);

        let centers = cap_ids(&ids, params.moving_center_cap);
        let mut moving_score: f64 = 0.0;
        for &c in &centers {
            let p = set.point(c).to_vec();
            let local = cones_at(set, &p, params)?;
            let local_hull = linear_hull(&local[2], params.sigma_tol);
            if local_hull.dim() == 0 {
                continue;
            }
            if local_hull.dim() == hull.dim() {
                ls_alignment = ls_alignment.max(subspace_angle(&local_hull, &hull)?);
            } else {
                ls_alignment = std::f64::consts::FRAC_PI_2;
            }
            let pv = DVector::from_column_slice(&p);
            for &j in &ids {
                if j == c {
                    continue;
                }
                let q = DVector::from_column_slice(set.point(j));
                let diff = &q - &pv;
                let dist = diff.norm();
                if dist > sep {
                    moving_score = moving_score.max(dist_to_subspace(&diff, &local_hull)? / dist);
                }
            }
        }
        moving.push(moving_score);
    }
    Ok(AngleConditionScores {
        radii,
        fixed_center: fixed,
        moving_center: moving,
        ls_alignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setmodel::{build_example, build_graph_example, ExampleParams};

    /// Circle at moderate resolution with a short ladder, cheap enough for
    /// unit tests.
    fn circle_setup() -> (SampledSet, ClassifierParams) {
        let set = build_example(
            "circle",
            &ExampleParams {
                delta: Some(1e-5),
                ..Default::default()
            },
        )
        .unwrap();
        let mut params = ClassifierParams::defaults_for(&set, 7).unwrap();
        params.ladder = ScaleLadder::new(0.01, 0.5, 3).unwrap();
        params.grid = DirectionGrid::angular_2d(360);
        params.para.max_base_points = 120;
        // Cone members spread up to asin(τ) ≈ 0.15 rad around the tangent,
        // so 0.1 would sit exactly on the dimension threshold.
        params.sigma_tol = 0.2;
        (set, params)
    }

    fn circle_points(k: usize) -> Vec<Vec<f64>> {
        (0..k)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_passes_four_cones() {
        let (set, params) = circle_setup();
        let report = four_cones_classify(&set, &circle_points(4), &params).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
        for p in &report.points {
            assert_eq!(p.cone_dims[2], 1, "tangent hull dim at {:?}", p.point);
        }
    }

    #[test]
    fn cusp_fails_four_cones_at_origin() {
        let set = build_example("cusp-y3x2", &ExampleParams::default()).unwrap();
        let mut params = ClassifierParams::defaults_for(&set, 7).unwrap();
        params.ladder = ScaleLadder::new(0.03, 0.5, 8).unwrap();
        params.grid = DirectionGrid::angular_2d(360);
        params.para.max_base_points = 200;
        let report = four_cones_classify(&set, &[vec![0.0, 0.0]], &params).unwrap();
        assert_eq!(report.verdict, Verdict::Fail, "{report:?}");
        // The failure must clear twice the tolerance.
        assert!(report.points[0].margin >= report.defect_tol, "{report:?}");
    }

    #[test]
    fn off_set_point_is_rejected() {
        let (set, params) = circle_setup();
        let err = four_cones_classify(&set, &[vec![0.0, 0.0]], &params).unwrap_err();
        assert!(matches!(err, ConelabError::PointNotOnSet { .. }));
    }

    #[test]
    fn circle_passes_tierno_d1() {
        let (set, params) = circle_setup();
        let report = tierno_classify(&set, &circle_points(4), 1, &params).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    }

    #[test]
    fn circle_fails_tierno_wrong_dim() {
        let (set, params) = circle_setup();
        let report = tierno_classify(&set, &circle_points(2), 2, &params).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn four_cones_pass_implies_shchepin_repovs_coincidence() {
        let (set, params) = circle_setup();
        let pts = circle_points(4);
        let four = four_cones_classify(&set, &pts, &params).unwrap();
        let sr = shchepin_repovs_classify(&set, &pts, 1, &params).unwrap();
        for (a, b) in four.points.iter().zip(&sr.points) {
            if a.verdict == Verdict::Pass {
                // Chain ordering makes the Tan⁺/pTan⁺ gap no larger.
                assert!(b.coincidence_defect <= a.coincidence_defect + 1e-12);
            }
        }
    }

    #[test]
    fn factorial_sequence_fails_shchepin_repovs_at_zero() {
        let set = build_example("factorial-sequence", &ExampleParams::default()).unwrap();
        let mut params = ClassifierParams::defaults_for(&set, 7).unwrap();
        params.grid = DirectionGrid::signs_1d();
        let report = shchepin_repovs_classify(&set, &[vec![0.0]], 0, &params).unwrap();
        assert_eq!(report.verdict, Verdict::Fail, "{report:?}");
    }

    #[test]
    fn valiron_circle_passes_two_parabolas_fails() {
        let (set, params) = circle_setup();
        let out = valiron_condition(&set, &[1.0, 0.0], &params).unwrap();
        assert_eq!(out.verdict, Verdict::Pass, "{out:?}");

        let parab = build_example("two-parabolas", &ExampleParams::default()).unwrap();
        let mut p2 = ClassifierParams::defaults_for(&parab, 7).unwrap();
        p2.ladder = ScaleLadder::new(0.03, 0.5, 8).unwrap();
        p2.grid = DirectionGrid::angular_2d(360);
        p2.sigma_tol = 0.2;
        p2.pair_sample_cap = 800;
        p2.para.max_base_points = 200;
        let out = valiron_condition(&parab, &[0.0, 0.0], &p2).unwrap();
        assert_eq!(out.verdict, Verdict::Fail, "{out:?}");
    }

    #[test]
    fn severi_circle_d1_passes_parabolas_fails() {
        let (set, params) = circle_setup();
        let out = severi_simplicity(&set, &[1.0, 0.0], 1, &params).unwrap();
        assert_eq!(out.verdict, Verdict::Pass, "{out:?}");

        let parab = build_example("two-parabolas", &ExampleParams::default()).unwrap();
        let mut p2 = ClassifierParams::defaults_for(&parab, 7).unwrap();
        p2.ladder = ScaleLadder::new(0.03, 0.5, 8).unwrap();
        p2.grid = DirectionGrid::angular_2d(360);
        p2.sigma_tol = 0.2;
        p2.para.max_base_points = 200;
        // Decoupled moving-base radii so the vertical secants are seen.
        p2.para.rho0 = Some(0.25);
        let out = severi_simplicity(&parab, &[0.0, 0.0], 1, &p2).unwrap();
        assert_eq!(out.verdict, Verdict::Fail, "{out:?}");
    }

    #[test]
    fn gluck_circle_passes_cusp_fails() {
        let (set, params) = circle_setup();
        let out = gluck_secant_test(&set, &[1.0, 0.0], &params).unwrap();
        assert_eq!(out.verdict, Verdict::Pass, "{out:?}");
        assert!(out.supported);

        let cusp = build_example("cusp-y3x2", &ExampleParams::default()).unwrap();
        let mut p2 = ClassifierParams::defaults_for(&cusp, 7).unwrap();
        p2.ladder = ScaleLadder::new(0.03, 0.5, 8).unwrap();
        p2.grid = DirectionGrid::angular_2d(360);
        p2.pair_sample_cap = 120;
        p2.para.max_base_points = 200;
        let out = gluck_secant_test(&cusp, &[0.0, 0.0], &p2).unwrap();
        assert_eq!(out.verdict, Verdict::Fail, "{out:?}");
    }

    #[test]
    fn open_set_box_interior_passes_circle_fails() {
        let boxy = build_example("box-2d", &ExampleParams::default()).unwrap();
        let mut params = ClassifierParams::defaults_for(&boxy, 7).unwrap();
        params.ladder = ScaleLadder::new(0.1, 0.5, 3).unwrap();
        params.grid = DirectionGrid::angular_2d(180);
        params.para.max_base_points = 60;
        let out = open_set_test(&boxy, &[0.0, 0.0], &params).unwrap();
        assert_eq!(out.verdict, Verdict::Pass, "{out:?}");

        let (circle, cparams) = circle_setup();
        let out = open_set_test(&circle, &[1.0, 0.0], &cparams).unwrap();
        assert_eq!(out.verdict, Verdict::Fail, "{out:?}");
    }

    fn graph_params(set: &SampledSet) -> ClassifierParams {
        let mut params = ClassifierParams::defaults_for(set, 7).unwrap();
        params.ladder = ScaleLadder::new(0.02, 0.5, 4).unwrap();
        params.grid = DirectionGrid::angular_2d(720);
        params.para.max_base_points = 120;
        params.sigma_tol = 0.2;
        params
    }

    #[test]
    fn vertical_lines_abs_passes_x23_fails() {
        let abs = build_graph_example("abs", 1e-4, -0.5, 0.5).unwrap();
        let params = graph_params(&abs);
        let out = no_vertical_lines_test(&abs, &[0.0, 0.0], &params).unwrap();
        assert_eq!(out.verdict, Verdict::Pass, "{out:?}");

        let x23 = build_graph_example("x23", 1e-4, -0.5, 0.5).unwrap();
        let params = graph_params(&x23);
        // Arclength stepping on the cusp leaves no sample exactly at the
        // origin; test at the nearest sample instead.
        let base = x23.point(x23.nearest(&[0.0, 0.0]).0).to_vec();
        let out = no_vertical_lines_test(&x23, &base, &params).unwrap();
        assert_eq!(out.verdict, Verdict::Fail, "{out:?}");
    }

    #[test]
    fn missing_split_is_an_error() {
        let (set, params) = circle_setup();
        assert!(matches!(
            no_vertical_lines_test(&set, &[1.0, 0.0], &params),
            Err(ConelabError::MissingGraphSplit)
        ));
    }

    #[test]
    fn strict_diff_x2_passes_abs_fails() {
        let x2 = build_graph_example("x2", 1e-4, -0.5, 0.5).unwrap();
        let params = graph_params(&x2);
        let out = strict_differentiability_test(&x2, &[0.0, 0.0], &params).unwrap();
        assert_eq!(out.verdict, Verdict::Pass, "{out:?}");
        let l = out.differential.unwrap();
        assert!(l[0][0].abs() < 1e-2, "slope {}", l[0][0]);

        let abs = build_graph_example("abs", 1e-4, -0.5, 0.5).unwrap();
        let params = graph_params(&abs);
        let out = strict_differentiability_test(&abs, &[0.0, 0.0], &params).unwrap();
        assert_eq!(out.verdict, Verdict::Fail, "{out:?}");
        assert_eq!(out.hull_dim, 2);
    }

    #[test]
    fn angle_scores_half_line_zero_parabolas_large() {
        let half = build_example("half-line", &ExampleParams::default()).unwrap();
        let mut params = ClassifierParams::defaults_for(&half, 7).unwrap();
        params.ladder = ScaleLadder::new(0.05, 0.5, 5).unwrap();
        params.probe_radius = 0.05;
        params.moving_center_cap = 3;
        params.para.max_base_points = 120;
        let scores = angle_condition_scores(&half, &[0.5], &params).unwrap();
        assert!(scores.fixed_center.iter().all(|&s| s < 1e-9), "{scores:?}");

        let parab = build_example("two-parabolas", &ExampleParams::default()).unwrap();
        let mut p2 = ClassifierParams::defaults_for(&parab, 7).unwrap();
        p2.ladder = ScaleLadder::new(0.03, 0.5, 8).unwrap();
        p2.grid = DirectionGrid::angular_2d(360);
        p2.sigma_tol = 0.2;
        p2.probe_radius = 0.05;
        p2.pair_sample_cap = 60;
        p2.moving_center_cap = 2;
        p2.para.max_base_points = 120;
        let scores = angle_condition_scores(&parab, &[0.0, 0.0], &p2).unwrap();
        // Bounded away from zero at every radius; the capped pair sample
        // understates the worst pairs at small radii, so no growth assert.
        assert!(
            scores.fixed_center.iter().all(|&s| s > 0.3),
            "{scores:?}"
        );
    }

    #[test]
    fn rigid_motion_invariance_of_margins() {
        // Rotate + translate the circle and its test points; margins agree.
        let (set, params) = circle_setup();
        let theta: f64 = 0.7;
        let (c, s) = (theta.cos(), theta.sin());
        let shift = [0.3, -0.2];
        let moved: Vec<Vec<f64>> = (0..set.len())
            .map(|i| {
                let p = set.point(i);
                vec![
                    c * p[0] - s * p[1] + shift[0],
                    s * p[0] + c * p[1] + shift[1],
                ]
            })
            .collect();
        let moved_set = crate::setmodel::SampledSet::from_points(
            &moved,
            set.delta(),
            crate::setmodel::Region {
                center: vec![shift[0], shift[1]],
                radius: set.region().radius,
            },
        )
        .unwrap();
        let p0 = vec![1.0, 0.0];
        let p0_moved = vec![c + shift[0], s + shift[1]];
        // Rotate the whole grid so the direction set moves rigidly too.
        let mut mparams = params.clone();
        mparams.grid = DirectionGrid::from_directions(
            params
                .grid
                .dirs
                .iter()
                .map(|v| vec![c * v[0] - s * v[1], s * v[0] + c * v[1]])
                .collect(),
            params.grid.theta_mesh,
        );
        let a = four_cones_classify(&set, &[p0], &params).unwrap();
        let b = four_cones_classify(&moved_set, &[p0_moved], &mparams).unwrap();
        assert_eq!(a.points[0].verdict, b.points[0].verdict);
        assert!(
            (a.points[0].margin - b.points[0].margin).abs() < 1e-8,
            "{} vs {}",
            a.points[0].margin,
            b.points[0].margin
        );
    }

    #[test]
    fn report_csv_has_row_per_point() {
        let (set, params) = circle_setup();
        let report = four_cones_classify(&set, &circle_points(3), &params).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("point,test,verdict,margin"));
        let json = serde_json::to_string(&report).unwrap();
        let back: ClassificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.points.len(), 3);
    }
}

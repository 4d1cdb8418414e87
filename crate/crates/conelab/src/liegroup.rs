//! Lie-algebra recovery for sampled matrix groups: the algebra is estimated
//! as the linear hull of the upper tangent cone of the sample at the
//! identity, with matrices flattened to R^{n²} under the Frobenius inner
//! product.
//!
//! Sampling modes:
//! * algebra dim ≤ 3: a solid patch {B·exp(ξ) : ‖ξ‖_F ≤ t0} on a symmetric
//!   lattice in the algebra, dense enough for all four cones;
//! * higher dims: two dense spherical shells {B·exp(t_k ξ) : ‖ξ‖_F = 1},
//!   aligned with the two ladder scales, intended for upper-tangent
//!   estimation only (a solid patch at the scale-floor resolution would
//!   need millions of samples).
//!
//! Each group sample carries anchor elements away from the identity with
//! their own translated clusters, so tangent cones can be estimated at
//! non-identity points, and the exact inverse of every anchor-cluster
//! element, so the sample is closed under inversion.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{estimate_cone, ConeEstimate, ConeKind, DirectionGrid, ParaParams, ScaleLadder};
use crate::error::{ConelabError, Result};
use crate::exterior::{subspace_angle, Subspace};
use crate::setmodel::{Region, SampledSet};
use crate::subspaces::linear_hull;

/// Group catalog names.
pub const GROUP_CATALOG: [&str; 4] = ["SO2", "SO3", "diag-pos", "unipotent-upper"];

/// Taylor matrix exponential with scaling and squaring; accurate to machine
/// precision for the small generators used here.
pub fn mat_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2.0_f64.powi(squarings as i32);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=16 {
        term = (&term * &scaled) / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            out.push(m[(r, c)]);
        }
    }
    out
}

fn unflatten(v: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |r, c| v[r * n + c])
}

/// Frobenius-orthonormal generator frame of the algebra.
pub fn generator_frame(name: &str, n: usize) -> Result<Vec<DMatrix<f64>>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match name {
        "SO2" => Ok(vec![DMatrix::from_row_slice(2, 2, &[0.0, -s, s, 0.0])]),
        "SO3" => {
            let l1 = DMatrix::from_row_slice(3, 3, &[0., 0., 0., 0., 0., -s, 0., s, 0.]);
            let l2 = DMatrix::from_row_slice(3, 3, &[0., 0., s, 0., 0., 0., -s, 0., 0.]);
            let l3 = DMatrix::from_row_slice(3, 3, &[0., -s, 0., s, 0., 0., 0., 0., 0.]);
            Ok(vec![l1, l2, l3])
        }
        "diag-pos" => Ok((0..n)
            .map(|i| DMatrix::from_fn(n, n, |r, c| if r == i && c == i { 1.0 } else { 0.0 }))
            .collect()),
        "unipotent-upper" => {
            if n != 3 {
                return Err(ConelabError::Config(format!(
                    "unipotent-upper is implemented for n = 3, got {n}"
                )));
            }
            let mut frame = Vec::new();
            for (r, c) in [(0, 1), (0, 2), (1, 2)] {
                frame.push(DMatrix::from_fn(3, 3, |i, j| {
                    if i == r && j == c {
                        1.0
                    } else {
                        0.0
                    }
                }));
            }
            Ok(frame)
        }
        other => Err(ConelabError::UnknownCatalog(format!("group {other}"))),
    }
}

/// Matrix size for a catalog group.
pub fn group_matrix_size(name: &str, n: usize) -> Result<usize> {
    match name {
        "SO2" => Ok(2),
        "SO3" | "unipotent-upper" => Ok(3),
        "diag-pos" => Ok(n),
        other => Err(ConelabError::UnknownCatalog(format!("group {other}"))),
    }
}

/// Analytic Lie algebra as a subspace of R^{n²}.
pub fn analytic_algebra(name: &str, n: usize) -> Result<Subspace> {
    let frame = generator_frame(name, n)?;
    let nn = frame[0].nrows();
    let vecs: Vec<DVector<f64>> = frame
        .iter()
        .map(|g| DVector::from_vec(flatten(g)))
        .collect();
    Ok(Subspace::from_spanning(&vecs, nn * nn, 0.1))
}

/// Sampling configuration for a group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupParams {
    /// Patch (or outer shell) radius in the algebra.
    pub t0: f64,
    /// Number of anchor elements away from the identity.
    pub anchors: usize,
    /// Algebra norm of the anchor generators.
    pub anchor_t: f64,
    pub seed: u64,
}

impl Default for GroupParams {
    fn default() -> Self {
        Self {
            t0: 0.08,
            anchors: 5,
            anchor_t: 0.3,
            seed: 17,
        }
    }
}

/// A sampled matrix group with its flattened point set.
#[derive(Debug, Clone)]
pub struct MatrixGroupSample {
    pub name: String,
    pub n: usize,
    pub algebra_dim: usize,
    pub set: SampledSet,
    /// Flattened anchor elements (identity first).
    pub anchors: Vec<Vec<f64>>,
    /// Ladder matched to the sampling structure.
    pub ladder: ScaleLadder,
    /// True when the sample is a solid patch (all four cones supported).
    pub solid: bool,
}

impl MatrixGroupSample {
    /// Secant dedup resolution: coarser for algebra dimension ≥ 4, where the
    /// secant count grows like dedup^{-(d-1)}.
    pub fn dedup_angle(&self) -> f64 {
        if self.algebra_dim >= 4 {
            0.15
        } else {
            0.08
        }
    }
}

/// Symmetric lattice points filling the unit ball of R^d, scaled by t0,
/// with covering radius ≤ h·sqrt(d)/2 · t0.
fn ball_lattice(d: usize, h: f64) -> Vec<Vec<f64>> {
    let m = (1.0 / h).ceil() as i64;
    let mut out = Vec::new();
    let mut idx = vec![-m; d];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            out.push(p);
        }
        // Odometer increment over the box [-m, m]^d.
        let mut carry = true;
        for slot in idx.iter_mut() {
            if *slot < m {
                *slot += 1;
                carry = false;
                break;
            }
            *slot = -m;
        }
        if carry {
            break;
        }
    }
    out
}

/// Random ± paired unit directions in R^d with approximately the requested
/// covering radius on the sphere.
fn sphere_points(d: usize, covering: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let m = (std::f64::consts::PI / covering).ceil() as usize;
            (0..m)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        4 => {
            // Torus-coordinate grid on S³: (cosθ·e^{iφ1}, sinθ·e^{iφ2})
            // with spacing ≈ covering in all three coordinates.
            let step = covering;
            let rows = (std::f64::consts::FRAC_PI_2 / step).ceil() as usize;
            let mut out = Vec::new();
            for i in 0..rows {
                let theta = (i as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / rows as f64;
                let (ct, st) = (theta.cos(), theta.sin());
                let n1 = ((2.0 * std::f64::consts::PI * ct / step).ceil() as usize).max(1);
                let n2 = ((2.0 * std::f64::consts::PI * st / step).ceil() as usize).max(1);
                for a in 0..n1 {
                    let p1 = 2.0 * std::f64::consts::PI * a as f64 / n1 as f64;
                    for b in 0..n2 {
                        let p2 = 2.0 * std::f64::consts::PI * b as f64 / n2 as f64;
                        out.push(vec![ct * p1.cos(), ct * p1.sin(), st * p2.cos(), st * p2.sin()]);
                    }
                }
            }
            out
        }
        _ => {
            // Random covering on S^{d-1} scales as (ln m / m)^{1/(d-1)}.
            let mut m = 256usize;
            loop {
                let est = ((m as f64).ln() * 4.0 / m as f64).powf(1.0 / (d as f64 - 1.0));
                if est <= covering || m >= 1 << 20 {
                    break;
                }
                m *= 2;
            }
            let mut out = Vec::with_capacity(2 * m);
            for _ in 0..m {
                let mut v = vec![0.0; d];
                for x in v.iter_mut() {
                    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                    let u2: f64 = rng.gen::<f64>();
                    *x = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm <= 1e-12 {
                    continue;
                }
                let neg: Vec<f64> = v.iter().map(|x| -x / norm).collect();
                for x in v.iter_mut() {
                    *x /= norm;
                }
                out.push(v);
                out.push(neg);
            }
            out
        }
    }
}

/// Build a catalog group sample.
pub fn sample_group(name: &str, n: usize, params: &GroupParams) -> Result<MatrixGroupSample> {
    let frame = generator_frame(name, n)?;
    let nsize = frame[0].nrows();
    let d = frame.len();
    let nn = nsize * nsize;
    let t0 = params.t0;
    let solid = d <= 3;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // Two-scale ladder aligned with the sampling structure; high ratios
    // keep the scale floor (and with it the sample budget) manageable.
    let (lambda0, ratio) = if solid { (0.5 * t0, 0.8) } else { (t0, 0.9) };
    let ladder = ScaleLadder::new(lambda0, ratio, 2)?;

    // Anchors: exp(anchor_t · ξ) for random unit ξ, plus the identity.
    let anchor_t = if solid {
        params.anchor_t
    } else {
        0.5 * params.anchor_t
    };
    let identity = DMatrix::<f64>::identity(nsize, nsize);
    let mut anchor_mats = vec![identity.clone()];
    for _ in 0..params.anchors {
        let mut c = vec![0.0; d];
        for x in c.iter_mut() {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen::<f64>();
            *x = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let mut xi = DMatrix::zeros(nsize, nsize);
        for (coef, g) in c.iter().zip(&frame) {
            xi += g * (*coef / norm * anchor_t);
        }
        anchor_mats.push(mat_exp(&xi));
    }

    // Algebra-to-group distortion: translation operator norm times the
    // differential of exp inside the patch, with 10% slack.
    let anchor_opnorm = anchor_mats
        .iter()
        .map(|a| a.singular_values().max())
        .fold(1.0_f64, f64::max);
    let inflation = anchor_opnorm * t0.exp() * 1.1;
    // Algebra-side resolution honoring the scale floor after inflation.
    let delta_alg = ladder.lambda_min() / (8.5 * inflation);

    // Algebra coordinates around the identity and (smaller) around anchors.
    let lattice = |radius: f64| -> Vec<Vec<f64>> {
        let h = 2.0 * delta_alg / (d as f64).sqrt() / radius;
        ball_lattice(d, h)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x * radius).collect())
            .collect()
    };
    let shells = |radii: &[f64], rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = vec![vec![0.0; d]];
        for &t in radii {
            for dir in sphere_points(d, delta_alg / t, rng) {
                pts.push(dir.iter().map(|x| x * t).collect());
            }
        }
        pts
    };
    let (coords_e, coords_anchor) = if solid {
        (lattice(t0), lattice(0.7 * t0))
    } else {
        // Anchor clusters carry one shell; the upper tangent score is a
        // minimum over scales, so one exact-hit scale suffices there.
        (
            shells(&[t0, t0 * ratio], &mut rng),
            shells(&[t0], &mut rng),
        )
    };

    let mut coords = Vec::new();
    let push_mat = |m: &DMatrix<f64>, coords: &mut Vec<f64>| {
        coords.extend(flatten(m));
    };
    for (ai, base) in anchor_mats.iter().enumerate() {
        let cluster = if ai == 0 { &coords_e } else { &coords_anchor };
        for c in cluster {
            let mut xi = DMatrix::zeros(nsize, nsize);
            for (coef, g) in c.iter().zip(&frame) {
                xi += g * *coef;
            }
            let el = base * mat_exp(&xi);
            push_mat(&el, &mut coords);
            // Exact inverses close the sample under inversion; the identity
            // cluster is already symmetric by lattice construction.
            if ai > 0 {
                let inv = el.clone().try_inverse().ok_or_else(|| {
                    ConelabError::Config("group element is numerically singular".into())
                })?;
                push_mat(&inv, &mut coords);
            }
        }
    }

    // Declared resolution: algebra-side covering radius times the certified
    // distortion; the scale floor holds by construction of delta_alg.
    let delta = delta_alg * inflation;
    let region = Region {
        center: flatten(&identity),
        radius: 2.0 * (params.anchor_t + t0) + 1.0,
    };
    let set = SampledSet::new(nn, coords, delta, region)?
        .with_generator_id(format!("group-{name}"))
        .with_matrix_shape(nsize);
    Ok(MatrixGroupSample {
        name: name.to_string(),
        n: nsize,
        algebra_dim: d,
        set,
        anchors: anchor_mats.iter().map(flatten).collect(),
        ladder,
        solid,
    })
}

/// Max distance from any sampled element's inverse to the sample; the
/// inversion-closure certificate.
pub fn inversion_closure_defect(g: &MatrixGroupSample) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..g.set.len() {
        let m = unflatten(g.set.point(i), g.n);
        if let Some(inv) = m.try_inverse() {
            worst = worst.max(g.set.dist_query(&flatten(&inv)));
        } else {
            worst = f64::INFINITY;
        }
    }
    worst
}

/// Secant direction grid around a flattened base element.
pub fn secant_grid(g: &MatrixGroupSample, base: &[f64], dedup_angle: f64) -> DirectionGrid {
    DirectionGrid::from_secants(&g.set, base, 1.2 * grid_radius(g), dedup_angle)
}

fn grid_radius(g: &MatrixGroupSample) -> f64 {
    // Secants up to the patch radius; curvature bias stays O(t0).
    g.ladder.lambda0 / if g.solid { 0.5 } else { 1.0 }
}

/// Default membership threshold for group cone estimates: secant grids are
/// data-driven, so the dominant error is the shell/lattice covering plus the
/// exp curvature, both well under this bound at default parameters.
pub const GROUP_TAU: f64 = 0.25;

/// Upper tangent cone at a flattened element over its secant grid.
pub fn group_cone_at(
    g: &MatrixGroupSample,
    base: &[f64],
    dedup_angle: f64,
) -> Result<ConeEstimate> {
    let grid = secant_grid(g, base, dedup_angle);
    if grid.is_empty() {
        return Err(ConelabError::InsufficientData(
            "no secants around the base element".into(),
        ));
    }
    let mut para = ParaParams::default();
    para.max_base_points = 30;
    estimate_cone(
        &g.set,
        base,
        ConeKind::UpperTangent,
        &g.ladder,
        &grid,
        GROUP_TAU,
        &para,
    )
}

/// Estimated Lie algebra: linear hull of the upper tangent cone at the
/// identity.
pub fn estimate_infinitesimal_group(g: &MatrixGroupSample) -> Result<Subspace> {
    let e = g.anchors[0].clone();
    let cone = group_cone_at(g, &e, g.dedup_angle())?;
    Ok(linear_hull(&cone, 0.25))
}

/// Coincidence report for the four cones at the identity (solid samples
/// only; shell samples support the upper tangent cone alone).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityConeReport {
    pub defect: f64,
    pub defect_tol: f64,
    pub pass: bool,
    pub member_counts: [usize; 4],
}

pub fn four_cones_check_at_identity(g: &MatrixGroupSample) -> Result<IdentityConeReport> {
    if !g.solid {
        return Err(ConelabError::InsufficientData(
            "four-cones check requires a solid patch sample".into(),
        ));
    }
    let e = g.anchors[0].clone();
    let grid = secant_grid(g, &e, g.dedup_angle());
    let mut para = ParaParams::default();
    para.max_base_points = 30;
    let cones = crate::cones::estimate_cones(
        &g.set,
        &e,
        &ConeKind::ALL,
        &g.ladder,
        &grid,
        GROUP_TAU,
        &para,
    )?;
    let defect = crate::classify::coincidence_defect(&cones[3], &cones[0]);
    let defect_tol = 2.0 * grid.theta_mesh + 0.05;
    Ok(IdentityConeReport {
        defect,
        defect_tol,
        pass: defect <= defect_tol,
        member_counts: [
            cones[0].member_indices().len(),
            cones[1].member_indices().len(),
            cones[2].member_indices().len(),
            cones[3].member_indices().len(),
        ],
    })
}

/// Angle between the tangent hull at an anchor and the left translate of
/// the hull at the identity.
pub fn translation_covariance_check(g: &MatrixGroupSample, anchor: usize) -> Result<f64> {
    if anchor >= g.anchors.len() {
        return Err(ConelabError::Config(format!(
            "anchor index {anchor} out of range {}",
            g.anchors.len()
        )));
    }
    let e = g.anchors[0].clone();
    let hull_e = linear_hull(&group_cone_at(g, &e, g.dedup_angle())?, 0.25);
    let a_flat = g.anchors[anchor].clone();
    let hull_a = linear_hull(&group_cone_at(g, &a_flat, g.dedup_angle())?, 0.25);
    // A · hull(E), column by column.
    let a = unflatten(&a_flat, g.n);
    let translated: Vec<DVector<f64>> = (0..hull_e.dim())
        .map(|c| {
            let col: Vec<f64> = (0..g.n * g.n).map(|r| hull_e.basis()[(r, c)]).collect();
            DVector::from_vec(flatten(&(&a * unflatten(&col, g.n))))
        })
        .collect();
    let translated = Subspace::from_spanning(&translated, g.n * g.n, 1e-6);
    if translated.dim() != hull_a.dim() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    subspace_angle(&hull_a, &translated)
}

/// Max commutator residual over basis pairs of a candidate algebra,
/// normalized by the Frobenius norms.
pub fn bracket_closure_check(j: &Subspace, n: usize) -> Result<f64> {
    if j.dim() == 0 {
        return Err(ConelabError::InsufficientData(
            "empty candidate algebra".into(),
        ));
    }
    if j.ambient_dim() != n * n {
        return Err(ConelabError::DimensionMismatch(n * n, j.ambient_dim()));
    }
    let basis: Vec<DMatrix<f64>> = (0..j.dim())
        .map(|c| {
            let col: Vec<f64> = (0..n * n).map(|r| j.basis()[(r, c)]).collect();
            unflatten(&col, n)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i + 1..] {
            let comm = x * y - y * x;
            let v = DVector::from_vec(flatten(&comm));
            let residual = (&v - j.basis() * (j.basis().transpose() * &v)).norm()
                / (x.norm() * y.norm());
            worst = worst.max(residual);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> GroupParams {
        GroupParams {
            anchors: 2,
            ..Default::default()
        }
    }

    #[test]
    fn mat_exp_matches_rotation() {
        let g = generator_frame("SO2", 2).unwrap();
        let t = 0.3_f64;
        let r = mat_exp(&(&g[0] * (t * 2.0_f64.sqrt())));
        assert!((r[(0, 0)] - t.cos()).abs() < 1e-12);
        assert!((r[(1, 0)] - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn analytic_algebras_have_expected_dims() {
        assert_eq!(analytic_algebra("SO2", 2).unwrap().dim(), 1);
        assert_eq!(analytic_algebra("SO3", 3).unwrap().dim(), 3);
        assert_eq!(analytic_algebra("diag-pos", 3).unwrap().dim(), 3);
        assert_eq!(analytic_algebra("unipotent-upper", 3).unwrap().dim(), 3);
    }

    #[test]
    fn analytic_brackets_close_exactly() {
        for (name, n) in [("SO3", 3), ("diag-pos", 2), ("unipotent-upper", 3)] {
            let alg = analytic_algebra(name, n).unwrap();
            let res = bracket_closure_check(&alg, n).unwrap();
            assert!(res < 1e-12, "{name}: {res}");
        }
    }

    #[test]
    fn so2_algebra_recovered() {
        let g = sample_group("SO2", 2, &small_params()).unwrap();
        let est = estimate_infinitesimal_group(&g).unwrap();
        assert_eq!(est.dim(), 1);
        let angle = subspace_angle(&est, &analytic_algebra("SO2", 2).unwrap()).unwrap();
        assert!(angle <= 0.05, "angle {angle}");
    }

    #[test]
    fn so3_algebra_recovered_with_bracket() {
        let g = sample_group("SO3", 3, &small_params()).unwrap();
        let est = estimate_infinitesimal_group(&g).unwrap();
        assert_eq!(est.dim(), 3);
        let angle = subspace_angle(&est, &analytic_algebra("SO3", 3).unwrap()).unwrap();
        assert!(angle <= 0.05, "angle {angle}");
        let res = bracket_closure_check(&est, 3).unwrap();
        assert!(res <= 0.05, "bracket residual {res}");
    }

    #[test]
    fn diag_pos_dims_match() {
        for n in [2usize, 3] {
            let g = sample_group("diag-pos", n, &small_params()).unwrap();
            let est = estimate_infinitesimal_group(&g).unwrap();
            assert_eq!(est.dim(), n, "diag-pos({n})");
        }
    }

    #[test]
    fn unipotent_algebra_recovered() {
        let g = sample_group("unipotent-upper", 3, &small_params()).unwrap();
        let est = estimate_infinitesimal_group(&g).unwrap();
        assert_eq!(est.dim(), 3);
        let angle = subspace_angle(&est, &analytic_algebra("unipotent-upper", 3).unwrap()).unwrap();
        assert!(angle <= 0.05, "angle {angle}");
    }

    #[test]
    fn so2_four_cones_coincide_at_identity() {
        let g = sample_group("SO2", 2, &small_params()).unwrap();
        let report = four_cones_check_at_identity(&g).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn translation_covariance_small_angles() {
        for (name, n) in [("SO2", 2), ("diag-pos", 2)] {
            let g = sample_group(name, n, &small_params()).unwrap();
            for anchor in 1..g.anchors.len() {
                let angle = translation_covariance_check(&g, anchor).unwrap();
                assert!(angle <= 0.05, "{name} anchor {anchor}: {angle}");
            }
            // The identity anchor is exactly covariant.
            let zero = translation_covariance_check(&g, 0).unwrap();
            assert!(zero < 1e-9, "{name}: {zero}");
        }
    }

    #[test]
    fn inversion_closure_certified() {
        let g = sample_group("SO2", 2, &small_params()).unwrap();
        let defect = inversion_closure_defect(&g);
        assert!(defect <= 3.0 * g.set.delta(), "defect {defect}");
    }

    #[test]
    fn elements_are_invertible() {
        let g = sample_group("unipotent-upper", 3, &small_params()).unwrap();
        for i in 0..g.set.len() {
            let det = unflatten(g.set.point(i), 3).determinant();
            assert!(det.abs() > 1e-8);
        }
    }

    #[test]
    fn unknown_group_errors() {
        assert!(matches!(
            sample_group("SL2", 2, &GroupParams::default()),
            Err(ConelabError::UnknownCatalog(_))
        ));
    }
}

//! Linear hulls of cone estimates and continuity of subspace-valued maps.
//!
//! The linear hull of a cone estimate is the span of its member directions,
//! extracted by singular-value thresholding. Comparing a cone with its hull
//! over the direction grid yields a "is the cone already a vector space"
//! check, and fields of subspaces indexed by base points are compared by the
//! principal angle of [`crate::exterior::subspace_angle`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cones::ConeEstimate;
use crate::error::{ConelabError, Result};
use crate::exterior::{dist_to_subspace, subspace_angle, Subspace};

/// Default relative singular-value threshold for hull dimension estimation.
pub const DEFAULT_SIGMA_TOL: f64 = 0.1;

/// Span of the member directions of a cone estimate. Members are weighted
/// equally; an estimate without members yields the zero subspace.
pub fn linear_hull(cone: &ConeEstimate, sigma_tol: f64) -> Subspace {
    let n = cone.base_point.len();
    let members: Vec<DVector<f64>> = cone
        .members()
        .into_iter()
        .map(|v| DVector::from_column_slice(v))
        .collect();
    Subspace::from_spanning(&members, n, sigma_tol)
}

/// Result of comparing a cone estimate against its own linear hull.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorSpaceCheck {
    pub verdict: bool,
    /// Worst excess max(score) − (τ + tol) over grid directions inside the
    /// hull; negative values certify the verdict with room to spare.
    pub margin: f64,
    pub hull_dim: usize,
}

/// True iff every grid direction lying in the linear hull (within angular
/// slack `hull_angle_tol`) has cone score ≤ τ + tol, i.e. the estimated cone
/// coincides with the vector space it spans.
pub fn is_vector_space(
    cone: &ConeEstimate,
    sigma_tol: f64,
    tol: f64,
    hull_angle_tol: f64,
) -> Result<VectorSpaceCheck> {
    let hull = linear_hull(cone, sigma_tol);
    let bound = cone.tau + tol;
    if hull.dim() == 0 {
        return Ok(VectorSpaceCheck {
            verdict: true,
            margin: -bound,
            hull_dim: 0,
        });
    }
    let dist_tol = hull_angle_tol.sin().abs();
    let mut worst = f64::NEG_INFINITY;
    for d in &cone.directions {
        let v = DVector::from_column_slice(&d.v);
        if dist_to_subspace(&v, &hull)? <= dist_tol {
            worst = worst.max(d.score);
        }
    }
    if worst == f64::NEG_INFINITY {
        return Err(ConelabError::InsufficientData(
            "no grid direction lies in the linear hull".into(),
        ));
    }
    Ok(VectorSpaceCheck {
        verdict: worst <= bound,
        margin: worst - bound,
        hull_dim: hull.dim(),
    })
}

/// A subspace attached to each of a list of base points in a common ambient
/// space. Dimensions may vary across points.
#[derive(Debug, Clone)]
pub struct SubspaceField {
    ambient_dim: usize,
    base_points: Vec<Vec<f64>>,
    subspaces: Vec<Subspace>,
}

/// JSON mirror: orthonormal bases stored row-major (rows = ambient axes).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SubspaceFieldJson {
    ambient_dim: usize,
    entries: Vec<FieldEntryJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FieldEntryJson {
    base_point: Vec<f64>,
    dim: usize,
    basis_rows: Vec<Vec<f64>>,
}

impl SubspaceField {
    pub fn new(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            base_points: Vec::new(),
            subspaces: Vec::new(),
        }
    }

    pub fn push(&mut self, base_point: Vec<f64>, subspace: Subspace) -> Result<()> {
        if base_point.len() != self.ambient_dim || subspace.ambient_dim() != self.ambient_dim {
            return Err(ConelabError::DimensionMismatch(
                self.ambient_dim,
                base_point.len().max(subspace.ambient_dim()),
            ));
        }
        self.base_points.push(base_point);
        self.subspaces.push(subspace);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.base_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn base_point(&self, i: usize) -> &[f64] {
        &self.base_points[i]
    }

    pub fn subspace(&self, i: usize) -> &Subspace {
        &self.subspaces[i]
    }
}

impl Serialize for SubspaceField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .base_points
            .iter()
            .zip(&self.subspaces)
            .map(|(p, sub)| FieldEntryJson {
                base_point: p.clone(),
                dim: sub.dim(),
                basis_rows: (0..sub.ambient_dim())
                    .map(|r| (0..sub.dim()).map(|c| sub.basis()[(r, c)]).collect())
                    .collect(),
            })
            .collect();
        SubspaceFieldJson {
            ambient_dim: self.ambient_dim,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubspaceField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SubspaceFieldJson::deserialize(d)?;
        let mut field = SubspaceField::new(raw.ambient_dim);
        for e in raw.entries {
            let basis = DMatrix::from_fn(raw.ambient_dim, e.dim, |r, c| e.basis_rows[r][c]);
            let sub = Subspace::from_orthonormal(basis).map_err(serde::de::Error::custom)?;
            field.push(e.base_point, sub).map_err(serde::de::Error::custom)?;
        }
        Ok(field)
    }
}

/// Continuity defect of a subspace field at one of its points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldContinuity {
    /// Max principal angle to equi-dimensional neighbors within the radius.
    pub defect: f64,
    pub probe_radius: f64,
    /// Set when a neighbor inside the radius has a different dimension;
    /// such neighbors are excluded from the angle maximum.
    pub dim_mismatch: bool,
    pub compared: usize,
}

/// Max angle between the subspace at field point `at` and the subspaces at
/// all other field points within `probe_radius`. Neighbors whose dimension
/// differs are flagged, not compared.
pub fn field_continuity(
    field: &SubspaceField,
    at: usize,
    probe_radius: f64,
) -> Result<FieldContinuity> {
    if at >= field.len() {
        return Err(ConelabError::Config(format!(
            "field index {at} out of range {}",
            field.len()
        )));
    }
    let x = field.base_point(at);
    let vx = field.subspace(at);
    let mut defect: f64 = 0.0;
    let mut dim_mismatch = false;
    let mut compared = 0;
    for j in 0..field.len() {
        if j == at {
            continue;
        }
        let d2: f64 = field
            .base_point(j)
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d2.sqrt() > probe_radius {
            continue;
        }
        let vy = field.subspace(j);
        if vy.dim() != vx.dim() {
            dim_mismatch = true;
            continue;
        }
        if vx.dim() == 0 {
            compared += 1;
            continue;
        }
        defect = defect.max(subspace_angle(vx, vy)?);
        compared += 1;
    }
    if compared == 0 && !dim_mismatch {
        return Err(ConelabError::InsufficientData(format!(
            "no field points within probe radius {probe_radius}"
        )));
    }
    Ok(FieldContinuity {
        defect,
        probe_radius,
        dim_mismatch,
        compared,
    })
}

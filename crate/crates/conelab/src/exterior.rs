//! Grassmann exterior-algebra primitives.
//!
//! Simple k-vectors (blades) are stored as their spanning vectors; all inner
//! products are evaluated through Gram determinants, never through expanded
//! wedge coordinates. For blades a = v1∧...∧vk and b = w1∧...∧wk:
//!
//!   ⟨a, b⟩ = det( [⟨vi, wj⟩]_{i,j} )
//!
//! The blade norm ‖a‖ = sqrt(⟨a,a⟩) is the k-volume of the parallelepiped
//! spanned by the vi. Derived quantities:
//!
//!   dist(x, span{vi}) = ‖a ∧ x‖ / ‖a‖
//!   ang(V, W)         = arccos( |⟨a, b⟩| / (‖a‖·‖b‖) )   for dim V = dim W
//!
//! cos(ang) is the volume-reduction factor of orthogonal projection from V
//! onto W and is basis-independent.

use nalgebra::{DMatrix, DVector};

use crate::error::{ConelabError, Result};

/// Relative rank tolerance: a blade whose norm is below this fraction of the
/// product of its spanning-vector norms is treated as degenerate (norm 0).
pub const EPS_RANK: f64 = 1e-10;

/// Orthonormality tolerance for subspace bases.
pub const EPS_ORTHO: f64 = 1e-10;

/// A simple k-vector v1 ∧ ... ∧ vk in Rⁿ, stored by its spanning vectors.
#[derive(Debug, Clone)]
pub struct Blade {
    vectors: Vec<DVector<f64>>,
    ambient_dim: usize,
}

impl Blade {
    /// Build a blade from k spanning vectors; requires 1 ≤ k ≤ n and equal lengths.
    pub fn new(vectors: Vec<DVector<f64>>) -> Result<Self> {
        let k = vectors.len();
        if k == 0 {
            return Err(ConelabError::InsufficientData(
                "blade needs at least one spanning vector".into(),
            ));
        }
        let n = vectors[0].len();
        for v in &vectors {
            if v.len() != n {
                return Err(ConelabError::DimensionMismatch(n, v.len()));
            }
        }
        if k > n {
            return Err(ConelabError::GradeMismatch(k, n));
        }
        Ok(Self {
            vectors,
            ambient_dim: n,
        })
    }

    /// Grade k of the blade.
    pub fn grade(&self) -> usize {
        self.vectors.len()
    }

    /// Ambient dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Spanning vectors.
    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// The blade extended by one vector: v1 ∧ ... ∧ vk ∧ x.
    pub fn wedge(&self, x: &DVector<f64>) -> Result<Self> {
        if x.len() != self.ambient_dim {
            return Err(ConelabError::DimensionMismatch(self.ambient_dim, x.len()));
        }
        let mut vectors = self.vectors.clone();
        vectors.push(x.clone());
        Blade::new(vectors)
    }
}

/// Gram inner product ⟨a, b⟩ = det([⟨vi, wj⟩]).
pub fn gram_inner(a: &Blade, b: &Blade) -> Result<f64> {
    if a.grade() != b.grade() {
        return Err(ConelabError::GradeMismatch(a.grade(), b.grade()));
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(ConelabError::DimensionMismatch(
            a.ambient_dim(),
            b.ambient_dim(),
        ));
    }
    let k = a.grade();
    let gram = DMatrix::from_fn(k, k, |i, j| a.vectors[i].dot(&b.vectors[j]));
    // LU with partial pivoting: stable determinant for the small k in play.
    Ok(gram.lu().determinant())
}

/// Blade norm sqrt(⟨a,a⟩): the k-volume of the spanned parallelepiped.
///
/// Degenerate blades (linearly dependent spanning vectors, relative to
/// `EPS_RANK`) report norm 0 exactly.
pub fn blade_norm(a: &Blade) -> f64 {
    let g = gram_inner(a, a).expect("self inner product is always well-formed");
    // Gram determinants of real vectors are non-negative; clamp float undershoot.
    let norm = g.max(0.0).sqrt();
    let scale: f64 = a.vectors.iter().map(|v| v.norm()).product();
    if norm <= EPS_RANK * scale {
        0.0
    } else {
        norm
    }
}

/// A d-dimensional linear subspace of Rⁿ, stored as an n×d orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wrap an already-orthonormal basis; columns must satisfy BᵀB = I within `EPS_ORTHO`.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        let d = basis.ncols();
        let gram = basis.transpose() * &basis;
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expected).abs() > EPS_ORTHO {
                    return Err(ConelabError::Config(format!(
                        "basis not orthonormal: gram[{i},{j}] = {}",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(Self { basis })
    }

    /// Orthonormalize a spanning set via SVD; singular directions below
    /// `sigma_tol` times the top singular value are dropped.
    pub fn from_spanning(vectors: &[DVector<f64>], n: usize, sigma_tol: f64) -> Self {
        if vectors.is_empty() {
            return Self::zero(n);
        }
        let mat = DMatrix::from_columns(vectors);
        let svd = mat.svd(true, false);
        let u = svd.u.expect("svd with u requested");
        let sv = &svd.singular_values;
        let top = sv.iter().cloned().fold(0.0_f64, f64::max);
        if top <= 0.0 {
            return Self::zero(n);
        }
        let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > sigma_tol * top).collect();
        if keep.is_empty() {
            return Self::zero(n);
        }
        let cols: Vec<DVector<f64>> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
        Self {
            basis: DMatrix::from_columns(&cols),
        }
    }

    /// The zero subspace {0} ⊂ Rⁿ.
    pub fn zero(n: usize) -> Self {
        Self {
            basis: DMatrix::zeros(n, 0),
        }
    }

    /// Span of a single non-zero vector.
    pub fn line(v: &DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if norm <= 0.0 {
            return Err(ConelabError::Config("zero vector spans no line".into()));
        }
        Ok(Self {
            basis: DMatrix::from_columns(&[v / norm]),
        })
    }

    /// Ambient dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Subspace dimension d.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis matrix (n×d).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection of x onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(self.ambient_dim());
        }
        &self.basis * (self.basis.transpose() * x)
    }

    /// Basis blade v1 ∧ ... ∧ vd; requires d ≥ 1.
    pub fn blade(&self) -> Result<Blade> {
        let cols: Vec<DVector<f64>> = self.basis.column_iter().map(|c| c.into_owned()).collect();
        Blade::new(cols)
    }
}

/// Distance from x to the subspace V via the wedge formula ‖(∧vi) ∧ x‖ / ‖∧vi‖.
///
/// For the zero subspace the distance is ‖x‖ by convention.
pub fn dist_to_subspace(x: &DVector<f64>, v: &Subspace) -> Result<f64> {
    if x.len() != v.ambient_dim() {
        return Err(ConelabError::DimensionMismatch(v.ambient_dim(), x.len()));
    }
    if v.dim() == 0 {
        return Ok(x.norm());
    }
    if v.dim() == v.ambient_dim() {
        return Ok(0.0);
    }
    let base = v.blade()?;
    let denom = blade_norm(&base);
    debug_assert!(denom > 0.0, "orthonormal basis blade has unit norm");
    let extended = base.wedge(x)?;
    Ok(blade_norm(&extended) / denom)
}

/// Angle between equi-dimensional subspaces, in [0, π/2]:
/// arccos( |⟨∧vi, ∧wi⟩| / (‖∧vi‖·‖∧wi‖) ). Requires dim ≥ 1.
pub fn subspace_angle(v: &Subspace, w: &Subspace) -> Result<f64> {
    if v.dim() != w.dim() {
        return Err(ConelabError::SubspaceDimMismatch(v.dim(), w.dim()));
    }
    if v.dim() == 0 {
        return Err(ConelabError::Config(
            "angle undefined for zero-dimensional subspaces".into(),
        ));
    }
    if v.ambient_dim() != w.ambient_dim() {
        return Err(ConelabError::DimensionMismatch(
            v.ambient_dim(),
            w.ambient_dim(),
        ));
    }
    let a = v.blade()?;
    let b = w.blade()?;
    let na = blade_norm(&a);
    let nb = blade_norm(&b);
    let cos = (gram_inner(&a, &b)?.abs() / (na * nb)).clamp(0.0, 1.0);
    Ok(cos.acos())
}

/// Volume-reduction factor of orthogonal projection between equi-dimensional
/// subspaces: cos(subspace_angle(V, W)).
pub fn projection_factor(v: &Subspace, w: &Subspace) -> Result<f64> {
    Ok(subspace_angle(v, w)?.cos())
}

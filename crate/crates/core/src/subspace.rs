//! Shape subspaces and their similarity.
//!
//! A shape is a K×3 matrix whose rows are landmark positions. After removing
//! the column means, the span of its columns in R^K is unchanged by any
//! invertible affine map of the points, so comparing spans compares shapes up
//! to affine motion. Similarity is the mean squared cosine of the canonical
//! angles between two spans.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::point::Point2;

/// Default rank cut-off, relative to the largest singular value.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

/// Maximum number of basis vectors kept (one per coordinate axis).
pub const MAX_BASIS_DIM: usize = 3;

/// K×3 matrix of landmark coordinates; row `i` is landmark `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeMatrix {
    rows: Vec<[f64; 3]>,
}

impl ShapeMatrix {
    pub fn new(rows: Vec<[f64; 3]>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "shape matrix needs at least 3 points, got {}",
                rows.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("shape matrix".into()));
        }
        Ok(Self { rows })
    }

    /// Planar shape with z fixed to zero.
    pub fn from_planar(points: &[Point2]) -> Result<Self> {
        Self::new(points.iter().map(|p| [p.x, p.y, 0.0]).collect())
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    /// Number of points K.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), 3, |r, c| self.rows[r][c])
    }

    fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Orthonormal basis (K×N, N ≤ 3) of a centred shape's column space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    vectors: DMatrix<f64>,
    singular_values: Vec<f64>,
}

impl SubspaceBasis {
    /// Ambient dimension K.
    pub fn k(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of retained basis vectors N.
    pub fn effective_dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Basis vectors as columns.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }
}

/// Subtracts the column-wise mean from every row.
pub fn center_shape_matrix(m: &ShapeMatrix) -> ShapeMatrix {
    let k = m.rows.len() as f64;
    let mut mean = [0.0; 3];
    for row in &m.rows {
        for c in 0..3 {
            mean[c] += row[c];
        }
    }
    for v in &mut mean {
        *v /= k;
    }
    let rows = m
        .rows
        .iter()
        .map(|r| [r[0] - mean[0], r[1] - mean[1], r[2] - mean[2]])
        .collect();
    ShapeMatrix { rows }
}

/// Left singular vectors of the centred shape whose singular values exceed
/// `rank_tolerance × σ_max`.
///
/// Planar shapes (z ≡ 0) therefore yield at most two vectors; the null
/// direction of a rank-deficient matrix is never returned.
pub fn shape_subspace_basis(m: &ShapeMatrix, rank_tolerance: f64) -> Result<SubspaceBasis> {
    if !(rank_tolerance > 0.0 && rank_tolerance.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "rank tolerance must be positive, got {rank_tolerance}"
        )));
    }
    let centred = center_shape_matrix(m).to_dmatrix();
    let k = centred.nrows();

    let svd = centred.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let sigma_max = svd.singular_values[order[0]];
    // Identical points centre to rounding noise only.
    let noise_floor = 64.0 * f64::EPSILON * m.max_abs() * (k as f64).sqrt();
    if sigma_max.is_nan() || sigma_max <= noise_floor {
        return Err(Error::DegenerateShape(
            "all points coincide; centred shape matrix is zero".into(),
        ));
    }

    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > rank_tolerance * sigma_max)
        .take(MAX_BASIS_DIM)
        .collect();
    let vectors = DMatrix::from_fn(k, keep.len(), |r, c| u[(r, keep[c])]);
    let singular_values = keep.iter().map(|&i| svd.singular_values[i]).collect();
    Ok(SubspaceBasis {
        vectors,
        singular_values,
    })
}

/// Mean squared cosine of the canonical angles, `‖ΦᵀΨ‖²_F / N`.
pub fn subspace_similarity(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    check_compatible(a, b)?;
    Ok(cross_gram_score(a, b))
}

/// Arithmetic mean of [`subspace_similarity`] between `test` and each bank entry.
pub fn mean_similarity(test: &SubspaceBasis, bank: &[SubspaceBasis]) -> Result<f64> {
    if bank.is_empty() {
        return Err(Error::InvalidConfig("similarity bank is empty".into()));
    }
    for b in bank {
        check_compatible(test, b)?;
    }
    let total: f64 = bank.iter().map(|b| cross_gram_score(test, b)).sum();
    Ok(total / bank.len() as f64)
}

fn check_compatible(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<()> {
    if a.k() != b.k() || a.effective_dim() != b.effective_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces K={}/N={} and K={}/N={}",
            a.k(),
            a.effective_dim(),
            b.k(),
            b.effective_dim()
        )));
    }
    Ok(())
}

pub(crate) fn cross_gram_score(a: &SubspaceBasis, b: &SubspaceBasis) -> f64 {
    let n = a.effective_dim();
    let mut total = 0.0;
    for i in 0..n {
        let phi = a.vectors.column(i);
        for j in 0..b.effective_dim() {
            let d = phi.dot(&b.vectors.column(j));
            total += d * d;
        }
    }
    total / n as f64
}

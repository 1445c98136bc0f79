//! Dense ground truth for exact mode.
//!
//! Materializes whole orbits as `|G| m x |G| k` matrices and answers the same
//! questions as [`crate::fiberization`] by plain dense linear algebra, with no
//! Fourier transform anywhere on this path.

use crate::error::{Error, Result};
use crate::fiberization::{Bounds, Family, Tolerances};
use crate::group_model::{translate, GroupVector, SystemSpace};
use crate::linalg::{column_basis, oblique_projector, projector, rank_cutoff, singular_values, CMat, ONE};

/// Largest `|G| * m * k` accepted by the dense oracle.
pub const SIZE_LIMIT: usize = 4096;

/// Columns `l_g x_j` for all `(g, j)` in lexicographic order; rows `(h, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFamilyMatrix {
    pub matrix: CMat,
    pub members: usize,
}

impl DenseFamilyMatrix {
    pub fn column_index(&self, g: i64, j: usize) -> usize {
        g as usize * self.members + j
    }
}

pub fn dense_family_matrix(x: &Family) -> Result<DenseFamilyMatrix> {
    let space = x.space();
    let n = space.group.order().ok_or(Error::NotExact)?;
    let size = n * space.channels * x.len();
    if size > SIZE_LIMIT {
        return Err(Error::SizeLimit {
            size,
            limit: SIZE_LIMIT,
        });
    }
    let k = x.len();
    let mut matrix = CMat::zeros(n * space.channels, n * k);
    for g in 0..n as i64 {
        for (j, v) in x.members().iter().enumerate() {
            let col = translate(g, v).dense()?;
            matrix.set_column(g as usize * k + j, &col);
        }
    }
    Ok(DenseFamilyMatrix { matrix, members: k })
}

/// Squared extreme singular values of the orbit matrix.
pub fn dense_riesz_bounds(x: &Family, tol: &Tolerances) -> Result<Bounds> {
    let d = dense_family_matrix(x)?;
    if x.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let sv = singular_values(&d.matrix);
    let top = sv[0] * sv[0];
    let low = if d.matrix.ncols() > d.matrix.nrows() {
        0.0
    } else {
        let s = *sv.last().expect("nonempty");
        s * s
    };
    if low <= rank_cutoff(top, tol.rank) {
        return Err(Error::NotRiesz { min_eigenvalue: low });
    }
    Ok(Bounds {
        lower: low,
        upper: top,
        exact: true,
    })
}

/// Extreme nonzero squared singular values (frame bounds on the span).
pub fn dense_frame_bounds(x: &Family, tol: &Tolerances) -> Result<Bounds> {
    let d = dense_family_matrix(x)?;
    if x.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let sv = singular_values(&d.matrix);
    let top = sv[0] * sv[0];
    let cut = rank_cutoff(top, tol.rank);
    let low = sv
        .iter()
        .map(|s| s * s)
        .filter(|&v| v > cut)
        .fold(f64::INFINITY, f64::min);
    if !low.is_finite() {
        return Err(Error::InvalidInput("family spans the zero subspace".into()));
    }
    Ok(Bounds {
        lower: low,
        upper: top,
        exact: true,
    })
}

/// Orthogonal projector onto the column span.
pub fn dense_projector(cols: &CMat, tol: &Tolerances) -> CMat {
    projector(&column_basis(cols, tol.rank))
}

/// Oblique projector onto span(`onto`) along span(`along`), zero on the
/// orthogonal complement of their sum.
pub fn dense_oblique_projector(onto: &CMat, along: &CMat, tol: &Tolerances) -> Result<CMat> {
    let range = column_basis(onto, tol.rank);
    let kernel = column_basis(along, tol.rank);
    oblique_projector(&range, &kernel, tol.rank).ok_or_else(|| Error::NotDirectSum("dense spans intersect".into()))
}

/// Matrix of `l_g` on `l2(G)^m` in `(h, c)` row order.
pub fn dense_translation(space: &SystemSpace, g: i64) -> Result<CMat> {
    let dim = space.dense_dim().ok_or(Error::NotExact)?;
    let m = space.channels;
    let mut out = CMat::zeros(dim, dim);
    for h in 0..(dim / m) as i64 {
        let gh = space.group.compose(g, h);
        for ch in 0..m {
            out[(gh as usize * m + ch, h as usize * m + ch)] = ONE;
        }
    }
    Ok(out)
}

/// Dense orbit Gram `<l_h x_j, l_g x_i>` arranged as `D^* D`.
pub fn dense_orbit_gram(x: &Family) -> Result<CMat> {
    let d = dense_family_matrix(x)?;
    Ok(d.matrix.adjoint() * &d.matrix)
}

/// Dense columns of a list of vectors.
pub fn dense_columns(space: &SystemSpace, vectors: &[GroupVector]) -> Result<CMat> {
    let dim = space.dense_dim().ok_or(Error::NotExact)?;
    let mut out = CMat::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        out.set_column(j, &v.dense()?);
    }
    Ok(out)
}

//! Wandering subspaces: certification, the Bessel dimension count, and the
//! complementary wandering subspace of a wandering subspace inside another.
//!
//! A family `M` generates a wandering subspace exactly when its orbit is
//! orthonormal, i.e. its Gram fibers are the identity at every dual point.

use crate::error::{Error, Result};
use crate::fiberization::{gram_fibers, is_contained, Family, FiberFamily, Tolerances};
use crate::group_model::{translate, GroupVector};
use crate::linalg::{column_basis, numerical_rank, pivoted_basis, polar_unitary, projector, spectral_norm, CMat};

/// Largest spectral jump tolerated between aligned bases at adjacent grid points.
pub const ALIGNMENT_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct WanderingCertificate {
    pub family: FiberFamily,
    /// Max over dual points of the entrywise deviation of the Gram fiber from `I`.
    pub max_gram_residual: f64,
    pub valid: bool,
    /// Fibers have full rank `m` everywhere: the orbit spans the whole space.
    pub complete: bool,
}

pub fn verify_wandering(m: &FiberFamily, tol: &Tolerances) -> WanderingCertificate {
    let max_gram_residual = match gram_fibers(m) {
        Ok(g) => g.identity_residual(),
        Err(_) => 0.0,
    };
    let channels = m.space().channels;
    let complete = m.fibers().iter().all(|f| numerical_rank(f, tol.rank) == channels);
    WanderingCertificate {
        family: m.clone(),
        max_gram_residual,
        valid: max_gram_residual <= tol.bio,
        complete,
    }
}

fn require_wandering(m: &FiberFamily, tol: &Tolerances) -> Result<()> {
    let cert = verify_wandering(m, tol);
    if cert.valid {
        Ok(())
    } else {
        Err(Error::NotWandering {
            residual: cert.max_gram_residual,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselAudit {
    pub dim_m: usize,
    pub dim_k: usize,
    /// `sum_j sum_g sum_i |<y_i, g x_j>|^2` with `y_i` from `M`, `x_j` from `K`.
    pub double_sum: f64,
    /// `|double_sum - dim_m| <= 1e-8` and `dim_m <= dim_k`.
    pub holds: bool,
}

/// Group elements `g` for which `<y, l_g x>` can be nonzero.
fn overlap_elements(y: &GroupVector, x: &GroupVector) -> Vec<i64> {
    let group = &y.space().group;
    if let Some(all) = group.elements() {
        return all.collect();
    }
    let (Some(ylo), Some(yhi)) = (y.support().min(), y.support().max()) else {
        return Vec::new();
    };
    let (Some(xlo), Some(xhi)) = (x.support().min(), x.support().max()) else {
        return Vec::new();
    };
    ((ylo - xhi)..=(yhi - xlo)).collect()
}

/// Halperin's count: for wandering `M` whose orbit span lies inside that of
/// the wandering `K`, the Bessel sums over the orbit of `K` add up to
/// `dim M`, which therefore cannot exceed `dim K`. Inner products are summed
/// directly in coefficient space.
pub fn bessel_dimension_audit(m: &Family, k: &Family, tol: &Tolerances) -> Result<BesselAudit> {
    let mf = m.fibers()?;
    let kf = k.fibers()?;
    require_wandering(&mf, tol)?;
    require_wandering(&kf, tol)?;
    if !is_contained(&mf, &kf, tol)? {
        return Err(Error::NotContained);
    }
    let mut double_sum = 0.0;
    for x in k.members() {
        for y in m.members() {
            for g in overlap_elements(y, x) {
                double_sum += y.inner(&translate(g, x)).norm_sqr();
            }
        }
    }
    let dim_m = m.len();
    let dim_k = k.len();
    Ok(BesselAudit {
        dim_m,
        dim_k,
        double_sum,
        holds: (double_sum - dim_m as f64).abs() <= 1e-8 && dim_m <= dim_k,
    })
}

/// Rotate `cur` by the unitary that best matches it to `prev`.
fn procrustes_align(prev: &CMat, cur: &CMat) -> (CMat, f64) {
    let u = polar_unitary(&(cur.adjoint() * prev));
    let aligned = cur * u;
    let residual = spectral_norm(&(&aligned - prev));
    (aligned, residual)
}

/// Orthonormal bases of `span(Y^(gamma)) minus span(X^(gamma))` (orthogonal
/// complement inside), `size` vectors per point. Bases are chosen by pivoted
/// Gram-Schmidt on the difference of projectors; on a sampled circle they are
/// then Procrustes-aligned along the grid.
pub(crate) fn complement_fibers(
    y_spans: &[CMat],
    x_spans: &[CMat],
    size: usize,
    exact: bool,
    tol: &Tolerances,
) -> Result<Vec<CMat>> {
    let mut out: Vec<CMat> = Vec::with_capacity(y_spans.len());
    for (p, (yb, xb)) in y_spans.iter().zip(x_spans).enumerate() {
        let q = projector(yb) - projector(xb);
        if numerical_rank(&q, tol.rank) != size {
            return Err(Error::NotRiesz { min_eigenvalue: 0.0 });
        }
        let basis = pivoted_basis(&q, size);
        let basis = match out.last() {
            Some(prev) if !exact && size > 0 => {
                let (aligned, residual) = procrustes_align(prev, &basis);
                if residual > ALIGNMENT_LIMIT {
                    return Err(Error::SelectionObstruction { point: p, residual });
                }
                aligned
            }
            _ => basis,
        };
        out.push(basis);
    }
    Ok(out)
}

/// Complementary wandering family `X'` with `G(X) + G(X')` an orthogonal
/// decomposition of the orbit span of `Y` and `|X'| = |Y| - |X|`.
///
/// `|X| = |Y|` yields an empty family.
pub fn complement_wandering(x: &FiberFamily, y: &FiberFamily, tol: &Tolerances) -> Result<FiberFamily> {
    if x.space() != y.space() {
        return Err(Error::SizeMismatch("families live in different spaces".into()));
    }
    require_wandering(x, tol)?;
    require_wandering(y, tol)?;
    if !is_contained(x, y, tol)? || x.len() > y.len() {
        return Err(Error::NotContained);
    }
    let size = y.len() - x.len();
    let y_spans: Vec<CMat> = y.fibers().iter().map(|f| column_basis(f, tol.rank)).collect();
    let x_spans: Vec<CMat> = x.fibers().iter().map(|f| column_basis(f, tol.rank)).collect();
    let fibers = complement_fibers(&y_spans, &x_spans, size, x.is_exact(), tol)?;
    FiberFamily::new(x.space(), size, fibers)
}

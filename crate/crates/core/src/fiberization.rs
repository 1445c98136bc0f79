//! Fiberization of orbit families.
//!
//! The orbit `G(X) = { l_g x_j }` of a finite family is unitarily equivalent,
//! through the Fourier transform, to a field of `m x k` matrices over the dual
//! group: column `j` of the fiber at `gamma` is the (unnormalized) transform
//! of `x_j`. Orbit Gram matrices become the pointwise products
//! `X^(gamma)^* X^(gamma)`, which is what every bound and span test below
//! works on.
//!
//! Normalization: fibers are `sum_g x(g) gamma(g)` in both modes, which makes
//! an orthonormal orbit family have identity Gram fibers exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group_model::{inverse_raw, raw_transform, translate, GroupVector, SystemSpace};
use crate::linalg::{
    column_basis, hermitian_eigenvalues, hstack, inv_sqrt_hpd, max_abs, max_principal_sine, numerical_rank,
    rank_cutoff, CMat, CVec, C64,
};

/// Rank and biorthogonality tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative cutoff on squared singular values (floor 1 on the scale).
    pub rank: f64,
    /// Absolute cutoff on entrywise Gram residuals.
    pub bio: f64,
}

impl Tolerances {
    pub const RANK: f64 = 1e-9;
    pub const BIO_EXACT: f64 = 1e-9;
    pub const BIO_SAMPLED: f64 = 1e-6;

    pub fn for_space(space: &SystemSpace) -> Self {
        Tolerances {
            rank: Self::RANK,
            bio: if space.is_exact() {
                Self::BIO_EXACT
            } else {
                Self::BIO_SAMPLED
            },
        }
    }
}

/// An ordered finite list of vectors in the same space.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    space: SystemSpace,
    members: Vec<GroupVector>,
}

impl Family {
    pub fn new(space: &SystemSpace, members: Vec<GroupVector>) -> Result<Self> {
        if members.iter().any(|v| v.space() != space) {
            return Err(Error::SizeMismatch("family members live in different spaces".into()));
        }
        Ok(Family {
            space: space.clone(),
            members,
        })
    }

    pub fn empty(space: &SystemSpace) -> Self {
        Family {
            space: space.clone(),
            members: Vec::new(),
        }
    }

    pub fn space(&self) -> &SystemSpace {
        &self.space
    }

    pub fn members(&self) -> &[GroupVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn concat(&self, other: &Family) -> Result<Family> {
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Family::new(&self.space, members)
    }

    /// Fiber matrices over the dual sampling of the family's space.
    pub fn fibers(&self) -> Result<FiberFamily> {
        let sampling = self.space.dual_sampling();
        let m = self.space.channels;
        let transforms = self
            .members
            .iter()
            .map(|v| raw_transform(v, &sampling))
            .collect::<Result<Vec<_>>>()?;
        let fibers = (0..sampling.len())
            .map(|p| CMat::from_fn(m, self.members.len(), |r, j| transforms[j][p][r]))
            .collect();
        Ok(FiberFamily {
            space: self.space.clone(),
            size: self.members.len(),
            fibers,
        })
    }
}

/// A family given by its fiber matrices (`m x k` per dual point).
///
/// Constructions work in this form. In exact mode it converts back to
/// coefficients with [`FiberFamily::to_family`]; in integer shift mode the
/// samples are all there is (no interpolation is attempted).
#[derive(Debug, Clone, PartialEq)]
pub struct FiberFamily {
    space: SystemSpace,
    size: usize,
    fibers: Vec<CMat>,
}

impl FiberFamily {
    pub fn new(space: &SystemSpace, size: usize, fibers: Vec<CMat>) -> Result<Self> {
        if fibers.len() != space.group.dual_size() {
            return Err(Error::SizeMismatch(format!(
                "{} fibers given, dual sampling has {} points",
                fibers.len(),
                space.group.dual_size()
            )));
        }
        if fibers.iter().any(|f| f.nrows() != space.channels || f.ncols() != size) {
            return Err(Error::SizeMismatch(format!(
                "every fiber must be {} x {size}",
                space.channels
            )));
        }
        if fibers
            .iter()
            .flat_map(|f| f.iter())
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidInput("non-finite fiber entry".into()));
        }
        Ok(FiberFamily {
            space: space.clone(),
            size,
            fibers,
        })
    }

    pub fn space(&self) -> &SystemSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn fibers(&self) -> &[CMat] {
        &self.fibers
    }

    pub fn is_exact(&self) -> bool {
        self.space.is_exact()
    }

    pub fn concat(&self, other: &FiberFamily) -> Result<FiberFamily> {
        if self.space != other.space {
            return Err(Error::SizeMismatch("families live in different spaces".into()));
        }
        let fibers = self
            .fibers
            .iter()
            .zip(&other.fibers)
            .map(|(a, b)| hstack(a, b))
            .collect();
        Ok(FiberFamily {
            space: self.space.clone(),
            size: self.size + other.size,
            fibers,
        })
    }

    /// Apply a pointwise map producing `m x k'` fibers.
    pub(crate) fn map_fibers(
        &self,
        size: usize,
        mut f: impl FnMut(usize, &CMat) -> Result<CMat>,
    ) -> Result<FiberFamily> {
        let fibers = self
            .fibers
            .iter()
            .enumerate()
            .map(|(p, x)| f(p, x))
            .collect::<Result<Vec<_>>>()?;
        FiberFamily::new(&self.space, size, fibers)
    }

    /// Inverse transform back to coefficient vectors (exact mode only).
    pub fn to_family(&self) -> Result<Family> {
        let n = self.space.group.order().ok_or(Error::NotExact)?;
        let sampling = self.space.dual_sampling();
        let members = (0..self.size)
            .map(|j| {
                let values: Vec<CVec> = self.fibers.iter().map(|f| f.column(j).into_owned()).collect();
                inverse_raw(&self.space, &sampling, &values, 1.0 / n as f64)
            })
            .collect::<Result<Vec<_>>>()?;
        Family::new(&self.space, members)
    }
}

/// Per-dual-point matrices (Gram fibers, operator fields).
#[derive(Debug, Clone, PartialEq)]
pub struct FiberField {
    pub matrices: Vec<CMat>,
    pub exact: bool,
}

impl FiberField {
    /// Largest entrywise deviation from the identity over all points.
    pub fn identity_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(|g| max_abs(&(g - CMat::identity(g.nrows(), g.ncols()))))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrices.iter().map(max_abs).fold(0.0, f64::max)
    }
}

/// Riesz or frame bounds `0 < lower <= upper`.
///
/// In integer shift mode the values are grid extrema, flagged `exact = false`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

/// Finitely supported coefficients indexed by (group element, family index).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientArray {
    entries: BTreeMap<(i64, usize), C64>,
}

impl CoefficientArray {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, g: i64, j: usize, z: C64) {
        *self.entries.entry((g, j)).or_default() += z;
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize, C64)> + '_ {
        self.entries.iter().map(|(&(g, j), &z)| (g, j, z))
    }
}

fn check_same_space(a: &FiberFamily, b: &FiberFamily) -> Result<()> {
    if a.space != b.space {
        return Err(Error::SizeMismatch("families live in different spaces".into()));
    }
    Ok(())
}

/// Gram fibers `X^(gamma)^* X^(gamma)`: entry `(i, j)` is
/// `sum_c conj(x^_{i,c}) x^_{j,c}`.
pub fn gram_fibers(x: &FiberFamily) -> Result<FiberField> {
    if x.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(FiberField {
        matrices: x.fibers.iter().map(|f| f.adjoint() * f).collect(),
        exact: x.is_exact(),
    })
}

/// Cross-Gram fibers `X^(gamma)^* Y^(gamma)`.
pub fn mixed_gramian(x: &FiberFamily, y: &FiberFamily) -> Result<FiberField> {
    check_same_space(x, y)?;
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(format!(
            "families of sizes {} and {} cannot be paired",
            x.len(),
            y.len()
        )));
    }
    Ok(FiberField {
        matrices: x.fibers.iter().zip(&y.fibers).map(|(a, b)| a.adjoint() * b).collect(),
        exact: x.is_exact(),
    })
}

/// Riesz bounds: the extreme eigenvalues of the Gram fibers.
pub fn riesz_bounds(x: &FiberFamily, tol: &Tolerances) -> Result<Bounds> {
    let gram = gram_fibers(x)?;
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut singular = false;
    for g in &gram.matrices {
        let vals = hermitian_eigenvalues(g);
        let lo = vals[0];
        let hi = *vals.last().expect("nonempty family");
        if lo <= rank_cutoff(hi, tol.rank) {
            singular = true;
        }
        lower = lower.min(lo);
        upper = upper.max(hi);
    }
    if singular {
        return Err(Error::NotRiesz { min_eigenvalue: lower });
    }
    Ok(Bounds {
        lower,
        upper,
        exact: x.is_exact(),
    })
}

/// Frame bounds of the orbit family on its closed span.
///
/// The lower bound is the smallest eigenvalue above the rank cutoff over
/// points with a nonzero fiber. In sampled mode the fiber rank must be
/// constant across the grid.
pub fn frame_bounds(x: &FiberFamily, tol: &Tolerances) -> Result<Bounds> {
    let gram = gram_fibers(x)?;
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut min_rank = usize::MAX;
    let mut max_rank = 0;
    for g in &gram.matrices {
        let vals = hermitian_eigenvalues(g);
        let hi = *vals.last().expect("nonempty family");
        let cut = rank_cutoff(hi, tol.rank);
        let kept: Vec<f64> = vals.iter().copied().filter(|&v| v > cut).collect();
        min_rank = min_rank.min(kept.len());
        max_rank = max_rank.max(kept.len());
        if let Some(&lo) = kept.first() {
            lower = lower.min(lo);
            upper = upper.max(hi);
        }
    }
    if !x.is_exact() && min_rank != max_rank {
        return Err(Error::RankJump { min_rank, max_rank });
    }
    if max_rank == 0 {
        return Err(Error::InvalidInput("family spans the zero subspace".into()));
    }
    Ok(Bounds {
        lower,
        upper,
        exact: x.is_exact(),
    })
}

/// Outcome of a biorthogonality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biorthogonality {
    pub holds: bool,
    pub residual: f64,
}

pub fn is_biorthogonal(x: &FiberFamily, y: &FiberFamily, tol: &Tolerances) -> Result<Biorthogonality> {
    let residual = mixed_gramian(x, y)?.identity_residual();
    Ok(Biorthogonality {
        holds: residual <= tol.bio,
        residual,
    })
}

/// Column-space containment of the fibers of `x` in those of `y` at every point.
pub fn is_contained(x: &FiberFamily, y: &FiberFamily, tol: &Tolerances) -> Result<bool> {
    check_same_space(x, y)?;
    Ok(x.fibers
        .iter()
        .zip(&y.fibers)
        .all(|(a, b)| numerical_rank(b, tol.rank) == numerical_rank(&hstack(b, a), tol.rank)))
}

/// Orthonormal bases of the fiber column spaces.
pub fn span_bases(x: &FiberFamily, tol: &Tolerances) -> Vec<CMat> {
    x.fibers.iter().map(|f| column_basis(f, tol.rank)).collect()
}

pub fn fiber_ranks(x: &FiberFamily, tol: &Tolerances) -> Vec<usize> {
    x.fibers.iter().map(|f| numerical_rank(f, tol.rank)).collect()
}

/// Largest principal angle between the fiber spans of `x` and `y`, over all
/// dual points. Equal to `pi/2` wherever the span dimensions differ.
pub fn max_span_angle(x: &FiberFamily, y: &FiberFamily, tol: &Tolerances) -> Result<f64> {
    check_same_space(x, y)?;
    Ok(x.fibers
        .iter()
        .zip(&y.fibers)
        .map(|(a, b)| max_principal_sine(&column_basis(a, tol.rank), &column_basis(b, tol.rank)).asin())
        .fold(0.0, f64::max))
}

/// `Z^(gamma) = X^(gamma) G(gamma)^{-1/2}`: an orthonormal orbit family
/// with the same fiber spans.
pub fn orthonormalize(x: &FiberFamily, tol: &Tolerances) -> Result<FiberFamily> {
    riesz_bounds(x, tol)?;
    x.map_fibers(x.len(), |_, f| {
        let g = f.adjoint() * f;
        let inv = inv_sqrt_hpd(&g, tol.rank).ok_or(Error::NotRiesz {
            min_eigenvalue: hermitian_eigenvalues(&g)[0],
        })?;
        Ok(f * inv)
    })
}

/// `sum_{g, j} a_{g,j} l_g x_j`.
pub fn synthesize(x: &Family, a: &CoefficientArray) -> Result<GroupVector> {
    let mut out = GroupVector::zero(x.space());
    for (g, j, z) in a.iter() {
        let member = x
            .members()
            .get(j)
            .ok_or_else(|| Error::InvalidInput(format!("family index {j} out of range 0..{}", x.len())))?;
        if !x.space().group.contains(g) {
            return Err(Error::InvalidInput(format!("element code {g} not in group")));
        }
        out.axpy(z, &translate(g, member));
    }
    Ok(out)
}

//! Oblique projections and the wavelet constructions built on them.
//!
//! Everything here is fiberwise. For a finitely generated invariant subspace
//! `V_1 = V_0 (+) W_0` the oblique projector onto `W_0` along `V_0` is
//! decomposable: it acts at each dual point as the finite-dimensional
//! oblique projector between the fiber spans. Applied to an orthonormal
//! generating family `Z` of `V = V_1 minus V_0` (orthogonal complement) it yields
//! generators `Gamma = P Z` whose orbit is a Riesz basis of `W_0`.

use crate::error::{Error, Result};
use crate::fiberization::{
    frame_bounds, is_biorthogonal, is_contained, riesz_bounds, Biorthogonality, Bounds, Family, FiberFamily,
    FiberField, Tolerances,
};
use crate::group_model::{translate, GroupVector, SystemSpace};
use crate::linalg::{
    column_basis, hstack, max_abs, max_principal_sine, null_space, numerical_rank,
    oblique_projector as fiber_oblique_projector, projector, rank_cutoff, singular_values, spectral_norm, CMat,
};
use crate::oracle::dense_columns;
use crate::robertson::complement_fibers;

/// Principal-angle bound used for subspace equality.
pub const SPAN_ANGLE_TOL: f64 = 1e-8;

/// A closed subspace handed to the constructions: either the orbit span of
/// a generating family (invariant by construction) or, in exact mode, the
/// linear span of an explicit list of vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Subspace {
    Orbit(FiberFamily),
    Dense(Vec<GroupVector>),
}

/// `V_1 = V_0 (+) W_0` given by generating families.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliqueSplit {
    pub v0: FiberFamily,
    pub w0: FiberFamily,
    pub within: FiberFamily,
}

impl ObliqueSplit {
    pub fn new(v0: FiberFamily, w0: FiberFamily, within: FiberFamily, tol: &Tolerances) -> Result<Self> {
        if v0.space() != within.space() || w0.space() != within.space() {
            return Err(Error::SizeMismatch("split families live in different spaces".into()));
        }
        if !is_contained(&v0, &within, tol)? {
            return Err(Error::NotContained);
        }
        if !is_contained(&w0, &within, tol)? {
            return Err(Error::NotDirectSum("W0 is not inside V1".into()));
        }
        for (p, ((a, b), v1)) in v0.fibers().iter().zip(w0.fibers()).zip(within.fibers()).enumerate() {
            let ra = numerical_rank(a, tol.rank);
            let rb = numerical_rank(b, tol.rank);
            let joint = numerical_rank(&hstack(a, b), tol.rank);
            if joint != ra + rb {
                return Err(Error::NotDirectSum(format!("V0 and W0 intersect at dual point {p}")));
            }
            if joint != numerical_rank(v1, tol.rank) {
                return Err(Error::NotDirectSum(format!(
                    "V0 + W0 misses part of V1 at dual point {p}"
                )));
            }
        }
        Ok(ObliqueSplit { v0, w0, within })
    }
}

/// A fiberwise linear operator on `C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorField {
    pub space: SystemSpace,
    pub field: FiberField,
}

impl OperatorField {
    pub fn apply(&self, x: &FiberFamily) -> Result<FiberFamily> {
        if x.space() != &self.space {
            return Err(Error::SizeMismatch(
                "operator and family live in different spaces".into(),
            ));
        }
        x.map_fibers(x.len(), |p, f| Ok(&self.field.matrices[p] * f))
    }

    /// `max_gamma |P(gamma)^2 - P(gamma)|`.
    pub fn idempotence_residual(&self) -> f64 {
        self.field
            .matrices
            .iter()
            .map(|p| max_abs(&(p * p - p)))
            .fold(0.0, f64::max)
    }

    /// Dense matrix on `l2(G)^m` (exact mode).
    pub fn dense(&self) -> Result<CMat> {
        let n = self.space.group.order().ok_or(Error::NotExact)?;
        let m = self.space.channels;
        let basis = (0..n as i64)
            .flat_map(|g| (0..m).map(move |ch| (g, ch)))
            .map(|(g, ch)| GroupVector::delta(&self.space, g, ch))
            .collect::<Result<Vec<_>>>()?;
        let fam = Family::new(&self.space, basis)?.fibers()?;
        let image = self.apply(&fam)?.to_family()?;
        dense_columns(&self.space, image.members())
    }
}

fn check_spaces(families: &[&FiberFamily]) -> Result<()> {
    if families.windows(2).any(|w| w[0].space() != w[1].space()) {
        return Err(Error::SizeMismatch("families live in different spaces".into()));
    }
    Ok(())
}

/// Orthonormal generators of `V = V_1 minus V_0` where `V_1`, `V_0` are the
/// orbit spans of `y`, `x`.
pub fn orth_complement_in(y: &FiberFamily, x: &FiberFamily, tol: &Tolerances) -> Result<FiberFamily> {
    check_spaces(&[y, x])?;
    riesz_bounds(y, tol)?;
    if !is_contained(x, y, tol)? {
        return Err(Error::NotContained);
    }
    let y_spans: Vec<CMat> = y.fibers().iter().map(|f| column_basis(f, tol.rank)).collect();
    let x_spans: Vec<CMat> = x.fibers().iter().map(|f| column_basis(f, tol.rank)).collect();
    let dims: Vec<usize> = y_spans
        .iter()
        .zip(&x_spans)
        .map(|(a, b)| a.ncols() - b.ncols())
        .collect();
    let size = dims[0];
    if dims.iter().any(|&d| d != size) {
        return Err(Error::RankJump {
            min_rank: *dims.iter().min().expect("nonempty"),
            max_rank: *dims.iter().max().expect("nonempty"),
        });
    }
    let fibers = complement_fibers(&y_spans, &x_spans, size, y.is_exact(), tol)?;
    FiberFamily::new(y.space(), size, fibers)
}

/// Whether the subspace is invariant under the group. Orbit spans always are;
/// dense spans are tested generator by generator with a rank test.
pub fn is_invariant(w: &Subspace, space: &SystemSpace, tol: &Tolerances) -> Result<bool> {
    match w {
        Subspace::Orbit(_) => Ok(true),
        Subspace::Dense(vectors) => {
            let basis = dense_columns(space, vectors)?;
            let r = numerical_rank(&basis, tol.rank);
            for g in space.group.generators() {
                let moved: Vec<GroupVector> = vectors.iter().map(|v| translate(g, v)).collect();
                let joint = hstack(&basis, &dense_columns(space, &moved)?);
                if numerical_rank(&joint, tol.rank) != r {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Generating family for `w`: for a dense invariant span the orbit of its
/// basis is the span itself.
pub fn subspace_generators(w: &Subspace, space: &SystemSpace, tol: &Tolerances) -> Result<FiberFamily> {
    match w {
        Subspace::Orbit(f) => Ok(f.clone()),
        Subspace::Dense(vectors) => {
            if !space.is_exact() {
                return Err(Error::NotExact);
            }
            if !is_invariant(w, space, tol)? {
                return Err(Error::NotInvariant);
            }
            Family::new(space, vectors.clone())?.fibers()
        }
    }
}

/// Fiberwise rank additivity `rank[A|B] = rank A + rank B`; with `ambient`
/// the joint rank must also be `m` (the sum is all of `H`).
pub fn direct_sum_check(a: &FiberFamily, b: &FiberFamily, ambient: bool, tol: &Tolerances) -> Result<bool> {
    check_spaces(&[a, b])?;
    let m = a.space().channels;
    Ok(a.fibers().iter().zip(b.fibers()).all(|(fa, fb)| {
        let joint = numerical_rank(&hstack(fa, fb), tol.rank);
        joint == numerical_rank(fa, tol.rank) + numerical_rank(fb, tol.rank) && (!ambient || joint == m)
    }))
}

/// Fiberwise projector onto the `W_0` fibers along the `V_0` fibers (zero on
/// the orthogonal complement of `V_1`).
pub fn oblique_projector(split: &ObliqueSplit, tol: &Tolerances) -> Result<OperatorField> {
    let matrices = split
        .w0
        .fibers()
        .iter()
        .zip(split.v0.fibers())
        .enumerate()
        .map(|(p, (w, v))| {
            fiber_oblique_projector(&column_basis(w, tol.rank), &column_basis(v, tol.rank), tol.rank)
                .ok_or_else(|| Error::NotDirectSum(format!("V0 and W0 intersect at dual point {p}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorField {
        space: split.within.space().clone(),
        field: FiberField {
            matrices,
            exact: split.within.is_exact(),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    /// Projection on `M` along `N`, restricted to `M'`, in orthonormal coordinates.
    pub p1: FiberField,
    /// Projection on `M'` along `N`, restricted to `M`.
    pub q1: FiberField,
    /// `max_gamma max(|P1 Q1 - I|, |Q1 P1 - I|)` (spectral norm).
    pub inverse_residual: f64,
}

/// The two restricted projections for `M (+) N = M' (+) N`, which are
/// mutually inverse.
pub fn restricted_projection_pair(
    m: &FiberFamily,
    m_prime: &FiberFamily,
    n: &FiberFamily,
    tol: &Tolerances,
) -> Result<ProjectionPair> {
    check_spaces(&[m, m_prime, n])?;
    let mut p1s = Vec::new();
    let mut q1s = Vec::new();
    let mut inverse_residual: f64 = 0.0;
    for (p, ((fm, fmp), fn_)) in m.fibers().iter().zip(m_prime.fibers()).zip(n.fibers()).enumerate() {
        let mb = column_basis(fm, tol.rank);
        let mpb = column_basis(fmp, tol.rank);
        let nb = column_basis(fn_, tol.rank);
        let sum = column_basis(&hstack(&mb, &nb), tol.rank);
        let sum_prime = column_basis(&hstack(&mpb, &nb), tol.rank);
        if sum.ncols() != mb.ncols() + nb.ncols()
            || sum_prime.ncols() != mpb.ncols() + nb.ncols()
            || max_principal_sine(&sum, &sum_prime) > SPAN_ANGLE_TOL
        {
            return Err(Error::NotDirectSum(format!(
                "M + N and M' + N are not the same direct sum at dual point {p}"
            )));
        }
        let proj_m = fiber_oblique_projector(&mb, &nb, tol.rank)
            .ok_or_else(|| Error::NotDirectSum(format!("M meets N at dual point {p}")))?;
        let proj_mp = fiber_oblique_projector(&mpb, &nb, tol.rank)
            .ok_or_else(|| Error::NotDirectSum(format!("M' meets N at dual point {p}")))?;
        let p1 = mb.adjoint() * proj_m * &mpb;
        let q1 = mpb.adjoint() * proj_mp * &mb;
        let d = p1.nrows();
        let id = CMat::identity(d, d);
        inverse_residual = inverse_residual
            .max(spectral_norm(&(&p1 * &q1 - &id)))
            .max(spectral_norm(&(&q1 * &p1 - &id)));
        p1s.push(p1);
        q1s.push(q1);
    }
    let exact = m.is_exact();
    Ok(ProjectionPair {
        p1: FiberField { matrices: p1s, exact },
        q1: FiberField { matrices: q1s, exact },
        inverse_residual,
    })
}

fn validate_oblique_inputs(x: &FiberFamily, y: &FiberFamily, w0: &Subspace, tol: &Tolerances) -> Result<ObliqueSplit> {
    check_spaces(&[x, y])?;
    if !is_contained(x, y, tol)? {
        return Err(Error::NotContained);
    }
    let w0 = subspace_generators(w0, y.space(), tol)?;
    ObliqueSplit::new(x.clone(), w0, y.clone(), tol)
}

/// Generators `Gamma` of size `s - r` in `W_0` whose orbit is a Riesz basis
/// of `W_0`, for `V_1 = V_0 (+) W_0` with `G(X)`, `G(Y)` Riesz bases of
/// `V_0`, `V_1`. A dense `W_0` that is not invariant is rejected with
/// [`Error::NotInvariant`]; no such generators can exist for it.
pub fn oblique_riesz_wavelets(
    x: &FiberFamily,
    y: &FiberFamily,
    w0: &Subspace,
    tol: &Tolerances,
) -> Result<FiberFamily> {
    check_spaces(&[x, y])?;
    riesz_bounds(x, tol)?;
    riesz_bounds(y, tol)?;
    if x.len() >= y.len() {
        return Err(Error::Precondition(format!(
            "need |X| < |Y|, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let split = validate_oblique_inputs(x, y, w0, tol)?;
    let z = orth_complement_in(y, x, tol)?;
    let p = oblique_projector(&split, tol)?;
    let gamma = p.apply(&z)?;
    riesz_bounds(&gamma, tol)?;
    Ok(gamma)
}

/// Frame version: `Gamma = P P_perp Y` with `P_perp` the orthogonal
/// projection of `V_1` onto `V_1 minus V_0`, so `|Gamma| = |Y|`.
pub fn oblique_frame_wavelets(
    x: &FiberFamily,
    y: &FiberFamily,
    w0: &Subspace,
    tol: &Tolerances,
) -> Result<FiberFamily> {
    check_spaces(&[x, y])?;
    frame_bounds(x, tol)?;
    frame_bounds(y, tol)?;
    let split = validate_oblique_inputs(x, y, w0, tol)?;
    let perp = y.map_fibers(y.len(), |_, f| {
        let pv1 = projector(&column_basis(f, tol.rank));
        Ok(pv1 * f)
    })?;
    let perp = FiberFamily::new(
        y.space(),
        y.len(),
        perp.fibers()
            .iter()
            .zip(x.fibers())
            .map(|(py, fx)| {
                let pv0 = projector(&column_basis(fx, tol.rank));
                py - pv0 * py
            })
            .collect(),
    )?;
    let p = oblique_projector(&split, tol)?;
    let gamma = p.apply(&perp)?;
    frame_bounds(&gamma, tol)?;
    Ok(gamma)
}

/// The family `Gamma~` inside `W~_0` with `G(Gamma~)` biorthogonal to
/// `G(Gamma)`, for `W~_0 (+) W_0^perp = H`.
pub fn dual_family(gamma: &FiberFamily, w0_dual: &FiberFamily, tol: &Tolerances) -> Result<FiberFamily> {
    check_spaces(&[gamma, w0_dual])?;
    riesz_bounds(gamma, tol)?;
    let k = gamma.len();
    gamma.map_fibers(k, |p, g| {
        let wb = column_basis(&w0_dual.fibers()[p], tol.rank);
        if wb.ncols() != k {
            return Err(Error::NotDirectSum(format!(
                "dual subspace has fiber dimension {} but Gamma spans {k} at dual point {p}",
                wb.ncols()
            )));
        }
        let pairing = g.adjoint() * &wb;
        let sv = singular_values(&pairing);
        let lo = sv.last().copied().unwrap_or(1.0);
        if lo * lo <= rank_cutoff(sv[0] * sv[0], tol.rank) {
            return Err(Error::SingularPairing { point: p });
        }
        let inv = pairing.try_inverse().ok_or(Error::SingularPairing { point: p })?;
        Ok(wb * inv)
    })
}

/// Orthonormal generators of `span(a) minus span(b)` fiberwise, i.e. of
/// `V(a) cap V(b)^perp`.
fn intersect_with_perp(a: &FiberFamily, b: &FiberFamily, size: usize, tol: &Tolerances) -> Result<FiberFamily> {
    a.map_fibers(size, |p, fa| {
        let ab = column_basis(fa, tol.rank);
        let pairing = b.fibers()[p].adjoint() * &ab;
        let ns = null_space(&pairing, tol.rank);
        if ns.ncols() != size {
            return Err(Error::HypothesisFailure(format!(
                "intersection has dimension {} instead of {size} at dual point {p}",
                ns.ncols()
            )));
        }
        Ok(ab * ns)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalWavelets {
    pub gamma: FiberFamily,
    pub gamma_dual: FiberFamily,
    /// Orthonormal generators of `W_0 = V_1 cap V~_0^perp`.
    pub w0: FiberFamily,
    /// Orthonormal generators of `W~_0 = V~_1 cap V_0^perp`.
    pub w0_dual: FiberFamily,
    pub primal_union_bounds: Bounds,
    pub dual_union_bounds: Bounds,
    pub pair: Biorthogonality,
    /// Biorthogonality of `X u Gamma` against `X~ u Gamma~`.
    pub union_pair: Biorthogonality,
}

/// Biorthogonal multiwavelets from two biorthogonal pairs of nested Riesz
/// generators.
pub fn biorthogonal_wavelets(
    x: &FiberFamily,
    x_dual: &FiberFamily,
    y: &FiberFamily,
    y_dual: &FiberFamily,
    tol: &Tolerances,
) -> Result<BiorthogonalWavelets> {
    check_spaces(&[x, x_dual, y, y_dual])?;
    for f in [x, x_dual, y, y_dual] {
        riesz_bounds(f, tol)?;
    }
    if x.len() >= y.len() {
        return Err(Error::Precondition(format!(
            "need r < s, got r = {} and s = {}",
            x.len(),
            y.len()
        )));
    }
    if !is_biorthogonal(x, x_dual, tol)?.holds {
        return Err(Error::Precondition("G(X) and G(X~) are not biorthogonal".into()));
    }
    if !is_biorthogonal(y, y_dual, tol)?.holds {
        return Err(Error::Precondition("G(Y) and G(Y~) are not biorthogonal".into()));
    }
    if !is_contained(x, y, tol)? || !is_contained(x_dual, y_dual, tol)? {
        return Err(Error::NotContained);
    }
    let size = y.len() - x.len();
    let w0 = intersect_with_perp(y, x_dual, size, tol)?;
    let w0_dual = intersect_with_perp(y_dual, x, size, tol)?;
    let gamma = oblique_riesz_wavelets(x, y, &Subspace::Orbit(w0.clone()), tol)?;
    let gamma_dual = dual_family(&gamma, &w0_dual, tol)?;
    let primal_union_bounds = riesz_bounds(&x.concat(&gamma)?, tol)?;
    let dual_union_bounds = riesz_bounds(&x_dual.concat(&gamma_dual)?, tol)?;
    let pair = is_biorthogonal(&gamma, &gamma_dual, tol)?;
    let union_pair = is_biorthogonal(&x.concat(&gamma)?, &x_dual.concat(&gamma_dual)?, tol)?;
    if !pair.holds || !union_pair.holds {
        return Err(Error::HypothesisFailure(format!(
            "constructed systems are not biorthogonal (residual {:e})",
            union_pair.residual
        )));
    }
    Ok(BiorthogonalWavelets {
        gamma,
        gamma_dual,
        w0,
        w0_dual,
        primal_union_bounds,
        dual_union_bounds,
        pair,
        union_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::GroupSpec;
    use crate::linalg::c;
    use crate::oracle::{dense_family_matrix, dense_oblique_projector, dense_translation};

    fn z2m2() -> SystemSpace {
        SystemSpace::new(GroupSpec::cyclic(2).unwrap(), 2).unwrap()
    }

    fn fam(s: &SystemSpace, vs: Vec<GroupVector>) -> FiberFamily {
        Family::new(s, vs).unwrap().fibers().unwrap()
    }

    fn worked_example() -> (SystemSpace, FiberFamily, FiberFamily, FiberFamily) {
        let s = z2m2();
        let r = 0.5f64.sqrt();
        let x = fam(
            &s,
            vec![GroupVector::from_entries(&s, [(0, 0, c(r, 0.0)), (0, 1, c(r, 0.0))]).unwrap()],
        );
        let y = fam(
            &s,
            vec![
                GroupVector::delta(&s, 0, 0).unwrap(),
                GroupVector::delta(&s, 0, 1).unwrap(),
            ],
        );
        let w0 = fam(&s, vec![GroupVector::delta(&s, 0, 1).unwrap()]);
        (s, x, y, w0)
    }

    #[test]
    fn complement_in_edge_cases() {
        let (s, x, y, _) = worked_example();
        let tol = Tolerances::for_space(&s);
        let empty = Family::empty(&s).fibers().unwrap();
        let full = orth_complement_in(&y, &empty, &tol).unwrap();
        assert_eq!(full.len(), 2);
        assert!(orth_complement_in(&y, &y, &tol).unwrap().is_empty());
        let v = orth_complement_in(&y, &x, &tol).unwrap().to_family().unwrap();
        let d = v.members()[0].dense().unwrap();
        assert!((d[0] + d[1]).norm() < 1e-12 && (d[0].norm() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invariance_of_dense_spans() {
        let s = z2m2();
        let tol = Tolerances::for_space(&s);
        let lone = Subspace::Dense(vec![GroupVector::delta(&s, 0, 0).unwrap()]);
        assert!(!is_invariant(&lone, &s, &tol).unwrap());
        let both = Subspace::Dense(vec![
            GroupVector::delta(&s, 0, 0).unwrap(),
            GroupVector::delta(&s, 1, 0).unwrap(),
        ]);
        assert!(is_invariant(&both, &s, &tol).unwrap());
    }

    #[test]
    fn worked_oblique_example_matches_dense_projector() {
        let (s, x, y, w0) = worked_example();
        let tol = Tolerances::for_space(&s);
        let gamma = oblique_riesz_wavelets(&x, &y, &Subspace::Orbit(w0.clone()), &tol).unwrap();
        assert_eq!(gamma.len(), 1);
        assert!(is_contained(&gamma, &w0, &tol).unwrap());
        // dense oracle: P onto span{delta_g e2} along span{(delta_g e1 + delta_g e2)}
        let xd = dense_family_matrix(&x.to_family().unwrap()).unwrap().matrix;
        let wd = dense_family_matrix(&w0.to_family().unwrap()).unwrap().matrix;
        let pd = dense_oblique_projector(&wd, &xd, &tol).unwrap();
        let split = ObliqueSplit::new(x.clone(), w0.clone(), y.clone(), &tol).unwrap();
        let pf = oblique_projector(&split, &tol).unwrap();
        assert!(max_abs(&(pf.dense().unwrap() - &pd)) < 1e-9);
        for g in 0..2 {
            let l = dense_translation(&s, g).unwrap();
            assert!(max_abs(&(&pd * &l - &l * &pd)) < 1e-9);
        }
    }

    #[test]
    fn orthogonal_case_returns_complement_itself() {
        let (s, x, y, _) = worked_example();
        let tol = Tolerances::for_space(&s);
        let v = orth_complement_in(&y, &x, &tol).unwrap();
        let gamma = oblique_riesz_wavelets(&x, &y, &Subspace::Orbit(v.clone()), &tol).unwrap();
        let b = riesz_bounds(&gamma, &tol).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
        for (a, z) in gamma.fibers().iter().zip(v.fibers()) {
            assert!(max_abs(&(a - z)) < 1e-12);
        }
    }

    #[test]
    fn non_invariant_dense_w0_rejected() {
        let (s, x, y, _) = worked_example();
        let tol = Tolerances::for_space(&s);
        let w0 = Subspace::Dense(vec![GroupVector::delta(&s, 0, 1).unwrap()]);
        assert_eq!(oblique_riesz_wavelets(&x, &y, &w0, &tol), Err(Error::NotInvariant));
    }

    #[test]
    fn overlapping_split_rejected() {
        let (s, x, y, _) = worked_example();
        let tol = Tolerances::for_space(&s);
        assert!(matches!(
            oblique_riesz_wavelets(&x, &y, &Subspace::Orbit(x.clone()), &tol),
            Err(Error::NotDirectSum(_))
        ));
        let split = ObliqueSplit::new(x.clone(), x.clone(), y.clone(), &tol);
        assert!(matches!(split, Err(Error::NotDirectSum(_))));
    }

    #[test]
    fn projection_pair_trivial_cases() {
        let (s, x, y, w0) = worked_example();
        let tol = Tolerances::for_space(&s);
        let same = restricted_projection_pair(&w0, &w0, &x, &tol).unwrap();
        assert!(same.p1.identity_residual() < 1e-12 && same.q1.identity_residual() < 1e-12);
        let empty = Family::empty(&s).fibers().unwrap();
        let rotated = restricted_projection_pair(&y, &y, &empty, &tol).unwrap();
        assert!(rotated.inverse_residual < 1e-10);
        let skew = restricted_projection_pair(&w0, &orth_complement_in(&y, &x, &tol).unwrap(), &x, &tol).unwrap();
        assert!(skew.inverse_residual < 1e-10);
        assert!(restricted_projection_pair(&w0, &x, &x, &tol).is_err());
    }

    #[test]
    fn self_dual_and_skew_duals() {
        let (s, x, y, w0) = worked_example();
        let tol = Tolerances::for_space(&s);
        let dual = dual_family(&w0, &w0, &tol).unwrap();
        for (a, b) in dual.fibers().iter().zip(w0.fibers()) {
            assert!(max_abs(&(a - b)) < 1e-12);
        }
        // skew dual subspace: span of (e1 + e2)/sqrt2 is not orthogonal to e2
        let skew = dual_family(&w0, &x, &tol).unwrap();
        assert!(is_biorthogonal(&w0, &skew, &tol).unwrap().residual < 1e-9);
        let orth = fam(&s, vec![GroupVector::delta(&s, 0, 0).unwrap()]);
        assert!(matches!(
            dual_family(&w0, &orth, &tol),
            Err(Error::SingularPairing { .. })
        ));
        assert!(matches!(dual_family(&w0, &y, &tol), Err(Error::NotDirectSum(_))));
    }

    #[test]
    fn direct_sum_checks() {
        let (s, x, y, w0) = worked_example();
        let tol = Tolerances::for_space(&s);
        assert!(direct_sum_check(&x, &w0, true, &tol).unwrap());
        assert!(!direct_sum_check(&x, &x, false, &tol).unwrap());
        assert!(!direct_sum_check(&x, &Family::empty(&s).fibers().unwrap(), true, &tol).unwrap());
        assert!(direct_sum_check(&y, &Family::empty(&s).fibers().unwrap(), true, &tol).unwrap());
    }

    #[test]
    fn biorthogonal_pipeline_self_dual() {
        let (s, x, y, _) = worked_example();
        let tol = Tolerances::for_space(&s);
        let out = biorthogonal_wavelets(&x, &x, &y, &y, &tol).unwrap();
        assert_eq!(out.gamma.len(), 1);
        for (a, b) in out.gamma.fibers().iter().zip(out.gamma_dual.fibers()) {
            assert!(max_abs(&(a - b)) < 1e-12);
        }
        assert!(matches!(
            biorthogonal_wavelets(&y, &y, &y, &y, &tol),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn frame_wavelets_orthogonal_case() {
        let (s, x, y, _) = worked_example();
        let tol = Tolerances::for_space(&s);
        let v = orth_complement_in(&y, &x, &tol).unwrap();
        let gamma = oblique_frame_wavelets(&x, &y, &Subspace::Orbit(v.clone()), &tol).unwrap();
        assert_eq!(gamma.len(), 2);
        assert!(is_contained(&gamma, &v, &tol).unwrap());
        assert!(is_contained(&v, &gamma, &tol).unwrap());
        let b = frame_bounds(&gamma, &tol).unwrap();
        assert!(b.lower > 0.0);
    }
}

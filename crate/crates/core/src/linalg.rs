//! Small dense complex linear-algebra kit shared by the fiberwise and dense
//! code paths.
//!
//! Rank decisions follow one convention everywhere: a squared singular value
//! counts when it exceeds `tol_rank * max(largest squared singular value, 1)`.
//!
//! Singular value decompositions use one-sided Jacobi rotations rather than
//! nalgebra's bidiagonal SVD, which returns inaccurate factors for some
//! rank-deficient complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    // symmetrize first so roundoff asymmetry never reaches the solver
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Thin decomposition `m = U diag(s) V^*` with `s` descending, `U` of size
/// `rows x p` and `V` of size `cols x p`, `p = min(rows, cols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

const JACOBI_TOL: f64 = 4.0 * f64::EPSILON;
const JACOBI_SWEEPS: usize = 80;

/// Columns `p`, `q` of `m` become `cs x - sn y` and `sn x + cs y` with `y = phase * m_q`.
fn rotate(m: &mut CMat, p: usize, q: usize, cs: f64, sn: f64, phase: C64) {
    for i in 0..m.nrows() {
        let x = m[(i, p)];
        let y = m[(i, q)] * phase;
        m[(i, p)] = x * cs - y * sn;
        m[(i, q)] = x * sn + y * cs;
    }
}

/// Replace the listed zero columns of `u` by an orthonormal completion.
fn complete_columns(u: &mut CMat, missing: &[usize]) {
    let rows = u.nrows();
    for &j in missing {
        let mut best: Option<CVec> = None;
        for e in 0..rows {
            let mut v = CVec::zeros(rows);
            v[e] = ONE;
            for _ in 0..2 {
                for k in 0..u.ncols() {
                    if k != j {
                        let col = u.column(k).into_owned();
                        let d = col.dotc(&v);
                        v -= col * d;
                    }
                }
            }
            if v.norm() > 0.5 {
                best = Some(v.unscale(v.norm()));
                break;
            }
        }
        if let Some(v) = best {
            u.set_column(j, &v);
        }
    }
}

/// One-sided Jacobi SVD.
pub fn svd(m: &CMat) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let mut a = m.clone();
    let mut v = CMat::identity(cols, cols);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut a, p, q, cs, sn, phase);
                rotate(&mut v, p, q, cs, sn, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let mut u = CMat::zeros(rows, cols);
    let mut vs = CMat::zeros(cols, cols);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &a.column(j).unscale(norms[j]));
        } else {
            missing.push(k);
        }
        vs.set_column(k, &v.column(j));
    }
    complete_columns(&mut u, &missing);
    Svd {
        u,
        s: order.iter().map(|&j| norms[j]).collect(),
        v: vs,
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).s
}

pub fn rank_cutoff(largest_sq: f64, tol_rank: f64) -> f64 {
    tol_rank * largest_sq.max(1.0)
}

pub fn numerical_rank(m: &CMat, tol_rank: f64) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    let cut = rank_cutoff(top * top, tol_rank);
    sv.iter().filter(|s| *s * *s > cut).count()
}

/// Orthonormal basis of the column space (left singular vectors above the cutoff).
pub fn column_basis(m: &CMat, tol_rank: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let d = svd(m);
    let cut = rank_cutoff(d.s[0] * d.s[0], tol_rank);
    let r = d.s.iter().filter(|s| *s * *s > cut).count();
    d.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the null space of `m` (right singular vectors below the cutoff).
pub fn null_space(m: &CMat, tol_rank: f64) -> CMat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    // pad to at least square so that all right singular vectors are returned
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = svd(&padded);
    let cut = rank_cutoff(d.s[0] * d.s[0], tol_rank);
    let r = d.s.iter().filter(|s| *s * *s > cut).count();
    d.v.columns(r, n - r).into_owned()
}

pub fn projector(basis: &CMat) -> CMat {
    basis * basis.adjoint()
}

/// `G^{-1/2}` for a Hermitian positive definite `G`; `None` when some
/// eigenvalue falls below the cutoff.
pub fn inv_sqrt_hpd(g: &CMat, tol_rank: f64) -> Option<CMat> {
    let (vals, vecs) = hermitian_eigen(g);
    let top = vals.last().copied().unwrap_or(0.0);
    let cut = rank_cutoff(top, tol_rank);
    if vals.iter().any(|&v| v <= cut) {
        return None;
    }
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(1.0 / v.sqrt(), 0.0)),
    ));
    Some(&vecs * d * vecs.adjoint())
}

/// Unitary factor `U V^*` of the polar decomposition `A = (U V^*)(V S V^*)`.
pub fn polar_unitary(a: &CMat) -> CMat {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMat::zeros(a.nrows(), a.ncols());
    }
    let d = svd(a);
    d.u * d.v.adjoint()
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn condition_number(m: &CMat) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Sine of the largest principal angle between two column spaces given by
/// orthonormal bases. Spaces of different dimension are reported as
/// maximally apart (sine 1).
pub fn max_principal_sine(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let resid_b = b - a * (a.adjoint() * b);
    let resid_a = a - b * (b.adjoint() * a);
    spectral_norm(&resid_b).max(spectral_norm(&resid_a)).min(1.0)
}

/// Largest principal angle between the column spaces of `a` and `b`.
pub fn max_principal_angle(a: &CMat, b: &CMat, tol_rank: f64) -> f64 {
    max_principal_sine(&column_basis(a, tol_rank), &column_basis(b, tol_rank)).asin()
}

pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Rescale a vector so its largest-magnitude entry is real and positive.
/// Ties (within relative 1e-12) resolve to the lowest index.
pub fn phase_normalize(v: &mut CVec) {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= top * (1.0 - 1e-12))
        .expect("nonempty");
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

/// Deterministic orthonormal basis of `k` vectors for the column space of `m`,
/// by Gram-Schmidt with largest-residual-column pivoting followed by phase
/// normalization of each basis vector.
pub fn pivoted_basis(m: &CMat, k: usize) -> CMat {
    let rows = m.nrows();
    let mut work: Vec<CVec> = m.column_iter().map(|col| col.into_owned()).collect();
    let mut basis = CMat::zeros(rows, k);
    for b in 0..k {
        let (pivot, _) = work
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm_squared()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let mut q = work[pivot].clone();
        // two passes of classical Gram-Schmidt against earlier basis vectors
        for _ in 0..2 {
            for j in 0..b {
                let prev = basis.column(j);
                let proj = prev.dotc(&q);
                q -= prev * proj;
            }
        }
        let n = q.norm();
        if n == 0.0 {
            break;
        }
        q /= c(n, 0.0);
        phase_normalize(&mut q);
        basis.set_column(b, &q);
        for v in work.iter_mut() {
            let proj = q.dotc(v);
            *v -= &q * proj;
        }
    }
    basis
}

/// Oblique projector onto span(`range`) along span(`kernel`), extended by
/// zero on the orthogonal complement of span(`range`) + span(`kernel`).
/// Both arguments are orthonormal bases. Returns `None` if the spans meet.
pub fn oblique_projector(range: &CMat, kernel: &CMat, tol_rank: f64) -> Option<CMat> {
    let n = range.nrows();
    let k = range.ncols();
    let joint = hstack(range, kernel);
    if joint.ncols() == 0 {
        return Some(CMat::zeros(n, n));
    }
    let gram = joint.adjoint() * &joint;
    let vals = hermitian_eigenvalues(&gram);
    if vals[0] <= tol_rank.max(1e-12) {
        return None;
    }
    let inv = gram.try_inverse()?;
    let coeffs = inv * joint.adjoint();
    Some(range * coeffs.rows(0, k))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix with the
/// diagonal phases of R folded back in.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = random_matrix(rng, n, n);
    let qr = g.qr();
    let (q, r) = qr.unpack();
    let phases = CMat::from_diagonal(&CVec::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                ONE
            } else {
                d / d.norm()
            }
        }),
    ));
    q * phases
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenvalues_sorted_ascending() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let v = hermitian_eigenvalues(&m);
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_svd_reconstructs_rank_deficient_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 0..500 {
            let rows = 1 + t % 9;
            let cols = 1 + (t / 9) % 7;
            let r = t % (rows.min(cols) + 1);
            let m = random_matrix(&mut rng, rows, r) * random_matrix(&mut rng, r, cols);
            let d = svd(&m);
            let p = rows.min(cols);
            let s = CMat::from_diagonal(&CVec::from_iterator(p, d.s.iter().map(|&x| c(x, 0.0))));
            assert!(max_abs(&(&d.u * s * d.v.adjoint() - &m)) < 1e-12 * max_abs(&m).max(1.0));
            assert!(max_abs(&(d.u.adjoint() * &d.u - CMat::identity(p, p))) < 1e-12);
            assert!(max_abs(&(d.v.adjoint() * &d.v - CMat::identity(p, p))) < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(numerical_rank(&m, 1e-9), r);
        }
    }

    #[test]
    fn difference_of_projectors_basis_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let u = random_unitary(&mut rng, 6);
            let p = projector(&u.columns(0, 4).into_owned()) - projector(&u.columns(0, 1).into_owned());
            let q = column_basis(&p, 1e-9);
            assert_eq!(q.ncols(), 3);
            assert!(max_abs(&(&p * &q - &q)) < 1e-12);
        }
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&m * &ns)) < 1e-12);
    }

    #[test]
    fn polar_factor_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 4, 4);
        let u = polar_unitary(&a);
        assert!(max_abs(&(u.adjoint() * &u - CMat::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn pivoted_basis_is_orthonormal_and_phase_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 5, 3);
        let b = pivoted_basis(&a, 3);
        assert!(max_abs(&(b.adjoint() * &b - CMat::identity(3, 3))) < 1e-12);
        for col in b.column_iter() {
            let top = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lead = col.iter().find(|z| z.norm() >= top * (1.0 - 1e-12)).unwrap();
            assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
        }
        assert!(max_principal_sine(&column_basis(&a, 1e-9), &b) < 1e-12);
    }

    #[test]
    fn oblique_projector_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = column_basis(&random_matrix(&mut rng, 4, 2), 1e-9);
        let v = column_basis(&random_matrix(&mut rng, 4, 1), 1e-9);
        let p = oblique_projector(&w, &v, 1e-9).unwrap();
        assert!(max_abs(&(&p * &p - &p)) < 1e-10);
        assert!(max_abs(&(&p * &v)) < 1e-10);
        assert!(max_abs(&(&p * &w - &w)) < 1e-10);
        assert!(oblique_projector(&w, &w.columns(0, 1).into_owned(), 1e-9).is_none());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(&mut rng, 6);
        assert!(max_abs(&(u.adjoint() * &u - CMat::identity(6, 6))) < 1e-12);
    }
}

//! Finite groups, unitary representations and intertwiners.
//!
//! Equivalences are always returned as explicit unitary intertwiners. Two
//! representations are screened by their characters first; a witness is then
//! obtained by group-averaging a seeded random matrix,
//! `T = |G|^{-1} sum_g sigma(g) R rho(g)^*`, which is a Gaussian random
//! element of the intertwiner space, and taking the unitary factor of its
//! polar decomposition.
//!
//! Vectors of the `N`-fold regular representation are laid out with row
//! index `g * N + c` (element-major), matching the dense layout used by
//! [`crate::oracle`] for abelian groups.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, c, column_basis, condition_number, max_abs, null_space, polar_unitary, projector, random_matrix, CMat,
    C64, ONE, ZERO,
};

/// Largest group order for which associativity is checked exhaustively.
const EXHAUSTIVE_ASSOCIATIVITY: usize = 24;
/// Condition-number ceiling for a usable random intertwiner.
pub const MAX_CONDITION: f64 = 1e6;
/// Number of seeds tried before giving up on a generic intertwiner.
pub const GENERIC_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    generators: Vec<usize>,
    permutations: Option<Vec<Vec<usize>>>,
}

impl FiniteGroup {
    /// Build a group from its Cayley table, `table[a][b] = a b`.
    pub fn from_cayley(name: &str, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidInput(
                "Cayley table must be square with entries in 0..n".into(),
            ));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidInput("Cayley table has no identity".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidInput(format!("element {a} has no inverse")))?;
        }
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        if table[table[a][b]][d] != table[a][table[b][d]] {
                            return Err(Error::InvalidInput(format!(
                                "Cayley table is not associative at ({a}, {b}, {d})"
                            )));
                        }
                    }
                }
            }
        } else {
            // deterministic spot check along a stride through all triples
            let mut t: usize = 0;
            for _ in 0..20_000 {
                t = t.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let (a, b, d) = ((t >> 11) % n, (t >> 29) % n, (t >> 47) % n);
                if table[table[a][b]][d] != table[a][table[b][d]] {
                    return Err(Error::InvalidInput(format!(
                        "Cayley table is not associative at ({a}, {b}, {d})"
                    )));
                }
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..n).map(|g| table[table[g][a]][inverse[g]]).collect();
            members.sort_unstable();
            members.dedup();
            for &x in &members {
                class_of[x] = classes.len();
            }
            classes.push(members);
        }
        let mut generators = Vec::new();
        let mut reached = vec![false; n];
        reached[identity] = true;
        for g in 0..n {
            if reached[g] {
                continue;
            }
            generators.push(g);
            // closure of the subgroup generated so far
            let mut queue: VecDeque<usize> = (0..n).filter(|&x| reached[x]).collect();
            while let Some(x) = queue.pop_front() {
                for &s in &generators {
                    let y = table[x][s];
                    if !reached[y] {
                        reached[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(FiniteGroup {
            name: name.to_string(),
            table,
            identity,
            inverse,
            classes,
            class_of,
            generators,
            permutations: None,
        })
    }

    /// Group generated by permutations of `0..d`, with `(a b)(x) = a(b(x))`.
    pub fn from_permutations(name: &str, generators: &[Vec<usize>]) -> Result<Self> {
        let d = generators.first().map_or(0, |g| g.len());
        let id: Vec<usize> = (0..d).collect();
        let mut elems = vec![id.clone()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let p: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let table = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| index[&b.iter().map(|&x| a[x]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        let mut group = Self::from_cayley(name, table)?;
        group.permutations = Some(elems);
        Ok(group)
    }

    /// `Z_{n_1} x ... x Z_{n_k}` with the same lexicographic element codes as
    /// [`crate::group_model::GroupSpec::FiniteAbelian`].
    pub fn abelian_product(orders: &[usize]) -> Result<Self> {
        let spec = crate::group_model::GroupSpec::finite_abelian(orders)?;
        let n = spec.order().expect("finite");
        let table = (0..n as i64)
            .map(|a| (0..n as i64).map(|b| spec.compose(a, b) as usize).collect())
            .collect();
        let name = orders.iter().map(|o| format!("Z{o}")).collect::<Vec<_>>().join("x");
        Self::from_cayley(&name, table)
    }

    pub fn symmetric3() -> Self {
        Self::from_permutations("S3", &[vec![1, 0, 2], vec![1, 2, 0]]).expect("S3")
    }

    /// Symmetries of a square acting on its vertices `0..4` (counterclockwise).
    pub fn dihedral4() -> Self {
        Self::from_permutations("D4", &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]]).expect("D4")
    }

    /// Quaternion group; element `2u + s` is `(-1)^s` times unit `u` of `1, i, j, k`.
    pub fn quaternion8() -> Self {
        // (sign, unit) of unit products, rows/cols 1, i, j, k
        const UNIT: [[(u8, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (s, u) = UNIT[a / 2][b / 2];
                        let sign = (s as usize + a % 2 + b % 2) % 2;
                        2 * u + sign
                    })
                    .collect()
            })
            .collect();
        Self::from_cayley("Q8", table).expect("Q8")
    }

    /// `S3`, `D4`, `Q8`, or `Z<n>` / `Z<n>xZ<m>...`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "S3" => Ok(Self::symmetric3()),
            "D4" => Ok(Self::dihedral4()),
            "Q8" => Ok(Self::quaternion8()),
            _ => {
                let orders = name
                    .split('x')
                    .map(|f| f.strip_prefix('Z').and_then(|o| o.parse::<usize>().ok()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidInput(format!("unknown builtin group {name:?}")))?;
                Self::abelian_product(&orders)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    pub fn permutation(&self, a: usize) -> Option<&[usize]> {
        self.permutations.as_ref().map(|p| p[a].as_slice())
    }
}

/// Values of a class function, one per conjugacy class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFunction {
    pub values: Vec<C64>,
}

impl ClassFunction {
    pub fn approx_eq(&self, other: &ClassFunction, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|G|^{-1} sum_g chi(g) conj(psi(g))`.
    pub fn inner(&self, other: &ClassFunction, group: &FiniteGroup) -> C64 {
        let total: C64 = group
            .classes()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(cls, (a, b))| a * b.conj() * cls.len() as f64)
            .sum();
        total / group.order() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    dim: usize,
    matrices: Vec<CMat>,
}

impl Representation {
    /// Validates unitarity and the homomorphism law (within `1e-10`).
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<CMat>) -> Result<Self> {
        let n = group.order();
        if matrices.len() != n {
            return Err(Error::SizeMismatch(format!(
                "{} matrices for a group of order {n}",
                matrices.len()
            )));
        }
        let dim = matrices[0].nrows();
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::SizeMismatch(
                "representation matrices must be square of one size".into(),
            ));
        }
        let id = CMat::identity(dim, dim);
        if max_abs(&(&matrices[group.identity()] - &id)) > 1e-10 {
            return Err(Error::InvalidInput("identity element is not represented by I".into()));
        }
        for m in &matrices {
            if max_abs(&(m.adjoint() * m - &id)) > 1e-10 {
                return Err(Error::InvalidInput("representation matrix is not unitary".into()));
            }
        }
        // products with generators suffice: every element is a word in them
        for a in 0..n {
            for &b in group.generators() {
                let lhs = &matrices[a] * &matrices[b];
                if max_abs(&(lhs - &matrices[group.mul(a, b)])) > 1e-10 {
                    return Err(Error::InvalidInput(format!(
                        "matrices are not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(Representation { group, dim, matrices })
    }

    pub fn zero_dim(group: Arc<FiniteGroup>) -> Self {
        let matrices = vec![CMat::zeros(0, 0); group.order()];
        Representation {
            group,
            dim: 0,
            matrices,
        }
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let matrices = vec![CMat::identity(1, 1); group.order()];
        Representation {
            group,
            dim: 1,
            matrices,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        same_group(self, other)?;
        Ok(Representation {
            group: self.group.clone(),
            dim: self.dim + other.dim,
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| block_diag(a, b))
                .collect(),
        })
    }

    /// `g -> U rho(g) U^*` for a unitary `U`.
    pub fn conjugate(&self, u: &CMat) -> Result<Representation> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(Error::SizeMismatch("change of basis has the wrong size".into()));
        }
        if max_abs(&(u.adjoint() * u - CMat::identity(self.dim, self.dim))) > 1e-10 {
            return Err(Error::InvalidInput("change of basis is not unitary".into()));
        }
        let matrices = self.matrices.iter().map(|m| u * m * u.adjoint()).collect();
        Ok(Representation {
            group: self.group.clone(),
            dim: self.dim,
            matrices,
        })
    }

    /// Restriction to the invariant subspace with orthonormal basis `q`.
    pub fn compress(&self, q: &CMat) -> Result<Representation> {
        let matrices = self.matrices.iter().map(|m| q.adjoint() * m * q).collect();
        Representation::new(self.group.clone(), matrices)
    }

    pub fn character(&self) -> ClassFunction {
        character(self)
    }
}

fn same_group(a: &Representation, b: &Representation) -> Result<()> {
    if Arc::ptr_eq(&a.group, &b.group) || a.group == b.group {
        Ok(())
    } else {
        Err(Error::SizeMismatch("representations of different groups".into()))
    }
}

/// Traces of the representation matrices, one value per conjugacy class.
pub fn character(rep: &Representation) -> ClassFunction {
    ClassFunction {
        values: rep
            .group
            .classes()
            .iter()
            .map(|cls| rep.matrices[cls[0]].trace())
            .collect(),
    }
}

/// `N` copies of the left regular representation, row index `g * N + c`.
pub fn regular_representation(group: Arc<FiniteGroup>, copies: usize) -> Representation {
    let n = group.order();
    let dim = n * copies;
    let matrices = (0..n)
        .map(|g| {
            let mut m = CMat::zeros(dim, dim);
            for h in 0..n {
                let gh = group.mul(g, h);
                for ch in 0..copies {
                    m[(gh * copies + ch, h * copies + ch)] = ONE;
                }
            }
            m
        })
        .collect();
    Representation { group, dim, matrices }
}

/// One-dimensional representations with values `+-1` (all of them for the
/// built-in groups), trivial first.
fn sign_characters(group: &Arc<FiniteGroup>) -> Vec<Representation> {
    let gens = group.generators().to_vec();
    let n = group.order();
    let mut out = Vec::new();
    for mask in 0..(1usize << gens.len()) {
        let mut value: Vec<Option<f64>> = vec![None; n];
        value[group.identity()] = Some(1.0);
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(x) = queue.pop_front() {
            for (i, &s) in gens.iter().enumerate() {
                let y = group.mul(x, s);
                let sv = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                if value[y].is_none() {
                    value[y] = Some(value[x].expect("visited") * sv);
                    queue.push_back(y);
                }
            }
        }
        let matrices: Vec<CMat> = value
            .iter()
            .map(|v| CMat::from_element(1, 1, c(v.expect("generated"), 0.0)))
            .collect();
        if let Ok(rep) = Representation::new(group.clone(), matrices) {
            out.push(rep);
        }
    }
    out
}

/// Two-dimensional permutation-derived irreducible: restriction of the
/// permutation representation to the span of `basis` (orthonormal columns).
fn permutation_compression(group: &Arc<FiniteGroup>, basis: &CMat) -> Result<Representation> {
    let d = basis.nrows();
    let matrices = (0..group.order())
        .map(|g| {
            let p = group.permutation(g).expect("permutation group");
            let mut m = CMat::zeros(d, d);
            for (x, &px) in p.iter().enumerate() {
                m[(px, x)] = ONE;
            }
            basis.adjoint() * m * basis
        })
        .collect();
    Representation::new(group.clone(), matrices)
}

/// Named irreducible representations of the built-in groups.
///
/// One-dimensional ones are `triv`, `chi1`, `chi2`, ... (`sign` for `S3`);
/// the two-dimensional one is `std`. Abelian products get their characters
/// `chi<index>` in dual-lexicographic order.
pub fn irreducible_representations(group: &Arc<FiniteGroup>) -> Result<Vec<(String, Representation)>> {
    let mut out = Vec::new();
    match group.name() {
        "S3" | "D4" | "Q8" => {
            for (i, rep) in sign_characters(group).into_iter().enumerate() {
                let name = match (group.name(), i) {
                    (_, 0) => "triv".to_string(),
                    ("S3", 1) => "sign".to_string(),
                    _ => format!("chi{i}"),
                };
                out.push((name, rep));
            }
            let std = match group.name() {
                "S3" => {
                    let a = 0.5f64.sqrt();
                    let b = (1.0f64 / 6.0).sqrt();
                    let basis = CMat::from_row_slice(
                        3,
                        2,
                        &[c(a, 0.0), c(b, 0.0), c(-a, 0.0), c(b, 0.0), ZERO, c(-2.0 * b, 0.0)],
                    );
                    permutation_compression(group, &basis)?
                }
                "D4" => {
                    let h = 0.5f64.sqrt();
                    let basis = CMat::from_row_slice(
                        4,
                        2,
                        &[c(h, 0.0), ZERO, ZERO, c(h, 0.0), c(-h, 0.0), ZERO, ZERO, c(-h, 0.0)],
                    );
                    permutation_compression(group, &basis)?
                }
                _ => {
                    let i = c(0.0, 1.0);
                    let units = [
                        CMat::identity(2, 2),
                        CMat::from_row_slice(2, 2, &[i, ZERO, ZERO, -i]),
                        CMat::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]),
                        CMat::from_row_slice(2, 2, &[ZERO, i, i, ZERO]),
                    ];
                    let matrices = (0..8)
                        .map(|e| {
                            let m = units[e / 2].clone();
                            if e % 2 == 1 {
                                -m
                            } else {
                                m
                            }
                        })
                        .collect();
                    Representation::new(group.clone(), matrices)?
                }
            };
            out.push(("std".to_string(), std));
        }
        _ => {
            // abelian: every irreducible is a character of the product of cyclic factors
            let orders: Vec<usize> = group
                .name()
                .split('x')
                .map(|f| f.strip_prefix('Z').and_then(|o| o.parse().ok()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InvalidInput(format!("no irreducible table for {}", group.name())))?;
            let spec = crate::group_model::GroupSpec::finite_abelian(&orders)?;
            for (k, pt) in spec.dual_sampling().points.iter().enumerate() {
                let matrices = (0..group.order() as i64)
                    .map(|g| CMat::from_element(1, 1, pt.evaluate(&spec.decode(g))))
                    .collect();
                let name = if k == 0 { "triv".to_string() } else { format!("chi{k}") };
                out.push((name, Representation::new(group.clone(), matrices)?));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    /// `d_sigma x d_rho` matrix `T` with `T rho(g) = sigma(g) T`.
    pub matrix: CMat,
    pub unitary: bool,
    /// Seed that produced the witness, when randomness was involved.
    pub seed: Option<u64>,
    /// `max_g |T rho(g) - sigma(g) T|` (Frobenius norm, an upper bound for
    /// the spectral norm).
    pub residual: f64,
}

pub fn intertwining_residual(t: &CMat, rho: &Representation, sigma: &Representation) -> f64 {
    rho.matrices
        .iter()
        .zip(&sigma.matrices)
        .map(|(r, s)| (t * r - s * t).norm())
        .fold(0.0, f64::max)
}

/// Orthonormal (Frobenius) basis of `{T : T rho(g) = sigma(g) T}` from the
/// equations at a generating set.
pub fn intertwiner_basis(rho: &Representation, sigma: &Representation) -> Result<Vec<Intertwiner>> {
    same_group(rho, sigma)?;
    let (dr, ds) = (rho.dim, sigma.dim);
    if dr == 0 || ds == 0 {
        return Ok(Vec::new());
    }
    let unknowns = dr * ds;
    let gens = rho.group.generators();
    let mut system = CMat::zeros(unknowns * gens.len().max(1), unknowns);
    let id_r = CMat::identity(dr, dr);
    let id_s = CMat::identity(ds, ds);
    for (i, &g) in gens.iter().enumerate() {
        // vec(T rho) - vec(sigma T) with column-major vec
        let block = rho.matrices[g].transpose().kronecker(&id_s) - id_r.kronecker(&sigma.matrices[g]);
        system
            .view_mut((i * unknowns, 0), (unknowns, unknowns))
            .copy_from(&block);
    }
    let ns = null_space(&system, 1e-20);
    Ok(ns
        .column_iter()
        .map(|v| {
            let t = CMat::from_fn(ds, dr, |r, col| v[col * ds + r]);
            let residual = intertwining_residual(&t, rho, sigma);
            Intertwiner {
                matrix: t,
                unitary: false,
                seed: None,
                residual,
            }
        })
        .collect())
}

/// `|G|^{-1} sum_g sigma(g) r rho(g)^*`, the projection of `r` onto the intertwiners.
fn group_average(rho: &Representation, sigma: &Representation, r: &CMat) -> CMat {
    let mut t = CMat::zeros(r.nrows(), r.ncols());
    for (a, b) in rho.matrices.iter().zip(&sigma.matrices) {
        t += b * r * a.adjoint();
    }
    t / c(rho.group.order() as f64, 0.0)
}

/// A unitary intertwiner from `rho` to `sigma` when they are equivalent.
///
/// Characters decide equivalence; the witness is the polar factor of a
/// group-averaged random matrix, retried over [`GENERIC_ATTEMPTS`] seeds
/// starting at `seed` while its condition number exceeds [`MAX_CONDITION`].
pub fn are_equivalent(rho: &Representation, sigma: &Representation, seed: u64) -> Result<Option<Intertwiner>> {
    same_group(rho, sigma)?;
    if rho.dim != sigma.dim || !character(rho).approx_eq(&character(sigma), 1e-9) {
        return Ok(None);
    }
    let d = rho.dim;
    if rho
        .matrices
        .iter()
        .zip(&sigma.matrices)
        .all(|(a, b)| max_abs(&(a - b)) <= 1e-12)
    {
        return Ok(Some(Intertwiner {
            matrix: CMat::identity(d, d),
            unitary: true,
            seed: None,
            residual: 0.0,
        }));
    }
    for attempt in 0..GENERIC_ATTEMPTS as u64 {
        let s = seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let t = group_average(rho, sigma, &random_matrix(&mut rng, d, d));
        if condition_number(&t) > MAX_CONDITION {
            continue;
        }
        // the polar factor loses accuracy with the conditioning of `t`;
        // averaging it once more and re-polarizing restores it
        let u = polar_unitary(&group_average(rho, sigma, &polar_unitary(&t)));
        let residual = intertwining_residual(&u, rho, sigma);
        return Ok(Some(Intertwiner {
            matrix: u,
            unitary: true,
            seed: Some(s),
            residual,
        }));
    }
    Err(Error::GenericityFailure {
        attempts: GENERIC_ATTEMPTS,
    })
}

/// Copies of the regular representation contained in `rho`, if its
/// character is `N` times the regular character.
pub fn regular_multiplicity(rho: &Representation) -> Option<usize> {
    let n = rho.group.order();
    if !rho.dim.is_multiple_of(n) {
        return None;
    }
    let copies = rho.dim / n;
    let chi = character(rho);
    let e_class = rho.group.class_of(rho.group.identity());
    let ok = chi.values.iter().enumerate().all(|(k, v)| {
        let want = if k == e_class { (rho.dim) as f64 } else { 0.0 };
        (v - c(want, 0.0)).norm() <= 1e-9
    });
    ok.then_some(copies)
}

/// Cancellation for multiples of the regular representation: from
/// `rho ~ sigma1 + sigma2` and `rho ~ sigma1 + sigma3` produce a unitary
/// intertwiner from `sigma2` to `sigma3`.
pub fn cancel(
    rho: &Representation,
    sigma1: &Representation,
    sigma2: &Representation,
    sigma3: &Representation,
    seed: u64,
) -> Result<Intertwiner> {
    if regular_multiplicity(rho).is_none() {
        return Err(Error::HypothesisFailure(
            "rho is not a finite multiple of the regular representation".into(),
        ));
    }
    // characters decide equivalence for finite groups
    let chi = character(rho);
    for (label, other) in [("sigma2", sigma2), ("sigma3", sigma3)] {
        let sum = sigma1.direct_sum(other)?;
        if sum.dim != rho.dim || !character(&sum).approx_eq(&chi, 1e-9) {
            return Err(Error::HypothesisFailure(format!(
                "rho is not equivalent to sigma1 + {label}"
            )));
        }
    }
    are_equivalent(sigma2, sigma3, seed)?
        .ok_or_else(|| Error::HypothesisFailure("sigma2 and sigma3 are inequivalent despite cancellation".into()))
}

/// Columns `lambda_N(g) v_j` for all `g`, `j` (element-major).
pub fn orbit_matrix(group: &Arc<FiniteGroup>, copies: usize, cols: &CMat) -> CMat {
    let lambda = regular_representation(group.clone(), copies);
    let n = group.order();
    let k = cols.ncols();
    let mut out = CMat::zeros(cols.nrows(), n * k);
    for g in 0..n {
        let moved = lambda.matrix(g) * cols;
        out.view_mut((0, g * k), (cols.nrows(), k)).copy_from(&moved);
    }
    out
}

/// Complementary wandering family for a possibly non-abelian finite group
/// acting by `lambda_N` on `C^{N |G|}`.
///
/// `y` must be wandering (orthonormal orbit) and `x` wandering with orbit
/// span inside that of `y`. The action on `K minus K_1` (orthogonal
/// complement of the orbit span of `x` in that of `y`) is shown equivalent to
/// `lambda_{|Y| - |X|}`; the images of the standard wandering vectors under
/// that equivalence form `X'`.
pub fn wandering_complement_general(
    x: &CMat,
    y: &CMat,
    group: &Arc<FiniteGroup>,
    copies: usize,
    seed: u64,
) -> Result<CMat> {
    let dim = group.order() * copies;
    if x.nrows() != dim || y.nrows() != dim {
        return Err(Error::SizeMismatch(format!("ambient dimension must be {dim}")));
    }
    if x.ncols() > y.ncols() {
        return Err(Error::HypothesisFailure("|X| exceeds |Y|".into()));
    }
    let ky = orbit_matrix(group, copies, y);
    let kx = orbit_matrix(group, copies, x);
    for (label, k) in [("Y", &ky), ("X", &kx)] {
        let resid = max_abs(&(k.adjoint() * k - CMat::identity(k.ncols(), k.ncols())));
        if resid > 1e-9 {
            return Err(Error::HypothesisFailure(format!(
                "{label} is not wandering (orbit Gram residual {resid:e})"
            )));
        }
    }
    if max_abs(&(&kx - &ky * (ky.adjoint() * &kx))) > 1e-8 {
        return Err(Error::HypothesisFailure(
            "orbit of X is not inside the orbit of Y".into(),
        ));
    }
    let size = y.ncols() - x.ncols();
    if size == 0 {
        return Ok(CMat::zeros(dim, 0));
    }
    let q = column_basis(&(projector(&ky) - projector(&kx)), 1e-9);
    let lambda = regular_representation(group.clone(), copies);
    let restricted = lambda.compress(&q)?;
    let target = regular_representation(group.clone(), size);
    let t = are_equivalent(&target, &restricted, seed)?.ok_or_else(|| {
        Error::HypothesisFailure("restricted action is not a multiple of the regular representation".into())
    })?;
    let e = group.identity();
    let mut standard = CMat::zeros(target.dim(), size);
    for ch in 0..size {
        standard[(e * size + ch, ch)] = ONE;
    }
    Ok(q * t.matrix * standard)
}

//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wandergen::fiberization::{Family, FiberFamily};
use wandergen::group_model::{GroupSpec, GroupVector, SystemSpace};
use wandergen::linalg::{c, polar_unitary, random_matrix, random_unitary, CMat, ONE};
use wandergen::nonabelian::FiniteGroup;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite abelian groups of order at most 24.
pub fn random_group<R: Rng>(rng: &mut R) -> GroupSpec {
    const SHAPES: &[&[usize]] = &[
        &[1],
        &[2],
        &[3],
        &[4],
        &[5],
        &[6],
        &[7],
        &[8],
        &[12],
        &[24],
        &[2, 2],
        &[2, 3],
        &[2, 4],
        &[3, 3],
        &[2, 6],
        &[4, 4],
        &[2, 2, 2],
        &[2, 2, 3],
    ];
    GroupSpec::finite_abelian(SHAPES[rng.random_range(0..SHAPES.len())]).unwrap()
}

/// Gaussian coefficients on a random subset of elements.
pub fn random_vector<R: Rng>(rng: &mut R, space: &SystemSpace) -> GroupVector {
    let n = space.group.order().unwrap() as i64;
    let mut v = GroupVector::zero(space);
    let picks = rng.random_range(1..=n.min(6));
    for _ in 0..picks {
        let g = rng.random_range(0..n);
        let z = random_matrix(rng, space.channels, 1);
        for ch in 0..space.channels {
            v.add(g, ch, z[(ch, 0)]).unwrap();
        }
    }
    v
}

pub fn random_family<R: Rng>(rng: &mut R, space: &SystemSpace, k: usize) -> Family {
    Family::new(space, (0..k).map(|_| random_vector(rng, space)).collect()).unwrap()
}

/// Fiber family with the given per-point matrices produced by `f`.
pub fn fiber_family(space: &SystemSpace, k: usize, mut f: impl FnMut(usize) -> CMat) -> FiberFamily {
    let n = space.dual_sampling().len();
    FiberFamily::new(space, k, (0..n).map(&mut f).collect()).unwrap()
}

/// First `k` columns of an independent random unitary at every point.
pub fn random_isometries<R: Rng>(rng: &mut R, space: &SystemSpace, k: usize) -> Vec<CMat> {
    let m = space.channels;
    (0..space.dual_sampling().len())
        .map(|_| random_unitary(rng, m).columns(0, k).into_owned())
        .collect()
}

/// Dense columns of a fiber family (exact mode).
pub fn dense(f: &FiberFamily) -> CMat {
    wandergen::oracle::dense_family_matrix(&f.to_family().unwrap())
        .unwrap()
        .matrix
}

pub fn cyclic_space(n: usize, m: usize) -> SystemSpace {
    SystemSpace::new(GroupSpec::cyclic(n).unwrap(), m).unwrap()
}

/// A random unitary commuting with `N` copies of the left regular
/// representation (row index `g * N + c`): polar factor of a random
/// combination of right translations tensored with `N x N` matrices.
pub fn random_commutant_unitary<R: Rng>(rng: &mut R, group: &FiniteGroup, copies: usize) -> CMat {
    let n = group.order();
    let dim = n * copies;
    let mut t = CMat::zeros(dim, dim);
    for h in 0..n {
        let a = random_matrix(rng, copies, copies);
        let hinv = group.inv(h);
        for g in 0..n {
            let row = group.mul(g, hinv);
            for c1 in 0..copies {
                for c2 in 0..copies {
                    t[(row * copies + c1, g * copies + c2)] += a[(c1, c2)];
                }
            }
        }
    }
    polar_unitary(&t)
}

/// Columns `delta_e (x) e_c` for `c` in `0..k`.
pub fn standard_wandering(group: &FiniteGroup, copies: usize, k: usize) -> CMat {
    let mut out = CMat::zeros(group.order() * copies, k);
    for ch in 0..k {
        out[(group.identity() * copies + ch, ch)] = ONE;
    }
    out
}

pub fn arc(group: FiniteGroup) -> Arc<FiniteGroup> {
    Arc::new(group)
}

pub fn complex<R: Rng>(rng: &mut R) -> wandergen::linalg::C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

//! Discrete abelian groups, their duals, and the unitary Fourier transform.
//!
//! Two group models are supported:
//!
//! * [`GroupSpec::FiniteAbelian`]: a product of cyclic groups `Z_{n_1} x ... x Z_{n_k}`.
//!   The dual is enumerated exactly, so every identity of the transform
//!   (unitarity, intertwining of translation and modulation, the
//!   convolution theorem) holds to roundoff.
//! * [`GroupSpec::IntegerShift`]: the integers acting by shifts. The dual
//!   circle is sampled at `grid_size` roots of unity; transforms are exact
//!   trigonometric-polynomial evaluations at those points.
//!
//! Group elements are encoded as `i64` codes. For a finite abelian group the
//! code is the lexicographic linear index of the canonical tuple
//! `(g_1, ..., g_k)` with `0 <= g_j < n_j` (first coordinate most
//! significant); for the integer shift group it is the integer itself.
//!
//! The forward transform of `v` is `v^(gamma) = |G|^{-1/2} sum_g v(g) gamma(g)`.
//! With this sign, translation by `g` becomes multiplication by `gamma(g)`,
//! and the inverse transform `f -> |G|^{-1/2} sum_gamma f(gamma) conj(gamma(g))`
//! sends the normalized character function of `g` to the delta at `g`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, CVec, C64, ZERO};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    FiniteAbelian { orders: Vec<usize> },
    IntegerShift { grid_size: usize },
}

impl GroupSpec {
    pub fn finite_abelian(orders: &[usize]) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidInput("cyclic factor orders must be >= 1".into()));
        }
        Ok(GroupSpec::FiniteAbelian {
            orders: orders.to_vec(),
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::finite_abelian(&[n])
    }

    pub fn integer_shift(grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::InvalidInput("grid size must be >= 2".into()));
        }
        Ok(GroupSpec::IntegerShift { grid_size })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, GroupSpec::FiniteAbelian { .. })
    }

    /// Group order for finite groups, `None` for the integers.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::FiniteAbelian { orders } => Some(orders.iter().product()),
            GroupSpec::IntegerShift { .. } => None,
        }
    }

    /// Number of dual sampling points.
    pub fn dual_size(&self) -> usize {
        match self {
            GroupSpec::FiniteAbelian { orders } => orders.iter().product(),
            GroupSpec::IntegerShift { grid_size } => *grid_size,
        }
    }

    pub fn identity(&self) -> i64 {
        0
    }

    /// Encode a canonical tuple (finite) or a single integer (shift).
    pub fn encode(&self, tuple: &[i64]) -> Result<i64> {
        match self {
            GroupSpec::FiniteAbelian { orders } => {
                if tuple.len() != orders.len() {
                    return Err(Error::InvalidInput(format!(
                        "element {tuple:?} has {} coordinates, group has {}",
                        tuple.len(),
                        orders.len()
                    )));
                }
                let mut code = 0i64;
                for (&g, &n) in tuple.iter().zip(orders) {
                    if g < 0 || g >= n as i64 {
                        return Err(Error::InvalidInput(format!("element coordinate {g} outside 0..{n}")));
                    }
                    code = code * n as i64 + g;
                }
                Ok(code)
            }
            GroupSpec::IntegerShift { .. } => match tuple {
                [n] => Ok(*n),
                _ => Err(Error::InvalidInput(format!(
                    "integer shift elements are single integers, got {tuple:?}"
                ))),
            },
        }
    }

    pub fn decode(&self, code: i64) -> Vec<i64> {
        match self {
            GroupSpec::FiniteAbelian { orders } => {
                let mut out = vec![0; orders.len()];
                let mut rest = code;
                for (slot, &n) in out.iter_mut().zip(orders).rev() {
                    *slot = rest.rem_euclid(n as i64);
                    rest = rest.div_euclid(n as i64);
                }
                out
            }
            GroupSpec::IntegerShift { .. } => vec![code],
        }
    }

    pub fn contains(&self, code: i64) -> bool {
        match self.order() {
            Some(n) => code >= 0 && code < n as i64,
            None => true,
        }
    }

    /// Group law `g h`.
    pub fn compose(&self, g: i64, h: i64) -> i64 {
        match self {
            GroupSpec::FiniteAbelian { orders } => {
                let a = self.decode(g);
                let b = self.decode(h);
                let sum: Vec<i64> = a
                    .iter()
                    .zip(&b)
                    .zip(orders)
                    .map(|((x, y), &n)| (x + y).rem_euclid(n as i64))
                    .collect();
                self.encode(&sum).expect("reduced tuple is canonical")
            }
            GroupSpec::IntegerShift { .. } => g + h,
        }
    }

    pub fn inverse(&self, g: i64) -> i64 {
        match self {
            GroupSpec::FiniteAbelian { orders } => {
                let neg: Vec<i64> = self
                    .decode(g)
                    .iter()
                    .zip(orders)
                    .map(|(x, &n)| (-x).rem_euclid(n as i64))
                    .collect();
                self.encode(&neg).expect("reduced tuple is canonical")
            }
            GroupSpec::IntegerShift { .. } => -g,
        }
    }

    /// All element codes of a finite group in lexicographic order.
    pub fn elements(&self) -> Option<std::ops::Range<i64>> {
        self.order().map(|n| 0..n as i64)
    }

    /// One generator per cyclic factor (or `1` for the integers).
    pub fn generators(&self) -> Vec<i64> {
        match self {
            GroupSpec::FiniteAbelian { orders } => (0..orders.len())
                .map(|j| {
                    let mut t = vec![0; orders.len()];
                    t[j] = 1 % orders[j] as i64;
                    self.encode(&t).expect("canonical")
                })
                .filter(|&g| g != 0)
                .collect(),
            GroupSpec::IntegerShift { .. } => vec![1],
        }
    }

    fn moduli(&self) -> Vec<i64> {
        match self {
            GroupSpec::FiniteAbelian { orders } => orders.iter().map(|&n| n as i64).collect(),
            GroupSpec::IntegerShift { grid_size } => vec![*grid_size as i64],
        }
    }

    pub fn dual_sampling(&self) -> DualSampling {
        let moduli = self.moduli();
        let size = self.dual_size();
        let points = (0..size)
            .map(|index| {
                let mut freq = vec![0i64; moduli.len()];
                let mut rest = index as i64;
                for (slot, &n) in freq.iter_mut().zip(&moduli).rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                DualPoint {
                    index,
                    freq,
                    moduli: moduli.clone(),
                }
            })
            .collect();
        DualSampling {
            points,
            exact: self.is_exact(),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `exp(2 pi i r / denom)`, exact at quarter turns.
pub fn root_of_unity(r: i64, denom: i64) -> C64 {
    let r = r.rem_euclid(denom);
    if (4 * r) % denom == 0 {
        return match 4 * r / denom {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * r as f64 / denom as f64;
    c(theta.cos(), theta.sin())
}

/// A character of the group, `gamma_k(g) = exp(2 pi i sum_j k_j g_j / n_j)`.
/// For the integer shift group the moduli are the grid size, so the point is
/// the root of unity `omega_k = exp(2 pi i k / N)` and `gamma(n) = omega_k^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPoint {
    pub index: usize,
    pub freq: Vec<i64>,
    moduli: Vec<i64>,
}

impl DualPoint {
    /// Value of the character on an element given as a tuple.
    pub fn evaluate(&self, g: &[i64]) -> C64 {
        let denom = self.moduli.iter().fold(1i64, |l, &n| l / gcd(l, n) * n);
        let mut r: i128 = 0;
        for ((&k, &n), &x) in self.freq.iter().zip(&self.moduli).zip(g) {
            r += (k as i128 * x as i128).rem_euclid(n as i128) * (denom / n) as i128;
        }
        root_of_unity((r % denom as i128) as i64, denom)
    }

    /// Angle in `[0, 2 pi)` for single-factor groups.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.freq[0] as f64 / self.moduli[0] as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSampling {
    pub points: Vec<DualPoint>,
    pub exact: bool,
}

impl DualSampling {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The ambient Hilbert space: `m` copies of the sequence space over the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpace {
    pub group: GroupSpec,
    pub channels: usize,
}

impl SystemSpace {
    pub fn new(group: GroupSpec, channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidInput("channel multiplicity must be >= 1".into()));
        }
        Ok(SystemSpace { group, channels })
    }

    pub fn is_exact(&self) -> bool {
        self.group.is_exact()
    }

    pub fn dual_sampling(&self) -> DualSampling {
        self.group.dual_sampling()
    }

    /// Dimension of the dense realization (finite groups only).
    pub fn dense_dim(&self) -> Option<usize> {
        self.group.order().map(|n| n * self.channels)
    }

    pub fn with_grid(&self, grid_size: usize) -> Result<Self> {
        match self.group {
            GroupSpec::IntegerShift { .. } => SystemSpace::new(GroupSpec::integer_shift(grid_size)?, self.channels),
            GroupSpec::FiniteAbelian { .. } => Ok(self.clone()),
        }
    }
}

/// A finitely supported vector of `H = l2(G)^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupVector {
    space: SystemSpace,
    coeffs: BTreeMap<i64, Vec<C64>>,
}

impl GroupVector {
    pub fn zero(space: &SystemSpace) -> Self {
        GroupVector {
            space: space.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    /// `delta_g` tensor the `channel`-th unit vector (channels are 0-based).
    pub fn delta(space: &SystemSpace, g: i64, channel: usize) -> Result<Self> {
        let mut v = Self::zero(space);
        v.add(g, channel, c(1.0, 0.0))?;
        Ok(v)
    }

    pub fn from_entries(space: &SystemSpace, entries: impl IntoIterator<Item = (i64, usize, C64)>) -> Result<Self> {
        let mut v = Self::zero(space);
        for (g, ch, z) in entries {
            v.add(g, ch, z)?;
        }
        Ok(v)
    }

    /// Dense coefficient vector in `(g, channel)` row order (finite groups only).
    pub fn from_dense(space: &SystemSpace, dense: &[C64]) -> Result<Self> {
        let dim = space.dense_dim().ok_or(Error::NotExact)?;
        if dense.len() != dim {
            return Err(Error::SizeMismatch(format!(
                "dense vector has length {}, expected {dim}",
                dense.len()
            )));
        }
        let m = space.channels;
        let mut v = Self::zero(space);
        for (g, chunk) in dense.chunks(m).enumerate() {
            if chunk.iter().any(|z| *z != ZERO) {
                v.coeffs.insert(g as i64, chunk.to_vec());
            }
        }
        Ok(v)
    }

    pub fn space(&self) -> &SystemSpace {
        &self.space
    }

    pub fn add(&mut self, g: i64, channel: usize, z: C64) -> Result<()> {
        if channel >= self.space.channels {
            return Err(Error::InvalidInput(format!(
                "channel {} outside 1..={}",
                channel + 1,
                self.space.channels
            )));
        }
        if !self.space.group.contains(g) {
            return Err(Error::InvalidInput(format!("element code {g} not in group")));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let m = self.space.channels;
        self.coeffs.entry(g).or_insert_with(|| vec![ZERO; m])[channel] += z;
        Ok(())
    }

    pub fn get(&self, g: i64, channel: usize) -> C64 {
        self.coeffs.get(&g).map_or(ZERO, |v| v[channel])
    }

    /// Nonzero coefficients as `(element, channel, value)` in ascending order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, usize, C64)> + '_ {
        self.coeffs.iter().flat_map(|(&g, v)| {
            v.iter()
                .enumerate()
                .filter(|(_, z)| **z != ZERO)
                .map(move |(ch, z)| (g, ch, *z))
        })
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    /// Width `max - min + 1` of the support (0 for the zero vector).
    pub fn support_width(&self) -> usize {
        match (self.coeffs.keys().next(), self.coeffs.keys().next_back()) {
            (Some(lo), Some(hi)) => (hi - lo + 1) as usize,
            _ => 0,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.values().flat_map(|v| v.iter()).map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `<self, other>`, linear in `self`.
    pub fn inner(&self, other: &GroupVector) -> C64 {
        let mut acc = ZERO;
        for (g, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(g) {
                for (x, y) in a.iter().zip(b) {
                    acc += x * y.conj();
                }
            }
        }
        acc
    }

    pub fn scale(&self, z: C64) -> GroupVector {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            v.iter_mut().for_each(|x| *x *= z);
        }
        out
    }

    pub fn axpy(&mut self, z: C64, other: &GroupVector) {
        let m = self.space.channels;
        for (g, v) in &other.coeffs {
            let slot = self.coeffs.entry(*g).or_insert_with(|| vec![ZERO; m]);
            for (s, x) in slot.iter_mut().zip(v) {
                *s += z * x;
            }
        }
    }

    /// Dense coefficients in `(g, channel)` row order.
    pub fn dense(&self) -> Result<CVec> {
        let dim = self.space.dense_dim().ok_or(Error::NotExact)?;
        let m = self.space.channels;
        let mut out = CVec::zeros(dim);
        for (&g, v) in &self.coeffs {
            for (ch, z) in v.iter().enumerate() {
                out[g as usize * m + ch] = *z;
            }
        }
        Ok(out)
    }
}

/// Left translation `(l_g v)(h) = v(g^{-1} h)`, applied channelwise.
pub fn translate(g: i64, v: &GroupVector) -> GroupVector {
    let group = &v.space.group;
    let coeffs = v
        .coeffs
        .iter()
        .map(|(&h, vals)| (group.compose(g, h), vals.clone()))
        .collect();
    GroupVector {
        space: v.space.clone(),
        coeffs,
    }
}

fn check_grid(v: &GroupVector) -> Result<()> {
    if let GroupSpec::IntegerShift { grid_size } = v.space.group {
        let width = v.support_width();
        if grid_size < 2 * width {
            return Err(Error::SupportExceedsGrid { width, grid: grid_size });
        }
    }
    Ok(())
}

/// Unnormalized transform `sum_g v(g) gamma(g)` at every dual point.
pub(crate) fn raw_transform(v: &GroupVector, sampling: &DualSampling) -> Result<Vec<CVec>> {
    check_grid(v)?;
    let group = &v.space.group;
    let m = v.space.channels;
    let decoded: Vec<(Vec<i64>, &Vec<C64>)> = v.coeffs.iter().map(|(&g, vals)| (group.decode(g), vals)).collect();
    Ok(sampling
        .points
        .iter()
        .map(|pt| {
            let mut acc = CVec::zeros(m);
            for (tuple, vals) in &decoded {
                let chi = pt.evaluate(tuple);
                for (a, x) in acc.iter_mut().zip(vals.iter()) {
                    *a += chi * x;
                }
            }
            acc
        })
        .collect())
}

/// Fourier transform of `v`, one length-`m` vector per dual point.
///
/// Exact mode is unitary (`1/sqrt|G|` normalization). Integer shift mode
/// evaluates the trigonometric polynomial `sum_n v(n) omega^n` on the grid
/// without normalization.
pub fn fourier(v: &GroupVector) -> Result<Vec<CVec>> {
    let sampling = v.space.dual_sampling();
    let mut out = raw_transform(v, &sampling)?;
    if let Some(n) = v.space.group.order() {
        let s = c(1.0 / (n as f64).sqrt(), 0.0);
        out.iter_mut().for_each(|x| *x *= s);
    }
    Ok(out)
}

/// Inverse of [`fourier`] in exact mode.
pub fn inverse_fourier(space: &SystemSpace, values: &[CVec]) -> Result<GroupVector> {
    let n = space.group.order().ok_or(Error::NotExact)?;
    let sampling = space.dual_sampling();
    if values.len() != n || values.iter().any(|v| v.len() != space.channels) {
        return Err(Error::SizeMismatch(
            "inverse transform needs one length-m vector per character".into(),
        ));
    }
    let s = 1.0 / (n as f64).sqrt();
    inverse_raw(space, &sampling, values, s)
}

/// `scale * sum_gamma f(gamma) conj(gamma(g))` for every element.
pub(crate) fn inverse_raw(
    space: &SystemSpace,
    sampling: &DualSampling,
    values: &[CVec],
    scale: f64,
) -> Result<GroupVector> {
    let elements = space.group.elements().ok_or(Error::NotExact)?;
    let m = space.channels;
    let mut out = GroupVector::zero(space);
    for g in elements {
        let tuple = space.group.decode(g);
        let mut acc = vec![ZERO; m];
        for (pt, f) in sampling.points.iter().zip(values) {
            let chi = pt.evaluate(&tuple).conj();
            for (a, x) in acc.iter_mut().zip(f.iter()) {
                *a += chi * x;
            }
        }
        if acc.iter().any(|z| *z != ZERO) {
            acc.iter_mut().for_each(|z| *z *= scale);
            out.coeffs.insert(g, acc);
        }
    }
    Ok(out)
}

/// Multiplication of a fiber-domain function by `gamma(g)`.
pub fn modulate(group: &GroupSpec, g: i64, f: &[CVec]) -> Vec<CVec> {
    let sampling = group.dual_sampling();
    let tuple = group.decode(g);
    sampling
        .points
        .iter()
        .zip(f)
        .map(|(pt, v)| v * pt.evaluate(&tuple))
        .collect()
}

/// Channelwise group convolution `(a * b)(g) = sum_h a(h) b(g h^{-1})`.
pub fn convolve(a: &GroupVector, b: &GroupVector) -> Result<GroupVector> {
    if a.space != b.space {
        return Err(Error::SizeMismatch(
            "convolution operands live in different spaces".into(),
        ));
    }
    let group = &a.space.group;
    let m = a.space.channels;
    let mut out = GroupVector::zero(&a.space);
    for (&h, av) in &a.coeffs {
        for (&k, bv) in &b.coeffs {
            // g h^{-1} = k  =>  g = k h
            let g = group.compose(k, h);
            let slot = out.coeffs.entry(g).or_insert_with(|| vec![ZERO; m]);
            for ((s, x), y) in slot.iter_mut().zip(av).zip(bv) {
                *s += x * y;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, m: usize) -> SystemSpace {
        SystemSpace::new(GroupSpec::cyclic(n).unwrap(), m).unwrap()
    }

    #[test]
    fn z2_characters_are_signs() {
        let s = GroupSpec::cyclic(2).unwrap().dual_sampling();
        assert_eq!(s.len(), 2);
        assert_eq!(s.points[0].evaluate(&[0]), c(1.0, 0.0));
        assert_eq!(s.points[0].evaluate(&[1]), c(1.0, 0.0));
        assert_eq!(s.points[1].evaluate(&[0]), c(1.0, 0.0));
        assert_eq!(s.points[1].evaluate(&[1]), c(-1.0, 0.0));
    }

    #[test]
    fn trivial_group_has_one_character() {
        let s = GroupSpec::cyclic(1).unwrap().dual_sampling();
        assert_eq!(s.len(), 1);
        assert!(s.exact);
        assert_eq!(s.points[0].evaluate(&[0]), c(1.0, 0.0));
    }

    #[test]
    fn z4_first_character_at_generator_is_i() {
        let s = GroupSpec::cyclic(4).unwrap().dual_sampling();
        assert_eq!(s.points[1].evaluate(&[1]), c(0.0, 1.0));
    }

    #[test]
    fn shift_sampling_is_roots_of_unity_in_angle_order() {
        let s = GroupSpec::integer_shift(8).unwrap().dual_sampling();
        assert!(!s.exact);
        let angles: Vec<f64> = s.points.iter().map(|p| p.angle()).collect();
        assert!(angles.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.points[2].evaluate(&[1]), c(0.0, 1.0));
        assert_eq!(s.points[2].evaluate(&[-1]), c(0.0, -1.0));
    }

    #[test]
    fn lexicographic_encoding_round_trips() {
        let g = GroupSpec::finite_abelian(&[2, 3]).unwrap();
        assert_eq!(g.encode(&[1, 2]).unwrap(), 5);
        assert_eq!(g.decode(5), vec![1, 2]);
        assert_eq!(
            g.compose(g.encode(&[1, 2]).unwrap(), g.encode(&[1, 2]).unwrap()),
            g.encode(&[0, 1]).unwrap()
        );
        assert!(g.encode(&[2, 0]).is_err());
        assert_eq!(g.generators(), vec![3, 1]);
    }

    #[test]
    fn delta_at_identity_has_flat_spectrum() {
        let v = GroupVector::delta(&z(4, 1), 0, 0).unwrap();
        for f in fourier(&v).unwrap() {
            assert!((f[0] - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn inverse_transform_of_character_function_is_delta() {
        let space = z(4, 1);
        let sampling = space.dual_sampling();
        for g in 0..4 {
            let e_g: Vec<CVec> = sampling
                .points
                .iter()
                .map(|p| CVec::from_element(1, p.evaluate(&[g]) * 0.5))
                .collect();
            let back = inverse_fourier(&space, &e_g).unwrap();
            for h in 0..4 {
                let want = if h == g { 1.0 } else { 0.0 };
                assert!((back.get(h, 0) - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn translate_moves_deltas() {
        let space = z(4, 1);
        let d0 = GroupVector::delta(&space, 0, 0).unwrap();
        assert_eq!(translate(0, &d0), d0);
        assert_eq!(translate(1, &d0), GroupVector::delta(&space, 1, 0).unwrap());
    }

    #[test]
    fn modulation_by_involution_is_identity_twice() {
        let group = GroupSpec::cyclic(2).unwrap();
        let f = vec![CVec::from_element(1, c(0.3, -1.0)), CVec::from_element(1, c(2.0, 0.5))];
        assert_eq!(modulate(&group, 0, &f), f);
        let twice = modulate(&group, 1, &modulate(&group, 1, &f));
        assert_eq!(twice, f);
    }

    #[test]
    fn delta_convolution() {
        let space = z(5, 1);
        let a = GroupVector::delta(&space, 2, 0).unwrap();
        let b = GroupVector::delta(&space, 4, 0).unwrap();
        assert_eq!(convolve(&a, &b).unwrap(), GroupVector::delta(&space, 1, 0).unwrap());
    }

    #[test]
    fn support_beyond_grid_is_rejected() {
        let space = SystemSpace::new(GroupSpec::integer_shift(4).unwrap(), 1).unwrap();
        let v = GroupVector::from_entries(&space, [(0, 0, c(1.0, 0.0)), (2, 0, c(1.0, 0.0))]).unwrap();
        assert!(matches!(
            fourier(&v),
            Err(Error::SupportExceedsGrid { width: 3, grid: 4 })
        ));
    }

    #[test]
    fn channel_out_of_range_is_rejected() {
        assert!(GroupVector::delta(&z(2, 1), 0, 1).is_err());
        assert!(GroupVector::delta(&z(2, 1), 2, 0).is_err());
    }
}

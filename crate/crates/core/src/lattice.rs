//! Multi-indices, the knot lattice on the torus and exact lattice sums.
//!
//! The index box `Omega_n = {j : 0 <= j_l <= 2 n_l - 1}` is always enumerated
//! in lexicographic order (last axis fastest). Every vector indexed by knots
//! in this crate uses that layout.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

const TWO_PI: f64 = 2.0 * PI;

/// An element of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        assert!(!entries.is_empty(), "multi-index must have dimension >= 1");
        Self(entries)
    }

    pub fn zero(d: usize) -> Self {
        Self::new(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&l, &xi)| l as f64 * xi).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        (self.norm_l2_squared() as f64).sqrt()
    }

    pub fn norm_l2_squared(&self) -> i64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm_linf(&self) -> i64 {
        self.0.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> i64 {
        self.norm_linf()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        Self::new(v)
    }
}

/// A point of `T^d`, stored with coordinates in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(!coords.is_empty(), "torus point must have dimension >= 1");
        Self(coords.into_iter().map(canonical_angle).collect())
    }

    pub fn origin(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// `self - other` on the torus.
    pub fn sub(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<f64>> for TorusPoint {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

/// Representative of an angle in `[0, 2 pi)`.
pub fn canonical_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Degree vector `n` together with the knot lattice it induces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: Vec<usize>,
}

impl GridSpec {
    pub fn new(n: Vec<usize>) -> Result<Self> {
        if n.is_empty() {
            return invalid("degree vector must have at least one entry");
        }
        if let Some(pos) = n.iter().position(|&v| v == 0) {
            return invalid(format!("degree n_{} must be positive", pos + 1));
        }
        Ok(Self { n })
    }

    /// Same degree `n` on every one of `d` axes.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; d])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.n
    }

    /// `N = 2^d n_1 ... n_d`.
    pub fn len(&self) -> usize {
        self.n.iter().map(|&v| 2 * v).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2 n_l`, the number of knots along axis `l`.
    pub fn period(&self, axis: usize) -> i64 {
        2 * self.n[axis] as i64
    }

    pub fn periods(&self) -> Vec<i64> {
        (0..self.dim()).map(|a| self.period(a)).collect()
    }

    pub fn enumerate_omega(&self) -> Vec<MultiIndex> {
        (0..self.len()).map(|i| self.index_at(i)).collect()
    }

    /// Lexicographic position of `k` in `Omega_n`, if it lies there.
    pub fn index_of(&self, k: &MultiIndex) -> Option<usize> {
        if k.dim() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for (axis, &v) in k.entries().iter().enumerate() {
            let p = self.period(axis);
            if v < 0 || v >= p {
                return None;
            }
            idx = idx * p as usize + v as usize;
        }
        Some(idx)
    }

    pub fn index_at(&self, mut i: usize) -> MultiIndex {
        let d = self.dim();
        let mut out = vec![0i64; d];
        for axis in (0..d).rev() {
            let p = self.period(axis) as usize;
            out[axis] = (i % p) as i64;
            i /= p;
        }
        MultiIndex::new(out)
    }

    /// Representative of `l` modulo `2n` inside `Omega_n`.
    pub fn residue(&self, l: &MultiIndex) -> MultiIndex {
        MultiIndex::new(
            l.entries()
                .iter()
                .enumerate()
                .map(|(axis, &v)| v.rem_euclid(self.period(axis)))
                .collect(),
        )
    }

    pub fn residue_index(&self, l: &MultiIndex) -> usize {
        self.index_of(&self.residue(l)).expect("residue lies in Omega_n")
    }

    /// `l == 0 mod 2n`.
    pub fn is_zero_mod(&self, l: &MultiIndex) -> bool {
        l.entries().iter().enumerate().all(|(axis, &v)| v.rem_euclid(self.period(axis)) == 0)
    }

    fn check_dim(&self, l: &MultiIndex) {
        assert_eq!(l.dim(), self.dim(), "multi-index dimension does not match the grid");
    }

    /// The knot `x_k` with coordinates `pi k_l / n_l`.
    pub fn knot(&self, k: &MultiIndex) -> Result<TorusPoint> {
        if self.index_of(k).is_none() {
            return invalid(format!("index {k} is outside Omega_n for n = {:?}", self.n));
        }
        Ok(self.knot_unchecked(k))
    }

    pub fn knot_at(&self, i: usize) -> TorusPoint {
        self.knot_unchecked(&self.index_at(i))
    }

    fn knot_unchecked(&self, k: &MultiIndex) -> TorusPoint {
        TorusPoint::new(
            k.entries()
                .iter()
                .zip(&self.n)
                .map(|(&kl, &nl)| PI * kl as f64 / nl as f64)
                .collect(),
        )
    }

    pub fn knots(&self) -> Vec<TorusPoint> {
        (0..self.len()).map(|i| self.knot_at(i)).collect()
    }

    /// `j . x_k` reduced exactly through integer arithmetic, in `[0, 2 pi)`.
    pub fn phase(&self, j: &MultiIndex, k: &MultiIndex) -> f64 {
        self.check_dim(j);
        // sum over axes of pi j_l k_l / n_l = 2 pi * sum (j_l k_l mod 2n_l) / (2 n_l)
        let mut turns = 0.0;
        for axis in 0..self.dim() {
            let p = self.period(axis);
            let r = (j.entries()[axis] * k.entries()[axis]).rem_euclid(p);
            turns += r as f64 / p as f64;
        }
        TWO_PI * turns.fract()
    }

    /// `sum_{k in Omega_n} e^{i l . x_k}`: `N` when `l == 0 mod 2n`, otherwise `0`.
    pub fn exp_lattice_sum(&self, l: &MultiIndex) -> Complex64 {
        self.check_dim(l);
        if self.is_zero_mod(l) {
            Complex64::new(self.len() as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Same sum by explicit floating-point summation over the knots.
    pub fn exp_lattice_sum_numeric(&self, l: &MultiIndex) -> Complex64 {
        self.knots().iter().map(|x| Complex64::from_polar(1.0, l.dot(x.coords()))).sum()
    }

    /// `sum_k cos(j . x_k) cos(l . x_k)`.
    pub fn cos_cos_lattice_sum(&self, j: &MultiIndex, l: &MultiIndex) -> f64 {
        let plus = self.is_zero_mod(&l.add(j));
        let minus = self.is_zero_mod(&l.sub(j));
        let n = self.len() as f64;
        match (plus, minus) {
            (true, true) => n,
            (true, false) | (false, true) => n / 2.0,
            (false, false) => 0.0,
        }
    }

    /// `sum_k sin(j . x_k) sin(l . x_k)`.
    pub fn sin_sin_lattice_sum(&self, j: &MultiIndex, l: &MultiIndex) -> f64 {
        let plus = self.is_zero_mod(&l.add(j));
        let minus = self.is_zero_mod(&l.sub(j));
        let n = self.len() as f64;
        match (plus, minus) {
            (false, true) => n / 2.0,
            (true, false) => -n / 2.0,
            _ => 0.0,
        }
    }

    /// `sum_k cos(j . x_k) sin(l . x_k)`, which always vanishes.
    pub fn cos_sin_lattice_sum(&self, j: &MultiIndex, l: &MultiIndex) -> f64 {
        self.check_dim(j);
        self.check_dim(l);
        0.0
    }

    /// Brute-force counterpart of the three product sums: `(cos cos, sin sin, cos sin)`.
    pub fn product_sums_numeric(&self, j: &MultiIndex, l: &MultiIndex) -> (f64, f64, f64) {
        let mut cc = 0.0;
        let mut ss = 0.0;
        let mut cs = 0.0;
        for x in self.knots() {
            let a = j.dot(x.coords());
            let b = l.dot(x.coords());
            cc += a.cos() * b.cos();
            ss += a.sin() * b.sin();
            cs += a.cos() * b.sin();
        }
        (cc, ss, cs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn omega_sizes_and_order() {
        let g = GridSpec::new(vec![1]).unwrap();
        assert_eq!(g.enumerate_omega(), vec![mi(&[0]), mi(&[1])]);
        assert_eq!(g.len(), 2);
        let g = GridSpec::new(vec![2, 1]).unwrap();
        let omega = g.enumerate_omega();
        assert_eq!(omega.len(), 8);
        assert_eq!(omega[0], mi(&[0, 0]));
        assert_eq!(omega[1], mi(&[0, 1]));
        assert_eq!(omega[2], mi(&[1, 0]));
        assert_eq!(omega[7], mi(&[3, 1]));
        assert_eq!(GridSpec::uniform(3, 2).unwrap().len(), 64);
        for (i, k) in omega.iter().enumerate() {
            assert_eq!(g.index_of(k), Some(i));
        }
    }

    #[test]
    fn zero_degree_rejected() {
        assert!(GridSpec::new(vec![2, 0]).is_err());
        assert!(GridSpec::new(vec![]).is_err());
    }

    #[test]
    fn knot_coordinates() {
        let g = GridSpec::new(vec![2]).unwrap();
        assert_eq!(g.knot(&mi(&[0])).unwrap().coords(), &[0.0]);
        assert!((g.knot(&mi(&[1])).unwrap().coords()[0] - PI / 2.0).abs() < 1e-15);
        let g2 = GridSpec::new(vec![2, 2]).unwrap();
        let x = g2.knot(&mi(&[3, 1])).unwrap();
        assert!((x.coords()[0] - 1.5 * PI).abs() < 1e-15);
        assert!((x.coords()[1] - 0.5 * PI).abs() < 1e-15);
        assert!(g.knot(&mi(&[4])).is_err());
        assert!(g.knot(&mi(&[-1])).is_err());
    }

    #[test]
    fn exp_sum_examples() {
        let g = GridSpec::new(vec![2]).unwrap();
        assert_eq!(g.exp_lattice_sum(&mi(&[0])).re, 4.0);
        assert_eq!(g.exp_lattice_sum(&mi(&[4])).re, 4.0);
        assert_eq!(g.exp_lattice_sum(&mi(&[1])).norm(), 0.0);
    }

    #[test]
    fn cos_cos_examples() {
        let g = GridSpec::new(vec![2]).unwrap();
        assert_eq!(g.cos_cos_lattice_sum(&mi(&[1]), &mi(&[1])), 2.0);
        assert_eq!(g.cos_cos_lattice_sum(&mi(&[2]), &mi(&[2])), 4.0);
        assert_eq!(g.cos_cos_lattice_sum(&mi(&[1]), &mi(&[2])), 0.0);
    }

    #[test]
    fn knots_are_distinct() {
        let g = GridSpec::new(vec![3, 2]).unwrap();
        let knots = g.knots();
        for a in 0..knots.len() {
            for b in a + 1..knots.len() {
                let diff: f64 = knots[a]
                    .coords()
                    .iter()
                    .zip(knots[b].coords())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(diff > 0.1);
            }
        }
    }

    #[test]
    fn phase_matches_float_dot() {
        let g = GridSpec::new(vec![3, 2]).unwrap();
        for j in g.enumerate_omega() {
            for k in g.enumerate_omega() {
                let exact = g.phase(&j, &k);
                let float = j.dot(g.knot(&k).unwrap().coords());
                let diff = (exact - float).rem_euclid(TWO_PI);
                assert!(diff < 1e-12 || TWO_PI - diff < 1e-12);
            }
        }
    }
}

//! Sparse trigonometric representations `sum_m c_m e^{i m.x}`.

use crate::error::{invalid, Result};
use crate::fft::fft_nd;
use crate::lattice::MultiIndex;
use num_complex::Complex64;
use rustfft::FftDirection;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierRep {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
    truncation_tail: f64,
}

impl FourierRep {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new(), truncation_tail: 0.0 }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        let mut rep = Self::new(dim);
        for (m, c) in terms {
            if m.dim() != dim {
                return invalid(format!("frequency {m} does not have dimension {dim}"));
            }
            rep.add(m, c);
        }
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bound on the absolute coefficient mass dropped when this representation was truncated.
    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }

    pub fn set_truncation_tail(&mut self, tail: f64) {
        self.truncation_tail = tail;
    }

    /// Adds `c` to the coefficient at `m`.
    pub fn add(&mut self, m: MultiIndex, c: Complex64) {
        assert_eq!(m.dim(), self.dim);
        *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn get(&self, m: &MultiIndex) -> Complex64 {
        self.terms.get(m).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&MultiIndex, Complex64) -> Complex64) -> Self {
        let terms = self.terms.iter().map(|(m, &c)| (m.clone(), f(m, c))).collect();
        Self { dim: self.dim, terms, truncation_tail: self.truncation_tail }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.map_coeffs(|_, c| c * factor);
        out.truncation_tail *= factor.abs();
        out
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dim);
        self.terms.iter().map(|(m, &c)| c * Complex64::from_polar(1.0, m.dot(x))).sum()
    }

    /// Largest `|m_l|` over all stored frequencies.
    pub fn max_frequency(&self) -> i64 {
        self.terms.keys().map(|m| m.max_abs()).max().unwrap_or(0)
    }

    /// The coefficient at `-m` is the conjugate of the one at `m`, within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(m, c)| (self.get(&m.neg()) - c.conj()).norm() <= tol)
    }

    /// Real part `(f + conj f) / 2` and imaginary part `(f - conj f) / 2i`, both Hermitian.
    pub fn split_real_imag(&self) -> (Self, Self) {
        let mut re = Self::new(self.dim);
        let mut im = Self::new(self.dim);
        for (m, &c) in &self.terms {
            re.add(m.clone(), c * 0.5);
            re.add(m.neg(), c.conj() * 0.5);
            im.add(m.clone(), c * Complex64::new(0.0, -0.5));
            im.add(m.neg(), c.conj() * Complex64::new(0.0, 0.5));
        }
        re.truncation_tail = self.truncation_tail;
        im.truncation_tail = self.truncation_tail;
        (re, im)
    }

    /// Values at the grid points `2 pi i / M` (row-major, last axis fastest).
    pub fn sample_grid(&self, points_per_axis: usize) -> Result<Vec<Complex64>> {
        let max = self.max_frequency() as usize;
        if points_per_axis < 2 * max + 1 {
            return invalid(format!(
                "{points_per_axis} points per axis cannot resolve frequency {max}"
            ));
        }
        let dims = vec![points_per_axis; self.dim];
        let total = points_per_axis.pow(self.dim as u32);
        let mut data = vec![Complex64::new(0.0, 0.0); total];
        for (m, &c) in &self.terms {
            let mut idx = 0usize;
            for &v in m.entries() {
                idx = idx * points_per_axis + v.rem_euclid(points_per_axis as i64) as usize;
            }
            data[idx] += c;
        }
        fft_nd(&mut data, &dims, FftDirection::Inverse);
        Ok(data)
    }

    /// `[m_1, ..., m_d, re, im]` rows in frequency order.
    pub fn to_json_terms(&self) -> Vec<Vec<f64>> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut row: Vec<f64> = m.entries().iter().map(|&v| v as f64).collect();
                row.push(c.re);
                row.push(c.im);
                row
            })
            .collect()
    }

    pub fn from_json_terms(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut rep = Self::new(dim);
        for row in rows {
            if row.len() != dim + 2 {
                return invalid(format!("term {row:?} must have {} entries", dim + 2));
            }
            let mut m = Vec::with_capacity(dim);
            for &v in &row[..dim] {
                if v.fract() != 0.0 || !v.is_finite() {
                    return invalid(format!("frequency entry {v} is not an integer"));
                }
                m.push(v as i64);
            }
            let c = Complex64::new(row[dim], row[dim + 1]);
            if !c.re.is_finite() || !c.im.is_finite() {
                return invalid("coefficients must be finite");
            }
            rep.add(MultiIndex::new(m), c);
        }
        Ok(rep)
    }

    /// Parses `"m1,..,md:re:im;..."`, e.g. `"1:1:0;-1:1:0"`.
    pub fn parse_terms(dim: usize, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for chunk in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let parts: Vec<&str> = chunk.split(':').collect();
            if parts.len() != 3 {
                return invalid(format!("term '{chunk}' must look like m1,..,md:re:im"));
            }
            let mut row = Vec::new();
            for v in parts[0].split(',') {
                let m: i64 = v.trim().parse().map_err(|_| {
                    crate::error::SkError::InvalidArgument(format!("bad frequency entry '{v}' in '{chunk}'"))
                })?;
                row.push(m as f64);
            }
            for v in &parts[1..] {
                let c: f64 = v.trim().parse().map_err(|_| {
                    crate::error::SkError::InvalidArgument(format!("bad coefficient '{v}' in '{chunk}'"))
                })?;
                row.push(c);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return invalid("no terms given");
        }
        Self::from_json_terms(dim, &rows)
    }
}

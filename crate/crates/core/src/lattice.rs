//! Period lattices `q_1 Z + ... + q_d Z`, their fundamental domain and the
//! roots of unity attached to each axis.
//!
//! Every `Q x Q` matrix in the crate uses the lexicographic order of the
//! fundamental domain (first axis outermost) for its rows and columns.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LatticeConfig {
    periods: Vec<usize>,
}

impl LatticeConfig {
    pub fn new(periods: impl Into<Vec<usize>>) -> Result<Self> {
        let periods = periods.into();
        if periods.is_empty() || periods.contains(&0) {
            return Err(Error::InvalidPeriods(periods));
        }
        Ok(Self { periods })
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    /// Number of sites `Q` in one period cell.
    pub fn cell_size(&self) -> usize {
        self.periods.iter().product()
    }

    /// All cells of the fundamental domain in canonical (lexicographic) order.
    pub fn cells(&self) -> Vec<CellIndex> {
        (0..self.cell_size()).map(|i| self.cell_at(i)).collect()
    }

    /// Canonical position of `cell` in [`LatticeConfig::cells`].
    pub fn index_of(&self, cell: &CellIndex) -> usize {
        cell.0
            .iter()
            .zip(&self.periods)
            .fold(0, |acc, (&n, &q)| acc * q + n)
    }

    pub fn cell_at(&self, mut index: usize) -> CellIndex {
        let mut coords = vec![0; self.dim()];
        for (c, &q) in coords.iter_mut().zip(&self.periods).rev() {
            *c = index % q;
            index /= q;
        }
        CellIndex(coords)
    }

    /// Validates raw coordinates against the period box.
    pub fn cell(&self, coords: impl Into<Vec<usize>>) -> Result<CellIndex> {
        let coords = coords.into();
        if coords.len() != self.dim() || coords.iter().zip(&self.periods).any(|(&n, &q)| n >= q) {
            return Err(Error::CellOutOfRange {
                coords,
                periods: self.periods.clone(),
            });
        }
        Ok(CellIndex(coords))
    }

    /// Reduces an arbitrary lattice vector into the fundamental domain.
    pub fn reduce(&self, v: &[i64]) -> CellIndex {
        assert_eq!(v.len(), self.dim(), "vector dimension");
        CellIndex(
            v.iter()
                .zip(&self.periods)
                .map(|(&x, &q)| x.rem_euclid(q as i64) as usize)
                .collect(),
        )
    }

    /// Canonical index of `v mod Γ`.
    pub fn reduced_index(&self, v: &[i64]) -> usize {
        v.iter()
            .zip(&self.periods)
            .fold(0, |acc, (&x, &q)| acc * q + x.rem_euclid(q as i64) as usize)
    }

    /// `exp(2πi m / q_axis)`, with `axis` zero-based.
    pub fn root_of_unity(&self, axis: usize, m: i64) -> Result<Complex64> {
        let q = *self.periods.get(axis).ok_or(Error::InvalidAxis {
            axis,
            dim: self.dim(),
        })?;
        Ok(root_of_unity(q, m))
    }

    /// `min |1 - ρ^j_m|` over axes with `q_j > 1` and `1 <= m < q_j`; `None`
    /// when every axis is degenerate.
    pub fn min_root_gap(&self) -> Option<f64> {
        self.periods
            .iter()
            .filter(|&&q| q > 1)
            .map(|&q| (Complex64::new(1.0, 0.0) - root_of_unity(q, 1)).norm())
            .reduce(f64::min)
    }
}

impl TryFrom<Vec<usize>> for LatticeConfig {
    type Error = Error;

    fn try_from(periods: Vec<usize>) -> Result<Self> {
        Self::new(periods)
    }
}

impl From<LatticeConfig> for Vec<usize> {
    fn from(cfg: LatticeConfig) -> Self {
        cfg.periods
    }
}

/// A site `n` of the fundamental domain, `0 <= n_j < q_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellIndex(Vec<usize>);

impl CellIndex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn as_signed(&self) -> Vec<i64> {
        self.0.iter().map(|&n| n as i64).collect()
    }
}

/// `exp(2πi m / q)`. Reduces `m` first so large arguments stay exact on the
/// unit circle.
pub fn root_of_unity(q: usize, m: i64) -> Complex64 {
    let r = m.rem_euclid(q as i64);
    Complex64::from_polar(1.0, TAU * r as f64 / q as f64)
}

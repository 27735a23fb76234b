//! Complex periodic potentials and their discrete Fourier coefficients.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CellIndex, LatticeConfig};

/// Absolute threshold on imaginary parts below which a potential counts as real.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// A `Γ`-periodic potential stored on the fundamental domain in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    cfg: LatticeConfig,
    values: Vec<Complex64>,
}

impl Potential {
    pub fn new(cfg: LatticeConfig, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != cfg.cell_size() {
            return Err(Error::LengthMismatch {
                expected: cfg.cell_size(),
                found: values.len(),
            });
        }
        Ok(Self { cfg, values })
    }

    pub fn from_real(cfg: LatticeConfig, values: &[f64]) -> Result<Self> {
        Self::new(
            cfg,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn constant(cfg: LatticeConfig, c: Complex64) -> Self {
        let values = vec![c; cfg.cell_size()];
        Self { cfg, values }
    }

    pub fn zero(cfg: LatticeConfig) -> Self {
        Self::constant(cfg, Complex64::new(0.0, 0.0))
    }

    pub fn cfg(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, cell: &CellIndex) -> Complex64 {
        self.values[self.cfg.index_of(cell)]
    }

    /// Value at an arbitrary lattice point, using periodicity.
    pub fn at_point(&self, n: &[i64]) -> Complex64 {
        self.values[self.cfg.reduced_index(n)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.max_imag() < REAL_TOLERANCE
    }

    /// Whether all values agree with the first one within `tol`.
    pub fn is_constant(&self, tol: f64) -> bool {
        let first = self.values[0];
        self.values.iter().all(|v| (v - first).norm() <= tol)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `V - c`.
    pub fn shifted(&self, c: Complex64) -> Self {
        Self {
            cfg: self.cfg.clone(),
            values: self.values.iter().map(|v| v - c).collect(),
        }
    }

    /// `n -> V(n + shift)`.
    pub fn translate(&self, shift: &[i64]) -> Self {
        let values = self
            .cfg
            .cells()
            .iter()
            .map(|n| {
                let p: Vec<i64> = n
                    .as_signed()
                    .iter()
                    .zip(shift)
                    .map(|(a, b)| a + b)
                    .collect();
                self.at_point(&p)
            })
            .collect();
        Self {
            cfg: self.cfg.clone(),
            values,
        }
    }

    /// `V(n) = Σ_j V_j(n_j)` from one-dimensional components, one per axis.
    pub fn separable(cfg: LatticeConfig, components: &[Potential]) -> Result<Self> {
        if components.len() != cfg.dim() {
            return Err(Error::LengthMismatch {
                expected: cfg.dim(),
                found: components.len(),
            });
        }
        for (c, &q) in components.iter().zip(cfg.periods()) {
            if c.cfg.dim() != 1 || c.values.len() != q {
                return Err(Error::LengthMismatch {
                    expected: q,
                    found: c.values.len(),
                });
            }
        }
        let values = cfg
            .cells()
            .iter()
            .map(|n| {
                n.coords()
                    .iter()
                    .zip(components)
                    .map(|(&nj, c)| c.values[nj])
                    .sum()
            })
            .collect();
        Ok(Self { cfg, values })
    }

    pub fn dft(&self) -> FourierCoefficients {
        let cells = self.cfg.cells();
        let q = self.cfg.cell_size() as f64;
        let coeffs = cells
            .iter()
            .map(|l| {
                cells
                    .iter()
                    .zip(&self.values)
                    .map(|(n, v)| v * Complex64::from_polar(1.0, -TAU * phase(&self.cfg, l, n)))
                    .sum::<Complex64>()
                    / q
            })
            .collect();
        FourierCoefficients {
            cfg: self.cfg.clone(),
            coeffs,
        }
    }
}

/// `Σ_j l_j n_j / q_j`, reduced mod 1 per axis.
fn phase(cfg: &LatticeConfig, l: &CellIndex, n: &CellIndex) -> f64 {
    l.coords()
        .iter()
        .zip(n.coords())
        .zip(cfg.periods())
        .map(|((&a, &b), &q)| ((a * b) % q) as f64 / q as f64)
        .sum()
}

/// `V̂(l) = (1/Q) Σ_n V(n) exp(-2πi Σ_j l_j n_j / q_j)`, indexed by `l` in
/// canonical order and extended periodically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients {
    cfg: LatticeConfig,
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn cfg(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at any integer vector, reduced mod `Γ`.
    pub fn at_point(&self, l: &[i64]) -> Complex64 {
        self.coeffs[self.cfg.reduced_index(l)]
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Inverse transform; no prefactor since the forward map carries `1/Q`.
    pub fn inverse(&self) -> Potential {
        let cells = self.cfg.cells();
        let values = cells
            .iter()
            .map(|n| {
                cells
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(l, c)| c * Complex64::from_polar(1.0, TAU * phase(&self.cfg, l, n)))
                    .sum()
            })
            .collect();
        Potential {
            cfg: self.cfg.clone(),
            values,
        }
    }
}

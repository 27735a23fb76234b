//! Floquet matrices of `Δ + V` and evaluation of their characteristic
//! polynomials.
//!
//! Two representations are built. The direct one, `D_V(k)`, acts on
//! functions on the fundamental domain with `u(n + q_j e_j) = e^{2πik_j} u(n)`.
//! The Fourier one, `A + B_V` at a multiplier point `z`, is unitarily
//! equivalent to `D_V(k)` when `z_j^{q_j} = e^{2πik_j}`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{root_of_unity, CellIndex, LatticeConfig};
use crate::potential::Potential;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^{2πi t}` for complex `t`.
pub fn phase(t: Complex64) -> Complex64 {
    (I * TAU * t).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// `D_V(k)` at quasimomentum `k`.
    Direct { k: Vec<Complex64> },
    /// `A + B_V` at multiplier point `z`.
    Fourier { z: MultiplierPoint },
    /// A matrix supplied by the caller.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMatrix {
    cfg: Option<LatticeConfig>,
    entries: DMatrix<Complex64>,
    form: Representation,
}

impl FloquetMatrix {
    /// Wraps an arbitrary square matrix so the spectral routines can use it.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square(), "matrix must be square");
        Self {
            cfg: None,
            entries,
            form: Representation::Raw,
        }
    }

    pub fn cfg(&self) -> Option<&LatticeConfig> {
        self.cfg.as_ref()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn form(&self) -> &Representation {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.entries;
        let n = m.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `det(M - λI)` by LU with partial pivoting.
    pub fn charpoly_eval(&self, lambda: Complex64) -> Complex64 {
        charpoly_eval(&self.entries, lambda)
    }
}

pub fn charpoly_eval(m: &DMatrix<Complex64>, lambda: Complex64) -> Complex64 {
    let mut shifted = m.clone();
    for i in 0..shifted.nrows() {
        shifted[(i, i)] -= lambda;
    }
    shifted.lu().determinant()
}

/// A point `z ∈ (ℂ*)^d`; `z_j = e^{2πik_j}` in the Fourier picture.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierPoint(Vec<Complex64>);

impl MultiplierPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if let Some(axis) = z.iter().position(|zj| zj.norm() == 0.0) {
            return Err(Error::ZeroMultiplier { axis });
        }
        Ok(Self(z))
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    /// Quasimomentum `k` with `e^{2πik_j} = z_j^{q_j}`, principal logarithm.
    pub fn to_quasimomentum(&self, cfg: &LatticeConfig) -> Vec<Complex64> {
        self.0
            .iter()
            .zip(cfg.periods())
            .map(|(z, &q)| z.ln() * q as f64 / (I * TAU))
            .collect()
    }
}

/// `D_V(k)`: hops to the `2d` nearest neighbours, picking up `e^{±2πik_j}`
/// whenever a hop wraps around axis `j`. For `q_j <= 2` several hops land on
/// the same entry and are summed.
pub fn assemble_direct(v: &Potential, k: &[Complex64]) -> FloquetMatrix {
    let cfg = v.cfg();
    assert_eq!(k.len(), cfg.dim(), "quasimomentum dimension");
    let size = cfg.cell_size();
    let forward: Vec<Complex64> = k.iter().map(|&kj| phase(kj)).collect();
    let mut m = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    for (row, n) in cfg.cells().iter().enumerate() {
        m[(row, row)] += v.values()[row];
        let mut coords = n.as_signed();
        for (j, &q) in cfg.periods().iter().enumerate() {
            let nj = coords[j];
            let q = q as i64;

            coords[j] = nj + 1;
            let col = cfg.reduced_index(&coords);
            m[(row, col)] += if nj + 1 == q {
                forward[j]
            } else {
                Complex64::new(1.0, 0.0)
            };

            coords[j] = nj - 1;
            let col = cfg.reduced_index(&coords);
            m[(row, col)] += if nj == 0 {
                forward[j].inv()
            } else {
                Complex64::new(1.0, 0.0)
            };

            coords[j] = nj;
        }
    }
    FloquetMatrix {
        cfg: Some(cfg.clone()),
        entries: m,
        form: Representation::Direct { k: k.to_vec() },
    }
}

/// Diagonal entry of `A`: `Σ_j (ρ^j_{n_j} z_j + ρ^j_{-n_j} z_j^{-1})`.
pub fn free_symbol(cfg: &LatticeConfig, n: &CellIndex, z: &MultiplierPoint) -> Complex64 {
    n.coords()
        .iter()
        .zip(cfg.periods())
        .zip(z.components())
        .map(|((&nj, &q), &zj)| {
            root_of_unity(q, nj as i64) * zj + root_of_unity(q, -(nj as i64)) / zj
        })
        .sum()
}

/// `A + B_V` at `z`, where `B_V(n, n') = V̂(n - n')`.
pub fn assemble_fourier(v: &Potential, z: &MultiplierPoint) -> FloquetMatrix {
    let cfg = v.cfg();
    assert_eq!(z.components().len(), cfg.dim(), "multiplier dimension");
    let fourier = v.dft();
    let cells = cfg.cells();
    let size = cells.len();
    let mut m = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    for (r, n) in cells.iter().enumerate() {
        for (c, np) in cells.iter().enumerate() {
            let diff: Vec<i64> = n
                .coords()
                .iter()
                .zip(np.coords())
                .map(|(&a, &b)| a as i64 - b as i64)
                .collect();
            m[(r, c)] = fourier.at_point(&diff);
        }
        m[(r, r)] += free_symbol(cfg, n, z);
    }
    FloquetMatrix {
        cfg: Some(cfg.clone()),
        entries: m,
        form: Representation::Fourier { z: z.clone() },
    }
}

/// `∏_{n∈W} (K - λ + Σ_j (e^{2πi(n_j+k_j)/q_j} + e^{-2πi(n_j+l_j+k_j)/q_j}))`.
pub fn product_form_eval(
    cfg: &LatticeConfig,
    l: &CellIndex,
    k_const: Complex64,
    k: &[Complex64],
    lambda: Complex64,
) -> Complex64 {
    cfg.cells()
        .iter()
        .map(|n| k_const - lambda + product_factor_symbol(cfg, n, l, k))
        .product()
}

/// `Σ_j (e^{2πi(n_j+k_j)/q_j} + e^{-2πi(n_j+l_j+k_j)/q_j})`.
pub fn product_factor_symbol(
    cfg: &LatticeConfig,
    n: &CellIndex,
    l: &CellIndex,
    k: &[Complex64],
) -> Complex64 {
    n.coords()
        .iter()
        .zip(l.coords())
        .zip(cfg.periods())
        .zip(k)
        .map(|(((&nj, &lj), &q), &kj)| {
            let q = q as f64;
            phase((nj as f64 + kj) / q) + phase(-(nj as f64 + lj as f64 + kj) / q)
        })
        .sum()
}

/// `P̃_V(z, λ) = det(A + B_V - λI)`.
pub fn substituted_charpoly_eval(
    v: &Potential,
    z: &MultiplierPoint,
    lambda: Complex64,
) -> Complex64 {
    assemble_fourier(v, z).charpoly_eval(lambda)
}

//! Decision procedures on the Bloch variety `{(k, λ) : det(D_V(k) - λI) = 0}`.
//!
//! The variety contains the graph of an entire function exactly when the
//! characteristic polynomial factors as
//! `∏_{n∈W} (K - λ + Σ_j (e^{2πi(n_j+k_j)/q_j} + e^{-2πi(n_j+l_j+k_j)/q_j}))`
//! for some `l ∈ W`, with `K` forced to equal the mean of `V`. Both sides are
//! Laurent polynomials, so agreement at enough random points decides the
//! identity up to floating point tolerance.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::{assemble_direct, phase, product_form_eval};
use crate::lattice::{CellIndex, LatticeConfig};
use crate::potential::Potential;
use crate::sampling::{complex_in_box, complex_in_disc, rng};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityOptions {
    /// Relative mismatch allowed per point, scaled by `max(1, |lhs|, |rhs|)`.
    pub tolerance: f64,
    pub n_test: usize,
    pub seed: u64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            n_test: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub k: Vec<Complex64>,
    pub lambda: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

/// Random test points `(k, λ)`: each `k_j` uniform on `[-1,1]²` and `λ`
/// uniform on the disc of radius `2d + 2 max|V| + 1`.
fn test_points(
    cfg: &LatticeConfig,
    v_norm: f64,
    opts: &IdentityOptions,
) -> Vec<(Vec<Complex64>, Complex64)> {
    let mut r = rng(opts.seed);
    let radius = 2.0 * cfg.dim() as f64 + 2.0 * v_norm + 1.0;
    (0..opts.n_test)
        .map(|_| {
            let k = (0..cfg.dim())
                .map(|_| complex_in_box(&mut r, 1.0))
                .collect();
            let lambda = complex_in_disc(&mut r, radius);
            (k, lambda)
        })
        .collect()
}

fn relative_mismatch(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0)
}

struct Evaluated {
    points: Vec<(Vec<Complex64>, Complex64)>,
    lhs: Vec<Complex64>,
}

impl Evaluated {
    fn new(v: &Potential, norm: f64, opts: &IdentityOptions) -> Self {
        let points = test_points(v.cfg(), norm, opts);
        let lhs = points
            .iter()
            .map(|(k, lambda)| assemble_direct(v, k).charpoly_eval(*lambda))
            .collect();
        Self { points, lhs }
    }

    /// Worst relative mismatch against `rhs` and where it happened.
    fn compare(&self, mut rhs: impl FnMut(&[Complex64], Complex64) -> Complex64) -> (f64, Witness) {
        let mut worst = (f64::NEG_INFINITY, 0, Complex64::new(0.0, 0.0));
        for (i, ((k, lambda), &lhs)) in self.points.iter().zip(&self.lhs).enumerate() {
            let r = rhs(k, *lambda);
            let m = relative_mismatch(lhs, r);
            if m > worst.0 {
                worst = (m, i, r);
            }
        }
        let (k, lambda) = self.points[worst.1].clone();
        (
            worst.0,
            Witness {
                k,
                lambda,
                lhs: self.lhs[worst.1],
                rhs: worst.2,
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub residual: f64,
    pub worst: Witness,
}

impl FactorizationCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

/// Compares `det(D_V(k) - λI)` with the product form for a fixed `(l, K)`.
pub fn check_factorization(
    v: &Potential,
    l: &CellIndex,
    k_const: Complex64,
    opts: &IdentityOptions,
) -> FactorizationCheck {
    let eval = Evaluated::new(v, v.max_abs(), opts);
    let (residual, worst) =
        eval.compare(|k, lambda| product_form_eval(v.cfg(), l, k_const, k, lambda));
    FactorizationCheck { residual, worst }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntireGraphCertificate {
    pub holds: bool,
    pub periods: Vec<usize>,
    /// Witnessing `l` when `holds`; otherwise the best failing candidate.
    pub l: CellIndex,
    #[serde(rename = "K")]
    pub k_const: Complex64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Witness>,
}

/// Searches every `l ∈ W` for the factorization with `K = mean(V)`.
pub fn entire_graph_test(v: &Potential, opts: &IdentityOptions) -> EntireGraphCertificate {
    let cfg = v.cfg();
    let k_const = v.mean();
    let eval = Evaluated::new(v, v.max_abs(), opts);
    let mut best: Option<(f64, CellIndex, Witness)> = None;
    for l in cfg.cells() {
        let (residual, witness) =
            eval.compare(|k, lambda| product_form_eval(cfg, &l, k_const, k, lambda));
        if residual < opts.tolerance {
            return EntireGraphCertificate {
                holds: true,
                periods: cfg.periods().to_vec(),
                l,
                k_const,
                residual,
                refutation: None,
            };
        }
        if best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, l, witness));
        }
    }
    let (residual, l, witness) = best.expect("W is nonempty");
    EntireGraphCertificate {
        holds: false,
        periods: cfg.periods().to_vec(),
        l,
        k_const,
        residual,
        refutation: Some(witness),
    }
}

/// The `n = 0` factor of a holding factorization:
/// `λ = K + Σ_j (e^{2πik_j/q_j} + e^{-2πi(l_j+k_j)/q_j})`, an entire function
/// of `k` whose graph lies on the Bloch variety.
pub fn entire_graph_function(cert: &EntireGraphCertificate, k: &[Complex64]) -> Result<Complex64> {
    if !cert.holds {
        return Err(Error::CertificateDoesNotHold);
    }
    assert_eq!(k.len(), cert.periods.len(), "quasimomentum dimension");
    let sum: Complex64 = cert
        .periods
        .iter()
        .zip(cert.l.coords())
        .zip(k)
        .map(|((&q, &lj), &kj)| {
            let q = q as f64;
            phase(kj / q) + phase(-(lj as f64 + kj) / q)
        })
        .sum();
    Ok(cert.k_const + sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsospectralVerdict {
    pub isospectral: bool,
    pub residual: f64,
    pub worst: Witness,
}

/// Equality of `det(D_V(k) - λI)` and `det(D_Y(k) - λI)` at random points.
pub fn floquet_isospectral(
    v: &Potential,
    y: &Potential,
    opts: &IdentityOptions,
) -> Result<IsospectralVerdict> {
    if v.cfg() != y.cfg() {
        return Err(Error::ConfigMismatch {
            left: v.cfg().periods().to_vec(),
            right: y.cfg().periods().to_vec(),
        });
    }
    let eval = Evaluated::new(v, v.max_abs().max(y.max_abs()), opts);
    let (residual, worst) = eval.compare(|k, lambda| assemble_direct(y, k).charpoly_eval(lambda));
    Ok(IsospectralVerdict {
        isospectral: residual < opts.tolerance,
        residual,
        worst,
    })
}

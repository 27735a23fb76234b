//! Dense eigenvalues plus the perturbation checks used far out in the
//! multiplier variety: Gershgorin localization, separation of the free
//! symbols, and the large-`z_1` behaviour of the eigenvalues of `A + B_V`.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::{assemble_fourier, FloquetMatrix, MultiplierPoint};
use crate::lattice::{root_of_unity, LatticeConfig};
use crate::potential::Potential;

const SCHUR_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 10_000;
/// Entrywise defect below which a matrix takes the Hermitian path.
const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues with algebraic multiplicity, sorted by real part then
/// imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    hermitian: bool,
    norm: f64,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Whether the symmetric solver was used (all imaginary parts are zero).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// `∏ (λ_i - t)`, which should match `det(M - tI)`.
    pub fn charpoly_eval(&self, t: Complex64) -> Complex64 {
        self.eigenvalues.iter().map(|l| l - t).product()
    }

    /// Distinct eigenvalues with multiplicities, clustering within
    /// `1e-7·‖M‖`.
    pub fn clusters(&self) -> Vec<(Complex64, usize)> {
        let tol = 1e-7 * self.norm.max(1.0);
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for &l in &self.eigenvalues {
            match out.iter_mut().find(|(c, _)| (c - l).norm() <= tol) {
                Some((c, m)) => {
                    *c = (*c * *m as f64 + l) / (*m + 1) as f64;
                    *m += 1;
                }
                None => out.push((l, 1)),
            }
        }
        out
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let e = &self.eigenvalues;
        let mut best = f64::INFINITY;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                best = best.min((e[i] - e[j]).norm());
            }
        }
        best
    }
}

pub fn lexicographic(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn eigenvalues(m: &FloquetMatrix) -> Result<Spectrum> {
    eigenvalues_of(m.entries())
}

pub fn eigenvalues_of(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    let n = m.nrows();
    assert!(m.is_square(), "matrix must be square");
    let norm = m.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let no_convergence = Error::NoConvergence { dim: n, norm };
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            hermitian: true,
            norm,
        });
    }
    let hermitian =
        FloquetMatrix::from_matrix(m.clone()).is_hermitian(HERMITIAN_TOL * norm.max(1.0));
    let mut eigenvalues: Vec<Complex64> = if hermitian {
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h
            .try_symmetric_eigen(SCHUR_EPS, MAX_SWEEPS)
            .ok_or(no_convergence)?;
        eig.eigenvalues
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect()
    } else {
        let schur = m
            .clone()
            .try_schur(SCHUR_EPS, MAX_SWEEPS)
            .ok_or(no_convergence)?;
        let (_, t) = schur.unpack();
        t.diagonal().iter().copied().collect()
    };
    eigenvalues.sort_by(lexicographic);
    Ok(Spectrum {
        eigenvalues,
        hermitian,
        norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

impl Disc {
    pub fn contains(&self, x: Complex64) -> bool {
        (x - self.center).norm()
            <= self.radius * (1.0 + 1e-12) + 1e-12 * self.center.norm().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GershgorinReport {
    pub discs: Vec<Disc>,
    pub disjoint: bool,
    /// Eigenvalue count per disc; only meaningful when `disjoint`.
    pub counts: Vec<usize>,
    /// `Some(true)` when the discs are disjoint and each holds one eigenvalue.
    pub one_per_disc: Option<bool>,
}

/// Row Gershgorin discs of `M`, and when pairwise disjoint, confirms that
/// each contains exactly one computed eigenvalue.
pub fn gershgorin_check(m: &FloquetMatrix) -> Result<GershgorinReport> {
    let e = m.entries();
    let n = e.nrows();
    let discs: Vec<Disc> = (0..n)
        .map(|i| Disc {
            center: e[(i, i)],
            radius: (0..n).filter(|&j| j != i).map(|j| e[(i, j)].norm()).sum(),
        })
        .collect();
    let disjoint = (0..n).all(|i| {
        (i + 1..n)
            .all(|j| (discs[i].center - discs[j].center).norm() > discs[i].radius + discs[j].radius)
    });
    let spectrum = eigenvalues(m)?;
    let counts: Vec<usize> = discs
        .iter()
        .map(|d| {
            spectrum
                .eigenvalues()
                .iter()
                .filter(|&&l| d.contains(l))
                .count()
        })
        .collect();
    let one_per_disc = disjoint.then(|| counts.iter().all(|&c| c == 1));
    Ok(GershgorinReport {
        discs,
        disjoint,
        counts,
        one_per_disc,
    })
}

/// The region `Ω ⊂ (ℂ*)^d` where `|z_1| >= C_1^d` and
/// `C_1^{d-j+1} <= |z_j| <= C_1^{d-j+1} + 1` for `j >= 2` (one-based axes).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaDomain {
    pub c1: f64,
    pub dim: usize,
}

impl OmegaDomain {
    pub fn new(c1: f64, dim: usize) -> Self {
        assert!(c1 > 0.0 && dim >= 1);
        Self { c1, dim }
    }

    /// `C_1 = 100·d·(1 + max|V|) / min |1 - ρ|`, which keeps Gershgorin radii
    /// well under the separation of the free symbols.
    pub fn for_potential(v: &Potential) -> Self {
        let cfg = v.cfg();
        let gap = cfg.min_root_gap().unwrap_or(1.0);
        let c1 = 100.0 * cfg.dim() as f64 * (1.0 + v.max_abs()) / gap;
        Self::new(c1, cfg.dim())
    }

    /// Inner radius for axis `j` (zero-based).
    fn lower(&self, axis: usize) -> f64 {
        self.c1.powi((self.dim - axis) as i32)
    }

    pub fn contains(&self, z: &MultiplierPoint) -> bool {
        let z = z.components();
        z.len() == self.dim
            && z[0].norm() >= self.lower(0)
            && (1..self.dim).all(|j| {
                let r = z[j].norm();
                r >= self.lower(j) && r <= self.lower(j) + 1.0
            })
    }

    /// Random point with `|z_1|` in `[C_1^d, 2 C_1^d]` and random phases.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> MultiplierPoint {
        let tau = std::f64::consts::TAU;
        let z = (0..self.dim)
            .map(|j| {
                let lo = self.lower(j);
                let width = if j == 0 { lo } else { 1.0 };
                Complex64::from_polar(lo + width * rng.gen::<f64>(), rng.gen_range(0.0..tau))
            })
            .collect();
        MultiplierPoint::new(z).expect("nonzero radii")
    }

    /// `(1/2)·min_{j,m} |1 - ρ^j_m|·C_1`, or `None` when every period is 1.
    pub fn separation_bound(&self, cfg: &LatticeConfig) -> Option<f64> {
        cfg.min_root_gap().map(|g| 0.5 * g * self.c1)
    }
}

/// `Σ_j ρ^j_{l_j} z_j` for every `l` in canonical order.
pub fn leading_symbols(cfg: &LatticeConfig, z: &MultiplierPoint) -> Vec<Complex64> {
    cfg.cells()
        .iter()
        .map(|l| {
            l.coords()
                .iter()
                .zip(cfg.periods())
                .zip(z.components())
                .map(|((&lj, &q), &zj)| root_of_unity(q, lj as i64) * zj)
                .sum()
        })
        .collect()
}

/// Minimum distance between leading symbols of distinct cells; `+∞` when
/// `Q = 1`. Fails if `z ∉ Ω` or if the distance falls below
/// [`OmegaDomain::separation_bound`].
pub fn separation_lower_bound(
    cfg: &LatticeConfig,
    z: &MultiplierPoint,
    domain: &OmegaDomain,
) -> Result<f64> {
    if !domain.contains(z) {
        return Err(Error::OutsideOmega(format!("{:?}", z.components())));
    }
    let symbols = leading_symbols(cfg, z);
    let mut best = f64::INFINITY;
    for i in 0..symbols.len() {
        for j in i + 1..symbols.len() {
            best = best.min((symbols[i] - symbols[j]).norm());
        }
    }
    if let Some(bound) = domain.separation_bound(cfg) {
        if best < bound {
            return Err(Error::VerificationFailed(format!(
                "separation {best:e} below bound {bound:e}"
            )));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub samples: usize,
    /// `max |λ^l(z) - Σ_j ρ^j_{l_j} z_j|` over samples and cells.
    pub max_residual: f64,
    /// `‖V̂‖_1 + 4d / C_1`.
    pub residual_bound: f64,
    pub min_eigen_gap: f64,
    pub min_separation: f64,
    /// Largest ratio between the observed increment of `λ - ρ^1_{l_1} z_1`
    /// along a `z_1`-ray and the `O(1/|z_1|)` envelope fixed at the ray start;
    /// values `<= 1` mean the increments decay at least as fast as `1/|z_1|`.
    pub ray_decay_ratio: f64,
}

impl AsymptoticsReport {
    pub fn passes(&self) -> bool {
        self.max_residual <= self.residual_bound
            && self.ray_decay_ratio <= 1.0
            && self.min_eigen_gap > 0.4 * self.min_separation
    }
}

/// Number of doublings of `|z_1|` along each ray.
pub const RAY_STEPS: usize = 6;

/// Matches eigenvalues of `A + B_V` at each sample to the leading symbols,
/// bounds the residuals, and follows rays `z_1 -> 2^s z_1` to confirm that
/// `λ - ρ^1_{l_1} z_1` settles like a Laurent series with no positive powers
/// beyond the first.
pub fn asymptotics_check(
    v: &Potential,
    samples: &[MultiplierPoint],
    domain: &OmegaDomain,
) -> Result<AsymptoticsReport> {
    let cfg = v.cfg();
    let residual_bound = v.dft().l1_norm() + 4.0 * cfg.dim() as f64 / domain.c1;
    let mut max_residual = 0.0f64;
    let mut min_eigen_gap = f64::INFINITY;
    let mut min_separation = f64::INFINITY;
    let mut ray_decay_ratio = 0.0f64;
    for z in samples {
        let sep = separation_lower_bound(cfg, z, domain)?;
        min_separation = min_separation.min(sep);
        let (matched, gap) = matched_eigenvalues(v, z)?;
        min_eigen_gap = min_eigen_gap.min(gap);
        for (lambda, symbol) in matched.iter().zip(leading_symbols(cfg, z)) {
            max_residual = max_residual.max((lambda - symbol).norm());
        }
        ray_decay_ratio = ray_decay_ratio.max(ray_ratio(v, z)?);
    }
    Ok(AsymptoticsReport {
        samples: samples.len(),
        max_residual,
        residual_bound,
        min_eigen_gap,
        min_separation,
        ray_decay_ratio,
    })
}

/// Eigenvalues of `A + B_V` at `z` ordered by the cell of their nearest
/// leading symbol, plus the minimum pairwise eigenvalue distance.
fn matched_eigenvalues(v: &Potential, z: &MultiplierPoint) -> Result<(Vec<Complex64>, f64)> {
    let cfg = v.cfg();
    let spectrum = eigenvalues(&assemble_fourier(v, z))?;
    let symbols = leading_symbols(cfg, z);
    let mut slots: Vec<Option<Complex64>> = vec![None; symbols.len()];
    for &lambda in spectrum.eigenvalues() {
        let nearest = symbols
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - lambda).norm().total_cmp(&(b.1 - lambda).norm()))
            .map(|(i, _)| i)
            .expect("nonempty cell");
        if slots[nearest].replace(lambda).is_some() {
            return Err(Error::MatchingNotBijective(format!(
                "two eigenvalues nearest to cell {:?}",
                cfg.cell_at(nearest).coords()
            )));
        }
    }
    let matched = slots
        .into_iter()
        .map(|s| s.expect("Q eigenvalues fill Q slots"))
        .collect();
    Ok((matched, spectrum.min_pairwise_distance()))
}

#[allow(clippy::needless_range_loop)]
fn ray_ratio(v: &Potential, z: &MultiplierPoint) -> Result<f64> {
    let cfg = v.cfg();
    let q1 = cfg.periods()[0];
    let base = z.components().to_vec();
    let t0 = base[0].norm();
    let mut tails: Vec<Vec<Complex64>> = Vec::with_capacity(RAY_STEPS + 1);
    for s in 0..=RAY_STEPS {
        let mut point = base.clone();
        point[0] *= (1u64 << s) as f64;
        let z1 = point[0];
        let point = MultiplierPoint::new(point)?;
        let (matched, _) = matched_eigenvalues(v, &point)?;
        tails.push(
            cfg.cells()
                .iter()
                .zip(matched)
                .map(|(l, lambda)| lambda - root_of_unity(q1, l.coords()[0] as i64) * z1)
                .collect(),
        );
    }
    let q = cfg.cell_size();
    let mut worst = 0.0f64;
    for l in 0..q {
        let first = (tails[1][l] - tails[0][l]).norm();
        for s in 1..RAY_STEPS {
            let t = t0 * (1u64 << s) as f64;
            let step = (tails[s + 1][l] - tails[s][l]).norm();
            // Rounding floor for eigenvalues of magnitude ~t.
            let floor = 64.0 * f64::EPSILON * q as f64 * 2.0 * t;
            let envelope = 2.0 * first * t0 / t + floor;
            worst = worst.max(step / envelope);
        }
    }
    Ok(worst)
}

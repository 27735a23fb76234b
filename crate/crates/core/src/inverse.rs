//! Diagonal inverse eigenvalue problem and the exotic potentials built from it.
//!
//! Given `M` and targets `η_0..η_{N-1}`, find diagonal `x` such that
//! `M + diag(x)` has eigenvalues `η`. Matching characteristic polynomial
//! coefficients gives `N` polynomial equations in `x` whose top-degree parts
//! are the elementary symmetric polynomials, so the solution set is finite
//! (at most `N!` points). They are found by Newton's method from many random
//! starts and every candidate is re-checked by a direct eigensolve.
//!
//! With `M = D_0(0)` on a period-`q` chain and
//! `η_m = e^{2πim/q} + e^{-2πi(m+l)/q}`, each solution is a zero-mean potential
//! whose Bloch variety factors with shift `l`. Separable sums of such
//! one-dimensional solutions cover every `l ∈ W` in higher dimension.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::eigensolve::eigenvalues_of;
use crate::error::{Error, Result};
use crate::floquet::assemble_direct;
use crate::lattice::{root_of_unity, CellIndex, LatticeConfig};
use crate::potential::Potential;
use crate::sampling::{complex_in_disc, rng};
use crate::variety::{check_factorization, floquet_isospectral, IdentityOptions};

/// `[a_1, …, a_N]` with `det(λI - A) = λ^N + a_1 λ^{N-1} + … + a_N`, by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly_coefficients(a: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = Vec::with_capacity(n);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut prev = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        for i in 0..n {
            m[(i, i)] += prev;
        }
        m = a * &m;
        prev = -m.trace() / k as f64;
        coeffs.push(prev);
    }
    coeffs
}

/// `[a_1, …, a_N]` of `∏ (λ - η_m)`.
pub fn coefficients_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    // poly[i] is the coefficient of λ^{deg-i}
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        poly.push(Complex64::new(0.0, 0.0));
        for i in (1..poly.len()).rev() {
            let prev = poly[i - 1];
            poly[i] -= r * prev;
        }
    }
    poly.split_off(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseProblem {
    pub base: DMatrix<Complex64>,
    pub targets: Vec<Complex64>,
}

impl InverseProblem {
    pub fn new(base: DMatrix<Complex64>, targets: Vec<Complex64>) -> Result<Self> {
        if !base.is_square() || base.nrows() == 0 || base.nrows() != targets.len() {
            return Err(Error::LengthMismatch {
                expected: base.nrows(),
                found: targets.len(),
            });
        }
        Ok(Self { base, targets })
    }

    pub fn size(&self) -> usize {
        self.targets.len()
    }

    fn with_diagonal(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        let mut m = self.base.clone();
        for (i, xi) in x.iter().enumerate() {
            m[(i, i)] += xi;
        }
        m
    }

    /// Coefficient residual `a(M + diag x) - a(targets)`.
    pub fn residual(&self, x: &[Complex64]) -> Vec<Complex64> {
        let target = coefficients_from_roots(&self.targets);
        charpoly_coefficients(&self.with_diagonal(x))
            .into_iter()
            .zip(target)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `∂a_i/∂x_j = -b^{(j)}_{i-1}`, where `b^{(j)}` are the coefficients
    /// (leading 1 included) of the characteristic polynomial of the principal
    /// submatrix with row and column `j` removed.
    pub fn jacobian(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.size();
        let m = self.with_diagonal(x);
        let mut jac = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            let minor = m.clone().remove_row(j).remove_column(j);
            jac[(0, j)] = -Complex64::new(1.0, 0.0);
            for (i, b) in charpoly_coefficients(&minor).into_iter().enumerate() {
                jac[(i + 1, j)] = -b;
            }
        }
        jac
    }

    /// Max distance between the eigenvalues of `M + diag x` and the targets
    /// under the best pairing.
    pub fn eigen_mismatch(&self, x: &[Complex64]) -> Result<f64> {
        let spectrum = eigenvalues_of(&self.with_diagonal(x))?;
        Ok(bottleneck_distance(spectrum.eigenvalues(), &self.targets))
    }

    fn coefficient_scale(&self) -> f64 {
        coefficients_from_roots(&self.targets)
            .iter()
            .map(|c| c.norm())
            .fold(1.0, f64::max)
    }
}

/// Smallest achievable maximum distance over bijections between `a` and `b`.
pub fn bottleneck_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    fn search(a: &[Complex64], b: &[Complex64], used: &mut [bool], current: f64, best: &mut f64) {
        let Some((first, rest)) = a.split_first() else {
            *best = best.min(current);
            return;
        };
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            let d = current.max((first - b[j]).norm());
            if d < *best {
                used[j] = true;
                search(rest, b, used, d, best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    search(a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonSettings {
    /// Number of random starts; `None` means `200·N!`.
    pub attempts: Option<usize>,
    pub max_iterations: usize,
    /// Coefficient residual, relative to the largest target coefficient.
    pub tolerance: f64,
    pub divergence: f64,
    pub dedup_tolerance: f64,
    /// Merge radius (relative to `1 + |x|`) around multiple roots.
    pub singular_dedup_tolerance: f64,
    /// Eigenvalue check applied to every candidate.
    pub eigen_tolerance: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            attempts: None,
            max_iterations: 100,
            tolerance: 1e-12,
            divergence: 1e3,
            dedup_tolerance: 1e-6,
            singular_dedup_tolerance: 1e-3,
            eigen_tolerance: 1e-7,
        }
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseSolution {
    pub x: Vec<Complex64>,
    pub coefficient_residual: f64,
    pub eigen_mismatch: f64,
    /// The Jacobian is numerically singular here (a multiple root).
    pub singular: bool,
}

/// Newton limits that converged to one root. Near a multiple root the limits
/// scatter over roughly `ε^{1/m}`, so their centroid stands for the root.
struct Cluster {
    first: Vec<Complex64>,
    first_residual: f64,
    sum: Vec<Complex64>,
    count: usize,
    singular: bool,
}

impl Cluster {
    fn new(x: Vec<Complex64>, residual: f64, singular: bool) -> Self {
        Self {
            sum: x.clone(),
            first: x,
            first_residual: residual,
            count: 1,
            singular,
        }
    }

    fn centroid(&self) -> Vec<Complex64> {
        self.sum.iter().map(|s| s / self.count as f64).collect()
    }

    fn absorb(&mut self, x: &[Complex64], singular: bool) {
        for (s, xi) in self.sum.iter_mut().zip(x) {
            *s += xi;
        }
        self.count += 1;
        self.singular |= singular;
    }
}

/// Ratio of extreme singular values of the Jacobian below which a root is
/// treated as multiple.
const SINGULAR_RATIO: f64 = 1e-5;

fn is_singular(problem: &InverseProblem, x: &[Complex64]) -> bool {
    let sv = problem.jacobian(x).singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    max == 0.0 || min / max < SINGULAR_RATIO
}

/// Newton multistart on the coefficient equations. Returns distinct
/// solutions in lexicographic order of their components. Stops early once
/// `N!` distinct solutions are known, since no more can exist.
///
/// Limits closer than `dedup_tolerance` are one solution; around a multiple
/// root, where Newton only resolves the root to `ε^{1/m}`, limits within
/// `singular_dedup_tolerance` are merged and replaced by their centroid.
pub fn solve_diagonal_inverse(
    problem: &InverseProblem,
    settings: &NewtonSettings,
    seed: u64,
) -> Result<Vec<InverseSolution>> {
    let n = problem.size();
    let limit = factorial(n) as usize;
    let attempts = settings.attempts.unwrap_or(200 * limit);
    let norm = (0..n)
        .map(|i| problem.base.row(i).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let eta_max = problem.targets.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let radius = 2.0 * (norm + eta_max);
    let mut r = rng(seed);
    let mut found: Vec<InverseSolution> = Vec::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    for _ in 0..attempts {
        let start: Vec<Complex64> = (0..n).map(|_| complex_in_disc(&mut r, radius)).collect();
        let Some((x, residual)) = newton(problem, start, settings) else {
            continue;
        };
        let singular = is_singular(problem, &x);
        let merge_radius = |c: &Cluster| {
            if singular || c.singular {
                settings.singular_dedup_tolerance * (1.0 + max_norm(&x))
            } else {
                settings.dedup_tolerance
            }
        };
        if let Some(i) = clusters
            .iter()
            .position(|c| max_distance(&c.centroid(), &x) <= merge_radius(c))
        {
            clusters[i].absorb(&x, singular);
            continue;
        }
        if problem.eigen_mismatch(&x)? > settings.eigen_tolerance {
            continue;
        }
        clusters.push(Cluster::new(x, residual, singular));
        if clusters.len() >= limit {
            break;
        }
    }
    for c in clusters {
        if !c.singular {
            let mismatch = problem.eigen_mismatch(&c.first)?;
            found.push(InverseSolution {
                x: c.first,
                coefficient_residual: c.first_residual,
                eigen_mismatch: mismatch,
                singular: false,
            });
            continue;
        }
        let x = c.centroid();
        let residual = max_norm(&problem.residual(&x)) / problem.coefficient_scale();
        let mismatch = problem.eigen_mismatch(&x)?;
        // The centroid of a singular cluster is normally the better point;
        // keep the first hit if it is not.
        let (x, residual, mismatch) = if mismatch <= settings.eigen_tolerance {
            (x, residual, mismatch)
        } else {
            let m = problem.eigen_mismatch(&c.first)?;
            (c.first, c.first_residual, m)
        };
        found.push(InverseSolution {
            x,
            coefficient_residual: residual,
            eigen_mismatch: mismatch,
            singular: c.singular,
        });
    }
    if found.is_empty() {
        return Err(Error::NoSolution { attempts });
    }
    found.sort_by(|a, b| {
        a.x.iter()
            .zip(&b.x)
            .map(|(u, v)| crate::eigensolve::lexicographic(u, v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}

fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Newton iteration from `x`. After the residual test passes the iteration
/// keeps polishing while steps shrink, so that starts converging to the same
/// singular root land within the deduplication radius.
fn newton(
    problem: &InverseProblem,
    mut x: Vec<Complex64>,
    settings: &NewtonSettings,
) -> Option<(Vec<Complex64>, f64)> {
    let scale = problem.coefficient_scale();
    let mut residual = max_norm(&problem.residual(&x)) / scale;
    let mut last_step = f64::INFINITY;
    for _ in 0..settings.max_iterations {
        let f = DVector::from_vec(problem.residual(&x));
        residual = f.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale;
        if residual == 0.0 {
            break;
        }
        let Some(step) = problem.jacobian(&x).lu().solve(&f) else {
            break;
        };
        let size = max_norm(step.as_slice());
        if !size.is_finite() {
            return None;
        }
        if residual < settings.tolerance && size >= last_step {
            break;
        }
        for (xi, s) in x.iter_mut().zip(step.iter()) {
            *xi -= s;
        }
        if max_norm(&x) > settings.divergence {
            return None;
        }
        last_step = size;
        if size <= 1e-15 * (1.0 + max_norm(&x)) {
            residual = max_norm(&problem.residual(&x)) / scale;
            break;
        }
    }
    (residual < settings.tolerance).then_some((x, residual))
}

/// `η_m = e^{2πim/q} + e^{-2πi(m+l)/q}`, `m = 0..q`.
pub fn exotic_targets(q: usize, l: usize) -> Vec<Complex64> {
    (0..q as i64)
        .map(|m| root_of_unity(q, m) + root_of_unity(q, -(m + l as i64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExoticFamily {
    pub q1: usize,
    pub l1: usize,
    /// Zero-mean one-dimensional potentials, deduplicated.
    #[serde(serialize_with = "serialize_solutions")]
    pub solutions: Vec<Potential>,
    /// Factorization residual of each solution.
    pub residuals: Vec<f64>,
    /// Candidates rejected by the final checks, with reasons.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub discarded: Vec<String>,
}

fn serialize_solutions<S: serde::Serializer>(
    sols: &[Potential],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(sols.len()))?;
    for p in sols {
        seq.serialize_element(p.values())?;
    }
    seq.end()
}

impl ExoticFamily {
    pub fn cfg(&self) -> LatticeConfig {
        LatticeConfig::new([self.q1]).expect("q1 >= 1")
    }
}

/// Tolerance on `|mean V|` for constructed potentials.
pub const MEAN_TOLERANCE: f64 = 1e-9;

/// Solves the inverse problem for `M = D_0(0)` with the shift-`l1` targets
/// and keeps the solutions whose characteristic polynomial factors with
/// `l = (l1)` and `K = 0` for all `(k, λ)`.
pub fn construct_exotic_1d(q1: usize, l1: usize, seed: u64) -> Result<ExoticFamily> {
    construct_exotic_1d_with(
        q1,
        l1,
        seed,
        &NewtonSettings::default(),
        &IdentityOptions::default(),
    )
}

pub fn construct_exotic_1d_with(
    q1: usize,
    l1: usize,
    seed: u64,
    settings: &NewtonSettings,
    identity: &IdentityOptions,
) -> Result<ExoticFamily> {
    let cfg = LatticeConfig::new([q1])?;
    let l = cfg.cell([l1])?;
    let free = assemble_direct(&Potential::zero(cfg.clone()), &[Complex64::new(0.0, 0.0)]);
    let problem = InverseProblem::new(free.into_entries(), exotic_targets(q1, l1))?;
    let mut family = ExoticFamily {
        q1,
        l1,
        solutions: vec![],
        residuals: vec![],
        discarded: vec![],
    };
    for sol in solve_diagonal_inverse(&problem, settings, seed)? {
        let v = Potential::new(cfg.clone(), sol.x)?;
        let mean = v.mean().norm();
        if mean >= MEAN_TOLERANCE {
            family.discarded.push(format!("mean {mean:e} is not zero"));
            continue;
        }
        let check = check_factorization(&v, &l, Complex64::new(0.0, 0.0), identity);
        if !check.holds(identity.tolerance) {
            family
                .discarded
                .push(format!("factorization residual {:e}", check.residual));
            continue;
        }
        family.solutions.push(v);
        family.residuals.push(check.residual);
    }
    if family.solutions.is_empty() {
        return Err(Error::VerificationFailed(format!(
            "no verified solution for q1={q1}, l1={l1}: {:?}",
            family.discarded
        )));
    }
    Ok(family)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExoticPotential {
    pub potential: Potential,
    pub l: CellIndex,
    pub residual: f64,
}

/// `V(n) = Σ_j V_j(n_j)` from one chosen solution per axis, checked to
/// factor with `l = (l_1, …, l_d)` and `K = 0`.
pub fn lift_separable(families: &[&ExoticFamily], choice: &[usize]) -> Result<ExoticPotential> {
    lift_separable_with(families, choice, &IdentityOptions::default())
}

pub fn lift_separable_with(
    families: &[&ExoticFamily],
    choice: &[usize],
    identity: &IdentityOptions,
) -> Result<ExoticPotential> {
    if families.len() != choice.len() {
        return Err(Error::LengthMismatch {
            expected: families.len(),
            found: choice.len(),
        });
    }
    let cfg = LatticeConfig::new(families.iter().map(|f| f.q1).collect::<Vec<_>>())?;
    let parts = families
        .iter()
        .zip(choice)
        .map(|(f, &i)| {
            f.solutions.get(i).cloned().ok_or(Error::LengthMismatch {
                expected: f.solutions.len(),
                found: i,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let potential = Potential::separable(cfg.clone(), &parts)?;
    let l = cfg.cell(families.iter().map(|f| f.l1).collect::<Vec<_>>())?;
    let check = check_factorization(&potential, &l, Complex64::new(0.0, 0.0), identity);
    if !check.holds(identity.tolerance) {
        return Err(Error::VerificationFailed(format!(
            "lifted potential misses the l={:?} factorization (residual {:e})",
            l.coords(),
            check.residual
        )));
    }
    Ok(ExoticPotential {
        potential,
        l,
        residual: check.residual,
    })
}

/// All separable exotic potentials for one shift `l`, one per combination of
/// per-axis solutions.
pub fn construct_exotic(
    cfg: &LatticeConfig,
    l: &CellIndex,
    seed: u64,
) -> Result<Vec<ExoticPotential>> {
    let families = cfg
        .periods()
        .iter()
        .zip(l.coords())
        .map(|(&q, &lj)| construct_exotic_1d(q, lj, family_seed(seed, q, lj)))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&ExoticFamily> = families.iter().collect();
    choices(&refs)
        .into_iter()
        .map(|choice| lift_separable(&refs, &choice))
        .collect()
}

fn family_seed(seed: u64, q: usize, l: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((q as u64) << 32 | l as u64)
}

/// Every index tuple `(i_1, …, i_d)` with `i_j < |family_j|`.
fn choices(families: &[&ExoticFamily]) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = families.iter().map(|f| f.solutions.len()).collect();
    match LatticeConfig::new(sizes) {
        Ok(grid) => grid
            .cells()
            .into_iter()
            .map(|c| c.coords().to_vec())
            .collect(),
        Err(_) => vec![],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExoticClass {
    pub l: CellIndex,
    pub representative: Potential,
    /// All separable solutions found for this `l`, representative first.
    pub members: Vec<Potential>,
    /// Whether every member is Floquet isospectral to the representative.
    pub members_isospectral: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XeReport {
    pub periods: Vec<usize>,
    pub classes: Vec<ExoticClass>,
    /// Number of Floquet isospectrality classes among the representatives.
    pub class_count: usize,
    pub total_solutions: usize,
    /// `Q·Q!`.
    pub bound: u64,
    /// Pairs of shifts whose representatives turned out isospectral.
    pub coincidences: Vec<(CellIndex, CellIndex)>,
    /// Shifts for which no verified potential was found.
    pub missing: Vec<CellIndex>,
}

impl XeReport {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn within_bound(&self) -> bool {
        (self.total_solutions as u64) <= self.bound
    }
}

/// Builds zero-mean potentials with the factorization property for every
/// `l ∈ W` and sorts their representatives into isospectrality classes.
pub fn enumerate_xe(cfg: &LatticeConfig, seed: u64) -> Result<XeReport> {
    let identity = IdentityOptions {
        seed,
        ..IdentityOptions::default()
    };
    let mut cache: BTreeMap<(usize, usize), Option<ExoticFamily>> = BTreeMap::new();
    for &q in cfg.periods() {
        for l in 0..q {
            cache.entry((q, l)).or_insert_with(|| {
                construct_exotic_1d_with(
                    q,
                    l,
                    family_seed(seed, q, l),
                    &NewtonSettings::default(),
                    &identity,
                )
                .ok()
            });
        }
    }
    let mut classes = Vec::new();
    let mut missing = Vec::new();
    for l in cfg.cells() {
        let families: Option<Vec<&ExoticFamily>> = cfg
            .periods()
            .iter()
            .zip(l.coords())
            .map(|(&q, &lj)| cache[&(q, lj)].as_ref())
            .collect();
        let Some(families) = families else {
            missing.push(l);
            continue;
        };
        let members = choices(&families)
            .into_iter()
            .map(|c| lift_separable_with(&families, &c, &identity).map(|e| e.potential))
            .collect::<Result<Vec<_>>>()?;
        let representative = members[0].clone();
        let members_isospectral = members.iter().skip(1).try_fold(true, |ok, m| {
            Ok::<_, Error>(ok && floquet_isospectral(&representative, m, &identity)?.isospectral)
        })?;
        classes.push(ExoticClass {
            l,
            representative,
            members,
            members_isospectral,
        });
    }
    // Group representatives by isospectrality.
    let mut leaders: Vec<usize> = Vec::new();
    let mut coincidences = Vec::new();
    for i in 0..classes.len() {
        let mut joined = false;
        for &lead in &leaders {
            if floquet_isospectral(
                &classes[lead].representative,
                &classes[i].representative,
                &identity,
            )?
            .isospectral
            {
                coincidences.push((classes[lead].l.clone(), classes[i].l.clone()));
                joined = true;
                break;
            }
        }
        if !joined {
            leaders.push(i);
        }
    }
    let q = cfg.cell_size();
    Ok(XeReport {
        periods: cfg.periods().to_vec(),
        class_count: leaders.len(),
        total_solutions: classes.iter().map(|c| c.members.len()).sum(),
        bound: q as u64 * factorial(q),
        classes,
        coincidences,
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::charpoly_eval;
    use crate::sampling::{complex_in_box, complex_in_disc};
    use crate::variety::entire_graph_test;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat(n: usize, data: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(n, n, data)
    }

    /// Evaluates `λ^N + Σ a_i λ^{N-i}`.
    fn horner(coeffs: &[Complex64], lambda: Complex64) -> Complex64 {
        coeffs
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, a| acc * lambda + a)
    }

    #[test]
    fn faddeev_leverrier_matches_determinant() {
        let mut r = rng(41);
        for n in 1..7 {
            let a = DMatrix::from_fn(n, n, |_, _| complex_in_box(&mut r, 2.0));
            let coeffs = charpoly_coefficients(&a);
            for _ in 0..10 {
                let lambda = complex_in_disc(&mut r, 4.0);
                // det(λI - A) = (-1)^N det(A - λI)
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let expect = charpoly_eval(&a, lambda) * sign;
                let got = horner(&coeffs, lambda);
                assert!(
                    (got - expect).norm() < 1e-9 * expect.norm().max(1.0),
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn coefficients_from_roots_small() {
        let c2 = coefficients_from_roots(&[c(2.0, 0.0), c(-2.0, 0.0)]);
        assert_eq!(c2, vec![c(0.0, 0.0), c(-4.0, 0.0)]);
        let c1 = coefficients_from_roots(&[c(5.0, 1.0)]);
        assert_eq!(c1, vec![c(-5.0, -1.0)]);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut r = rng(42);
        for n in 1..6 {
            let base = DMatrix::from_fn(n, n, |_, _| complex_in_box(&mut r, 1.0));
            let targets: Vec<Complex64> = (0..n).map(|_| complex_in_box(&mut r, 2.0)).collect();
            let p = InverseProblem::new(base, targets).unwrap();
            let x: Vec<Complex64> = (0..n).map(|_| complex_in_box(&mut r, 1.0)).collect();
            let jac = p.jacobian(&x);
            let h = 1e-6;
            for j in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fp = p.residual(&xp);
                let fm = p.residual(&xm);
                for i in 0..n {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!(
                        (fd - jac[(i, j)]).norm() < 1e-6 * fd.norm().max(1.0),
                        "n={n} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn scalar_problem() {
        let p = InverseProblem::new(mat(1, &[c(0.0, 0.0)]), vec![c(5.0, 0.0)]).unwrap();
        let sols = solve_diagonal_inverse(&p, &NewtonSettings::default(), 0).unwrap();
        assert_eq!(sols.len(), 1);
        assert!((sols[0].x[0] - c(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn two_by_two_nilpotent_targets() {
        let m = mat(2, &[c(0.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        let p = InverseProblem::new(m, vec![c(0.0, 0.0); 2]).unwrap();
        let sols = solve_diagonal_inverse(&p, &NewtonSettings::default(), 1).unwrap();
        assert_eq!(sols.len(), 2);
        // trace x0 + x1 = 0, det x0 x1 - 4 = 0  =>  x0 = ±2i
        assert!((sols[0].x[0] - c(0.0, -2.0)).norm() < 1e-7);
        assert!((sols[0].x[1] - c(0.0, 2.0)).norm() < 1e-7);
        assert!((sols[1].x[0] - c(0.0, 2.0)).norm() < 1e-7);
        assert!((sols[1].x[1] - c(0.0, -2.0)).norm() < 1e-7);
    }

    #[test]
    fn two_by_two_targets_already_met() {
        let m = mat(2, &[c(0.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        let p = InverseProblem::new(m, vec![c(2.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let sols = solve_diagonal_inverse(&p, &NewtonSettings::default(), 2).unwrap();
        assert!(sols.iter().any(|s| max_norm(&s.x) < 1e-7));
        assert!(sols.len() <= 2);
    }

    #[test]
    fn random_problems_respect_the_factorial_bound() {
        let mut r = rng(43);
        for n in 2..5 {
            let base = DMatrix::from_fn(n, n, |_, _| complex_in_box(&mut r, 1.0));
            let targets: Vec<Complex64> = (0..n).map(|_| complex_in_box(&mut r, 2.0)).collect();
            let p = InverseProblem::new(base, targets).unwrap();
            let sols = solve_diagonal_inverse(&p, &NewtonSettings::default(), 3).unwrap();
            assert!(sols.len() as u64 <= factorial(n));
            for s in &sols {
                assert!(p.eigen_mismatch(&s.x).unwrap() < 1e-7);
            }
        }
    }

    #[test]
    fn bottleneck_pairs_optimally() {
        let a = [c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(1.1, 0.0), c(0.05, 0.0)];
        assert!((bottleneck_distance(&a, &b) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn exotic_two_site_families() {
        let f0 = construct_exotic_1d(2, 0, 0).unwrap();
        assert_eq!(f0.solutions.len(), 1);
        assert!(f0.solutions[0].max_abs() < 1e-7);

        let f1 = construct_exotic_1d(2, 1, 0).unwrap();
        assert_eq!(f1.solutions.len(), 2);
        let expect = [[c(0.0, -2.0), c(0.0, 2.0)], [c(0.0, 2.0), c(0.0, -2.0)]];
        for (sol, e) in f1.solutions.iter().zip(&expect) {
            for (a, b) in sol.values().iter().zip(e) {
                assert!((a - b).norm() < 1e-7);
            }
            let cert = entire_graph_test(sol, &IdentityOptions::default());
            assert!(cert.holds);
            assert_eq!(cert.l.coords(), &[1]);
        }
    }

    #[test]
    fn exotic_three_site_family() {
        for l in 0..3 {
            let f = construct_exotic_1d(3, l, 5).unwrap();
            assert!(!f.solutions.is_empty());
            assert!(f.solutions.len() <= 6);
            for (v, res) in f.solutions.iter().zip(&f.residuals) {
                assert!(*res < 1e-8);
                assert!(v.mean().norm() < MEAN_TOLERANCE);
            }
        }
    }

    #[test]
    fn single_site_family_is_zero() {
        let f = construct_exotic_1d(1, 0, 0).unwrap();
        assert_eq!(f.solutions.len(), 1);
        assert!(f.solutions[0].max_abs() < 1e-12);
        assert!(construct_exotic_1d(2, 2, 0).is_err());
    }

    #[test]
    fn conjugate_pairs_at_period_two() {
        // Real symmetric M and a self-conjugate target multiset: solutions
        // come in conjugate pairs.
        let f = construct_exotic_1d(2, 1, 7).unwrap();
        for v in &f.solutions {
            let conj: Vec<Complex64> = v.values().iter().map(|x| x.conj()).collect();
            assert!(f
                .solutions
                .iter()
                .any(|w| max_distance(w.values(), &conj) < 1e-7));
        }
    }

    #[test]
    fn separable_lifts() {
        let f1 = construct_exotic_1d(2, 1, 0).unwrap();
        let f0 = construct_exotic_1d(2, 0, 0).unwrap();
        let lifted = lift_separable(&[&f1, &f1], &[1, 1]).unwrap();
        assert_eq!(lifted.l.coords(), &[1, 1]);
        let cert = entire_graph_test(&lifted.potential, &IdentityOptions::default());
        assert!(cert.holds);

        let mixed = lift_separable(&[&f0, &f1], &[0, 0]).unwrap();
        assert_eq!(mixed.l.coords(), &[0, 1]);

        let single = lift_separable(&[&f1], &[0]).unwrap();
        assert_eq!(single.potential, f1.solutions[0]);

        assert!(lift_separable(&[&f1], &[5]).is_err());
        assert!(lift_separable(&[&f1, &f0], &[0]).is_err());
    }

    #[test]
    fn xe_for_small_periods() {
        let rep = enumerate_xe(&LatticeConfig::new([2]).unwrap(), 0).unwrap();
        assert!(rep.complete());
        assert_eq!(rep.class_count, 2);
        assert_eq!(rep.total_solutions, 3);
        assert_eq!(rep.bound, 4);
        assert!(rep.coincidences.is_empty());

        let rep = enumerate_xe(&LatticeConfig::new([1]).unwrap(), 0).unwrap();
        assert_eq!(rep.class_count, 1);
        assert_eq!(rep.total_solutions, 1);
    }

    #[test]
    fn multiple_root_is_counted_once() {
        // For l = 0 the targets are the spectrum of M itself, and x = 0 is a
        // multiple root that Newton only resolves to about ε^{1/m}.
        let f = construct_exotic_1d(3, 0, 0).unwrap();
        assert_eq!(f.solutions.len(), 1);
        assert!(f.solutions[0].values().iter().all(|x| x.norm() < 1e-3));
        for l in 0..4 {
            let f = construct_exotic_1d(4, l, 0).unwrap();
            assert!(f.solutions.len() as u64 <= factorial(4));
        }
    }

    #[test]
    fn xe_two_by_two() {
        let rep = enumerate_xe(&LatticeConfig::new([2, 2]).unwrap(), 0).unwrap();
        assert!(rep.complete());
        assert_eq!(rep.class_count, 4);
        assert!(rep.within_bound());
        assert!(rep.classes.iter().all(|c| c.members_isospectral));
    }
}

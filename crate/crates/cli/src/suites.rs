//! Named invariant suites run by `bloch verify`.

use std::fmt;
use std::str::FromStr;

use bloch_core::eigensolve::{asymptotics_check, eigenvalues, gershgorin_check, OmegaDomain};
use bloch_core::floquet::substituted_charpoly_eval;
use bloch_core::inverse::enumerate_xe;
use bloch_core::sampling::{complex_in_disc, random_complex_potential, rng};
use bloch_core::spectrum::{borg_check_1d, BorgVerdict};
use bloch_core::{assemble_direct, Complex64, LatticeConfig, MultiplierPoint, Potential};
use rand::Rng;
use serde::Serialize;

use crate::commands::GlobalOptions;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma21,
    Gershgorin,
    Asymptotics,
    Borg1d,
    Counting,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemma21,
        Suite::Gershgorin,
        Suite::Asymptotics,
        Suite::Borg1d,
        Suite::Counting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma21 => "lemma21",
            Suite::Gershgorin => "gershgorin",
            Suite::Asymptotics => "asymptotics",
            Suite::Borg1d => "borg1d",
            Suite::Counting => "counting",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{}: {}: {verdict}", self.name, self.detail)
    }
}

const LEMMA21_TOLERANCE: f64 = 1e-9;
const LEMMA21_SAMPLES: usize = 200;

fn shapes() -> Vec<LatticeConfig> {
    [&[2usize][..], &[3], &[2, 2]]
        .iter()
        .map(|p| LatticeConfig::new(p.to_vec()).expect("valid periods"))
        .collect()
}

pub fn run_suite(suite: Suite, periods: &[usize], opts: &GlobalOptions) -> CliResult<Vec<Check>> {
    match suite {
        Suite::Lemma21 => Ok(lemma21(opts.seed)),
        Suite::Gershgorin => gershgorin(opts.seed),
        Suite::Asymptotics => asymptotics(opts.seed),
        Suite::Borg1d => borg1d(opts.seed),
        Suite::Counting => counting(periods, opts.seed),
    }
}

/// Direct and Fourier characteristic polynomials agree after `k ↔ z`.
fn lemma21(seed: u64) -> Vec<Check> {
    let mut r = rng(seed);
    let shapes = shapes();
    let mut worst = vec![0.0f64; shapes.len()];
    let mut counts = vec![0usize; shapes.len()];
    for i in 0..LEMMA21_SAMPLES {
        let s = i % shapes.len();
        let cfg = &shapes[s];
        let v = random_complex_potential(&mut r, cfg, 2.0);
        let z: Vec<Complex64> = (0..cfg.dim())
            .map(|_| {
                Complex64::from_polar(
                    r.gen_range(0.5..2.0),
                    r.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let z = MultiplierPoint::new(z).expect("nonzero multipliers");
        let lambda = complex_in_disc(&mut r, 6.0);
        let direct = assemble_direct(&v, &z.to_quasimomentum(cfg)).charpoly_eval(lambda);
        let fourier = substituted_charpoly_eval(&v, &z, lambda);
        let rel = (direct - fourier).norm() / direct.norm().max(fourier.norm()).max(1.0);
        worst[s] = worst[s].max(rel);
        counts[s] += 1;
    }
    shapes
        .iter()
        .zip(worst.iter().zip(&counts))
        .map(|(cfg, (&w, &n))| {
            Check::new(
                format!("lemma21 q={:?}", cfg.periods()),
                w < LEMMA21_TOLERANCE,
                format!("{n} samples, max relative mismatch {w:.3e}"),
            )
        })
        .collect()
}

/// In the asymptotic domain the Gershgorin discs of `A + B_V` separate and
/// every eigenvalue is simple.
fn gershgorin(seed: u64) -> CliResult<Vec<Check>> {
    let mut r = rng(seed);
    let mut checks = Vec::new();
    for cfg in shapes() {
        let (mut ok, mut total) = (0usize, 0usize);
        let mut min_gap = f64::INFINITY;
        for _ in 0..20 {
            let v = random_complex_potential(&mut r, &cfg, 2.0);
            let domain = OmegaDomain::for_potential(&v);
            for _ in 0..5 {
                let z = domain.sample(&mut r);
                let m = bloch_core::assemble_fourier(&v, &z);
                let report = gershgorin_check(&m)?;
                let spec = eigenvalues(&m)?;
                min_gap = min_gap.min(spec.min_pairwise_distance());
                let simple = spec.clusters().iter().all(|(_, n)| *n == 1);
                total += 1;
                if report.disjoint && report.one_per_disc == Some(true) && simple {
                    ok += 1;
                }
            }
        }
        checks.push(Check::new(
            format!("gershgorin q={:?}", cfg.periods()),
            ok == total,
            format!("{ok}/{total} disjoint with simple eigenvalues, min gap {min_gap:.3e}"),
        ));
    }
    Ok(checks)
}

fn asymptotics(seed: u64) -> CliResult<Vec<Check>> {
    let mut r = rng(seed);
    let mut checks = Vec::new();
    for cfg in shapes() {
        let mut pass = 0usize;
        let mut worst_ratio = 0.0f64;
        let mut worst_excess = f64::NEG_INFINITY;
        let runs = 10;
        for _ in 0..runs {
            let v = random_complex_potential(&mut r, &cfg, 2.0);
            let domain = OmegaDomain::for_potential(&v);
            let samples: Vec<MultiplierPoint> = (0..5).map(|_| domain.sample(&mut r)).collect();
            let report = asymptotics_check(&v, &samples, &domain)?;
            worst_ratio = worst_ratio.max(report.ray_decay_ratio);
            worst_excess = worst_excess.max(report.max_residual - report.residual_bound);
            if report.passes() {
                pass += 1;
            }
        }
        checks.push(Check::new(
            format!("asymptotics q={:?}", cfg.periods()),
            pass == runs,
            format!(
                "{pass}/{runs} potentials, max(residual - bound) {worst_excess:.3e}, ray ratio {worst_ratio:.3}"
            ),
        ));
    }
    Ok(checks)
}

fn borg1d(seed: u64) -> CliResult<Vec<Check>> {
    let mut r = rng(seed);
    let mut gapped = 0usize;
    let runs = 50;
    for _ in 0..runs {
        let q = r.gen_range(2..=6usize);
        let values: Vec<f64> = (0..q)
            .map(|_| {
                let mag = r.gen_range(0.1..=2.0);
                if r.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let cfg = LatticeConfig::new([q])?;
        let v = Potential::from_real(cfg, &values)?;
        let report = borg_check_1d(&v, 1024)?;
        if report.verdict == BorgVerdict::Gapped {
            gapped += 1;
        }
    }
    let mut checks = vec![Check::new(
        "borg1d nonconstant",
        gapped == runs,
        format!("{gapped}/{runs} random nonconstant potentials gapped"),
    )];
    for c in [0.0, 1.5, -0.7] {
        let cfg = LatticeConfig::new([3])?;
        let v = Potential::from_real(cfg, &[c; 3])?;
        let report = borg_check_1d(&v, 1024)?;
        checks.push(Check::new(
            format!("borg1d constant {c}"),
            report.verdict == BorgVerdict::ConstantLike,
            format!("verdict {:?}", report.verdict),
        ));
    }
    for a in [0.5, 1.0, 2.0] {
        let cfg = LatticeConfig::new([2])?;
        let v = Potential::from_real(cfg, &[a, -a])?;
        let report = borg_check_1d(&v, 1024)?;
        let width = report.widest_gap.map_or(0.0, |g| g.width());
        checks.push(Check::new(
            format!("borg1d pair ({a}, {})", -a),
            (width - 2.0 * a).abs() <= 1e-3,
            format!("gap width {width:.6}, expected {:.6}", 2.0 * a),
        ));
    }
    Ok(checks)
}

fn counting(periods: &[usize], seed: u64) -> CliResult<Vec<Check>> {
    let periods = if periods.is_empty() {
        vec![2]
    } else {
        periods.to_vec()
    };
    let cfg = LatticeConfig::new(periods.clone())
        .map_err(|e| CliError::Usage(format!("--periods: {e}")))?;
    let report = enumerate_xe(&cfg, seed)?;
    let consistent = report.classes.iter().all(|c| c.members_isospectral);
    let passed = report.complete() && report.within_bound() && consistent;
    let mut detail = format!(
        "classes={}, solutions={}, bound={}",
        report.class_count, report.total_solutions, report.bound
    );
    if !report.coincidences.is_empty() {
        detail.push_str(&format!(
            ", coincident shifts={}",
            report.coincidences.len()
        ));
    }
    if !report.missing.is_empty() {
        detail.push_str(&format!(", missing shifts={}", report.missing.len()));
    }
    Ok(vec![Check::new(
        format!("counting q={periods:?}"),
        passed,
        detail,
    )])
}

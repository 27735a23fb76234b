//! Band functions of real periodic potentials over the Brillouin zone,
//! the spectrum as a union of band intervals, and spectral gaps.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::eigensolve::eigenvalues;
use crate::error::{Error, Result};
use crate::floquet::assemble_direct;
use crate::lattice::LatticeConfig;
use crate::potential::Potential;

/// Gaps narrower than this are reported as unresolved rather than as gaps.
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-6;

/// Grid points per axis used when the caller does not choose.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 64,
        _ => 24,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    cfg: LatticeConfig,
    resolution: Vec<usize>,
    /// Quasimomenta in `[0,1)^d`, lexicographic with the first axis outermost.
    grid: Vec<Vec<f64>>,
    /// `bands[p][m]`: the `m`-th smallest eigenvalue at grid point `p`.
    bands: Vec<Vec<f64>>,
    band_intervals: Vec<Interval>,
    gap_tolerance: f64,
}

impl BandStructure {
    pub fn cfg(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn grid(&self) -> &[Vec<f64>] {
        &self.grid
    }

    pub fn bands(&self) -> &[Vec<f64>] {
        &self.bands
    }

    /// `[a_m, b_m]` for each band, with extrema refined by a local
    /// quadratic fit.
    pub fn band_intervals(&self) -> &[Interval] {
        &self.band_intervals
    }

    pub fn gap_tolerance(&self) -> f64 {
        self.gap_tolerance
    }

    pub fn with_gap_tolerance(mut self, tol: f64) -> Self {
        self.gap_tolerance = tol;
        self
    }

    /// Writes `k_1,…,k_d,λ_1,…,λ_Q` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let ks = (1..=self.cfg.dim()).map(|j| format!("k{j}"));
        let ls = (1..=self.cfg.cell_size()).map(|m| format!("lambda{m}"));
        writeln!(out, "{}", ks.chain(ls).collect::<Vec<_>>().join(","))?;
        for (k, row) in self.grid.iter().zip(&self.bands) {
            let cells: Vec<String> = k.iter().chain(row).map(|x| format!("{x}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Samples the band functions on a uniform grid `k_j = i / res_j`.
pub fn compute_bands(v: &Potential, resolution: &[usize]) -> Result<BandStructure> {
    let cfg = v.cfg();
    if !v.is_real() {
        return Err(Error::NonReal {
            max_imag: v.max_imag(),
        });
    }
    if resolution.len() != cfg.dim() || resolution.contains(&0) {
        return Err(Error::InvalidResolution(resolution.to_vec()));
    }
    let real = Potential::new(
        cfg.clone(),
        v.values()
            .iter()
            .map(|x| Complex64::new(x.re, 0.0))
            .collect(),
    )?;
    let grid_cfg = LatticeConfig::new(resolution.to_vec())?;
    let grid: Vec<Vec<f64>> = grid_cfg
        .cells()
        .iter()
        .map(|c| {
            c.coords()
                .iter()
                .zip(resolution)
                .map(|(&i, &r)| i as f64 / r as f64)
                .collect()
        })
        .collect();
    let bands = grid
        .iter()
        .map(|k| {
            let k: Vec<Complex64> = k.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let mut row = eigenvalues(&assemble_direct(&real, &k))?.real_parts();
            row.sort_by(f64::total_cmp);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let band_intervals = (0..cfg.cell_size())
        .map(|m| band_interval(&grid_cfg, &bands, m))
        .collect();
    Ok(BandStructure {
        cfg: cfg.clone(),
        resolution: resolution.to_vec(),
        grid,
        bands,
        band_intervals,
        gap_tolerance: DEFAULT_GAP_TOLERANCE,
    })
}

fn band_interval(grid: &LatticeConfig, bands: &[Vec<f64>], m: usize) -> Interval {
    let values: Vec<f64> = bands.iter().map(|row| row[m]).collect();
    let (imin, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let (imax, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    Interval {
        lower: values[imin] - refinement(grid, &values, imin, -1.0),
        upper: values[imax] + refinement(grid, &values, imax, 1.0),
    }
}

/// Outward correction of a grid extremum from a three-point parabola along
/// each axis; `sign` is `+1` at a maximum, `-1` at a minimum. Never moves the
/// extremum inward, and is capped by the neighbour differences.
fn refinement(grid: &LatticeConfig, values: &[f64], at: usize, sign: f64) -> f64 {
    let centre = grid.cell_at(at).as_signed();
    let f0 = values[at];
    let mut total = 0.0;
    for (j, &res) in grid.periods().iter().enumerate() {
        if res < 3 {
            continue;
        }
        let mut p = centre.clone();
        p[j] += 1;
        let fp = values[grid.reduced_index(&p)];
        p[j] -= 2;
        let fm = values[grid.reduced_index(&p)];
        let curvature = fp - 2.0 * f0 + fm;
        if sign * curvature >= 0.0 {
            continue;
        }
        let lift = -(fp - fm).powi(2) / (8.0 * curvature) * sign;
        let cap = (f0 - fp).abs().max((f0 - fm).abs());
        total += lift.clamp(0.0, cap);
    }
    total
}

/// Union of closed band intervals, sorted and merged; intervals separated by
/// at most the gap tolerance are joined.
pub fn spectrum_union(bs: &BandStructure) -> Vec<Interval> {
    merge(&bs.band_intervals, bs.gap_tolerance)
}

fn merge(intervals: &[Interval], tol: f64) -> Vec<Interval> {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let mut out: Vec<Interval> = Vec::new();
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lower <= last.upper + tol => last.upper = last.upper.max(iv.upper),
            _ => out.push(iv),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    /// Open gaps wider than the tolerance.
    pub gaps: Vec<Interval>,
    /// Separations in `(0, tolerance]`: possibly a gap, below grid certainty.
    pub unresolved: Vec<Interval>,
}

impl GapReport {
    pub fn is_gapless(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn widest(&self) -> Option<Interval> {
        self.gaps
            .iter()
            .copied()
            .max_by(|a, b| a.width().total_cmp(&b.width()))
    }
}

pub fn find_gaps(bs: &BandStructure) -> GapReport {
    let exact = merge(&bs.band_intervals, 0.0);
    let mut report = GapReport {
        gaps: vec![],
        unresolved: vec![],
    };
    for pair in exact.windows(2) {
        let gap = Interval {
            lower: pair[0].upper,
            upper: pair[1].lower,
        };
        if gap.width() > bs.gap_tolerance {
            report.gaps.push(gap);
        } else {
            report.unresolved.push(gap);
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BorgVerdict {
    ConstantLike,
    Gapped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorgReport {
    pub verdict: BorgVerdict,
    pub potential_is_constant: bool,
    pub agrees: bool,
    pub resolution: usize,
    pub widest_gap: Option<Interval>,
}

/// Largest grid tried when a nonconstant potential looks gapless.
pub const BORG_RESOLUTION_CAP: usize = 1 << 14;

/// Gap test for a real one-dimensional potential, cross-checked against
/// direct constancy. A nonconstant potential that looks gapless is retried on
/// finer grids up to [`BORG_RESOLUTION_CAP`].
pub fn borg_check_1d(v: &Potential, resolution: usize) -> Result<BorgReport> {
    if v.cfg().dim() != 1 {
        return Err(Error::InvalidResolution(vec![resolution]));
    }
    let constant = v.is_constant(1e-12);
    let mut res = resolution.max(1);
    loop {
        let gaps = find_gaps(&compute_bands(v, &[res])?);
        let verdict = if gaps.is_gapless() {
            BorgVerdict::ConstantLike
        } else {
            BorgVerdict::Gapped
        };
        let agrees = constant == (verdict == BorgVerdict::ConstantLike);
        if agrees || constant || res >= BORG_RESOLUTION_CAP {
            return Ok(BorgReport {
                verdict,
                potential_is_constant: constant,
                agrees,
                resolution: res,
                widest_gap: gaps.widest(),
            });
        }
        res = (res * 2).min(BORG_RESOLUTION_CAP);
    }
}

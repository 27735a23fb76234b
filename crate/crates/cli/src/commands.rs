use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bloch_core::inverse::construct_exotic;
use bloch_core::spectrum::{
    compute_bands, default_resolution, find_gaps, spectrum_union, Interval,
};
use bloch_core::variety::{entire_graph_test, floquet_isospectral, IdentityOptions};
use bloch_core::{LatticeConfig, Potential};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult, EXIT_NEGATIVE, EXIT_OK};
use crate::file::{parse_potential, read_potential, render_potential};
use crate::report::{InputDigest, RunReport};
use crate::suites::{run_suite, Suite};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlobalOptions {
    pub seed: u64,
    /// Overrides the identity-test tolerance.
    pub tolerance: Option<f64>,
}

impl GlobalOptions {
    pub fn identity(&self) -> CliResult<IdentityOptions> {
        let mut opts = IdentityOptions {
            seed: self.seed,
            ..IdentityOptions::default()
        };
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!(
                    "--tolerance must be positive, got {t}"
                )));
            }
            opts.tolerance = t;
        }
        Ok(opts)
    }

    fn digest_into(&self, d: &mut InputDigest) {
        d.add(&self.seed.to_le_bytes());
        match self.tolerance {
            Some(t) => d.add(&t.to_le_bytes()),
            None => d.add(b"default"),
        };
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
    /// Data that replaces the JSON report on stdout (CSV without `--out`).
    pub stdout_data: Option<String>,
}

struct Run {
    command: &'static str,
    digest: InputDigest,
    seed: u64,
    start: Instant,
}

impl Run {
    fn new(command: &'static str, opts: &GlobalOptions) -> Self {
        let mut digest = InputDigest::new(command);
        opts.digest_into(&mut digest);
        Self {
            command,
            digest,
            seed: opts.seed,
            start: Instant::now(),
        }
    }

    fn finish(self, payload: Value, exit_code: i32, summary: Vec<String>) -> Outcome {
        Outcome {
            report: RunReport {
                command: self.command.to_string(),
                inputs_digest: self.digest.finish(),
                seed: self.seed,
                payload,
                wall_time_s: self.start.elapsed().as_secs_f64(),
            },
            exit_code,
            summary,
            stdout_data: None,
        }
    }
}

fn usize_list(xs: &[usize]) -> Vec<u8> {
    xs.iter().flat_map(|x| (*x as u64).to_le_bytes()).collect()
}

fn fmt_interval(iv: &Interval) -> String {
    format!("[{:.3}, {:.3}]", iv.lower, iv.upper)
}

fn fmt_gap(iv: &Interval) -> String {
    format!(
        "({:.3}, {:.3}), width {:.3}",
        iv.lower,
        iv.upper,
        iv.width()
    )
}

/// One value per axis, a single value broadcast to every axis, or the
/// dimension default when empty.
pub fn resolve_resolution(cfg: &LatticeConfig, requested: &[usize]) -> CliResult<Vec<usize>> {
    let d = cfg.dim();
    let res = match requested.len() {
        0 => vec![default_resolution(d); d],
        1 => vec![requested[0]; d],
        n if n == d => requested.to_vec(),
        n => {
            return Err(CliError::Usage(format!(
                "--resolution takes 1 or {d} values, got {n}"
            )))
        }
    };
    if res.contains(&0) {
        return Err(CliError::Usage("--resolution values must be >= 1".into()));
    }
    Ok(res)
}

pub fn cmd_bands(
    file: &Path,
    resolution: &[usize],
    out: Option<&Path>,
    opts: &GlobalOptions,
) -> CliResult<Outcome> {
    let mut run = Run::new("bands", opts);
    let (v, bytes) = read_potential(file)?;
    let res = resolve_resolution(v.cfg(), resolution)?;
    run.digest.add(&bytes).add(&usize_list(&res));
    let bs = compute_bands(&v, &res)?;
    let union = spectrum_union(&bs);
    let gaps = find_gaps(&bs);
    let mut csv = Vec::new();
    bs.write_csv(&mut csv).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("CSV is ASCII");

    let mut summary = vec![format!(
        "spectrum: {}",
        union
            .iter()
            .map(fmt_interval)
            .collect::<Vec<_>>()
            .join(" ∪ ")
    )];
    if gaps.is_gapless() {
        summary.push("gaps: no gaps".into());
    } else {
        summary.extend(gaps.gaps.iter().map(|g| format!("gap: {}", fmt_gap(g))));
    }
    let payload = json!({
        "periods": v.cfg().periods(),
        "resolution": res,
        "rows": bs.grid().len(),
        "band_intervals": bs.band_intervals(),
        "spectrum": union,
        "gaps": gaps.gaps,
        "unresolved": gaps.unresolved,
        "gap_tolerance": bs.gap_tolerance(),
        "out": out.map(|p| p.display().to_string()),
    });
    let mut outcome = run.finish(payload, EXIT_OK, summary);
    match out {
        Some(path) => fs::write(path, &csv).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })?,
        None => outcome.stdout_data = Some(csv),
    }
    Ok(outcome)
}

pub fn cmd_entire_graph(file: &Path, opts: &GlobalOptions) -> CliResult<Outcome> {
    let mut run = Run::new("entire-graph", opts);
    let (v, bytes) = read_potential(file)?;
    run.digest.add(&bytes);
    let cert = entire_graph_test(&v, &opts.identity()?);
    let summary = vec![format!(
        "holds={} l={:?} K={} residual={:.3e}",
        cert.holds,
        cert.l.coords(),
        cert.k_const,
        cert.residual
    )];
    let exit = if cert.holds { EXIT_OK } else { EXIT_NEGATIVE };
    let payload = serde_json::to_value(&cert).expect("certificate serializes");
    Ok(run.finish(payload, exit, summary))
}

pub fn cmd_isospectral(a: &Path, b: &Path, opts: &GlobalOptions) -> CliResult<Outcome> {
    let mut run = Run::new("isospectral", opts);
    let (v, va) = read_potential(a)?;
    let (y, vb) = read_potential(b)?;
    run.digest.add(&va).add(&vb);
    let verdict = floquet_isospectral(&v, &y, &opts.identity()?)?;
    let summary = vec![format!(
        "isospectral={} residual={:.3e}",
        verdict.isospectral, verdict.residual
    )];
    let exit = if verdict.isospectral {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let payload = serde_json::to_value(&verdict).expect("verdict serializes");
    Ok(run.finish(payload, exit, summary))
}

fn exotic_file_name(cfg: &LatticeConfig, l: &[usize], index: usize) -> String {
    let join = |xs: &[usize]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("x")
    };
    format!("exotic_q{}_l{}_{index}.json", join(cfg.periods()), join(l))
}

/// Builds every separable exotic potential for `l`, re-runs the entire-graph
/// test and a file round trip on each, and writes those that pass.
pub fn cmd_construct_exotic(
    periods: &[usize],
    l: &[usize],
    out: &Path,
    opts: &GlobalOptions,
) -> CliResult<Outcome> {
    let mut run = Run::new("construct-exotic", opts);
    run.digest.add(&usize_list(periods)).add(&usize_list(l));
    if periods.is_empty() {
        return Err(CliError::Usage("--periods is required".into()));
    }
    let cfg = LatticeConfig::new(periods.to_vec())?;
    if l.len() != cfg.dim() {
        return Err(CliError::Usage(format!(
            "--l needs {} values for periods {:?}, got {}",
            cfg.dim(),
            periods,
            l.len()
        )));
    }
    let shift = cfg.cell(l.to_vec())?;
    let identity = opts.identity()?;
    let candidates = construct_exotic(&cfg, &shift, opts.seed)?;

    let mut accepted: Vec<(Potential, String, Value)> = Vec::new();
    let mut rejected = Vec::new();
    for (i, e) in candidates.iter().enumerate() {
        let cert = entire_graph_test(&e.potential, &identity);
        let text = render_potential(&e.potential);
        let reread = parse_potential(&text, Path::new("<memory>"))?;
        let round_trip = reread.values() == e.potential.values();
        if cert.holds && round_trip {
            let name = exotic_file_name(&cfg, l, accepted.len());
            let cert = serde_json::to_value(&cert).expect("certificate serializes");
            accepted.push((e.potential.clone(), name, cert));
        } else {
            rejected.push(json!({
                "candidate": i,
                "holds": cert.holds,
                "residual": cert.residual,
                "round_trip": round_trip,
            }));
        }
    }
    if accepted.is_empty() {
        return Err(CliError::Core(bloch_core::Error::VerificationFailed(
            format!(
                "none of {} candidates passed re-verification",
                candidates.len()
            ),
        )));
    }

    fs::create_dir_all(out).map_err(|source| CliError::Write {
        path: out.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for (v, name, cert) in &accepted {
        let path: PathBuf = out.join(name);
        fs::write(&path, render_potential(v)).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        summary.push(format!("wrote {}", path.display()));
        files.push(json!({
            "file": name,
            "values": v.values(),
            "certificate": cert,
        }));
    }
    let payload = json!({
        "periods": periods,
        "l": l,
        "files": files,
        "rejected": rejected,
    });
    Ok(run.finish(payload, EXIT_OK, summary))
}

pub fn cmd_verify(suite: Suite, periods: &[usize], opts: &GlobalOptions) -> CliResult<Outcome> {
    let mut run = Run::new("verify", opts);
    run.digest
        .add(suite.name().as_bytes())
        .add(&usize_list(periods));
    let checks = run_suite(suite, periods, opts)?;
    let all_pass = checks.iter().all(|c| c.passed);
    let summary = checks.iter().map(|c| c.line()).collect();
    let payload = json!({
        "suite": suite.name(),
        "passed": all_pass,
        "checks": checks,
    });
    Ok(run.finish(
        payload,
        if all_pass { EXIT_OK } else { EXIT_NEGATIVE },
        summary,
    ))
}

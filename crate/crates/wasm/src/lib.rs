//! WebAssembly bindings for the browser demo. Each exported function takes
//! plain arrays and returns a JSON string; the `*_json` functions hold the
//! logic and run natively as well.

use bloch_core::inverse::construct_exotic_1d;
use bloch_core::spectrum::{compute_bands, find_gaps, spectrum_union, Interval};
use bloch_core::variety::{entire_graph_test, IdentityOptions};
use bloch_core::{Complex64, LatticeConfig, Potential};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest number of grid points the demo will evaluate.
pub const MAX_GRID_POINTS: usize = 1 << 16;
/// Largest period accepted by the exotic construction (`q!` Newton classes).
pub const MAX_EXOTIC_PERIOD: usize = 5;

fn potential(periods: &[u32], re: &[f64], im: &[f64]) -> Result<Potential, String> {
    let cfg = LatticeConfig::new(periods.iter().map(|&q| q as usize).collect::<Vec<_>>())
        .map_err(|e| e.to_string())?;
    if re.len() != cfg.cell_size() || !(im.is_empty() || im.len() == re.len()) {
        return Err(format!(
            "expected {} values for periods {:?}, got {} real and {} imaginary parts",
            cfg.cell_size(),
            periods,
            re.len(),
            im.len()
        ));
    }
    let values = re
        .iter()
        .enumerate()
        .map(|(i, &x)| Complex64::new(x, im.get(i).copied().unwrap_or(0.0)))
        .collect::<Vec<_>>();
    if values
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err("values must be finite".into());
    }
    Potential::new(cfg, values).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BandsView {
    grid: Vec<Vec<f64>>,
    bands: Vec<Vec<f64>>,
    spectrum: Vec<Interval>,
    gaps: Vec<Interval>,
}

pub fn bands_json(periods: &[u32], values: &[f64], resolution: u32) -> Result<String, String> {
    let v = potential(periods, values, &[])?;
    let d = v.cfg().dim();
    let res = (resolution as usize).max(1);
    if res
        .checked_pow(d as u32)
        .is_none_or(|n| n > MAX_GRID_POINTS)
    {
        return Err(format!(
            "resolution {res}^{d} exceeds {MAX_GRID_POINTS} grid points"
        ));
    }
    let bs = compute_bands(&v, &vec![res; d]).map_err(|e| e.to_string())?;
    let view = BandsView {
        grid: bs.grid().to_vec(),
        bands: bs.bands().to_vec(),
        spectrum: spectrum_union(&bs),
        gaps: find_gaps(&bs).gaps,
    };
    Ok(serde_json::to_string(&view).expect("finite values serialize"))
}

pub fn entire_graph_json(
    periods: &[u32],
    re: &[f64],
    im: &[f64],
    seed: u64,
) -> Result<String, String> {
    let v = potential(periods, re, im)?;
    let opts = IdentityOptions {
        seed,
        ..IdentityOptions::default()
    };
    Ok(serde_json::to_string(&entire_graph_test(&v, &opts)).expect("certificate serializes"))
}

pub fn exotic_json(q: u32, l: u32, seed: u64) -> Result<String, String> {
    let (q, l) = (q as usize, l as usize);
    if q == 0 || q > MAX_EXOTIC_PERIOD {
        return Err(format!("period must be in 1..={MAX_EXOTIC_PERIOD}"));
    }
    if l >= q {
        return Err(format!("shift must be below the period {q}"));
    }
    let family = construct_exotic_1d(q, l, seed).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&family).expect("family serializes"))
}

/// Band functions of a real potential on a `resolution^d` grid.
#[wasm_bindgen]
pub fn bands(periods: &[u32], values: &[f64], resolution: u32) -> Result<String, JsError> {
    bands_json(periods, values, resolution).map_err(|e| JsError::new(&e))
}

/// Entire-graph certificate for a complex potential given as parts.
#[wasm_bindgen(js_name = entireGraph)]
pub fn entire_graph(periods: &[u32], re: &[f64], im: &[f64], seed: u64) -> Result<String, JsError> {
    entire_graph_json(periods, re, im, seed).map_err(|e| JsError::new(&e))
}

/// Zero-mean one-dimensional potentials with the shift-`l` factorization.
#[wasm_bindgen]
pub fn exotic(q: u32, l: u32, seed: u64) -> Result<String, JsError> {
    exotic_json(q, l, seed).map_err(|e| JsError::new(&e))
}

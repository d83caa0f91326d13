//! Parameter sweeps pairing the chaos degree with the Lyapunov exponent,
//! and bifurcation data. Rows are evaluated in parallel and returned in
//! parameter order, so outputs are deterministic.

use rayon::prelude::*;

use crate::dynamics::builtin_map;
use crate::error::{Error, Result};
use crate::infodyn::{ecd_of_system, ObservationSpec};
use crate::lyapunov::lyapunov;
use crate::dynamics::InitialEnsemble;

/// One grid evaluation. Failures leave NaN values and a warning.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub param: f64,
    pub d: f64,
    pub lambda: f64,
    pub converged: bool,
    pub warning: Option<String>,
}

/// Sweep configuration over one parameter of a built-in map.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub map: String,
    pub base_params: Vec<f64>,
    /// Which entry of the parameter vector the grid replaces.
    pub param_index: usize,
    pub start: f64,
    pub end: f64,
    pub step: f64,
    pub cells: Vec<usize>,
    pub skip: usize,
    pub length: usize,
    /// Initial point (the map's documented default when absent).
    pub x0: Option<Vec<f64>>,
}

/// The inclusive parameter grid `start, start+step, ..., end`.
pub fn param_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::EmptyGrid);
    }
    let count = ((end - start) / step).round() as i64;
    let mut grid = Vec::with_capacity(count.max(0) as usize + 1);
    let mut k = 0i64;
    loop {
        let value = start + k as f64 * step;
        if value > end + step * 1e-9 {
            break;
        }
        grid.push(value);
        k += 1;
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid)
}

fn evaluate_point(config: &SweepConfig, param: f64) -> SweepPoint {
    let run = || -> Result<(f64, f64, bool)> {
        let mut params = config.base_params.clone();
        if config.param_index >= params.len() {
            return Err(Error::InvalidArgument(format!(
                "param index {} out of range",
                config.param_index
            )));
        }
        params[config.param_index] = param;
        let system = builtin_map(&config.map, &params)?;
        let x0 = config
            .x0
            .clone()
            .unwrap_or_else(|| system.default_x0().to_vec());
        let ecd = ecd_of_system(
            &system,
            &InitialEnsemble::point(&x0),
            &ObservationSpec::partition(config.cells.clone()),
            config.skip,
            config.length,
        )?;
        let lyap = lyapunov(&system, &x0, config.skip, config.length)?;
        Ok((ecd.value, lyap.top_exponent, lyap.converged))
    };
    match run() {
        Ok((d, lambda, converged)) => SweepPoint {
            param,
            d,
            lambda,
            converged,
            warning: None,
        },
        Err(e) => SweepPoint {
            param,
            d: f64::NAN,
            lambda: f64::NAN,
            converged: false,
            warning: Some(e.to_string()),
        },
    }
}

/// Evaluate the grid (in parallel) and return rows in parameter order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let grid = param_grid(config.start, config.end, config.step)?;
    // map catalog errors should fail the whole run, not NaN every row
    builtin_map(&config.map, &config.base_params)?;
    Ok(grid
        .par_iter()
        .map(|&param| evaluate_point(config, param))
        .collect())
}

/// Bifurcation data: for each grid parameter, the last `keep` post-transient
/// points of the first coordinate.
#[allow(clippy::too_many_arguments)]
pub fn bifurcation_data(
    map: &str,
    base_params: &[f64],
    param_index: usize,
    start: f64,
    end: f64,
    step: f64,
    x0: Option<&[f64]>,
    skip: usize,
    keep: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let grid = param_grid(start, end, step)?;
    if keep < 2 {
        return Err(Error::InvalidArgument("need keep >= 2".into()));
    }
    builtin_map(map, base_params)?;
    grid.par_iter()
        .map(|&param| {
            let mut params = base_params.to_vec();
            if param_index >= params.len() {
                return Err(Error::InvalidArgument(format!(
                    "param index {param_index} out of range"
                )));
            }
            params[param_index] = param;
            let system = builtin_map(map, &params)?;
            let x0 = x0
                .map(|x| x.to_vec())
                .unwrap_or_else(|| system.default_x0().to_vec());
            let orbit = crate::dynamics::iterate_map(&system, &x0, skip, keep)?;
            Ok((param, orbit.points().map(|p| p[0]).collect()))
        })
        .collect()
}

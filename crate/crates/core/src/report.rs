//! CSV and JSON emission with fixed column orders. Floats are written in
//! Rust's shortest round-trip form, so identical runs give identical bytes.

use serde_json::{json, Value};

use crate::infodyn::{classify, EcdResult};
use crate::lyapunov::LyapunovResult;
use crate::sweep::SweepPoint;

/// Report unit for entropic quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    E,
    Two,
}

impl LogBase {
    /// Conversion factor from nats.
    pub fn factor(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => 1.0 / std::f64::consts::LN_2,
        }
    }

    pub fn column_suffix(self) -> &'static str {
        match self {
            LogBase::E => "nats",
            LogBase::Two => "bits",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(format!("log base must be `e` or `2`, got `{other}`")),
        }
    }
}

/// JSON value for a float; non-finite values become strings
/// (`"inf"`, `"-inf"`, `"nan"`) since JSON has no encoding for them.
pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn fmt_params(params: &[f64]) -> String {
    params
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Header of the single-evaluation CSV. The chaos-degree column carries the
/// unit: `D_nats` or `D_bits`.
pub fn ecd_csv_header(base: LogBase) -> String {
    format!(
        "map,params,L,skip,n,D_{u},S_out,I,classification",
        u = base.column_suffix()
    )
}

/// One CSV row for an evaluation (`L` is the partition spec, e.g. `32x32`).
#[allow(clippy::too_many_arguments)]
pub fn ecd_csv_row(
    map: &str,
    params: &[f64],
    partition_spec: &str,
    skip: usize,
    length: usize,
    result: &EcdResult,
    epsilon: f64,
    base: LogBase,
) -> String {
    let f = base.factor();
    format!(
        "{map},{params},{partition_spec},{skip},{length},{d},{s},{i},{class}",
        params = fmt_params(params),
        d = result.value * f,
        s = result.s_out * f,
        i = result.mutual * f,
        class = classify(result.value, epsilon)
    )
}

/// Structured JSON record for one evaluation, embedding enough of the run
/// configuration to reproduce it.
#[allow(clippy::too_many_arguments)]
pub fn ecd_json_record(
    map: &str,
    params: &[f64],
    partition_spec: &str,
    skip: usize,
    length: usize,
    result: &EcdResult,
    epsilon: f64,
    base: LogBase,
    seed: u64,
) -> Value {
    let f = base.factor();
    json!({
        "map": map,
        "params": params,
        "partition": partition_spec,
        "skip": skip,
        "n": length,
        "observation": result.observation,
        "log_base": match base { LogBase::E => "e", LogBase::Two => "2" },
        "d": json_float(result.value * f),
        "s_out": json_float(result.s_out * f),
        "mutual": json_float(result.mutual * f),
        "classification": classify(result.value, epsilon).to_string(),
        "epsilon": epsilon,
        "sample_size": result.sample_size,
        "seed": seed,
    })
}

/// Sweep CSV: header `param,D,lambda,converged,warning`.
pub fn sweep_csv(points: &[SweepPoint], base: LogBase) -> String {
    let f = base.factor();
    let mut out = String::from("param,D,lambda,converged,warning\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.param,
            p.d * f,
            p.lambda,
            p.converged,
            p.warning.as_deref().unwrap_or("")
        ));
    }
    out
}

/// Bifurcation CSV: header `param,x`, one row per retained point.
pub fn bifurcation_csv(rows: &[(f64, Vec<f64>)]) -> String {
    let mut out = String::from("param,x\n");
    for (param, xs) in rows {
        for x in xs {
            out.push_str(&format!("{param},{x}\n"));
        }
    }
    out
}

/// Single Lyapunov run CSV: header
/// `map,params,skip,n,lambda_top,converged[,lambda_1..lambda_m]`.
pub fn lyapunov_csv(
    map: &str,
    params: &[f64],
    skip: usize,
    result: &LyapunovResult,
    with_spectrum: bool,
) -> String {
    let mut header = String::from("map,params,skip,n,lambda_top,converged");
    let mut row = format!(
        "{map},{params},{skip},{n},{top},{conv}",
        params = fmt_params(params),
        n = result.n_used,
        top = result.top_exponent,
        conv = result.converged
    );
    if with_spectrum {
        if let Some(spec) = &result.spectrum {
            for (k, l) in spec.iter().enumerate() {
                header.push_str(&format!(",lambda_{}", k + 1));
                row.push_str(&format!(",{l}"));
            }
        }
    }
    format!("{header}\n{row}\n")
}

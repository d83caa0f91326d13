//! Parameterized discrete-time maps on boxes in R^N, orbit generation with
//! transient skipping, and analytic Jacobians for the built-in maps.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Axis-aligned closed box `[lo_1, hi_1] x ... x [lo_N, hi_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidArgument(
                "box bounds must be nonempty and of equal length".into(),
            ));
        }
        for (d, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidArgument(format!(
                    "box axis {d} needs finite lo < hi, got [{a}, {b}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The unit box `[0,1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Self {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn span(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Smallest box containing all points; degenerate axes are widened so a
    /// partition over the result is always usable.
    pub fn from_points<'a, I>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        let mut any = false;
        for p in points {
            any = true;
            for d in 0..dim {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        if !any {
            return Err(Error::InvalidArgument("no points to bound".into()));
        }
        for d in 0..dim {
            if !(hi[d] - lo[d]).is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coordinates on axis {d}"
                )));
            }
            if hi[d] - lo[d] < 1e-12 * lo[d].abs().max(1.0) {
                lo[d] -= 0.5;
                hi[d] += 0.5;
            }
        }
        Self::new(lo, hi)
    }

    /// Restriction to a subset of axes.
    pub fn project(&self, axes: &[usize]) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("empty axis subset".into()));
        }
        let mut lo = Vec::with_capacity(axes.len());
        let mut hi = Vec::with_capacity(axes.len());
        for &a in axes {
            if a >= self.dim() {
                return Err(Error::InvalidArgument(format!(
                    "axis {a} out of range for dimension {}",
                    self.dim()
                )));
            }
            lo.push(self.lo[a]);
            hi.push(self.hi[a]);
        }
        Self::new(lo, hi)
    }
}

type StepFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A parameterized self-map of a box, with optional analytic Jacobian and
/// optional per-axis modular wrap (for circle-type maps).
#[derive(Clone)]
pub struct MapSystem {
    name: String,
    params: Vec<f64>,
    domain: DomainBox,
    wrap: Vec<Option<f64>>,
    step_fn: StepFn,
    jac_fn: Option<JacFn>,
    default_x0: Vec<f64>,
}

impl std::fmt::Debug for MapSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MapSystem")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .finish()
    }
}

fn wrap_value(v: f64, period: f64) -> f64 {
    let r = v.rem_euclid(period);
    // rem_euclid can round up to the period itself for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

impl MapSystem {
    /// A custom map. `wrap` gives a modular period per axis (None = no wrap).
    pub fn new(
        name: impl Into<String>,
        domain: DomainBox,
        params: Vec<f64>,
        step: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        jacobian: Option<JacFn>,
        wrap: Vec<Option<f64>>,
        default_x0: Vec<f64>,
    ) -> Result<Self> {
        let dim = domain.dim();
        if wrap.len() != dim || default_x0.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: wrap.len().max(default_x0.len()),
            });
        }
        Ok(Self {
            name: name.into(),
            params,
            domain,
            wrap,
            step_fn: Arc::new(step),
            jac_fn: jacobian,
            default_x0,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Documented canonical initial point for this map.
    pub fn default_x0(&self) -> &[f64] {
        &self.default_x0
    }

    pub fn has_jacobian(&self) -> bool {
        self.jac_fn.is_some()
    }

    pub fn wrap(&self) -> &[Option<f64>] {
        &self.wrap
    }

    /// One application of the map, modular wrap included.
    pub fn step(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.step_into(x, &mut out);
        out
    }

    pub fn step_into(&self, x: &[f64], out: &mut [f64]) {
        (self.step_fn)(x, out);
        for (d, w) in self.wrap.iter().enumerate() {
            if let Some(period) = w {
                out[d] = wrap_value(out[d], *period);
            }
        }
    }

    /// Analytic Jacobian at `x`, when the map provides one.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        match &self.jac_fn {
            Some(j) => Ok(j(x)),
            None => Err(Error::NoJacobian(self.name.clone())),
        }
    }
}

fn require_params(map: &str, params: &[f64], defaults: &[f64]) -> Result<Vec<f64>> {
    if params.is_empty() {
        Ok(defaults.to_vec())
    } else if params.len() == defaults.len() {
        Ok(params.to_vec())
    } else {
        Err(Error::InvalidArgument(format!(
            "map `{map}` takes {} parameter(s), got {}",
            defaults.len(),
            params.len()
        )))
    }
}

fn check_range(map: &str, name: &str, value: f64, lo: f64, hi: f64, range: &str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            map: map.into(),
            name: name.into(),
            value,
            range: range.into(),
        })
    }
}

/// Construct one of the built-in maps. Empty `params` selects the documented
/// canonical parameters.
///
/// Catalog (parameter order, canonical values, domain):
/// - `logistic` `[a]`, a=4, on `[0,1]`: `x -> a x (1-x)`
/// - `circle` `[v]`, v=(sqrt(5)-1)/2, on `[0,2pi)` with wrap: `t -> t + 2 pi v (mod 2 pi)`
/// - `tent` `[mu]`, mu=2, on `[0,1]`: `x -> mu min(x, 1-x)`
/// - `henon` `[a,b]`, (1.4,0.3), on `[-1.5,1.5]x[-0.5,0.5]`: `(x,y) -> (1 - a x^2 + y, b x)`
/// - `baker` `[]`, on `[0,1]^2`: `(2x, y/2)` for `x < 1/2`, else `(2x-1, (y+1)/2)`
/// - `tinkerbell` `[a,b,c,d]`, (0.9,-0.6013,2.0,0.5), on `[-2,2]^2`:
///   `(x,y) -> (x^2 - y^2 + a x + b y, 2 x y + c x + d y)`
///
/// Note: maps whose arithmetic is exact in binary (`baker`, `tent` at mu=2)
/// collapse onto fixed points after ~50 iterations in double precision; use
/// nearby parameters or short orbits when studying them numerically.
pub fn builtin_map(name: &str, params: &[f64]) -> Result<MapSystem> {
    match name {
        "logistic" => {
            let p = require_params(name, params, &[4.0])?;
            let a = p[0];
            check_range(name, "a", a, 0.0, 4.0, "[0, 4]")?;
            MapSystem::new(
                "logistic",
                DomainBox::unit(1),
                p,
                move |x, out| out[0] = a * x[0] * (1.0 - x[0]),
                Some(Arc::new(move |x: &[f64]| {
                    DMatrix::from_row_slice(1, 1, &[a * (1.0 - 2.0 * x[0])])
                })),
                vec![None],
                vec![0.3],
            )
        }
        "circle" => {
            let p = require_params(name, params, &[(5f64.sqrt() - 1.0) / 2.0])?;
            let v = p[0];
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::ParamOutOfRange {
                    map: name.into(),
                    name: "v".into(),
                    value: v,
                    range: "(0, 1)".into(),
                });
            }
            let omega = TAU * v;
            MapSystem::new(
                "circle",
                DomainBox::new(vec![0.0], vec![TAU])?,
                p,
                move |x, out| out[0] = x[0] + omega,
                Some(Arc::new(|_: &[f64]| DMatrix::from_row_slice(1, 1, &[1.0]))),
                vec![Some(TAU)],
                vec![0.5],
            )
        }
        "tent" => {
            let p = require_params(name, params, &[2.0])?;
            let mu = p[0];
            check_range(name, "mu", mu, 0.0, 2.0, "[0, 2]")?;
            MapSystem::new(
                "tent",
                DomainBox::unit(1),
                p,
                move |x, out| {
                    out[0] = if x[0] < 0.5 {
                        mu * x[0]
                    } else {
                        mu * (1.0 - x[0])
                    }
                },
                Some(Arc::new(move |x: &[f64]| {
                    let d = if x[0] < 0.5 { mu } else { -mu };
                    DMatrix::from_row_slice(1, 1, &[d])
                })),
                vec![None],
                vec![0.3],
            )
        }
        "henon" => {
            let p = require_params(name, params, &[1.4, 0.3])?;
            let (a, b) = (p[0], p[1]);
            check_range(name, "a", a, -2.0, 2.0, "[-2, 2]")?;
            check_range(name, "b", b, -1.0, 1.0, "[-1, 1]")?;
            MapSystem::new(
                "henon",
                DomainBox::new(vec![-1.5, -0.5], vec![1.5, 0.5])?,
                p,
                move |x, out| {
                    out[0] = 1.0 - a * x[0] * x[0] + x[1];
                    out[1] = b * x[0];
                },
                Some(Arc::new(move |x: &[f64]| {
                    DMatrix::from_row_slice(2, 2, &[-2.0 * a * x[0], 1.0, b, 0.0])
                })),
                vec![None, None],
                vec![0.0, 0.0],
            )
        }
        "baker" => {
            require_params(name, params, &[])?;
            MapSystem::new(
                "baker",
                DomainBox::unit(2),
                vec![],
                |x, out| {
                    if x[0] < 0.5 {
                        out[0] = 2.0 * x[0];
                        out[1] = 0.5 * x[1];
                    } else {
                        out[0] = 2.0 * x[0] - 1.0;
                        out[1] = 0.5 * (x[1] + 1.0);
                    }
                },
                Some(Arc::new(|_: &[f64]| {
                    DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5])
                })),
                vec![None, None],
                vec![0.3, 0.7],
            )
        }
        "tinkerbell" => {
            let p = require_params(name, params, &[0.9, -0.6013, 2.0, 0.5])?;
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            MapSystem::new(
                "tinkerbell",
                DomainBox::new(vec![-2.0, -2.0], vec![2.0, 2.0])?,
                p,
                move |x, out| {
                    out[0] = x[0] * x[0] - x[1] * x[1] + a * x[0] + b * x[1];
                    out[1] = 2.0 * x[0] * x[1] + c * x[0] + d * x[1];
                },
                Some(Arc::new(move |x: &[f64]| {
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[
                            2.0 * x[0] + a,
                            -2.0 * x[1] + b,
                            2.0 * x[1] + c,
                            2.0 * x[0] + d,
                        ],
                    )
                })),
                vec![None, None],
                vec![-0.72, -0.64],
            )
        }
        other => Err(Error::UnknownMap(other.into())),
    }
}

/// Names accepted by [`builtin_map`].
pub const BUILTIN_MAPS: &[&str] = &["logistic", "circle", "tent", "henon", "baker", "tinkerbell"];

/// A stored orbit segment: points `F^skip(x0), ..., F^(skip+len-1)(x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    dim: usize,
    skip: usize,
    data: Vec<f64>,
}

impl Orbit {
    /// Wrap a flat row-major point buffer (`data.len()` divisible by `dim`).
    pub fn from_flat(dim: usize, skip: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(
                "orbit buffer length must be a positive multiple of dim".into(),
            ));
        }
        Ok(Self { dim, skip, data })
    }

    /// A 1-D orbit from a scalar series.
    pub fn from_series(xs: &[f64]) -> Result<Self> {
        Self::from_flat(1, 0, xs.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn skip(&self) -> usize {
        self.skip
    }

    /// Number of stored points.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    /// Stride subsampling (the time-scaling observation): keeps indices
    /// `0, tau, 2 tau, ...`.
    pub fn subsample(&self, tau: usize) -> Result<Orbit> {
        if tau == 0 {
            return Err(Error::InvalidArgument("subsampling stride must be >= 1".into()));
        }
        if tau == 1 {
            return Ok(self.clone());
        }
        let mut data = Vec::with_capacity((self.len() / tau + 1) * self.dim);
        for (i, p) in self.points().enumerate() {
            if i % tau == 0 {
                data.extend_from_slice(p);
            }
        }
        Orbit::from_flat(self.dim, self.skip, data)
    }

    /// Coordinate projection onto an axis subset, in the given order.
    pub fn project(&self, axes: &[usize]) -> Result<Orbit> {
        if axes.is_empty() || axes.iter().any(|&a| a >= self.dim) {
            return Err(Error::InvalidArgument(format!(
                "axis subset {axes:?} invalid for dimension {}",
                self.dim
            )));
        }
        let mut data = Vec::with_capacity(self.len() * axes.len());
        for p in self.points() {
            for &a in axes {
                data.push(p[a]);
            }
        }
        Orbit::from_flat(axes.len(), self.skip, data)
    }

    /// Bounding box of the stored points (the auto-box used when no domain
    /// partition applies).
    pub fn bounding_box(&self) -> Result<DomainBox> {
        DomainBox::from_points(self.dim, self.points())
    }

    /// CSV export: header `step_index,x_1,...,x_N`, one row per step.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        write!(w, "step_index")?;
        for d in 1..=self.dim {
            write!(w, ",x_{d}")?;
        }
        writeln!(w)?;
        for (i, p) in self.points().enumerate() {
            write!(w, "{}", self.skip + i)?;
            for v in p {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parse the CSV format written by [`Orbit::write_csv`]: a header line,
    /// then one point per row with the first column an index. Reported line
    /// numbers are 1-based file lines. The ingested orbit has `skip = 0`.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = match lines.next() {
            Some(h) => h?,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty file (expected a header line)".into(),
                })
            }
        };
        let ncols = header.split(',').count();
        if ncols < 2 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected at least 2 columns, found {ncols}"),
            });
        }
        let dim = ncols - 1;
        let mut data = Vec::new();
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != ncols {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {ncols} fields, found {}", fields.len()),
                });
            }
            for f in &fields[1..] {
                let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("not a number: `{f}`"),
                })?;
                data.push(v);
            }
        }
        if data.is_empty() {
            return Err(Error::Parse {
                line: 2,
                msg: "no data rows".into(),
            });
        }
        Orbit::from_flat(dim, 0, data)
    }
}

/// Generate the orbit segment `(F^skip x0, ..., F^(skip+length-1) x0)`.
///
/// Every iterate is checked against the domain; leaving it is a
/// [`Error::DomainEscape`] (wrapped axes cannot escape).
pub fn iterate_map(system: &MapSystem, x0: &[f64], skip: usize, length: usize) -> Result<Orbit> {
    if length < 2 {
        return Err(Error::InvalidArgument("orbit length must be >= 2".into()));
    }
    if x0.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: x0.len(),
        });
    }
    if !system.domain.contains(x0) {
        return Err(Error::DomainEscape {
            step: 0,
            point: x0.to_vec(),
        });
    }
    let dim = system.dim();
    let mut x = x0.to_vec();
    let mut next = vec![0.0; dim];
    for step in 0..skip {
        system.step_into(&x, &mut next);
        if !system.domain.contains(&next) {
            return Err(Error::DomainEscape {
                step: step + 1,
                point: next,
            });
        }
        std::mem::swap(&mut x, &mut next);
    }
    let mut data = Vec::with_capacity(length * dim);
    data.extend_from_slice(&x);
    for step in 0..length - 1 {
        system.step_into(&x, &mut next);
        if !system.domain.contains(&next) {
            return Err(Error::DomainEscape {
                step: skip + step + 1,
                point: next,
            });
        }
        data.extend_from_slice(&next);
        std::mem::swap(&mut x, &mut next);
    }
    Orbit::from_flat(dim, skip, data)
}

/// Central-difference Jacobian estimate (one-sided at the box boundary).
/// Differences on wrapped axes are reduced to the principal branch so the
/// estimate is meaningful across the wrap seam.
pub fn finite_difference_jacobian(system: &MapSystem, x: &[f64], h: f64) -> DMatrix<f64> {
    let dim = system.dim();
    let mut jac = DMatrix::zeros(dim, dim);
    for d in 0..dim {
        let lo = system.domain.lo()[d];
        let hi = system.domain.hi()[d];
        let up = (x[d] + h).min(hi);
        let dn = (x[d] - h).max(lo);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[d] = up;
        xm[d] = dn;
        let fp = system.step(&xp);
        let fm = system.step(&xm);
        for i in 0..dim {
            let mut delta = fp[i] - fm[i];
            if let Some(period) = system.wrap[i] {
                delta -= period * (delta / period).round();
            }
            jac[(i, d)] = delta / (up - dn);
        }
    }
    jac
}

/// Initial condition for the empirical pipeline: either a single point or a
/// weighted sample standing in for an initial measure.
#[derive(Debug, Clone)]
pub enum InitialEnsemble {
    Point(Vec<f64>),
    Sample {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
}

impl InitialEnsemble {
    pub fn point(x0: &[f64]) -> Self {
        InitialEnsemble::Point(x0.to_vec())
    }

    /// Uniformly weighted sample.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        Ok(InitialEnsemble::Sample { points, weights })
    }

    /// `m` points drawn uniformly from the domain with a seeded generator.
    pub fn sample_domain(domain: &DomainBox, m: usize, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        if m == 0 {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(m);
        for _ in 0..m {
            let p: Vec<f64> = (0..domain.dim())
                .map(|d| rng.random_range(domain.lo()[d]..domain.hi()[d]))
                .collect();
            points.push(p);
        }
        Self::uniform(points)
    }

    /// (point, weight) views in a fixed order.
    pub fn members(&self) -> Vec<(&[f64], f64)> {
        match self {
            InitialEnsemble::Point(p) => vec![(p.as_slice(), 1.0)],
            InitialEnsemble::Sample { points, weights } => points
                .iter()
                .map(|p| p.as_slice())
                .zip(weights.iter().copied())
                .collect(),
        }
    }

    pub fn validate(&self, domain: &DomainBox) -> Result<()> {
        match self {
            InitialEnsemble::Point(p) => {
                if !domain.contains(p) {
                    return Err(Error::DomainEscape {
                        step: 0,
                        point: p.clone(),
                    });
                }
            }
            InitialEnsemble::Sample { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(Error::InvalidArgument(
                        "ensemble points/weights must be nonempty and matched".into(),
                    ));
                }
                for p in points {
                    if !domain.contains(p) {
                        return Err(Error::DomainEscape {
                            step: 0,
                            point: p.clone(),
                        });
                    }
                }
                if weights.iter().any(|w| *w < 0.0) {
                    return Err(Error::InvalidProbability("negative ensemble weight".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidProbability(format!(
                        "ensemble weights sum to {total}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

//! Finite equi-partitions of a box, orbit symbolization, and the empirical
//! marginal / joint / one-step channel extracted from a symbol sequence.

use std::collections::BTreeMap;
use std::io::Write;

use crate::dynamics::{iterate_map, DomainBox, InitialEnsemble, MapSystem, Orbit};
use crate::error::{Error, Result};

/// A cover of a box by congruent half-open cells (the topmost cell on each
/// axis is closed so the cover is exact). Cells are indexed row-major over
/// axes: the first axis varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct EquiPartition {
    domain: DomainBox,
    cells_per_axis: Vec<usize>,
    total: usize,
}

impl EquiPartition {
    pub fn new(domain: DomainBox, cells_per_axis: Vec<usize>) -> Result<Self> {
        if cells_per_axis.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: cells_per_axis.len(),
            });
        }
        for (axis, &l) in cells_per_axis.iter().enumerate() {
            if l == 0 {
                return Err(Error::EmptyAxis(axis));
            }
        }
        let total = cells_per_axis.iter().product();
        Ok(Self {
            domain,
            cells_per_axis,
            total,
        })
    }

    /// Parse a plain-text spec like `"100"` or `"32x32"`.
    pub fn parse_spec(spec: &str) -> Result<Vec<usize>> {
        let cells: Vec<usize> = spec
            .split('x')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad partition spec `{spec}`")))
            })
            .collect::<Result<_>>()?;
        if cells.is_empty() {
            return Err(Error::InvalidArgument("empty partition spec".into()));
        }
        Ok(cells)
    }

    /// The `"L1xL2x..."` form of the axis counts.
    pub fn spec_string(&self) -> String {
        self.cells_per_axis
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells_per_axis
    }

    pub fn total_cells(&self) -> usize {
        self.total
    }

    /// Index of the cell containing `x`. Boundary points belong to the
    /// upper-adjacent cell except at the box maximum.
    pub fn cell_of(&self, x: &[f64]) -> Result<usize> {
        self.cell_of_indexed(x, 0)
    }

    fn cell_of_indexed(&self, x: &[f64], orbit_index: usize) -> Result<usize> {
        if x.len() != self.domain.dim() || !self.domain.contains(x) {
            return Err(Error::OutOfBox {
                point: x.to_vec(),
                index: orbit_index,
            });
        }
        let mut idx = 0usize;
        for (d, (&v, &l)) in x.iter().zip(&self.cells_per_axis).enumerate() {
            let lo = self.domain.lo()[d];
            let hi = self.domain.hi()[d];
            let t = (v - lo) / (hi - lo) * l as f64;
            let cell = (t.floor() as usize).min(l - 1);
            idx = idx * l + cell;
        }
        Ok(idx)
    }

    /// `(lo, hi)` corner of cell `idx`.
    pub fn cell_bounds(&self, idx: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rem = idx;
        let mut per_axis = vec![0usize; self.cells_per_axis.len()];
        for (slot, &l) in per_axis.iter_mut().zip(&self.cells_per_axis).rev() {
            *slot = rem % l;
            rem /= l;
        }
        let mut lo = Vec::with_capacity(per_axis.len());
        let mut hi = Vec::with_capacity(per_axis.len());
        for (d, (&cell, &l)) in per_axis.iter().zip(&self.cells_per_axis).enumerate() {
            let w = self.domain.span(d) / l as f64;
            lo.push(self.domain.lo()[d] + cell as f64 * w);
            hi.push(self.domain.lo()[d] + (cell + 1) as f64 * w);
        }
        (lo, hi)
    }

    /// Symbol sequence of an orbit (cell index per point).
    pub fn symbolize(&self, orbit: &Orbit) -> Result<Vec<u32>> {
        if orbit.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                got: orbit.dim(),
            });
        }
        let mut out = Vec::with_capacity(orbit.len());
        for (i, p) in orbit.points().enumerate() {
            out.push(self.cell_of_indexed(p, i)? as u32);
        }
        Ok(out)
    }
}

/// Empirical one-step statistics of a symbol sequence: the joint mass over
/// consecutive cell pairs, with both marginals derived from it so that
/// row-consistency is exact by construction.
#[derive(Debug, Clone)]
pub struct EmpiricalModel {
    n_cells: usize,
    /// Sorted `(i, j, mass)` with `i` the cell at time n and `j` at time n+1.
    joint: Vec<(u32, u32, f64)>,
    /// Row sums of the joint: the time-n distribution over first pair elements.
    marginal: Vec<f64>,
    /// Column sums of the joint: the time-(n+1) distribution.
    out_marginal: Vec<f64>,
    /// Number of orbit pairs behind the estimate (0 for synthetic models).
    pairs: u64,
}

impl EmpiricalModel {
    /// Build from consecutive pairs of a symbol sequence.
    pub fn from_symbols(symbols: &[u32], n_cells: usize) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::InvalidArgument(
                "need at least 2 symbols (one transition)".into(),
            ));
        }
        let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for w in symbols.windows(2) {
            *counts.entry((w[0], w[1])).or_insert(0) += 1;
        }
        let pairs = (symbols.len() - 1) as u64;
        let nf = pairs as f64;
        let joint: Vec<(u32, u32, f64)> = counts
            .into_iter()
            .map(|((i, j), c)| (i, j, c as f64 / nf))
            .collect();
        Self::from_joint(joint, n_cells, pairs)
    }

    /// Build from explicit joint mass (normalized to sum 1 here).
    pub fn from_joint_mass(joint: Vec<(u32, u32, f64)>, n_cells: usize) -> Result<Self> {
        let total: f64 = joint.iter().map(|(_, _, w)| w).sum();
        if !total.is_finite() || total <= 0.0 || joint.iter().any(|(_, _, w)| *w < 0.0) {
            return Err(Error::InvalidProbability(
                "joint mass must be nonnegative with positive total".into(),
            ));
        }
        let mut merged: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (i, j, w) in joint {
            *merged.entry((i, j)).or_insert(0.0) += w / total;
        }
        let joint = merged
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|((i, j), w)| (i, j, w))
            .collect();
        Self::from_joint(joint, n_cells, 0)
    }

    fn from_joint(joint: Vec<(u32, u32, f64)>, n_cells: usize, pairs: u64) -> Result<Self> {
        let mut marginal = vec![0.0; n_cells];
        let mut out_marginal = vec![0.0; n_cells];
        for &(i, j, w) in &joint {
            if i as usize >= n_cells || j as usize >= n_cells {
                return Err(Error::InvalidArgument(format!(
                    "joint index ({i},{j}) outside {n_cells} cells"
                )));
            }
            marginal[i as usize] += w;
            out_marginal[j as usize] += w;
        }
        Ok(Self {
            n_cells,
            joint,
            marginal,
            out_marginal,
            pairs,
        })
    }

    /// Weighted mixture of models over the same cell set, merged in the given
    /// order (deterministic).
    pub fn merge(parts: &[(f64, EmpiricalModel)]) -> Result<Self> {
        let n_cells = match parts.first() {
            Some((_, m)) => m.n_cells,
            None => return Err(Error::InvalidArgument("nothing to merge".into())),
        };
        if parts.iter().any(|(_, m)| m.n_cells != n_cells) {
            return Err(Error::DimensionMismatch {
                expected: n_cells,
                got: parts.iter().map(|(_, m)| m.n_cells).max().unwrap_or(0),
            });
        }
        let mut acc: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        let mut pairs = 0u64;
        for (w, m) in parts {
            pairs += m.pairs;
            for &(i, j, mass) in &m.joint {
                *acc.entry((i, j)).or_insert(0.0) += w * mass;
            }
        }
        let joint: Vec<(u32, u32, f64)> = acc
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|((i, j), w)| (i, j, w))
            .collect();
        Self::from_joint(joint, n_cells, pairs)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn joint(&self) -> &[(u32, u32, f64)] {
        &self.joint
    }

    /// Time-n marginal `p_i` (row sums of the joint).
    pub fn marginal(&self) -> &[f64] {
        &self.marginal
    }

    /// Time-(n+1) marginal (column sums of the joint).
    pub fn out_marginal(&self) -> &[f64] {
        &self.out_marginal
    }

    pub fn pair_count(&self) -> u64 {
        self.pairs
    }

    /// Cells with positive time-n mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.marginal
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| i)
    }

    /// Largest deviation of any stated consistency sum from the stored
    /// marginals; zero by construction for models built here.
    pub fn row_consistency_deviation(&self) -> f64 {
        let mut rows = vec![0.0; self.n_cells];
        for &(i, _, w) in &self.joint {
            rows[i as usize] += w;
        }
        rows.iter()
            .zip(&self.marginal)
            .map(|(r, m)| (r - m).abs())
            .fold(0.0, f64::max)
    }

    /// CSV export of the sparse joint: header `i,j,p_ij`.
    pub fn write_joint_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "i,j,p_ij")?;
        for &(i, j, mass) in &self.joint {
            writeln!(w, "{i},{j},{mass}")?;
        }
        Ok(())
    }

    /// CSV export of the time-n marginal: header `i,p_i` (support cells only).
    pub fn write_marginal_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "i,p_i")?;
        for (i, p) in self.marginal.iter().enumerate() {
            if *p > 0.0 {
                writeln!(w, "{i},{p}")?;
            }
        }
        Ok(())
    }
}

/// Empirical model of a single orbit under a partition. The marginal counts
/// the first elements of the `len-1` consecutive pairs, which makes the row
/// sums of the joint reproduce it exactly.
pub fn empirical_model(orbit: &Orbit, partition: &EquiPartition) -> Result<EmpiricalModel> {
    let symbols = partition.symbolize(orbit)?;
    EmpiricalModel::from_symbols(&symbols, partition.total_cells())
}

/// Monte Carlo surrogate for an initial measure: the weighted average of the
/// per-initial-point models, merged in ensemble order.
pub fn empirical_model_ensemble(
    system: &MapSystem,
    ensemble: &InitialEnsemble,
    partition: &EquiPartition,
    skip: usize,
    length: usize,
) -> Result<EmpiricalModel> {
    ensemble.validate(system.domain())?;
    let mut parts = Vec::new();
    for (x0, weight) in ensemble.members() {
        let orbit = iterate_map(system, x0, skip, length)?;
        parts.push((weight, empirical_model(&orbit, partition)?));
    }
    EmpiricalModel::merge(&parts)
}

/// The one-step channel `t_ij = p_ij / p_i` on support rows.
#[derive(Debug, Clone)]
pub struct Channel {
    n_cells: usize,
    /// `(row, [(col, t)])` for rows with positive marginal, sorted by row.
    rows: Vec<(u32, Vec<(u32, f64)>)>,
}

impl Channel {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn rows(&self) -> &[(u32, Vec<(u32, f64)>)] {
        &self.rows
    }

    pub fn row(&self, i: u32) -> Option<&[(u32, f64)]> {
        self.rows
            .binary_search_by_key(&i, |(r, _)| *r)
            .ok()
            .map(|k| self.rows[k].1.as_slice())
    }

    /// True when every support row has a single destination cell.
    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(|(_, r)| r.len() == 1)
    }

    /// Push a distribution through the channel: `(p Lambda)_j = sum_i p_i t_ij`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n_cells {
            return Err(Error::DimensionMismatch {
                expected: self.n_cells,
                got: p.len(),
            });
        }
        let mut out = vec![0.0; self.n_cells];
        for (i, row) in &self.rows {
            let pi = p[*i as usize];
            if pi == 0.0 {
                continue;
            }
            for (j, t) in row {
                out[*j as usize] += pi * t;
            }
        }
        Ok(out)
    }
}

/// Extract the transition channel from an empirical model.
pub fn channel_from(model: &EmpiricalModel) -> Result<Channel> {
    let dev = model.row_consistency_deviation();
    if dev > 1e-9 {
        return Err(Error::InconsistentModel(format!(
            "row sums deviate from marginal by {dev:e}"
        )));
    }
    let mut rows: Vec<(u32, Vec<(u32, f64)>)> = Vec::new();
    for &(i, j, w) in model.joint() {
        let pi = model.marginal()[i as usize];
        let t = w / pi;
        match rows.last_mut() {
            Some((r, cols)) if *r == i => cols.push((j, t)),
            _ => rows.push((i, vec![(j, t)])),
        }
    }
    Ok(Channel {
        n_cells: model.n_cells(),
        rows,
    })
}

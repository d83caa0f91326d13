//! Information quantities (Shannon entropy, mutual entropy), the entropic
//! chaos degree in its two equivalent forms, the complexity-axiom property
//! suite, and composable observations with per-observation and infimum
//! chaos degrees.

use serde::Serialize;

use crate::dynamics::{iterate_map, DomainBox, InitialEnsemble, MapSystem, Orbit};
use crate::error::{Error, Result};
use crate::partition::{Channel, EmpiricalModel, EquiPartition};
use crate::quantum::Pvm;

/// Validated probability vector (nonnegative entries summing to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        if entries.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidProbability(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbability(format!(
                "entries sum to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(Self(entries))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with positive mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| i)
    }
}

/// Shannon entropy `-sum p log p` in nats, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    let mut s = 0.0;
    for &pi in p {
        if pi > 0.0 {
            s -= pi * pi.ln();
        }
    }
    s
}

/// Mutual entropy of a sparse joint `(i, j, r_ij)` with `i` the input index
/// and `j` the output index: `sum r_ij log(r_ij / (p_i pbar_j))`.
///
/// The joint's own marginals must match the stated ones within 1e-9.
pub fn mutual_entropy(joint: &[(u32, u32, f64)], p_in: &[f64], p_out: &[f64]) -> Result<f64> {
    let mut row = vec![0.0; p_in.len()];
    let mut col = vec![0.0; p_out.len()];
    for &(i, j, w) in joint {
        if i as usize >= p_in.len() || j as usize >= p_out.len() {
            return Err(Error::DimensionMismatch {
                expected: p_in.len(),
                got: i.max(j) as usize + 1,
            });
        }
        row[i as usize] += w;
        col[j as usize] += w;
    }
    let dev_in = row
        .iter()
        .zip(p_in)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dev_out = col
        .iter()
        .zip(p_out)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dev = dev_in.max(dev_out);
    if dev > 1e-9 {
        return Err(Error::MarginalMismatch(dev));
    }
    let mut total = 0.0;
    for &(i, j, w) in joint {
        if w > 0.0 {
            total += w * (w.ln() - p_in[i as usize].ln() - p_out[j as usize].ln());
        }
    }
    Ok(total)
}

/// Chaotic / stable verdict of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Chaotic,
    Stable,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Chaotic => write!(f, "chaotic"),
            Classification::Stable => write!(f, "stable"),
        }
    }
}

/// `chaotic` iff the chaos degree exceeds the noise floor `epsilon`.
pub fn classify(value: f64, epsilon: f64) -> Classification {
    if value > epsilon {
        Classification::Chaotic
    } else {
        Classification::Stable
    }
}

/// Result of one chaos-degree evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct EcdResult {
    /// The chaos degree in nats (conditional-entropy form).
    pub value: f64,
    /// Output-marginal entropy `S(p_out)`.
    pub s_out: f64,
    /// Mutual entropy between consecutive symbols.
    pub mutual: f64,
    /// Human-readable description of the observation used.
    pub observation: String,
    /// Number of orbit pairs behind the estimate.
    pub sample_size: u64,
}

/// Chaos degree of an empirical one-step model, computed in both equivalent
/// forms and cross-checked:
///
/// `sum_ij p_ij log(p_i / p_ij)`  (conditional entropy of the next symbol)
/// must equal `S(p_out) - I` within 1e-10.
pub fn ecd_from_model(model: &EmpiricalModel) -> Result<EcdResult> {
    let dev = model.row_consistency_deviation();
    if dev > 1e-9 {
        return Err(Error::InconsistentModel(format!(
            "row sums deviate from marginal by {dev:e}"
        )));
    }
    let p_in = model.marginal();
    let p_out = model.out_marginal();
    let mut value = 0.0;
    let mut mutual = 0.0;
    for &(i, j, w) in model.joint() {
        if w > 0.0 {
            let lpi = p_in[i as usize].ln();
            let lw = w.ln();
            value += w * (lpi - lw);
            mutual += w * (lw - lpi - p_out[j as usize].ln());
        }
    }
    let s_out = shannon_entropy(p_out);
    let alt = s_out - mutual;
    if (value - alt).abs() > 1e-10 {
        return Err(Error::InconsistentModel(format!(
            "chaos-degree forms disagree: {value} vs {alt}"
        )));
    }
    Ok(EcdResult {
        value,
        s_out,
        mutual,
        observation: String::new(),
        sample_size: model.pair_count(),
    })
}

/// Where a partition stage takes its box from.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxSource {
    /// The (projected) system domain.
    Domain,
    /// The bounding box of the observed orbit(s).
    Auto,
    /// An explicit box.
    Explicit(DomainBox),
}

/// One stage of an observation pipeline.
#[derive(Debug, Clone)]
pub enum ObsStage {
    /// Stride subsampling of the discrete orbit (time scaling).
    TimeScale(usize),
    /// Restriction to a coordinate subset.
    Project(Vec<usize>),
    /// Finite equi-partition of the (current) state space.
    Partition {
        cells_per_axis: Vec<usize>,
        source: BoxSource,
    },
    /// Projective decoherence of a quantum state (conditional expectation).
    QuantumPvm(Pvm),
    /// Marker: chaos degree evaluated over Schatten decompositions.
    QuantumSchatten,
}

/// An ordered observation pipeline applied to a dynamics before the chaos
/// degree is measured. Stages are applied in list order; a partition stage
/// must be present and last for classical evaluation.
#[derive(Debug, Clone, Default)]
pub struct ObservationSpec {
    stages: Vec<ObsStage>,
}

impl ObservationSpec {
    pub fn new() -> Self {
        Self { stages: Vec::new() }
    }

    /// Partition of the system domain with the given per-axis cell counts.
    pub fn partition(cells_per_axis: Vec<usize>) -> Self {
        Self::new().then_partition(cells_per_axis)
    }

    /// Partition of the observed orbit's bounding box.
    pub fn partition_auto(cells_per_axis: Vec<usize>) -> Self {
        Self::new().then_stage(ObsStage::Partition {
            cells_per_axis,
            source: BoxSource::Auto,
        })
    }

    pub fn then_stage(mut self, stage: ObsStage) -> Self {
        self.stages.push(stage);
        self
    }

    pub fn then_time_scale(self, tau: usize) -> Self {
        self.then_stage(ObsStage::TimeScale(tau))
    }

    pub fn then_project(self, axes: Vec<usize>) -> Self {
        self.then_stage(ObsStage::Project(axes))
    }

    pub fn then_partition(self, cells_per_axis: Vec<usize>) -> Self {
        self.then_stage(ObsStage::Partition {
            cells_per_axis,
            source: BoxSource::Domain,
        })
    }

    pub fn stages(&self) -> &[ObsStage] {
        &self.stages
    }

    /// Compact description, e.g. `tau=2|proj=[0]|P=100(auto)`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .stages
            .iter()
            .map(|s| match s {
                ObsStage::TimeScale(tau) => format!("tau={tau}"),
                ObsStage::Project(axes) => format!("proj={axes:?}"),
                ObsStage::Partition {
                    cells_per_axis,
                    source,
                } => {
                    let spec = cells_per_axis
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join("x");
                    match source {
                        BoxSource::Auto => format!("P={spec}(auto)"),
                        BoxSource::Domain => format!("P={spec}"),
                        BoxSource::Explicit(_) => format!("P={spec}(explicit)"),
                    }
                }
                ObsStage::QuantumPvm(_) => "O_C".into(),
                ObsStage::QuantumSchatten => "O_R".into(),
            })
            .collect();
        parts.join("|")
    }
}

struct ResolvedObservation {
    tau: usize,
    axes: Option<Vec<usize>>,
    cells_per_axis: Vec<usize>,
    source: BoxSource,
}

fn resolve_classical(obs: &ObservationSpec) -> Result<ResolvedObservation> {
    let mut tau = 1usize;
    let mut axes: Option<Vec<usize>> = None;
    let mut partition: Option<(Vec<usize>, BoxSource)> = None;
    for stage in obs.stages() {
        if partition.is_some() {
            return Err(Error::IncompatiblePartition(
                "partition must be the final stage of a classical observation".into(),
            ));
        }
        match stage {
            ObsStage::TimeScale(t) => {
                if *t == 0 {
                    return Err(Error::InvalidArgument("time scale must be >= 1".into()));
                }
                tau = tau.saturating_mul(*t);
            }
            ObsStage::Project(a) => {
                axes = Some(match axes {
                    // composing projections: indices refer to the current axes
                    Some(prev) => a.iter().map(|&i| prev[i]).collect(),
                    None => a.clone(),
                });
            }
            ObsStage::Partition {
                cells_per_axis,
                source,
            } => partition = Some((cells_per_axis.clone(), source.clone())),
            ObsStage::QuantumPvm(_) | ObsStage::QuantumSchatten => {
                return Err(Error::IncompatiblePartition(
                    "quantum observation stage in a classical pipeline".into(),
                ));
            }
        }
    }
    let (cells_per_axis, source) = partition.ok_or_else(|| {
        Error::IncompatiblePartition(
            "a partition stage is required to evaluate a continuous-state orbit".into(),
        )
    })?;
    Ok(ResolvedObservation {
        tau,
        axes,
        cells_per_axis,
        source,
    })
}

fn observed_orbit(orbit: &Orbit, res: &ResolvedObservation) -> Result<Orbit> {
    let mut o = orbit.subsample(res.tau)?;
    if let Some(axes) = &res.axes {
        o = o.project(axes)?;
    }
    Ok(o)
}

/// Chaos degree of a stored orbit under an observation (partition box taken
/// from `domain` unless the observation says otherwise).
pub fn ecd_of_orbit(orbit: &Orbit, domain: &DomainBox, obs: &ObservationSpec) -> Result<EcdResult> {
    let res = resolve_classical(obs)?;
    let observed = observed_orbit(orbit, &res)?;
    let partition = build_partition(&res, domain, std::slice::from_ref(&observed))?;
    let model = crate::partition::empirical_model(&observed, &partition)?;
    let mut out = ecd_from_model(&model)?;
    out.observation = obs.describe();
    Ok(out)
}

fn build_partition(
    res: &ResolvedObservation,
    domain: &DomainBox,
    observed: &[Orbit],
) -> Result<EquiPartition> {
    let boxed = match &res.source {
        BoxSource::Explicit(b) => b.clone(),
        BoxSource::Domain => match &res.axes {
            Some(axes) => domain.project(axes)?,
            None => domain.clone(),
        },
        BoxSource::Auto => {
            let dim = observed[0].dim();
            DomainBox::from_points(dim, observed.iter().flat_map(|o| o.points()))?
        }
    };
    if boxed.dim() != res.cells_per_axis.len() {
        return Err(Error::IncompatiblePartition(format!(
            "partition wants {} axes but the observed state has {}",
            res.cells_per_axis.len(),
            boxed.dim()
        )));
    }
    EquiPartition::new(boxed, res.cells_per_axis.clone())
}

/// The per-observation chaos degree `D^O` of a map with an initial state:
/// generate orbits, apply the observation, symbolize, and evaluate.
pub fn ecd_of_system(
    system: &MapSystem,
    ensemble: &InitialEnsemble,
    obs: &ObservationSpec,
    skip: usize,
    length: usize,
) -> Result<EcdResult> {
    ensemble.validate(system.domain())?;
    let res = resolve_classical(obs)?;
    let members = ensemble.members();
    let mut observed = Vec::with_capacity(members.len());
    for (x0, _) in &members {
        let orbit = iterate_map(system, x0, skip, length)?;
        observed.push(observed_orbit(&orbit, &res)?);
    }
    let partition = build_partition(&res, system.domain(), &observed)?;
    let mut parts = Vec::with_capacity(members.len());
    for (o, (_, w)) in observed.iter().zip(&members) {
        parts.push((*w, crate::partition::empirical_model(o, &partition)?));
    }
    let model = EmpiricalModel::merge(&parts)?;
    let mut out = ecd_from_model(&model)?;
    out.observation = obs.describe();
    Ok(out)
}

/// Infimum of `D^O` over a finite observation family. Returns the index of
/// the minimizing observation (first occurrence wins ties) and its result.
pub fn total_ecd(
    system: &MapSystem,
    ensemble: &InitialEnsemble,
    family: &[ObservationSpec],
    skip: usize,
    length: usize,
) -> Result<(usize, EcdResult)> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty observation family".into()));
    }
    let mut best: Option<(usize, EcdResult)> = None;
    for (idx, obs) in family.iter().enumerate() {
        let r = ecd_of_system(system, ensemble, obs, skip, length)?;
        let better = match &best {
            Some((_, b)) => r.value < b.value,
            None => true,
        };
        if better {
            best = Some((idx, r));
        }
    }
    Ok(best.expect("nonempty family"))
}

/// One checked complexity axiom.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Observed deviation (0 = exact).
    pub slack: f64,
}

/// Pass/fail report for the complexity axioms instantiated by Shannon
/// entropy and mutual entropy.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn joint_of(p: &[f64], channel: &Channel) -> Vec<(u32, u32, f64)> {
    let mut joint = Vec::new();
    for (i, row) in channel.rows() {
        let pi = p[*i as usize];
        if pi == 0.0 {
            continue;
        }
        for (j, t) in row {
            joint.push((*i, *j, pi * t));
        }
    }
    joint
}

/// Check the complexity axioms on a concrete (distribution, channel) pair:
///
/// (i) nonnegativity of both quantities, (ii) invariance under a relabeling
/// of outcomes, (iii) additivity on product states, (iv) the mutual entropy
/// is bounded by both marginal entropies, (v) the identity channel transmits
/// the full entropy.
pub fn axiom_suite(p: &ProbVector, channel: &Channel, seed: u64) -> Result<AxiomReport> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    if p.len() != channel.n_cells() {
        return Err(Error::DimensionMismatch {
            expected: channel.n_cells(),
            got: p.len(),
        });
    }
    let p_in = p.as_slice();
    let p_out = channel.apply(p_in)?;
    let joint = joint_of(p_in, channel);
    let s_in = shannon_entropy(p_in);
    let s_out = shannon_entropy(&p_out);
    let mutual = mutual_entropy(&joint, p_in, &p_out)?;
    let mut checks = Vec::new();

    // (i) nonnegativity
    let neg = (-s_in).max(-mutual).max(0.0);
    checks.push(AxiomCheck {
        name: "nonnegativity",
        pass: s_in >= 0.0 && mutual >= -1e-12,
        slack: neg,
    });

    // (ii) invariance under a random relabeling of outcome indices
    let n = p.len();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let mut p_perm = vec![0.0; n];
    for (i, &pi) in p_in.iter().enumerate() {
        p_perm[perm[i] as usize] = pi;
    }
    let joint_perm: Vec<(u32, u32, f64)> = joint
        .iter()
        .map(|&(i, j, w)| (perm[i as usize], perm[j as usize], w))
        .collect();
    let mut out_perm = vec![0.0; n];
    for &(_, j, w) in &joint_perm {
        out_perm[j as usize] += w;
    }
    let s_perm = shannon_entropy(&p_perm);
    let i_perm = mutual_entropy(&joint_perm, &p_perm, &out_perm)?;
    let d = s_out - mutual;
    let d_perm = shannon_entropy(&out_perm) - i_perm;
    let slack_ii = (s_perm - s_in)
        .abs()
        .max((i_perm - mutual).abs())
        .max((d_perm - d).abs());
    checks.push(AxiomCheck {
        name: "relabeling invariance",
        pass: slack_ii <= 1e-12,
        slack: slack_ii,
    });

    // (iii) additivity on a product distribution
    let q = {
        let m = 3.max(n.min(5));
        let raw: Vec<f64> = (1..=m).map(|k| k as f64).collect();
        let tot: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / tot).collect::<Vec<f64>>()
    };
    let mut prod = Vec::with_capacity(n * q.len());
    for &a in p_in {
        for &b in &q {
            prod.push(a * b);
        }
    }
    let slack_iii = (shannon_entropy(&prod) - (s_in + shannon_entropy(&q))).abs();
    checks.push(AxiomCheck {
        name: "additivity",
        pass: slack_iii <= 1e-10,
        slack: slack_iii,
    });

    // (iv) 0 <= I <= min(S_in, S_out)
    let upper = s_in.min(s_out);
    let slack_iv = (mutual - upper).max(-mutual).max(0.0);
    checks.push(AxiomCheck {
        name: "mutual bounded by entropy",
        pass: mutual >= -1e-12 && mutual <= upper + 1e-10,
        slack: slack_iv,
    });

    // (v) identity channel transmits everything
    let ident_joint: Vec<(u32, u32, f64)> = p
        .support()
        .map(|i| (i as u32, i as u32, p_in[i]))
        .collect();
    let i_ident = mutual_entropy(&ident_joint, p_in, p_in)?;
    let slack_v = (i_ident - s_in).abs();
    checks.push(AxiomCheck {
        name: "identity transmits entropy",
        pass: slack_v <= 1e-10,
        slack: slack_v,
    });

    Ok(AxiomReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::builtin_map;
    use crate::partition::EmpiricalModel;

    #[test]
    fn entropy_basics() {
        assert!((shannon_entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0]), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn mutual_entropy_product_is_zero() {
        let p = [0.3, 0.7];
        let q = [0.4, 0.6];
        let mut joint = Vec::new();
        for i in 0..2u32 {
            for j in 0..2u32 {
                joint.push((i, j, p[i as usize] * q[j as usize]));
            }
        }
        let i = mutual_entropy(&joint, &p, &q).unwrap();
        assert!(i.abs() < 1e-14);
    }

    #[test]
    fn mutual_entropy_identity_is_entropy() {
        let p = [0.2, 0.3, 0.5];
        let joint: Vec<(u32, u32, f64)> =
            p.iter().enumerate().map(|(i, &w)| (i as u32, i as u32, w)).collect();
        let i = mutual_entropy(&joint, &p, &p).unwrap();
        assert!((i - shannon_entropy(&p)).abs() < 1e-14);
    }

    #[test]
    fn mutual_entropy_circle_two_entry_rows() {
        // L cells, uniform marginal, each row splitting (1-s, s): the direct
        // summation oracle gives S(p_out) - h(s); at s = 1/2 that is
        // S(p_out) - log 2
        let l = 10u32;
        let s = 0.5;
        let u = 1.0 / l as f64;
        let mut joint = Vec::new();
        for i in 0..l {
            joint.push((i, (i + 3) % l, u * (1.0 - s)));
            joint.push((i, (i + 4) % l, u * s));
        }
        let p = vec![u; l as usize];
        // direct summation oracle over the L x 2 support
        let mut direct = 0.0;
        for &(i, j, w) in &joint {
            let _ = (i, j);
            direct += w * (w / (u * u)).ln();
        }
        let i_got = mutual_entropy(&joint, &p, &p).unwrap();
        assert!((i_got - direct).abs() < 1e-12);
        let expect = shannon_entropy(&p) - 2f64.ln();
        assert!((i_got - expect).abs() < 1e-12);
    }

    #[test]
    fn mutual_entropy_rejects_marginal_mismatch() {
        let joint = vec![(0u32, 0u32, 0.6), (1, 1, 0.4)];
        let bad = [0.5, 0.5];
        assert!(matches!(
            mutual_entropy(&joint, &bad, &bad),
            Err(Error::MarginalMismatch(_))
        ));
    }

    #[test]
    fn ecd_zero_for_permutation_models() {
        // deterministic 3-cycle over cells 0,1,2
        let symbols: Vec<u32> = (0..91).map(|k| k % 3).collect();
        let m = EmpiricalModel::from_symbols(&symbols, 5).unwrap();
        let r = ecd_from_model(&m).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.s_out > 0.0);
    }

    #[test]
    fn ecd_log_k_for_uniform_joint() {
        let k = 7u32;
        let w = 1.0 / (k * k) as f64;
        let mut joint = Vec::new();
        for i in 0..k {
            for j in 0..k {
                joint.push((i, j, w));
            }
        }
        let m = EmpiricalModel::from_joint_mass(joint, k as usize).unwrap();
        let r = ecd_from_model(&m).unwrap();
        assert!((r.value - (k as f64).ln()).abs() < 1e-12);
        assert!(r.mutual.abs() < 1e-12);
    }

    #[test]
    fn ecd_binary_entropy_for_two_entry_rows() {
        let l = 16u32;
        let s = 0.180339887498949_f64;
        let u = 1.0 / l as f64;
        let mut joint = Vec::new();
        for i in 0..l {
            joint.push((i, (i + 6) % l, u * (1.0 - s)));
            joint.push((i, (i + 7) % l, u * s));
        }
        let m = EmpiricalModel::from_joint_mass(joint, l as usize).unwrap();
        let r = ecd_from_model(&m).unwrap();
        let h = -s * s.ln() - (1.0 - s) * (1.0 - s).ln();
        assert!((r.value - h).abs() < 1e-12);
    }

    #[test]
    fn ecd_of_logistic_chaotic_parameter_is_positive() {
        let sys = builtin_map("logistic", &[3.71]).unwrap();
        let r = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.3]),
            &ObservationSpec::partition(vec![100]),
            1000,
            100_000,
        )
        .unwrap();
        assert!(r.value > 0.1, "D = {}", r.value);
        assert!(r.value <= r.s_out + 1e-12);
        assert_eq!(classify(r.value, 1e-6), Classification::Chaotic);
    }

    #[test]
    fn ecd_of_logistic_fixed_point_is_zero() {
        // all post-transient points share one cell (oracle: direct check)
        let sys = builtin_map("logistic", &[2.8]).unwrap();
        let orbit = iterate_map(&sys, &[0.3], 1000, 10_000).unwrap();
        let partition = EquiPartition::new(sys.domain().clone(), vec![100]).unwrap();
        let symbols = partition.symbolize(&orbit).unwrap();
        assert!(symbols.iter().all(|&s| s == symbols[0]));

        let r = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.3]),
            &ObservationSpec::partition(vec![100]),
            1000,
            10_000,
        )
        .unwrap();
        assert!(r.value <= 1e-6, "D = {}", r.value);
        assert_eq!(classify(r.value, 1e-6), Classification::Stable);
    }

    #[test]
    fn ecd_rational_circle_is_exactly_zero() {
        let sys = builtin_map("circle", &[0.25]).unwrap();
        let r = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.5]),
            &ObservationSpec::partition(vec![4]),
            100,
            10_000,
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn total_ecd_singleton_family() {
        let sys = builtin_map("logistic", &[3.71]).unwrap();
        let obs = ObservationSpec::partition(vec![50]);
        let single = ecd_of_system(&sys, &InitialEnsemble::point(&[0.3]), &obs, 500, 20_000)
            .unwrap();
        let (idx, best) = total_ecd(
            &sys,
            &InitialEnsemble::point(&[0.3]),
            std::slice::from_ref(&obs),
            500,
            20_000,
        )
        .unwrap();
        assert_eq!(idx, 0);
        assert_eq!(best.value, single.value);
    }

    #[test]
    fn total_ecd_reports_infimum_and_argmin() {
        let sys = builtin_map("logistic", &[3.71]).unwrap();
        let family: Vec<ObservationSpec> = [10usize, 100, 1000]
            .iter()
            .map(|&l| ObservationSpec::partition(vec![l]))
            .collect();
        let ens = InitialEnsemble::point(&[0.3]);
        let (idx, best) = total_ecd(&sys, &ens, &family, 1000, 50_000).unwrap();
        for obs in &family {
            let r = ecd_of_system(&sys, &ens, obs, 1000, 50_000).unwrap();
            assert!(best.value <= r.value + 1e-15);
            assert!(r.value > 0.0);
        }
        let direct = ecd_of_system(&sys, &ens, &family[idx], 1000, 50_000).unwrap();
        assert_eq!(direct.value, best.value);
    }

    #[test]
    fn classify_thresholds() {
        assert_eq!(classify(0.42, 1e-6), Classification::Chaotic);
        assert_eq!(classify(0.0, 0.0), Classification::Stable);
        assert_eq!(classify(1e-9, 1e-6), Classification::Stable);
    }

    #[test]
    fn observation_stage_composition() {
        let sys = builtin_map("henon", &[]).unwrap();
        let obs = ObservationSpec::new()
            .then_time_scale(2)
            .then_project(vec![0])
            .then_partition(vec![32]);
        let r = ecd_of_system(&sys, &InitialEnsemble::point(&[0.0, 0.0]), &obs, 500, 40_000)
            .unwrap();
        assert!(r.value >= 0.0 && r.value <= r.s_out + 1e-12);
        assert_eq!(r.observation, "tau=2|proj=[0]|P=32");
    }

    #[test]
    fn partition_stage_required() {
        let sys = builtin_map("logistic", &[3.5]).unwrap();
        let err = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.3]),
            &ObservationSpec::new().then_time_scale(2),
            100,
            1000,
        )
        .unwrap_err();
        assert!(matches!(err, Error::IncompatiblePartition(_)));
    }

    #[test]
    fn axiom_suite_passes_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = rng.random_range(2..12);
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let tot: f64 = raw.iter().sum();
            let p = ProbVector::new(raw.iter().map(|x| x / tot).collect()).unwrap();
            // random stochastic rows as a joint, normalized
            let mut joint = Vec::new();
            for i in 0..n as u32 {
                let k = rng.random_range(1..4usize);
                let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
                let tw: f64 = w.iter().sum();
                for (m, wi) in w.iter().enumerate() {
                    let j = (i as usize + m) % n;
                    joint.push((i, j as u32, p.as_slice()[i as usize] * wi / tw));
                }
            }
            let model = EmpiricalModel::from_joint_mass(joint, n).unwrap();
            let channel = crate::partition::channel_from(&model).unwrap();
            let report = axiom_suite(&p, &channel, trial).unwrap();
            assert!(report.all_pass(), "trial {trial}: {report:?}");
        }
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbVector::new(vec![]).is_err());
    }
}

//! Finite-dimensional quantum states and channels: von Neumann entropy,
//! Schatten decompositions, the quantum entropic chaos degree, projective
//! decoherence, and observable-orbit reduction to the classical pipeline.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense eigendecompositions stay desk-scale under this cap.
pub const MAX_DIM: usize = 32;

/// Default number of random decomposition-search trials.
pub const DEFAULT_SEARCH_TRIALS: usize = 64;

/// Fixed seed of the default decomposition search (reproducible runs).
const SEARCH_SEED: u64 = 0x5eed_cd01;

type CMatrix = DMatrix<Complex64>;

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn trace(m: &CMatrix) -> Complex64 {
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..m.nrows() {
        t += m[(i, i)];
    }
    t
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, sorted by descending
/// eigenvalue (deterministic for fixed input bits).
fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let d = m.nrows();
    let mut vectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// A density operator: Hermitian, positive semidefinite (eigenvalues above
/// `-1e-12`), unit trace, dimension at most [`MAX_DIM`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let dim = mat.nrows();
        if dim == 0 || mat.ncols() != dim {
            return Err(Error::InvalidState("matrix must be square".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidState(format!(
                "dimension {dim} exceeds the cap {MAX_DIM}"
            )));
        }
        let herm_dev = hermiticity_deviation(&mat);
        if herm_dev > 1e-12 {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let mat = hermitize(&mat);
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let (values, _) = hermitian_eigen(&mat);
        if let Some(min) = values.last() {
            if *min < -1e-12 {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { dim, mat })
    }

    /// Internal constructor for matrices already known valid up to
    /// floating-point noise (channel outputs, decohered states).
    fn from_valid(mat: CMatrix) -> Self {
        let dim = mat.nrows();
        Self {
            dim,
            mat: hermitize(&mat),
        }
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let mut m = CMatrix::zeros(probs.len(), probs.len());
        for (i, &p) in probs.iter().enumerate() {
            m[(i, i)] = Complex64::new(p, 0.0);
        }
        Self::new(m)
    }

    /// Rank-1 state from a (not necessarily normalized) vector.
    pub fn pure(state: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let d = state.len();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = state[i] * state[j].conj() / norm_sq;
            }
        }
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Descending eigenvalues, clipped into `[0, 1]`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.mat)
            .0
            .into_iter()
            .map(|l| l.clamp(0.0, 1.0))
            .collect()
    }
}

/// Von Neumann entropy `-sum lambda log lambda` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let mut s = 0.0;
    for l in rho.eigenvalues() {
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    s
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let dim = match kraus.first() {
            Some(k) => k.nrows(),
            None => return Err(Error::InvalidChannel("no Kraus operators".into())),
        };
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidChannel(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::InvalidChannel(
                    "Kraus operators must be square with equal dimensions".into(),
                ));
            }
            sum += k.adjoint() * k;
        }
        let dev = (&sum - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidChannel(format!(
                "sum K^dag K deviates from identity by {dev:e}"
            )));
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![CMatrix::identity(dim, dim)])
    }

    /// Single-Kraus channel from a unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Qubit depolarizing channel of strength `p`:
    /// `rho -> (1-p) rho + p I/2`.
    pub fn depolarizing_qubit(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!(
                "depolarizing strength {p} outside [0,1]"
            )));
        }
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let id = CMatrix::identity(2, 2);
        let sx = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let sy = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let sz = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        let w0 = (1.0 - 0.75 * p).sqrt();
        let w = (0.25 * p).sqrt();
        Self::new(vec![
            id * c(w0, 0.0),
            sx * c(w, 0.0),
            sy * c(w, 0.0),
            sz * c(w, 0.0),
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Apply the channel: `rho -> sum K rho K^dag`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.dim(),
            });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityMatrix::from_valid(out))
    }

    fn apply_raw(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }
}

/// A projection-valued measure: orthogonal projectors summing to identity.
#[derive(Debug, Clone)]
pub struct Pvm {
    dim: usize,
    projectors: Vec<CMatrix>,
}

impl Pvm {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let dim = match projectors.first() {
            Some(p) => p.nrows(),
            None => return Err(Error::InvalidState("empty PVM".into())),
        };
        let mut sum = CMatrix::zeros(dim, dim);
        for (a, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::InvalidState("PVM projectors must share a dimension".into()));
            }
            if hermiticity_deviation(p) > 1e-10 {
                return Err(Error::InvalidState(format!("projector {a} not Hermitian")));
            }
            for (b, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let expect = if a == b { p.clone() } else { CMatrix::zeros(dim, dim) };
                let dev = (&prod - &expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if dev > 1e-10 {
                    return Err(Error::InvalidState(format!(
                        "projectors {a},{b} violate orthogonality by {dev:e}"
                    )));
                }
            }
            sum += p;
        }
        let dev = (&sum - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidState(format!(
                "PVM does not resolve the identity (deviation {dev:e})"
            )));
        }
        Ok(Self { dim, projectors })
    }

    /// The computational-basis PVM (rank-1 coordinate projectors).
    pub fn computational(dim: usize) -> Result<Self> {
        let mut projectors = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut p = CMatrix::zeros(dim, dim);
            p[(k, k)] = Complex64::new(1.0, 0.0);
            projectors.push(p);
        }
        Self::new(projectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }
}

/// Projective decoherence (the conditional-expectation observation):
/// `rho -> sum_k P_k rho P_k`. Idempotent.
pub fn pvm_expectation(rho: &DensityMatrix, pvm: &Pvm) -> Result<DensityMatrix> {
    if rho.dim() != pvm.dim() {
        return Err(Error::DimensionMismatch {
            expected: pvm.dim(),
            got: rho.dim(),
        });
    }
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for p in pvm.projectors() {
        out += p * rho.matrix() * p;
    }
    Ok(DensityMatrix::from_valid(out))
}

/// A one-dimensional orthogonal spectral decomposition `rho = sum lambda_k E_k`.
#[derive(Debug, Clone)]
pub struct SchattenDecomposition {
    /// Descending weights (sum 1 over the support).
    pub weights: Vec<f64>,
    /// Rank-1 orthogonal projectors, one per positive weight.
    pub projectors: Vec<CMatrix>,
    /// True when some eigenvalue was degenerate within the tolerance, in
    /// which case the decomposition is not unique.
    pub degenerate: bool,
}

impl SchattenDecomposition {
    /// `sum lambda_k E_k`, for reconstruction checks.
    pub fn reconstruct(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for (w, e) in self.weights.iter().zip(&self.projectors) {
            m += e * Complex64::new(*w, 0.0);
        }
        m
    }
}

fn rank1(col: nalgebra::DVectorView<'_, Complex64>) -> CMatrix {
    let d = col.len();
    let mut e = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            e[(i, j)] = col[i] * col[j].conj();
        }
    }
    e
}

/// Group indices of equal eigenvalues within `tol` (values are sorted
/// descending, so groups are contiguous).
fn degeneracy_groups(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (values[g[0]] - v).abs() <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Spectral decomposition into rank-1 projectors. Inside eigenspaces that
/// are degenerate beyond `degeneracy_tol` the basis is canonicalized by
/// projecting the coordinate axes onto the eigenspace and orthonormalizing
/// them in fixed coordinate order.
pub fn schatten_decompose(rho: &DensityMatrix, degeneracy_tol: f64) -> SchattenDecomposition {
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let groups = degeneracy_groups(&values, degeneracy_tol);
    let degenerate = groups.iter().any(|g| g.len() > 1);
    let d = rho.dim();
    let mut weights = Vec::with_capacity(d);
    let mut projectors = Vec::with_capacity(d);
    for group in &groups {
        let cols: Vec<usize> = group.clone();
        let basis = if cols.len() == 1 {
            vec![vectors.column(cols[0]).into_owned()]
        } else {
            canonical_basis(&vectors, &cols)
        };
        for (k, b) in basis.iter().enumerate() {
            weights.push(values[cols[k]].clamp(0.0, 1.0));
            projectors.push(rank1(b.as_view()));
        }
    }
    SchattenDecomposition {
        weights,
        projectors,
        degenerate,
    }
}

/// Deterministic orthonormal basis of the span of the given eigenvector
/// columns: Gram-Schmidt over the projected coordinate axes, in order.
fn canonical_basis(
    vectors: &CMatrix,
    cols: &[usize],
) -> Vec<nalgebra::DVector<Complex64>> {
    let d = vectors.nrows();
    let mut proj = CMatrix::zeros(d, d);
    for &c in cols {
        proj += rank1(vectors.column(c));
    }
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(cols.len());
    for axis in 0..d {
        if basis.len() == cols.len() {
            break;
        }
        let mut w = proj.column(axis).into_owned();
        for b in &basis {
            let overlap = b.dotc(&w);
            w -= b * overlap;
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w / Complex64::new(norm, 0.0));
        }
    }
    basis
}

/// Quantum entropic chaos degree: the canonical Schatten decomposition value
/// `sum lambda_k S(Lambda E_k)`, improved by `search_trials` random
/// orthonormal bases inside each degenerate eigenspace (the decomposition is
/// unique, up to phases, when the spectrum is nondegenerate).
pub fn quantum_ecd(
    rho: &DensityMatrix,
    channel: &QuantumChannel,
    search_trials: usize,
) -> Result<f64> {
    quantum_ecd_seeded(rho, channel, search_trials, SEARCH_SEED)
}

/// [`quantum_ecd`] with an explicit search seed.
pub fn quantum_ecd_seeded(
    rho: &DensityMatrix,
    channel: &QuantumChannel,
    search_trials: usize,
    seed: u64,
) -> Result<f64> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.dim(),
            got: rho.dim(),
        });
    }
    let tol = 1e-10;
    let decomposition = schatten_decompose(rho, tol);
    let value_of = |weights: &[f64], projectors: &[CMatrix]| -> f64 {
        let mut total = 0.0;
        for (w, e) in weights.iter().zip(projectors) {
            if *w > 1e-15 {
                let out = DensityMatrix::from_valid(channel.apply_raw(e));
                total += w * von_neumann_entropy(&out);
            }
        }
        total
    };
    let mut best = value_of(&decomposition.weights, &decomposition.projectors);
    if !decomposition.degenerate || search_trials == 0 {
        return Ok(best);
    }

    let (values, vectors) = hermitian_eigen(rho.matrix());
    let groups = degeneracy_groups(&values, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..search_trials {
        let mut weights = Vec::with_capacity(rho.dim());
        let mut projectors = Vec::with_capacity(rho.dim());
        for group in &groups {
            if group.len() == 1 {
                weights.push(values[group[0]].clamp(0.0, 1.0));
                projectors.push(rank1(vectors.column(group[0])));
                continue;
            }
            let g = group.len();
            let u = random_unitary(g, &mut rng);
            // rotate the eigenvector block by u
            let d = rho.dim();
            let mut block = CMatrix::zeros(d, g);
            for (bi, &c) in group.iter().enumerate() {
                block.set_column(bi, &vectors.column(c));
            }
            let rotated = block * u;
            for (bi, &c) in group.iter().enumerate() {
                weights.push(values[c].clamp(0.0, 1.0));
                projectors.push(rank1(rotated.column(bi)));
            }
        }
        let v = value_of(&weights, &projectors);
        if v < best {
            best = v;
        }
    }
    Ok(best)
}

/// Haar-ish random unitary: QR of a complex Ginibre matrix with the phase
/// of R's diagonal absorbed.
fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut g = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase.conj();
        q.set_column(j, &col);
    }
    q
}

/// The observable-orbit reduction: iterate the channel and record
/// `x_k = tr(rho_k X)` for a Hermitian observable `X`. The scalar series
/// feeds the classical partition/chaos-degree pipeline.
pub fn observable_orbit(
    rho0: &DensityMatrix,
    channel: &QuantumChannel,
    observable: &CMatrix,
    length: usize,
) -> Result<Vec<f64>> {
    if length < 2 {
        return Err(Error::InvalidArgument("need length >= 2".into()));
    }
    if observable.nrows() != rho0.dim() || observable.ncols() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            got: observable.nrows(),
        });
    }
    if hermiticity_deviation(observable) > 1e-10 {
        return Err(Error::InvalidState("observable not Hermitian".into()));
    }
    if rho0.dim() != channel.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.dim(),
            got: rho0.dim(),
        });
    }
    let mut rho = rho0.clone();
    let mut xs = Vec::with_capacity(length);
    for k in 0..length {
        let t = trace(&(rho.matrix() * observable));
        if t.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "expectation at step {k} has imaginary part {:e}",
                t.im
            )));
        }
        xs.push(t.re);
        if k + 1 < length {
            rho = channel.apply(&rho)?;
        }
    }
    Ok(xs)
}

// ---------------------------------------------------------------------------
// Plain-text matrix format
// ---------------------------------------------------------------------------
//
// One matrix:     line 1 is the dimension d; the next d lines hold d
//                 whitespace-separated "re,im" tokens each.
// Kraus sets:     several such blocks separated by blank lines.

/// Parse a single matrix in the plain-text format.
pub fn parse_matrix_text(text: &str) -> Result<CMatrix> {
    let blocks = parse_matrix_blocks(text)?;
    match blocks.as_slice() {
        [(_, m)] => Ok(m.clone()),
        _ => Err(Error::Parse {
            line: 1,
            msg: format!("expected exactly one matrix block, found {}", blocks.len()),
        }),
    }
}

/// Parse blank-line-separated matrix blocks (returns `(starting line, matrix)`).
pub fn parse_matrix_blocks(text: &str) -> Result<Vec<(usize, CMatrix)>> {
    let mut blocks = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(i, line)) = lines.peek() {
        if line.trim().is_empty() {
            lines.next();
            continue;
        }
        let lineno = i + 1;
        let dim: usize = line.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("expected a dimension, got `{line}`"),
        })?;
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("dimension {dim} outside 1..={MAX_DIM}"),
            });
        }
        lines.next();
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            let (ri, row) = lines.next().ok_or(Error::Parse {
                line: lineno + r,
                msg: "unexpected end of matrix block".into(),
            })?;
            let rowno = ri + 1;
            let tokens: Vec<&str> = row.split_whitespace().collect();
            if tokens.len() != dim {
                return Err(Error::Parse {
                    line: rowno,
                    msg: format!("expected {dim} entries, found {}", tokens.len()),
                });
            }
            for (c, tok) in tokens.iter().enumerate() {
                let (re, im) = tok.split_once(',').ok_or_else(|| Error::Parse {
                    line: rowno,
                    msg: format!("entry `{tok}` is not `re,im`"),
                })?;
                let re: f64 = re.trim().parse().map_err(|_| Error::Parse {
                    line: rowno,
                    msg: format!("bad real part `{re}`"),
                })?;
                let im: f64 = im.trim().parse().map_err(|_| Error::Parse {
                    line: rowno,
                    msg: format!("bad imaginary part `{im}`"),
                })?;
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        blocks.push((lineno, m));
    }
    if blocks.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no matrix blocks found".into(),
        });
    }
    Ok(blocks)
}

/// Render a matrix in the plain-text format (round-trips bit-exactly).
pub fn format_matrix_text(m: &CMatrix) -> String {
    let mut out = format!("{}\n", m.nrows());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{},{}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

//! Quantum states over labeled subsystems.
//!
//! Pure states and density matrices carry their [`SubsystemLayout`], so every
//! reduction, transpose or Schmidt split is addressed by subsystem label
//! rather than by raw index arithmetic.

mod io;
mod layout;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::tol;

pub use io::{load_state, parse_state, StateFile};
pub use layout::{Bipartition, Subsystem, SubsystemLayout, FOUR_PARTY};

/// Unit-norm state vector over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Validates the length and the unit norm.
    pub fn new(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&layout, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("amplitudes must be finite".into()));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidState(format!(
                "squared norm is {norm}, expected 1 within {:e}",
                tol::NORM
            )));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&layout, amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero or non-finite vector".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { layout, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let n = layout.total_dim();
        if index >= n {
            return Err(Error::Argument(format!("basis index {index} out of range 0..{n}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amplitudes })
    }

    /// `self ⊗ other` on the concatenated layout.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    /// Same amplitudes under new labels; dimensions must agree part by part.
    pub fn relabel(self, layout: SubsystemLayout) -> Result<Self> {
        if layout.dims() != self.layout.dims() {
            return Err(Error::Argument("relabeling must keep every dimension".into()));
        }
        Ok(Self { layout, ..self })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Same vector with the subsystems listed in a new order.
    pub fn reorder(&self, labels: &[impl AsRef<str>]) -> Result<Self> {
        let order = order_of(&self.layout, labels)?;
        let map = self.layout.permutation(&order);
        Ok(Self {
            layout: self.layout.select(&order),
            amplitudes: map.iter().map(|&old| self.amplitudes[old]).collect(),
        })
    }

    /// Amplitudes reshaped as a `dim(X) × dim(Y)` matrix for the cut.
    pub fn amplitude_matrix(&self, cut: &Bipartition) -> Result<ComplexMatrix> {
        cut.check_layout(&self.layout)?;
        let map = self.layout.permutation(&cut.order());
        let rows: usize = cut.side_x().iter().map(|&k| self.layout.parts()[k].dim).product();
        let cols = self.layout.total_dim() / rows;
        ComplexMatrix::new(rows, cols, map.iter().map(|&old| self.amplitudes[old]).collect())
    }

    /// Reduced state on the labels in `keep`, computed as `M M†`.
    pub fn reduced(&self, keep: &[impl AsRef<str>]) -> Result<DensityMatrix> {
        let cut = Bipartition::new(&self.layout, keep)?;
        let m = self.amplitude_matrix(&cut)?;
        Ok(DensityMatrix {
            layout: self.layout.select(cut.side_x()),
            matrix: m.matmul(&m.adjoint()),
        })
    }

    /// `⟨self|other⟩`; layouts must match.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.layout, other.layout, "inner product across different layouts");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_len(layout: &SubsystemLayout, len: usize) -> Result<()> {
    if len != layout.total_dim() {
        return Err(Error::Shape(format!(
            "{len} amplitudes for a layout of total dimension {}",
            layout.total_dim()
        )));
    }
    Ok(())
}

/// Positions for `labels`, which must name every subsystem exactly once.
fn order_of(layout: &SubsystemLayout, labels: &[impl AsRef<str>]) -> Result<Vec<usize>> {
    if labels.len() != layout.len() {
        return Err(Error::Argument("reordering must list every subsystem once".into()));
    }
    layout.positions(labels)?;
    Ok(labels
        .iter()
        .map(|l| layout.position(l.as_ref()).expect("checked"))
        .collect())
}

/// Hermitian, positive semidefinite, unit-trace matrix over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(layout: SubsystemLayout, matrix: ComplexMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Shape(format!(
                "{}x{} matrix for a layout of total dimension {n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > tol::HERMITIAN {
            return Err(Error::InvalidState(format!("matrix is not Hermitian (error {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < tol::NEGATIVE_EIGENVALUE {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min:e} is below {:e}",
                tol::NEGATIVE_EIGENVALUE
            )));
        }
        Ok(Self { layout, matrix })
    }

    /// Mixture `Σ p_i |ψ_i⟩⟨ψ_i|`. Weights must be nonnegative and sum to 1.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Argument("mixture needs at least one state".into()))?;
        if weights.len() != states.len() {
            return Err(Error::Argument("one weight per state is required".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Argument("mixture weights must be nonnegative".into()));
        }
        let n = first.layout.total_dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (&w, s) in weights.iter().zip(states) {
            if s.layout != first.layout {
                return Err(Error::Argument("mixture states must share a layout".into()));
            }
            m = &m + &ComplexMatrix::outer(&s.amplitudes, &s.amplitudes).scale(Complex64::new(w, 0.0));
        }
        Self::new(first.layout.clone(), m)
    }

    /// `I / d`.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self {
            layout,
            matrix: ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)),
        }
    }

    #[cfg(test)]
    pub(crate) fn from_trusted(layout: SubsystemLayout, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), layout.total_dim());
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self ⊗ other` on the concatenated layout.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            layout: self.layout.concat(&other.layout)?,
            matrix: linalg::kron(&self.matrix, &other.matrix)?,
        })
    }

    /// Descending spectrum.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Same operator with the subsystems listed in a new order.
    pub fn reorder(&self, labels: &[impl AsRef<str>]) -> Result<Self> {
        let order = order_of(&self.layout, labels)?;
        let map = self.layout.permutation(&order);
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &oi) in map.iter().enumerate() {
            for (j, &oj) in map.iter().enumerate() {
                m[(i, j)] = self.matrix[(oi, oj)];
            }
        }
        Ok(Self {
            layout: self.layout.select(&order),
            matrix: m,
        })
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        density_of(psi)
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_of(psi: &PureState) -> DensityMatrix {
    DensityMatrix {
        layout: psi.layout.clone(),
        matrix: ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes),
    }
}

/// Traces out every subsystem not listed in `keep`. The result keeps the
/// original relative order of the surviving subsystems.
pub fn partial_trace(rho: &DensityMatrix, keep: &[impl AsRef<str>]) -> Result<DensityMatrix> {
    let cut = Bipartition::new(&rho.layout, keep)?;
    let map = rho.layout.permutation(&cut.order());
    let layout = rho.layout.select(cut.side_x());
    let kept = layout.total_dim();
    let traced = rho.dim() / kept;
    let mut m = ComplexMatrix::zeros(kept, kept);
    for i in 0..kept {
        for j in 0..kept {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..traced {
                acc += rho.matrix[(map[i * traced + r], map[j * traced + r])];
            }
            m[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix { layout, matrix: m })
}

/// Transposes the subsystems in `transposed`. The result is Hermitian with
/// unit trace but need not be positive.
pub fn partial_transpose(rho: &DensityMatrix, transposed: &[impl AsRef<str>]) -> Result<ComplexMatrix> {
    let positions = rho.layout.positions(transposed)?;
    if positions.is_empty() {
        return Err(Error::Argument("nothing to transpose".into()));
    }
    let dims = rho.layout.dims();
    let strides = layout::strides(&dims);
    let n = rho.dim();
    // For each index, its component along the transposed subsystems.
    let t_part: Vec<usize> = (0..n)
        .map(|i| {
            positions
                .iter()
                .map(|&k| (i / strides[k]) % dims[k] * strides[k])
                .sum()
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let si = i - t_part[i] + t_part[j];
            let sj = j - t_part[j] + t_part[i];
            out[(i, j)] = rho.matrix[(si, sj)];
        }
    }
    Ok(out)
}

/// `-Σ p log₂ p` with entries at or below the entropy cutoff skipped.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > tol::ENTROPY_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Entropy of a spectrum; eigenvalues in `[-1e-9, 0)` are clamped, anything
/// more negative is rejected.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    if let Some(&bad) = eigenvalues.iter().find(|&&e| e < tol::NEGATIVE_EIGENVALUE) {
        return Err(Error::InvalidState(format!("negative eigenvalue {bad:e}")));
    }
    Ok(shannon_entropy(eigenvalues))
}

/// Von Neumann entropy in ebits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&rho.eigenvalues()?)
}

/// Schmidt decomposition of a pure state across a cut.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Squared Schmidt coefficients, descending.
    pub coefficients: Vec<f64>,
    /// States on side X, in layout order of its labels.
    pub left_states: Vec<PureState>,
    /// States on side Y.
    pub right_states: Vec<PureState>,
    /// Two retained coefficients coincide within the degeneracy gap, so the
    /// paired states are not unique.
    pub degenerate: bool,
}

impl SchmidtDecomposition {
    /// `Σ √λ_i |left_i⟩⊗|right_i⟩` in the original subsystem order of `layout`.
    pub fn reconstruct(&self, layout: &SubsystemLayout) -> Result<PureState> {
        let left = self.left_states[0].layout();
        let right = self.right_states[0].layout();
        let joint = left.concat(right)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); joint.total_dim()];
        for ((&l, a), b) in self.coefficients.iter().zip(&self.left_states).zip(&self.right_states) {
            let term = linalg::kron_vec(a.amplitudes(), b.amplitudes());
            for (x, t) in amps.iter_mut().zip(term) {
                *x += t * l.sqrt();
            }
        }
        PureState::normalized(joint, amps)?.reorder(&layout.labels())
    }
}

/// Schmidt decomposition across `cut`, from the SVD of the amplitude matrix.
pub fn schmidt_decompose(psi: &PureState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = psi.amplitude_matrix(cut)?;
    let svd = linalg::svd(&m);
    let left_layout = psi.layout.select(cut.side_x());
    let right_layout = psi.layout.select(cut.side_y());

    let mut coefficients = Vec::new();
    let mut left_states = Vec::new();
    let mut right_states = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let lambda = s * s;
        if lambda <= tol::SCHMIDT_CUTOFF {
            continue;
        }
        coefficients.push(lambda);
        left_states.push(PureState::normalized(left_layout.clone(), svd.left.column(k))?);
        right_states.push(PureState::normalized(
            right_layout.clone(),
            svd.right_adjoint.row(k).to_vec(),
        )?);
    }
    let degenerate = coefficients
        .windows(2)
        .any(|w| w[0] - w[1] < tol::DEGENERACY_GAP);
    Ok(SchmidtDecomposition {
        coefficients,
        left_states,
        right_states,
        degenerate,
    })
}

/// Full dephasing of subsystem `target` in an orthonormal `basis`:
/// `Σ_i (I⊗|i⟩⟨i|) ρ (I⊗|i⟩⟨i|)`.
pub fn dephase_in_basis(rho: &DensityMatrix, target: &str, basis: &[Vec<Complex64>]) -> Result<DensityMatrix> {
    let pos = rho
        .layout
        .position(target)
        .ok_or_else(|| Error::Argument(format!("unknown subsystem label {target:?}")))?;
    let dims = rho.layout.dims();
    let d = dims[pos];
    if basis.len() != d || basis.iter().any(|v| v.len() != d) {
        return Err(Error::Argument(format!(
            "dephasing basis must hold {d} vectors of length {d}"
        )));
    }
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (ip - want).norm() > tol::ORTHONORMAL {
                return Err(Error::Argument("dephasing basis is not orthonormal".into()));
            }
        }
    }
    let before: usize = dims[..pos].iter().product();
    let after: usize = dims[pos + 1..].iter().product();
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for v in basis {
        let proj = ComplexMatrix::outer(v, v);
        let full = linalg::kron(
            &linalg::kron(&ComplexMatrix::identity(before), &proj)?,
            &ComplexMatrix::identity(after),
        )?;
        let term = full.matmul(&rho.matrix).matmul(&full);
        out = &out + &term;
    }
    Ok(DensityMatrix {
        layout: rho.layout.clone(),
        matrix: out,
    })
}

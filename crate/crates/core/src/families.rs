//! Example state families and the three structural conditions.
//!
//! Every checker returns a [`ConditionReport`]. `Satisfied` and
//! `NotSatisfied` are only issued when the test is decisive; everything else
//! is `Inconclusive` with a reason.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{self, PairLabels};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qstate::{self, Bipartition, DensityMatrix, PureState, StateFile, SubsystemLayout};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    One,
    Two,
    Three,
}

impl Condition {
    pub fn number(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::One),
            2 => Some(Self::Two),
            3 => Some(Self::Three),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    NotSatisfied,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub scalars: BTreeMap<String, f64>,
    pub reason: String,
}

/// Parameters of a four-qubit X-state: the 16 diagonal entries and the
/// coherences at `(i, 15 - i)` for `i < 8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub diagonal: [f64; 16],
    pub antidiagonal: [Complex64; 8],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

fn check_weights(weights: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for w in weights {
        if !w.is_finite() {
            return Err(Error::Argument(format!("weight {w} is not finite")));
        }
        if w < 0.0 {
            return Err(Error::Argument(format!("negative weight {w}")));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > tol::NORM {
        return Err(Error::Argument(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

fn matrix_shape(lambda: &[Vec<f64>]) -> Result<(usize, usize)> {
    let rows = lambda.len();
    let cols = lambda.first().map_or(0, Vec::len);
    if lambda.iter().any(|r| r.len() != cols) {
        return Err(Error::Argument("lambda matrix rows have different lengths".into()));
    }
    if rows < 2 || cols < 2 {
        return Err(Error::Argument(format!(
            "lambda matrix is {rows}x{cols}; both dimensions must be at least 2"
        )));
    }
    check_weights(lambda.iter().flatten().copied())?;
    Ok((rows, cols))
}

fn from_terms(layout: SubsystemLayout, terms: impl IntoIterator<Item = (usize, f64)>) -> Result<PureState> {
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
    for (idx, weight) in terms {
        amps[idx] += Complex64::new(weight.sqrt(), 0.0);
    }
    PureState::new(layout, amps)
}

/// `Σ_ij √λ_ij |ii⟩_{A1B1} |jj⟩_{A2B2}`. `A1` and `B1` take the row count of
/// `λ` as dimension, `A2` and `B2` the column count.
pub fn family_i_state(lambda: &[Vec<f64>]) -> Result<PureState> {
    let (n, m) = matrix_shape(lambda)?;
    let layout = SubsystemLayout::four_party([n, n, m, m])?;
    let terms = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| {
        let idx = ((i * n + i) * m + j) * m + j;
        (idx, lambda[i][j])
    });
    let psi = from_terms(layout, terms)?;
    let rho = psi.reduced(&["A1", "A2"])?;
    debug_assert!(rho.matrix().max_off_diagonal() < tol::DIAGONAL);
    Ok(psi)
}

/// `Σ_ij √λ_ij |ij⟩_{A1B1} |ij⟩_{A2B2}`. The `A` parties take the row count
/// of `λ` as dimension, the `B` parties the column count.
pub fn family_ii_state(lambda: &[Vec<f64>]) -> Result<PureState> {
    let (n, m) = matrix_shape(lambda)?;
    let layout = SubsystemLayout::four_party([n, m, n, m])?;
    let terms = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| {
        let idx = ((i * m + j) * n + i) * m + j;
        (idx, lambda[i][j])
    });
    from_terms(layout, terms)
}

/// `Σ_i √λ_i |iiii⟩` with local dimension `local_dim`.
pub fn generalized_ghz(lambda: &[f64], local_dim: usize) -> Result<PureState> {
    if lambda.len() > local_dim {
        return Err(Error::Argument(format!(
            "{} weights do not fit local dimension {local_dim}",
            lambda.len()
        )));
    }
    check_weights(lambda.iter().copied())?;
    let d = local_dim;
    let layout = SubsystemLayout::four_party([d; 4])?;
    let terms = lambda
        .iter()
        .enumerate()
        .map(|(i, &w)| ((((i * d + i) * d + i) * d + i), w));
    from_terms(layout, terms)
}

/// Four-qubit density matrix supported on the diagonal and antidiagonal.
pub fn x_state_four_qubit(params: &XStateParams) -> Result<DensityMatrix> {
    check_weights(params.diagonal.iter().copied())?;
    let mut m = ComplexMatrix::from_real_diag(&params.diagonal);
    for (i, &c) in params.antidiagonal.iter().enumerate() {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Argument(format!("coherence {i} is not finite")));
        }
        m[(i, 15 - i)] = c;
        m[(15 - i, i)] = c.conj();
    }
    let min = linalg::hermitian_eigenvalues(&m)?.last().copied().unwrap_or(0.0);
    if min < -tol::HERMITIAN {
        return Err(Error::Argument(format!(
            "X-state parameters are not positive semidefinite (smallest eigenvalue {min:e})"
        )));
    }
    DensityMatrix::new(SubsystemLayout::four_party([2; 4])?, m)
}

/// `(|00⟩|01⟩ + |11⟩|10⟩)/√6 + √(2/3) |ψ⁺⟩|φ⁺⟩` on `A1 B1 A2 B2`.
pub fn counterexample_chi() -> PureState {
    let layout = SubsystemLayout::four_party([2; 4]).expect("qubit layout");
    let a = 1.0 / 6.0_f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    for idx in [0b0001, 0b1110, 0b0100, 0b0111, 0b1000, 0b1011] {
        amps[idx] = Complex64::new(a, 0.0);
    }
    PureState::new(layout, amps).expect("normalized")
}

/// Bell state on qubits labeled `A` and `B`.
pub fn bell_state(kind: BellKind) -> PureState {
    let layout = SubsystemLayout::qubits(&["A", "B"]).expect("qubit layout");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => [h, 0.0, 0.0, h],
        BellKind::PhiMinus => [h, 0.0, 0.0, -h],
        BellKind::PsiPlus => [0.0, h, h, 0.0],
        BellKind::PsiMinus => [0.0, h, -h, 0.0],
    };
    PureState::new(layout, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .expect("normalized")
}

/// Positive partial transpose on a two-qubit state, exact for separability.
pub fn ppt_separable_two_qubit(rho: &DensityMatrix) -> Result<bool> {
    if rho.layout().dims() != [2, 2] {
        return Err(Error::Argument(format!(
            "PPT test expects two qubits, got dims {:?}",
            rho.layout().dims()
        )));
    }
    Ok(min_pt_eigenvalue(rho)? >= tol::PPT)
}

fn min_pt_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let first = rho.layout().labels()[0].to_string();
    let pt = qstate::partial_transpose(rho, &[first])?;
    Ok(linalg::hermitian_eigenvalues(&pt)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

fn four_party_check(layout: &SubsystemLayout) -> Result<()> {
    if !layout.is_four_party() {
        return Err(Error::Argument(format!(
            "expected subsystems A1, B1, A2, B2, got {:?}",
            layout.labels()
        )));
    }
    Ok(())
}

fn min_gap(sorted_desc: &[f64]) -> f64 {
    sorted_desc
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min)
}

fn format_basis(basis: &[Vec<Complex64>]) -> String {
    let vecs: Vec<String> = basis
        .iter()
        .map(|v| {
            let parts: Vec<String> = v.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            format!("({})", parts.join(", "))
        })
        .collect();
    vecs.join(", ")
}

/// Looks for a classical-quantum form of `ρ_{A1A2}` in the eigenbasis of one
/// of its marginals.
pub fn check_condition1(psi: &PureState) -> Result<ConditionReport> {
    four_party_check(psi.layout())?;
    let rho = psi.reduced(&["A1", "A2"])?;
    let mut scalars = BTreeMap::new();
    let mut degenerate_fixed_point = None;
    for side in ["A2", "A1"] {
        let marginal = qstate::partial_trace(&rho, &[side])?;
        let eig = linalg::hermitian_eigensystem(marginal.matrix())?;
        let basis: Vec<Vec<Complex64>> = (0..eig.values.len()).map(|k| eig.vector(k)).collect();
        let dephased = qstate::dephase_in_basis(&rho, side, &basis)?;
        let change = dephased.matrix().max_abs_diff(rho.matrix());
        let gap = min_gap(&eig.values);
        scalars.insert(format!("dephasing_change_{side}"), change);
        scalars.insert(format!("min_gap_{side}"), gap);
        if change <= tol::DEPHASING_FIXED_POINT {
            if gap > tol::DEGENERACY_GAP {
                return Ok(ConditionReport {
                    condition: Condition::One,
                    verdict: Verdict::Satisfied,
                    scalars,
                    reason: format!(
                        "ρ_A1A2 is classical on {side} in the eigenbasis of its nondegenerate marginal: {}",
                        format_basis(&basis)
                    ),
                });
            }
            degenerate_fixed_point.get_or_insert(side);
        }
    }
    let reason = match degenerate_fixed_point {
        Some(side) => format!(
            "ρ_A1A2 is invariant under dephasing on {side}, but the marginal is degenerate so the classical basis is not unique"
        ),
        None => "ρ_A1A2 is not classical on either side in its marginal eigenbasis; the test is sufficient only".into(),
    };
    Ok(ConditionReport {
        condition: Condition::One,
        verdict: Verdict::Inconclusive,
        scalars,
        reason,
    })
}

/// Compares `S(ρ_{A1A2})` with `R(χ)`.
pub fn check_condition2(psi: &PureState) -> Result<ConditionReport> {
    four_party_check(psi.layout())?;
    let cut = Bipartition::new(psi.layout(), &["A1", "A2"])?;
    let s = entanglement::pure_state_eof(psi, &cut)?;
    let r = entanglement::r_quantity_detailed(psi, &PairLabels::default())?;
    let mut scalars = BTreeMap::new();
    scalars.insert("S_A1A2".to_string(), s);
    scalars.insert("R_chi".to_string(), r.value);
    scalars.insert("degenerate_schmidt".to_string(), if r.degenerate { 1.0 } else { 0.0 });
    let satisfied = s >= r.value - tol::INEQUALITY;
    let mut reason = if satisfied {
        format!("S(ρ_A1A2) = {s} >= R = {}", r.value)
    } else {
        format!(
            "S(ρ_A1A2) = {s} < R = {}; the sufficient test fails, which does not imply a negative ΔE_F",
            r.value
        )
    };
    if r.degenerate {
        reason.push_str(" (degenerate Schmidt coefficients: R refers to the decomposition found)");
    }
    Ok(ConditionReport {
        condition: Condition::Two,
        verdict: if satisfied { Verdict::Satisfied } else { Verdict::NotSatisfied },
        scalars,
        reason,
    })
}

enum PairOutcome {
    Pass(&'static str),
    Fail,
    Unknown,
}

/// Tests both pair reductions for diagonality, or PPT on two qubits.
pub fn check_condition3(state: &StateFile) -> Result<ConditionReport> {
    four_party_check(state.layout())?;
    let rho = state.density();
    let mut scalars = BTreeMap::new();
    let mut notes = Vec::new();
    let mut outcomes = Vec::new();
    for pair in [["A1", "B1"], ["A2", "B2"]] {
        let name = pair.concat();
        let reduced = qstate::partial_trace(&rho, &pair)?;
        let off = reduced.matrix().max_off_diagonal();
        let min_pt = min_pt_eigenvalue(&reduced)?;
        scalars.insert(format!("max_off_diagonal_{name}"), off);
        scalars.insert(format!("min_pt_eigenvalue_{name}"), min_pt);
        let two_qubit = reduced.layout().dims() == [2, 2];
        let outcome = if off < tol::DIAGONAL {
            PairOutcome::Pass("diagonal")
        } else if min_pt < tol::PPT {
            PairOutcome::Fail
        } else if two_qubit {
            PairOutcome::Pass("PPT on two qubits")
        } else {
            PairOutcome::Unknown
        };
        notes.push(match &outcome {
            PairOutcome::Pass(why) => format!("ρ_{name} separable ({why})"),
            PairOutcome::Fail => format!("ρ_{name} entangled (partial transpose eigenvalue {min_pt:e})"),
            PairOutcome::Unknown => format!("ρ_{name} is PPT but neither diagonal nor 2x2"),
        });
        outcomes.push(outcome);
    }
    let verdict = if outcomes.iter().any(|o| matches!(o, PairOutcome::Fail)) {
        Verdict::NotSatisfied
    } else if outcomes.iter().all(|o| matches!(o, PairOutcome::Pass(_))) {
        Verdict::Satisfied
    } else {
        Verdict::Inconclusive
    };
    Ok(ConditionReport {
        condition: Condition::Three,
        verdict,
        scalars,
        reason: notes.join("; "),
    })
}

/// Family parameters as read from JSON, tagged by `"family"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum FamilyParams {
    #[serde(rename = "i")]
    I { lambda: Vec<Vec<f64>> },
    #[serde(rename = "ii")]
    II { lambda: Vec<Vec<f64>> },
    #[serde(rename = "ghz")]
    Ghz {
        lambda: Vec<f64>,
        #[serde(default = "default_local_dim")]
        local_dim: usize,
    },
    #[serde(rename = "x")]
    X {
        diagonal: Vec<f64>,
        antidiagonal: Vec<[f64; 2]>,
    },
}

fn default_local_dim() -> usize {
    2
}

impl FamilyParams {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Argument(format!("family parameters: {e}")))
    }

    pub fn build(&self) -> Result<StateFile> {
        Ok(match self {
            Self::I { lambda } => StateFile::Pure(family_i_state(lambda)?),
            Self::II { lambda } => StateFile::Pure(family_ii_state(lambda)?),
            Self::Ghz { lambda, local_dim } => StateFile::Pure(generalized_ghz(lambda, *local_dim)?),
            Self::X {
                diagonal,
                antidiagonal,
            } => {
                let diagonal: [f64; 16] = diagonal.as_slice().try_into().map_err(|_| {
                    Error::Argument(format!("X-state needs 16 diagonal entries, got {}", diagonal.len()))
                })?;
                let coh: Vec<Complex64> = antidiagonal.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let antidiagonal: [Complex64; 8] = coh.as_slice().try_into().map_err(|_| {
                    Error::Argument(format!("X-state needs 8 coherences, got {}", coh.len()))
                })?;
                StateFile::Mixed(x_state_four_qubit(&XStateParams {
                    diagonal,
                    antidiagonal,
                })?)
            }
        })
    }
}

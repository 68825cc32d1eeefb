//! Entanglement functionals.
//!
//! All values are in ebits. Pure-state entanglement is the entropy of either
//! reduction; the two-qubit entanglement of formation uses the concurrence
//! closed form; general mixed states get a numerical convex-roof upper bound
//! from [`convex_roof_eof_upper`].

mod convex_roof;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qstate::{self, Bipartition, DensityMatrix, PureState, SubsystemLayout};
use crate::tol;

pub use convex_roof::{
    convex_roof_eof_upper, ConvexRoofConfig, ConvexRoofResult, EnsembleDecomposition,
};

/// `h(x) = -x log₂ x - (1-x) log₂(1-x)`, exactly 0 at both endpoints.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Entropy of entanglement of a pure state across `cut`.
pub fn pure_state_eof(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    let m = psi.amplitude_matrix(cut)?;
    // The smaller Gram matrix has the same nonzero spectrum as either reduction.
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.adjoint())
    } else {
        m.adjoint().matmul(&m)
    };
    qstate::spectrum_entropy(&linalg::hermitian_eigenvalues(&gram)?)
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.layout().dims() != [2, 2] {
        return Err(Error::Argument(format!(
            "expected a two-qubit state, got subsystem dimensions {:?}",
            rho.layout().dims()
        )));
    }
    Ok(())
}

/// `σ_y ⊗ σ_y`.
fn spin_flip() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 0.0, 0.0],
    ])
}

/// Wootters concurrence `max(0, μ₁ - μ₂ - μ₃ - μ₄)`.
///
/// The `μ` are the singular values of `√ρ (σ_y⊗σ_y) √ρ̄`, which equal the
/// square roots of the eigenvalues of `ρ ρ̃` without leaving Hermitian
/// solvers. Eigenvalues of `ρ` at or below the rank cutoff are dropped from
/// `√ρ`, so round-off in a pure state does not leak into `μ₂..μ₄`.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let eig = linalg::hermitian_eigensystem(rho.matrix())?;
    if let Some(&bad) = eig.values.iter().find(|&&e| e < tol::NEGATIVE_EIGENVALUE) {
        return Err(Error::InvalidState(format!("negative eigenvalue {bad:e}")));
    }
    let sqrt_rho = eig.map_spectrum(|e| if e > tol::RANK_CUTOFF { e.sqrt() } else { 0.0 });
    let product = sqrt_rho.matmul(&spin_flip()).matmul(&sqrt_rho.conj());
    let mu = linalg::svd(&product).singular_values;
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

/// Entanglement of formation from a concurrence value.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

/// Exact two-qubit entanglement of formation.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    concurrence_two_qubit(rho).map(eof_from_concurrence)
}

/// `(‖ρ^{T_X}‖₁ - 1) / 2`, computed as the sum of `|e|` over negative
/// eigenvalues of the partial transpose on side X.
pub fn negativity(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    cut.check_layout(rho.layout())?;
    let labels: Vec<&str> = cut
        .side_x()
        .iter()
        .map(|&k| rho.layout().parts()[k].label.as_str())
        .collect();
    let pt = qstate::partial_transpose(rho, &labels)?;
    let neg: f64 = linalg::hermitian_eigenvalues(&pt)?
        .iter()
        .filter(|&&e| e < 0.0)
        .map(|e| -e)
        .sum();
    Ok(neg)
}

/// Labels of the two bipartite pairs `(A1, B1)` and `(A2, B2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairLabels {
    pub a1: String,
    pub b1: String,
    pub a2: String,
    pub b2: String,
}

impl Default for PairLabels {
    fn default() -> Self {
        Self {
            a1: "A1".into(),
            b1: "B1".into(),
            a2: "A2".into(),
            b2: "B2".into(),
        }
    }
}

impl PairLabels {
    pub fn first(&self) -> [&str; 2] {
        [&self.a1, &self.b1]
    }

    pub fn second(&self) -> [&str; 2] {
        [&self.a2, &self.b2]
    }

    fn check(&self, layout: &SubsystemLayout) -> Result<()> {
        let all = [&self.a1, &self.b1, &self.a2, &self.b2];
        if layout.len() != 4 {
            return Err(Error::Argument(format!(
                "expected a four-party state, got {} subsystems",
                layout.len()
            )));
        }
        layout.positions(&all)?;
        Ok(())
    }
}

/// `R(χ)` together with the degeneracy flag of the Schmidt split it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RQuantity {
    pub value: f64,
    /// Degenerate Schmidt coefficients: the partners are not unique and
    /// `value` refers to the particular decomposition returned.
    pub degenerate: bool,
}

/// `R(χ) = Σ_i λ_i [E(ψ_i) + E(φ_i)]` over the Schmidt decomposition of `χ`
/// across the pair cut `A1B1 | A2B2`, with `E(ψ_i)` taken across `A1|B1` and
/// `E(φ_i)` across `A2|B2`.
pub fn r_quantity_detailed(psi: &PureState, pairs: &PairLabels) -> Result<RQuantity> {
    pairs.check(psi.layout())?;
    let cut = Bipartition::new(psi.layout(), &pairs.first())?;
    let schmidt = qstate::schmidt_decompose(psi, &cut)?;
    let mut value = 0.0;
    for ((&lambda, left), right) in schmidt
        .coefficients
        .iter()
        .zip(&schmidt.left_states)
        .zip(&schmidt.right_states)
    {
        let e1 = pure_state_eof(left, &Bipartition::new(left.layout(), &[pairs.a1.as_str()])?)?;
        let e2 = pure_state_eof(right, &Bipartition::new(right.layout(), &[pairs.a2.as_str()])?)?;
        value += lambda * (e1 + e2);
    }
    Ok(RQuantity {
        value,
        degenerate: schmidt.degenerate,
    })
}

pub fn r_quantity(psi: &PureState, pairs: &PairLabels) -> Result<f64> {
    r_quantity_detailed(psi, pairs).map(|r| r.value)
}

/// The three terms of `ΔE_F` and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaTerms {
    /// `E(χ)` across `A1A2 | B1B2`.
    pub global: f64,
    /// `E_F(ρ_{A1B1})`.
    pub first_pair: f64,
    /// `E_F(ρ_{A2B2})`.
    pub second_pair: f64,
    pub delta: f64,
}

/// Terms of `ΔE_F = E(χ) - E_F(ρ_{A1B1}) - E_F(ρ_{A2B2})` for a four-qubit
/// pure state, using the exact two-qubit formula for both pairs.
pub fn delta_ef_terms(psi: &PureState) -> Result<DeltaTerms> {
    let pairs = PairLabels::default();
    pairs.check(psi.layout())?;
    if psi.layout().dims() != [2, 2, 2, 2] {
        return Err(Error::Argument(
            "ΔE_F with the exact two-qubit formula needs four qubits; use delta_ef_upper".into(),
        ));
    }
    let cut = Bipartition::new(psi.layout(), &[pairs.a1.as_str(), pairs.a2.as_str()])?;
    let global = pure_state_eof(psi, &cut)?;
    let first_pair = eof_two_qubit(&psi.reduced(&pairs.first())?)?;
    let second_pair = eof_two_qubit(&psi.reduced(&pairs.second())?)?;
    Ok(DeltaTerms {
        global,
        first_pair,
        second_pair,
        delta: global - first_pair - second_pair,
    })
}

/// `ΔE_F` for a four-qubit pure state labeled `A1, B1, A2, B2`.
pub fn delta_ef(psi: &PureState) -> Result<f64> {
    delta_ef_terms(psi).map(|t| t.delta)
}

/// Which side of the true value a bound lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Lower,
    Upper,
}

/// `ΔE_F` estimated with convex-roof upper bounds for the pair terms.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaBound {
    pub terms: DeltaTerms,
    /// Subtracting upper bounds makes this a lower bound on `ΔE_F`.
    pub direction: BoundDirection,
    pub converged: bool,
}

/// `ΔE_F` for four-party pure states of any local dimension. The pair terms
/// come from [`convex_roof_eof_upper`], so the result is a LOWER bound on
/// the true gap.
pub fn delta_ef_upper(psi: &PureState, config: &ConvexRoofConfig) -> Result<DeltaBound> {
    let pairs = PairLabels::default();
    pairs.check(psi.layout())?;
    let cut = Bipartition::new(psi.layout(), &[pairs.a1.as_str(), pairs.a2.as_str()])?;
    let global = pure_state_eof(psi, &cut)?;
    let pair_eof = |labels: [&str; 2]| -> Result<(f64, bool)> {
        let rho = psi.reduced(&labels)?;
        let pair_cut = Bipartition::new(rho.layout(), &[labels[0]])?;
        let res = convex_roof_eof_upper(&rho, &pair_cut, config)?;
        Ok((res.value, res.converged))
    };
    let (first_pair, c1) = pair_eof(pairs.first())?;
    let (second_pair, c2) = pair_eof(pairs.second())?;
    Ok(DeltaBound {
        terms: DeltaTerms {
            global,
            first_pair,
            second_pair,
            delta: global - first_pair - second_pair,
        },
        direction: BoundDirection::Lower,
        converged: c1 && c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::qstate::density_of;
    use crate::sampling::{haar_random_pure, RngStream};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ab() -> SubsystemLayout {
        SubsystemLayout::qubits(&["A", "B"]).unwrap()
    }

    fn bell(sign: f64, odd: bool) -> PureState {
        let h = 0.5f64.sqrt();
        let amps = if odd {
            vec![c(0.0), c(h), c(sign * h), c(0.0)]
        } else {
            vec![c(h), c(0.0), c(0.0), c(sign * h)]
        };
        PureState::new(ab(), amps).unwrap()
    }

    fn four() -> SubsystemLayout {
        SubsystemLayout::four_party([2, 2, 2, 2]).unwrap()
    }

    fn counterexample() -> PureState {
        let a = 1.0 / 6f64.sqrt();
        let mut amps = vec![c(0.0); 16];
        for idx in [0b0001, 0b1110, 0b0100, 0b0111, 0b1000, 0b1011] {
            amps[idx] = c(a);
        }
        PureState::new(four(), amps).unwrap()
    }

    fn cut_a(l: &SubsystemLayout) -> Bipartition {
        Bipartition::new(l, &["A"]).unwrap()
    }

    /// Two-qubit X-state with the given populations and the single coherence
    /// `⟨01|ρ|10⟩` (and optionally `⟨00|ρ|11⟩`).
    fn two_qubit_x_state(pops: [f64; 4], inner: Complex64, outer: Complex64) -> Result<DensityMatrix> {
        let mut m = ComplexMatrix::from_real_diag(&pops);
        m[(1, 2)] = inner;
        m[(2, 1)] = inner.conj();
        m[(0, 3)] = outer;
        m[(3, 0)] = outer.conj();
        DensityMatrix::new(SubsystemLayout::qubits(&["A", "B"])?, m)
    }

    /// X-state concurrence oracle: 2·max(0, |ρ₁₂| - √(ρ₀₀ρ₃₃), |ρ₀₃| - √(ρ₁₁ρ₂₂)).
    fn x_state_concurrence(pops: [f64; 4], inner: f64, outer: f64) -> f64 {
        2.0 * (inner.abs() - (pops[0] * pops[3]).sqrt())
            .max(outer.abs() - (pops[1] * pops[2]).sqrt())
            .max(0.0)
    }

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_eof_examples() {
        let phi = bell(1.0, false);
        assert!((pure_state_eof(&phi, &cut_a(phi.layout())).unwrap() - 1.0).abs() < 1e-12);
        let prod = PureState::basis(ab(), 2).unwrap();
        assert!(pure_state_eof(&prod, &cut_a(&ab())).unwrap().abs() < 1e-12);
        let chi = counterexample();
        let cut = Bipartition::new(chi.layout(), &["A1", "A2"]).unwrap();
        let e = pure_state_eof(&chi, &cut).unwrap();
        assert!((e - 1.25163).abs() < 1e-5, "{e}");
        let e_swapped = pure_state_eof(&chi, &cut.swapped()).unwrap();
        assert!((e - e_swapped).abs() < 1e-9);
    }

    #[test]
    fn pure_eof_matches_reduced_entropy() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        for i in 0..20 {
            let psi = haar_random_pure(&l, &mut RngStream::new(31, i));
            let cut = Bipartition::new(&l, &["B"]).unwrap();
            let via_trace =
                qstate::von_neumann_entropy(&qstate::partial_trace(&density_of(&psi), &["B"]).unwrap()).unwrap();
            assert!((pure_state_eof(&psi, &cut).unwrap() - via_trace).abs() < 1e-10);
        }
    }

    #[test]
    fn concurrence_examples() {
        let phi = density_of(&bell(1.0, false));
        assert!((concurrence_two_qubit(&phi).unwrap() - 1.0).abs() < 1e-12);
        let classical = two_qubit_x_state([0.5, 0.0, 0.0, 0.5], c(0.0), c(0.0)).unwrap();
        assert!(concurrence_two_qubit(&classical).unwrap().abs() < 1e-12);
        // (2/3)|ψ+⟩⟨ψ+| + (1/6)|00⟩⟨00| + (1/6)|11⟩⟨11|
        let pops = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
        let rho = two_qubit_x_state(pops, c(1.0 / 3.0), c(0.0)).unwrap();
        let oracle = x_state_concurrence(pops, 1.0 / 3.0, 0.0);
        assert!((oracle - 1.0 / 3.0).abs() < 1e-15);
        assert!((concurrence_two_qubit(&rho).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn concurrence_matches_x_state_oracle() {
        let mut rng = RngStream::new(77, 0);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
            let t: f64 = raw.iter().sum();
            let pops = [raw[0] / t, raw[1] / t, raw[2] / t, raw[3] / t];
            let inner = rng.next_f64() * (pops[1] * pops[2]).sqrt();
            let outer = rng.next_f64() * (pops[0] * pops[3]).sqrt();
            let phase = Complex64::from_polar(1.0, rng.next_f64() * 6.0);
            let rho = two_qubit_x_state(pops, phase * inner, phase.conj() * outer).unwrap();
            let got = concurrence_two_qubit(&rho).unwrap();
            assert!((got - x_state_concurrence(pops, inner, outer)).abs() < 1e-9);
        }
    }

    #[test]
    fn concurrence_rejects_wrong_dimension() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        assert!(concurrence_two_qubit(&DensityMatrix::maximally_mixed(l.clone())).is_err());
        assert!(eof_two_qubit(&DensityMatrix::maximally_mixed(l)).is_err());
    }

    #[test]
    fn eof_from_concurrence_endpoints_and_monotonicity() {
        assert!((eof_from_concurrence(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(eof_from_concurrence(0.0), 0.0);
        // 100 random X-states sorted by concurrence give nondecreasing EoF.
        let mut rng = RngStream::new(5, 5);
        let mut pts: Vec<(f64, f64)> = (0..100)
            .map(|_| {
                let a = rng.next_f64();
                let pops = [0.5 * (1.0 - a), 0.5 * a, 0.5 * a, 0.5 * (1.0 - a)];
                let rho = two_qubit_x_state(pops, c(rng.next_f64() * 0.5 * a), c(0.0)).unwrap();
                (concurrence_two_qubit(&rho).unwrap(), eof_two_qubit(&rho).unwrap())
            })
            .collect();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        assert!(pts.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-15));
    }

    #[test]
    fn counterexample_pair_eofs() {
        let chi = counterexample();
        let t = delta_ef_terms(&chi).unwrap();
        assert!((t.first_pair + t.second_pair - 0.374597).abs() < 1e-5, "{t:?}");
        assert!((t.delta - 0.877033).abs() < 2e-5, "{t:?}");
    }

    #[test]
    fn negativity_examples() {
        let phi = density_of(&bell(1.0, false));
        assert!((negativity(&phi, &cut_a(&ab())).unwrap() - 0.5).abs() < 1e-12);
        let prod = density_of(&PureState::basis(ab(), 1).unwrap());
        assert_eq!(negativity(&prod, &cut_a(&ab())).unwrap(), 0.0);
    }

    #[test]
    fn r_quantity_examples() {
        let pairs = PairLabels::default();
        let phi1 = bell(1.0, false).relabel(SubsystemLayout::qubits(&["A1", "B1"]).unwrap()).unwrap();
        let phi2 = bell(1.0, false).relabel(SubsystemLayout::qubits(&["A2", "B2"]).unwrap()).unwrap();
        let bells = phi1.tensor(&phi2).unwrap();
        assert!((r_quantity(&bells, &pairs).unwrap() - 2.0).abs() < 1e-12);

        let r = r_quantity_detailed(&counterexample(), &pairs).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-9, "{r:?}");
        assert!(r.degenerate);

        let product = PureState::basis(four(), 5).unwrap();
        assert!(r_quantity(&product, &pairs).unwrap().abs() < 1e-12);

        let wrong = PureState::basis(SubsystemLayout::qubits(&["A1", "B1", "A2"]).unwrap(), 0).unwrap();
        assert!(r_quantity(&wrong, &pairs).is_err());
    }

    #[test]
    fn delta_examples() {
        let phi1 = bell(1.0, false).relabel(SubsystemLayout::qubits(&["A1", "B1"]).unwrap()).unwrap();
        let phi2 = bell(1.0, false).relabel(SubsystemLayout::qubits(&["A2", "B2"]).unwrap()).unwrap();
        assert!(delta_ef(&phi1.tensor(&phi2).unwrap()).unwrap().abs() < 1e-10);

        let h = 0.5f64.sqrt();
        let mut amps = vec![c(0.0); 16];
        amps[0] = c(h);
        amps[15] = c(h);
        let ghz = PureState::new(four(), amps).unwrap();
        assert!((delta_ef(&ghz).unwrap() - 1.0).abs() < 1e-10);

        let qutrits = SubsystemLayout::four_party([3, 2, 2, 2]).unwrap();
        assert!(delta_ef(&PureState::basis(qutrits, 0).unwrap()).is_err());
    }

    #[test]
    fn delta_is_label_order_independent() {
        let psi = haar_random_pure(&four(), &mut RngStream::new(2, 2));
        let shuffled = psi.reorder(&["B2", "A1", "A2", "B1"]).unwrap();
        assert!((delta_ef(&psi).unwrap() - delta_ef(&shuffled).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn delta_upper_is_a_lower_bound_on_delta() {
        let psi = haar_random_pure(&four(), &mut RngStream::new(3, 1));
        let exact = delta_ef(&psi).unwrap();
        let cfg = ConvexRoofConfig {
            restarts: 4,
            ..ConvexRoofConfig::default()
        };
        let b = delta_ef_upper(&psi, &cfg).unwrap();
        assert_eq!(b.direction, BoundDirection::Lower);
        assert!(b.terms.delta <= exact + 1e-9);
        assert!(b.terms.delta >= exact - 1e-2, "{} vs {exact}", b.terms.delta);
    }

    #[test]
    fn wootters_equals_entropy_on_pure_states() {
        for i in 0..200 {
            let psi = haar_random_pure(&ab(), &mut RngStream::new(10, i));
            let w = eof_two_qubit(&density_of(&psi)).unwrap();
            let e = pure_state_eof(&psi, &cut_a(&ab())).unwrap();
            assert!((w - e).abs() < 1e-10, "{w} vs {e}");
        }
    }
}

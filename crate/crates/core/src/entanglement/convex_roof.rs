//! Numerical convex-roof upper bound on the entanglement of formation.
//!
//! Every pure-state ensemble of `ρ = Σ_j q_j |e_j⟩⟨e_j|` with `K` members is
//! `|ψ̃_i⟩ = Σ_j V_ij √q_j |e_j⟩` for an isometry `V` (`K × rank`). We keep the
//! unnormalized members directly and move on the unitary group acting on
//! the member index: each iteration estimates the gradient along the
//! `K(K-1)` off-diagonal anti-Hermitian generators by central differences,
//! steps with `exp(-η Σ g_k G_k)` and backtracks by halving `η` until the
//! Armijo condition holds. Any ensemble found is a valid decomposition, so
//! the value is always an upper bound on `E_F(ρ)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qstate::{Bipartition, DensityMatrix, PureState};
use crate::sampling::{haar_random_unitary, RngStream};
use crate::tol;

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexRoofConfig {
    /// Number of ensemble members; `None` means twice the rank.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the objective by less than this.
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for ConvexRoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 20,
            max_iterations: 2000,
            step_tolerance: 1e-10,
            seed: 0,
        }
    }
}

/// Weighted pure states reproducing a density matrix.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleDecomposition {
    pub probabilities: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<PureState>,
}

impl EnsembleDecomposition {
    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn density(&self) -> ComplexMatrix {
        let n = self.states[0].amplitudes().len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (&p, s) in self.probabilities.iter().zip(&self.states) {
            let a = s.amplitudes();
            for i in 0..n {
                let ai = a[i] * p;
                for j in 0..n {
                    m[(i, j)] += ai * a[j].conj();
                }
            }
        }
        m
    }

    /// `Σ p_i E(ψ_i)` across `cut`.
    pub fn average_entanglement(&self, cut: &Bipartition) -> Result<f64> {
        let mut total = 0.0;
        for (&p, s) in self.probabilities.iter().zip(&self.states) {
            total += p * super::pure_state_eof(s, cut)?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexRoofResult {
    /// Upper bound on `E_F(ρ)` in ebits.
    pub value: f64,
    pub ensemble: EnsembleDecomposition,
    /// The winning restart stopped on the step tolerance rather than the
    /// iteration cap.
    pub converged: bool,
    pub iterations_used: usize,
}

/// Minimizes `Σ p_i E(ψ_i)` over ensembles of `rho` across `cut`.
pub fn convex_roof_eof_upper(
    rho: &DensityMatrix,
    cut: &Bipartition,
    config: &ConvexRoofConfig,
) -> Result<ConvexRoofResult> {
    cut.check_layout(rho.layout())?;
    if config.restarts == 0 {
        return Err(Error::Argument("at least one restart is required".into()));
    }
    let eig = linalg::hermitian_eigensystem(rho.matrix())?;
    let layout = rho.layout();
    let dx: usize = cut.side_x().iter().map(|&k| layout.parts()[k].dim).product();
    let dy = layout.total_dim() / dx;
    // Eigenvectors are stored in cut order (side X major) for the objective.
    let map = layout.permutation(&cut.order());

    let support: Vec<Vec<Complex64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &q)| q > tol::RANK_CUTOFF)
        .map(|(k, &q)| {
            let v = eig.vector(k);
            map.iter().map(|&old| v[old] * q.sqrt()).collect()
        })
        .collect();
    let rank = support.len();
    let members = config.ensemble_size.unwrap_or(2 * rank);
    if members < rank {
        return Err(Error::Argument(format!(
            "ensemble size {members} is below the rank {rank} of the state"
        )));
    }

    let problem = Problem {
        dx,
        dy,
        members,
        support,
    };
    let runs: Vec<Run> = (0..config.restarts)
        .into_par_iter()
        .map(|r| problem.descend(r, config))
        .collect::<Result<_>>()?;
    // Lowest value wins; ties go to the lowest restart index.
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("restarts >= 1");

    // Back to the layout order and normalized members.
    let mut probabilities = Vec::new();
    let mut states = Vec::new();
    for m in &best.members {
        let p: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if p <= f64::EPSILON * 1e-2 {
            continue;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); m.len()];
        for (new, &old) in map.iter().enumerate() {
            amps[old] = m[new];
        }
        probabilities.push(p);
        states.push(PureState::normalized(layout.clone(), amps)?);
    }
    let total: f64 = probabilities.iter().sum();
    for p in &mut probabilities {
        *p /= total;
    }
    Ok(ConvexRoofResult {
        value: best.value.max(0.0),
        ensemble: EnsembleDecomposition {
            probabilities,
            states,
        },
        converged: best.converged,
        iterations_used: best.iterations,
    })
}

struct Problem {
    dx: usize,
    dy: usize,
    members: usize,
    /// `√q_j |e_j⟩` in cut order.
    support: Vec<Vec<Complex64>>,
}

struct Run {
    value: f64,
    members: Vec<Vec<Complex64>>,
    converged: bool,
    iterations: usize,
}

/// Generator kinds on a member pair `(p, q)`.
#[derive(Clone, Copy)]
enum Kind {
    /// `[[c, -s], [s, c]]`
    Real,
    /// `[[c, is], [is, c]]`
    Imag,
}

impl Problem {
    fn start(&self, restart: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
        let rank = self.support.len();
        let len = self.dx * self.dy;
        let mut isometry = ComplexMatrix::zeros(self.members, rank);
        if restart == 0 {
            // The eigen-ensemble, padded with empty members.
            for j in 0..rank {
                isometry[(j, j)] = Complex64::new(1.0, 0.0);
            }
        } else if self.members >= 2 {
            let u = haar_random_unitary(self.members, &mut RngStream::new(seed, restart as u64))?;
            for i in 0..self.members {
                for j in 0..rank {
                    isometry[(i, j)] = u[(i, j)];
                }
            }
        } else {
            isometry[(0, 0)] = Complex64::new(1.0, 0.0);
        }
        Ok((0..self.members)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); len];
                for (j, e) in self.support.iter().enumerate() {
                    let w = isometry[(i, j)];
                    if w != Complex64::new(0.0, 0.0) {
                        for (x, &y) in v.iter_mut().zip(e) {
                            *x += w * y;
                        }
                    }
                }
                v
            })
            .collect())
    }

    fn objective(&self, members: &[Vec<Complex64>]) -> f64 {
        members.iter().map(|m| weighted_entropy(m, self.dx, self.dy)).sum()
    }

    fn pair_value(&self, a: &[Complex64], b: &[Complex64], kind: Kind, theta: f64, buf: &mut [Vec<Complex64>; 2]) -> f64 {
        rotate_pair(a, b, kind, theta, buf);
        weighted_entropy(&buf[0], self.dx, self.dy) + weighted_entropy(&buf[1], self.dx, self.dy)
    }

    fn descend(&self, restart: usize, config: &ConvexRoofConfig) -> Result<Run> {
        let mut members = self.start(restart, config.seed)?;
        let mut value = self.objective(&members);
        let k = self.members;
        if k < 2 || self.support.is_empty() {
            return Ok(Run {
                value,
                members,
                converged: true,
                iterations: 0,
            });
        }
        let len = self.dx * self.dy;
        let mut buf = [vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); len]];
        let h = tol::FD_STEP;
        let mut eta = 1.0;
        let mut converged = false;
        let mut iterations = 0;

        while iterations < config.max_iterations {
            iterations += 1;
            // Generator coefficients of the descent direction.
            let mut gen = ComplexMatrix::zeros(k, k);
            let mut grad_sq = 0.0;
            for p in 0..k {
                for q in p + 1..k {
                    for kind in [Kind::Real, Kind::Imag] {
                        let plus = self.pair_value(&members[p], &members[q], kind, h, &mut buf);
                        let minus = self.pair_value(&members[p], &members[q], kind, -h, &mut buf);
                        let g = (plus - minus) / (2.0 * h);
                        grad_sq += g * g;
                        // Anti-Hermitian generator of `kind`, scaled by -g.
                        match kind {
                            Kind::Real => {
                                gen[(p, q)] += Complex64::new(g, 0.0);
                                gen[(q, p)] += Complex64::new(-g, 0.0);
                            }
                            Kind::Imag => {
                                gen[(p, q)] += Complex64::new(0.0, -g);
                                gen[(q, p)] += Complex64::new(0.0, -g);
                            }
                        }
                    }
                }
            }
            if grad_sq == 0.0 {
                converged = true;
                break;
            }
            // exp(η·gen) = exp(i·H) with H = -iη·gen Hermitian.
            let mut accepted = None;
            for _ in 0..40 {
                let herm = gen.scale(Complex64::new(0.0, -eta));
                let step = linalg::exp_i_hermitian(&herm)?;
                let trial = apply_left(&step, &members);
                let trial_value = self.objective(&trial);
                if trial_value <= value - 1e-4 * eta * grad_sq {
                    accepted = Some((trial, trial_value));
                    break;
                }
                eta *= 0.5;
            }
            match accepted {
                Some((trial, trial_value)) => {
                    let gain = value - trial_value;
                    members = trial;
                    value = trial_value;
                    eta = (eta * 2.0).min(1e3);
                    if gain < config.step_tolerance {
                        converged = true;
                        break;
                    }
                }
                None => {
                    converged = true;
                    break;
                }
            }
        }
        Ok(Run {
            value,
            members,
            converged,
            iterations,
        })
    }
}

fn rotate_pair(a: &[Complex64], b: &[Complex64], kind: Kind, theta: f64, out: &mut [Vec<Complex64>; 2]) {
    let (s, c) = theta.sin_cos();
    let [x, y] = out;
    match kind {
        Kind::Real => {
            for i in 0..a.len() {
                x[i] = a[i] * c - b[i] * s;
                y[i] = a[i] * s + b[i] * c;
            }
        }
        Kind::Imag => {
            let is = Complex64::new(0.0, s);
            for i in 0..a.len() {
                x[i] = a[i] * c + b[i] * is;
                y[i] = a[i] * is + b[i] * c;
            }
        }
    }
}

fn apply_left(u: &ComplexMatrix, members: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let len = members[0].len();
    (0..u.rows())
        .map(|i| {
            let mut v = vec![Complex64::new(0.0, 0.0); len];
            for (j, m) in members.iter().enumerate() {
                let w = u[(i, j)];
                for (x, &y) in v.iter_mut().zip(m) {
                    *x += w * y;
                }
            }
            v
        })
        .collect()
}

/// `‖ψ̃‖² · E(ψ̃/‖ψ̃‖)` for an unnormalized member stored as a `dx × dy`
/// row-major matrix.
fn weighted_entropy(v: &[Complex64], dx: usize, dy: usize) -> f64 {
    let t: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if t <= 0.0 {
        return 0.0;
    }
    let spectrum: Vec<f64> = if dx.min(dy) == 2 {
        let (a, d, b) = if dx == 2 {
            let (r0, r1) = v.split_at(dy);
            let a: f64 = r0.iter().map(|z| z.norm_sqr()).sum();
            let b: Complex64 = r0.iter().zip(r1).map(|(x, y)| x * y.conj()).sum();
            (a, t - a, b)
        } else {
            let a: f64 = (0..dx).map(|i| v[i * 2].norm_sqr()).sum();
            let b: Complex64 = (0..dx).map(|i| v[i * 2] * v[i * 2 + 1].conj()).sum();
            (a, t - a, b)
        };
        let half = 0.5 * (a - d);
        let disc = (half * half + b.norm_sqr()).sqrt();
        let big = 0.5 * t + disc;
        // det / big avoids cancellation in the small eigenvalue.
        let small = ((a * d - b.norm_sqr()) / big).max(0.0);
        vec![big, small]
    } else {
        let m = ComplexMatrix::new(dx, dy, v.to_vec()).expect("member shape");
        let gram = if dx <= dy {
            m.matmul(&m.adjoint())
        } else {
            m.adjoint().matmul(&m)
        };
        linalg::hermitian_eigenvalues(&gram).expect("Gram matrix is Hermitian")
    };
    spectrum
        .into_iter()
        .filter(|&e| e > tol::ENTROPY_CUTOFF * t)
        .map(|e| -e * (e / t).log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{eof_two_qubit, pure_state_eof};
    use crate::qstate::{density_of, SubsystemLayout};
    use crate::sampling::haar_random_pure;

    fn ab() -> SubsystemLayout {
        SubsystemLayout::qubits(&["A", "B"]).unwrap()
    }

    fn random_mixed(layout: &SubsystemLayout, rank: usize, seed: u64) -> DensityMatrix {
        let mut rng = RngStream::new(seed, 1_000);
        let states: Vec<_> = (0..rank).map(|_| haar_random_pure(layout, &mut rng)).collect();
        let raw: Vec<f64> = (0..rank).map(|_| rng.next_f64() + 0.05).collect();
        let t: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / t).collect();
        DensityMatrix::mixture(&w, &states).unwrap()
    }

    fn check_ensemble(rho: &DensityMatrix, res: &ConvexRoofResult) {
        let e = &res.ensemble;
        assert!(e.probabilities.iter().all(|&p| p > 0.0));
        assert!((e.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(e.density().max_abs_diff(rho.matrix()) < 1e-7);
    }

    #[test]
    fn weighted_entropy_matches_exact_entropy() {
        for (dx, dy) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let l = SubsystemLayout::new([("X", dx), ("Y", dy)]).unwrap();
            let psi = haar_random_pure(&l, &mut RngStream::new(1, (dx * 10 + dy) as u64));
            let scaled: Vec<Complex64> = psi.amplitudes().iter().map(|z| z * 0.5).collect();
            let cut = Bipartition::new(&l, &["X"]).unwrap();
            let exact = pure_state_eof(&psi, &cut).unwrap();
            assert!((weighted_entropy(&scaled, dx, dy) - 0.25 * exact).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_input_gives_pure_state_entropy() {
        let psi = haar_random_pure(&ab(), &mut RngStream::new(4, 0));
        let rho = density_of(&psi);
        let cut = Bipartition::new(&ab(), &["A"]).unwrap();
        let res = convex_roof_eof_upper(&rho, &cut, &ConvexRoofConfig::default()).unwrap();
        assert!((res.value - pure_state_eof(&psi, &cut).unwrap()).abs() < 1e-9);
        check_ensemble(&rho, &res);
    }

    #[test]
    fn diagonal_state_is_unentangled() {
        let rho = DensityMatrix::new(ab(), ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let cut = Bipartition::new(&ab(), &["A"]).unwrap();
        let res = convex_roof_eof_upper(&rho, &cut, &ConvexRoofConfig::default()).unwrap();
        assert!(res.value.abs() < 1e-9);
        check_ensemble(&rho, &res);
    }

    #[test]
    fn rank_two_states_match_wootters() {
        let cut = Bipartition::new(&ab(), &["A"]).unwrap();
        for seed in 0..10 {
            let rho = random_mixed(&ab(), 2, seed);
            let exact = eof_two_qubit(&rho).unwrap();
            let res = convex_roof_eof_upper(&rho, &cut, &ConvexRoofConfig::default()).unwrap();
            assert!(res.value >= exact - 1e-9 && res.value <= exact + 5e-3, "{} vs {exact}", res.value);
            check_ensemble(&rho, &res);
        }
    }

    #[test]
    fn never_worse_than_the_eigen_ensemble() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        let cut = Bipartition::new(&l, &["A"]).unwrap();
        for seed in 0..5 {
            let rho = random_mixed(&l, 3, seed);
            let eig = linalg::hermitian_eigensystem(rho.matrix()).unwrap();
            let eigen_avg: f64 = eig
                .values
                .iter()
                .enumerate()
                .filter(|(_, &q)| q > 1e-12)
                .map(|(k, &q)| {
                    let psi = PureState::normalized(l.clone(), eig.vector(k)).unwrap();
                    q * pure_state_eof(&psi, &cut).unwrap()
                })
                .sum();
            let cfg = ConvexRoofConfig {
                restarts: 3,
                max_iterations: 300,
                ..Default::default()
            };
            let res = convex_roof_eof_upper(&rho, &cut, &cfg).unwrap();
            assert!(res.value <= eigen_avg + 1e-9);
            // Never above the entropy of the reduction on side X.
            let reduced = crate::qstate::partial_trace(&rho, &["A"]).unwrap();
            assert!(res.value <= crate::qstate::von_neumann_entropy(&reduced).unwrap() + 1e-6);
            check_ensemble(&rho, &res);
            assert!((res.ensemble.average_entanglement(&cut).unwrap() - res.value).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let rho = random_mixed(&ab(), 3, 8);
        let cut = Bipartition::new(&ab(), &["A"]).unwrap();
        let cfg = ConvexRoofConfig {
            restarts: 3,
            seed: 17,
            ..Default::default()
        };
        let a = convex_roof_eof_upper(&rho, &cut, &cfg).unwrap();
        let b = convex_roof_eof_upper(&rho, &cut, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations_used, b.iterations_used);
    }

    #[test]
    fn argument_errors() {
        let rho = random_mixed(&ab(), 3, 1);
        let cut = Bipartition::new(&ab(), &["A"]).unwrap();
        let small = ConvexRoofConfig {
            ensemble_size: Some(2),
            ..Default::default()
        };
        assert!(convex_roof_eof_upper(&rho, &cut, &small).is_err());
        let none = ConvexRoofConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(convex_roof_eof_upper(&rho, &cut, &none).is_err());
    }
}

//! Seeded random streams and Haar-distributed states.
//!
//! Every draw comes from an [`RngStream`], a ChaCha20 keystream whose key is
//! the little-endian seed padded with zeros and whose 64-bit stream number
//! is the stream id. Two streams with the same `(seed, stream_id)` therefore
//! produce the same draws regardless of which thread owns them.

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qstate::{PureState, SubsystemLayout};
use crate::tol;

/// Largest qubit count accepted by the Dicke-state generators.
pub const MAX_DICKE_QUBITS: usize = 8;

/// Deterministic random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian with independent `N(0, 1)` real and
    /// imaginary parts, by Box–Muller on two consecutive uniforms: the first
    /// sets the radius, the second the angle; cosine goes to the real part.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * u2)
    }

    /// Uniform integer in `0..n`.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        // Lemire-style rejection keeps the draw unbiased.
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}

/// Vector of independent standard complex Gaussians.
pub fn ginibre_vector(len: usize, rng: &mut RngStream) -> Vec<Complex64> {
    (0..len).map(|_| rng.next_complex_gaussian()).collect()
}

/// Uniformly distributed unit vector in `C^len`; redraws the (measure-zero)
/// zero vector.
pub fn haar_unit_vector(len: usize, rng: &mut RngStream) -> Vec<Complex64> {
    loop {
        let v = ginibre_vector(len, rng);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random pure state on `layout`.
pub fn haar_random_pure(layout: &SubsystemLayout, rng: &mut RngStream) -> PureState {
    let amps = haar_unit_vector(layout.total_dim(), rng);
    PureState::normalized(layout.clone(), amps).expect("unit vector of matching length")
}

/// Haar-random unitary of size `dim`, from the phase-fixed QR of a Ginibre
/// matrix. Rank-deficient draws are discarded.
pub fn haar_random_unitary(dim: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if !(2..=tol::MAX_DIM).contains(&dim) {
        return Err(Error::Argument(format!(
            "unitary dimension {dim} outside 2..={}",
            tol::MAX_DIM
        )));
    }
    loop {
        let g = ComplexMatrix::new(dim, dim, ginibre_vector(dim * dim, rng))?;
        match linalg::unitary_from_qr(&g) {
            Ok(u) => return Ok(u),
            Err(Error::RankDeficient) => continue,
            Err(e) => return Err(e),
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_DICKE_QUBITS {
        return Err(Error::Argument(format!(
            "qubit count {n_qubits} outside 1..={MAX_DICKE_QUBITS}"
        )));
    }
    Ok(())
}

/// Layout `q0, q1, …` of `n` qubits.
pub fn qubit_layout(n: usize) -> Result<SubsystemLayout> {
    SubsystemLayout::new((0..n).map(|i| (format!("q{i}"), 2)))
}

/// Dicke state `|D_n^k⟩` on qubits `q0 … q{n-1}`.
pub fn dicke_state(n_qubits: usize, excitations: usize) -> Result<PureState> {
    check_qubits(n_qubits)?;
    if excitations > n_qubits {
        return Err(Error::Argument(format!(
            "{excitations} excitations requested on {n_qubits} qubits"
        )));
    }
    let amp = Complex64::new(1.0 / (binomial(n_qubits, excitations) as f64).sqrt(), 0.0);
    let amps = (0..1usize << n_qubits)
        .map(|i| {
            if i.count_ones() as usize == excitations {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    PureState::new(qubit_layout(n_qubits)?, amps)
}

/// `Σ_k c_k |D_n^k⟩` with `c` uniform on the unit sphere of `C^{n+1}`.
pub fn haar_random_symmetric(n_qubits: usize, rng: &mut RngStream) -> Result<PureState> {
    check_qubits(n_qubits)?;
    let coeffs = haar_unit_vector(n_qubits + 1, rng);
    let norms: Vec<f64> = (0..=n_qubits)
        .map(|k| 1.0 / (binomial(n_qubits, k) as f64).sqrt())
        .collect();
    let amps = (0..1usize << n_qubits)
        .map(|i| {
            let k = i.count_ones() as usize;
            coeffs[k] * norms[k]
        })
        .collect();
    PureState::normalized(qubit_layout(n_qubits)?, amps)
}

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use eof_cli::{ExperimentConfig, SampleFamily};
use eof_core::entanglement::{self, ConvexRoofConfig};
use eof_core::families::{self, Verdict};
use eof_core::qstate::{self, StateFile};
use eof_core::sampling::{self, RngStream};
use eof_core::{Bipartition, Complex64, ComplexMatrix, DensityMatrix, PureState, SubsystemLayout};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn random_mixed(labels: &[&str], rank: usize, rng: &mut RngStream) -> DensityMatrix {
    let layout = SubsystemLayout::qubits(labels).unwrap();
    let n = layout.total_dim();
    let g = ComplexMatrix::new(n, rank, sampling::ginibre_vector(n * rank, rng)).unwrap();
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    DensityMatrix::new(layout, m.scale(Complex64::new(1.0 / t, 0.0))).unwrap()
}

fn random_weights(n: usize, rng: &mut RngStream) -> Vec<f64> {
    sampling::haar_unit_vector(n, rng).iter().map(|z| z.norm_sqr()).collect()
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let r = eof_cli::verify_counterexample().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((r.s_a1a2 - 1.25163).abs() <= 1e-4, || format!("S = {}", r.s_a1a2))?;
    ensure((r.r_chi - 4.0 / 3.0).abs() <= 1e-6, || format!("R = {}", r.r_chi))?;
    ensure((r.eof_sum - 0.374597).abs() <= 1e-4, || format!("EoF sum = {}", r.eof_sum))?;
    ensure((r.delta_ef - 0.877033).abs() <= 2e-4, || format!("ΔE_F = {}", r.delta_ef))?;
    within_time(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "S={:.6} R={:.6} eof_sum={:.6} delta={:.6} in {elapsed:.2?}",
        r.s_a1a2, r.r_chi, r.eof_sum, r.delta_ef
    ))
}

fn histogram_property(family: SampleFamily) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ExperimentConfig {
        samples: 10_000,
        workers: 1,
        ..ExperimentConfig::new(family, dir.path().join("hist.csv"))
    };
    let start = Instant::now();
    let h = eof_cli::run_delta_histogram(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(h.min_delta >= -1e-9, || format!("min ΔE_F = {:e}", h.min_delta))?;
    ensure(h.negative_count == 0, || format!("{} negative samples", h.negative_count))?;
    ensure(h.counts.iter().sum::<u64>() == 10_000, || "counts do not sum to samples".into())?;
    within_time(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "min={:e} max={:.6} negatives=0 in {elapsed:.2?}",
        h.min_delta, h.max_delta
    ))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

fn symmetric_histogram() -> Outcome {
    let summary = histogram_property(SampleFamily::SymmetricFourQubit)?;
    let labels = ["A1", "B1", "A2", "B2"];
    let perms = permutations(&[0, 1, 2, 3]);
    let mut worst = 0.0_f64;
    for i in 0..10_000 {
        let psi = sample_state_symmetric(i);
        for p in &perms {
            let order: Vec<&str> = p.iter().map(|&k| labels[k]).collect();
            let moved = psi.reorder(&order).unwrap();
            let diff = moved
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            worst = worst.max(diff);
        }
    }
    ensure(worst <= 1e-12, || format!("permutation deviation {worst:e}"))?;
    Ok(format!("{summary}; permutation deviation {worst:e}"))
}

fn sample_state_symmetric(i: u64) -> PureState {
    eof_cli::sample_state(SampleFamily::SymmetricFourQubit, 0, i)
}

fn wootters_pure() -> Outcome {
    let layout = SubsystemLayout::qubits(&["A", "B"]).unwrap();
    let cut = Bipartition::new(&layout, &["A"]).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let psi = sampling::haar_random_pure(&layout, &mut RngStream::new(4, i));
        let w = entanglement::eof_two_qubit(&qstate::density_of(&psi)).unwrap();
        let e = entanglement::pure_state_eof(&psi, &cut).unwrap();
        worst = worst.max((w - e).abs());
    }
    ensure(worst < 1e-10, || format!("max |Wootters - entropy| = {worst:e}"))?;
    Ok(format!("max |Wootters - entropy| = {worst:e}"))
}

fn convex_roof_oracle() -> Outcome {
    let config = ConvexRoofConfig::default();
    let start = Instant::now();
    let mut worst_low = 0.0_f64;
    let mut worst_high = 0.0_f64;
    for i in 0..200u64 {
        let rho = random_mixed(&["A", "B"], 1 + (i % 4) as usize, &mut RngStream::new(5, i));
        let cut = Bipartition::new(rho.layout(), &["A"]).unwrap();
        let w = entanglement::eof_two_qubit(&rho).unwrap();
        let roof = entanglement::convex_roof_eof_upper(&rho, &cut, &config).unwrap();
        let excess = roof.value - w;
        ensure(excess >= -1e-9, || format!("state {i}: roof {} below Wootters {w}", roof.value))?;
        ensure(excess <= 5e-3, || format!("state {i}: roof {} exceeds Wootters {w} by {excess:e}", roof.value))?;
        worst_low = worst_low.min(excess);
        worst_high = worst_high.max(excess);
    }
    let elapsed = start.elapsed();
    within_time(elapsed, Duration::from_secs(300))?;
    Ok(format!(
        "roof - Wootters in [{worst_low:e}, {worst_high:e}] in {elapsed:.2?}"
    ))
}

fn negativity_identity() -> Outcome {
    let mut worst = 0.0_f64;
    for i in 0..100u64 {
        let mut rng = RngStream::new(6, i);
        let rho = random_mixed(&["A1", "B1"], 1 + rng.next_below(4) as usize, &mut rng);
        let sigma = random_mixed(&["A2", "B2"], 1 + rng.next_below(4) as usize, &mut rng);
        let n_rho = entanglement::negativity(&rho, &Bipartition::new(rho.layout(), &["A1"]).unwrap()).unwrap();
        let n_sigma = entanglement::negativity(&sigma, &Bipartition::new(sigma.layout(), &["A2"]).unwrap()).unwrap();
        let joint = rho.tensor(&sigma).unwrap();
        let cut = Bipartition::new(joint.layout(), &["A1", "A2"]).unwrap();
        let n_joint = entanglement::negativity(&joint, &cut).unwrap();
        worst = worst.max((n_joint - (2.0 * n_rho * n_sigma + n_rho + n_sigma)).abs());
    }
    ensure(worst < 1e-9, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:e}"))
}

fn mixture(weights: &[f64], states: &[DensityMatrix]) -> DensityMatrix {
    let n = states[0].dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for (w, s) in weights.iter().zip(states) {
        m = &m + &s.matrix().scale(Complex64::new(*w, 0.0));
    }
    DensityMatrix::new(states[0].layout().clone(), m).unwrap()
}

fn strong_concavity() -> Outcome {
    let entropy = |r: &DensityMatrix| qstate::von_neumann_entropy(r).unwrap();
    let mut worst = f64::INFINITY;
    for i in 0..500u64 {
        let mut rng = RngStream::new(7, i);
        let terms = 1 + rng.next_below(4) as usize;
        let p = random_weights(terms, &mut rng);
        let first: Vec<_> = (0..terms)
            .map(|_| random_mixed(&["X"], 1 + rng.next_below(2) as usize, &mut rng))
            .collect();
        let second: Vec<_> = (0..terms)
            .map(|_| random_mixed(&["Y"], 1 + rng.next_below(2) as usize, &mut rng))
            .collect();
        let joint: Vec<_> = first.iter().zip(&second).map(|(a, b)| a.tensor(b).unwrap()).collect();
        let s_joint = entropy(&mixture(&p, &joint));
        let avg = |v: &[DensityMatrix]| -> f64 { p.iter().zip(v).map(|(w, r)| w * entropy(r)).sum() };
        let r1 = s_joint - avg(&first) - entropy(&mixture(&p, &second));
        let r2 = s_joint - entropy(&mixture(&p, &first)) - avg(&second);
        worst = worst.min(r1).min(r2);
    }
    ensure(worst >= -1e-9, || format!("min residual {worst:e}"))?;
    Ok(format!("min residual {worst:e}"))
}

fn pure_x_state(rng: &mut RngStream) -> PureState {
    let k = rng.next_below(8) as usize;
    let w = rng.next_f64();
    let phase = std::f64::consts::TAU * rng.next_f64();
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    amps[k] = Complex64::new(w.sqrt(), 0.0);
    amps[15 - k] = Complex64::from_polar((1.0 - w).sqrt(), phase);
    PureState::normalized(SubsystemLayout::four_party([2; 4]).unwrap(), amps).unwrap()
}

fn family_suites() -> Outcome {
    let mut worst = f64::INFINITY;
    for i in 0..500u64 {
        let mut rng = RngStream::new(8, i);
        let lambda: Vec<Vec<f64>> = random_weights(4, &mut rng).chunks(2).map(<[f64]>::to_vec).collect();

        let psi = families::family_i_state(&lambda).map_err(|e| e.to_string())?;
        worst = worst.min(entanglement::delta_ef(&psi).unwrap());

        let psi = families::family_ii_state(&lambda).map_err(|e| e.to_string())?;
        worst = worst.min(entanglement::delta_ef(&psi).unwrap());
        let c2 = families::check_condition2(&psi).unwrap();
        let c3 = families::check_condition3(&StateFile::Pure(psi)).unwrap();
        ensure(c2.verdict == Verdict::Satisfied, || format!("family (ii) draw {i}: condition 2 {:?}", c2.verdict))?;
        ensure(c3.verdict == Verdict::Satisfied, || format!("family (ii) draw {i}: condition 3 {:?}", c3.verdict))?;

        let ghz = families::generalized_ghz(&random_weights(2, &mut rng), 2).map_err(|e| e.to_string())?;
        worst = worst.min(entanglement::delta_ef(&ghz).unwrap());
        let x = pure_x_state(&mut rng);
        worst = worst.min(entanglement::delta_ef(&x).unwrap());
    }
    ensure(worst >= -1e-9, || format!("min ΔE_F = {worst:e}"))?;
    let ghz = families::generalized_ghz(&[0.5, 0.5], 2).unwrap();
    let d = entanglement::delta_ef(&ghz).unwrap();
    ensure((d - 1.0).abs() <= 1e-10, || format!("GHZ ΔE_F = {d}"))?;
    Ok(format!("min ΔE_F = {worst:e}; GHZ ΔE_F = {d}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |workers: usize, name: &str| -> Result<Vec<u8>, String> {
        let config = ExperimentConfig {
            samples: 2000,
            seed: 1234,
            workers,
            ..ExperimentConfig::new(SampleFamily::RandomFourQubit, dir.path().join(name))
        };
        eof_cli::run_delta_histogram(&config).map_err(|e| e.to_string())?;
        std::fs::read(&config.output_path).map_err(|e| e.to_string())
    };
    let one = run(1, "one.csv")?;
    let four = run(4, "four.csv")?;
    let seven = run(7, "seven.csv")?;
    ensure(one == four && one == seven, || "CSV differs across worker counts".into())?;
    Ok(format!("{} identical bytes for 1, 4 and 7 workers", one.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("counterexample reproduction", counterexample),
        ("random four-qubit ΔE_F >= 0", || histogram_property(SampleFamily::RandomFourQubit)),
        ("symmetric four-qubit ΔE_F >= 0", symmetric_histogram),
        ("Wootters on pure states", wootters_pure),
        ("convex roof vs Wootters", convex_roof_oracle),
        ("negativity of tensor products", negativity_identity),
        ("strong concavity", strong_concavity),
        ("family suites", family_suites),
        ("histogram determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

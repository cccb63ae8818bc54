//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured numbers before asserting.
//!
//! Tolerances on quantities carrying the physical `1e12` energy scale are
//! applied relative to that scale (f64 cannot represent `1e-10` absolute at
//! `1e12`); dimensionless and unit-scale checks use absolute tolerances.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entherm_cli::config::ExperimentConfig;
use entherm_cli::runner::{run_sweep_common, run_sweep_delta};
use entherm_core::dynamics::{
    analytic_state, numerical_lindblad_path, BathSpec, Setup, SetupParams,
};
use entherm_core::protocol::{free_energy, stage1_extract, stage2_thermalize};
use entherm_core::qstate::{
    kron, singlet_state, system_hamiltonian, ComplexSquareMatrix, DensityMatrix,
};
use entherm_core::thermo::{
    delta_internal_energy, ergotropy, ergotropy_double_sum, factorization_check,
    first_law_ledger, gap_report, locality_balance, SetupTriple,
};
use entherm_core::HamiltonianOperator;

const ALL_SETUPS: [Setup; 3] = [Setup::BothBaths, Setup::BathOnA, Setup::BathOnB];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_fn(dim, |_, _| random_complex(rng))
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexSquareMatrix {
    random_matrix(rng, dim).hermitian_part()
}

fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim);
    let gram = g.mul(&g.adjoint());
    let tr = gram.trace().re;
    DensityMatrix::new(gram.scale(Complex64::new(1.0 / tr, 0.0))).expect("gram state")
}

fn random_triple(rng: &mut impl Rng) -> SetupTriple {
    let omega_a = rng.gen_range(1.0e12..3.0e12);
    let omega_b = omega_a * rng.gen_range(0.3..0.9);
    let temp_a = rng.gen_range(20.0..900.0);
    let temp_b = rng.gen_range(20.0..900.0);
    let relax_a = 10f64.powf(rng.gen_range(6.0..8.0));
    let relax_b = relax_a * 10f64.powf(rng.gen_range(-0.7..0.7));
    let bath_a = BathSpec::with_relaxation_rate(temp_a, omega_a, relax_a).expect("bath");
    let bath_b = BathSpec::with_relaxation_rate(temp_b, omega_b, relax_b).expect("bath");
    SetupTriple::from_shared(omega_a, omega_b, bath_a, bath_b).expect("triple")
}

fn params_for(triple: &SetupTriple, setup: Setup) -> SetupParams {
    match setup {
        Setup::BothBaths => triple.both().clone(),
        Setup::BathOnA => triple.bath_on_a().clone(),
        Setup::BathOnB => triple.bath_on_b().clone(),
    }
}

/// The reference scenario triple: default configuration parameters.
fn reference_triple() -> SetupTriple {
    ExperimentConfig::default().triple().expect("default config")
}

struct OracleRun {
    worst_residual: f64,
    worst_hermiticity: f64,
    worst_trace: f64,
    worst_negativity: f64,
    samples: usize,
}

/// Shared driver for criteria 1 and 2: the 20-draw, 6-time, 3-setup grid.
fn oracle_grid() -> OracleRun {
    let mut rng = rng(0xacce9701);
    let mut run = OracleRun {
        worst_residual: 0.0,
        worst_hermiticity: 0.0,
        worst_trace: 0.0,
        worst_negativity: 0.0,
        samples: 0,
    };
    for _ in 0..20 {
        let triple = random_triple(&mut rng);
        for setup in ALL_SETUPS {
            let params = params_for(&triple, setup);
            let rates = params.rates().expect("rates");
            let slow = rates.min_active_relaxation().expect("active bath");
            let times: Vec<f64> =
                [0.0, 0.1, 0.5, 1.0, 2.0, 5.0].iter().map(|s| s / slow).collect();
            let dt = 0.005 / rates.max_relaxation();
            let numeric =
                numerical_lindblad_path(&params, &singlet_state(), &times, dt).expect("path");
            for (t, num) in times.iter().zip(numeric.iter()) {
                let closed = analytic_state(&params, *t).expect("closed form");
                run.worst_residual =
                    run.worst_residual.max(closed.matrix().max_abs_diff(num.matrix()));
                for state in [&closed, num] {
                    run.worst_hermiticity =
                        run.worst_hermiticity.max(state.matrix().hermiticity_residual());
                    run.worst_trace = run.worst_trace.max((state.trace() - 1.0).abs());
                    let min_eig =
                        state.populations_descending().last().copied().unwrap_or(0.0);
                    run.worst_negativity = run.worst_negativity.max((-min_eig).max(0.0));
                    run.samples += 1;
                }
            }
        }
    }
    run
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let run = oracle_grid();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = run.worst_residual < 1e-8 && elapsed < 10.0;
    println!(
        "[acceptance] criterion 1 (oracle equivalence): {} - max residual {:.3e} \
         (tol 1e-8) over {} states in {elapsed:.2} s (budget 10 s)",
        if pass { "PASS" } else { "FAIL" },
        run.worst_residual,
        run.samples / 2
    );
    assert!(run.worst_residual < 1e-8, "residual {:.3e}", run.worst_residual);
    assert!(elapsed < 10.0, "runtime {elapsed:.2} s exceeds 10 s");
}

#[test]
fn criterion_02_cptp_invariants() {
    let run = oracle_grid();
    let pass =
        run.worst_hermiticity < 1e-10 && run.worst_trace < 1e-10 && run.worst_negativity < 1e-8;
    println!(
        "[acceptance] criterion 2 (CPTP invariants): {} - hermiticity {:.3e} (tol 1e-10), \
         trace {:.3e} (tol 1e-10), negativity {:.3e} (tol 1e-8) over {} states",
        if pass { "PASS" } else { "FAIL" },
        run.worst_hermiticity,
        run.worst_trace,
        run.worst_negativity,
        run.samples
    );
    assert!(run.worst_hermiticity < 1e-10);
    assert!(run.worst_trace < 1e-10);
    assert!(run.worst_negativity < 1e-8);
}

#[test]
fn criterion_03_first_law_closure() {
    let mut rng = rng(0xacce9703);
    let mut worst = 0.0_f64;
    for setup in ALL_SETUPS {
        for _ in 0..100 {
            let triple = random_triple(&mut rng);
            let params = params_for(&triple, setup);
            let slow =
                params.rates().expect("rates").min_active_relaxation().expect("active");
            let t = rng.gen_range(0.0..6.0) / slow;
            let h = triple.hamiltonian().expect("H");
            let state = analytic_state(&params, t).expect("state");
            let ledger = first_law_ledger(&singlet_state(), &state, &h).expect("ledger");
            assert_eq!(ledger.adiabatic_work, 0.0);
            worst = worst.max(ledger.relative_closure_residual());
        }
    }
    let pass = worst < 1e-9;
    println!(
        "[acceptance] criterion 3 (first-law closure): {} - worst relative residual \
         {worst:.3e} (tol 1e-9) over 100 evolutions per setup",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(worst < 1e-9);
}

#[test]
fn criterion_04_energy_additivity() {
    let mut rng = rng(0xacce9704);
    let mut worst_additivity = 0.0_f64;
    let mut worst_closed = 0.0_f64;
    for _ in 0..20 {
        let triple = random_triple(&mut rng);
        let h = triple.hamiltonian().expect("H");
        let scale = 0.5 * (triple.omega_a() + triple.omega_b());
        let slow =
            triple.both().rates().expect("rates").min_active_relaxation().expect("active");
        let e0 = h.expectation(&singlet_state());
        for scaled in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
            let t = scaled / slow;
            let mut deltas = [0.0; 3];
            for (i, setup) in ALL_SETUPS.iter().enumerate() {
                let params = params_for(&triple, *setup);
                let state = analytic_state(&params, t).expect("state");
                deltas[i] = h.expectation(&state) - e0;
                let closed = delta_internal_energy(
                    *setup,
                    &params.rates().expect("rates"),
                    triple.omega_a(),
                    triple.omega_b(),
                    t,
                )
                .expect("closed");
                worst_closed = worst_closed.max((deltas[i] - closed).abs() / scale);
            }
            worst_additivity =
                worst_additivity.max((deltas[0] - deltas[1] - deltas[2]).abs() / scale);
        }
    }
    let pass = worst_additivity < 1e-10 && worst_closed < 1e-10;
    println!(
        "[acceptance] criterion 4 (energy additivity): {} - additivity {worst_additivity:.3e}, \
         closed-form agreement {worst_closed:.3e} (tol 1e-10, relative to the energy scale)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(worst_additivity < 1e-10);
    assert!(worst_closed < 1e-10);
}

#[test]
fn criterion_05_locality_gap_signature() {
    let config = ExperimentConfig::default();
    let triple = reference_triple();
    let signature_floor = 0.01 * 0.5 * (config.omega_a - config.omega_b);
    let tail_ceiling = 1e-3 * 0.5 * (config.omega_a + config.omega_b);

    let mut peak_violation = 0.0_f64;
    let mut tail: Vec<(f64, f64)> = Vec::new();
    for &t in &config.time_grid() {
        let report = gap_report(&triple, t).expect("gap report");
        peak_violation = peak_violation.max(report.gap_dw.abs());
        if report.concurrence < 1e-3 {
            tail.push((t, report.gap_w.abs()));
        }
    }
    let tail_end = tail.last().map(|(_, g)| *g).unwrap_or(f64::NAN);
    let exists = peak_violation > signature_floor;
    let tail_converges = !tail.is_empty() && tail_end < tail_ceiling;
    let pass = exists && tail_converges;
    println!(
        "[acceptance] criterion 5 (locality-gap signature): {} - peak |dW - dW_A - dW_B| = \
         {peak_violation:.3e} vs floor {signature_floor:.3e} ({}); tail |W - W_A - W_B| ends at \
         {tail_end:.4e} vs ceiling {tail_ceiling:.3e} ({}). Note: the tail limit is \
         (omega_a - omega_b)/(2 (2 nbar_b + 1)) = 6.365e9, the residual ergotropy of the \
         bath-on-B stationary state I/2 x thermal; it exceeds the stated ceiling for the \
         reference parameters regardless of the rate calibration.",
        if pass { "PASS" } else { "FAIL" },
        if exists { "met" } else { "not met" },
        if tail_converges { "met" } else { "not met" },
    );
    assert!(exists, "no sampled time violates the additivity hypothesis");
    assert!(
        tail_converges,
        "post-decoherence |W - W_A - W_B| = {tail_end:.4e} stays above the stated ceiling \
         {tail_ceiling:.3e}; see the printed analysis"
    );
}

#[test]
fn criterion_06_product_state_factorization() {
    let mut rng = rng(0xacce9706);
    let id = ComplexSquareMatrix::identity(2);
    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 2);
        let h = HamiltonianOperator::from_matrix(
            kron(&random_hermitian(&mut rng, 2), &id)
                .expect("kron")
                .add(&kron(&id, &random_hermitian(&mut rng, 2)).expect("kron")),
        )
        .expect("additive H");
        let check = factorization_check(&a, &b, &h).expect("factorization");
        worst = worst.max(check.difference.abs());
    }
    let pass = worst < 1e-10;
    println!(
        "[acceptance] criterion 6 (product-state factorization): {} - worst |W - W_A - W_B| \
         = {worst:.3e} (tol 1e-10) over 500 random product states",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(worst < 1e-10);
}

#[test]
fn criterion_07_temperature_trends() {
    // Common-temperature sweep: hotter baths destroy more ergotropy.
    let config = ExperimentConfig::default();
    let rows = run_sweep_common(&config).expect("common sweep");
    assert_eq!(rows.len(), 9);
    let mut strictly_decreasing = true;
    for pair in rows.windows(2) {
        if !(pair[1].dw < pair[0].dw) {
            strictly_decreasing = false;
        }
    }
    // Difference sweep at fixed mean: larger temperature difference, larger
    // peak violation of the additivity hypothesis.
    let blocks = run_sweep_delta(&config).expect("delta sweep");
    let peaks: Vec<f64> = blocks.iter().map(|b| b.peak_gap_dw).collect();
    let increasing = peaks.windows(2).all(|w| w[1] > w[0]);
    let pass = strictly_decreasing && increasing;
    println!(
        "[acceptance] criterion 7 (temperature trends): {} - dW strictly more negative over \
         100..900 K: {strictly_decreasing} (dW(100K)={:.3e}, dW(900K)={:.3e}); peak violation \
         increasing over dT {:?}: {increasing} (peaks {:?})",
        if pass { "PASS" } else { "FAIL" },
        rows.first().unwrap().dw,
        rows.last().unwrap().dw,
        blocks.iter().map(|b| b.delta_temp).collect::<Vec<_>>(),
        peaks
    );
    assert!(strictly_decreasing, "dW is not strictly decreasing with common T");
    assert!(increasing, "peak additivity violation does not grow with dT");
}

#[test]
fn criterion_08_ergotropy_oracle() {
    let mut rng = rng(0xacce9708);
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let dim = if i % 4 == 0 { 2 } else { 4 };
        let rho = random_density(&mut rng, dim);
        let h = HamiltonianOperator::from_matrix(random_hermitian(&mut rng, dim)).expect("H");
        let w1 = ergotropy(&rho, &h).expect("trace route");
        let w2 = ergotropy_double_sum(&rho, &h).expect("double sum");
        worst = worst.max((w1 - w2).abs());
    }
    let h = system_hamiltonian(2e12, 1e12).expect("H");
    let w_singlet = ergotropy(&singlet_state(), &h).expect("ergotropy");
    let singlet_err = (w_singlet - 1.5e12).abs();
    let pass = worst < 1e-10 && singlet_err < 1e-2;
    println!(
        "[acceptance] criterion 8 (ergotropy oracle): {} - route disagreement {worst:.3e} \
         (tol 1e-10, 1000 draws); singlet ergotropy {w_singlet:.6e} vs (omega_a+omega_b)/2 \
         (error {singlet_err:.3e})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(worst < 1e-10);
    assert!(singlet_err < 1e-2);
}

#[test]
fn criterion_09_protocol() {
    let start = Instant::now();
    let h = system_hamiltonian(2e12, 1e12).expect("H");
    let rho = singlet_state();
    let (pi, ledger) = stage1_extract(&rho, &h).expect("stage 1");

    let w = ergotropy(&rho, &h).expect("ergotropy");
    let stage1_rel = (ledger.mean_energy_gain - w).abs() / w;

    let mut df_rel = 0.0_f64;
    for temperature in [100.0, 300.0, 700.0] {
        let df = free_energy(&rho, &h, temperature).expect("F")
            - free_energy(pi.matrix(), &h, temperature).expect("F");
        df_rel = df_rel.max((df - ledger.mean_energy_gain).abs() / w);
    }

    let trace = stage2_thermalize(&pi, &h, 300.0, 10_000).expect("stage 2");
    let (mut heat, mut work) = (0.0, 0.0);
    for step in &trace.steps {
        heat += step.heat_from_bath;
        work += step.work_to_weight;
    }
    let audit = (trace.delta_system_energy - (heat - work)).abs()
        / trace.delta_system_energy.abs().max(1.0);
    let elapsed = start.elapsed().as_secs_f64();

    let pass = stage1_rel < 1e-10
        && df_rel < 1e-9
        && trace.achieved_distance < 1e-4
        && audit < 1e-9
        && elapsed < 5.0;
    println!(
        "[acceptance] criterion 9 (protocol): {} - stage-1 work vs ergotropy {stage1_rel:.3e} \
         (tol 1e-10), vs free-energy drop {df_rel:.3e} (tol 1e-9); stage-2 TV distance \
         {:.3e} (tol 1e-4) with energy audit {audit:.3e} (tol 1e-9); runtime {elapsed:.2} s \
         (budget 5 s)",
        if pass { "PASS" } else { "FAIL" },
        trace.achieved_distance
    );
    assert!(stage1_rel < 1e-10);
    assert!(df_rel < 1e-9);
    assert!(trace.achieved_distance < 1e-4);
    assert!(audit < 1e-9);
    assert!(elapsed < 5.0, "runtime {elapsed:.2} s exceeds 5 s");
}

#[test]
fn criterion_10_closed_form_sides_diagnostic() {
    // Informational by design: both sides of the additivity identity are
    // evaluated from states and compared against the compact closed forms;
    // deviations are reported, never gated.
    let triple = reference_triple();
    let t = 1e-7;
    let balance = locality_balance(&triple, t).expect("balance");
    let identity_residual = ((balance.state_lhs - balance.state_rhs) - balance.gap_dw).abs()
        / (0.5 * (triple.omega_a() + triple.omega_b()));
    let produced = balance.state_lhs.is_finite()
        && balance.state_rhs.is_finite()
        && balance.closed_form_lhs.is_some()
        && balance.closed_form_rhs.is_some();
    let pass = produced && identity_residual < 1e-9;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "n/a".into());
    println!(
        "[acceptance] criterion 10 (closed-form diagnostic at t=1e-7 s): {} - state lhs \
         {:.6e}, state rhs {:.6e}, compact lhs {}, compact rhs {}, deviations lhs {} rhs {} \
         (informational); identity residual {identity_residual:.3e}",
        if pass { "PASS" } else { "FAIL" },
        balance.state_lhs,
        balance.state_rhs,
        fmt(balance.closed_form_lhs),
        fmt(balance.closed_form_rhs),
        fmt(balance.closed_form_lhs.map(|v| v - balance.state_lhs)),
        fmt(balance.closed_form_rhs.map(|v| v - balance.state_rhs)),
    );
    assert!(produced, "both sides and both closed forms must be produced");
    assert!(identity_residual < 1e-9);
}

//! Shared fixtures for the benchmark targets.

use entherm_core::dynamics::BathSpec;
use entherm_core::thermo::SetupTriple;

/// The reference scenario: frequencies `2e12` / `1e12` 1/s, baths at 100 K
/// and 300 K, qubit A relaxing at `1e7` 1/s.
pub fn reference_triple() -> SetupTriple {
    let bath_a = BathSpec::with_relaxation_rate(100.0, 2e12, 1e7).expect("valid bath");
    let bath_b =
        BathSpec::new(300.0, bath_a.cutoff_ratio(), bath_a.coupling(), bath_a.dipole_sq())
            .expect("valid bath");
    SetupTriple::from_shared(2e12, 1e12, bath_a, bath_b).expect("consistent triple")
}

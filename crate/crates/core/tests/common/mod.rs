//! Shared random generators for the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entherm_core::dynamics::{BathSpec, Setup, SetupParams};
use entherm_core::qstate::ComplexSquareMatrix;
use entherm_core::thermo::SetupTriple;
use entherm_core::{DensityMatrix, HamiltonianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_fn(dim, |_, _| random_complex(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexSquareMatrix {
    random_matrix(rng, dim).hermitian_part()
}

pub fn random_hamiltonian(rng: &mut impl Rng, dim: usize) -> HamiltonianOperator {
    HamiltonianOperator::from_matrix(random_hermitian(rng, dim)).expect("hermitian by construction")
}

/// Full-rank random state via the Gram construction `G G† / tr`.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim);
    let gram = g.mul(&g.adjoint());
    let tr = gram.trace().re;
    DensityMatrix::new(gram.scale(Complex64::new(1.0 / tr, 0.0))).expect("gram state is valid")
}

/// Random single-qubit unitary from the eigenvectors of a random Hermitian.
pub fn random_unitary2(rng: &mut impl Rng) -> ComplexSquareMatrix {
    let h = random_hermitian(rng, 2);
    entherm_core::qstate::eigen_hermitian(&h).expect("hermitian").eigenvectors
}

/// Random physical parameter draw with a bounded spread between the two
/// relaxation rates so integrator runtimes stay uniform.
pub struct ParamDraw {
    pub triple: SetupTriple,
}

pub fn random_triple(rng: &mut impl Rng) -> ParamDraw {
    let omega_a = rng.gen_range(1.0e12..3.0e12);
    let omega_b = omega_a * rng.gen_range(0.3..0.9);
    let temp_a = rng.gen_range(20.0..900.0);
    let temp_b = rng.gen_range(20.0..900.0);
    let relax_a = 10f64.powf(rng.gen_range(6.0..8.0));
    let relax_b = relax_a * 10f64.powf(rng.gen_range(-0.7..0.7));
    let bath_a = BathSpec::with_relaxation_rate(temp_a, omega_a, relax_a).expect("valid bath");
    let bath_b = BathSpec::with_relaxation_rate(temp_b, omega_b, relax_b).expect("valid bath");
    ParamDraw {
        triple: SetupTriple::from_shared(omega_a, omega_b, bath_a, bath_b).expect("consistent"),
    }
}

pub fn params_for(triple: &SetupTriple, setup: Setup) -> SetupParams {
    match setup {
        Setup::BothBaths => triple.both().clone(),
        Setup::BathOnA => triple.bath_on_a().clone(),
        Setup::BathOnB => triple.bath_on_b().clone(),
    }
}

pub const ALL_SETUPS: [Setup; 3] = [Setup::BothBaths, Setup::BathOnA, Setup::BathOnB];

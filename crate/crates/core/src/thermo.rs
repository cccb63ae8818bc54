//! Operational first-law thermodynamics: passive states, ergotropy,
//! adiabatic work, operational heat, and the locality analysis of the
//! ergotropy gap between the combined and single-bath setups.
//!
//! The generic eigendecomposition route is authoritative everywhere. The
//! compact closed-form ergotropy expressions for X-shaped states are also
//! evaluated ([`xstate_closed_form_ergotropy`]) but only as reported
//! diagnostics; they are never used as ground truth.

use num_complex::Complex64;

use crate::constants::HBAR_OVER_KB;
use crate::dynamics::{analytic_state, eta_factors, RateSet, Setup, SetupParams};
use crate::error::{Error, Result};
use crate::qstate::{
    concurrence, kron, partial_trace, product_state, singlet_state,
    system_hamiltonian, ComplexSquareMatrix, DensityMatrix, HamiltonianOperator, Qubit,
};

/// Diagonal state with non-increasing populations on the ascending energy
/// eigenbasis of the Hamiltonian it was built against.
#[derive(Debug, Clone)]
pub struct PassiveState {
    matrix: DensityMatrix,
    populations: Vec<f64>,
}

impl PassiveState {
    pub fn matrix(&self) -> &DensityMatrix {
        &self.matrix
    }

    /// Populations aligned with the ascending energies, non-increasing.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// One evolution's first-law bookkeeping; closes as
/// `delta_e = delta_ergotropy + adiabatic_work + operational_heat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoLedger {
    pub delta_e: f64,
    pub delta_ergotropy: f64,
    pub adiabatic_work: f64,
    pub operational_heat: f64,
}

impl ThermoLedger {
    /// `delta_e - (delta_ergotropy + adiabatic_work + operational_heat)`.
    pub fn closure_residual(&self) -> f64 {
        self.delta_e - self.delta_ergotropy - self.adiabatic_work - self.operational_heat
    }

    /// Closure residual relative to the largest ledger entry.
    pub fn relative_closure_residual(&self) -> f64 {
        let scale = self
            .delta_e
            .abs()
            .max(self.delta_ergotropy.abs())
            .max(self.operational_heat.abs())
            .max(1e-300);
        self.closure_residual().abs() / scale
    }
}

/// Ergotropy gap between the two-bath run and the two single-bath runs at
/// one instant: `w` belongs to the both-baths setup, `w_a` to the bath-on-A
/// setup, `w_b` to the bath-on-B setup. Delta quantities are measured from
/// the shared singlet start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub t: f64,
    pub w: f64,
    pub w_a: f64,
    pub w_b: f64,
    pub dw: f64,
    pub dw_a: f64,
    pub dw_b: f64,
    /// `w - w_a - w_b`.
    pub gap_w: f64,
    /// `dw - dw_a - dw_b`.
    pub gap_dw: f64,
    /// Concurrence of the two-bath state.
    pub concurrence: f64,
}

fn check_dims(rho: &DensityMatrix, h: &HamiltonianOperator) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::Dimension { expected: h.dim(), got: rho.dim() });
    }
    Ok(())
}

/// `tr(pi H)` for the passive rearrangement of `rho`'s spectrum on `h`:
/// descending populations paired with ascending energies.
fn passive_energy(rho: &DensityMatrix, h: &HamiltonianOperator) -> f64 {
    rho.populations_descending()
        .iter()
        .zip(h.energies())
        .map(|(r, e)| r * e)
        .sum()
}

/// Passive state of `rho` with respect to `h`.
///
/// Ties in degenerate spectra are broken by stable index order on both
/// sides; `tr(pi H)` is unique regardless of the tie-break.
pub fn passive_state(rho: &DensityMatrix, h: &HamiltonianOperator) -> Result<PassiveState> {
    check_dims(rho, h)?;
    let populations = rho.populations_descending();
    let n = rho.dim();
    let vecs = h.eigenvectors();
    let matrix = ComplexSquareMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|k| vecs.at(r, k) * vecs.at(c, k).conj() * populations[k])
            .sum::<Complex64>()
    });
    Ok(PassiveState { matrix: DensityMatrix::new(matrix)?, populations })
}

/// Maximum unitary work extractable from `rho` against `h`:
/// `tr(rho H) - tr(pi H)`.
pub fn ergotropy(rho: &DensityMatrix, h: &HamiltonianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    Ok(h.expectation(rho) - passive_energy(rho, h))
}

/// Ergotropy via the explicit double sum over eigenpair overlaps
/// `sum_{m,n} r_m e_n (|<e_n|r_m>|^2 - delta_mn)`.
///
/// Exercised as a cross-check route against [`ergotropy`]; both must agree.
pub fn ergotropy_double_sum(rho: &DensityMatrix, h: &HamiltonianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    let n = rho.dim();
    let rho_dec = rho.spectral_decomposition();
    let h_vecs = h.eigenvectors();
    let energies = h.energies();
    let mut total = 0.0;
    for m in 0..n {
        for (en, &energy) in energies.iter().enumerate() {
            let overlap: Complex64 = (0..n)
                .map(|k| h_vecs.at(k, en).conj() * rho_dec.eigenvectors.at(k, m))
                .sum();
            let delta = if m == en { 1.0 } else { 0.0 };
            total += rho_dec.eigenvalues[m] * energy * (overlap.norm_sqr() - delta);
        }
    }
    Ok(total)
}

/// Energy change when a passive state's populations ride an adiabatic
/// Hamiltonian change `h -> h_final`: `tr(pi' H') - tr(pi H)`.
///
/// Returns exactly zero when the two Hamiltonians are identical. The input
/// must be passive with respect to `h`.
pub fn adiabatic_work(
    pi: &PassiveState,
    h: &HamiltonianOperator,
    h_final: &HamiltonianOperator,
) -> Result<f64> {
    check_dims(pi.matrix(), h)?;
    if h.dim() != h_final.dim() {
        return Err(Error::Dimension { expected: h.dim(), got: h_final.dim() });
    }
    let n = h.dim();
    // In the eigenbasis of h the input must be diagonal with non-increasing
    // populations.
    let vecs = h.eigenvectors();
    let in_basis = vecs.adjoint().mul(pi.matrix().matrix()).mul(vecs);
    let mut populations = Vec::with_capacity(n);
    for r in 0..n {
        for c in 0..n {
            if r != c && in_basis.at(r, c).norm() > 1e-10 {
                return Err(Error::validation(format!(
                    "state is not diagonal in the Hamiltonian eigenbasis \
                     (off-diagonal magnitude {:.3e})",
                    in_basis.at(r, c).norm()
                )));
            }
        }
        populations.push(in_basis.at(r, r).re);
    }
    if populations.windows(2).any(|w| w[1] > w[0] + 1e-12) {
        return Err(Error::validation(
            "populations increase with energy; state is not passive",
        ));
    }
    let before: f64 = populations.iter().zip(h.energies()).map(|(p, e)| p * e).sum();
    let after: f64 = populations.iter().zip(h_final.energies()).map(|(p, e)| p * e).sum();
    Ok(after - before)
}

/// `tr(rho H)`.
pub fn internal_energy(rho: &DensityMatrix, h: &HamiltonianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    Ok(h.expectation(rho))
}

/// Closed-form internal-energy change of the singlet relaxation for one
/// setup: the bath on qubit `i` contributes
/// `omega_i (eta_i - 1) / (2 (2 nbar_i + 1))`.
pub fn delta_internal_energy(
    setup: Setup,
    rates: &RateSet,
    omega_a: f64,
    omega_b: f64,
    t: f64,
) -> Result<f64> {
    let etas = eta_factors(rates, t)?;
    let term_a = omega_a * (etas.eta_a - 1.0) / (2.0 * (2.0 * rates.nbar_a() + 1.0));
    let term_b = omega_b * (etas.eta_b - 1.0) / (2.0 * (2.0 * rates.nbar_b() + 1.0));
    Ok(match setup {
        Setup::BothBaths => term_a + term_b,
        Setup::BathOnA => term_a,
        Setup::BathOnB => term_b,
    })
}

/// Heat-like term of the operational first law for a time-independent
/// Hamiltonian: `tr(pi_final H) - tr(pi_initial H)` with both passive-state
/// energies built from the respective states' spectra.
pub fn operational_heat(
    rho_initial: &DensityMatrix,
    rho_final: &DensityMatrix,
    h: &HamiltonianOperator,
) -> Result<f64> {
    check_dims(rho_initial, h)?;
    check_dims(rho_final, h)?;
    Ok(passive_energy(rho_final, h) - passive_energy(rho_initial, h))
}

/// Assemble the operational first-law ledger for an evolution under a
/// time-independent Hamiltonian (adiabatic work is identically zero).
pub fn first_law_ledger(
    rho_initial: &DensityMatrix,
    rho_final: &DensityMatrix,
    h: &HamiltonianOperator,
) -> Result<ThermoLedger> {
    check_dims(rho_initial, h)?;
    check_dims(rho_final, h)?;
    let e0 = h.expectation(rho_initial);
    let e1 = h.expectation(rho_final);
    let pe0 = passive_energy(rho_initial, h);
    let pe1 = passive_energy(rho_final, h);
    Ok(ThermoLedger {
        delta_e: e1 - e0,
        delta_ergotropy: (e1 - pe1) - (e0 - pe0),
        adiabatic_work: 0.0,
        operational_heat: pe1 - pe0,
    })
}

/// The three setups of one experiment sharing frequencies and bath specs.
#[derive(Debug, Clone)]
pub struct SetupTriple {
    both: SetupParams,
    bath_on_a: SetupParams,
    bath_on_b: SetupParams,
}

impl SetupTriple {
    /// Validates that the three parameter sets agree on the shared
    /// frequencies and bath specifications.
    pub fn new(both: SetupParams, bath_on_a: SetupParams, bath_on_b: SetupParams) -> Result<Self> {
        if both.setup() != Setup::BothBaths
            || bath_on_a.setup() != Setup::BathOnA
            || bath_on_b.setup() != Setup::BathOnB
        {
            return Err(Error::config("setup triple must be tagged (a, b, c) in order"));
        }
        let same_freqs = |p: &SetupParams| {
            p.omega_a() == both.omega_a() && p.omega_b() == both.omega_b()
        };
        if !same_freqs(&bath_on_a) || !same_freqs(&bath_on_b) {
            return Err(Error::config("setup triple members disagree on qubit frequencies"));
        }
        if bath_on_a.bath_a() != both.bath_a() {
            return Err(Error::config("bath on qubit A differs between setups a and b"));
        }
        if bath_on_b.bath_b() != both.bath_b() {
            return Err(Error::config("bath on qubit B differs between setups a and c"));
        }
        Ok(Self { both, bath_on_a, bath_on_b })
    }

    /// Build the triple from one shared parameter set.
    pub fn from_shared(
        omega_a: f64,
        omega_b: f64,
        bath_a: crate::dynamics::BathSpec,
        bath_b: crate::dynamics::BathSpec,
    ) -> Result<Self> {
        Self::new(
            SetupParams::new(Setup::BothBaths, omega_a, omega_b, Some(bath_a), Some(bath_b))?,
            SetupParams::new(Setup::BathOnA, omega_a, omega_b, Some(bath_a), None)?,
            SetupParams::new(Setup::BathOnB, omega_a, omega_b, None, Some(bath_b))?,
        )
    }

    pub fn omega_a(&self) -> f64 {
        self.both.omega_a()
    }

    pub fn omega_b(&self) -> f64 {
        self.both.omega_b()
    }

    pub fn both(&self) -> &SetupParams {
        &self.both
    }

    pub fn bath_on_a(&self) -> &SetupParams {
        &self.bath_on_a
    }

    pub fn bath_on_b(&self) -> &SetupParams {
        &self.bath_on_b
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianOperator> {
        system_hamiltonian(self.omega_a(), self.omega_b())
    }

    /// Closed-form states of the three setups at time `t`.
    pub fn states(&self, t: f64) -> Result<[DensityMatrix; 3]> {
        Ok([
            analytic_state(&self.both, t)?,
            analytic_state(&self.bath_on_a, t)?,
            analytic_state(&self.bath_on_b, t)?,
        ])
    }
}

/// Evaluate the ergotropy gap of the three setups at time `t`, with deltas
/// taken from the shared singlet start.
pub fn gap_report(triple: &SetupTriple, t: f64) -> Result<GapReport> {
    let h = triple.hamiltonian()?;
    let [state_both, state_a, state_b] = triple.states(t)?;
    let w0 = ergotropy(&singlet_state(), &h)?;
    let w = ergotropy(&state_both, &h)?;
    let w_a = ergotropy(&state_a, &h)?;
    let w_b = ergotropy(&state_b, &h)?;
    Ok(GapReport {
        t,
        w,
        w_a,
        w_b,
        dw: w - w0,
        dw_a: w_a - w0,
        dw_b: w_b - w0,
        gap_w: w - w_a - w_b,
        gap_dw: (w - w0) - (w_a - w0) - (w_b - w0),
        concurrence: concurrence(&state_both)?,
    })
}

/// Both sides of the rearranged locality hypothesis evaluated from states,
/// together with the compact closed-form estimates near the decoherence
/// time. The state-route values are authoritative; the closed forms are
/// reported for comparison and are undefined where their denominators
/// vanish (for example at `t = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalityBalance {
    pub t: f64,
    /// `w_a(0) + w_b(0) - w(0) + E_a(t) - E_b(t) - E_c(t)` from states.
    pub state_lhs: f64,
    /// `tr(pi_a H) - tr(pi_b H) - tr(pi_c H)` from states.
    pub state_rhs: f64,
    /// Closed-form estimate of the left side, where defined.
    pub closed_form_lhs: Option<f64>,
    /// Closed-form estimate of the right side, where defined.
    pub closed_form_rhs: Option<f64>,
    /// `dw - dw_a - dw_b` at `t`; equals `state_lhs - state_rhs`.
    pub gap_dw: f64,
}

/// Evaluate both sides of the locality identity at time `t`.
pub fn locality_balance(triple: &SetupTriple, t: f64) -> Result<LocalityBalance> {
    let h = triple.hamiltonian()?;
    let [state_both, state_a, state_b] = triple.states(t)?;
    let singlet = singlet_state();
    let w0 = ergotropy(&singlet, &h)?;

    let state_lhs = w0 // w_a(0) + w_b(0) - w(0); all three runs start from the singlet
        + h.expectation(&state_both)
        - h.expectation(&state_a)
        - h.expectation(&state_b);
    let state_rhs = passive_energy(&state_both, &h)
        - passive_energy(&state_a, &h)
        - passive_energy(&state_b, &h);

    let report = gap_report(triple, t)?;

    let rates = triple.both().rates()?;
    let etas = eta_factors(&rates, t)?;
    let (na, nb) = (rates.nbar_a(), rates.nbar_b());
    let (ea, eb, e) = (etas.eta_a, etas.eta_b, etas.eta);
    let g = 0.5 * (triple.omega_a() - triple.omega_b());

    let closed_form_lhs = Some(g * ((eb - 1.0) / (2.0 * nb + 1.0) - 1.0));
    let mix_denominator =
        2.0 * (nb - na) + (eb - ea) + 2.0 * (eb * na - ea * nb);
    let closed_form_rhs = if (ea - 1.0).abs() < 1e-14
        || (eb - 1.0).abs() < 1e-14
        || mix_denominator.abs() < 1e-14
    {
        None
    } else {
        Some(
            g * ((eb - 1.0) / (2.0 * nb + 1.0)
                + (2.0 * nb + 1.0) * 2.0 * eb / (eb - 1.0)
                + (2.0 * na + 1.0) * 2.0 * ea / (ea - 1.0)
                + (2.0 * na + 1.0) * (2.0 * nb + 1.0) * 2.0 * e / mix_denominator),
        )
    };

    Ok(LocalityBalance {
        t,
        state_lhs,
        state_rhs,
        closed_form_lhs,
        closed_form_rhs,
        gap_dw: report.gap_dw,
    })
}

/// Closed-form ergotropy of an X-shaped state compared against the generic
/// eigendecomposition route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormErgotropy {
    /// The compact expression; `None` where it is singular (zero coherence).
    pub reported: Option<f64>,
    /// The authoritative generic value.
    pub generic: f64,
}

impl ClosedFormErgotropy {
    pub fn deviation(&self) -> Option<f64> {
        self.reported.map(|r| r - self.generic)
    }
}

/// Evaluate the compact middle-block ergotropy expression for an X-shaped
/// state of the relaxation family, alongside the generic route.
///
/// The two-bath variant uses the gap factor
/// `((l33^2 - l22^2)^2 + 4 l23 l32)^(1/2)` as reported; the single-bath
/// variants use `((l33 - l22)^2 + 4 l23 l32)^(1/2)`. Results are
/// diagnostics only.
pub fn xstate_closed_form_ergotropy(
    setup: Setup,
    rho: &DensityMatrix,
    omega_a: f64,
    omega_b: f64,
) -> Result<ClosedFormErgotropy> {
    if rho.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: rho.dim() });
    }
    // Validate the X shape: only the diagonal and the middle-block
    // coherence may be populated.
    for r in 0..4 {
        for c in 0..4 {
            let allowed = r == c || (r == 1 && c == 2) || (r == 2 && c == 1);
            if !allowed && rho.at(r, c).norm() > 1e-12 {
                return Err(Error::domain(format!(
                    "state is not X-shaped: entry ({r},{c}) has magnitude {:.3e}",
                    rho.at(r, c).norm()
                )));
            }
        }
    }
    let l22 = rho.at(1, 1).re;
    let l33 = rho.at(2, 2).re;
    let l23 = rho.at(1, 2).re;
    let l32 = rho.at(2, 1).re;
    let g = 0.5 * (omega_a - omega_b);

    let gap_sq = match setup {
        Setup::BothBaths => {
            let q = l33 * l33 - l22 * l22;
            q * q + 4.0 * l23 * l32
        }
        Setup::BathOnA | Setup::BathOnB => {
            let q = l33 - l22;
            q * q + 4.0 * l23 * l32
        }
    };
    let reported = if l32.abs() < 1e-14 || gap_sq < 0.0 {
        None
    } else {
        let delta = gap_sq.sqrt();
        let alpha = (l22 - l33 - delta) / (2.0 * l32);
        let beta = (l22 - l33 + delta) / (2.0 * l32);
        Some(
            (l22 + l33 - delta) * g * (alpha * alpha / (1.0 + alpha * alpha))
                + (l22 + l33 + delta) * g * (-1.0 / (1.0 + beta * beta)),
        )
    };

    let h = system_hamiltonian(omega_a, omega_b)?;
    Ok(ClosedFormErgotropy { reported, generic: ergotropy(rho, &h)? })
}

/// Ergotropy additivity over a product state: joint value versus the sum of
/// the single-qubit values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationCheck {
    /// Joint extraction against the product of the local passive states.
    pub joint: f64,
    /// Sum of the two single-qubit ergotropies.
    pub sum_of_parts: f64,
    /// `joint - sum_of_parts`; an algebraic identity makes this vanish.
    pub difference: f64,
    /// Joint ergotropy against the globally passive reference.
    pub joint_global: f64,
    /// `joint_global - joint`, nonnegative. Nonzero exactly when the product
    /// of the local passive states is not globally passive, i.e. when a
    /// joint unitary can extract more than local ones (work activation).
    pub activation: f64,
}

/// Check `W(rho_a x rho_b, H) = W(rho_a, H_a) + W(rho_b, H_b)` for an
/// additive two-qubit Hamiltonian `H = H_a x I + I x H_b`.
///
/// The joint extraction is referenced to `pi_a x pi_b`, the state reached by
/// passivizing each side locally; with that reference the additivity is
/// exact for every product input. The globally passive reference can sit
/// strictly lower for non-thermal marginals, and the gap is reported as
/// [`FactorizationCheck::activation`].
pub fn factorization_check(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &HamiltonianOperator,
) -> Result<FactorizationCheck> {
    if rho_a.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: rho_a.dim() });
    }
    if rho_b.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: rho_b.dim() });
    }
    if h.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: h.dim() });
    }
    // Split H into single-qubit terms; ergotropy is invariant under the
    // trace-shift ambiguity of the split.
    let m = h.matrix();
    let quarter_trace = m.trace() / 4.0;
    let shift = 0.5 * quarter_trace;
    let part_a = ComplexSquareMatrix::from_fn(2, |r, c| {
        let partial = m.at(2 * r, 2 * c) + m.at(2 * r + 1, 2 * c + 1);
        0.5 * partial - if r == c { shift } else { Complex64::new(0.0, 0.0) }
    });
    let part_b = ComplexSquareMatrix::from_fn(2, |r, c| {
        let partial = m.at(r, c) + m.at(2 + r, 2 + c);
        0.5 * partial - if r == c { shift } else { Complex64::new(0.0, 0.0) }
    });
    let id = ComplexSquareMatrix::identity(2);
    let rebuilt = kron(&part_a, &id)?.add(&kron(&id, &part_b)?);
    let scale = 1.0 + m.max_abs();
    if rebuilt.max_abs_diff(m) > 1e-10 * scale {
        return Err(Error::domain(
            "Hamiltonian is not a sum of single-qubit terms",
        ));
    }
    let h_a = HamiltonianOperator::from_matrix(part_a)?;
    let h_b = HamiltonianOperator::from_matrix(part_b)?;
    let product = product_state(rho_a, rho_b)?;
    let pi_a = passive_state(rho_a, &h_a)?;
    let pi_b = passive_state(rho_b, &h_b)?;
    let pi_product = product_state(pi_a.matrix(), pi_b.matrix())?;
    let joint = h.expectation(&product) - h.expectation(&pi_product);
    let joint_global = ergotropy(&product, h)?;
    let sum_of_parts = ergotropy(rho_a, &h_a)? + ergotropy(rho_b, &h_b)?;
    Ok(FactorizationCheck {
        joint,
        sum_of_parts,
        difference: joint - sum_of_parts,
        joint_global,
        activation: joint_global - joint,
    })
}

/// Thermal state `exp(-H / (k_B T / hbar)) / Z`, diagonal in the energy
/// eigenbasis. Requires `T > 0`.
pub fn gibbs_state(h: &HamiltonianOperator, temperature: f64) -> Result<DensityMatrix> {
    if !(temperature > 0.0) {
        return Err(Error::domain(format!(
            "thermal state needs T > 0, got {temperature}"
        )));
    }
    let beta = HBAR_OVER_KB / temperature; // seconds: converts 1/s energies
    let energies = h.energies();
    let e_min = energies[0];
    let weights: Vec<f64> = energies.iter().map(|&e| (-(e - e_min) * beta).exp()).collect();
    let z: f64 = weights.iter().sum();
    let n = h.dim();
    let vecs = h.eigenvectors();
    let matrix = ComplexSquareMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|k| vecs.at(r, k) * vecs.at(c, k).conj() * (weights[k] / z))
            .sum::<Complex64>()
    });
    DensityMatrix::new(matrix)
}

/// Reduced single-qubit states of a two-qubit density matrix, paired with
/// the matching single-qubit Hamiltonians. Convenience for factorization
/// analyses.
pub fn reduced_pair(rho: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
    Ok((partial_trace(rho, Qubit::A)?, partial_trace(rho, Qubit::B)?))
}

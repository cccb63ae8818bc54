//! Bath parameterization and open-system time evolution.
//!
//! Exposes the bath-derived rates (spectral density, mean occupation,
//! decoherence factor), the closed-form relaxation states for the three
//! experimental setups, and an independent fixed-step numerical Lindblad
//! integrator used as a validation oracle for the closed forms.
//!
//! Everything here works in the interaction picture: the system-Hamiltonian
//! rotation commutes with the populations and with the single surviving
//! coherence of the X-shaped states, so the closed forms carry no phase
//! factor and the integrator propagates the dissipative generator only.
//! This makes the analytic and numerical routes directly comparable.

use num_complex::Complex64;

use crate::constants::HBAR_OVER_KB;
use crate::error::{Error, Result};
use crate::qstate::{kron, sigma_minus, sigma_plus, ComplexSquareMatrix, DensityMatrix};

/// Stability bound for the fixed-step integrator: `dt * max_rate` must stay
/// below this value.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Thermal bath attached to one qubit.
///
/// `temperature` is in kelvin; the remaining fields are dimensionless knobs
/// of the Ohmic Lorentz-Drude coupling. They only enter the dynamics through
/// the decoherence factor `Gamma = gamma0^2 * omega * r^2 * |d|^2 / (1 + r^2)`
/// and the mean occupation of the resonant mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    temperature: f64,
    cutoff_ratio: f64,
    coupling: f64,
    dipole_sq: f64,
}

impl BathSpec {
    pub fn new(temperature: f64, cutoff_ratio: f64, coupling: f64, dipole_sq: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::domain(format!("bath temperature must be >= 0, got {temperature}")));
        }
        if !(cutoff_ratio > 0.0) {
            return Err(Error::domain(format!("cutoff ratio must be > 0, got {cutoff_ratio}")));
        }
        if !(coupling >= 0.0) {
            return Err(Error::domain(format!("coupling gamma0 must be >= 0, got {coupling}")));
        }
        if !(dipole_sq >= 0.0) {
            return Err(Error::domain(format!("dipole magnitude must be >= 0, got {dipole_sq}")));
        }
        Ok(Self { temperature, cutoff_ratio, coupling, dipole_sq })
    }

    /// Bath whose decoherence factor equals `gamma` for a qubit at `omega`,
    /// using unit cutoff ratio and unit dipole magnitude.
    pub fn with_decoherence_rate(temperature: f64, omega: f64, gamma: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::domain(format!("qubit frequency must be > 0, got {omega}")));
        }
        if !(gamma >= 0.0) {
            return Err(Error::domain(format!("decoherence rate must be >= 0, got {gamma}")));
        }
        // r = 1 makes Gamma = gamma0^2 * omega / 2.
        Self::new(temperature, 1.0, (2.0 * gamma / omega).sqrt(), 1.0)
    }

    /// Bath calibrated so the population relaxation rate
    /// `Gamma * (2 nbar + 1)` equals `relaxation` for a qubit at `omega`.
    pub fn with_relaxation_rate(temperature: f64, omega: f64, relaxation: f64) -> Result<Self> {
        let nbar = mean_occupation(omega, temperature)?;
        Self::with_decoherence_rate(temperature, omega, relaxation / (2.0 * nbar + 1.0))
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn cutoff_ratio(&self) -> f64 {
        self.cutoff_ratio
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn dipole_sq(&self) -> f64 {
        self.dipole_sq
    }
}

/// Which bath arrangement is being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setup {
    /// Baths on both qubits.
    BothBaths,
    /// Bath on qubit A only.
    BathOnA,
    /// Bath on qubit B only.
    BathOnB,
}

impl Setup {
    /// Short label used in file output and on the command line: a, b, c.
    pub fn label(&self) -> &'static str {
        match self {
            Setup::BothBaths => "a",
            Setup::BathOnA => "b",
            Setup::BathOnB => "c",
        }
    }
}

/// Full parameterization of one experimental run.
#[derive(Debug, Clone, PartialEq)]
pub struct SetupParams {
    setup: Setup,
    omega_a: f64,
    omega_b: f64,
    bath_a: Option<BathSpec>,
    bath_b: Option<BathSpec>,
}

impl SetupParams {
    /// Validates the setup/bath pairing: each setup requires exactly the
    /// baths it couples.
    pub fn new(
        setup: Setup,
        omega_a: f64,
        omega_b: f64,
        bath_a: Option<BathSpec>,
        bath_b: Option<BathSpec>,
    ) -> Result<Self> {
        if !(omega_a > 0.0) || !(omega_b > 0.0) {
            return Err(Error::config(format!(
                "qubit frequencies must be positive, got omega_a={omega_a:e}, omega_b={omega_b:e}"
            )));
        }
        match setup {
            Setup::BothBaths => {
                if bath_a.is_none() || bath_b.is_none() {
                    return Err(Error::config("setup a requires baths on both qubits"));
                }
            }
            Setup::BathOnA => {
                if bath_a.is_none() || bath_b.is_some() {
                    return Err(Error::config("setup b requires a bath on qubit A only"));
                }
            }
            Setup::BathOnB => {
                if bath_b.is_none() || bath_a.is_some() {
                    return Err(Error::config("setup c requires a bath on qubit B only"));
                }
            }
        }
        Ok(Self { setup, omega_a, omega_b, bath_a, bath_b })
    }

    pub fn setup(&self) -> Setup {
        self.setup
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn bath_a(&self) -> Option<&BathSpec> {
        self.bath_a.as_ref()
    }

    pub fn bath_b(&self) -> Option<&BathSpec> {
        self.bath_b.as_ref()
    }

    /// Decoherence factors and mean occupations induced by the attached
    /// baths; absent baths contribute zero rate.
    pub fn rates(&self) -> Result<RateSet> {
        let (gamma_a, nbar_a) = match &self.bath_a {
            Some(bath) => (
                decoherence_rate(bath, self.omega_a),
                mean_occupation(self.omega_a, bath.temperature())?,
            ),
            None => (0.0, 0.0),
        };
        let (gamma_b, nbar_b) = match &self.bath_b {
            Some(bath) => (
                decoherence_rate(bath, self.omega_b),
                mean_occupation(self.omega_b, bath.temperature())?,
            ),
            None => (0.0, 0.0),
        };
        RateSet::new(gamma_a, nbar_a, gamma_b, nbar_b)
    }
}

/// Decoherence factors and bath occupations; zero rate means no bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    gamma_a: f64,
    nbar_a: f64,
    gamma_b: f64,
    nbar_b: f64,
}

impl RateSet {
    pub fn new(gamma_a: f64, nbar_a: f64, gamma_b: f64, nbar_b: f64) -> Result<Self> {
        for (name, v) in [
            ("gamma_a", gamma_a),
            ("nbar_a", nbar_a),
            ("gamma_b", gamma_b),
            ("nbar_b", nbar_b),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { gamma_a, nbar_a, gamma_b, nbar_b })
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }

    pub fn nbar_a(&self) -> f64 {
        self.nbar_a
    }

    pub fn nbar_b(&self) -> f64 {
        self.nbar_b
    }

    /// Population relaxation rate of qubit A: `Gamma_A (2 nbar_A + 1)`.
    pub fn relaxation_a(&self) -> f64 {
        self.gamma_a * (2.0 * self.nbar_a + 1.0)
    }

    /// Population relaxation rate of qubit B.
    pub fn relaxation_b(&self) -> f64 {
        self.gamma_b * (2.0 * self.nbar_b + 1.0)
    }

    pub fn max_relaxation(&self) -> f64 {
        self.relaxation_a().max(self.relaxation_b())
    }

    /// Slowest nonzero relaxation rate; `None` when no bath is active.
    pub fn min_active_relaxation(&self) -> Option<f64> {
        let mut min = None;
        for r in [self.relaxation_a(), self.relaxation_b()] {
            if r > 0.0 {
                min = Some(min.map_or(r, |m: f64| m.min(r)));
            }
        }
        min
    }
}

/// Exponential decay factors of the closed-form solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaFactors {
    pub eta_a: f64,
    pub eta_b: f64,
    pub eta: f64,
}

/// Ohmic Lorentz-Drude spectral density `J(omega) = (2 gamma0 omega / pi) *
/// cutoff^2 / (cutoff^2 + omega^2)`.
pub fn spectral_density(omega: f64, gamma0: f64, cutoff: f64) -> Result<f64> {
    if omega < 0.0 {
        return Err(Error::domain(format!("spectral density frequency must be >= 0, got {omega}")));
    }
    if !(cutoff > 0.0) {
        return Err(Error::domain(format!("cutoff frequency must be > 0, got {cutoff}")));
    }
    Ok((2.0 * gamma0 * omega / std::f64::consts::PI) * cutoff * cutoff
        / (cutoff * cutoff + omega * omega))
}

/// Bose-Einstein occupation of the bath mode resonant with the qubit;
/// exactly zero at `T = 0`.
pub fn mean_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("mean occupation needs omega > 0, got {omega}")));
    }
    if temperature < 0.0 {
        return Err(Error::domain(format!("temperature must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR_OVER_KB * omega / temperature;
    Ok(1.0 / x.exp_m1())
}

/// Decoherence factor `Gamma = gamma0^2 * omega * r^2 * |d|^2 / (1 + r^2)`.
pub fn decoherence_rate(bath: &BathSpec, omega: f64) -> f64 {
    let r2 = bath.cutoff_ratio * bath.cutoff_ratio;
    bath.coupling * bath.coupling * omega * r2 * bath.dipole_sq / (1.0 + r2)
}

/// Decay factors `eta_i = exp(-Gamma_i t (2 nbar_i + 1))` and their product.
///
/// An absent bath (zero rate) contributes `eta = 1`; `t` may be infinite to
/// obtain the stationary limit.
pub fn eta_factors(rates: &RateSet, t: f64) -> Result<EtaFactors> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("time must be >= 0, got {t}")));
    }
    let decay = |relaxation: f64| -> f64 {
        if relaxation == 0.0 {
            1.0
        } else {
            (-relaxation * t).exp()
        }
    };
    let eta_a = decay(rates.relaxation_a());
    let eta_b = decay(rates.relaxation_b());
    Ok(EtaFactors { eta_a, eta_b, eta: eta_a * eta_b })
}

fn require_setup(params: &SetupParams, expected: Setup, op: &str) -> Result<()> {
    if params.setup() != expected {
        return Err(Error::usage(format!(
            "{op} expects setup {} but params are tagged {}",
            expected.label(),
            params.setup().label()
        )));
    }
    Ok(())
}

/// Closed-form state for the two-bath setup, starting from the singlet.
///
/// X-shaped in the product basis: thermal populations relax with each bath's
/// rate and the single `|+-><-+|` coherence decays at half the sum of the
/// two relaxation rates, i.e. its magnitude is `sqrt(eta) / 2`.
pub fn analytic_state_setup_a(params: &SetupParams, t: f64) -> Result<DensityMatrix> {
    require_setup(params, Setup::BothBaths, "analytic_state_setup_a")?;
    analytic_state_with_rates(Setup::BothBaths, &params.rates()?, t)
}

/// Closed-form state when only qubit A is coupled to a bath.
pub fn analytic_state_setup_b(params: &SetupParams, t: f64) -> Result<DensityMatrix> {
    require_setup(params, Setup::BathOnA, "analytic_state_setup_b")?;
    analytic_state_with_rates(Setup::BathOnA, &params.rates()?, t)
}

/// Closed-form state when only qubit B is coupled to a bath; the single-bath
/// solution with the tensor-factor roles swapped.
pub fn analytic_state_setup_c(params: &SetupParams, t: f64) -> Result<DensityMatrix> {
    require_setup(params, Setup::BathOnB, "analytic_state_setup_c")?;
    analytic_state_with_rates(Setup::BathOnB, &params.rates()?, t)
}

/// Closed-form state for any setup, dispatching on the params tag.
pub fn analytic_state(params: &SetupParams, t: f64) -> Result<DensityMatrix> {
    analytic_state_with_rates(params.setup(), &params.rates()?, t)
}

/// Stationary (`t -> infinity`) state of the setup.
pub fn stationary_state(params: &SetupParams) -> Result<DensityMatrix> {
    analytic_state_with_rates(params.setup(), &params.rates()?, f64::INFINITY)
}

/// Closed-form singlet relaxation at the rate level.
///
/// For [`Setup::BothBaths`] both rate pairs must be active; for the
/// single-bath setups the inactive side must carry zero rate.
pub fn analytic_state_with_rates(setup: Setup, rates: &RateSet, t: f64) -> Result<DensityMatrix> {
    let etas = eta_factors(rates, t)?;
    let (na, nb) = (rates.nbar_a(), rates.nbar_b());
    let (ea, eb, e) = (etas.eta_a, etas.eta_b, etas.eta);

    let entries = match setup {
        Setup::BothBaths => {
            let d = 2.0 * (2.0 * na + 1.0) * (2.0 * nb + 1.0);
            let l11 =
                (eb * na + ea * nb - e * (na + nb) - 2.0 * e * na * nb + 2.0 * na * nb) / d;
            let l22 = (ea - eb * na + e * na + ea * nb + e * nb
                + 2.0 * e * na * nb
                + 2.0 * na
                + 2.0 * na * nb)
                / d;
            let l33 = (eb - ea * nb + e * nb + eb * na + e * na
                + 2.0 * e * na * nb
                + 2.0 * nb
                + 2.0 * na * nb)
                / d;
            let l44 = (-ea - eb - eb * na - e * na - ea * nb - e * nb - 2.0 * e * na * nb
                + 2.0 * na
                + 2.0 * nb
                + 2.0 * na * nb
                + 2.0)
                / d;
            // The coherence decays at half the combined relaxation rate, so
            // its magnitude is sqrt(eta)/2. This is the exact solution of
            // the master equation and reduces to the single-bath form when
            // one rate vanishes.
            let coh = -0.5 * e.sqrt();
            XEntries { l11, l22, l33, l44, coh }
        }
        Setup::BathOnA => {
            if rates.relaxation_b() != 0.0 {
                return Err(Error::usage(
                    "setup b closed form requires zero rate on qubit B",
                ));
            }
            let d = 2.0 * (2.0 * na + 1.0);
            XEntries {
                l11: na * (1.0 - ea) / d,
                l22: (ea + na + ea * na) / d,
                l33: (na + ea * na + 1.0) / d,
                l44: (1.0 + na) * (1.0 - ea) / d,
                coh: -0.5 * ea.sqrt(),
            }
        }
        Setup::BathOnB => {
            if rates.relaxation_a() != 0.0 {
                return Err(Error::usage(
                    "setup c closed form requires zero rate on qubit A",
                ));
            }
            let d = 2.0 * (2.0 * nb + 1.0);
            XEntries {
                l11: nb * (1.0 - eb) / d,
                l22: (nb + eb * nb + 1.0) / d,
                l33: (eb + nb + eb * nb) / d,
                l44: (1.0 + nb) * (1.0 - eb) / d,
                coh: -0.5 * eb.sqrt(),
            }
        }
    };
    entries.into_density_matrix()
}

struct XEntries {
    l11: f64,
    l22: f64,
    l33: f64,
    l44: f64,
    coh: f64,
}

impl XEntries {
    fn into_density_matrix(self) -> Result<DensityMatrix> {
        let mut m = ComplexSquareMatrix::zeros(4);
        m.set(0, 0, Complex64::new(self.l11, 0.0));
        m.set(1, 1, Complex64::new(self.l22, 0.0));
        m.set(2, 2, Complex64::new(self.l33, 0.0));
        m.set(3, 3, Complex64::new(self.l44, 0.0));
        m.set(1, 2, Complex64::new(self.coh, 0.0));
        m.set(2, 1, Complex64::new(self.coh, 0.0));
        DensityMatrix::new(m)
    }
}

/// Classical transition matrix of the joint populations over time `t`:
/// `p(t) = M(t) p(0)` in the product-basis ordering.
///
/// The populations decouple from the coherence, so this is the tensor
/// product of the two single-qubit thermal transition matrices. Used by the
/// validation suites for semigroup and initial-state-independence checks.
pub fn population_propagator(rates: &RateSet, t: f64) -> Result<[[f64; 4]; 4]> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("time must be >= 0, got {t}")));
    }
    let single = |relaxation: f64, nbar: f64| -> [[f64; 2]; 2] {
        if relaxation == 0.0 {
            return [[1.0, 0.0], [0.0, 1.0]];
        }
        let eta = (-relaxation * t).exp();
        let p_up = nbar / (2.0 * nbar + 1.0);
        let p_dn = (nbar + 1.0) / (2.0 * nbar + 1.0);
        // Row = destination, column = origin; index 0 is the excited state.
        [
            [p_up + p_dn * eta, p_up * (1.0 - eta)],
            [p_dn * (1.0 - eta), p_dn + p_up * eta],
        ]
    };
    let ta = single(rates.relaxation_a(), rates.nbar_a());
    let tb = single(rates.relaxation_b(), rates.nbar_b());
    let mut m = [[0.0; 4]; 4];
    for a_to in 0..2 {
        for b_to in 0..2 {
            for a_from in 0..2 {
                for b_from in 0..2 {
                    m[2 * a_to + b_to][2 * a_from + b_from] = ta[a_to][a_from] * tb[b_to][b_from];
                }
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Numerical Lindblad integrator (validation oracle)
// ---------------------------------------------------------------------------

const LIOUVILLE_DIM: usize = 16;

/// Dissipative generator in vectorized (Liouville) form.
struct Generator {
    m: Vec<Complex64>,
}

impl Generator {
    /// Assemble `sum_k rate_k D[L_k]` as a 16x16 superoperator acting on the
    /// row-major vectorization of the density matrix.
    fn new(channels: &[(f64, ComplexSquareMatrix)]) -> Self {
        let mut m = vec![Complex64::new(0.0, 0.0); LIOUVILLE_DIM * LIOUVILLE_DIM];
        let id = ComplexSquareMatrix::identity(4);
        for (rate, l) in channels {
            if *rate == 0.0 {
                continue;
            }
            let l_conj = l.conj();
            let ldl = l.adjoint().mul(l);
            // vec(A X B) = (A o B^T) vec(X) for row-major vec; the three
            // dissipator terms need B^T = conj(L), I, and (L†L)^T.
            let ldl_t = ComplexSquareMatrix::from_fn(4, |r, c| ldl.at(c, r));
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for q in 0..4 {
                            let row = i * 4 + j;
                            let col = k * 4 + q;
                            let jump = l.at(i, k) * l_conj.at(j, q);
                            let damp = 0.5
                                * (ldl.at(i, k) * id.at(j, q) + id.at(i, k) * ldl_t.at(j, q));
                            m[row * LIOUVILLE_DIM + col] += (jump - damp) * *rate;
                        }
                    }
                }
            }
        }
        Self { m }
    }

    fn apply(&self, v: &[Complex64; LIOUVILLE_DIM], out: &mut [Complex64; LIOUVILLE_DIM]) {
        for r in 0..LIOUVILLE_DIM {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &self.m[r * LIOUVILLE_DIM..(r + 1) * LIOUVILLE_DIM];
            for (c, coeff) in row.iter().enumerate() {
                acc += coeff * v[c];
            }
            out[r] = acc;
        }
    }
}

fn jump_channels(setup: Setup, rates: &RateSet) -> Result<Vec<(f64, ComplexSquareMatrix)>> {
    let id = ComplexSquareMatrix::identity(2);
    let mut channels = Vec::new();
    let a_active = matches!(setup, Setup::BothBaths | Setup::BathOnA);
    let b_active = matches!(setup, Setup::BothBaths | Setup::BathOnB);
    if a_active {
        channels.push((rates.gamma_a() * (rates.nbar_a() + 1.0), kron(&sigma_minus(), &id)?));
        channels.push((rates.gamma_a() * rates.nbar_a(), kron(&sigma_plus(), &id)?));
    }
    if b_active {
        channels.push((rates.gamma_b() * (rates.nbar_b() + 1.0), kron(&id, &sigma_minus())?));
        channels.push((rates.gamma_b() * rates.nbar_b(), kron(&id, &sigma_plus())?));
    }
    Ok(channels)
}

fn vectorize(m: &ComplexSquareMatrix) -> [Complex64; LIOUVILLE_DIM] {
    let mut v = [Complex64::new(0.0, 0.0); LIOUVILLE_DIM];
    for i in 0..4 {
        for j in 0..4 {
            v[i * 4 + j] = m.at(i, j);
        }
    }
    v
}

fn devectorize(v: &[Complex64; LIOUVILLE_DIM]) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_fn(4, |i, j| v[i * 4 + j])
}

/// In-place projection back onto the Hermitian subspace after each step.
fn rehermitize(v: &mut [Complex64; LIOUVILLE_DIM]) {
    for i in 0..4 {
        for j in i..4 {
            let upper = v[i * 4 + j];
            let lower = v[j * 4 + i];
            let sym = 0.5 * (upper + lower.conj());
            v[i * 4 + j] = sym;
            v[j * 4 + i] = sym.conj();
        }
    }
}

/// Fixed-step classical fourth-order integration of the dissipative master
/// equation with per-step re-Hermitization.
///
/// `dt` is the requested step; the actual step divides `t` evenly and never
/// exceeds `dt`. Fails when `dt * max_rate` violates the stability guard.
pub fn numerical_lindblad(
    params: &SetupParams,
    rho0: &DensityMatrix,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    let states = numerical_lindblad_path(params, rho0, &[t], dt)?;
    Ok(states.into_iter().next().expect("one requested time"))
}

/// Integrate once and capture snapshots at each requested (ascending) time.
pub fn numerical_lindblad_path(
    params: &SetupParams,
    rho0: &DensityMatrix,
    times: &[f64],
    dt: f64,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: rho0.dim() });
    }
    if !(dt > 0.0) {
        return Err(Error::config(format!("integrator step must be > 0, got {dt}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| t < 0.0 || !t.is_finite()) {
        return Err(Error::config("snapshot times must be finite, >= 0 and ascending"));
    }
    let rates = params.rates()?;
    let max_rate = rates.max_relaxation();
    if dt * max_rate >= STABILITY_LIMIT {
        return Err(Error::config(format!(
            "step dt={dt:e} violates the stability guard dt*max_rate < {STABILITY_LIMIT}; \
             use dt < {:e}",
            STABILITY_LIMIT / max_rate
        )));
    }

    let generator = Generator::new(&jump_channels(params.setup(), &rates)?);
    let mut v = vectorize(rho0.matrix());
    let mut t_now = 0.0_f64;
    let mut snapshots = Vec::with_capacity(times.len());

    let mut k1 = [Complex64::new(0.0, 0.0); LIOUVILLE_DIM];
    let mut k2 = k1;
    let mut k3 = k1;
    let mut k4 = k1;
    let mut stage = k1;

    for &target in times {
        let span = target - t_now;
        if span > 0.0 {
            let steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                generator.apply(&v, &mut k1);
                for i in 0..LIOUVILLE_DIM {
                    stage[i] = v[i] + 0.5 * h * k1[i];
                }
                generator.apply(&stage, &mut k2);
                for i in 0..LIOUVILLE_DIM {
                    stage[i] = v[i] + 0.5 * h * k2[i];
                }
                generator.apply(&stage, &mut k3);
                for i in 0..LIOUVILLE_DIM {
                    stage[i] = v[i] + h * k3[i];
                }
                generator.apply(&stage, &mut k4);
                for i in 0..LIOUVILLE_DIM {
                    v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                rehermitize(&mut v);
            }
            t_now = target;
        }
        snapshots.push(DensityMatrix::new(devectorize(&v))?);
    }
    Ok(snapshots)
}

//! Physical constants.

/// `hbar / k_B` in seconds times kelvin.
///
/// With `hbar = 1` all energies are expressed in `1/s`, so this is the only
/// constant needed to fold temperatures in kelvin into the dynamics:
/// `x = HBAR_OVER_KB * omega / T` is the dimensionless Boltzmann exponent.
pub const HBAR_OVER_KB: f64 = 7.6382e-12;

/// Thermal energy `k_B T / hbar` in `1/s` for a temperature in kelvin.
pub fn thermal_frequency(temperature: f64) -> f64 {
    temperature / HBAR_OVER_KB
}

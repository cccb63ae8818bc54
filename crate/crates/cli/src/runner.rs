//! Experiment drivers: time-series simulation, temperature sweeps, and the
//! work-extraction protocol. Grid points are evaluated in parallel and
//! collected in deterministic order.

use rayon::prelude::*;

use entherm_core::dynamics::{analytic_state, Setup};
use entherm_core::protocol::{full_protocol, ProtocolTrace};
use entherm_core::qstate::{concurrence, singlet_state};
use entherm_core::thermo::{
    delta_internal_energy, ergotropy, first_law_ledger, gap_report, internal_energy, GapReport,
    SetupTriple,
};

use crate::config::ExperimentConfig;

/// One time-grid row of a single-setup run.
#[derive(Debug, Clone)]
pub struct SetupRow {
    pub t: f64,
    /// Populations in the product basis (`++`, `+-`, `-+`, `--`).
    pub populations: [f64; 4],
    /// Real part of the middle-block coherence.
    pub coherence: f64,
    pub energy: f64,
    pub delta_e: f64,
    /// Closed-form energy change, for comparison against `delta_e`.
    pub delta_e_closed: f64,
    pub ergotropy: f64,
    pub delta_ergotropy: f64,
    pub operational_heat: f64,
    pub closure_residual: f64,
    pub concurrence: f64,
}

/// One time-grid row of an all-setups run: the gap report plus per-setup
/// energy changes and operational heats.
#[derive(Debug, Clone)]
pub struct GapRow {
    pub report: GapReport,
    pub delta_e: [f64; 3],
    pub operational_heat: [f64; 3],
}

/// Simulation output: either one setup's time series or the three-setup
/// comparison.
#[derive(Debug, Clone)]
pub enum SimulateOutput {
    Single { setup: Setup, rows: Vec<SetupRow> },
    Comparison { rows: Vec<GapRow> },
}

/// Run the time-grid simulation configured in `config`.
pub fn run_simulate(config: &ExperimentConfig) -> Result<SimulateOutput, String> {
    let grid = config.time_grid();
    match config.setup.single() {
        Some(setup) => {
            let params = config.params_for(setup)?;
            let triple = config.triple()?;
            let h = triple.hamiltonian().map_err(|e| e.to_string())?;
            let singlet = singlet_state();
            let w0 = ergotropy(&singlet, &h).map_err(|e| e.to_string())?;
            let e0 = internal_energy(&singlet, &h).map_err(|e| e.to_string())?;
            let rates = params.rates().map_err(|e| e.to_string())?;
            let rows: Result<Vec<SetupRow>, String> = grid
                .par_iter()
                .map(|&t| {
                    let state = analytic_state(&params, t).map_err(|e| e.to_string())?;
                    let ledger =
                        first_law_ledger(&singlet, &state, &h).map_err(|e| e.to_string())?;
                    let closed = delta_internal_energy(
                        setup,
                        &rates,
                        config.omega_a,
                        config.omega_b,
                        t,
                    )
                    .map_err(|e| e.to_string())?;
                    Ok(SetupRow {
                        t,
                        populations: [
                            state.at(0, 0).re,
                            state.at(1, 1).re,
                            state.at(2, 2).re,
                            state.at(3, 3).re,
                        ],
                        coherence: state.at(1, 2).re,
                        energy: e0 + ledger.delta_e,
                        delta_e: ledger.delta_e,
                        delta_e_closed: closed,
                        ergotropy: w0 + ledger.delta_ergotropy,
                        delta_ergotropy: ledger.delta_ergotropy,
                        operational_heat: ledger.operational_heat,
                        closure_residual: ledger.closure_residual(),
                        concurrence: concurrence(&state).map_err(|e| e.to_string())?,
                    })
                })
                .collect();
            Ok(SimulateOutput::Single { setup, rows: rows? })
        }
        None => {
            let triple = config.triple()?;
            let rows: Result<Vec<GapRow>, String> =
                grid.par_iter().map(|&t| gap_row(&triple, t)).collect();
            Ok(SimulateOutput::Comparison { rows: rows? })
        }
    }
}

/// Evaluate the gap report and per-setup ledgers at one time.
pub fn gap_row(triple: &SetupTriple, t: f64) -> Result<GapRow, String> {
    let report = gap_report(triple, t).map_err(|e| e.to_string())?;
    let h = triple.hamiltonian().map_err(|e| e.to_string())?;
    let singlet = singlet_state();
    let mut delta_e = [0.0; 3];
    let mut heat = [0.0; 3];
    for (i, params) in [triple.both(), triple.bath_on_a(), triple.bath_on_b()]
        .into_iter()
        .enumerate()
    {
        let state = analytic_state(params, t).map_err(|e| e.to_string())?;
        let ledger = first_law_ledger(&singlet, &state, &h).map_err(|e| e.to_string())?;
        delta_e[i] = ledger.delta_e;
        heat[i] = ledger.operational_heat;
    }
    Ok(GapRow { report, delta_e, operational_heat: heat })
}

/// One row of the common-temperature sweep.
#[derive(Debug, Clone)]
pub struct CommonSweepRow {
    pub temperature: f64,
    pub dw: f64,
    pub dw_a: f64,
    pub dw_b: f64,
    pub dw_sum: f64,
    pub gap_dw: f64,
    pub gap_w: f64,
    pub concurrence: f64,
}

/// Common-mode temperature sweep: both baths at the same temperature,
/// quantities evaluated at the configured time.
pub fn run_sweep_common(config: &ExperimentConfig) -> Result<Vec<CommonSweepRow>, String> {
    let t_eval = config.sweep.t_eval;
    config
        .sweep_temperatures()
        .par_iter()
        .map(|&temperature| {
            let triple = config.triple_with_temps(temperature, temperature)?;
            let report = gap_report(&triple, t_eval).map_err(|e| e.to_string())?;
            Ok(CommonSweepRow {
                temperature,
                dw: report.dw,
                dw_a: report.dw_a,
                dw_b: report.dw_b,
                dw_sum: report.dw_a + report.dw_b,
                gap_dw: report.gap_dw,
                gap_w: report.gap_w,
                concurrence: report.concurrence,
            })
        })
        .collect()
}

/// One block of the temperature-difference sweep: the gap trajectory for a
/// fixed `T_B - T_A` at fixed mean temperature.
#[derive(Debug, Clone)]
pub struct DeltaSweepBlock {
    pub delta_temp: f64,
    pub temp_a: f64,
    pub temp_b: f64,
    pub rows: Vec<GapRow>,
    /// Largest `|dw - dw_a - dw_b|` over the block's time grid.
    pub peak_gap_dw: f64,
}

/// Delta-mode temperature sweep: gap trajectories for each configured
/// temperature difference around the fixed mean.
pub fn run_sweep_delta(config: &ExperimentConfig) -> Result<Vec<DeltaSweepBlock>, String> {
    let grid = config.time_grid();
    config
        .sweep
        .delta_temps
        .iter()
        .map(|&delta| {
            let temp_a = config.sweep.mean_temp - delta / 2.0;
            let temp_b = config.sweep.mean_temp + delta / 2.0;
            let triple = config.triple_with_temps(temp_a, temp_b)?;
            let rows: Result<Vec<GapRow>, String> =
                grid.par_iter().map(|&t| gap_row(&triple, t)).collect();
            let rows = rows?;
            let peak_gap_dw = rows
                .iter()
                .map(|r| r.report.gap_dw.abs())
                .fold(0.0, f64::max);
            Ok(DeltaSweepBlock { delta_temp: delta, temp_a, temp_b, rows, peak_gap_dw })
        })
        .collect()
}

/// Protocol run output.
#[derive(Debug, Clone)]
pub struct ProtocolOutput {
    pub trace: ProtocolTrace,
    pub temperature: f64,
    pub steps: usize,
}

/// Run the two-stage protocol from the singlet under the configured system
/// Hamiltonian.
pub fn run_protocol(config: &ExperimentConfig) -> Result<ProtocolOutput, String> {
    let triple = config.triple()?;
    let h = triple.hamiltonian().map_err(|e| e.to_string())?;
    let trace = full_protocol(
        &singlet_state(),
        &h,
        config.protocol.temperature_kelvin,
        config.protocol.steps,
    )
    .map_err(|e| e.to_string())?;
    Ok(ProtocolOutput {
        trace,
        temperature: config.protocol.temperature_kelvin,
        steps: config.protocol.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulate_baseline_row_is_trivial() {
        let mut config = ExperimentConfig::default();
        config.points = 16;
        let out = run_simulate(&config).unwrap();
        match out {
            SimulateOutput::Comparison { rows } => {
                let first = &rows[0];
                assert_eq!(first.report.t, 0.0);
                assert!(first.report.dw.abs() < 1e-3);
                assert!(first.delta_e[0].abs() < 1e-3);
                assert!(first.operational_heat[0].abs() < 1e-3);
                assert!((first.report.concurrence - 1.0).abs() < 1e-9);
            }
            _ => panic!("default setup is the comparison"),
        }
    }

    #[test]
    fn single_setup_rows_close_the_ledger() {
        let mut config = ExperimentConfig::default();
        config.setup = crate::config::SetupSelection::B;
        config.points = 12;
        let out = run_simulate(&config).unwrap();
        match out {
            SimulateOutput::Single { setup, rows } => {
                assert_eq!(setup, Setup::BathOnA);
                for row in &rows {
                    let sum: f64 = row.populations.iter().sum();
                    assert!((sum - 1.0).abs() < 1e-12);
                    let scale = row.delta_e.abs().max(1.0);
                    assert!(row.closure_residual.abs() / scale < 1e-9);
                    let diff = (row.delta_e - row.delta_e_closed).abs();
                    assert!(diff < 1e-10 * (config.omega_a + config.omega_b));
                }
            }
            _ => panic!("expected single-setup output"),
        }
    }

    #[test]
    fn zero_delta_sweep_matches_the_common_mode() {
        // A delta block at dT = 0 samples the same physics as the common
        // mode at the mean temperature.
        let mut config = ExperimentConfig::default();
        config.sweep.delta_temps = vec![0.0];
        config.sweep.temp_min = config.sweep.mean_temp;
        config.sweep.temp_max = config.sweep.mean_temp + 1.0;
        config.sweep.temp_points = 2;
        config.t_min = config.sweep.t_eval;
        config.t_max = config.sweep.t_eval * 10.0;
        config.points = 2;

        let blocks = run_sweep_delta(&config).unwrap();
        let block_row = blocks[0]
            .rows
            .iter()
            .find(|r| (r.report.t - config.sweep.t_eval).abs() < 1e-20)
            .expect("grid contains the evaluation time");
        let common = run_sweep_common(&config).unwrap();
        let common_row = &common[0];
        let scale = 0.5 * (config.omega_a + config.omega_b);
        assert!((block_row.report.gap_dw - common_row.gap_dw).abs() < 1e-9 * scale);
        assert!((block_row.report.dw - common_row.dw).abs() < 1e-9 * scale);
    }

    #[test]
    fn delta_sweep_reports_peaks() {
        let mut config = ExperimentConfig::default();
        config.points = 24;
        let blocks = run_sweep_delta(&config).unwrap();
        assert_eq!(blocks.len(), 3);
        for block in &blocks {
            assert!(block.peak_gap_dw > 0.0);
            assert!((block.temp_a + block.temp_b) / 2.0 - 450.0 < 1e-12);
        }
    }
}

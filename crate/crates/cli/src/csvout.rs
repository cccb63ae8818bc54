//! CSV emission with `#`-prefixed metadata, plus the sibling gnuplot script.
//!
//! Every file starts with a schema tag, the unit conventions, and the full
//! resolved configuration as a single JSON comment line, so a run can be
//! reproduced from its output alone. Identical configuration yields
//! byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::gnuplot;
use crate::runner::{CommonSweepRow, DeltaSweepBlock, GapRow, ProtocolOutput, SimulateOutput};

/// Files produced by one emission: the CSV and its plot script.
#[derive(Debug, Clone)]
pub struct Emitted {
    pub csv: PathBuf,
    pub plot: PathBuf,
}

fn open(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    let file = std::fs::File::create(path)
        .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    Ok(std::io::BufWriter::new(file))
}

fn preamble(
    out: &mut impl Write,
    schema: &str,
    config: &ExperimentConfig,
    extra: &[String],
) -> Result<(), String> {
    let io = |e: std::io::Error| format!("write error: {e}");
    writeln!(out, "# schema: {schema}").map_err(io)?;
    writeln!(out, "# units: time s, energy 1/s (hbar = 1), temperature K").map_err(io)?;
    writeln!(out, "# config: {}", config.canonical_json()).map_err(io)?;
    for line in extra {
        writeln!(out, "# {line}").map_err(io)?;
    }
    Ok(())
}

fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

/// Write a simulate run (single setup or three-setup comparison).
pub fn write_simulate(
    config: &ExperimentConfig,
    output: &SimulateOutput,
    path: &Path,
) -> Result<Emitted, String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    match output {
        SimulateOutput::Single { setup, rows } => {
            preamble(
                &mut w,
                "entherm-simulate-setup-v1",
                config,
                &[format!("setup: {}", setup.label())],
            )?;
            writeln!(
                w,
                "t_s,pop_pp,pop_pm,pop_mp,pop_mm,coherence_re,energy,delta_e,\
                 delta_e_closed,ergotropy,delta_ergotropy,operational_heat,\
                 closure_residual,concurrence"
            )
            .map_err(io)?;
            for r in rows {
                writeln!(
                    w,
                    "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                    r.t,
                    r.populations[0],
                    r.populations[1],
                    r.populations[2],
                    r.populations[3],
                    r.coherence,
                    r.energy,
                    r.delta_e,
                    r.delta_e_closed,
                    r.ergotropy,
                    r.delta_ergotropy,
                    r.operational_heat,
                    r.closure_residual,
                    r.concurrence
                )
                .map_err(io)?;
            }
        }
        SimulateOutput::Comparison { rows } => {
            preamble(&mut w, "entherm-simulate-gap-v1", config, &[
                "columns _a/_b/_c refer to setups: a = both baths, b = bath on qubit A, \
                 c = bath on qubit B"
                    .to_owned(),
            ])?;
            writeln!(
                w,
                "t_s,w_a,w_b,w_c,dw_a,dw_b,dw_c,gap_w,gap_dw,delta_e_a,delta_e_b,\
                 delta_e_c,q_op_a,q_op_b,q_op_c,concurrence_a"
            )
            .map_err(io)?;
            for row in rows {
                write_gap_row(&mut w, row, None).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)?;
    let plot = plot_path(path);
    match output {
        SimulateOutput::Single { setup, .. } => {
            gnuplot::write_simulate_single(&plot, path, *setup)?
        }
        SimulateOutput::Comparison { .. } => gnuplot::write_simulate_gap(&plot, path)?,
    }
    Ok(Emitted { csv: path.to_path_buf(), plot })
}

fn write_gap_row(
    w: &mut impl Write,
    row: &GapRow,
    prefix: Option<&str>,
) -> std::io::Result<()> {
    if let Some(p) = prefix {
        write!(w, "{p},")?;
    }
    let r = &row.report;
    writeln!(
        w,
        "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
        r.t,
        r.w,
        r.w_a,
        r.w_b,
        r.dw,
        r.dw_a,
        r.dw_b,
        r.gap_w,
        r.gap_dw,
        row.delta_e[0],
        row.delta_e[1],
        row.delta_e[2],
        row.operational_heat[0],
        row.operational_heat[1],
        row.operational_heat[2],
        r.concurrence
    )
}

/// Write a common-mode temperature sweep.
pub fn write_sweep_common(
    config: &ExperimentConfig,
    rows: &[CommonSweepRow],
    path: &Path,
) -> Result<Emitted, String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    preamble(&mut w, "entherm-sweep-common-v1", config, &[format!(
        "evaluation time: {:e} s; both baths at the row temperature",
        config.sweep.t_eval
    )])?;
    writeln!(w, "temp_k,dw,dw_a,dw_b,dw_a_plus_b,gap_dw,gap_w,concurrence").map_err(io)?;
    for r in rows {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.temperature, r.dw, r.dw_a, r.dw_b, r.dw_sum, r.gap_dw, r.gap_w, r.concurrence
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    let plot = plot_path(path);
    gnuplot::write_sweep_common(&plot, path)?;
    Ok(Emitted { csv: path.to_path_buf(), plot })
}

/// Write a delta-mode temperature sweep: one blank-line-separated block per
/// temperature difference (gnuplot dataset indices).
pub fn write_sweep_delta(
    config: &ExperimentConfig,
    blocks: &[DeltaSweepBlock],
    path: &Path,
) -> Result<Emitted, String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    preamble(&mut w, "entherm-sweep-delta-v1", config, &[format!(
        "mean temperature {} K; one block per delta_t, blocks separated by blank lines",
        config.sweep.mean_temp
    )])?;
    writeln!(
        w,
        "delta_t_k,t_s,w_a,w_b,w_c,dw_a,dw_b,dw_c,gap_w,gap_dw,delta_e_a,delta_e_b,\
         delta_e_c,q_op_a,q_op_b,q_op_c,concurrence_a"
    )
    .map_err(io)?;
    for (i, block) in blocks.iter().enumerate() {
        if i > 0 {
            writeln!(w).map_err(io)?;
            writeln!(w).map_err(io)?;
        }
        writeln!(
            w,
            "# block {i}: delta_t = {} K (T_A = {} K, T_B = {} K), peak |gap_dw| = {:e}",
            block.delta_temp, block.temp_a, block.temp_b, block.peak_gap_dw
        )
        .map_err(io)?;
        let prefix = format!("{:e}", block.delta_temp);
        for row in &block.rows {
            write_gap_row(&mut w, row, Some(&prefix)).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    let plot = plot_path(path);
    gnuplot::write_sweep_delta(&plot, path, blocks)?;
    Ok(Emitted { csv: path.to_path_buf(), plot })
}

/// Write the protocol trace and its summary.
pub fn write_protocol(
    config: &ExperimentConfig,
    output: &ProtocolOutput,
    path: &Path,
) -> Result<Emitted, String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    let stage1 = &output.trace.stage1;
    let stage2 = &output.trace.stage2;
    preamble(&mut w, "entherm-protocol-v1", config, &[
        format!("stage1: work_extracted = {:e} (1/s)", stage1.work_extracted),
        format!(
            "stage2: target temperature {} K, {} steps",
            output.temperature, output.steps
        ),
        "sign conventions: heat_from_bath > 0 when the bath releases energy; \
         work_to_weight > 0 when the weight gains; \
         delta_e_system = heat_from_bath - work_to_weight"
            .to_owned(),
    ])?;
    writeln!(
        w,
        "step,pair_lo,pair_hi,delta_r,bath_gap,heat_from_bath,work_to_weight,\
         tv_distance,pop_0,pop_1,pop_2,pop_3"
    )
    .map_err(io)?;
    for s in &stage2.steps {
        let p = &s.populations;
        let get = |i: usize| p.get(i).copied().unwrap_or(0.0);
        writeln!(
            w,
            "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            s.index,
            s.level_pair.0,
            s.level_pair.1,
            s.delta_r,
            s.bath.gap,
            s.heat_from_bath,
            s.work_to_weight,
            s.tv_distance,
            get(0),
            get(1),
            get(2),
            get(3)
        )
        .map_err(io)?;
    }
    writeln!(
        w,
        "# summary: total_work_to_weight={:e} total_heat_from_bath={:e} \
         delta_e_system={:e} final_tv_distance={:e} stage1_work={:e}",
        stage2.total_work_to_weight,
        stage2.total_heat_from_bath,
        stage2.delta_system_energy,
        stage2.achieved_distance,
        stage1.work_extracted
    )
    .map_err(io)?;
    w.flush().map_err(io)?;
    let plot = plot_path(path);
    gnuplot::write_protocol(&plot, path)?;
    Ok(Emitted { csv: path.to_path_buf(), plot })
}

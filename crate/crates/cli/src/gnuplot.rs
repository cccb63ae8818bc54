//! Generated gnuplot scripts, one per emitted CSV.
//!
//! The scripts are plain text referencing the sibling data file, so figures
//! are one `gnuplot <file>.gp` away without linking a plotting engine.

use std::io::Write;
use std::path::Path;

use entherm_core::dynamics::Setup;

use crate::runner::DeltaSweepBlock;

fn open(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, String> {
    let file = std::fs::File::create(path)
        .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    Ok(std::io::BufWriter::new(file))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

fn header(out: &mut impl Write, data: &Path, png: &str) -> std::io::Result<()> {
    writeln!(out, "# generated by entherm; run with: gnuplot {png}.gp")?;
    writeln!(out, "set datafile separator \",\"")?;
    writeln!(out, "set datafile commentschars \"#\"")?;
    writeln!(out, "set terminal pngcairo size 1100,700")?;
    writeln!(out, "set output \"{png}.png\"")?;
    writeln!(out, "set grid")?;
    writeln!(out, "data = \"{}\"", file_name(data))?;
    Ok(())
}

/// Science plot for a single-setup time series.
pub fn write_simulate_single(path: &Path, data: &Path, setup: Setup) -> Result<(), String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    let stem = file_name(data).replace(".csv", "");
    header(&mut w, data, &stem).map_err(io)?;
    writeln!(w, "set logscale x").map_err(io)?;
    writeln!(w, "set xlabel \"t (s)\"").map_err(io)?;
    writeln!(w, "set title \"setup {}: populations and ergotropy\"", setup.label()).map_err(io)?;
    let parts = [
        "data using 1:2 with lines title \"pop ++\"",
        "data using 1:3 with lines title \"pop +-\"",
        "data using 1:4 with lines title \"pop -+\"",
        "data using 1:5 with lines title \"pop --\"",
        "data using 1:(abs($6)) with lines title \"|coherence|\"",
        "data using 1:14 with lines title \"concurrence\"",
    ];
    writeln!(w, "plot {}", parts.join(", \\\n     ")).map_err(io)?;
    w.flush().map_err(io)
}

/// Ergotropy-gap figure: totals and deltas for the three setups over time.
pub fn write_simulate_gap(path: &Path, data: &Path) -> Result<(), String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    let stem = file_name(data).replace(".csv", "");
    header(&mut w, data, &stem).map_err(io)?;
    writeln!(w, "set logscale x").map_err(io)?;
    writeln!(w, "set xlabel \"t (s)\"").map_err(io)?;
    writeln!(w, "set ylabel \"energy (1/s)\"").map_err(io)?;
    writeln!(w, "set title \"ergotropy of the three setups and the locality gap\"").map_err(io)?;
    let parts = [
        "data using 1:2 with lines lw 2 title \"W (both baths)\"",
        "data using 1:($3+$4) with lines dashtype 2 lw 2 title \"W_A + W_B\"",
        "data using 1:5 with lines title \"dW\"",
        "data using 1:($6+$7) with lines dashtype 2 title \"dW_A + dW_B\"",
        "data using 1:9 with lines lw 2 title \"gap dW\"",
    ];
    writeln!(w, "plot {}", parts.join(", \\\n     ")).map_err(io)?;
    w.flush().map_err(io)
}

/// Ergotropy change against the common bath temperature.
pub fn write_sweep_common(path: &Path, data: &Path) -> Result<(), String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    let stem = file_name(data).replace(".csv", "");
    header(&mut w, data, &stem).map_err(io)?;
    writeln!(w, "set xlabel \"T (K)\"").map_err(io)?;
    writeln!(w, "set ylabel \"energy (1/s)\"").map_err(io)?;
    writeln!(w, "set title \"ergotropy change vs common bath temperature\"").map_err(io)?;
    let parts = [
        "data using 1:2 with linespoints lw 2 title \"dW\"",
        "data using 1:3 with linespoints title \"dW_A\"",
        "data using 1:5 with linespoints dashtype 2 lw 2 title \"dW_A + dW_B\"",
    ];
    writeln!(w, "plot {}", parts.join(", \\\n     ")).map_err(io)?;
    w.flush().map_err(io)
}

/// Gap trajectories for each bath temperature difference.
pub fn write_sweep_delta(
    path: &Path,
    data: &Path,
    blocks: &[DeltaSweepBlock],
) -> Result<(), String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    let stem = file_name(data).replace(".csv", "");
    header(&mut w, data, &stem).map_err(io)?;
    writeln!(w, "set logscale x").map_err(io)?;
    writeln!(w, "set xlabel \"t (s)\"").map_err(io)?;
    writeln!(w, "set ylabel \"W - W_A - W_B (1/s)\"").map_err(io)?;
    writeln!(w, "set title \"locality gap vs time for bath temperature differences\"")
        .map_err(io)?;
    let mut parts = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        parts.push(format!(
            "data index {i} using 2:9 with lines lw 2 title \"dT = {} K\"",
            block.delta_temp
        ));
    }
    writeln!(w, "plot {}", parts.join(", \\\n     ")).map_err(io)?;
    w.flush().map_err(io)
}

/// Protocol convergence figure.
pub fn write_protocol(path: &Path, data: &Path) -> Result<(), String> {
    let mut w = open(path)?;
    let io = |e: std::io::Error| format!("write error: {e}");
    let stem = file_name(data).replace(".csv", "");
    header(&mut w, data, &stem).map_err(io)?;
    writeln!(w, "set logscale y").map_err(io)?;
    writeln!(w, "set xlabel \"step\"").map_err(io)?;
    writeln!(w, "set ylabel \"distance / population\"").map_err(io)?;
    writeln!(w, "set title \"thermalization protocol convergence\"").map_err(io)?;
    let parts = [
        "data using 1:8 with lines lw 2 title \"TV distance to thermal target\"",
        "data using 1:9 with lines title \"pop level 0\"",
        "data using 1:12 with lines title \"pop level 3\"",
    ];
    writeln!(w, "plot {}", parts.join(", \\\n     ")).map_err(io)?;
    w.flush().map_err(io)
}

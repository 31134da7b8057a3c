//! CSV formats for spectra, trajectories, pulses and the density of modes.
//!
//! Floats are written as `{:.16e}`, which round-trips every finite f64.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::propagation::PulseField;
use crate::spectra::SpectrumTable;
use num_complex::Complex64;
use std::io::{Read, Write};

pub const SPECTRUM_HEADER: [&str; 4] = ["delta", "re_chi", "im_chi", "absorption"];
pub const TRAJECTORY_HEADER: [&str; 5] = ["t", "re_a0", "im_a0", "re_a1", "im_a1"];
pub const PULSE_HEADER: [&str; 4] = ["t", "re_E", "im_E", "abs_E"];
pub const DOS_HEADER: [&str; 2] = ["x", "rho"];

/// Relative spacing error tolerated when reading a pulse time column.
const GRID_TOLERANCE: f64 = 1e-9;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    rows: impl Iterator<Item = [f64; N]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum<W: Write>(out: W, table: &SpectrumTable) -> Result<()> {
    write_rows(
        out,
        SPECTRUM_HEADER,
        table
            .samples
            .iter()
            .map(|s| [s.delta, s.chi.re, s.chi.im, s.absorption]),
    )
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    write_rows(
        out,
        TRAJECTORY_HEADER,
        traj.times
            .iter()
            .zip(traj.a0.iter().zip(&traj.a1))
            .map(|(&t, (a0, a1))| [t, a0.re, a0.im, a1.re, a1.im]),
    )
}

pub fn write_pulse<W: Write>(out: W, pulse: &PulseField) -> Result<()> {
    write_rows(
        out,
        PULSE_HEADER,
        pulse
            .envelope()
            .iter()
            .enumerate()
            .map(|(n, e)| [pulse.time(n), e.re, e.im, e.norm()]),
    )
}

pub fn write_dos<W: Write>(out: W, rows: &[(f64, f64)]) -> Result<()> {
    write_rows(out, DOS_HEADER, rows.iter().map(|&(x, rho)| [x, rho]))
}

/// Reads a pulse written by [`write_pulse`]; `abs_E` is ignored.
pub fn read_pulse<R: Read>(input: R, carrier: f64) -> Result<PulseField> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(PULSE_HEADER) {
        return Err(Error::Format(format!(
            "expected header {}, got {}",
            PULSE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut envelope = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record[i].trim().parse::<f64>().map_err(|e| {
                Error::Format(format!("row {}: column {}: {e}", line + 2, PULSE_HEADER[i]))
            })
        };
        times.push(field(0)?);
        envelope.push(Complex64::new(field(1)?, field(2)?));
    }
    if times.len() < 2 {
        return Err(Error::Format(format!("need at least 2 samples, got {}", times.len())));
    }
    let t0 = times[0];
    let dt = (times[times.len() - 1] - t0) / (times.len() - 1) as f64;
    for (n, &t) in times.iter().enumerate() {
        let expected = t0 + n as f64 * dt;
        if (t - expected).abs() > GRID_TOLERANCE * dt.abs().max(t.abs()) {
            return Err(Error::Format(format!(
                "time column is not uniform at row {}: {t} vs {expected}",
                n + 2
            )));
        }
    }
    PulseField::new(t0, dt, carrier, envelope)
}

//! Number formatting, complex literals and CSV emission.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::{bitstring, Histogram, MeasurementShot};
use crate::signal::{SampledSignal, TonalSignal};

/// Formats `x` with 12 significant digits, trailing zeros removed, switching
/// to exponent notation outside `[1e-5, 1e12)`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `a+bj` with both parts in [`format_float`] form.
pub fn format_complex(c: Complex64) -> String {
    let im = format_float(c.im.abs());
    let sign = if c.im.is_sign_negative() && c.im != 0.0 { '-' } else { '+' };
    format!("{}{sign}{im}j", format_float(c.re))
}

/// Parses `a+bj`, `a-bj`, `a`, `bj`, `j`, `-j`. Exponents are allowed in
/// either part.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidArgument(format!("malformed complex literal '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let imag_part = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag_part(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, imag_part(body)?)),
    }
}

/// Time-domain CSV: `time_s,re,im`.
pub fn write_signal_csv<W: Write>(out: W, signal: &SampledSignal) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time_s", "re", "im"])?;
    for (t, s) in signal.times().zip(signal.samples()) {
        w.write_record([format_float(t), format_float(s.re), format_float(s.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Spectrum CSV: `k,freq_hz,re,im`, ascending `k`.
pub fn write_spectrum_csv<W: Write>(out: W, spectrum: &TonalSignal) -> Result<()> {
    let hz = spectrum.base_frequency() / (2.0 * std::f64::consts::PI);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "freq_hz", "re", "im"])?;
    for (k, c) in spectrum.iter() {
        w.write_record([k.to_string(), format_float(k as f64 * hz), format_float(c.re), format_float(c.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Amplitude CSV: `x,bits,re,im,probability`.
pub fn write_amplitudes_csv<W: Write>(out: W, amplitudes: &[Complex64], num_qubits: usize) -> Result<()> {
    let total: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "bits", "re", "im", "probability"])?;
    for (x, a) in amplitudes.iter().enumerate() {
        let p = if total > 0.0 { a.norm_sqr() / total } else { 0.0 };
        w.write_record([
            x.to_string(),
            bitstring(x, num_qubits),
            format_float(a.re),
            format_float(a.im),
            format_float(p),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Histogram CSV: `outcome,count,frequency`.
pub fn write_histogram_csv<W: Write>(out: W, hist: &Histogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["outcome", "count", "frequency"])?;
    for (x, (&count, freq)) in hist.counts().iter().zip(hist.frequencies()).enumerate() {
        w.write_record([bitstring(x, hist.num_qubits()), count.to_string(), format_float(freq)])?;
    }
    w.flush()?;
    Ok(())
}

/// Shot log CSV: `shot,bits,u,p0`. Draws and probabilities are
/// `;`-separated in measurement order.
pub fn write_shot_log_csv<W: Write>(out: W, shots: &[MeasurementShot]) -> Result<()> {
    let join = |v: &[f64]| v.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(";");
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["shot", "bits", "u", "p0"])?;
    for (i, shot) in shots.iter().enumerate() {
        w.write_record([i.to_string(), shot.bitstring(), join(&shot.u_draws), join(&shot.probabilities)])?;
    }
    w.flush()?;
    Ok(())
}

/// Fidelity ensemble CSV: `realization,fidelity`.
pub fn write_fidelity_csv<W: Write>(out: W, fidelities: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["realization", "fidelity"])?;
    for (i, f) in fidelities.iter().enumerate() {
        w.write_record([i.to_string(), format_float(*f)])?;
    }
    w.flush()?;
    Ok(())
}

/// Row-major complex matrix, one row per line, cells `re+imj` separated by
/// single spaces.
pub fn write_complex_matrix<W: Write>(
    mut out: W,
    rows: usize,
    cols: usize,
    entry: impl Fn(usize, usize) -> Complex64,
) -> Result<()> {
    for r in 0..rows {
        let line: Vec<String> = (0..cols).map(|c| format_complex(entry(r, c))).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Inverse of [`write_complex_matrix`].
pub fn parse_complex_matrix(text: &str) -> Result<Vec<Vec<Complex64>>> {
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(parse_complex).collect())
        .collect::<Result<_>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::InvalidArgument("complex matrix is not square".into()));
    }
    Ok(rows)
}

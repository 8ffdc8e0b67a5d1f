use serde::{Deserialize, Serialize};

use crate::text::record_line;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    /// Seconds since run start.
    pub t: f64,
    pub watts: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub joules: f64,
    pub mean_watts: f64,
    pub duration: f64,
}

/// Trapezoidal integral of a power trace.
pub fn integrate_power(trace: &[PowerSample]) -> Result<EnergyReport> {
    if trace.len() < 2 {
        return Err(Error::InsufficientTrace(trace.len()));
    }
    for (i, s) in trace.iter().enumerate() {
        if !(s.t.is_finite() && s.watts.is_finite()) || s.watts < 0.0 {
            return Err(Error::MalformedTrace(format!(
                "sample {i}: t={} watts={}",
                s.t, s.watts
            )));
        }
    }
    let mut joules = 0.0;
    for (i, w) in trace.windows(2).enumerate() {
        let dt = w[1].t - w[0].t;
        if dt < 0.0 {
            return Err(Error::MalformedTrace(format!(
                "time goes backwards at sample {}: {} after {}",
                i + 1,
                w[1].t,
                w[0].t
            )));
        }
        joules += 0.5 * (w[0].watts + w[1].watts) * dt;
    }
    let duration = trace[trace.len() - 1].t - trace[0].t;
    let mean_watts = if duration > 0.0 { joules / duration } else { 0.0 };
    Ok(EnergyReport {
        joules,
        mean_watts,
        duration,
    })
}

/// Parses `t_seconds,watts` lines. A non-numeric first line is a header;
/// blank lines and lines starting with `#` are skipped.
pub fn parse_power_trace(text: &str, source: &str) -> Result<Vec<PowerSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut first = true;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| record_line(text, p.byte() as usize));
            Error::parse(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| record_line(text, p.byte() as usize));
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let header_allowed = std::mem::replace(&mut first, false);
        let parsed = match (rec.len(), rec.get(0), rec.get(1)) {
            (2, Some(t), Some(w)) => t.parse::<f64>().ok().zip(w.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((t, watts)) => {
                if !(t.is_finite() && watts.is_finite()) || watts < 0.0 {
                    return Err(Error::parse(source, line, format!("invalid sample `{t},{watts}`")));
                }
                out.push(PowerSample { t, watts });
            }
            None if header_allowed && rec.len() == 2 => {}
            None => {
                let got = rec.iter().collect::<Vec<_>>().join(",");
                return Err(Error::parse(
                    source,
                    line,
                    format!("expected `t_seconds,watts`, got `{got}`"),
                ));
            }
        }
    }
    Ok(out)
}

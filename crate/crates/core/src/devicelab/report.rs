use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::data::{DeviceKind, MeasurementRow, MeasurementTable, ResourcePct, Variant};
use super::profile::FlopSource;
use crate::{Error, Result};

/// Per-platform means over the tasks it implements, using the
/// lowest-energy variant of each task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformSummary {
    pub platform: String,
    pub kind: DeviceKind,
    pub tasks: usize,
    /// Chosen variant per task, in task order.
    pub variants: Vec<(String, Variant)>,
    /// Seconds.
    pub mean_latency: f64,
    /// Watts, as energy over latency.
    pub mean_power: f64,
    /// Kilojoules.
    pub mean_energy: f64,
    /// FLOP per joule.
    pub mean_efficiency: f64,
    pub mean_resources: Option<ResourcePct>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub platforms: Vec<PlatformSummary>,
    pub best_fpga: Option<String>,
    pub best_gpu: Option<String>,
    /// Best FPGA mean efficiency over best GPU mean efficiency.
    pub fpga_gpu_efficiency_ratio: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn best_energy_row<'a>(rows: &[&'a MeasurementRow]) -> Option<&'a MeasurementRow> {
    let mut best: Option<&MeasurementRow> = None;
    for r in rows
        .iter()
        .filter(|r| r.latency.is_some_and(|l| l > 0.0) && r.energy.is_some_and(|e| e > 0.0))
    {
        if best.is_none_or(|b| r.energy < b.energy) {
            best = Some(r);
        }
    }
    best
}

fn mean_resources(rows: &[&MeasurementRow]) -> Option<ResourcePct> {
    let pick =
        |f: fn(&ResourcePct) -> Option<f64>| mean(rows.iter().filter_map(|r| r.resource_pct.as_ref().and_then(f)));
    let r = ResourcePct {
        lut: pick(|r| r.lut),
        ff: pick(|r| r.ff),
        bram: pick(|r| r.bram),
        dsp: pick(|r| r.dsp),
    };
    (r != ResourcePct::default()).then_some(r)
}

/// Summarises every platform in the table. Tasks count only where the chosen
/// variant has both latency and energy.
pub fn report(table: &MeasurementTable, flops: FlopSource<'_>) -> Result<Report> {
    if table.rows().next().is_none() {
        return Err(Error::EmptyTable);
    }
    let mut platforms = Vec::new();
    for p in table.platforms() {
        let mut chosen: Vec<&MeasurementRow> = Vec::new();
        let mut efficiency = Vec::new();
        for t in table.tasks() {
            let Some(row) = best_energy_row(&table.rows_for(&p.name, &t.designation)) else {
                continue;
            };
            let per_sim = flops.per_sim(table, &t.designation)?;
            let total = per_sim as f64 * table.measured_paths as f64;
            efficiency.push(total / row.energy_joules().expect("energy present"));
            chosen.push(row);
        }
        if chosen.is_empty() {
            continue;
        }
        let latency = |r: &&MeasurementRow| r.latency.expect("latency present");
        let energy = |r: &&MeasurementRow| r.energy.expect("energy present");
        platforms.push(PlatformSummary {
            platform: p.name.clone(),
            kind: p.kind,
            tasks: chosen.len(),
            variants: chosen.iter().map(|r| (r.task.clone(), r.variant)).collect(),
            mean_latency: mean(chosen.iter().map(latency)).unwrap(),
            mean_power: mean(chosen.iter().map(|r| r.average_power().expect("power present"))).unwrap(),
            mean_energy: mean(chosen.iter().map(energy)).unwrap(),
            mean_efficiency: mean(efficiency.into_iter()).unwrap(),
            mean_resources: mean_resources(&chosen),
        });
    }
    if platforms.is_empty() {
        return Err(Error::EmptyTable);
    }
    let best_of = |kind: DeviceKind| {
        platforms
            .iter()
            .filter(|s| s.kind == kind)
            .fold(None::<&PlatformSummary>, |b, s| match b {
                Some(b) if b.mean_efficiency >= s.mean_efficiency => Some(b),
                _ => Some(s),
            })
    };
    let fpga = best_of(DeviceKind::Fpga);
    let gpu = best_of(DeviceKind::Gpu);
    let ratio = fpga.zip(gpu).map(|(f, g)| f.mean_efficiency / g.mean_efficiency);
    Ok(Report {
        best_fpga: fpga.map(|s| s.platform.clone()),
        best_gpu: gpu.map(|s| s.platform.clone()),
        fpga_gpu_efficiency_ratio: ratio,
        platforms,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"))
}

const COLUMNS: [&str; 11] = [
    "platform",
    "kind",
    "tasks",
    "mean_latency_s",
    "mean_power_w",
    "mean_energy_kj",
    "mean_efficiency_flop_per_j",
    "mean_lut_pct",
    "mean_ff_pct",
    "mean_bram_pct",
    "mean_dsp_pct",
];

impl PlatformSummary {
    fn cells(&self) -> [String; 11] {
        let r = self.mean_resources.unwrap_or_default();
        [
            self.platform.clone(),
            self.kind.to_string(),
            self.tasks.to_string(),
            format!("{:.2}", self.mean_latency),
            format!("{:.1}", self.mean_power),
            format!("{:.3}", self.mean_energy),
            format!("{:.4e}", self.mean_efficiency),
            opt(r.lut),
            opt(r.ff),
            opt(r.bram),
            opt(r.dsp),
        ]
    }
}

impl Report {
    fn ratio_line(&self) -> String {
        match (&self.best_fpga, &self.best_gpu, self.fpga_gpu_efficiency_ratio) {
            (Some(f), Some(g), Some(r)) => format!("fpga/gpu efficiency ratio: {r:.4} ({f} vs {g})"),
            _ => "fpga/gpu efficiency ratio: -".to_string(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for s in &self.platforms {
            out.push_str(&s.cells().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 11]> = self.platforms.iter().map(PlatformSummary::cells).collect();
        let widths: Vec<usize> = (0..COLUMNS.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([COLUMNS[i].len()]).max().unwrap())
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        };
        line(COLUMNS.to_vec(), &mut out);
        for r in &rows {
            line(r.iter().map(String::as_str).collect(), &mut out);
        }
        writeln!(out, "\n{}", self.ratio_line()).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::metrics::efficiency;

    fn summary<'a>(r: &'a Report, name: &str) -> &'a PlatformSummary {
        r.platforms.iter().find(|s| s.platform == name).unwrap()
    }

    #[test]
    fn published_table_means() {
        let r = report(&bundled::measurements(), FlopSource::Published).unwrap();
        assert_eq!(r.platforms.len(), 7);
        let k = summary(&r, "K4000");
        assert!((k.mean_latency - 15.2).abs() < 1e-12);
        let p = summary(&r, "P385-D5");
        assert!(p.variants.iter().all(|(_, v)| *v == Variant::Pp));
        assert!((p.mean_energy - 1.66).abs() < 1e-12);
        assert_eq!(r.best_fpga.as_deref(), Some("P385-D5"));
        assert_eq!(r.best_gpu.as_deref(), Some("W5000"));
        let ratio = r.fpga_gpu_efficiency_ratio.unwrap();
        assert!((1.15..=1.45).contains(&ratio), "{ratio}");
    }

    #[test]
    fn efficiency_mean_matches_independent_computation() {
        let r = report(&bundled::measurements(), FlopSource::Published).unwrap();
        let flops = [323590.0, 327686.0, 331780.0, 331781.0, 147462.0];
        let kj = [0.8, 16.1, 9.9, 11.4, 0.6];
        let want: f64 = flops
            .iter()
            .zip(kj)
            .map(|(f, e)| efficiency(f * 1e7, e * 1e3).unwrap())
            .sum::<f64>()
            / 5.0;
        assert!((summary(&r, "W5000").mean_efficiency - want).abs() / want < 1e-12);
    }

    #[test]
    fn resources_average_chosen_variants() {
        let r = report(&bundled::measurements(), FlopSource::Published).unwrap();
        assert!(summary(&r, "K4000").mean_resources.is_none());
        assert!(summary(&r, "P385-D5").mean_resources.unwrap().lut.is_some());
    }

    #[test]
    fn renderings_are_deterministic() {
        let a = report(&bundled::measurements(), FlopSource::Published).unwrap();
        let b = report(&bundled::measurements(), FlopSource::Published).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json(), b.to_json());
        let csv = a.to_csv();
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.lines().all(|l| l.split(',').count() == COLUMNS.len()));
        let k = a
            .to_text()
            .lines()
            .find(|l| l.starts_with("K4000"))
            .unwrap()
            .to_string();
        assert!(k.contains(" gpu ") && k.contains("15.20"), "{k}");
    }
}

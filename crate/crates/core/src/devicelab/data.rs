use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text::record_line;
use crate::{Error, Result};

/// Paths per task in the published measurements.
pub const MEASURED_PATHS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceKind {
    Fpga,
    Cpu,
    Gpu,
}

impl FromStr for DeviceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fpga" => Ok(Self::Fpga),
            "cpu" => Ok(Self::Cpu),
            "gpu" => Ok(Self::Gpu),
            _ => Err(Error::config(format!("unknown device kind `{s}`"))),
        }
    }
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fpga => "fpga",
            Self::Cpu => "cpu",
            Self::Gpu => "gpu",
        })
    }
}

/// Implementation variant. The declaration order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Base,
    Tp,
    Pp,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Base, Variant::Tp, Variant::Pp];
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Self::Base),
            "tp" => Ok(Self::Tp),
            "pp" => Ok(Self::Pp),
            _ => Err(Error::config(format!("unknown variant `{s}`"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Base => "base",
            Self::Tp => "tp",
            Self::Pp => "pp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCapacity {
    pub lut: u64,
    pub ff: u64,
    pub bram: u64,
    pub dsp: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourcePct {
    pub lut: Option<f64>,
    pub ff: Option<f64>,
    pub bram: Option<f64>,
    pub dsp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub name: String,
    pub kind: DeviceKind,
    pub full_name: String,
    /// Idle draw from the platform file.
    pub nominal_idle_watts: f64,
    /// Idle draw used in simulation: the nominal value, capped at the lowest
    /// average power observed in any measurement of the device.
    pub idle_watts: f64,
    /// Highest average power (energy / latency) over the device's rows.
    pub active_watts: f64,
    pub resources: Option<ResourceCapacity>,
}

/// One platform x task x variant cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub platform: String,
    pub task: String,
    pub variant: Variant,
    /// Seconds for `MEASURED_PATHS` paths.
    pub latency: Option<f64>,
    /// Kilojoules for `MEASURED_PATHS` paths.
    pub energy: Option<f64>,
    pub resource_pct: Option<ResourcePct>,
}

impl MeasurementRow {
    pub fn energy_joules(&self) -> Option<f64> {
        self.energy.map(|kj| kj * 1e3)
    }

    /// Mean draw over the run, watts.
    pub fn average_power(&self) -> Option<f64> {
        match (self.energy_joules(), self.latency) {
            (Some(e), Some(l)) if l > 0.0 => Some(e / l),
            _ => None,
        }
    }

    /// Paths per second.
    pub fn throughput(&self, measured_paths: u64) -> Option<f64> {
        self.latency.filter(|&l| l > 0.0).map(|l| measured_paths as f64 / l)
    }
}

/// Named text inputs for [`MeasurementTable::load`].
#[derive(Debug, Clone)]
pub struct DataSources {
    pub platforms: (String, String),
    pub tasks: (String, String),
    pub latency: (String, String),
    pub energy: (String, String),
    pub resources: Option<(String, String)>,
}

pub const PLATFORMS_FILE: &str = "platforms.csv";
pub const TASKS_FILE: &str = "tasks.csv";
pub const LATENCY_FILE: &str = "latency.csv";
pub const ENERGY_FILE: &str = "energy.csv";
pub const RESOURCES_FILE: &str = "resources.csv";

impl DataSources {
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<(String, String)> {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok((path.display().to_string(), text))
        };
        let resources_path = dir.join(RESOURCES_FILE);
        Ok(Self {
            platforms: read(PLATFORMS_FILE)?,
            tasks: read(TASKS_FILE)?,
            latency: read(LATENCY_FILE)?,
            energy: read(ENERGY_FILE)?,
            resources: if resources_path.exists() {
                Some(read(RESOURCES_FILE)?)
            } else {
                None
            },
        })
    }
}

/// Published task complexity row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskComplexity {
    pub designation: String,
    pub underlying: String,
    pub option: String,
    pub flop_per_sim: u64,
}

/// Immutable measurement dataset keyed by (platform, task, variant).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTable {
    platforms: Vec<DeviceProfile>,
    tasks: Vec<TaskComplexity>,
    rows: BTreeMap<(String, String, Variant), MeasurementRow>,
    pub measured_paths: u64,
}

struct Record {
    line: usize,
    fields: csv::StringRecord,
}

impl Record {
    fn fields(&self) -> Vec<&str> {
        self.fields.iter().collect()
    }
}

/// Reads a comma-separated file with a mandatory header row. Blank lines
/// and lines starting with `#` are skipped; fields are trimmed.
fn records(text: &str, source: &str, header: &[&str]) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| record_line(text, p.byte() as usize));
            Error::parse(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| record_line(text, p.byte() as usize));
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(Record { line, fields: rec });
    }
    let mut rows = out.into_iter();
    let Some(head) = rows.next() else {
        return Err(Error::EmptyTable);
    };
    if head.fields() != header {
        return Err(Error::parse(
            source,
            head.line,
            format!(
                "expected header `{}`, got `{}`",
                header.join(","),
                head.fields().join(",")
            ),
        ));
    }
    rows.map(|r| {
        if r.fields.len() != header.len() {
            return Err(Error::parse(
                source,
                r.line,
                format!("expected {} fields, got {}", header.len(), r.fields.len()),
            ));
        }
        Ok(r)
    })
    .collect()
}

fn cell<T: FromStr>(raw: &str, source: &str, line: usize, what: &str) -> Result<Option<T>> {
    if raw == "-" {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| Error::parse(source, line, format!("invalid {what} `{raw}`")))
}

fn nonneg(v: Option<f64>, source: &str, line: usize, what: &str) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x.is_finite() && x >= 0.0) => {
            Err(Error::parse(source, line, format!("{what} must be >= 0, got {x}")))
        }
        _ => Ok(v),
    }
}

const PLATFORM_HEADER: [&str; 15] = [
    "designation",
    "kind",
    "name",
    "device",
    "communication",
    "standard",
    "cmos_nm",
    "clock_mhz",
    "memory_gb",
    "threads",
    "lut",
    "ff",
    "bram",
    "dsp",
    "idle_watts",
];
const TASK_HEADER: [&str; 4] = ["designation", "underlying", "option", "flop_per_sim"];
const CELL_HEADER: [&str; 5] = ["platform", "task", "base", "tp", "pp"];
const RESOURCE_HEADER: [&str; 6] = ["platform", "resource", "task", "base", "tp", "pp"];

impl MeasurementTable {
    /// Parses and cross-checks the dataset. Rows naming an unknown platform
    /// or task are rejected; `-` cells become absent values.
    pub fn load(src: &DataSources) -> Result<Self> {
        let platforms = parse_platforms(&src.platforms.1, &src.platforms.0)?;
        let tasks = parse_tasks(&src.tasks.1, &src.tasks.0)?;
        let mut table = Self {
            platforms,
            tasks,
            rows: BTreeMap::new(),
            measured_paths: MEASURED_PATHS,
        };
        table.ingest_cells(&src.latency, true)?;
        table.ingest_cells(&src.energy, false)?;
        if let Some(res) = &src.resources {
            table.ingest_resources(res)?;
        }
        if table.rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        table.derive_power();
        Ok(table)
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        Self::load(&DataSources::from_dir(dir)?)
    }

    fn check_keys(&self, platform: &str, task: &str, source: &str, line: usize) -> Result<()> {
        if self.platform(platform).is_none() {
            return Err(Error::parse(source, line, format!("unknown platform `{platform}`")));
        }
        if self.complexity(task).is_none() {
            return Err(Error::parse(source, line, format!("unknown task `{task}`")));
        }
        Ok(())
    }

    fn row_mut(&mut self, platform: &str, task: &str, variant: Variant) -> &mut MeasurementRow {
        self.rows
            .entry((platform.to_string(), task.to_string(), variant))
            .or_insert_with(|| MeasurementRow {
                platform: platform.to_string(),
                task: task.to_string(),
                variant,
                latency: None,
                energy: None,
                resource_pct: None,
            })
    }

    fn ingest_cells(&mut self, (source, text): &(String, String), latency: bool) -> Result<()> {
        let what = if latency { "latency" } else { "energy" };
        let mut seen = std::collections::HashSet::new();
        for rec in records(text, source, &CELL_HEADER)? {
            let f = rec.fields();
            let (platform, task) = (f[0], f[1]);
            self.check_keys(platform, task, source, rec.line)?;
            if !seen.insert((platform.to_string(), task.to_string())) {
                return Err(Error::parse(
                    source,
                    rec.line,
                    format!("duplicate row for {platform}/{task}"),
                ));
            }
            for (variant, raw) in Variant::ALL.into_iter().zip(&f[2..]) {
                let v = nonneg(cell::<f64>(raw, source, rec.line, what)?, source, rec.line, what)?;
                if let Some(v) = v {
                    let row = self.row_mut(platform, task, variant);
                    if latency {
                        row.latency = Some(v);
                    } else {
                        row.energy = Some(v);
                    }
                }
            }
        }
        Ok(())
    }

    fn ingest_resources(&mut self, (source, text): &(String, String)) -> Result<()> {
        for rec in records(text, source, &RESOURCE_HEADER)? {
            let f = rec.fields();
            let (platform, resource, task) = (f[0], f[1], f[2]);
            self.check_keys(platform, task, source, rec.line)?;
            for (variant, raw) in Variant::ALL.into_iter().zip(&f[3..]) {
                let Some(pct) = cell::<f64>(raw, source, rec.line, "percentage")? else {
                    continue;
                };
                if !(0.0..=100.0).contains(&pct) {
                    return Err(Error::parse(
                        source,
                        rec.line,
                        format!("percentage {pct} outside [0, 100]"),
                    ));
                }
                // Resource use alone does not make an implementation available.
                let Some(row) = self.rows.get_mut(&(platform.to_string(), task.to_string(), variant)) else {
                    continue;
                };
                let r = row.resource_pct.get_or_insert_with(ResourcePct::default);
                let slot = match resource {
                    "lut" => &mut r.lut,
                    "ff" => &mut r.ff,
                    "bram" => &mut r.bram,
                    "dsp" => &mut r.dsp,
                    other => {
                        return Err(Error::parse(source, rec.line, format!("unknown resource `{other}`")));
                    }
                };
                *slot = Some(pct);
            }
        }
        Ok(())
    }

    fn derive_power(&mut self) {
        for p in &mut self.platforms {
            let powers: Vec<f64> = self
                .rows
                .values()
                .filter(|r| r.platform == p.name)
                .filter_map(MeasurementRow::average_power)
                .collect();
            let lowest = powers.iter().copied().fold(f64::INFINITY, f64::min);
            let highest = powers.iter().copied().fold(0.0, f64::max);
            p.idle_watts = p.nominal_idle_watts.min(lowest);
            p.active_watts = highest.max(p.idle_watts);
        }
    }

    pub fn platforms(&self) -> &[DeviceProfile] {
        &self.platforms
    }

    pub fn platform(&self, name: &str) -> Option<&DeviceProfile> {
        self.platforms.iter().find(|p| p.name == name)
    }

    pub fn tasks(&self) -> &[TaskComplexity] {
        &self.tasks
    }

    pub fn complexity(&self, task: &str) -> Option<u64> {
        self.tasks
            .iter()
            .find(|t| t.designation == task)
            .map(|t| t.flop_per_sim)
    }

    pub fn get(&self, platform: &str, task: &str, variant: Variant) -> Option<&MeasurementRow> {
        self.rows.get(&(platform.to_string(), task.to_string(), variant))
    }

    /// Rows for one platform and task, in variant order.
    pub fn rows_for(&self, platform: &str, task: &str) -> Vec<&MeasurementRow> {
        Variant::ALL
            .iter()
            .filter_map(|&v| self.get(platform, task, v))
            .collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &MeasurementRow> {
        self.rows.values()
    }

    pub fn has_task(&self, task: &str) -> bool {
        self.rows.values().any(|r| r.task == task)
    }
}

fn parse_platforms(text: &str, source: &str) -> Result<Vec<DeviceProfile>> {
    let mut out: Vec<DeviceProfile> = Vec::new();
    for rec in records(text, source, &PLATFORM_HEADER)? {
        let f = rec.fields();
        let line = rec.line;
        let name = f[0].to_string();
        if name.is_empty() || name == "-" {
            return Err(Error::parse(source, line, "empty designation"));
        }
        if out.iter().any(|p| p.name == name) {
            return Err(Error::parse(source, line, format!("duplicate platform `{name}`")));
        }
        let kind: DeviceKind = f[1]
            .parse()
            .map_err(|e: Error| Error::parse(source, line, e.to_string()))?;
        for (i, what) in [(6, "cmos_nm"), (7, "clock_mhz"), (8, "memory_gb"), (9, "threads")] {
            nonneg(cell::<f64>(f[i], source, line, what)?, source, line, what)?;
        }
        let caps: Vec<Option<u64>> = (10..14)
            .map(|i| cell::<u64>(f[i], source, line, PLATFORM_HEADER[i]))
            .collect::<Result<_>>()?;
        let resources = match caps.as_slice() {
            [Some(lut), Some(ff), Some(bram), Some(dsp)] => Some(ResourceCapacity {
                lut: *lut,
                ff: *ff,
                bram: *bram,
                dsp: *dsp,
            }),
            [None, None, None, None] => None,
            _ => {
                return Err(Error::parse(
                    source,
                    line,
                    "resource capacities must be all present or all `-`",
                ))
            }
        };
        let idle = nonneg(
            cell::<f64>(f[14], source, line, "idle_watts")?,
            source,
            line,
            "idle_watts",
        )?
        .ok_or_else(|| Error::parse(source, line, "idle_watts is required"))?;
        out.push(DeviceProfile {
            name,
            kind,
            full_name: f[2].to_string(),
            nominal_idle_watts: idle,
            idle_watts: idle,
            active_watts: idle,
            resources,
        });
    }
    Ok(out)
}

fn parse_tasks(text: &str, source: &str) -> Result<Vec<TaskComplexity>> {
    let mut out: Vec<TaskComplexity> = Vec::new();
    for rec in records(text, source, &TASK_HEADER)? {
        let f = rec.fields();
        if out.iter().any(|t| t.designation == f[0]) {
            return Err(Error::parse(source, rec.line, format!("duplicate task `{}`", f[0])));
        }
        let flop_per_sim = cell::<u64>(f[3], source, rec.line, "flop_per_sim")?
            .ok_or_else(|| Error::parse(source, rec.line, "flop_per_sim is required"))?;
        out.push(TaskComplexity {
            designation: f[0].to_string(),
            underlying: f[1].to_string(),
            option: f[2].to_string(),
            flop_per_sim,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn table() -> MeasurementTable {
        bundled::measurements()
    }

    #[test]
    fn bundled_cells() {
        let t = table();
        assert_eq!(t.get("P385-D5", "he-eu", Variant::Pp).unwrap().latency, Some(20.0));
        assert_eq!(t.get("Max4", "bl-as", Variant::Tp).unwrap().energy, Some(3.4));
        assert!(t.get("C5-SoC", "he-eu", Variant::Tp).is_none());
        assert_eq!(t.get("K4000", "he-eu", Variant::Tp).unwrap().latency, Some(14.0));
        let r = t.get("Max3", "he-ba", Variant::Tp).unwrap().resource_pct.unwrap();
        assert_eq!(
            (r.lut, r.ff, r.bram, r.dsp),
            (Some(81.0), Some(91.0), Some(50.0), Some(16.0))
        );
        assert_eq!(t.complexity("he-di"), Some(331_781));
        assert_eq!(t.rows().count(), 3 * 15 + 4 * 5);
    }

    #[test]
    fn derived_power_respects_idle_bound() {
        let t = table();
        for p in t.platforms() {
            assert!(p.active_watts >= p.idle_watts && p.idle_watts >= 0.0, "{p:?}");
        }
        assert_eq!(t.platform("Max4").unwrap().nominal_idle_watts, 240.0);
        assert_eq!(t.platform("P385-D5").unwrap().idle_watts, 69.0);
        // Cyclone V draws well under 69 W on average in every measurement.
        assert!(t.platform("C5-SoC").unwrap().idle_watts < 20.0);
    }

    fn sources(latency: &str) -> DataSources {
        let b = bundled::sources();
        DataSources {
            latency: ("lat.csv".into(), latency.to_string()),
            ..b
        }
    }

    #[test]
    fn rejects_unknown_platform_with_line_number() {
        let text = "platform,task,base,tp,pp\nP385-D5,he-eu,1,2,3\nFooBar,he-eu,1,2,3\n";
        match MeasurementTable::load(&sources(text)).unwrap_err() {
            Error::Parse { location, message } => {
                assert_eq!(location.line, 3);
                assert!(message.contains("FooBar"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn malformed_rows() {
        for (text, line) in [
            ("platform,task,base,tp,pp\nP385-D5,he-eu,1,2\n", 2),
            ("platform,task,base,tp,pp\nP385-D5,he-eu,1,x,3\n", 2),
            ("platform,task,base,tp,pp\n\n# c\nP385-D5,he-eu,1,-2,3\n", 4),
            (
                "platform,task,base,tp,pp\nP385-D5,he-eu,1,2,3\nP385-D5,he-eu,1,2,3\n",
                3,
            ),
            ("platform,task,latency\n", 1),
            ("platform,task,base,tp,pp\nP385-D5,xx-yy,1,2,3\n", 2),
        ] {
            match MeasurementTable::load(&sources(text)) {
                Err(Error::Parse { location, .. }) => assert_eq!(location.line, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn empty_file_is_an_empty_table() {
        assert!(matches!(MeasurementTable::load(&sources("")), Err(Error::EmptyTable)));
        assert!(matches!(
            MeasurementTable::load(&sources("# nothing\n\n")),
            Err(Error::EmptyTable)
        ));
    }
}

use clap::ValueEnum;
use mcbench::devicelab::PartitionPlan;
use mcbench::engine::RunResult;
use mcbench::Result;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

/// Left-aligns the first `left` columns and right-aligns the rest.
fn aligned(header: &[&str], rows: &[Vec<String>], left: usize) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap())
        .collect();
    let fmt = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i < left {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = fmt(header.to_vec());
    for r in rows {
        out.push_str(&fmt(r.iter().map(String::as_str).collect()));
    }
    out
}

fn efficiency(r: &RunResult) -> Option<f64> {
    r.energy
        .filter(|e| e.joules > 0.0)
        .map(|e| r.flops.total as f64 / e.joules)
}

const RUN_COLUMNS: [&str; 9] = [
    "task",
    "strategy",
    "paths",
    "steps",
    "seed",
    "price",
    "stderr",
    "latency_s",
    "flop_total",
];

fn run_cells(r: &RunResult) -> Vec<String> {
    vec![
        r.task.clone(),
        r.strategy.to_string(),
        r.paths.to_string(),
        r.steps.to_string(),
        r.seed.to_string(),
        r.price.to_string(),
        r.stderr.to_string(),
        format!("{:.6}", r.latency),
        r.flops.total.to_string(),
    ]
}

fn run_json(r: &RunResult) -> Result<Value> {
    let mut v = serde_json::to_value(r).expect("run result serializes");
    v["strategy"] = Value::String(r.strategy.to_string());
    if let Some(e) = efficiency(r) {
        v["efficiency_flop_per_j"] = json!(e);
    }
    Ok(v)
}

pub fn run_result(r: &RunResult, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&run_json(r)?).expect("json") + "\n",
        Format::Csv => {
            let mut header: Vec<String> = RUN_COLUMNS.iter().map(|s| s.to_string()).collect();
            header.push("flop_per_sim".into());
            let mut cells = run_cells(r);
            cells.push(r.flops.per_sim.to_string());
            if let Some(e) = r.energy {
                header.extend(["energy_j".into(), "efficiency_flop_per_j".into()]);
                cells.extend([
                    format!("{:.3}", e.joules),
                    format!("{:.4e}", efficiency(r).unwrap_or(0.0)),
                ]);
            }
            csv_line(&header) + &csv_line(&cells)
        }
        Format::Text => {
            let mut pairs: Vec<(&str, String)> = RUN_COLUMNS.iter().copied().zip(run_cells(r)).collect();
            pairs.push(("flop_per_sim", r.flops.per_sim.to_string()));
            pairs.push(("flop_path_step", r.flops.breakdown.path_step.to_string()));
            pairs.push(("flop_payoff", r.flops.breakdown.payoff.to_string()));
            pairs.push(("flop_reduce", r.flops.breakdown.reduce.to_string()));
            if let Some(e) = r.energy {
                pairs.push(("energy_j", format!("{:.3}", e.joules)));
                pairs.push(("mean_power_w", format!("{:.3}", e.mean_watts)));
                if let Some(eff) = efficiency(r) {
                    pairs.push(("efficiency_flop_per_j", format!("{eff:.4e}")));
                }
            }
            let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            pairs.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
        }
    })
}

pub fn bench(rows: &[(u32, RunResult)], format: Format) -> Result<String> {
    let mut header = vec!["repetition"];
    header.extend(RUN_COLUMNS);
    header.push("flop_per_sim");
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(rep, r)| {
            let mut c = vec![rep.to_string()];
            c.extend(run_cells(r));
            c.push(r.flops.per_sim.to_string());
            c
        })
        .collect();
    Ok(match format {
        Format::Csv => {
            let mut out = csv_line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
            for c in &cells {
                out.push_str(&csv_line(c));
            }
            out
        }
        Format::Text => aligned(&header, &cells, 3),
        Format::Json => {
            let items = rows
                .iter()
                .map(|(rep, r)| {
                    let mut v = run_json(r)?;
                    v["repetition"] = json!(rep);
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            serde_json::to_string_pretty(&items).expect("json") + "\n"
        }
    })
}

const PLAN_COLUMNS: [&str; 6] = ["task", "platform", "kind", "variant", "paths", "share"];

fn plan_rows(plan: &PartitionPlan) -> Vec<Vec<String>> {
    plan.decisions
        .iter()
        .flat_map(|d| {
            d.allocations.iter().map(move |a| {
                vec![
                    d.designation.clone(),
                    a.platform.clone(),
                    a.kind.to_string(),
                    a.variant.to_string(),
                    a.paths.to_string(),
                    format!("{:.4}", a.paths as f64 / d.paths as f64),
                ]
            })
        })
        .collect()
}

pub fn plan(plan: &PartitionPlan, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(plan).expect("json") + "\n",
        Format::Csv => {
            let mut out = csv_line(&PLAN_COLUMNS.map(String::from));
            for r in plan_rows(plan) {
                out.push_str(&csv_line(&r));
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "objective           {}\nuse_fpga            {}\nprojected_makespan  {:.3} s\nprojected_energy    {:.1} J\n\n",
                plan.objective, plan.use_fpga, plan.projected_makespan, plan.projected_energy
            );
            out.push_str(&aligned(&PLAN_COLUMNS, &plan_rows(plan), 4));
            out.push_str("\ntrace\n");
            for step in &plan.rationale {
                out.push_str("  ");
                out.push_str(step);
                out.push('\n');
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("tp:4"), "tp:4");
        assert_eq!(csv_field("combined:4,2"), "\"combined:4,2\"");
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
    }

    #[test]
    fn alignment_pads_columns() {
        let rows = vec![
            vec!["x".to_string(), "1".to_string()],
            vec!["long".to_string(), "100".to_string()],
        ];
        assert_eq!(aligned(&["k", "v"], &rows, 1), "k       v\nx       1\nlong  100\n");
    }
}

//! `dpiov report`: SVG charts from a results CSV.

use std::path::Path;

use dpiov_core::chart::charts_from_summary;
use dpiov_core::metrics::{summarize, ResultRow, RESULTS_CSV_HEADER};
use dpiov_core::{Error, Result};

use crate::config::{load_file_config, write_meta};
use crate::ReportArgs;

fn parse_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::MalformedRow {
        line: 1,
        msg: "empty results file".into(),
    })?;
    if header != RESULTS_CSV_HEADER {
        return Err(Error::MalformedRow {
            line: 1,
            msg: format!("expected header '{RESULTS_CSV_HEADER}', got '{header}'"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::MalformedRow {
                line: line_no,
                msg: format!("expected 9 fields, got {}", f.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::MalformedRow {
                line: line_no,
                msg: format!("bad {what} '{s}'"),
            })
        };
        rows.push(ResultRow {
            experiment: f[0].to_string(),
            mechanism: f[1].to_string(),
            workload: f[2].to_string(),
            domain: f[3].to_string(),
            epsilon: parse_f(f[4], "epsilon")?,
            trial: f[5].parse().map_err(|_| Error::MalformedRow {
                line: line_no,
                msg: format!("bad trial '{}'", f[5]),
            })?,
            abs_error: parse_f(f[6], "abs_error")?,
            rel_error: parse_f(f[7], "rel_error")?,
            seed: f[8].parse().map_err(|_| Error::MalformedRow {
                line: line_no,
                msg: format!("bad seed '{}'", f[8]),
            })?,
        });
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no result rows in {}",
            path.display()
        )));
    }
    Ok(rows)
}

pub fn run(args: ReportArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let input = args
        .input
        .clone()
        .or_else(|| crate::config::file_string(&file, "in").map(Into::into))
        .ok_or_else(|| Error::InvalidParameter("--in results.csv is required".into()))?;

    let rows = parse_results_csv(&input)?;
    let summary = summarize(&rows);

    let resolved = serde_json::json!({
        "command": "report",
        "in": input.display().to_string(),
        "rows": rows.len(),
    });
    std::fs::create_dir_all(&args.out)?;
    let desc = serde_json::to_string(&resolved)?;
    let mut artifacts = Vec::new();
    for (stem, svg) in charts_from_summary(&summary, &desc) {
        let name = format!("{stem}.svg");
        std::fs::write(args.out.join(&name), svg)?;
        artifacts.push(name);
    }
    write_meta(&args.out, &resolved, &artifacts)?;
    println!("wrote {} charts to {}", artifacts.len(), args.out.display());
    Ok(())
}

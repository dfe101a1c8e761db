//! `dpiov query-bench`: mechanism error sweeps.

use dpiov_core::chart::charts_from_summary;
use dpiov_core::mechanisms::Strategy;
use dpiov_core::metrics::{
    dimension_settings, mechanism_metadata_csv, preset_absolute, preset_relative, results_csv,
    run_experiment, summarize, summary_csv, trend_report, DataSource, DomainSetting,
    ExperimentSpec,
};
use dpiov_core::rng::RngSeed;
use dpiov_core::workload::WorkloadKind;
use dpiov_core::{Error, Result};

use crate::config::{
    self, config_hash, load_file_config, parse_f64_list, parse_string_list, resolve_seed,
    write_meta,
};
use crate::BenchArgs;

fn parse_workload(s: &str) -> Result<WorkloadKind> {
    match s.to_ascii_lowercase().as_str() {
        "all-range" | "allrange" | "all_range" => Ok(WorkloadKind::AllRange),
        "one-way" | "one-way-marginal" | "1-way-marginal" => Ok(WorkloadKind::KWayMarginal(1)),
        other => {
            if let Some(k) = other
                .strip_suffix("-way")
                .and_then(|p| p.parse::<usize>().ok())
            {
                return Ok(WorkloadKind::KWayMarginal(k));
            }
            Err(Error::InvalidParameter(format!(
                "unknown workload '{other}'"
            )))
        }
    }
}

pub fn run(args: BenchArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let preset = args.preset.or_else(|| config::file_string(&file, "preset"));
    let trials = args
        .trials
        .or_else(|| config::file_u64(&file, "trials").map(|v| v as u32))
        .unwrap_or(100);
    let seed = resolve_seed(args.seed, &file);
    let no_noise = args.no_noise || config::file_bool(&file, "no_noise").unwrap_or(false);

    let mechanisms_flag = args
        .mechanisms
        .map(|s| parse_string_list(&s))
        .or_else(|| config::file_string_list(&file, "mechanisms"));
    let workloads_flag = args
        .workloads
        .map(|s| parse_string_list(&s))
        .or_else(|| config::file_string_list(&file, "workloads"));
    let eps_flag = match args.eps {
        Some(s) => Some(parse_f64_list(&s)?),
        None => config::file_f64_list(&file, "eps"),
    };
    let dims_flag = args
        .dims
        .map(|s| parse_string_list(&s))
        .or_else(|| config::file_string_list(&file, "dims"));

    // start from the preset grid (or the relative defaults), then let the
    // explicit flags override individual pieces
    let mut spec: ExperimentSpec = match preset.as_deref() {
        Some("relative") | None => preset_relative(trials, RngSeed(seed)),
        Some("absolute") => preset_absolute(trials, RngSeed(seed)),
        Some(other) => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset '{other}' (expected relative or absolute)"
            )))
        }
    };
    if preset.is_none() {
        spec.id = "custom".into();
    }
    if let Some(mechs) = &mechanisms_flag {
        spec.mechanisms = mechs
            .iter()
            .map(|m| Strategy::parse(m))
            .collect::<Result<_>>()?;
    }
    if let Some(wls) = &workloads_flag {
        spec.workloads = wls
            .iter()
            .map(|w| parse_workload(w))
            .collect::<Result<_>>()?;
    }
    if let Some(eps) = &eps_flag {
        spec.epsilons = eps.clone();
    }
    if let Some(dims) = &dims_flag {
        spec.domains = dims
            .iter()
            .map(|d| {
                dimension_settings()
                    .into_iter()
                    .find(|s| s.label == *d)
                    .map_or_else(|| DomainSetting::parse(d), Ok)
            })
            .collect::<Result<_>>()?;
    }
    spec.noise_enabled = !no_noise;

    if preset.as_deref() == Some("absolute") && spec.mechanisms.contains(&Strategy::DataCube) {
        return Err(Error::IncompatibleConfig(
            "the absolute preset excludes the datacube mechanism: its measured-marginal \
             answers are dataset-dependent, so absolute errors are not comparable across \
             dimension settings"
                .into(),
        ));
    }

    match (&args.data, &args.schema) {
        (Some(table), Some(schema)) => {
            spec.data = DataSource::Fixture {
                table: table.clone(),
                schema: schema.clone(),
            };
        }
        (None, None) => {}
        _ => {
            return Err(Error::IncompatibleConfig(
                "--data and --schema must be given together".into(),
            ))
        }
    }

    let resolved = serde_json::json!({
        "command": "query-bench",
        "preset": preset,
        "mechanisms": spec.mechanisms.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "workloads": spec.workloads.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "eps": spec.epsilons,
        "dims": spec.domains.iter().map(|d| d.label.clone()).collect::<Vec<_>>(),
        "trials": trials,
        "seed": seed,
        "noise_enabled": spec.noise_enabled,
        "data": args.data.as_ref().map(|p| p.display().to_string()),
        "schema": args.schema.as_ref().map(|p| p.display().to_string()),
    });
    // tie every result row to this exact configuration
    spec.id = format!("{}-{}", spec.id, config_hash(&resolved));

    let outcome = run_experiment(&spec)?;
    let summary = summarize(&outcome.rows);

    std::fs::create_dir_all(&args.out)?;
    let mut artifacts = vec![
        "results.csv".into(),
        "summary.csv".into(),
        "mechanisms.csv".into(),
        "trends.txt".into(),
    ];
    std::fs::write(args.out.join("results.csv"), results_csv(&outcome.rows))?;
    std::fs::write(args.out.join("summary.csv"), summary_csv(&summary))?;
    std::fs::write(
        args.out.join("mechanisms.csv"),
        mechanism_metadata_csv(&spec)?,
    )?;
    std::fs::write(args.out.join("trends.txt"), trend_report(&summary))?;
    let desc = serde_json::to_string(&resolved)?;
    for (stem, svg) in charts_from_summary(&summary, &desc) {
        let name = format!("{stem}.svg");
        std::fs::write(args.out.join(&name), svg)?;
        artifacts.push(name);
    }
    write_meta(&args.out, &resolved, &artifacts)?;

    if outcome.guard_activations > 0 {
        println!(
            "note: relative-error denominator guard active in {} trials",
            outcome.guard_activations
        );
    }
    println!(
        "wrote {} result rows ({} summary cells) to {}",
        outcome.rows.len(),
        summary.len(),
        args.out.display()
    );
    Ok(())
}

//! `dpiov gen`: synthetic table fixtures.
//!
//! Samples cell probabilities from a symmetric Dirichlet, draws `records`
//! cells, and materializes raw rows: binned attributes get a uniform raw
//! value inside their bin's edge range, discrete attributes the level index.
//! The default `4x8` domain uses the heart-rate x skin-conductance schema so
//! the fixture exercises real binning.

use dpiov_core::domain::{AttributeSchema, TableSchema};
use dpiov_core::metrics::DomainSetting;
use dpiov_core::rng::RngSeed;
use dpiov_core::Result;

use crate::config::{self, load_file_config, resolve_seed, write_meta};
use crate::GenArgs;

pub fn run(args: GenArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let records = args
        .records
        .or_else(|| config::file_u64(&file, "records"))
        .unwrap_or(10_000);
    let domain_label = args
        .domain
        .or_else(|| config::file_string(&file, "domain"))
        .unwrap_or_else(|| "4x8".to_string());
    let concentration = args
        .concentration
        .or_else(|| config::file_f64(&file, "concentration"))
        .unwrap_or(1.0);
    let seed = resolve_seed(args.seed, &file);

    let schema = schema_for(&domain_label)?;
    let domain = schema.domain()?;
    let resolved = serde_json::json!({
        "command": "gen",
        "records": records,
        "domain": domain_label,
        "concentration": concentration,
        "seed": seed,
    });

    std::fs::create_dir_all(&args.out)?;
    let mut rng = RngSeed(seed).substream_named("gen").rng();

    // cell distribution, then raw rows
    let n = domain.total_size();
    let mut probs: Vec<f64> = (0..n).map(|_| rng.gamma(concentration.max(1e-6))).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }

    let mut csv = String::new();
    csv.push_str(
        &schema
            .attributes
            .iter()
            .map(|a| a.name.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    csv.push('\n');
    for _ in 0..records {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut cell = n - 1;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                cell = i;
                break;
            }
        }
        let coords = domain.decode(cell);
        let fields: Vec<String> = schema
            .attributes
            .iter()
            .zip(&coords)
            .map(|(attr, &level)| match &attr.bins {
                Some(edges) => {
                    let lo = edges[level];
                    let hi = edges[level + 1];
                    // uniform raw value inside the bin, away from the edges
                    let v = lo + (0.05 + 0.9 * rng.next_f64()) * (hi - lo);
                    format!("{v:.4}")
                }
                None => level.to_string(),
            })
            .collect();
        csv.push_str(&fields.join(","));
        csv.push('\n');
    }

    std::fs::write(args.out.join("table.csv"), csv)?;
    schema.save(args.out.join("schema.json"))?;
    write_meta(
        &args.out,
        &resolved,
        &["table.csv".into(), "schema.json".into()],
    )?;
    println!(
        "wrote {} records over {domain_label} to {}",
        records,
        args.out.display()
    );
    Ok(())
}

/// The fixture schema for a domain label: the named HR x SC binning for the
/// default 4x8 shape, plain discrete levels otherwise.
fn schema_for(label: &str) -> Result<TableSchema> {
    if label == "4x8" {
        return Ok(TableSchema {
            attributes: vec![
                AttributeSchema {
                    name: "HR".into(),
                    bins: Some(vec![50.0, 70.0, 90.0, 110.0, 130.0]),
                    levels: None,
                },
                AttributeSchema {
                    name: "SC".into(),
                    bins: Some(vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]),
                    levels: None,
                },
            ],
        });
    }
    let setting = DomainSetting::parse(label)?;
    Ok(TableSchema {
        attributes: setting
            .domain
            .attributes()
            .iter()
            .map(|a| AttributeSchema {
                name: a.name.clone(),
                bins: None,
                levels: Some(a.cardinality),
            })
            .collect(),
    })
}

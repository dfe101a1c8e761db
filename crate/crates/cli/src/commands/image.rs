//! `dpiov noise-image`: per-pixel ε sweep and montage.
//!
//! One noise stream per run shared across the ε panels (paired draws scaled
//! by 1/ε), so the visual degradation orders strictly with ε.

use dpiov_core::imaging::{dp_noise_image, load_image, montage, save_image, EPSILON_PANELS};
use dpiov_core::rng::RngSeed;
use dpiov_core::{Error, Result};

use crate::config::{self, load_file_config, parse_f64_list, resolve_seed, write_meta};
use crate::ImageArgs;

pub fn run(args: ImageArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let input = args
        .input
        .clone()
        .or_else(|| config::file_string(&file, "input").map(Into::into))
        .ok_or_else(|| Error::InvalidParameter("--input image path is required".into()))?;
    let eps_list = match &args.eps_list {
        Some(s) => parse_f64_list(s)?,
        None => config::file_f64_list(&file, "eps_list").unwrap_or_else(|| EPSILON_PANELS.to_vec()),
    };
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("--eps-list is empty".into()));
    }
    let seed = resolve_seed(args.seed, &file);

    let resolved = serde_json::json!({
        "command": "noise-image",
        "input": input.display().to_string(),
        "eps_list": eps_list,
        "seed": seed,
    });

    if !input.exists() {
        return Err(Error::InvalidParameter(format!(
            "input image not found: {}",
            input.display()
        )));
    }
    let img = load_image(&input)?;
    let ext = if img.channels() == 1 { "pgm" } else { "ppm" };
    std::fs::create_dir_all(&args.out)?;

    let mut panels = Vec::new();
    let mut labels = Vec::new();
    let mut artifacts = Vec::new();
    for &eps in &eps_list {
        let noised = dp_noise_image(&img, eps, RngSeed(seed))?;
        let name = format!("noisy_eps{eps}.{ext}");
        save_image(&noised, args.out.join(&name))?;
        artifacts.push(name);
        panels.push(noised);
        labels.push(format!("eps={eps}"));
    }
    let (sheet, caption) = montage(&panels, &labels)?;
    let montage_name = format!("montage.{ext}");
    save_image(&sheet, args.out.join(&montage_name))?;
    std::fs::write(args.out.join("caption.txt"), &caption)?;
    artifacts.push(montage_name);
    artifacts.push("caption.txt".into());
    write_meta(&args.out, &resolved, &artifacts)?;
    println!(
        "wrote {} panels and montage to {}",
        panels.len(),
        args.out.display()
    );
    Ok(())
}

//! `dpiov emulate`: the GDP/LDP sharing pipelines.
//!
//! `--net inproc` runs everything in this process. `--net tcp` binds the
//! aggregator here and spawns one OS process per vehicle node (re-executing
//! this binary with a hidden role flag); each node regenerates its own slice
//! of the fleet from the shared config, connects over loopback, and speaks
//! the newline-delimited JSON protocol.

use std::net::TcpListener;
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};

use dpiov_core::emulation::wire::{run_node, serve_aggregator, Mode};
use dpiov_core::emulation::{gdp_pipeline, gen_fleet, ldp_pipeline, FleetConfig, PipelineReport};
use dpiov_core::rng::RngSeed;
use dpiov_core::{Error, Result};

use crate::config::{self, load_file_config, parse_f64_list, resolve_seed, write_meta};
use crate::EmulateArgs;

struct Resolved {
    mode: Mode,
    net: String,
    port: u16,
    eps_list: Vec<f64>,
    eps_txt: Option<f64>,
    cfg: FleetConfig,
    seed: RngSeed,
    out: PathBuf,
}

fn resolve(args: &EmulateArgs) -> Result<Resolved> {
    let file = load_file_config(args.config.as_deref())?;
    let mode = Mode::parse(
        &args
            .mode
            .clone()
            .or_else(|| config::file_string(&file, "mode"))
            .unwrap_or_else(|| "gdp".into()),
    )?;
    let net = args
        .net
        .clone()
        .or_else(|| config::file_string(&file, "net"))
        .unwrap_or_else(|| "inproc".into());
    if net != "inproc" && net != "tcp" {
        return Err(Error::InvalidParameter(format!("unknown --net '{net}'")));
    }
    let eps_list = match &args.eps_img {
        Some(s) => parse_f64_list(s)?,
        None => config::file_f64_list(&file, "eps_img").unwrap_or_else(|| vec![1.0]),
    };
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("--eps-img list is empty".into()));
    }
    let eps_txt = args.eps_txt.or_else(|| config::file_f64(&file, "eps_txt"));
    let seed = resolve_seed(args.seed, &file);
    let defaults = FleetConfig::default();
    let cfg = FleetConfig {
        nodes: args
            .nodes
            .or_else(|| config::file_u64(&file, "nodes").map(|v| v as u32))
            .unwrap_or(defaults.nodes),
        per_node: args
            .per_node
            .or_else(|| config::file_usize(&file, "per_node"))
            .unwrap_or(defaults.per_node),
        feature_dim: args
            .features
            .or_else(|| config::file_usize(&file, "features"))
            .unwrap_or(defaults.feature_dim),
        classes: args
            .classes
            .or_else(|| config::file_u64(&file, "classes").map(|v| v as u32))
            .unwrap_or(defaults.classes),
        heterogeneity: args
            .heterogeneity
            .or_else(|| config::file_f64(&file, "heterogeneity"))
            .unwrap_or(defaults.heterogeneity),
        seed: RngSeed(seed).substream_named("fleet-data"),
    };
    Ok(Resolved {
        mode,
        net,
        port: args
            .port
            .or_else(|| config::file_u64(&file, "port").map(|v| v as u16))
            .unwrap_or(0),
        eps_list,
        eps_txt,
        cfg,
        seed: RngSeed(seed),
        out: args.out.clone(),
    })
}

pub fn run(args: EmulateArgs) -> Result<()> {
    if let Some(role) = args.internal_role.as_deref() {
        return run_internal_role(role, &args);
    }
    let r = resolve(&args)?;

    let resolved = serde_json::json!({
        "command": "emulate",
        "mode": r.mode.to_string(),
        "net": r.net,
        "eps_img": r.eps_list,
        "eps_txt": r.eps_txt,
        "nodes": r.cfg.nodes,
        "per_node": r.cfg.per_node,
        "features": r.cfg.feature_dim,
        "classes": r.cfg.classes,
        "heterogeneity": r.cfg.heterogeneity,
        "seed": r.seed.0,
    });

    std::fs::create_dir_all(&r.out)?;
    let mut artifacts = vec!["sweep.csv".into()];
    let mut sweep_csv = String::from("mode,eps_img,eps_txt,node_id,accuracy,seed\n");
    for &eps in &r.eps_list {
        let report = match r.net.as_str() {
            "inproc" => run_inproc(&r, eps)?,
            _ => run_tcp(&r, eps)?,
        };
        let name = format!("report_eps{eps}.json");
        std::fs::write(r.out.join(&name), report.to_json())?;
        artifacts.push(name);
        // sweep CSV aggregates the per-report rows
        for line in report.to_csv().lines().skip(1) {
            sweep_csv.push_str(line);
            sweep_csv.push('\n');
        }
        println!(
            "{} eps_img={eps} eps_txt={:?}: mean accuracy {:.4}",
            r.mode, r.eps_txt, report.mean_accuracy
        );
    }
    std::fs::write(r.out.join("sweep.csv"), sweep_csv)?;
    write_meta(&r.out, &resolved, &artifacts)?;
    Ok(())
}

fn run_inproc(r: &Resolved, eps: f64) -> Result<PipelineReport> {
    let fleet = gen_fleet(&r.cfg)?;
    match r.mode {
        Mode::Gdp => gdp_pipeline(&fleet, eps, r.eps_txt, r.seed),
        Mode::Ldp => ldp_pipeline(&fleet, eps, r.eps_txt, r.seed),
    }
}

fn run_tcp(r: &Resolved, eps: f64) -> Result<PipelineReport> {
    let listener = TcpListener::bind(("127.0.0.1", r.port)).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AddrInUse {
            Error::Protocol(format!("port {} already in use", r.port))
        } else {
            Error::Io(e)
        }
    })?;
    let addr = listener.local_addr()?.to_string();

    let exe = std::env::current_exe()?;
    let mut children: Vec<Child> = Vec::new();
    for node_id in 0..r.cfg.nodes {
        let mut cmd = Command::new(&exe);
        cmd.arg("emulate")
            .arg("--internal-role")
            .arg("node")
            .arg("--node-id")
            .arg(node_id.to_string())
            .arg("--connect")
            .arg(&addr)
            .arg("--mode")
            .arg(r.mode.to_string())
            .arg("--eps-img")
            .arg(eps.to_string())
            .arg("--nodes")
            .arg(r.cfg.nodes.to_string())
            .arg("--per-node")
            .arg(r.cfg.per_node.to_string())
            .arg("--features")
            .arg(r.cfg.feature_dim.to_string())
            .arg("--classes")
            .arg(r.cfg.classes.to_string())
            .arg("--heterogeneity")
            .arg(r.cfg.heterogeneity.to_string())
            .arg("--seed")
            .arg(r.seed.0.to_string())
            .stdout(Stdio::null())
            .stderr(Stdio::inherit());
        if let Some(t) = r.eps_txt {
            cmd.arg("--eps-txt").arg(t.to_string());
        }
        children.push(cmd.spawn()?);
    }

    let outcome = serve_aggregator(&listener, &r.cfg, r.mode, eps, r.eps_txt, r.seed);
    for mut child in children {
        let status = child.wait()?;
        if outcome.is_ok() && !status.success() {
            return Err(Error::Protocol(format!(
                "node process exited with {status}"
            )));
        }
    }
    Ok(outcome?.report)
}

/// Vehicle-node subprocess: regenerate this node's slice of the fleet from
/// the shared config and drive the wire protocol against the aggregator.
fn run_internal_role(role: &str, args: &EmulateArgs) -> Result<()> {
    if role != "node" {
        return Err(Error::InvalidParameter(format!(
            "unknown internal role '{role}'"
        )));
    }
    let r = resolve(args)?;
    let node_id = args
        .node_id
        .ok_or_else(|| Error::InvalidParameter("--node-id required for the node role".into()))?;
    let addr = args
        .connect
        .clone()
        .ok_or_else(|| Error::InvalidParameter("--connect required for the node role".into()))?;
    let eps = r.eps_list[0];
    let fleet = gen_fleet(&r.cfg)?;
    let node = fleet
        .into_iter()
        .find(|n| n.node_id == node_id)
        .ok_or_else(|| Error::InvalidParameter(format!("node {node_id} outside the fleet")))?;
    run_node(&addr, &node, r.mode, eps, r.eps_txt, r.seed)?;
    Ok(())
}

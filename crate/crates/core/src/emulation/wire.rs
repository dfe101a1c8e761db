//! Loopback TCP emulation of the fleet: newline-delimited JSON messages
//! between vehicle nodes and the aggregator.
//!
//! Message flow: each node connects, sends `hello` then one `data` payload
//! (GDP: raw training records; LDP: locally noised ones), and waits. Once
//! every expected node has reported, the aggregator sorts the payloads by
//! node id (the deterministic barrier, so arrival order never matters),
//! computes the same pipeline as the in-process functions, broadcasts the
//! `report`, and closes with `shutdown`. Reports are bit-identical to the
//! in-process pipelines for matched seeds.
//!
//! The aggregator keeps a log of every received message line; tests scan it
//! to confirm that no raw feature value crosses the wire in LDP mode.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::emulation::{
    gdp_pipeline, gen_fleet, ldp_localize, ldp_train_eval, FleetConfig, NodeDataset,
    PipelineReport, SampleSet,
};
use crate::error::{Error, Result};
use crate::rng::RngSeed;

pub const PROTOCOL_VERSION: u32 = 1;

const IO_TIMEOUT: Duration = Duration::from_secs(20);
const CONNECT_ATTEMPTS: u32 = 5;
const CONNECT_BACKOFF: Duration = Duration::from_millis(200);

/// Sharing regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Gdp,
    Ldp,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "gdp" => Ok(Mode::Gdp),
            "ldp" => Ok(Mode::Ldp),
            other => Err(Error::InvalidParameter(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Gdp => write!(f, "gdp"),
            Mode::Ldp => write!(f, "ldp"),
        }
    }
}

/// Wire messages, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Message {
    Hello {
        v: u32,
        node_id: u32,
    },
    Data {
        v: u32,
        node_id: u32,
        features: Vec<Vec<f64>>,
        labels: Vec<u32>,
        noised: bool,
    },
    Report {
        v: u32,
        report: PipelineReport,
    },
    Shutdown {
        v: u32,
    },
}

fn send(stream: &mut TcpStream, msg: &Message) -> Result<()> {
    let mut line = serde_json::to_string(msg)?;
    line.push('\n');
    stream.write_all(line.as_bytes())?;
    Ok(())
}

fn recv(reader: &mut BufReader<TcpStream>) -> Result<(Message, String)> {
    let mut line = String::new();
    let n = reader.read_line(&mut line).map_err(|e| match e.kind() {
        std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => {
            Error::Protocol("node timeout waiting for a message".into())
        }
        _ => Error::Io(e),
    })?;
    if n == 0 {
        return Err(Error::Protocol("connection closed mid-protocol".into()));
    }
    let msg = serde_json::from_str(line.trim_end())
        .map_err(|e| Error::Protocol(format!("malformed message: {e}")))?;
    Ok((msg, line))
}

/// What the aggregator produced: the final report plus the raw log of every
/// message line it received.
#[derive(Debug)]
pub struct ServeOutcome {
    pub report: PipelineReport,
    pub message_log: Vec<String>,
}

/// Run the aggregator side on an already-bound listener until all
/// `cfg.nodes` vehicles have delivered data, then compute, broadcast and
/// return the report.
///
/// Validation splits are regenerated locally from `cfg` (the emulation
/// shares the fleet blueprint); training data comes exclusively from the
/// received payloads.
pub fn serve_aggregator(
    listener: &TcpListener,
    cfg: &FleetConfig,
    mode: Mode,
    eps_image: f64,
    eps_text: Option<f64>,
    seed: RngSeed,
) -> Result<ServeOutcome> {
    let blueprint = gen_fleet(cfg)?;
    let expected = cfg.nodes as usize;

    let mut payloads: Vec<(u32, SampleSet, bool)> = Vec::with_capacity(expected);
    let mut streams: Vec<(u32, TcpStream)> = Vec::with_capacity(expected);
    let mut message_log = Vec::new();

    while payloads.len() < expected {
        let (stream, _addr) = listener.accept()?;
        stream.set_read_timeout(Some(IO_TIMEOUT))?;
        stream.set_write_timeout(Some(IO_TIMEOUT))?;
        let mut reader = BufReader::new(stream.try_clone()?);

        let (hello, line) = recv(&mut reader)?;
        message_log.push(line);
        let node_id = match hello {
            Message::Hello {
                v: PROTOCOL_VERSION,
                node_id,
            } => node_id,
            other => return Err(Error::Protocol(format!("expected hello, got {other:?}"))),
        };
        if payloads.iter().any(|(id, _, _)| *id == node_id) {
            return Err(Error::Protocol(format!("duplicate node_id {node_id}")));
        }
        if !blueprint.iter().any(|n| n.node_id == node_id) {
            return Err(Error::Protocol(format!("unknown node_id {node_id}")));
        }

        let (data, line) = recv(&mut reader)?;
        message_log.push(line);
        match data {
            Message::Data {
                v: PROTOCOL_VERSION,
                node_id: data_id,
                features,
                labels,
                noised,
            } => {
                if data_id != node_id {
                    return Err(Error::Protocol(format!(
                        "data node_id {data_id} does not match hello {node_id}"
                    )));
                }
                let want_noised = mode == Mode::Ldp;
                if noised != want_noised {
                    return Err(Error::Protocol(format!(
                        "{mode} mode expects noised={want_noised} payloads"
                    )));
                }
                payloads.push((node_id, SampleSet { features, labels }, noised));
            }
            other => return Err(Error::Protocol(format!("expected data, got {other:?}"))),
        }
        streams.push((node_id, stream));
    }

    // Deterministic barrier: everything randomized happens on sorted data.
    payloads.sort_by_key(|(id, _, _)| *id);
    streams.sort_by_key(|(id, _)| *id);

    let report = match mode {
        Mode::Gdp => {
            let nodes: Vec<NodeDataset> = payloads
                .iter()
                .map(|(id, train, _)| {
                    let valid = blueprint
                        .iter()
                        .find(|n| n.node_id == *id)
                        .expect("id validated against blueprint")
                        .valid
                        .clone();
                    NodeDataset {
                        node_id: *id,
                        train: train.clone(),
                        valid,
                    }
                })
                .collect();
            gdp_pipeline(&nodes, eps_image, eps_text, seed)?
        }
        Mode::Ldp => {
            let localized: Vec<(u32, SampleSet)> =
                payloads.iter().map(|(id, s, _)| (*id, s.clone())).collect();
            let valid: Vec<(u32, &SampleSet)> = payloads
                .iter()
                .map(|(id, _, _)| {
                    let node = blueprint
                        .iter()
                        .find(|n| n.node_id == *id)
                        .expect("id validated against blueprint");
                    (*id, &node.valid)
                })
                .collect();
            let classes = super::infer_classes(&blueprint);
            ldp_train_eval(&localized, &valid, classes, eps_image, eps_text, seed)?
        }
    };

    for (_, stream) in &mut streams {
        send(
            stream,
            &Message::Report {
                v: PROTOCOL_VERSION,
                report: report.clone(),
            },
        )?;
        send(
            stream,
            &Message::Shutdown {
                v: PROTOCOL_VERSION,
            },
        )?;
    }

    Ok(ServeOutcome {
        report,
        message_log,
    })
}

/// Run one vehicle node against the aggregator at `addr`: connect (with
/// retries), deliver this node's payload for the given mode, and wait for
/// the broadcast report.
pub fn run_node(
    addr: &str,
    node: &NodeDataset,
    mode: Mode,
    eps_image: f64,
    eps_text: Option<f64>,
    seed: RngSeed,
) -> Result<PipelineReport> {
    let mut stream = connect_with_retry(addr)?;
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_write_timeout(Some(IO_TIMEOUT))?;

    send(
        &mut stream,
        &Message::Hello {
            v: PROTOCOL_VERSION,
            node_id: node.node_id,
        },
    )?;
    let payload = match mode {
        Mode::Gdp => Message::Data {
            v: PROTOCOL_VERSION,
            node_id: node.node_id,
            features: node.train.features.clone(),
            labels: node.train.labels.clone(),
            noised: false,
        },
        Mode::Ldp => {
            let classes = node
                .train
                .labels
                .iter()
                .chain(&node.valid.labels)
                .copied()
                .max()
                .map_or(1, |m| m + 1);
            let localized = ldp_localize(node, classes, eps_image, eps_text, seed)?;
            Message::Data {
                v: PROTOCOL_VERSION,
                node_id: node.node_id,
                features: localized.features,
                labels: localized.labels,
                noised: true,
            }
        }
    };
    send(&mut stream, &payload)?;

    let mut reader = BufReader::new(stream.try_clone()?);
    let mut report = None;
    loop {
        let (msg, _) = recv(&mut reader)?;
        match msg {
            Message::Report { report: r, .. } => report = Some(r),
            Message::Shutdown { .. } => {
                return report.ok_or_else(|| Error::Protocol("shutdown before report".into()));
            }
            other => return Err(Error::Protocol(format!("unexpected message {other:?}"))),
        }
    }
}

fn connect_with_retry(addr: &str) -> Result<TcpStream> {
    let mut last = None;
    for attempt in 0..CONNECT_ATTEMPTS {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) => {
                last = Some(e);
                if attempt + 1 < CONNECT_ATTEMPTS {
                    std::thread::sleep(CONNECT_BACKOFF);
                }
            }
        }
    }
    Err(Error::Protocol(format!(
        "cannot reach aggregator at {addr} after {CONNECT_ATTEMPTS} attempts: {}",
        last.expect("at least one attempt")
    )))
}

//! Instance persistence in a line-oriented text format.
//!
//! `graph.txt` holds a header `n r ell seed mode`, an optional
//! `alive v1 v2 …` line (written only when some vertex is dead), and one
//! sorted line `u v colors` per edge with colors in {R, B, RB}.
//! `partitions.txt` holds one line per block: `R|B index v1 … vr`.
//! Save → load → save is byte-identical.

use crate::model::{ColoredGraph, ModelError, Partition, PartitionPair};
use crate::params::Mode;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

pub const GRAPH_FILE: &str = "graph.txt";
pub const PARTITIONS_FILE: &str = "partitions.txt";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
}

/// A saved construction: identification header, partitions, and the colored
/// graph (with its liveness mask).
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub r: u32,
    pub ell: u32,
    pub seed: u64,
    pub mode: Mode,
    pub parts: PartitionPair,
    pub g: ColoredGraph,
}

fn render_graph(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {} {} {}",
        inst.n, inst.r, inst.ell, inst.seed, inst.mode
    )
    .unwrap();
    if inst.g.alive_count() < inst.n {
        out.push_str("alive");
        for v in inst.g.alive().iter() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    let union = inst.g.union_all();
    for u in 0..inst.n {
        for v in union.neighbors(u) {
            if v <= u {
                continue;
            }
            let colors = inst.g.edge_colors(u as u32, v as u32);
            writeln!(out, "{u} {v} {}", colors.as_str()).unwrap();
        }
    }
    out
}

fn render_partitions(parts: &PartitionPair) -> String {
    let mut out = String::new();
    for (tag, part) in [("R", &parts.red), ("B", &parts.blue)] {
        for (idx, block) in part.blocks().iter().enumerate() {
            write!(out, "{tag} {idx}").unwrap();
            for &v in block {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Write `graph.txt` and `partitions.txt` under `dir`, creating it if needed.
pub fn save_instance(dir: &Path, inst: &Instance) -> Result<(), IoError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(GRAPH_FILE), render_graph(inst))?;
    std::fs::write(dir.join(PARTITIONS_FILE), render_partitions(&inst.parts))?;
    Ok(())
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_tok<T: FromStr>(tok: &str, what: &str, path: &Path, line: usize) -> Result<T, IoError> {
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what}: {tok:?}")))
}

fn load_partitions(path: &Path, n: usize, r: u32) -> Result<PartitionPair, IoError> {
    let text = std::fs::read_to_string(path)?;
    let mut red: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut blue: Vec<(usize, Vec<u32>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut toks = line.split_whitespace();
        let tag = toks
            .next()
            .ok_or_else(|| parse_err(path, lineno, "empty line"))?;
        let idx: usize = parse_tok(
            toks.next()
                .ok_or_else(|| parse_err(path, lineno, "missing block index"))?,
            "block index",
            path,
            lineno,
        )?;
        let verts = toks
            .map(|t| parse_tok(t, "vertex", path, lineno))
            .collect::<Result<Vec<u32>, _>>()?;
        match tag {
            "R" => red.push((idx, verts)),
            "B" => blue.push((idx, verts)),
            other => return Err(parse_err(path, lineno, format!("unknown tag {other:?}"))),
        }
    }
    let build = |mut items: Vec<(usize, Vec<u32>)>, color: &str| -> Result<Partition, IoError> {
        items.sort_by_key(|(idx, _)| *idx);
        for (want, (idx, _)) in items.iter().enumerate() {
            if *idx != want {
                return Err(parse_err(
                    path,
                    0,
                    format!("{color} block indices are not contiguous at {idx}"),
                ));
            }
        }
        Partition::from_blocks(n, r, items.into_iter().map(|(_, b)| b).collect()).map_err(|e| {
            IoError::Model {
                path: path.display().to_string(),
                source: e,
            }
        })
    };
    Ok(PartitionPair {
        red: build(red, "red")?,
        blue: build(blue, "blue")?,
    })
}

/// Load an instance saved by [`save_instance`].
pub fn load_instance(dir: &Path) -> Result<Instance, IoError> {
    let gpath = dir.join(GRAPH_FILE);
    let text = std::fs::read_to_string(&gpath)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(&gpath, 1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 {
        return Err(parse_err(&gpath, 1, "header must be `n r ell seed mode`"));
    }
    let n: usize = parse_tok(toks[0], "n", &gpath, 1)?;
    let r: u32 = parse_tok(toks[1], "r", &gpath, 1)?;
    let ell: u32 = parse_tok(toks[2], "ell", &gpath, 1)?;
    let seed: u64 = parse_tok(toks[3], "seed", &gpath, 1)?;
    let mode = Mode::from_str(toks[4]).map_err(|e| parse_err(&gpath, 1, e))?;

    let parts = load_partitions(&dir.join(PARTITIONS_FILE), n, r)?;

    let mut alive: Option<Vec<u32>> = None;
    let mut edges = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let mut toks = line.split_whitespace();
        let first = match toks.next() {
            Some(t) => t,
            None => return Err(parse_err(&gpath, lineno, "empty line")),
        };
        if first == "alive" {
            if alive.is_some() || !edges.is_empty() {
                return Err(parse_err(
                    &gpath,
                    lineno,
                    "alive line must appear once, before edges",
                ));
            }
            alive = Some(
                toks.map(|t| parse_tok(t, "vertex", &gpath, lineno))
                    .collect::<Result<Vec<u32>, _>>()?,
            );
            continue;
        }
        let u: u32 = parse_tok(first, "vertex", &gpath, lineno)?;
        let v: u32 = parse_tok(
            toks.next()
                .ok_or_else(|| parse_err(&gpath, lineno, "edge line needs `u v colors`"))?,
            "vertex",
            &gpath,
            lineno,
        )?;
        let ctok = toks
            .next()
            .ok_or_else(|| parse_err(&gpath, lineno, "edge line needs `u v colors`"))?;
        let colors = crate::model::EdgeColors::parse(ctok)
            .ok_or_else(|| parse_err(&gpath, lineno, format!("invalid colors {ctok:?}")))?;
        if toks.next().is_some() {
            return Err(parse_err(&gpath, lineno, "trailing tokens on edge line"));
        }
        edges.push((u, v, colors));
    }

    let mut g = ColoredGraph::from_edge_lists(n, &edges, &parts).map_err(|e| IoError::Model {
        path: gpath.display().to_string(),
        source: e,
    })?;
    if let Some(live) = alive {
        let keep: std::collections::HashSet<u32> = live.into_iter().collect();
        for v in 0..n as u32 {
            if !keep.contains(&v) {
                g.kill(v);
            }
        }
    }
    Ok(Instance {
        n,
        r,
        ell,
        seed,
        mode,
        parts,
        g,
    })
}

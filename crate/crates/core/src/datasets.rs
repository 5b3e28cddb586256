//! Hyperedge-list and nverts/simplices loaders, plus summary statistics.
//!
//! The hyperedge-list format has one hyperedge per line, labels separated by
//! whitespace and/or commas. Lines starting with `#` and blank lines are
//! ignored. Labels are arbitrary tokens and are mapped to dense ids in order
//! of first appearance, unless the file opens with a `# nodes: N` line: then
//! labels must be integers in `0..N` and are used as ids directly, which keeps
//! isolated nodes across a write/load round trip.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{simplex_densities, AdjacencyView, Hypergraph, NodeId, SimplexOptions, TwoSimplexSet};

/// A hypergraph together with the original label of every dense id.
#[derive(Clone, Debug)]
pub struct LabeledHypergraph {
    pub hypergraph: Hypergraph,
    pub labels: Vec<String>,
}

#[derive(Default)]
struct LabelTable {
    ids: HashMap<String, NodeId>,
    labels: Vec<String>,
}

impl LabelTable {
    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.ids.insert(label.to_string(), id);
        self.labels.push(label.to_string());
        id
    }
}

fn parse_error(path: &Path, idx: usize, message: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: idx + 1,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses hyperedge-list text; `origin` is only used in error messages.
pub fn parse_hyperedge_list(text: &str, origin: &Path) -> Result<LabeledHypergraph> {
    let mut table = LabelTable::default();
    let mut fixed: Option<usize> = None;
    let mut edges: Vec<Vec<NodeId>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(n) = rest.trim().strip_prefix("nodes:") {
                if !edges.is_empty() || fixed.is_some() {
                    return Err(parse_error(origin, idx, "node-count header must come first"));
                }
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| parse_error(origin, idx, "malformed node-count header"))?;
                fixed = Some(n);
                table.labels = (0..n).map(|v| v.to_string()).collect();
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut edge: Vec<NodeId> = Vec::new();
        for token in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let id = match fixed {
                None => table.intern(token),
                Some(n) => match token.parse::<usize>() {
                    Ok(v) if v < n => v as NodeId,
                    _ => {
                        return Err(parse_error(
                            origin,
                            idx,
                            &format!("label `{token}` is not an id below the declared {n} nodes"),
                        ))
                    }
                },
            };
            if edge.contains(&id) {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: idx + 1,
                    message: format!("label `{token}` appears twice in one hyperedge"),
                });
            }
            edge.push(id);
        }
        if edge.is_empty() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                message: "no labels on line".into(),
            });
        }
        edges.push(edge);
    }
    let hypergraph = Hypergraph::new(table.labels.len(), edges)?;
    Ok(LabeledHypergraph {
        hypergraph,
        labels: table.labels,
    })
}

pub fn load_hyperedge_list_labeled(path: impl AsRef<Path>) -> Result<LabeledHypergraph> {
    let path = path.as_ref();
    parse_hyperedge_list(&read(path)?, path)
}

pub fn load_hyperedge_list(path: impl AsRef<Path>) -> Result<Hypergraph> {
    Ok(load_hyperedge_list_labeled(path)?.hypergraph)
}

fn parse_tokens(text: &str, path: &Path) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            out.push((idx + 1, token.to_string()));
        }
    }
    if out.is_empty() && !text.trim().is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "no tokens".into(),
        });
    }
    Ok(out)
}

/// Parses the paired nverts / simplices streams.
pub fn parse_benson(
    nverts: &str,
    simplices: &str,
    nverts_path: &Path,
    simplices_path: &Path,
) -> Result<LabeledHypergraph> {
    let sizes = parse_tokens(nverts, nverts_path)?
        .into_iter()
        .map(|(line, tok)| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                path: nverts_path.to_path_buf(),
                line,
                message: format!("`{tok}` is not a simplex size"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = parse_tokens(simplices, simplices_path)?;
    let expected: usize = sizes.iter().sum();
    if expected != labels.len() {
        return Err(Error::LengthMismatch {
            expected,
            found: labels.len(),
        });
    }
    let mut table = LabelTable::default();
    let mut edges = Vec::with_capacity(sizes.len());
    let mut cursor = 0;
    for size in sizes {
        let mut edge: Vec<NodeId> = Vec::with_capacity(size);
        for (line, tok) in &labels[cursor..cursor + size] {
            let id = table.intern(tok);
            if edge.contains(&id) {
                return Err(Error::Parse {
                    path: simplices_path.to_path_buf(),
                    line: *line,
                    message: format!("label `{tok}` appears twice in one simplex"),
                });
            }
            edge.push(id);
        }
        cursor += size;
        if !edge.is_empty() {
            edges.push(edge);
        }
    }
    let hypergraph = Hypergraph::new(table.labels.len(), edges)?;
    Ok(LabeledHypergraph {
        hypergraph,
        labels: table.labels,
    })
}

/// Loads an nverts/simplices pair, optionally collapsing repeated hyperedges.
pub fn load_benson(
    nverts_path: impl AsRef<Path>,
    simplices_path: impl AsRef<Path>,
    dedup: bool,
) -> Result<Hypergraph> {
    let (np, sp) = (nverts_path.as_ref(), simplices_path.as_ref());
    let h = parse_benson(&read(np)?, &read(sp)?, np, sp)?.hypergraph;
    Ok(if dedup { h.dedup_hyperedges() } else { h })
}

/// Locates `<name>-nverts.txt` and `<name>-simplices.txt` under `dir`.
pub fn benson_paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{name}-nverts.txt")),
        dir.join(format!("{name}-simplices.txt")),
    )
}

/// Writes the `# nodes: N` header followed by one hyperedge per line.
pub fn write_hyperedge_list<W: Write>(h: &Hypergraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# nodes: {}", h.num_nodes())?;
    for edge in h.hyperedges() {
        let mut first = true;
        for v in edge {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_hyperedge_list(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_hyperedge_list(h, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub m: usize,
    pub gcc_size: usize,
    pub mean_node_degree: f64,
    pub mean_hyperdegree: f64,
    pub k1_mean: f64,
    pub k2_mean: f64,
    pub skipped_large_hyperedges: usize,
}

impl DatasetStats {
    pub const CSV_HEADER: &'static str =
        "name,n,m,gcc_size,mean_node_degree,mean_hyperdegree,k1_mean,k2_mean,skipped_large_hyperedges";

    pub fn csv_row(&self, name: &str) -> String {
        format!(
            "{name},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.gcc_size,
            self.mean_node_degree,
            self.mean_hyperdegree,
            self.k1_mean,
            self.k2_mean,
            self.skipped_large_hyperedges
        )
    }
}

/// `n` and `m` describe the whole input; every mean is taken over the GCC.
pub fn dataset_stats(h: &Hypergraph, opts: &SimplexOptions) -> DatasetStats {
    let (gcc, _) = h.giant_component();
    let adj = AdjacencyView::build(&gcc);
    let simplices = TwoSimplexSet::build(&gcc, opts);
    let n_gcc = gcc.num_nodes();
    let mean = |total: f64| if n_gcc == 0 { 0.0 } else { total / n_gcc as f64 };
    let (k1_mean, k2_mean) = simplex_densities(&adj, &simplices);
    DatasetStats {
        n: h.num_nodes(),
        m: h.num_hyperedges(),
        gcc_size: n_gcc,
        mean_node_degree: mean(adj.degrees().iter().sum::<usize>() as f64),
        mean_hyperdegree: mean(adj.hyperdegrees().iter().map(|&d| d as u64).sum::<u64>() as f64),
        k1_mean,
        k2_mean,
        skipped_large_hyperedges: simplices.skipped_hyperedges(),
    }
}

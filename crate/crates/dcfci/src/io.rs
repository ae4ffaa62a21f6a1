//! Text formats: graphs, CSV data with a schema, CI tables, score reports,
//! results CSV and key=value files.
//!
//! Graph files list the variables in a header, then one edge per line,
//! lower-indexed vertex first:
//!
//! ```text
//! # vars: A B X Y
//! A <-o B
//! A --> Y
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dcfci_core::citest::{CiError, CiOutcome, Column, Dataset, TableSource, VarKind};
use dcfci_core::graph::{far_char, near_char, parse_far, parse_near, MixedGraph};
use dcfci_core::scoring::ScoreBounds;
use dcfci_core::vars::{CiKey, VarSet, MAX_VARS};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}, line {line}: {msg}")]
    Syntax {
        context: String,
        line: usize,
        msg: String,
    },
    #[error("{context}: {msg}")]
    Invalid { context: String, msg: String },
    #[error(transparent)]
    Dataset(#[from] CiError),
}

fn syntax(context: &str, line: usize, msg: impl Into<String>) -> InputError {
    InputError::Syntax {
        context: context.to_string(),
        line,
        msg: msg.into(),
    }
}

fn invalid(context: &str, msg: impl Into<String>) -> InputError {
    InputError::Invalid {
        context: context.to_string(),
        msg: msg.into(),
    }
}

pub fn read_file(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-blank, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn vars_header(text: &str) -> Option<(usize, Vec<String>)> {
    text.lines().enumerate().find_map(|(i, l)| {
        let rest = l.trim().strip_prefix('#')?.trim().strip_prefix("vars:")?;
        Some((i + 1, rest.split_whitespace().map(str::to_string).collect()))
    })
}

fn check_names(context: &str, names: &[String]) -> Result<BTreeMap<String, usize>, InputError> {
    if names.len() > MAX_VARS {
        return Err(invalid(
            context,
            format!(
                "{} variables, at most {MAX_VARS} are supported",
                names.len()
            ),
        ));
    }
    let mut index = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(invalid(context, format!("duplicate variable {n}")));
        }
    }
    Ok(index)
}

/// Serializes a graph in the canonical edge order.
pub fn write_graph(g: &MixedGraph, names: &[String]) -> String {
    let mut out = format!("# vars: {}\n", names.join(" "));
    for (u, v, mu, mv) in g.edges() {
        let _ = writeln!(
            out,
            "{} {}-{} {}",
            names[u],
            near_char(mu),
            far_char(mv),
            names[v]
        );
    }
    out
}

pub fn parse_graph(text: &str) -> Result<(Vec<String>, MixedGraph), InputError> {
    const CTX: &str = "graph";
    let Some((_, names)) = vars_header(text) else {
        return Err(invalid(CTX, "missing '# vars:' header"));
    };
    let index = check_names(CTX, &names)?;
    let mut g = MixedGraph::new(names.len());
    for (line, l) in content_lines(text) {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        let [a, edge, b] = tokens[..] else {
            return Err(syntax(CTX, line, "expected '<name> <mark>-<mark> <name>'"));
        };
        let chars: Vec<char> = edge.chars().collect();
        let (Some(ma), Some(mb)) = (
            chars.first().copied().and_then(parse_near),
            chars.get(2).copied().and_then(parse_far),
        ) else {
            return Err(syntax(CTX, line, format!("bad edge '{edge}'")));
        };
        if chars.len() != 3 || chars[1] != '-' {
            return Err(syntax(CTX, line, format!("bad edge '{edge}'")));
        }
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| syntax(CTX, line, format!("unknown variable {n}")))
        };
        let (u, v) = (lookup(a)?, lookup(b)?);
        if u == v {
            return Err(syntax(CTX, line, "self loop"));
        }
        if g.adjacent(u, v) {
            return Err(syntax(
                CTX,
                line,
                format!("second edge between {a} and {b}"),
            ));
        }
        g.set_edge(u, v, ma, mb);
    }
    g.conforms(dcfci_core::graph::GraphClass::Pag)
        .map_err(|e| invalid(CTX, e.to_string()))?;
    Ok((names, g))
}

/// First 16 hex digits of the SHA-256 of the serialized graph.
pub fn graph_hash(g: &MixedGraph, names: &[String]) -> String {
    let digest = Sha256::digest(write_graph(g, names).as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn format_kind(k: VarKind) -> String {
    match k {
        VarKind::Continuous => "continuous".into(),
        VarKind::Binary => "binary".into(),
        VarKind::Multinomial(k) => format!("multinomial:{k}"),
    }
}

fn parse_kind(s: &str) -> Option<VarKind> {
    match s {
        "continuous" => Some(VarKind::Continuous),
        "binary" => Some(VarKind::Binary),
        _ => {
            let k: usize = s.strip_prefix("multinomial:")?.parse().ok()?;
            (k >= 2).then_some(VarKind::Multinomial(k))
        }
    }
}

/// `name=kind` per line.
pub fn parse_schema(text: &str) -> Result<Vec<(String, VarKind)>, InputError> {
    const CTX: &str = "schema";
    let mut out: Vec<(String, VarKind)> = Vec::new();
    for (line, l) in content_lines(text) {
        let Some((name, kind)) = l.split_once('=') else {
            return Err(syntax(CTX, line, "expected name=kind"));
        };
        let (name, kind) = (name.trim(), kind.trim());
        if name.is_empty() {
            return Err(syntax(CTX, line, "empty variable name"));
        }
        let kind = parse_kind(kind).ok_or_else(|| {
            syntax(
                CTX,
                line,
                format!("unknown kind '{kind}' (continuous, binary or multinomial:K)"),
            )
        })?;
        if out.iter().any(|(n, _)| n == name) {
            return Err(syntax(CTX, line, format!("{name} declared twice")));
        }
        out.push((name.to_string(), kind));
    }
    Ok(out)
}

pub fn write_schema(d: &Dataset) -> String {
    d.names()
        .iter()
        .zip(d.kinds())
        .map(|(n, k)| format!("{n}={}\n", format_kind(*k)))
        .collect()
}

/// Reads CSV data typed by a schema. Columns follow the CSV header; every
/// header name must be declared.
pub fn read_dataset(csv_text: &str, schema: &[(String, VarKind)]) -> Result<Dataset, InputError> {
    const CTX: &str = "data";
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| invalid(CTX, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    check_names(CTX, &header)?;
    let kinds: Vec<VarKind> = header
        .iter()
        .map(|h| {
            schema
                .iter()
                .find(|(n, _)| n == h)
                .map(|(_, k)| *k)
                .ok_or_else(|| invalid(CTX, format!("column {h} missing from the schema")))
        })
        .collect::<Result<_, _>>()?;
    if let Some((n, _)) = schema.iter().find(|(n, _)| !header.contains(n)) {
        return Err(invalid(CTX, format!("schema variable {n} has no column")));
    }
    let mut cont: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    let mut cat: Vec<Vec<u32>> = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| syntax(CTX, line, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(syntax(
                CTX,
                line,
                format!("{} fields, expected {}", rec.len(), header.len()),
            ));
        }
        for (j, cell) in rec.iter().enumerate() {
            match kinds[j] {
                VarKind::Continuous => {
                    let v: f64 = cell.parse().map_err(|_| {
                        syntax(
                            CTX,
                            line,
                            format!("{}: '{cell}' is not a number", header[j]),
                        )
                    })?;
                    cont[j].push(v);
                }
                _ => {
                    let v: u32 = cell.parse().map_err(|_| {
                        syntax(
                            CTX,
                            line,
                            format!("{}: '{cell}' is not a level code", header[j]),
                        )
                    })?;
                    cat[j].push(v);
                }
            }
        }
    }
    let columns = kinds
        .iter()
        .zip(cont.into_iter().zip(cat))
        .map(|(k, (c, l))| {
            if *k == VarKind::Continuous {
                Column::Continuous(c)
            } else {
                Column::Categorical(l)
            }
        })
        .collect();
    Ok(Dataset::new(header, kinds, columns)?)
}

/// CSV text of a dataset. Reals use the shortest representation that reads
/// back to the same value.
pub fn write_dataset(d: &Dataset) -> String {
    let mut out = d.names().join(",");
    out.push('\n');
    for i in 0..d.n() {
        for v in 0..d.p() {
            if v > 0 {
                out.push(',');
            }
            match d.column(v) {
                Column::Continuous(c) => {
                    let _ = write!(out, "{}", c[i]);
                }
                Column::Categorical(c) => {
                    let _ = write!(out, "{}", c[i]);
                }
            }
        }
        out.push('\n');
    }
    out
}

/// A table of CI outcomes over named variables:
///
/// ```text
/// # vars: A B X Y
/// X Y A,B 0.536 0.683
/// B X - 0.496 0.672
/// ```
///
/// Fields are the pair, the conditioning set (`-` when empty), the p-value
/// and the posterior probability of independence.
pub fn parse_ci_table(text: &str) -> Result<(Vec<String>, TableSource), InputError> {
    const CTX: &str = "CI table";
    let Some((_, names)) = vars_header(text) else {
        return Err(invalid(CTX, "missing '# vars:' header"));
    };
    let index = check_names(CTX, &names)?;
    let mut t = TableSource::new();
    for (line, l) in content_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        let [x, y, z, p, pi] = f[..] else {
            return Err(syntax(CTX, line, "expected 'x y z p_value p_indep'"));
        };
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| syntax(CTX, line, format!("unknown variable {n}")))
        };
        let mut zs = VarSet::EMPTY;
        if z != "-" {
            for n in z.split(',') {
                zs.insert(lookup(n)?);
            }
        }
        let key = CiKey::new(lookup(x)?, lookup(y)?, zs)
            .ok_or_else(|| syntax(CTX, line, "malformed query"))?;
        let prob = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| (0.0..=1.0).contains(v))
                .ok_or_else(|| syntax(CTX, line, format!("'{s}' is not a probability")))
        };
        t.insert(
            key,
            CiOutcome {
                p_value: prob(p)?,
                p_indep: prob(pi)?,
            },
        );
    }
    Ok((names, t))
}

pub fn write_ci_table<'a>(
    names: &[String],
    rows: impl IntoIterator<Item = (&'a CiKey, &'a CiOutcome)>,
) -> String {
    let mut out = format!("# vars: {}\n", names.join(" "));
    for (k, o) in rows {
        let z = if k.z.is_empty() {
            "-".to_string()
        } else {
            k.z.iter()
                .map(|v| names[v].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(
            out,
            "{} {} {z} {:e} {:e}",
            names[k.x], names[k.y], o.p_value, o.p_indep
        );
    }
    out
}

/// One report line: `hash lower upper |H_diff|`.
pub fn score_line(hash: &str, b: &ScoreBounds, n_diff: usize, digits: usize) -> String {
    format!("{hash} {:.digits$} {:.digits$} {n_diff}", b.lower, b.upper)
}

/// `key=value` lines; later keys override earlier ones.
pub fn parse_key_values(
    context: &str,
    text: &str,
) -> Result<BTreeMap<String, (usize, String)>, InputError> {
    let mut out = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let Some((k, v)) = l.split_once('=') else {
            return Err(syntax(context, line, "expected key=value"));
        };
        out.insert(k.trim().to_string(), (line, v.trim().to_string()));
    }
    Ok(out)
}

//! File loading. Expansion and graph files are told apart by their first line.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use planeval::dual_graph::{graph_from_hn, parse_graph, DualGraph};
use planeval::exactnum::{parse_rat, Rat};
use planeval::hn_model::{parse_hn, HNExpansion};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] planeval::Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {inner}")]
    InFile {
        path: PathBuf,
        inner: planeval::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) | CliError::InFile { inner: e, .. } => e.exit_code() as u8,
            CliError::Read { .. } => 2,
            CliError::Write { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file(path: &Path) -> impl Fn(planeval::Error) -> CliError + '_ {
    move |inner| CliError::InFile {
        path: path.to_path_buf(),
        inner,
    }
}

fn is_graph(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("s="))
}

/// An expansion, validated. Graph files give their structural expansion.
pub fn load_hn(path: &Path) -> CliResult<HNExpansion> {
    let text = read(path)?;
    let hn = if is_graph(&text) {
        parse_graph(&text).and_then(|g| g.hn_structure())
    } else {
        parse_hn(&text)
    }
    .map_err(in_file(path))?;
    hn.check().map_err(in_file(path))?;
    Ok(hn)
}

/// A dual graph from a graph file or from an expansion file.
pub fn load_graph(path: &Path) -> CliResult<DualGraph> {
    let text = read(path)?;
    if is_graph(&text) {
        let g = parse_graph(&text).map_err(in_file(path))?;
        // a graph is valid when it is rebuilt from its own expansion
        g.hn_structure().map_err(in_file(path))?;
        return Ok(g);
    }
    let hn = parse_hn(&text).map_err(in_file(path))?;
    hn.check().map_err(in_file(path))?;
    graph_from_hn(&hn).map_err(in_file(path))
}

/// Whitespace separated integers, one row per line.
pub fn load_int_rows(path: &Path) -> CliResult<Vec<Vec<i64>>> {
    let text = read(path)?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row = t
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<i64>()
                    .map_err(|_| planeval::Error::parse(n + 1, 1, format!("expected an integer, found {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(in_file(path))?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_rat_list(path: &Path) -> CliResult<Vec<Rat>> {
    let text = read(path)?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| rat_arg(s).map_err(in_file(path)))
        .collect()
}

pub fn rat_arg(s: &str) -> planeval::Result<Rat> {
    Ok(parse_rat(s.trim())?)
}

//! Optional key=value configuration: the file named by --config or the
//! WKNOT_CONFIG environment variable is read first, command-line flags
//! override individual entries.

use anyhow::{bail, Context, Result};
use std::path::{Path, PathBuf};
use wknot_core::arrows::EnumerationCaps;
use wknot_core::linalg::RankMode;

#[derive(Debug, Clone)]
pub struct Config {
    pub caps: EnumerationCaps,
    pub rank_mode: RankMode,
    pub format: OutputFormat,
    pub knot_degree: usize,
    pub braid_degree: usize,
    pub corpus_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            caps: EnumerationCaps::default(),
            rank_mode: RankMode::ModularCertified,
            format: OutputFormat::Text,
            knot_degree: 4,
            braid_degree: 6,
            corpus_dir: None,
        }
    }
}

impl Config {
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let mut cfg = Config::default();
        let path = explicit
            .map(|p| p.to_path_buf())
            .or_else(|| std::env::var_os("WKNOT_CONFIG").map(PathBuf::from));
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected key=value", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "v_max" => cfg.caps.v_max = parse_pos(key, value)?,
                "w_max" => cfg.caps.w_max = parse_pos(key, value)?,
                "strands_max" => cfg.caps.strands_max = parse_pos(key, value)?,
                "knot_degree" => cfg.knot_degree = parse_pos(key, value)?,
                "braid_degree" => cfg.braid_degree = parse_pos(key, value)?,
                "rank_mode" => cfg.rank_mode = parse_rank_mode(value)?,
                "format" => cfg.format = parse_format(value)?,
                "corpus_dir" => cfg.corpus_dir = Some(PathBuf::from(value)),
                _ => bail!("config line {}: unknown key '{key}'", lineno + 1),
            }
        }
        Ok(cfg)
    }
}

fn parse_pos(key: &str, value: &str) -> Result<usize> {
    let n: usize = value
        .parse()
        .with_context(|| format!("config key {key}: '{value}' is not a number"))?;
    if n == 0 {
        bail!("config key {key} must be positive");
    }
    Ok(n)
}

pub fn parse_rank_mode(value: &str) -> Result<RankMode> {
    match value {
        "exact" | "exact-rational" => Ok(RankMode::ExactRational),
        "modular" | "modular-certified" => Ok(RankMode::ModularCertified),
        _ => bail!("rank mode must be 'exact' or 'modular', got '{value}'"),
    }
}

pub fn parse_format(value: &str) -> Result<OutputFormat> {
    match value {
        "text" => Ok(OutputFormat::Text),
        "json" => Ok(OutputFormat::Json),
        _ => bail!("format must be 'text' or 'json', got '{value}'"),
    }
}

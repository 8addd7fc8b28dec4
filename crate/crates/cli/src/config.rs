//! Run configuration: TOML file merged with command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use hamsim_core::layout::builtin_layout;
use hamsim_core::reliability::{DEFAULT_WORDS, DEFAULT_WORD_BITS};
use hamsim_core::{CountingMode, DecodeMode, LineLayout, MemoryGeometry, MultiFlipPolicy, PatternCatalog};
use serde::Deserialize;

use crate::RunArgs;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub rows: Option<u32>,
    pub cols: Option<u32>,
    pub layouts: Option<Vec<String>>,
    pub catalog: Option<PathBuf>,
    pub patterns: Option<Vec<u32>>,
    pub counting: Option<String>,
    pub policy: Option<String>,
    pub seed: Option<u64>,
    pub physical: Option<String>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    #[serde(default)]
    pub reliability: ReliabilitySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReliabilitySection {
    pub lambda: Option<f64>,
    pub calibrate: Option<String>,
    pub t_grid: Option<String>,
    pub words: Option<u32>,
    pub word_bits: Option<u32>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            other => bail!("unknown format {other:?} (expected csv, json or both)"),
        }
    }
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        self != Self::Json
    }

    pub fn json(self) -> bool {
        self != Self::Csv
    }
}

/// Evenly spaced sample times, `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for TimeGrid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        ensure!(parts.len() == 3, "time grid {s:?} must be start:stop:step");
        let num = |p: &str| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in time grid {s:?}"));
        let grid = Self {
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        };
        ensure!(
            grid.start.is_finite() && grid.stop.is_finite() && grid.start >= 0.0,
            "time grid {s:?} must start at a finite non-negative time"
        );
        ensure!(grid.step > 0.0 && grid.step.is_finite(), "time grid {s:?} needs a positive step");
        ensure!(grid.stop >= grid.start, "time grid {s:?} stops before it starts");
        Ok(grid)
    }
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// `layout:t:R`
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub layout: String,
    pub t: f64,
    pub reliability: f64,
}

impl FromStr for Anchor {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.rsplitn(3, ':');
        let (r, t, layout) = match (it.next(), it.next(), it.next()) {
            (Some(r), Some(t), Some(l)) if !l.is_empty() => (r, t, l),
            _ => bail!("calibration anchor {s:?} must be layout:t:R"),
        };
        Ok(Self {
            layout: layout.to_string(),
            t: t.parse().with_context(|| format!("bad time in anchor {s:?}"))?,
            reliability: r.parse().with_context(|| format!("bad reliability in anchor {s:?}"))?,
        })
    }
}

#[derive(Debug, Clone)]
pub enum FaultRate {
    Fixed(f64),
    Calibrated(Anchor),
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub geometry: MemoryGeometry,
    pub layouts: Vec<LineLayout>,
    pub catalog: PatternCatalog,
    pub patterns: Option<Vec<u32>>,
    pub counting: CountingMode,
    pub policy: MultiFlipPolicy,
    pub seed: u64,
    pub physical: Option<DecodeMode>,
    pub jobs: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub rate: Option<FaultRate>,
    pub grid: TimeGrid,
    pub words: u32,
    pub word_bits: u32,
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn parse_field<T: FromStr>(field: &str, value: Option<String>) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("{field}: {e}")))
        .transpose()
}

pub fn resolve_layout(spec: &str, cols: u32) -> Result<LineLayout> {
    if let Some(l) = builtin_layout(spec) {
        ensure!(
            l.cols() == cols,
            "built-in layout {} covers {} columns but the memory has {cols}",
            l.name(),
            l.cols()
        );
        return Ok(l);
    }
    let path = Path::new(spec);
    ensure!(path.is_file(), "{spec:?} is neither a built-in layout nor a layout file");
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read layout {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    LineLayout::parse(&text, cols, stem).with_context(|| format!("invalid layout file {}", path.display()))
}

impl Settings {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let rel = file.reliability;
        let geometry = MemoryGeometry::new(
            pick(args.rows, file.rows).unwrap_or(8),
            pick(args.cols, file.cols).unwrap_or(32),
        )
        .context("geometry")?;

        let names = if !args.layout.is_empty() {
            args.layout.clone()
        } else if let Some(l) = file.layouts {
            ensure!(!l.is_empty(), "layouts: the selection is empty");
            l
        } else {
            hamsim_core::builtin_layouts().iter().map(|l| l.name().to_string()).collect()
        };
        let layouts = names
            .iter()
            .map(|n| resolve_layout(n, geometry.cols).with_context(|| format!("layout {n:?}")))
            .collect::<Result<Vec<_>>>()?;

        let catalog = match pick(args.catalog.clone(), file.catalog) {
            Some(p) => {
                let text = std::fs::read_to_string(&p).with_context(|| format!("cannot read catalog {}", p.display()))?;
                PatternCatalog::parse(&text).with_context(|| format!("invalid catalog {}", p.display()))?
            }
            None => PatternCatalog::builtin(),
        };
        let patterns = if args.pattern.is_empty() { file.patterns } else { Some(args.pattern.clone()) };
        if let Some(ids) = &patterns {
            ensure!(!ids.is_empty(), "patterns: the selection is empty");
            if let Some(id) = ids.iter().find(|id| catalog.get(**id).is_none()) {
                bail!("patterns: no pattern {id} in the catalog");
            }
        }

        let rate = match (pick(args.lambda, rel.lambda), pick(args.calibrate.clone(), rel.calibrate)) {
            (Some(_), Some(_)) => bail!("give either a fault rate (lambda) or a calibration anchor, not both"),
            (Some(l), None) => {
                ensure!(l > 0.0 && l.is_finite(), "lambda must be positive, got {l}");
                Some(FaultRate::Fixed(l))
            }
            (None, Some(a)) => Some(FaultRate::Calibrated(a.parse().context("calibrate")?)),
            (None, None) => None,
        };
        let grid = parse_field::<TimeGrid>("t-grid", pick(args.t_grid.clone(), rel.t_grid))?.unwrap_or(TimeGrid {
            start: 0.0,
            stop: 3500.0,
            step: 50.0,
        });
        let words = pick(args.words, rel.words).unwrap_or(DEFAULT_WORDS);
        ensure!(words >= 1, "words must be at least 1");
        let word_bits = pick(args.word_bits, rel.word_bits).unwrap_or(DEFAULT_WORD_BITS);
        ensure!(word_bits >= 4, "word-bits must be at least 4");

        Ok(Self {
            geometry,
            layouts,
            catalog,
            patterns,
            counting: parse_field("counting", pick(args.counting.clone(), file.counting))?.unwrap_or_default(),
            policy: parse_field("policy", pick(args.policy.clone(), file.policy))?.unwrap_or_default(),
            seed: pick(args.seed, file.seed).unwrap_or(0),
            physical: parse_field("physical", pick(args.physical.clone(), file.physical))?,
            jobs: pick(args.jobs, file.jobs).unwrap_or(0),
            out: pick(args.out.clone(), file.out).unwrap_or_else(|| PathBuf::from("hamsim-out")),
            format: parse_field("format", pick(args.format.clone(), file.format))?.unwrap_or(OutputFormat::Both),
            rate,
            grid,
            words,
            word_bits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g: TimeGrid = "0:100:25".parse().unwrap();
        assert_eq!(g.points(), [0.0, 25.0, 50.0, 75.0, 100.0]);
        let g: TimeGrid = "0:1:0.1".parse().unwrap();
        assert_eq!(g.points().len(), 11);
        assert!("0:10".parse::<TimeGrid>().is_err());
        assert!("0:10:0".parse::<TimeGrid>().is_err());
        assert!("10:0:1".parse::<TimeGrid>().is_err());
        assert!("-1:3:1".parse::<TimeGrid>().is_err());
    }

    #[test]
    fn anchors_keep_commas() {
        let a: Anchor = "Ham31,26:500:0.7143".parse().unwrap();
        assert_eq!(a.layout, "Ham31,26");
        assert_eq!(a.t, 500.0);
        assert_eq!(a.reliability, 0.7143);
        assert!("500:0.7".parse::<Anchor>().is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("layoutz = []").is_err());
        let c: ConfigFile = toml::from_str("layouts = [\"Ham31,26\"]\n[reliability]\nlambda = 1e-5\n").unwrap();
        assert_eq!(c.reliability.lambda, Some(1e-5));
    }
}

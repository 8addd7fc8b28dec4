//! Presentation: one-decimal rounding, CSV tables and the JSON report document.

use serde::{Deserialize, Serialize};

use crate::campaign::{CampaignResult, CountingMode, MeanResult, MultiFlipPolicy, PhysicalResult, Rates};
use crate::error::{invalid, Result};
use crate::layout::MemoryGeometry;
use crate::reliability::RedundancyProfile;

const TIE_EPS: f64 = 1e-9;

/// Rounds to one decimal place, ties to even.
pub fn round1(x: f64) -> f64 {
    let scaled = x * 10.0;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let r = if (frac - 0.5).abs() < TIE_EPS {
        if floor % 2.0 == 0.0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        scaled.round()
    };
    r / 10.0
}

/// `100 * num / den` rounded to one decimal place, ties to even, in exact
/// integer arithmetic.
pub fn percent1(num: u64, den: u64) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let scaled = num as u128 * 1000;
    let den = den as u128;
    let (q, rem) = (scaled / den, scaled % den);
    let q = match (2 * rem).cmp(&den) {
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal if q % 2 == 1 => q + 1,
        _ => q,
    };
    q as f64 / 10.0
}

pub fn fmt1(x: f64) -> String {
    format!("{:.1}", round1(x))
}

/// Lowercase file-name stem for a layout name.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyRow {
    pub layout: String,
    #[serde(flatten)]
    pub profile: RedundancyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationAnchor {
    pub layout: String,
    pub t: f64,
    pub reliability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilitySeries {
    pub layout: String,
    pub fc_table: Vec<f64>,
    /// `(t, R(t))`
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub lambda: f64,
    pub calibration: Option<CalibrationAnchor>,
    pub word_bits: u32,
    pub words: u32,
    pub series: Vec<ReliabilitySeries>,
}

/// Everything a run produced. Serialized as the JSON report; every CSV table
/// is derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub geometry: MemoryGeometry,
    pub counting: CountingMode,
    pub policy: MultiFlipPolicy,
    pub campaigns: Vec<CampaignResult>,
    pub means: Option<MeanResult>,
    #[serde(default)]
    pub physical: Vec<PhysicalResult>,
    #[serde(default)]
    pub redundancy: Vec<RedundancyRow>,
    pub reliability: Option<ReliabilityReport>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| invalid(format!("cannot serialize report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed report: {e}")))
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut out = Vec::new();
        for c in &self.campaigns {
            out.push(pattern_table(c));
            out.push(group_table(c));
        }
        if let Some(m) = &self.means {
            out.extend(mean_tables(m));
        }
        for p in &self.physical {
            out.push(physical_table(p));
        }
        if !self.redundancy.is_empty() {
            out.push(redundancy_table(&self.redundancy));
        }
        if let Some(r) = &self.reliability {
            out.extend(reliability_tables(r));
        }
        out
    }
}

/// One CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| invalid(format!("cannot write {}: {e}", self.name));
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| invalid(format!("cannot write {}: {e}", self.name)))?;
        String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
    }
}

fn rate_cells(r: &Rates) -> [String; 3] {
    [fmt1(r.dc), fmt1(r.dnc), fmt1(r.nd)]
}

fn pattern_table(c: &CampaignResult) -> Table {
    let mut t = Table::new(
        format!("{}_patterns", slug(&c.layout)),
        &[
            "pattern", "group", "placements", "injected", "dc", "dnc", "nd", "dnc_flips", "dc_pct", "dnc_pct", "nd_pct",
        ],
    );
    for p in &c.patterns {
        let [dc, dnc, nd] = p.tally.counts(c.counting);
        let total = dc + dnc + nd;
        let mut row = vec![
            p.id.to_string(),
            p.group.label().to_string(),
            p.tally.placements.to_string(),
            p.tally.injected.to_string(),
            dc.to_string(),
            dnc.to_string(),
            nd.to_string(),
            p.tally.dnc_flips.to_string(),
        ];
        row.extend([percent1(dc, total), percent1(dnc, total), percent1(nd, total)].map(|x| format!("{x:.1}")));
        t.rows.push(row);
    }
    t
}

fn group_table(c: &CampaignResult) -> Table {
    let mut t = Table::new(
        format!("{}_groups", slug(&c.layout)),
        &[
            "group", "patterns", "injected", "dc", "dnc", "nd", "dnc_flips", "dc_pct", "dnc_pct", "nd_pct",
        ],
    );
    for g in &c.groups {
        let [dc, dnc, nd] = g.tally.counts(c.counting);
        let members = c.patterns.iter().filter(|p| p.group == g.group).count();
        let mut row = vec![
            g.group.label().to_string(),
            members.to_string(),
            g.tally.injected.to_string(),
            dc.to_string(),
            dnc.to_string(),
            nd.to_string(),
            g.tally.dnc_flips.to_string(),
        ];
        row.extend(rate_cells(&g.rates));
        t.rows.push(row);
    }
    t
}

fn mean_tables(m: &MeanResult) -> [Table; 2] {
    let mut groups = Table::new("means_groups", &["group", "layouts", "dc_pct", "dnc_pct", "nd_pct"]);
    for (g, r) in &m.groups {
        let mut row = vec![g.label().to_string(), m.layouts.len().to_string()];
        row.extend(rate_cells(r));
        groups.rows.push(row);
    }
    let mut patterns = Table::new("means_patterns", &["pattern", "layouts", "dc_pct", "dnc_pct", "nd_pct"]);
    for (id, r) in &m.patterns {
        let mut row = vec![id.to_string(), m.layouts.len().to_string()];
        row.extend(rate_cells(r));
        patterns.rows.push(row);
    }
    [groups, patterns]
}

fn physical_table(p: &PhysicalResult) -> Table {
    let mode = match p.mode {
        crate::codes::DecodeMode::Plain => "plain",
        crate::codes::DecodeMode::Extended => "extended",
    };
    let mut t = Table::new(
        format!("{}_physical_{mode}", slug(&p.layout)),
        &[
            "pattern",
            "group",
            "corrected_ok",
            "miscorrected_silent",
            "detected_uncorrectable",
            "uncovered_hit",
        ],
    );
    for r in &p.patterns {
        t.rows.push(vec![
            r.id.to_string(),
            r.group.label().to_string(),
            r.tally.corrected_ok.to_string(),
            r.tally.miscorrected_silent.to_string(),
            r.tally.detected_uncorrectable.to_string(),
            r.tally.uncovered_hit.to_string(),
        ]);
    }
    t
}

fn redundancy_table(rows: &[RedundancyRow]) -> Table {
    let mut t = Table::new("redundancy", &["layout", "parity_bits", "coded_bits", "tr_pct"]);
    for r in rows {
        t.rows.push(vec![
            r.layout.clone(),
            r.profile.parity_bits.to_string(),
            r.profile.coded_bits.to_string(),
            format!(
                "{:.1}",
                percent1(u64::from(r.profile.parity_bits), u64::from(r.profile.coded_bits))
            ),
        ]);
    }
    t
}

fn reliability_tables(r: &ReliabilityReport) -> [Table; 2] {
    let mut header = vec!["t".to_string()];
    header.extend(r.series.iter().map(|s| s.layout.clone()));
    let mut series = Table {
        name: "reliability".into(),
        header,
        rows: Vec::new(),
    };
    let steps = r.series.first().map_or(0, |s| s.points.len());
    for i in 0..steps {
        let mut row = vec![r.series[0].points[i].0.to_string()];
        row.extend(r.series.iter().map(|s| s.points[i].1.to_string()));
        series.rows.push(row);
    }
    let mut params = Table::new(
        "reliability_params",
        &["layout", "lambda", "word_bits", "words", "fc1", "fc2", "fc3", "fc4", "anchor"],
    );
    let anchor = r
        .calibration
        .as_ref()
        .map(|a| format!("{}:{}:{}", a.layout, a.t, a.reliability))
        .unwrap_or_default();
    for s in &r.series {
        let mut row = vec![
            s.layout.clone(),
            format!("{:e}", r.lambda),
            r.word_bits.to_string(),
            r.words.to_string(),
        ];
        for i in 0..4 {
            row.push(s.fc_table.get(i).map(|x| x.to_string()).unwrap_or_default());
        }
        row.push(anchor.clone());
        params.rows.push(row);
    }
    [series, params]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_even() {
        assert_eq!(round1(91.25), 91.2);
        assert_eq!(round1(93.75), 93.8);
        assert_eq!(round1(96.875), 96.9);
        assert_eq!(round1(3.125), 3.1);
        assert_eq!(round1(12.2000001), 12.2);
        assert_eq!(percent1(7, 8), 87.5);
        assert_eq!(percent1(15, 16), 93.8);
        assert_eq!(percent1(31, 32), 96.9);
        assert_eq!(percent1(1, 32), 3.1);
        assert_eq!(percent1(12, 28), 42.9);
        assert_eq!(percent1(0, 0), 0.0);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("Ham7,4,A"), "ham7_4_a");
        assert_eq!(slug("Ham15,11,7,4"), "ham15_11_7_4");
        assert_eq!(slug("my layout!"), "my_layout");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new("x", &["layout", "v"]);
        t.rows.push(vec!["Ham7,4,A".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "layout,v\n\"Ham7,4,A\",1\n");
    }
}

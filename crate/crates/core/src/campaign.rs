//! Exhaustive fault-injection sweep and DC / DNC / ND accounting.
//!
//! Classification never decodes: the simulator knows where every flip went.
//! A flip in an uncovered column is not detected (ND). Otherwise the flips
//! landing in the same code block of the same line decide: a lone flip is
//! detected and corrected (DC), two or more are detected but not corrected
//! (DNC).
//!
//! The default counting unit ([`CountingMode::Events`]) counts DC and ND per
//! flip and DNC once per affected code block. Per-flip and per-placement
//! accounting are available for sensitivity analysis.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{decode_with, encode_with, BitWord, DecodeMode, DecodeOutcome};
use crate::error::{invalid, Error, Result};
use crate::faults::{place, Cell, ErrorPattern, Group, Offset, PatternCatalog, Placement};
use crate::layout::{ColumnOwner, LineLayout, MemoryGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlipClass {
    #[serde(rename = "DC")]
    Dc,
    #[serde(rename = "DNC")]
    Dnc,
    #[serde(rename = "ND")]
    Nd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountingMode {
    /// DC and ND per flip, DNC per code block holding two or more flips.
    #[default]
    Events,
    /// Every class counted per flip.
    Flips,
    /// One class per placement: ND if any flip is ND, else DNC if any, else DC.
    Placements,
}

impl FromStr for CountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "events" => Ok(Self::Events),
            "flips" => Ok(Self::Flips),
            "placements" => Ok(Self::Placements),
            other => Err(invalid(format!("unknown counting mode {other:?}"))),
        }
    }
}

impl fmt::Display for CountingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Events => "events",
            Self::Flips => "flips",
            Self::Placements => "placements",
        })
    }
}

/// What happens to a code block hit by three or more flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiFlipPolicy {
    #[default]
    Dnc3,
    Nd3,
}

impl FromStr for MultiFlipPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dnc3" => Ok(Self::Dnc3),
            "nd3" => Ok(Self::Nd3),
            other => Err(invalid(format!("unknown policy {other:?}"))),
        }
    }
}

impl fmt::Display for MultiFlipPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dnc3 => "dnc3",
            Self::Nd3 => "nd3",
        })
    }
}

/// Classification of every injected flip of one placement, plus the number of
/// code blocks that ended up DNC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementOutcome {
    pub flips: Vec<(Cell, FlipClass)>,
    pub dnc_blocks: u32,
}

pub fn classify_placement(
    layout: &LineLayout,
    placement: &Placement,
    policy: MultiFlipPolicy,
) -> Result<PlacementOutcome> {
    for c in &placement.cells {
        if c.col == 0 || c.col > layout.cols() || c.row == 0 {
            return Err(invalid(format!(
                "cell ({},{}) outside layout {}",
                c.row,
                c.col,
                layout.name()
            )));
        }
    }
    Ok(classify_cells(layout, &placement.cells, policy))
}

fn classify_cells(layout: &LineLayout, cells: &[Cell], policy: MultiFlipPolicy) -> PlacementOutcome {
    let owners: Vec<ColumnOwner> = cells.iter().map(|c| layout.owner_unchecked(c.col)).collect();
    let hits = |row: u32, b: usize| {
        cells
            .iter()
            .zip(&owners)
            .filter(|(c, o)| c.row == row && **o == ColumnOwner::Block(b))
            .count()
    };
    let mut dnc_blocks = Vec::new();
    let flips = cells
        .iter()
        .zip(&owners)
        .map(|(c, o)| {
            let class = match *o {
                ColumnOwner::Uncovered => FlipClass::Nd,
                ColumnOwner::Block(b) => match hits(c.row, b) {
                    1 => FlipClass::Dc,
                    2 => FlipClass::Dnc,
                    _ => match policy {
                        MultiFlipPolicy::Dnc3 => FlipClass::Dnc,
                        MultiFlipPolicy::Nd3 => FlipClass::Nd,
                    },
                },
            };
            if class == FlipClass::Dnc {
                if let ColumnOwner::Block(b) = *o {
                    if !dnc_blocks.contains(&(c.row, b)) {
                        dnc_blocks.push((c.row, b));
                    }
                }
            }
            (*c, class)
        })
        .collect();
    PlacementOutcome {
        flips,
        dnc_blocks: dnc_blocks.len() as u32,
    }
}

/// Integer tallies for a set of placements. Merging is associative and
/// commutative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub placements: u64,
    pub injected: u64,
    pub dc: u64,
    pub dnc_flips: u64,
    pub dnc_blocks: u64,
    pub nd: u64,
    pub placements_dc: u64,
    pub placements_dnc: u64,
    pub placements_nd: u64,
}

impl Tally {
    pub fn merge(&mut self, o: &Tally) {
        self.placements += o.placements;
        self.injected += o.injected;
        self.dc += o.dc;
        self.dnc_flips += o.dnc_flips;
        self.dnc_blocks += o.dnc_blocks;
        self.nd += o.nd;
        self.placements_dc += o.placements_dc;
        self.placements_dnc += o.placements_dnc;
        self.placements_nd += o.placements_nd;
    }

    fn record(&mut self, out: &PlacementOutcome) {
        self.placements += 1;
        self.injected += out.flips.len() as u64;
        let mut worst = None;
        for (_, class) in &out.flips {
            match class {
                FlipClass::Dc => self.dc += 1,
                FlipClass::Dnc => self.dnc_flips += 1,
                FlipClass::Nd => self.nd += 1,
            }
            worst = Some(match (worst, class) {
                (_, FlipClass::Nd) | (Some(FlipClass::Nd), _) => FlipClass::Nd,
                (_, FlipClass::Dnc) | (Some(FlipClass::Dnc), _) => FlipClass::Dnc,
                _ => FlipClass::Dc,
            });
        }
        self.dnc_blocks += out.dnc_blocks as u64;
        match worst {
            Some(FlipClass::Dc) => self.placements_dc += 1,
            Some(FlipClass::Dnc) => self.placements_dnc += 1,
            Some(FlipClass::Nd) => self.placements_nd += 1,
            None => {}
        }
    }

    /// (DC, DNC, ND) in the given counting unit.
    pub fn counts(&self, mode: CountingMode) -> [u64; 3] {
        match mode {
            CountingMode::Events => [self.dc, self.dnc_blocks, self.nd],
            CountingMode::Flips => [self.dc, self.dnc_flips, self.nd],
            CountingMode::Placements => [self.placements_dc, self.placements_dnc, self.placements_nd],
        }
    }

    pub fn rates(&self, mode: CountingMode) -> Rates {
        Rates::from_counts(self.counts(mode))
    }
}

/// Percentages (0..=100).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub dc: f64,
    pub dnc: f64,
    pub nd: f64,
}

impl Rates {
    pub fn from_counts([dc, dnc, nd]: [u64; 3]) -> Self {
        let total = (dc + dnc + nd) as f64;
        if total == 0.0 {
            return Self::default();
        }
        Self {
            dc: 100.0 * dc as f64 / total,
            dnc: 100.0 * dnc as f64 / total,
            nd: 100.0 * nd as f64 / total,
        }
    }

    pub fn mean<'a>(items: impl IntoIterator<Item = &'a Rates>) -> Rates {
        let (mut sum, mut n) = (Rates::default(), 0usize);
        for r in items {
            sum.dc += r.dc;
            sum.dnc += r.dnc;
            sum.nd += r.nd;
            n += 1;
        }
        if n == 0 {
            return sum;
        }
        let n = n as f64;
        Rates {
            dc: sum.dc / n,
            dnc: sum.dnc / n,
            nd: sum.nd / n,
        }
    }

    pub fn get(&self, class: FlipClass) -> f64 {
        match class {
            FlipClass::Dc => self.dc,
            FlipClass::Dnc => self.dnc,
            FlipClass::Nd => self.nd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub id: u32,
    pub group: Group,
    pub offsets: Vec<Offset>,
    pub tally: Tally,
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub group: Group,
    /// Pooled over the group's patterns.
    pub tally: Tally,
    /// Unweighted mean of the member patterns' rates.
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub layout: String,
    pub geometry: MemoryGeometry,
    pub counting: CountingMode,
    pub policy: MultiFlipPolicy,
    pub patterns: Vec<PatternResult>,
    pub groups: Vec<GroupResult>,
}

impl CampaignResult {
    pub fn pattern(&self, id: u32) -> Option<&PatternResult> {
        self.patterns.iter().find(|p| p.id == id)
    }

    pub fn group(&self, g: Group) -> Option<&GroupResult> {
        self.groups.iter().find(|r| r.group == g)
    }

    pub fn total(&self) -> Tally {
        let mut t = Tally::default();
        for p in &self.patterns {
            t.merge(&p.tally);
        }
        t
    }

    /// Keeps only the listed patterns and recomputes the groups that still
    /// have members.
    pub fn restrict(&mut self, ids: &[u32]) -> Result<()> {
        if let Some(id) = ids.iter().find(|id| self.pattern(**id).is_none()) {
            return Err(invalid(format!("no pattern {id} in campaign for {}", self.layout)));
        }
        self.patterns.retain(|p| ids.contains(&p.id));
        let patterns = &self.patterns;
        self.groups.retain(|g| patterns.iter().any(|p| p.group == g.group));
        for g in &mut self.groups {
            let members: Vec<&PatternResult> = patterns.iter().filter(|p| p.group == g.group).collect();
            g.tally = Tally::default();
            for m in &members {
                g.tally.merge(&m.tally);
            }
            g.rates = Rates::mean(members.iter().map(|m| &m.rates));
        }
        Ok(())
    }

    /// Assembles a result from per-pattern tallies (in catalog order).
    pub fn from_tallies(
        layout: &LineLayout,
        catalog: &PatternCatalog,
        geom: MemoryGeometry,
        opts: &CampaignOptions,
        tallies: &[Tally],
    ) -> Self {
        let patterns: Vec<PatternResult> = catalog
            .patterns()
            .iter()
            .zip(tallies)
            .map(|(p, t)| PatternResult {
                id: p.id(),
                group: Group::of_id(p.id()).expect("validated catalog"),
                offsets: p.offsets().to_vec(),
                tally: *t,
                rates: t.rates(opts.counting),
            })
            .collect();
        let groups = Group::ALL
            .iter()
            .map(|&g| {
                let members: Vec<&PatternResult> = patterns.iter().filter(|p| p.group == g).collect();
                let mut tally = Tally::default();
                for m in &members {
                    tally.merge(&m.tally);
                }
                GroupResult {
                    group: g,
                    tally,
                    rates: Rates::mean(members.iter().map(|m| &m.rates)),
                }
            })
            .collect();
        CampaignResult {
            layout: layout.name().to_string(),
            geometry: geom,
            counting: opts.counting,
            policy: opts.policy,
            patterns,
            groups,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CampaignOptions {
    pub counting: CountingMode,
    pub policy: MultiFlipPolicy,
    /// Worker threads; 0 picks the available parallelism, 1 runs on the
    /// calling thread.
    pub jobs: usize,
}

fn check_width(layout: &LineLayout, geom: &MemoryGeometry) -> Result<()> {
    if layout.cols() != geom.cols {
        return Err(invalid(format!(
            "layout {} has {} columns but the memory has {}",
            layout.name(),
            layout.cols(),
            geom.cols
        )));
    }
    Ok(())
}

/// Number of (pattern, anchor) pairs in a full sweep.
pub fn sweep_len(catalog: &PatternCatalog, geom: &MemoryGeometry) -> usize {
    catalog.patterns().len() * geom.cells() as usize
}

fn placement_at<'a>(catalog: &'a PatternCatalog, geom: &MemoryGeometry, index: usize) -> (usize, &'a ErrorPattern, Cell) {
    let per = geom.cells() as usize;
    let pi = index / per;
    let a = (index % per) as u32;
    let anchor = Cell {
        row: a / geom.cols + 1,
        col: a % geom.cols + 1,
    };
    (pi, &catalog.patterns()[pi], anchor)
}

/// Sweeps the placements with linear index in `range` (pattern-major,
/// anchors row-major) and returns one tally per catalog pattern.
pub fn sweep_range(
    layout: &LineLayout,
    catalog: &PatternCatalog,
    geom: &MemoryGeometry,
    policy: MultiFlipPolicy,
    range: Range<usize>,
) -> Result<Vec<Tally>> {
    check_width(layout, geom)?;
    if range.end > sweep_len(catalog, geom) {
        return Err(invalid("sweep range past the end of the campaign"));
    }
    let mut tallies = vec![Tally::default(); catalog.patterns().len()];
    for index in range {
        let (pi, pattern, anchor) = placement_at(catalog, geom, index);
        let placement = place(pattern, anchor, geom)?;
        let out = classify_cells(layout, &placement.cells, policy);
        tallies[pi].record(&out);
    }
    Ok(tallies)
}

pub fn merge_tallies(mut acc: Vec<Tally>, part: &[Tally]) -> Vec<Tally> {
    for (a, p) in acc.iter_mut().zip(part) {
        a.merge(p);
    }
    acc
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("cannot start {jobs} workers: {e}")))
}

fn chunks(len: usize, jobs: usize) -> Vec<Range<usize>> {
    let parts = (jobs.max(1) * 4).min(len.max(1));
    (0..parts)
        .map(|i| (len * i / parts)..(len * (i + 1) / parts))
        .collect()
}

pub fn run_campaign(
    layout: &LineLayout,
    catalog: &PatternCatalog,
    geom: &MemoryGeometry,
    opts: &CampaignOptions,
) -> Result<CampaignResult> {
    check_width(layout, geom)?;
    let len = sweep_len(catalog, geom);
    let parts: Vec<Vec<Tally>> = if opts.jobs == 1 {
        vec![sweep_range(layout, catalog, geom, opts.policy, 0..len)?]
    } else {
        let pool = pool(opts.jobs)?;
        let ranges = chunks(len, pool.current_num_threads());
        pool.install(|| {
            ranges
                .into_par_iter()
                .map(|r| sweep_range(layout, catalog, geom, opts.policy, r))
                .collect::<Result<_>>()
        })?
    };
    let tallies = parts
        .iter()
        .fold(vec![Tally::default(); catalog.patterns().len()], |acc, p| merge_tallies(acc, p));
    Ok(CampaignResult::from_tallies(layout, catalog, *geom, opts, &tallies))
}

/// Unweighted means of several configurations' rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanResult {
    pub layouts: Vec<String>,
    pub groups: Vec<(Group, Rates)>,
    pub patterns: Vec<(u32, Rates)>,
}

impl MeanResult {
    pub fn group(&self, g: Group) -> Rates {
        self.groups.iter().find(|(x, _)| *x == g).map(|(_, r)| *r).unwrap_or_default()
    }

    pub fn pattern(&self, id: u32) -> Option<Rates> {
        self.patterns.iter().find(|(x, _)| *x == id).map(|(_, r)| *r)
    }
}

pub fn aggregate_means(results: &[CampaignResult]) -> Result<MeanResult> {
    let first = results
        .first()
        .ok_or_else(|| invalid("no campaign results to average"))?;
    for r in &results[1..] {
        let same_catalog = r.patterns.len() == first.patterns.len()
            && r
                .patterns
                .iter()
                .zip(&first.patterns)
                .all(|(a, b)| a.id == b.id && a.offsets == b.offsets);
        if !same_catalog {
            return Err(invalid(format!(
                "{} and {} were run with different catalogs",
                first.layout, r.layout
            )));
        }
        if r.geometry != first.geometry || r.counting != first.counting || r.policy != first.policy {
            return Err(invalid(format!(
                "{} and {} differ in geometry, counting mode or policy",
                first.layout, r.layout
            )));
        }
    }
    let groups = Group::ALL
        .iter()
        .map(|&g| (g, Rates::mean(results.iter().filter_map(|r| r.group(g)).map(|x| &x.rates))))
        .collect();
    let patterns = first
        .patterns
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id, Rates::mean(results.iter().map(|r| &r.patterns[i].rates))))
        .collect();
    Ok(MeanResult {
        layouts: results.iter().map(|r| r.layout.clone()).collect(),
        groups,
        patterns,
    })
}

/// Per-pattern outcome counts of a real decode. Block outcomes count code
/// blocks touched by at least one flip; `uncovered_hit` counts flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhysicalTally {
    pub corrected_ok: u64,
    pub miscorrected_silent: u64,
    pub detected_uncorrectable: u64,
    pub uncovered_hit: u64,
}

impl PhysicalTally {
    fn merge(&mut self, o: &PhysicalTally) {
        self.corrected_ok += o.corrected_ok;
        self.miscorrected_silent += o.miscorrected_silent;
        self.detected_uncorrectable += o.detected_uncorrectable;
        self.uncovered_hit += o.uncovered_hit;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalPatternResult {
    pub id: u32,
    pub group: Group,
    pub tally: PhysicalTally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalResult {
    pub layout: String,
    pub mode: DecodeMode,
    pub seed: u64,
    pub patterns: Vec<PhysicalPatternResult>,
}

/// Decodes one placement for real: every code block touched by a flip gets
/// fresh random data, is encoded, corrupted and decoded. The RNG stream is
/// keyed by the placement index so any work split gives the same answer.
fn physical_placement(
    layout: &LineLayout,
    cells: &[Cell],
    mode: DecodeMode,
    seed: u64,
    index: usize,
) -> Result<PhysicalTally> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut blocks: BTreeMap<(u32, usize), Vec<u32>> = BTreeMap::new();
    let mut tally = PhysicalTally::default();
    for c in cells {
        match layout.owner_unchecked(c.col) {
            ColumnOwner::Uncovered => tally.uncovered_hit += 1,
            ColumnOwner::Block(b) => {
                let first = layout.blocks()[b].columns[0];
                blocks.entry((c.row, b)).or_default().push(c.col - first);
            }
        }
    }
    for ((_, b), positions) in blocks {
        let code = &layout.blocks()[b].code;
        let raw: u64 = rng.gen::<u64>() & ((1u64 << code.k()) - 1);
        let data = BitWord::from_u64(raw, code.k())?;
        let mut word = encode_with(code, &data, mode)?;
        for p in positions {
            word.flip(p);
        }
        let report = decode_with(code, &word, mode)?;
        if report.outcome == DecodeOutcome::DetectedUncorrectable {
            tally.detected_uncorrectable += 1;
        } else if report.decoded_data == data {
            tally.corrected_ok += 1;
        } else {
            tally.miscorrected_silent += 1;
        }
    }
    Ok(tally)
}

pub fn run_physical(
    layout: &LineLayout,
    catalog: &PatternCatalog,
    geom: &MemoryGeometry,
    mode: DecodeMode,
    seed: u64,
    jobs: usize,
) -> Result<PhysicalResult> {
    check_width(layout, geom)?;
    let len = sweep_len(catalog, geom);
    let n = catalog.patterns().len();
    let sweep = |range: Range<usize>| -> Result<Vec<PhysicalTally>> {
        let mut acc = vec![PhysicalTally::default(); n];
        for index in range {
            let (pi, pattern, anchor) = placement_at(catalog, geom, index);
            let placement = place(pattern, anchor, geom)?;
            let t = physical_placement(layout, &placement.cells, mode, seed, index)?;
            acc[pi].merge(&t);
        }
        Ok(acc)
    };
    let parts: Vec<Vec<PhysicalTally>> = if jobs == 1 {
        vec![sweep(0..len)?]
    } else {
        let pool = pool(jobs)?;
        let ranges = chunks(len, pool.current_num_threads());
        pool.install(|| ranges.into_par_iter().map(sweep).collect::<Result<_>>())?
    };
    let mut total = vec![PhysicalTally::default(); n];
    for part in &parts {
        for (a, p) in total.iter_mut().zip(part) {
            a.merge(p);
        }
    }
    Ok(PhysicalResult {
        layout: layout.name().to_string(),
        mode,
        seed,
        patterns: catalog
            .patterns()
            .iter()
            .zip(total)
            .map(|(p, tally)| PhysicalPatternResult {
                id: p.id(),
                group: Group::of_id(p.id()).expect("validated catalog"),
                tally,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{builtin_layout, HAM3126, HAM74A};

    fn cell(row: u32, col: u32) -> Cell {
        Cell { row, col }
    }

    fn classes(layout: &str, cells: &[Cell]) -> Vec<FlipClass> {
        let l = builtin_layout(layout).unwrap();
        let p = Placement {
            anchor: cells[0],
            cells: cells.to_vec(),
        };
        classify_placement(&l, &p, MultiFlipPolicy::Dnc3)
            .unwrap()
            .flips
            .into_iter()
            .map(|(_, c)| c)
            .collect()
    }

    #[test]
    fn uncovered_flip_is_nd() {
        assert_eq!(classes(HAM3126, &[cell(3, 32)]), [FlipClass::Nd]);
    }

    #[test]
    fn two_flips_in_one_block_are_dnc() {
        assert_eq!(classes(HAM74A, &[cell(1, 3), cell(1, 5)]), [FlipClass::Dnc, FlipClass::Dnc]);
    }

    #[test]
    fn flips_straddling_a_block_boundary_are_dc() {
        let l = builtin_layout(HAM74A).unwrap();
        assert_ne!(l.block_of(7).unwrap(), l.block_of(8).unwrap());
        assert_eq!(classes(HAM74A, &[cell(1, 7), cell(1, 8)]), [FlipClass::Dc, FlipClass::Dc]);
    }

    #[test]
    fn same_column_different_rows_are_independent() {
        assert_eq!(classes(HAM3126, &[cell(1, 3), cell(2, 3)]), [FlipClass::Dc, FlipClass::Dc]);
    }

    #[test]
    fn three_flips_follow_policy() {
        let l = builtin_layout(HAM3126).unwrap();
        let p = Placement {
            anchor: cell(1, 1),
            cells: vec![cell(1, 1), cell(1, 2), cell(1, 3)],
        };
        let dnc = classify_placement(&l, &p, MultiFlipPolicy::Dnc3).unwrap();
        assert!(dnc.flips.iter().all(|(_, c)| *c == FlipClass::Dnc));
        assert_eq!(dnc.dnc_blocks, 1);
        let nd = classify_placement(&l, &p, MultiFlipPolicy::Nd3).unwrap();
        assert!(nd.flips.iter().all(|(_, c)| *c == FlipClass::Nd));
        assert_eq!(nd.dnc_blocks, 0);
    }

    #[test]
    fn two_dnc_blocks_in_one_placement() {
        let l = builtin_layout(HAM3126).unwrap();
        let p = Placement {
            anchor: cell(1, 1),
            cells: vec![cell(1, 1), cell(1, 2), cell(2, 1), cell(2, 2)],
        };
        assert_eq!(classify_placement(&l, &p, MultiFlipPolicy::Dnc3).unwrap().dnc_blocks, 2);
    }

    #[test]
    fn counting_modes() {
        let mut t = Tally::default();
        t.record(&PlacementOutcome {
            flips: vec![
                (cell(1, 1), FlipClass::Dnc),
                (cell(1, 2), FlipClass::Dnc),
                (cell(2, 1), FlipClass::Dc),
                (cell(2, 32), FlipClass::Nd),
            ],
            dnc_blocks: 1,
        });
        assert_eq!(t.counts(CountingMode::Events), [1, 1, 1]);
        assert_eq!(t.counts(CountingMode::Flips), [1, 2, 1]);
        assert_eq!(t.counts(CountingMode::Placements), [0, 0, 1]);
        assert_eq!(t.dc + t.dnc_flips + t.nd, t.injected);
    }

    #[test]
    fn parse_modes() {
        assert_eq!("flips".parse::<CountingMode>().unwrap(), CountingMode::Flips);
        assert_eq!("nd3".parse::<MultiFlipPolicy>().unwrap(), MultiFlipPolicy::Nd3);
        assert!("bogus".parse::<CountingMode>().is_err());
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let l = builtin_layout(HAM74A).unwrap();
        let g = MemoryGeometry::new(8, 16).unwrap();
        let cat = PatternCatalog::builtin();
        assert!(run_campaign(&l, &cat, &g, &CampaignOptions::default()).is_err());
        assert!(run_physical(&l, &cat, &g, DecodeMode::Plain, 1, 1).is_err());
    }

    #[test]
    fn means_of_identical_inputs() {
        let l = builtin_layout(HAM74A).unwrap();
        let cat = PatternCatalog::builtin();
        let r = run_campaign(&l, &cat, &MemoryGeometry::default(), &CampaignOptions::default()).unwrap();
        let m = aggregate_means(&[r.clone(), r.clone(), r.clone()]).unwrap();
        for g in Group::ALL {
            let a = m.group(g);
            let b = r.group(g).unwrap().rates;
            assert!((a.dc - b.dc).abs() < 1e-12 && (a.dnc - b.dnc).abs() < 1e-12 && (a.nd - b.nd).abs() < 1e-12);
        }
        assert!(aggregate_means(&[]).is_err());
    }

    #[test]
    fn restrict_to_one_pattern() {
        let l = builtin_layout(HAM74A).unwrap();
        let cat = PatternCatalog::builtin();
        let mut r = run_campaign(&l, &cat, &MemoryGeometry::default(), &CampaignOptions::default()).unwrap();
        r.restrict(&[1]).unwrap();
        assert_eq!(r.patterns.len(), 1);
        assert_eq!(r.groups.len(), 1);
        assert_eq!(r.groups[0].tally.dc, 224);
        assert!(r.restrict(&[5]).is_err());
    }
}

//! Spatial error patterns and their placement in memory.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::layout::MemoryGeometry;

/// Side of the square footprint every pattern fits in.
pub const FOOTPRINT: u8 = 3;
pub const CATALOG_SIZE: usize = 36;

/// The catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = include_str!("../data/catalog.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Offset {
    pub drow: u8,
    pub dcol: u8,
}

/// Scenario groups by number of bit flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    G1,
    G2,
    G3,
    G4,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::G1, Group::G2, Group::G3, Group::G4];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Pattern ids belonging to the group.
    pub fn ids(self) -> std::ops::RangeInclusive<u32> {
        match self {
            Group::G1 => 1..=1,
            Group::G2 => 2..=11,
            Group::G3 => 12..=31,
            Group::G4 => 32..=36,
        }
    }

    pub fn flips(self) -> usize {
        self.index() + 1
    }

    pub fn of_id(id: u32) -> Option<Group> {
        Group::ALL.into_iter().find(|g| g.ids().contains(&id))
    }

    pub fn label(self) -> &'static str {
        ["G1", "G2", "G3", "G4"][self.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorPattern {
    id: u32,
    offsets: Vec<Offset>,
}

impl ErrorPattern {
    pub fn new(id: u32, mut offsets: Vec<Offset>) -> Result<Self> {
        let bad = |reason: String| Error::Catalog {
            pattern: id.to_string(),
            reason,
        };
        if offsets.is_empty() || offsets.len() > 4 {
            return Err(bad(format!("{} offsets, expected 1..=4", offsets.len())));
        }
        if let Some(o) = offsets
            .iter()
            .find(|o| o.drow >= FOOTPRINT || o.dcol >= FOOTPRINT)
        {
            return Err(bad(format!("offset ({},{}) outside the 3x3 footprint", o.drow, o.dcol)));
        }
        offsets.sort_unstable();
        if offsets.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("duplicate offset".into()));
        }
        Ok(Self { id, offsets })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    pub fn flips(&self) -> usize {
        self.offsets.len()
    }

    /// 3x3 picture, `X` for a flip.
    pub fn sketch(&self) -> String {
        (0..FOOTPRINT)
            .map(|r| {
                (0..FOOTPRINT)
                    .map(|c| {
                        if self.offsets.contains(&Offset { drow: r, dcol: c }) {
                            'X'
                        } else {
                            '.'
                        }
                    })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCatalog {
    patterns: Vec<ErrorPattern>,
}

impl PatternCatalog {
    /// Validates id contiguity, group cardinalities and per-group flip counts.
    pub fn new(patterns: Vec<ErrorPattern>) -> Result<Self> {
        if patterns.len() != CATALOG_SIZE {
            return Err(Error::Catalog {
                pattern: "*".into(),
                reason: format!("{} patterns, expected {CATALOG_SIZE}", patterns.len()),
            });
        }
        for (i, p) in patterns.iter().enumerate() {
            let expected = i as u32 + 1;
            if p.id != expected {
                let reason = if patterns[..i].iter().any(|q| q.id == p.id) {
                    "duplicate id".to_string()
                } else {
                    format!("out of order, expected id {expected}")
                };
                return Err(Error::Catalog {
                    pattern: p.id.to_string(),
                    reason,
                });
            }
            let group = Group::of_id(p.id).expect("ids 1..=36 all have a group");
            if p.flips() != group.flips() {
                return Err(Error::Catalog {
                    pattern: p.id.to_string(),
                    reason: format!(
                        "{} flips, but group {} patterns have {}",
                        p.flips(),
                        group.label(),
                        group.flips()
                    ),
                });
            }
        }
        Ok(Self { patterns })
    }

    /// Parses `pattern <id> <drow>,<dcol> ...` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut patterns = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| Error::Parse {
                line: idx + 1,
                reason,
            };
            let mut parts = line.split_whitespace();
            if parts.next() != Some("pattern") {
                return Err(perr("expected `pattern <id> <drow>,<dcol> ...`".into()));
            }
            let id: u32 = parts
                .next()
                .ok_or_else(|| perr("missing pattern id".into()))?
                .parse()
                .map_err(|e| perr(format!("bad pattern id: {e}")))?;
            let offsets = parts
                .map(|tok| {
                    let (r, c) = tok
                        .split_once(',')
                        .ok_or_else(|| perr(format!("bad offset {tok:?}")))?;
                    let n = |t: &str| {
                        t.parse::<u8>()
                            .map_err(|e| perr(format!("bad offset {tok:?}: {e}")))
                    };
                    Ok(Offset { drow: n(r)?, dcol: n(c)? })
                })
                .collect::<Result<Vec<_>>>()?;
            patterns.push(ErrorPattern::new(id, offsets)?);
        }
        Self::new(patterns)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CATALOG).expect("shipped catalog is valid")
    }

    pub fn patterns(&self) -> &[ErrorPattern] {
        &self.patterns
    }

    pub fn get(&self, id: u32) -> Option<&ErrorPattern> {
        id.checked_sub(1).and_then(|i| self.patterns.get(i as usize))
    }

    pub fn group(&self, g: Group) -> impl Iterator<Item = &ErrorPattern> {
        self.patterns.iter().filter(move |p| g.ids().contains(&p.id))
    }

    pub fn to_catalog_file(&self) -> String {
        self.patterns
            .iter()
            .map(|p| {
                let offs: Vec<String> = p
                    .offsets
                    .iter()
                    .map(|o| format!("{},{}", o.drow, o.dcol))
                    .collect();
                format!("pattern {} {}\n", p.id, offs.join(" "))
            })
            .collect()
    }
}

/// A 1-based memory cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub anchor: Cell,
    /// Flips that landed inside the memory, in offset order.
    pub cells: Vec<Cell>,
}

impl Placement {
    pub fn injected_count(&self) -> usize {
        self.cells.len()
    }
}

/// Puts the pattern's footprint with its top-left corner on `anchor`; flips
/// falling outside the memory are dropped.
pub fn place(pattern: &ErrorPattern, anchor: Cell, geom: &MemoryGeometry) -> Result<Placement> {
    if !geom.contains(anchor.row as i64, anchor.col as i64) {
        return Err(invalid(format!(
            "anchor ({},{}) outside {}x{} memory",
            anchor.row, anchor.col, geom.rows, geom.cols
        )));
    }
    let cells = pattern
        .offsets
        .iter()
        .map(|o| Cell {
            row: anchor.row + o.drow as u32,
            col: anchor.col + o.dcol as u32,
        })
        .filter(|c| c.row <= geom.rows && c.col <= geom.cols)
        .collect();
    Ok(Placement { anchor, cells })
}

/// Every anchor of the geometry in row-major order.
pub fn anchors(geom: &MemoryGeometry) -> impl Iterator<Item = Cell> + '_ {
    (1..=geom.rows).flat_map(move |row| (1..=geom.cols).map(move |col| Cell { row, col }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn off(drow: u8, dcol: u8) -> Offset {
        Offset { drow, dcol }
    }

    #[test]
    fn builtin_catalog_shape() {
        let cat = PatternCatalog::builtin();
        assert_eq!(cat.patterns().len(), 36);
        let sizes: Vec<usize> = Group::ALL.iter().map(|g| cat.group(*g).count()).collect();
        assert_eq!(sizes, [1, 10, 20, 5]);
        assert_eq!(cat.get(1).unwrap().offsets(), &[off(0, 0)]);
        assert_eq!(cat.get(2).unwrap().offsets(), &[off(0, 0), off(0, 1)]);
        assert_eq!(cat.get(5).unwrap().offsets(), &[off(0, 0), off(0, 2)]);
        assert_eq!(cat.get(21).unwrap().offsets(), &[off(0, 0), off(0, 1), off(0, 2)]);
        assert_eq!(cat.get(21).unwrap().sketch(), "XXX\n...\n...");
    }

    #[test]
    fn catalog_round_trip() {
        let cat = PatternCatalog::builtin();
        assert_eq!(PatternCatalog::parse(&cat.to_catalog_file()).unwrap(), cat);
    }

    #[test]
    fn thirty_five_patterns_fail() {
        let text: String = DEFAULT_CATALOG
            .lines()
            .filter(|l| !l.starts_with("pattern 36 "))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(PatternCatalog::parse(&text), Err(Error::Catalog { .. })));
    }

    #[test]
    fn offset_outside_footprint_fails() {
        let text = DEFAULT_CATALOG.replace("pattern 1 0,0", "pattern 1 3,0");
        match PatternCatalog::parse(&text) {
            Err(Error::Catalog { pattern, .. }) => assert_eq!(pattern, "1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_group_cardinality_fails() {
        let text = DEFAULT_CATALOG.replace("pattern 2 0,0 0,1", "pattern 2 0,0");
        match PatternCatalog::parse(&text) {
            Err(Error::Catalog { pattern, reason }) => {
                assert_eq!(pattern, "2");
                assert!(reason.contains("G2"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_fails() {
        let text = DEFAULT_CATALOG.replace("pattern 3 ", "pattern 2 ");
        match PatternCatalog::parse(&text) {
            Err(Error::Catalog { pattern, reason }) => {
                assert_eq!(pattern, "2");
                assert_eq!(reason, "duplicate id");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pattern_seven_clips_to_one_cell() {
        let cat = PatternCatalog::builtin();
        let p = place(cat.get(7).unwrap(), Cell { row: 7, col: 31 }, &MemoryGeometry::default()).unwrap();
        assert_eq!(p.cells, vec![Cell { row: 8, col: 32 }]);
    }

    #[test]
    fn single_flip_at_origin() {
        let cat = PatternCatalog::builtin();
        let p = place(cat.get(1).unwrap(), Cell { row: 1, col: 1 }, &MemoryGeometry::default()).unwrap();
        assert_eq!(p.cells, vec![Cell { row: 1, col: 1 }]);
        assert_eq!(p.injected_count(), 1);
    }

    #[test]
    fn top_left_anchor_keeps_everything() {
        let g = MemoryGeometry::default();
        for pat in PatternCatalog::builtin().patterns() {
            let p = place(pat, Cell { row: 1, col: 1 }, &g).unwrap();
            assert_eq!(p.injected_count(), pat.flips());
        }
    }

    #[test]
    fn anchor_out_of_range() {
        let g = MemoryGeometry::default();
        let cat = PatternCatalog::builtin();
        assert!(place(cat.get(1).unwrap(), Cell { row: 9, col: 1 }, &g).is_err());
        assert!(place(cat.get(1).unwrap(), Cell { row: 1, col: 0 }, &g).is_err());
    }

    #[test]
    fn sweep_size() {
        let g = MemoryGeometry::default();
        assert_eq!(anchors(&g).count() * CATALOG_SIZE, 9216);
    }
}

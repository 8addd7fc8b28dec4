//! Partition of a memory line into Hamming code blocks and uncovered columns.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codes::{make_code, CodeSpec};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryGeometry {
    pub rows: u32,
    pub cols: u32,
}

impl MemoryGeometry {
    pub fn new(rows: u32, cols: u32) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("geometry {rows}x{cols} must be at least 1x1")));
        }
        Ok(Self { rows, cols })
    }

    pub fn cells(&self) -> u32 {
        self.rows * self.cols
    }

    pub fn contains(&self, row: i64, col: i64) -> bool {
        row >= 1 && col >= 1 && row <= self.rows as i64 && col <= self.cols as i64
    }
}

impl Default for MemoryGeometry {
    /// Eight lines of 32 bits.
    fn default() -> Self {
        Self { rows: 8, cols: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeBlock {
    pub code: CodeSpec,
    /// 1-based columns, ascending and contiguous; `columns[i]` holds codeword
    /// position `i + 1`.
    pub columns: Vec<u32>,
}

/// What a column of a line belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnOwner {
    /// Index into `LineLayout::blocks`.
    Block(usize),
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutRepr", into = "LayoutRepr")]
pub struct LineLayout {
    name: String,
    cols: u32,
    blocks: Vec<CodeBlock>,
    uncovered: Vec<u32>,
    owner: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct LayoutRepr {
    name: String,
    cols: u32,
    blocks: Vec<CodeBlock>,
    uncovered: Vec<u32>,
}

impl TryFrom<LayoutRepr> for LineLayout {
    type Error = Error;

    fn try_from(r: LayoutRepr) -> Result<Self> {
        LineLayout::new(r.name, r.cols, r.blocks, r.uncovered)
    }
}

impl From<LineLayout> for LayoutRepr {
    fn from(l: LineLayout) -> Self {
        LayoutRepr {
            name: l.name,
            cols: l.cols,
            blocks: l.blocks,
            uncovered: l.uncovered,
        }
    }
}

impl LineLayout {
    /// Validates that blocks and uncovered columns partition `1..=cols`.
    pub fn new(
        name: impl Into<String>,
        cols: u32,
        blocks: Vec<CodeBlock>,
        mut uncovered: Vec<u32>,
    ) -> Result<Self> {
        let name = name.into();
        let err = |reason: String| Error::Layout {
            name: name.clone(),
            reason,
        };
        if cols == 0 {
            return Err(err("a line needs at least one column".into()));
        }
        let mut owner: Vec<Option<Option<usize>>> = vec![None; cols as usize];
        let mut claim = |col: u32, who: Option<usize>| -> Result<()> {
            if col == 0 || col > cols {
                return Err(err(format!("column {col} outside 1..={cols}")));
            }
            let slot = &mut owner[col as usize - 1];
            if slot.is_some() {
                return Err(err(format!("column {col} assigned twice")));
            }
            *slot = Some(who);
            Ok(())
        };
        for (bi, b) in blocks.iter().enumerate() {
            if b.columns.len() != b.code.n() as usize {
                return Err(err(format!(
                    "block {} spans {} columns but {} needs {}",
                    bi + 1,
                    b.columns.len(),
                    b.code.name(),
                    b.code.n()
                )));
            }
            if b.columns.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(err(format!("block {} columns are not contiguous", bi + 1)));
            }
            for &c in &b.columns {
                claim(c, Some(bi))?;
            }
        }
        uncovered.sort_unstable();
        for &c in &uncovered {
            claim(c, None)?;
        }
        let owner = owner
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| err(format!("column {} is not assigned", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name,
            cols,
            blocks,
            uncovered,
            owner,
        })
    }

    /// Builds a layout from `(r, first_column)` blocks; every other column is
    /// uncovered.
    pub fn from_blocks(name: &str, cols: u32, blocks: &[(u32, u32)]) -> Result<Self> {
        let mut out = Vec::with_capacity(blocks.len());
        let mut used = vec![false; cols as usize + 1];
        for &(r, start) in blocks {
            let code = make_code(r)?;
            let columns: Vec<u32> = (start..start + code.n()).collect();
            for &c in &columns {
                if let Some(u) = used.get_mut(c as usize) {
                    *u = true;
                }
            }
            out.push(CodeBlock { code, columns });
        }
        let uncovered = (1..=cols).filter(|c| !used[*c as usize]).collect();
        Self::new(name, cols, out, uncovered)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn blocks(&self) -> &[CodeBlock] {
        &self.blocks
    }

    pub fn uncovered(&self) -> &[u32] {
        &self.uncovered
    }

    /// Redundancy bits in one line.
    pub fn redundancy_bits(&self) -> u32 {
        self.blocks.iter().map(|b| b.code.r()).sum()
    }

    pub fn block_of(&self, col: u32) -> Result<ColumnOwner> {
        if col == 0 || col > self.cols {
            return Err(invalid(format!(
                "column {col} outside 1..={} of layout {}",
                self.cols, self.name
            )));
        }
        Ok(self.owner_unchecked(col))
    }

    pub(crate) fn owner_unchecked(&self, col: u32) -> ColumnOwner {
        match self.owner[col as usize - 1] {
            Some(b) => ColumnOwner::Block(b),
            None => ColumnOwner::Uncovered,
        }
    }

    /// Serializes to the layout file format.
    pub fn to_layout_file(&self) -> String {
        let mut out = format!("name {}\n", self.name);
        let mut items: Vec<(u32, String)> = self
            .blocks
            .iter()
            .map(|b| {
                (
                    b.columns[0],
                    format!("block {} {}", b.code.r(), col_list(&b.columns)),
                )
            })
            .collect();
        if !self.uncovered.is_empty() {
            items.push((self.uncovered[0], format!("uncovered {}", col_list(&self.uncovered))));
        }
        items.sort();
        for (_, line) in items {
            writeln!(out, "{line}").unwrap();
        }
        out
    }

    /// Parses the line-oriented layout format:
    ///
    /// ```text
    /// # comment
    /// name Ham15,11
    /// block 4 1-15
    /// block 4 16-30
    /// uncovered 31,32
    /// ```
    ///
    /// Column lists are comma separated and may use `a-b` ranges. `name` is
    /// optional; `default_name` is used when it is absent.
    pub fn parse(text: &str, cols: u32, default_name: &str) -> Result<Self> {
        let mut name = default_name.to_string();
        let mut blocks = Vec::new();
        let mut uncovered = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| Error::Parse {
                line: line_no,
                reason,
            };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("name") => {
                    name = parts.collect::<Vec<_>>().join(" ");
                    if name.is_empty() {
                        return Err(perr("empty name".into()));
                    }
                }
                Some("block") => {
                    let r: u32 = parts
                        .next()
                        .ok_or_else(|| perr("block needs <r> <col-list>".into()))?
                        .parse()
                        .map_err(|e| perr(format!("bad r: {e}")))?;
                    let list = parts.collect::<Vec<_>>().join("");
                    let columns = parse_col_list(&list).map_err(perr)?;
                    let code = make_code(r).map_err(|e| perr(e.to_string()))?;
                    blocks.push(CodeBlock { code, columns });
                }
                Some("uncovered") => {
                    let list = parts.collect::<Vec<_>>().join("");
                    uncovered.extend(parse_col_list(&list).map_err(perr)?);
                }
                Some(other) => return Err(perr(format!("unknown directive {other:?}"))),
                None => {}
            }
        }
        Self::new(name, cols, blocks, uncovered)
    }
}

fn col_list(cols: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < cols.len() {
        let mut j = i;
        while j + 1 < cols.len() && cols[j + 1] == cols[j] + 1 {
            j += 1;
        }
        if j > i {
            parts.push(format!("{}-{}", cols[i], cols[j]));
        } else {
            parts.push(cols[i].to_string());
        }
        i = j + 1;
    }
    parts.join(",")
}

fn parse_col_list(s: &str) -> std::result::Result<Vec<u32>, String> {
    if s.is_empty() {
        return Err("empty column list".into());
    }
    let mut out = Vec::new();
    for item in s.split(',') {
        let num = |t: &str| t.parse::<u32>().map_err(|e| format!("bad column {t:?}: {e}"));
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if b < a {
                    return Err(format!("descending range {item}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(item)?),
        }
    }
    Ok(out)
}

pub const HAM74A: &str = "Ham7,4,A";
pub const HAM74B: &str = "Ham7,4,B";
pub const HAM1511: &str = "Ham15,11";
pub const HAM151174: &str = "Ham15,11,7,4";
pub const HAM3126: &str = "Ham31,26";

/// The five 32-bit line configurations, in the order they are reported.
pub fn builtin_layouts() -> Vec<LineLayout> {
    let b = include_str!("../data/ham74b.layout");
    vec![
        LineLayout::from_blocks(HAM74A, 32, &[(3, 1), (3, 8), (3, 15), (3, 22)]),
        LineLayout::parse(b, 32, HAM74B),
        LineLayout::from_blocks(HAM1511, 32, &[(4, 1), (4, 16)]),
        LineLayout::from_blocks(HAM151174, 32, &[(4, 1), (3, 16), (3, 23)]),
        LineLayout::from_blocks(HAM3126, 32, &[(5, 1)]),
    ]
    .into_iter()
    .map(|l| l.expect("built-in layouts are valid"))
    .collect()
}

/// Looks up a built-in layout by name (case-insensitive, spaces and
/// underscores ignored, so `ham7_4_a` works on the command line).
pub fn builtin_layout(name: &str) -> Option<LineLayout> {
    let key = |s: &str| {
        s.chars()
            .filter(|c| !matches!(c, ' ' | '_' | ',' | '-'))
            .flat_map(char::to_lowercase)
            .collect::<String>()
    };
    let wanted = key(name);
    builtin_layouts().into_iter().find(|l| key(l.name()) == wanted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(name: &str) -> LineLayout {
        builtin_layout(name).unwrap()
    }

    #[test]
    fn five_builtins_partition_the_line() {
        let all = builtin_layouts();
        assert_eq!(all.len(), 5);
        for l in &all {
            let mut seen = [0u32; 33];
            for b in l.blocks() {
                for &c in &b.columns {
                    seen[c as usize] += 1;
                }
                assert_eq!(b.columns.len() as u32, b.code.n());
            }
            for &c in l.uncovered() {
                seen[c as usize] += 1;
            }
            assert!(seen[1..].iter().all(|&x| x == 1), "{}", l.name());
        }
    }

    #[test]
    fn uncovered_counts_and_redundancy() {
        let expected = [
            (HAM74A, 4, 12),
            (HAM74B, 4, 12),
            (HAM1511, 2, 8),
            (HAM151174, 3, 10),
            (HAM3126, 1, 5),
        ];
        for (name, unc, red) in expected {
            let l = get(name);
            assert_eq!(l.uncovered().len(), unc, "{name}");
            assert_eq!(l.redundancy_bits(), red, "{name}");
        }
        assert_eq!(get(HAM74A).uncovered(), &[29, 30, 31, 32]);
        assert_eq!(get(HAM74B).uncovered(), &[8, 16, 24, 32]);
    }

    #[test]
    fn block_lookup() {
        let a = get(HAM74A);
        assert_eq!(a.block_of(29).unwrap(), ColumnOwner::Uncovered);
        assert_eq!(a.block_of(7).unwrap(), ColumnOwner::Block(0));
        assert_eq!(a.block_of(8).unwrap(), ColumnOwner::Block(1));
        assert_eq!(get(HAM3126).block_of(31).unwrap(), ColumnOwner::Block(0));
        assert!(a.block_of(0).is_err());
        assert!(a.block_of(33).is_err());
    }

    #[test]
    fn layout_file_round_trip() {
        for l in builtin_layouts() {
            let text = l.to_layout_file();
            let back = LineLayout::parse(&text, 32, "x").unwrap();
            assert_eq!(back, l);
        }
    }

    #[test]
    fn invalid_layouts_are_rejected() {
        // overlap
        assert!(LineLayout::parse("block 3 1-7\nblock 3 7-13\nuncovered 14-32", 32, "x").is_err());
        // gap
        assert!(LineLayout::parse("block 3 1-7\nuncovered 9-32", 32, "x").is_err());
        // wrong width
        assert!(LineLayout::parse("block 3 1-8\nuncovered 9-32", 32, "x").is_err());
        // non-contiguous
        assert!(LineLayout::parse("block 3 1-6,8\nuncovered 7,9-32", 32, "x").is_err());
        // unknown directive
        assert!(matches!(
            LineLayout::parse("blok 3 1-7", 32, "x"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn name_lookup_is_forgiving() {
        assert_eq!(builtin_layout("ham15_11_7_4").unwrap().name(), HAM151174);
        assert_eq!(builtin_layout("Ham31,26").unwrap().name(), HAM3126);
        assert!(builtin_layout("Ham63,57").is_none());
    }

    #[test]
    fn geometry_validation() {
        assert!(MemoryGeometry::new(0, 32).is_err());
        assert_eq!(MemoryGeometry::default().cells(), 256);
    }
}

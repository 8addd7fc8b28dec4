//! Browser bindings: every export takes plain values and returns a JSON
//! string for the page script to draw.

use hamsim_core::campaign::{classify_placement, CampaignOptions};
use hamsim_core::faults::{anchors, place};
use hamsim_core::layout::ColumnOwner;
use hamsim_core::reliability::reliability_series;
use hamsim_core::{
    builtin_layout, builtin_layouts, calibrate_lambda, fc_table_from_campaign, redundancy_rate, run_campaign,
    CountingMode, FlipClass, Group, LineLayout, MemoryGeometry, MultiFlipPolicy, PatternCatalog, Rates,
    ReliabilityInput,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Res<T> = std::result::Result<T, String>;

fn layout(name: &str) -> Res<LineLayout> {
    builtin_layout(name).ok_or_else(|| format!("unknown layout {name:?}"))
}

fn json<T: Serialize>(value: &T) -> Res<String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct LayoutView {
    name: String,
    /// Block index per column, `null` when uncovered.
    owners: Vec<Option<usize>>,
    codes: Vec<String>,
    tr: f64,
}

pub fn layout_views() -> Res<String> {
    let views = builtin_layouts()
        .into_iter()
        .map(|l| {
            let owners = (1..=l.cols())
                .map(|c| match l.block_of(c) {
                    Ok(ColumnOwner::Block(b)) => Some(b),
                    _ => None,
                })
                .collect();
            let tr = redundancy_rate(&l).map(|p| p.rate).unwrap_or(0.0);
            LayoutView {
                name: l.name().to_string(),
                owners,
                codes: l.blocks().iter().map(|b| b.code.name()).collect(),
                tr,
            }
        })
        .collect::<Vec<_>>();
    json(&views)
}

#[derive(Serialize, Default, Debug, PartialEq, Eq)]
struct CellCounts {
    dc: u32,
    dnc: u32,
    nd: u32,
}

#[derive(Serialize)]
struct PatternMap {
    layout: String,
    pattern: u32,
    offsets: Vec<(u8, u8)>,
    rows: u32,
    cols: u32,
    /// Row-major: how often each memory cell was flipped into each class
    /// over the whole sweep.
    cells: Vec<CellCounts>,
    rates: Rates,
}

pub fn pattern_map(layout_name: &str, pattern: u32, policy: &str) -> Res<String> {
    let l = layout(layout_name)?;
    let policy: MultiFlipPolicy = policy.parse().map_err(|e: hamsim_core::Error| e.to_string())?;
    let catalog = PatternCatalog::builtin();
    let p = catalog.get(pattern).ok_or_else(|| format!("no pattern {pattern}"))?;
    let geom = MemoryGeometry::default();
    let mut cells: Vec<CellCounts> = (0..geom.cells()).map(|_| CellCounts::default()).collect();
    for anchor in anchors(&geom) {
        let placement = place(p, anchor, &geom).map_err(|e| e.to_string())?;
        let out = classify_placement(&l, &placement, policy).map_err(|e| e.to_string())?;
        for (cell, class) in out.flips {
            let slot = &mut cells[((cell.row - 1) * geom.cols + cell.col - 1) as usize];
            match class {
                FlipClass::Dc => slot.dc += 1,
                FlipClass::Dnc => slot.dnc += 1,
                FlipClass::Nd => slot.nd += 1,
            }
        }
    }
    let opts = CampaignOptions {
        policy,
        jobs: 1,
        ..Default::default()
    };
    let result = run_campaign(&l, &catalog, &geom, &opts).map_err(|e| e.to_string())?;
    json(&PatternMap {
        layout: l.name().to_string(),
        pattern,
        offsets: p.offsets().iter().map(|o| (o.drow, o.dcol)).collect(),
        rows: geom.rows,
        cols: geom.cols,
        cells,
        rates: result.pattern(pattern).map(|r| r.rates).unwrap_or_default(),
    })
}

#[derive(Serialize)]
struct GroupRow {
    layout: String,
    group: &'static str,
    rates: Rates,
}

pub fn group_rates(counting: &str, policy: &str) -> Res<String> {
    let counting: CountingMode = counting.parse().map_err(|e: hamsim_core::Error| e.to_string())?;
    let policy: MultiFlipPolicy = policy.parse().map_err(|e: hamsim_core::Error| e.to_string())?;
    let opts = CampaignOptions {
        counting,
        policy,
        jobs: 1,
    };
    let catalog = PatternCatalog::builtin();
    let mut rows = Vec::new();
    for l in builtin_layouts() {
        let r = run_campaign(&l, &catalog, &MemoryGeometry::default(), &opts).map_err(|e| e.to_string())?;
        for g in Group::ALL {
            if let Some(gr) = r.group(g) {
                rows.push(GroupRow {
                    layout: r.layout.clone(),
                    group: g.label(),
                    rates: gr.rates,
                });
            }
        }
    }
    json(&rows)
}

#[derive(Serialize)]
struct Curve {
    layout: String,
    points: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct Curves {
    lambda: f64,
    curves: Vec<Curve>,
}

/// Calibrates the fault rate on `anchor_layout` (R(`anchor_t`) =
/// `anchor_r`) and returns every built-in layout's curve over
/// `0..=t_max`.
pub fn curves(anchor_layout: &str, anchor_t: f64, anchor_r: f64, t_max: f64, words: u32) -> Res<String> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(format!("t_max must be positive, got {t_max}"));
    }
    let catalog = PatternCatalog::builtin();
    let geom = MemoryGeometry::default();
    let opts = CampaignOptions {
        jobs: 1,
        ..Default::default()
    };
    let anchor = layout(anchor_layout)?;
    let tables = builtin_layouts()
        .into_iter()
        .map(|l| {
            let r = run_campaign(&l, &catalog, &geom, &opts)?;
            Ok((l.name().to_string(), fc_table_from_campaign(&r)?))
        })
        .collect::<hamsim_core::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let fc = tables
        .iter()
        .find(|(n, _)| n == anchor.name())
        .map(|(_, fc)| fc.clone())
        .ok_or("anchor layout missing")?;
    let err = |e: hamsim_core::Error| e.to_string();
    let template = ReliabilityInput::new(1.0, 32, words, fc).map_err(err)?;
    let lambda = calibrate_lambda(&template, anchor_t, anchor_r).map_err(err)?;
    let times: Vec<f64> = (0..=100).map(|i| t_max * i as f64 / 100.0).collect();
    let curves = tables
        .into_iter()
        .map(|(name, fc)| {
            let input = ReliabilityInput::new(lambda, 32, words, fc)?;
            Ok(Curve {
                layout: name,
                points: reliability_series(&input, &times)?,
            })
        })
        .collect::<hamsim_core::Result<Vec<_>>>()
        .map_err(err)?;
    json(&Curves { lambda, curves })
}

#[wasm_bindgen(js_name = layouts)]
pub fn js_layouts() -> Result<String, JsError> {
    layout_views().map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = patternMap)]
pub fn js_pattern_map(layout: &str, pattern: u32, policy: &str) -> Result<String, JsError> {
    pattern_map(layout, pattern, policy).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = groupRates)]
pub fn js_group_rates(counting: &str, policy: &str) -> Result<String, JsError> {
    group_rates(counting, policy).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = reliabilityCurves)]
pub fn js_curves(anchor_layout: &str, anchor_t: f64, anchor_r: f64, t_max: f64, words: u32) -> Result<String, JsError> {
    curves(anchor_layout, anchor_t, anchor_r, t_max, words).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn layouts_cover_every_column() {
        let v: Value = serde_json::from_str(&layout_views().unwrap()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 5);
        for l in arr {
            assert_eq!(l["owners"].as_array().unwrap().len(), 32);
        }
        assert_eq!(arr[4]["owners"][31], Value::Null);
    }

    #[test]
    fn single_flip_map() {
        let v: Value = serde_json::from_str(&pattern_map("Ham7,4,A", 1, "dnc3").unwrap()).unwrap();
        let cells = v["cells"].as_array().unwrap();
        assert_eq!(cells.len(), 256);
        let nd: u64 = cells.iter().map(|c| c["nd"].as_u64().unwrap()).sum();
        let dc: u64 = cells.iter().map(|c| c["dc"].as_u64().unwrap()).sum();
        assert_eq!((dc, nd), (224, 32));
        assert_eq!(v["rates"]["dc"], 87.5);
        assert!(pattern_map("Ham7,4,A", 99, "dnc3").is_err());
        assert!(pattern_map("nope", 1, "dnc3").is_err());
    }

    #[test]
    fn group_table_has_twenty_rows() {
        let v: Value = serde_json::from_str(&group_rates("events", "dnc3").unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 20);
        assert!(group_rates("bits", "dnc3").is_err());
    }

    #[test]
    fn calibrated_curves_hit_the_anchor() {
        let v: Value = serde_json::from_str(&curves("Ham31,26", 500.0, 0.7143, 1000.0, 50).unwrap()).unwrap();
        let series = v["curves"].as_array().unwrap();
        assert_eq!(series.len(), 5);
        let ham31 = series.iter().find(|c| c["layout"] == "Ham31,26").unwrap();
        let at500 = &ham31["points"][50];
        assert_eq!(at500[0], 500.0);
        assert!((at500[1].as_f64().unwrap() - 0.7143).abs() < 1e-9);
        assert!(curves("Ham31,26", 500.0, 1.2, 1000.0, 50).is_err());
    }
}

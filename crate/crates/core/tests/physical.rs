use hamsim_core::layout::{HAM3126, HAM74A};
use hamsim_core::*;

fn run(name: &str, mode: DecodeMode, seed: u64, jobs: usize) -> PhysicalResult {
    let layout = builtin_layout(name).unwrap();
    run_physical(&layout, &PatternCatalog::builtin(), &MemoryGeometry::default(), mode, seed, jobs).unwrap()
}

#[test]
fn single_flips_are_corrected() {
    for mode in [DecodeMode::Plain, DecodeMode::Extended] {
        let r = run(HAM74A, mode, 7, 2);
        let t = r.patterns[0].tally;
        assert_eq!(t.corrected_ok, 224);
        assert_eq!(t.uncovered_hit, 32);
        assert_eq!(t.miscorrected_silent + t.detected_uncorrectable, 0);
    }
}

#[test]
fn double_flips_miscorrect_plain_and_are_caught_extended() {
    let layout = builtin_layout(HAM74A).unwrap();
    let oracle = run_campaign(
        &layout,
        &PatternCatalog::builtin(),
        &MemoryGeometry::default(),
        &CampaignOptions::default(),
    )
    .unwrap();
    let plain = run(HAM74A, DecodeMode::Plain, 1, 4);
    let extended = run(HAM74A, DecodeMode::Extended, 1, 4);
    for id in 2..=11u32 {
        let expect = oracle.pattern(id).unwrap().tally;
        let p = plain.patterns[id as usize - 1].tally;
        let e = extended.patterns[id as usize - 1].tally;
        assert_eq!(p.miscorrected_silent, expect.dnc_blocks, "pattern {id}");
        assert_eq!(p.detected_uncorrectable, 0);
        assert_eq!(e.detected_uncorrectable, expect.dnc_blocks, "pattern {id}");
        assert_eq!(e.miscorrected_silent, 0);
        assert_eq!(p.corrected_ok, expect.dc);
        assert_eq!(p.uncovered_hit, expect.nd);
    }
}

#[test]
fn deterministic_for_a_seed() {
    let a = run(HAM3126, DecodeMode::Extended, 42, 1);
    let b = run(HAM3126, DecodeMode::Extended, 42, 6);
    assert_eq!(a, b);
}

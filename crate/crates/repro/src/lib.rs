//! Acceptance criteria for the reference configuration: five 32-bit line
//! layouts over an 8x32 memory, the built-in 36-pattern catalog, and the
//! 50-word reliability model calibrated on Ham31,26.
//!
//! Every criterion returns a [`Verdict`]; nothing here panics on a miss.

use std::fmt;
use std::sync::OnceLock;

use hamsim_core::codes::{make_code, BitWord, DecodeOutcome};
use hamsim_core::layout::{HAM1511, HAM151174, HAM3126, HAM74A, HAM74B};
use hamsim_core::reliability::reliability_series;
use hamsim_core::report::{percent1, round1};
use hamsim_core::{
    aggregate_means, builtin_layout, calibrate_lambda, decode, encode, fc_table_from_campaign, p_if, p_mf,
    redundancy_rate, reliability, run_campaign, CampaignOptions, CampaignResult, Group, MemoryGeometry,
    PatternCatalog, Rates, ReliabilityInput,
};

pub const LAYOUTS: [&str; 5] = [HAM74A, HAM74B, HAM1511, HAM151174, HAM3126];

const WORD_BITS: u32 = 32;
const WORDS: u32 = 50;

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

/// Collects individual checks; the verdict passes only if all of them do.
struct Checks {
    notes: Vec<String>,
    pass: bool,
}

impl Checks {
    fn new() -> Self {
        Self {
            notes: Vec::new(),
            pass: true,
        }
    }

    fn check(&mut self, ok: bool, note: String) {
        if !ok {
            self.pass = false;
            self.notes.push(format!("MISS {note}"));
        } else {
            self.notes.push(note);
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol + 1e-9;
        self.check(ok, format!("{label} {got:.2} (want {want} +-{tol})"));
    }

    fn finish(self, id: u8, title: &'static str) -> Verdict {
        Verdict {
            id,
            title,
            pass: self.pass,
            detail: self.notes.join("; "),
        }
    }
}

fn campaigns() -> &'static [CampaignResult] {
    static RUNS: OnceLock<Vec<CampaignResult>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let catalog = PatternCatalog::builtin();
        let geom = MemoryGeometry::default();
        LAYOUTS
            .iter()
            .map(|name| {
                let layout = builtin_layout(name).expect("built-in layout");
                run_campaign(&layout, &catalog, &geom, &CampaignOptions::default()).expect("campaign")
            })
            .collect()
    })
}

fn campaign(name: &str) -> &'static CampaignResult {
    campaigns().iter().find(|c| c.layout == name).expect("selected layout")
}

fn group(name: &str, g: Group) -> Rates {
    campaign(name).group(g).expect("group present").rates
}

pub fn worked_example() -> Verdict {
    let mut c = Checks::new();
    let t = campaign(HAM74A).pattern(1).expect("pattern 1").tally;
    c.check(
        (t.dc, t.dnc_blocks, t.nd) == (224, 0, 32),
        format!("Ham7,4,A pattern 1: DC={} DNC={} ND={} (want 224/0/32)", t.dc, t.dnc_blocks, t.nd),
    );
    c.finish(1, "single-flip worked example")
}

pub fn single_flip_rates() -> Verdict {
    let mut c = Checks::new();
    for (name, dc) in [(HAM3126, 96.9), (HAM1511, 93.8), (HAM74A, 87.5), (HAM74B, 87.5)] {
        let got = round1(group(name, Group::G1).dc);
        c.check(got == dc, format!("{name} DC {got:.1} (want {dc:.1})"));
    }
    for name in LAYOUTS {
        let r = group(name, Group::G1);
        let uncovered = builtin_layout(name).expect("built-in").uncovered().len() as u64;
        let want = percent1(uncovered, 32);
        c.check(r.dnc == 0.0, format!("{name} DNC {:.1}", r.dnc));
        c.check(
            round1(r.nd) == want,
            format!("{name} ND {:.1} (want {uncovered}/32 = {want:.1})", round1(r.nd)),
        );
    }
    c.finish(2, "G1 rates")
}

pub fn longest_code_multi_flip() -> Verdict {
    let mut c = Checks::new();
    let want = [
        (Group::G2, 78.7, 17.9, 3.5),
        (Group::G3, 63.4, 32.3, 4.4),
        (Group::G4, 31.4, 62.1, 6.5),
    ];
    for (g, dc, dnc, nd) in want {
        let r = group(HAM3126, g);
        c.near(&format!("{} DC", g.label()), r.dc, dc, 0.5);
        c.near(&format!("{} DNC", g.label()), r.dnc, dnc, 0.5);
        c.near(&format!("{} ND", g.label()), r.nd, nd, 0.5);
    }
    c.finish(3, "Ham31,26 G2-G4 rates")
}

pub fn short_code_quad_flips() -> Verdict {
    let mut c = Checks::new();
    for name in [HAM74A, HAM74B] {
        let r = group(name, Group::G4);
        c.near(&format!("{name} G4 DC"), r.dc, 35.7, 0.5);
        c.near(&format!("{name} G4 ND"), r.nd, 22.1, 0.5);
    }
    c.finish(4, "Ham7,4 G4 rates")
}

pub fn cross_layout_means() -> Verdict {
    let mut c = Checks::new();
    let m = aggregate_means(campaigns()).expect("same catalog");
    let g1 = m.group(Group::G1);
    c.near("G1 mean DC", g1.dc, 91.2, 0.5);
    c.near("G1 mean ND", g1.nd, 8.8, 0.5);
    for (id, want) in [(21, 10.6), (2, 12.2), (5, 23.0)] {
        let got = m.pattern(id).expect("pattern").dc;
        c.near(&format!("pattern {id} mean DC"), got, want, 0.5);
    }
    c.finish(5, "cross-layout means")
}

pub fn orderings() -> Verdict {
    let mut c = Checks::new();
    for g in [Group::G2, Group::G3] {
        let (a, b) = (group(HAM74A, g).nd, group(HAM74B, g).nd);
        c.check(b >= a, format!("{} ND B {b:.2} >= A {a:.2}", g.label()));
    }
    for g in Group::ALL {
        let (mixed, plain) = (group(HAM151174, g).nd, group(HAM1511, g).nd);
        c.check(
            mixed >= plain,
            format!("{} ND Ham15,11,7,4 {mixed:.2} >= Ham15,11 {plain:.2}", g.label()),
        );
    }
    for name in LAYOUTS {
        let dc: Vec<f64> = [Group::G1, Group::G2, Group::G3].iter().map(|g| group(name, *g).dc).collect();
        c.check(
            dc[0] >= dc[1] && dc[1] >= dc[2],
            format!("{name} DC {:.1}>={:.1}>={:.1}", dc[0], dc[1], dc[2]),
        );
        let dnc = group(name, Group::G1).dnc;
        c.check(dnc == 0.0, format!("{name} G1 DNC {dnc}"));
    }
    c.finish(6, "ordering properties")
}

pub fn redundancy_table() -> Verdict {
    let mut c = Checks::new();
    for (name, want) in LAYOUTS.iter().zip([42.9, 42.9, 26.7, 34.5, 16.1]) {
        let p = redundancy_rate(&builtin_layout(name).expect("built-in")).expect("has blocks");
        let got = percent1(u64::from(p.parity_bits), u64::from(p.coded_bits));
        c.check(got == want, format!("{name} tr {got:.1} (want {want:.1})"));
    }
    c.finish(7, "redundancy rates")
}

pub fn reliability_model() -> Verdict {
    let mut c = Checks::new();

    let mut worst_sum = 0.0f64;
    let mut worst_identity = 0.0f64;
    for lambda in [1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
        let input = ReliabilityInput::new(lambda, WORD_BITS, WORDS, vec![0.5]).expect("valid");
        for t in [0.0, 1.0, 10.0, 100.0, 500.0, 1000.0, 3500.0] {
            let sum: f64 = (0..=WORD_BITS).map(|i| p_if(i, &input, t).expect("in range")).sum();
            worst_sum = worst_sum.max((sum - 1.0).abs());
            let identity = p_mf(&input, t).expect("t >= 0") - (1.0 - p_if(0, &input, t).expect("in range"));
            worst_identity = worst_identity.max(identity.abs());
        }
    }
    c.check(worst_sum <= 1e-12, format!("max |sum P(iF) - 1| = {worst_sum:.1e}"));
    c.check(worst_identity <= 1e-12, format!("max |P(MF) - (1 - P(0F))| = {worst_identity:.1e}"));

    let tables: Vec<Vec<f64>> = LAYOUTS
        .iter()
        .map(|n| fc_table_from_campaign(campaign(n)).expect("all groups"))
        .collect();
    let template = ReliabilityInput::new(1.0, WORD_BITS, WORDS, tables[4].clone()).expect("valid");
    let lambda = match calibrate_lambda(&template, 500.0, 0.7143) {
        Ok(l) => l,
        Err(e) => {
            c.check(false, format!("calibration failed: {e}"));
            return c.finish(8, "reliability model");
        }
    };
    c.check(true, format!("lambda {lambda:.4e}"));

    let inputs: Vec<ReliabilityInput> = tables
        .into_iter()
        .map(|fc| ReliabilityInput::new(lambda, WORD_BITS, WORDS, fc).expect("valid"))
        .collect();
    let grid: Vec<f64> = (0..=70).map(|i| i as f64 * 50.0).collect();
    let series: Vec<Vec<f64>> = inputs
        .iter()
        .map(|inp| reliability_series(inp, &grid).expect("t >= 0").into_iter().map(|(_, r)| r).collect())
        .collect();
    let starts_at_one = series.iter().all(|s| s[0] == 1.0);
    c.check(starts_at_one, "R(0) = 1".into());
    let monotone = series.iter().all(|s| s.windows(2).all(|w| w[1] <= w[0]));
    c.check(monotone, "R non-increasing over 0..3500".into());

    for (i, want) in [(0, 0.3666), (1, 0.3647), (2, 0.5736), (3, 0.457)] {
        let got = reliability(&inputs[i], 500.0).expect("t >= 0");
        c.near(&format!("{} R(500)", LAYOUTS[i]), 100.0 * got, 100.0 * want, 2.0);
    }

    let ordered = (1..grid.len()).all(|k| {
        let r = |i: usize| series[i][k];
        r(4) > r(2) && r(2) > r(3) && r(3) > r(0) && r(0) >= r(1)
    });
    c.check(
        ordered,
        "Ham31,26 > Ham15,11 > Ham15,11,7,4 > Ham7,4,A >= Ham7,4,B for t in (0, 3500]".into(),
    );
    c.finish(8, "reliability model")
}

/// Nearest-codeword decoding of Ham(7,4) by exhaustive search over the
/// codebook, compared with the syndrome decoder.
pub fn decoder_oracle() -> Verdict {
    let mut c = Checks::new();
    let code = make_code(3).expect("Ham(7,4)");
    // Codewords are the 7-bit vectors whose set positions XOR to zero.
    let codebook: Vec<u8> = (0u8..128)
        .filter(|w| (0..7).filter(|i| w >> i & 1 == 1).fold(0, |acc, i| acc ^ (i + 1)) == 0)
        .collect();
    c.check(codebook.len() == 16, format!("{} codewords", codebook.len()));
    let data_of = |w: u8| [2u8, 4, 5, 6].map(|i| w >> i & 1 == 1);
    let to_word = |w: u8| {
        let mut b = BitWord::zeros(7);
        for i in 0..7 {
            b.set(i, w >> i & 1 == 1);
        }
        b
    };
    let nearest = |w: u8| {
        *codebook
            .iter()
            .min_by_key(|cw| (*cw ^ w).count_ones())
            .expect("non-empty")
    };
    let decoded_bits = |b: &BitWord| [0, 1, 2, 3].map(|i| b.get(i));

    let (mut singles, mut single_miss, mut pairs, mut pair_miss, mut silent) = (0, 0, 0, 0, 0);
    for &cw in &codebook {
        let data = data_of(cw);
        let mut data_word = BitWord::zeros(4);
        for (i, bit) in data.iter().enumerate() {
            data_word.set(i as u32, *bit);
        }
        if encode(&code, &data_word).expect("4 data bits") != to_word(cw) {
            c.check(false, format!("encoder disagrees with codebook for {cw:07b}"));
        }
        for a in 0..7 {
            let received = cw ^ (1 << a);
            let report = decode(&code, &to_word(received)).expect("7 bits");
            singles += 1;
            let ok = report.outcome == DecodeOutcome::CorrectedSingle
                && report.corrected_position == Some(a as u32 + 1)
                && decoded_bits(&report.decoded_data) == data_of(nearest(received));
            if !ok {
                single_miss += 1;
            }
            for b in a + 1..7 {
                let received = cw ^ (1 << a) ^ (1 << b);
                let report = decode(&code, &to_word(received)).expect("7 bits");
                let target = nearest(received);
                pairs += 1;
                let matches_oracle = report.outcome == DecodeOutcome::CorrectedSingle
                    && decoded_bits(&report.decoded_data) == data_of(target);
                if !matches_oracle {
                    pair_miss += 1;
                }
                if target != cw && decoded_bits(&report.decoded_data) != data {
                    silent += 1;
                }
            }
        }
    }
    c.check(single_miss == 0, format!("{singles} single flips, {single_miss} mismatches"));
    c.check(pair_miss == 0, format!("{pairs} flip pairs, {pair_miss} oracle mismatches"));
    c.check(silent == pairs, format!("{silent}/{pairs} pairs miscorrected"));
    c.finish(9, "Ham(7,4) decoder vs nearest codeword")
}

/// Runs the CLI twice with different worker counts and compares report.json
/// byte for byte.
pub fn job_count_determinism() -> Verdict {
    let mut c = Checks::new();
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            c.check(false, format!("no scratch directory: {e}"));
            return c.finish(10, "determinism across --jobs");
        }
    };
    let mut reports = Vec::new();
    for jobs in ["1", "4"] {
        let out = dir.path().join(format!("jobs{jobs}"));
        let args = [
            "hamsim",
            "reliability",
            "--calibrate",
            "Ham31,26:500:0.7143",
            "--physical",
            "plain",
            "--seed",
            "3",
            "--format",
            "json",
            "--jobs",
            jobs,
            "--out",
            out.to_str().expect("utf-8 path"),
        ];
        match hamsim_cli::run(args).and_then(|()| Ok(std::fs::read(out.join("report.json"))?)) {
            Ok(bytes) => reports.push(bytes),
            Err(e) => c.check(false, format!("--jobs {jobs} failed: {e:#}")),
        }
    }
    if reports.len() == 2 {
        c.check(
            reports[0] == reports[1],
            format!("report.json {} bytes, --jobs 1 vs 4 identical", reports[0].len()),
        );
    }
    c.finish(10, "determinism across --jobs")
}

pub fn criterion(id: u8) -> Option<Verdict> {
    Some(match id {
        1 => worked_example(),
        2 => single_flip_rates(),
        3 => longest_code_multi_flip(),
        4 => short_code_quad_flips(),
        5 => cross_layout_means(),
        6 => orderings(),
        7 => redundancy_table(),
        8 => reliability_model(),
        9 => decoder_oracle(),
        10 => job_count_determinism(),
        _ => return None,
    })
}

pub fn all() -> Vec<Verdict> {
    (1..=10).filter_map(criterion).collect()
}

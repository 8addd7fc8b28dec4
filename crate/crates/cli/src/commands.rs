use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hamsim_core::campaign::CampaignOptions;
use hamsim_core::reliability::reliability_series;
use hamsim_core::report::{fmt1, CalibrationAnchor, RedundancyRow, ReliabilityReport, ReliabilitySeries};
use hamsim_core::{
    aggregate_means, calibrate_lambda, fc_table_from_campaign, redundancy_rate, run_campaign,
    run_physical, CampaignResult, Report, ReliabilityInput,
};

use crate::config::{resolve_layout, FaultRate, OutputFormat, Settings};
use crate::RunArgs;

fn campaigns(s: &Settings) -> Result<Vec<CampaignResult>> {
    let opts = CampaignOptions {
        counting: s.counting,
        policy: s.policy,
        jobs: s.jobs,
    };
    s.layouts
        .iter()
        .map(|l| run_campaign(l, &s.catalog, &s.geometry, &opts).with_context(|| format!("campaign for {}", l.name())))
        .collect()
}

fn base_report(s: &Settings, mut runs: Vec<CampaignResult>) -> Result<Report> {
    if let Some(ids) = &s.patterns {
        for r in &mut runs {
            r.restrict(ids)?;
        }
    }
    let means = Some(aggregate_means(&runs)?);
    let physical = match s.physical {
        Some(mode) => s
            .layouts
            .iter()
            .map(|l| run_physical(l, &s.catalog, &s.geometry, mode, s.seed, s.jobs))
            .collect::<hamsim_core::Result<_>>()?,
        None => Vec::new(),
    };
    let redundancy = s
        .layouts
        .iter()
        .filter_map(|l| {
            redundancy_rate(l).ok().map(|profile| RedundancyRow {
                layout: l.name().to_string(),
                profile,
            })
        })
        .collect();
    Ok(Report {
        geometry: s.geometry,
        counting: s.counting,
        policy: s.policy,
        campaigns: runs,
        means,
        physical,
        redundancy,
        reliability: None,
    })
}

fn reliability_report(s: &Settings, runs: &[CampaignResult]) -> Result<ReliabilityReport> {
    let Some(rate) = &s.rate else {
        bail!("reliability needs a fault rate: pass --lambda or --calibrate layout:t:R");
    };
    let tables = runs
        .iter()
        .map(|r| fc_table_from_campaign(r).with_context(|| format!("correction table for {}", r.layout)))
        .collect::<Result<Vec<_>>>()?;
    let (lambda, calibration) = match rate {
        FaultRate::Fixed(l) => (*l, None),
        FaultRate::Calibrated(anchor) => {
            let layout = resolve_layout(&anchor.layout, s.geometry.cols).context("calibration anchor")?;
            let fc = match runs.iter().position(|r| r.layout == layout.name()) {
                Some(i) => tables[i].clone(),
                None => {
                    let opts = CampaignOptions {
                        counting: s.counting,
                        policy: s.policy,
                        jobs: s.jobs,
                    };
                    fc_table_from_campaign(&run_campaign(&layout, &s.catalog, &s.geometry, &opts)?)?
                }
            };
            let template = ReliabilityInput::new(1.0, s.word_bits, s.words, fc)?;
            let lambda = calibrate_lambda(&template, anchor.t, anchor.reliability)
                .with_context(|| format!("calibrating against {}", layout.name()))?;
            (
                lambda,
                Some(CalibrationAnchor {
                    layout: layout.name().to_string(),
                    t: anchor.t,
                    reliability: anchor.reliability,
                }),
            )
        }
    };
    let times = s.grid.points();
    let series = runs
        .iter()
        .zip(tables)
        .map(|(r, fc)| {
            let input = ReliabilityInput::new(lambda, s.word_bits, s.words, fc.clone())?;
            let points = reliability_series(&input, &times)?;
            Ok(ReliabilitySeries {
                layout: r.layout.clone(),
                fc_table: fc,
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReliabilityReport {
        lambda,
        calibration,
        word_bits: s.word_bits,
        words: s.words,
        series,
    })
}

pub fn write_report(report: &Report, out: &Path, format: OutputFormat) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    if format.json() {
        let path = out.join("report.json");
        fs::write(&path, report.to_json()? + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    if format.csv() {
        for table in report.tables() {
            let path = out.join(table.file_name());
            fs::write(&path, table.to_csv()?).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}

fn print_groups(report: &Report) {
    println!("{:<14} {:<3} {:>6} {:>6} {:>6}", "layout", "grp", "DC%", "DNC%", "ND%");
    for c in &report.campaigns {
        for g in &c.groups {
            println!(
                "{:<14} {:<3} {:>6} {:>6} {:>6}",
                c.layout,
                g.group.label(),
                fmt1(g.rates.dc),
                fmt1(g.rates.dnc),
                fmt1(g.rates.nd)
            );
        }
    }
    if let Some(m) = &report.means {
        for (g, r) in &m.groups {
            if report.campaigns.iter().any(|c| c.group(*g).is_some()) {
                println!("{:<14} {:<3} {:>6} {:>6} {:>6}", "mean", g.label(), fmt1(r.dc), fmt1(r.dnc), fmt1(r.nd));
            }
        }
    }
}

pub fn simulate(args: &RunArgs) -> Result<()> {
    let s = Settings::resolve(args)?;
    let runs = campaigns(&s)?;
    let report = base_report(&s, runs)?;
    write_report(&report, &s.out, s.format)?;
    print_groups(&report);
    println!("wrote {}", s.out.display());
    Ok(())
}

pub fn reliability(args: &RunArgs) -> Result<()> {
    let s = Settings::resolve(args)?;
    let runs = campaigns(&s)?;
    let rel = reliability_report(&s, &runs)?;
    let mut report = base_report(&s, runs)?;
    report.reliability = Some(rel);
    write_report(&report, &s.out, s.format)?;

    let rel = report.reliability.as_ref().expect("set above");
    match &rel.calibration {
        Some(a) => println!("lambda = {:e} (calibrated: {} R({}) = {})", rel.lambda, a.layout, a.t, a.reliability),
        None => println!("lambda = {:e}", rel.lambda),
    }
    for row in &report.redundancy {
        println!("{:<14} tr = {}%", row.layout, fmt1(100.0 * row.profile.rate));
    }
    for series in &rel.series {
        if let Some((t, r)) = series.points.last() {
            println!("{:<14} R({t}) = {r:.4}", series.layout);
        }
    }
    println!("wrote {}", s.out.display());
    Ok(())
}

pub fn render(input: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let report = Report::from_json(&text).with_context(|| format!("in {}", input.display()))?;
    write_report(&report, out, OutputFormat::Csv)?;
    println!("wrote {}", out.display());
    Ok(())
}

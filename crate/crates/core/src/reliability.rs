//! Poisson word-failure model and the parity overhead of a layout.

use serde::{Deserialize, Serialize};

use crate::campaign::CampaignResult;
use crate::error::{invalid, Error, Result};
use crate::faults::Group;
use crate::layout::LineLayout;

pub const DEFAULT_WORD_BITS: u32 = 32;
pub const DEFAULT_WORDS: u32 = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityInput {
    /// Faults per bit per unit time.
    pub lambda: f64,
    pub word_bits: u32,
    pub words: u32,
    /// Probability that a word hit by `i + 1` faults is corrected.
    pub fc_table: Vec<f64>,
}

impl ReliabilityInput {
    pub fn new(lambda: f64, word_bits: u32, words: u32, fc_table: Vec<f64>) -> Result<Self> {
        let input = Self {
            lambda,
            word_bits,
            words,
            fc_table,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid(format!("fault rate must be positive, got {}", self.lambda)));
        }
        if self.word_bits == 0 || self.words == 0 {
            return Err(invalid("word size and word count must be at least 1"));
        }
        if self.fc_table.is_empty() {
            return Err(invalid("correction table is empty"));
        }
        if self.fc_table.len() > self.word_bits as usize {
            return Err(invalid(format!(
                "correction table has {} entries for a {}-bit word",
                self.fc_table.len(),
                self.word_bits
            )));
        }
        if let Some(p) = self.fc_table.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid(format!("correction probability {p} outside [0, 1]")));
        }
        Ok(())
    }

    /// Largest fault count the correction table covers.
    pub fn max_errors(&self) -> usize {
        self.fc_table.len()
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// Probability that exactly `i` bits of a word have failed by time `t`.
pub fn p_if(i: u32, input: &ReliabilityInput, t: f64) -> Result<f64> {
    check_time(t)?;
    let n = input.word_bits;
    if i > n {
        return Err(invalid(format!("fault count {i} exceeds word size {n}")));
    }
    let lt = input.lambda * t;
    let failed = -(-lt).exp_m1();
    let survived = (-lt * f64::from(n - i)).exp();
    Ok(binomial(n, i) * failed.powi(i as i32) * survived)
}

/// Probability that at least one bit of a word has failed by time `t`.
pub fn p_mf(input: &ReliabilityInput, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(-(-input.lambda * f64::from(input.word_bits) * t).exp_m1())
}

fn corrected_mass(input: &ReliabilityInput, t: f64) -> Result<f64> {
    input
        .fc_table
        .iter()
        .enumerate()
        .map(|(i, fc)| Ok(fc * p_if(i as u32 + 1, input, t)?))
        .sum()
}

/// Probability that a failed word is corrected.
pub fn f_c(input: &ReliabilityInput, t: f64) -> Result<f64> {
    let failed = p_mf(input, t)?;
    if failed == 0.0 {
        return Err(Error::Domain(format!(
            "no word failure is possible at t = {t}, correction ratio undefined"
        )));
    }
    Ok(corrected_mass(input, t)? / failed)
}

/// Probability that all words are intact or corrected at time `t`.
pub fn reliability(input: &ReliabilityInput, t: f64) -> Result<f64> {
    check_time(t)?;
    let intact = (-input.lambda * f64::from(input.word_bits) * t).exp();
    let word = (intact + corrected_mass(input, t)?).min(1.0);
    Ok(word.powi(input.words as i32))
}

pub fn reliability_series(input: &ReliabilityInput, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    times.iter().map(|&t| Ok((t, reliability(input, t)?))).collect()
}

/// Per-group DC fractions of a campaign, G1 first.
pub fn fc_table_from_campaign(result: &CampaignResult) -> Result<Vec<f64>> {
    Group::ALL
        .iter()
        .map(|&g| {
            result
                .group(g)
                .map(|r| r.rates.dc / 100.0)
                .ok_or_else(|| invalid(format!("campaign for {} has no {} results", result.layout, g.label())))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RedundancyProfile {
    pub parity_bits: u32,
    pub coded_bits: u32,
    pub rate: f64,
}

/// Parity bits over coded bits; uncovered columns do not count.
pub fn redundancy_rate(layout: &LineLayout) -> Result<RedundancyProfile> {
    if layout.blocks().is_empty() {
        return Err(invalid(format!("layout {} has no code blocks", layout.name())));
    }
    let parity_bits: u32 = layout.blocks().iter().map(|b| b.code.r()).sum();
    let coded_bits: u32 = layout.blocks().iter().map(|b| b.code.n()).sum();
    Ok(RedundancyProfile {
        parity_bits,
        coded_bits,
        rate: f64::from(parity_bits) / f64::from(coded_bits),
    })
}

/// Solves for the fault rate that gives `target` reliability at time `t`.
/// `template` supplies everything but the rate.
pub fn calibrate_lambda(template: &ReliabilityInput, t: f64, target: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Calibration(format!("anchor time must be positive, got {t}")));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Calibration(format!(
            "anchor reliability must lie strictly between 0 and 1, got {target}"
        )));
    }
    let at = |lambda: f64| reliability(&template.with_lambda(lambda), t);
    let mut lo = 0.0;
    let mut hi = 1.0 / t;
    let mut expansions = 0;
    while at(hi)? > target {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(Error::Calibration(format!(
                "reliability at t = {t} never drops to {target}; the correction table may be all ones"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let got = at(lambda)?;
    if (got - target).abs() > 1e-9 {
        return Err(Error::Calibration(format!(
            "bisection stalled at lambda = {lambda:e} with reliability {got} (wanted {target})"
        )));
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{builtin_layout, HAM151174, HAM3126, HAM74A};
    use proptest::prelude::*;

    fn input(lambda: f64, fc: Vec<f64>) -> ReliabilityInput {
        ReliabilityInput::new(lambda, 32, 50, fc).unwrap()
    }

    #[test]
    fn zero_time() {
        let inp = input(1e-3, vec![0.9, 0.7, 0.5, 0.3]);
        assert_eq!(p_if(0, &inp, 0.0).unwrap(), 1.0);
        assert_eq!(p_if(3, &inp, 0.0).unwrap(), 0.0);
        assert_eq!(p_mf(&inp, 0.0).unwrap(), 0.0);
        assert_eq!(reliability(&inp, 0.0).unwrap(), 1.0);
        assert!(matches!(f_c(&inp, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn out_of_range_fault_count() {
        let inp = input(1e-3, vec![1.0]);
        assert!(p_if(33, &inp, 1.0).is_err());
        assert!(p_if(32, &inp, 1.0).is_ok());
    }

    #[test]
    fn word_failure_saturates() {
        let inp = input(1.0, vec![0.5]);
        assert!(p_mf(&inp, 1.0).unwrap() > 0.999999);
    }

    #[test]
    fn extreme_tables() {
        let all = input(2e-3, vec![1.0; 32]);
        let none = input(2e-3, vec![0.0; 4]);
        for t in [1.0, 50.0, 500.0, 3500.0] {
            assert!((f_c(&all, t).unwrap() - 1.0).abs() < 1e-12);
            assert!((reliability(&all, t).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(f_c(&none, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_term_ratio() {
        let inp = input(1e-3, vec![1.0]);
        let t = 200.0;
        let lt: f64 = 1e-3 * t;
        let direct = 32.0 * (1.0 - (-lt).exp()) * (-31.0 * lt).exp() / (1.0 - (-32.0 * lt).exp());
        assert!((f_c(&inp, t).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ReliabilityInput::new(0.0, 32, 50, vec![0.5]).is_err());
        assert!(ReliabilityInput::new(1e-3, 32, 0, vec![0.5]).is_err());
        assert!(ReliabilityInput::new(1e-3, 32, 50, vec![]).is_err());
        assert!(ReliabilityInput::new(1e-3, 32, 50, vec![1.2]).is_err());
        assert!(ReliabilityInput::new(1e-3, 2, 50, vec![0.5; 3]).is_err());
    }

    #[test]
    fn redundancy() {
        let rate = |name| redundancy_rate(&builtin_layout(name).unwrap()).unwrap();
        assert_eq!(rate(HAM3126).parity_bits, 5);
        assert_eq!(rate(HAM3126).coded_bits, 31);
        assert_eq!(rate(HAM74A).parity_bits, 12);
        assert_eq!(rate(HAM74A).coded_bits, 28);
        assert_eq!(rate(HAM151174).parity_bits, 10);
        assert_eq!(rate(HAM151174).coded_bits, 29);
    }

    #[test]
    fn calibration_round_trip() {
        let tmpl = input(1.0, vec![0.96875, 0.78, 0.63, 0.31]);
        let lambda = calibrate_lambda(&tmpl, 500.0, 0.7143).unwrap();
        let r = reliability(&tmpl.with_lambda(lambda), 500.0).unwrap();
        assert!((r - 0.7143).abs() < 1e-9);
        assert!(calibrate_lambda(&tmpl, 500.0, 1.0).is_err());
        assert!(calibrate_lambda(&tmpl, 0.0, 0.5).is_err());
        let perfect = input(1.0, vec![1.0; 32]);
        assert!(matches!(calibrate_lambda(&perfect, 500.0, 0.5), Err(Error::Calibration(_))));
    }

    fn fc_table() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0..0.999f64, 1..=6)
    }

    proptest! {
        #[test]
        fn fault_counts_sum_to_one(lambda in 1e-7..1e-1f64, t in 0.0..5000.0f64) {
            let inp = input(lambda, vec![0.5]);
            let total: f64 = (0..=32).map(|i| p_if(i, &inp, t).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let identity = p_mf(&inp, t).unwrap() - (1.0 - p_if(0, &inp, t).unwrap());
            prop_assert!(identity.abs() < 1e-12);
        }

        #[test]
        fn probabilities_bounded(lambda in 1e-7..1e-1f64, t in 1e-3..5000.0f64, fc in fc_table()) {
            let inp = input(lambda, fc);
            let eps = 1e-12;
            for v in [p_mf(&inp, t).unwrap(), f_c(&inp, t).unwrap(), reliability(&inp, t).unwrap()] {
                prop_assert!((-eps..=1.0 + eps).contains(&v));
            }
        }

        #[test]
        fn reliability_non_increasing(lambda in 1e-7..1e-2f64, mut fc in fc_table()) {
            fc.sort_by(|a, b| b.total_cmp(a));
            let inp = input(lambda, fc);
            let mut prev = 1.0;
            for step in 0..=70 {
                let r = reliability(&inp, step as f64 * 50.0).unwrap();
                prop_assert!(r <= prev + 1e-15);
                prev = r;
            }
        }
    }
}

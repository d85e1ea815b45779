//! Receiver-side statistics for a repeated-preparation signalling channel.
//!
//! Each symbol is sent with `n` identically prepared particles. The receiver
//! counts successes (outcomes whose per-particle probability is `p0` while the
//! sender is idle and `p1` after the sender acts) and compares the count with
//! a threshold `k`:
//!
//! - `p1 ≤ p0`: declare "acted" iff `count ≤ k`;
//! - `p1 > p0`: declare "acted" iff `count ≥ k`.
//!
//! Type I is declaring "acted" while idle, type II declaring "idle" after the
//! sender acted. All tails are exact binomial sums.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default target error for [`required_samples`] when none is given.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Upper end of the sample-count scan.
pub const MAX_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    /// "acted" iff `count ≤ k`.
    ActedIfAtMost,
    /// "acted" iff `count ≥ k`.
    ActedIfAtLeast,
}

impl DecisionRule {
    pub fn for_probabilities(p0: f64, p1: f64) -> Self {
        if p1 <= p0 {
            DecisionRule::ActedIfAtMost
        } else {
            DecisionRule::ActedIfAtLeast
        }
    }

    pub fn acted(self, count: u64, k: u64) -> bool {
        match self {
            DecisionRule::ActedIfAtMost => count <= k,
            DecisionRule::ActedIfAtLeast => count >= k,
        }
    }

    pub fn describe(self, k: u64) -> String {
        match self {
            DecisionRule::ActedIfAtMost => format!("declare acted iff count <= {k}"),
            DecisionRule::ActedIfAtLeast => format!("declare acted iff count >= {k}"),
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {p}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalBudget {
    pub p0: f64,
    pub p1: f64,
    pub n: u64,
    pub k_threshold: u64,
}

impl SignalBudget {
    pub fn new(p0: f64, p1: f64, n: u64, k_threshold: u64) -> Result<Self> {
        check_probability("p0", p0)?;
        check_probability("p1", p1)?;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if k_threshold > n {
            return Err(Error::InvalidParameter(format!("threshold {k_threshold} exceeds n = {n}")));
        }
        Ok(Self { p0, p1, n, k_threshold })
    }

    /// Budget at the threshold minimizing `type1 + type2`.
    pub fn with_best_threshold(p0: f64, p1: f64, n: u64) -> Result<Self> {
        let b = Self::new(p0, p1, n, 0)?;
        Ok(Self { k_threshold: decision_errors(&b).best_threshold, ..b })
    }

    pub fn rule(&self) -> DecisionRule {
        DecisionRule::for_probabilities(self.p0, self.p1)
    }
}

/// `Binomial(n, p)` probabilities for `0..=n`.
///
/// Terms are generated by the ratio recurrence outward from the mode (where the
/// unnormalized weight is 1) and normalized by their sum, so nothing overflows
/// and far tails underflow harmlessly to zero.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let len = n as usize + 1;
    let mut w = vec![0.0; len];
    if p <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if p >= 1.0 {
        w[len - 1] = 1.0;
        return w;
    }
    let q = 1.0 - p;
    let odds = p / q;
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n as usize);
    w[mode] = 1.0;
    for k in mode + 1..len {
        w[k] = w[k - 1] * ((n as usize - k + 1) as f64 / k as f64) * odds;
    }
    for k in (0..mode).rev() {
        w[k] = w[k + 1] * ((k + 1) as f64 / (n as usize - k) as f64) / odds;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Both tails of both distributions, indexed for O(1) error lookups.
struct Tails {
    /// `below0[k] = P0(X ≤ k)`.
    below0: Vec<f64>,
    /// `above0[k] = P0(X ≥ k)`.
    above0: Vec<f64>,
    below1: Vec<f64>,
    above1: Vec<f64>,
}

impl Tails {
    fn new(n: u64, p0: f64, p1: f64) -> Self {
        let (f0, f1) = (binomial_pmf(n, p0), binomial_pmf(n, p1));
        Self { below0: prefix(&f0), above0: suffix(&f0), below1: prefix(&f1), above1: suffix(&f1) }
    }

    fn errors(&self, rule: DecisionRule, k: usize) -> (f64, f64) {
        let n = self.below0.len() - 1;
        match rule {
            DecisionRule::ActedIfAtMost => {
                let t2 = if k == n { 0.0 } else { self.above1[k + 1] };
                (self.below0[k], t2)
            }
            DecisionRule::ActedIfAtLeast => {
                let t2 = if k == 0 { 0.0 } else { self.below1[k - 1] };
                (self.above0[k], t2)
            }
        }
    }
}

fn prefix(pmf: &[f64]) -> Vec<f64> {
    pmf.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn suffix(pmf: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = pmf
        .iter()
        .rev()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    out.reverse();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub rule: DecisionRule,
    pub rule_text: String,
    pub threshold: u64,
    pub type1: f64,
    pub type2: f64,
    /// Minimum of `type1 + type2` over all `n + 1` thresholds.
    pub total_min: f64,
    pub best_threshold: u64,
}

pub fn decision_errors(budget: &SignalBudget) -> ErrorReport {
    let rule = budget.rule();
    let tails = Tails::new(budget.n, budget.p0, budget.p1);
    let (type1, type2) = tails.errors(rule, budget.k_threshold as usize);
    let (best_threshold, total_min) = (0..=budget.n as usize)
        .map(|k| {
            let (a, b) = tails.errors(rule, k);
            (k as u64, a + b)
        })
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    ErrorReport {
        rule,
        rule_text: rule.describe(budget.k_threshold),
        threshold: budget.k_threshold,
        type1,
        type2,
        total_min,
        best_threshold,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SampleRequirement {
    Reached { n: u64, threshold: u64, rule: DecisionRule, type1: f64, type2: f64 },
    /// `p0 = p1`: the two hypotheses give the same distribution.
    Impossible,
    NotReachedWithin { max_samples: u64 },
}

/// Smallest `n` for which some threshold keeps both error types at or below `epsilon`.
pub fn required_samples(p0: f64, p1: f64, epsilon: f64) -> Result<SampleRequirement> {
    check_probability("p0", p0)?;
    check_probability("p1", p1)?;
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 0.5], got {epsilon}")));
    }
    if p0 == p1 {
        return Ok(SampleRequirement::Impossible);
    }
    let rule = DecisionRule::for_probabilities(p0, p1);
    let start = first_candidate(p0, p1, epsilon);
    if start > MAX_SAMPLES {
        return Ok(SampleRequirement::NotReachedWithin { max_samples: MAX_SAMPLES });
    }
    let (mut f0, mut f1) = (binomial_pmf(start - 1, p0), binomial_pmf(start - 1, p1));
    for n in start..=MAX_SAMPLES {
        advance(&mut f0, p0);
        advance(&mut f1, p1);
        if !may_reach(rule, &f0, &f1, epsilon + SCREEN_MARGIN) {
            continue;
        }
        let tails = Tails::new(n, p0, p1);
        let hit = (0..=n as usize).find_map(|k| {
            let (t1, t2) = tails.errors(rule, k);
            (t1.max(t2) <= epsilon).then_some((k as u64, t1, t2))
        });
        if let Some((threshold, type1, type2)) = hit {
            return Ok(SampleRequirement::Reached { n, threshold, rule, type1, type2 });
        }
    }
    Ok(SampleRequirement::NotReachedWithin { max_samples: MAX_SAMPLES })
}

/// Smallest `n` not ruled out by Le Cam's bound `type1 + type2 ≥ ½·bc^(2n)`,
/// with `bc` the per-sample Bhattacharyya coefficient.
fn first_candidate(p0: f64, p1: f64, epsilon: f64) -> u64 {
    let bc = (p0 * p1).sqrt() + ((1.0 - p0) * (1.0 - p1)).sqrt();
    if bc.is_nan() || bc >= 1.0 || bc <= 0.0 {
        return 1;
    }
    let n = (4.0 * epsilon).ln() / (2.0 * bc.ln()) * (1.0 - 1e-9);
    if n <= 1.0 {
        1
    } else {
        (n.floor() as u64).min(MAX_SAMPLES + 1)
    }
}

/// Slack for the screening pass, far above its accumulated rounding error.
const SCREEN_MARGIN: f64 = 1e-9;

/// `Binomial(n, p)` to `Binomial(n + 1, p)` in place.
fn advance(pmf: &mut Vec<f64>, p: f64) {
    let q = 1.0 - p;
    pmf.push(0.0);
    for k in (1..pmf.len()).rev() {
        pmf[k] = q * pmf[k] + p * pmf[k - 1];
    }
    pmf[0] *= q;
}

/// Cheap screen: could some threshold keep both errors within `bound`?
fn may_reach(rule: DecisionRule, f0: &[f64], f1: &[f64], bound: f64) -> bool {
    let (mut c0, mut c1) = (0.0, 0.0);
    for k in 0..f0.len() {
        // Before adding term k: c = P(X < k). After: P(X ≤ k).
        let (t1, t2) = match rule {
            DecisionRule::ActedIfAtLeast => (1.0 - c0, c1),
            DecisionRule::ActedIfAtMost => (c0 + f0[k], 1.0 - c1 - f1[k]),
        };
        if t1.max(t2) <= bound {
            return true;
        }
        c0 += f0[k];
        c1 += f1[k];
    }
    false
}

/// Uniform in `[0, 1)` from the top 53 bits.
fn unit(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sample stream of one symbol: ChaCha20 keyed by `seed`, stream number
/// `bit_index`, sample `j` drawn from 32-bit words `2j` and `2j + 1`.
pub fn symbol_stream(seed: u64, bit_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(bit_index);
    rng.set_word_pos(0);
    rng
}

/// Success count for one symbol.
pub fn draw_count(seed: u64, bit_index: u64, n: u64, p: f64) -> u64 {
    let mut rng = symbol_stream(seed, bit_index);
    (0..n).filter(|_| unit(rng.next_u64()) < p).count() as u64
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a message such as `"0101"`.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("message must be 0/1 characters, got `{c}`"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub rule: DecisionRule,
    pub threshold: u64,
    pub message: String,
    pub decoded: String,
    pub bit_errors: u64,
    pub empirical_error_rate: f64,
}

/// Sends `message` (1 = sender acts) through the channel and decodes it.
pub fn simulate(budget: &SignalBudget, message: &[bool], seed: u64) -> SimReport {
    let rule = budget.rule();
    let decoded: Vec<bool> = message
        .par_iter()
        .enumerate()
        .map(|(i, &bit)| {
            let p = if bit { budget.p1 } else { budget.p0 };
            rule.acted(draw_count(seed, i as u64, budget.n, p), budget.k_threshold)
        })
        .collect();
    let bit_errors = message.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64;
    SimReport {
        seed,
        rule,
        threshold: budget.k_threshold,
        message: bits_to_string(message),
        decoded: bits_to_string(&decoded),
        bit_errors,
        empirical_error_rate: if message.is_empty() {
            0.0
        } else {
            bit_errors as f64 / message.len() as f64
        },
    }
}

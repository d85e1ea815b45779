//! Two-box tunnelling as a blockable two-level system.
//!
//! Basis: `|Ψ₁⟩ = |X₁=1, X₂=0⟩` (particle in box 1) and `|Ψ₂⟩ = |X₁=0, X₂=1⟩`.
//! While the barrier is open the hopping generator `γ(|Ψ₁⟩⟨Ψ₂| + |Ψ₂⟩⟨Ψ₁|)`
//! rotates the amplitudes,
//!
//! ```text
//! amp1 ← cos θ · amp1 − i sin θ · amp2
//! amp2 ← −i sin θ · amp1 + cos θ · amp2,     θ = γ · (open time)
//! ```
//!
//! and while it is blocked nothing moves. Starting in box 1 the occupation of
//! box 2 is `sin²(γ t_open)`, reaching one half at `γ t_open = π/4` with the
//! state `(|Ψ₁⟩ − i|Ψ₂⟩)/√2`.
//!
//! The spin-exchange pair `|+₁−₂⟩, |−₁+₂⟩` is mapped onto the same two levels.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::json;
use crate::qcore::{Space, StateVector, EPS_NORM};
use crate::{Error, Result, C64};

/// Largest number of grid points accepted from a `t0:t1:dt` spec.
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBoxState {
    #[serde(with = "json::complex")]
    amp1: C64,
    #[serde(with = "json::complex")]
    amp2: C64,
}

impl TwoBoxState {
    pub fn new(amp1: C64, amp2: C64) -> Result<Self> {
        let n = amp1.norm_sqr() + amp2.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self { amp1, amp2 })
    }

    /// Particle in box 1.
    pub fn first() -> Self {
        Self { amp1: C64::new(1.0, 0.0), amp2: C64::new(0.0, 0.0) }
    }

    /// Particle in box 2.
    pub fn second() -> Self {
        Self { amp1: C64::new(0.0, 0.0), amp2: C64::new(1.0, 0.0) }
    }

    pub fn amp1(&self) -> C64 {
        self.amp1
    }

    pub fn amp2(&self) -> C64 {
        self.amp2
    }

    fn place(&self, space: Space, first: &str, second: &str) -> StateVector {
        StateVector::from_terms(space, &[(first, self.amp1), (second, self.amp2)])
            .expect("normalized two-level state")
    }

    /// As a state of the two occupation slots `X1, X2`.
    pub fn to_occupation_state(&self) -> StateVector {
        self.place(Space::two_box(), "X1=1,X2=0", "X1=0,X2=1")
    }

    /// As a state of the spin pair, `|Ψ₁⟩ = |+₁−₂⟩` and `|Ψ₂⟩ = |−₁+₂⟩`.
    pub fn to_spin_state(&self) -> StateVector {
        self.place(Space::spin_pair(), "+1-2", "-1+2")
    }
}

/// `(p1, p2) = (|amp1|², |amp2|²)`.
pub fn occupations(state: &TwoBoxState) -> (f64, f64) {
    (state.amp1.norm_sqr(), state.amp2.norm_sqr())
}

/// Spin-pair state restricted to the exchange subspace, as a two-level state.
pub fn spin_map(initial: &StateVector) -> Result<TwoBoxState> {
    let sp = Space::spin_pair();
    if initial.space() != &sp {
        return Err(Error::SpaceMismatch("spin_map expects the spin-pair space".into()));
    }
    let amp = |label: &str| initial.amplitudes()[sp.find(label).expect("static label")];
    let outside = amp("+1+2").norm_sqr() + amp("-1-2").norm_sqr();
    if outside > EPS_NORM {
        return Err(Error::InvalidParameter(format!(
            "state has weight {outside} on |++⟩/|−−⟩, outside the exchange subspace"
        )));
    }
    TwoBoxState::new(amp("+1-2"), amp("-1+2"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Barrier {
    Open,
    Blocked,
}

impl fmt::Display for Barrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Barrier::Open => "open",
            Barrier::Blocked => "blocked",
        })
    }
}

impl FromStr for Barrier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open" => Ok(Barrier::Open),
            "blocked" => Ok(Barrier::Blocked),
            other => Err(Error::Parse(format!("unknown barrier state `{other}`"))),
        }
    }
}

/// `[start, end)`, unbounded when `end` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: Option<f64>,
    pub barrier: Barrier,
}

impl Segment {
    fn overlap(&self, t: f64) -> f64 {
        let stop = self.end.map_or(t, |e| e.min(t));
        (stop - self.start).max(0.0)
    }
}

/// Contiguous barrier intervals starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidParameter("schedule has no intervals".into()));
        };
        if first.start != 0.0 {
            return Err(Error::InvalidParameter("schedule must start at t = 0".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !seg.start.is_finite() {
                return Err(Error::InvalidParameter("non-finite schedule time".into()));
            }
            match seg.end {
                Some(e) if !(e.is_finite() && e > seg.start) => {
                    return Err(Error::InvalidParameter(format!(
                        "interval {}..{} is empty or reversed",
                        seg.start, e
                    )))
                }
                None if i + 1 != segments.len() => {
                    return Err(Error::InvalidParameter(
                        "only the last interval may be unbounded".into(),
                    ))
                }
                _ => {}
            }
            if let Some(next) = segments.get(i + 1) {
                if seg.end != Some(next.start) {
                    return Err(Error::InvalidParameter(format!(
                        "intervals must be contiguous and non-overlapping (gap or overlap at {})",
                        next.start
                    )));
                }
            }
        }
        Ok(Self { segments })
    }

    pub fn always(barrier: Barrier) -> Self {
        Self { segments: vec![Segment { start: 0.0, end: None, barrier }] }
    }

    /// Blocked on `[0, t)`, open afterwards.
    pub fn open_after(t: f64) -> Result<Self> {
        Self::new(vec![
            Segment { start: 0.0, end: Some(t), barrier: Barrier::Blocked },
            Segment { start: t, end: None, barrier: Barrier::Open },
        ])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Last covered instant; `None` when unbounded.
    pub fn end(&self) -> Option<f64> {
        self.segments.last().and_then(|s| s.end)
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= 0.0 && self.end().is_none_or(|e| t <= e)
    }

    /// Total time with the barrier open in `[0, t]`.
    pub fn open_time(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.barrier == Barrier::Open)
            .map(|s| s.overlap(t))
            .sum()
    }
}

/// Parses `"blocked:0..2,open:2.."`. A bare `open`/`blocked` starts where the
/// previous interval ended and runs forever.
impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for item in s.split(',') {
            let prev_end = segments.last().map_or(Some(0.0), |p: &Segment| p.end);
            let (kind, range) = match item.split_once(':') {
                Some((k, r)) => (k, Some(r)),
                None => (item, None),
            };
            let barrier: Barrier = kind.parse()?;
            let seg = match range {
                None => Segment {
                    start: prev_end.ok_or_else(|| {
                        Error::Parse("interval follows an unbounded one".into())
                    })?,
                    end: None,
                    barrier,
                },
                Some(r) => {
                    let (a, b) = r
                        .split_once("..")
                        .ok_or_else(|| Error::Parse(format!("expected start..end, got `{r}`")))?;
                    let num = |x: &str| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("bad time `{x}`: {e}")))
                    };
                    let end = if b.trim().is_empty() { None } else { Some(num(b)?) };
                    Segment { start: num(a)?, end, barrier }
                }
            };
            segments.push(seg);
        }
        Schedule::new(segments)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|s| match s.end {
                Some(e) => format!("{}:{}..{}", s.barrier, s.start, e),
                None => format!("{}:{}..", s.barrier, s.start),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Sample times `t0, t0 + dt, ...` up to `t1` from `"t0:t1:dt"`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [t0, t1, dt] = parts[..] else {
        return Err(Error::Parse(format!("grid must be t0:t1:dt, got `{s}`")));
    };
    let num = |x: &str| {
        x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad grid value `{x}`: {e}")))
    };
    let (t0, t1, dt) = (num(t0)?, num(t1)?, num(dt)?);
    if !(dt > 0.0 && t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::InvalidParameter(format!("grid {s} needs t1 ≥ t0 and dt > 0")));
    }
    let steps = ((t1 - t0) / dt + 1e-9).floor();
    if steps + 1.0 > MAX_GRID_POINTS as f64 {
        return Err(Error::InvalidParameter(format!("grid {s} has too many points")));
    }
    Ok((0..=steps as usize).map(|i| t0 + i as f64 * dt).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelConfig {
    /// Coupling rate in radians per unit time.
    pub gamma: f64,
    pub schedule: Schedule,
    pub t_grid: Vec<f64>,
}

impl TunnelConfig {
    pub fn new(gamma: f64, schedule: Schedule, t_grid: Vec<f64>) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        if let Some(t) = t_grid.iter().find(|&&t| !schedule.covers(t)) {
            return Err(Error::InvalidParameter(format!("grid time {t} is outside the schedule")));
        }
        Ok(Self { gamma, schedule, t_grid })
    }

    /// Same schedule with the generator sign flipped (backward propagation).
    pub fn time_reversed(&self) -> Self {
        Self { gamma: -self.gamma, ..self.clone() }
    }
}

fn rotate(state: &TwoBoxState, theta: f64) -> TwoBoxState {
    let (c, s) = (theta.cos(), theta.sin());
    let mi_s = C64::new(0.0, -s);
    TwoBoxState {
        amp1: state.amp1 * c + state.amp2 * mi_s,
        amp2: state.amp1 * mi_s + state.amp2 * c,
    }
}

/// State at time `t` starting from `initial` at `t = 0`.
pub fn evolve(config: &TunnelConfig, initial: &TwoBoxState, t: f64) -> Result<TwoBoxState> {
    evolve_between(config, initial, 0.0, t)
}

/// Propagates a state known at `from` to `to` (`from ≤ to`).
pub fn evolve_between(
    config: &TunnelConfig,
    state: &TwoBoxState,
    from: f64,
    to: f64,
) -> Result<TwoBoxState> {
    for t in [from, to] {
        if !config.schedule.covers(t) {
            return Err(Error::InvalidParameter(format!("time {t} is outside the schedule")));
        }
    }
    if to < from {
        return Err(Error::InvalidParameter(format!("cannot propagate from {from} back to {to}")));
    }
    let open = config.schedule.open_time(to) - config.schedule.open_time(from);
    Ok(rotate(state, config.gamma * open))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Balance {
    Reached { t: f64 },
    NotReached,
}

/// Earliest time at which box 2 holds probability one half, starting from box 1.
pub fn time_to_balance(config: &TunnelConfig) -> Balance {
    let needed = FRAC_PI_4 / config.gamma.abs();
    let mut accumulated = 0.0;
    for seg in config.schedule.segments() {
        if seg.barrier != Barrier::Open {
            continue;
        }
        let len = seg.end.map_or(f64::INFINITY, |e| e - seg.start);
        if accumulated + len >= needed {
            return Balance::Reached { t: seg.start + (needed - accumulated) };
        }
        accumulated += len;
    }
    Balance::NotReached
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(with = "json::complex")]
    pub amp1: C64,
    #[serde(with = "json::complex")]
    pub amp2: C64,
}

/// Evolution sampled on the config grid; points are independent.
pub fn trace(config: &TunnelConfig, initial: &TwoBoxState) -> Result<Vec<TracePoint>> {
    config
        .t_grid
        .par_iter()
        .map(|&t| {
            let s = evolve(config, initial, t)?;
            let (p1, p2) = occupations(&s);
            Ok(TracePoint { t, p1, p2, amp1: s.amp1, amp2: s.amp2 })
        })
        .collect()
}

pub const CSV_HEADER: &str = "t,p1,p2,re1,im1,re2,im2";

/// Plot-ready CSV, LF line endings.
pub fn to_csv(points: &[TracePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.t, p.p1, p.p2, p.amp1.re, p.amp1.im, p.amp2.re, p.amp2.im
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelReport {
    pub gamma: f64,
    pub schedule: String,
    /// Labels of the two levels, in amp1/amp2 order.
    pub basis: [String; 2],
    pub initial: TwoBoxState,
    /// Subsystems the open-barrier generator acts on.
    pub generator_support: Vec<String>,
    pub phase_convention: String,
    pub time_to_balance: Balance,
    pub points: Vec<TracePoint>,
}

pub const PHASE_CONVENTION: &str =
    "open-barrier generator gamma*(|1><2| + |2><1|); from level 1 the balanced state is (|1> - i|2>)/sqrt(2)";

pub fn report(config: &TunnelConfig, initial: &TwoBoxState, spin: bool) -> Result<TunnelReport> {
    let (basis, support) = if spin {
        (["+1-2", "-1+2"], ["1", "2"])
    } else {
        (["X1=1,X2=0", "X1=0,X2=1"], ["X1", "X2"])
    };
    Ok(TunnelReport {
        gamma: config.gamma,
        schedule: config.schedule.to_string(),
        basis: basis.map(String::from),
        initial: *initial,
        generator_support: support.iter().map(|s| s.to_string()).collect(),
        phase_convention: PHASE_CONVENTION.to_string(),
        time_to_balance: time_to_balance(config),
        points: trace(config, initial)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::marginal;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn open(gamma: f64) -> TunnelConfig {
        TunnelConfig::new(gamma, Schedule::always(Barrier::Open), vec![]).unwrap()
    }

    #[test]
    fn quarter_period_balances() {
        let g = 1.7;
        let s = evolve(&open(g), &TwoBoxState::first(), FRAC_PI_4 / g).unwrap();
        assert!((s.amp1() - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amp2() - C64::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((occupations(&s).1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn blocked_barrier_freezes() {
        let cfg = TunnelConfig::new(1.0, Schedule::always(Barrier::Blocked), vec![]).unwrap();
        let s = evolve(&cfg, &TwoBoxState::first(), 12.3).unwrap();
        assert_eq!(s, TwoBoxState::first());
        assert_eq!(occupations(&s), (1.0, 0.0));
    }

    #[test]
    fn half_period_transfers() {
        let s = evolve(&open(1.0), &TwoBoxState::first(), FRAC_PI_2).unwrap();
        assert!((occupations(&s).1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn occupation_examples() {
        assert_eq!(occupations(&TwoBoxState::first()), (1.0, 0.0));
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        let (p1, p2) = occupations(&TwoBoxState::new(r, -r).unwrap());
        assert!((p1 - 0.5).abs() < 1e-15 && (p2 - 0.5).abs() < 1e-15);
        let (p1, p2) = occupations(&TwoBoxState::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap());
        assert!((p1 - 0.36).abs() < 1e-15 && (p2 - 0.64).abs() < 1e-15);
    }

    #[test]
    fn balance_times() {
        assert_eq!(time_to_balance(&open(1.0)), Balance::Reached { t: FRAC_PI_4 });
        let cfg = TunnelConfig::new(1.0, Schedule::open_after(2.5).unwrap(), vec![]).unwrap();
        match time_to_balance(&cfg) {
            Balance::Reached { t } => assert!((t - (2.5 + FRAC_PI_4)).abs() < 1e-15),
            b => panic!("{b:?}"),
        }
        let cfg = TunnelConfig::new(1.0, Schedule::always(Barrier::Blocked), vec![]).unwrap();
        assert_eq!(time_to_balance(&cfg), Balance::NotReached);
        // Open for less than π/4 and then closed for good.
        let short: Schedule = "open:0..0.5,blocked:0.5..10".parse().unwrap();
        let cfg = TunnelConfig::new(1.0, short, vec![]).unwrap();
        assert_eq!(time_to_balance(&cfg), Balance::NotReached);
    }

    #[test]
    fn schedule_parsing() {
        let s: Schedule = "blocked:0..2,open:2..".parse().unwrap();
        assert_eq!(s, Schedule::open_after(2.0).unwrap());
        assert_eq!(s.to_string(), "blocked:0..2,open:2..");
        assert_eq!("open".parse::<Schedule>().unwrap(), Schedule::always(Barrier::Open));
        assert_eq!("blocked:0..1,open".parse::<Schedule>().unwrap(), Schedule::open_after(1.0).unwrap());
        assert!("open:1..".parse::<Schedule>().is_err());
        assert!("open:0..1,blocked:2..".parse::<Schedule>().is_err());
        assert!("open:0..2,blocked:1..".parse::<Schedule>().is_err());
        assert!("open,blocked".parse::<Schedule>().is_err());
        assert!("ajar".parse::<Schedule>().is_err());
    }

    #[test]
    fn outside_schedule_is_an_error() {
        let s: Schedule = "open:0..1".parse().unwrap();
        let cfg = TunnelConfig::new(1.0, s.clone(), vec![]).unwrap();
        assert!(evolve(&cfg, &TwoBoxState::first(), 1.5).is_err());
        assert!(evolve(&cfg, &TwoBoxState::first(), -0.1).is_err());
        assert!(TunnelConfig::new(1.0, s, vec![0.0, 2.0]).is_err());
        assert!(TunnelConfig::new(0.0, Schedule::always(Barrier::Open), vec![]).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:3.2:0.01").unwrap();
        assert_eq!(g.len(), 321);
        assert!((g[320] - 3.2).abs() < 1e-12);
        assert_eq!(parse_grid("1:1:0.5").unwrap(), vec![1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn spin_adapter() {
        let pm = StateVector::from_terms(Space::spin_pair(), &[("+1-2", C64::new(1.0, 0.0))]).unwrap();
        let s = spin_map(&pm).unwrap();
        assert_eq!(s, TwoBoxState::first());
        // Receiver (particle 2) sees −½ with certainty before, one half at balance.
        assert_eq!(marginal(&s.to_spin_state(), 1, "-").unwrap(), 1.0);
        let bal = evolve(&open(1.0), &s, FRAC_PI_4).unwrap();
        assert!((marginal(&bal.to_spin_state(), 1, "-").unwrap() - 0.5).abs() < 1e-15);
        let full = evolve(&open(1.0), &s, FRAC_PI_2).unwrap();
        assert!((marginal(&full.to_spin_state(), 1, "+").unwrap() - 1.0).abs() < 1e-15);

        for bad in ["+1+2", "-1-2"] {
            let st = StateVector::from_terms(Space::spin_pair(), &[(bad, C64::new(1.0, 0.0))]).unwrap();
            assert!(matches!(spin_map(&st), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn occupation_state_labels() {
        let s = TwoBoxState::first().to_occupation_state();
        assert_eq!(marginal(&s, 0, "1").unwrap(), 1.0);
        assert_eq!(marginal(&s, 1, "1").unwrap(), 0.0);
    }

    #[test]
    fn csv_layout() {
        let cfg = TunnelConfig::new(1.0, Schedule::always(Barrier::Open), vec![0.0, 0.5]).unwrap();
        let csv = to_csv(&trace(&cfg, &TwoBoxState::first()).unwrap());
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0,1,0,1,0,0,0");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert!(!csv.contains('\r'));
    }
}

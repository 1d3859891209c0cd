//! Seeded Monte Carlo experiments: sample parameters and initial points under
//! a target's hypotheses, iterate, and compare limits with the prediction.
//!
//! Every run draws from its own stream derived from `(seed, draw, point)`, so
//! results do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dynamics::{
    fmt_sig17, iterate, predict, IterateOptions, PredictedLimit, Scenario, StopReason,
    DEFAULT_CONSECUTIVE, DEFAULT_MAX_ITERATIONS, DEFAULT_STEP_TOL, FIXED_START_RESIDUAL, MATCH_TOL,
};
use crate::error::{Error, Result};
use crate::fixed_points::{candidates, Family};
use crate::operator::Qso;
use crate::params::{Parameters, RATE_COUNT};
use crate::simplex::{SimplexPoint, DIM};

pub const MAX_REJECTIONS: u64 = 1_000_000;
/// Strict inequalities must hold with this much room.
pub const STRICT_MARGIN: f64 = 1e-6;
pub const COUNTEREXAMPLE_CAP: usize = 20;
const MAX_START_ATTEMPTS: usize = 1000;

type Sides = dyn Fn(&Parameters) -> (f64, f64) + Send + Sync;

/// An inequality `lhs ≤ rhs` (or `lhs < rhs` with margin) on the rates.
#[derive(Clone)]
pub struct SamplingConstraint {
    name: String,
    strict: bool,
    sides: Arc<Sides>,
}

impl SamplingConstraint {
    pub fn at_most(
        name: impl Into<String>,
        sides: impl Fn(&Parameters) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            strict: false,
            sides: Arc::new(sides),
        }
    }

    pub fn less_than(
        name: impl Into<String>,
        sides: impl Fn(&Parameters) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            strict: true,
            sides: Arc::new(sides),
        }
    }

    /// `a{k} ≥ value`.
    pub fn rate_at_least(k: usize, value: f64) -> Self {
        Self::at_most(format!("a{k}≥{value}"), move |p| (value, p.a(k)))
    }

    /// `a{k} ≤ value`.
    pub fn rate_at_most(k: usize, value: f64) -> Self {
        Self::at_most(format!("a{k}≤{value}"), move |p| (p.a(k), value))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_satisfied(&self, p: &Parameters, margin: f64) -> bool {
        let (lhs, rhs) = (self.sides)(p);
        if self.strict {
            lhs + margin < rhs
        } else {
            lhs <= rhs
        }
    }
}

impl fmt::Debug for SamplingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SamplingConstraint")
            .field("name", &self.name)
            .field("strict", &self.strict)
            .finish()
    }
}

/// Uniform rejection sampling on `(0, 1]^12` until the validity conditions
/// and every constraint hold.
pub fn sample_parameters<R: Rng + ?Sized>(
    constraints: &[SamplingConstraint],
    rng: &mut R,
) -> Result<Parameters> {
    for _ in 0..MAX_REJECTIONS {
        let mut rates = [0.0; RATE_COUNT];
        for r in rates.iter_mut() {
            *r = 1.0 - rng.random::<f64>();
        }
        let p = Parameters::new(rates)?;
        if p.is_valid()
            && constraints
                .iter()
                .all(|c| c.is_satisfied(&p, STRICT_MARGIN))
        {
            return Ok(p);
        }
    }
    Err(Error::SamplingFailed {
        rejections: MAX_REJECTIONS,
    })
}

/// Uniform (flat Dirichlet) point on the face spanned by the `free`
/// coordinates (0-based).
pub fn sample_face_point<R: Rng + ?Sized>(free: &[usize], rng: &mut R) -> SimplexPoint {
    assert!(!free.is_empty(), "face needs at least one coordinate");
    let mut coords = [0.0; DIM];
    loop {
        let mut total = 0.0;
        for &i in free {
            let e: f64 = rng.sample(Exp1);
            coords[i] = e;
            total += e;
        }
        if total > 0.0 {
            free.iter().for_each(|&i| coords[i] /= total);
            if let Ok(p) = SimplexPoint::new(coords) {
                return p;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    NoDim,
    /// No DOM; either bacterial branch.
    NoDom,
    /// No DOM with `a11 ≤ a12`: bacteria die out.
    NoDomDecay,
    /// No DOM with `a11 > a12`: bacteria and DIM balance.
    NoDomBalance,
    NoBacteria,
    NoPhyto,
    NoZooNoMixo,
    AllSpecies,
    /// Phytoplankton, bacteria and the matter pools settle at λ4.
    Conjecture1a,
    /// Bacteria and DIM settle at λ2.
    Conjecture1b,
    /// Mixoplankton, bacteria and the matter pools settle at λ3.
    Conjecture2,
}

impl Target {
    pub const ALL: [Target; 11] = [
        Target::NoDim,
        Target::NoDom,
        Target::NoDomDecay,
        Target::NoDomBalance,
        Target::NoBacteria,
        Target::NoPhyto,
        Target::NoZooNoMixo,
        Target::AllSpecies,
        Target::Conjecture1a,
        Target::Conjecture1b,
        Target::Conjecture2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::NoDim => "no-dim",
            Target::NoDom => "no-dom",
            Target::NoDomDecay => "no-dom-decay",
            Target::NoDomBalance => "no-dom-balance",
            Target::NoBacteria => "no-bacteria",
            Target::NoPhyto => "no-phyto",
            Target::NoZooNoMixo => "no-zoo-no-mixo",
            Target::AllSpecies => "all-species",
            Target::Conjecture1a => "conjecture1a",
            Target::Conjecture1b => "conjecture1b",
            Target::Conjecture2 => "conjecture2",
        }
    }

    /// Alternative spellings accepted on input.
    fn aliases(self) -> &'static [&'static str] {
        match self {
            Target::NoDim => &["prop51"],
            Target::NoDom => &["prop52"],
            Target::NoBacteria => &["prop53"],
            Target::NoPhyto => &["propk1"],
            Target::NoZooNoMixo => &["prop55"],
            Target::AllSpecies => &["prop56"],
            _ => &[],
        }
    }

    pub fn is_conjecture(self) -> bool {
        matches!(
            self,
            Target::Conjecture1a | Target::Conjecture1b | Target::Conjecture2
        )
    }

    fn scenario(self) -> Option<Scenario> {
        Some(match self {
            Target::NoDim => Scenario::NoDim,
            Target::NoDom | Target::NoDomDecay | Target::NoDomBalance => Scenario::NoDom,
            Target::NoBacteria => Scenario::NoBacteria,
            Target::NoPhyto => Scenario::NoPhyto,
            Target::NoZooNoMixo => Scenario::NoZooNoMixo,
            Target::AllSpecies => Scenario::AllSpecies,
            _ => return None,
        })
    }

    /// Conjectures carry an "either a parameter inequality or a vanishing
    /// initial coordinate" clause; each side is sampled as its own regime.
    pub fn regimes(self) -> &'static [Regime] {
        if self.is_conjecture() {
            &[Regime::ParameterConditioned, Regime::InitialConditioned]
        } else {
            &[Regime::Single]
        }
    }

    pub fn constraints(self, regime: Regime) -> Vec<SamplingConstraint> {
        use SamplingConstraint as C;
        let bacteria_die = || C::at_most("a10+a11≤a12", |p| (p.a(10) + p.a(11), p.a(12)));
        let bacteria_grow = || C::less_than("a12<a11", |p| (p.a(12), p.a(11)));
        let mut out = match self {
            Target::NoDim | Target::NoDom | Target::NoBacteria => vec![],
            Target::NoDomDecay => vec![C::at_most("a11≤a12", |p| (p.a(11), p.a(12)))],
            Target::NoDomBalance => vec![bacteria_grow()],
            Target::NoPhyto => vec![
                C::at_most("a7≤a8+a9", |p| (p.a(7), p.a(8) + p.a(9))),
                bacteria_die(),
            ],
            Target::NoZooNoMixo => vec![C::at_most("a1≤a4", |p| (p.a(1), p.a(4))), bacteria_die()],
            Target::AllSpecies => vec![
                C::at_most("a1≤a4", |p| (p.a(1), p.a(4))),
                C::at_most("a2≤a5+a6", |p| (p.a(2), p.a(5) + p.a(6))),
                C::at_most("a3+a7≤a8+a9", |p| (p.a(3) + p.a(7), p.a(8) + p.a(9))),
                bacteria_die(),
            ],
            Target::Conjecture1a => vec![
                bacteria_grow(),
                C::less_than("a4<a1", |p| (p.a(4), p.a(1))),
                C::less_than("a12a1−a11a4>0", |p| (p.a(11) * p.a(4), p.a(12) * p.a(1))),
                C::less_than("a10a1−a10a4−a12a1+a11a4>0", |p| {
                    (
                        p.a(10) * p.a(4) + p.a(12) * p.a(1),
                        p.a(10) * p.a(1) + p.a(11) * p.a(4),
                    )
                }),
            ],
            Target::Conjecture1b => vec![
                bacteria_grow(),
                C::at_most("a12a1−a11a4≤0", |p| {
                    (p.a(12) * p.a(1), p.a(11) * p.a(4))
                }),
            ],
            Target::Conjecture2 => vec![
                bacteria_grow(),
                C::less_than("a7>a8+a9", |p| (p.a(8) + p.a(9), p.a(7))),
                C::less_than("a12a7−a11(a8+a9)>0", |p| {
                    (p.a(11) * (p.a(8) + p.a(9)), p.a(12) * p.a(7))
                }),
                C::less_than("a10(a7−(a8+a9))−(a12a7−a11(a8+a9))>0", |p| {
                    let death = p.a(8) + p.a(9);
                    (
                        p.a(12) * p.a(7) - p.a(11) * death,
                        p.a(10) * (p.a(7) - death),
                    )
                }),
            ],
        };
        if regime == Regime::ParameterConditioned {
            match self {
                Target::Conjecture1a | Target::Conjecture1b => {
                    out.push(C::at_most("a3≤a7", |p| (p.a(3), p.a(7))));
                    out.push(C::at_most("a7≤a8+a9", |p| (p.a(7), p.a(8) + p.a(9))));
                }
                Target::Conjecture2 => out.push(C::at_most("a1≤a4", |p| (p.a(1), p.a(4)))),
                _ => {}
            }
        }
        out
    }

    /// Coordinates (0-based) that may be nonzero in sampled initial points.
    pub fn free_coordinates(self, regime: Regime) -> Vec<usize> {
        match (self, regime) {
            (Target::NoDim, _) => vec![0, 4],
            (Target::NoDom | Target::NoDomDecay | Target::NoDomBalance, _) => vec![3, 5],
            (Target::NoBacteria, _) => vec![0, 1, 2, 4, 5],
            (Target::NoPhyto, _) => vec![1, 2, 3, 4, 5],
            (Target::NoZooNoMixo, _) => vec![0, 3, 4, 5],
            (Target::Conjecture1a | Target::Conjecture1b, Regime::InitialConditioned) => {
                vec![0, 1, 3, 4, 5]
            }
            (Target::Conjecture2, Regime::InitialConditioned) => vec![1, 2, 3, 4, 5],
            _ => (0..DIM).collect(),
        }
    }

    fn predict(self, qso: &Qso, x0: &SimplexPoint) -> Result<PredictedLimit> {
        if let Some(scenario) = self.scenario() {
            return predict(qso, x0, scenario);
        }
        let family = match self {
            Target::Conjecture1a => Family::Lambda4,
            Target::Conjecture1b => Family::Lambda2,
            Target::Conjecture2 => Family::Lambda3,
            _ => unreachable!(),
        };
        candidates(qso, Some(&[]))
            .into_iter()
            .find(|fp| fp.family == family && fp.feasible)
            .map(|fp| PredictedLimit::Point {
                family,
                point: fp.coordinates,
            })
            .ok_or_else(|| Error::HypothesisViolated(format!("{family} is not feasible")))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Target::ALL
            .into_iter()
            .find(|t| t.name() == key || t.aliases().contains(&key.as_str()))
            .ok_or_else(|| {
                let names: Vec<&str> = Target::ALL.iter().map(|t| t.name()).collect();
                format!("unknown target {s:?}; expected one of {}", names.join(", "))
            })
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Single,
    /// The alternative is imposed on the rates.
    ParameterConditioned,
    /// The alternative is imposed by zeroing an initial coordinate.
    InitialConditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterateSettings {
    pub max_iterations: u64,
    pub step_tol: f64,
    pub consecutive: u32,
}

impl Default for IterateSettings {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            step_tol: DEFAULT_STEP_TOL,
            consecutive: DEFAULT_CONSECUTIVE,
        }
    }
}

impl IterateSettings {
    fn options(&self) -> IterateOptions {
        IterateOptions {
            max_iterations: self.max_iterations,
            step_tol: self.step_tol,
            consecutive: self.consecutive,
            history: crate::dynamics::HistoryMode::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub target: Target,
    pub n_param_draws: usize,
    pub n_initial_points_per_draw: usize,
    pub seed: u64,
    pub iterate: IterateSettings,
    /// Test hook: replace every prediction with a point no trajectory
    /// approaches, so that every run mismatches.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub inject_wrong_prediction: bool,
}

impl ExperimentSpec {
    pub fn new(
        target: Target,
        n_param_draws: usize,
        n_initial_points_per_draw: usize,
        seed: u64,
    ) -> Self {
        Self {
            target,
            n_param_draws,
            n_initial_points_per_draw,
            seed,
            iterate: IterateSettings::default(),
            inject_wrong_prediction: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_param_draws == 0 || self.n_initial_points_per_draw == 0 {
            return Err(Error::InvalidExperiment(
                "draw and point counts must be at least 1".into(),
            ));
        }
        if self.iterate.max_iterations == 0 || self.iterate.consecutive == 0 {
            return Err(Error::InvalidExperiment(
                "iteration settings must be positive".into(),
            ));
        }
        if !(self.iterate.step_tol > 0.0) {
            return Err(Error::InvalidExperiment(
                "step tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    fn regime_of(&self, draw: usize) -> Regime {
        let regimes = self.target.regimes();
        regimes[draw % regimes.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub draw: usize,
    pub point: usize,
    pub regime: Regime,
    pub params: Parameters,
    pub x0: SimplexPoint,
    pub observed_limit: SimplexPoint,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: u64,
    pub predicted: PredictedLimit,
    pub distance_to_prediction: f64,
    pub nearest_family: Option<Family>,
    /// Command line that replays this run.
    pub rerun: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RegimeSummary {
    pub n_runs: usize,
    pub n_converged: usize,
    pub n_matched_prediction: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub n_runs: usize,
    pub n_converged: usize,
    pub n_matched_prediction: usize,
    pub match_rate: f64,
    pub by_regime: BTreeMap<Regime, RegimeSummary>,
    /// Observed limits keyed by the families within the match tolerance
    /// (`+`-joined on ties, `none` when nothing matches).
    pub nearest_families: BTreeMap<String, usize>,
    pub n_counterexamples: usize,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    /// Proved targets pass only with every run matched; conjecture targets
    /// only record their match rate.
    pub fn passed(&self) -> bool {
        self.spec.target.is_conjecture() || self.n_matched_prediction == self.n_runs
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

struct RunOutcome {
    regime: Regime,
    converged: bool,
    matched: bool,
    tie_key: String,
    counterexample: Option<Counterexample>,
}

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for `(seed, draw, point)`; `point = u64::MAX` is the
/// parameter stream of a draw.
pub fn stream_rng(seed: u64, draw: u64, point: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed) ^ draw) ^ point))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let started = Instant::now();
    let target = spec.target;

    let draws: Vec<(Regime, Qso)> = (0..spec.n_param_draws)
        .into_par_iter()
        .map(|d| {
            let regime = spec.regime_of(d);
            let mut rng = stream_rng(spec.seed, d as u64, u64::MAX);
            let params = sample_parameters(&target.constraints(regime), &mut rng)?;
            Ok((regime, Qso::new(params)?))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..spec.n_param_draws)
        .flat_map(|d| (0..spec.n_initial_points_per_draw).map(move |p| (d, p)))
        .collect();
    let outcomes: Vec<RunOutcome> = jobs
        .par_iter()
        .map(|&(d, p)| {
            let (regime, qso) = &draws[d];
            run_one(spec, *regime, qso, d, p)
        })
        .collect::<Result<_>>()?;

    let mut report = ExperimentReport {
        spec: spec.clone(),
        n_runs: 0,
        n_converged: 0,
        n_matched_prediction: 0,
        match_rate: 0.0,
        by_regime: BTreeMap::new(),
        nearest_families: BTreeMap::new(),
        n_counterexamples: 0,
        counterexamples: Vec::new(),
        wall_time: Duration::ZERO,
    };
    for outcome in outcomes {
        report.n_runs += 1;
        let regime = report.by_regime.entry(outcome.regime).or_default();
        regime.n_runs += 1;
        if outcome.converged {
            report.n_converged += 1;
            regime.n_converged += 1;
        }
        if outcome.matched {
            report.n_matched_prediction += 1;
            regime.n_matched_prediction += 1;
        }
        *report.nearest_families.entry(outcome.tie_key).or_default() += 1;
        if let Some(cx) = outcome.counterexample {
            report.n_counterexamples += 1;
            if report.counterexamples.len() < COUNTEREXAMPLE_CAP {
                report.counterexamples.push(cx);
            }
        }
    }
    report.match_rate = report.n_matched_prediction as f64 / report.n_runs as f64;
    report.wall_time = started.elapsed();
    Ok(report)
}

fn run_one(
    spec: &ExperimentSpec,
    regime: Regime,
    qso: &Qso,
    draw: usize,
    point: usize,
) -> Result<RunOutcome> {
    let target = spec.target;
    let free = target.free_coordinates(regime);
    let mut rng = stream_rng(spec.seed, draw as u64, point as u64);
    let mut x0 = sample_face_point(&free, &mut rng);
    let mut attempts = 1;
    while qso.residual(&x0) <= FIXED_START_RESIDUAL {
        if attempts >= MAX_START_ATTEMPTS {
            return Err(Error::InvalidExperiment(format!(
                "could not sample a non-fixed initial point for draw {draw}"
            )));
        }
        x0 = sample_face_point(&free, &mut rng);
        attempts += 1;
    }

    let mut predicted = target.predict(qso, &x0)?;
    if spec.inject_wrong_prediction {
        predicted = PredictedLimit::Point {
            family: Family::Lambda1,
            point: *SimplexPoint::vertex(1).coords(),
        };
    }
    let run = iterate(qso, &x0, &spec.iterate.options())?;
    let verdict = &run.verdict;
    let distance = predicted.distance(&verdict.limit);
    let matched = verdict.converged && distance <= MATCH_TOL;
    let tie_key = if verdict.matched_families.is_empty() {
        "none".to_string()
    } else {
        verdict
            .matched_families
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("+")
    };
    let counterexample = (!matched).then(|| Counterexample {
        draw,
        point,
        regime,
        params: *qso.params(),
        x0,
        observed_limit: verdict.limit,
        converged: verdict.converged,
        stop_reason: verdict.stop_reason,
        iterations: verdict.iterations_used,
        predicted: predicted.clone(),
        distance_to_prediction: distance,
        nearest_family: verdict.nearest.as_ref().map(|m| m.family),
        rerun: rerun_command(qso.params(), &x0, &spec.iterate),
    });
    Ok(RunOutcome {
        regime,
        converged: verdict.converged,
        matched,
        tie_key,
        counterexample,
    })
}

/// `plankton simulate ...` invocation reproducing one run.
pub fn rerun_command(params: &Parameters, x0: &SimplexPoint, settings: &IterateSettings) -> String {
    let mut cmd = String::from("plankton simulate");
    for (i, a) in params.rates().iter().enumerate() {
        cmd.push_str(&format!(" --a{} {}", i + 1, fmt_sig17(*a)));
    }
    let x: Vec<String> = x0.coords().iter().map(|v| fmt_sig17(*v)).collect();
    cmd.push_str(&format!(
        " --x0 {} --max-iter {} --step-tol {}",
        x.join(","),
        settings.max_iterations,
        fmt_sig17(settings.step_tol)
    ));
    cmd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_sampling_is_valid() {
        let mut rng = stream_rng(1, 0, 0);
        for _ in 0..100 {
            assert!(sample_parameters(&[], &mut rng).unwrap().is_valid());
        }
    }

    #[test]
    fn infeasible_constraints_fail() {
        let mut rng = stream_rng(2, 0, 0);
        let c = [
            SamplingConstraint::rate_at_least(2, 0.9),
            SamplingConstraint::rate_at_least(4, 0.9),
        ];
        assert!(matches!(
            sample_parameters(&c, &mut rng),
            Err(Error::SamplingFailed {
                rejections: MAX_REJECTIONS
            })
        ));
    }

    #[test]
    fn conjecture_constraints_hold() {
        let mut rng = stream_rng(3, 0, 0);
        for regime in Target::Conjecture1a.regimes() {
            let p =
                sample_parameters(&Target::Conjecture1a.constraints(*regime), &mut rng).unwrap();
            let [a1, _, _, a4, _, _, _, _, _, a10, a11, a12] = *p.rates();
            assert!(a4 < a1);
            assert!(a12 * a1 - a11 * a4 > 0.0);
            assert!(a10 * a1 - a10 * a4 - a12 * a1 + a11 * a4 > 0.0);
        }
    }

    #[test]
    fn face_points_respect_zeros() {
        let mut rng = stream_rng(4, 0, 0);
        for _ in 0..50 {
            let x = sample_face_point(&[0, 4], &mut rng);
            assert_eq!([x[1], x[2], x[3], x[5]], [0.0; 4]);
            assert!((x.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn target_names_round_trip() {
        for t in Target::ALL {
            assert_eq!(t.name().parse::<Target>().unwrap(), t);
        }
        assert_eq!("Prop51".parse::<Target>().unwrap(), Target::NoDim);
        assert_eq!("PropK1".parse::<Target>().unwrap(), Target::NoPhyto);
        assert!("prop99".parse::<Target>().is_err());
    }

    #[test]
    fn zero_draws_rejected() {
        let spec = ExperimentSpec::new(Target::NoDim, 0, 1, 7);
        assert!(matches!(
            run_experiment(&spec),
            Err(Error::InvalidExperiment(_))
        ));
    }

    #[test]
    fn small_no_dim_experiment_matches() {
        let report = run_experiment(&ExperimentSpec::new(Target::NoDim, 5, 3, 11)).unwrap();
        assert_eq!(report.n_runs, 15);
        assert_eq!(report.n_matched_prediction, 15);
        assert!(report.passed());
    }

    #[test]
    fn injected_prediction_fails() {
        let mut spec = ExperimentSpec::new(Target::NoDom, 3, 2, 5);
        spec.inject_wrong_prediction = true;
        let report = run_experiment(&spec).unwrap();
        assert_eq!(report.n_matched_prediction, 0);
        assert_eq!(report.n_counterexamples, 6);
        assert!(!report.passed());
        assert!(report.counterexamples[0]
            .rerun
            .starts_with("plankton simulate --a1 "));
    }
}

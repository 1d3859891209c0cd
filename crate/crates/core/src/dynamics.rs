//! Trajectories `x⁽ⁿ⁺¹⁾ = V(x⁽ⁿ⁾)`, convergence detection, limit matching and
//! the predicted limits of the invariant-face scenarios.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_points::{enumerate_fixed_points, Family};
use crate::operator::Qso;
use crate::params::Parameters;
use crate::simplex::{distance_to_matter_segment, linf_distance, SimplexPoint, DIM, TOL_NONNEG};

pub const DEFAULT_MAX_ITERATIONS: u64 = 1_000_000;
pub const DEFAULT_STEP_TOL: f64 = 1e-13;
pub const DEFAULT_CONSECUTIVE: u32 = 10;
/// ∞-distance within which a limit is identified with a fixed point.
pub const MATCH_TOL: f64 = 1e-5;
/// Coordinates outside `[−band, 1 + band]` stop a run as diverged.
pub const DIVERGENCE_BAND: f64 = 1e-9;
/// Initial points with a smaller residual count as fixed points.
pub const FIXED_START_RESIDUAL: f64 = 1e-12;
/// A population growing by more than this relative factor per step is still
/// leaving its current neighbourhood, however small its absolute step.
pub const GROWTH_TOL: f64 = 1e-6;

const AUTO_HISTORY_ROWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistoryMode {
    Off,
    /// Keep every k-th iterate.
    Every(u64),
    /// Thin adaptively so at most ~2000 rows are kept.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterateOptions {
    pub max_iterations: u64,
    pub step_tol: f64,
    /// Number of consecutive small steps required to declare convergence.
    pub consecutive: u32,
    pub history: HistoryMode,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            step_tol: DEFAULT_STEP_TOL,
            consecutive: DEFAULT_CONSECUTIVE,
            history: HistoryMode::Auto,
        }
    }
}

impl IterateOptions {
    pub fn without_history(self) -> Self {
        Self {
            history: HistoryMode::Off,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryRow {
    pub n: u64,
    pub point: SimplexPoint,
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub initial: SimplexPoint,
    pub params: Parameters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<HistoryRow>>,
    pub n_steps: u64,
    #[serde(rename = "final")]
    pub final_point: SimplexPoint,
    pub step_norm: f64,
}

pub const CSV_HEADER: &str = "n,x1,x2,x3,x4,x5,x6,step_norm";

/// 17 significant digits.
pub fn fmt_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

impl Trajectory {
    /// Writes the stored history as `n,x1..x6,step_norm` rows after a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for row in self.history.as_deref().unwrap_or_default() {
            write!(out, "{}", row.n)?;
            for v in row.point.coords() {
                write!(out, ",{}", fmt_sig17(*v))?;
            }
            writeln!(out, ",{}", fmt_sig17(row.step_norm))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    StepBelowTol,
    MaxIterations,
    Diverged,
}

/// Nearest known fixed point to an observed limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitMatch {
    pub family: Family,
    pub distance: f64,
    /// For the λ1 segment: the `λ = x5` of the closest segment point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_parameter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub converged: bool,
    pub limit: SimplexPoint,
    pub nearest: Option<LimitMatch>,
    /// Every family with a member within [`MATCH_TOL`] of the limit.
    pub matched_families: Vec<Family>,
    pub iterations_used: u64,
    pub stop_reason: StopReason,
}

impl ConvergenceVerdict {
    pub fn matched(&self) -> Option<&LimitMatch> {
        self.nearest.as_ref().filter(|m| m.distance <= MATCH_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Run {
    pub trajectory: Trajectory,
    pub verdict: ConvergenceVerdict,
}

/// Iterates the operator from `x0` until `consecutive` successive steps have
/// ∞-norm at most `step_tol`, or `max_iterations` is reached.
pub fn iterate(qso: &Qso, x0: &SimplexPoint, opts: &IterateOptions) -> Result<Run> {
    let mut history = History::new(opts.history);
    history.push(HistoryRow {
        n: 0,
        point: *x0,
        step_norm: 0.0,
    });

    let mut x = *x0;
    let mut n: u64 = 0;
    let mut streak: u32 = 0;
    let mut last_step = 0.0;
    let mut stop = StopReason::MaxIterations;
    while n < opts.max_iterations {
        let next = qso.apply(&x).map_err(|e| Error::RunAborted {
            step: n + 1,
            source: Box::new(e),
        })?;
        n += 1;
        last_step = next.distance(&x);
        let escaping = is_escaping(&x, &next);
        x = next;
        history.push(HistoryRow {
            n,
            point: x,
            step_norm: last_step,
        });
        if x.coords()
            .iter()
            .any(|&v| !(-DIVERGENCE_BAND..=1.0 + DIVERGENCE_BAND).contains(&v))
        {
            stop = StopReason::Diverged;
            break;
        }
        if last_step <= opts.step_tol && !escaping {
            streak += 1;
            if streak >= opts.consecutive {
                stop = StopReason::StepBelowTol;
                break;
            }
        } else {
            streak = 0;
        }
    }
    history.finish(HistoryRow {
        n,
        point: x,
        step_norm: last_step,
    });

    let (nearest, matched_families) = match_limit(qso, &x);
    let verdict = ConvergenceVerdict {
        converged: stop == StopReason::StepBelowTol,
        limit: x,
        nearest,
        matched_families,
        iterations_used: n,
        stop_reason: stop,
    };
    let trajectory = Trajectory {
        initial: *x0,
        params: *qso.params(),
        history: history.into_rows(),
        n_steps: n,
        final_point: x,
        step_norm: last_step,
    };
    Ok(Run {
        trajectory,
        verdict,
    })
}

/// True when one of the four populations is positive and growing
/// geometrically, e.g. bacteria regrowing from 1e-14 near an unstable point.
fn is_escaping(x: &SimplexPoint, next: &SimplexPoint) -> bool {
    (0..4).any(|i| x[i] > 0.0 && next[i] > x[i] * (1.0 + GROWTH_TOL))
}

/// Nearest enumerated fixed point (the λ1 segment taken as a whole) and all
/// families within [`MATCH_TOL`].
pub fn match_limit(qso: &Qso, x: &SimplexPoint) -> (Option<LimitMatch>, Vec<Family>) {
    let (seg_distance, seg_lambda) = distance_to_matter_segment(x.coords());
    let mut all = vec![LimitMatch {
        family: Family::Lambda1,
        distance: seg_distance,
        free_parameter: Some(seg_lambda),
    }];
    for fp in enumerate_fixed_points(qso, Some(&[])) {
        all.push(LimitMatch {
            family: fp.family,
            distance: linf_distance(&fp.coordinates, x.coords()),
            free_parameter: fp.free_parameter,
        });
    }
    let mut families: Vec<Family> = all
        .iter()
        .filter(|m| m.distance <= MATCH_TOL)
        .map(|m| m.family)
        .collect();
    families.sort();
    families.dedup();
    let nearest = all
        .into_iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance));
    (nearest, families)
}

struct History {
    mode: HistoryMode,
    stride: u64,
    rows: Vec<HistoryRow>,
}

impl History {
    fn new(mode: HistoryMode) -> Self {
        let stride = match mode {
            HistoryMode::Every(k) => k.max(1),
            _ => 1,
        };
        Self {
            mode,
            stride,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: HistoryRow) {
        if self.mode == HistoryMode::Off || !row.n.is_multiple_of(self.stride) {
            return;
        }
        self.rows.push(row);
        if self.mode == HistoryMode::Auto && self.rows.len() >= 2 * AUTO_HISTORY_ROWS {
            self.stride *= 2;
            let stride = self.stride;
            self.rows.retain(|r| r.n % stride == 0);
        }
    }

    fn finish(&mut self, last: HistoryRow) {
        if self.mode != HistoryMode::Off && self.rows.last().map(|r| r.n) != Some(last.n) {
            self.rows.push(last);
        }
    }

    fn into_rows(self) -> Option<Vec<HistoryRow>> {
        (self.mode != HistoryMode::Off).then_some(self.rows)
    }
}

/// The bacteria map `f(x) = x(1 + a11 − a12 − a11 x)` that governs `x4` once
/// plankton and DOM are absent and `x6 = 1 − x4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBacteriaMap {
    pub a11: f64,
    pub a12: f64,
}

impl ReducedBacteriaMap {
    pub fn new(a11: f64, a12: f64) -> Self {
        Self { a11, a12 }
    }

    pub fn from_qso(qso: &Qso) -> Self {
        Self::new(qso.a(11), qso.a(12))
    }

    pub fn apply(&self, x: f64) -> f64 {
        x * (1.0 + self.a11 - self.a12 - self.a11 * x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        1.0 + self.a11 - self.a12 - 2.0 * self.a11 * x
    }

    /// `0` and `1 − a12/a11`.
    pub fn fixed_points(&self) -> [f64; 2] {
        [0.0, 1.0 - self.a12 / self.a11]
    }
}

/// Invariant situations whose limits are known in closed form or up to a
/// point of the λ1 segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// No DIM now or after one step.
    NoDim,
    /// No DOM now or after one step.
    NoDom,
    NoBacteria,
    /// No phytoplankton, with mixoplankton and bacteria dying faster than
    /// they feed on DIM.
    NoPhyto,
    NoZooNoMixo,
    /// Every death rate dominates the corresponding consumption rate.
    AllSpecies,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::NoDim => "no-dim",
            Scenario::NoDom => "no-dom",
            Scenario::NoBacteria => "no-bacteria",
            Scenario::NoPhyto => "no-phyto",
            Scenario::NoZooNoMixo => "no-zoo-no-mixo",
            Scenario::AllSpecies => "all-species",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PredictedLimit {
    Point {
        family: Family,
        point: [f64; DIM],
    },
    /// Some `(0, 0, 0, 0, λ̄, 1 − λ̄)` depending on the initial point.
    MatterSegment,
}

impl PredictedLimit {
    pub fn distance(&self, x: &SimplexPoint) -> f64 {
        match self {
            PredictedLimit::Point { point, .. } => linf_distance(point, x.coords()),
            PredictedLimit::MatterSegment => distance_to_matter_segment(x.coords()).0,
        }
    }
}

impl fmt::Display for PredictedLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictedLimit::Point { family, point } => write!(f, "{family} {point:?}"),
            PredictedLimit::MatterSegment => f.write_str("lambda1 segment"),
        }
    }
}

fn is_zero(v: f64) -> bool {
    v.abs() <= TOL_NONNEG
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(what.to_string()))
    }
}

/// Checks the scenario's hypotheses on `(qso, x0)` and returns the limit
/// they imply. Fixed initial points are refused.
pub fn predict(qso: &Qso, x0: &SimplexPoint, scenario: Scenario) -> Result<PredictedLimit> {
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12] = *qso.params().rates();
    let x = x0.coords();
    let residual = qso.residual(x0);
    require(
        residual > FIXED_START_RESIDUAL,
        "initial point is not a fixed point",
    )?;
    let image = qso.image(x);
    match scenario {
        Scenario::NoDim => {
            require(is_zero(x[5]) && is_zero(image[5]), "x6 = x6' = 0")?;
            Ok(PredictedLimit::Point {
                family: Family::Lambda1,
                point: *SimplexPoint::vertex(5).coords(),
            })
        }
        Scenario::NoDom => {
            require(is_zero(x[4]) && is_zero(image[4]), "x5 = x5' = 0")?;
            if a11 <= a12 {
                Ok(PredictedLimit::Point {
                    family: Family::Lambda1,
                    point: *SimplexPoint::vertex(6).coords(),
                })
            } else {
                let r = a12 / a11;
                Ok(PredictedLimit::Point {
                    family: Family::Lambda2,
                    point: [0.0, 0.0, 0.0, 1.0 - r, 0.0, r],
                })
            }
        }
        Scenario::NoBacteria => {
            require(is_zero(x[3]), "x4 = 0")?;
            Ok(PredictedLimit::MatterSegment)
        }
        Scenario::NoPhyto => {
            require(is_zero(x[0]), "x1 = 0")?;
            require(a7 <= a8 + a9, "a7 ≤ a8 + a9")?;
            require(a10 + a11 <= a12, "a10 + a11 ≤ a12")?;
            Ok(PredictedLimit::MatterSegment)
        }
        Scenario::NoZooNoMixo => {
            require(is_zero(x[1]) && is_zero(x[2]), "x2 = x3 = 0")?;
            require(a1 <= a4, "a1 ≤ a4")?;
            require(a10 + a11 <= a12, "a10 + a11 ≤ a12")?;
            Ok(PredictedLimit::MatterSegment)
        }
        Scenario::AllSpecies => {
            require(a1 <= a4, "a1 ≤ a4")?;
            require(a2 <= a5 + a6, "a2 ≤ a5 + a6")?;
            require(a3 + a7 <= a8 + a9, "a3 + a7 ≤ a8 + a9")?;
            require(a10 + a11 <= a12, "a10 + a11 ≤ a12")?;
            Ok(PredictedLimit::MatterSegment)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qso(changes: &[(usize, f64)], base: f64) -> Qso {
        let mut p = Parameters::uniform(base).unwrap();
        for &(i, v) in changes {
            p = p.with(i, v).unwrap();
        }
        Qso::new(p).unwrap()
    }

    fn pt(c: [f64; DIM]) -> SimplexPoint {
        SimplexPoint::new(c).unwrap()
    }

    #[test]
    fn phyto_decays_geometrically_without_dim() {
        let q = qso(&[(4, 0.5)], 0.1);
        let x0 = pt([0.5, 0.0, 0.0, 0.0, 0.5, 0.0]);
        let run = iterate(
            &q,
            &x0,
            &IterateOptions {
                history: HistoryMode::Every(1),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(run.verdict.converged);
        assert!(run.verdict.limit.distance(&SimplexPoint::vertex(5)) < 1e-12);
        let rows = run.trajectory.history.as_ref().unwrap();
        for row in rows.iter().take(30) {
            let expected = 0.5f64.powi(row.n as i32) * 0.5;
            assert!(
                (row.point[0] - expected).abs() < 1e-15,
                "n={} {}",
                row.n,
                row.point[0]
            );
        }
    }

    #[test]
    fn bacteria_dim_balance_reached() {
        let q = qso(&[(11, 0.4), (12, 0.2)], 0.1);
        let run = iterate(
            &q,
            &pt([0.0, 0.0, 0.0, 0.9, 0.0, 0.1]),
            &IterateOptions::default(),
        )
        .unwrap();
        assert!(run.verdict.converged);
        let target = [0.0, 0.0, 0.0, 0.5, 0.0, 0.5];
        assert!(linf_distance(run.verdict.limit.coords(), &target) < 1e-6);
        assert_eq!(run.verdict.matched().unwrap().family, Family::Lambda2);
    }

    #[test]
    fn fixed_start_converges_immediately() {
        let q = qso(&[(11, 0.4), (12, 0.2)], 0.1);
        let x0 = pt([0.0, 0.0, 0.0, 0.5, 0.0, 0.5]);
        let run = iterate(&q, &x0, &IterateOptions::default()).unwrap();
        assert!(run.verdict.converged);
        assert!(run.verdict.iterations_used <= DEFAULT_CONSECUTIVE as u64);
        assert!(run.verdict.limit.distance(&x0) < 1e-15);
    }

    #[test]
    fn max_iterations_is_reported() {
        let q = qso(&[], 0.1);
        let opts = IterateOptions {
            max_iterations: 5,
            ..Default::default()
        };
        let run = iterate(&q, &pt([0.2, 0.2, 0.2, 0.2, 0.1, 0.1]), &opts).unwrap();
        assert!(!run.verdict.converged);
        assert_eq!(run.verdict.stop_reason, StopReason::MaxIterations);
        assert_eq!(run.trajectory.n_steps, 5);
    }

    #[test]
    fn auto_history_is_thinned() {
        let q = qso(&[(4, 0.001)], 0.1);
        let opts = IterateOptions {
            max_iterations: 50_000,
            ..Default::default()
        };
        let run = iterate(&q, &pt([0.5, 0.0, 0.0, 0.0, 0.5, 0.0]), &opts).unwrap();
        let rows = run.trajectory.history.unwrap();
        assert!(rows.len() <= 2 * AUTO_HISTORY_ROWS + 1, "{}", rows.len());
        assert_eq!(rows.first().unwrap().n, 0);
        assert_eq!(rows.last().unwrap().n, run.trajectory.n_steps);
    }

    #[test]
    fn csv_layout() {
        let q = qso(&[], 0.1);
        let opts = IterateOptions {
            max_iterations: 2,
            history: HistoryMode::Every(1),
            ..Default::default()
        };
        let run = iterate(&q, &pt([0.2, 0.2, 0.2, 0.2, 0.1, 0.1]), &opts).unwrap();
        let mut buf = Vec::new();
        run.trajectory.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 8);
        let x1: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(x1, 0.2);
    }

    #[test]
    fn reduced_map() {
        let f = ReducedBacteriaMap::new(0.4, 0.2);
        assert_eq!(f.apply(0.0), 0.0);
        assert!((f.apply(0.5) - 0.5).abs() < 1e-15);
        assert!((f.derivative(0.0) - 1.2).abs() < 1e-15);
        assert!((f.derivative(0.5) - 0.8).abs() < 1e-15);
        let g = ReducedBacteriaMap::new(0.3, 0.3);
        assert_eq!(g.derivative(0.0), 1.0);
        assert_eq!(g.fixed_points(), [0.0, 0.0]);
    }

    #[test]
    fn scenario_predictions() {
        let q = qso(&[(11, 0.2), (12, 0.3)], 0.1);
        let p = predict(&q, &pt([0.3, 0.0, 0.0, 0.0, 0.7, 0.0]), Scenario::NoDim).unwrap();
        assert_eq!(
            p,
            PredictedLimit::Point {
                family: Family::Lambda1,
                point: [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]
            }
        );
        let p = predict(&q, &pt([0.0, 0.0, 0.0, 0.3, 0.0, 0.7]), Scenario::NoDom).unwrap();
        assert_eq!(
            p,
            PredictedLimit::Point {
                family: Family::Lambda1,
                point: [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
            }
        );
        let p = predict(
            &q,
            &pt([0.2, 0.2, 0.2, 0.0, 0.2, 0.2]),
            Scenario::NoBacteria,
        )
        .unwrap();
        assert_eq!(p, PredictedLimit::MatterSegment);
    }

    #[test]
    fn scenario_hypotheses_are_enforced() {
        let q = qso(&[], 0.1);
        // x2 > 0 makes x6' > 0
        let err = predict(&q, &pt([0.3, 0.1, 0.0, 0.0, 0.6, 0.0]), Scenario::NoDim).unwrap_err();
        assert!(err.to_string().contains("x6"), "{err}");
        // a10 + a11 = 0.2 > a12 = 0.1
        let err = predict(&q, &pt([0.0, 0.2, 0.2, 0.2, 0.2, 0.2]), Scenario::NoPhyto).unwrap_err();
        assert!(err.to_string().contains("a10 + a11"), "{err}");
        // fixed start
        let err = predict(&q, &SimplexPoint::vertex(5), Scenario::NoDim).unwrap_err();
        assert!(err.to_string().contains("fixed point"), "{err}");
    }
}

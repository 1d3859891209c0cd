//! Discrete-time dynamics of a closed plankton trophic network.
//!
//! Six compartments (phytoplankton, zooplankton, mixoplankton, bacteria,
//! dissolved organic and inorganic matter) exchange mass through twelve
//! transfer rates. The update is a quadratic stochastic operator on the
//! 5-simplex; this crate evaluates it directly and in cubic-matrix form,
//! enumerates its fixed points, classifies their stability, iterates
//! trajectories and runs seeded Monte Carlo checks of limit behaviour.

pub mod dynamics;
pub mod error;
pub mod fixed_points;
pub mod harness;
pub mod operator;
pub mod params;
pub mod quadratic;
pub mod simplex;
pub mod stability;
pub mod tensor;

pub use dynamics::{
    iterate, predict, ConvergenceVerdict, HistoryMode, IterateOptions, PredictedLimit,
    ReducedBacteriaMap, Run, Scenario, StopReason, Trajectory,
};
pub use error::{Error, Result};
pub use fixed_points::{enumerate_fixed_points, Family, FixedPoint};
pub use harness::{run_experiment, ExperimentReport, ExperimentSpec, Regime, Target};
pub use operator::Qso;
pub use params::{Constraint, Parameters, ValidityReport};
pub use quadratic::{solve_quadratic, QuadraticCoefficients};
pub use simplex::{distance_to_matter_segment, is_on_matter_segment, SimplexPoint};
pub use stability::{
    classify, classify_point, eigenvalues, jacobian, Classification, StabilityReport,
};
pub use tensor::{check_simplex_criterion, CubicMatrix, QsoTensor};

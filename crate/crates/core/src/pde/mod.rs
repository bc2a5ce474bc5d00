//! Implicit finite-difference solver for ∂ₜu = Δφ(u) on 1D and 2D grids.

mod field;
mod grid;
mod linsolve;
mod ordering;
mod solver;

pub use field::{Field, Problem, RunLog, StepRecord};
pub use grid::{Grid, GridInfo, NodeClass};
pub use ordering::{ordering_check, OrderingReport, ORDERING_SLACK};
pub use solver::{solve, time_schedule, EdgeCondition, SolverOptions, State, Stepper};

//! Periodic orbits, turbulent pairs, nested families, symbolic tracking and
//! chaos metrics.

mod metrics;
mod periodic;
mod tracking;
mod turbulence;

pub use metrics::{lyapunov, scrambled_metrics, ScrambledGap};
pub use periodic::{bisect_root, period2_points, period3_find, Period3Orbit};
pub use tracking::{
    schedule_gaps, track_symbolic, track_symbolic_at, track_symbolic_pair, verify_schedule, SearchConfig, SymbolicSchedule, Verification,
};
pub use turbulence::{build_turbulent_pair, refine_nested, NestedFamily, TurbulentPair};

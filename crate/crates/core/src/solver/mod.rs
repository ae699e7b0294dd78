//! Time integration of the penalized compressible system and of the
//! incompressible reference system.

mod linear;
mod rhs;
mod run;
mod state;
mod step;

pub use linear::{gamma_time_average, gamma_time_average_bound, LinearDecay};
pub use rhs::{nonlinear_rhs, Monitors};
pub use run::{
    event_times, run_compressible, run_incompressible, Aggregates, Reference, RunOptions,
    RunReport, RunStatus, SampleRow, StepRow, ZetaEnvelope,
};
pub use state::{acoustic_propagate, FilteredState, State};
pub use step::{
    compressible_monitors, incompressible_monitors, step_compressible, step_incompressible,
    tail_fraction, BlowupProxy, StepControl, StepInfo,
};

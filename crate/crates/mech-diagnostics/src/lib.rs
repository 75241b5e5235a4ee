//! Checks on computed trajectories: conserved and dissipated quantities,
//! a Lyapunov probe built from dissipated quantities, and the contact
//! action-angle charts of the three-dimensional Darboux model.

mod charts;
mod error;
mod lyapunov;
mod quantity;

pub use charts::{chart_pushforward, from_chart, to_chart, ContactChart};
pub use error::{DiagnosticsError, Result};
pub use lyapunov::{lyapunov_probe, LyapunovVerdict};
pub use quantity::{
    conserved_drift, dissipated_drift, dissipated_drift_with_rate, dissipation_rate, QuantityKind,
    QuantityReport,
};

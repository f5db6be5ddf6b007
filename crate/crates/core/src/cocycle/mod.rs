//! The slash action on series, the cocycles Ψ(h) and numerical checks of
//! their identities.

mod series;
mod slash;
mod verify;

pub use series::{EvalContext, SeriesClosure, SeriesFn};
pub use slash::{slash_factor, slash_factors, slash_value};
pub use verify::{
    default_panel, eta_collection, eta_example_check, eta_relations, psi, psi_based, psi_series, verify_cocycle,
    verify_equivariance, EtaExampleReport,
};
pub use crate::report::ResidualReport;

//! Iterated integrals of cusp forms: nested quadrature along polyline paths
//! and the graded ODE along straight segments.

mod config;
mod direct;
mod kernel;
mod ode;
pub mod quad;
mod relations;

pub use config::{QuadConfig, YMaxPolicy};
pub use direct::{r_direct, r_direct_forms, Endpoint, IterIntSpec};
pub use kernel::{auto_height, cusp_tail_bound, kernel_power, ray_tail_bound, Integrand};
pub use ode::{omega_apply, ray_height, segment_j, vertical_J, Omega};
pub use relations::{rel2_residual, rel3_residual, verify_mult, verify_rel2, verify_rel3};

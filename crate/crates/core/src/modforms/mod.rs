//! Cusp forms on SL₂(ℤ): exact q-expansions, the eta multiplier, bases and
//! evaluation.

mod basis;
pub mod exact;
mod forms;
mod multiplier;

pub use basis::{
    cusp_space_basis, cusp_space_dim, delta, eta_power_form, eta_qseries, g16, level_one_basis, named_form,
    DEFAULT_LEN,
};
pub use forms::{eval_form, reduce_to_fundamental_domain, CuspForm, DecayBound, FormJson, QSeries};
pub use multiplier::{
    dedekind_sum, dedekind_sum_naive, eta_epsilon, eta_epsilon_angle, eta_power_angle, mono_multiplier,
    multiplier_angle, multiplier_value,
};

//! The three transfer clustering algorithms. Each exposes its objective,
//! the closed-form block updates, and a fit driver; the `*_fit_observed`
//! variants report the state after every sweep.

mod tfcm;
mod tfkpc;
mod tfsc;

pub use tfcm::{
    tfcm_center_update, tfcm_fit, tfcm_fit_observed, tfcm_membership_update, tfcm_objective,
};
pub use tfkpc::{
    tfkpc_bias_update, tfkpc_direction_update, tfkpc_fit, tfkpc_fit_observed,
    tfkpc_membership_update, tfkpc_objective,
};
pub use tfsc::{
    tfsc_center_update, tfsc_fit, tfsc_fit_observed, tfsc_membership_update, tfsc_objective,
    tfsc_weight_update,
};

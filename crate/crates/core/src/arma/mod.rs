//! Box-Jenkins modelling: autocorrelations, order identification,
//! estimation, residual diagnostics and simulation.
//!
//! Models are fit on a standardized copy of the series (see
//! [`Standardization`]) and simulation restores the same profile.

mod acf;
mod diagnose;
mod identify;
mod model;
mod profile;
mod roots;
mod simulate;

pub use acf::{acf_pacf, acf_pacf_values, autocorrelations, durbin_levinson, AcfResult, Z95};
pub use diagnose::{
    allowed_exceedances, diagnose, diagnose_residuals, ResidualReport, DIAGNOSE_LAGS,
};
pub use identify::{identify, identify_z, ArmaKind, Identification, CUTOFF_RUN, MIN_IDENTIFY_LAGS};
pub use model::{estimate, estimate_with, yule_walker, ArmaModel, EstimateOptions, MAX_CSS_ITER};
pub use profile::{Deseasonal, Standardization, DAY_WINDOW};
pub use roots::{companion_roots, is_stable, project_stable};
pub use simulate::{burn_in, simulate, simulate_at, simulate_standardized, Simulation};

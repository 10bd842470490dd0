//! Discrete Bourgain-space machinery: space-time fields, weighted norms,
//! time cutoffs, resonance inequalities, trilinear sums and the bilinear
//! ratio harness.

mod algebra;
mod bilinear;
mod ensemble;
mod norms;
mod spacetime;
mod trilinear;
mod window;

pub use algebra::{
    dispersive_identity_residual, inequality_check_301, inequality_check_31_33, inequality_ratios,
    random_samples, sweep_constants, FrequencySample, InequalityConstants, InequalityReport,
    Region, INEQUALITY_SLACK,
};
pub use bilinear::{
    bilinear_parts, bilinear_ratio, check_admissible, check_time_support, duality_check,
    BilinearParams, LemmaId, PairSpectra, DEFAULT_PLUS, SUPPORT_TOLERANCE,
};
pub use ensemble::{
    fit_theta, member_fields, ratio_ensemble, theta_scan, theta_scan_many, EnsembleSpec,
    EstimateReport, CSV_HEADER,
};
pub use norms::{
    bracket, check_zero_mode_free, weighted_x_norm, weighted_y_norm, xkb_norm, yk_norm, Dispersion,
    NormSpec, WeightStyle, ZERO_MODE_TOLERANCE,
};
pub use spacetime::{SpaceTimeField, StRepresentation};
pub use trilinear::{
    trilinear_integral, trilinear_integral_capped, DenominatorStyle, TrilinearWeights,
    TRILINEAR_LATTICE_CAP,
};
pub use window::{psi, psi_delta, time_window};

//! Robin harmonic measure and the experiments built on it.

mod concentration;
mod density;
mod harnack;
mod lower_bound;
mod scan;

pub use concentration::{dirichlet_compare, lorenz, Concentration, Lorenz, GROUP_EDGES};
pub use density::{sigma_of, vertex_set_mass, BoundarySet, MeasureDensity};
pub use harnack::{
    harnack_ratio, harnack_scan, local_h, match_harnack, oscillation_decay, HarnackPair,
    HarnackRecord, OscillationDecay, POLE_EXCLUSION,
};
pub use lower_bound::{
    active_boundary, density_bound_scan, ActiveRecord, DensityFit, DensityRow, DensityScan,
};
pub use scan::{
    a_uniformity, e_sets, fit_gamma, group_maxima, pole_robustness, pooled_uniformity, ratio_scan,
    small_scale_trend, write_scan_csv, GammaFit, GroupMax, PooledUniformity, RatioRecord, ScanMeta,
    ScanParams, ScanReport, UniformityPair, GAMMA_MIN_POINTS, GAMMA_WINDOW_MAX,
};

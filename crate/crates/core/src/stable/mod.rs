//! Stable distributions: evaluation, sampling, fitting and summary
//! statistics for samples of response values.

mod density;
mod fit;
mod quad;
mod sample;
mod table;

pub use density::{
    stable_cdf, stable_cf, stable_pdf, standard_cdf, standard_pdf, Cdf, StableParams,
    ALPHA_ONE_BAND,
};
pub use fit::{
    dist_stats, fit_stable, quantile_estimate, BoundaryFlags, DistStats, StableFit, ALPHA_MIN,
};
pub use quad::{gauss_kronrod, gauss_legendre};
pub use sample::{sample_stable, sample_standard};
pub use table::DensityTable;

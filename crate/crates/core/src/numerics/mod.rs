//! Special functions, quadrature, log-domain arithmetic and spectral convolution.

pub mod logscaled;
pub mod quadrature;
pub mod quantile;
pub mod special;
pub mod spectral;

pub use logscaled::{LogPolar, LogScaled};
pub use quadrature::{graded_breaks, integrate_composite, GaussLegendre, Grid1D};
pub use special::{gamma_ratio_factor, gamma_ratio_sup, ln_gamma, ln_gamma_ratio, log_sphere_area};
pub use spectral::{fft_convolve_power, BaseLaw, ConvolutionOptions, ConvolutionPower, EdgeBehaviour, StepDensity};
pub use quantile::{quantile_table, QuantileTable};

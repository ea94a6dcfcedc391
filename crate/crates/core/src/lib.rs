//! # kacsphere
//!
//! A numerical laboratory for entropy on Kac's sphere `S^{N-1}(√N)`.
//!
//! The crate evaluates, exactly up to quadrature error, the objects that
//! connect a density `F_N` on the sphere with its one-dimensional marginals:
//!
//! - [`numerics`]: log-domain Gamma and sphere areas, composite Gauss–Legendre
//!   grids, spectral N-fold convolution, quantile tables.
//! - [`density1d`]: densities on the line and their functionals (moments,
//!   relative entropy, Fisher information, pole control).
//! - [`sphere`]: uniform and conditioned-tensorization densities on the sphere,
//!   normalization curves `Z_N(f, √u)`, first and second marginals, spherical
//!   entropy and Fisher information.
//! - [`extension`]: the Euclidean extension `F̃_N(v) = F_N(√N v/|v|) γ_N(v)`
//!   and its marginal, moment and entropy identities.
//! - [`transport`]: exact 1D Wasserstein distances and the transport-side
//!   bounds (W1 sphere bound, moment lift, HWI and its Hölder variant).
//! - [`harness`]: exact entropy identities, correction terms and the full
//!   inequality chain with measured `ε̂(N)`.
//! - [`cli`]: configuration, sweeps and CSV/SVG export behind the `kaclab`
//!   binary.
//!
//! ```no_run
//! use kacsphere::density1d::Density1D;
//! use kacsphere::sphere::SphereDensity;
//! use kacsphere::harness::{verify_chain, ChainParams};
//!
//! let f = Density1D::bump(1.0).unwrap();
//! let sphere = SphereDensity::conditioned(f, 64).unwrap();
//! let report = verify_chain(&sphere, &ChainParams::default()).unwrap();
//! println!("epsilon_hat = {:?}", report.epsilon_hat);
//! ```

pub mod cli;
pub mod density1d;
pub mod error;
pub mod extension;
pub mod harness;
pub mod numerics;
pub mod sphere;
pub mod transport;

pub use error::{Error, Result};

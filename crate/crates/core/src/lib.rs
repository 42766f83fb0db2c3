//! Limited-memory linear integral predictors for continuous-time signals
//! whose Fourier transforms decay exponentially.
//!
//! The target is the anticausal convolution `y(t) = ∫ h(t−s) x(s) ds` with a
//! smooth kernel `h` supported on `[−T, θ]`. The predictor replaces it by a
//! causal convolution with a kernel `ĥ_d` supported on `[0, T+θ]`, built from
//! the derivatives of `h` and the coefficients of a polynomial `ψ_d`
//! approximating `e^{iωT}`:
//!
//! ```text
//! ĥ_d(t) = Σ_k a_k h^{(k)}(t − T),      Ĥ_d(iω) = e^{−iωT} ψ_d(iω) H(iω)
//! ```
//!
//! Module map:
//!
//! * [`spectral`]: quadrature, grids, Fourier/Laplace transforms.
//! * [`weighted`]: weighted norms and closed-form moments.
//! * [`polynomials`]: `ψ_d` by Taylor truncation or weighted projection.
//! * [`kernels`]: smooth compactly supported target kernels.
//! * [`signals`]: analytic test signals and class membership.
//! * [`predictor`]: predicting kernels, predictions, error bounds.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernels;
pub mod polynomials;
pub mod precision;
pub mod predictor;
pub mod signals;
pub mod spectral;
pub mod weighted;

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
mod oracle;

pub use error::{Error, Result};
pub use kernels::{KernelSpec, MollifierKernel, Prototype, TargetKernel};
pub use polynomials::{ApproxReport, Method, Polynomial};
pub use precision::Precision;
pub use predictor::{build_predictor, NoiseReport, PredictionResult, PredictorKernel};
pub use signals::{ClassReport, NoiseP, Signal, TimeSignal};
pub use spectral::{SpectralGrid, TimeGrid};
pub use weighted::{WeightSign, WeightedNorm};

//! Spectral analysis on the (n+1)-dimensional `ax+b` group.
//!
//! The group G = ℝ ⋉ ℝⁿ acts by (x, y)·(x′, y′) = (x + x′, y + eˣ y′). This
//! crate computes the Plancherel density of the distinguished Laplacian on G,
//! convolution kernels of its spectral functions (heat semigroups, resolvent
//! powers, spectrally localized wave propagators), and the norm asymptotics
//! these kernels obey: heat-norm power laws in t, resolvent blow-up rates near
//! the spectrum, the linear growth of wave-propagator L¹ norms and the
//! non-decay of their uniform norms.
//!
//! Layout:
//! * [`specfun`]: complex log-Gamma, Beta, the Gauss hypergeometric function
//!   at nonpositive argument, and the ratio |Γ(1/2+iv)|²/|Γ(iv)|² = v·th(πv).
//! * [`geometry`]: group algebra, modular function, radial distance, and
//!   integrals over shells {R(x,y) ∈ [t+a, t+b]}.
//! * [`qkl`]: exact rational engine for the coefficient functions q_{k,l} of
//!   the iterated derivative Dˡ_{sh,v} and their large-v limits a_{k,l}.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration, oscillatory (Filon
//!   and rotated-contour) rules, and the half-line transforms m̌_k.
//! * [`plancherel`]: the spectral density ρ_n by three independent routes.
//! * [`kernel`]: kernel evaluation and the norm functionals built on it.
//! * [`campaigns`]: reproducible verification campaigns with CSV/JSON output.

pub mod campaigns;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod plancherel;
pub mod qkl;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};

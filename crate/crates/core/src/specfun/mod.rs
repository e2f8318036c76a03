//! Special functions and exact combinatorial numbers.

mod bessel;
mod combinatorics;
mod hypergeometric;
mod laguerre;
mod lambert;

pub use bessel::{bessel_i, bessel_i1_kernel, bessel_i1_kernel_derivative};
pub use combinatorics::{binomial, catalan, factorial, stirling_first, StirlingTable};
pub use hypergeometric::hyp1f1;
pub use laguerre::laguerre;
pub use lambert::lambert_w0;

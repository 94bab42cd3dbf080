//! Self-contained special-function and numerical-analysis kernel.
//!
//! Everything here is a pure function of its arguments; no shared state.

mod optim;
mod quad;
mod root;
mod special;

pub use optim::{nelder_mead, NelderMeadResult};
pub use quad::{integrate, QuadratureSpec};
pub use root::{find_root, RootBracket};
pub use special::{
    chi_square_sf, ln_gamma, reg_gamma_lower, reg_gamma_upper, std_normal_cdf, std_normal_inv_cdf,
    std_normal_pdf,
};

//! Finite-precision `Q_p`: scalars, matrices, Iwasawa/Hermite/Smith forms, flag varieties
//! and congruence-subgroup volumes.

mod flag;
mod hermite;
mod matrix;
pub mod modular;
mod scalar;
mod volume;

pub use flag::{for_each_gl, in_k0, FlagCoord, FlagSpace};
pub use hermite::{hermite_count, hermite_forms, HermiteForm, HermiteIter};
pub use matrix::{Iwasawa, PadicMatrix};
pub use modular::MAX_N;
pub use scalar::PadicScalar;
pub use volume::{
    abs_det, borel_order, gl_order, k0_index, kappa, modulus, modulus_exponent, modulus_sqrt, vol_k, vol_k0,
    vol_principal,
};

//! Exact computations around characteristic classes of foliations.
//!
//! * [`gf`]: cohomology of the finite models `W_n`, `WO_n`, `WGL_n`.
//! * [`jets`]: forms on truncated jet spaces realizing those classes.
//! * [`category`], [`cdr`]: chart categories and their Čech-de Rham double complex.
//! * [`homotopy`]: the comparison of a fibered cover with its refinement.
//!
//! Arithmetic is over [`rational::Rational`] throughout.

pub mod category;
pub mod cdr;
pub mod error;
pub mod form;
pub mod gf;
pub mod homotopy;
pub mod jets;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod simplicial;

pub use error::{Error, ValidationError};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gelfand-fuchs.md")]
    mod gelfand_fuchs {}
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/cech-de-rham.md")]
    mod cech_de_rham {}
    #[doc = include_str!("../../../book/src/homotopy.md")]
    mod homotopy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

//! Kripke-Joyal forcing over sheaves on finite spaces and finite locales.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is finite and decided
//! exhaustively: frames are tables, sheaves are enumerated sections, and the
//! forcing relation is computed by recursion with memoization.
//!
//! Module map:
//! - [`frame`]: finite spaces, finite frames, nuclei and sublocales.
//! - [`finring`]: finite commutative rings, ideals, filters, localization.
//! - [`sheaf`]: sheaves of finite sets, power objects, plus construction.
//! - [`formula`]: the formula language, its syntax and translations.
//! - [`forcing`]: the evaluator and the meta-theorem checkers.
//! - [`spectrum`]: the spectrum of a finite ring and its sheaves.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod finring;
pub mod forcing;
pub mod formula;
pub mod frame;
pub mod sheaf;
pub mod spectrum;

pub use forcing::{Environment, Evaluator};
pub use formula::{Formula, Sort, Term};
pub use frame::{FiniteSpace, Frame, Nucleus, Sublocale};
pub use sheaf::{Sheaf, Subsheaf};

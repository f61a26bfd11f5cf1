//! Lagrangian mechanics on a flat quaternionic Kähler chart `R^{4n}`.
//!
//! The chart carries three constant structure operators F, G, H
//! ([`structure`]). For a Lagrangian `L` given as a built-in or as an
//! expression ([`calculus`], [`dsl`]) the crate builds the Kähler 2-forms
//! `Φ_L^J = -d d_J L` ([`forms`]), solves the dynamics equation
//! `i_ξ Φ_L^J = dE_L^J` pointwise for the semispray `ξ` ([`mechanics`]) and
//! integrates the resulting Euler–Lagrange flow ([`flow`]).
//!
//! Everything works in a single chart with 0-based block indexing.

pub mod calculus;
pub mod cli;
pub mod coordinates;
pub mod dsl;
pub mod error;
pub mod flow;
pub mod forms;
pub mod linalg;
pub mod mechanics;
pub mod structure;

pub use error::{Error, Result};

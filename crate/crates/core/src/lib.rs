//! Quantitative representation theory of string algebras over finite fields.
//!
//! The crate builds string and band modules, evaluates Sylvester rank
//! functions and pp-dimensions exactly, measures local statistics of string
//! graphs, produces hyperfinite tilings and ε-isomorphism certificates, and
//! runs a constant-size parameter tester.

pub mod gf;
pub mod algebra;
pub mod module;
pub mod rank;
pub mod rational;
pub mod pp;
pub mod strings;
pub mod limitlab;
pub mod params;

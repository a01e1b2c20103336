//! Gram-matrix spectra of random matrices built from linear block codes.
//!
//! The crate constructs linear codes over GF(q), samples matrices whose
//! rows are character images of uniformly drawn codewords, compares the
//! spectrum of their normalized Gram matrix with the Marchenko-Pastur law,
//! and checks the moment expansion behind that comparison through exact
//! closed-path combinatorics.

pub mod codes;
pub mod combinatorics;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod gf;
pub mod moments;
pub mod paths;
pub mod spectra;

pub use error::{Error, Result};

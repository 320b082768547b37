//! Desk-scale machinery for the Erdős–Ko–Rado property of random Kneser
//! subgraphs `K_p(n,k)`: exact combinatorics, Johnson-scheme spectra and edge
//! boundaries, the counting identities and inequalities that lower-bound the
//! number of Kneser edges inside a non-star family, the union-bound sum, and
//! Monte Carlo estimation of the EKR threshold.

pub mod bounds;
pub mod combinatorics;
pub mod error;
pub mod johnson;
pub mod kneser;
pub mod linalg;
pub mod montecarlo;
pub mod sampling;
pub mod suites;

pub use error::{Error, Result};

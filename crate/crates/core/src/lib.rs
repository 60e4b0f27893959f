//! Exact root-system combinatorics and numerical conformal cocycles.
//!
//! - [`exactlin`]: rational vectors, ranks, solves and cone tests.
//! - [`rootsys`]: root systems, parabolic complements and `r(g)`.
//! - [`resonance`]: limit-case configurations and optimal-index bounds.
//! - [`confstruct`]: structural rules for declared Lyapunov spectra.
//! - [`lyapsim`]: random `CO(p, q)` cocycles and regularity tests.
//! - [`cli`]: the `resonance-lab` command line.

pub mod cli;
pub mod confstruct;
pub mod exactlin;
pub mod lyapsim;
pub mod resonance;
pub mod rootsys;

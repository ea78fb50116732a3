//! Test-support numerics shared by the stscale test suites.
//!
//! Nothing in here is used by the library itself: the quadrature routines act
//! as independent oracles for closed-form integrals, and the synthesis helpers
//! generate random fields with known second-order statistics.

pub mod quad;
pub mod synth;

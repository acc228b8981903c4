//! Seeded sampling of Haar unitaries, isometries, pure states, projectors and
//! low-rank density matrices. Every sampler draws only from the stream it is
//! handed.

mod haar;
mod rng;

pub use haar::{
    haar_isometry, haar_pure_state, haar_unitary, random_density, random_projector, Isometry,
    ISOMETRY_TOL,
};
pub use rng::{parse_seed, RngStream};

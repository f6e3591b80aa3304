//! Semantics-conditioned channel simulation for integrated sensing and
//! communication studies.
//!
//! The crate is organised as a pipeline: a structured scene description
//! ([`semantics`]) is encoded into a fixed-width conditioning code, a
//! generator ([`generator`]) maps codes to channel parameter vectors, and the
//! synthesizer ([`channel`]) renders those parameters into frequency-domain
//! channel snapshots built from target scattering centers ([`target`]),
//! stochastic clutter clusters ([`clutter`]) and their interactions
//! ([`interaction`]). The [`fidelity`] module scores synthesized channels
//! against references, and [`harness`] wires the pieces into reproducible
//! identification studies.

pub mod channel;
pub mod clutter;
pub mod fidelity;
pub mod generator;
pub mod harness;
pub mod interaction;
pub mod io;
pub mod llm;
pub mod math;
pub mod rng;
pub mod semantics;
pub mod target;

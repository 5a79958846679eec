//! Exact dynamics of a two-level atom coupled to a single quantized cavity
//! mode, with a dispersive (AC Stark) shift folded into the Hamiltonian.
//!
//! In the rotating frame the excitation-number blocks decouple: the pair
//! {|n, e>, |n+1, g>} evolves under a 2x2 Hamiltonian whose gap is the
//! generalized Rabi frequency
//!
//! ```text
//! beta_n = sqrt([delta + chi (2n+1)]^2 + 4 g^2 (n+1))
//! ```
//!
//! Everything in this crate is built on that block structure:
//!
//! * [`params`] holds the model constants and `beta_n`.
//! * [`field`] constructs photon-number distributions (Fock, coherent,
//!   even/odd cat) with controlled truncation tails.
//! * [`dynamics`] evolves joint atom-field states sector by sector and
//!   evaluates the atomic inversion `W(t)`, including closed forms for
//!   atoms prepared in the bare excited or ground state.
//! * [`lineshape`] computes the infinite-time average of the inversion as a
//!   function of detuning, which is the steady spectral line shape, plus the
//!   even/odd cat discrimination map built from it.
//! * [`oracle`] is a deliberately independent check: it diagonalizes the
//!   full truncated Hamiltonian (and separately integrates the Schroedinger
//!   equation with an adaptive Runge-Kutta scheme) without using the sector
//!   closed forms.
//! * [`verify`] runs the closed forms against the oracle over a parameter
//!   grid and reports the worst deviations.
//! * [`csvfmt`] renders results as deterministic CSV with `#` metadata
//!   comments.

pub mod csvfmt;
pub mod dynamics;
mod error;
pub mod field;
pub mod lineshape;
pub mod oracle;
pub mod params;
pub mod verify;

pub use dynamics::{AtomInit, JointState, SectorPropagator};
pub use error::Error;
pub use field::{FieldSpec, PhotonDistribution, TruncationPolicy};
pub use lineshape::{DiscriminationMap, LineShape};
pub use params::ModelParams;

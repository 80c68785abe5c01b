//! Statics and stability engine for a tendon-driven, incomplete
//! ball-and-socket shoulder joint.
//!
//! The joint couples a humeral head (ball) to a shallow socket whose contact
//! arc covers less than a hemisphere, trading raw stability for range of
//! motion and recovering the difference through tendon routing. This crate
//! computes the static consequences of that design:
//!
//! - axial dislocation-force curves of the incomplete ball-and-socket
//!   ([`stability`]), including the peak force the joint can hold before the
//!   head rides out of the socket;
//! - the self-locking condition under which external load presses the head
//!   deeper into the socket instead of levering it out ([`stability`]);
//! - the two-joint tendon coupling between elbow and shoulder, its
//!   potential-energy equilibrium, and its geometric failure condition
//!   ([`coupling`]);
//! - torque–angle maps for all four shoulder motion groups ([`torque`]),
//!   with a finite-difference virtual-work oracle for cross-checking the
//!   closed-form moment arms;
//! - range-of-motion bookkeeping against a human baseline ([`stability`]).
//!
//! All computation is pure and deterministic over immutable inputs; the
//! modules share the SI conventions of [`model`] (radians, metres, newtons)
//! and the bounded scalar optimiser in [`solver`]. File and CLI boundaries
//! speak degrees; see [`config`] for the JSON schema and [`cli`] for the
//! commands behind the `glenostatics` binary.

pub mod cli;
pub mod config;
pub mod coupling;
pub mod model;
pub mod solver;
pub mod stability;
pub mod torque;

pub use config::{RunConfig, Setup};
pub use model::{JointPose, MuscleForces, RomEnvelope, ShoulderGeometry};
pub use stability::{StabilityCriterion, StabilityReport, StabilityStatus};

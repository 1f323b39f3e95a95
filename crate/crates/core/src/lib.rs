//! Tooth-count synthesis and validation for 3K compound planetary gearboxes.
//!
//! [`gear_model`] evaluates the kinematic, assembly, interference and size
//! constraints of a design; [`synthesizer`] enumerates the finite tooth-count
//! domain for the globally cheapest feasible designs; [`actuator`] computes
//! output envelopes from motor constants.

pub mod actuator;
pub mod cli;
pub mod error;
pub mod gear_model;
pub mod rational;
pub mod specfile;
pub mod synthesizer;

pub use actuator::{motor_side_speed, peak_output_torque, reflected_inertia, ActuatorSpec};
pub use error::{Error, Result};
pub use gear_model::{
    carrier_clearance, check_assembly, check_sizes, check_structural, cost, derive_rings, gear_ratio, pitch_diameters,
    validate, ConstraintEntry, ConstraintId, ConstraintReport, GearboxDesign, Residual, SynthesisSpec, ToothCounts,
};
pub use rational::{parse_rational, Rational};
pub use synthesizer::{
    oracle_synthesize, sweep, synthesize, synthesize_with_workers, PruneCounts, Solution, SolutionSet, SweepParam,
    SweepRow,
};

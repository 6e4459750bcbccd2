//! Duty-cycled neighbor discovery: schedules, coverage maps, worst-case
//! latency oracles, analytic latency bounds, protocol generators and a
//! multi-device collision simulator.
//!
//! All time quantities are integer ticks and all rates are exact rationals.

pub mod bounds;
pub mod coverage;
pub mod error;
pub mod exec;
pub mod format;
pub mod interval;
pub mod protocols;
pub mod rational;
pub mod schedule;
pub mod simulator;

pub use coverage::{analyze, min_beacons, CoverageMap, DeterminismReport, Latency, OracleConfig, OracleReport};
pub use error::{NdError, Result};
pub use exec::Exec;
pub use interval::IntervalSet;
pub use rational::Rational;
pub use schedule::{
    BeaconSchedule, ProtocolSpec, RadioModel, ReceptionSchedule, ReceptionWindow, Semantics, Ticks, TimeBase,
};

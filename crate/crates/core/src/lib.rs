//! STPA-driven multilevel runtime monitoring for an emergency-braking simulation.
//!
//! The pipeline runs from an STPA model ([`stpa`]) through monitor stubs and
//! hand-written properties ([`property`]) to monitors placed at components
//! ([`monitor`]), which watch traces ([`trace`]) produced by the simulator
//! ([`sim`]) under injected faults ([`inject`]).

pub mod blocks;
pub mod bundled;
pub mod inject;
pub mod monitor;
pub mod property;
pub mod sim;
pub mod stpa;
pub mod time;
pub mod trace;

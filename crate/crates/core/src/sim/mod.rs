//! Emergency-braking simulation: ego car, MIO, sensor fusion, a shared bus,
//! the AEB controller and the speed controller.

pub mod aeb;
pub mod bus;
pub mod config;
pub mod speed;
pub mod streams;
pub mod vehicle;
pub mod world;

pub use aeb::{aeb_decide, compute_stopping_time, compute_ttc, AebController, AebError, AebOutput, Decision, Stage};
pub use bus::{Bus, BusStats, Message, MessageId, Payload};
pub use config::{parse_scenario, ConfigError, HazardDef, MioSegment, ScenarioConfig, StageTable};
pub use speed::SpeedController;
pub use streams::{injectable_sort, stream_decls, INJECTABLE};
pub use vehicle::VehicleState;
pub use world::{simulate, SimOutput};

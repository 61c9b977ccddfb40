//! Fault injection: fault descriptions, campaigns, and their effect on a run.

pub mod campaign;
pub mod fault;

pub use campaign::{parse_campaign, Campaign, CampaignError, CampaignFault};
pub use fault::{FaultError, FaultKind, FaultSet, FaultSpec, FaultTarget};

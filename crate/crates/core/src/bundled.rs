//! The AEB model, scenario, properties, monitor layout and campaigns shipped
//! with the crate.

use crate::inject::{parse_campaign, Campaign, CampaignError};
use crate::monitor::{RunError, RunSetup};
use crate::sim::{parse_scenario, ConfigError, ScenarioConfig};
use crate::stpa::{load, LoadError, StpaModel};

pub const MODEL: &str = include_str!("../../../models/aeb.stpa");
pub const NOMINAL_SCENARIO: &str = include_str!("../../../scenarios/nominal.scn");
pub const PROPERTIES: &str = include_str!("../../../properties/aeb.props");
pub const MONITORS: &str = include_str!("../../../monitors/aeb.mon");

/// Campaign files by name.
pub const CAMPAIGNS: [(&str, &str); 4] = [
    ("scenario1a", include_str!("../../../campaigns/scenario1a.cmp")),
    ("scenario1b", include_str!("../../../campaigns/scenario1b.cmp")),
    ("scenario1c", include_str!("../../../campaigns/scenario1c.cmp")),
    ("scenario2", include_str!("../../../campaigns/scenario2.cmp")),
];

pub fn model() -> Result<StpaModel, LoadError> {
    load(MODEL)
}

pub fn scenario() -> Result<ScenarioConfig, ConfigError> {
    parse_scenario(NOMINAL_SCENARIO)
}

/// Nominal scenario with the bundled properties and monitors.
pub fn setup() -> Result<RunSetup, RunError> {
    let scenario = scenario().expect("bundled scenario parses");
    RunSetup::new(scenario, PROPERTIES, MONITORS)
}

pub fn campaign(name: &str) -> Option<Result<Campaign, CampaignError>> {
    CAMPAIGNS.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_campaign(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_bundled_loads() {
        model().unwrap();
        let s = setup().unwrap();
        for (name, _) in CAMPAIGNS {
            campaign(name).unwrap().unwrap().validate(&s.scenario).unwrap();
        }
        assert!(campaign("scenario9").is_none());
    }
}

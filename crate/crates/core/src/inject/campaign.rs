//! Campaign files: a scenario name plus a list of faults.
//!
//! ```text
//! campaign scenario1c {
//!     scenario = scenario1c
//!     fault F-1c {
//!         target = AEBstatus
//!         kind = stuck_at
//!         value = 0
//!         start = 2.0
//!         expect = [M_delta_aeb]
//!     }
//! }
//! ```
//!
//! Targets are signal names, `bus` for floods, or `bus.<message>` for delays.
//! The magnitude key depends on the kind: `value` for `stuck_at` and
//! `offset`, `ticks` for `delay`, `rate` for `flood`.

use thiserror::Error;

use super::fault::{FaultError, FaultKind, FaultSpec, FaultTarget};
use crate::blocks::{parse_blocks, Block, BlockError};
use crate::sim::{injectable_sort, ScenarioConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CampaignError {
    #[error(transparent)]
    Parse(#[from] BlockError),
    #[error(transparent)]
    Fault(#[from] FaultError),
    #[error("expected exactly one `campaign` block, found {0}")]
    CampaignCount(usize),
    #[error("duplicate fault id `{0}`")]
    DuplicateFault(String),
    #[error("campaign is for scenario `{expected}`, not `{found}`")]
    ScenarioMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignFault {
    pub spec: FaultSpec,
    /// Monitors expected to detect this fault.
    pub expect: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub id: String,
    pub scenario: String,
    pub description: String,
    pub faults: Vec<CampaignFault>,
}

impl Campaign {
    /// Checks that the campaign belongs to `scenario` and that every fault fits it.
    pub fn validate(&self, scenario: &ScenarioConfig) -> Result<(), CampaignError> {
        if self.scenario != scenario.name {
            return Err(CampaignError::ScenarioMismatch { expected: self.scenario.clone(), found: scenario.name.clone() });
        }
        for f in &self.faults {
            f.spec.validate(scenario)?;
        }
        Ok(())
    }

    pub fn specs(&self) -> impl Iterator<Item = &FaultSpec> {
        self.faults.iter().map(|f| &f.spec)
    }
}

fn parse_fault(b: &Block) -> Result<CampaignFault, CampaignError> {
    b.expect_keys(&["target", "kind", "value", "ticks", "rate", "start", "duration", "expect"], &[])?;
    let id = b.label()?.to_string();
    let target_text = b.str("target")?;
    let target = FaultTarget::parse(target_text)
        .map_err(|_| FaultError::UnknownTarget { fault: id.clone(), target: target_text.to_string() })?;
    let kind_text = b.str("kind")?;
    let required = |key: &str| b.str(key);
    let kind = match kind_text {
        "stuck_at" => {
            let text = required("value")?;
            let FaultTarget::Signal(name) = &target else {
                return Err(FaultError::KindMismatch { fault: id, kind: "stuck_at", target: target.to_string() }.into());
            };
            let sort = injectable_sort(name).expect("parsed signal targets are injectable");
            let value = sort.parse_value(text).ok_or_else(|| FaultError::DomainViolation {
                fault: id.clone(),
                target: name.clone(),
                value: text.to_string(),
                sort: sort.to_string(),
            })?;
            FaultKind::StuckAt(value)
        }
        "offset" => FaultKind::Offset(b.opt_f64("value")?.ok_or_else(|| b.fail("`offset` fault needs `value`"))?),
        "delay" => FaultKind::Delay(b.opt_u64("ticks")?.ok_or_else(|| b.fail("`delay` fault needs `ticks`"))?),
        "flood" => {
            let rate = b.opt_u64("rate")?.ok_or_else(|| b.fail("`flood` fault needs `rate`"))?;
            FaultKind::Flood(u32::try_from(rate).map_err(|_| b.pos_of("rate", "flood rate is too large"))?)
        }
        other => return Err(b.pos_of("kind", format!("unknown fault kind `{other}`")).into()),
    };
    let start = b.opt_seconds("start")?.ok_or_else(|| b.fail("fault needs `start`"))?;
    let duration = b.opt_seconds("duration")?;
    let expect = b.list("expect")?.into_iter().map(str::to_string).collect();
    Ok(CampaignFault { spec: FaultSpec { id, target, kind, start, duration }, expect })
}

/// Parses a campaign without checking it against a scenario.
pub fn parse_campaign(text: &str) -> Result<Campaign, CampaignError> {
    let blocks = parse_blocks(text)?;
    if blocks.len() != 1 || blocks[0].kind != "campaign" {
        return Err(CampaignError::CampaignCount(blocks.iter().filter(|b| b.kind == "campaign").count()));
    }
    let b = &blocks[0];
    b.expect_keys(&["scenario", "description"], &["fault"])?;
    let mut faults: Vec<CampaignFault> = Vec::new();
    for f in b.children("fault") {
        let fault = parse_fault(f)?;
        if faults.iter().any(|g| g.spec.id == fault.spec.id) {
            return Err(CampaignError::DuplicateFault(fault.spec.id));
        }
        faults.push(fault);
    }
    Ok(Campaign {
        id: b.label()?.to_string(),
        scenario: b.str("scenario")?.to_string(),
        description: b.opt_str("description")?.unwrap_or_default().to_string(),
        faults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::MessageId;
    use crate::time::Seconds;
    use crate::trace::Value;

    const TEXT: &str = r#"
        campaign c {
            scenario = default
            fault A { target = AEBstatus kind = stuck_at value = 0 start = 2 expect = [M_delta_aeb] }
            fault B { target = bus.aeb_status kind = delay ticks = 5 start = 1 duration = 0.5 }
            fault C { target = bus kind = flood rate = 8 start = 1.5 duration = 2 }
            fault D { target = fusion_distance kind = offset value = -3.5 start = 0 }
        }
    "#;

    #[test]
    fn parses_all_kinds() {
        let c = parse_campaign(TEXT).unwrap();
        assert_eq!(c.faults.len(), 4);
        assert_eq!(c.faults[0].spec.kind, FaultKind::StuckAt(Value::Enum(0)));
        assert_eq!(c.faults[0].expect, vec!["M_delta_aeb"]);
        assert_eq!(c.faults[1].spec.target, FaultTarget::Message(MessageId::AebStatus));
        assert_eq!(c.faults[1].spec.duration, Some(Seconds::new(1, 2)));
        assert_eq!(c.faults[2].spec.kind, FaultKind::Flood(8));
        assert_eq!(c.faults[3].spec.kind, FaultKind::Offset(-3.5));
        c.validate(&ScenarioConfig::default()).unwrap();
    }

    #[test]
    fn rejects_out_of_domain_and_unknown_targets() {
        let bad = |body: &str| parse_campaign(&format!("campaign c {{ scenario = default fault X {{ {body} }} }}"));
        assert!(matches!(
            bad("target = AEBstatus kind = stuck_at value = 4 start = 1"),
            Err(CampaignError::Fault(FaultError::DomainViolation { .. }))
        ));
        assert!(matches!(
            bad("target = ThrottleRelease kind = stuck_at value = 1 start = 1"),
            Err(CampaignError::Fault(FaultError::DomainViolation { .. }))
        ));
        assert!(matches!(
            bad("target = steering kind = offset value = 1 start = 1"),
            Err(CampaignError::Fault(FaultError::UnknownTarget { .. }))
        ));
        assert!(matches!(bad("target = bus kind = melt start = 1"), Err(CampaignError::Parse(_))));
    }

    #[test]
    fn window_is_checked_against_the_scenario() {
        let c = parse_campaign("campaign c { scenario = default fault X { target = bus kind = flood rate = 2 start = 7 duration = 3 } }")
            .unwrap();
        assert!(matches!(c.validate(&ScenarioConfig::default()), Err(CampaignError::Fault(FaultError::WindowOutOfRange { .. }))));
        let other = ScenarioConfig { name: "other".into(), ..ScenarioConfig::default() };
        assert!(matches!(c.validate(&other), Err(CampaignError::ScenarioMismatch { .. })));
    }
}

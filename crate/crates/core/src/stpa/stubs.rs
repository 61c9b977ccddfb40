use std::fmt::Write as _;

use thiserror::Error;

use super::model::{CausalLevel, StpaModel};
use super::validate::{has_errors, validate, Finding};
use crate::trace::Level;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("model has {} error finding(s); fix them before generating monitors", .0.len())]
pub struct ValidationRequired(pub Vec<Finding>);

/// Monitor skeleton derived from one component constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorStub {
    pub monitor_id: String,
    pub property_id: String,
    pub level: Level,
    pub class: CausalLevel,
    pub placement: String,
    pub constraint_ref: String,
    pub constraint_text: String,
    pub causal_factors: Vec<String>,
    pub ucas: Vec<String>,
    pub hazards: Vec<String>,
    pub scenarios: Vec<String>,
    pub plumbing: bool,
    /// Property body with `?hole` placeholders for streams and thresholds.
    pub template: String,
}

/// Property shape for each causal-factor class.
pub fn template_for(class: CausalLevel) -> &'static str {
    match class {
        CausalLevel::Data => "HoldsAt(?signal >= ?min) and HoldsAt(?signal <= ?max)",
        CausalLevel::Delta => "Happens(?trigger) => HoldsAt(?response)",
        CausalLevel::Eta => "InterArrival(?packet_stream, $T_safe)",
    }
}

/// One stub per component constraint reached from a causal factor.
pub fn generate_monitor_stubs(model: &StpaModel) -> Result<Vec<MonitorStub>, ValidationRequired> {
    let findings = validate(model);
    if has_errors(&findings) {
        return Err(ValidationRequired(findings.into_iter().filter(|f| f.severity() == super::Severity::Error).collect()));
    }
    let mut out = Vec::new();
    for c in &model.constraints {
        let factors: Vec<_> = model.factors_for_constraint(&c.id).collect();
        let Some(class) = factors.iter().find_map(|cf| cf.level) else { continue };
        let mut ucas: Vec<String> = factors.iter().flat_map(|cf| cf.ucas.iter().cloned()).collect();
        ucas.sort();
        ucas.dedup();
        let mut hazards: Vec<String> =
            ucas.iter().filter_map(|u| model.uca(u)).flat_map(|u| u.hazards.iter().cloned()).collect();
        hazards.sort();
        hazards.dedup();
        out.push(MonitorStub {
            monitor_id: format!("M-{}", c.id),
            property_id: format!("P-{}", c.id),
            level: class.monitor_level(),
            class,
            placement: c.component.clone(),
            constraint_ref: c.id.clone(),
            constraint_text: c.text.clone(),
            causal_factors: factors.iter().map(|cf| cf.id.clone()).collect(),
            ucas,
            hazards,
            scenarios: factors.iter().filter(|cf| !cf.scenario.is_empty()).map(|cf| cf.scenario.clone()).collect(),
            plumbing: factors.iter().all(|cf| cf.plumbing),
            template: template_for(class).to_string(),
        });
    }
    Ok(out)
}

impl MonitorStub {
    pub fn binding_line(&self) -> String {
        format!("monitor {} level {} at {} checks {}", self.monitor_id, self.level, self.placement, self.property_id)
    }

    pub fn property_block(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}: {}", self.constraint_ref, self.constraint_text);
        let _ = writeln!(
            s,
            "# causal factors {} ({}), UCAs {}, hazards {}{}",
            self.causal_factors.join(", "),
            self.class,
            self.ucas.join(", "),
            self.hazards.join(", "),
            if self.plumbing { ", plumbing" } else { "" }
        );
        let _ = writeln!(s, "property {} on {}: {} -- fill in the ?holes", self.property_id, self.placement, self.template);
        let _ = writeln!(s, "    constraint {}", self.constraint_ref);
        s
    }
}

/// Monitor-binding file for a stub set.
pub fn render_bindings(stubs: &[MonitorStub]) -> String {
    let mut s = String::from("# generated monitor bindings\n");
    for stub in stubs {
        let _ = writeln!(s, "{}", stub.binding_line());
    }
    s
}

/// Property-template file for a stub set.
pub fn render_templates(stubs: &[MonitorStub]) -> String {
    let mut s = String::from("# generated property templates\n");
    for stub in stubs {
        s.push('\n');
        s.push_str(&stub.property_block());
    }
    s
}

use std::fmt;

use super::model::StpaModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

/// A broken link in the loss-to-constraint chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    HazardWithoutLoss,
    UcaWithoutHazard,
    CausalFactorWithoutUca,
    CausalFactorUnclassified,
    CausalFactorWithoutConstraint,
    ConstraintLevelConflict,
    LossWithoutHazard,
    ConstraintWithoutCausalFactor,
    IncompleteModel,
    ComponentUncovered,
}

impl Rule {
    pub fn severity(self) -> Severity {
        match self {
            Rule::HazardWithoutLoss
            | Rule::UcaWithoutHazard
            | Rule::CausalFactorWithoutUca
            | Rule::CausalFactorUnclassified
            | Rule::CausalFactorWithoutConstraint
            | Rule::ConstraintLevelConflict => Severity::Error,
            Rule::LossWithoutHazard | Rule::ConstraintWithoutCausalFactor | Rule::IncompleteModel => Severity::Warning,
            Rule::ComponentUncovered => Severity::Info,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Rule::HazardWithoutLoss => "hazard without loss",
            Rule::UcaWithoutHazard => "uca without hazard",
            Rule::CausalFactorWithoutUca => "causal factor without uca",
            Rule::CausalFactorUnclassified => "causal factor unclassified",
            Rule::CausalFactorWithoutConstraint => "causal factor without component constraint",
            Rule::ConstraintLevelConflict => "constraint level conflict",
            Rule::LossWithoutHazard => "loss without hazard",
            Rule::ConstraintWithoutCausalFactor => "constraint without causal factor",
            Rule::IncompleteModel => "incomplete model",
            Rule::ComponentUncovered => "component uncovered",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Finding {
    pub rule: Rule,
    pub subject: String,
}

impl Finding {
    pub fn severity(&self) -> Severity {
        self.rule.severity()
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity(), self.rule.slug(), self.subject)
    }
}

/// Every chain-rule finding for the model, sorted.
pub fn validate(model: &StpaModel) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut push = |rule, subject: &str| out.push(Finding { rule, subject: subject.to_string() });

    if model.losses.is_empty() || model.hazards.is_empty() {
        push(Rule::IncompleteModel, "model");
    }
    for l in &model.losses {
        if !model.hazards.iter().any(|h| h.losses.contains(&l.id)) {
            push(Rule::LossWithoutHazard, &l.id);
        }
    }
    for h in &model.hazards {
        if h.losses.is_empty() {
            push(Rule::HazardWithoutLoss, &h.id);
        }
    }
    for u in &model.ucas {
        if u.hazards.is_empty() {
            push(Rule::UcaWithoutHazard, &u.id);
        }
    }
    for cf in &model.causal_factors {
        if cf.ucas.is_empty() {
            push(Rule::CausalFactorWithoutUca, &cf.id);
        }
        if cf.level.is_none() {
            push(Rule::CausalFactorUnclassified, &cf.id);
        }
        if cf.constraints.is_empty() {
            push(Rule::CausalFactorWithoutConstraint, &cf.id);
        }
    }
    for c in &model.constraints {
        let mut levels: Vec<_> = model.factors_for_constraint(&c.id).filter_map(|cf| cf.level).collect();
        if model.factors_for_constraint(&c.id).next().is_none() {
            push(Rule::ConstraintWithoutCausalFactor, &c.id);
        }
        levels.sort();
        levels.dedup();
        if levels.len() > 1 {
            push(Rule::ConstraintLevelConflict, &c.id);
        }
    }
    for comp in &model.components {
        let touched = model
            .causal_factors
            .iter()
            .flat_map(|cf| &cf.constraints)
            .filter_map(|c| model.constraint(c))
            .any(|c| c.component == comp.id);
        if !touched {
            push(Rule::ComponentUncovered, &comp.id);
        }
    }
    out.sort();
    out
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity() == Severity::Error)
}

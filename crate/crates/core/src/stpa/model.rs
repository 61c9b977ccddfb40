use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::blocks::{parse_blocks, Block, BlockError};
use crate::trace::Level;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("parse error at {0}")]
    Parse(#[from] BlockError),
    #[error("dangling reference to `{id}` from `{from}`")]
    DanglingReference { id: String, from: String },
    #[error("id `{0}` is defined twice")]
    DuplicateId(String),
    #[error("hazard `{0}` is its own ancestor")]
    HazardCycle(String),
    #[error("causal factor `{0}`: context needs at least one variable")]
    EmptyVariables(String),
}

impl LoadError {
    /// Id the error is about, for dangling references.
    pub fn dangling_id(&self) -> Option<&str> {
        match self {
            LoadError::DanglingReference { id, .. } => Some(id),
            _ => None,
        }
    }
}

/// Causal-factor class: unsafe data, unsafe processing or unsafe communication path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CausalLevel {
    Data,
    Delta,
    Eta,
}

impl CausalLevel {
    pub const ALL: [CausalLevel; 3] = [CausalLevel::Data, CausalLevel::Delta, CausalLevel::Eta];

    /// Monitor level responsible for this class.
    pub fn monitor_level(self) -> Level {
        match self {
            CausalLevel::Data => Level::Data,
            CausalLevel::Delta => Level::Functional,
            CausalLevel::Eta => Level::Network,
        }
    }
}

impl fmt::Display for CausalLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalLevel::Data => "D",
            CausalLevel::Delta => "delta",
            CausalLevel::Eta => "eta",
        })
    }
}

impl FromStr for CausalLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "D" | "data" => Ok(CausalLevel::Data),
            "delta" | "δ" => Ok(CausalLevel::Delta),
            "eta" | "η" => Ok(CausalLevel::Eta),
            _ => Err(format!("unknown causal-factor level `{s}` (expected D, delta or eta)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuideType {
    NotProvided,
    ProvidedCausesHazard,
    WrongTimingOrder,
    StoppedTooSoonAppliedTooLong,
}

impl fmt::Display for GuideType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuideType::NotProvided => "not_provided",
            GuideType::ProvidedCausesHazard => "provided_causes_hazard",
            GuideType::WrongTimingOrder => "wrong_timing_order",
            GuideType::StoppedTooSoonAppliedTooLong => "stopped_too_soon_applied_too_long",
        })
    }
}

impl FromStr for GuideType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "not_provided" => Ok(GuideType::NotProvided),
            "provided_causes_hazard" => Ok(GuideType::ProvidedCausesHazard),
            "wrong_timing_order" => Ok(GuideType::WrongTimingOrder),
            "stopped_too_soon_applied_too_long" => Ok(GuideType::StoppedTooSoonAppliedTooLong),
            _ => Err(format!("unknown guide type `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Safe,
    Unsafe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loss {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hazard {
    pub id: String,
    pub description: String,
    pub parent: Option<String>,
    pub losses: Vec<String>,
    pub system_constraint: String,
    pub requirements: Vec<String>,
}

/// Node of the control structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: String,
    pub kind: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlAction {
    pub id: String,
    pub controller: String,
    pub action: String,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsafeControlAction {
    pub id: String,
    pub control_action: String,
    pub guide: GuideType,
    pub context: String,
    pub hazards: Vec<String>,
    pub controller_constraint: String,
    pub requirements: Vec<String>,
    /// Rebuilt from prose rather than taken from a published table.
    pub reconstructed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context {
    pub variables: Vec<String>,
    pub assumptions: Vec<String>,
    pub conditions: Vec<String>,
}

/// Component-level safety constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentConstraint {
    pub id: String,
    pub component: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalFactor {
    pub id: String,
    pub ucas: Vec<String>,
    pub context: Context,
    pub level: Option<CausalLevel>,
    /// Loss-scenario label such as `1b`.
    pub scenario: String,
    pub description: String,
    pub constraints: Vec<String>,
    /// Supporting infrastructure rather than an analysed loss scenario.
    pub plumbing: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("context needs at least one variable")]
pub struct EmptyVariables;

/// Ties a context to a causal-factor class. The skeleton still lacks an id,
/// its UCA links and its component constraints.
pub fn map_context(context: Context, level: CausalLevel) -> Result<CausalFactor, EmptyVariables> {
    if context.variables.is_empty() {
        return Err(EmptyVariables);
    }
    Ok(CausalFactor {
        id: String::new(),
        ucas: Vec::new(),
        context,
        level: Some(level),
        scenario: String::new(),
        description: String::new(),
        constraints: Vec::new(),
        plumbing: false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StpaModel {
    pub losses: Vec<Loss>,
    pub hazards: Vec<Hazard>,
    pub components: Vec<Component>,
    pub control_actions: Vec<ControlAction>,
    pub ucas: Vec<UnsafeControlAction>,
    pub constraints: Vec<ComponentConstraint>,
    pub causal_factors: Vec<CausalFactor>,
}

impl StpaModel {
    pub fn hazard(&self, id: &str) -> Option<&Hazard> {
        self.hazards.iter().find(|h| h.id == id)
    }

    pub fn uca(&self, id: &str) -> Option<&UnsafeControlAction> {
        self.ucas.iter().find(|u| u.id == id)
    }

    pub fn constraint(&self, id: &str) -> Option<&ComponentConstraint> {
        self.constraints.iter().find(|c| c.id == id)
    }

    pub fn causal_factor(&self, id: &str) -> Option<&CausalFactor> {
        self.causal_factors.iter().find(|c| c.id == id)
    }

    /// Causal factors that list `constraint_id`.
    pub fn factors_for_constraint<'a>(&'a self, constraint_id: &'a str) -> impl Iterator<Item = &'a CausalFactor> + 'a {
        self.causal_factors.iter().filter(move |cf| cf.constraints.iter().any(|c| c == constraint_id))
    }

    /// Every id defined in the model, with a kind label.
    pub fn ids(&self) -> BTreeMap<String, &'static str> {
        let mut out = BTreeMap::new();
        out.extend(self.losses.iter().map(|x| (x.id.clone(), "loss")));
        out.extend(self.hazards.iter().map(|x| (x.id.clone(), "hazard")));
        out.extend(self.components.iter().map(|x| (x.id.clone(), "component")));
        out.extend(self.control_actions.iter().map(|x| (x.id.clone(), "control_action")));
        out.extend(self.ucas.iter().map(|x| (x.id.clone(), "uca")));
        out.extend(self.constraints.iter().map(|x| (x.id.clone(), "constraint")));
        out.extend(self.causal_factors.iter().map(|x| (x.id.clone(), "causal_factor")));
        out
    }

    /// Checks that every link resolves and the hazard hierarchy is acyclic.
    pub fn check_references(&self) -> Result<(), LoadError> {
        let mut seen = BTreeSet::new();
        let all = self
            .losses
            .iter()
            .map(|x| &x.id)
            .chain(self.hazards.iter().map(|x| &x.id))
            .chain(self.components.iter().map(|x| &x.id))
            .chain(self.control_actions.iter().map(|x| &x.id))
            .chain(self.ucas.iter().map(|x| &x.id))
            .chain(self.constraints.iter().map(|x| &x.id))
            .chain(self.causal_factors.iter().map(|x| &x.id));
        for id in all {
            if !seen.insert(id.as_str()) {
                return Err(LoadError::DuplicateId(id.clone()));
            }
        }
        let ids = self.ids();
        let need = |id: &str, kind: &str, from: &str| -> Result<(), LoadError> {
            if ids.get(id).copied() == Some(kind) {
                Ok(())
            } else {
                Err(LoadError::DanglingReference { id: id.to_string(), from: from.to_string() })
            }
        };
        for h in &self.hazards {
            for l in &h.losses {
                need(l, "loss", &h.id)?;
            }
            if let Some(p) = &h.parent {
                if p == &h.id {
                    return Err(LoadError::HazardCycle(h.id.clone()));
                }
                need(p, "hazard", &h.id)?;
            }
        }
        for h in &self.hazards {
            let mut cursor = h.parent.as_deref();
            let mut steps = 0;
            while let Some(p) = cursor {
                if p == h.id || steps > self.hazards.len() {
                    return Err(LoadError::HazardCycle(h.id.clone()));
                }
                cursor = self.hazard(p).and_then(|x| x.parent.as_deref());
                steps += 1;
            }
        }
        for ca in &self.control_actions {
            need(&ca.controller, "component", &ca.id)?;
        }
        for u in &self.ucas {
            need(&u.control_action, "control_action", &u.id)?;
            for h in &u.hazards {
                need(h, "hazard", &u.id)?;
            }
        }
        for c in &self.constraints {
            need(&c.component, "component", &c.id)?;
        }
        for cf in &self.causal_factors {
            for u in &cf.ucas {
                need(u, "uca", &cf.id)?;
            }
            for c in &cf.constraints {
                need(c, "constraint", &cf.id)?;
            }
            if cf.context.variables.is_empty() {
                return Err(LoadError::EmptyVariables(cf.id.clone()));
            }
        }
        Ok(())
    }
}

fn strings(b: &Block, key: &str) -> Result<Vec<String>, BlockError> {
    Ok(b.list(key)?.into_iter().map(String::from).collect())
}

fn text(b: &Block, key: &str) -> Result<String, BlockError> {
    Ok(b.opt_str(key)?.unwrap_or_default().to_string())
}

fn parsed<T: FromStr<Err = String>>(b: &Block, key: &str) -> Result<Option<T>, BlockError> {
    b.opt_str(key)?.map(|s| s.parse::<T>().map_err(|e| b.pos_of(key, e))).transpose()
}

/// Parses a model file and resolves every cross-reference.
pub fn load(source: &str) -> Result<StpaModel, LoadError> {
    let mut m = StpaModel::default();
    for b in parse_blocks(source)? {
        let id = b.label()?.to_string();
        match b.kind.as_str() {
            "loss" => {
                b.expect_keys(&["description"], &[])?;
                m.losses.push(Loss { id, description: text(&b, "description")? });
            }
            "hazard" => {
                b.expect_keys(&["description", "parent", "losses", "system_constraint", "requirements"], &[])?;
                m.hazards.push(Hazard {
                    id,
                    description: text(&b, "description")?,
                    parent: b.opt_str("parent")?.map(String::from),
                    losses: strings(&b, "losses")?,
                    system_constraint: text(&b, "system_constraint")?,
                    requirements: strings(&b, "requirements")?,
                });
            }
            "component" => {
                b.expect_keys(&["kind", "description"], &[])?;
                m.components.push(Component { id, kind: text(&b, "kind")?, description: text(&b, "description")? });
            }
            "control_action" => {
                b.expect_keys(&["controller", "action", "classification"], &[])?;
                let classification = match b.opt_str("classification")?.unwrap_or("unsafe") {
                    "safe" => Classification::Safe,
                    "unsafe" => Classification::Unsafe,
                    other => return Err(b.pos_of("classification", format!("expected safe or unsafe, got `{other}`")).into()),
                };
                m.control_actions.push(ControlAction {
                    id,
                    controller: b.str("controller")?.to_string(),
                    action: text(&b, "action")?,
                    classification,
                });
            }
            "uca" => {
                b.expect_keys(
                    &["control_action", "guide", "context", "hazards", "controller_constraint", "requirements", "reconstructed"],
                    &[],
                )?;
                m.ucas.push(UnsafeControlAction {
                    id,
                    control_action: b.str("control_action")?.to_string(),
                    guide: parsed(&b, "guide")?.ok_or_else(|| b.fail("`uca` block is missing `guide`"))?,
                    context: text(&b, "context")?,
                    hazards: strings(&b, "hazards")?,
                    controller_constraint: text(&b, "controller_constraint")?,
                    requirements: strings(&b, "requirements")?,
                    reconstructed: b.opt_bool("reconstructed")?.unwrap_or(false),
                });
            }
            "constraint" => {
                b.expect_keys(&["component", "text"], &[])?;
                m.constraints.push(ComponentConstraint { id, component: b.str("component")?.to_string(), text: text(&b, "text")? });
            }
            "causal_factor" => {
                b.expect_keys(&["ucas", "level", "scenario", "description", "constraints", "plumbing"], &["context"])?;
                let ctx = b.child("context").ok_or_else(|| b.fail("`causal_factor` block needs a `context` block"))?;
                ctx.expect_keys(&["variables", "assumptions", "conditions"], &[])?;
                m.causal_factors.push(CausalFactor {
                    id,
                    ucas: strings(&b, "ucas")?,
                    context: Context {
                        variables: strings(ctx, "variables")?,
                        assumptions: strings(ctx, "assumptions")?,
                        conditions: strings(ctx, "conditions")?,
                    },
                    level: parsed(&b, "level")?,
                    scenario: text(&b, "scenario")?,
                    description: text(&b, "description")?,
                    constraints: strings(&b, "constraints")?,
                    plumbing: b.opt_bool("plumbing")?.unwrap_or(false),
                });
            }
            other => return Err(b.fail(format!("unknown block kind `{other}`")).into()),
        }
    }
    m.check_references()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
loss L-1 { description = "collision" }
hazard H-1 { description = "unsafe headway" losses = [L-1] }
hazard H-1.1 { parent = H-1 losses = [L-1] }
component aeb { kind = controller }
control_action CA-1 { controller = aeb action = braking }
uca UCA-1 { control_action = CA-1 guide = not_provided hazards = [H-1] }
constraint SC-1 { component = aeb text = "brake" }
causal_factor CF-1 {
    ucas = [UCA-1]
    level = delta
    constraints = [SC-1]
    context { variables = [ttc] }
}
"#;

    #[test]
    fn loads_small_model() {
        let m = load(SMALL).unwrap();
        assert_eq!(m.hazards.len(), 2);
        assert_eq!(m.hazard("H-1.1").unwrap().parent.as_deref(), Some("H-1"));
        assert_eq!(m.causal_factors[0].level, Some(CausalLevel::Delta));
    }

    #[test]
    fn dangling_hazard_reference() {
        let bad = SMALL.replace("hazards = [H-1]", "hazards = [H-9]");
        assert_eq!(load(&bad).unwrap_err().dangling_id(), Some("H-9"));
    }

    #[test]
    fn hazard_cycles_are_rejected() {
        let bad = SMALL.replace(r#"hazard H-1 { description = "unsafe headway""#, r#"hazard H-1 { parent = H-1.1 description = "x""#);
        assert!(matches!(load(&bad), Err(LoadError::HazardCycle(_))));
    }

    #[test]
    fn empty_model_loads() {
        assert_eq!(load("# nothing here\n").unwrap(), StpaModel::default());
    }

    #[test]
    fn context_mapping() {
        let ctx = Context {
            variables: vec!["throttle".into(), "AEBstatus".into()],
            assumptions: vec!["AEBstatus accurate".into(), "vehicle in motion".into()],
            conditions: vec!["release throttle when AEBstatus non-zero".into()],
        };
        let cf = map_context(ctx.clone(), CausalLevel::Delta).unwrap();
        assert_eq!(cf.context, ctx);
        assert_eq!(cf.level, Some(CausalLevel::Delta));
        assert!(cf.ucas.is_empty() && cf.constraints.is_empty());
        let eta = map_context(Context { variables: vec!["packet timing".into()], ..Default::default() }, CausalLevel::Eta).unwrap();
        assert_eq!(eta.level.unwrap().monitor_level(), Level::Network);
        assert_eq!(map_context(Context::default(), CausalLevel::Data), Err(EmptyVariables));
    }
}

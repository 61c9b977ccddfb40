//! STPA artifacts from losses to component constraints, their chain checks
//! and the monitor skeletons derived from them.

mod chain;
mod model;
mod stubs;
mod validate;

pub use chain::{Chain, ChainError, Node, NodeKind, TraceGraph};
pub use model::{
    load, map_context, CausalFactor, CausalLevel, Classification, Component, ComponentConstraint, Context, ControlAction,
    EmptyVariables, GuideType, Hazard, LoadError, Loss, StpaModel, UnsafeControlAction,
};
pub use stubs::{generate_monitor_stubs, render_bindings, render_templates, template_for, MonitorStub, ValidationRequired};
pub use validate::{has_errors, validate, Finding, Rule, Severity};

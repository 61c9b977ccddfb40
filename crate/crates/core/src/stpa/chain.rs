//! Traceability graph from losses down to runtime monitors.
//!
//! Edges point downwards: loss to hazard, parent hazard to sub-hazard, hazard
//! and control action to UCA, UCA to causal factor, causal factor to component
//! constraint, constraint to monitor stub and property, property to monitor.
//! The chain of a node is its ancestors plus its descendants, which makes
//! membership symmetric.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use super::model::StpaModel;
use super::stubs::MonitorStub;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("unknown id `{0}`")]
    UnknownId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Loss,
    Hazard,
    ControlAction,
    Uca,
    CausalFactor,
    Constraint,
    Stub,
    Property,
    Monitor,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Loss => "loss",
            NodeKind::Hazard => "hazard",
            NodeKind::ControlAction => "control action",
            NodeKind::Uca => "uca",
            NodeKind::CausalFactor => "causal factor",
            NodeKind::Constraint => "constraint",
            NodeKind::Stub => "monitor stub",
            NodeKind::Property => "property",
            NodeKind::Monitor => "monitor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub kind: NodeKind,
    pub id: String,
}

#[derive(Debug, Clone, Default)]
pub struct TraceGraph {
    kinds: BTreeMap<String, NodeKind>,
    down: BTreeMap<String, BTreeSet<String>>,
    up: BTreeMap<String, BTreeSet<String>>,
}

impl TraceGraph {
    pub fn from_model(model: &StpaModel) -> Self {
        let mut g = TraceGraph::default();
        for l in &model.losses {
            g.node(&l.id, NodeKind::Loss);
        }
        for h in &model.hazards {
            g.node(&h.id, NodeKind::Hazard);
        }
        for ca in &model.control_actions {
            g.node(&ca.id, NodeKind::ControlAction);
        }
        for u in &model.ucas {
            g.node(&u.id, NodeKind::Uca);
        }
        for c in &model.constraints {
            g.node(&c.id, NodeKind::Constraint);
        }
        for cf in &model.causal_factors {
            g.node(&cf.id, NodeKind::CausalFactor);
        }
        for h in &model.hazards {
            for l in &h.losses {
                g.edge(l, &h.id);
            }
            if let Some(p) = &h.parent {
                g.edge(p, &h.id);
            }
        }
        for u in &model.ucas {
            g.edge(&u.control_action, &u.id);
            for h in &u.hazards {
                g.edge(h, &u.id);
            }
        }
        for cf in &model.causal_factors {
            for u in &cf.ucas {
                g.edge(u, &cf.id);
            }
            for c in &cf.constraints {
                g.edge(&cf.id, c);
            }
        }
        g
    }

    pub fn with_stubs(mut self, stubs: &[MonitorStub]) -> Self {
        for s in stubs {
            self.node(&s.monitor_id, NodeKind::Stub);
            self.edge(&s.constraint_ref, &s.monitor_id);
        }
        self
    }

    /// Adds `(property id, constraint ref)` pairs.
    pub fn with_properties<'a>(mut self, props: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        for (id, constraint) in props {
            self.node(id, NodeKind::Property);
            self.edge(constraint, id);
        }
        self
    }

    /// Adds `(monitor id, property id)` pairs.
    pub fn with_monitors<'a>(mut self, monitors: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        for (id, property) in monitors {
            self.node(id, NodeKind::Monitor);
            self.edge(property, id);
        }
        self
    }

    fn node(&mut self, id: &str, kind: NodeKind) {
        self.kinds.entry(id.to_string()).or_insert(kind);
    }

    fn edge(&mut self, from: &str, to: &str) {
        self.down.entry(from.to_string()).or_default().insert(to.to_string());
        self.up.entry(to.to_string()).or_default().insert(from.to_string());
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().map(String::as_str)
    }

    fn closure(&self, start: &str, edges: &BTreeMap<String, BTreeSet<String>>) -> BTreeSet<Node> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(id) = queue.pop_front() {
            for next in edges.get(&id).into_iter().flatten() {
                if next != start && seen.insert(next.clone()) {
                    queue.push_back(next.clone());
                }
            }
        }
        seen.into_iter()
            .filter_map(|id| self.kinds.get(&id).map(|&kind| Node { kind, id }))
            .collect()
    }

    pub fn trace_chain(&self, from: &str) -> Result<Chain, ChainError> {
        let kind = *self.kinds.get(from).ok_or_else(|| ChainError::UnknownId(from.to_string()))?;
        let mut upward: Vec<Node> = self.closure(from, &self.up).into_iter().collect();
        let mut downward: Vec<Node> = self.closure(from, &self.down).into_iter().collect();
        upward.sort();
        downward.sort();
        Ok(Chain { subject: Node { kind, id: from.to_string() }, upward, downward })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub subject: Node,
    pub upward: Vec<Node>,
    pub downward: Vec<Node>,
}

impl Chain {
    pub fn contains(&self, id: &str) -> bool {
        self.upward.iter().chain(&self.downward).any(|n| n.id == id)
    }

    pub fn ids_of(&self, kind: NodeKind) -> Vec<&str> {
        self.upward.iter().chain(&self.downward).filter(|n| n.kind == kind).map(|n| n.id.as_str()).collect()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.subject.kind, self.subject.id)?;
        let group = |f: &mut fmt::Formatter<'_>, label: &str, nodes: &[Node]| -> fmt::Result {
            writeln!(f, "  {label}:")?;
            for n in nodes {
                writeln!(f, "    {:<14} {}", n.kind.to_string(), n.id)?;
            }
            Ok(())
        };
        group(f, "upward", &self.upward)?;
        group(f, "downward", &self.downward)
    }
}

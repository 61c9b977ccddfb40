//! The bundled AEB model: chain rules, stub generation and traceability.

use proptest::prelude::*;
use stpa_rv::bundled;
use stpa_rv::property::{parse_properties, PropertySpec};
use stpa_rv::stpa::{
    generate_monitor_stubs, load, template_for, validate, CausalLevel, Component, ComponentConstraint, Finding,
    LoadError, Loss, NodeKind, Rule, Severity, StpaModel, TraceGraph,
};
use stpa_rv::trace::Level;

fn model() -> StpaModel {
    bundled::model().expect("bundled model loads")
}

fn new_findings(base: &[Finding], mutated: &StpaModel) -> Vec<Finding> {
    validate(mutated).into_iter().filter(|f| !base.contains(f)).collect()
}

fn properties() -> Vec<PropertySpec> {
    parse_properties(bundled::PROPERTIES, &bundled::scenario().unwrap().params()).unwrap()
}

fn full_graph() -> TraceGraph {
    let m = model();
    let stubs = generate_monitor_stubs(&m).unwrap();
    let props = properties();
    let setup = bundled::setup().unwrap();
    let monitor_edges: Vec<(String, String)> = setup
        .bindings
        .iter()
        .flat_map(|b| b.properties.iter().map(move |p| (b.id.clone(), p.clone())))
        .collect();
    TraceGraph::from_model(&m)
        .with_stubs(&stubs)
        .with_properties(props.iter().map(|p| (p.id.as_str(), p.constraint_ref.as_str())))
        .with_monitors(monitor_edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))
}

#[test]
fn bundled_model_validates_clean() {
    let findings = validate(&model());
    let errors: Vec<_> = findings.iter().filter(|f| f.severity() == Severity::Error).collect();
    assert!(errors.is_empty(), "{errors:?}");
    assert!(findings.iter().all(|f| f.severity() == Severity::Info), "{findings:?}");
}

#[test]
fn every_mutation_yields_exactly_its_finding() {
    let base_model = model();
    let base = validate(&base_model);
    type Mutation = fn(&mut StpaModel);
    let cases: Vec<(Mutation, Rule, &str)> = vec![
        (|m| m.hazards.iter_mut().find(|h| h.id == "H-1.2").unwrap().losses.clear(), Rule::HazardWithoutLoss, "H-1.2"),
        (|m| m.ucas.iter_mut().find(|u| u.id == "UCA-4").unwrap().hazards.clear(), Rule::UcaWithoutHazard, "UCA-4"),
        (|m| m.causal_factors.iter_mut().find(|c| c.id == "CF-1b").unwrap().ucas.clear(), Rule::CausalFactorWithoutUca, "CF-1b"),
        (|m| m.causal_factors.iter_mut().find(|c| c.id == "CF-1b").unwrap().level = None, Rule::CausalFactorUnclassified, "CF-1b"),
        (
            |m| m.causal_factors.iter_mut().find(|c| c.id == "CF-1b").unwrap().constraints.clear(),
            Rule::CausalFactorWithoutConstraint,
            "CF-1b",
        ),
        (
            |m| m.causal_factors.iter_mut().find(|c| c.id == "CF-2-network").unwrap().level = Some(CausalLevel::Delta),
            Rule::ConstraintLevelConflict,
            "SC-component-2",
        ),
        (|m| m.losses.push(Loss { id: "L-4".into(), description: "loss of cargo".into() }), Rule::LossWithoutHazard, "L-4"),
        (
            |m| {
                m.constraints.push(ComponentConstraint {
                    id: "SC-orphan".into(),
                    component: "aeb_controller".into(),
                    text: "unreferenced".into(),
                })
            },
            Rule::ConstraintWithoutCausalFactor,
            "SC-orphan",
        ),
        (|m| m.losses.clear(), Rule::IncompleteModel, "model"),
        (
            |m| m.components.push(Component { id: "radar".into(), kind: "sensor".into(), description: String::new() }),
            Rule::ComponentUncovered,
            "radar",
        ),
    ];
    assert!(cases.len() >= 6);
    for (mutate, rule, subject) in cases {
        let mut m = base_model.clone();
        mutate(&mut m);
        let found = new_findings(&base, &m);
        assert_eq!(found, vec![Finding { rule, subject: subject.into() }], "mutation for {rule:?}");
    }
}

#[test]
fn dangling_link_is_a_load_error() {
    let text = bundled::MODEL.replace("hazards = [H-1, H-1.1]", "hazards = [H-1, H-9]");
    match load(&text) {
        Err(e @ LoadError::DanglingReference { .. }) => assert_eq!(e.dangling_id(), Some("H-9")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn stubs_cover_all_three_classes_with_matching_levels() {
    let stubs = generate_monitor_stubs(&model()).unwrap();
    for class in CausalLevel::ALL {
        assert!(stubs.iter().any(|s| s.class == class), "no stub of class {class}");
    }
    for s in &stubs {
        let expected = match s.class {
            CausalLevel::Data => Level::Data,
            CausalLevel::Delta => Level::Functional,
            CausalLevel::Eta => Level::Network,
        };
        assert_eq!(s.level, expected, "{}", s.monitor_id);
        assert_eq!(s.template, template_for(s.class));
    }
    let by_ref = |r: &str| stubs.iter().find(|s| s.constraint_ref == r).unwrap();
    assert_eq!(by_ref("SC-component-2").placement, "can_bus");
    assert_eq!(by_ref("SC-component-3").ucas, vec!["UCA-6", "UCA-7"]);
    assert!(by_ref("SC-data-1").plumbing);
    assert_eq!(stubs.len(), 5);
}

#[test]
fn stubs_refuse_a_model_with_errors() {
    let mut m = model();
    m.ucas[0].hazards.clear();
    let err = generate_monitor_stubs(&m).unwrap_err();
    assert_eq!(err.0.len(), 1);
    assert_eq!(err.0[0].rule, Rule::UcaWithoutHazard);
}

#[test]
fn every_property_refers_to_a_model_constraint() {
    let m = model();
    for p in properties() {
        assert!(m.constraint(&p.constraint_ref).is_some(), "{} -> {}", p.id, p.constraint_ref);
    }
}

#[test]
fn hazard_chain_reaches_losses_and_ucas() {
    let c = full_graph().trace_chain("H-1").unwrap();
    assert_eq!(c.subject.kind, NodeKind::Hazard);
    assert_eq!(c.ids_of(NodeKind::Loss), vec!["L-1", "L-2", "L-3"]);
    for uca in ["UCA-1", "UCA-6", "UCA-7"] {
        assert!(c.downward.iter().any(|n| n.id == uca), "{uca} below H-1");
    }
    assert!(c.downward.iter().any(|n| n.id == "H-1.1"));
    assert!(c.downward.iter().any(|n| n.id == "M_delta_aeb"));
}

#[test]
fn property_chain_runs_from_constraint_up_to_losses() {
    let c = full_graph().trace_chain("P3").unwrap();
    for id in ["SC-component-3", "CF-1c", "UCA-6", "UCA-7", "H-1", "L-1", "L-2", "L-3"] {
        assert!(c.upward.iter().any(|n| n.id == id), "{id} above P3");
    }
    assert_eq!(c.downward.iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), vec!["M_delta_aeb"]);
    assert!(!c.contains("CF-1a"));
}

#[test]
fn unknown_id_is_reported() {
    assert!(full_graph().trace_chain("H-42").is_err());
}

proptest! {
    #[test]
    fn chain_membership_is_symmetric(drop_mask in prop::collection::vec(any::<bool>(), 16)) {
        // Cut a random selection of UCA and causal-factor links so the graph shape varies.
        let mut m = model();
        let mut i = 0;
        for u in &mut m.ucas {
            if drop_mask[i % drop_mask.len()] { u.hazards.truncate(1); }
            i += 1;
        }
        for cf in &mut m.causal_factors {
            if drop_mask[i % drop_mask.len()] { cf.ucas.truncate(1); }
            i += 1;
        }
        let stubs = generate_monitor_stubs(&m).unwrap_or_default();
        let g = TraceGraph::from_model(&m).with_stubs(&stubs);
        let ids: Vec<String> = g.ids().map(str::to_string).collect();
        for a in &ids {
            let ca = g.trace_chain(a).unwrap();
            for b in &ids {
                if a == b { continue; }
                let cb = g.trace_chain(b).unwrap();
                prop_assert_eq!(ca.contains(b), cb.contains(a), "{} / {}", a, b);
            }
        }
    }
}

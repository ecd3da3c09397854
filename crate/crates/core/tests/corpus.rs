mod common;

use chorreal_core::checkers::{
    check_orphan_free_bounded, check_realisable, check_realisable_synch, check_subtype, search, Bounds, Target,
    DEFAULT_BUDGET,
};
use chorreal_core::complement::{verify_complement, ComplementMethod};
use chorreal_core::global::{
    is_commutation_closed, is_commutation_deterministic, is_sender_driven, project, semantics_member,
};
use chorreal_core::models::CommModel;
use chorreal_core::msc::{Action, Execution};
use chorreal_core::oracle::{self, explore};

#[test]
fn structural_properties() {
    for g in common::manifest().global {
        let t = common::load_type(&g.file);
        assert_eq!(is_sender_driven(&t), g.sender_driven, "{}", g.name);
        assert_eq!(is_commutation_closed(&t), g.commutation_closed, "{}", g.name);
        assert_eq!(
            is_commutation_deterministic(&t),
            g.commutation_deterministic,
            "{}",
            g.name
        );
    }
}

#[test]
fn complements_verify() {
    for g in common::manifest().global {
        let t = common::load_type(&g.file);
        let Some(method) = &g.complement else {
            for m in ComplementMethod::ALL {
                assert!(m.apply(&t).is_err(), "{} accepted by {m}", g.name);
            }
            continue;
        };
        let c = method.parse::<ComplementMethod>().unwrap().apply(&t).unwrap();
        let report = verify_complement(&t, &c, 4).unwrap();
        assert!(report.holds(), "{}: {:?}", g.name, report.counterexample);
    }
}

#[test]
fn realisability_verdicts() {
    for g in common::manifest().global {
        let Some(method) = &g.complement else { continue };
        let t = common::load_type(&g.file);
        let c = method.parse::<ComplementMethod>().unwrap().apply(&t).unwrap();
        if let Some(expected) = &g.synch {
            let v = check_realisable_synch(&t, &c).unwrap();
            assert_eq!(&common::verdict_name(&v), expected, "{} in synch", g.name);
        }
        for model in [CommModel::P2p, CommModel::Causal, CommModel::Bag] {
            let Some(expected) = g.verdict(model) else { continue };
            let v = check_realisable(&t, model, &c, Bounds::default()).unwrap();
            assert_eq!(common::verdict_name(&v), expected, "{} in {model}", g.name);
            assert!(v.witness.is_some() != v.realisable, "{} in {model}", g.name);
        }
    }
}

#[test]
fn mailbox_deadlocks() {
    for g in common::manifest().global {
        let Some(expected) = g.mailbox_deadlock else { continue };
        let t = common::load_type(&g.file);
        let report = oracle::explore(&project(&t), CommModel::Mailbox, 12, 2);
        assert_eq!(!report.deadlocks.is_empty(), expected, "{}", g.name);
    }
}

#[test]
fn subtyping_verdicts() {
    let m = common::manifest();
    for s in &m.subtype {
        let (lhs, rhs) = (m.load(&s.lhs), m.load(&s.rhs));
        let method: ComplementMethod = m.global(&s.rhs).complement.as_deref().unwrap().parse().unwrap();
        let c = method.apply(&rhs).unwrap();
        let v = check_subtype(&lhs, &rhs, &c, method == ComplementMethod::Dual).unwrap();
        assert_eq!(v.subtype, s.subtype, "{} <: {}", s.lhs, s.rhs);
    }
}

#[test]
fn system_verdicts() {
    for s in common::manifest().system {
        let sys = common::load_system(&s.file);
        let orphan = |model| check_orphan_free_bounded(&sys, model, 2).unwrap().witness.is_some();
        assert_eq!(orphan(CommModel::P2p), s.p2p_orphan, "{}", s.name);
        assert_eq!(orphan(CommModel::Synch), s.synch_orphan, "{}", s.name);
        let deadlock = search(&sys, CommModel::P2p, 2, DEFAULT_BUDGET, Target::Deadlock).unwrap();
        assert_eq!(deadlock.witness.is_some(), s.p2p_deadlock, "{}", s.name);
    }
}

#[test]
fn choice_loop_projection_overtakes_in_bag() {
    let g = common::manifest().load("choice-loop");
    let e = Execution::with_fifo_matching(vec![
        Action::send("p", "q", "m1"),
        Action::send("p", "q", "m2"),
        Action::receive("p", "q", "m2"),
        Action::receive("p", "q", "m1"),
    ])
    .unwrap();
    // The projections produce the overtaking run, but its chart crosses on q.
    let report = explore(&project(&g), CommModel::Bag, 4, 2);
    assert!(report.executions.contains(&e));
    assert!(!semantics_member(&g, CommModel::Bag, &e));
    assert!(!explore(&project(&g), CommModel::P2p, 4, 2).executions.contains(&e));
}

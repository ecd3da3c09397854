//! Decision procedures for subtyping and realisability.

mod closure;
mod search;

pub use closure::{
    msc_deadlock_witness, prefix_closure_accepts, prefix_closure_automaton, prefix_closure_with_depth, shuffle,
    DEFAULT_REORDER_DEPTH,
};
pub use search::{search, SearchOutcome, Target};

use crate::automata::{product as intersect, Alphabet, Dfa, Nfa, StateId};
use crate::error::{Error, Result};
use crate::global::{commutation_violation, preproduct, product, project, CfsmSystem, GlobalType};
use crate::models::CommModel;
use crate::msc::{Arrow, Execution, Msc};
use serde::Serialize;
use std::collections::VecDeque;

/// Default per-channel capacity of the bounded checks.
pub const DEFAULT_BOUND: usize = 2;
/// Default cap on the configurations a bounded check may visit.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    CC,
    DF,
    RSC,
    OrphanFree,
    DeadlockMsc,
    SynchRealisability,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Execution(Execution),
    Msc(Msc),
    /// A synchronous run, one arrow per exchange.
    Arrows(Vec<Arrow>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealisabilityVerdict {
    pub realisable: bool,
    pub failed_condition: Option<Condition>,
    pub witness: Option<Witness>,
    /// A bounded exploration contributed to the verdict.
    pub bounded: bool,
    /// Some bounded exploration hit its channel bound or budget.
    pub truncated: bool,
}

impl RealisabilityVerdict {
    pub(crate) fn holds(bounded: bool, truncated: bool) -> Self {
        RealisabilityVerdict {
            realisable: true,
            failed_condition: None,
            witness: None,
            bounded,
            truncated,
        }
    }

    pub(crate) fn fails(condition: Condition, witness: Witness, bounded: bool, truncated: bool) -> Self {
        RealisabilityVerdict {
            realisable: false,
            failed_condition: Some(condition),
            witness: Some(witness),
            bounded,
            truncated,
        }
    }

    /// Realisable according to the checks, but some exploration was cut short.
    pub fn inconclusive(&self) -> bool {
        self.realisable && self.truncated
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubtypeVerdict {
    pub subtype: bool,
    /// An accepted word of the left type whose MSC the right type lacks.
    pub witness: Option<Vec<Arrow>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Messages per channel (per receiver for the mailbox model).
    pub channel: usize,
    /// Configurations visited by each exploration.
    pub budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            channel: DEFAULT_BOUND,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Searches for a partial execution whose MSC is not a prefix of a
/// synchronous MSC.
pub fn check_rsc_bounded(s: &CfsmSystem, model: CommModel, bound: usize) -> Result<SearchOutcome> {
    search(s, model, bound, DEFAULT_BUDGET, Target::NotPrefixSynchronous)
}

/// Searches for an accepted execution leaving messages in transit.
pub fn check_orphan_free_bounded(s: &CfsmSystem, model: CommModel, bound: usize) -> Result<SearchOutcome> {
    search(s, model, bound, DEFAULT_BUDGET, Target::Orphan)
}

/// Shortest word of `g1` using an arrow outside `allowed`.
fn foreign_word(g1: &Dfa<Arrow>, allowed: &Alphabet<Arrow>) -> Option<Vec<Arrow>> {
    let al = g1.alphabet();
    let foreign: Vec<bool> = al.iter().map(|a| !allowed.contains(a)).collect();
    if !foreign.contains(&true) {
        return None;
    }
    let n = g1.num_states();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; 2 * n];
    let mut seen = vec![false; 2 * n];
    let start = g1.initial();
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        let (s, flagged) = (node % n, node >= n);
        if flagged && g1.is_accepting(s) {
            let mut word = Vec::new();
            let mut cur = node;
            while let Some((p, sym)) = parent[cur] {
                word.push(al.symbol(sym).clone());
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for (sym, t) in g1.outgoing(s) {
            let next = if flagged || foreign[sym] { t + n } else { t };
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, sym));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Whether `g1` is a subtype of `g2`, given a complement `comp_g2` of `g2`.
///
/// With `comp_is_cc` the complement must be commutation-closed and `g1` is
/// intersected with it directly; otherwise `g1` is replaced by the product
/// of its projections, which presumes `g1` synchronously realisable.
pub fn check_subtype(
    g1: &GlobalType,
    g2: &GlobalType,
    comp_g2: &GlobalType,
    comp_is_cc: bool,
) -> Result<SubtypeVerdict> {
    if comp_is_cc {
        if let Some((state, first, second)) = commutation_violation(comp_g2) {
            return Err(Error::NotCommutationClosed {
                state,
                first: first.to_string(),
                second: second.to_string(),
            });
        }
    }
    let covered = g2.dfa().alphabet().union(comp_g2.dfa().alphabet());
    if let Some(w) = foreign_word(g1.dfa(), &covered) {
        return Ok(SubtypeVerdict {
            subtype: false,
            witness: Some(w),
        });
    }
    let lhs = if comp_is_cc {
        g1.dfa().with_alphabet(&covered)?
    } else {
        product(&project(g1), Some(&covered))?.dfa().clone()
    };
    let both = intersect(&lhs.to_nfa(), &comp_g2.dfa().with_alphabet(&covered)?.to_nfa())?;
    let witness = both.shortest_word();
    Ok(SubtypeVerdict {
        subtype: witness.is_none(),
        witness,
    })
}

/// Shortest word leading from the initial state to a state satisfying `bad`.
fn shortest_to(a: &Nfa<Arrow>, bad: impl Fn(StateId) -> bool) -> Option<Vec<Arrow>> {
    let n = a.num_states();
    let mut parent: Vec<Option<(StateId, Option<usize>)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a.initial()] = true;
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(s) = queue.pop_front() {
        if bad(s) {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some((p, sym)) = parent[cur] {
                word.extend(sym.map(|i| a.alphabet().symbol(i).clone()));
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for &(sym, t) in a.edges(s) {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((s, sym));
                queue.push_back(t);
            }
        }
    }
    None
}

/// Deadlock-free realisability with synchronous communication, given a
/// complement `comp_g` of `g`.
pub fn check_realisable_synch(g: &GlobalType, comp_g: &GlobalType) -> Result<RealisabilityVerdict> {
    let alphabet = g.dfa().alphabet().union(comp_g.dfa().alphabet());
    let pre = preproduct(&project(g).determinized(), Some(&alphabet))?;
    let comp = comp_g.dfa().with_alphabet(&alphabet)?.to_nfa();
    if let Some(w) = intersect(&pre, &comp)?.shortest_word() {
        return Ok(RealisabilityVerdict::fails(
            Condition::CC,
            Witness::Arrows(w),
            false,
            false,
        ));
    }
    let live = pre.coreachable_states();
    if let Some(w) = shortest_to(&pre, |s| !live[s]) {
        return Ok(RealisabilityVerdict::fails(
            Condition::DF,
            Witness::Arrows(w),
            false,
            false,
        ));
    }
    Ok(RealisabilityVerdict::holds(false, false))
}

/// Deadlock-free realisability in a causally closed model: prefix-RSC and
/// orphan-freedom by bounded exploration, then the exact MSC-deadlock
/// condition and synchronous realisability.
pub fn check_realisable(
    g: &GlobalType,
    model: CommModel,
    comp_g: &GlobalType,
    bounds: Bounds,
) -> Result<RealisabilityVerdict> {
    if !model.causally_closed() {
        return Err(Error::UnsupportedModel {
            model: model.to_string(),
            reason: "the model is not causally closed".into(),
        });
    }
    if !model.has_regsc_automaton() {
        return Err(Error::UnsupportedModel {
            model: model.to_string(),
            reason: "no regular characterisation".into(),
        });
    }
    let sys = project(g);
    let mut truncated = false;
    for (target, condition) in [
        (Target::NotPrefixSynchronous, Condition::RSC),
        (Target::Orphan, Condition::OrphanFree),
    ] {
        let out = search(&sys, model, bounds.channel, bounds.budget, target)?;
        truncated |= out.truncated;
        if let Some(e) = out.witness {
            return Ok(RealisabilityVerdict::fails(
                condition,
                Witness::Execution(e),
                true,
                truncated,
            ));
        }
    }
    if let Some(e) = msc_deadlock_witness(&sys, model)? {
        return Ok(RealisabilityVerdict::fails(
            Condition::DeadlockMsc,
            Witness::Execution(e),
            true,
            truncated,
        ));
    }
    let synch = check_realisable_synch(g, comp_g)?;
    if let Some(w) = synch.witness {
        return Ok(RealisabilityVerdict::fails(
            Condition::SynchRealisability,
            w,
            true,
            truncated,
        ));
    }
    Ok(RealisabilityVerdict::holds(true, truncated))
}

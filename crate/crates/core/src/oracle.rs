//! Brute-force reference semantics at desk scale, used as ground truth by
//! the property and acceptance tests.

use crate::automata::{Nfa, StateId};
use crate::checkers::{Condition, RealisabilityVerdict, Witness};
use crate::global::{existential_member, project, semantics_member, CfsmSystem, GlobalType};
use crate::models::CommModel;
use crate::msc::{arrows_to_msc, Action, Arrow, Execution, Msc, Name};
use crate::par;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Configuration {
    /// Per process, the epsilon-closed set of machine states it may be in.
    pub controls: BTreeMap<Name, Vec<StateId>>,
    /// Positions in `trace` of the sends still in transit, in sending order.
    pub transit: Vec<usize>,
    pub trace: Execution,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExplorationReport {
    pub executions: BTreeSet<Execution>,
    pub deadlocks: BTreeSet<Configuration>,
    pub orphans: BTreeSet<Execution>,
    pub truncated: bool,
}

#[derive(Clone)]
struct Node {
    controls: Vec<Vec<StateId>>,
    transit: Vec<usize>,
    trace: Execution,
}

struct Expansion {
    children: Vec<Node>,
    accepting: bool,
    /// Some move was cut by the step or channel bound.
    cut: bool,
}

struct Explorer<'a> {
    names: Vec<Name>,
    machines: Vec<&'a Nfa<Action>>,
    model: CommModel,
    max_steps: usize,
    channel_bound: usize,
}

fn step(m: &Nfa<Action>, from: &[StateId], a: &Action) -> Vec<StateId> {
    let Some(sym) = m.alphabet().index_of(a) else {
        return Vec::new();
    };
    let targets = from
        .iter()
        .flat_map(|&s| m.edges(s).iter().filter(|(x, _)| *x == Some(sym)).map(|&(_, t)| t));
    m.epsilon_closure(targets)
}

/// `before[i][j]`: position `i` happens before position `j` in `e`.
fn happens_before(e: &Execution) -> Vec<Vec<bool>> {
    let acts = e.actions();
    let n = acts.len();
    let mut before = vec![vec![false; n]; n];
    let mut last: HashMap<&Name, usize> = HashMap::new();
    for j in 0..n {
        let mut direct = Vec::new();
        if let Some(&i) = last.get(acts[j].owner()) {
            direct.push(i);
        }
        if let Some(s) = e.source(j) {
            direct.push(s);
        }
        for i in direct {
            before[i][j] = true;
            for row in before.iter_mut().take(i) {
                if row[i] {
                    row[j] = true;
                }
            }
        }
        last.insert(acts[j].owner(), j);
    }
    before
}

impl<'a> Explorer<'a> {
    fn new(s: &'a CfsmSystem, model: CommModel, max_steps: usize, channel_bound: usize) -> Self {
        Explorer {
            names: s.processes(),
            machines: s.machines().iter().map(|m| m.nfa()).collect(),
            model,
            max_steps,
            channel_bound: channel_bound.max(1),
        }
    }

    fn root(&self) -> Node {
        Node {
            controls: self.machines.iter().map(|m| m.epsilon_closure([m.initial()])).collect(),
            transit: Vec::new(),
            trace: Execution::empty(),
        }
    }

    fn index(&self, p: &Name) -> usize {
        self.names.binary_search(p).expect("process of the system")
    }

    fn configuration(&self, n: &Node) -> Configuration {
        Configuration {
            controls: self.names.iter().cloned().zip(n.controls.iter().cloned()).collect(),
            transit: n.transit.clone(),
            trace: n.trace.clone(),
        }
    }

    fn accepting(&self, n: &Node) -> bool {
        self.machines
            .iter()
            .zip(&n.controls)
            .all(|(m, c)| c.iter().any(|&s| m.is_accepting(s)))
    }

    fn channel_load(&self, n: &Node, a: &Action) -> usize {
        let acts = n.trace.actions();
        n.transit
            .iter()
            .filter(|&&i| match self.model {
                CommModel::Mailbox => acts[i].receiver() == a.receiver(),
                _ => acts[i].sender() == a.sender() && acts[i].receiver() == a.receiver(),
            })
            .count()
    }

    /// Transit indices the receive `a` may consume.
    fn deliverable(&self, n: &Node, a: &Action) -> Vec<usize> {
        let acts = n.trace.actions();
        let want = a.dual();
        let matching = |k: usize| acts[n.transit[k]] == want;
        let first = |same: &dyn Fn(&Action) -> bool| {
            (0..n.transit.len())
                .find(|&k| same(&acts[n.transit[k]]))
                .filter(|&k| matching(k))
                .into_iter()
                .collect()
        };
        match self.model {
            CommModel::Bag => (0..n.transit.len()).filter(|&k| matching(k)).collect(),
            CommModel::P2p => first(&|x: &Action| x.sender() == want.sender() && x.receiver() == want.receiver()),
            CommModel::Mailbox => first(&|x: &Action| x.receiver() == want.receiver()),
            CommModel::Causal => {
                let before = happens_before(&n.trace);
                (0..n.transit.len())
                    .filter(|&k| {
                        matching(k)
                            && !n
                                .transit
                                .iter()
                                .any(|&j| acts[j].receiver() == want.receiver() && before[j][n.transit[k]])
                    })
                    .collect()
            }
            CommModel::Synch => Vec::new(),
        }
    }

    fn expand(&self, n: &Node) -> Expansion {
        let mut children = Vec::new();
        let mut cut = false;
        let room = self.max_steps.saturating_sub(n.trace.len());
        for (p, m) in self.machines.iter().enumerate() {
            for a in m.alphabet().iter().filter(|a| self.index(a.owner()) == p) {
                let next_p = step(m, &n.controls[p], a);
                if next_p.is_empty() {
                    continue;
                }
                if a.is_send() && self.model == CommModel::Synch {
                    let q = self.index(a.receiver());
                    let next_q = step(self.machines[q], &n.controls[q], &a.dual());
                    if next_q.is_empty() {
                        continue;
                    }
                    if room < 2 {
                        cut = true;
                        continue;
                    }
                    let mut c = n.clone();
                    c.controls[p] = next_p;
                    c.controls[q] = next_q;
                    c.trace.push_send(a.clone());
                    c.trace.push_receive(c.trace.len() - 1);
                    children.push(c);
                } else if a.is_send() {
                    if room < 1 || self.channel_load(n, a) >= self.channel_bound {
                        cut = true;
                        continue;
                    }
                    let mut c = n.clone();
                    c.controls[p] = next_p;
                    c.transit.push(c.trace.len());
                    c.trace.push_send(a.clone());
                    children.push(c);
                } else {
                    for k in self.deliverable(n, a) {
                        if room < 1 {
                            cut = true;
                            continue;
                        }
                        let mut c = n.clone();
                        c.controls[p] = next_p.clone();
                        let s = c.transit.remove(k);
                        c.trace.push_receive(s);
                        children.push(c);
                    }
                }
            }
        }
        Expansion {
            children,
            accepting: self.accepting(n),
            cut,
        }
    }
}

/// Explores every execution of `s` in `model` of at most `max_steps`
/// actions with at most `channel_bound` messages per channel (per receiver
/// for the mailbox model). A rendezvous counts as two steps.
pub fn explore(s: &CfsmSystem, model: CommModel, max_steps: usize, channel_bound: usize) -> ExplorationReport {
    let ex = Explorer::new(s, model, max_steps, channel_bound);
    let mut report = ExplorationReport::default();
    let mut level = vec![ex.root()];
    while !level.is_empty() {
        let expansions = par::map(level.clone(), |n| ex.expand(&n));
        let mut next = Vec::new();
        for (n, x) in level.into_iter().zip(expansions) {
            report.truncated |= x.cut;
            if x.accepting {
                if !n.transit.is_empty() {
                    report.orphans.insert(n.trace.clone());
                }
                report.executions.insert(n.trace.clone());
            } else if x.children.is_empty() && !x.cut {
                report.deadlocks.insert(ex.configuration(&n));
            }
            next.extend(x.children);
        }
        level = next;
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixDeadlockReport {
    /// A partial execution whose MSC no explored accepted MSC extends.
    pub witness: Option<Execution>,
    /// Partial MSCs examined.
    pub prefixes: usize,
    pub truncated: bool,
}

/// Explicit MSC-level check of the deadlock condition: every MSC of a
/// partial execution with at most `max_steps` actions must be a prefix of
/// the MSC of some accepted execution with at most `max_steps + slack`
/// actions. Executions with equal configurations and MSCs are merged.
pub fn msc_prefix_deadlock(
    s: &CfsmSystem,
    model: CommModel,
    channel_bound: usize,
    max_steps: usize,
    slack: usize,
) -> PrefixDeadlockReport {
    let ex = Explorer::new(s, model, max_steps + slack, channel_bound);
    let names = s.processes();
    let msc = |e: &Execution| Msc::of_execution(e, &names).expect("system universe");
    let key = |n: &Node, m: &Msc| {
        let acts = n.trace.actions();
        let transit: Vec<(Name, usize)> = n
            .transit
            .iter()
            .map(|&i| {
                let owner = acts[i].owner();
                (owner.clone(), acts[..i].iter().filter(|a| a.owner() == owner).count())
            })
            .collect();
        (n.controls.clone(), transit, m.clone())
    };
    let mut seen = HashSet::new();
    let mut partial: Vec<(Msc, Execution)> = Vec::new();
    let mut complete: Vec<Msc> = Vec::new();
    let mut truncated = false;
    let mut level = vec![ex.root()];
    while !level.is_empty() {
        let expansions = par::map(level.clone(), |n| ex.expand(&n));
        let mut next = Vec::new();
        for (n, x) in level.into_iter().zip(expansions) {
            truncated |= x.cut;
            let m = msc(&n.trace);
            if !seen.insert(key(&n, &m)) {
                continue;
            }
            if x.accepting {
                complete.push(m.clone());
            }
            if n.trace.len() <= max_steps {
                partial.push((m, n.trace.clone()));
            }
            next.extend(x.children);
        }
        level = next;
    }
    let prefixes = partial.len();
    let stuck = par::map(partial, |(m, e)| {
        (!complete.iter().any(|c| m.is_prefix_of(c))).then_some(e)
    });
    PrefixDeadlockReport {
        witness: stuck.into_iter().flatten().min_by_key(|e| (e.len(), e.clone())),
        prefixes,
        truncated,
    }
}

/// Every synchronous MSC over `processes` and `messages` with at most
/// `max_arrows` arrows, each exactly once, by increasing size.
pub fn enumerate_synch_mscs(processes: &[Name], messages: &[Name], max_arrows: usize) -> Vec<Msc> {
    let mut arrows = Vec::new();
    for p in processes {
        for q in processes.iter().filter(|q| *q != p) {
            for m in messages {
                arrows.push(Arrow::new(p.clone(), q.clone(), m.clone()).expect("distinct processes"));
            }
        }
    }
    let single: Vec<Msc> = arrows
        .iter()
        .map(|a| arrows_to_msc(std::slice::from_ref(a), processes).expect("universe covers the arrow"))
        .collect();
    let mut out = vec![Msc::empty(processes)];
    let mut level = vec![Msc::empty(processes)];
    for _ in 0..max_arrows {
        let grown: BTreeSet<Msc> = par::map(level, |m| {
            single
                .iter()
                .map(|a| m.concat(a).expect("same universe"))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        level = grown.into_iter().collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// Accepted arrow words of `g` with at most `max_arrows` arrows.
fn accepted_words(g: &GlobalType, max_arrows: usize) -> Vec<Vec<Arrow>> {
    let d = g.dfa();
    let mut out = Vec::new();
    let mut stack = vec![(d.initial(), Vec::new())];
    while let Some((s, w)) = stack.pop() {
        if d.is_accepting(s) {
            out.push(w.clone());
        }
        if w.len() < max_arrows {
            for (sym, t) in d.outgoing(s) {
                let mut w2 = w.clone();
                w2.push(d.alphabet().symbol(sym).clone());
                stack.push((t, w2));
            }
        }
    }
    out.sort();
    out
}

/// Whether every execution of `g1` in `model` with at most `max_len`
/// actions is an execution of `g2`.
pub fn brute_subtype(g1: &GlobalType, g2: &GlobalType, model: CommModel, max_len: usize) -> bool {
    let mut universe: Vec<Name> = g1.processes().iter().chain(g2.processes()).cloned().collect();
    universe.sort();
    universe.dedup();
    let words = accepted_words(g1, max_len / 2);
    par::map(words, |w| {
        let m = arrows_to_msc(&w, &universe).expect("universe covers both types");
        m.linearisations(Some(model))
            .filter(|e| e.len() <= max_len)
            .all(|e| semantics_member(g2, model, &e))
    })
    .into_iter()
    .all(|ok| ok)
}

/// Realisability judged on the explored executions of the projection:
/// each accepted one must be an execution of `g`, and no run may get stuck.
pub fn brute_realisable(g: &GlobalType, model: CommModel, max_len: usize) -> RealisabilityVerdict {
    let report = explore(&project(g), model, max_len, max_len.max(1));
    let shortest = |set: Vec<Execution>| set.into_iter().min_by_key(|e| (e.len(), e.clone()));
    let foreign: Vec<Execution> = report
        .executions
        .iter()
        .filter(|e| !semantics_member(g, model, e))
        .cloned()
        .collect();
    if let Some(e) = shortest(foreign) {
        return RealisabilityVerdict::fails(Condition::CC, Witness::Execution(e), true, report.truncated);
    }
    let stuck: Vec<Execution> = report.deadlocks.iter().map(|c| c.trace.clone()).collect();
    if let Some(e) = shortest(stuck) {
        return RealisabilityVerdict::fails(Condition::DF, Witness::Execution(e), true, report.truncated);
    }
    RealisabilityVerdict::holds(true, report.truncated)
}

/// Synchronous MSCs of `g` with at most `max_arrows` arrows, found by
/// testing every candidate over its alphabet.
pub fn existential_mscs(g: &GlobalType, max_arrows: usize) -> Vec<Msc> {
    let words = accepted_words(g, max_arrows);
    let set: BTreeSet<Msc> = words
        .iter()
        .map(|w| arrows_to_msc(w, g.processes()).expect("universe covers the type"))
        .filter(|m| existential_member(g, m).unwrap_or(false))
        .collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global::parse_global_type;
    use crate::msc::universe;

    #[test]
    fn empty_universe_has_one_msc() {
        let ps = universe(["p", "q"]);
        assert_eq!(enumerate_synch_mscs(&ps, &universe(["m"]), 0).len(), 1);
    }

    #[test]
    fn independent_arrows_give_one_msc() {
        let ps = universe(["p", "q", "r", "s"]);
        let a = arrows_to_msc(&[Arrow::of("p", "q", "a"), Arrow::of("r", "s", "b")], &ps).unwrap();
        let b = arrows_to_msc(&[Arrow::of("r", "s", "b"), Arrow::of("p", "q", "a")], &ps).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_processes_one_message() {
        // Over {p->q, q->p} nothing commutes: 1 + 2 + 4 MSCs.
        let ps = universe(["p", "q"]);
        assert_eq!(enumerate_synch_mscs(&ps, &universe(["m"]), 2).len(), 7);
    }

    #[test]
    fn synchronous_exploration_of_an_exchange() {
        let g = parse_global_type("p->q:a; q->p:b; end").unwrap();
        let r = explore(&project(&g), CommModel::Synch, 10, 1);
        assert_eq!(r.executions.len(), 1);
        assert!(r.deadlocks.is_empty() && r.orphans.is_empty() && !r.truncated);
        assert_eq!(r.executions.iter().next().unwrap().len(), 4);
    }

    #[test]
    fn step_bound_truncates() {
        let g = parse_global_type("rec X. p->q:a; X").unwrap();
        let r = explore(&project(&g), CommModel::P2p, 3, 5);
        assert!(r.truncated);
    }

    #[test]
    fn a_type_is_its_own_subtype() {
        let g = parse_global_type("rec X. end + p->q:a; q->p:b; X").unwrap();
        assert!(brute_subtype(&g, &g, CommModel::P2p, 6));
    }

    #[test]
    fn mixed_choice_is_not_realisable_in_p2p() {
        let g = parse_global_type("p->q:a; end + q->p:b; end").unwrap();
        let v = brute_realisable(&g, CommModel::P2p, 6);
        assert!(!v.realisable);
    }

    #[test]
    fn chain_has_no_prefix_deadlock() {
        let g = parse_global_type("p->q:m1; r->q:m2; end").unwrap();
        let r = msc_prefix_deadlock(&project(&g), CommModel::P2p, 2, 8, 4);
        assert!(r.witness.is_none(), "{r:?}");
        assert!(r.prefixes > 4);
    }
}

use crate::automata::{
    inclusion_witness, inclusion_witness_with, is_empty, product, Alphabet, Nfa, StateId, SubsetSource,
};
use crate::error::{Error, Result};
use crate::global::CfsmSystem;
use crate::models::{rsc_execution_automaton, CommModel};
use crate::msc::{Action, Execution, Name};
use std::collections::{HashMap, HashSet};

/// Builds the reachable part of an automaton given by a successor function.
fn build<K: Clone + Eq + std::hash::Hash>(
    alphabet: &Alphabet<Action>,
    start: K,
    accepting: impl Fn(&K) -> bool,
    mut successors: impl FnMut(&K) -> Vec<(Option<usize>, K)>,
) -> Nfa<Action> {
    let mut nfa = Nfa::new(alphabet.clone());
    nfa.set_accepting(0, accepting(&start));
    let mut index: HashMap<K, StateId> = HashMap::from([(start.clone(), 0)]);
    let mut keys = vec![start];
    let mut i = 0;
    while i < keys.len() {
        let k = keys[i].clone();
        for (sym, next) in successors(&k) {
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = nfa.add_state(accepting(&next));
                    index.insert(next.clone(), id);
                    keys.push(next);
                    id
                }
            };
            nfa.add_edge(i, sym, id);
        }
        i += 1;
    }
    nfa
}

/// Interleavings of the machines' runs; a word is accepted when every
/// machine ends in a final state.
pub fn shuffle(s: &CfsmSystem) -> Nfa<Action> {
    let machines: Vec<&Nfa<Action>> = s.machines().iter().map(|m| m.nfa()).collect();
    let start: Vec<StateId> = machines.iter().map(|m| m.initial()).collect();
    build(
        s.alphabet(),
        start,
        |t| machines.iter().zip(t).all(|(m, &q)| m.is_accepting(q)),
        |t| {
            let mut out = Vec::new();
            for (p, m) in machines.iter().enumerate() {
                for &(sym, q) in m.edges(t[p]) {
                    let mut next = t.clone();
                    next[p] = q;
                    out.push((sym, next));
                }
            }
            out
        },
    )
}

/// How far an unmatched send may drift from its position in the replayed run.
pub const DEFAULT_REORDER_DEPTH: usize = 2;

/// [`prefix_closure_with_depth`] at [`DEFAULT_REORDER_DEPTH`].
pub fn prefix_closure_automaton(a: &Nfa<Action>) -> Result<Nfa<Action>> {
    prefix_closure_with_depth(a, DEFAULT_REORDER_DEPTH)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Replay {
    state: StateId,
    stopped: u64,
    /// An emitted send whose receive must come next.
    pending: Option<usize>,
    /// Per process, unmatched sends emitted before the run reached them.
    ahead: Vec<Vec<usize>>,
    /// Per process, unmatched sends the run passed but not yet emitted.
    behind: Vec<Vec<usize>>,
}

impl Replay {
    fn accepting(&self) -> bool {
        self.ahead.iter().all(Vec::is_empty)
    }
}

/// The moves of the prefix-closure construction over a trimmed input.
struct Rules {
    input: Nfa<Action>,
    depth: usize,
    processes: usize,
    owner: Vec<usize>,
    peer: Vec<usize>,
    is_send: Vec<bool>,
    dual: Vec<Option<usize>>,
}

impl Rules {
    /// `None` when the input accepts nothing.
    fn new(a: &Nfa<Action>, depth: usize) -> Result<Option<Self>> {
        if is_empty(a) {
            return Ok(None);
        }
        let al = a.alphabet();
        let mut names: Vec<Name> = al.iter().flat_map(|x| [x.owner().clone(), x.peer().clone()]).collect();
        names.sort();
        names.dedup();
        if names.len() > 64 {
            return Err(Error::InvalidArgument("more than 64 processes".into()));
        }
        let index = |p: &Name| names.binary_search(p).expect("process listed");
        Ok(Some(Rules {
            input: a.trim(),
            depth,
            processes: names.len(),
            owner: al.iter().map(|x| index(x.owner())).collect(),
            peer: al.iter().map(|x| index(x.peer())).collect(),
            is_send: al.iter().map(Action::is_send).collect(),
            dual: al.iter().map(|x| al.index_of(&x.dual())).collect(),
        }))
    }

    fn start(&self) -> Replay {
        Replay {
            state: self.input.initial(),
            stopped: 0,
            pending: None,
            ahead: vec![Vec::new(); self.processes],
            behind: vec![Vec::new(); self.processes],
        }
    }

    fn moves(&self, k: &Replay) -> Vec<(Option<usize>, Replay)> {
        let bit = |p: usize| 1u64 << p;
        let mut out = Vec::new();
        let at = |state: StateId| Replay { state, ..k.clone() };
        if k.pending.is_none() {
            for p in 0..self.processes {
                if let Some(&x) = k.behind[p].first() {
                    let mut next = k.clone();
                    next.behind[p].remove(0);
                    out.push((Some(x), next));
                }
            }
            for x in (0..self.owner.len()).filter(|&x| self.is_send[x]) {
                let p = self.owner[x];
                if k.stopped & bit(p) == 0 && k.behind[p].is_empty() && k.ahead[p].len() < self.depth {
                    let mut next = k.clone();
                    next.ahead[p].push(x);
                    out.push((Some(x), next));
                }
            }
        }
        for &(sym, t) in self.input.edges(k.state) {
            let Some(x) = sym else {
                out.push((None, at(t)));
                continue;
            };
            let p = self.owner[x];
            let live = k.stopped & bit(p) == 0;
            match k.pending {
                None => {
                    if let Some(&first) = k.ahead[p].first() {
                        if first == x {
                            let mut next = at(t);
                            next.ahead[p].remove(0);
                            out.push((None, next));
                        }
                        continue;
                    }
                    if self.is_send[x] && live {
                        if k.behind[p].is_empty() {
                            out.push((Some(x), at(t)));
                            if k.stopped & bit(self.peer[x]) == 0 {
                                out.push((
                                    Some(x),
                                    Replay {
                                        pending: Some(x),
                                        ..at(t)
                                    },
                                ));
                            }
                        }
                        if k.behind[p].len() < self.depth {
                            let mut next = at(t);
                            next.behind[p].push(x);
                            out.push((None, next));
                        }
                    }
                    out.push((
                        None,
                        Replay {
                            stopped: k.stopped | bit(p),
                            ..at(t)
                        },
                    ));
                }
                Some(s) => {
                    if self.dual[s] == Some(x) && live && k.ahead[p].is_empty() && k.behind[p].is_empty() {
                        out.push((Some(x), Replay { pending: None, ..at(t) }));
                    }
                }
            }
        }
        out
    }
}

/// Accepts RSC executions whose MSC is a prefix of the MSC of some
/// execution accepted by `a`, which must accept RSC executions only and be
/// closed under reordering of independent exchanges.
///
/// A run of `a` is replayed while processes may stop one by one: the
/// actions of stopped processes are skipped, and so is every receive of a
/// message sent to a stopped process. Such unmatched sends no longer
/// depend on their receiver, so each process may emit up to `depth` of
/// them ahead of or behind the run. Every accepted word is a prefix
/// linearisation; all are found when no process needs more than `depth`
/// of them displaced at once.
pub fn prefix_closure_with_depth(a: &Nfa<Action>, depth: usize) -> Result<Nfa<Action>> {
    let Some(rules) = Rules::new(a, depth)? else {
        return Ok(Nfa::new(a.alphabet().clone()));
    };
    Ok(build(a.alphabet(), rules.start(), Replay::accepting, |k| {
        rules.moves(k)
    }))
}

/// The prefix closure, built only where an inclusion check leads it.
struct LazyClosure {
    rules: Rules,
    keys: Vec<Replay>,
    index: HashMap<Replay, StateId>,
    edges: Vec<Option<Edges>>,
}

type Edges = Vec<(Option<usize>, StateId)>;

impl LazyClosure {
    fn intern(&mut self, k: Replay) -> StateId {
        if let Some(&id) = self.index.get(&k) {
            return id;
        }
        let id = self.keys.len();
        self.index.insert(k.clone(), id);
        self.keys.push(k);
        self.edges.push(None);
        id
    }

    fn edges(&mut self, id: StateId) -> Vec<(Option<usize>, StateId)> {
        if let Some(e) = &self.edges[id] {
            return e.clone();
        }
        let moves = self.rules.moves(&self.keys[id]);
        let e: Vec<_> = moves.into_iter().map(|(sym, k)| (sym, self.intern(k))).collect();
        self.edges[id] = Some(e.clone());
        e
    }

    fn closure(&mut self, mut stack: Vec<StateId>) -> Vec<StateId> {
        let mut seen: HashSet<StateId> = stack.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for (sym, t) in self.edges(s) {
                if sym.is_none() && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        let mut out: Vec<StateId> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

impl SubsetSource for LazyClosure {
    fn start(&mut self) -> Vec<StateId> {
        let s = self.intern(self.rules.start());
        self.closure(vec![s])
    }

    fn post(&mut self, set: &[StateId], sym: usize) -> Vec<StateId> {
        let mut next = Vec::new();
        for &s in set {
            next.extend(
                self.edges(s)
                    .into_iter()
                    .filter(|&(x, _)| x == Some(sym))
                    .map(|(_, t)| t),
            );
        }
        next.sort_unstable();
        next.dedup();
        self.closure(next)
    }

    fn is_accepting(&self, state: StateId) -> bool {
        self.keys[state].accepting()
    }
}

impl LazyClosure {
    fn new(rules: Rules) -> Self {
        LazyClosure {
            rules,
            keys: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
        }
    }
}

/// Whether [`prefix_closure_with_depth`] of `a` accepts `word`, building
/// only the states the word visits.
pub fn prefix_closure_accepts(a: &Nfa<Action>, depth: usize, word: &[Action]) -> Result<bool> {
    let Some(rules) = Rules::new(a, depth)? else {
        return Ok(false);
    };
    let mut lazy = LazyClosure::new(rules);
    let mut set = lazy.start();
    for x in word {
        let Some(sym) = a.alphabet().index_of(x) else {
            return Ok(false);
        };
        set = lazy.post(&set, sym);
        if set.is_empty() {
            return Ok(false);
        }
    }
    Ok(set.iter().any(|&s| lazy.is_accepting(s)))
}

/// A word of `partial` that [`prefix_closure_with_depth`] of `complete`
/// rejects, without building the closure in full.
fn closure_inclusion_witness(
    partial: &Nfa<Action>,
    complete: &Nfa<Action>,
    depth: usize,
) -> Result<Option<Vec<Action>>> {
    let Some(rules) = Rules::new(complete, depth)? else {
        return inclusion_witness(partial, &Nfa::new(complete.alphabet().clone()));
    };
    Ok(inclusion_witness_with(partial, &mut LazyClosure::new(rules)))
}

/// Actions labelling some transition, closed under duals.
fn used_actions(s: &CfsmSystem) -> Alphabet<Action> {
    let al = s.alphabet();
    Alphabet::new(
        s.machines()
            .iter()
            .flat_map(|m| m.nfa().transitions().filter_map(|(_, x, _)| x.cloned()))
            .flat_map(|x| [x.dual(), x])
            .filter(|x| al.contains(x)),
    )
}

/// A partial execution of `s` in `model` whose MSC cannot be completed to
/// the MSC of an accepted execution, or `None` if there is none.
pub fn msc_deadlock_witness(s: &CfsmSystem, model: CommModel) -> Result<Option<Execution>> {
    let det = s.determinized();
    let al = det.alphabet();
    let used = used_actions(&det);
    let rsc_auto = rsc_execution_automaton(&used)?.with_alphabet(al)?;
    let model_auto = match model {
        CommModel::Bag => None,
        _ => Some(model.regsc_automaton(&used)?.with_alphabet(al)?),
    };
    let with_model = |shuffled: Nfa<Action>| -> Result<Nfa<Action>> {
        let rsc = product(&shuffled, &rsc_auto)?;
        match &model_auto {
            Some(m) => product(&rsc, m),
            None => Ok(rsc),
        }
    };
    let partial = with_model(shuffle(&det.accept_completion()))?;
    let complete = with_model(shuffle(&det))?;
    closure_inclusion_witness(&partial, &complete, DEFAULT_REORDER_DEPTH)?
        .map(Execution::rsc_from_actions)
        .transpose()
}

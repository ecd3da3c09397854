//! Finite automata over an arbitrary ordered alphabet.
//!
//! States are dense integer ids. Symbols are stored once in a sorted
//! [`Alphabet`] and transitions refer to them by index; `None` marks an
//! ε-transition.

mod io;
mod ops;

pub use io::{AutomatonJson, StateRef};
pub use ops::{
    accept_completion, complete, determinize, dual, includes, includes_eager, inclusion_witness, is_empty, minimize,
    product,
};
pub(crate) use ops::{inclusion_witness_with, SubsetSource};

use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::fmt::{Debug, Display};
use std::hash::Hash;

/// Bound satisfied by every label type used with the automata in this crate.
pub trait Symbol: Clone + Ord + Hash + Debug + Display + Send + Sync {}
impl<T: Clone + Ord + Hash + Debug + Display + Send + Sync> Symbol for T {}

pub type StateId = usize;

/// A finite, sorted, duplicate-free set of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet<L> {
    symbols: Vec<L>,
}

impl<L: Symbol> Alphabet<L> {
    pub fn new(symbols: impl IntoIterator<Item = L>) -> Self {
        let mut symbols: Vec<L> = symbols.into_iter().collect();
        symbols.sort();
        symbols.dedup();
        Alphabet { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[L] {
        &self.symbols
    }

    pub fn iter(&self) -> std::slice::Iter<'_, L> {
        self.symbols.iter()
    }

    pub fn index_of(&self, symbol: &L) -> Option<usize> {
        self.symbols.binary_search(symbol).ok()
    }

    pub fn symbol(&self, index: usize) -> &L {
        &self.symbols[index]
    }

    pub fn contains(&self, symbol: &L) -> bool {
        self.index_of(symbol).is_some()
    }

    pub fn union(&self, other: &Self) -> Self {
        Alphabet::new(self.symbols.iter().chain(other.symbols.iter()).cloned())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.symbols.iter().all(|s| other.contains(s))
    }

    fn reindex_into(&self, target: &Self) -> Result<Vec<usize>> {
        self.symbols
            .iter()
            .map(|s| {
                target
                    .index_of(s)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("`{s}` missing from target alphabet")))
            })
            .collect()
    }
}

/// Nondeterministic automaton with ε-transitions.
#[derive(Clone, Debug)]
pub struct Nfa<L> {
    alphabet: Alphabet<L>,
    edges: Vec<Vec<(Option<usize>, StateId)>>,
    initial: StateId,
    accepting: Vec<bool>,
}

impl<L: Symbol> Nfa<L> {
    /// A one-state automaton (state 0, initial, not accepting).
    pub fn new(alphabet: Alphabet<L>) -> Self {
        Nfa {
            alphabet,
            edges: vec![Vec::new()],
            initial: 0,
            accepting: vec![false],
        }
    }

    pub fn alphabet(&self) -> &Alphabet<L> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn set_initial(&mut self, state: StateId) {
        assert!(state < self.num_states(), "initial state out of range");
        self.initial = state;
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }

    pub fn set_accepting(&mut self, state: StateId, accepting: bool) {
        self.accepting[state] = accepting;
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).filter(|&s| self.accepting[s])
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.edges.push(Vec::new());
        self.accepting.push(accepting);
        self.edges.len() - 1
    }

    /// Adds `from --label--> to`; `None` is ε.
    pub fn add_transition(&mut self, from: StateId, label: Option<&L>, to: StateId) -> Result<()> {
        let sym = match label {
            None => None,
            Some(l) => Some(
                self.alphabet
                    .index_of(l)
                    .ok_or_else(|| Error::UnknownSymbol(l.to_string()))?,
            ),
        };
        self.add_edge(from, sym, to);
        Ok(())
    }

    pub(crate) fn add_edge(&mut self, from: StateId, sym: Option<usize>, to: StateId) {
        assert!(from < self.num_states() && to < self.num_states(), "state out of range");
        let out = &mut self.edges[from];
        if !out.contains(&(sym, to)) {
            out.push((sym, to));
        }
    }

    /// Outgoing edges of `state` with symbol indices.
    pub fn edges(&self, state: StateId) -> &[(Option<usize>, StateId)] {
        &self.edges[state]
    }

    /// All transitions as `(from, label, to)`.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Option<&L>, StateId)> + '_ {
        self.edges.iter().enumerate().flat_map(move |(s, out)| {
            out.iter()
                .map(move |&(sym, t)| (s, sym.map(|i| self.alphabet.symbol(i)), t))
        })
    }

    /// Sorted ε-closure of a set of states.
    pub fn epsilon_closure(&self, states: impl IntoIterator<Item = StateId>) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = Vec::new();
        for s in states {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            out.push(s);
            for &(sym, t) in &self.edges[s] {
                if sym.is_none() && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// ε-closed successor set of a (closed) set on symbol index `sym`.
    pub(crate) fn post(&self, set: &[StateId], sym: usize) -> Vec<StateId> {
        let direct = set
            .iter()
            .flat_map(|&s| self.edges[s].iter())
            .filter(|&&(l, _)| l == Some(sym))
            .map(|&(_, t)| t);
        self.epsilon_closure(direct)
    }

    pub fn accepts(&self, word: &[L]) -> bool {
        let mut current = self.epsilon_closure([self.initial]);
        for letter in word {
            let Some(sym) = self.alphabet.index_of(letter) else {
                return false;
            };
            current = self.post(&current, sym);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&s| self.accepting[s])
    }

    /// Same automaton over a larger alphabet.
    pub fn with_alphabet(&self, alphabet: &Alphabet<L>) -> Result<Self> {
        let map = self.alphabet.reindex_into(alphabet)?;
        Ok(Nfa {
            alphabet: alphabet.clone(),
            edges: self
                .edges
                .iter()
                .map(|out| out.iter().map(|&(sym, t)| (sym.map(|i| map[i]), t)).collect())
                .collect(),
            initial: self.initial,
            accepting: self.accepting.clone(),
        })
    }

    /// Relabels every transition; labels mapped to `None` become ε.
    pub fn relabel<M: Symbol>(&self, alphabet: Alphabet<M>, f: impl Fn(&L) -> Option<M>) -> Result<Nfa<M>> {
        let map: Vec<Option<usize>> = self
            .alphabet
            .iter()
            .map(|l| match f(l) {
                None => Ok(None),
                Some(m) => alphabet
                    .index_of(&m)
                    .map(Some)
                    .ok_or_else(|| Error::UnknownSymbol(m.to_string())),
            })
            .collect::<Result<_>>()?;
        Ok(Nfa {
            alphabet,
            edges: self
                .edges
                .iter()
                .map(|out| {
                    let mut v: Vec<(Option<usize>, StateId)> = Vec::with_capacity(out.len());
                    for &(sym, t) in out {
                        let e = (sym.and_then(|i| map[i]), t);
                        if !v.contains(&e) {
                            v.push(e);
                        }
                    }
                    v
                })
                .collect(),
            initial: self.initial,
            accepting: self.accepting.clone(),
        })
    }

    pub fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &(_, t) in &self.edges[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States from which an accepting state is reachable.
    pub fn coreachable_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, out) in self.edges.iter().enumerate() {
            for &(_, t) in out {
                rev[t].push(s);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<StateId> = (0..n).filter(|&s| seen[s]).collect();
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Restriction to the given states (the initial state is always kept).
    fn restrict(&self, keep: &[bool]) -> Self {
        let mut index = vec![usize::MAX; self.num_states()];
        let mut order = vec![self.initial];
        order.extend((0..self.num_states()).filter(|&s| keep[s] && s != self.initial));
        for (i, &s) in order.iter().enumerate() {
            index[s] = i;
        }
        Nfa {
            alphabet: self.alphabet.clone(),
            edges: order
                .iter()
                .map(|&s| {
                    self.edges[s]
                        .iter()
                        .filter(|&&(_, t)| index[t] != usize::MAX)
                        .map(|&(sym, t)| (sym, index[t]))
                        .collect()
                })
                .collect(),
            initial: 0,
            accepting: order.iter().map(|&s| self.accepting[s]).collect(),
        }
    }

    /// Drops unreachable states and states that cannot reach acceptance.
    pub fn trim(&self) -> Self {
        let reach = self.reachable_states();
        let co = self.coreachable_states();
        let keep: Vec<bool> = reach.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        self.restrict(&keep)
    }

    /// A shortest accepted word, if any.
    pub fn shortest_word(&self) -> Option<Vec<L>> {
        let n = self.num_states();
        let mut parent: Vec<Option<(StateId, Option<usize>)>> = vec![None; n];
        let mut seen = vec![false; n];
        // 0-1 BFS: ε-edges cost nothing.
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        let mut dist = vec![usize::MAX; n];
        dist[self.initial] = 0;
        let mut done = vec![false; n];
        while let Some(s) = queue.pop_front() {
            if done[s] {
                continue;
            }
            done[s] = true;
            if self.accepting[s] {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some((p, sym)) = parent[cur] {
                    if let Some(i) = sym {
                        word.push(self.alphabet.symbol(i).clone());
                    }
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for &(sym, t) in &self.edges[s] {
                let w = dist[s] + usize::from(sym.is_some());
                if w < dist[t] {
                    dist[t] = w;
                    parent[t] = Some((s, sym));
                    seen[t] = true;
                    if sym.is_none() {
                        queue.push_front(t);
                    } else {
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }
}

/// Deterministic automaton; the transition function may be partial.
#[derive(Clone, Debug)]
pub struct Dfa<L> {
    alphabet: Alphabet<L>,
    delta: Vec<Vec<Option<StateId>>>,
    initial: StateId,
    accepting: Vec<bool>,
    origins: Option<Vec<Vec<StateId>>>,
}

impl<L: Symbol> Dfa<L> {
    /// A one-state automaton (state 0, initial, not accepting).
    pub fn new(alphabet: Alphabet<L>) -> Self {
        let k = alphabet.len();
        Dfa {
            alphabet,
            delta: vec![vec![None; k]],
            initial: 0,
            accepting: vec![false],
            origins: None,
        }
    }

    pub fn alphabet(&self) -> &Alphabet<L> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn set_initial(&mut self, state: StateId) {
        assert!(state < self.num_states(), "initial state out of range");
        self.initial = state;
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }

    pub fn set_accepting(&mut self, state: StateId, accepting: bool) {
        self.accepting[state] = accepting;
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).filter(|&s| self.accepting[s])
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.delta.push(vec![None; self.alphabet.len()]);
        self.accepting.push(accepting);
        if let Some(o) = &mut self.origins {
            o.push(Vec::new());
        }
        self.delta.len() - 1
    }

    pub fn set_transition(&mut self, from: StateId, label: &L, to: StateId) -> Result<()> {
        let sym = self
            .alphabet
            .index_of(label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))?;
        match self.delta[from][sym] {
            Some(t) if t != to => Err(Error::Nondeterministic {
                state: from,
                label: label.to_string(),
            }),
            _ => {
                self.set_edge(from, sym, to);
                Ok(())
            }
        }
    }

    pub(crate) fn set_edge(&mut self, from: StateId, sym: usize, to: StateId) {
        assert!(to < self.num_states(), "state out of range");
        self.delta[from][sym] = Some(to);
    }

    pub fn next(&self, state: StateId, sym: usize) -> Option<StateId> {
        self.delta[state][sym]
    }

    pub fn step(&self, state: StateId, label: &L) -> Option<StateId> {
        self.next(state, self.alphabet.index_of(label)?)
    }

    pub fn run(&self, word: &[L]) -> Option<StateId> {
        word.iter().try_fold(self.initial, |s, l| self.step(s, l))
    }

    pub fn accepts(&self, word: &[L]) -> bool {
        self.run(word).is_some_and(|s| self.accepting[s])
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Outgoing `(symbol index, target)` pairs of a state.
    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = (usize, StateId)> + '_ {
        self.delta[state]
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
    }

    /// Labels on the outgoing transitions of a state.
    pub fn choices(&self, state: StateId) -> Vec<&L> {
        self.outgoing(state).map(|(i, _)| self.alphabet.symbol(i)).collect()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &L, StateId)> + '_ {
        (0..self.num_states()).flat_map(move |s| self.outgoing(s).map(move |(i, t)| (s, self.alphabet.symbol(i), t)))
    }

    /// NFA states this state was built from, when produced by [`determinize`].
    pub fn origin(&self, state: StateId) -> Option<&[StateId]> {
        self.origins.as_ref().map(|o| o[state].as_slice())
    }

    pub fn to_nfa(&self) -> Nfa<L> {
        Nfa {
            alphabet: self.alphabet.clone(),
            edges: (0..self.num_states())
                .map(|s| self.outgoing(s).map(|(i, t)| (Some(i), t)).collect())
                .collect(),
            initial: self.initial,
            accepting: self.accepting.clone(),
        }
    }

    pub fn with_alphabet(&self, alphabet: &Alphabet<L>) -> Result<Self> {
        let map = self.alphabet.reindex_into(alphabet)?;
        let delta = self
            .delta
            .iter()
            .map(|row| {
                let mut new = vec![None; alphabet.len()];
                for (i, t) in row.iter().enumerate() {
                    new[map[i]] = *t;
                }
                new
            })
            .collect();
        Ok(Dfa {
            alphabet: alphabet.clone(),
            delta,
            initial: self.initial,
            accepting: self.accepting.clone(),
            origins: self.origins.clone(),
        })
    }

    fn restrict(&self, keep: &[bool]) -> Self {
        let mut index = vec![usize::MAX; self.num_states()];
        let mut order = vec![self.initial];
        order.extend((0..self.num_states()).filter(|&s| keep[s] && s != self.initial));
        for (i, &s) in order.iter().enumerate() {
            index[s] = i;
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            delta: order
                .iter()
                .map(|&s| {
                    self.delta[s]
                        .iter()
                        .map(|t| t.filter(|&t| index[t] != usize::MAX).map(|t| index[t]))
                        .collect()
                })
                .collect(),
            initial: 0,
            accepting: order.iter().map(|&s| self.accepting[s]).collect(),
            origins: self
                .origins
                .as_ref()
                .map(|o| order.iter().map(|&s| o[s].clone()).collect()),
        }
    }

    /// Keeps only states reachable from the initial state.
    pub fn reachable(&self) -> Self {
        self.restrict(&self.to_nfa().reachable_states())
    }

    /// Keeps only reachable states that can still reach acceptance.
    pub fn trim(&self) -> Self {
        let nfa = self.to_nfa();
        let reach = nfa.reachable_states();
        let co = nfa.coreachable_states();
        let keep: Vec<bool> = reach.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        self.restrict(&keep)
    }

    /// Renumbers states in breadth-first order from the initial state,
    /// dropping unreachable ones. Isomorphic automata become identical.
    pub fn canonical(&self) -> Self {
        let mut index = vec![usize::MAX; self.num_states()];
        let mut order = vec![self.initial];
        index[self.initial] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for t in self.delta[s].iter().flatten() {
                if index[*t] == usize::MAX {
                    index[*t] = order.len();
                    order.push(*t);
                }
            }
            i += 1;
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            delta: order
                .iter()
                .map(|&s| self.delta[s].iter().map(|t| t.map(|t| index[t])).collect())
                .collect(),
            initial: 0,
            accepting: order.iter().map(|&s| self.accepting[s]).collect(),
            origins: self
                .origins
                .as_ref()
                .map(|o| order.iter().map(|&s| o[s].clone()).collect()),
        }
    }

    /// Structural equality of transition tables, initial and accepting states.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.delta == other.delta
            && self.initial == other.initial
            && self.accepting == other.accepting
    }

    pub(crate) fn from_parts(
        alphabet: Alphabet<L>,
        delta: Vec<Vec<Option<StateId>>>,
        initial: StateId,
        accepting: Vec<bool>,
        origins: Option<Vec<Vec<StateId>>>,
    ) -> Self {
        Dfa {
            alphabet,
            delta,
            initial,
            accepting,
            origins,
        }
    }
}

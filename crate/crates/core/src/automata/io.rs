use super::{Alphabet, Dfa, Nfa, StateId, Symbol};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

const EPSILON: &str = "eps";

/// A state reference in the JSON format: either an index or a name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateRef {
    Index(usize),
    Name(String),
}

/// Serialized automaton shared by all label types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomatonJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processes: Option<Vec<String>>,
    pub alphabet: Vec<String>,
    pub states: Vec<StateRef>,
    pub initial: StateRef,
    pub accepting: Vec<StateRef>,
    pub transitions: Vec<(StateRef, String, StateRef)>,
}

impl AutomatonJson {
    fn state_index(&self) -> Result<HashMap<&StateRef, StateId>> {
        let mut map = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if map.insert(s, i).is_some() {
                return Err(Error::InvalidAutomaton(format!("duplicate state {s:?}")));
            }
        }
        Ok(map)
    }

    fn lookup(map: &HashMap<&StateRef, StateId>, s: &StateRef) -> Result<StateId> {
        map.get(s)
            .copied()
            .ok_or_else(|| Error::InvalidAutomaton(format!("unknown state {s:?}")))
    }

    fn parse_alphabet<L: Symbol + FromStr>(&self) -> Result<Alphabet<L>> {
        let symbols = self
            .alphabet
            .iter()
            .map(|s| s.parse::<L>().map_err(|_| Error::BadLabel(s.clone())))
            .collect::<Result<Vec<L>>>()?;
        Ok(Alphabet::new(symbols))
    }
}

impl<L: Symbol + FromStr> Nfa<L> {
    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        let alphabet = json.parse_alphabet::<L>()?;
        let map = json.state_index()?;
        if json.states.is_empty() {
            return Err(Error::InvalidAutomaton("no states".into()));
        }
        let mut nfa = Nfa::new(alphabet);
        for _ in 1..json.states.len() {
            nfa.add_state(false);
        }
        nfa.set_initial(AutomatonJson::lookup(&map, &json.initial)?);
        for s in &json.accepting {
            nfa.set_accepting(AutomatonJson::lookup(&map, s)?, true);
        }
        for (from, label, to) in &json.transitions {
            let from = AutomatonJson::lookup(&map, from)?;
            let to = AutomatonJson::lookup(&map, to)?;
            if label == EPSILON {
                nfa.add_transition(from, None, to)?;
            } else {
                let l = label.parse::<L>().map_err(|_| Error::BadLabel(label.clone()))?;
                nfa.add_transition(from, Some(&l), to)?;
            }
        }
        Ok(nfa)
    }
}

impl<L: Symbol> Nfa<L> {
    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            processes: None,
            alphabet: self.alphabet().iter().map(ToString::to_string).collect(),
            states: (0..self.num_states()).map(StateRef::Index).collect(),
            initial: StateRef::Index(self.initial()),
            accepting: self.accepting_states().map(StateRef::Index).collect(),
            transitions: self
                .transitions()
                .map(|(s, l, t)| {
                    let label = l.map_or_else(|| EPSILON.to_string(), ToString::to_string);
                    (StateRef::Index(s), label, StateRef::Index(t))
                })
                .collect(),
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        dot(
            name,
            self.num_states(),
            self.initial(),
            |s| self.is_accepting(s),
            self.transitions()
                .map(|(s, l, t)| (s, l.map_or_else(|| "ε".to_string(), ToString::to_string), t)),
        )
    }
}

impl<L: Symbol + FromStr> Dfa<L> {
    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        let alphabet = json.parse_alphabet::<L>()?;
        let map = json.state_index()?;
        if json.states.is_empty() {
            return Err(Error::InvalidAutomaton("no states".into()));
        }
        let mut dfa = Dfa::new(alphabet);
        for _ in 1..json.states.len() {
            dfa.add_state(false);
        }
        dfa.set_initial(AutomatonJson::lookup(&map, &json.initial)?);
        for s in &json.accepting {
            dfa.set_accepting(AutomatonJson::lookup(&map, s)?, true);
        }
        for (from, label, to) in &json.transitions {
            if label == EPSILON {
                return Err(Error::InvalidAutomaton(
                    "ε-transition in a deterministic automaton".into(),
                ));
            }
            let from = AutomatonJson::lookup(&map, from)?;
            let to = AutomatonJson::lookup(&map, to)?;
            let l = label.parse::<L>().map_err(|_| Error::BadLabel(label.clone()))?;
            dfa.set_transition(from, &l, to)?;
        }
        Ok(dfa)
    }
}

impl<L: Symbol> Dfa<L> {
    pub fn to_json(&self) -> AutomatonJson {
        self.to_nfa().to_json()
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.to_nfa().to_dot(name)
    }
}

fn dot(
    name: &str,
    states: usize,
    initial: StateId,
    accepting: impl Fn(StateId) -> bool,
    edges: impl Iterator<Item = (StateId, String, StateId)>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  __start [shape=point];");
    for s in 0..states {
        let shape = if accepting(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  q{s} [label=\"{s}\", shape={shape}];");
    }
    let _ = writeln!(out, "  __start -> q{initial};");
    for (s, label, t) in edges {
        let _ = writeln!(out, "  q{s} -> q{t} [label=\"{}\"];", escape(&label));
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

//! Global types as deterministic automata over arrows, their projections
//! and the synchronous product of systems.

mod parse;
mod system;

pub use parse::parse_global_type;
pub use system::{preproduct, product, project, Cfsm, CfsmSystem};

use crate::automata::{minimize, AutomatonJson, Dfa, StateId};
use crate::error::{Error, Result};
use crate::models::{member, CommModel};
use crate::msc::{Arrow, ArrowOrder, Execution, Msc, Name};
use std::collections::{BTreeSet, HashMap};

/// A choreography: a DFA over arrows together with its process universe.
#[derive(Clone, Debug)]
pub struct GlobalType {
    dfa: Dfa<Arrow>,
    processes: Vec<Name>,
}

impl GlobalType {
    /// The universe must cover every process of the alphabet.
    pub fn new(dfa: Dfa<Arrow>, processes: Vec<Name>) -> Result<Self> {
        let mut processes = processes;
        processes.sort();
        processes.dedup();
        for a in dfa.alphabet().iter() {
            for p in [a.sender(), a.receiver()] {
                if processes.binary_search(p).is_err() {
                    return Err(Error::UnknownProcess(format!("{p} in arrow {a}")));
                }
            }
        }
        Ok(GlobalType { dfa, processes })
    }

    /// Universe taken from the alphabet.
    pub fn from_dfa(dfa: Dfa<Arrow>) -> Self {
        let processes = dfa
            .alphabet()
            .iter()
            .flat_map(|a| [a.sender().clone(), a.receiver().clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        GlobalType { dfa, processes }
    }

    pub fn dfa(&self) -> &Dfa<Arrow> {
        &self.dfa
    }

    pub fn processes(&self) -> &[Name] {
        &self.processes
    }

    pub fn accepts_word(&self, w: &[Arrow]) -> bool {
        self.dfa.accepts(w)
    }

    pub fn choices(&self, s: StateId) -> Vec<&Arrow> {
        self.dfa.choices(s)
    }

    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        let dfa = Dfa::<Arrow>::from_json(json)?;
        match &json.processes {
            Some(ps) => GlobalType::new(dfa, ps.iter().map(|p| Name::new(p)).collect()),
            None => Ok(GlobalType::from_dfa(dfa)),
        }
    }

    pub fn to_json(&self) -> AutomatonJson {
        let mut j = self.dfa.to_json();
        j.processes = Some(self.processes.iter().map(ToString::to_string).collect());
        j
    }

    /// Reads either the text syntax or, when the source starts with `{`,
    /// the JSON automaton format.
    pub fn load(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            let json: AutomatonJson = serde_json::from_str(src)?;
            GlobalType::from_json(&json)
        } else {
            parse_global_type(src)
        }
    }

    /// Same type with the minimal DFA, trimmed and canonically numbered.
    pub fn normalized(&self) -> Self {
        GlobalType {
            dfa: minimize(&self.dfa).trim().canonical(),
            processes: self.processes.clone(),
        }
    }

    /// Same type over a larger alphabet and universe.
    pub fn extend_to(&self, alphabet: &crate::automata::Alphabet<Arrow>, processes: &[Name]) -> Result<Self> {
        let mut ps = self.processes.clone();
        ps.extend(processes.iter().cloned());
        GlobalType::new(self.dfa.with_alphabet(alphabet)?, ps)
    }
}

/// Explores the (done-set, state) graph of an arrow order against a DFA.
struct OrderWalk<'a> {
    order: &'a ArrowOrder,
    dfa: &'a Dfa<Arrow>,
    symbols: Vec<Option<usize>>,
    memo: HashMap<(u64, StateId), bool>,
}

impl<'a> OrderWalk<'a> {
    fn new(order: &'a ArrowOrder, dfa: &'a Dfa<Arrow>) -> Self {
        let symbols = order.arrows().iter().map(|a| dfa.alphabet().index_of(a)).collect();
        OrderWalk {
            order,
            dfa,
            symbols,
            memo: HashMap::new(),
        }
    }

    /// Whether some (`all == false`) or every (`all == true`) completion
    /// of the arrows in `done` ends in an accepting state.
    fn run(&mut self, done: u64, s: StateId, all: bool) -> bool {
        if done == self.order.full_mask() {
            return self.dfa.is_accepting(s);
        }
        if let Some(&r) = self.memo.get(&(done, s)) {
            return r;
        }
        let enabled: Vec<usize> = self.order.enabled(done).collect();
        let mut result = all;
        for i in enabled {
            let next = self.symbols[i].and_then(|sym| self.dfa.next(s, sym));
            let ok = match next {
                Some(t) => self.run(done | (1 << i), t, all),
                None => false,
            };
            if ok != all {
                result = ok;
                break;
            }
        }
        self.memo.insert((done, s), result);
        result
    }
}

/// Some arrow word of the synchronous MSC `m` is accepted by `g`.
pub fn existential_member(g: &GlobalType, m: &Msc) -> Result<bool> {
    let order = m.arrow_order()?;
    Ok(OrderWalk::new(&order, &g.dfa).run(0, g.dfa.initial(), false))
}

/// Every arrow word of the synchronous MSC `m` is accepted by `g`.
pub fn universal_member(g: &GlobalType, m: &Msc) -> Result<bool> {
    let order = m.arrow_order()?;
    Ok(OrderWalk::new(&order, &g.dfa).run(0, g.dfa.initial(), true))
}

/// A state of the minimal complete DFA and two independent arrows whose
/// two orders lead to different states.
pub fn commutation_violation(g: &GlobalType) -> Option<(StateId, Arrow, Arrow)> {
    let d = minimize(&g.dfa);
    let al = d.alphabet();
    let k = al.len();
    for s in 0..d.num_states() {
        for a in 0..k {
            for b in a + 1..k {
                if !al.symbol(a).independent(al.symbol(b)) {
                    continue;
                }
                let ab = d.next(s, a).and_then(|t| d.next(t, b));
                let ba = d.next(s, b).and_then(|t| d.next(t, a));
                if ab != ba {
                    return Some((s, al.symbol(a).clone(), al.symbol(b).clone()));
                }
            }
        }
    }
    None
}

/// The language is closed under swapping adjacent independent arrows.
pub fn is_commutation_closed(g: &GlobalType) -> bool {
    commutation_violation(g).is_none()
}

/// All choices of every state share one sender.
pub fn is_sender_driven(g: &GlobalType) -> bool {
    (0..g.dfa.num_states()).all(|s| {
        let c = g.dfa.choices(s);
        c.iter().all(|a| a.sender() == c[0].sender())
    })
}

/// A state offering two independent arrows.
pub fn commutation_nondeterminism(g: &GlobalType) -> Option<(StateId, Arrow, Arrow)> {
    for s in 0..g.dfa.num_states() {
        let c = g.dfa.choices(s);
        for (i, a) in c.iter().enumerate() {
            if let Some(b) = c[i + 1..].iter().find(|b| a.independent(b)) {
                return Some((s, (*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

/// No two choices of any state commute.
pub fn is_commutation_deterministic(g: &GlobalType) -> bool {
    commutation_nondeterminism(g).is_none()
}

/// Whether `e` is an execution of `g` in `model`: it belongs to the
/// model and its MSC is represented by an accepted arrow word.
pub fn semantics_member(g: &GlobalType, model: CommModel, e: &Execution) -> bool {
    if !member(model, e) {
        return false;
    }
    let Ok(m) = Msc::of_execution(e, &g.processes) else {
        return false;
    };
    existential_member(g, &m).unwrap_or(false)
}

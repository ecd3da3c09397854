use super::GlobalType;
use crate::automata::{determinize, Alphabet, AutomatonJson, Nfa, StateId};
use crate::error::{Error, Result};
use crate::models::action_alphabet;
use crate::msc::{Action, Arrow, Name};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// One process's machine over the shared action alphabet of its system.
#[derive(Clone, Debug)]
pub struct Cfsm {
    process: Name,
    nfa: Nfa<Action>,
}

impl Cfsm {
    pub fn new(process: Name, nfa: Nfa<Action>) -> Result<Self> {
        for (_, l, _) in nfa.transitions() {
            if let Some(a) = l {
                if a.owner() != &process {
                    return Err(Error::InvalidAutomaton(format!("machine of {process} performs {a}")));
                }
            }
        }
        Ok(Cfsm { process, nfa })
    }

    pub fn process(&self) -> &Name {
        &self.process
    }

    pub fn nfa(&self) -> &Nfa<Action> {
        &self.nfa
    }
}

/// A system of machines keyed by the (sorted) process universe.
#[derive(Clone, Debug)]
pub struct CfsmSystem {
    machines: Vec<Cfsm>,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    machines: BTreeMap<String, AutomatonJson>,
}

impl CfsmSystem {
    /// Machines are re-expressed over the union of their alphabets.
    pub fn new(machines: Vec<Cfsm>) -> Result<Self> {
        let mut machines = machines;
        machines.sort_by(|a, b| a.process.cmp(&b.process));
        if machines.windows(2).any(|w| w[0].process == w[1].process) {
            return Err(Error::InvalidArgument("two machines for one process".into()));
        }
        let alphabet = machines.iter().fold(Alphabet::new([]), |acc: Alphabet<Action>, m| {
            acc.union(m.nfa.alphabet())
        });
        let alphabet = action_alphabet(&alphabet.iter().map(Action::arrow).collect::<Vec<_>>());
        let names: Vec<Name> = machines.iter().map(|m| m.process.clone()).collect();
        for a in alphabet.iter() {
            if names.binary_search(a.peer()).is_err() || names.binary_search(a.owner()).is_err() {
                return Err(Error::UnknownProcess(format!("{} in action {a}", a.peer())));
            }
        }
        let machines = machines
            .into_iter()
            .map(|m| {
                Ok(Cfsm {
                    nfa: m.nfa.with_alphabet(&alphabet)?,
                    process: m.process,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CfsmSystem { machines })
    }

    pub fn processes(&self) -> Vec<Name> {
        self.machines.iter().map(|m| m.process.clone()).collect()
    }

    pub fn machines(&self) -> &[Cfsm] {
        &self.machines
    }

    pub fn machine(&self, p: &Name) -> Option<&Cfsm> {
        self.machines.iter().find(|m| &m.process == p)
    }

    pub fn alphabet(&self) -> &Alphabet<Action> {
        self.machines[0].nfa.alphabet()
    }

    /// Arrows whose send occurs in the alphabet.
    pub fn arrows(&self) -> Alphabet<Arrow> {
        Alphabet::new(self.alphabet().iter().filter(|a| a.is_send()).map(Action::arrow))
    }

    /// Every machine replaced by its subset construction.
    pub fn determinized(&self) -> CfsmSystem {
        CfsmSystem {
            machines: self
                .machines
                .iter()
                .map(|m| Cfsm {
                    process: m.process.clone(),
                    nfa: determinize(&m.nfa).to_nfa(),
                })
                .collect(),
        }
    }

    /// Every state of every machine made accepting.
    pub fn accept_completion(&self) -> CfsmSystem {
        CfsmSystem {
            machines: self
                .machines
                .iter()
                .map(|m| Cfsm {
                    process: m.process.clone(),
                    nfa: crate::automata::accept_completion(&m.nfa),
                })
                .collect(),
        }
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        let j: SystemJson = serde_json::from_str(src)?;
        let machines = j
            .machines
            .iter()
            .map(|(p, a)| Cfsm::new(Name::new(p), Nfa::<Action>::from_json(a)?))
            .collect::<Result<Vec<_>>>()?;
        if machines.is_empty() {
            return Err(Error::InvalidArgument("system without machines".into()));
        }
        CfsmSystem::new(machines)
    }

    pub fn to_json_string(&self) -> String {
        let j = SystemJson {
            machines: self
                .machines
                .iter()
                .map(|m| (m.process.to_string(), m.nfa.to_json()))
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("serialisable")
    }

    pub fn to_dot(&self) -> String {
        self.machines
            .iter()
            .map(|m| m.nfa.to_dot(m.process.as_str()))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// One machine per process with the shape of `g`; arrows not involving the
/// process become ε.
pub fn project(g: &GlobalType) -> CfsmSystem {
    let arrows = g.dfa().alphabet();
    let alphabet = action_alphabet(arrows.iter());
    let machines = g
        .processes()
        .iter()
        .map(|p| {
            let mut nfa = Nfa::new(alphabet.clone());
            for _ in 1..g.dfa().num_states() {
                nfa.add_state(false);
            }
            nfa.set_initial(g.dfa().initial());
            for s in g.dfa().accepting_states() {
                nfa.set_accepting(s, true);
            }
            for (s, a, t) in g.dfa().transitions() {
                let label = if a.sender() == p {
                    Some(a.send())
                } else if a.receiver() == p {
                    Some(a.receive())
                } else {
                    None
                };
                nfa.add_transition(s, label.as_ref(), t).expect("label in alphabet");
            }
            Cfsm {
                process: p.clone(),
                nfa,
            }
        })
        .collect();
    CfsmSystem { machines }
}

/// Rendezvous product of the machines; ε-moves of one machine are kept.
pub fn preproduct(s: &CfsmSystem, alphabet: Option<&Alphabet<Arrow>>) -> Result<Nfa<Arrow>> {
    let own = s.arrows();
    let alphabet = alphabet.unwrap_or(&own);
    let actions = s.alphabet();
    let arrow_of: Vec<Option<usize>> = actions.iter().map(|a| alphabet.index_of(&a.arrow())).collect();
    let receive_of: Vec<Option<usize>> = actions.iter().map(|a| actions.index_of(&a.dual())).collect();
    let owner: Vec<usize> = {
        let names = s.processes();
        actions
            .iter()
            .map(|a| names.binary_search(a.peer()).expect("peer in universe"))
            .collect()
    };
    let mut out = Nfa::new(alphabet.clone());
    let start: Vec<StateId> = s.machines.iter().map(|m| m.nfa.initial()).collect();
    let accepting = |t: &[StateId]| s.machines.iter().zip(t).all(|(m, &q)| m.nfa.is_accepting(q));
    out.set_accepting(0, accepting(&start));
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut tuples = vec![start];
    let mut i = 0;
    while i < tuples.len() {
        let cur = tuples[i].clone();
        let mut moves: Vec<(Option<usize>, Vec<StateId>)> = Vec::new();
        for (p, m) in s.machines.iter().enumerate() {
            for &(sym, t) in m.nfa.edges(cur[p]) {
                match sym {
                    None => {
                        let mut next = cur.clone();
                        next[p] = t;
                        moves.push((None, next));
                    }
                    Some(a) if actions.symbol(a).is_send() => {
                        let q = owner[a];
                        let recv = receive_of[a].expect("alphabet closed under duals");
                        for &(sym2, t2) in s.machines[q].nfa.edges(cur[q]) {
                            if sym2 == Some(recv) {
                                let arrow = arrow_of[a].ok_or_else(|| {
                                    Error::AlphabetMismatch(format!(
                                        "{} is not in the target alphabet",
                                        actions.symbol(a).arrow()
                                    ))
                                })?;
                                let mut next = cur.clone();
                                next[p] = t;
                                next[q] = t2;
                                moves.push((Some(arrow), next));
                            }
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        for (sym, next) in moves {
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = out.add_state(accepting(&next));
                    index.insert(next.clone(), id);
                    tuples.push(next);
                    id
                }
            };
            out.add_edge(i, sym, id);
        }
        i += 1;
    }
    Ok(out)
}

/// Determinised rendezvous product, as a global type over the system's universe.
pub fn product(s: &CfsmSystem, alphabet: Option<&Alphabet<Arrow>>) -> Result<GlobalType> {
    let pre = preproduct(s, alphabet)?;
    GlobalType::new(determinize(&pre), s.processes())
}

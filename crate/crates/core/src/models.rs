//! Communication models: membership predicates on executions and automata
//! recognising the RSC executions whose MSC belongs to a model.

use crate::automata::{determinize, dual, product, Alphabet, Nfa, StateId};
use crate::error::{Error, Result};
use crate::msc::{Action, Arrow, Execution, Msc, Name};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CommModel {
    Bag,
    P2p,
    Causal,
    Synch,
    /// One FIFO queue per receiver, filled at send time. Only used by the
    /// explorer; it has no regular characterisation here.
    Mailbox,
}

impl CommModel {
    pub const ALL: [CommModel; 5] = [
        CommModel::Bag,
        CommModel::P2p,
        CommModel::Causal,
        CommModel::Synch,
        CommModel::Mailbox,
    ];

    /// The models with an exact decision procedure.
    pub const DECIDABLE: [CommModel; 4] = [CommModel::Bag, CommModel::P2p, CommModel::Causal, CommModel::Synch];

    pub fn name(self) -> &'static str {
        match self {
            CommModel::Bag => "bag",
            CommModel::P2p => "p2p",
            CommModel::Causal => "causal",
            CommModel::Synch => "synch",
            CommModel::Mailbox => "mailbox",
        }
    }

    pub fn contains_synch(self) -> bool {
        true
    }

    /// Whether one linearisation of an MSC in the model implies all are.
    pub fn causally_closed(self) -> bool {
        matches!(self, CommModel::Bag | CommModel::P2p | CommModel::Causal)
    }

    pub fn has_regsc_automaton(self) -> bool {
        self != CommModel::Mailbox
    }

    pub fn member(self, e: &Execution) -> bool {
        member(self, e)
    }

    pub fn regsc_automaton(self, alphabet: &Alphabet<Action>) -> Result<Nfa<Action>> {
        regsc_automaton(self, alphabet)
    }
}

impl fmt::Display for CommModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CommModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CommModel::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown communication model `{s}`")))
    }
}

/// Exact membership of an execution in a model.
pub fn member(model: CommModel, e: &Execution) -> bool {
    match model {
        CommModel::Bag => true,
        CommModel::Synch => {
            let src = e.sources();
            e.actions()
                .iter()
                .enumerate()
                .all(|(s, a)| !a.is_send() || src.get(s + 1).copied().flatten() == Some(s))
        }
        CommModel::P2p => fifo_per(e, |a| (a.sender().clone(), a.receiver().clone())),
        CommModel::Mailbox => fifo_per(e, |a| (a.receiver().clone(), a.receiver().clone())),
        CommModel::Causal => causal_member(e),
    }
}

/// Sends sharing a key are received in sending order, and a later send is
/// unmatched whenever an earlier one is.
fn fifo_per(e: &Execution, key: impl Fn(&Action) -> (Name, Name)) -> bool {
    let recv = e.matches();
    let acts = e.actions();
    let sends: Vec<usize> = (0..acts.len()).filter(|&i| acts[i].is_send()).collect();
    sends.iter().enumerate().all(|(k, &s1)| {
        sends[k + 1..].iter().all(|&s2| {
            key(&acts[s1]) != key(&acts[s2])
                || match (recv[s1], recv[s2]) {
                    (_, None) => true,
                    (Some(r1), Some(r2)) => r1 < r2,
                    (None, Some(_)) => false,
                }
        })
    })
}

/// Happens-before over the positions of `e`, read off its MSC.
fn position_order(e: &Execution) -> Vec<Vec<bool>> {
    let processes = e.processes();
    let msc = Msc::of_execution(e, &processes).expect("universe covers the execution");
    let hb = msc.happens_before();
    let mut count: HashMap<&Name, usize> = HashMap::new();
    let events: Vec<_> = e
        .actions()
        .iter()
        .map(|a| {
            let c = count.entry(a.owner()).or_default();
            *c += 1;
            crate::msc::Event::new(a.owner(), *c - 1)
        })
        .collect();
    events
        .iter()
        .map(|x| events.iter().map(|y| hb.precedes(x, y)).collect())
        .collect()
}

fn causal_member(e: &Execution) -> bool {
    let order = position_order(e);
    let recv = e.matches();
    let acts = e.actions();
    let n = acts.len();
    (0..n).all(|s1| {
        (0..n).all(|s2| {
            !(acts[s1].is_send() && acts[s2].is_send() && order[s1][s2] && acts[s1].receiver() == acts[s2].receiver())
                || match (recv[s1], recv[s2]) {
                    (_, None) => true,
                    (Some(r1), Some(r2)) => order[r1][r2],
                    (None, Some(_)) => false,
                }
        })
    })
}

/// The P2P condition stated over happens-before instead of sequence order.
pub fn p2p_member_by_order(e: &Execution) -> bool {
    let order = position_order(e);
    let recv = e.matches();
    let acts = e.actions();
    let n = acts.len();
    (0..n).all(|s1| {
        (0..n).all(|s2| {
            !(acts[s1].is_send() && acts[s2].is_send() && s1 != s2 && order[s1][s2] && acts[s1].same_channel(&acts[s2]))
                || match (recv[s1], recv[s2]) {
                    (_, None) => true,
                    (Some(r1), Some(r2)) => order[r1][r2],
                    (None, Some(_)) => false,
                }
        })
    })
}

/// Sends and receives of every arrow.
pub fn action_alphabet<'a>(arrows: impl IntoIterator<Item = &'a Arrow>) -> Alphabet<Action> {
    Alphabet::new(arrows.into_iter().flat_map(|a| [a.send(), a.receive()]))
}

/// Sends in the alphabet, as symbol indices.
fn send_symbols(alphabet: &Alphabet<Action>) -> Vec<usize> {
    (0..alphabet.len()).filter(|&i| alphabet.symbol(i).is_send()).collect()
}

/// Builds the reachable part of an automaton given by a successor function.
fn explore<K: Clone + Eq + std::hash::Hash>(
    alphabet: &Alphabet<Action>,
    start: K,
    accepting: impl Fn(&K) -> bool,
    successors: impl Fn(&K) -> Vec<(usize, K)>,
) -> Nfa<Action> {
    let mut nfa = Nfa::new(alphabet.clone());
    let mut index: HashMap<K, StateId> = HashMap::new();
    nfa.set_accepting(0, accepting(&start));
    index.insert(start.clone(), 0);
    let mut states = vec![start];
    let mut i = 0;
    while i < states.len() {
        let k = states[i].clone();
        for (sym, next) in successors(&k) {
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = nfa.add_state(accepting(&next));
                    index.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            nfa.add_edge(i, Some(sym), id);
        }
        i += 1;
    }
    nfa
}

/// Pending-send tracking shared by the model automata: in idle mode a send
/// either stays idle (orphan) or waits for its receive.
fn rsc_moves(alphabet: &Alphabet<Action>, pending: Option<usize>, orphans: bool) -> Vec<(usize, Option<usize>)> {
    match pending {
        Some(s) => {
            let r = alphabet
                .index_of(&alphabet.symbol(s).dual())
                .expect("alphabet closed under duals");
            vec![(r, None)]
        }
        None => send_symbols(alphabet)
            .into_iter()
            .flat_map(|s| {
                let mut v = vec![(s, Some(s))];
                if orphans {
                    v.push((s, None));
                }
                v
            })
            .collect(),
    }
}

fn check_closed(alphabet: &Alphabet<Action>) -> Result<()> {
    match alphabet.iter().find(|a| !alphabet.contains(&a.dual())) {
        Some(a) => Err(Error::AlphabetMismatch(format!("alphabet lacks the dual of {a}"))),
        None => Ok(()),
    }
}

/// Accepts exactly the RSC executions over the alphabet.
pub fn rsc_execution_automaton(alphabet: &Alphabet<Action>) -> Result<Nfa<Action>> {
    check_closed(alphabet)?;
    Ok(explore(alphabet, None, Option::is_none, |&p| {
        rsc_moves(alphabet, p, true)
    }))
}

fn synch_automaton(alphabet: &Alphabet<Action>) -> Nfa<Action> {
    explore(alphabet, None, Option::is_none, |&p| rsc_moves(alphabet, p, false))
}

fn p2p_automaton(alphabet: &Alphabet<Action>) -> Result<Nfa<Action>> {
    let mut channels: Vec<(Name, Name)> = alphabet
        .iter()
        .map(|a| (a.sender().clone(), a.receiver().clone()))
        .collect();
    channels.sort();
    channels.dedup();
    if channels.len() > 64 {
        return Err(Error::InvalidArgument("more than 64 channels".into()));
    }
    let channel_of: Vec<u64> = alphabet
        .iter()
        .map(|a| {
            let c = channels
                .binary_search(&(a.sender().clone(), a.receiver().clone()))
                .expect("channel listed");
            1u64 << c
        })
        .collect();
    Ok(explore(
        alphabet,
        (0u64, None::<usize>),
        |(_, p)| p.is_none(),
        |&(blocked, pending)| {
            rsc_moves(alphabet, pending, true)
                .into_iter()
                .filter_map(|(sym, next)| match (pending, next) {
                    (Some(_), _) => Some((sym, (blocked, None))),
                    (None, Some(_)) if blocked & channel_of[sym] != 0 => None,
                    (None, Some(s)) => Some((sym, (blocked, Some(s)))),
                    (None, None) => Some((sym, (blocked | channel_of[sym], None))),
                })
                .collect()
        },
    ))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Track {
    /// No unmatched send chosen yet.
    Start,
    /// A causal path from an unmatched send to the receiver has been found.
    Violation,
    /// The path currently sits on process `.0`; the unmatched send targets `.1`.
    At(Name, Name),
}

/// Accepts the RSC executions with a causal path from an unmatched send to
/// a later receive by the same receiver.
fn causal_violation_automaton(alphabet: &Alphabet<Action>) -> Nfa<Action> {
    let sends = send_symbols(alphabet);
    explore(
        alphabet,
        (Track::Start, None::<usize>),
        |(t, _)| *t == Track::Violation,
        |(track, pending)| {
            let mut out = Vec::new();
            match pending {
                None => {
                    for &s in &sends {
                        out.push((s, (track.clone(), None)));
                        out.push((s, (track.clone(), Some(s))));
                        if *track == Track::Start {
                            let a = alphabet.symbol(s);
                            out.push((s, (Track::At(a.sender().clone(), a.receiver().clone()), None)));
                        }
                    }
                }
                Some(s) => {
                    let a = alphabet.symbol(*s);
                    let r = alphabet.index_of(&a.dual()).expect("alphabet closed under duals");
                    out.push((r, (track.clone(), None)));
                    if let Track::At(p, q) = track {
                        if a.sender() == p {
                            out.push((r, (Track::At(a.receiver().clone(), q.clone()), None)));
                            if a.receiver() == q {
                                out.push((r, (Track::Violation, None)));
                            }
                        }
                    }
                }
            }
            out
        },
    )
}

fn causal_automaton(alphabet: &Alphabet<Action>) -> Result<Nfa<Action>> {
    let violations = causal_violation_automaton(alphabet);
    let rsc = rsc_execution_automaton(alphabet)?;
    product(&dual(&determinize(&violations)).to_nfa(), &rsc)
}

/// Automaton for the RSC executions whose MSC is linearisable in `model`.
pub fn regsc_automaton(model: CommModel, alphabet: &Alphabet<Action>) -> Result<Nfa<Action>> {
    check_closed(alphabet)?;
    match model {
        CommModel::Bag => rsc_execution_automaton(alphabet),
        CommModel::Synch => Ok(synch_automaton(alphabet)),
        CommModel::P2p => p2p_automaton(alphabet),
        CommModel::Causal => causal_automaton(alphabet),
        CommModel::Mailbox => Err(Error::UnsupportedModel {
            model: model.to_string(),
            reason: "no regular characterisation".into(),
        }),
    }
}

/// An MSC is linearisable in `model` when some linearisation is a member.
pub fn msc_in_model(m: &Msc, model: CommModel) -> bool {
    m.linearisations(Some(model)).next().is_some()
}

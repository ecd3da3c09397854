//! Channel contents and delivery rules of the asynchronous models.

use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::models::CommModel;
use crate::msc::{Action, Name};

/// Static facts about the symbols of an action alphabet.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub owner: Vec<usize>,
    pub peer: Vec<usize>,
    pub is_send: Vec<bool>,
    /// The matching receive of a send and vice versa.
    pub dual: Vec<usize>,
}

impl Layout {
    pub fn new(processes: &[Name], alphabet: &Alphabet<Action>) -> Result<Self> {
        let idx = |p: &Name| {
            processes
                .binary_search(p)
                .map_err(|_| Error::UnknownProcess(p.to_string()))
        };
        let mut l = Layout {
            owner: Vec::new(),
            peer: Vec::new(),
            is_send: Vec::new(),
            dual: Vec::new(),
        };
        for a in alphabet.iter() {
            l.owner.push(idx(a.owner())?);
            l.peer.push(idx(a.peer())?);
            l.is_send.push(a.is_send());
            l.dual.push(
                alphabet
                    .index_of(&a.dual())
                    .ok_or_else(|| Error::AlphabetMismatch(format!("alphabet lacks the dual of {a}")))?,
            );
        }
        Ok(l)
    }
}

/// A message in transit, identified by its send symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Message {
    pub sym: usize,
    /// In-transit messages (by position) whose send happened before this one.
    pub past: u64,
}

/// In-transit messages in sending order, plus per-process causal pasts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Channels {
    pub msgs: Vec<Message>,
    pub past: Vec<u64>,
}

pub(crate) const MAX_IN_TRANSIT: usize = 64;

impl Channels {
    pub fn new(processes: usize) -> Self {
        Channels {
            msgs: Vec::new(),
            past: vec![0; processes],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.msgs.is_empty()
    }

    /// Whether sending `sym` respects the capacity bound.
    pub fn has_room(&self, model: CommModel, layout: &Layout, sym: usize, bound: usize) -> bool {
        if self.msgs.len() >= MAX_IN_TRANSIT {
            return false;
        }
        let (from, to) = (layout.owner[sym], layout.peer[sym]);
        let used = self
            .msgs
            .iter()
            .filter(|m| {
                let (f, t) = (layout.owner[m.sym], layout.peer[m.sym]);
                match model {
                    CommModel::Mailbox => t == to,
                    _ => f == from && t == to,
                }
            })
            .count();
        used < bound
    }

    pub fn send(&mut self, model: CommModel, layout: &Layout, sym: usize) {
        let p = layout.owner[sym];
        let causal = model == CommModel::Causal;
        let past = if causal { self.past[p] } else { 0 };
        self.msgs.push(Message { sym, past });
        if causal {
            self.past[p] |= 1 << (self.msgs.len() - 1);
        }
    }

    /// Positions of messages that the receive `recv` may consume now.
    pub fn deliverable(&self, model: CommModel, layout: &Layout, recv: usize) -> Vec<usize> {
        let want = layout.dual[recv];
        let me = layout.owner[recv];
        let from = layout.peer[recv];
        match model {
            CommModel::Bag => (0..self.msgs.len()).filter(|&i| self.msgs[i].sym == want).collect(),
            CommModel::P2p => self
                .msgs
                .iter()
                .position(|m| layout.owner[m.sym] == from && layout.peer[m.sym] == me)
                .filter(|&i| self.msgs[i].sym == want)
                .into_iter()
                .collect(),
            CommModel::Mailbox => self
                .msgs
                .iter()
                .position(|m| layout.peer[m.sym] == me)
                .filter(|&i| self.msgs[i].sym == want)
                .into_iter()
                .collect(),
            CommModel::Causal => (0..self.msgs.len())
                .filter(|&i| {
                    self.msgs[i].sym == want
                        && !(0..self.msgs.len())
                            .any(|j| self.msgs[i].past & (1 << j) != 0 && layout.peer[self.msgs[j].sym] == me)
                })
                .collect(),
            CommModel::Synch => Vec::new(),
        }
    }

    /// Removes the message at `pos`; the receiver inherits its causal past.
    pub fn receive(&mut self, model: CommModel, layout: &Layout, pos: usize) -> Message {
        let m = self.msgs.remove(pos);
        if model == CommModel::Causal {
            let q = layout.peer[m.sym];
            self.past[q] |= m.past;
            let drop = |x: u64| {
                let low = x & ((1u64 << pos) - 1);
                let high = if pos + 1 >= 64 { 0 } else { (x >> (pos + 1)) << pos };
                low | high
            };
            for p in &mut self.past {
                *p = drop(*p);
            }
            for other in &mut self.msgs {
                other.past = drop(other.past);
            }
        }
        m
    }
}

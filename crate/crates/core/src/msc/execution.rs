use super::{Action, Arrow, Name};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A sequence of actions with an injective receive-to-send matching.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "ExecutionJson", into = "ExecutionJson")]
pub struct Execution {
    actions: Vec<Action>,
    source: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ExecutionJson {
    actions: Vec<Action>,
    /// `[receive position, send position]` pairs.
    source: Vec<(usize, usize)>,
}

impl TryFrom<ExecutionJson> for Execution {
    type Error = Error;

    fn try_from(j: ExecutionJson) -> Result<Self> {
        let mut source = vec![None; j.actions.len()];
        for (r, s) in j.source {
            if r >= source.len() {
                return Err(Error::InvalidExecution(format!("receive position {r} out of range")));
            }
            source[r] = Some(s);
        }
        Execution::new(j.actions, source)
    }
}

impl From<Execution> for ExecutionJson {
    fn from(e: Execution) -> Self {
        let source = e
            .source
            .iter()
            .enumerate()
            .filter_map(|(r, s)| s.map(|s| (r, s)))
            .collect();
        ExecutionJson {
            actions: e.actions,
            source,
        }
    }
}

impl Execution {
    pub fn empty() -> Self {
        Execution::default()
    }

    /// Validates that `source` is defined exactly on receives, points
    /// backwards to a matching send, and is injective.
    pub fn new(actions: Vec<Action>, source: Vec<Option<usize>>) -> Result<Self> {
        if actions.len() != source.len() {
            return Err(Error::InvalidExecution(
                "source length differs from action count".into(),
            ));
        }
        let mut used = vec![false; actions.len()];
        for (r, (a, s)) in actions.iter().zip(&source).enumerate() {
            match (a.is_receive(), s) {
                (false, None) => {}
                (false, Some(_)) => return Err(Error::InvalidExecution(format!("send at {r} has a source"))),
                (true, None) => return Err(Error::InvalidExecution(format!("receive at {r} has no source"))),
                (true, Some(s)) => {
                    let s = *s;
                    if s >= r || !actions[s].is_send() || !actions[s].same_message(a) {
                        return Err(Error::InvalidExecution(format!(
                            "receive at {r} cannot be matched with position {s}"
                        )));
                    }
                    if std::mem::replace(&mut used[s], true) {
                        return Err(Error::InvalidExecution(format!("send at {s} matched twice")));
                    }
                }
            }
        }
        Ok(Execution { actions, source })
    }

    /// Matches each receive with the earliest unmatched send of the same message.
    pub fn with_fifo_matching(actions: Vec<Action>) -> Result<Self> {
        let mut used = vec![false; actions.len()];
        let mut source = vec![None; actions.len()];
        for r in 0..actions.len() {
            if !actions[r].is_receive() {
                continue;
            }
            let s = (0..r)
                .find(|&s| !used[s] && actions[s].is_send() && actions[s].same_message(&actions[r]))
                .ok_or_else(|| Error::InvalidExecution(format!("receive at {r} has no pending send")))?;
            used[s] = true;
            source[r] = Some(s);
        }
        Execution::new(actions, source)
    }

    /// Interprets a word as an RSC execution: every receive is matched with
    /// the send immediately before it.
    pub fn rsc_from_actions(actions: Vec<Action>) -> Result<Self> {
        let mut source = Vec::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            match (a.is_receive(), i.checked_sub(1)) {
                (false, _) => source.push(None),
                (true, Some(s)) => source.push(Some(s)),
                (true, None) => return Err(Error::InvalidExecution("execution starts with a receive".into())),
            }
        }
        Execution::new(actions, source)
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Position of the send matched by the receive at `pos`.
    pub fn source(&self, pos: usize) -> Option<usize> {
        self.source[pos]
    }

    pub fn sources(&self) -> &[Option<usize>] {
        &self.source
    }

    /// For each position, the receive matching it (sends only).
    pub fn matches(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.len()];
        for (r, s) in self.source.iter().enumerate() {
            if let Some(s) = s {
                out[*s] = Some(r);
            }
        }
        out
    }

    pub fn push_send(&mut self, action: Action) {
        assert!(action.is_send());
        self.actions.push(action);
        self.source.push(None);
    }

    /// Appends a receive matched with the send at `send_pos`.
    pub fn push_receive(&mut self, send_pos: usize) {
        let a = self.actions[send_pos].dual();
        assert!(a.is_receive());
        self.actions.push(a);
        self.source.push(Some(send_pos));
    }

    pub fn pop(&mut self) -> Option<Action> {
        self.source.pop();
        self.actions.pop()
    }

    /// First `n` actions with the matching restricted accordingly.
    pub fn prefix(&self, n: usize) -> Execution {
        Execution {
            actions: self.actions[..n].to_vec(),
            source: self.source[..n].to_vec(),
        }
    }

    pub fn projection(&self, p: &Name) -> Vec<Action> {
        self.actions.iter().filter(|a| a.owner() == p).cloned().collect()
    }

    /// Processes occurring in the execution, sorted.
    pub fn processes(&self) -> Vec<Name> {
        let mut v: Vec<Name> = self
            .actions
            .iter()
            .flat_map(|a| [a.sender().clone(), a.receiver().clone()])
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn is_orphan_free(&self) -> bool {
        let m = self.matches();
        self.actions
            .iter()
            .enumerate()
            .all(|(i, a)| !a.is_send() || m[i].is_some())
    }

    /// Every receive immediately follows its send.
    pub fn is_rsc(&self) -> bool {
        self.source
            .iter()
            .enumerate()
            .all(|(r, s)| s.is_none_or(|s| s + 1 == r))
    }

    /// Sequence prefix with agreeing matching.
    pub fn is_prefix_of(&self, other: &Execution) -> bool {
        self.len() <= other.len()
            && self.actions[..] == other.actions[..self.len()]
            && self.source[..] == other.source[..self.len()]
    }
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match self.source[i] {
                Some(s) => write!(f, "{a}@{s}")?,
                None => write!(f, "{a}")?,
            }
        }
        write!(f, "]")
    }
}

pub fn is_orphan_free(e: &Execution) -> bool {
    e.is_orphan_free()
}

pub fn is_rsc(e: &Execution) -> bool {
    e.is_rsc()
}

pub fn exec_is_prefix(a: &Execution, b: &Execution) -> bool {
    a.is_prefix_of(b)
}

/// The synchronous execution coding an arrow word: each arrow becomes a
/// send immediately followed by its receive.
pub fn arrows_to_execution(word: &[Arrow]) -> Execution {
    let mut e = Execution::empty();
    for a in word {
        e.push_send(a.send());
        e.push_receive(e.len() - 1);
    }
    e
}

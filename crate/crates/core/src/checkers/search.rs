//! Bounded breadth-first exploration of a system's configurations.

use crate::automata::StateId;
use crate::error::{Error, Result};
use crate::global::CfsmSystem;
use crate::models::CommModel;
use crate::msc::Execution;
use crate::semantics::{Channels, Layout};
use std::collections::{HashMap, VecDeque};

/// What the search is looking for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// A partial execution whose MSC is not a prefix of a synchronous MSC.
    NotPrefixSynchronous,
    /// An execution reaching final states with messages still in transit.
    Orphan,
    /// A configuration without moves where some machine is not final.
    Deadlock,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub witness: Option<Execution>,
    /// The channel bound or the configuration budget cut some branch.
    pub truncated: bool,
    pub configurations: usize,
}

/// Summary of the order between the last event of every process and the
/// messages in transit, once each delivered message is contracted into
/// one node and each pending one is assumed delivered last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Monitor {
    ends: Vec<u8>,
    pending: Vec<u8>,
    /// Strict reachability between nodes, as bit masks.
    reach: Vec<u64>,
}

impl Monitor {
    fn new(processes: usize) -> Self {
        Monitor {
            ends: (0..processes as u8).collect(),
            pending: Vec::new(),
            reach: vec![0; processes],
        }
    }

    fn reaches_any(&self, from: u8, targets: u64) -> bool {
        targets & (1 << from) != 0 || self.reach[from as usize] & targets != 0
    }

    /// Records a send from `x` to `z`; `targets[i]` is the receiver of the
    /// i-th pending message. Returns `false` on a cycle.
    fn send(&mut self, x: usize, z: usize, targets: &[usize]) -> bool {
        let ins: u64 = (1 << self.ends[x]) | (1 << self.ends[z]);
        let outs: Vec<u8> = self
            .pending
            .iter()
            .zip(targets)
            .filter(|(_, &t)| t == x)
            .map(|(&n, _)| n)
            .collect();
        if outs.iter().any(|&o| self.reaches_any(o, ins)) {
            return false;
        }
        let w = self.reach.len() as u8;
        let below = outs
            .iter()
            .fold(0u64, |acc, &o| acc | (1 << o) | self.reach[o as usize]);
        self.reach.push(below);
        let up = (1u64 << w) | below;
        for u in 0..w {
            if ins & (1 << u) != 0 || self.reach[u as usize] & ins != 0 {
                self.reach[u as usize] |= up;
            }
        }
        self.ends[x] = w;
        self.pending.push(w);
        self.canonicalize();
        true
    }

    /// Records the receipt by `x` of the pending message at `pos`;
    /// `targets` lists receivers of the remaining pending messages.
    fn receive(&mut self, x: usize, pos: usize, targets: &[usize]) -> bool {
        let y = self.pending.remove(pos);
        let outs: Vec<u8> = self
            .pending
            .iter()
            .zip(targets)
            .filter(|(_, &t)| t == x)
            .map(|(&n, _)| n)
            .collect();
        if outs.iter().any(|&v| self.reach[v as usize] & (1 << y) != 0) {
            return false;
        }
        let below = outs
            .iter()
            .fold(0u64, |acc, &v| acc | (1 << v) | self.reach[v as usize]);
        self.reach[y as usize] |= below;
        let up = (1u64 << y) | self.reach[y as usize];
        for u in 0..self.reach.len() {
            if self.reach[u] & (1 << y) != 0 {
                self.reach[u] |= up;
            }
        }
        self.ends[x] = y;
        self.canonicalize();
        true
    }

    /// Drops nodes that are neither an end nor pending and renumbers the
    /// rest by first occurrence.
    fn canonicalize(&mut self) {
        let mut map = vec![u8::MAX; self.reach.len()];
        let mut order = Vec::new();
        for &n in self.ends.iter().chain(&self.pending) {
            if map[n as usize] == u8::MAX {
                map[n as usize] = order.len() as u8;
                order.push(n);
            }
        }
        let remap = |mask: u64| {
            let mut out = 0u64;
            for (old, &new) in map.iter().enumerate() {
                if new != u8::MAX && mask & (1 << old) != 0 {
                    out |= 1 << new;
                }
            }
            out
        };
        self.reach = order.iter().map(|&n| remap(self.reach[n as usize])).collect();
        for n in self.ends.iter_mut().chain(self.pending.iter_mut()) {
            *n = map[*n as usize];
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Config {
    states: Vec<StateId>,
    channels: Channels,
    monitor: Monitor,
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Send(usize),
    Receive { pos: usize, sym: usize },
    Rendezvous(usize),
}

/// Searches the configurations of `system` (machines are determinised
/// first) under `model`, with at most `bound` messages per channel and at
/// most `budget` configurations.
pub fn search(
    system: &CfsmSystem,
    model: CommModel,
    bound: usize,
    budget: usize,
    target: Target,
) -> Result<SearchOutcome> {
    if bound == 0 {
        return Err(Error::InvalidArgument("channel bound must be positive".into()));
    }
    let sys = system.determinized();
    let procs = sys.processes();
    if procs.len() > 32 {
        return Err(Error::InvalidArgument("more than 32 processes".into()));
    }
    let layout = Layout::new(&procs, sys.alphabet())?;
    let machines: Vec<_> = sys.machines().iter().map(|m| m.nfa()).collect();

    let start = Config {
        states: machines.iter().map(|m| m.initial()).collect(),
        channels: Channels::new(procs.len()),
        monitor: Monitor::new(procs.len()),
    };
    let mut configs = vec![start.clone()];
    let mut parent: Vec<Option<(usize, Step)>> = vec![None];
    let mut seen: HashMap<Config, usize> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    // Only the prefix-synchrony target needs the happens-before summary.
    let tracked = target == Target::NotPrefixSynchronous;

    let witness = |mut id: usize, last: Option<Step>, parent: &[Option<(usize, Step)>]| {
        let mut steps: Vec<Step> = last.into_iter().collect();
        while let Some((p, s)) = parent[id] {
            steps.push(s);
            id = p;
        }
        steps.reverse();
        replay(&sys, &steps)
    };

    while let Some(id) = queue.pop_front() {
        let cfg = configs[id].clone();
        let all_final = machines.iter().zip(&cfg.states).all(|(m, &s)| m.is_accepting(s));
        if target == Target::Orphan && all_final && !cfg.channels.is_empty() {
            return Ok(SearchOutcome {
                witness: Some(witness(id, None, &parent)),
                truncated,
                configurations: configs.len(),
            });
        }
        let mut moved = false;
        for (p, m) in machines.iter().enumerate() {
            for &(sym, t) in m.edges(cfg.states[p]) {
                let Some(sym) = sym else { continue };
                let mut nexts: Vec<(Step, Config)> = Vec::new();
                if layout.is_send[sym] {
                    let z = layout.peer[sym];
                    if model == CommModel::Synch {
                        let recv = layout.dual[sym];
                        for &(s2, t2) in machines[z].edges(cfg.states[z]) {
                            if s2 == Some(recv) {
                                let mut next = cfg.clone();
                                next.states[p] = t;
                                next.states[z] = t2;
                                nexts.push((Step::Rendezvous(sym), next));
                            }
                        }
                    } else if cfg.channels.has_room(model, &layout, sym, bound) {
                        let mut next = cfg.clone();
                        let targets: Vec<usize> = cfg.channels.msgs.iter().map(|m| layout.peer[m.sym]).collect();
                        next.states[p] = t;
                        next.channels.send(model, &layout, sym);
                        if tracked && !next.monitor.send(p, z, &targets) {
                            return Ok(SearchOutcome {
                                witness: Some(witness(id, Some(Step::Send(sym)), &parent)),
                                truncated,
                                configurations: configs.len(),
                            });
                        }
                        nexts.push((Step::Send(sym), next));
                    } else {
                        truncated = true;
                    }
                } else if model != CommModel::Synch {
                    for pos in cfg.channels.deliverable(model, &layout, sym) {
                        let mut next = cfg.clone();
                        next.states[p] = t;
                        next.channels.receive(model, &layout, pos);
                        let targets: Vec<usize> = next.channels.msgs.iter().map(|m| layout.peer[m.sym]).collect();
                        let step = Step::Receive { pos, sym };
                        if tracked && !next.monitor.receive(p, pos, &targets) {
                            return Ok(SearchOutcome {
                                witness: Some(witness(id, Some(step), &parent)),
                                truncated,
                                configurations: configs.len(),
                            });
                        }
                        nexts.push((step, next));
                    }
                }
                for (step, next) in nexts {
                    moved = true;
                    if seen.contains_key(&next) {
                        continue;
                    }
                    if configs.len() >= budget {
                        truncated = true;
                        continue;
                    }
                    let nid = configs.len();
                    seen.insert(next.clone(), nid);
                    configs.push(next);
                    parent.push(Some((id, step)));
                    queue.push_back(nid);
                }
            }
        }
        if target == Target::Deadlock && !moved && !all_final {
            return Ok(SearchOutcome {
                witness: Some(witness(id, None, &parent)),
                truncated,
                configurations: configs.len(),
            });
        }
    }
    Ok(SearchOutcome {
        witness: None,
        truncated,
        configurations: configs.len(),
    })
}

fn replay(sys: &CfsmSystem, steps: &[Step]) -> Execution {
    let al = sys.alphabet();
    let mut e = Execution::empty();
    let mut in_transit: Vec<usize> = Vec::new();
    for step in steps {
        match *step {
            Step::Send(sym) => {
                e.push_send(al.symbol(sym).clone());
                in_transit.push(e.len() - 1);
            }
            Step::Receive { pos, sym } => {
                let s = in_transit.remove(pos);
                debug_assert_eq!(e.actions()[s].dual(), *al.symbol(sym));
                e.push_receive(s);
            }
            Step::Rendezvous(sym) => {
                e.push_send(al.symbol(sym).clone());
                e.push_receive(e.len() - 1);
            }
        }
    }
    e
}

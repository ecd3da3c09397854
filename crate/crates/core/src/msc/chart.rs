use super::{Action, Arrow, Execution, Name};
use crate::error::{Error, Result};
use crate::models::{member, CommModel};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Position `index` on the timeline of `process`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Event {
    pub process: Name,
    pub index: usize,
}

impl Event {
    pub fn new(process: &Name, index: usize) -> Self {
        Event {
            process: process.clone(),
            index,
        }
    }
}

/// Message sequence chart over an explicit process universe.
///
/// Equality is positional: same universe, same timelines, same matching.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "MscJson", into = "MscJson")]
pub struct Msc {
    processes: Vec<Name>,
    timelines: Vec<Vec<Action>>,
    /// Per event, the `(process index, index)` of the matched send for receives.
    source: Vec<Vec<Option<(usize, usize)>>>,
}

#[derive(Serialize, Deserialize)]
struct MscJson {
    processes: Vec<Name>,
    timelines: BTreeMap<Name, Vec<Action>>,
    source: Vec<((Name, usize), (Name, usize))>,
}

impl TryFrom<MscJson> for Msc {
    type Error = Error;

    fn try_from(j: MscJson) -> Result<Self> {
        let source = j
            .source
            .into_iter()
            .map(|((p, i), (q, k))| (Event::new(&p, i), Event::new(&q, k)))
            .collect();
        Msc::new(j.processes, j.timelines, source)
    }
}

impl From<Msc> for MscJson {
    fn from(m: Msc) -> Self {
        let mut source = Vec::new();
        for (p, row) in m.source.iter().enumerate() {
            for (i, s) in row.iter().enumerate() {
                if let Some((q, k)) = s {
                    source.push(((m.processes[p].clone(), i), (m.processes[*q].clone(), *k)));
                }
            }
        }
        MscJson {
            timelines: m.processes.iter().cloned().zip(m.timelines.iter().cloned()).collect(),
            processes: m.processes,
            source,
        }
    }
}

impl Msc {
    pub fn empty(processes: &[Name]) -> Self {
        let processes = sorted(processes);
        let n = processes.len();
        Msc {
            processes,
            timelines: vec![Vec::new(); n],
            source: vec![Vec::new(); n],
        }
    }

    /// Builds and validates an MSC. `source` lists `(receive, send)` pairs.
    pub fn new(
        processes: Vec<Name>,
        timelines: BTreeMap<Name, Vec<Action>>,
        source: Vec<(Event, Event)>,
    ) -> Result<Self> {
        let mut m = Msc::empty(&processes);
        for (p, line) in timelines {
            let pi = m.index_of(&p).ok_or_else(|| Error::UnknownProcess(p.to_string()))?;
            for a in &line {
                if a.owner() != &p {
                    return Err(Error::InvalidMsc(format!("action {a} on the timeline of {p}")));
                }
                if m.index_of(a.peer()).is_none() {
                    return Err(Error::UnknownProcess(a.peer().to_string()));
                }
            }
            m.source[pi] = vec![None; line.len()];
            m.timelines[pi] = line;
        }
        let mut used = std::collections::HashSet::new();
        for (r, s) in source {
            let (rp, sp) = (m.event_index(&r)?, m.event_index(&s)?);
            let (ra, sa) = (&m.timelines[rp.0][rp.1], &m.timelines[sp.0][sp.1]);
            if !ra.is_receive() || !sa.is_send() || !ra.same_message(sa) {
                return Err(Error::InvalidMsc(format!("{r:?} cannot be matched with {s:?}")));
            }
            if !used.insert(sp) || m.source[rp.0][rp.1].replace(sp).is_some() {
                return Err(Error::InvalidMsc("matching is not injective".into()));
            }
        }
        for (p, row) in m.source.iter().enumerate() {
            for (i, s) in row.iter().enumerate() {
                if m.timelines[p][i].is_receive() && s.is_none() {
                    return Err(Error::InvalidMsc(format!(
                        "receive ({}, {i}) is unmatched",
                        m.processes[p]
                    )));
                }
            }
        }
        Ok(m)
    }

    fn event_index(&self, e: &Event) -> Result<(usize, usize)> {
        let p = self
            .index_of(&e.process)
            .ok_or_else(|| Error::UnknownProcess(e.process.to_string()))?;
        if e.index >= self.timelines[p].len() {
            return Err(Error::InvalidMsc(format!("event {e:?} out of range")));
        }
        Ok((p, e.index))
    }

    pub(crate) fn index_of(&self, p: &Name) -> Option<usize> {
        self.processes.binary_search(p).ok()
    }

    pub fn processes(&self) -> &[Name] {
        &self.processes
    }

    pub fn timeline(&self, p: &Name) -> Option<&[Action]> {
        self.index_of(p).map(|i| self.timelines[i].as_slice())
    }

    pub fn source(&self, e: &Event) -> Option<Event> {
        let (p, i) = self.event_index(e).ok()?;
        self.source[p][i].map(|(q, k)| Event::new(&self.processes[q], k))
    }

    pub fn num_events(&self) -> usize {
        self.timelines.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_events() == 0
    }

    /// All events, process by process.
    pub fn events(&self) -> Vec<Event> {
        self.processes
            .iter()
            .zip(&self.timelines)
            .flat_map(|(p, line)| (0..line.len()).map(move |i| Event::new(p, i)))
            .collect()
    }

    /// Builds the MSC of an execution over the given process universe.
    pub fn of_execution(e: &Execution, processes: &[Name]) -> Result<Self> {
        let mut m = Msc::empty(processes);
        let mut place = Vec::with_capacity(e.len());
        for (pos, a) in e.actions().iter().enumerate() {
            let p = m
                .index_of(a.owner())
                .ok_or_else(|| Error::UnknownProcess(a.owner().to_string()))?;
            if m.index_of(a.peer()).is_none() {
                return Err(Error::UnknownProcess(a.peer().to_string()));
            }
            let i = m.timelines[p].len();
            m.timelines[p].push(a.clone());
            m.source[p].push(e.source(pos).map(|s| place[s]));
            place.push((p, i));
        }
        Ok(m)
    }

    pub fn happens_before(&self) -> HappensBefore {
        HappensBefore::new(self)
    }

    /// Lazy stream of linearisations, optionally restricted to a model.
    pub fn linearisations(&self, model: Option<CommModel>) -> Linearisations<'_> {
        Linearisations::new(self, model)
    }

    /// Per-timeline prefix with agreeing matching.
    pub fn is_prefix_of(&self, other: &Msc) -> bool {
        self.processes == other.processes
            && (0..self.processes.len()).all(|p| {
                let n = self.timelines[p].len();
                n <= other.timelines[p].len()
                    && self.timelines[p][..] == other.timelines[p][..n]
                    && self.source[p][..] == other.source[p][..n]
            })
    }

    /// Vertical gluing of two charts over the same universe.
    pub fn concat(&self, other: &Msc) -> Result<Msc> {
        if self.processes != other.processes {
            return Err(Error::InvalidArgument("MSCs over different process universes".into()));
        }
        let mut m = self.clone();
        for p in 0..self.processes.len() {
            m.timelines[p].extend(other.timelines[p].iter().cloned());
            m.source[p].extend(
                other.source[p]
                    .iter()
                    .map(|s| s.map(|(q, k)| (q, k + self.timelines[q].len()))),
            );
        }
        Ok(m)
    }

    /// The chart without the last event of `p`, unless that event is a send
    /// whose receive would be left dangling.
    pub fn drop_last(&self, p: &Name) -> Option<Msc> {
        let pi = self.index_of(p)?;
        let i = self.timelines[pi].len().checked_sub(1)?;
        let dangling = self.source.iter().flatten().any(|s| *s == Some((pi, i)));
        if dangling {
            return None;
        }
        let mut m = self.clone();
        m.timelines[pi].pop();
        m.source[pi].pop();
        Some(m)
    }

    /// Node of each event once every matched message is contracted to a
    /// single node; unmatched sends keep their own node.
    fn contracted(&self) -> (usize, Vec<Vec<usize>>) {
        let mut count = 0;
        let mut node: Vec<Vec<usize>> = self
            .timelines
            .iter()
            .map(|line| {
                line.iter()
                    .map(|a| {
                        if !a.is_send() {
                            return usize::MAX;
                        }
                        count += 1;
                        count - 1
                    })
                    .collect()
            })
            .collect();
        for p in 0..self.processes.len() {
            for i in 0..self.timelines[p].len() {
                if let Some((q, k)) = self.source[p][i] {
                    node[p][i] = node[q][k];
                }
            }
        }
        (count, node)
    }

    fn unmatched_sends(&self) -> Vec<(usize, usize)> {
        let mut matched = std::collections::HashSet::new();
        for row in &self.source {
            for s in row.iter().flatten() {
                matched.insert(*s);
            }
        }
        let mut out = Vec::new();
        for (p, line) in self.timelines.iter().enumerate() {
            for (i, a) in line.iter().enumerate() {
                if a.is_send() && !matched.contains(&(p, i)) {
                    out.push((p, i));
                }
            }
        }
        out
    }

    /// Admits a linearisation in which every message is orphan or received
    /// immediately after its send.
    pub fn is_rsc(&self) -> bool {
        let (count, node) = self.contracted();
        acyclic(count, &self.timeline_edges(&node))
    }

    /// Is a prefix of some synchronous MSC: completing every unmatched send
    /// with a receive at the end of its receiver's timeline keeps the
    /// contracted order acyclic.
    pub fn is_prefix_of_synchronous(&self) -> bool {
        let (count, node) = self.contracted();
        let mut edges = self.timeline_edges(&node);
        for (p, i) in self.unmatched_sends() {
            let q = self
                .index_of(self.timelines[p][i].receiver())
                .expect("peer in universe");
            if let Some(&last) = node[q].last() {
                edges.push((last, node[p][i]));
            }
        }
        acyclic(count, &edges)
    }

    fn timeline_edges(&self, node: &[Vec<usize>]) -> Vec<(usize, usize)> {
        node.iter()
            .flat_map(|line| line.windows(2).map(|w| (w[0], w[1])))
            .filter(|(a, b)| a != b)
            .collect()
    }

    /// Arrow-level partial order of a synchronous MSC.
    pub fn arrow_order(&self) -> Result<ArrowOrder> {
        if let Some(&(p, i)) = self.unmatched_sends().first() {
            return Err(Error::NotSynchronous(format!(
                "unmatched send {} on {}",
                self.timelines[p][i], self.processes[p]
            )));
        }
        let (count, node) = self.contracted();
        if count > 64 {
            return Err(Error::InvalidArgument("more than 64 messages".into()));
        }
        let edges = self.timeline_edges(&node);
        if !acyclic(count, &edges) {
            return Err(Error::NotSynchronous("messages cross".into()));
        }
        let mut arrows = vec![None; count];
        for (p, line) in self.timelines.iter().enumerate() {
            for (i, a) in line.iter().enumerate() {
                if a.is_send() {
                    arrows[node[p][i]] = Some(a.arrow());
                }
            }
        }
        let mut preds = vec![0u64; count];
        for (a, b) in edges {
            preds[b] |= 1 << a;
        }
        Ok(ArrowOrder {
            arrows: arrows.into_iter().map(|a| a.expect("every node has a send")).collect(),
            preds,
        })
    }

    pub fn is_synchronous(&self) -> bool {
        self.arrow_order().is_ok()
    }

    pub fn to_dot(&self) -> String {
        use fmt::Write as _;
        let mut out = String::from("digraph msc {\n  rankdir=TB;\n");
        for (p, line) in self.timelines.iter().enumerate() {
            let _ = writeln!(
                out,
                "  subgraph \"cluster_{}\" {{ label=\"{}\";",
                self.processes[p], self.processes[p]
            );
            for (i, a) in line.iter().enumerate() {
                let _ = writeln!(out, "    e{p}_{i} [label=\"{a}\", shape=box];");
            }
            for i in 1..line.len() {
                let _ = writeln!(out, "    e{p}_{} -> e{p}_{i};", i - 1);
            }
            out.push_str("  }\n");
        }
        for (p, row) in self.source.iter().enumerate() {
            for (i, s) in row.iter().enumerate() {
                if let Some((q, k)) = s {
                    let _ = writeln!(out, "  e{q}_{k} -> e{p}_{i} [style=dashed];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for Msc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Msc{{")?;
        for (p, line) in self.timelines.iter().enumerate() {
            write!(f, " {}:", self.processes[p])?;
            for (i, a) in line.iter().enumerate() {
                match self.source[p][i] {
                    Some((q, k)) => write!(f, " {a}@{}.{k}", self.processes[q])?,
                    None => write!(f, " {a}")?,
                }
            }
            write!(f, ";")?;
        }
        write!(f, " }}")
    }
}

fn sorted(processes: &[Name]) -> Vec<Name> {
    let mut v = processes.to_vec();
    v.sort();
    v.dedup();
    v
}

fn acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        succ[a].push(b);
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    seen == n
}

/// Transitive closure of process order and send-before-receive.
#[derive(Clone, Debug)]
pub struct HappensBefore {
    events: Vec<Event>,
    offsets: Vec<usize>,
    processes: Vec<Name>,
    reach: Vec<Vec<bool>>,
}

impl HappensBefore {
    fn new(m: &Msc) -> Self {
        let mut offsets = Vec::with_capacity(m.processes.len());
        let mut total = 0;
        for line in &m.timelines {
            offsets.push(total);
            total += line.len();
        }
        let mut reach = vec![vec![false; total]; total];
        for (p, line) in m.timelines.iter().enumerate() {
            for i in 1..line.len() {
                reach[offsets[p] + i - 1][offsets[p] + i] = true;
            }
            for i in 0..line.len() {
                if let Some((q, k)) = m.source[p][i] {
                    reach[offsets[q] + k][offsets[p] + i] = true;
                }
            }
        }
        for k in 0..total {
            let via = reach[k].clone();
            for row in reach.iter_mut().filter(|row| row[k]) {
                for (r, &v) in row.iter_mut().zip(&via) {
                    *r |= v;
                }
            }
        }
        HappensBefore {
            events: m.events(),
            offsets,
            processes: m.processes.clone(),
            reach,
        }
    }

    fn index(&self, e: &Event) -> Option<usize> {
        let p = self.processes.binary_search(&e.process).ok()?;
        let i = self.offsets[p] + e.index;
        (i < self.events.len() && self.events[i] == *e).then_some(i)
    }

    /// Strict happens-before.
    pub fn precedes(&self, a: &Event, b: &Event) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.reach[i][j],
            _ => false,
        }
    }

    pub fn is_acyclic(&self) -> bool {
        (0..self.events.len()).all(|i| !self.reach[i][i])
    }

    /// All related pairs.
    pub fn pairs(&self) -> Vec<(Event, Event)> {
        let mut out = Vec::new();
        for (i, row) in self.reach.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r {
                    out.push((self.events[i].clone(), self.events[j].clone()));
                }
            }
        }
        out
    }
}

/// Depth-first enumeration of the total orders refining happens-before,
/// trying processes in universe order at each step.
pub struct Linearisations<'a> {
    msc: &'a Msc,
    model: Option<CommModel>,
    pos: Vec<usize>,
    order: Vec<(usize, usize)>,
    next_choice: Vec<usize>,
    total: usize,
    started: bool,
}

impl<'a> Linearisations<'a> {
    fn new(msc: &'a Msc, model: Option<CommModel>) -> Self {
        Linearisations {
            msc,
            model,
            pos: vec![0; msc.processes.len()],
            order: Vec::new(),
            next_choice: Vec::new(),
            total: msc.num_events(),
            started: false,
        }
    }

    fn enabled(&self, p: usize) -> bool {
        let i = self.pos[p];
        if i >= self.msc.timelines[p].len() {
            return false;
        }
        match self.msc.source[p][i] {
            None => true,
            Some((q, k)) => self.pos[q] > k,
        }
    }

    fn build(&self) -> Execution {
        let mut at = vec![Vec::new(); self.msc.processes.len()];
        for (p, line) in self.msc.timelines.iter().enumerate() {
            at[p] = vec![0; line.len()];
        }
        for (n, &(p, i)) in self.order.iter().enumerate() {
            at[p][i] = n;
        }
        let actions = self
            .order
            .iter()
            .map(|&(p, i)| self.msc.timelines[p][i].clone())
            .collect();
        let source = self
            .order
            .iter()
            .map(|&(p, i)| self.msc.source[p][i].map(|(q, k)| at[q][k]))
            .collect();
        Execution::new(actions, source).expect("linearisation of a valid MSC")
    }

    fn candidate(&mut self) -> Option<Execution> {
        loop {
            if !self.started {
                self.started = true;
                self.next_choice.push(0);
                if self.total == 0 {
                    return Some(Execution::empty());
                }
                continue;
            }
            let depth = self.next_choice.len() - 1;
            let from = self.next_choice[depth];
            let n = self.msc.processes.len();
            match (from..n).find(|&p| self.enabled(p)) {
                Some(p) if self.order.len() < self.total => {
                    self.next_choice[depth] = p + 1;
                    self.order.push((p, self.pos[p]));
                    self.pos[p] += 1;
                    self.next_choice.push(0);
                    if self.order.len() == self.total {
                        return Some(self.build());
                    }
                }
                _ => {
                    self.next_choice.pop();
                    let (p, _) = self.order.pop()?;
                    self.pos[p] -= 1;
                }
            }
        }
    }
}

impl Iterator for Linearisations<'_> {
    type Item = Execution;

    fn next(&mut self) -> Option<Execution> {
        loop {
            let e = self.candidate()?;
            if self.model.is_none_or(|m| member(m, &e)) {
                return Some(e);
            }
        }
    }
}

/// Partial order on the messages of a synchronous MSC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowOrder {
    arrows: Vec<Arrow>,
    preds: Vec<u64>,
}

impl ArrowOrder {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Bit mask of the immediate predecessors of message `i`.
    pub fn predecessors(&self, i: usize) -> u64 {
        self.preds[i]
    }

    pub fn full_mask(&self) -> u64 {
        if self.arrows.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.arrows.len()) - 1
        }
    }

    /// Messages not yet in `done` whose predecessors all are.
    pub fn enabled(&self, done: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&i| done & (1 << i) == 0 && self.preds[i] & !done == 0)
    }

    /// One arrow word of the chart, preferring lower message ids.
    pub fn linearisation(&self) -> Vec<usize> {
        self.linearisation_from(0)
    }

    /// Completes the messages in `done` to a full word; returns the rest.
    pub fn linearisation_from(&self, done: u64) -> Vec<usize> {
        let mut done = done;
        let mut out = Vec::with_capacity(self.len());
        while let Some(i) = self.enabled(done).next() {
            done |= 1 << i;
            out.push(i);
        }
        out
    }

    /// Every arrow word of the chart, in lexicographic order of message ids.
    pub fn words(&self) -> Vec<Vec<Arrow>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.words_from(0, &mut cur, &mut out);
        out
    }

    fn words_from(&self, done: u64, cur: &mut Vec<Arrow>, out: &mut Vec<Vec<Arrow>>) {
        if done == self.full_mask() {
            out.push(cur.clone());
            return;
        }
        for i in self.enabled(done).collect::<Vec<_>>() {
            cur.push(self.arrows[i].clone());
            self.words_from(done | (1 << i), cur, out);
            cur.pop();
        }
    }
}

pub fn msc_of(e: &Execution, processes: &[Name]) -> Result<Msc> {
    Msc::of_execution(e, processes)
}

pub fn happens_before(m: &Msc) -> HappensBefore {
    m.happens_before()
}

pub fn linearisations(m: &Msc, model: Option<CommModel>) -> Linearisations<'_> {
    m.linearisations(model)
}

pub fn is_prefix(a: &Msc, b: &Msc) -> bool {
    a.is_prefix_of(b)
}

pub fn concat(a: &Msc, b: &Msc) -> Result<Msc> {
    a.concat(b)
}

pub fn msc_is_rsc(m: &Msc) -> bool {
    m.is_rsc()
}

pub fn msc_equal(a: &Msc, b: &Msc) -> bool {
    a == b
}

pub fn arrows_to_msc(word: &[Arrow], processes: &[Name]) -> Result<Msc> {
    Msc::of_execution(&super::arrows_to_execution(word), processes)
}

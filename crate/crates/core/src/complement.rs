//! Complements of global types with respect to the synchronous MSCs, and
//! a bounded check of the complement property.

use crate::automata::{determinize, dual, minimize, Dfa, Nfa, StateId};
use crate::error::{Error, Result};
use crate::global::{commutation_nondeterminism, commutation_violation, product, project, GlobalType};
use crate::msc::{arrows_to_msc, Arrow, Msc};
use crate::par;
use crate::traces::{accepted_traces, TraceAlphabet};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ComplementMethod {
    Dual,
    ProductDual,
    Renunciation,
}

impl ComplementMethod {
    pub const ALL: [ComplementMethod; 3] = [
        ComplementMethod::Dual,
        ComplementMethod::ProductDual,
        ComplementMethod::Renunciation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComplementMethod::Dual => "dual",
            ComplementMethod::ProductDual => "product-dual",
            ComplementMethod::Renunciation => "renunciation",
        }
    }

    pub fn apply(self, g: &GlobalType) -> Result<GlobalType> {
        match self {
            ComplementMethod::Dual => complement_dual(g),
            ComplementMethod::ProductDual => {
                if let Some(w) = product_mismatch(g, PRODUCT_CHECK_ARROWS)? {
                    let witness = match w.is_empty() {
                        true => "the empty word".to_string(),
                        false => w.iter().map(Arrow::to_string).collect::<Vec<_>>().join(" "),
                    };
                    return Err(Error::NotSynchronouslyRealisable { witness });
                }
                complement_product_dual(g)
            }
            ComplementMethod::Renunciation => complement_renunciation(g),
        }
    }
}

impl fmt::Display for ComplementMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplementMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ComplementMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown complementation method `{s}`")))
    }
}

fn normalized(dfa: Dfa<Arrow>, g: &GlobalType) -> Result<GlobalType> {
    GlobalType::new(minimize(&dfa).trim().canonical(), g.processes().to_vec())
}

/// Complement of a commutation-closed type: swap acceptance.
pub fn complement_dual(g: &GlobalType) -> Result<GlobalType> {
    if let Some((state, first, second)) = commutation_violation(g) {
        return Err(Error::NotCommutationClosed {
            state,
            first: first.to_string(),
            second: second.to_string(),
        });
    }
    normalized(dual(g.dfa()), g)
}

/// Dual of the synchronous product of the projections. A complement
/// whenever `g` is realisable with synchronous communication, which is
/// not checked here.
pub fn complement_product_dual(g: &GlobalType) -> Result<GlobalType> {
    let p = product(&project(g), Some(g.dfa().alphabet()))?;
    normalized(dual(p.dfa()), g)
}

/// Arrows up to which [`ComplementMethod::ProductDual`] checks its precondition.
pub const PRODUCT_CHECK_ARROWS: usize = 6;

/// A word of at most `max_arrows` arrows accepted by the synchronous
/// product of the projections of `g` whose MSC `g` does not represent.
/// Without one, `g` and the product agree on all MSCs of that size.
pub fn product_mismatch(g: &GlobalType, max_arrows: usize) -> Result<Option<Vec<Arrow>>> {
    let alphabet = g.dfa().alphabet();
    let p = product(&project(g), Some(alphabet))?;
    let t = TraceAlphabet::new(alphabet.clone());
    let in_g = accepted_traces(&t, g.dfa(), max_arrows)?;
    let pd = p.dfa().with_alphabet(alphabet)?;
    let mut stack = vec![(pd.initial(), Vec::<usize>::new())];
    while let Some((s, word)) = stack.pop() {
        if pd.is_accepting(s) && !in_g.contains(&t.normal_form(&word)) {
            return Ok(Some(t.encode(&word)));
        }
        if word.len() < max_arrows {
            for (sym, next) in pd.outgoing(s) {
                let mut w = word.clone();
                w.push(sym);
                stack.push((next, w));
            }
        }
    }
    Ok(None)
}

/// States of the renunciation automaton before determinisation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum RenunciationState {
    /// Following the original type.
    Follow(StateId),
    /// Every choice of the state is abandoned for good.
    Abandoned(StateId),
    /// The choice arrow is still possible but postponed behind commuting arrows.
    Postponed(StateId, Arrow),
    /// The choice arrow will come after a non-commuting arrow.
    Blocked(StateId, Arrow),
    /// A renunciation has been confirmed.
    Accept,
}

/// The nondeterministic renunciation automaton together with the meaning
/// of each of its states.
pub fn renunciation_automaton(g: &GlobalType) -> Result<(Nfa<Arrow>, Vec<RenunciationState>)> {
    if let Some((state, first, second)) = commutation_nondeterminism(g) {
        return Err(Error::NotCommutationDeterministic {
            state,
            first: first.to_string(),
            second: second.to_string(),
        });
    }
    let d = g.dfa();
    let al = d.alphabet();
    let k = al.len();
    let mut nfa = Nfa::new(al.clone());
    let mut names = vec![RenunciationState::Follow(d.initial())];
    let mut index: HashMap<RenunciationState, StateId> = HashMap::new();
    index.insert(names[0].clone(), 0);
    let mut id = |st: RenunciationState, nfa: &mut Nfa<Arrow>, names: &mut Vec<RenunciationState>| {
        *index.entry(st.clone()).or_insert_with(|| {
            let accepting = match &st {
                RenunciationState::Follow(s) => !d.is_accepting(*s),
                RenunciationState::Abandoned(_) | RenunciationState::Accept => true,
                _ => false,
            };
            let i = nfa.add_state(accepting);
            names.push(st);
            i
        })
    };
    nfa.set_accepting(0, !d.is_accepting(d.initial()));
    let acc = id(RenunciationState::Accept, &mut nfa, &mut names);
    for b in 0..k {
        nfa.add_edge(acc, Some(b), acc);
    }
    for s in 0..d.num_states() {
        let follow = id(RenunciationState::Follow(s), &mut nfa, &mut names);
        let abandoned = id(RenunciationState::Abandoned(s), &mut nfa, &mut names);
        let choices: Vec<usize> = d.outgoing(s).map(|(a, _)| a).collect();
        for (a, t) in d.outgoing(s).collect::<Vec<_>>() {
            let target = id(RenunciationState::Follow(t), &mut nfa, &mut names);
            nfa.add_edge(follow, Some(a), target);
        }
        let others: Vec<usize> = (0..k).filter(|b| !choices.contains(b)).collect();
        for &b in &others {
            nfa.add_edge(follow, Some(b), abandoned);
            nfa.add_edge(abandoned, Some(b), abandoned);
        }
        for &a in &choices {
            let arrow = al.symbol(a).clone();
            let postponed = id(RenunciationState::Postponed(s, arrow.clone()), &mut nfa, &mut names);
            let blocked = id(RenunciationState::Blocked(s, arrow.clone()), &mut nfa, &mut names);
            for &b in &others {
                let target = if arrow.independent(al.symbol(b)) {
                    postponed
                } else {
                    blocked
                };
                nfa.add_edge(follow, Some(b), target);
                nfa.add_edge(postponed, Some(b), target);
                nfa.add_edge(blocked, Some(b), blocked);
            }
            nfa.add_edge(blocked, Some(a), acc);
        }
    }
    Ok((nfa, names))
}

/// Complement of a commutation-deterministic type, linear before
/// determinisation.
pub fn complement_renunciation(g: &GlobalType) -> Result<GlobalType> {
    let (nfa, _) = renunciation_automaton(g)?;
    normalized(determinize(&nfa), g)
}

/// The earliest occurrence, in the order of `m`, of a choice of state `s`:
/// its message index within the arrow order and the arrow.
fn first_choice(m: &Msc, g: &GlobalType, s: StateId) -> Result<Option<(usize, Arrow)>> {
    let order = m.arrow_order()?;
    let choices = g.choices(s);
    Ok(order
        .linearisation()
        .into_iter()
        .find(|&i| choices.contains(&&order.arrows()[i]))
        .map(|i| (i, order.arrows()[i].clone())))
}

/// First choice of `s` occurring in `m`, if any.
pub fn next_arrow(m: &Msc, g: &GlobalType, s: StateId) -> Result<Option<Arrow>> {
    Ok(first_choice(m, g, s)?.map(|(_, a)| a))
}

/// `m` without its next arrow, provided nothing has to happen before it.
pub fn next_msc(m: &Msc, g: &GlobalType, s: StateId) -> Result<Option<Msc>> {
    let order = m.arrow_order()?;
    let Some((i, _)) = first_choice(m, g, s)? else {
        return Ok(None);
    };
    if order.predecessors(i) != 0 {
        return Ok(None);
    }
    let rest: Vec<Arrow> = order
        .linearisation_from(1 << i)
        .into_iter()
        .map(|j| order.arrows()[j].clone())
        .collect();
    arrows_to_msc(&rest, m.processes()).map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Normal form of the offending MSC.
    pub word: Vec<Arrow>,
    pub in_type: bool,
    pub in_complement: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementReport {
    pub max_arrows: usize,
    /// Number of synchronous MSCs examined.
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl ComplementReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that every synchronous MSC with at most `max_arrows` messages
/// over the joint alphabet is represented in exactly one of `g` and `c`.
pub fn verify_complement(g: &GlobalType, c: &GlobalType, max_arrows: usize) -> Result<ComplementReport> {
    let alphabet = g.dfa().alphabet().union(c.dfa().alphabet());
    let t = TraceAlphabet::new(alphabet.clone());
    let gd = g.dfa().with_alphabet(&alphabet)?;
    let cd = c.dfa().with_alphabet(&alphabet)?;
    let (in_g, in_c) = par::join(
        || accepted_traces(&t, &gd, max_arrows),
        || accepted_traces(&t, &cd, max_arrows),
    );
    let (in_g, in_c) = (in_g?, in_c?);
    let mut checked = 0;
    let mut counterexample = None;
    for len in 0..=max_arrows {
        let firsts: Vec<usize> = if len == 0 {
            vec![usize::MAX]
        } else {
            (0..t.len()).collect()
        };
        let results = par::map(firsts, |a| {
            let mut count = 0usize;
            let mut bad = None;
            let mut word = Vec::with_capacity(len);
            if a != usize::MAX {
                word.push(a);
            }
            scan(&t, len, &mut word, &mut |w| {
                count += 1;
                let (x, y) = (in_g.contains(w), in_c.contains(w));
                if x == y {
                    bad = Some(Counterexample {
                        word: t.encode(w),
                        in_type: x,
                        in_complement: y,
                    });
                    return false;
                }
                true
            });
            (count, bad)
        });
        for (count, bad) in results {
            checked += count;
            if counterexample.is_none() {
                counterexample = bad;
            }
        }
        if counterexample.is_some() {
            break;
        }
    }
    Ok(ComplementReport {
        max_arrows,
        checked,
        counterexample,
    })
}

fn scan(t: &TraceAlphabet, len: usize, word: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if word.len() == len {
        return f(word);
    }
    for a in 0..t.len() {
        if t.extends_normal(word, a) {
            word.push(a);
            let go = scan(t, len, word, f);
            word.pop();
            if !go {
                return false;
            }
        }
    }
    true
}

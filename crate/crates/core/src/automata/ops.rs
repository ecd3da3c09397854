use super::{Dfa, Nfa, StateId, Symbol};
use crate::error::{Error, Result};
use std::collections::{HashMap, VecDeque};

/// Subset construction with ε-closure over reachable subsets only.
///
/// The empty subset is never materialised, so the result is partial
/// wherever the input gets stuck. Each state remembers its subset.
pub fn determinize<L: Symbol>(a: &Nfa<L>) -> Dfa<L> {
    let k = a.alphabet().len();
    let start = a.epsilon_closure([a.initial()]);
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut delta: Vec<Vec<Option<StateId>>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let mut row = vec![None; k];
        for (sym, slot) in row.iter_mut().enumerate() {
            let next = a.post(&subsets[i], sym);
            if next.is_empty() {
                continue;
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    index.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            *slot = Some(id);
        }
        delta.push(row);
        i += 1;
    }
    let accepting = subsets
        .iter()
        .map(|set| set.iter().any(|&s| a.is_accepting(s)))
        .collect();
    Dfa::from_parts(a.alphabet().clone(), delta, 0, accepting, Some(subsets))
}

/// Adds a non-accepting sink so that every transition is defined.
pub fn complete<L: Symbol>(a: &Dfa<L>) -> Dfa<L> {
    if a.is_complete() {
        return a.clone();
    }
    let mut out = a.clone();
    let sink = out.add_state(false);
    for s in 0..out.num_states() {
        for sym in 0..out.alphabet().len() {
            if out.next(s, sym).is_none() {
                out.set_edge(s, sym, sink);
            }
        }
    }
    out
}

/// Synchronous product; ε-moves advance one component only.
pub fn product<L: Symbol>(a: &Nfa<L>, b: &Nfa<L>) -> Result<Nfa<L>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(
            "product operands have different alphabets".into(),
        ));
    }
    let mut out = Nfa::new(a.alphabet().clone());
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(a.initial(), b.initial())];
    index.insert(pairs[0], 0);
    out.set_accepting(0, a.is_accepting(a.initial()) && b.is_accepting(b.initial()));
    let mut i = 0;
    while i < pairs.len() {
        let (x, y) = pairs[i];
        let mut moves: Vec<(Option<usize>, (StateId, StateId))> = Vec::new();
        for &(sym, x2) in a.edges(x) {
            match sym {
                None => moves.push((None, (x2, y))),
                Some(s) => {
                    for &(sym2, y2) in b.edges(y) {
                        if sym2 == Some(s) {
                            moves.push((Some(s), (x2, y2)));
                        }
                    }
                }
            }
        }
        for &(sym, y2) in b.edges(y) {
            if sym.is_none() {
                moves.push((None, (x, y2)));
            }
        }
        for (sym, pair) in moves {
            let id = match index.get(&pair) {
                Some(&id) => id,
                None => {
                    let id = out.add_state(a.is_accepting(pair.0) && b.is_accepting(pair.1));
                    index.insert(pair, id);
                    pairs.push(pair);
                    id
                }
            };
            out.add_edge(i, sym, id);
        }
        i += 1;
    }
    Ok(out)
}

/// Complement with respect to Σ*: complete, then swap accepting states.
pub fn dual<L: Symbol>(a: &Dfa<L>) -> Dfa<L> {
    let mut out = complete(a);
    for s in 0..out.num_states() {
        let acc = out.is_accepting(s);
        out.set_accepting(s, !acc);
    }
    out
}

/// Same transitions, every state accepting.
pub fn accept_completion<L: Symbol>(a: &Nfa<L>) -> Nfa<L> {
    let mut out = a.clone();
    for s in 0..out.num_states() {
        out.set_accepting(s, true);
    }
    out
}

pub fn is_empty<L: Symbol>(a: &Nfa<L>) -> bool {
    let reach = a.reachable_states();
    !(0..a.num_states()).any(|s| reach[s] && a.is_accepting(s))
}

/// Whether `L(a) ⊆ L(b)`, determinising `b` on the fly.
pub fn includes<L: Symbol>(a: &Nfa<L>, b: &Nfa<L>) -> Result<bool> {
    Ok(inclusion_witness(a, b)?.is_none())
}

/// Inclusion through the explicit complement of `b`; used to cross-check [`includes`].
pub fn includes_eager<L: Symbol>(a: &Nfa<L>, b: &Nfa<L>) -> Result<bool> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(
            "inclusion operands have different alphabets".into(),
        ));
    }
    Ok(is_empty(&product(a, &dual(&determinize(b)).to_nfa())?))
}

/// An automaton that can be determinised on the fly.
pub(crate) trait SubsetSource {
    /// The ε-closure of the initial state.
    fn start(&mut self) -> Vec<StateId>;
    /// The ε-closed set of states reachable from `set` by one `sym` step,
    /// sorted and without duplicates.
    fn post(&mut self, set: &[StateId], sym: usize) -> Vec<StateId>;
    fn is_accepting(&self, state: StateId) -> bool;
}

struct EagerSubsets<'a, L>(&'a Nfa<L>);

impl<L: Symbol> SubsetSource for EagerSubsets<'_, L> {
    fn start(&mut self) -> Vec<StateId> {
        self.0.epsilon_closure([self.0.initial()])
    }

    fn post(&mut self, set: &[StateId], sym: usize) -> Vec<StateId> {
        self.0.post(set, sym)
    }

    fn is_accepting(&self, state: StateId) -> bool {
        self.0.is_accepting(state)
    }
}

/// A shortest word in `L(a) \ L(b)`, found by exploring pairs of an
/// `a`-state and an ε-closed subset of `b`-states.
pub fn inclusion_witness<L: Symbol>(a: &Nfa<L>, b: &Nfa<L>) -> Result<Option<Vec<L>>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(
            "inclusion operands have different alphabets".into(),
        ));
    }
    Ok(inclusion_witness_with(a, &mut EagerSubsets(b)))
}

/// [`inclusion_witness`] against an automaton over the same alphabet
/// that is only explored as far as `a` drives it.
pub(crate) fn inclusion_witness_with<L: Symbol>(a: &Nfa<L>, b: &mut impl SubsetSource) -> Option<Vec<L>> {
    let mut subsets: Vec<Vec<StateId>> = Vec::new();
    let mut subset_index: HashMap<Vec<StateId>, usize> = HashMap::new();
    let mut subset_accepts: Vec<bool> = Vec::new();
    let mut post_cache: HashMap<(usize, usize), usize> = HashMap::new();
    let mut intern = |set: Vec<StateId>,
                      b: &mut dyn FnMut(StateId) -> bool,
                      subsets: &mut Vec<Vec<StateId>>,
                      subset_accepts: &mut Vec<bool>|
     -> usize {
        if let Some(&id) = subset_index.get(&set) {
            return id;
        }
        let id = subsets.len();
        subset_accepts.push(set.iter().any(|&s| b(s)));
        subset_index.insert(set.clone(), id);
        subsets.push(set);
        id
    };
    let first = b.start();
    let start = intern(first, &mut |s| b.is_accepting(s), &mut subsets, &mut subset_accepts);
    let mut visited: HashMap<(StateId, usize), usize> = HashMap::new();
    // (automaton state, subset) and the parent link with the symbol read.
    type Node = ((StateId, usize), Option<(usize, Option<usize>)>);
    let mut nodes: Vec<Node> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let root = (a.initial(), start);
    visited.insert(root, 0);
    nodes.push((root, None));
    queue.push_back(0);
    // ε-steps of `a` are explored before letter steps so the witness is shortest.
    let mut deque_front: VecDeque<usize> = VecDeque::new();
    loop {
        let n = deque_front.pop_front().or_else(|| queue.pop_front())?;
        let ((x, set), _) = nodes[n];
        if a.is_accepting(x) && !subset_accepts[set] {
            let mut word = Vec::new();
            let mut cur = n;
            while let Some((p, sym)) = nodes[cur].1 {
                if let Some(s) = sym {
                    word.push(a.alphabet().symbol(s).clone());
                }
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for &(sym, x2) in a.edges(x) {
            let set2 = match sym {
                None => set,
                Some(s) => match post_cache.get(&(set, s)) {
                    Some(&id) => id,
                    None => {
                        let next = b.post(&subsets[set], s);
                        let id = intern(next, &mut |q| b.is_accepting(q), &mut subsets, &mut subset_accepts);
                        post_cache.insert((set, s), id);
                        id
                    }
                },
            };
            let key = (x2, set2);
            if visited.contains_key(&key) {
                continue;
            }
            let id = nodes.len();
            visited.insert(key, id);
            nodes.push((key, Some((n, sym))));
            if sym.is_none() {
                deque_front.push_back(id);
            } else {
                queue.push_back(id);
            }
        }
    }
}

/// Minimal complete DFA (Moore partition refinement), numbered canonically.
pub fn minimize<L: Symbol>(a: &Dfa<L>) -> Dfa<L> {
    let c = complete(&a.reachable());
    let n = c.num_states();
    let k = c.alphabet().len();
    let mut class: Vec<usize> = (0..n).map(|s| usize::from(c.is_accepting(s))).collect();
    let mut count = {
        let mut seen = class.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    };
    loop {
        let mut sig_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let mut sig = Vec::with_capacity(k + 1);
            sig.push(class[s]);
            for sym in 0..k {
                sig.push(class[c.next(s, sym).expect("complete")]);
            }
            let len = sig_index.len();
            next[s] = *sig_index.entry(sig).or_insert(len);
        }
        let new_count = sig_index.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut delta = vec![vec![None; k]; count];
    let mut accepting = vec![false; count];
    for s in 0..n {
        accepting[class[s]] = c.is_accepting(s);
        for sym in 0..k {
            delta[class[s]][sym] = Some(class[c.next(s, sym).expect("complete")]);
        }
    }
    Dfa::from_parts(c.alphabet().clone(), delta, class[c.initial()], accepting, None).canonical()
}

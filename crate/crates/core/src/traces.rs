//! Arrow words modulo commutation of independent arrows.
//!
//! A synchronous MSC is identified with the lexicographically least arrow
//! word among its linearisations (its normal form).

use crate::automata::{Alphabet, Dfa};
use crate::error::{Error, Result};
use crate::msc::Arrow;
use std::collections::HashSet;

/// Independence matrix and ordering over an arrow alphabet.
#[derive(Clone, Debug)]
pub struct TraceAlphabet {
    alphabet: Alphabet<Arrow>,
    independent: Vec<Vec<bool>>,
}

impl TraceAlphabet {
    pub fn new(alphabet: Alphabet<Arrow>) -> Self {
        let independent = alphabet
            .iter()
            .map(|a| alphabet.iter().map(|b| a.independent(b)).collect())
            .collect();
        TraceAlphabet { alphabet, independent }
    }

    pub fn alphabet(&self) -> &Alphabet<Arrow> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn independent(&self, a: usize, b: usize) -> bool {
        self.independent[a][b]
    }

    /// Lexicographically least word equivalent to `word`.
    pub fn normal_form(&self, word: &[usize]) -> Vec<usize> {
        let mut rest = word.to_vec();
        let mut out = Vec::with_capacity(word.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for i in 0..rest.len() {
                let blocked = rest[..i].iter().any(|&x| !self.independent(x, rest[i]));
                if !blocked && best.is_none_or(|b| rest[i] < rest[b]) {
                    best = Some(i);
                }
            }
            let i = best.expect("the first letter is always minimal");
            out.push(rest.remove(i));
        }
        out
    }

    /// For `word` in normal form, whether `word · next` is in normal form.
    pub fn extends_normal(&self, word: &[usize], next: usize) -> bool {
        for &x in word.iter().rev() {
            if !self.independent(x, next) {
                return true;
            }
            if x > next {
                return false;
            }
        }
        true
    }

    pub fn encode(&self, word: &[usize]) -> Vec<Arrow> {
        word.iter().map(|&i| self.alphabet.symbol(i).clone()).collect()
    }

    pub fn decode(&self, word: &[Arrow]) -> Result<Vec<usize>> {
        word.iter()
            .map(|a| {
                self.alphabet
                    .index_of(a)
                    .ok_or_else(|| Error::UnknownSymbol(a.to_string()))
            })
            .collect()
    }

    /// Calls `f` on every normal form of length at most `max_len`, shortest
    /// first and lexicographically within a length.
    pub fn for_each_normal_form(&self, max_len: usize, mut f: impl FnMut(&[usize]) -> bool) {
        let mut word = Vec::new();
        for len in 0..=max_len {
            if !self.normal_forms_of_len(len, &mut word, &mut f) {
                return;
            }
        }
    }

    fn normal_forms_of_len(&self, len: usize, word: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if word.len() == len {
            return f(word);
        }
        for a in 0..self.len() {
            if self.extends_normal(word, a) {
                word.push(a);
                let go = self.normal_forms_of_len(len, word, f);
                word.pop();
                if !go {
                    return false;
                }
            }
        }
        true
    }

    pub fn count_normal_forms(&self, max_len: usize) -> usize {
        let mut n = 0;
        self.for_each_normal_form(max_len, |_| {
            n += 1;
            true
        });
        n
    }
}

/// Set of words over a fixed alphabet, keyed by their mixed-radix encoding.
pub struct WordSet {
    base: u128,
    dense: Option<Vec<u64>>,
    sparse: HashSet<u128>,
}

impl WordSet {
    const DENSE_LIMIT: u128 = 1 << 28;

    pub fn new(alphabet_len: usize, max_len: usize) -> Result<Self> {
        let base = alphabet_len as u128 + 1;
        let mut size: u128 = 1;
        for _ in 0..max_len {
            size = size
                .checked_mul(base)
                .ok_or_else(|| Error::InvalidArgument("word keys overflow".into()))?;
        }
        let dense = (size <= Self::DENSE_LIMIT).then(|| vec![0u64; (size as usize).div_ceil(64)]);
        Ok(WordSet {
            base,
            dense,
            sparse: HashSet::new(),
        })
    }

    fn key(&self, word: &[usize]) -> u128 {
        word.iter().fold(0u128, |k, &a| k * self.base + a as u128 + 1)
    }

    pub fn insert(&mut self, word: &[usize]) {
        let k = self.key(word);
        match &mut self.dense {
            Some(bits) => bits[(k / 64) as usize] |= 1 << (k % 64),
            None => {
                self.sparse.insert(k);
            }
        }
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        let k = self.key(word);
        match &self.dense {
            Some(bits) => bits[(k / 64) as usize] & (1 << (k % 64)) != 0,
            None => self.sparse.contains(&k),
        }
    }
}

/// Normal forms of the accepted words of length at most `max_len`.
///
/// `dfa` must be over the trace alphabet.
pub fn accepted_traces(t: &TraceAlphabet, dfa: &Dfa<Arrow>, max_len: usize) -> Result<WordSet> {
    let mut set = WordSet::new(t.len(), max_len)?;
    let mut word = Vec::new();
    collect(t, dfa, dfa.initial(), max_len, &mut word, &mut set);
    Ok(set)
}

fn collect(t: &TraceAlphabet, dfa: &Dfa<Arrow>, s: usize, max_len: usize, word: &mut Vec<usize>, set: &mut WordSet) {
    if dfa.is_accepting(s) {
        set.insert(&t.normal_form(word));
    }
    if word.len() == max_len {
        return;
    }
    for (sym, next) in dfa.outgoing(s).collect::<Vec<_>>() {
        word.push(sym);
        collect(t, dfa, next, max_len, word, set);
        word.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> TraceAlphabet {
        TraceAlphabet::new(Alphabet::new([
            Arrow::of("p", "q", "a"),
            Arrow::of("r", "s", "b"),
            Arrow::of("q", "r", "c"),
        ]))
    }

    #[test]
    fn normal_form_sorts_independent_letters() {
        let t = alphabet();
        let pq = t.decode(&[Arrow::of("p", "q", "a")]).unwrap()[0];
        let rs = t.decode(&[Arrow::of("r", "s", "b")]).unwrap()[0];
        assert_eq!(t.normal_form(&[rs, pq]), t.normal_form(&[pq, rs]));
        assert!(t.independent(pq, rs));
    }

    #[test]
    fn pruned_enumeration_matches_brute_force() {
        let t = alphabet();
        for n in 0..=5 {
            let mut brute = HashSet::new();
            let mut words = vec![Vec::new()];
            for _ in 0..n {
                words = words
                    .into_iter()
                    .flat_map(|w: Vec<usize>| {
                        (0..t.len()).map(move |a| {
                            let mut w = w.clone();
                            w.push(a);
                            w
                        })
                    })
                    .collect();
            }
            for w in &words {
                brute.insert(t.normal_form(w));
            }
            let mut pruned = HashSet::new();
            t.for_each_normal_form(n, |w| {
                if w.len() == n {
                    pruned.insert(w.to_vec());
                }
                true
            });
            assert_eq!(brute, pruned, "length {n}");
        }
    }
}

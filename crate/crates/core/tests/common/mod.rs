//! Loading of the bundled corpus and its manifest.
#![allow(dead_code)]

use chorreal_core::automata::{Alphabet, Dfa, Nfa};
use chorreal_core::checkers::RealisabilityVerdict;
use chorreal_core::global::{product, project, Cfsm, CfsmSystem, GlobalType};
use chorreal_core::models::action_alphabet;
use chorreal_core::models::CommModel;
use chorreal_core::msc::{Action, Arrow, Name};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub global: Vec<GlobalEntry>,
    #[serde(default)]
    pub subtype: Vec<SubtypeEntry>,
    #[serde(default)]
    pub system: Vec<SystemEntry>,
}

#[derive(Debug, Deserialize)]
pub struct GlobalEntry {
    pub name: String,
    pub file: String,
    pub sender_driven: bool,
    pub commutation_closed: bool,
    pub commutation_deterministic: bool,
    pub complement: Option<String>,
    pub synch: Option<String>,
    pub p2p: Option<String>,
    pub causal: Option<String>,
    pub bag: Option<String>,
    pub mailbox_deadlock: Option<bool>,
}

impl GlobalEntry {
    pub fn verdict(&self, model: CommModel) -> Option<&str> {
        match model {
            CommModel::Synch => self.synch.as_deref(),
            CommModel::P2p => self.p2p.as_deref(),
            CommModel::Causal => self.causal.as_deref(),
            CommModel::Bag => self.bag.as_deref(),
            CommModel::Mailbox => None,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct SubtypeEntry {
    pub lhs: String,
    pub rhs: String,
    pub subtype: bool,
}

#[derive(Debug, Deserialize)]
pub struct SystemEntry {
    pub name: String,
    pub file: String,
    pub p2p_orphan: bool,
    pub synch_orphan: bool,
    pub p2p_deadlock: bool,
}

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn manifest() -> Manifest {
    let src = std::fs::read_to_string(dir().join("manifest.toml")).expect("manifest readable");
    toml::from_str(&src).expect("manifest well formed")
}

pub fn read(file: &str) -> String {
    std::fs::read_to_string(dir().join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub fn load_type(file: &str) -> GlobalType {
    GlobalType::load(&read(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub fn load_system(file: &str) -> CfsmSystem {
    CfsmSystem::from_json_str(&read(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

impl Manifest {
    pub fn global(&self, name: &str) -> &GlobalEntry {
        self.global
            .iter()
            .find(|g| g.name == name)
            .unwrap_or_else(|| panic!("no entry {name}"))
    }

    pub fn load(&self, name: &str) -> GlobalType {
        load_type(&self.global(name).file)
    }
}

/// `realisable`, or the name of the failed condition.
pub fn verdict_name(v: &RealisabilityVerdict) -> String {
    match v.failed_condition {
        None => "realisable".into(),
        Some(c) => format!("{c:?}"),
    }
}

pub fn names(xs: &[&str]) -> Vec<Name> {
    let mut v: Vec<Name> = xs.iter().map(|x| Name::new(x)).collect();
    v.sort();
    v
}

pub fn arrows_over(procs: &[&str], msgs: &[&str]) -> Vec<Arrow> {
    let mut out = Vec::new();
    for p in procs {
        for q in procs.iter().filter(|q| *q != p) {
            for m in msgs {
                out.push(Arrow::of(p, q, m));
            }
        }
    }
    out
}

/// A random minimal global type using between two and `max_letters` arrows.
pub fn random_type(
    rng: &mut ChaCha8Rng,
    universe: &[Arrow],
    procs: &[Name],
    max_states: usize,
    max_letters: usize,
) -> GlobalType {
    loop {
        let k = rng.gen_range(2..=max_letters);
        let letters: Vec<&Arrow> = universe.choose_multiple(rng, k).collect();
        let n = rng.gen_range(1..=max_states);
        let mut d = Dfa::new(Alphabet::new(universe.iter().cloned()));
        for _ in 1..n {
            d.add_state(false);
        }
        for s in 0..n {
            d.set_accepting(s, rng.gen_bool(0.5));
            for l in &letters {
                if rng.gen_bool(0.4) {
                    d.set_transition(s, l, rng.gen_range(0..n)).unwrap();
                }
            }
        }
        let g = GlobalType::new(d, procs.to_vec()).unwrap().normalized();
        if g.dfa().accepting_states().next().is_some() && g.dfa().transitions().next().is_some() {
            return g;
        }
    }
}

/// The synchronous product of the projections of `g`, over its alphabet.
pub fn product_of_projections(g: &GlobalType) -> GlobalType {
    product(&project(g), Some(g.dfa().alphabet()))
        .unwrap()
        .extend_to(g.dfa().alphabet(), g.processes())
        .unwrap()
        .normalized()
}

/// A random system over `arrows`; acyclic machines only move forward.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    procs: &[&str],
    arrows: &[Arrow],
    max_states: usize,
    acyclic: bool,
) -> CfsmSystem {
    let al = action_alphabet(arrows);
    let machines = procs
        .iter()
        .map(|p| {
            let own: Vec<&Action> = al.iter().filter(|x| x.owner().as_str() == *p).collect();
            let n = rng.gen_range(1..=max_states);
            let mut nfa = Nfa::new(al.clone());
            for _ in 1..n {
                nfa.add_state(false);
            }
            for s in 0..n {
                nfa.set_accepting(s, rng.gen_bool(0.5) || (acyclic && s == n - 1));
                let targets: Vec<usize> = if acyclic {
                    (s + 1..n).collect()
                } else {
                    (0..n).collect()
                };
                for x in &own {
                    if !targets.is_empty() && rng.gen_bool(0.5) {
                        nfa.add_transition(s, Some(x), *targets.choose(rng).unwrap()).unwrap();
                    }
                }
                if !acyclic && rng.gen_bool(0.1) {
                    nfa.add_transition(s, None, rng.gen_range(0..n)).unwrap();
                }
            }
            Cfsm::new(Name::new(p), nfa).unwrap()
        })
        .collect();
    CfsmSystem::new(machines).unwrap()
}

//! Text syntax for global types.
//!
//! ```text
//! file   := header* term
//! header := ("processes" | "messages") ":" ident ("," ident)* ";"
//!         | "arrows" ":" label ("," label)* ";"
//! term   := prefix ("+" prefix)*
//! prefix := "end" | "(" term ")" | "rec" ident "." term | ident | label ";" prefix
//! label  := ident "->" ident ":" ident
//! ```
//!
//! Comments run from `#` or `//` to the end of the line.

use super::GlobalType;
use crate::automata::{determinize, minimize, Alphabet, Nfa, StateId};
use crate::error::{Error, Result};
use crate::msc::{Arrow, Name};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Arrow,
    Colon,
    Semi,
    Comma,
    Plus,
    Dot,
    LParen,
    RParen,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l, cl) = (line, col);
        let mut push = |tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: l, col: cl });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            c if Name::is_valid(&c.to_string()) => {
                let start = i;
                while i < chars.len() && Name::is_valid(&chars[i].to_string()) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(word),
                    line: l,
                    col: cl,
                });
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[derive(Clone, Debug)]
enum Term {
    End,
    Prefix(Arrow, Box<Term>),
    Choice(Vec<Term>),
    Rec(String, Box<Term>),
    Var(String, usize, usize),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    used: Vec<(Arrow, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            self.error(format!("expected {what}, found {}", describe(&self.peek().tok)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize)> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let t = self.bump();
                Ok((s, t.line, t.col))
            }
            other => self.error(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn label(&mut self) -> Result<(Arrow, usize, usize)> {
        let (p, line, col) = self.ident("a sender")?;
        self.expect(Tok::Arrow, "`->`")?;
        let (q, _, _) = self.ident("a receiver")?;
        self.expect(Tok::Colon, "`:`")?;
        let (m, _, _) = self.ident("a message")?;
        if p == q {
            return Err(Error::SelfSend {
                label: format!("{p}->{q}:{m}"),
                line,
                col,
            });
        }
        Ok((Arrow::of(&p, &q, &m), line, col))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut v = vec![item(self)?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            v.push(item(self)?);
        }
        self.expect(Tok::Semi, "`;` after header")?;
        Ok(v)
    }

    fn term(&mut self) -> Result<Term> {
        let mut branches = vec![self.prefix()?];
        while self.peek().tok == Tok::Plus {
            self.bump();
            branches.push(self.prefix()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().expect("one branch")
        } else {
            Term::Choice(branches)
        })
    }

    fn prefix(&mut self) -> Result<Term> {
        match self.peek().tok.clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(w) if w == "end" => {
                self.bump();
                Ok(Term::End)
            }
            Tok::Ident(w) if w == "rec" && self.peek_at(1) != &Tok::Arrow => {
                self.bump();
                let (x, _, _) = self.ident("a recursion variable")?;
                self.expect(Tok::Dot, "`.` after the recursion variable")?;
                Ok(Term::Rec(x, Box::new(self.term()?)))
            }
            Tok::Ident(_) if self.peek_at(1) == &Tok::Arrow => {
                let (a, line, col) = self.label()?;
                self.used.push((a.clone(), line, col));
                self.expect(Tok::Semi, "`;` after a label")?;
                Ok(Term::Prefix(a, Box::new(self.prefix()?)))
            }
            Tok::Ident(x) => {
                let t = self.bump();
                Ok(Term::Var(x, t.line, t.col))
            }
            other => self.error(format!("expected a global type, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Arrow => "`->`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Dot => "`.`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Eof => "end of input".into(),
    }
}

struct Compiler<'a> {
    nfa: Nfa<Arrow>,
    alphabet: &'a Alphabet<Arrow>,
    env: Vec<(String, StateId)>,
}

impl Compiler<'_> {
    fn compile(&mut self, t: &Term) -> Result<StateId> {
        match t {
            Term::End => Ok(self.nfa.add_state(true)),
            Term::Prefix(a, rest) => {
                let s = self.nfa.add_state(false);
                let r = self.compile(rest)?;
                let sym = self.alphabet.index_of(a).expect("labels checked against the alphabet");
                self.nfa.add_edge(s, Some(sym), r);
                Ok(s)
            }
            Term::Choice(ts) => {
                let s = self.nfa.add_state(false);
                for t in ts {
                    let e = self.compile(t)?;
                    self.nfa.add_edge(s, None, e);
                }
                Ok(s)
            }
            Term::Rec(x, body) => {
                let s = self.nfa.add_state(false);
                self.env.push((x.clone(), s));
                let b = self.compile(body);
                self.env.pop();
                self.nfa.add_edge(s, None, b?);
                Ok(s)
            }
            Term::Var(x, line, col) => self
                .env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|&(_, s)| s)
                .ok_or_else(|| Error::UnboundVariable {
                    name: x.clone(),
                    line: *line,
                    col: *col,
                }),
        }
    }
}

/// Parses the text syntax into a minimal, trimmed global type.
pub fn parse_global_type(src: &str) -> Result<GlobalType> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        used: Vec::new(),
    };
    let mut processes: Option<Vec<(String, usize, usize)>> = None;
    let mut messages: Vec<String> = Vec::new();
    let mut arrows: Option<Vec<(Arrow, usize, usize)>> = None;
    while let (Tok::Ident(w), Tok::Colon) = (&p.peek().tok, p.peek_at(1)) {
        let header = w.clone();
        match header.as_str() {
            "processes" => {
                p.bump();
                p.bump();
                processes = Some(p.list(|p| p.ident("a process name"))?);
            }
            "messages" => {
                p.bump();
                p.bump();
                messages.extend(p.list(|p| p.ident("a message name"))?.into_iter().map(|m| m.0));
            }
            "arrows" => {
                p.bump();
                p.bump();
                arrows = Some(p.list(Parser::label)?);
            }
            other => return p.error(format!("unknown header `{other}`")),
        }
    }
    let term = p.term()?;
    if p.peek().tok != Tok::Eof {
        return p.error(format!("unexpected {} after the global type", describe(&p.peek().tok)));
    }

    let mentioned = p.used.iter().chain(arrows.iter().flatten());
    let universe: BTreeSet<Name> = match &processes {
        Some(ps) => ps.iter().map(|(s, _, _)| Name::new(s)).collect(),
        None => mentioned
            .clone()
            .flat_map(|(a, _, _)| [a.sender().clone(), a.receiver().clone()])
            .collect(),
    };
    for (a, line, col) in mentioned {
        for q in [a.sender(), a.receiver()] {
            if !universe.contains(q) {
                return Err(Error::UnknownProcess(format!("{q} (line {line}, column {col})")));
            }
        }
    }
    let alphabet = match &arrows {
        Some(list) => {
            let al = Alphabet::new(list.iter().map(|(a, _, _)| a.clone()));
            if let Some((a, line, col)) = p.used.iter().find(|(a, _, _)| !al.contains(a)) {
                return Err(Error::UnknownSymbol(format!(
                    "{a} (line {line}, column {col}) is not among the declared arrows"
                )));
            }
            al
        }
        None => {
            let mut msgs: BTreeSet<Name> = messages.iter().map(|m| Name::new(m)).collect();
            msgs.extend(p.used.iter().map(|(a, _, _)| a.message().clone()));
            let mut all = Vec::new();
            for s in &universe {
                for r in &universe {
                    if s != r {
                        for m in &msgs {
                            all.push(Arrow::new(s.clone(), r.clone(), m.clone())?);
                        }
                    }
                }
            }
            Alphabet::new(all)
        }
    };

    let mut c = Compiler {
        nfa: Nfa::new(alphabet.clone()),
        alphabet: &alphabet,
        env: Vec::new(),
    };
    let root = c.compile(&term)?;
    let mut nfa = c.nfa;
    nfa.set_initial(root);
    let dfa = minimize(&determinize(&nfa)).trim().canonical();
    GlobalType::new(dfa, universe.into_iter().collect())
}

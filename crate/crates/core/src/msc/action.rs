use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Identifier of a process or a message label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Identifiers are non-empty runs of letters, digits, `_` and `'`.
    pub fn is_valid(s: &str) -> bool {
        !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
    }

    fn parse_checked(s: &str, whole: &str) -> Result<Self> {
        let s = s.trim();
        if Name::is_valid(s) {
            Ok(Name::new(s))
        } else {
            Err(Error::BadLabel(whole.to_string()))
        }
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Name::parse_checked(&s, &s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Kind {
    Send,
    Receive,
}

/// A send `p->q!m` or a receive `p->q?m` of message `m` from `p` to `q`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    kind: Kind,
    sender: Name,
    receiver: Name,
    message: Name,
}

impl Action {
    pub fn new(kind: Kind, sender: Name, receiver: Name, message: Name) -> Result<Self> {
        if sender == receiver {
            return Err(Error::InvalidArgument(format!(
                "action with identical sender and receiver `{sender}`"
            )));
        }
        Ok(Action {
            kind,
            sender,
            receiver,
            message,
        })
    }

    /// Panics when `sender == receiver`.
    pub fn send(sender: &str, receiver: &str, message: &str) -> Self {
        Action::new(Kind::Send, sender.into(), receiver.into(), message.into()).expect("valid action")
    }

    /// Panics when `sender == receiver`.
    pub fn receive(sender: &str, receiver: &str, message: &str) -> Self {
        Action::new(Kind::Receive, sender.into(), receiver.into(), message.into()).expect("valid action")
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_send(&self) -> bool {
        self.kind == Kind::Send
    }

    pub fn is_receive(&self) -> bool {
        self.kind == Kind::Receive
    }

    pub fn sender(&self) -> &Name {
        &self.sender
    }

    pub fn receiver(&self) -> &Name {
        &self.receiver
    }

    pub fn message(&self) -> &Name {
        &self.message
    }

    /// The process performing the action.
    pub fn owner(&self) -> &Name {
        match self.kind {
            Kind::Send => &self.sender,
            Kind::Receive => &self.receiver,
        }
    }

    /// The other endpoint of the communication.
    pub fn peer(&self) -> &Name {
        match self.kind {
            Kind::Send => &self.receiver,
            Kind::Receive => &self.sender,
        }
    }

    pub fn arrow(&self) -> Arrow {
        Arrow {
            sender: self.sender.clone(),
            receiver: self.receiver.clone(),
            message: self.message.clone(),
        }
    }

    /// The receive matching this send, or the send matching this receive.
    pub fn dual(&self) -> Action {
        Action {
            kind: match self.kind {
                Kind::Send => Kind::Receive,
                Kind::Receive => Kind::Send,
            },
            ..self.clone()
        }
    }

    /// Same sender and receiver.
    pub fn same_channel(&self, other: &Action) -> bool {
        self.sender == other.sender && self.receiver == other.receiver
    }

    /// Same sender, receiver and message.
    pub fn same_message(&self, other: &Action) -> bool {
        self.sender == other.sender && self.receiver == other.receiver && self.message == other.message
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.is_send() { '!' } else { '?' };
        write!(f, "{}->{}{}{}", self.sender, self.receiver, mark, self.message)
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (sender, rest) = s.split_once("->").ok_or_else(|| Error::BadLabel(s.into()))?;
        let (kind, idx) = match (rest.find('!'), rest.find('?')) {
            (Some(i), None) => (Kind::Send, i),
            (None, Some(i)) => (Kind::Receive, i),
            _ => return Err(Error::BadLabel(s.into())),
        };
        let receiver = Name::parse_checked(&rest[..idx], s)?;
        let message = Name::parse_checked(&rest[idx + 1..], s)?;
        Action::new(kind, Name::parse_checked(sender, s)?, receiver, message).map_err(|_| Error::BadLabel(s.into()))
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One synchronous exchange `p->q:m`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    sender: Name,
    receiver: Name,
    message: Name,
}

impl Arrow {
    pub fn new(sender: Name, receiver: Name, message: Name) -> Result<Self> {
        if sender == receiver {
            return Err(Error::InvalidArgument(format!("self-send arrow on `{sender}`")));
        }
        Ok(Arrow {
            sender,
            receiver,
            message,
        })
    }

    /// Panics when `sender == receiver`.
    pub fn of(sender: &str, receiver: &str, message: &str) -> Self {
        Arrow::new(sender.into(), receiver.into(), message.into()).expect("valid arrow")
    }

    pub fn sender(&self) -> &Name {
        &self.sender
    }

    pub fn receiver(&self) -> &Name {
        &self.receiver
    }

    pub fn message(&self) -> &Name {
        &self.message
    }

    pub fn involves(&self, p: &Name) -> bool {
        &self.sender == p || &self.receiver == p
    }

    /// Arrows over disjoint process pairs commute.
    pub fn independent(&self, other: &Arrow) -> bool {
        !self.involves(&other.sender) && !self.involves(&other.receiver)
    }

    pub fn send(&self) -> Action {
        Action {
            kind: Kind::Send,
            sender: self.sender.clone(),
            receiver: self.receiver.clone(),
            message: self.message.clone(),
        }
    }

    pub fn receive(&self) -> Action {
        Action {
            kind: Kind::Receive,
            ..self.send()
        }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{}", self.sender, self.receiver, self.message)
    }
}

impl fmt::Debug for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Arrow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (sender, rest) = s.split_once("->").ok_or_else(|| Error::BadLabel(s.into()))?;
        let (receiver, message) = rest.split_once(':').ok_or_else(|| Error::BadLabel(s.into()))?;
        Arrow::new(
            Name::parse_checked(sender, s)?,
            Name::parse_checked(receiver, s)?,
            Name::parse_checked(message, s)?,
        )
        .map_err(|_| Error::BadLabel(s.into()))
    }
}

impl Serialize for Arrow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Arrow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Sorted, duplicate-free list of process names.
pub fn universe<'a>(names: impl IntoIterator<Item = &'a str>) -> Vec<Name> {
    let mut v: Vec<Name> = names.into_iter().map(Name::new).collect();
    v.sort();
    v.dedup();
    v
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite sequence of naturals; the empty sequence is the root.
///
/// Ordering is lexicographic with prefixes first, which is the order used for
/// every "leftmost" choice in the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Node(Vec<u64>);

impl Node {
    pub fn root() -> Self {
        Node(Vec::new())
    }

    pub fn new(entries: Vec<u64>) -> Self {
        Node(entries)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, entry: u64) -> Node {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(entry);
        Node(v)
    }

    pub fn parent(&self) -> Option<Node> {
        if self.0.is_empty() {
            None
        } else {
            Some(Node(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// `self ⊆ other` as sequences.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_proper_prefix_of(&self, other: &Node) -> bool {
        other.0.len() > self.0.len() && self.is_prefix_of(other)
    }

    pub fn comparable(&self, other: &Node) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// The initial segment of length `len` (the whole node if shorter).
    pub fn truncated(&self, len: usize) -> Node {
        Node(self.0[..len.min(self.0.len())].to_vec())
    }

    /// All initial segments, shortest first, including `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..=self.0.len()).map(move |k| Node(self.0[..k].to_vec()))
    }

    /// Length of the longest common prefix.
    pub fn meet_len(&self, other: &Node) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Compact text: binary nodes as a bit string, others dot-separated;
    /// the root is `ε`.
    pub fn compact(&self) -> String {
        if self.0.is_empty() {
            "ε".to_string()
        } else if self.0.iter().all(|&e| e < 2) {
            self.0.iter().map(|e| e.to_string()).collect()
        } else {
            self.0
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl From<Vec<u64>> for Node {
    fn from(v: Vec<u64>) -> Self {
        Node(v)
    }
}

impl From<&[u64]> for Node {
    fn from(v: &[u64]) -> Self {
        Node(v.to_vec())
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `""`/`"ε"` (root), bit strings like `"0110"`, and dot- or
/// comma-separated entries like `"3.5.7"`.
impl FromStr for Node {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "<>" {
            return Ok(Node::root());
        }
        let s = s.trim_start_matches('<').trim_end_matches('>');
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad entry {t:?}: {e}"));
        if s.contains('.') || s.contains(',') {
            s.split(['.', ',']).map(parse).collect::<Result<_, _>>().map(Node)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(u64::from).ok_or(format!("bad digit {c:?}")))
                .collect::<Result<_, _>>()
                .map(Node)
        }
    }
}

/// Alphabet width of a tree: binary, or successors drawn from ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Width {
    Binary,
    Omega,
}

impl Width {
    pub fn admits(&self, entry: u64) -> bool {
        match self {
            Width::Binary => entry < 2,
            Width::Omega => true,
        }
    }
}

impl Serialize for Width {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Width::Binary => s.serialize_u64(2),
            Width::Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Width {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(2) => Ok(Width::Binary),
            Raw::Name(n) if n == "omega" => Ok(Width::Omega),
            Raw::Num(n) => Err(serde::de::Error::custom(format!(
                "width must be 2 or \"omega\", got {n}"
            ))),
            Raw::Name(n) => Err(serde::de::Error::custom(format!(
                "width must be 2 or \"omega\", got {n:?}"
            ))),
        }
    }
}

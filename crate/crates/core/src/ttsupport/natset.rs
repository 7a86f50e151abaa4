use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A finite or cofinite subset of `ℕ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NatSet {
    Finite(BTreeSet<u64>),
    /// `ℕ` minus the listed elements.
    Cofinite(BTreeSet<u64>),
}

impl NatSet {
    pub fn empty() -> Self {
        NatSet::Finite(BTreeSet::new())
    }

    pub fn all() -> Self {
        NatSet::Cofinite(BTreeSet::new())
    }

    /// `{n : n >= k}`.
    pub fn at_least(k: u64) -> Self {
        NatSet::Cofinite((0..k).collect())
    }

    pub fn all_but(s: impl IntoIterator<Item = u64>) -> Self {
        NatSet::Cofinite(s.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, NatSet::Finite(s) if s.is_empty())
    }

    pub fn is_all(&self) -> bool {
        matches!(self, NatSet::Cofinite(s) if s.is_empty())
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, NatSet::Cofinite(_))
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            NatSet::Finite(s) => s.contains(&n),
            NatSet::Cofinite(s) => !s.contains(&n),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            NatSet::Finite(s) => NatSet::Cofinite(s.clone()),
            NatSet::Cofinite(s) => NatSet::Finite(s.clone()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use NatSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Cofinite(c - f),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.intersection(&other.complement()).is_empty()
    }

    pub fn render(&self, ascii: bool) -> String {
        let list = |s: &BTreeSet<u64>| {
            s.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        };
        let nat = if ascii { "N" } else { "ℕ" };
        match self {
            NatSet::Finite(s) if s.is_empty() => "{}".into(),
            NatSet::Finite(s) => format!("{{{}}}", list(s)),
            NatSet::Cofinite(s) if s.is_empty() => nat.into(),
            NatSet::Cofinite(s) if s.iter().copied().eq(0..s.len() as u64) => {
                format!("{{n {} {}}}", if ascii { ">=" } else { "≥" }, s.len())
            }
            NatSet::Cofinite(s) => format!("{nat} \\ {{{}}}", list(s)),
        }
    }
}

impl fmt::Display for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.alternate()))
    }
}

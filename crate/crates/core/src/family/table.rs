use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::abgroup::{self, epi_exists, FinAbGroup};
use crate::error::{Error, Result};

/// A finite family given by its objects and epimorphism relation.
///
/// `epis` lists pairs `[a, b]` meaning `a ≫ b`. Reflexive pairs are implicit;
/// the listed relation must already be transitive. Optional metadata:
///
/// * `groups`: abelian identification of every object;
/// * `out_orders`: `|Out(G)|` per object;
/// * `orbits`: `orbits[K][G]`, the number of `Out(G)`-orbits on `Epi(K, G)`;
/// * `quotients`: names of all quotient classes of each object, which may
///   include groups outside the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionalTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub objects: Vec<String>,
    #[serde(default)]
    pub epis: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<BTreeMap<String, FinAbGroup>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_orders: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<BTreeMap<String, BTreeMap<String, u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotients: Option<BTreeMap<String, Vec<String>>>,
}

impl ExtensionalTable {
    /// The table of all quotients of an abelian group, with full metadata.
    pub fn from_quotients_of(g: &FinAbGroup) -> Self {
        let groups_list = abgroup::quotient_classes(g);
        let objects: Vec<String> = groups_list.iter().map(FinAbGroup::short_name).collect();
        let mut epis = Vec::new();
        let mut orbits = BTreeMap::new();
        let mut quotients = BTreeMap::new();
        for (a, ga) in objects.iter().zip(&groups_list) {
            let mut row = BTreeMap::new();
            for (b, gb) in objects.iter().zip(&groups_list) {
                if epi_exists(ga, gb) {
                    if a != b {
                        epis.push((a.clone(), b.clone()));
                    }
                    let c = abgroup::quotient_count(ga, gb);
                    row.insert(b.clone(), u64::try_from(c).expect("small count"));
                }
            }
            orbits.insert(a.clone(), row);
            quotients.insert(
                a.clone(),
                abgroup::quotient_classes(ga)
                    .iter()
                    .map(FinAbGroup::short_name)
                    .collect(),
            );
        }
        let out_orders = objects
            .iter()
            .zip(&groups_list)
            .map(|(a, ga)| {
                let n = u64::try_from(abgroup::aut_order(ga)).expect("small automorphism group");
                (a.clone(), n)
            })
            .collect();
        Self {
            name: Some(format!("quotients of {}", g.short_name())),
            groups: Some(objects.iter().cloned().zip(groups_list).collect()),
            objects,
            epis,
            out_orders: Some(out_orders),
            orbits: Some(orbits),
            quotients: Some(quotients),
        }
    }
}

/// Validated, indexed form of an [`ExtensionalTable`].
#[derive(Debug, Clone)]
pub struct TableIndex {
    objects: Vec<String>,
    index: HashMap<String, usize>,
    epi: Vec<Vec<bool>>,
    groups: Option<Vec<FinAbGroup>>,
    out_orders: Option<Vec<u64>>,
    orbits: Option<Vec<Vec<u64>>>,
    quotients: Option<Vec<Vec<String>>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidPreorder(msg.into())
}

impl TableIndex {
    pub fn build(t: &ExtensionalTable) -> Result<Self> {
        let n = t.objects.len();
        if n == 0 {
            return Err(bad("a table needs at least one object"));
        }
        let mut index = HashMap::new();
        for (i, o) in t.objects.iter().enumerate() {
            if index.insert(o.clone(), i).is_some() {
                return Err(bad(format!("duplicate object {o}")));
            }
        }
        let look = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| bad(format!("unknown object {s}")))
        };
        let mut epi = vec![vec![false; n]; n];
        for (i, row) in epi.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &t.epis {
            epi[look(a)?][look(b)?] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && epi[i][j] && epi[j][i] {
                    return Err(bad(format!(
                        "{} and {} dominate each other but are distinct objects",
                        t.objects[i], t.objects[j]
                    )));
                }
                if !epi[i][j] {
                    continue;
                }
                for k in 0..n {
                    if epi[j][k] && !epi[i][k] {
                        return Err(bad(format!(
                            "not transitive: {} >> {} >> {} but {} >> {} is missing",
                            t.objects[i], t.objects[j], t.objects[k], t.objects[i], t.objects[k]
                        )));
                    }
                }
            }
        }
        let per_object = |what: &str, keys: Vec<&String>| -> Result<()> {
            for k in &keys {
                look(k).map_err(|_| bad(format!("{what} mentions unknown object {k}")))?;
            }
            if keys.len() != n {
                return Err(bad(format!("{what} must cover every object")));
            }
            Ok(())
        };
        let groups = match &t.groups {
            None => None,
            Some(m) => {
                per_object("groups", m.keys().collect())?;
                let gs: Vec<FinAbGroup> = t.objects.iter().map(|o| m[o].clone()).collect();
                for i in 0..n {
                    for j in 0..n {
                        if i != j && gs[i] == gs[j] {
                            return Err(bad(format!(
                                "{} and {} are isomorphic",
                                t.objects[i], t.objects[j]
                            )));
                        }
                        if epi_exists(&gs[i], &gs[j]) != epi[i][j] {
                            return Err(bad(format!(
                                "epi table disagrees with the groups at ({}, {})",
                                t.objects[i], t.objects[j]
                            )));
                        }
                    }
                }
                Some(gs)
            }
        };
        let out_orders = match &t.out_orders {
            None => None,
            Some(m) => {
                per_object("out_orders", m.keys().collect())?;
                if m.values().any(|&v| v == 0) {
                    return Err(bad("out_orders must be positive"));
                }
                Some(t.objects.iter().map(|o| m[o]).collect())
            }
        };
        let orbits = match &t.orbits {
            None => None,
            Some(m) => {
                let mut out = vec![vec![0u64; n]; n];
                for (k, row) in m {
                    let i = look(k)?;
                    for (g, &c) in row {
                        out[i][look(g)?] = c;
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        if (out[i][j] > 0) != epi[i][j] {
                            return Err(Error::InconsistentAction(format!(
                                "orbit count for ({}, {}) contradicts the epi table",
                                t.objects[i], t.objects[j]
                            )));
                        }
                    }
                    if out[i][i] != 1 {
                        return Err(Error::InconsistentAction(format!(
                            "{} must have exactly one orbit of epimorphisms onto itself",
                            t.objects[i]
                        )));
                    }
                }
                Some(out)
            }
        };
        let quotients = match &t.quotients {
            None => None,
            Some(m) => {
                per_object("quotients", m.keys().collect())?;
                Some(t.objects.iter().map(|o| m[o].clone()).collect())
            }
        };
        Ok(Self {
            objects: t.objects.clone(),
            index,
            epi,
            groups,
            out_orders,
            orbits,
            quotients,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn epi(&self, i: usize, j: usize) -> bool {
        self.epi[i][j]
    }

    pub fn group(&self, i: usize) -> Option<&FinAbGroup> {
        self.groups.as_ref().map(|g| &g[i])
    }

    pub fn name_of_group(&self, g: &FinAbGroup) -> Option<&str> {
        let gs = self.groups.as_ref()?;
        gs.iter()
            .position(|x| x == g)
            .map(|i| self.objects[i].as_str())
    }

    pub fn require_groups(&self) -> Result<&[FinAbGroup]> {
        self.groups
            .as_deref()
            .ok_or_else(|| Error::NeedsMetadata("groups".into()))
    }

    /// The trivial object: the one named `1`, or whose group is trivial.
    pub fn unit(&self) -> Option<usize> {
        if let Some(gs) = &self.groups {
            return gs.iter().position(FinAbGroup::is_trivial);
        }
        self.index_of("1")
    }

    /// Only identities among the epimorphisms.
    pub fn is_groupoid(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| i == j || !self.epi[i][j]))
    }

    pub fn out_order(&self, i: usize) -> Result<u64> {
        if let Some(o) = &self.out_orders {
            return Ok(o[i]);
        }
        if let Some(g) = self.group(i) {
            return u64::try_from(abgroup::aut_order(g))
                .map_err(|_| Error::Unsupported("automorphism group too large".into()));
        }
        Err(Error::NeedsMetadata(format!("out_orders for {}", self.objects[i])))
    }

    /// Number of `Out(G)`-orbits on `Epi(K, G)` for `K = objects[k]`, `G = objects[g]`.
    pub fn orbit_count(&self, k: usize, g: usize) -> Result<u64> {
        if let Some(o) = &self.orbits {
            return Ok(o[k][g]);
        }
        if let (Some(a), Some(b)) = (self.group(k), self.group(g)) {
            return u64::try_from(abgroup::quotient_count(a, b))
                .map_err(|_| Error::Unsupported("orbit count too large".into()));
        }
        Err(Error::NeedsMetadata(format!(
            "orbits for ({}, {})",
            self.objects[k], self.objects[g]
        )))
    }

    pub fn quotients_of(&self, i: usize) -> Option<Vec<String>> {
        if let Some(q) = &self.quotients {
            return Some(q[i].clone());
        }
        let g = self.group(i)?;
        Some(
            abgroup::quotient_classes(g)
                .iter()
                .map(|h| {
                    self.name_of_group(h)
                        .map_or_else(|| h.short_name(), str::to_string)
                })
                .collect(),
        )
    }
}

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::linalg::{q, Matrix};
use crate::abgroup::{aut_order, oracle::oracle_subgroup_type_counts, FinAbGroup};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Member};
use crate::ttsupport::ObjectExpr;

const ORDER_CAP: u128 = 1 << 12;

/// Graded dimensions of a complex at one point.
pub type Poincare = BTreeMap<i64, BigUint>;

/// Pointwise homology of expressions over the elementary abelian family, rank
/// by rank up to `max_rank`. Uses minimal models: at rank `n`, `e_{G,V}` is
/// `V^{c(n, s)}` in degree 0 and the augmentation is the all-ones row.
/// Quotient counts come from explicit subgroup enumeration.
#[derive(Debug, Clone)]
pub struct RankWindow {
    family: Family,
    p: u64,
    max_rank: usize,
    counts: Vec<Vec<u64>>,
}

impl RankWindow {
    pub fn new(family: &Family, max_rank: usize) -> Result<Self> {
        let FamilySpec::ElementaryAbelian { p } = family.spec() else {
            return Err(Error::Unsupported(format!(
                "rank windows need an elementary abelian family, not {}",
                family.name()
            )));
        };
        let p = *p;
        let counts = (0..=max_rank)
            .map(|n| {
                let g = FinAbGroup::elementary(p, n)?;
                let types = oracle_subgroup_type_counts(&g, ORDER_CAP)?;
                (0..=n)
                    .map(|s| Ok(types.get(&FinAbGroup::elementary(p, n - s)?).copied().unwrap_or(0)))
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family: family.clone(),
            p,
            max_rank,
            counts,
        })
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// Number of quotients of `(ℤ/p)^n` isomorphic to `(ℤ/p)^s`.
    pub fn quotient_count(&self, n: usize, s: usize) -> u64 {
        if s > n {
            0
        } else {
            self.counts[n][s]
        }
    }

    fn rank_of(&self, g: &Member) -> Result<usize> {
        match self.family.resolve(g)? {
            Member::Ab(h) => Ok(h.rank()),
            Member::Named(n) => Err(Error::UnsupportedGroup(n)),
        }
    }

    /// Graded homology dimensions of `x` at rank `n`.
    pub fn homology(&self, x: &ObjectExpr, n: usize) -> Result<Poincare> {
        if n > self.max_rank {
            return Err(Error::CapExceeded {
                needed: n as u128,
                cap: self.max_rank as u128,
            });
        }
        let single = |d: BigUint| {
            let mut m = Poincare::new();
            if !d.is_zero() {
                m.insert(0, d);
            }
            m
        };
        Ok(match x {
            ObjectExpr::Zero => Poincare::new(),
            ObjectExpr::Unit => single(BigUint::from(1u8)),
            ObjectExpr::Gen(g) => {
                let s = self.rank_of(g)?;
                let out = aut_order(&FinAbGroup::elementary(self.p, s)?);
                single(BigUint::from(self.quotient_count(n, s)) * out)
            }
            ObjectExpr::GenTwisted(g, d) => {
                let s = self.rank_of(g)?;
                single(BigUint::from(self.quotient_count(n, s)) * BigUint::from(*d))
            }
            ObjectExpr::Chi(_) => {
                return Err(Error::Unsupported("χ objects over the elementary abelian family".into()))
            }
            ObjectExpr::AugCone(g) => {
                let c = self.quotient_count(n, self.rank_of(g)?) as usize;
                let ones = Matrix::from_fn(1, c, |_, _| q(1));
                let r = ones.rank();
                let mut m = Poincare::new();
                if c > r {
                    m.insert(1, BigUint::from(c - r));
                }
                if r == 0 {
                    m.insert(0, BigUint::from(1u8));
                }
                m
            }
            ObjectExpr::Shift(y) => self
                .homology(y, n)?
                .into_iter()
                .map(|(d, v)| (d + 1, v))
                .collect(),
            ObjectExpr::Sum(a, b) => {
                let mut m = self.homology(a, n)?;
                for (d, v) in self.homology(b, n)? {
                    *m.entry(d).or_insert_with(BigUint::zero) += v;
                }
                m
            }
            ObjectExpr::Tensor(a, b) => {
                let (ha, hb) = (self.homology(a, n)?, self.homology(b, n)?);
                let mut m = Poincare::new();
                for (i, x) in &ha {
                    for (j, y) in &hb {
                        *m.entry(i + j).or_insert_with(BigUint::zero) += x * y;
                    }
                }
                m
            }
        })
    }

    /// Ranks in the window where `x` has nonzero homology.
    pub fn support(&self, x: &ObjectExpr) -> Result<BTreeSet<u64>> {
        let mut out = BTreeSet::new();
        for n in 0..=self.max_rank {
            if !self.homology(x, n)?.is_empty() {
                out.insert(n as u64);
            }
        }
        Ok(out)
    }

    pub fn euler_characteristic(&self, x: &ObjectExpr, n: usize) -> Result<i128> {
        Ok(self
            .homology(x, n)?
            .iter()
            .map(|(d, v)| {
                let v = v.to_i128().unwrap_or(i128::MAX);
                if d.rem_euclid(2) == 0 {
                    v
                } else {
                    -v
                }
            })
            .sum())
    }
}

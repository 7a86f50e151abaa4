use num_traits::One;

use super::category::EpiCategory;
use super::linalg::{q, Matrix};
use crate::error::{Error, Result};

/// A finite-dimensional rational representation of `Out(G)`, given by one
/// matrix per automorphism in the category's enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutModule {
    object: usize,
    dim: usize,
    action: Vec<Matrix>,
    label: String,
}

impl OutModule {
    /// Validates that `action` is a homomorphism `Out(G) → GL(dim)`.
    pub fn from_action(cat: &EpiCategory, g: usize, dim: usize, action: Vec<Matrix>) -> Result<Self> {
        Self::checked(cat, g, dim, action, "custom")
    }

    fn checked(cat: &EpiCategory, g: usize, dim: usize, action: Vec<Matrix>, label: &str) -> Result<Self> {
        let n = cat.out_order(g);
        if action.len() != n {
            return Err(Error::InconsistentAction(format!(
                "expected {n} matrices, got {}",
                action.len()
            )));
        }
        if action.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::InconsistentAction(format!("matrices must be {dim}x{dim}")));
        }
        if action[cat.identity(g)] != Matrix::identity(dim) {
            return Err(Error::InconsistentAction("identity acts nontrivially".into()));
        }
        for s in 0..n {
            for t in 0..n {
                let st = cat.compose(g, g, g, t, s);
                if action[st] != action[s].mul(&action[t]) {
                    return Err(Error::InconsistentAction(format!(
                        "action is not multiplicative at ({s}, {t})"
                    )));
                }
            }
        }
        Ok(Self {
            object: g,
            dim,
            action,
            label: label.into(),
        })
    }

    pub fn trivial(cat: &EpiCategory, g: usize, dim: usize) -> Self {
        let action = vec![Matrix::identity(dim); cat.out_order(g)];
        Self::checked(cat, g, dim, action, "trivial").expect("trivial action")
    }

    /// `k[Out(G)]` with `θ · e_φ = e_{θφ}`.
    pub fn regular(cat: &EpiCategory, g: usize) -> Self {
        let n = cat.out_order(g);
        let action = (0..n)
            .map(|t| {
                let mut m = Matrix::zeros(n, n);
                for f in 0..n {
                    m[(cat.compose(g, g, g, f, t), f)] = q(1);
                }
                m
            })
            .collect();
        Self::checked(cat, g, n, action, "regular").expect("regular action")
    }

    /// The sign of each automorphism as a permutation of the group's elements.
    pub fn sign(cat: &EpiCategory, g: usize) -> Self {
        let order = cat.group(g).order() as usize;
        let action = (0..cat.out_order(g))
            .map(|t| {
                let perm: Vec<usize> = (0..order).map(|x| cat.apply(g, g, t, x)).collect();
                Matrix::from_fn(1, 1, |_, _| q(permutation_sign(&perm)))
            })
            .collect();
        Self::checked(cat, g, 1, action, "sign").expect("sign is a character")
    }

    /// The irreducible representations, when `Out(G)` has order at most two.
    pub fn irreducibles(cat: &EpiCategory, g: usize) -> Result<Vec<Self>> {
        match cat.out_order(g) {
            1 => Ok(vec![Self::trivial(cat, g, 1)]),
            2 => {
                let s = Self::sign(cat, g);
                if s.action.iter().all(|m| m[(0, 0)].is_one()) {
                    let flip = (0..2)
                        .map(|t| {
                            let v = if t == cat.identity(g) { 1 } else { -1 };
                            Matrix::from_fn(1, 1, |_, _| q(v))
                        })
                        .collect();
                    let s = Self::checked(cat, g, 1, flip, "sign")?;
                    Ok(vec![Self::trivial(cat, g, 1), s])
                } else {
                    Ok(vec![Self::trivial(cat, g, 1), s])
                }
            }
            n => Err(Error::Unsupported(format!(
                "irreducible representations of an automorphism group of order {n}"
            ))),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        assert_eq!(self.object, other.object, "modules over different groups");
        Self {
            object: self.object,
            dim: self.dim * other.dim,
            action: self
                .action
                .iter()
                .zip(&other.action)
                .map(|(a, b)| a.kron(b))
                .collect(),
            label: format!("{}⊗{}", self.label, other.label),
        }
    }

    pub fn object(&self) -> usize {
        self.object
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn act(&self, t: usize) -> &Matrix {
        &self.action[t]
    }
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

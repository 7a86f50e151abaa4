use std::collections::BTreeSet;

use super::{validate_point, Coord, ProfinitePoint, Thread};
use crate::abgroup::{floor_log, primes_up_to, FinAbGroup};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Member, STAGE_BUDGET};

/// The points of a spectrum visible at a stage cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpace {
    pub stage_cap: u64,
    /// Group points of the stage at the cap.
    pub finite: Vec<Member>,
    /// Points with some infinite coordinate, with finite coordinates `<= level`.
    pub symbolic: Vec<ProfinitePoint>,
    /// Present for `E_p`: the zero ideal, a closed point outside `ℕ`.
    pub extra_closed_point: Option<String>,
}

fn coord_choices(level: u32) -> impl Iterator<Item = Coord> {
    (0..=level).map(Coord::Fin).chain([Coord::Inf])
}

/// Weakly decreasing vectors of length `r` over `{0..level} ∪ {∞}`.
fn monotone_vectors(r: usize, level: u32) -> Vec<Vec<Coord>> {
    fn go(r: usize, bound: Coord, level: u32, prefix: &mut Vec<Coord>, out: &mut Vec<Vec<Coord>>) {
        if prefix.len() == r {
            out.push(prefix.clone());
            return;
        }
        for c in coord_choices(level).filter(|c| *c <= bound) {
            prefix.push(c);
            go(r, c, level, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(r, Coord::Inf, level, &mut Vec::new(), &mut out);
    out
}

/// All group points up to `stage_cap` and the symbolic points resolved at that stage.
pub fn point_space(f: &Family, stage_cap: u64) -> Result<PointSpace> {
    let cap = stage_cap.max(1);
    if let FamilySpec::ElementaryAbelian { p } = f.spec() {
        let finite = (0..=cap.min(64) as usize)
            .map(|n| Ok(Member::Ab(FinAbGroup::elementary(*p, n)?)))
            .collect::<Result<_>>()?;
        return Ok(PointSpace {
            stage_cap: cap,
            finite,
            symbolic: Vec::new(),
            extra_closed_point: Some("zero ideal".into()),
        });
    }
    let stage = f.stage(cap)?;
    let finite = stage.members.clone();
    let mut symbolic = Vec::new();
    if let Some(shape) = f.shape() {
        let rank = shape
            .rank
            .ok_or_else(|| Error::Unsupported(format!("{} has unbounded rank", f.name())))?;
        if !shape.single_prime {
            let primes: Vec<u64> = primes_up_to(cap)
                .into_iter()
                .filter(|q| shape.primes.as_ref().is_none_or(|s| s.contains(q)))
                .collect();
            let mut acc: Vec<Vec<(u64, Vec<Coord>)>> = vec![Vec::new()];
            for &q in &primes {
                let options = monotone_vectors(rank, floor_log(q, cap));
                let size = (acc.len() as u128) * (options.len() as u128);
                if size > STAGE_BUDGET {
                    return Err(Error::CapExceeded {
                        needed: size,
                        cap: STAGE_BUDGET,
                    });
                }
                acc = acc
                    .into_iter()
                    .flat_map(|a| {
                        options.iter().map(move |v| {
                            let mut a = a.clone();
                            a.push((q, v.clone()));
                            a
                        })
                    })
                    .collect();
            }
            for parts in acc {
                let x = ProfinitePoint::symbolic(parts)?;
                if x.is_symbolic() {
                    symbolic.push(x);
                }
            }
        }
    }
    Ok(PointSpace {
        stage_cap: cap,
        finite,
        symbolic,
        extra_closed_point: None,
    })
}

/// Limit points recovered from one stage beyond the cap: coordinates that hit
/// the next level are read as `∞`. Independent of the closed forms above.
pub fn limit_points(f: &Family, stage_cap: u64) -> Result<Vec<ProfinitePoint>> {
    if f.is_extensional() {
        return Ok(Vec::new());
    }
    let p = f
        .prime()
        .ok_or_else(|| Error::Unsupported(format!("generic limit points for {}", f.name())))?;
    let level = floor_log(p, stage_cap.max(1));
    let beyond = f.stage(p.pow(level + 1))?;
    let mut out = BTreeSet::new();
    for m in &beyond.members {
        let g = m.group().expect("abelian member");
        let coords: Vec<Coord> = g
            .partition(p)
            .iter()
            .map(|&e| if e > level { Coord::Inf } else { Coord::Fin(e) })
            .collect();
        if coords.iter().any(|c| c.is_inf()) {
            let x = ProfinitePoint::vector(p, &coords)?;
            let thread = Thread::new(x.to_string(), p.pow(level + 1), {
                let g = g.clone();
                move |n| Member::Ab(g.truncate_exponents(|q| floor_log(q, n).min(level)))
            });
            // Each recovered point must be a compatible thread up to the cap.
            thread.check_compatible_below(f, stage_cap)?;
            out.insert(x.to_string());
        }
    }
    out.into_iter().map(|s| ProfinitePoint::parse(&s)).collect()
}

/// Whether every group point of the family is isolated in its spectrum.
pub(crate) fn all_group_points_isolated(f: &Family) -> bool {
    match f.spec() {
        FamilySpec::Extensional(_)
        | FamilySpec::ElementaryAbelian { .. }
        | FamilySpec::CyclicP { .. }
        | FamilySpec::AbelianPRank { .. } => true,
        FamilySpec::CyclicAll { max_prime } | FamilySpec::AbelianRank { max_prime, .. } => {
            max_prime.is_some()
        }
        FamilySpec::CyclicPrimeOrder
        | FamilySpec::AbelianPExponent { .. }
        | FamilySpec::AbelianP { .. } => false,
    }
}

/// Whether exactly one point of the spectrum truncates to `m` at stage `n`.
pub fn fiber_is_singleton(f: &Family, n: u64, m: &Member) -> Result<bool> {
    let n = f.canonical_index(n)?;
    let m = f.resolve(m)?;
    let Some(shape) = f.shape() else {
        return Ok(true);
    };
    let g = m.group().expect("abelian member");
    if shape.single_prime {
        return Ok(!g.is_trivial());
    }
    let beyond = match &shape.primes {
        None => true,
        Some(ps) => ps.iter().any(|&q| q > n),
    };
    if beyond {
        return Ok(false);
    }
    for (&q, lambda) in g.parts() {
        let l = floor_log(q, n);
        let can_grow = shape.exponent.is_none_or(|c| c > l);
        if can_grow && lambda.contains(&l) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `x` is an isolated point of the spectrum.
pub fn is_isolated(f: &Family, x: &ProfinitePoint) -> Result<bool> {
    validate_point(f, x)?;
    if let ProfinitePoint::Thread(t) = x {
        for n in f.stage_indices(t.cap)? {
            if fiber_is_singleton(f, n, &t.at(n))? {
                return Ok(true);
            }
        }
        return Err(Error::UndecidableAtCap {
            what: format!("isolation of {}", t.name),
            cap: t.cap,
        });
    }
    match f.spec() {
        FamilySpec::AbelianPExponent { .. } | FamilySpec::AbelianP { .. } => Err(
            Error::Unsupported(format!("isolated points of {}", f.name())),
        ),
        FamilySpec::CyclicPrimeOrder => Ok(match x {
            ProfinitePoint::Stabilizing(m) => m.group().is_some_and(|g| !g.is_trivial()),
            _ => false,
        }),
        FamilySpec::CyclicAll { max_prime: None } | FamilySpec::AbelianRank { max_prime: None, .. } => {
            Ok(false)
        }
        _ => Ok(!x.is_symbolic()),
    }
}

/// The open embedding of spectra induced by a downward closed inclusion.
pub fn embed_spectrum(sub: &Family, ambient: &Family, x: &ProfinitePoint) -> Result<ProfinitePoint> {
    if !sub.is_downward_closed_in(ambient)? {
        return Err(Error::NotDownwardClosed {
            sub: sub.name(),
            ambient: ambient.name(),
        });
    }
    validate_point(sub, x)?;
    let as_group = |m: &Member| -> Result<Member> {
        match (sub.table(), m) {
            (Some(t), Member::Named(name)) => {
                let i = t.index_of(name).ok_or_else(|| sub.not_member(m))?;
                let g = t
                    .group(i)
                    .ok_or_else(|| Error::NeedsMetadata(format!("group of {name}")))?;
                Ok(Member::Ab(g.clone()))
            }
            _ => Ok(m.clone()),
        }
    };
    let y = match x {
        ProfinitePoint::Stabilizing(m) => ProfinitePoint::Stabilizing(ambient.resolve(&as_group(m)?)?),
        ProfinitePoint::Symbolic(_) => x.clone(),
        ProfinitePoint::Thread(t) => {
            let inner = t.clone();
            let table = sub.table().cloned();
            ProfinitePoint::Thread(Thread::new(t.name.clone(), t.cap, move |n| {
                let m = inner.at(n);
                match (&table, &m) {
                    (Some(t), Member::Named(name)) => t
                        .index_of(name)
                        .and_then(|i| t.group(i))
                        .map_or(m.clone(), |g| Member::Ab(g.clone())),
                    _ => m,
                }
            }))
        }
    };
    validate_point(ambient, &y)?;
    Ok(y)
}

impl Thread {
    fn check_compatible_below(&self, f: &Family, cap: u64) -> Result<()> {
        Thread {
            cap,
            ..self.clone()
        }
        .check_compatible(f)
    }
}

//! DOT rendering of stage truncations of the `≫` poset.

use std::fmt::Write;

use ttgeo::spectrum::{point_space, truncate, ProfinitePoint};
use ttgeo::{Family, Member, Result};

fn dominates_coords(x: &ProfinitePoint, y: &ProfinitePoint) -> bool {
    let primes = |z: &ProfinitePoint| -> Vec<u64> {
        match z {
            ProfinitePoint::Symbolic(s) => s.parts().keys().copied().collect(),
            ProfinitePoint::Stabilizing(Member::Ab(g)) => g.primes().collect(),
            _ => Vec::new(),
        }
    };
    let mut ps = primes(x);
    ps.extend(primes(y));
    ps.sort_unstable();
    ps.dedup();
    ps.into_iter().all(|p| {
        let len = x.coords(p, 0).map_or(0, |v| v.len()).max(y.coords(p, 0).map_or(0, |v| v.len()));
        match (x.coords(p, len), y.coords(p, len)) {
            (Some(a), Some(b)) => a.iter().zip(&b).all(|(u, v)| u >= v),
            _ => false,
        }
    })
}

/// `x ≫ y` among the nodes of a stage picture: stage members compare by the
/// family's epimorphism relation, a limit point dominates a member when its
/// truncation does, and limit points compare coordinatewise.
fn dominates(f: &Family, stage: u64, x: &ProfinitePoint, y: &ProfinitePoint) -> Result<bool> {
    match (x, y) {
        (ProfinitePoint::Stabilizing(a), ProfinitePoint::Stabilizing(b)) => f.epi(a, b),
        (ProfinitePoint::Stabilizing(_), _) => Ok(false),
        (_, ProfinitePoint::Stabilizing(b)) => f.epi(&truncate(f, x, stage)?, b),
        _ => Ok(dominates_coords(x, y)),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The Hasse diagram of `≫` on the members of stage `n`, with an edge `G -> H`
/// for every covering relation `G ≫ H`. With `with_limits`, the limit points
/// visible at stage `n` are added as boxes.
pub fn export_poset(f: &Family, n: u64, with_limits: bool, ascii: bool) -> Result<String> {
    let stage = f.stage(n)?;
    let mut nodes: Vec<ProfinitePoint> = stage
        .members
        .iter()
        .cloned()
        .map(ProfinitePoint::Stabilizing)
        .collect();
    if with_limits {
        nodes.extend(point_space(f, stage.index)?.symbolic);
    }
    let k = nodes.len();
    let mut rel = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            rel[i][j] = i != j && dominates(f, stage.index, &nodes[i], &nodes[j])?;
        }
    }
    let mut out = String::new();
    let title = format!("{}, stage {}", f.name(), stage.index);
    writeln!(out, "digraph poset {{").unwrap();
    writeln!(out, "  label={};", quote(&title)).unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    for (i, x) in nodes.iter().enumerate() {
        let shape = if x.is_symbolic() { " shape=box" } else { "" };
        writeln!(out, "  n{i} [label={}{shape}];", quote(&x.label(ascii))).unwrap();
    }
    for i in 0..k {
        for j in 0..k {
            let covers = rel[i][j] && !(0..k).any(|m| rel[i][m] && rel[m][j]);
            if covers {
                writeln!(out, "  n{i} -> n{j};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttgeo::spectrum::Coord;
    use ttgeo::FamilySpec;

    fn edges(dot: &str) -> usize {
        dot.matches("->").count()
    }

    #[test]
    fn cyclic_stage_is_a_path() {
        let f = Family::new(FamilySpec::CyclicP { p: 2 }).unwrap();
        let dot = export_poset(&f, 8, false, true).unwrap();
        assert_eq!(dot.matches("[label=").count(), 4);
        assert_eq!(edges(&dot), 3);
        for e in ["n1 -> n0", "n2 -> n1", "n3 -> n2"] {
            assert!(dot.contains(e), "{dot}");
        }
    }

    #[test]
    fn rank_two_truncation() {
        let f = Family::new(FamilySpec::AbelianPRank { p: 3, r: 2 }).unwrap();
        let dot = export_poset(&f, 9, false, true).unwrap();
        assert_eq!(dot.matches("[label=").count(), 6);
        // (2,2) > (2,1) > (2),(1,1) > (1) > ().
        assert_eq!(edges(&dot), 6);
    }

    #[test]
    fn limits_sit_above_their_truncations() {
        let f = Family::new(FamilySpec::CyclicP { p: 2 }).unwrap();
        let dot = export_poset(&f, 4, true, true).unwrap();
        assert!(dot.contains("label=\"Z_2\" shape=box"));
        assert!(dot.contains("n3 -> n2"));
    }

    #[test]
    fn coordinatewise_order_with_infinity() {
        let a = ProfinitePoint::vector(2, &[Coord::Inf, Coord::Fin(1)]).unwrap();
        let b = ProfinitePoint::vector(2, &[Coord::Inf, Coord::Fin(0)]).unwrap();
        assert!(dominates_coords(&a, &b));
        assert!(!dominates_coords(&b, &a));
    }
}

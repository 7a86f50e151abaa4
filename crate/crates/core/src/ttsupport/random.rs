use rand::Rng;

use super::{epi_orbits, ObjectExpr};
use crate::abgroup::FinAbGroup;
use crate::error::Result;
use crate::family::{Family, FamilySpec, Member};

/// Atoms available for random expressions over `f`.
fn atom_pool(f: &Family, stage_cap: u64) -> Result<Vec<Member>> {
    match f.spec() {
        FamilySpec::ElementaryAbelian { p } => (0..=6)
            .map(|n| Ok(Member::Ab(FinAbGroup::elementary(*p, n)?)))
            .collect(),
        _ if f.has_finite_stages() => Ok(f.stage(stage_cap)?.members.clone()),
        _ => f.members_up_to(64),
    }
}

/// A random support-exact expression of depth at most `depth`.
pub fn random_expr<R: Rng + ?Sized>(
    f: &Family,
    rng: &mut R,
    depth: usize,
    stage_cap: u64,
) -> Result<ObjectExpr> {
    let pool = atom_pool(f, stage_cap)?;
    let aug_ok = match pool.first() {
        Some(m) => epi_orbits(f, m, m).is_ok(),
        None => false,
    };
    Ok(build(f, rng, depth, &pool, aug_ok))
}

fn build<R: Rng + ?Sized>(
    f: &Family,
    rng: &mut R,
    depth: usize,
    pool: &[Member],
    aug_ok: bool,
) -> ObjectExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        let m = pool[rng.gen_range(0..pool.len())].clone();
        return match rng.gen_range(0..8) {
            0 => ObjectExpr::Zero,
            1 if f.unit().is_some() => ObjectExpr::Unit,
            2 => ObjectExpr::GenTwisted(m, rng.gen_range(1..=3)),
            3 if f.is_extensional() => ObjectExpr::Chi(m),
            4 | 5 if aug_ok => ObjectExpr::AugCone(m),
            _ => ObjectExpr::Gen(m),
        };
    }
    match rng.gen_range(0..5) {
        0 => ObjectExpr::shift(build(f, rng, depth - 1, pool, aug_ok)),
        1 | 2 => ObjectExpr::sum(
            build(f, rng, depth - 1, pool, aug_ok),
            build(f, rng, depth - 1, pool, aug_ok),
        ),
        _ => ObjectExpr::tensor(
            build(f, rng, depth - 1, pool, aug_ok),
            build(f, rng, depth - 1, pool, aug_ok),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttsupport::hsupp;
    use rand::{rngs::StdRng, SeedableRng};

    #[test]
    fn generated_expressions_have_supports() {
        let mut rng = StdRng::seed_from_u64(7);
        for j in [
            r#"{"kind":"elementary_abelian","p":2}"#,
            r#"{"kind":"abelian_p_rank","p":2,"r":2}"#,
            r#"{"kind":"cyclic_prime_order"}"#,
        ] {
            let f = Family::from_json(j).unwrap();
            for _ in 0..20 {
                let x = random_expr(&f, &mut rng, 4, 8).unwrap();
                assert!(x.depth() <= 4);
                hsupp(&f, &x).unwrap();
            }
        }
    }
}

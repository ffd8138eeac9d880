use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Coeff, Field, HNExpansion, HNRow};

/// Range for rational draws: integers in `[-Q_RANGE, Q_RANGE]`.
const Q_RANGE: i64 = 50;

pub fn sample_coeff(rng: &mut impl Rng, field: Field, nonzero: bool) -> Coeff {
    loop {
        let c = match field {
            Field::Q => field.int(rng.random_range(-Q_RANGE..=Q_RANGE)),
            Field::Fp(p) => Coeff::Fp {
                v: rng.random_range(0..p),
                p,
            },
        };
        if !nonzero || !c.is_zero() {
            return c;
        }
    }
}

/// Fills every coefficient slot of `structure` with fresh draws over `field`.
/// Leading slots of later free rows are drawn nonzero. Deterministic in `seed`.
pub fn sample_very_general(structure: &HNExpansion, field: Field, seed: u64) -> HNExpansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = structure
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            HNRow::Free { k, h, .. } => HNRow::Free {
                k: *k,
                h: *h,
                coeffs: (*k..=*h)
                    .map(|l| sample_coeff(&mut rng, field, i > 0 && l == *k))
                    .collect(),
            },
            p => p.clone(),
        })
        .collect();
    HNExpansion::new(field, rows, structure.terminal.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hn_model::build::*;

    #[test]
    fn deterministic_and_counted() {
        let s = w3([0; 4]);
        let a = sample_very_general(&s, Field::Q, 11);
        let b = sample_very_general(&s, Field::Q, 11);
        assert_eq!(a, b);
        assert_eq!(a.coefficient_slots(), 4);
        let c = sample_very_general(&w1(0), Field::Fp(crate::hn_model::DEFAULT_PRIME), 1);
        let d = sample_very_general(&w1(0), Field::Fp(crate::hn_model::DEFAULT_PRIME), 2);
        assert_ne!(c, d);
        assert!(c.validate().is_empty());
    }
}

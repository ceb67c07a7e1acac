use rand::Rng;
use serde::{Deserialize, Serialize};

use super::classical::FunctionFamily;
use crate::seeds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub pairs: usize,
    /// Fraction of pairs `(k, k′)` with at least one colliding input.
    pub any_collision_rate: f64,
    /// Fraction of all `(pair, x)` with `F(k, x) = F(k′, x)`.
    pub per_x_rate: f64,
    /// Largest number of colliding inputs seen for one pair.
    pub max_collisions: usize,
    /// `2^−m`, the rate of an ideal family.
    pub ideal_rate: f64,
    /// Per-x rate exceeds the ideal by more than 5σ.
    pub flagged: bool,
}

/// Exhaustive per-x scan over random distinct key pairs.
pub fn inter_function_independence_probe(
    family: &dyn FunctionFamily,
    pairs: usize,
    seed: u64,
) -> CollisionReport {
    let mut rng = seeds::rng_for(seed, "independence-probe", 0);
    let key_mask = if family.key_bits() >= 64 {
        u64::MAX
    } else {
        (1u64 << family.key_bits()) - 1
    };
    let xs = 1usize << family.n_in();
    let mut any = 0usize;
    let mut hits = 0usize;
    let mut max_c = 0usize;
    for _ in 0..pairs {
        let k = rng.random::<u64>() & key_mask;
        let mut k2 = rng.random::<u64>() & key_mask;
        if key_mask > 0 {
            while k2 == k {
                k2 = rng.random::<u64>() & key_mask;
            }
        }
        let (a, b) = (family.row(k), family.row(k2));
        let c = a.iter().zip(&b).filter(|(u, v)| u == v).count();
        hits += c;
        max_c = max_c.max(c);
        if c > 0 {
            any += 1;
        }
    }
    let total = (pairs * xs) as f64;
    let per_x = hits as f64 / total;
    let ideal = 0.5f64.powi(family.m_out() as i32);
    let sd = (ideal * (1.0 - ideal) / total).sqrt();
    CollisionReport {
        pairs,
        any_collision_rate: any as f64 / pairs as f64,
        per_x_rate: per_x,
        max_collisions: max_c,
        ideal_rate: ideal,
        flagged: per_x > ideal + 5.0 * sd + 1e-12,
    }
}

fn random_table(n: usize, m: usize, seed: u64) -> Vec<u64> {
    let mut rng = seeds::rng(seed);
    let mask = (1u64 << m) - 1;
    (0..1usize << n).map(|_| rng.random::<u64>() & mask).collect()
}

/// Per-x agreement frequency of independent uniformly random tables `f, g`
/// whose seeds come from separate streams.
pub fn random_function_collision_rate(n: usize, m: usize, trials: usize, seed: u64) -> f64 {
    collision_rate_with(n, m, trials, |t| {
        (
            seeds::derive(seed, "collision-f", t),
            seeds::derive(seed, "collision-g", t),
        )
    })
}

/// Variant with explicit seeds for `f` and `g`; equal seeds give identical tables.
pub fn random_function_pair_collision_rate(
    n: usize,
    m: usize,
    trials: usize,
    seed_f: u64,
    seed_g: u64,
) -> f64 {
    collision_rate_with(n, m, trials, |t| {
        (
            seeds::derive(seed_f, "collision", t),
            seeds::derive(seed_g, "collision", t),
        )
    })
}

fn collision_rate_with<S: Fn(u64) -> (u64, u64)>(n: usize, m: usize, trials: usize, s: S) -> f64 {
    let mut hits = 0usize;
    for t in 0..trials as u64 {
        let (sf, sg) = s(t);
        let f = random_table(n, m, sf);
        let g = random_table(n, m, sg);
        hits += f.iter().zip(&g).filter(|(a, b)| a == b).count();
    }
    hits as f64 / (trials << n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{ConstantFamily, KeyedFunctionFamily};

    #[test]
    fn constant_family_is_flagged() {
        let c = ConstantFamily {
            key_bits: 8,
            n_in: 4,
            m_out: 8,
            value: 3,
        };
        let r = inter_function_independence_probe(&c, 100, 1);
        assert_eq!(r.per_x_rate, 1.0);
        assert!(r.flagged);
    }

    #[test]
    fn seeded_family_per_x_rate() {
        let f = KeyedFunctionFamily::new(16, 8, 8, 5).unwrap();
        let r = inter_function_independence_probe(&f, 10_000, 2);
        let total = 10_000.0 * 256.0;
        let sd = (r.ideal_rate * (1.0 - r.ideal_rate) / total).sqrt();
        assert!((r.per_x_rate - r.ideal_rate).abs() < 3.0 * sd, "{}", r.per_x_rate);
        assert!(!r.flagged);
    }

    #[test]
    fn wide_outputs_rarely_collide() {
        let f = KeyedFunctionFamily::new(16, 0, 16, 5).unwrap();
        let r = inter_function_independence_probe(&f, 10_000, 3);
        assert!(r.per_x_rate <= 3.0 / 10_000.0);
    }

    #[test]
    fn collision_rates() {
        let r1 = random_function_collision_rate(4, 1, 2000, 1);
        assert!((r1 - 0.5).abs() < 0.02);
        let r8 = random_function_collision_rate(4, 8, 2000, 1);
        assert!((r8 - 1.0 / 256.0).abs() < 0.002);
        assert_eq!(random_function_pair_collision_rate(4, 8, 10, 7, 7), 1.0);
    }
}

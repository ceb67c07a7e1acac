use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::oracles::{ClassicalFunctionTable, RandomizedFunction};
use crate::seeds::{self, SimRng};
use crate::verifiers::{classical_verify, ClassicalScheme};

/// `F(k, x)` for a family of functions `{0,1}^n → {0,1}^m` indexed by keys.
pub trait FunctionFamily: Send + Sync {
    fn key_bits(&self) -> usize;
    fn n_in(&self) -> usize;
    fn m_out(&self) -> usize;
    fn eval(&self, key: u64, x: usize) -> u64;

    /// `F(k, ·)` over the whole domain.
    fn row(&self, key: u64) -> Vec<u64> {
        (0..1usize << self.n_in()).map(|x| self.eval(key, x)).collect()
    }
}

/// Seeded lazy random table per key: entry `(k, x)` is word `x` of the
/// ChaCha8 stream `k` under the family seed, so any entry costs O(1).
#[derive(Debug)]
pub struct KeyedFunctionFamily {
    key_bits: usize,
    n_in: usize,
    m_out: usize,
    seed: u64,
    tables: Mutex<HashMap<u64, Arc<ClassicalFunctionTable>>>,
}

impl Clone for KeyedFunctionFamily {
    fn clone(&self) -> Self {
        KeyedFunctionFamily {
            tables: Mutex::new(HashMap::new()),
            ..*self
        }
    }
}

impl KeyedFunctionFamily {
    pub fn new(key_bits: usize, n_in: usize, m_out: usize, seed: u64) -> Result<Self> {
        if key_bits > 32 || n_in > 20 || m_out == 0 || m_out > 32 {
            return Err(Error::InvalidParameter(format!(
                "family widths key={key_bits}, n={n_in}, m={m_out} out of range"
            )));
        }
        Ok(KeyedFunctionFamily {
            key_bits,
            n_in,
            m_out,
            seed,
            tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Full table of `F(k, ·)`, built once per key.
    pub fn table(&self, key: u64) -> Arc<ClassicalFunctionTable> {
        let mut cache = self.tables.lock().expect("table cache poisoned");
        cache
            .entry(key)
            .or_insert_with(|| {
                Arc::new(
                    ClassicalFunctionTable::new(self.n_in, self.m_out, self.row(key))
                        .expect("family widths validated at construction"),
                )
            })
            .clone()
    }
}

impl FunctionFamily for KeyedFunctionFamily {
    fn key_bits(&self) -> usize {
        self.key_bits
    }

    fn n_in(&self) -> usize {
        self.n_in
    }

    fn m_out(&self) -> usize {
        self.m_out
    }

    fn eval(&self, key: u64, x: usize) -> u64 {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(key);
        rng.set_word_pos(2 * x as u128);
        rng.next_u64() & ((1u64 << self.m_out) - 1)
    }

    fn row(&self, key: u64) -> Vec<u64> {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(key);
        let mask = (1u64 << self.m_out) - 1;
        (0..1usize << self.n_in).map(|_| rng.next_u64() & mask).collect()
    }
}

/// Every key maps to the same constant function; the degenerate case a probe must flag.
#[derive(Clone, Debug)]
pub struct ConstantFamily {
    pub key_bits: usize,
    pub n_in: usize,
    pub m_out: usize,
    pub value: u64,
}

impl FunctionFamily for ConstantFamily {
    fn key_bits(&self) -> usize {
        self.key_bits
    }
    fn n_in(&self) -> usize {
        self.n_in
    }
    fn m_out(&self) -> usize {
        self.m_out
    }
    fn eval(&self, _key: u64, _x: usize) -> u64 {
        self.value
    }
}

pub fn construction1_keygen(key_bits: usize, seed: u64) -> u64 {
    let mut rng = seeds::rng_for(seed, "keygen", 0);
    if key_bits == 0 {
        0
    } else {
        rng.random::<u64>() & ((1u64 << key_bits) - 1)
    }
}

/// Deterministic MAC `t = F(k, m)`.
#[derive(Clone, Debug)]
pub struct DeterministicMac {
    pub family: Arc<KeyedFunctionFamily>,
    pub key: u64,
}

impl DeterministicMac {
    pub fn table(&self) -> Arc<ClassicalFunctionTable> {
        self.family.table(self.key)
    }

    pub fn tag(&self, m: usize) -> u64 {
        self.family.eval(self.key, m)
    }

    pub fn verify(&self, m: usize, t: u64) -> Result<bool> {
        classical_verify(self, self.key, m, t, 0)
    }
}

impl ClassicalScheme for DeterministicMac {
    fn key_bits(&self) -> usize {
        self.family.key_bits()
    }
    fn n_in(&self) -> usize {
        self.family.n_in()
    }
    fn m_out(&self) -> usize {
        self.family.m_out()
    }
    fn l_bits(&self) -> usize {
        0
    }
    fn tag(&self, key: u64, m: usize, _r: u64) -> u64 {
        self.family.eval(key, m)
    }
}

/// Randomized MAC: `Eval(k, m) = F(k ⊕ r, m) ‖ r` with fresh `r` of key width.
#[derive(Clone, Debug)]
pub struct RandMac {
    pub family: Arc<KeyedFunctionFamily>,
    pub key: u64,
}

impl RandMac {
    pub fn new(family: Arc<KeyedFunctionFamily>, key: u64) -> Result<Self> {
        if key >> family.key_bits() != 0 {
            return Err(Error::WidthMismatch(format!(
                "key {key:#x} wider than {} bits",
                family.key_bits()
            )));
        }
        Ok(RandMac { family, key })
    }

    pub fn l(&self) -> usize {
        self.family.key_bits()
    }

    /// Output width of one evaluation: tag plus recorded randomness.
    pub fn output_bits(&self) -> usize {
        self.family.m_out() + self.l()
    }

    pub fn eval<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> (u64, u64) {
        let r = if self.l() == 0 {
            0
        } else {
            rng.random::<u64>() & ((1u64 << self.l()) - 1)
        };
        (self.family.eval(self.key ^ r, m), r)
    }

    pub fn verify(&self, m: usize, t: u64, r: u64) -> Result<bool> {
        classical_verify(self, self.key, m, t, r)
    }
}

impl ClassicalScheme for RandMac {
    fn key_bits(&self) -> usize {
        self.family.key_bits()
    }
    fn n_in(&self) -> usize {
        self.family.n_in()
    }
    fn m_out(&self) -> usize {
        self.family.m_out()
    }
    fn l_bits(&self) -> usize {
        self.l()
    }
    fn tag(&self, key: u64, m: usize, r: u64) -> u64 {
        self.family.eval(key ^ r, m)
    }
}

impl RandomizedFunction for RandMac {
    fn n_in(&self) -> usize {
        self.family.n_in()
    }
    fn m_out(&self) -> usize {
        self.family.m_out()
    }
    fn l_bits(&self) -> usize {
        self.l()
    }
    fn eval(&self, m: usize, r: usize) -> u64 {
        self.family.eval(self.key ^ r as u64, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_deterministic_and_lazy_matches_table() {
        let f = KeyedFunctionFamily::new(8, 4, 8, 3).unwrap();
        let t = f.table(17);
        for x in 0..16 {
            assert_eq!(t.eval(x), f.eval(17, x));
            assert_eq!(f.row(17)[x], f.eval(17, x));
        }
        assert_eq!(f.table(17), KeyedFunctionFamily::new(8, 4, 8, 3).unwrap().table(17));
        assert_ne!(f.table(17), f.table(18));
    }

    #[test]
    fn construction1_round_trip() {
        let fam = Arc::new(KeyedFunctionFamily::new(8, 8, 8, 1).unwrap());
        let mut rng = seeds::rng(5);
        for i in 0..100 {
            let mac = RandMac::new(fam.clone(), construction1_keygen(8, i)).unwrap();
            let m = rng.random::<u8>() as usize;
            let (t, r) = mac.eval(m, &mut rng);
            assert!(mac.verify(m, t, r).unwrap());
            assert!(!mac.verify(m, t ^ 1, r).unwrap());
        }
    }

    #[test]
    fn wrong_randomness_acceptance_rate() {
        let fam = Arc::new(KeyedFunctionFamily::new(8, 8, 8, 2).unwrap());
        let mac = RandMac::new(fam, 0x5a).unwrap();
        let mut rng = seeds::rng(6);
        let n = 10_000;
        let mut hits = 0;
        for _ in 0..n {
            let m = rng.random::<u8>() as usize;
            let (t, r) = mac.eval(m, &mut rng);
            let r2 = r ^ (1 + rng.random::<u8>() as u64 % 255);
            if mac.verify(m, t, r2).unwrap() {
                hits += 1;
            }
        }
        let p = 1.0 / 256.0;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits as f64 - n as f64 * p).abs() < 3.0 * sd, "{hits}");
    }

    #[test]
    fn randomness_birthday_collisions() {
        let fam = Arc::new(KeyedFunctionFamily::new(16, 4, 8, 2).unwrap());
        let mac = RandMac::new(fam, 7).unwrap();
        // Expected colliding pairs among 1000 draws of 16 bits: C(1000,2)/65536 ≈ 7.6.
        let mut total = 0usize;
        for s in 0..20 {
            let mut rng = seeds::rng(100 + s);
            let mut rs: Vec<u64> = (0..1000).map(|_| mac.eval(3, &mut rng).1).collect();
            rs.sort_unstable();
            let mut pairs = 0;
            let mut run = 1usize;
            for w in rs.windows(2) {
                if w[0] == w[1] {
                    run += 1;
                } else {
                    pairs += run * (run - 1) / 2;
                    run = 1;
                }
            }
            pairs += run * (run - 1) / 2;
            total += pairs;
        }
        let mean = total as f64 / 20.0;
        let expect = 1000.0 * 999.0 / 2.0 / 65536.0;
        assert!((mean - expect).abs() < 2.5, "{mean} vs {expect}");
    }

    #[test]
    fn key_width_checked() {
        let fam = Arc::new(KeyedFunctionFamily::new(4, 2, 2, 0).unwrap());
        assert!(RandMac::new(fam.clone(), 16).is_err());
        let mac = RandMac::new(fam, 3).unwrap();
        assert!(mac.verify(4, 0, 0).is_err());
        assert_eq!(mac.output_bits(), 6);
    }
}

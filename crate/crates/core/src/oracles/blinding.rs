use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Random region `B_ε ⊆ {0,1}^n` on which a blinded oracle answers `⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindingSet {
    epsilon: f64,
    n: usize,
    seed: u64,
    members: Vec<bool>,
}

/// Each message joins the set independently with probability `epsilon`.
pub fn generate_blinding(epsilon: f64, n: usize, seed: u64) -> Result<BlindingSet> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside [0, 1]"
        )));
    }
    if n > 24 {
        return Err(Error::InvalidParameter(format!("n = {n} too large")));
    }
    let mut rng = seeds::rng(seeds::derive(seed, "blinding", n as u64));
    let members = (0..1usize << n)
        .map(|_| rng.random::<f64>() < epsilon)
        .collect();
    Ok(BlindingSet {
        epsilon,
        n,
        seed,
        members,
    })
}

impl BlindingSet {
    pub fn empty(n: usize) -> Self {
        BlindingSet {
            epsilon: 0.0,
            n,
            seed: 0,
            members: vec![false; 1 << n],
        }
    }

    pub fn contains(&self, m: usize) -> bool {
        self.members.get(m).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn regenerate(&self) -> Result<BlindingSet> {
        generate_blinding(self.epsilon, self.n, self.seed)
    }
}

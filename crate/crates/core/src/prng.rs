//! Small deterministic PRNG (splitmix64) for seeded randomized checks and
//! random-rational twist points. Determinism across platforms is part of the
//! report contract, so no external RNG is used.

use crate::poly::{rat, Rational};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// A small signed rational with numerator in `-9..=9` (nonzero when
    /// `nonzero`) and denominator in `1..=9`.
    pub fn small_rational(&mut self, nonzero: bool) -> Rational {
        loop {
            let num = self.below(19) as i64 - 9;
            if nonzero && num == 0 {
                continue;
            }
            let den = self.below(9) as i64 + 1;
            return rat(num, den);
        }
    }

    /// A generic twist tuple: pairwise distinct rationals outside {0, +-1}
    /// with all pairwise products different from 1.
    pub fn twist_point(&mut self, rank: u8) -> Vec<Rational> {
        loop {
            let cand: Vec<Rational> = (0..rank)
                .map(|_| {
                    let num = self.below(40) as i64 + 2;
                    let den = self.below(40) as i64 + 2;
                    rat(num, den)
                })
                .collect();
            if crate::qsystem::ChainSpec::new(rank, 1, cand.clone()).is_ok() {
                return cand;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn twist_points_are_valid() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..5 {
            let t = rng.twist_point(4);
            assert!(crate::qsystem::ChainSpec::new(4, 1, t).is_ok());
        }
    }
}

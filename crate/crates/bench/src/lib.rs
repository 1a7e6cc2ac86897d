//! Shared fixtures for the criterion benchmarks.

use ortholax::context::{standard_context, std_vars, Ctx};
use ortholax::osc::{AlgebraElement, OscMode, OscMonomial};
use ortholax::poly::{rat, MultiPoly};
use ortholax::prng::SplitMix64;

/// A reproducible batch of random normal-ordered elements over two modes.
pub fn random_elements(count: usize, seed: u64) -> (Ctx, Vec<AlgebraElement>) {
    let ctx = standard_context(2);
    let mut rng = SplitMix64::new(seed);
    let modes = [OscMode::Plain { idx: 1 }, OscMode::Plain { idx: 2 }];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut e = AlgebraElement::zero(&ctx);
        for _ in 0..3 {
            let mut entries = Vec::new();
            for &m in &modes {
                let p = rng.below(3) as u16;
                let q = rng.below(3) as u16;
                if p > 0 || q > 0 {
                    entries.push((m, p, q));
                }
            }
            let mut coeff = MultiPoly::constant(&ctx, rng.small_rational(true));
            if rng.below(2) == 0 {
                coeff = coeff.mul(&MultiPoly::var(&ctx, std_vars::Z));
            }
            e = e.add(&AlgebraElement::monomial(&ctx, OscMonomial(entries), coeff));
        }
        out.push(e);
    }
    (ctx, out)
}

pub fn default_twists(rank: u8) -> Vec<ortholax::poly::Rational> {
    let primes = [2i64, 3, 5, 7];
    (0..rank as usize).map(|k| rat(1, primes[k])).collect()
}

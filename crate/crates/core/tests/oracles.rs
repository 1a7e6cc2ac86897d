//! Oracle suite: the normal-ordered algebra against the truncated Fock
//! representation, the closed-form twisted trace against truncated series,
//! and the similarity substitutions against matrix-exponential conjugation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use ortholax::context::{standard_context, std_vars};
use ortholax::fock::{to_truncated_fock, FockOperator};
use ortholax::osc::{AlgebraElement, OscMode, OscMonomial, Register};
use ortholax::poly::{rat, rat_abs, rat_int, MultiPoly, Rational};
use ortholax::prng::SplitMix64;
use ortholax::trace::{twisted_trace_eval, TwistWeight, WeightMap};

fn plain(idx: u8) -> OscMode {
    OscMode::Plain { idx }
}

/// A random element over two modes: up to `terms` monomials of per-mode
/// degree <= 2, with small rational coefficients and an occasional factor z.
fn random_element(ctx: &ortholax::Ctx, rng: &mut SplitMix64, terms: usize) -> AlgebraElement {
    let modes = [plain(1), plain(2)];
    let mut e = AlgebraElement::zero(ctx);
    for _ in 0..terms {
        let mut entries = Vec::new();
        for &m in &modes {
            let p = rng.below(3) as u16;
            let q = rng.below(3) as u16;
            if p > 0 || q > 0 {
                entries.push((m, p, q));
            }
        }
        let mut coeff = MultiPoly::constant(ctx, rng.small_rational(true));
        if rng.below(3) == 0 {
            coeff = coeff.mul(&MultiPoly::var(ctx, std_vars::Z));
        }
        e = e.add(&AlgebraElement::monomial(ctx, OscMonomial(entries), coeff));
    }
    e
}

#[test]
fn wick_against_fock_products_randomized() {
    // 100 randomized degree-<=4 cases: rep(a*b) equals rep(a)rep(b) on the
    // interior occupation block.
    let ctx = standard_context(2);
    let mut rng = SplitMix64::new(20260808);
    let modes = [plain(1), plain(2)];
    let cutoff = 6usize;
    let eval = BTreeMap::from([(std_vars::Z, rat(3, 7))]);
    for case in 0..100 {
        let na = 1 + rng.below(3) as usize;
        let a = random_element(&ctx, &mut rng, na);
        let nb = 1 + rng.below(3) as usize;
        let b = random_element(&ctx, &mut rng, nb);
        let prod = a.checked_mul(&b).unwrap();
        let need = (a.max_creation_power() + b.max_creation_power()) as usize;
        if need > cutoff {
            continue;
        }
        let ra = to_truncated_fock(&a, cutoff, &modes, &eval).unwrap();
        let rb = to_truncated_fock(&b, cutoff, &modes, &eval).unwrap();
        let rp = to_truncated_fock(&prod, cutoff, &modes, &eval).unwrap();
        let lhs = ra.mul(&rb);
        let cols = rp.interior_columns(cutoff - need);
        assert!(
            rp.agrees_on_columns(&lhs, &cols),
            "case {case}: interior block disagrees"
        );
    }
}

#[test]
fn wick_associativity_randomized() {
    let ctx = standard_context(2);
    let mut rng = SplitMix64::new(99);
    for _ in 0..30 {
        let a = random_element(&ctx, &mut rng, 2);
        let b = random_element(&ctx, &mut rng, 2);
        let c = random_element(&ctx, &mut rng, 2);
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }
}

#[test]
fn commutator_against_fock() {
    // [abar a, abar] = abar, cross-checked in the representation
    let ctx = standard_context(2);
    let m = plain(1);
    let n = AlgebraElement::number_op(&ctx, m);
    let ad = AlgebraElement::creator(&ctx, m);
    let comm = n.checked_commutator(&ad).unwrap();
    assert_eq!(comm, ad);
    let cutoff = 10;
    let eval = BTreeMap::new();
    let rn = to_truncated_fock(&n, cutoff, &[m], &eval).unwrap();
    let rad = to_truncated_fock(&ad, cutoff, &[m], &eval).unwrap();
    let rcomm = rn.mul(&rad).sub(&rad.mul(&rn));
    let rexp = to_truncated_fock(&comm, cutoff, &[m], &eval).unwrap();
    let cols = rexp.interior_columns(cutoff - 2);
    assert!(rexp.agrees_on_columns(&rcomm, &cols));
}

#[test]
fn trace_closed_form_against_series_degree6() {
    // closed form at t = 1/2 vs the truncated series at cutoff 60, for all
    // number-conserving monomials of degree <= 6 (abar^p a^p, p <= 3):
    // relative error below 1e-12 (exactly computed).
    let ctx = standard_context(2);
    let m = plain(1);
    let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
    let values = BTreeMap::from([(std_vars::t(1), rat(1, 2))]);
    let t = rat(1, 2);
    let tol = Rational::new(1.into(), 1_000_000_000_000i64.into());
    for p in 0..=3u16 {
        let e = AlgebraElement::monomial(
            &ctx,
            OscMonomial::single(m, p, p),
            MultiPoly::one(&ctx),
        );
        let closed = twisted_trace_eval(&e, &weights, &values)
            .unwrap()
            .constant_term();
        // <k| t^N abar^p a^p |k> = t^k * k(k-1)...(k-p+1)
        let mut series = Rational::zero();
        let mut tk = Rational::one();
        for k in 0..=60i64 {
            let mut fall = Rational::one();
            for j in 0..p as i64 {
                fall *= rat_int(k - j);
            }
            series += fall * &tk;
            tk *= &t;
        }
        let rel = rat_abs(&((&closed - &series) / &closed));
        assert!(rel < tol, "p={p}: rel err {rel}");
    }
}

#[test]
fn trace_linearity_and_mode_factorization() {
    let ctx = standard_context(2);
    let (m1, m2) = (plain(1), plain(2));
    let weights: WeightMap = BTreeMap::from([
        (m1, TwistWeight::var(std_vars::t(1))),
        (m2, TwistWeight::var(std_vars::t(2))),
    ]);
    let values = BTreeMap::from([(std_vars::t(1), rat(1, 3)), (std_vars::t(2), rat(2, 5))]);
    let mut rng = SplitMix64::new(5);
    for _ in 0..20 {
        let a = random_element(&ctx, &mut rng, 2);
        let b = random_element(&ctx, &mut rng, 2);
        let ta = twisted_trace_eval(&a, &weights, &values).unwrap();
        let tb = twisted_trace_eval(&b, &weights, &values).unwrap();
        let tsum = twisted_trace_eval(&a.add(&b), &weights, &values).unwrap();
        assert_eq!(tsum, ta.add(&tb));
    }
    // factorization over disjoint mode sets: tr(X1 * Y2) = tr(X1) tr(Y2)
    let w1: WeightMap = BTreeMap::from([(m1, TwistWeight::var(std_vars::t(1)))]);
    let w2: WeightMap = BTreeMap::from([(m2, TwistWeight::var(std_vars::t(2)))]);
    for p in 0..=2u16 {
        for q in 0..=2u16 {
            let x = AlgebraElement::monomial(&ctx, OscMonomial::single(m1, p, p), MultiPoly::one(&ctx));
            let y = AlgebraElement::monomial(&ctx, OscMonomial::single(m2, q, q), MultiPoly::one(&ctx));
            let joint = twisted_trace_eval(&x.mul(&y), &weights, &values).unwrap();
            let tx = twisted_trace_eval(&x, &w1, &values).unwrap();
            let ty = twisted_trace_eval(&y, &w2, &values).unwrap();
            assert_eq!(joint, tx.mul(&ty));
        }
    }
}

#[test]
fn trace_number_grading() {
    // any p != q in some mode kills the trace
    let ctx = standard_context(2);
    let m = plain(1);
    let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
    let values = BTreeMap::from([(std_vars::t(1), rat(1, 2))]);
    for (p, q) in [(1u16, 0u16), (0, 1), (2, 1), (3, 1)] {
        let e = AlgebraElement::monomial(&ctx, OscMonomial::single(m, p, q), MultiPoly::one(&ctx));
        assert!(twisted_trace_eval(&e, &weights, &values).unwrap().is_zero());
    }
}

#[test]
fn similarity_substitution_against_fock_conjugation() {
    // The spinor-factorisation shift a@1 -> a@1 + abar@2 against conjugation
    // by exp(B), B = -abar1 abar2, at cutoff 6: E rep(x) = rep(S(x)) E on the
    // rows with occupations <= cutoff - 2.
    let ctx = standard_context(2);
    let m1 = OscMode::Spinor {
        reg: Register::One,
        i: 1,
        j: 2,
    };
    let m2 = OscMode::Spinor {
        reg: Register::Two,
        i: 1,
        j: 2,
    };
    let modes = [m1, m2];
    let cutoff = 6usize;
    let eval = BTreeMap::new();
    let rules = ortholax::lax::s_rules_spinor(&ctx, 2);
    rules.check_homomorphism(&ctx).unwrap();
    let bilinear = AlgebraElement::creator(&ctx, m1)
        .mul(&AlgebraElement::creator(&ctx, m2))
        .neg();
    let e = to_truncated_fock(&bilinear, cutoff, &modes, &eval)
        .unwrap()
        .exp_nilpotent();
    // check the generators of both registers plus a composite element
    let mut samples: Vec<AlgebraElement> = Vec::new();
    for m in [m1, m2] {
        samples.push(AlgebraElement::annihilator(&ctx, m));
        samples.push(AlgebraElement::creator(&ctx, m));
    }
    samples.push(
        AlgebraElement::number_op(&ctx, m1).mul(&AlgebraElement::annihilator(&ctx, m2)),
    );
    let safe_rows: Vec<usize> = {
        // rows with all occupations <= cutoff - 2
        let probe = FockOperator::identity(cutoff, modes.to_vec());
        probe.interior_columns(cutoff - 2)
    };
    for x in samples {
        let img = rules.apply(&x).unwrap();
        let lhs = e.mul(&to_truncated_fock(&x, cutoff, &modes, &eval).unwrap());
        let rhs = to_truncated_fock(&img, cutoff, &modes, &eval)
            .unwrap()
            .mul(&e);
        // compare rows: transpose trick via column comparison of transposes
        // is unnecessary; compare entries directly on safe rows
        for &r in &safe_rows {
            for c in 0..lhs.dim {
                assert_eq!(lhs.at(r, c), rhs.at(r, c), "row {r} col {c}");
            }
        }
    }
}

#[test]
fn quad_similarity_substitution_against_fock_conjugation() {
    // The quad-factorisation rules at r=3 against exp(B) with
    // B = -(abar_in1 abar_in2) - sum_pq abar_v2(p) Abar1_(-p,q) a_v1(q),
    // applied to sparse Fock vectors: E(g v) = S(g)(E v) on components with
    // occupations <= cutoff - 2.
    use ortholax::fock::{apply_to_vector, exp_apply_to_vector, FockVector};
    let r = 3u8;
    let ctx = standard_context(r);
    let inner1 = OscMode::Spinor {
        reg: Register::One,
        i: 1,
        j: 2,
    };
    let inner2 = OscMode::Spinor {
        reg: Register::Two,
        i: 1,
        j: 2,
    };
    let v1 = |k: u8| OscMode::Spinor {
        reg: Register::One,
        i: k,
        j: r,
    };
    let v2 = |k: u8| OscMode::Spinor {
        reg: Register::Two,
        i: k,
        j: r,
    };
    let modes = vec![inner1, v1(1), v1(2), inner2, v2(1), v2(2)];
    let cutoff = 6usize;
    let eval = BTreeMap::new();
    let rules = ortholax::lax::s_rules_quad(&ctx, r);
    rules.check_homomorphism(&ctx).unwrap();
    // bilinear matching the printed shifts: the v-coupling contracts
    // Abar1_(-p,q) = abar_in1 at (p,q)=(2,1) and -abar_in1 at (1,2)
    let ad = |m: OscMode| AlgebraElement::creator(&ctx, m);
    let an = |m: OscMode| AlgebraElement::annihilator(&ctx, m);
    let bilinear = ad(inner1)
        .mul(&ad(inner2))
        .neg()
        .sub(&ad(v2(2)).mul(&ad(inner1)).mul(&an(v1(1))))
        .add(&ad(v2(1)).mul(&ad(inner1)).mul(&an(v1(2))));
    let filter = |v: &FockVector, bound: usize| -> FockVector {
        v.iter()
            .filter(|(occ, _)| occ.iter().all(|&o| o <= bound))
            .map(|(o, a)| (o.clone(), a.clone()))
            .collect()
    };
    // sample start vectors: vacuum plus a few excited states
    let mut starts: Vec<FockVector> = vec![ortholax::fock::fock_vacuum(6)];
    for slot in 0..6 {
        let mut occ = vec![0usize; 6];
        occ[slot] = 2;
        occ[(slot + 1) % 6] = 1;
        starts.push(BTreeMap::from([(occ, rat(2, 3))]));
    }
    for g in [
        an(inner1),
        an(inner2),
        ad(v1(1)),
        ad(v1(2)),
        an(v2(1)),
        an(v2(2)),
    ] {
        let img = rules.apply(&g).unwrap();
        for v in &starts {
            let gv = apply_to_vector(&g, &modes, v, cutoff, &eval).unwrap();
            let lhs = exp_apply_to_vector(&bilinear, &modes, &gv, cutoff, &eval).unwrap();
            let ev = exp_apply_to_vector(&bilinear, &modes, v, cutoff, &eval).unwrap();
            let rhs = apply_to_vector(&img, &modes, &ev, cutoff, &eval).unwrap();
            assert_eq!(
                filter(&lhs, cutoff - 2),
                filter(&rhs, cutoff - 2),
                "generator {g} on {v:?}"
            );
        }
    }
}

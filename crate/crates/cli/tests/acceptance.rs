//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Every verdict is exact (zero residual); the only numerical tolerance in
//! play is the 1e-12 relative-error bound of the trace-series oracle, which
//! is itself evaluated in exact arithmetic.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::json;

use ortholax::context::{standard_context, std_vars};
use ortholax::fock::{apply_to_vector, exp_apply_to_vector, fock_vacuum, to_truncated_fock};
use ortholax::lax::{self, LaxFamily, LaxSpec, LimitFamily};
use ortholax::matrix::{extract_generators, extract_quadratic, OpMatrix};
use ortholax::osc::{AlgebraElement, OscMode, OscMonomial, Register};
use ortholax::poly::{rat, rat_abs, rat_int, MultiPoly, Rational};
use ortholax::prng::SplitMix64;
use ortholax::qsystem::{
    check_commuting_family, q_operator, qq_check, transfer_matrix, ChainSpec, QFamily, QQOptions,
    QQRelation,
};
use ortholax::trace::{twisted_trace_eval, TwistWeight, WeightMap};
use ortholax::verify::{
    check_appendix, check_characteristic, check_characteristic_fundamental_numeric,
    check_factorization, check_g_relation, check_invariance, check_limit, check_rtt,
    check_so2r_relations, check_yangian_components, mutate_flip_first_offdiag,
    spinor_ltl_reference, CharacteristicRep, FactorizationId,
};

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {}: {} ({detail})",
        criterion,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn build_pair(spec: &LaxSpec) -> (ortholax::Ctx, OpMatrix, OpMatrix) {
    let ctx = standard_context(spec.rank);
    let x = MultiPoly::var(&ctx, std_vars::X);
    let y = MultiPoly::var(&ctx, std_vars::Y);
    let lx = lax::build_lax(&ctx, spec, &x).unwrap();
    let ly = lax::build_lax(&ctx, spec, &y).unwrap();
    (ctx, lx, ly)
}

fn default_twists(rank: u8) -> Vec<Rational> {
    let primes = [2i64, 3, 5, 7];
    (0..rank as usize).map(|k| rat(1, primes[k])).collect()
}

fn second_twists(rank: u8) -> Vec<Rational> {
    let pairs = [(2i64, 3i64), (3, 5), (5, 7), (7, 11)];
    (0..rank as usize)
        .map(|k| rat(pairs[k].0, pairs[k].1))
        .collect()
}

#[test]
fn criterion_01_rtt_spinor_family() {
    let mut detail = String::new();
    let mut all = true;
    for r in 2..=5u8 {
        let spec = LaxSpec::new(LaxFamily::SpinorDegenerate, r);
        let (ctx, lx, ly) = build_pair(&spec);
        let t0 = Instant::now();
        let rep = check_rtt(&ctx, &lx, &ly, r, json!({ "rank": r }));
        all &= rep.passed();
        detail.push_str(&format!("r={r}: {:?}; ", t0.elapsed()));
    }
    verdict("1 (RTT exactness, spinor family r=2..5)", all, &detail);
}

#[test]
fn criterion_02_rtt_fundamental_family() {
    let mut detail = String::new();
    let mut all = true;
    for r in 3..=4u8 {
        let spec = LaxSpec::new(LaxFamily::FundDegenerate, r);
        let (ctx, lx, ly) = build_pair(&spec);
        let t0 = Instant::now();
        let rep = check_rtt(&ctx, &lx, &ly, r, json!({ "rank": r }));
        all &= rep.passed();
        detail.push_str(&format!("r={r}: {:?}; ", t0.elapsed()));
    }
    verdict("2 (RTT exactness, fundamental family r=3,4)", all, &detail);
}

#[test]
fn criterion_03_d3_matrices() {
    let ctx = standard_context(3);
    let mut all = true;
    for family in [LaxFamily::D3Level3, LaxFamily::D3Level2] {
        let spec = LaxSpec::new(family, 3);
        let (cx, lx, ly) = build_pair(&spec);
        all &= check_rtt(&cx, &lx, &ly, 3, json!({ "family": family.to_string() })).passed();
    }
    // renaming dictionary: level-3 specialisation equals the general family
    let z = MultiPoly::var(&ctx, std_vars::Z);
    let printed = lax::d3_level3(&ctx, &z).rename_modes(&lax::d3_level3_dictionary(Register::None));
    all &= printed == lax::spinor_degenerate(&ctx, 3, Register::None, &z);
    let printed2 =
        lax::d3_level2(&ctx, &z).rename_modes(&lax::d3_level2_dictionary(Register::None));
    all &= printed2 == lax::fund_degenerate(&ctx, 3, Register::None, &z);
    verdict(
        "3 (D3 matrices solve RTT; renaming dictionary matches)",
        all,
        "level3+level2, dictionary to spinor/fund families",
    );
}

#[test]
fn criterion_04_characteristic_and_structure() {
    let t0 = Instant::now();
    let mut all = true;
    let mut detail = String::new();
    for r in 3..=5u8 {
        let ctx = standard_context(r);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let s = MultiPoly::var(&ctx, std_vars::S);
        let n = MultiPoly::var(&ctx, std_vars::N);
        // so(2r) relations from both realisations
        let lsf = lax::spinor_full(&ctx, r, Register::None, &z, &s);
        let f1 = extract_generators(&lsf, std_vars::Z).unwrap();
        all &= check_so2r_relations(&ctx, &f1, json!({ "rank": r })).passed();
        let lff = lax::fund_full(&ctx, r, Register::None, &z, None, &n);
        let (f2, _) = extract_quadratic(&lff, std_vars::Z).unwrap();
        all &= check_so2r_relations(&ctx, &f2, json!({ "rank": r })).passed();
        // characteristic identities, symbolic labels
        all &= check_characteristic(&ctx, CharacteristicRep::Spinor, r, json!({ "rank": r }))
            .unwrap()
            .passed();
        all &= check_characteristic(&ctx, CharacteristicRep::Fundamental, r, json!({ "rank": r }))
            .unwrap()
            .passed();
        all &= check_characteristic_fundamental_numeric(&ctx, r, json!({ "rank": r })).passed();
        // G-relation
        all &= check_g_relation(&ctx, r, false, json!({ "rank": r })).unwrap().passed();
        detail.push_str(&format!("r={r} ok; "));
    }
    detail.push_str(&format!("total {:?}", t0.elapsed()));
    verdict(
        "4 (so2r relations, characteristic identities, G-relation, r=3,4,5)",
        all,
        &detail,
    );
}

#[test]
fn criterion_05_factorizations_and_limits() {
    let mut all = true;
    let mut detail = String::new();
    let t0 = Instant::now();
    for r in 3..=4u8 {
        let ctx = standard_context(r);
        for id in [
            FactorizationId::Spinor,
            FactorizationId::Quad,
            FactorizationId::Fund,
        ] {
            all &= check_factorization(&ctx, id, r, false, json!({ "rank": r }))
                .unwrap()
                .passed();
        }
        for fam in [LimitFamily::Spinor, LimitFamily::Fundamental] {
            all &= check_limit(&ctx, fam, r).unwrap().passed();
        }
        detail.push_str(&format!("r={r} ok; "));
    }
    detail.push_str(&format!("total {:?}", t0.elapsed()));
    verdict("5 (all three factorisations r=3,4; both scaled limits)", all, &detail);
}

#[test]
fn criterion_06_appendix() {
    let mut all = true;
    for r in 2..=4u8 {
        let ctx = standard_context(r);
        all &= check_appendix(&ctx, r, json!({ "rank": r })).unwrap().passed();
    }
    verdict(
        "6 (basis change: SKS^-1 = Q r=2..4, F<->M round trip, M-relations)",
        all,
        "includes the summed identification",
    );
}

#[test]
fn criterion_07_commuting_family() {
    let mut all = true;
    let mut detail = String::new();
    let t0 = Instant::now();
    for (rank, lengths) in [(3u8, vec![1usize, 2]), (4, vec![1])] {
        for &length in &lengths {
            for twists in [default_twists(rank), second_twists(rank)] {
                let ctx = standard_context(rank);
                let spec = ChainSpec::new(rank, length, twists).unwrap();
                let t = transfer_matrix(&ctx, &spec, std_vars::Z).unwrap();
                let qs =
                    q_operator(&ctx, &spec, &QFamily::Spinor { minus: vec![] }, std_vars::Z)
                        .unwrap();
                let qf = q_operator(
                    &ctx,
                    &spec,
                    &QFamily::Fund { bar: false, node: None },
                    std_vars::Z,
                )
                .unwrap();
                let rep = check_commuting_family(
                    &[("T".into(), t), ("Qs".into(), qs), ("Qf".into(), qf)],
                    json!({ "rank": rank, "length": length }),
                );
                all &= rep.passed();
            }
            detail.push_str(&format!("r={rank} N={length} ok; "));
        }
    }
    detail.push_str(&format!("total {:?}", t0.elapsed()));
    verdict(
        "7 (commuting family [T,T], [T,Qs], [T,Qf]; two twist points)",
        all,
        &detail,
    );
}

#[test]
fn criterion_08_qq_relations() {
    let mut all = true;
    let mut detail = String::new();
    for length in [1usize, 2] {
        for twists in [default_twists(4), second_twists(4)] {
            let ctx = standard_context(4);
            let spec = ChainSpec::new(4, length, twists).unwrap();
            let t0 = Instant::now();
            let rep = qq_check(
                &ctx,
                &spec,
                &[QQRelation::Spinor1, QQRelation::Spinor2, QQRelation::Fund],
                &QQOptions::default(),
            )
            .unwrap();
            all &= rep.passed();
            detail.push_str(&format!("N={length}: {:?}; ", t0.elapsed()));
        }
    }
    verdict(
        "8 (D4 QQ-relations, N=1,2, z and u formal, two twist points)",
        all,
        &detail,
    );
}

#[test]
fn criterion_09_oracle_suite() {
    let mut all = true;
    // (a) wick vs truncated Fock, 100 randomized degree-<=4 cases
    let ctx = standard_context(2);
    let mut rng = SplitMix64::new(20260808);
    let modes = [OscMode::Plain { idx: 1 }, OscMode::Plain { idx: 2 }];
    let cutoff = 6usize;
    let eval = BTreeMap::from([(std_vars::Z, rat(3, 7))]);
    let random_element = |rng: &mut SplitMix64, terms: usize| {
        let mut e = AlgebraElement::zero(&ctx);
        for _ in 0..terms {
            let mut entries = Vec::new();
            for &m in &modes {
                let p = rng.below(3) as u16;
                let q = rng.below(3) as u16;
                if p > 0 || q > 0 {
                    entries.push((m, p, q));
                }
            }
            let mut coeff = MultiPoly::constant(&ctx, rng.small_rational(true));
            if rng.below(3) == 0 {
                coeff = coeff.mul(&MultiPoly::var(&ctx, std_vars::Z));
            }
            e = e.add(&AlgebraElement::monomial(&ctx, OscMonomial(entries), coeff));
        }
        e
    };
    let mut cases = 0usize;
    for _ in 0..100 {
        let na = 1 + rng.below(3) as usize;
        let a = random_element(&mut rng, na);
        let nb = 1 + rng.below(3) as usize;
        let b = random_element(&mut rng, nb);
        let need = (a.max_creation_power() + b.max_creation_power()) as usize;
        if need > cutoff {
            continue;
        }
        cases += 1;
        let prod = a.checked_mul(&b).unwrap();
        let ra = to_truncated_fock(&a, cutoff, &modes, &eval).unwrap();
        let rb = to_truncated_fock(&b, cutoff, &modes, &eval).unwrap();
        let rp = to_truncated_fock(&prod, cutoff, &modes, &eval).unwrap();
        let cols = rp.interior_columns(cutoff - need);
        all &= rp.agrees_on_columns(&ra.mul(&rb), &cols);
    }
    // (b) closed-form trace vs truncated series at t = 1/2, cutoff 60
    let m = modes[0];
    #[allow(unused_assignments)]
    let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
    let values = BTreeMap::from([(std_vars::t(1), rat(1, 2))]);
    let tol = Rational::new(1.into(), 1_000_000_000_000i64.into());
    for p in 0..=3u16 {
        let e = AlgebraElement::monomial(&ctx, OscMonomial::single(m, p, p), MultiPoly::one(&ctx));
        let closed = twisted_trace_eval(&e, &weights, &values)
            .unwrap()
            .constant_term();
        let mut series = Rational::from_integer(0.into());
        let t = rat(1, 2);
        let mut tk = Rational::from_integer(1.into());
        for k in 0..=60i64 {
            let mut fall = Rational::from_integer(1.into());
            for j in 0..p as i64 {
                fall *= rat_int(k - j);
            }
            series += fall * &tk;
            tk *= &t;
        }
        let rel = rat_abs(&((&closed - &series) / &closed));
        all &= rel < tol;
    }
    // (c) substitution rules vs truncated-Fock conjugation at cutoff 6
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
    let submodes = [m1, m2];
    let rules = lax::s_rules_spinor(&ctx, 2);
    all &= rules.check_homomorphism(&ctx).is_ok();
    let bilinear = AlgebraElement::creator(&ctx, m1)
        .mul(&AlgebraElement::creator(&ctx, m2))
        .neg();
    let noeval = BTreeMap::new();
    let vac = fock_vacuum(2);
    let mut starts = vec![vac];
    for slot in 0..2 {
        let mut occ = vec![0usize; 2];
        occ[slot] = 2;
        starts.push(BTreeMap::from([(occ, rat(1, 1))]));
    }
    for g in [
        AlgebraElement::annihilator(&ctx, m1),
        AlgebraElement::annihilator(&ctx, m2),
        AlgebraElement::creator(&ctx, m1),
    ] {
        let img = rules.apply(&g).unwrap();
        for v in &starts {
            let gv = apply_to_vector(&g, &submodes, v, 6, &noeval).unwrap();
            let lhs = exp_apply_to_vector(&bilinear, &submodes, &gv, 6, &noeval).unwrap();
            let ev = exp_apply_to_vector(&bilinear, &submodes, v, 6, &noeval).unwrap();
            let rhs = apply_to_vector(&img, &submodes, &ev, 6, &noeval).unwrap();
            let filt = |x: &ortholax::fock::FockVector| -> ortholax::fock::FockVector {
                x.iter()
                    .filter(|(occ, _)| occ.iter().all(|&o| o <= 4))
                    .map(|(o, a)| (o.clone(), a.clone()))
                    .collect()
            };
            all &= filt(&lhs) == filt(&rhs);
        }
    }
    verdict(
        "9 (oracle suite: Fock products, trace series, similarity conjugation)",
        all,
        &format!("{cases} randomized Fock cases"),
    );
}

#[test]
fn criterion_10_mutation_suite() {
    let mut all = true;
    let mut detail = String::new();
    // rtt + yangian: sign flip must fail
    {
        let r = 3u8;
        let ctx = standard_context(r);
        let spec = LaxSpec::new(LaxFamily::SpinorDegenerate, r);
        let x = MultiPoly::var(&ctx, std_vars::X);
        let y = MultiPoly::var(&ctx, std_vars::Y);
        let lx = mutate_flip_first_offdiag(&lax::build_lax(&ctx, &spec, &x).unwrap());
        let ly = mutate_flip_first_offdiag(&lax::build_lax(&ctx, &spec, &y).unwrap());
        let failed_rtt = !check_rtt(&ctx, &lx, &ly, r, json!({ "mutated": true })).passed();
        let failed_yangian = !check_yangian_components(
            &ctx,
            &lx,
            &ly,
            r,
            Some(spinor_ltl_reference(&ctx, r, Register::None)),
            json!({ "mutated": true }),
        )
        .passed();
        all &= failed_rtt && failed_yangian;
        detail.push_str("rtt+yangian sign-flip fail ok; ");
    }
    // invariance: E_(1,1) violates BB' = I
    {
        let ctx = standard_context(3);
        let bad = ortholax::matrix::embed_unit(&ctx, 1, 1, 3).unwrap();
        all &= !check_invariance(&ctx, &bad, 3, json!({ "mutated": true })).passed();
        detail.push_str("invariance fail ok; ");
    }
    // g-relation: dropping the kappa/2 F term must fail
    {
        let ctx = standard_context(3);
        all &= !check_g_relation(&ctx, 3, true, json!({ "mutated": true }))
            .unwrap()
            .passed();
        detail.push_str("g-relation fail ok; ");
    }
    // factorization: perturbed x1/x2 must fail
    {
        let ctx = standard_context(3);
        all &= !check_factorization(&ctx, FactorizationId::Fund, 3, true, json!({ "mutated": true }))
            .unwrap()
            .passed();
        detail.push_str("fund shifts fail ok; ");
    }
    // qq: wrong-node Q must fail; degenerate twists rejected
    {
        let ctx = standard_context(4);
        let spec = ChainSpec::new(4, 1, default_twists(4)).unwrap();
        let rep = qq_check(
            &ctx,
            &spec,
            &[QQRelation::Spinor2],
            &QQOptions {
                check_commutation: false,
                wrong_node: true,
            },
        )
        .unwrap();
        all &= !rep.passed();
        all &= ChainSpec::new(4, 1, vec![rat(1, 2), rat(1, 3), rat(1, 5), rat(1, 2)]).is_err();
        detail.push_str("qq wrong-node fail + degenerate twists rejected ok");
    }
    verdict("10 (mutation suite: every check family fails on broken input)", all, &detail);
}

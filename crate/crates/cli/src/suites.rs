//! Named check bundles. `paper-core` is the fast everyday set, `paper-full`
//! covers every acceptance criterion, `stretch` adds the long-runtime
//! members behind `--long`.

use serde_json::json;

use ortholax::context::{standard_context, std_vars};
use ortholax::lax::{self, LaxFamily, LaxSpec, LimitFamily, ScalarLabel};
use ortholax::matrix::{b_alpha, extract_generators, extract_quadratic};
use ortholax::osc::Register;
use ortholax::poly::MultiPoly;
use ortholax::qsystem::{
    check_commuting_family, check_twist_covariance, q_operator, qq_check, transfer_matrix,
    ChainSpec, QFamily, QQOptions, QQRelation,
};
use ortholax::verify::{
    check_absorption, check_appendix, check_characteristic,
    check_characteristic_fundamental_numeric, check_factorization, check_g_relation,
    check_invariance, check_limit, check_quad_mode_dictionary, check_rtt, check_so2r_relations,
    check_weight_action, check_yangian_components, mutate_flip_first_offdiag,
    spinor_ltl_reference, CharacteristicRep, CheckReport, FactorizationId, Reporter,
};

use crate::SuiteName;

type Job = Box<dyn FnOnce() -> Result<Vec<CheckReport>, String> + Send>;

fn rtt_job(family: LaxFamily, rank: u8, mutate: bool) -> Job {
    Box::new(move || {
        let mut spec = LaxSpec::new(family, rank);
        if family == LaxFamily::SpinorFull || family == LaxFamily::QuadWithSpinor {
            spec = spec.with_s(ScalarLabel::symbolic());
        }
        let ctx = standard_context(rank);
        let x = MultiPoly::var(&ctx, std_vars::X);
        let y = MultiPoly::var(&ctx, std_vars::Y);
        let mut lx = lax::build_lax(&ctx, &spec, &x).map_err(|e| e.to_string())?;
        let mut ly = lax::build_lax(&ctx, &spec, &y).map_err(|e| e.to_string())?;
        if mutate {
            lx = mutate_flip_first_offdiag(&lx);
            ly = mutate_flip_first_offdiag(&ly);
        }
        Ok(vec![check_rtt(
            &ctx,
            &lx,
            &ly,
            rank,
            json!({ "family": family.to_string(), "rank": rank, "mutated": mutate }),
        )])
    })
}

fn yangian_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let spec = LaxSpec::new(LaxFamily::SpinorDegenerate, rank);
        let x = MultiPoly::var(&ctx, std_vars::X);
        let y = MultiPoly::var(&ctx, std_vars::Y);
        let lx = lax::build_lax(&ctx, &spec, &x).map_err(|e| e.to_string())?;
        let ly = lax::build_lax(&ctx, &spec, &y).map_err(|e| e.to_string())?;
        let reference = Some(spinor_ltl_reference(&ctx, rank, Register::None));
        Ok(vec![check_yangian_components(
            &ctx,
            &lx,
            &ly,
            rank,
            reference,
            json!({ "family": "spinor-degenerate", "rank": rank }),
        )])
    })
}

fn invariance_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let mut reports = Vec::new();
        for bits in 0..1u32 << rank {
            let signs: Vec<i8> = (0..rank)
                .map(|k| if bits >> k & 1 == 1 { -1 } else { 1 })
                .collect();
            let b = b_alpha(&ctx, &signs, rank).map_err(|e| e.to_string())?;
            reports.push(check_invariance(&ctx, &b, rank, json!({ "signs": signs })));
        }
        for i in 1..=rank {
            for j in i + 1..=rank {
                let b = ortholax::matrix::b_tilde(&ctx, i, j, rank).map_err(|e| e.to_string())?;
                reports.push(check_invariance(&ctx, &b, rank, json!({ "swap": [i, j] })));
            }
        }
        Ok(reports)
    })
}

fn characteristic_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        Ok(vec![
            check_characteristic(&ctx, CharacteristicRep::Spinor, rank, json!({ "rep": "spinor", "rank": rank }))
                .map_err(|e| e.to_string())?,
            check_characteristic(&ctx, CharacteristicRep::Fundamental, rank, json!({ "rep": "fundamental", "rank": rank }))
                .map_err(|e| e.to_string())?,
            check_characteristic_fundamental_numeric(&ctx, rank, json!({ "rank": rank, "n": 1 })),
            check_g_relation(&ctx, rank, false, json!({ "rank": rank })).map_err(|e| e.to_string())?,
        ])
    })
}

fn factorization_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let mut reports = Vec::new();
        for id in [FactorizationId::Spinor, FactorizationId::Quad, FactorizationId::Fund] {
            reports.push(
                check_factorization(&ctx, id, rank, false, json!({ "id": format!("{id:?}"), "rank": rank }))
                    .map_err(|e| e.to_string())?,
            );
        }
        reports.push(check_quad_mode_dictionary(&ctx, rank));
        for fam in [LimitFamily::Spinor, LimitFamily::Fundamental] {
            reports.push(check_limit(&ctx, fam, rank).map_err(|e| e.to_string())?);
        }
        Ok(reports)
    })
}

fn so2r_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let s = MultiPoly::var(&ctx, std_vars::S);
        let n = MultiPoly::var(&ctx, std_vars::N);
        let lsf = lax::spinor_full(&ctx, rank, Register::None, &z, &s);
        let f1 = extract_generators(&lsf, std_vars::Z).map_err(|e| e.to_string())?;
        let lff = lax::fund_full(&ctx, rank, Register::None, &z, None, &n);
        let (f2, _) = extract_quadratic(&lff, std_vars::Z).map_err(|e| e.to_string())?;
        Ok(vec![
            check_so2r_relations(&ctx, &f1, json!({ "source": "spinor-full", "rank": rank })),
            check_so2r_relations(&ctx, &f2, json!({ "source": "fund-full", "rank": rank })),
            check_weight_action(&ctx, rank).map_err(|e| e.to_string())?,
        ])
    })
}

fn appendix_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        Ok(vec![check_appendix(&ctx, rank, json!({ "rank": rank }))
            .map_err(|e| e.to_string())?])
    })
}

fn absorption_job(rank: u8) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let ls = lax::spinor_degenerate(&ctx, rank, Register::None, &z);
        let lf = lax::fund_degenerate(&ctx, rank, Register::None, &z);
        Ok(vec![
            check_absorption(
                &ctx,
                &ls,
                &lax::weights_spinor(rank, Register::None),
                rank,
                json!({ "family": "spinor", "rank": rank }),
            ),
            check_absorption(
                &ctx,
                &lf,
                &lax::weights_fund(rank, Register::None),
                rank,
                json!({ "family": "fund", "rank": rank }),
            ),
        ])
    })
}

fn commute_job(rank: u8, length: usize, twists: Vec<ortholax::poly::Rational>) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let spec = crate::chain(rank, length, twists)?;
        let t = transfer_matrix(&ctx, &spec, std_vars::Z).map_err(|e| e.to_string())?;
        let qs = q_operator(&ctx, &spec, &QFamily::Spinor { minus: vec![] }, std_vars::Z)
            .map_err(|e| e.to_string())?;
        let qf = q_operator(&ctx, &spec, &QFamily::Fund { bar: false, node: None }, std_vars::Z)
            .map_err(|e| e.to_string())?;
        Ok(vec![check_commuting_family(
            &[("T".into(), t), ("Qs".into(), qs), ("Qf".into(), qf)],
            json!({
                "rank": rank,
                "length": length,
                "twists": spec.twists.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            }),
        )])
    })
}

fn covariance_job(rank: u8, twists: Vec<ortholax::poly::Rational>) -> Job {
    Box::new(move || {
        let ctx = standard_context(rank);
        let spec = crate::chain(rank, 1, twists)?;
        let mut signs = vec![1i8; rank as usize];
        signs[0] = -1;
        Ok(vec![
            check_twist_covariance(&ctx, &spec, &signs).map_err(|e| e.to_string())?,
        ])
    })
}

fn qq_job(length: usize, twists: Vec<ortholax::poly::Rational>, wrong_node: bool) -> Job {
    Box::new(move || {
        let ctx = standard_context(4);
        let spec = crate::chain(4, length, twists)?;
        Ok(vec![qq_check(
            &ctx,
            &spec,
            &[QQRelation::Spinor1, QQRelation::Spinor2, QQRelation::Fund],
            &QQOptions {
                check_commutation: true,
                wrong_node,
            },
        )
        .map_err(|e| e.to_string())?])
    })
}

fn mutation_jobs() -> Vec<(String, Job, bool)> {
    // (name, job, expected_pass)
    let mut jobs: Vec<(String, Job, bool)> = Vec::new();
    jobs.push((
        "mutation-rtt-sign-flip".into(),
        rtt_job(LaxFamily::SpinorDegenerate, 3, true),
        false,
    ));
    jobs.push((
        "mutation-invariance-e11".into(),
        Box::new(|| {
            let ctx = standard_context(3);
            let bad = ortholax::matrix::embed_unit(&ctx, 1, 1, 3).map_err(|e| e.to_string())?;
            Ok(vec![check_invariance(&ctx, &bad, 3, json!({ "mutated": true }))])
        }),
        false,
    ));
    jobs.push((
        "mutation-g-relation-drop-term".into(),
        Box::new(|| {
            let ctx = standard_context(3);
            Ok(vec![check_g_relation(&ctx, 3, true, json!({ "mutated": true }))
                .map_err(|e| e.to_string())?])
        }),
        false,
    ));
    jobs.push((
        "mutation-fund-shifts-perturbed".into(),
        Box::new(|| {
            let ctx = standard_context(3);
            Ok(vec![check_factorization(
                &ctx,
                FactorizationId::Fund,
                3,
                true,
                json!({ "mutated": true }),
            )
            .map_err(|e| e.to_string())?])
        }),
        false,
    ));
    jobs.push((
        "mutation-qq-wrong-node".into(),
        Box::new(|| {
            let ctx = standard_context(4);
            let spec = crate::chain(4, 1, crate::default_twists_pub(4))?;
            Ok(vec![qq_check(
                &ctx,
                &spec,
                &[QQRelation::Spinor2],
                &QQOptions {
                    check_commutation: false,
                    wrong_node: true,
                },
            )
            .map_err(|e| e.to_string())?])
        }),
        false,
    ));
    jobs.push((
        "mutation-degenerate-twists-rejected".into(),
        Box::new(|| {
            let mut rep = Reporter::new("mutation-degenerate-twists", json!({}));
            let t = vec![
                ortholax::poly::rat(1, 2),
                ortholax::poly::rat(1, 3),
                ortholax::poly::rat(1, 5),
                ortholax::poly::rat(1, 2),
            ];
            if ChainSpec::new(4, 1, t).is_ok() {
                rep.fail_note("degenerate twist point was not rejected".to_string());
            }
            Ok(vec![rep.finish()])
        }),
        true,
    ));
    jobs
}

pub(crate) fn run_suite(name: SuiteName, long: bool) -> Result<Vec<CheckReport>, String> {
    let t1 = crate::default_twists_pub(4);
    let t2 = crate::second_twist_point(4);
    let mut jobs: Vec<(String, Job, bool)> = Vec::new();
    let mut push = |label: &str, job: Job| {
        // expected pass
        jobsx(&mut jobs, label, job);
    };
    fn jobsx(jobs: &mut Vec<(String, Job, bool)>, label: &str, job: Job) {
        jobs.push((label.to_string(), job, true));
    }
    match name {
        SuiteName::PaperCore => {
            for r in 2..=4 {
                push(&format!("rtt-spinor-r{r}"), rtt_job(LaxFamily::SpinorDegenerate, r, false));
            }
            push("rtt-fund-r3", rtt_job(LaxFamily::FundDegenerate, 3, false));
            push("rtt-d3-level3", rtt_job(LaxFamily::D3Level3, 3, false));
            push("rtt-d3-level2", rtt_job(LaxFamily::D3Level2, 3, false));
            push("yangian-r3", yangian_job(3));
            push("invariance-r3", invariance_job(3));
            push("characteristic-r3", characteristic_job(3));
            push("factorizations-r3", factorization_job(3));
            push("so2r-r3", so2r_job(3));
            push("appendix-r2", appendix_job(2));
            push("appendix-r3", appendix_job(3));
            push("absorption-r3", absorption_job(3));
            push(
                "commute-r3-n1",
                commute_job(3, 1, crate::default_twists_pub(3)),
            );
            push("covariance-r3", covariance_job(3, crate::default_twists_pub(3)));
            push("qq-n1", qq_job(1, t1.clone(), false));
            for (label, job, expect) in mutation_jobs() {
                jobs.push((label, job, expect));
            }
        }
        SuiteName::PaperFull => {
            for r in 2..=5 {
                push(&format!("rtt-spinor-r{r}"), rtt_job(LaxFamily::SpinorDegenerate, r, false));
            }
            for r in 3..=4 {
                push(&format!("rtt-fund-r{r}"), rtt_job(LaxFamily::FundDegenerate, r, false));
            }
            push("rtt-d3-level3", rtt_job(LaxFamily::D3Level3, 3, false));
            push("rtt-d3-level2", rtt_job(LaxFamily::D3Level2, 3, false));
            push("yangian-r3", yangian_job(3));
            push("invariance-r3", invariance_job(3));
            push("invariance-r4", invariance_job(4));
            for r in 3..=5 {
                push(&format!("characteristic-r{r}"), characteristic_job(r));
            }
            push("factorizations-r3", factorization_job(3));
            push("factorizations-r4", factorization_job(4));
            for r in 3..=5 {
                push(&format!("so2r-r{r}"), so2r_job(r));
            }
            for r in 2..=4 {
                push(&format!("appendix-r{r}"), appendix_job(r));
            }
            push("absorption-r3", absorption_job(3));
            push("absorption-r4", absorption_job(4));
            push(
                "commute-r3-n1",
                commute_job(3, 1, crate::default_twists_pub(3)),
            );
            push(
                "commute-r3-n2",
                commute_job(3, 2, crate::default_twists_pub(3)),
            );
            push(
                "commute-r3-n1-alt",
                commute_job(3, 1, crate::second_twist_point(3)),
            );
            push(
                "commute-r3-n2-alt",
                commute_job(3, 2, crate::second_twist_point(3)),
            );
            push("commute-r4-n1", commute_job(4, 1, t1.clone()));
            push("commute-r4-n1-alt", commute_job(4, 1, t2.clone()));
            push("covariance-r3", covariance_job(3, crate::default_twists_pub(3)));
            push("qq-n1", qq_job(1, t1.clone(), false));
            push("qq-n1-alt", qq_job(1, t2.clone(), false));
            push("qq-n2", qq_job(2, t1.clone(), false));
            push("qq-n2-alt", qq_job(2, t2.clone(), false));
            for (label, job, expect) in mutation_jobs() {
                jobs.push((label, job, expect));
            }
        }
        SuiteName::Stretch => {
            push("characteristic-r5", characteristic_job(5));
            push(
                "other-spinor-node-r3",
                Box::new(|| {
                    let ctx = standard_context(3);
                    Ok(vec![
                        ortholax::verify::check_other_spinor_node_weights(&ctx, 3)
                            .map_err(|e| e.to_string())?,
                    ])
                }),
            );
            if long {
                push("qq-n3", qq_job(3, t1.clone(), false));
            } else {
                jobs.push((
                    "qq-n3".to_string(),
                    Box::new(|| {
                        let mut rep = Reporter::new("qq", json!({ "length": 3, "skipped": true }));
                        rep.note("N=3 requires --long; skipped".to_string());
                        Ok(vec![rep.finish()])
                    }),
                    true,
                ));
            }
        }
    }

    let mut all = Vec::new();
    for (label, job, expect_pass) in jobs {
        let reports = job()?;
        for mut r in reports {
            r.params = json!({ "suite_member": label, "params": r.params, "expected": if expect_pass { "pass" } else { "fail" } });
            if !expect_pass {
                // a mutation member counts as suite-pass when the check fails
                let inverted = if r.passed() {
                    ortholax::verify::CheckStatus::Fail
                } else {
                    ortholax::verify::CheckStatus::Pass
                };
                if r.passed() {
                    r.notes.push("mutated input unexpectedly passed".to_string());
                } else {
                    r.witnesses.clear();
                    r.notes.push("mutated input failed as required".to_string());
                }
                r.status = inverted;
            }
            all.push(r);
        }
    }
    Ok(all)
}

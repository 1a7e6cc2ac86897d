//! Batch front-end: builds catalog objects, runs identity-check suites, and
//! emits machine-readable JSON reports plus canonical matrix dumps.
//!
//! Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ortholax::context::{standard_context, std_vars};
use ortholax::lax::{self, LaxFamily, LaxSpec, LimitFamily, ScalarLabel};
use ortholax::matrix::{b_alpha, b_tilde, extract_generators, extract_quadratic};
use ortholax::osc::Register;
use ortholax::poly::{parse_rational, MultiPoly, Rational};
use ortholax::prng::SplitMix64;
use ortholax::qsystem::{
    check_commuting_family, q_operator, q_zero, qq_check, transfer_matrix, ChainSpec, QFamily,
    QQOptions, QQRelation,
};
use ortholax::verify::{
    check_appendix, check_characteristic,
    check_characteristic_fundamental_numeric, check_factorization, check_g_relation,
    check_invariance, check_limit, check_quad_mode_dictionary, check_rtt, check_so2r_relations,
    check_weight_action, check_yangian_components, spinor_ltl_reference, CharacteristicRep,
    CheckReport, FactorizationId,
};

mod suites;

#[derive(Parser)]
#[command(name = "ortholax", version, about = "Exact verification of oscillator-type Lax matrices and Q-operators for so(2r)")]
struct Cli {
    /// Worker threads (default: available parallelism). Results are
    /// thread-count invariant.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report to this file (default: $ORTHOLAX_OUT/<id>.json
    /// if the env var is set, else stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print canonical matrix dumps where applicable.
    #[arg(long, global = true)]
    dump: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one identity check.
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// Build quantum-space operators and run commuting-family / QQ checks.
    Qsys {
        #[command(subcommand)]
        sub: QsysCommand,
    },
    /// Run a named bundle of checks.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
        /// Enable long-runtime members (the N=3 QQ stretch check).
        #[arg(long)]
        long: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    PaperCore,
    PaperFull,
    Stretch,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Lax family (d3-level3, d3-level2, spinor-degenerate, fund-degenerate,
    /// spinor-full, quad-with-spinor, fund-full).
    #[arg(long)]
    family: String,
    #[arg(long)]
    rank: u8,
    /// Sign vector for a B(alpha) conjugation, e.g. "+-+" or "1,-1,1".
    #[arg(long)]
    signs: Option<String>,
    /// Index pair for a Btilde conjugation, e.g. "1,3".
    #[arg(long)]
    swap: Option<String>,
}

#[derive(Subcommand, Clone)]
enum VerifyCheck {
    /// RTT relation for a catalog Lax matrix.
    Rtt {
        #[command(flatten)]
        family: FamilyArgs,
        /// Deliberately broken input that must fail (mutation surface).
        #[arg(long, value_enum)]
        mutate: Option<RttMutation>,
    },
    /// Componentwise Yangian commutation relations (denominators cleared).
    Yangian {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// B B' = I and [R(z), B x B] = 0 for the B(alpha) / Btilde matrices.
    Invariance {
        #[arg(long)]
        rank: u8,
        #[arg(long)]
        signs: Option<String>,
        #[arg(long)]
        swap: Option<String>,
    },
    /// Characteristic identity of the spinor or fundamental generators.
    Characteristic {
        #[arg(long, value_enum)]
        rep: RepKind,
        #[arg(long)]
        rank: u8,
    },
    /// The G-relation of the quadratic Lax expansion.
    GRelation {
        #[arg(long)]
        rank: u8,
        /// Drop the kappa/2 F term (mutation surface; must fail).
        #[arg(long)]
        mutate: bool,
    },
    /// One of the three factorisation identities.
    Factorization {
        #[arg(long, value_enum)]
        id: FactorId,
        #[arg(long)]
        rank: u8,
        /// Perturb the x1/x2 shifts by +1 (mutation surface; must fail).
        #[arg(long)]
        mutate: bool,
    },
    /// Scaled limit onto the degenerate family.
    Limit {
        #[arg(long, value_enum)]
        family: LimitKind,
        #[arg(long)]
        rank: u8,
    },
    /// so(2r) commutation relations of extracted generators.
    So2r {
        #[arg(long, value_enum)]
        source: So2rSource,
        #[arg(long)]
        rank: u8,
    },
    /// Basis-change consistency: component formulas, SKS^-1 = Q, F<->M map.
    Appendix {
        #[arg(long)]
        rank: u8,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RttMutation {
    FlipSign,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RepKind {
    Spinor,
    Fundamental,
}

#[derive(Clone, Copy, ValueEnum)]
enum FactorId {
    Spinor,
    Quad,
    Fund,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitKind {
    Spinor,
    Fundamental,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum So2rSource {
    SpinorFull,
    FundFull,
}

#[derive(Subcommand, Clone)]
enum QsysCommand {
    /// Build an operator and report its shape (dump with --dump).
    Build {
        #[arg(long)]
        rank: u8,
        #[arg(long)]
        length: usize,
        /// Comma-separated rational twists, e.g. 1/2,1/3,1/5.
        #[arg(long)]
        twists: Option<String>,
        #[arg(long, value_enum)]
        op: QsysOp,
        #[arg(long)]
        signs: Option<String>,
        /// Btilde node index for the fundamental Q variants.
        #[arg(long)]
        node: Option<u8>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Pairwise commutation of T, Q_s, Q_f at the twist point.
    Commute {
        #[arg(long)]
        rank: u8,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        twists: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The D4 QQ-relations with z and the shift kept formal.
    Qq {
        #[arg(long)]
        rank: u8,
        #[arg(long)]
        length: usize,
        /// spinor1, spinor2, fund or all.
        #[arg(long, default_value = "all")]
        relation: String,
        #[arg(long)]
        twists: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Permit the long-runtime N=3 case.
        #[arg(long)]
        long: bool,
        /// Wrong-node mutation (must fail).
        #[arg(long)]
        mutate: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QsysOp {
    Transfer,
    QSpinor,
    QFund,
    QFundBar,
    Q0,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_signs(s: &str, rank: u8) -> Result<Vec<i8>, String> {
    let signs: Vec<i8> = if s.contains(',') {
        s.split(',')
            .map(|x| x.trim().parse::<i8>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    } else {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(format!("bad sign char `{other}`")),
            })
            .collect::<Result<_, _>>()?
    };
    if signs.len() != rank as usize || signs.iter().any(|&x| x != 1 && x != -1) {
        return Err(format!("signs must be {rank} entries of +-1"));
    }
    Ok(signs)
}

fn parse_swap(s: &str) -> Result<(u8, u8), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("swap must be i,j".into());
    }
    let i = parts[0].trim().parse::<u8>().map_err(|e| e.to_string())?;
    let j = parts[1].trim().parse::<u8>().map_err(|e| e.to_string())?;
    Ok((i, j))
}

fn parse_twists(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',')
        .map(|x| parse_rational(x).ok_or_else(|| format!("bad rational `{x}`")))
        .collect()
}

/// Default generic twist point: 1/2, 1/3, 1/5, 1/7, 2/11, ...
fn default_twists(rank: u8) -> Vec<Rational> {
    let primes = [2i64, 3, 5, 7, 11, 13, 17, 19];
    (0..rank as usize)
        .map(|k| ortholax::poly::rat(1, primes[k]))
        .collect()
}

fn resolve_twists(
    rank: u8,
    twists: &Option<String>,
    seed: Option<u64>,
) -> Result<Vec<Rational>, String> {
    if let Some(seed) = seed {
        let mut rng = SplitMix64::new(seed);
        return Ok(rng.twist_point(rank));
    }
    match twists {
        Some(s) => parse_twists(s),
        None => Ok(default_twists(rank)),
    }
}

fn build_spec(args: &FamilyArgs) -> Result<LaxSpec, String> {
    let family: LaxFamily = args.family.parse()?;
    let mut spec = LaxSpec::new(family, args.rank);
    match family {
        LaxFamily::SpinorFull | LaxFamily::QuadWithSpinor => {
            spec = spec.with_s(ScalarLabel::symbolic());
        }
        LaxFamily::FundFull => {
            spec = spec.with_n(ScalarLabel::symbolic()).with_s(ScalarLabel::value("0"));
        }
        _ => {}
    }
    if let Some(s) = &args.signs {
        spec = spec.with_signs(parse_signs(s, args.rank)?);
    }
    if let Some(s) = &args.swap {
        let (i, j) = parse_swap(s)?;
        spec = spec.with_swap(i, j);
    }
    Ok(spec)
}

fn run_verify(check: &VerifyCheck, dump: bool) -> Result<Vec<CheckReport>, String> {
    match check {
        VerifyCheck::Rtt { family, mutate } => {
            if family.rank < 2 {
                return Err(format!("rank must be >= 2, got {}", family.rank));
            }
            let spec = build_spec(family)?;
            let ctx = standard_context(spec.rank);
            let x = MultiPoly::var(&ctx, std_vars::X);
            let y = MultiPoly::var(&ctx, std_vars::Y);
            let mut lx = lax::build_lax(&ctx, &spec, &x).map_err(|e| e.to_string())?;
            let mut ly = lax::build_lax(&ctx, &spec, &y).map_err(|e| e.to_string())?;
            if matches!(mutate, Some(RttMutation::FlipSign)) {
                lx = ortholax::verify::mutate_flip_first_offdiag(&lx);
                ly = ortholax::verify::mutate_flip_first_offdiag(&ly);
            }
            if dump {
                println!("{}", lx.dump());
            }
            let params = json!({
                "spec": serde_json::to_value(&spec).map_err(|e| e.to_string())?,
                "mutated": mutate.is_some(),
            });
            Ok(vec![check_rtt(&ctx, &lx, &ly, spec.rank, params)])
        }
        VerifyCheck::Yangian { family } => {
            if family.rank < 2 {
                return Err(format!("rank must be >= 2, got {}", family.rank));
            }
            let spec = build_spec(family)?;
            let ctx = standard_context(spec.rank);
            let x = MultiPoly::var(&ctx, std_vars::X);
            let y = MultiPoly::var(&ctx, std_vars::Y);
            let lx = lax::build_lax(&ctx, &spec, &x).map_err(|e| e.to_string())?;
            let ly = lax::build_lax(&ctx, &spec, &y).map_err(|e| e.to_string())?;
            let reference = if spec.family == LaxFamily::SpinorDegenerate
                && spec.signs.is_none()
                && spec.swap.is_none()
            {
                Some(spinor_ltl_reference(&ctx, spec.rank, spec.register()))
            } else {
                None
            };
            let params = json!({ "spec": serde_json::to_value(&spec).map_err(|e| e.to_string())? });
            Ok(vec![check_yangian_components(
                &ctx, &lx, &ly, spec.rank, reference, params,
            )])
        }
        VerifyCheck::Invariance { rank, signs, swap } => {
            if *rank < 2 {
                return Err(format!("rank must be >= 2, got {rank}"));
            }
            let ctx = standard_context(*rank);
            let mut reports = Vec::new();
            match (signs, swap) {
                (Some(s), _) => {
                    let sv = parse_signs(s, *rank)?;
                    let b = b_alpha(&ctx, &sv, *rank).map_err(|e| e.to_string())?;
                    reports.push(check_invariance(&ctx, &b, *rank, json!({ "signs": sv })));
                }
                (_, Some(s)) => {
                    let (i, j) = parse_swap(s)?;
                    let b = b_tilde(&ctx, i, j, *rank).map_err(|e| e.to_string())?;
                    reports.push(check_invariance(&ctx, &b, *rank, json!({ "swap": [i, j] })));
                }
                (None, None) => {
                    for bits in 0..1u32 << rank {
                        let sv: Vec<i8> = (0..*rank)
                            .map(|k| if bits >> k & 1 == 1 { -1 } else { 1 })
                            .collect();
                        let b = b_alpha(&ctx, &sv, *rank).map_err(|e| e.to_string())?;
                        reports.push(check_invariance(&ctx, &b, *rank, json!({ "signs": sv })));
                    }
                    for i in 1..=*rank {
                        for j in i + 1..=*rank {
                            let b = b_tilde(&ctx, i, j, *rank).map_err(|e| e.to_string())?;
                            reports.push(check_invariance(
                                &ctx,
                                &b,
                                *rank,
                                json!({ "swap": [i, j] }),
                            ));
                        }
                    }
                }
            }
            Ok(reports)
        }
        VerifyCheck::Characteristic { rep, rank } => {
            if *rank < 2 {
                return Err(format!("rank must be >= 2, got {rank}"));
            }
            let ctx = standard_context(*rank);
            let kind = match rep {
                RepKind::Spinor => CharacteristicRep::Spinor,
                RepKind::Fundamental => CharacteristicRep::Fundamental,
            };
            let mut reports = vec![check_characteristic(
                &ctx,
                kind,
                *rank,
                json!({ "rep": format!("{kind:?}"), "rank": rank }),
            )
            .map_err(|e| e.to_string())?];
            if matches!(rep, RepKind::Fundamental) {
                reports.push(check_characteristic_fundamental_numeric(
                    &ctx,
                    *rank,
                    json!({ "rank": rank, "n": 1 }),
                ));
            }
            Ok(reports)
        }
        VerifyCheck::GRelation { rank, mutate } => {
            if *rank < 2 {
                return Err(format!("rank must be >= 2, got {rank}"));
            }
            let ctx = standard_context(*rank);
            Ok(vec![check_g_relation(
                &ctx,
                *rank,
                *mutate,
                json!({ "rank": rank, "mutated": mutate }),
            )
            .map_err(|e| e.to_string())?])
        }
        VerifyCheck::Factorization { id, rank, mutate } => {
            if *rank < 2 || (*rank < 3 && !matches!(id, FactorId::Spinor)) {
                return Err(format!("rank {rank} too small for this factorisation"));
            }
            let ctx = standard_context(*rank);
            let fid = match id {
                FactorId::Spinor => FactorizationId::Spinor,
                FactorId::Quad => FactorizationId::Quad,
                FactorId::Fund => FactorizationId::Fund,
            };
            let mut reports = vec![check_factorization(
                &ctx,
                fid,
                *rank,
                *mutate,
                json!({ "id": format!("{fid:?}"), "rank": rank, "mutated": mutate }),
            )
            .map_err(|e| e.to_string())?];
            if matches!(id, FactorId::Quad) {
                reports.push(check_quad_mode_dictionary(&ctx, *rank));
            }
            Ok(reports)
        }
        VerifyCheck::Limit { family, rank } => {
            if *rank < 2 {
                return Err(format!("rank must be >= 2, got {rank}"));
            }
            let ctx = standard_context(*rank);
            let fam = match family {
                LimitKind::Spinor => LimitFamily::Spinor,
                LimitKind::Fundamental => LimitFamily::Fundamental,
            };
            Ok(vec![check_limit(&ctx, fam, *rank).map_err(|e| e.to_string())?])
        }
        VerifyCheck::So2r { source, rank } => {
            if *rank < 2 {
                return Err(format!("rank must be >= 2, got {rank}"));
            }
            let ctx = standard_context(*rank);
            let z = MultiPoly::var(&ctx, std_vars::Z);
            let f = match source {
                So2rSource::SpinorFull => {
                    let s = MultiPoly::var(&ctx, std_vars::S);
                    let l = lax::spinor_full(&ctx, *rank, Register::None, &z, &s);
                    extract_generators(&l, std_vars::Z).map_err(|e| e.to_string())?
                }
                So2rSource::FundFull => {
                    let n = MultiPoly::var(&ctx, std_vars::N);
                    let l = lax::fund_full(&ctx, *rank, Register::None, &z, None, &n);
                    extract_quadratic(&l, std_vars::Z)
                        .map_err(|e| e.to_string())?
                        .0
                }
            };
            let mut reports = vec![check_so2r_relations(
                &ctx,
                &f,
                json!({ "source": format!("{source:?}"), "rank": rank }),
            )];
            if matches!(source, So2rSource::SpinorFull) {
                reports.push(check_weight_action(&ctx, *rank).map_err(|e| e.to_string())?);
            }
            Ok(reports)
        }
        VerifyCheck::Appendix { rank } => {
            if *rank < 2 {
                return Err(format!("rank must be >= 2, got {rank}"));
            }
            let ctx = standard_context(*rank);
            Ok(vec![check_appendix(&ctx, *rank, json!({ "rank": rank }))
                .map_err(|e| e.to_string())?])
        }
    }
}

fn run_qsys(cmd: &QsysCommand, dump: bool) -> Result<Vec<CheckReport>, String> {
    match cmd {
        QsysCommand::Build {
            rank,
            length,
            twists,
            op,
            signs,
            node,
            seed,
        } => {
            let tw = resolve_twists(*rank, twists, *seed)?;
            let spec = ChainSpec::new(*rank, *length, tw).map_err(|e| e.to_string())?;
            let ctx = standard_context(*rank);
            let (label, q) = match op {
                QsysOp::Transfer => (
                    "T".to_string(),
                    transfer_matrix(&ctx, &spec, std_vars::Z).map_err(|e| e.to_string())?,
                ),
                QsysOp::QSpinor => {
                    let minus: Vec<u8> = match signs {
                        Some(s) => parse_signs(s, *rank)?
                            .iter()
                            .enumerate()
                            .filter(|(_, &v)| v == -1)
                            .map(|(k, _)| k as u8 + 1)
                            .collect(),
                        None => vec![],
                    };
                    let fam = QFamily::Spinor { minus };
                    (
                        fam.label(),
                        q_operator(&ctx, &spec, &fam, std_vars::Z).map_err(|e| e.to_string())?,
                    )
                }
                QsysOp::QFund | QsysOp::QFundBar => {
                    let fam = QFamily::Fund {
                        bar: matches!(op, QsysOp::QFundBar),
                        node: *node,
                    };
                    (
                        fam.label(),
                        q_operator(&ctx, &spec, &fam, std_vars::Z).map_err(|e| e.to_string())?,
                    )
                }
                QsysOp::Q0 => ("Q0".to_string(), q_zero(&ctx, &spec, std_vars::Z)),
            };
            let mut rep = ortholax::verify::Reporter::new(
                "build",
                json!({
                    "op": label,
                    "rank": rank,
                    "length": length,
                    "twists": spec.twists.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "dim": q.dim,
                    "degree": q.max_degree_in(std_vars::Z),
                    "normalization": q.normalization.as_ref().map(|x| x.to_string()),
                }),
            );
            if dump {
                for r in 0..q.dim {
                    for c in 0..q.dim {
                        if !q.get(r, c).is_zero() {
                            println!("({r}) | ({c}) : {}", q.get(r, c));
                        }
                    }
                }
            }
            rep.note(format!("dim {}", q.dim));
            Ok(vec![rep.finish()])
        }
        QsysCommand::Commute {
            rank,
            length,
            twists,
            seed,
        } => {
            let tw = resolve_twists(*rank, twists, *seed)?;
            let spec = ChainSpec::new(*rank, *length, tw).map_err(|e| e.to_string())?;
            let ctx = standard_context(*rank);
            let t = transfer_matrix(&ctx, &spec, std_vars::Z).map_err(|e| e.to_string())?;
            let qs = q_operator(&ctx, &spec, &QFamily::Spinor { minus: vec![] }, std_vars::Z)
                .map_err(|e| e.to_string())?;
            let qf = q_operator(
                &ctx,
                &spec,
                &QFamily::Fund { bar: false, node: None },
                std_vars::Z,
            )
            .map_err(|e| e.to_string())?;
            Ok(vec![check_commuting_family(
                &[("T".into(), t), ("Qs".into(), qs), ("Qf".into(), qf)],
                json!({
                    "rank": rank,
                    "length": length,
                    "twists": spec.twists.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                }),
            )])
        }
        QsysCommand::Qq {
            rank,
            length,
            relation,
            twists,
            seed,
            long,
            mutate,
        } => {
            if *rank != 4 {
                return Err("the QQ-relations are formulated for rank 4".into());
            }
            if *length >= 3 && !long {
                let mut rep = ortholax::verify::Reporter::new(
                    "qq",
                    json!({ "rank": rank, "length": length, "skipped": true }),
                );
                rep.note("length >= 3 requires --long; skipped".to_string());
                return Ok(vec![rep.finish()]);
            }
            let tw = resolve_twists(*rank, twists, *seed)?;
            let spec = ChainSpec::new(*rank, *length, tw).map_err(|e| e.to_string())?;
            let ctx = standard_context(*rank);
            let relations: Vec<QQRelation> = match relation.as_str() {
                "spinor1" => vec![QQRelation::Spinor1],
                "spinor2" => vec![QQRelation::Spinor2],
                "fund" => vec![QQRelation::Fund],
                "all" => vec![QQRelation::Spinor1, QQRelation::Spinor2, QQRelation::Fund],
                other => return Err(format!("unknown relation `{other}`")),
            };
            let opts = QQOptions {
                check_commutation: true,
                wrong_node: *mutate,
            };
            Ok(vec![qq_check(&ctx, &spec, &relations, &opts)
                .map_err(|e| e.to_string())?])
        }
    }
}

fn emit(reports: &[CheckReport], out: &Option<PathBuf>) -> std::io::Result<()> {
    let doc = json!({
        "tool_version": ortholax::verify::TOOL_VERSION,
        "reports": reports,
    });
    let pretty = serde_json::to_string_pretty(&doc)?;
    let target = out.clone().or_else(|| {
        std::env::var_os("ORTHOLAX_OUT").map(|dir| {
            let mut p = PathBuf::from(dir);
            let id = reports
                .first()
                .map(|r| r.check_id.clone())
                .unwrap_or_else(|| "report".into());
            p.push(format!("{id}.json"));
            p
        })
    });
    match target {
        Some(path) => {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            let mut f = std::fs::File::create(path)?;
            f.write_all(pretty.as_bytes())?;
            f.write_all(b"\n")?;
        }
        None => println!("{pretty}"),
    }
    for r in reports {
        eprintln!(
            "[{}] {} {} ({} ms)",
            match r.status {
                ortholax::verify::CheckStatus::Pass => "pass",
                ortholax::verify::CheckStatus::Fail => "FAIL",
            },
            r.check_id,
            r.params,
            r.elapsed_ms
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            return usage_error("could not configure the thread pool");
        }
    }
    let result: Result<Vec<CheckReport>, String> = match &cli.command {
        Command::Verify { check } => run_verify(check, cli.dump),
        Command::Qsys { sub } => run_qsys(sub, cli.dump),
        Command::Suite { name, long } => suites::run_suite(*name, *long),
    };
    match result {
        Err(msg) => usage_error(&msg),
        Ok(reports) => {
            if emit(&reports, &cli.out).is_err() {
                return usage_error("could not write the report");
            }
            if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

pub(crate) fn chain(rank: u8, length: usize, twists: Vec<Rational>) -> Result<ChainSpec, String> {
    ChainSpec::new(rank, length, twists).map_err(|e| e.to_string())
}

pub(crate) fn default_twists_pub(rank: u8) -> Vec<Rational> {
    default_twists(rank)
}

/// A second independent generic twist point for anti-coincidence reruns.
pub(crate) fn second_twist_point(rank: u8) -> Vec<Rational> {
    let pairs = [(2i64, 3i64), (3, 5), (5, 7), (7, 11), (11, 13)];
    (0..rank as usize)
        .map(|k| ortholax::poly::rat(pairs[k].0, pairs[k].1))
        .collect()
}

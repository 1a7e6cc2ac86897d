//! Exact identity checks. Every check returns a [`CheckReport`]: pass means
//! the residual is identically zero after normal ordering; failures carry the
//! offending entries as witnesses. Reports are deterministic given their
//! parameters (timing aside).

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::context::{std_vars, Ctx, Var};
use crate::error::LaxError;
use crate::lax::{
    self, fund_full_shifts, quad_two_register_dictionary, LimitFamily,
};
use crate::matrix::{
    self, b_alpha, build_r, exchange_j, extract_generators, extract_quadratic, map_f_to_m,
    signed_range, GeneratorSet, OpMatrix, RBasis, SignedIndex,
};
use crate::osc::{AlgebraElement, Register};
use crate::poly::{MultiPoly, Rational};
use crate::trace::WeightMap;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default number of offending entries kept in a report.
pub const DEFAULT_WITNESS_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub row: String,
    pub col: String,
    pub term_count: usize,
    pub dump: String,
}

/// Machine-readable verdict of one identity check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: serde_json::Value,
    pub status: CheckStatus,
    pub witnesses: Vec<Witness>,
    pub elapsed_ms: u128,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Accumulates witnesses while a check runs.
pub struct Reporter {
    check_id: String,
    params: serde_json::Value,
    witnesses: Vec<Witness>,
    notes: Vec<String>,
    cap: usize,
    started: Instant,
    failed: bool,
}

impl Reporter {
    pub fn new(check_id: &str, params: serde_json::Value) -> Self {
        Reporter {
            check_id: check_id.to_string(),
            params,
            witnesses: Vec::new(),
            notes: Vec::new(),
            cap: DEFAULT_WITNESS_CAP,
            started: Instant::now(),
            failed: false,
        }
    }

    pub fn with_witness_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn witness(&mut self, row: String, col: String, residual: &AlgebraElement) {
        self.failed = true;
        if self.witnesses.len() < self.cap {
            self.witnesses.push(Witness {
                row,
                col,
                term_count: residual.terms.len(),
                dump: residual.to_string(),
            });
        }
    }

    /// Records every nonzero entry of a residual matrix.
    pub fn residual_matrix(&mut self, tag: &str, residual: &OpMatrix) {
        for (ridx, cidx, e) in residual.labelled_entries() {
            let fmt = |v: &[i32]| {
                v.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            self.witness(
                format!("{tag}({})", fmt(&ridx)),
                format!("({})", fmt(&cidx)),
                e,
            );
        }
    }

    pub fn fail_note(&mut self, s: impl Into<String>) {
        self.failed = true;
        self.notes.push(s.into());
    }

    pub fn finish(self) -> CheckReport {
        CheckReport {
            check_id: self.check_id,
            params: self.params,
            status: if self.failed {
                CheckStatus::Fail
            } else {
                CheckStatus::Pass
            },
            witnesses: self.witnesses,
            elapsed_ms: self.started.elapsed().as_millis(),
            tool_version: TOOL_VERSION.to_string(),
            notes: self.notes,
        }
    }
}

// ---------------------------------------------------------------------------
// Mutation surface
// ---------------------------------------------------------------------------

/// Deliberately broken input: flips the sign of the first nonzero
/// off-diagonal entry. A Lax matrix mutated this way must fail the RTT and
/// Yangian checks; this guards the comparators against passing vacuously.
pub fn mutate_flip_first_offdiag(m: &OpMatrix) -> OpMatrix {
    let mut out = m.clone();
    if let Some((&(r, c), e)) = m.entries.iter().find(|(&(r, c), _)| r != c) {
        out.entries.insert((r, c), e.neg());
    }
    out
}

// ---------------------------------------------------------------------------
// RTT relation
// ---------------------------------------------------------------------------

/// Verifies `R(x-y) (L(x) o I) (I o L(y)) = (I o L(y)) (L(x) o I) R(x-y)`
/// with the bold-basis R-matrix. `lx` and `ly` must be the same Lax matrix
/// evaluated at the fresh variables `x` and `y`.
pub fn check_rtt(
    ctx: &Ctx,
    lx: &OpMatrix,
    ly: &OpMatrix,
    rank: u8,
    params: serde_json::Value,
) -> CheckReport {
    let mut rep = Reporter::new("rtt", params);
    let x = MultiPoly::var(ctx, std_vars::X);
    let y = MultiPoly::var(ctx, std_vars::Y);
    let r = build_r(ctx, rank, &x.sub(&y), RBasis::Bold);
    let id = OpMatrix::identity(ctx, vec![rank]);
    let lx1 = lx.tensor(&id);
    let ly2 = id.tensor(ly);
    let lhs = r.mul(&lx1).mul(&ly2);
    let rhs = ly2.mul(&lx1).mul(&r);
    let residual = lhs.sub(&rhs);
    rep.residual_matrix("", &residual);
    rep.finish()
}

// ---------------------------------------------------------------------------
// Componentwise Yangian relations
// ---------------------------------------------------------------------------

/// Closed forms of `L^t(x) J L(y)` and `L(y) J L^t(x)` for the
/// spinor-degenerate family, used as an extra reference when available.
pub fn spinor_ltl_reference(ctx: &Ctx, rank: u8, reg: Register) -> (OpMatrix, OpMatrix) {
    let n = rank as usize;
    let x = MultiPoly::var(ctx, std_vars::X);
    let y = MultiPoly::var(ctx, std_vars::Y);
    let kappa = MultiPoly::int(ctx, rank as i64 - 1);
    let xmyk = x.sub(&y).add(&kappa);
    let xpk = x.add(&kappa);
    let amode = |i: u8, j: u8| lax::spinor_mode(reg, i, j);
    let abar = lax::abar_block(ctx, rank, &amode);
    let a = lax::a_block(ctx, rank, &amode);
    let jr = lax::dense_exchange(ctx, n);
    let ja = lax::dense_mul(ctx, &jr, &a);
    let aj = lax::dense_mul(ctx, &abar, &jr);
    let zero = lax::dense_zero(ctx, n, n);
    let first = lax::assemble_blocks(
        ctx,
        &[n, n],
        &[
            vec![lax::dense_scale(&ja, &xmyk), lax::dense_scale(&jr, &xpk)],
            vec![lax::dense_scale(&jr, &y), zero.clone()],
        ],
    );
    let second = lax::assemble_blocks(
        ctx,
        &[n, n],
        &[
            vec![lax::dense_scale(&aj, &xmyk), lax::dense_scale(&jr, &y)],
            vec![lax::dense_scale(&jr, &xpk), zero],
        ],
    );
    (
        OpMatrix::from_dense(ctx, vec![rank], first),
        OpMatrix::from_dense(ctx, vec![rank], second),
    )
}

/// Verifies the componentwise commutation relations of the Yangian after
/// clearing denominators by `(x-y)(x-y+kappa)`, plus the antisymmetry of the
/// right-hand side under `(a<->c, b<->d, x<->y)`; when `ltl_reference` is
/// given it is compared against the computed products.
pub fn check_yangian_components(
    ctx: &Ctx,
    lx: &OpMatrix,
    ly: &OpMatrix,
    rank: u8,
    ltl_reference: Option<(OpMatrix, OpMatrix)>,
    params: serde_json::Value,
) -> CheckReport {
    let mut rep = Reporter::new("yangian", params);
    let x = MultiPoly::var(ctx, std_vars::X);
    let y = MultiPoly::var(ctx, std_vars::Y);
    let kappa = MultiPoly::int(ctx, rank as i64 - 1);
    let xmy = x.sub(&y);
    let xmyk = xmy.add(&kappa);
    let denom = xmy.mul(&xmyk);

    let jop = exchange_j(ctx, rank);
    let ltjl = lx.t().mul(&jop).mul(ly);
    let ljlt = ly.mul(&jop).mul(&lx.t());
    if let Some((r1, r2)) = ltl_reference {
        let d1 = ltjl.sub(&r1);
        let d2 = ljlt.sub(&r2);
        rep.residual_matrix("LtJL", &d1);
        rep.residual_matrix("LJLt", &d2);
    }

    let d = 2 * rank as usize;
    let idx = signed_range(rank);
    let pos = |a: i32| SignedIndex(a).position(rank);
    // Pairwise products: p[(a,b),(c,d)] = L_ab(x) L_cd(y), q = reversed order.
    let entry = |m: &OpMatrix, a: i32, b: i32| m.get(pos(a), pos(b));
    let mut pxy: BTreeMap<(i32, i32, i32, i32), AlgebraElement> = BTreeMap::new();
    let mut qyx: BTreeMap<(i32, i32, i32, i32), AlgebraElement> = BTreeMap::new();
    for &a in &idx {
        for &b in &idx {
            let lab = entry(lx, a, b);
            let lab_y = entry(ly, a, b);
            for &c in &idx {
                for &dd in &idx {
                    let lcd_y = entry(ly, c, dd);
                    let lcd_x = entry(lx, c, dd);
                    pxy.insert((a, b, c, dd), lab.mul(&lcd_y));
                    qyx.insert((a, b, c, dd), lab_y.mul(&lcd_x));
                }
            }
        }
    }
    let zero = AlgebraElement::zero(ctx);
    let rhs_of = |a: i32, b: i32, c: i32, dd: i32| -> AlgebraElement {
        // (x-y+k)(L_cb(y) L_ad(x) - L_cb(x) L_ad(y))
        let t1 = qyx[&(c, b, a, dd)]
            .sub(&pxy[&(c, b, a, dd)])
            .scale(&xmyk);
        // (x-y)(d_(a,-c) (Lt J L)_bd - d_(b,-d) (L J Lt)_ca)
        let mut t2 = zero.clone();
        if a == -c {
            t2 = t2.add(&ltjl.get(pos(b), pos(dd)));
        }
        if b == -dd {
            t2 = t2.sub(&ljlt.get(pos(c), pos(a)));
        }
        t1.add(&t2.scale(&xmy))
    };
    let mut rhs_table: BTreeMap<(i32, i32, i32, i32), AlgebraElement> = BTreeMap::new();
    for &a in &idx {
        for &b in &idx {
            for &c in &idx {
                for &dd in &idx {
                    let lhs = pxy[&(a, b, c, dd)]
                        .sub(&qyx[&(c, dd, a, b)])
                        .scale(&denom);
                    let rhs = rhs_of(a, b, c, dd);
                    let diff = lhs.sub(&rhs);
                    if !diff.is_zero() {
                        rep.witness(format!("({a},{b})"), format!("({c},{dd})"), &diff);
                    }
                    rhs_table.insert((a, b, c, dd), rhs);
                }
            }
        }
    }
    // Antisymmetry of the right-hand side under (a<->c, b<->d, x<->y), after
    // cross-multiplying the two denominator clearings.
    let swap: BTreeMap<Var, MultiPoly> = BTreeMap::from([
        (std_vars::X, MultiPoly::var(ctx, std_vars::Y)),
        (std_vars::Y, MultiPoly::var(ctx, std_vars::X)),
    ]);
    let denom_swapped = denom.substitute(&swap);
    let _ = d;
    for &a in &idx {
        for &b in &idx {
            for &c in &idx {
                for &dd in &idx {
                    if (a, b) > (c, dd) {
                        continue;
                    }
                    let lhs = rhs_table[&(a, b, c, dd)].scale(&denom_swapped);
                    let rhs = rhs_table[&(c, dd, a, b)]
                        .substitute_vars(&swap)
                        .scale(&denom);
                    let diff = lhs.add(&rhs);
                    if !diff.is_zero() {
                        rep.witness(
                            format!("antisym({a},{b})"),
                            format!("({c},{dd})"),
                            &diff,
                        );
                    }
                }
            }
        }
    }
    rep.finish()
}

// ---------------------------------------------------------------------------
// Invariance of the R-matrix
// ---------------------------------------------------------------------------

/// Verifies `B B' = I` and `[R(z), B o B] = 0`.
pub fn check_invariance(ctx: &Ctx, b: &OpMatrix, rank: u8, params: serde_json::Value) -> CheckReport {
    let mut rep = Reporter::new("invariance", params);
    let id = OpMatrix::identity(ctx, vec![rank]);
    let bbp = b.mul(&b.prime()).sub(&id);
    rep.residual_matrix("BB'", &bbp);
    let z = MultiPoly::var(ctx, std_vars::Z);
    let r = build_r(ctx, rank, &z, RBasis::Bold);
    let bb = b.tensor(b);
    let comm = r.mul(&bb).sub(&bb.mul(&r));
    rep.residual_matrix("[R,BxB]", &comm);
    rep.finish()
}

// ---------------------------------------------------------------------------
// Characteristic identities
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacteristicRep {
    Spinor,
    Fundamental,
}

/// Spinor: `(F + s)(F - (s + kappa)) = 0` with generators from the full
/// spinor Lax matrix at symbolic `s`. Fundamental: the cubic
/// `(F - 1)(F + n)(F - (n + 2 kappa)) = 0` with generators from the full
/// quadratic Lax matrix at `s = 0`, symbolic `n`.
///
/// The cubic's label orientation follows the weight convention
/// `F_(i,i)|0> = -f_i|0>` with `f = (0,...,0,n)` used throughout: the
/// finite-dimensional oracle below confirms the roots `{1, -n, n + 2 kappa}`
/// on the defining representation.
pub fn check_characteristic(
    ctx: &Ctx,
    rep_kind: CharacteristicRep,
    rank: u8,
    params: serde_json::Value,
) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new("characteristic", params);
    let z = MultiPoly::var(ctx, std_vars::Z);
    let kappa = rank as i64 - 1;
    let id = OpMatrix::identity(ctx, vec![rank]);
    match rep_kind {
        CharacteristicRep::Spinor => {
            let s = MultiPoly::var(ctx, std_vars::S);
            let l = lax::spinor_full(ctx, rank, Register::None, &z, &s);
            let f = extract_generators(&l, std_vars::Z)?;
            let fm = f.as_matrix(ctx);
            let m1 = fm.add(&id.scale(&s));
            let m2 = fm.sub(&id.scale(&s.add(&MultiPoly::int(ctx, kappa))));
            rep.residual_matrix("", &m1.mul(&m2));
        }
        CharacteristicRep::Fundamental => {
            let n = MultiPoly::var(ctx, std_vars::N);
            let l = lax::fund_full(ctx, rank, Register::None, &z, None, &n);
            let (f, _) = extract_quadratic(&l, std_vars::Z)?;
            let fm = f.as_matrix(ctx);
            let m1 = fm.sub(&id);
            let m2 = fm.add(&id.scale(&n));
            let m3 = fm.sub(&id.scale(&n.add(&MultiPoly::int(ctx, 2 * kappa))));
            rep.residual_matrix("", &m1.mul(&m2).mul(&m3));
        }
    }
    Ok(rep.finish())
}

/// The same cubic on the finite-dimensional first-fundamental representation
/// `F_(a,b) = E_(a,b) - E_(-b,-a)` (weight `f = (0,...,0,1)`, so `n = 1`):
/// a plain matrix-arithmetic oracle independent of the oscillator path.
pub fn check_characteristic_fundamental_numeric(
    ctx: &Ctx,
    rank: u8,
    params: serde_json::Value,
) -> CheckReport {
    let mut rep = Reporter::new("characteristic-numeric", params);
    let kappa = rank as i64 - 1;
    // F_big[(a,i),(b,j)] = (F_(a,b))_(i,j) on the doubled space.
    let mut fbig = OpMatrix::zero(ctx, vec![rank, rank]);
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let outer = matrix::embed_unit(ctx, a, b, rank).unwrap();
            let inner = matrix::embed_unit(ctx, a, b, rank)
                .unwrap()
                .sub(&matrix::embed_unit(ctx, -b, -a, rank).unwrap());
            fbig = fbig.add(&outer.tensor(&inner));
        }
    }
    let idbig = OpMatrix::identity(ctx, vec![rank, rank]);
    let n = MultiPoly::int(ctx, 1);
    let m1 = fbig.sub(&idbig);
    let m2 = fbig.add(&idbig.scale(&n));
    let m3 = fbig.sub(&idbig.scale(&n.add(&MultiPoly::int(ctx, 2 * kappa))));
    rep.residual_matrix("", &m1.mul(&m2).mul(&m3));
    rep.finish()
}

// ---------------------------------------------------------------------------
// G-relation of the quadratic Lax matrix
// ---------------------------------------------------------------------------

/// Verifies `G_(a,b) = 1/2 F_(c,b) F_(a,c) + kappa/2 F_(a,b)
/// - 1/4 ((kappa-1)^2 + 2 kappa n + n^2) d_(a,b)` entrywise, with `(F, G)`
/// extracted from the quadratic expansion of the full fundamental Lax matrix
/// at `s = 0`. `drop_linear_term` builds the deliberately broken variant.
pub fn check_g_relation(
    ctx: &Ctx,
    rank: u8,
    drop_linear_term: bool,
    params: serde_json::Value,
) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new("g-relation", params);
    let z = MultiPoly::var(ctx, std_vars::Z);
    let n = MultiPoly::var(ctx, std_vars::N);
    let kappa = rank as i64 - 1;
    let l = lax::fund_full(ctx, rank, Register::None, &z, None, &n);
    let (f, g) = extract_quadratic(&l, std_vars::Z)?;
    let half = crate::poly::rat(1, 2);
    // scalar 1/4 ((kappa-1)^2 + 2 kappa n + n^2)
    let scal = MultiPoly::int(ctx, (kappa - 1) * (kappa - 1))
        .add(&n.scale(&Rational::from_integer((2 * kappa).into())))
        .add(&n.pow(2))
        .scale(&crate::poly::rat(1, 4));
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let mut quad = AlgebraElement::zero(ctx);
            for c in signed_range(rank) {
                quad = quad.add(&f.get(ctx, c, b).mul(&f.get(ctx, a, c)));
            }
            let mut rhs = quad.scale_rat(&half);
            if !drop_linear_term {
                rhs = rhs.add(
                    &f.get(ctx, a, b)
                        .scale(&MultiPoly::constant(ctx, Rational::new(kappa.into(), 2.into()))),
                );
            }
            if a == b {
                rhs = rhs.sub(&AlgebraElement::from_poly(scal.clone()));
            }
            let diff = g
                .get(&(a, b))
                .cloned()
                .unwrap_or_else(|| AlgebraElement::zero(ctx))
                .sub(&rhs);
            if !diff.is_zero() {
                rep.witness(format!("({a})"), format!("({b})"), &diff);
            }
        }
    }
    Ok(rep.finish())
}

// ---------------------------------------------------------------------------
// so(2r) commutation relations
// ---------------------------------------------------------------------------

/// Verifies `F_(a,b) = -F_(-b,-a)` and
/// `[F_ab, F_cd] = d_cb F_ad - d_ad F_cb - d_(c,-a) F_(-b,d) + d_(d,-b) F_(c,-a)`.
pub fn check_so2r_relations(
    ctx: &Ctx,
    f: &GeneratorSet,
    params: serde_json::Value,
) -> CheckReport {
    let mut rep = Reporter::new("so2r", params);
    let rank = f.rank;
    if let Err(e) = f.check_flip_antisymmetry(ctx) {
        rep.fail_note(format!("{e}"));
    }
    let idx = signed_range(rank);
    for &a in &idx {
        for &b in &idx {
            let fab = f.get(ctx, a, b);
            for &c in &idx {
                for &d in &idx {
                    let lhs = fab.commutator(&f.get(ctx, c, d));
                    let mut rhs = AlgebraElement::zero(ctx);
                    if c == b {
                        rhs = rhs.add(&f.get(ctx, a, d));
                    }
                    if a == d {
                        rhs = rhs.sub(&f.get(ctx, c, b));
                    }
                    if c == -a {
                        rhs = rhs.sub(&f.get(ctx, -b, d));
                    }
                    if d == -b {
                        rhs = rhs.add(&f.get(ctx, c, -a));
                    }
                    let diff = lhs.sub(&rhs);
                    if !diff.is_zero() {
                        rep.witness(format!("({a},{b})"), format!("({c},{d})"), &diff);
                    }
                }
            }
        }
    }
    rep.finish()
}

// ---------------------------------------------------------------------------
// Factorisation identities
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorizationId {
    Spinor,
    Quad,
    Fund,
}

/// Verifies the three factorisation formulas. The oscillator-space similarity
/// is realised through the explicit substitution rules; a rule set failing the
/// homomorphism check is an error, distinct from an identity failure.
/// `perturb_shifts` moves the fund shifts x1, x2 by +1 (mutation input).
pub fn check_factorization(
    ctx: &Ctx,
    id: FactorizationId,
    rank: u8,
    perturb_shifts: bool,
    params: serde_json::Value,
) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new("factorization", params);
    let z = MultiPoly::var(ctx, std_vars::Z);
    let s = MultiPoly::var(ctx, std_vars::S);
    let kappa = MultiPoly::int(ctx, rank as i64 - 1);
    match id {
        FactorizationId::Spinor => {
            // L1(z+s) L2_(-1..-1)(z-s-kappa) = S Ls1(z) G2 S^-1
            let l1 = lax::spinor_degenerate(ctx, rank, Register::One, &z.add(&s));
            let j = b_alpha(ctx, &vec![-1; rank as usize], rank)?;
            let l2 = j
                .mul(&lax::spinor_degenerate(
                    ctx,
                    rank,
                    Register::Two,
                    &z.sub(&s).sub(&kappa),
                ))
                .mul(&j);
            let lhs = l1.mul(&l2);
            let ls = lax::spinor_full(ctx, rank, Register::One, &z, &s);
            let g = lax::g_spinor(ctx, rank, Register::Two);
            let rules = lax::s_rules_spinor(ctx, rank);
            rules.check_homomorphism(ctx)?;
            let rhs = ls.mul(&g).map(|e| rules.apply_unchecked(e));
            rep.residual_matrix("", &lhs.sub(&rhs));
        }
        FactorizationId::Quad => {
            // L1(z+s) L2_(-1..-1,+1)(z-s-kappa+1) = S Ls(z) G S^-1
            let l1 = lax::spinor_degenerate(ctx, rank, Register::One, &z.add(&s));
            let mut signs = vec![-1i8; rank as usize];
            signs[rank as usize - 1] = 1;
            let b = b_alpha(ctx, &signs, rank)?;
            let arg = z.sub(&s).sub(&kappa).add(&MultiPoly::one(ctx));
            let l2 = b
                .mul(&lax::spinor_degenerate(ctx, rank, Register::Two, &arg))
                .mul(&b);
            let lhs = l1.mul(&l2);
            // Ls(z) in the two-register spinor-mode labelling.
            let vmode = |k: i8| {
                if k > 0 {
                    lax::spinor_mode(Register::One, k as u8, rank)
                } else {
                    lax::spinor_mode(Register::Two, (-k) as u8, rank)
                }
            };
            let amode = |i: u8, j: u8| lax::spinor_mode(Register::One, i, j);
            let ls_dense = lax::quad_with_spinor_dense(ctx, rank, &vmode, &amode, &z, &s);
            let ls = OpMatrix::from_dense(ctx, vec![rank], ls_dense);
            // Auxiliary identities vbar J Abar vbar^t = 0 and v J Abar v^t = 0.
            let m = rank as usize - 1;
            let abar1 = lax::abar_block(ctx, rank - 1, &amode);
            let jm = lax::dense_exchange(ctx, m);
            let vbar2: lax::Dense = vec![(1..=m)
                .map(|k| AlgebraElement::creator(ctx, vmode(-(k as i8))))
                .collect()];
            let v1: lax::Dense = vec![(1..=m)
                .map(|k| AlgebraElement::annihilator(ctx, vmode(k as i8)))
                .collect()];
            for (tag, row) in [("vbarJAbarvbart", &vbar2), ("vJAbarvt", &v1)] {
                let jab = lax::dense_mul(ctx, &jm, &abar1);
                let prod = lax::dense_mul(
                    ctx,
                    &lax::dense_mul(ctx, row, &jab),
                    &lax::dense_transpose(ctx, row),
                )[0][0]
                    .clone();
                if !prod.is_zero() {
                    rep.witness(tag.to_string(), "scalar".to_string(), &prod);
                }
            }
            let g = lax::g_quad(ctx, rank, Register::Two);
            let rules = lax::s_rules_quad(ctx, rank);
            rules.check_homomorphism(ctx)?;
            let rhs = ls.mul(&g).map(|e| rules.apply_unchecked(e));
            rep.residual_matrix("", &lhs.sub(&rhs));
        }
        FactorizationId::Fund => {
            // Ls1(z-x1) L2_(+1..+1,-1)(z-x2) = S Lns1(z) G2 S^-1
            let n = MultiPoly::var(ctx, std_vars::N);
            let (mut x1, mut x2) = fund_full_shifts(ctx, rank, &n);
            if perturb_shifts {
                x1 = x1.add(&MultiPoly::one(ctx));
                x2 = x2.add(&MultiPoly::one(ctx));
            }
            let ls1 = lax::quad_with_spinor(ctx, rank, Register::One, &z.sub(&x1), &s);
            let mut signs = vec![1i8; rank as usize];
            signs[rank as usize - 1] = -1;
            let b = b_alpha(ctx, &signs, rank)?;
            let l2 = b
                .mul(&lax::fund_degenerate(ctx, rank, Register::Two, &z.sub(&x2)))
                .mul(&b);
            let lhs = ls1.mul(&l2);
            let lns = lax::fund_full(ctx, rank, Register::One, &z, Some(&s), &n);
            let g = lax::g_fund(ctx, rank, Register::Two);
            let rules = lax::s_rules_fund(ctx, rank);
            rules.check_homomorphism(ctx)?;
            let rhs = lns.mul(&g).map(|e| rules.apply_unchecked(e));
            rep.residual_matrix("", &lhs.sub(&rhs));
        }
    }
    Ok(rep.finish())
}

/// Consistency of the standalone quad-with-spinor labelling with the
/// two-register assembly used inside the factorisation.
pub fn check_quad_mode_dictionary(ctx: &Ctx, rank: u8) -> CheckReport {
    let mut rep = Reporter::new(
        "quad-dictionary",
        json!({ "rank": rank }),
    );
    let z = MultiPoly::var(ctx, std_vars::Z);
    let s = MultiPoly::var(ctx, std_vars::S);
    let standalone = lax::quad_with_spinor(ctx, rank, Register::One, &z, &s);
    let renamed = standalone.rename_modes(&quad_two_register_dictionary(rank));
    let vmode = |k: i8| {
        if k > 0 {
            lax::spinor_mode(Register::One, k as u8, rank)
        } else {
            lax::spinor_mode(Register::Two, (-k) as u8, rank)
        }
    };
    let amode = |i: u8, j: u8| lax::spinor_mode(Register::One, i, j);
    let two_reg = OpMatrix::from_dense(
        ctx,
        vec![rank],
        lax::quad_with_spinor_dense(ctx, rank, &vmode, &amode, &z, &s),
    );
    rep.residual_matrix("", &renamed.sub(&two_reg));
    rep.finish()
}

// ---------------------------------------------------------------------------
// Scaled limits
// ---------------------------------------------------------------------------

/// Verifies that the scaled limit reproduces the degenerate family and that
/// the first correction is nonzero.
pub fn check_limit(ctx: &Ctx, family: LimitFamily, rank: u8) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new(
        "limit",
        json!({ "family": match family { LimitFamily::Spinor => "spinor", LimitFamily::Fundamental => "fundamental" }, "rank": rank }),
    );
    let z = MultiPoly::var(ctx, std_vars::Z);
    let out = lax::scaled_limit(ctx, family, rank)?;
    let expected = match family {
        LimitFamily::Spinor => lax::spinor_degenerate(ctx, rank, Register::None, &z),
        LimitFamily::Fundamental => lax::fund_degenerate(ctx, rank, Register::None, &z),
    };
    rep.residual_matrix("", &out.limit.sub(&expected));
    if out.correction.is_zero() {
        rep.fail_note("first-order correction vanishes identically".to_string());
    }
    Ok(rep.finish())
}

// ---------------------------------------------------------------------------
// Basis-change (generator-map) consistency
// ---------------------------------------------------------------------------

/// Verifies the basis-change component formulas, `(SoS) K (S^-1 o S^-1) = Q`,
/// and, from the spinor-full generators: M antisymmetry, the M commutation
/// relations, the F<->M round trip, and the summed identification
/// `sum E_(a,b) F_(b,a) = sum S e_(A,B) S^-1 M_(B,A)`.
pub fn check_appendix(ctx: &Ctx, rank: u8, params: serde_json::Value) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new("appendix", params);
    let s = matrix::s_matrix(ctx, rank);
    let si = matrix::s_inverse(ctx, rank);
    let half = crate::poly::rat(1, 2);
    let imag = MultiPoly::var(ctx, std_vars::imag(rank));
    let e_unit = |a: usize, b: usize| {
        // plain e_(A,B), 1-based
        let mut m = OpMatrix::zero(ctx, vec![rank]);
        m.set(a - 1, b - 1, AlgebraElement::one(ctx));
        m
    };
    let eu = |a: i32, b: i32| matrix::embed_unit(ctx, a, b, rank).unwrap();
    let r = rank as usize;
    for i in 1..=r {
        for j in 1..=r {
            let (ii, jj) = (i as i32, j as i32);
            let combos = [
                // S e_(i,j) S^-1 = 1/2 (E_(-i,-j) - E_(-i,j) - E_(i,-j) + E_(i,j))
                (
                    e_unit(i, j),
                    eu(-ii, -jj)
                        .sub(&eu(-ii, jj))
                        .sub(&eu(ii, -jj))
                        .add(&eu(ii, jj))
                        .scale_rat(&half),
                ),
                // S e_(i,r+j) S^-1 = i/2 (-E_(-i,-j) - E_(-i,j) + E_(i,-j) + E_(i,j))
                (
                    e_unit(i, r + j),
                    eu(-ii, -jj)
                        .neg()
                        .sub(&eu(-ii, jj))
                        .add(&eu(ii, -jj))
                        .add(&eu(ii, jj))
                        .scale(&imag.scale(&half)),
                ),
                // S e_(r+i,j) S^-1 = i/2 (E_(-i,-j) - E_(-i,j) + E_(i,-j) - E_(i,j))
                (
                    e_unit(r + i, j),
                    eu(-ii, -jj)
                        .sub(&eu(-ii, jj))
                        .add(&eu(ii, -jj))
                        .sub(&eu(ii, jj))
                        .scale(&imag.scale(&half)),
                ),
                // S e_(r+i,r+j) S^-1 = 1/2 (E_(-i,-j) + E_(-i,j) + E_(i,-j) + E_(i,j))
                (
                    e_unit(r + i, r + j),
                    eu(-ii, -jj)
                        .add(&eu(-ii, jj))
                        .add(&eu(ii, -jj))
                        .add(&eu(ii, jj))
                        .scale_rat(&half),
                ),
            ];
            for (k, (e, expected)) in combos.into_iter().enumerate() {
                let got = s.mul(&e).mul(&si);
                let diff = got.sub(&expected);
                if !diff.is_zero() {
                    rep.fail_note(format!("SeS^-1 component formula {k} fails at (i,j)=({i},{j})"));
                }
            }
        }
    }
    // (S o S) K (S^-1 o S^-1) = Q
    let ss = s.tensor(&s);
    let sisi = si.tensor(&si);
    let k = matrix::k_matrix(ctx, rank);
    let q = matrix::q_matrix(ctx, rank);
    rep.residual_matrix("SKS-Q", &ss.mul(&k).mul(&sisi).sub(&q));

    // Generators from the spinor-full Lax matrix.
    let z = MultiPoly::var(ctx, std_vars::Z);
    let sv = MultiPoly::var(ctx, std_vars::S);
    let l = lax::spinor_full(ctx, rank, Register::None, &z, &sv);
    let f = extract_generators(&l, std_vars::Z)?;
    let m = map_f_to_m(ctx, &f)?;
    let getm = |a: u8, b: u8| {
        m.get(&(a, b))
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(ctx))
    };
    // M antisymmetry
    for a in 1..=2 * rank {
        for b in 1..=2 * rank {
            let diff = getm(a, b).add(&getm(b, a));
            if !diff.is_zero() {
                rep.witness(format!("Masym({a})"), format!("({b})"), &diff);
            }
        }
    }
    // M commutation relations
    for a in 1..=2 * rank {
        for b in 1..=2 * rank {
            let mab = getm(a, b);
            for c in 1..=2 * rank {
                for d in 1..=2 * rank {
                    let lhs = mab.commutator(&getm(c, d));
                    let mut rhs = AlgebraElement::zero(ctx);
                    if a == d {
                        rhs = rhs.add(&getm(b, c));
                    }
                    if b == c {
                        rhs = rhs.add(&getm(a, d));
                    }
                    if a == c {
                        rhs = rhs.sub(&getm(b, d));
                    }
                    if b == d {
                        rhs = rhs.sub(&getm(a, c));
                    }
                    let diff = lhs.sub(&rhs);
                    if !diff.is_zero() {
                        rep.witness(format!("Mrel({a},{b})"), format!("({c},{d})"), &diff);
                    }
                }
            }
        }
    }
    // Round trip F -> M -> F
    let back = matrix::map_m_to_f(ctx, &m, rank);
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let diff = back.get(ctx, a, b).sub(&f.get(ctx, a, b));
            if !diff.is_zero() {
                rep.witness(format!("roundtrip({a})"), format!("({b})"), &diff);
            }
        }
    }
    // sum E_(a,b) F_(b,a) = sum (S e_(A,B) S^-1) M_(B,A)
    let lhs_sum = f.rebuild_affine(ctx, std_vars::Z).sub(
        &OpMatrix::identity(ctx, vec![rank]).scale(&z),
    );
    let mut rhs_sum = OpMatrix::zero(ctx, vec![rank]);
    for a in 1..=2 * r {
        for b in 1..=2 * r {
            let mba = getm(b as u8, a as u8);
            if mba.is_zero() {
                continue;
            }
            rhs_sum = rhs_sum.add(&s.mul(&e_unit(a, b)).mul(&si).map(|e| e.mul(&mba)));
        }
    }
    rep.residual_matrix("identification", &lhs_sum.sub(&rhs_sum));
    Ok(rep.finish())
}

// ---------------------------------------------------------------------------
// Twist absorption
// ---------------------------------------------------------------------------

/// Verifies `[L(z), D o D_osc] = 0` symbolically in the twists: every
/// normal-ordered monomial of `L_(a,b)` must carry twist charge
/// `e(D_bb) - e(D_aa)` under the mode weights.
pub fn check_absorption(
    ctx: &Ctx,
    l: &OpMatrix,
    weights: &WeightMap,
    rank: u8,
    params: serde_json::Value,
) -> CheckReport {
    let mut rep = Reporter::new("absorption", params);
    let d = lax::DiagTwist::fundamental(rank);
    let exp_map = |w: &crate::trace::TwistWeight| -> BTreeMap<Var, i32> {
        w.exps.iter().cloned().collect()
    };
    for (ridx, cidx, e) in l.labelled_entries() {
        let (a, b) = (ridx[0], cidx[0]);
        let da = exp_map(&d.entries[SignedIndex(a).position(rank)]);
        let db = exp_map(&d.entries[SignedIndex(b).position(rank)]);
        for mono in e.terms.keys() {
            let mut charge: BTreeMap<Var, i32> = BTreeMap::new();
            for &(mode, p, q) in &mono.0 {
                if let Some(w) = weights.get(&mode) {
                    for (v, ex) in &w.exps {
                        *charge.entry(*v).or_insert(0) += ex * (p as i32 - q as i32);
                    }
                }
            }
            for (v, ex) in &da {
                *charge.entry(*v).or_insert(0) += ex;
            }
            for (v, ex) in &db {
                *charge.entry(*v).or_insert(0) -= ex;
            }
            if charge.values().any(|&ex| ex != 0) {
                rep.witness(
                    format!("({a})"),
                    format!("({b})"),
                    &AlgebraElement::monomial(ctx, mono.clone(), MultiPoly::one(ctx)),
                );
            }
        }
    }
    rep.finish()
}

/// Exploratory check (not an acceptance gate): replacing the spinor core of
/// the full quadratic Lax matrix by the other-spinor-node core is expected to
/// produce the representation with weights `f = (-s, s, ..., s, n)`. Verified
/// by extracting the generators and acting on the Fock vacuum; the so(2r)
/// relations are re-checked on the way.
pub fn check_other_spinor_node_weights(ctx: &Ctx, rank: u8) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new("other-spinor-node", json!({ "rank": rank, "exploratory": true }));
    let z = MultiPoly::var(ctx, std_vars::Z);
    let s = MultiPoly::var(ctx, std_vars::S);
    let n = MultiPoly::var(ctx, std_vars::N);
    let m = rank as usize - 1;
    let vmode = |k: i8| lax::vector_mode(Register::None, k);
    let amode = |i: u8, j: u8| lax::spinor_mode(Register::None, i, j);
    // other spinor node: conjugate the inner core by B(-1, 1, ..., 1),
    // i.e. swap the rows and columns of the indices -1 and +1.
    let core = |arg: &MultiPoly| -> lax::Dense {
        let mut ls = lax::spinor_full_dense_pub(ctx, rank - 1, &amode, arg, &s);
        ls.swap(m - 1, m);
        for row in ls.iter_mut() {
            row.swap(m - 1, m);
        }
        ls
    };
    let ldense = lax::fund_full_dense_with_core(ctx, rank, &vmode, &z, Some(&s), &n, &core);
    let l = OpMatrix::from_dense(ctx, vec![rank], ldense);
    let (f, _) = extract_quadratic(&l, std_vars::Z)?;
    let sub = check_so2r_relations(ctx, &f, json!({ "source": "other-spinor-node" }));
    if !sub.passed() {
        rep.fail_note("so(2r) relations fail for the other-node generators".to_string());
    }
    // weights: f = (-s, s, ..., s, n)
    for i in 1..=rank as i32 {
        let applied = f.get(ctx, i, i).vacuum_apply();
        let want = if i == 1 {
            AlgebraElement::from_poly(s.clone())
        } else if i < rank as i32 {
            AlgebraElement::from_poly(s.neg())
        } else {
            AlgebraElement::from_poly(n.neg())
        };
        let diff = applied.sub(&want);
        if !diff.is_zero() {
            rep.witness(format!("F({i},{i})|0>"), "weights".into(), &diff);
        }
    }
    Ok(rep.finish())
}

// ---------------------------------------------------------------------------
// Weight action of the spinor-full generators
// ---------------------------------------------------------------------------

/// Verifies `F_(a,b)|0> = 0` for `a < b` and `F_(i,i)|0> = -s|0>` (weight
/// vector `(s,...,s)`), both symbolically and in the truncated Fock
/// representation at a rational sample of `s`.
pub fn check_weight_action(ctx: &Ctx, rank: u8) -> Result<CheckReport, LaxError> {
    let mut rep = Reporter::new("weight-action", json!({ "rank": rank }));
    let z = MultiPoly::var(ctx, std_vars::Z);
    let s = MultiPoly::var(ctx, std_vars::S);
    let l = lax::spinor_full(ctx, rank, Register::None, &z, &s);
    let f = extract_generators(&l, std_vars::Z)?;
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let applied = f.get(ctx, a, b).vacuum_apply();
            if a < b {
                if !applied.is_zero() {
                    rep.witness(format!("F({a},{b})|0>"), "symbolic".into(), &applied);
                }
            } else if a == b && a > 0 {
                let expected = AlgebraElement::from_poly(s.neg());
                let diff = applied.sub(&expected);
                if !diff.is_zero() {
                    rep.witness(format!("F({a},{a})|0>"), "symbolic".into(), &diff);
                }
            } else if a == b && a < 0 {
                let expected = AlgebraElement::from_poly(s.clone());
                let diff = applied.sub(&expected);
                if !diff.is_zero() {
                    rep.witness(format!("F({a},{a})|0>"), "symbolic".into(), &diff);
                }
            }
        }
    }
    // Truncated-Fock spot check at s = 5/7, applied to the sparse vacuum
    // vector (the dense matrix would be astronomically large at high rank).
    let sval = crate::poly::rat(5, 7);
    let eval = BTreeMap::from([
        (std_vars::S, sval.clone()),
        (std_vars::Z, crate::poly::rat(0, 1)),
    ]);
    let modes = lax::spinor_modes(Register::None, rank);
    let cutoff = 3;
    let vacuum = crate::fock::fock_vacuum(modes.len());
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let fab = f.get(ctx, a, b);
            let out = crate::fock::apply_to_vector(&fab, &modes, &vacuum, cutoff, &eval)
                .map_err(crate::error::MatrixError::Algebra)?;
            let expected_scalar = if a < b {
                Some(Rational::from_integer(0.into()))
            } else if a == b {
                Some(if a > 0 { -sval.clone() } else { sval.clone() })
            } else {
                None
            };
            if let Some(want) = expected_scalar {
                let ok = if num_traits::Zero::is_zero(&want) {
                    out.is_empty()
                } else {
                    out.len() == 1
                        && out
                            .get(&vec![0usize; modes.len()])
                            .map(|v| *v == want)
                            .unwrap_or(false)
                };
                if !ok {
                    rep.fail_note(format!("Fock vacuum action of F({a},{b}) deviates"));
                }
            }
        }
    }
    Ok(rep.finish())
}

//! The commuting family on the length-N quantum space: fundamental transfer
//! matrix, spinor- and fundamental-type Q-operators built from exact twisted
//! traces over the oscillator space, the diagonal Q0, and the D4 QQ-relation
//! checks.
//!
//! Twist parameters are evaluated at fixed generic rational points before the
//! trace is taken; the spectral variable z and the shift variable u stay
//! formal, so every verdict is an exact polynomial identity at those points.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::context::{std_vars, Ctx, Var};
use crate::error::ChainError;
use crate::lax::{self, DiagTwist, TwistTransform};
use crate::matrix::{build_r, OpMatrix, RBasis, SignedIndex};
use crate::osc::Register;
use crate::poly::{MultiPoly, Rational};
use crate::trace::{identity_trace_factor, twisted_trace_eval_normalized, WeightMap};
use crate::verify::{CheckReport, Reporter};

/// Spin-chain parameters: rank, length, and generic rational twist values
/// `t_1..t_r` with `t_i` outside `{0, +-1}`, pairwise distinct, and
/// `t_i t_j != 1`.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub rank: u8,
    pub length: usize,
    pub twists: Vec<Rational>,
}

impl ChainSpec {
    pub fn new(rank: u8, length: usize, twists: Vec<Rational>) -> Result<Self, ChainError> {
        if length == 0 {
            return Err(ChainError::ZeroLength);
        }
        if twists.len() != rank as usize {
            return Err(ChainError::TwistCount(rank as usize, twists.len()));
        }
        let one = Rational::one();
        for (i, t) in twists.iter().enumerate() {
            if t.is_zero() || *t == one || *t == -one.clone() {
                return Err(ChainError::DegenerateTwists(format!(
                    "t{} = {} lies in {{0, 1, -1}}",
                    i + 1,
                    t
                )));
            }
        }
        for i in 0..twists.len() {
            for j in 0..twists.len() {
                if i != j && twists[i] == twists[j] {
                    return Err(ChainError::DegenerateTwists(format!(
                        "t{} = t{}",
                        i + 1,
                        j + 1
                    )));
                }
                if i <= j && (&twists[i] * &twists[j]).is_one() {
                    return Err(ChainError::DegenerateTwists(format!(
                        "t{} t{} = 1",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(ChainSpec {
            rank,
            length,
            twists,
        })
    }

    pub fn dim(&self) -> usize {
        (2 * self.rank as usize).pow(self.length as u32)
    }

    /// Twist values as an evaluation map for the `t_k` variables.
    pub fn values(&self) -> BTreeMap<Var, Rational> {
        self.twists
            .iter()
            .enumerate()
            .map(|(k, v)| (std_vars::t(k as u8 + 1), v.clone()))
            .collect()
    }

    pub fn with_twists(&self, twists: Vec<Rational>) -> Result<Self, ChainError> {
        ChainSpec::new(self.rank, self.length, twists)
    }
}

/// Dense operator on the `(2r)^N`-dimensional quantum space with exact
/// polynomial entries (typically in `z` and the shift variable `u`).
#[derive(Debug, Clone)]
pub struct QuantumOperator {
    pub ctx: Ctx,
    pub rank: u8,
    pub sites: usize,
    pub dim: usize,
    pub entries: Vec<MultiPoly>,
    /// Trace-of-identity factor divided out during construction.
    pub normalization: Option<Rational>,
}

impl PartialEq for QuantumOperator {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}
impl Eq for QuantumOperator {}

impl QuantumOperator {
    pub fn zero(ctx: &Ctx, rank: u8, sites: usize) -> Self {
        let dim = (2 * rank as usize).pow(sites as u32);
        QuantumOperator {
            ctx: ctx.clone(),
            rank,
            sites,
            dim,
            entries: vec![MultiPoly::zero(ctx); dim * dim],
            normalization: None,
        }
    }

    pub fn identity(ctx: &Ctx, rank: u8, sites: usize) -> Self {
        let mut m = Self::zero(ctx, rank, sites);
        for k in 0..m.dim {
            m.entries[k * m.dim + k] = MultiPoly::one(ctx);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: MultiPoly) {
        self.entries[r * self.dim + c] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        out.normalization = None;
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        out.normalization = None;
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.sub(b);
        }
        out
    }

    pub fn scale(&self, p: &MultiPoly) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.mul(p);
        }
        out
    }

    pub fn scale_rat(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let entries: Vec<MultiPoly> = (0..d)
            .into_par_iter()
            .flat_map_iter(|r| {
                let row: Vec<MultiPoly> = (0..d)
                    .map(|c| {
                        let mut acc = MultiPoly::zero(&self.ctx);
                        for k in 0..d {
                            let a = self.get(r, k);
                            if a.is_zero() {
                                continue;
                            }
                            let b = other.get(k, c);
                            if b.is_zero() {
                                continue;
                            }
                            acc = acc.add(&a.mul(b));
                        }
                        acc
                    })
                    .collect();
                row.into_iter()
            })
            .collect();
        QuantumOperator {
            ctx: self.ctx.clone(),
            rank: self.rank,
            sites: self.sites,
            dim: d,
            entries,
            normalization: None,
        }
    }

    /// Substitutes inside every entry (used for `z -> z + u + c` shifts and
    /// for renaming the spectral variable).
    pub fn substitute(&self, map: &BTreeMap<Var, MultiPoly>) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.substitute(map);
        }
        out
    }

    /// The operator at the shifted argument `z + u + c`.
    pub fn shifted(&self, c: i64) -> Self {
        let z = MultiPoly::var(&self.ctx, std_vars::Z);
        let u = MultiPoly::var(&self.ctx, std_vars::U);
        let arg = z.add(&u).add(&MultiPoly::int(&self.ctx, c));
        self.substitute(&BTreeMap::from([(std_vars::Z, arg)]))
    }

    /// Conjugates by a per-site permutation of the 2r basis states (the
    /// quantum-space action of B(alpha), Btilde or J, each an involution).
    pub fn conjugate_sites(&self, perm: &[usize]) -> Self {
        let d2r = 2 * self.rank as usize;
        let map_flat = |mut p: usize| -> usize {
            let mut digits = vec![0usize; self.sites];
            for slot in digits.iter_mut().rev() {
                *slot = perm[p % d2r];
                p /= d2r;
            }
            digits.iter().fold(0, |acc, &d| acc * d2r + d)
        };
        let mut out = self.clone();
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.entries[map_flat(r) * self.dim + map_flat(c)] =
                    self.get(r, c).clone();
            }
        }
        out
    }

    pub fn max_degree_in(&self, v: Var) -> u16 {
        self.entries.iter().map(|p| p.degree_in(v)).max().unwrap_or(0)
    }

    /// Commutator `[self(x), other(y)]` with fresh spectral variables; true
    /// when it vanishes identically.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let sx = BTreeMap::from([(std_vars::Z, MultiPoly::var(&self.ctx, std_vars::X))]);
        let sy = BTreeMap::from([(std_vars::Z, MultiPoly::var(&self.ctx, std_vars::Y))]);
        let a = self.substitute(&sx);
        let b = other.substitute(&sy);
        a.mul(&b).sub(&b.mul(&a)).is_zero()
    }
}

/// Per-site basis permutation of `B(alpha)`.
pub fn perm_b_alpha(rank: u8, signs: &[i8]) -> Vec<usize> {
    let d = 2 * rank as usize;
    (0..d)
        .map(|p| {
            let a = SignedIndex::from_position(p, rank).0;
            let image = if signs[(a.unsigned_abs() - 1) as usize] == -1 {
                -a
            } else {
                a
            };
            SignedIndex(image).position(rank)
        })
        .collect()
}

/// Per-site basis permutation of `Btilde_(i,j)`.
pub fn perm_b_tilde(rank: u8, i: u8, j: u8) -> Vec<usize> {
    let d = 2 * rank as usize;
    (0..d)
        .map(|p| {
            let a = SignedIndex::from_position(p, rank).0;
            let k = a.unsigned_abs() as u8;
            let image = if k == i {
                a.signum() * j as i32
            } else if k == j {
                a.signum() * i as i32
            } else {
                a
            };
            SignedIndex(image).position(rank)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Transfer matrix
// ---------------------------------------------------------------------------

/// Embeds a two-space operator (aux o site_k) into aux o site_1..site_N.
fn embed_aux_site(op: &OpMatrix, rank: u8, sites: usize, k: usize) -> OpMatrix {
    let d = 2 * rank as usize;
    let mut out = OpMatrix::zero(&op.ctx, vec![rank; sites + 1]);
    let qdim: usize = d.pow(sites as u32);
    // strides for site k inside the quantum part
    let right: usize = d.pow((sites - 1 - k) as u32);
    for (&(rc, cc), e) in &op.entries {
        let (ra, rs) = ((rc as usize) / d, (rc as usize) % d);
        let (ca, cs) = ((cc as usize) / d, (cc as usize) % d);
        // iterate over the identity part
        let other: usize = qdim / d;
        for rest in 0..other {
            let hi = rest / right;
            let lo = rest % right;
            let rq = (hi * d + rs) * right + lo;
            let cq = (hi * d + cs) * right + lo;
            out.entries.insert(
                ((ra * qdim + rq) as u32, (ca * qdim + cq) as u32),
                e.clone(),
            );
        }
    }
    out
}

/// The fundamental transfer matrix
/// `T(x) = tr_aux D_aux R_(a,1)(x) ... R_(a,N)(x)` at the chain's twist
/// values; entries are polynomials of degree 2N in the spectral variable.
pub fn transfer_matrix(ctx: &Ctx, spec: &ChainSpec, var: Var) -> Result<QuantumOperator, ChainError> {
    let rank = spec.rank;
    let d = 2 * rank as usize;
    let x = MultiPoly::var(ctx, var);
    let r2 = build_r(ctx, rank, &x, RBasis::Bold);
    let values = spec.values();
    let dtwist = DiagTwist::fundamental(rank).eval(ctx, &values)?;
    // D acts on the auxiliary space only.
    let mut mono = embed_aux_site(&r2, rank, spec.length, 0);
    {
        let qdim = spec.dim();
        let mut demb = OpMatrix::zero(ctx, vec![rank; spec.length + 1]);
        for p in 0..d {
            let w = dtwist.get(p, p);
            for q in 0..qdim {
                demb.entries
                    .insert(((p * qdim + q) as u32, (p * qdim + q) as u32), w.clone());
            }
        }
        mono = demb.mul(&mono);
    }
    for k in 1..spec.length {
        mono = mono.mul(&embed_aux_site(&r2, rank, spec.length, k));
    }
    // partial trace over the auxiliary space
    let qdim = spec.dim();
    let mut t = QuantumOperator::zero(ctx, rank, spec.length);
    for (&(rc, cc), e) in &mono.entries {
        let (ra, rq) = ((rc as usize) / qdim, (rc as usize) % qdim);
        let (ca, cq) = ((cc as usize) / qdim, (cc as usize) % qdim);
        if ra != ca {
            continue;
        }
        let p = e.scalar_part();
        if !p.is_zero() {
            let cur = t.get(rq, cq).add(&p);
            t.set(rq, cq, cur);
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Q-operators
// ---------------------------------------------------------------------------

/// Which Q-operator to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QFamily {
    /// Spinor-type `Q_s(z; I)`: `I` lists the positions of the -1 entries of
    /// the conjugating sign vector.
    Spinor { minus: Vec<u8> },
    /// Fundamental-type `Q_f`, its J-conjugate (`bar`), and the
    /// `Btilde_(i,r)`-conjugates (`node = Some(i)`).
    Fund { bar: bool, node: Option<u8> },
}

impl QFamily {
    pub fn label(&self) -> String {
        match self {
            QFamily::Spinor { minus } => format!(
                "Qs({})",
                minus
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            QFamily::Fund { bar, node } => {
                let mut s = if *bar { "Qfbar".to_string() } else { "Qf".to_string() };
                if let Some(i) = node {
                    s.push_str(&format!("({i})"));
                }
                s
            }
        }
    }

    fn twist_transform(&self, rank: u8) -> TwistTransform {
        match self {
            QFamily::Spinor { minus } => TwistTransform::from_sign_set(rank, minus),
            QFamily::Fund { bar, node } => {
                let mut t = if *bar {
                    TwistTransform {
                        flips: vec![-1; rank as usize],
                        swap: None,
                    }
                } else {
                    TwistTransform::identity(rank)
                };
                t.swap = node.map(|i| (i, rank));
                t
            }
        }
    }

    fn quantum_perms(&self, rank: u8) -> Vec<Vec<usize>> {
        match self {
            QFamily::Spinor { minus } => {
                let t = TwistTransform::from_sign_set(rank, minus);
                vec![perm_b_alpha(rank, &t.signs())]
            }
            QFamily::Fund { bar, node } => {
                let mut perms = Vec::new();
                if *bar {
                    perms.push(perm_b_alpha(rank, &vec![-1; rank as usize]));
                }
                if let Some(i) = node {
                    perms.push(perm_b_tilde(rank, *i, rank));
                }
                perms
            }
        }
    }
}

/// Builds a Q-operator: multiplies the N degenerate Lax factors in the
/// oscillator algebra (tensoring over the quantum space), takes the
/// normalized exact twisted trace mode by mode at the transformed twist
/// values, and conjugates the quantum space. The divided-out
/// trace-of-identity factor is recorded on the result.
pub fn q_operator(
    ctx: &Ctx,
    spec: &ChainSpec,
    family: &QFamily,
    var: Var,
) -> Result<QuantumOperator, ChainError> {
    let rank = spec.rank;
    let transform = family.twist_transform(rank);
    let values_vec = transform.apply_values(&spec.twists);
    // re-validate: flips/swaps keep genericity, but guard anyway
    let tvalues: BTreeMap<Var, Rational> = values_vec
        .iter()
        .enumerate()
        .map(|(k, v)| (std_vars::t(k as u8 + 1), v.clone()))
        .collect();
    let z = MultiPoly::var(ctx, var);
    let (lax_matrix, weights): (OpMatrix, WeightMap) = match family {
        QFamily::Spinor { .. } => (
            lax::spinor_degenerate(ctx, rank, Register::None, &z),
            lax::weights_spinor(rank, Register::None),
        ),
        QFamily::Fund { .. } => (
            lax::fund_degenerate(ctx, rank, Register::None, &z),
            lax::weights_fund(rank, Register::None),
        ),
    };
    for (mode, w) in &weights {
        if w.eval(&tvalues)?.is_one() {
            return Err(ChainError::DegenerateTwists(format!(
                "twist weight 1 on mode {mode}"
            )));
        }
    }
    // N-fold product in the oscillator space, tensor over the quantum space.
    let mut mono = lax_matrix.clone();
    for _ in 1..spec.length {
        mono = mono.tensor(&lax_matrix);
    }
    // Normalized twisted trace of every entry.
    let entries: Vec<((u32, u32), MultiPoly)> = mono
        .entries
        .par_iter()
        .map(|(&k, e)| {
            let tr = twisted_trace_eval_normalized(e, &weights, &tvalues)
                .expect("weights cover all modes");
            (k, tr)
        })
        .collect();
    let mut q = QuantumOperator::zero(ctx, rank, spec.length);
    for ((r, c), p) in entries {
        if !p.is_zero() {
            q.set(r as usize, c as usize, p);
        }
    }
    for perm in family.quantum_perms(rank) {
        q = q.conjugate_sites(&perm);
    }
    q.normalization = Some(identity_trace_factor(&weights, &tvalues)?);
    Ok(q)
}

/// The diagonal Q-operator `Q0(z) = (z+1)^N` times the identity.
pub fn q_zero(ctx: &Ctx, spec: &ChainSpec, var: Var) -> QuantumOperator {
    let zp1 = MultiPoly::var(ctx, var).add(&MultiPoly::one(ctx));
    QuantumOperator::identity(ctx, spec.rank, spec.length).scale(&zp1.pow(spec.length as u32))
}

/// Q0 via the trivial auxiliary representation: the vacuum expectation of the
/// full spinor Lax matrix at `s = 0`, argument `z + 1`, one site.
pub fn q_zero_from_trivial_rep(ctx: &Ctx, rank: u8, var: Var) -> QuantumOperator {
    let arg = MultiPoly::var(ctx, var).add(&MultiPoly::one(ctx));
    let zero_s = MultiPoly::zero(ctx);
    let l = lax::spinor_full(ctx, rank, Register::None, &arg, &zero_s);
    let mut q = QuantumOperator::zero(ctx, rank, 1);
    for (&(r, c), e) in &l.entries {
        q.set(r as usize, c as usize, e.vacuum_expectation());
    }
    q
}

// ---------------------------------------------------------------------------
// Commuting-family checks
// ---------------------------------------------------------------------------

/// Verifies pairwise commutation of labelled operators as exact polynomial
/// identities in two fresh spectral variables.
pub fn check_commuting_family(
    ops: &[(String, QuantumOperator)],
    params: serde_json::Value,
) -> CheckReport {
    let mut rep = Reporter::new("commute", params);
    for i in 0..ops.len() {
        for j in i..ops.len() {
            if !ops[i].1.commutes_with(&ops[j].1) {
                rep.fail_note(format!("[{}, {}] != 0", ops[i].0, ops[j].0));
            }
        }
    }
    rep.finish()
}

/// Verifies the transfer-matrix twist covariance: conjugating the quantum
/// space by `B(alpha)` per site equals relabelling the twists.
pub fn check_twist_covariance(
    ctx: &Ctx,
    spec: &ChainSpec,
    signs: &[i8],
) -> Result<CheckReport, ChainError> {
    let mut rep = Reporter::new(
        "twist-covariance",
        json!({ "rank": spec.rank, "length": spec.length, "signs": signs }),
    );
    let t = transfer_matrix(ctx, spec, std_vars::Z)?;
    let conj = t.conjugate_sites(&perm_b_alpha(spec.rank, signs));
    let transform = TwistTransform {
        flips: signs.to_vec(),
        swap: None,
    };
    let flipped = spec.with_twists(transform.apply_values(&spec.twists))?;
    let t_flipped = transfer_matrix(ctx, &flipped, std_vars::Z)?;
    if conj != t_flipped {
        rep.fail_note("conjugated transfer matrix differs from twist-flipped one".to_string());
    }
    Ok(rep.finish())
}

// ---------------------------------------------------------------------------
// QQ-relations for D4
// ---------------------------------------------------------------------------

/// Which of the three QQ-relations to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QQRelation {
    Spinor1,
    Spinor2,
    Fund,
}

/// Options for [`qq_check`].
#[derive(Debug, Clone)]
pub struct QQOptions {
    /// Run the pairwise-commutation report on all constructed operators.
    pub check_commutation: bool,
    /// Mutation input: build the wrong-node spinor Q (sign set {3} instead
    /// of {1}) in the first relation; the check must then fail.
    pub wrong_node: bool,
}

impl Default for QQOptions {
    fn default() -> Self {
        QQOptions {
            check_commutation: true,
            wrong_node: false,
        }
    }
}

/// Verifies the D4 QQ-relations at the chain's twist point, keeping `z` and
/// the shift `u` formal. The middle-node operator `A(z)` is defined from the
/// first spinor relation divided by `(t1 - t2)`; the second spinor relation
/// and the fundamental relation must then reproduce the same `A` exactly.
///
/// If a relation fails exactly, a per-relation scalar reconciliation is
/// attempted and reported; only exact equality (scalar 1) counts as a pass.
pub fn qq_check(
    ctx: &Ctx,
    spec: &ChainSpec,
    relations: &[QQRelation],
    opts: &QQOptions,
) -> Result<CheckReport, ChainError> {
    if spec.rank != 4 {
        return Err(ChainError::DegenerateTwists(format!(
            "QQ-relations are formulated for rank 4, got {}",
            spec.rank
        )));
    }
    let mut rep = Reporter::new(
        "qq",
        json!({
            "rank": spec.rank,
            "length": spec.length,
            "twists": spec.twists.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "relations": relations.len(),
            "wrong_node": opts.wrong_node,
        }),
    );
    let t1 = &spec.twists[0];
    let t2 = &spec.twists[1];
    let t3 = &spec.twists[2];
    let t4 = &spec.twists[3];
    let pref1 = t1 - t2;
    let pref2 = t1 - t2.clone().recip();
    let pref3 = t3 - t4;
    if pref1.is_zero() || pref2.is_zero() || pref3.is_zero() {
        return Err(ChainError::DegenerateTwists(
            "zero QQ prefactor".to_string(),
        ));
    }

    let z = std_vars::Z;
    let qs = |minus: &[u8]| -> Result<QuantumOperator, ChainError> {
        q_operator(ctx, spec, &QFamily::Spinor { minus: minus.to_vec() }, z)
    };
    let first_node: &[u8] = if opts.wrong_node { &[3] } else { &[1] };
    let qs1 = qs(first_node)?;
    let qs2 = qs(&[2])?;
    let qs_empty = qs(&[])?;
    let qs12 = qs(&[1, 2])?;

    // A(z) from the first spinor relation.
    let lhs1 = qs2
        .shifted(-1)
        .mul(&qs1.shifted(0))
        .scale_rat(t1)
        .sub(&qs2.shifted(0).mul(&qs1.shifted(-1)).scale_rat(t2));
    let a_op = lhs1.scale_rat(&pref1.clone().recip());
    rep.note(format!(
        "A(z): degree {} in z, {} in u",
        a_op.max_degree_in(std_vars::Z),
        a_op.max_degree_in(std_vars::U)
    ));
    for (q, name) in [(&qs1, "Qs{1}"), (&qs2, "Qs{2}"), (&qs_empty, "Qs{}"), (&qs12, "Qs{1,2}")] {
        if let Some(nf) = &q.normalization {
            rep.note(format!("normalization {name}: {nf}"));
        }
    }

    let verify_relation = |name: &str, lhs: QuantumOperator, rhs: QuantumOperator| -> Option<String> {
        let diff = lhs.sub(&rhs);
        if diff.is_zero() {
            return None;
        }
        // scalar reconciliation: lhs = c * rhs for a rational c?
        let lead = (0..lhs.entries.len()).find(|&k| !lhs.entries[k].is_zero() || !rhs.entries[k].is_zero());
        if let Some(k) = lead {
            let (le, re) = (&lhs.entries[k], &rhs.entries[k]);
            if !re.is_zero() && !le.is_zero() {
                let (lm, lc) = le.terms.iter().next().unwrap();
                if let Some(rc) = re.terms.get(lm) {
                    let c = lc / rc;
                    if lhs.sub(&rhs.scale_rat(&c)).is_zero() {
                        return Some(format!(
                            "{name}: holds only up to scalar {c} (exact identity required)"
                        ));
                    }
                }
            }
        }
        Some(format!("{name}: fails, no scalar reconciles the two sides"))
    };

    for relation in relations {
        match relation {
            QQRelation::Spinor1 => {
                // definitionally satisfied; assert A's defining identity anyway
                if let Some(msg) = verify_relation("spinor1", lhs1.clone(), a_op.scale_rat(&pref1)) {
                    rep.fail_note(msg);
                }
            }
            QQRelation::Spinor2 => {
                let lhs = qs_empty
                    .shifted(-1)
                    .mul(&qs12.shifted(0))
                    .scale_rat(t1)
                    .sub(
                        &qs_empty
                            .shifted(0)
                            .mul(&qs12.shifted(-1))
                            .scale_rat(&t2.clone().recip()),
                    );
                if let Some(msg) = verify_relation("spinor2", lhs, a_op.scale_rat(&pref2)) {
                    rep.fail_note(msg);
                }
            }
            QQRelation::Fund => {
                let qf = q_operator(ctx, spec, &QFamily::Fund { bar: false, node: None }, z)?;
                let qf3 = q_operator(ctx, spec, &QFamily::Fund { bar: false, node: Some(3) }, z)?;
                for (q, name) in [(&qf, "Qf"), (&qf3, "Qf(3)")] {
                    if let Some(nf) = &q.normalization {
                        rep.note(format!("normalization {name}: {nf}"));
                    }
                }
                let lhs = qf
                    .shifted(1)
                    .mul(&qf3.shifted(0))
                    .scale_rat(t3)
                    .sub(&qf.shifted(0).mul(&qf3.shifted(1)).scale_rat(t4));
                // Q0^[u](z) = (z + u + 1)^N
                let zu1 = MultiPoly::var(ctx, std_vars::Z)
                    .add(&MultiPoly::var(ctx, std_vars::U))
                    .add(&MultiPoly::one(ctx));
                let rhs = a_op
                    .scale(&zu1.pow(spec.length as u32))
                    .scale_rat(&pref3);
                if let Some(msg) = verify_relation("fund", lhs, rhs) {
                    rep.fail_note(msg);
                }
            }
        }
    }

    if opts.check_commutation {
        let mut ops: Vec<(String, QuantumOperator)> = vec![
            ("Qs{1}".into(), qs1),
            ("Qs{2}".into(), qs2),
            ("Qs{}".into(), qs_empty),
            ("Qs{1,2}".into(), qs12),
            ("A".into(), a_op.substitute(&BTreeMap::from([(std_vars::U, MultiPoly::zero(ctx))]))),
        ];
        if relations.contains(&QQRelation::Fund) {
            ops.push((
                "Qf".into(),
                q_operator(ctx, spec, &QFamily::Fund { bar: false, node: None }, z)?,
            ));
        }
        let sub = check_commuting_family(&ops, json!({ "within": "qq" }));
        if !sub.passed() {
            for n in sub.notes {
                rep.fail_note(format!("commutation: {n}"));
            }
        }
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::standard_context;
    use crate::poly::rat;

    fn twists(vals: &[(i64, i64)]) -> Vec<Rational> {
        vals.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    #[test]
    fn chain_spec_validation() {
        assert!(ChainSpec::new(2, 1, twists(&[(1, 2), (1, 3)])).is_ok());
        // t = 1 rejected
        assert!(ChainSpec::new(2, 1, twists(&[(1, 1), (1, 3)])).is_err());
        // t_i t_j = 1 rejected
        assert!(ChainSpec::new(2, 1, twists(&[(1, 2), (2, 1)])).is_err());
        // equal twists rejected
        assert!(ChainSpec::new(2, 1, twists(&[(1, 2), (1, 2)])).is_err());
        // zero length rejected
        assert!(ChainSpec::new(2, 0, twists(&[(1, 2), (1, 3)])).is_err());
        // wrong count
        assert!(ChainSpec::new(3, 1, twists(&[(1, 2), (1, 3)])).is_err());
    }

    #[test]
    fn transfer_matrix_shape() {
        // r=2, N=1: dimension 4, entries of degree 2
        let ctx = standard_context(2);
        let spec = ChainSpec::new(2, 1, twists(&[(1, 2), (1, 3)])).unwrap();
        let t = transfer_matrix(&ctx, &spec, std_vars::Z).unwrap();
        assert_eq!(t.dim, 4);
        assert_eq!(t.max_degree_in(std_vars::Z), 2);
    }

    #[test]
    fn q_zero_forms() {
        let ctx = standard_context(2);
        let spec1 = ChainSpec::new(2, 1, twists(&[(1, 2), (1, 3)])).unwrap();
        let q1 = q_zero(&ctx, &spec1, std_vars::Z);
        let zp1 = MultiPoly::var(&ctx, std_vars::Z).add(&MultiPoly::one(&ctx));
        assert_eq!(q1.get(0, 0), &zp1);
        let spec2 = ChainSpec::new(2, 2, twists(&[(1, 2), (1, 3)])).unwrap();
        let q2 = q_zero(&ctx, &spec2, std_vars::Z);
        assert_eq!(q2.get(0, 0), &zp1.pow(2));
        assert!(q2.get(0, 1).is_zero());
        // derived: vacuum expectation of the trivial-rep spinor Lax at z+1
        let derived = q_zero_from_trivial_rep(&ctx, 2, std_vars::Z);
        assert_eq!(derived, q1);
    }

    #[test]
    fn spinor_q_r2_entries() {
        // r=2, N=1: entries are rationals plus z times rationals
        let ctx = standard_context(2);
        let spec = ChainSpec::new(2, 1, twists(&[(1, 2), (1, 3)])).unwrap();
        let q = q_operator(&ctx, &spec, &QFamily::Spinor { minus: vec![] }, std_vars::Z).unwrap();
        assert_eq!(q.max_degree_in(std_vars::Z), 1);
        // diagonal at positions (-2,-2): z - w/(1-w) with w = t1 t2 = 1/6
        let w = rat(1, 6);
        let g = w.clone() / (Rational::one() - w);
        let expect = MultiPoly::var(&ctx, std_vars::Z).sub(&MultiPoly::constant(&ctx, g));
        assert_eq!(q.get(0, 0), &expect);
        // unit block
        assert_eq!(q.get(2, 2), &MultiPoly::one(&ctx));
        assert!(q.normalization.is_some());
    }

    #[test]
    fn commuting_family_r2() {
        let ctx = standard_context(2);
        let spec = ChainSpec::new(2, 1, twists(&[(1, 2), (1, 3)])).unwrap();
        let t = transfer_matrix(&ctx, &spec, std_vars::Z).unwrap();
        let qs = q_operator(&ctx, &spec, &QFamily::Spinor { minus: vec![] }, std_vars::Z).unwrap();
        let qf = q_operator(&ctx, &spec, &QFamily::Fund { bar: false, node: None }, std_vars::Z)
            .unwrap();
        let report = check_commuting_family(
            &[
                ("T".into(), t),
                ("Qs".into(), qs),
                ("Qf".into(), qf),
            ],
            json!({ "rank": 2, "length": 1 }),
        );
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn twist_covariance_r2() {
        let ctx = standard_context(2);
        let spec = ChainSpec::new(2, 1, twists(&[(1, 2), (1, 3)])).unwrap();
        let report = check_twist_covariance(&ctx, &spec, &[1, -1]).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}

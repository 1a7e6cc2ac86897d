//! Normal-ordered oscillator (Weyl) algebra with exact coefficients.
//!
//! Elements are finite sums of polynomial coefficients times normal-ordered
//! oscillator monomials. Within each mode all creation operators sit to the
//! left of all annihilation operators, modes are listed in canonical order,
//! and distinct modes commute, so the normal form is unique and equality is
//! decidable. Products are reordered with [a, abar] = 1 per mode:
//!
//!   a^q abar^p = sum_k k! C(q,k) C(p,k) abar^(p-k) a^(q-k)

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::context::{Ctx, Var};
use crate::error::AlgebraError;
use crate::poly::{MultiPoly, Rational};

/// Oscillator register tag, used when two independent copies of a mode family
/// are tensored together in the factorisation identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Register {
    None,
    One,
    Two,
}

impl Register {
    pub fn other(self) -> Register {
        match self {
            Register::One => Register::Two,
            Register::Two => Register::One,
            Register::None => Register::None,
        }
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Register::None => Ok(()),
            Register::One => write!(f, "@1"),
            Register::Two => write!(f, "@2"),
        }
    }
}

/// Canonical oscillator mode labels.
///
/// * `Spinor { i, j }` is the pair `(i,-j)` with `i < j`: annihilator
///   `a_(i,-j)`, creator `abar_(-j,i)`.
/// * `Vector { k }` with `k` in `-(r-1)..-1, 1..r-1`: the pair `a_k, abar_k`.
/// * `Plain { idx }` names the rank-3 oscillators `a_1..a_4` used by the
///   six-dimensional matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OscMode {
    Spinor { reg: Register, i: u8, j: u8 },
    Vector { reg: Register, k: i8 },
    Plain { idx: u8 },
}

impl fmt::Display for OscMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OscMode::Spinor { reg, i, j } => write!(f, "s({i},-{j}){reg}"),
            OscMode::Vector { reg, k } => write!(f, "v({k}){reg}"),
            OscMode::Plain { idx } => write!(f, "o{idx}"),
        }
    }
}

/// A normal-ordered oscillator monomial: sorted `(mode, p, q)` triples with
/// `p` the creation power and `q` the annihilation power; no `(0,0)` entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OscMonomial(pub Vec<(OscMode, u16, u16)>);

impl OscMonomial {
    pub fn unit() -> Self {
        OscMonomial(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn single(mode: OscMode, p: u16, q: u16) -> Self {
        if p == 0 && q == 0 {
            Self::unit()
        } else {
            OscMonomial(vec![(mode, p, q)])
        }
    }

    pub fn powers(&self, mode: OscMode) -> (u16, u16) {
        self.0
            .iter()
            .find(|(m, _, _)| *m == mode)
            .map(|&(_, p, q)| (p, q))
            .unwrap_or((0, 0))
    }

    /// Total creation degree (sum of `p` over modes).
    pub fn creation_degree(&self) -> u32 {
        self.0.iter().map(|&(_, p, _)| p as u32).sum()
    }

    /// Total annihilation degree.
    pub fn annihilation_degree(&self) -> u32 {
        self.0.iter().map(|&(_, _, q)| q as u32).sum()
    }

    pub fn degree(&self) -> u32 {
        self.creation_degree() + self.annihilation_degree()
    }

    /// True if every mode conserves occupation number (`p == q`).
    pub fn is_number_conserving(&self) -> bool {
        self.0.iter().all(|&(_, p, q)| p == q)
    }
}

impl fmt::Display for OscMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(mode, p, _) in &self.0 {
            if p > 0 {
                if !first {
                    write!(f, " * ")?;
                }
                first = false;
                write!(f, "ad[{mode}]^{p}")?;
            }
        }
        for &(mode, _, q) in &self.0 {
            if q > 0 {
                if !first {
                    write!(f, " * ")?;
                }
                first = false;
                write!(f, "a[{mode}]^{q}")?;
            }
        }
        Ok(())
    }
}

/// Finite sum of polynomial coefficients times normal-ordered monomials; the
/// universal value type of the crate.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub ctx: Ctx,
    pub terms: BTreeMap<OscMonomial, MultiPoly>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for AlgebraElement {}

fn factorial(k: u16) -> BigInt {
    let mut f = BigInt::one();
    for j in 2..=k as u64 {
        f *= j;
    }
    f
}

fn binomial(n: u16, k: u16) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k as u64 {
        num *= n as u64 - j;
        den *= j + 1;
    }
    num / den
}

impl AlgebraElement {
    pub fn zero(ctx: &Ctx) -> Self {
        AlgebraElement {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_poly(MultiPoly::one(ctx))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let ctx = p.ctx.clone();
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(OscMonomial::unit(), p);
        }
        AlgebraElement { ctx, terms }
    }

    pub fn from_rational(ctx: &Ctx, c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(ctx, c))
    }

    pub fn var(ctx: &Ctx, v: Var) -> Self {
        Self::from_poly(MultiPoly::var(ctx, v))
    }

    /// The annihilation operator `a[mode]`.
    pub fn annihilator(ctx: &Ctx, mode: OscMode) -> Self {
        Self::monomial(ctx, OscMonomial::single(mode, 0, 1), MultiPoly::one(ctx))
    }

    /// The creation operator `ad[mode]`.
    pub fn creator(ctx: &Ctx, mode: OscMode) -> Self {
        Self::monomial(ctx, OscMonomial::single(mode, 1, 0), MultiPoly::one(ctx))
    }

    /// The number operator `ad[mode] a[mode]`.
    pub fn number_op(ctx: &Ctx, mode: OscMode) -> Self {
        Self::monomial(ctx, OscMonomial::single(mode, 1, 1), MultiPoly::one(ctx))
    }

    pub fn monomial(ctx: &Ctx, m: OscMonomial, coeff: MultiPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        AlgebraElement {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the empty monomial.
    pub fn scalar_part(&self) -> MultiPoly {
        self.terms
            .get(&OscMonomial::unit())
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&self.ctx))
    }

    /// True when the element is a pure polynomial (no oscillators).
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|m| m.is_unit())
    }

    pub fn modes(&self) -> BTreeSet<OscMode> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(mode, _, _)| mode))
            .collect()
    }

    /// Largest per-mode creation power across all terms.
    pub fn max_creation_power(&self) -> u16 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(_, p, _)| p))
            .max()
            .unwrap_or(0)
    }

    pub fn max_annihilation_power(&self) -> u16 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(_, _, q)| q))
            .max()
            .unwrap_or(0)
    }

    fn add_term(terms: &mut BTreeMap<OscMonomial, MultiPoly>, m: OscMonomial, c: MultiPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(crate::context::Context::same(&self.ctx, &other.ctx));
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::add_term(&mut terms, m.clone(), c.clone());
        }
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, p: &MultiPoly) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            Self::add_term(&mut terms, m.clone(), c.mul(p));
        }
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn scale_rat(&self, c: &Rational) -> Self {
        self.scale(&MultiPoly::constant(&self.ctx, c.clone()))
    }

    /// Normal-ordered product of two monomials: a list of `(monomial, count)`
    /// pairs from the per-mode Wick reordering.
    #[allow(clippy::type_complexity)]
    fn normal_order(m1: &OscMonomial, m2: &OscMonomial) -> Vec<(OscMonomial, BigInt)> {
        // Merge the two sorted mode lists.
        let mut merged: Vec<(OscMode, u16, u16, u16, u16)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < m1.0.len() || j < m2.0.len() {
            if j >= m2.0.len() || (i < m1.0.len() && m1.0[i].0 < m2.0[j].0) {
                let (mode, p, q) = m1.0[i];
                merged.push((mode, p, q, 0, 0));
                i += 1;
            } else if i >= m1.0.len() || m2.0[j].0 < m1.0[i].0 {
                let (mode, p, q) = m2.0[j];
                merged.push((mode, 0, 0, p, q));
                j += 1;
            } else {
                let (mode, p1, q1) = m1.0[i];
                let (_, p2, q2) = m2.0[j];
                merged.push((mode, p1, q1, p2, q2));
                i += 1;
                j += 1;
            }
        }
        // Cartesian product of per-mode contraction sums.
        let mut acc: Vec<(Vec<(OscMode, u16, u16)>, BigInt)> = vec![(Vec::new(), BigInt::one())];
        for (mode, p1, q1, p2, q2) in merged {
            let kmax = q1.min(p2);
            let mut next = Vec::with_capacity(acc.len() * (kmax as usize + 1));
            for k in 0..=kmax {
                let w = factorial(k) * binomial(q1, k) * binomial(p2, k);
                let (p, q) = (p1 + p2 - k, q1 + q2 - k);
                for (entries, c) in &acc {
                    let mut e2 = entries.clone();
                    if p > 0 || q > 0 {
                        e2.push((mode, p, q));
                    }
                    next.push((e2, c * &w));
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|(e, c)| (OscMonomial(e), c))
            .collect()
    }

    /// Wick product: the normal-ordered product of `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(crate::context::Context::same(&self.ctx, &other.ctx));
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1.mul(c2);
                for (m, w) in Self::normal_order(m1, m2) {
                    let coeff = if w.is_one() {
                        c.clone()
                    } else {
                        c.scale(&BigRational::from_integer(w))
                    };
                    Self::add_term(&mut terms, m, coeff);
                }
            }
        }
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Context-validated product, the public entry point of the operation.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if !crate::context::Context::same(&self.ctx, &other.ctx) {
            return Err(AlgebraError::ContextMismatch);
        }
        Ok(self.mul(other))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn checked_commutator(&self, other: &Self) -> Result<Self, AlgebraError> {
        if !crate::context::Context::same(&self.ctx, &other.ctx) {
            return Err(AlgebraError::ContextMismatch);
        }
        Ok(self.commutator(other))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Applies the element to the Fock vacuum: terms with any annihilation
    /// power vanish; the remainder is a sum of pure creation monomials (the
    /// state `e|0>` written in the algebra).
    pub fn vacuum_apply(&self) -> Self {
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.annihilation_degree() == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Vacuum expectation value `<0| e |0>`.
    pub fn vacuum_expectation(&self) -> MultiPoly {
        self.scalar_part()
    }

    /// Substitutes polynomials for scalar variables inside every coefficient.
    pub fn substitute_vars(&self, map: &BTreeMap<Var, MultiPoly>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            Self::add_term(&mut terms, m.clone(), c.substitute(map));
        }
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Renames modes through a bijection. The map must send distinct modes to
    /// distinct modes; pairs map to pairs, so normal ordering is preserved.
    pub fn rename_modes(&self, map: &BTreeMap<OscMode, OscMode>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut entries: Vec<(OscMode, u16, u16)> = m
                .0
                .iter()
                .map(|&(mode, p, q)| (*map.get(&mode).unwrap_or(&mode), p, q))
                .collect();
            entries.sort();
            Self::add_term(&mut terms, OscMonomial(entries), c.clone());
        }
        AlgebraElement {
            ctx: self.ctx.clone(),
            terms,
        }
    }
}

impl fmt::Display for AlgebraElement {
    /// Canonical text grammar:
    /// `<rational> [* <var>^<k> ...] [* ad[<mode>]^<p> ...] [* a[<mode>]^<q> ...] (+ ...)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, poly) in &self.terms {
            for (mono, c) in &poly.terms {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{c}")?;
                for (i, &e) in mono.0.iter().enumerate() {
                    if e > 0 {
                        write!(f, " * {}^{}", self.ctx.name(Var(i)), e)?;
                    }
                }
                for &(mode, p, _) in &m.0 {
                    if p > 0 {
                        write!(f, " * ad[{mode}]^{p}")?;
                    }
                }
                for &(mode, _, q) in &m.0 {
                    if q > 0 {
                        write!(f, " * a[{mode}]^{q}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// One oscillator generator: a creation or annihilation operator of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Generator {
    pub mode: OscMode,
    pub creation: bool,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.creation {
            write!(f, "ad[{}]", self.mode)
        } else {
            write!(f, "a[{}]", self.mode)
        }
    }
}

impl Generator {
    pub fn element(&self, ctx: &Ctx) -> AlgebraElement {
        if self.creation {
            AlgebraElement::creator(ctx, self.mode)
        } else {
            AlgebraElement::annihilator(ctx, self.mode)
        }
    }

    /// Canonical commutator `[g1, g2]` as a rational scalar.
    fn canonical_commutator(g1: &Generator, g2: &Generator) -> i64 {
        if g1.mode != g2.mode {
            return 0;
        }
        match (g1.creation, g2.creation) {
            (false, true) => 1,
            (true, false) => -1,
            _ => 0,
        }
    }
}

/// A substitution on the oscillator generators, applied as an algebra
/// homomorphism. Generators not listed map to themselves.
#[derive(Debug, Clone, Default)]
pub struct SubstitutionRules {
    pub images: BTreeMap<Generator, AlgebraElement>,
}

impl SubstitutionRules {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, g: Generator, image: AlgebraElement) {
        self.images.insert(g, image);
    }

    pub fn image(&self, ctx: &Ctx, g: Generator) -> AlgebraElement {
        self.images.get(&g).cloned().unwrap_or_else(|| g.element(ctx))
    }

    /// Verifies the rules preserve the canonical commutation relations on all
    /// relevant generator pairs: the rule domain, the partners of its modes,
    /// and every generator appearing in an image.
    pub fn check_homomorphism(&self, ctx: &Ctx) -> Result<(), AlgebraError> {
        let mut gens: BTreeSet<Generator> = BTreeSet::new();
        for (g, img) in &self.images {
            gens.insert(*g);
            gens.insert(Generator {
                mode: g.mode,
                creation: !g.creation,
            });
            for mode in img.modes() {
                gens.insert(Generator {
                    mode,
                    creation: false,
                });
                gens.insert(Generator {
                    mode,
                    creation: true,
                });
            }
        }
        let gens: Vec<Generator> = gens.into_iter().collect();
        for g1 in &gens {
            for g2 in &gens {
                let expected = AlgebraElement::from_rational(
                    ctx,
                    BigRational::from_integer(Generator::canonical_commutator(g1, g2).into()),
                );
                let got = self.image(ctx, *g1).commutator(&self.image(ctx, *g2));
                if got != expected {
                    return Err(AlgebraError::NotHomomorphism(
                        g1.to_string(),
                        g2.to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Applies the homomorphism to `e` and renormal-orders. The rule set is
    /// checked first; a non-homomorphic rule set is rejected with the
    /// violating pair.
    pub fn apply(&self, e: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_homomorphism(&e.ctx)?;
        Ok(self.apply_unchecked(e))
    }

    /// Applies the homomorphism without re-running the pair check; used
    /// internally after one up-front validation.
    pub fn apply_unchecked(&self, e: &AlgebraElement) -> AlgebraElement {
        let ctx = &e.ctx;
        let mut out = AlgebraElement::zero(ctx);
        for (m, c) in &e.terms {
            let mut term = AlgebraElement::from_poly(c.clone());
            // Creators first (left), then annihilators, in canonical mode
            // order; valid because images of commuting generators commute.
            for &(mode, p, _) in &m.0 {
                if p > 0 {
                    let img = self.image(ctx, Generator { mode, creation: true });
                    term = term.mul(&img.pow(p as u32));
                }
            }
            for &(mode, _, q) in &m.0 {
                if q > 0 {
                    let img = self.image(
                        ctx,
                        Generator {
                            mode,
                            creation: false,
                        },
                    );
                    term = term.mul(&img.pow(q as u32));
                }
            }
            out = out.add(&term);
        }
        out
    }
}

//! Exact multivariate polynomials and rational functions over the rationals.
//!
//! Sparse representation: a map from exponent vectors to `BigRational`
//! coefficients, iterated in graded lexicographic order. Quadratic symbols
//! declared in the [`Context`](crate::context::Context) are reduced on the fly
//! during multiplication (`i^2 -> -1`, `q2^2 -> 2`), so Gaussian-rational
//! matrices stay inside the same type.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::context::{Ctx, Var};
use crate::error::AlgebraError;

pub type Rational = BigRational;

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(n))
        }
    }
}

/// Exponent vector of a monomial; length equals the context's variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub SmallVec<[u16; 16]>);

impl Mono {
    pub fn unit(n: usize) -> Self {
        Mono(SmallVec::from_elem(0, n))
    }

    pub fn var(n: usize, v: Var) -> Self {
        let mut m = Self::unit(n);
        m.0[v.0] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    /// Graded lexicographic: lower total degree first, then lex on exponents.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse multivariate polynomial with exact rational coefficients.
#[derive(Debug, Clone)]
pub struct MultiPoly {
    pub ctx: Ctx,
    /// No zero coefficients are stored.
    pub terms: BTreeMap<Mono, Rational>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(ctx: &Ctx) -> Self {
        MultiPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Ctx, c: Rational) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Mono::unit(ctx.len()), c);
        }
        p
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn int(ctx: &Ctx, n: i64) -> Self {
        Self::constant(ctx, rat_int(n))
    }

    pub fn var(ctx: &Ctx, v: Var) -> Self {
        let mut p = Self::zero(ctx);
        p.terms.insert(Mono::var(ctx.len(), v), Rational::one());
        p
    }

    /// `c * v^k`.
    pub fn monomial(ctx: &Ctx, pairs: &[(Var, u16)], c: Rational) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            let mut m = Mono::unit(ctx.len());
            for &(v, k) in pairs {
                m.0[v.0] += k;
            }
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_unit())
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .next()
            .filter(|(m, _)| m.is_unit())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.0[v.0]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    fn add_term(terms: &mut BTreeMap<Mono, Rational>, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
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
        MultiPoly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    /// Multiplies two monomials, reducing quadratic symbols; returns the
    /// reduced exponent vector and the extra rational factor it produced.
    fn mono_mul(&self, a: &Mono, b: &Mono) -> (Mono, Rational) {
        let mut m = a.clone();
        for (i, e) in b.0.iter().enumerate() {
            m.0[i] += e;
        }
        let mut factor = Rational::one();
        for (idx, sq) in self.ctx.quadratic_symbols() {
            let e = m.0[*idx];
            if e >= 2 {
                let half = e / 2;
                m.0[*idx] = e % 2;
                for _ in 0..half {
                    factor *= sq;
                }
            }
        }
        (m, factor)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(crate::context::Context::same(&self.ctx, &other.ctx));
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let (m, f) = self.mono_mul(m1, m2);
                Self::add_term(&mut terms, m, c1 * c2 * f);
            }
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, k: u16) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            if m.0[v.0] == k {
                let mut m2 = m.clone();
                m2.0[v.0] = 0;
                Self::add_term(&mut out.terms, m2, c.clone());
            }
        }
        out
    }

    /// Substitutes polynomials for variables; unlisted variables are kept.
    pub fn substitute(&self, map: &BTreeMap<Var, MultiPoly>) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let mut term = Self::constant(&self.ctx, c.clone());
            let mut residual = Mono::unit(self.ctx.len());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map.get(&Var(i)) {
                    Some(p) => term = term.mul(&p.pow(e as u32)),
                    None => residual.0[i] = e,
                }
            }
            if !residual.is_unit() {
                let mono = MultiPoly {
                    ctx: self.ctx.clone(),
                    terms: BTreeMap::from([(residual, Rational::one())]),
                };
                term = term.mul(&mono);
            }
            out = out.add(&term);
        }
        out
    }

    /// Fully evaluates at rational points; every variable present must be
    /// covered (quadratic symbols cannot be evaluated).
    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational, AlgebraError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values.get(&Var(i)).ok_or_else(|| {
                    AlgebraError::MissingEvaluation(self.ctx.name(Var(i)).to_string())
                })?;
                for _ in 0..e {
                    t *= v;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// The set of variables that actually occur.
    pub fn used_vars(&self) -> Vec<Var> {
        let n = self.ctx.len();
        let mut used = vec![false; n];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..n).filter(|&i| used[i]).map(Var).collect()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    write!(f, " * {}^{}", self.ctx.name(Var(i)), e)?;
                }
            }
        }
        Ok(())
    }
}

/// A quotient of two polynomials; equality is decided by cross-multiplication.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(&p.ctx);
        RationalFunction { num: p, den }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Self::from_poly(MultiPoly::zero(ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalFunction {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational, AlgebraError> {
        let d = self.den.eval(values)?;
        if d.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(self.num.eval(values)? / d)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}
impl Eq for RationalFunction {}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Absolute value helper for tolerance comparisons in tests and oracles.
pub fn rat_abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{standard_context, std_vars};

    #[test]
    fn graded_lex_order() {
        let ctx = standard_context(2);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let x = MultiPoly::var(&ctx, std_vars::X);
        // (z + x)^2 = z^2 + 2 z x + x^2; iteration is by total degree, then lex.
        let p = z.add(&x).pow(2);
        let degs: Vec<u32> = p.terms.keys().map(|m| m.degree()).collect();
        assert_eq!(degs, vec![2, 2, 2]);
        assert_eq!(p.terms.len(), 3);
    }

    #[test]
    fn quadratic_symbol_reduction() {
        let ctx = standard_context(2);
        let i = MultiPoly::var(&ctx, std_vars::imag(2));
        assert_eq!(i.mul(&i), MultiPoly::int(&ctx, -1));
        let q2 = MultiPoly::var(&ctx, std_vars::sqrt2(2));
        assert_eq!(q2.mul(&q2), MultiPoly::int(&ctx, 2));
        // (1/sqrt2)^2 = 1/2 with 1/sqrt2 written as q2/2.
        let inv = q2.scale(&rat(1, 2));
        assert_eq!(inv.mul(&inv), MultiPoly::constant(&ctx, rat(1, 2)));
    }

    #[test]
    fn substitution_shift() {
        let ctx = standard_context(2);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let u = MultiPoly::var(&ctx, std_vars::U);
        // z^2 under z -> z + u + 1
        let shifted = z.pow(2).substitute(&BTreeMap::from([(
            std_vars::Z,
            z.add(&u).add(&MultiPoly::one(&ctx)),
        )]));
        let expected = z.add(&u).add(&MultiPoly::one(&ctx)).pow(2);
        assert_eq!(shifted, expected);
    }

    #[test]
    fn rational_function_equality() {
        let ctx = standard_context(2);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let one = MultiPoly::one(&ctx);
        // z/(z^2) == 1/z by cross multiplication.
        let a = RationalFunction::new(z.clone(), z.pow(2)).unwrap();
        let b = RationalFunction::new(one, z).unwrap();
        assert_eq!(a, b);
    }
}

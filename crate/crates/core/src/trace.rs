//! Exact twisted traces over Fock space.
//!
//! For a single mode with twist weight `w` the regularised trace is the
//! rational function agreeing with the convergent series for |w| < 1:
//!
//!   tr(w^N abar^p a^q) = delta_pq * p! * w^p / (1-w)^(p+1)
//!
//! Multi-mode monomials factorise mode by mode. Convergence is never required
//! at evaluation points, only w != 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::context::{Ctx, Var};
use crate::error::AlgebraError;
use crate::osc::{AlgebraElement, OscMode};
use crate::poly::{MultiPoly, Rational, RationalFunction};

/// A Laurent monomial `coeff * prod t_k^e_k` in the twist variables: the
/// weight a twist regulator assigns to one oscillator mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistWeight {
    pub coeff: Rational,
    /// (variable, exponent) pairs; exponents may be negative.
    pub exps: Vec<(Var, i32)>,
}

impl TwistWeight {
    pub fn one() -> Self {
        TwistWeight {
            coeff: Rational::one(),
            exps: Vec::new(),
        }
    }

    pub fn var(v: Var) -> Self {
        TwistWeight {
            coeff: Rational::one(),
            exps: vec![(v, 1)],
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exps: BTreeMap<Var, i32> = self.exps.iter().cloned().collect();
        for &(v, e) in &other.exps {
            *exps.entry(v).or_insert(0) += e;
        }
        TwistWeight {
            coeff: &self.coeff * &other.coeff,
            exps: exps.into_iter().filter(|&(_, e)| e != 0).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        TwistWeight {
            coeff: self.coeff.recip(),
            exps: self.exps.iter().map(|&(v, e)| (v, -e)).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exps.is_empty()
    }

    /// Numerator and denominator monomials `w = coeff * m_pos / m_neg`.
    fn split(&self, ctx: &Ctx) -> (MultiPoly, MultiPoly) {
        let pos: Vec<(Var, u16)> = self
            .exps
            .iter()
            .filter(|&&(_, e)| e > 0)
            .map(|&(v, e)| (v, e as u16))
            .collect();
        let neg: Vec<(Var, u16)> = self
            .exps
            .iter()
            .filter(|&&(_, e)| e < 0)
            .map(|&(v, e)| (v, (-e) as u16))
            .collect();
        (
            MultiPoly::monomial(ctx, &pos, self.coeff.clone()),
            MultiPoly::monomial(ctx, &neg, Rational::one()),
        )
    }

    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational, AlgebraError> {
        let mut out = self.coeff.clone();
        for &(v, e) in &self.exps {
            let base = values
                .get(&v)
                .ok_or_else(|| AlgebraError::MissingEvaluation(format!("{:?}", v)))?;
            let p = base.clone();
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    out *= &p;
                } else {
                    out /= &p;
                }
            }
        }
        Ok(out)
    }
}

/// Twist weights for every mode a trace runs over.
pub type WeightMap = BTreeMap<OscMode, TwistWeight>;

fn factorial_rat(p: u16) -> Rational {
    let mut f = BigInt::one();
    for j in 2..=p as u64 {
        f *= j;
    }
    BigRational::from_integer(f)
}

fn check_weights(e: &AlgebraElement, weights: &WeightMap) -> Result<(), AlgebraError> {
    for mode in e.modes() {
        if !weights.contains_key(&mode) {
            return Err(AlgebraError::MissingWeight(mode.to_string()));
        }
    }
    for (mode, w) in weights {
        if w.is_one() {
            return Err(AlgebraError::DivergentTrace(mode.to_string()));
        }
    }
    Ok(())
}

/// Symbolic twisted trace: a rational function in the twist variables with
/// coefficients in the remaining variables. The trace runs over every mode in
/// `weights`; modes of `e` must all carry a weight.
pub fn twisted_trace(
    e: &AlgebraElement,
    weights: &WeightMap,
) -> Result<RationalFunction, AlgebraError> {
    check_weights(e, weights)?;
    let ctx = &e.ctx;
    let mut acc = RationalFunction::zero(ctx);
    for (mono, coeff) in &e.terms {
        if !mono.is_number_conserving() {
            continue;
        }
        let mut term = RationalFunction::from_poly(coeff.clone());
        for (mode, w) in weights {
            let (p, _) = mono.powers(*mode);
            let (wn, wd) = w.split(ctx);
            // p! w^p / (1-w)^(p+1) with w = wn/wd:
            //   p! wn^p wd / (wd - wn)^(p+1)
            let one_minus = wd.sub(&wn);
            let num = wn.pow(p as u32).mul(&wd).scale(&factorial_rat(p));
            let den = one_minus.pow(p as u32 + 1);
            term = term.mul(&RationalFunction::new(num, den)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Twisted trace with the weights evaluated at rational points. Returns a
/// polynomial in the remaining variables (the coefficients of `e`).
pub fn twisted_trace_eval(
    e: &AlgebraElement,
    weights: &WeightMap,
    values: &BTreeMap<Var, Rational>,
) -> Result<MultiPoly, AlgebraError> {
    trace_eval_impl(e, weights, values, false)
}

/// Same as [`twisted_trace_eval`] but divided by the trace of the identity,
/// `prod_m 1/(1-w_m)`: the per-mode factor becomes `p! (w/(1-w))^p`. This is
/// the normalization used for Q-operators.
pub fn twisted_trace_eval_normalized(
    e: &AlgebraElement,
    weights: &WeightMap,
    values: &BTreeMap<Var, Rational>,
) -> Result<MultiPoly, AlgebraError> {
    trace_eval_impl(e, weights, values, true)
}

fn trace_eval_impl(
    e: &AlgebraElement,
    weights: &WeightMap,
    values: &BTreeMap<Var, Rational>,
    normalized: bool,
) -> Result<MultiPoly, AlgebraError> {
    check_weights(e, weights)?;
    let ctx = &e.ctx;
    let mut numeric: BTreeMap<OscMode, Rational> = BTreeMap::new();
    for (mode, w) in weights {
        let v = w.eval(values)?;
        if v.is_one() {
            return Err(AlgebraError::DivergentTrace(mode.to_string()));
        }
        numeric.insert(*mode, v);
    }
    let mut acc = MultiPoly::zero(ctx);
    for (mono, coeff) in &e.terms {
        if !mono.is_number_conserving() {
            continue;
        }
        let mut factor = Rational::one();
        for (mode, w) in &numeric {
            let (p, _) = mono.powers(*mode);
            let g = w / (Rational::one() - w);
            let mut f = factorial_rat(p);
            for _ in 0..p {
                f *= &g;
            }
            if !normalized {
                f /= Rational::one() - w;
            }
            factor *= f;
        }
        acc = acc.add(&coeff.scale(&factor));
    }
    Ok(acc)
}

/// The trace of the identity element, `prod_m 1/(1-w_m)`, at rational twist
/// values; the overall Q-operator normalization recorded in reports.
pub fn identity_trace_factor(
    weights: &WeightMap,
    values: &BTreeMap<Var, Rational>,
) -> Result<Rational, AlgebraError> {
    let mut out = Rational::one();
    for (mode, w) in weights {
        let v = w.eval(values)?;
        if v.is_one() {
            return Err(AlgebraError::DivergentTrace(mode.to_string()));
        }
        out /= Rational::one() - v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{standard_context, std_vars};
    use crate::poly::{rat, rat_int};
    use num_traits::Zero;

    fn plain(idx: u8) -> OscMode {
        OscMode::Plain { idx }
    }

    #[test]
    fn geometric_series() {
        // tr(t^N) = 1/(1-t)
        let ctx = standard_context(2);
        let m = plain(1);
        let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
        let tr = twisted_trace(&AlgebraElement::one(&ctx), &weights).unwrap();
        let t = MultiPoly::var(&ctx, std_vars::t(1));
        let expected =
            RationalFunction::new(MultiPoly::one(&ctx), MultiPoly::one(&ctx).sub(&t)).unwrap();
        assert_eq!(tr, expected);
    }

    #[test]
    fn number_operator_trace() {
        // tr(t^N abar a) = t/(1-t)^2
        let ctx = standard_context(2);
        let m = plain(1);
        let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
        let tr = twisted_trace(&AlgebraElement::number_op(&ctx, m), &weights).unwrap();
        let t = MultiPoly::var(&ctx, std_vars::t(1));
        let expected =
            RationalFunction::new(t.clone(), MultiPoly::one(&ctx).sub(&t).pow(2)).unwrap();
        assert_eq!(tr, expected);
    }

    #[test]
    fn number_non_conserving_vanishes() {
        // tr(w^N abar^2 a) = 0 for any weight
        let ctx = standard_context(2);
        let m = plain(1);
        let e = AlgebraElement::creator(&ctx, m)
            .pow(2)
            .mul(&AlgebraElement::annihilator(&ctx, m));
        let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
        assert!(twisted_trace(&e, &weights).unwrap().is_zero());
    }

    #[test]
    fn trace_against_truncated_series() {
        // closed form at t = 1/2 vs the truncated sum  sum_k k t^k, cutoff 60
        let ctx = standard_context(2);
        let m = plain(1);
        let weights: WeightMap = BTreeMap::from([(m, TwistWeight::var(std_vars::t(1)))]);
        let values = BTreeMap::from([(std_vars::t(1), rat(1, 2))]);
        let closed = twisted_trace_eval(&AlgebraElement::number_op(&ctx, m), &weights, &values)
            .unwrap()
            .constant_term();
        let mut series = Rational::zero();
        let t = rat(1, 2);
        let mut tk = Rational::one();
        for k in 0..=60i64 {
            // <k| t^N abar a |k> = k t^k
            series += rat_int(k) * &tk;
            tk *= &t;
        }
        let rel = crate::poly::rat_abs(&((&closed - &series) / &closed));
        assert!(rel < rat(1, 1_000_000_000_000));
    }

    #[test]
    fn divergent_weight_rejected() {
        let ctx = standard_context(2);
        let m = plain(1);
        let weights: WeightMap = BTreeMap::from([(m, TwistWeight::one())]);
        assert!(matches!(
            twisted_trace(&AlgebraElement::one(&ctx), &weights),
            Err(AlgebraError::DivergentTrace(_))
        ));
    }

    #[test]
    fn missing_weight_rejected() {
        let ctx = standard_context(2);
        let weights: WeightMap = BTreeMap::new();
        let e = AlgebraElement::number_op(&ctx, plain(1));
        assert!(matches!(
            twisted_trace(&e, &weights),
            Err(AlgebraError::MissingWeight(_))
        ));
    }

    #[test]
    fn laurent_weight() {
        // weight t1/t2 evaluated and symbolic stay consistent
        let ctx = standard_context(2);
        let m = plain(1);
        let w = TwistWeight::var(std_vars::t(1)).mul(&TwistWeight::var(std_vars::t(2)).inverse());
        let weights: WeightMap = BTreeMap::from([(m, w)]);
        let values = BTreeMap::from([(std_vars::t(1), rat(1, 2)), (std_vars::t(2), rat(1, 3))]);
        let sym = twisted_trace(&AlgebraElement::number_op(&ctx, m), &weights).unwrap();
        let sym_val = sym.eval(&values).unwrap();
        let num = twisted_trace_eval(&AlgebraElement::number_op(&ctx, m), &weights, &values)
            .unwrap()
            .constant_term();
        assert_eq!(sym_val, num);
        // w = 3/2 here: the analytic continuation is evaluated outside the
        // convergence disc without complaint.
        assert_eq!(num, rat(3, 2) / (rat(1, 1) - rat(3, 2)) / (rat(1, 1) - rat(3, 2)));
    }
}

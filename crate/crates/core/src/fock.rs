//! Truncated Fock-space representation: the numerical oracle for the
//! normal-ordered algebra.
//!
//! Non-normalized convention: `a|k> = k|k-1>`, `abar|k> = |k+1>`, so every
//! matrix entry stays rational. States above the cutoff are dropped, so a
//! product of representations agrees with the representation of the product
//! only on columns whose occupations leave room for the intermediate states.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::context::Var;
use crate::error::AlgebraError;
use crate::osc::{AlgebraElement, OscMode};
use crate::poly::Rational;

/// Dense matrix representation of an algebra element on the occupation basis
/// of `modes`, truncated at `cutoff` quanta per mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockOperator {
    pub cutoff: usize,
    pub modes: Vec<OscMode>,
    pub dim: usize,
    /// Row-major `dim x dim`.
    pub entries: Vec<Rational>,
}

impl FockOperator {
    pub fn zero(cutoff: usize, modes: Vec<OscMode>) -> Self {
        let dim = (cutoff + 1).pow(modes.len() as u32);
        FockOperator {
            cutoff,
            modes,
            dim,
            entries: vec![Rational::zero(); dim * dim],
        }
    }

    pub fn identity(cutoff: usize, modes: Vec<OscMode>) -> Self {
        let mut m = Self::zero(cutoff, modes);
        for k in 0..m.dim {
            m.entries[k * m.dim + k] = Rational::one();
        }
        m
    }

    pub fn at(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.dim + col]
    }

    fn occupations(&self, state: usize) -> Vec<usize> {
        let base = self.cutoff + 1;
        let mut s = state;
        let mut occ = vec![0; self.modes.len()];
        for slot in occ.iter_mut().rev() {
            *slot = s % base;
            s /= base;
        }
        occ
    }

    fn state_index(&self, occ: &[usize]) -> Option<usize> {
        let base = self.cutoff + 1;
        let mut idx = 0usize;
        for &o in occ {
            if o > self.cutoff {
                return None;
            }
            idx = idx * base + o;
        }
        Some(idx)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.cutoff, self.modes.clone());
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.dim {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[r * self.dim + c] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e += o;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e -= o;
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e *= c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Truncated exponential: sums powers until one vanishes. Only terminates
    /// for operators nilpotent on the truncated space (pure creation or pure
    /// annihilation content).
    pub fn exp_nilpotent(&self) -> Self {
        let mut acc = Self::identity(self.cutoff, self.modes.clone());
        let mut pw = Self::identity(self.cutoff, self.modes.clone());
        let mut k = 1u64;
        loop {
            pw = pw.mul(self);
            if pw.is_zero() {
                break;
            }
            let fact = BigRational::from_integer(k.into());
            pw = pw.scale(&fact.recip());
            acc = acc.add(&pw);
            k += 1;
        }
        acc
    }

    /// Columns whose occupations are all `<= bound`.
    pub fn interior_columns(&self, bound: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&c| self.occupations(c).iter().all(|&o| o <= bound))
            .collect()
    }

    /// Compares full columns of two operators on the given column set.
    pub fn agrees_on_columns(&self, other: &Self, cols: &[usize]) -> bool {
        assert_eq!(self.dim, other.dim);
        cols.iter().all(|&c| {
            (0..self.dim).all(|r| self.at(r, c) == other.at(r, c))
        })
    }

    /// Applies the operator to the vacuum column and returns it.
    pub fn vacuum_column(&self) -> Vec<Rational> {
        (0..self.dim).map(|r| self.at(r, 0).clone()).collect()
    }
}

/// A sparse Fock-space vector: occupation tuples with rational amplitudes.
pub type FockVector = BTreeMap<Vec<usize>, Rational>;

/// The vacuum vector for `n_modes` modes.
pub fn fock_vacuum(n_modes: usize) -> FockVector {
    BTreeMap::from([(vec![0; n_modes], Rational::one())])
}

/// Applies `e` to a sparse vector without materialising the matrix;
/// components raised above `cutoff` are dropped, matching the truncated
/// matrix representation.
pub fn apply_to_vector(
    e: &AlgebraElement,
    modes: &[OscMode],
    v: &FockVector,
    cutoff: usize,
    eval: &BTreeMap<Var, Rational>,
) -> Result<FockVector, AlgebraError> {
    let positions: BTreeMap<OscMode, usize> = modes
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i))
        .collect();
    let mut out: FockVector = BTreeMap::new();
    for (mono, coeff) in &e.terms {
        let c = coeff.eval(eval)?;
        if c.is_zero() {
            continue;
        }
        'state: for (occ, amp0) in v {
            let mut occ = occ.clone();
            let mut amp = amp0 * &c;
            for &(mode, p, q) in &mono.0 {
                let slot = *positions
                    .get(&mode)
                    .unwrap_or_else(|| panic!("mode {mode} missing from mode list"));
                let k = occ[slot];
                if k < q as usize {
                    continue 'state;
                }
                for step in 0..q as usize {
                    amp *= BigRational::from_integer(((k - step) as u64).into());
                }
                let new_k = k - q as usize + p as usize;
                if new_k > cutoff {
                    continue 'state;
                }
                occ[slot] = new_k;
            }
            let entry = out.entry(occ).or_insert_with(Rational::zero);
            *entry += amp;
        }
    }
    out.retain(|_, a| !a.is_zero());
    Ok(out)
}

/// `exp(b) v` on the truncated space; `b` must be nilpotent there (pure
/// creation or pure annihilation content).
pub fn exp_apply_to_vector(
    b: &AlgebraElement,
    modes: &[OscMode],
    v: &FockVector,
    cutoff: usize,
    eval: &BTreeMap<Var, Rational>,
) -> Result<FockVector, AlgebraError> {
    let mut acc = v.clone();
    let mut cur = v.clone();
    let mut k = 1u64;
    loop {
        cur = apply_to_vector(b, modes, &cur, cutoff, eval)?;
        if cur.is_empty() {
            break;
        }
        let fact = BigRational::from_integer(k.into()).recip();
        for (occ, amp) in &cur {
            let entry = acc.entry(occ.clone()).or_insert_with(Rational::zero);
            *entry += amp * &fact;
        }
        // fold the 1/k into the running power so the next step divides by k+1
        for amp in cur.values_mut() {
            *amp *= &fact;
        }
        k += 1;
    }
    acc.retain(|_, a| !a.is_zero());
    Ok(acc)
}

/// Matrix representation of `e` on the occupation basis, with scalar
/// variables evaluated at `eval`.
///
/// Rejected when the cutoff cannot hold the element's creation or
/// annihilation powers.
pub fn to_truncated_fock(
    e: &AlgebraElement,
    cutoff: usize,
    modes: &[OscMode],
    eval: &BTreeMap<Var, Rational>,
) -> Result<FockOperator, AlgebraError> {
    let needed = e.max_creation_power().max(e.max_annihilation_power()) as usize;
    if cutoff < needed {
        return Err(AlgebraError::CutoffTooSmall { cutoff, needed });
    }
    let mut op = FockOperator::zero(cutoff, modes.to_vec());
    let positions: BTreeMap<OscMode, usize> = modes
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i))
        .collect();
    for (mono, coeff) in &e.terms {
        let c = coeff.eval(eval)?;
        if c.is_zero() {
            continue;
        }
        for col in 0..op.dim {
            let mut occ = op.occupations(col);
            let mut amp = c.clone();
            let mut dead = false;
            for &(mode, p, q) in &mono.0 {
                let slot = *positions
                    .get(&mode)
                    .unwrap_or_else(|| panic!("mode {mode} missing from mode list"));
                let k = occ[slot];
                if k < q as usize {
                    dead = true;
                    break;
                }
                // a^q picks up k(k-1)...(k-q+1), abar^p has amplitude 1.
                for step in 0..q as usize {
                    amp *= BigRational::from_integer(((k - step) as u64).into());
                }
                occ[slot] = k - q as usize + p as usize;
            }
            if dead {
                continue;
            }
            if let Some(row) = op.state_index(&occ) {
                let d = op.dim;
                op.entries[row * d + col] += amp;
            }
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::standard_context;
    use crate::poly::rat_int;

    fn plain(idx: u8) -> OscMode {
        OscMode::Plain { idx }
    }

    #[test]
    fn number_operator_diagonal() {
        // rep(abar a) at cutoff 2 is diag(0, 1, 2).
        let ctx = standard_context(2);
        let m = plain(1);
        let n = AlgebraElement::number_op(&ctx, m);
        let rep = to_truncated_fock(&n, 2, &[m], &BTreeMap::new()).unwrap();
        for k in 0..3 {
            assert_eq!(rep.at(k, k), &rat_int(k as i64));
        }
        assert_eq!(rep.entries.iter().filter(|e| !e.is_zero()).count(), 2);
    }

    #[test]
    fn lowering_matrix() {
        // rep(a) at cutoff 2: entry (k-1, k) = k.
        let ctx = standard_context(2);
        let m = plain(1);
        let a = AlgebraElement::annihilator(&ctx, m);
        let rep = to_truncated_fock(&a, 2, &[m], &BTreeMap::new()).unwrap();
        assert_eq!(rep.at(0, 1), &rat_int(1));
        assert_eq!(rep.at(1, 2), &rat_int(2));
        assert_eq!(rep.entries.iter().filter(|e| !e.is_zero()).count(), 2);
    }

    #[test]
    fn product_matches_on_interior() {
        // rep(wick(a^2, abar^2)) equals rep(a)^2 rep(abar)^2 on occupations
        // <= cutoff - 2.
        let ctx = standard_context(2);
        let m = plain(1);
        let a = AlgebraElement::annihilator(&ctx, m);
        let ad = AlgebraElement::creator(&ctx, m);
        let cutoff = 8;
        let prod = a.pow(2).mul(&ad.pow(2));
        let lhs = to_truncated_fock(&prod, cutoff, &[m], &BTreeMap::new()).unwrap();
        let ra = to_truncated_fock(&a, cutoff, &[m], &BTreeMap::new()).unwrap();
        let rad = to_truncated_fock(&ad, cutoff, &[m], &BTreeMap::new()).unwrap();
        let rhs = ra.mul(&ra).mul(&rad).mul(&rad);
        let cols = lhs.interior_columns(cutoff - 2);
        assert!(!cols.is_empty());
        assert!(lhs.agrees_on_columns(&rhs, &cols));
    }

    #[test]
    fn cutoff_too_small_rejected() {
        let ctx = standard_context(2);
        let m = plain(1);
        let e = AlgebraElement::creator(&ctx, m).pow(4);
        assert!(matches!(
            to_truncated_fock(&e, 3, &[m], &BTreeMap::new()),
            Err(AlgebraError::CutoffTooSmall { .. })
        ));
    }
}

//! Matrices over the oscillator algebra, indexed by signed indices
//! {-r,...,-1,1,...,r} or tensor products thereof.
//!
//! Index positions follow the unit-matrix dictionary
//!   E_(-i,-j) = e_(r-i+1, r-j+1),  E_(-i,j) = e_(r-i+1, r+j),
//!   E_(i,-j)  = e_(r+i, r-j+1),    E_(i,j)  = e_(r+i, r+j),
//! so the signed indices in increasing order -r < ... < -1 < 1 < ... < r run
//! down the rows. Entries are operator-valued; multiplication preserves the
//! factor order.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::context::{Ctx, Var};
use crate::error::MatrixError;
use crate::osc::AlgebraElement;
use crate::poly::{MultiPoly, Rational};

/// A nonzero index in {-r,...,-1,1,...,r}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedIndex(pub i32);

impl SignedIndex {
    pub fn new(v: i32, rank: u8) -> Result<Self, MatrixError> {
        if v == 0 {
            return Err(MatrixError::ZeroIndex);
        }
        if v.unsigned_abs() > rank as u32 {
            return Err(MatrixError::IndexOutOfRange(v, rank));
        }
        Ok(SignedIndex(v))
    }

    /// 0-based row/column position inside a rank-`r` space.
    pub fn position(self, rank: u8) -> usize {
        let r = rank as i32;
        if self.0 < 0 {
            (r + self.0) as usize
        } else {
            (r + self.0 - 1) as usize
        }
    }

    /// Inverse of [`position`](Self::position).
    pub fn from_position(pos: usize, rank: u8) -> Self {
        let r = rank as i32;
        let p = pos as i32;
        if p < r {
            SignedIndex(p - r)
        } else {
            SignedIndex(p - r + 1)
        }
    }
}

/// All signed indices of a rank-`r` space in increasing order.
pub fn signed_range(rank: u8) -> Vec<i32> {
    let r = rank as i32;
    (-r..=r).filter(|&a| a != 0).collect()
}

/// Sparse square matrix over [`AlgebraElement`] on a tensor product of
/// signed-index spaces.
#[derive(Debug, Clone)]
pub struct OpMatrix {
    pub ctx: Ctx,
    /// Rank of each tensor factor; factor `k` has dimension `2*spaces[k]`.
    pub spaces: Vec<u8>,
    pub dim: usize,
    /// Absent entries are zero.
    pub entries: BTreeMap<(u32, u32), AlgebraElement>,
}

impl PartialEq for OpMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.spaces == other.spaces && self.entries == other.entries
    }
}
impl Eq for OpMatrix {}

impl OpMatrix {
    pub fn zero(ctx: &Ctx, spaces: Vec<u8>) -> Self {
        let dim = spaces.iter().map(|&r| 2 * r as usize).product();
        OpMatrix {
            ctx: ctx.clone(),
            spaces,
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(ctx: &Ctx, spaces: Vec<u8>) -> Self {
        let mut m = Self::zero(ctx, spaces);
        for k in 0..m.dim as u32 {
            m.entries.insert((k, k), AlgebraElement::one(ctx));
        }
        m
    }

    pub fn from_dense(ctx: &Ctx, spaces: Vec<u8>, rows: Vec<Vec<AlgebraElement>>) -> Self {
        let mut m = Self::zero(ctx, spaces);
        assert_eq!(rows.len(), m.dim);
        for (r, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), m.dim);
            for (c, e) in row.into_iter().enumerate() {
                if !e.is_zero() {
                    m.entries.insert((r as u32, c as u32), e);
                }
            }
        }
        m
    }

    pub fn set(&mut self, row: usize, col: usize, e: AlgebraElement) {
        if e.is_zero() {
            self.entries.remove(&(row as u32, col as u32));
        } else {
            self.entries.insert((row as u32, col as u32), e);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> AlgebraElement {
        self.entries
            .get(&(row as u32, col as u32))
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.spaces, other.spaces);
        let mut out = self.clone();
        for (&k, e) in &other.entries {
            let s = out.get(k.0 as usize, k.1 as usize).add(e);
            out.set(k.0 as usize, k.1 as usize, s);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg())
    }

    pub fn map<F: Fn(&AlgebraElement) -> AlgebraElement>(&self, f: F) -> Self {
        let mut out = Self::zero(&self.ctx, self.spaces.clone());
        for (&k, e) in &self.entries {
            let v = f(e);
            if !v.is_zero() {
                out.entries.insert(k, v);
            }
        }
        out
    }

    pub fn scale(&self, p: &MultiPoly) -> Self {
        self.map(|e| e.scale(p))
    }

    pub fn scale_rat(&self, c: &Rational) -> Self {
        self.map(|e| e.scale_rat(c))
    }

    /// Scalar-matrix helper: entry values from rationals.
    pub fn from_rational_entries(
        ctx: &Ctx,
        spaces: Vec<u8>,
        entries: &[(usize, usize, Rational)],
    ) -> Self {
        let mut m = Self::zero(ctx, spaces);
        for (r, c, v) in entries {
            m.set(*r, *c, AlgebraElement::from_rational(ctx, v.clone()));
        }
        m
    }

    /// Order-preserving matrix product (entries do not commute).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        // Group rows of `other` for sparse access.
        let mut brows: BTreeMap<u32, Vec<(u32, &AlgebraElement)>> = BTreeMap::new();
        for (&(r, c), e) in &other.entries {
            brows.entry(r).or_default().push((c, e));
        }
        let mut arows: BTreeMap<u32, Vec<(u32, &AlgebraElement)>> = BTreeMap::new();
        for (&(r, c), e) in &self.entries {
            arows.entry(r).or_default().push((c, e));
        }
        let computed: Vec<(u32, BTreeMap<u32, AlgebraElement>)> = arows
            .par_iter()
            .map(|(&r, arow)| {
                let mut row_acc: BTreeMap<u32, AlgebraElement> = BTreeMap::new();
                for (k, a) in arow {
                    if let Some(brow) = brows.get(k) {
                        for (c, b) in brow {
                            let prod = a.mul(b);
                            if prod.is_zero() {
                                continue;
                            }
                            row_acc
                                .entry(*c)
                                .and_modify(|acc| *acc = acc.add(&prod))
                                .or_insert(prod);
                        }
                    }
                }
                (r, row_acc)
            })
            .collect();
        let mut out = Self::zero(&self.ctx, self.spaces.clone());
        for (r, row) in computed {
            for (c, e) in row {
                if !e.is_zero() {
                    out.entries.insert((r, c), e);
                }
            }
        }
        out
    }

    /// Tensor product; the left factor's entries multiply from the left.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut spaces = self.spaces.clone();
        spaces.extend_from_slice(&other.spaces);
        let mut out = Self::zero(&self.ctx, spaces);
        let d2 = other.dim as u32;
        for (&(r1, c1), e1) in &self.entries {
            for (&(r2, c2), e2) in &other.entries {
                let prod = e1.mul(e2);
                if !prod.is_zero() {
                    out.entries.insert((r1 * d2 + r2, c1 * d2 + c2), prod);
                }
            }
        }
        out
    }

    /// Reverses a flat position componentwise: index `a -> -a` per factor.
    fn neg_flat(&self, mut pos: u32) -> u32 {
        let mut out = 0u32;
        let mut stride = 1u32;
        for &r in self.spaces.iter().rev() {
            let d = 2 * r as u32;
            let p = pos % d;
            out += (d - 1 - p) * stride;
            stride *= d;
            pos /= d;
        }
        out
    }

    /// The primed transposition `E'_(a,b) = E_(-b,-a)`, applied factorwise.
    pub fn prime(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.spaces.clone());
        for (&(r, c), e) in &self.entries {
            out.entries
                .insert((self.neg_flat(c), self.neg_flat(r)), e.clone());
        }
        out
    }

    /// The plain transposition `E^t_(a,b) = E_(b,a)`.
    pub fn t(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.spaces.clone());
        for (&(r, c), e) in &self.entries {
            out.entries.insert((c, r), e.clone());
        }
        out
    }

    /// Substitutes scalar variables inside every entry.
    pub fn substitute_vars(&self, map: &BTreeMap<Var, MultiPoly>) -> Self {
        self.map(|e| e.substitute_vars(map))
    }

    pub fn rename_modes(&self, map: &BTreeMap<crate::osc::OscMode, crate::osc::OscMode>) -> Self {
        self.map(|e| e.rename_modes(map))
    }

    /// Coefficient matrix of `var^k`.
    pub fn coeff_of(&self, var: Var, k: u16) -> Self {
        self.map(|e| {
            let mut out = AlgebraElement::zero(&self.ctx);
            for (m, c) in &e.terms {
                let ck = c.coeff_of(var, k);
                if !ck.is_zero() {
                    out = out.add(&AlgebraElement::monomial(&self.ctx, m.clone(), ck));
                }
            }
            out
        })
    }

    pub fn max_degree_in(&self, var: Var) -> u16 {
        self.entries
            .values()
            .flat_map(|e| e.terms.values().map(|c| c.degree_in(var)))
            .max()
            .unwrap_or(0)
    }

    /// Nonzero entries with signed multi-index labels, for dumps and witness
    /// reporting; ordering is row-major and therefore stable.
    pub fn labelled_entries(&self) -> Vec<(Vec<i32>, Vec<i32>, &AlgebraElement)> {
        self.entries
            .iter()
            .map(|(&(r, c), e)| (self.unflatten(r), self.unflatten(c), e))
            .collect()
    }

    pub fn unflatten(&self, mut pos: u32) -> Vec<i32> {
        let mut rev = Vec::with_capacity(self.spaces.len());
        for &r in self.spaces.iter().rev() {
            let d = 2 * r as u32;
            rev.push(SignedIndex::from_position((pos % d) as usize, r).0);
            pos /= d;
        }
        rev.reverse();
        rev
    }

    pub fn flatten(&self, idx: &[i32]) -> usize {
        let mut pos = 0usize;
        for (k, &a) in idx.iter().enumerate() {
            let r = self.spaces[k];
            pos = pos * (2 * r as usize) + SignedIndex(a).position(r);
        }
        pos
    }

    /// Canonical text dump: one `row | col : entry` line per nonzero entry.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (ridx, cidx, e) in self.labelled_entries() {
            let fmt_idx = |v: &Vec<i32>| {
                v.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            s.push_str(&format!("({}) | ({}) : {}\n", fmt_idx(&ridx), fmt_idx(&cidx), e));
        }
        s
    }
}

impl fmt::Display for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

// ---------------------------------------------------------------------------
// Fixed matrices
// ---------------------------------------------------------------------------

/// The unit matrix `E_(a,b)` as a rank-`r` OpMatrix.
pub fn embed_unit(ctx: &Ctx, a: i32, b: i32, rank: u8) -> Result<OpMatrix, MatrixError> {
    let a = SignedIndex::new(a, rank)?;
    let b = SignedIndex::new(b, rank)?;
    let mut m = OpMatrix::zero(ctx, vec![rank]);
    m.set(a.position(rank), b.position(rank), AlgebraElement::one(ctx));
    Ok(m)
}

/// The exchange (reversed identity) matrix `J = sum_a E_(a,-a)`.
pub fn exchange_j(ctx: &Ctx, rank: u8) -> OpMatrix {
    let mut m = OpMatrix::zero(ctx, vec![rank]);
    for p in 0..2 * rank as usize {
        m.set(p, 2 * rank as usize - 1 - p, AlgebraElement::one(ctx));
    }
    m
}

/// `B(alpha)`: permutes the i-th and (-i)-th rows and columns where
/// `alpha_i = -1`.
pub fn b_alpha(ctx: &Ctx, signs: &[i8], rank: u8) -> Result<OpMatrix, MatrixError> {
    if signs.len() != rank as usize || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(MatrixError::DimMismatch(signs.len(), rank as usize));
    }
    let mut m = OpMatrix::zero(ctx, vec![rank]);
    for i in 1..=rank as i32 {
        let (pi, pmi) = (
            SignedIndex(i).position(rank),
            SignedIndex(-i).position(rank),
        );
        if signs[(i - 1) as usize] == 1 {
            m.set(pi, pi, AlgebraElement::one(ctx));
            m.set(pmi, pmi, AlgebraElement::one(ctx));
        } else {
            m.set(pi, pmi, AlgebraElement::one(ctx));
            m.set(pmi, pi, AlgebraElement::one(ctx));
        }
    }
    Ok(m)
}

/// `Btilde_(i,j)`: permutes rows/columns i <-> j and -i <-> -j.
pub fn b_tilde(ctx: &Ctx, i: u8, j: u8, rank: u8) -> Result<OpMatrix, MatrixError> {
    if i == j || i == 0 || j == 0 || i > rank || j > rank {
        return Err(MatrixError::BadSwap(i, j));
    }
    let mut m = OpMatrix::zero(ctx, vec![rank]);
    for k in 1..=rank as i32 {
        for sign in [1i32, -1] {
            let a = sign * k;
            let image = if k == i as i32 {
                sign * j as i32
            } else if k == j as i32 {
                sign * i as i32
            } else {
                a
            };
            m.set(
                SignedIndex(image).position(rank),
                SignedIndex(a).position(rank),
                AlgebraElement::one(ctx),
            );
        }
    }
    Ok(m)
}

/// Similarity transformation S between the two R-matrix bases; carries the
/// exact 1/sqrt(2) normalization via the adjoined `q2` symbol.
pub fn s_matrix(ctx: &Ctx, rank: u8) -> OpMatrix {
    s_like(ctx, rank, false)
}

pub fn s_inverse(ctx: &Ctx, rank: u8) -> OpMatrix {
    s_like(ctx, rank, true)
}

fn s_like(ctx: &Ctx, rank: u8, inverse: bool) -> OpMatrix {
    use crate::context::std_vars;
    let r = rank as usize;
    let imag = MultiPoly::var(ctx, std_vars::imag(rank));
    let half_q2 = MultiPoly::var(ctx, std_vars::sqrt2(rank)).scale(&crate::poly::rat(1, 2));
    let mut m = OpMatrix::zero(ctx, vec![rank]);
    for p in 0..r {
        for q in 0..2 * r {
            // top block row
            let val = if !inverse {
                if q < r {
                    // -i J
                    if p + q == r - 1 {
                        imag.neg()
                    } else {
                        continue;
                    }
                } else if p + (q - r) == r - 1 {
                    // J
                    MultiPoly::one(ctx)
                } else {
                    continue;
                }
            } else if q < r {
                // i J
                if p + q == r - 1 {
                    imag.clone()
                } else {
                    continue;
                }
            } else if p == q - r {
                // -i I
                imag.neg()
            } else {
                continue;
            };
            m.set(p, q, AlgebraElement::from_poly(val.mul(&half_q2)));
        }
    }
    for p in 0..r {
        for q in 0..2 * r {
            // bottom block row
            let val = if !inverse {
                if q < r {
                    // i I
                    if p == q {
                        imag.clone()
                    } else {
                        continue;
                    }
                } else if p == q - r {
                    // I
                    MultiPoly::one(ctx)
                } else {
                    continue;
                }
            } else if q < r {
                // J
                if p + q == r - 1 {
                    MultiPoly::one(ctx)
                } else {
                    continue;
                }
            } else if p == q - r {
                // I
                MultiPoly::one(ctx)
            } else {
                continue;
            };
            m.set(r + p, q, AlgebraElement::from_poly(val.mul(&half_q2)));
        }
    }
    m
}

/// Permutation operator `P = sum E_(a,b) x E_(b,a)` on the tensor square.
pub fn permutation_p(ctx: &Ctx, rank: u8) -> OpMatrix {
    let d = 2 * rank as usize;
    let mut m = OpMatrix::zero(ctx, vec![rank, rank]);
    for a in 0..d {
        for b in 0..d {
            m.set(a * d + b, b * d + a, AlgebraElement::one(ctx));
        }
    }
    m
}

/// `Q = sum E_(a,b) x E_(-a,-b)` on the tensor square.
pub fn q_matrix(ctx: &Ctx, rank: u8) -> OpMatrix {
    let d = 2 * rank as usize;
    let mut m = OpMatrix::zero(ctx, vec![rank, rank]);
    for a in 0..d {
        for b in 0..d {
            let (na, nb) = (d - 1 - a, d - 1 - b);
            m.set(a * d + na, b * d + nb, AlgebraElement::one(ctx));
        }
    }
    m
}

/// `K = sum e_(A,B) x e_(A,B)` on the tensor square.
pub fn k_matrix(ctx: &Ctx, rank: u8) -> OpMatrix {
    let d = 2 * rank as usize;
    let mut m = OpMatrix::zero(ctx, vec![rank, rank]);
    for a in 0..d {
        for b in 0..d {
            m.set(a * d + a, b * d + b, AlgebraElement::one(ctx));
        }
    }
    m
}

/// Which of the two R-matrix bases to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RBasis {
    /// `R(z) = z(z+kappa) I + (z+kappa) P - z Q`
    Bold,
    /// `R(z) = z(z+kappa) I + (z+kappa) P - z K`
    Plain,
}

/// Fundamental R-matrix with the spectral parameter given as a polynomial
/// (typically `z` or `x - y`); `kappa = r - 1` is derived from the rank.
pub fn build_r(ctx: &Ctx, rank: u8, spectral: &MultiPoly, basis: RBasis) -> OpMatrix {
    let kappa = MultiPoly::int(ctx, rank as i64 - 1);
    let zpk = spectral.add(&kappa);
    let id = OpMatrix::identity(ctx, vec![rank, rank]);
    let p = permutation_p(ctx, rank);
    let last = match basis {
        RBasis::Bold => q_matrix(ctx, rank),
        RBasis::Plain => k_matrix(ctx, rank),
    };
    id.scale(&spectral.mul(&zpk))
        .add(&p.scale(&zpk))
        .sub(&last.scale(spectral))
}

// ---------------------------------------------------------------------------
// Generator extraction and the F <-> M map
// ---------------------------------------------------------------------------

/// so(2r) generators extracted from an affine Lax matrix via
/// `L(z) = z + sum E_(a,b) F_(b,a)`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub rank: u8,
    pub f: BTreeMap<(i32, i32), AlgebraElement>,
}

impl GeneratorSet {
    pub fn get(&self, ctx: &Ctx, a: i32, b: i32) -> AlgebraElement {
        self.f
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(ctx))
    }

    /// Verifies `F_(a,b) = -F_(-b,-a)`.
    pub fn check_flip_antisymmetry(&self, ctx: &Ctx) -> Result<(), MatrixError> {
        for a in signed_range(self.rank) {
            for b in signed_range(self.rank) {
                if self.get(ctx, a, b) != self.get(ctx, -b, -a).neg() {
                    return Err(MatrixError::NotFlipAntisymmetric(a, b));
                }
            }
        }
        Ok(())
    }

    /// The matrix `[F_(a,b)]` with `F_(a,b)` at row `a`, column `b`.
    pub fn as_matrix(&self, ctx: &Ctx) -> OpMatrix {
        let mut m = OpMatrix::zero(ctx, vec![self.rank]);
        for (&(a, b), e) in &self.f {
            m.set(
                SignedIndex(a).position(self.rank),
                SignedIndex(b).position(self.rank),
                e.clone(),
            );
        }
        m
    }

    /// Rebuilds `z I + sum E_(a,b) F_(b,a)`.
    pub fn rebuild_affine(&self, ctx: &Ctx, var: Var) -> OpMatrix {
        let mut m = OpMatrix::identity(ctx, vec![self.rank]).scale(&MultiPoly::var(ctx, var));
        for (&(b, a), e) in &self.f {
            // F_(b,a) sits at entry (a, b).
            let r = SignedIndex(a).position(self.rank);
            let c = SignedIndex(b).position(self.rank);
            let cur = m.get(r, c).add(e);
            m.set(r, c, cur);
        }
        m
    }
}

/// Extracts generators from a monic affine Lax matrix. Rejected when any
/// entry has degree > 1 in `var` or the leading matrix is not the identity.
pub fn extract_generators(l: &OpMatrix, var: Var) -> Result<GeneratorSet, MatrixError> {
    assert_eq!(l.spaces.len(), 1);
    let rank = l.spaces[0];
    let lead = l.coeff_of(var, 1);
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let r = SignedIndex(a).position(rank);
            let c = SignedIndex(b).position(rank);
            let e = l.get(r, c);
            if e.terms.values().any(|p| p.degree_in(var) > 1) {
                return Err(MatrixError::NotAffine(a, b));
            }
            let want = if a == b {
                AlgebraElement::one(&l.ctx)
            } else {
                AlgebraElement::zero(&l.ctx)
            };
            if lead.get(r, c) != want {
                return Err(MatrixError::NotMonic(a, b));
            }
        }
    }
    let constant = l.coeff_of(var, 0);
    let mut f = BTreeMap::new();
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let e = constant.get(
                SignedIndex(a).position(rank),
                SignedIndex(b).position(rank),
            );
            if !e.is_zero() {
                f.insert((b, a), e);
            }
        }
    }
    Ok(GeneratorSet { rank, f })
}

/// Constant-order coefficients `G_(a,b)` keyed by signed index pair.
pub type GCoeffs = BTreeMap<(i32, i32), AlgebraElement>;

/// Extracts `(F, G)` from a monic quadratic Lax matrix
/// `L(z) = z^2 + z E_(a,b) F_(b,a) + E_(a,b) G_(b,a)`.
pub fn extract_quadratic(l: &OpMatrix, var: Var) -> Result<(GeneratorSet, GCoeffs), MatrixError> {
    assert_eq!(l.spaces.len(), 1);
    let rank = l.spaces[0];
    let lead = l.coeff_of(var, 2);
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let r = SignedIndex(a).position(rank);
            let c = SignedIndex(b).position(rank);
            let e = l.get(r, c);
            if e.terms.values().any(|p| p.degree_in(var) > 2) {
                return Err(MatrixError::NotQuadratic(a, b));
            }
            let want = if a == b {
                AlgebraElement::one(&l.ctx)
            } else {
                AlgebraElement::zero(&l.ctx)
            };
            if lead.get(r, c) != want {
                return Err(MatrixError::NotQuadratic(a, b));
            }
        }
    }
    let lin = l.coeff_of(var, 1);
    let constant = l.coeff_of(var, 0);
    let mut f = BTreeMap::new();
    let mut g = BTreeMap::new();
    for a in signed_range(rank) {
        for b in signed_range(rank) {
            let r = SignedIndex(a).position(rank);
            let c = SignedIndex(b).position(rank);
            let ef = lin.get(r, c);
            if !ef.is_zero() {
                f.insert((b, a), ef);
            }
            let eg = constant.get(r, c);
            if !eg.is_zero() {
                g.insert((b, a), eg);
            }
        }
    }
    Ok((GeneratorSet { rank, f }, g))
}

/// Generators in the `M_(A,B)` labelling, `A, B` in `1..2r`.
pub type MGenerators = BTreeMap<(u8, u8), AlgebraElement>;

/// Inverts the basis-change component formulas: `M` in terms of `F`. The
/// context must carry the imaginary unit.
pub fn map_f_to_m(ctx: &Ctx, f: &GeneratorSet) -> Result<MGenerators, MatrixError> {
    f.check_flip_antisymmetry(ctx)?;
    let rank = f.rank;
    let imag = MultiPoly::var(ctx, crate::context::std_vars::imag(rank));
    let half = crate::poly::rat(1, 2);
    let mut m: MGenerators = BTreeMap::new();
    for i in 1..=rank as i32 {
        for j in 1..=rank as i32 {
            let fmm = f.get(ctx, -i, -j);
            let fmp = f.get(ctx, -i, j);
            let fpm = f.get(ctx, i, -j);
            let fpp = f.get(ctx, i, j);
            // M_(i,j) = 1/2 (F_(-i,-j) - F_(-i,j) - F_(i,-j) + F_(i,j))
            let mij = fmm.sub(&fmp).sub(&fpm).add(&fpp).scale_rat(&half);
            // M_(i,j+r) = -i/2 (F_(-i,-j) + F_(-i,j) - F_(i,-j) - F_(i,j))
            let mijr = fmm
                .add(&fmp)
                .sub(&fpm)
                .sub(&fpp)
                .scale(&imag.neg().scale(&half));
            // M_(i+r,j) = i/2 (F_(-i,-j) - F_(-i,j) + F_(i,-j) - F_(i,j))
            let mirj = fmm
                .sub(&fmp)
                .add(&fpm)
                .sub(&fpp)
                .scale(&imag.scale(&half));
            // M_(i+r,j+r) = 1/2 (F_(-i,-j) + F_(-i,j) + F_(i,-j) + F_(i,j))
            let mirjr = fmm.add(&fmp).add(&fpm).add(&fpp).scale_rat(&half);
            let r = rank;
            for (key, val) in [
                ((i as u8, j as u8), mij),
                ((i as u8, j as u8 + r), mijr),
                ((i as u8 + r, j as u8), mirj),
                ((i as u8 + r, j as u8 + r), mirjr),
            ] {
                if !val.is_zero() {
                    m.insert(key, val);
                }
            }
        }
    }
    Ok(m)
}

/// The forward component formulas of the basis change: `F` in terms of `M`.
pub fn map_m_to_f(ctx: &Ctx, m: &MGenerators, rank: u8) -> GeneratorSet {
    let imag = MultiPoly::var(ctx, crate::context::std_vars::imag(rank));
    let half = crate::poly::rat(1, 2);
    let get = |a: u8, b: u8| -> AlgebraElement {
        m.get(&(a, b))
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(ctx))
    };
    let mut f = BTreeMap::new();
    let r = rank;
    for i in 1..=rank {
        for j in 1..=rank {
            let mij = get(i, j);
            let mijr = get(i, j + r);
            let mirj = get(i + r, j);
            let mirjr = get(i + r, j + r);
            let imijr = mijr.scale(&imag);
            let imirj = mirj.scale(&imag);
            // F_(-i,-j) = 1/2 ( M_(i,j) + i M_(i,j+r) - i M_(i+r,j) + M_(i+r,j+r))
            let fmm = mij.add(&imijr).sub(&imirj).add(&mirjr).scale_rat(&half);
            // F_(-i,j)  = 1/2 (-M_(i,j) + i M_(i,j+r) + i M_(i+r,j) + M_(i+r,j+r))
            let fmp = mij
                .neg()
                .add(&imijr)
                .add(&imirj)
                .add(&mirjr)
                .scale_rat(&half);
            // F_(i,-j)  = 1/2 (-M_(i,j) - i M_(i,j+r) - i M_(i+r,j) + M_(i+r,j+r))
            let fpm = mij
                .neg()
                .sub(&imijr)
                .sub(&imirj)
                .add(&mirjr)
                .scale_rat(&half);
            // F_(i,j)   = 1/2 ( M_(i,j) - i M_(i,j+r) + i M_(i+r,j) + M_(i+r,j+r))
            let fpp = mij.sub(&imijr).add(&imirj).add(&mirjr).scale_rat(&half);
            for (key, val) in [
                ((-(i as i32), -(j as i32)), fmm),
                ((-(i as i32), j as i32), fmp),
                ((i as i32, -(j as i32)), fpm),
                ((i as i32, j as i32), fpp),
            ] {
                if !val.is_zero() {
                    f.insert(key, val);
                }
            }
        }
    }
    GeneratorSet { rank, f }
}

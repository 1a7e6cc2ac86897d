//! The Lax-matrix catalog: constructors for every oscillator-type Lax matrix,
//! their factorised forms, the twist operators that regulate their traces, the
//! oscillator-space similarity substitutions used by the factorisation
//! identities, and the scaled limits connecting full and degenerate families.
//!
//! All matrices are built in the bold basis, where the spectral parameter
//! sits on the diagonal; plain-basis forms are obtained on demand by
//! conjugating with the basis change S.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::context::{std_vars, Ctx, Var};
use crate::error::LaxError;
use crate::matrix::{b_alpha, b_tilde, OpMatrix};
use crate::osc::{AlgebraElement, Generator, OscMode, Register, SubstitutionRules};
use crate::poly::{parse_rational, rat, MultiPoly, Rational};
use crate::trace::{TwistWeight, WeightMap};

// ---------------------------------------------------------------------------
// Dense block helpers
// ---------------------------------------------------------------------------

pub type Dense = Vec<Vec<AlgebraElement>>;

pub fn dense_zero(ctx: &Ctx, rows: usize, cols: usize) -> Dense {
    vec![vec![AlgebraElement::zero(ctx); cols]; rows]
}

pub fn dense_identity(ctx: &Ctx, n: usize) -> Dense {
    let mut m = dense_zero(ctx, n, n);
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = AlgebraElement::one(ctx);
    }
    m
}

pub fn dense_scale(m: &Dense, p: &MultiPoly) -> Dense {
    m.iter()
        .map(|row| row.iter().map(|e| e.scale(p)).collect())
        .collect()
}

pub fn dense_neg(m: &Dense) -> Dense {
    m.iter()
        .map(|row| row.iter().map(|e| e.neg()).collect())
        .collect()
}

pub fn dense_add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn dense_sub(a: &Dense, b: &Dense) -> Dense {
    dense_add(a, &dense_neg(b))
}

/// Order-preserving dense product.
pub fn dense_mul(ctx: &Ctx, a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = dense_zero(ctx, n, m);
    for r in 0..n {
        for t in 0..k {
            if a[r][t].is_zero() {
                continue;
            }
            for c in 0..m {
                if b[t][c].is_zero() {
                    continue;
                }
                out[r][c] = out[r][c].add(&a[r][t].mul(&b[t][c]));
            }
        }
    }
    out
}

/// Plain transpose along the main diagonal.
pub fn dense_transpose(ctx: &Ctx, a: &Dense) -> Dense {
    let (n, m) = (a.len(), a[0].len());
    let mut out = dense_zero(ctx, m, n);
    for r in 0..n {
        for c in 0..m {
            out[c][r] = a[r][c].clone();
        }
    }
    out
}

/// The exchange matrix of size n.
pub fn dense_exchange(ctx: &Ctx, n: usize) -> Dense {
    let mut m = dense_zero(ctx, n, n);
    for (k, row) in m.iter_mut().enumerate() {
        row[n - 1 - k] = AlgebraElement::one(ctx);
    }
    m
}

/// exp of a dense matrix nilpotent under multiplication.
pub fn dense_exp_nilpotent(ctx: &Ctx, m: &Dense) -> Dense {
    let n = m.len();
    let mut acc = dense_identity(ctx, n);
    let mut pw = dense_identity(ctx, n);
    let mut k: u64 = 1;
    loop {
        pw = dense_mul(ctx, &pw, m);
        if pw.iter().all(|row| row.iter().all(|e| e.is_zero())) {
            break;
        }
        let f = Rational::new(1.into(), (1..=k).product::<u64>().into());
        acc = dense_add(&acc, &dense_scale(&pw, &MultiPoly::constant(ctx, f)));
        k += 1;
    }
    acc
}

/// Assembles a square block grid with the given diagonal block sizes.
pub fn assemble_blocks(ctx: &Ctx, sizes: &[usize], grid: &[Vec<Dense>]) -> Dense {
    let n: usize = sizes.iter().sum();
    let mut out = dense_zero(ctx, n, n);
    let mut roff = 0;
    for (bi, rs) in sizes.iter().enumerate() {
        let mut coff = 0;
        for (bj, cs) in sizes.iter().enumerate() {
            let blk = &grid[bi][bj];
            assert_eq!(blk.len(), *rs);
            for r in 0..*rs {
                assert_eq!(blk[r].len(), *cs);
                for c in 0..*cs {
                    out[roff + r][coff + c] = blk[r][c].clone();
                }
            }
            coff += cs;
        }
        roff += rs;
    }
    out
}

fn to_opmatrix(ctx: &Ctx, rank: u8, rows: Dense) -> OpMatrix {
    OpMatrix::from_dense(ctx, vec![rank], rows)
}

// ---------------------------------------------------------------------------
// Mode families
// ---------------------------------------------------------------------------

/// Spinor-family mode `(i,-j)`, `1 <= i < j <= r`.
pub fn spinor_mode(reg: Register, i: u8, j: u8) -> OscMode {
    debug_assert!(i < j);
    OscMode::Spinor { reg, i, j }
}

/// Vector-family mode `k`, `k` in `-(r-1)..-1, 1..r-1`.
pub fn vector_mode(reg: Register, k: i8) -> OscMode {
    debug_assert!(k != 0);
    OscMode::Vector { reg, k }
}

pub fn spinor_modes(reg: Register, rank: u8) -> Vec<OscMode> {
    let mut v = Vec::new();
    for i in 1..rank {
        for j in i + 1..=rank {
            v.push(spinor_mode(reg, i, j));
        }
    }
    v
}

pub fn vector_modes(reg: Register, rank: u8) -> Vec<OscMode> {
    let mut v = Vec::new();
    for k in 1..rank as i8 {
        v.push(vector_mode(reg, -k));
    }
    for k in 1..rank as i8 {
        v.push(vector_mode(reg, k));
    }
    v
}

/// Modes of the quad-with-spinor family: 2(r-1) vector modes plus the
/// (r-1)(r-2)/2 inner spinor modes.
pub fn quad_modes(reg: Register, rank: u8) -> Vec<OscMode> {
    let mut v = vector_modes(reg, rank);
    v.extend(spinor_modes(reg, rank - 1));
    v
}

// ---------------------------------------------------------------------------
// Block building blocks
// ---------------------------------------------------------------------------

/// The r x r creation block Abar: row r-i+1, column j holds
/// `Abar_(-i,j) = abar_(-i,j)` for `j < i`, `-abar_(-j,i)` for `j > i`.
#[allow(clippy::needless_range_loop)]
pub fn abar_block(ctx: &Ctx, m: u8, amode: &dyn Fn(u8, u8) -> OscMode) -> Dense {
    let n = m as usize;
    let mut out = dense_zero(ctx, n, n);
    for p in 0..n {
        let i = (n - p) as u8; // row p corresponds to index -i
        for q in 0..n {
            let j = (q + 1) as u8;
            out[p][q] = if j < i {
                AlgebraElement::creator(ctx, amode(j, i))
            } else if j > i {
                AlgebraElement::creator(ctx, amode(i, j)).neg()
            } else {
                AlgebraElement::zero(ctx)
            };
        }
    }
    out
}

/// The r x r annihilation block A: row i, column r-j+1 holds
/// `A_(i,-j) = -a_(i,-j)` for `i < j`, `+a_(j,-i)` for `i > j`.
#[allow(clippy::needless_range_loop)]
pub fn a_block(ctx: &Ctx, m: u8, amode: &dyn Fn(u8, u8) -> OscMode) -> Dense {
    let n = m as usize;
    let mut out = dense_zero(ctx, n, n);
    for p in 0..n {
        let i = (p + 1) as u8;
        for q in 0..n {
            let j = (n - q) as u8; // col q corresponds to index -j
            out[p][q] = if i < j {
                AlgebraElement::annihilator(ctx, amode(i, j)).neg()
            } else if i > j {
                AlgebraElement::annihilator(ctx, amode(j, i))
            } else {
                AlgebraElement::zero(ctx)
            };
        }
    }
    out
}

/// Vector-family index at position `q` of the length-2(r-1) vectors:
/// `(-r+1, ..., -1, 1, ..., r-1)`.
fn vec_index(q: usize, m: usize) -> i8 {
    if q < m {
        -((m - q) as i8)
    } else {
        (q - m + 1) as i8
    }
}

/// Row vector of creators `wp = (abar_(-r+1), ..., abar_(r-1))`.
pub fn wp_row(ctx: &Ctx, rank: u8, vmode: &dyn Fn(i8) -> OscMode) -> Dense {
    let m = rank as usize - 1;
    vec![(0..2 * m)
        .map(|q| AlgebraElement::creator(ctx, vmode(vec_index(q, m))))
        .collect()]
}

/// Column vector of annihilators `w = (a_(-r+1), ..., a_(r-1))^t`.
pub fn w_col(ctx: &Ctx, rank: u8, vmode: &dyn Fn(i8) -> OscMode) -> Dense {
    let m = rank as usize - 1;
    (0..2 * m)
        .map(|q| vec![AlgebraElement::annihilator(ctx, vmode(vec_index(q, m)))])
        .collect()
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// Linear (spinor-node) degenerate Lax matrix: 2x2 blocks
/// `[[z I + Abar A, Abar], [A, I]]` over r(r-1)/2 oscillator pairs.
pub fn spinor_degenerate(ctx: &Ctx, rank: u8, reg: Register, spectral: &MultiPoly) -> OpMatrix {
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    to_opmatrix(ctx, rank, spinor_degenerate_dense(ctx, rank, &amode, spectral))
}

fn spinor_degenerate_dense(
    ctx: &Ctx,
    m: u8,
    amode: &dyn Fn(u8, u8) -> OscMode,
    spectral: &MultiPoly,
) -> Dense {
    let n = m as usize;
    let abar = abar_block(ctx, m, amode);
    let a = a_block(ctx, m, amode);
    let tl = dense_add(
        &dense_scale(&dense_identity(ctx, n), spectral),
        &dense_mul(ctx, &abar, &a),
    );
    assemble_blocks(
        ctx,
        &[n, n],
        &[
            vec![tl, abar],
            vec![a, dense_identity(ctx, n)],
        ],
    )
}

/// The factorised form of the spinor-degenerate matrix:
/// upper-unipotent x diag(z I, I) x lower-unipotent.
pub fn spinor_degenerate_factors(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
) -> OpMatrix {
    let n = rank as usize;
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    let abar = abar_block(ctx, rank, &amode);
    let a = a_block(ctx, rank, &amode);
    let zero = dense_zero(ctx, n, n);
    let id = dense_identity(ctx, n);
    let upper = assemble_blocks(ctx, &[n, n], &[vec![id.clone(), abar], vec![zero.clone(), id.clone()]]);
    let core = assemble_blocks(
        ctx,
        &[n, n],
        &[
            vec![dense_scale(&id, spectral), zero.clone()],
            vec![zero.clone(), id.clone()],
        ],
    );
    let lower = assemble_blocks(ctx, &[n, n], &[vec![id.clone(), zero], vec![a, id]]);
    let prod = dense_mul(ctx, &dense_mul(ctx, &upper, &core), &lower);
    to_opmatrix(ctx, rank, prod)
}

/// Full spinor-representation Lax matrix `L_s` with symbolic (or rational)
/// label `s`; `kappa = m - 1` where `m` is the rank of the formula.
pub fn spinor_full(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> OpMatrix {
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    to_opmatrix(ctx, rank, spinor_full_dense(ctx, rank, &amode, spectral, s))
}

/// Dense form of the full spinor Lax matrix at formula rank `m`.
pub fn spinor_full_dense_pub(
    ctx: &Ctx,
    m: u8,
    amode: &dyn Fn(u8, u8) -> OscMode,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> Dense {
    spinor_full_dense(ctx, m, amode, spectral, s)
}

fn spinor_full_dense(
    ctx: &Ctx,
    m: u8,
    amode: &dyn Fn(u8, u8) -> OscMode,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> Dense {
    let n = m as usize;
    let kappa = MultiPoly::int(ctx, m as i64 - 1);
    let abar = abar_block(ctx, m, amode);
    let a = a_block(ctx, m, amode);
    let id = dense_identity(ctx, n);
    let tl = dense_add(
        &dense_scale(&id, &spectral.add(s)),
        &dense_mul(ctx, &abar, &a),
    );
    // -Abar (2s + kappa + A Abar)
    let inner = dense_add(
        &dense_scale(&id, &s.scale(&rat(2, 1)).add(&kappa)),
        &dense_mul(ctx, &a, &abar),
    );
    let tr = dense_neg(&dense_mul(ctx, &abar, &inner));
    let br = dense_sub(
        &dense_scale(&id, &spectral.sub(s).sub(&kappa)),
        &dense_mul(ctx, &a, &abar),
    );
    assemble_blocks(ctx, &[n, n], &[vec![tl, tr], vec![a, br]])
}

/// The factorised form of `L_s`.
pub fn spinor_full_factors(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> OpMatrix {
    let n = rank as usize;
    let kappa = MultiPoly::int(ctx, rank as i64 - 1);
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    let abar = abar_block(ctx, rank, &amode);
    let a = a_block(ctx, rank, &amode);
    let id = dense_identity(ctx, n);
    let zero = dense_zero(ctx, n, n);
    let upper = assemble_blocks(
        ctx,
        &[n, n],
        &[vec![id.clone(), abar.clone()], vec![zero.clone(), id.clone()]],
    );
    let core = assemble_blocks(
        ctx,
        &[n, n],
        &[
            vec![dense_scale(&id, &spectral.add(s)), zero.clone()],
            vec![a, dense_scale(&id, &spectral.sub(s).sub(&kappa))],
        ],
    );
    let upper_inv = assemble_blocks(
        ctx,
        &[n, n],
        &[vec![id.clone(), dense_neg(&abar)], vec![zero, id]],
    );
    let prod = dense_mul(ctx, &dense_mul(ctx, &upper, &core), &upper_inv);
    to_opmatrix(ctx, rank, prod)
}

/// Quadratic (first-fundamental-node) degenerate Lax matrix over the 2(r-1)
/// vector oscillators, in its explicit 3-block form.
pub fn fund_degenerate(ctx: &Ctx, rank: u8, reg: Register, spectral: &MultiPoly) -> OpMatrix {
    let vmode = |k: i8| vector_mode(reg, k);
    to_opmatrix(ctx, rank, fund_degenerate_dense(ctx, rank, &vmode, spectral))
}

pub fn fund_degenerate_dense(
    ctx: &Ctx,
    rank: u8,
    vmode: &dyn Fn(i8) -> OscMode,
    spectral: &MultiPoly,
) -> Dense {
    let r = rank as usize;
    let d = 2 * r - 2;
    let z = spectral;
    let wp = wp_row(ctx, rank, vmode);
    let w = w_col(ctx, rank, vmode);
    let jx = dense_exchange(ctx, d);
    let id = dense_identity(ctx, d);
    let wpj = dense_mul(ctx, &wp, &jx); // wp J, row
    let jwpt = dense_mul(ctx, &jx, &dense_transpose(ctx, &wp)); // J wp^t, col
    let wtj = dense_mul(ctx, &dense_transpose(ctx, &w), &jx); // w^t J, row
    let half = MultiPoly::constant(ctx, rat(1, 2));
    // scalars wp J wp^t and w^t J w
    let wpjwpt = dense_mul(ctx, &wpj, &dense_transpose(ctx, &wp))[0][0].clone();
    let wtjw = dense_mul(ctx, &wtj, &w)[0][0].clone();
    let wpw = dense_mul(ctx, &wp, &w)[0][0].clone();

    let quarter = MultiPoly::constant(ctx, rat(1, 4));
    // (1,1): z^2 + z(2 - r - wp w) + 1/4 wp J wp^t w^t J w
    let e11 = AlgebraElement::from_poly(z.pow(2))
        .add(
            &AlgebraElement::from_poly(MultiPoly::int(ctx, 2 - rank as i64))
                .sub(&wpw)
                .scale(z),
        )
        .add(&wpjwpt.mul(&wtjw).scale(&quarter));
    // (1,2): z wp - 1/2 wp J wp^t w^t J
    let e12: Vec<AlgebraElement> = (0..d)
        .map(|c| {
            wp[0][c]
                .scale(z)
                .sub(&wpjwpt.mul(&wtj[0][c]).scale(&half))
        })
        .collect();
    // (1,3): -1/2 wp J wp^t
    let e13 = wpjwpt.scale(&half).neg();
    // (2,1): -z w + 1/2 J wp^t w^t J w
    let e21: Vec<AlgebraElement> = (0..d)
        .map(|p| {
            w[p][0]
                .scale(z)
                .neg()
                .add(&jwpt[p][0].mul(&wtjw).scale(&half))
        })
        .collect();
    // (2,2): z I - J wp^t w^t J
    let e22: Dense = (0..d)
        .map(|p| {
            (0..d)
                .map(|c| id[p][c].scale(z).sub(&jwpt[p][0].mul(&wtj[0][c])))
                .collect()
        })
        .collect();
    // (2,3): -J wp^t
    let e23: Vec<AlgebraElement> = (0..d).map(|p| jwpt[p][0].neg()).collect();
    // (3,1): -1/2 w^t J w
    let e31 = wtjw.scale(&half).neg();
    // (3,2): w^t J
    let e32: Vec<AlgebraElement> = (0..d).map(|c| wtj[0][c].clone()).collect();

    let grid = vec![
        vec![
            vec![vec![e11]],
            vec![e12],
            vec![vec![e13]],
        ],
        vec![
            e21.into_iter().map(|e| vec![e]).collect(),
            e22,
            e23.into_iter().map(|e| vec![e]).collect(),
        ],
        vec![
            vec![vec![e31]],
            vec![e32],
            vec![vec![AlgebraElement::one(ctx)]],
        ],
    ];
    assemble_blocks(ctx, &[1, d, 1], &grid)
}

/// Unipotent upper factor `[[1, wp, -1/2 wp J wp^t], [0, I, -J wp^t], [0,0,1]]`.
fn unipotent_upper(ctx: &Ctx, rank: u8, wp: &Dense, negate: bool) -> Dense {
    let d = 2 * rank as usize - 2;
    let jx = dense_exchange(ctx, d);
    let wpt = dense_transpose(ctx, wp);
    let jwpt = dense_mul(ctx, &jx, &wpt);
    let wpjwpt = dense_mul(ctx, &dense_mul(ctx, wp, &jx), &wpt)[0][0].clone();
    let half = MultiPoly::constant(ctx, rat(1, 2));
    let sgn = |e: AlgebraElement| if negate { e.neg() } else { e };
    let row_wp: Vec<AlgebraElement> = (0..d).map(|c| sgn(wp[0][c].clone())).collect();
    let col = (0..d)
        .map(|p| vec![sgn(jwpt[p][0].clone()).neg()])
        .collect::<Dense>();
    let grid = vec![
        vec![
            vec![vec![AlgebraElement::one(ctx)]],
            vec![row_wp],
            vec![vec![wpjwpt.scale(&half).neg()]],
        ],
        vec![
            dense_zero(ctx, d, 1),
            dense_identity(ctx, d),
            col,
        ],
        vec![
            dense_zero(ctx, 1, 1),
            dense_zero(ctx, 1, d),
            vec![vec![AlgebraElement::one(ctx)]],
        ],
    ];
    assemble_blocks(ctx, &[1, d, 1], &grid)
}

/// Unipotent lower factor `[[1,0,0], [-w, I, 0], [-1/2 w^t J w, w^t J, 1]]`.
fn unipotent_lower(ctx: &Ctx, rank: u8, w: &Dense) -> Dense {
    let d = 2 * rank as usize - 2;
    let jx = dense_exchange(ctx, d);
    let wt = dense_transpose(ctx, w);
    let wtj = dense_mul(ctx, &wt, &jx);
    let wtjw = dense_mul(ctx, &wtj, w)[0][0].clone();
    let half = MultiPoly::constant(ctx, rat(1, 2));
    let grid = vec![
        vec![
            vec![vec![AlgebraElement::one(ctx)]],
            dense_zero(ctx, 1, d),
            dense_zero(ctx, 1, 1),
        ],
        vec![
            (0..d).map(|p| vec![w[p][0].neg()]).collect::<Dense>(),
            dense_identity(ctx, d),
            dense_zero(ctx, d, 1),
        ],
        vec![
            vec![vec![wtjw.scale(&half).neg()]],
            vec![(0..d).map(|c| wtj[0][c].clone()).collect()],
            vec![vec![AlgebraElement::one(ctx)]],
        ],
    ];
    assemble_blocks(ctx, &[1, d, 1], &grid)
}

/// The factorised form of the quadratic degenerate matrix.
pub fn fund_degenerate_factors(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
) -> OpMatrix {
    let vmode = |k: i8| vector_mode(reg, k);
    let d = 2 * rank as usize - 2;
    let wp = wp_row(ctx, rank, &vmode);
    let w = w_col(ctx, rank, &vmode);
    let upper = unipotent_upper(ctx, rank, &wp, false);
    let lower = unipotent_lower(ctx, rank, &w);
    let z = spectral;
    let core = {
        let mut m = dense_zero(ctx, d + 2, d + 2);
        m[0][0] = AlgebraElement::from_poly(
            z.mul(&z.sub(&MultiPoly::int(ctx, rank as i64 - 2))),
        );
        for k in 0..d {
            m[1 + k][1 + k] = AlgebraElement::from_poly(z.clone());
        }
        m[d + 1][d + 1] = AlgebraElement::one(ctx);
        m
    };
    let prod = dense_mul(ctx, &dense_mul(ctx, &upper, &core), &lower);
    to_opmatrix(ctx, rank, prod)
}

/// Quadratic Lax matrix with a spinor-representation core, from its explicit
/// block form. `vmode` names the 2(r-1) vector oscillators, `amode` the inner
/// (rank r-1) spinor oscillators carried by the core `L_s`.
pub fn quad_with_spinor_dense(
    ctx: &Ctx,
    rank: u8,
    vmode: &dyn Fn(i8) -> OscMode,
    amode: &dyn Fn(u8, u8) -> OscMode,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> Dense {
    let d = 2 * rank as usize - 2;
    let z = spectral;
    let kappa_m1 = MultiPoly::int(ctx, rank as i64 - 2); // kappa - 1
    let ls = spinor_full_dense(ctx, rank - 1, amode, z, s);
    let wp = wp_row(ctx, rank, vmode);
    let w = w_col(ctx, rank, vmode);
    let jx = dense_exchange(ctx, d);
    let wpj = dense_mul(ctx, &wp, &jx);
    let jwpt = dense_mul(ctx, &jx, &dense_transpose(ctx, &wp));
    let wtj = dense_mul(ctx, &dense_transpose(ctx, &w), &jx);
    let wpjwpt = dense_mul(ctx, &wpj, &dense_transpose(ctx, &wp))[0][0].clone();
    let wtjw = dense_mul(ctx, &wtj, &w)[0][0].clone();
    let half = MultiPoly::constant(ctx, rat(1, 2));
    let quarter = MultiPoly::constant(ctx, rat(1, 4));

    let wp_ls = dense_mul(ctx, &wp, &ls); // row
    let ls_w = dense_mul(ctx, &ls, &w); // col
    let wp_ls_w = dense_mul(ctx, &wp_ls, &w)[0][0].clone();

    // (1,1): (z+s)(z-s-kappa+1) - wp Ls w + 1/4 wp J wp^t w^t J w
    let e11 = AlgebraElement::from_poly(z.add(s).mul(&z.sub(s).sub(&kappa_m1)))
        .sub(&wp_ls_w)
        .add(&wpjwpt.mul(&wtjw).scale(&quarter));
    let e12: Vec<AlgebraElement> = (0..d)
        .map(|c| wp_ls[0][c].sub(&wpjwpt.mul(&wtj[0][c]).scale(&half)))
        .collect();
    let e13 = wpjwpt.scale(&half).neg();
    let e21: Vec<AlgebraElement> = (0..d)
        .map(|p| ls_w[p][0].neg().add(&jwpt[p][0].mul(&wtjw).scale(&half)))
        .collect();
    let e22: Dense = (0..d)
        .map(|p| {
            (0..d)
                .map(|c| ls[p][c].sub(&jwpt[p][0].mul(&wtj[0][c])))
                .collect()
        })
        .collect();
    let e23: Vec<AlgebraElement> = (0..d).map(|p| jwpt[p][0].neg()).collect();
    let e31 = wtjw.scale(&half).neg();
    let e32: Vec<AlgebraElement> = (0..d).map(|c| wtj[0][c].clone()).collect();

    let grid = vec![
        vec![vec![vec![e11]], vec![e12], vec![vec![e13]]],
        vec![
            e21.into_iter().map(|e| vec![e]).collect(),
            e22,
            e23.into_iter().map(|e| vec![e]).collect(),
        ],
        vec![
            vec![vec![e31]],
            vec![e32],
            vec![vec![AlgebraElement::one(ctx)]],
        ],
    ];
    assemble_blocks(ctx, &[1, d, 1], &grid)
}

/// Standalone quad-with-spinor family on its own register.
pub fn quad_with_spinor(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> OpMatrix {
    let vmode = |k: i8| vector_mode(reg, k);
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    to_opmatrix(
        ctx,
        rank,
        quad_with_spinor_dense(ctx, rank, &vmode, &amode, spectral, s),
    )
}

/// Factorised form of the quad-with-spinor matrix:
/// `U(wp) diag((z+s)(z-s-kappa+1), L_s(z), 1) V(w)`.
pub fn quad_with_spinor_factors(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
    s: &MultiPoly,
) -> OpMatrix {
    let vmode = |k: i8| vector_mode(reg, k);
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    let d = 2 * rank as usize - 2;
    let z = spectral;
    let kappa_m1 = MultiPoly::int(ctx, rank as i64 - 2);
    let wp = wp_row(ctx, rank, &vmode);
    let w = w_col(ctx, rank, &vmode);
    let ls = spinor_full_dense(ctx, rank - 1, &amode, z, s);
    let upper = unipotent_upper(ctx, rank, &wp, false);
    let lower = unipotent_lower(ctx, rank, &w);
    let mut core = dense_zero(ctx, d + 2, d + 2);
    core[0][0] = AlgebraElement::from_poly(z.add(s).mul(&z.sub(s).sub(&kappa_m1)));
    for p in 0..d {
        for c in 0..d {
            core[1 + p][1 + c] = ls[p][c].clone();
        }
    }
    core[d + 1][d + 1] = AlgebraElement::one(ctx);
    let prod = dense_mul(ctx, &dense_mul(ctx, &upper, &core), &lower);
    to_opmatrix(ctx, rank, prod)
}

/// The shift parameters of the fund-full factorisation, `x1 = (2-r-n)/2` and
/// `x2 = (r+n)/2`.
pub fn fund_full_shifts(ctx: &Ctx, rank: u8, n: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let half = rat(1, 2);
    let x1 = MultiPoly::int(ctx, 2 - rank as i64)
        .sub(n)
        .scale(&half);
    let x2 = MultiPoly::int(ctx, rank as i64).add(n).scale(&half);
    (x1, x2)
}

/// Full quadratic Lax matrix for the weights `(s,...,s,n)`, assembled from
/// its factorised form. With `s = 0` the spinor core reduces to the
/// trivial representation and only the 2(r-1) vector oscillators remain.
pub fn fund_full(
    ctx: &Ctx,
    rank: u8,
    reg: Register,
    spectral: &MultiPoly,
    s: Option<&MultiPoly>,
    n: &MultiPoly,
) -> OpMatrix {
    let vmode = |k: i8| vector_mode(reg, k);
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    to_opmatrix(
        ctx,
        rank,
        fund_full_dense(ctx, rank, &vmode, &amode, spectral, s, n),
    )
}

pub fn fund_full_dense(
    ctx: &Ctx,
    rank: u8,
    vmode: &dyn Fn(i8) -> OscMode,
    amode: &dyn Fn(u8, u8) -> OscMode,
    spectral: &MultiPoly,
    s: Option<&MultiPoly>,
    n: &MultiPoly,
) -> Dense {
    let core = |zmx1: &MultiPoly| match s {
        Some(s) => spinor_full_dense(ctx, rank - 1, amode, zmx1, s),
        None => dense_scale(&dense_identity(ctx, 2 * rank as usize - 2), zmx1),
    };
    fund_full_dense_with_core(ctx, rank, vmode, spectral, s, n, &core)
}

/// Same assembly with a caller-supplied spinor core (as a function of the
/// shifted argument `z - x1`), used for the other-spinor-node variant.
pub fn fund_full_dense_with_core(
    ctx: &Ctx,
    rank: u8,
    vmode: &dyn Fn(i8) -> OscMode,
    spectral: &MultiPoly,
    s: Option<&MultiPoly>,
    n: &MultiPoly,
    spinor_core: &dyn Fn(&MultiPoly) -> Dense,
) -> Dense {
    let d = 2 * rank as usize - 2;
    let z = spectral;
    let (x1, x2) = fund_full_shifts(ctx, rank, n);
    let zmx1 = z.sub(&x1);
    let zmx2 = z.sub(&x2);
    let rm2 = MultiPoly::int(ctx, rank as i64 - 2);
    let wp = wp_row(ctx, rank, vmode);
    let w = w_col(ctx, rank, vmode);
    let jx = dense_exchange(ctx, d);
    let wtj = dense_mul(ctx, &dense_transpose(ctx, &w), &jx);
    let wtjw = dense_mul(ctx, &wtj, &w)[0][0].clone();
    let half = MultiPoly::constant(ctx, rat(1, 2));

    // Middle factor D_s(z); for s = 0 the spinor core is (z-x1) I. The top
    // corner carries the same +-s shifts as the quad core, which the
    // factorisation identity forces; it reduces to (z-x1)(z-x1-r+2) at s = 0.
    let mut core = dense_zero(ctx, d + 2, d + 2);
    core[0][0] = match s {
        Some(s) => AlgebraElement::from_poly(zmx1.add(s).mul(&zmx1.sub(s).sub(&rm2))),
        None => AlgebraElement::from_poly(zmx1.mul(&zmx1.sub(&rm2))),
    };
    let ls: Dense = spinor_core(&zmx1);
    let ls_w = dense_mul(ctx, &ls, &w);
    for p in 0..d {
        core[1 + p][0] = ls_w[p][0].neg();
        for c in 0..d {
            core[1 + p][1 + c] = ls[p][c].scale(&zmx2);
        }
    }
    core[d + 1][0] = wtjw.scale(&half).neg();
    for c in 0..d {
        core[d + 1][1 + c] = wtj[0][c].scale(&zmx2);
    }
    core[d + 1][d + 1] = AlgebraElement::from_poly(zmx2.mul(&zmx2.sub(&rm2)));

    let upper = unipotent_upper(ctx, rank, &wp, false);
    let upper_neg = unipotent_upper(ctx, rank, &wp, true);
    dense_mul(ctx, &dense_mul(ctx, &upper, &core), &upper_neg)
}

/// The D3 level-3 Lax matrix (six-dimensional representation), with
/// oscillators named `o1, o2, o3`.
pub fn d3_level3(ctx: &Ctx, spectral: &MultiPoly) -> OpMatrix {
    let o = |idx: u8| OscMode::Plain { idx };
    let ad = |i: u8| AlgebraElement::creator(ctx, o(i));
    let an = |i: u8| AlgebraElement::annihilator(ctx, o(i));
    let num = |i: u8| AlgebraElement::number_op(ctx, o(i));
    let z = AlgebraElement::from_poly(spectral.clone());
    let zero = AlgebraElement::zero(ctx);
    let one = AlgebraElement::one(ctx);
    let rows = vec![
        vec![
            z.sub(&num(1)).sub(&num(2)),
            ad(1).mul(&an(3)).neg(),
            ad(2).mul(&an(3)),
            ad(1),
            ad(2),
            zero.clone(),
        ],
        vec![
            ad(3).mul(&an(1)).neg(),
            z.sub(&num(2)).sub(&num(3)),
            ad(2).mul(&an(1)).neg(),
            ad(3),
            zero.clone(),
            ad(2).neg(),
        ],
        vec![
            ad(3).mul(&an(2)),
            ad(1).mul(&an(2)).neg(),
            z.sub(&num(1)).sub(&num(3)),
            zero.clone(),
            ad(3).neg(),
            ad(1).neg(),
        ],
        vec![an(1).neg(), an(3).neg(), zero.clone(), one.clone(), zero.clone(), zero.clone()],
        vec![an(2).neg(), zero.clone(), an(3), zero.clone(), one.clone(), zero.clone()],
        vec![zero.clone(), an(2), an(1), zero.clone(), zero.clone(), one],
    ];
    to_opmatrix(ctx, 3, rows)
}

/// The D3 level-2 Lax matrix `exp(M+) M0(z) exp(M-)` with
/// oscillators `o1..o4` and `M0 = diag(z^2 - z, z, z, z, z, 1)`.
#[allow(clippy::needless_range_loop)]
pub fn d3_level2(ctx: &Ctx, spectral: &MultiPoly) -> OpMatrix {
    let o = |idx: u8| OscMode::Plain { idx };
    let ad = |i: u8| AlgebraElement::creator(ctx, o(i));
    let an = |i: u8| AlgebraElement::annihilator(ctx, o(i));
    let mut mplus = dense_zero(ctx, 6, 6);
    let mut mminus = dense_zero(ctx, 6, 6);
    for k in 1..=4u8 {
        mplus[0][k as usize] = ad(k);
        mplus[k as usize][5] = ad(5 - k).neg();
        mminus[k as usize][0] = an(k).neg();
        mminus[5][k as usize] = an(5 - k);
    }
    let z = spectral;
    let mut m0 = dense_zero(ctx, 6, 6);
    m0[0][0] = AlgebraElement::from_poly(z.pow(2).sub(z));
    for k in 1..=4 {
        m0[k][k] = AlgebraElement::from_poly(z.clone());
    }
    m0[5][5] = AlgebraElement::one(ctx);
    let eplus = dense_exp_nilpotent(ctx, &mplus);
    let eminus = dense_exp_nilpotent(ctx, &mminus);
    let prod = dense_mul(ctx, &dense_mul(ctx, &eplus, &m0), &eminus);
    to_opmatrix(ctx, 3, prod)
}

/// Dictionary matching the D3 level-3 oscillators `o1,o2,o3` with the r=3
/// spinor-family modes: `o1 = (1,-3)`, `o2 = (2,-3)`, `o3 = (1,-2)`.
pub fn d3_level3_dictionary(reg: Register) -> BTreeMap<OscMode, OscMode> {
    BTreeMap::from([
        (OscMode::Plain { idx: 1 }, spinor_mode(reg, 1, 3)),
        (OscMode::Plain { idx: 2 }, spinor_mode(reg, 2, 3)),
        (OscMode::Plain { idx: 3 }, spinor_mode(reg, 1, 2)),
    ])
}

/// Dictionary matching the D3 level-2 oscillators `o1..o4` with the r=3
/// vector-family modes: `o1 = a_(-2)`, `o2 = a_(-1)`, `o3 = a_1`, `o4 = a_2`.
pub fn d3_level2_dictionary(reg: Register) -> BTreeMap<OscMode, OscMode> {
    BTreeMap::from([
        (OscMode::Plain { idx: 1 }, vector_mode(reg, -2)),
        (OscMode::Plain { idx: 2 }, vector_mode(reg, -1)),
        (OscMode::Plain { idx: 3 }, vector_mode(reg, 1)),
        (OscMode::Plain { idx: 4 }, vector_mode(reg, 2)),
    ])
}

/// Dictionary identifying the standalone quad-with-spinor modes at register
/// `R1` with the two-register spinor modes of the factorisation: vector mode
/// `+k -> (k,-r)@1`, `-k -> (k,-r)@2`, inner modes unchanged.
pub fn quad_two_register_dictionary(rank: u8) -> BTreeMap<OscMode, OscMode> {
    let mut map = BTreeMap::new();
    for k in 1..rank as i8 {
        map.insert(
            vector_mode(Register::One, k),
            spinor_mode(Register::One, k as u8, rank),
        );
        map.insert(
            vector_mode(Register::One, -k),
            spinor_mode(Register::Two, k as u8, rank),
        );
    }
    map
}

// ---------------------------------------------------------------------------
// G matrices
// ---------------------------------------------------------------------------

/// Spectral-parameter-free factor of the spinor factorisation:
/// `[[I, -A^T], [0, I]]` over register `reg`.
pub fn g_spinor(ctx: &Ctx, rank: u8, reg: Register) -> OpMatrix {
    let n = rank as usize;
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    let a = a_block(ctx, rank, &amode);
    let at = dense_transpose(ctx, &a);
    let id = dense_identity(ctx, n);
    let zero = dense_zero(ctx, n, n);
    let rows = assemble_blocks(ctx, &[n, n], &[vec![id.clone(), dense_neg(&at)], vec![zero, id]]);
    to_opmatrix(ctx, rank, rows)
}

/// G of the quad factorisation: identity except for a `-A^t` block linking
/// the two middle blocks; annihilators of the inner register-`reg` modes.
pub fn g_quad(ctx: &Ctx, rank: u8, reg: Register) -> OpMatrix {
    let m = rank as usize - 1;
    let amode = |i: u8, j: u8| spinor_mode(reg, i, j);
    let a = a_block(ctx, rank - 1, &amode);
    let at = dense_transpose(ctx, &a);
    let sizes = [1usize, m, m, 1usize];
    let mut grid: Vec<Vec<Dense>> = Vec::new();
    for (bi, rs) in sizes.iter().enumerate() {
        let mut row = Vec::new();
        for (bj, cs) in sizes.iter().enumerate() {
            if bi == bj {
                row.push(dense_identity(ctx, *rs));
            } else if bi == 1 && bj == 2 {
                row.push(dense_neg(&at));
            } else {
                row.push(dense_zero(ctx, *rs, *cs));
            }
        }
        grid.push(row);
    }
    let rows = assemble_blocks(ctx, &[1, m, m, 1], &grid);
    to_opmatrix(ctx, rank, rows)
}

/// G of the fund factorisation:
/// `[[1, w^t J, -1/2 w^t J w], [0, I, -w], [0, 0, 1]]` over register `reg`.
pub fn g_fund(ctx: &Ctx, rank: u8, reg: Register) -> OpMatrix {
    let d = 2 * rank as usize - 2;
    let vmode = |k: i8| vector_mode(reg, k);
    let w = w_col(ctx, rank, &vmode);
    let jx = dense_exchange(ctx, d);
    let wtj = dense_mul(ctx, &dense_transpose(ctx, &w), &jx);
    let wtjw = dense_mul(ctx, &wtj, &w)[0][0].clone();
    let half = MultiPoly::constant(ctx, rat(1, 2));
    let grid = vec![
        vec![
            vec![vec![AlgebraElement::one(ctx)]],
            vec![(0..d).map(|c| wtj[0][c].clone()).collect()],
            vec![vec![wtjw.scale(&half).neg()]],
        ],
        vec![
            dense_zero(ctx, d, 1),
            dense_identity(ctx, d),
            (0..d).map(|p| vec![w[p][0].neg()]).collect::<Dense>(),
        ],
        vec![
            dense_zero(ctx, 1, 1),
            dense_zero(ctx, 1, d),
            vec![vec![AlgebraElement::one(ctx)]],
        ],
    ];
    let rows = assemble_blocks(ctx, &[1, d, 1], &grid);
    to_opmatrix(ctx, rank, rows)
}

// ---------------------------------------------------------------------------
// Oscillator-space similarity substitutions
// ---------------------------------------------------------------------------

fn gen_a(mode: OscMode) -> Generator {
    Generator {
        mode,
        creation: false,
    }
}

fn abar_entry(ctx: &Ctx, amode: &dyn Fn(u8, u8) -> OscMode, i: u8, j: u8) -> AlgebraElement {
    // Abar_(-i,j) as an element (0 when i == j).
    if j < i {
        AlgebraElement::creator(ctx, amode(j, i))
    } else if j > i {
        AlgebraElement::creator(ctx, amode(i, j)).neg()
    } else {
        AlgebraElement::zero(ctx)
    }
}

/// Shift rules of the spinor factorisation:
/// `a_(i,-j)@1 -> a_(i,-j)@1 + abar_(-j,i)@2` and the same with the
/// registers exchanged.
pub fn s_rules_spinor(ctx: &Ctx, rank: u8) -> SubstitutionRules {
    let mut rules = SubstitutionRules::new();
    for (reg, other) in [(Register::One, Register::Two), (Register::Two, Register::One)] {
        for i in 1..rank {
            for j in i + 1..=rank {
                let m = spinor_mode(reg, i, j);
                let img = AlgebraElement::annihilator(ctx, m)
                    .add(&AlgebraElement::creator(ctx, spinor_mode(other, i, j)));
                rules.set(gen_a(m), img);
            }
        }
    }
    rules
}

/// Shift rules of the quad factorisation, acting on the two-register spinor
/// modes of rank `r`: the inner annihilators shift by the other register's
/// creators (plus vector-mode bilinears), the vector modes mix with the inner
/// creation block.
pub fn s_rules_quad(ctx: &Ctx, rank: u8) -> SubstitutionRules {
    let inner1 = |i: u8, j: u8| spinor_mode(Register::One, i, j);
    let inner2 = |i: u8, j: u8| spinor_mode(Register::Two, i, j);
    let v1 = |k: u8| spinor_mode(Register::One, k, rank);
    let v2 = |k: u8| spinor_mode(Register::Two, k, rank);
    let m = rank - 1;
    let mut rules = SubstitutionRules::new();
    // a@2 inner -> a@2 + abar@1 inner
    for i in 1..m {
        for j in i + 1..=m {
            let img = AlgebraElement::annihilator(ctx, inner2(i, j))
                .add(&AlgebraElement::creator(ctx, inner1(i, j)));
            rules.set(gen_a(inner2(i, j)), img);
        }
    }
    // a@1 inner -> a@1 + abar@2 inner + a_v1(i) abar_v2(j) - abar_v2(i) a_v1(j)
    for i in 1..m {
        for j in i + 1..=m {
            let img = AlgebraElement::annihilator(ctx, inner1(i, j))
                .add(&AlgebraElement::creator(ctx, inner2(i, j)))
                .add(
                    &AlgebraElement::annihilator(ctx, v1(i))
                        .mul(&AlgebraElement::creator(ctx, v2(j))),
                )
                .sub(
                    &AlgebraElement::creator(ctx, v2(i))
                        .mul(&AlgebraElement::annihilator(ctx, v1(j))),
                );
            rules.set(gen_a(inner1(i, j)), img);
        }
    }
    // abar_v1(p) -> abar_v1(p) - sum_k abar_v2(k) Abar1_(-k,p)
    for p in 1..=m {
        let mut img = AlgebraElement::creator(ctx, v1(p));
        for k in 1..=m {
            let ab = abar_entry(ctx, &inner1, k, p);
            if !ab.is_zero() {
                img = img.sub(&AlgebraElement::creator(ctx, v2(k)).mul(&ab));
            }
        }
        rules.set(
            Generator {
                mode: v1(p),
                creation: true,
            },
            img,
        );
    }
    // a_v2(p) -> a_v2(p) + sum_q Abar1_(-p,q) a_v1(q)
    for p in 1..=m {
        let mut img = AlgebraElement::annihilator(ctx, v2(p));
        for q in 1..=m {
            let ab = abar_entry(ctx, &inner1, p, q);
            if !ab.is_zero() {
                img = img.add(&ab.mul(&AlgebraElement::annihilator(ctx, v1(q))));
            }
        }
        rules.set(gen_a(v2(p)), img);
    }
    rules
}

/// Shift rules of the fund factorisation on two registers of vector modes:
/// `a_k@1 -> a_k@1 + abar_(-k)@2` and with registers exchanged.
pub fn s_rules_fund(ctx: &Ctx, rank: u8) -> SubstitutionRules {
    let mut rules = SubstitutionRules::new();
    for (reg, other) in [(Register::One, Register::Two), (Register::Two, Register::One)] {
        for k in 1..rank as i8 {
            for kk in [k, -k] {
                let m = vector_mode(reg, kk);
                let img = AlgebraElement::annihilator(ctx, m)
                    .add(&AlgebraElement::creator(ctx, vector_mode(other, -kk)));
                rules.set(gen_a(m), img);
            }
        }
    }
    rules
}

// ---------------------------------------------------------------------------
// Twists
// ---------------------------------------------------------------------------

/// Diagonal twist matrix in the auxiliary space, stored as one Laurent
/// monomial per signed index: `D_(a,a) = t_|a|^(sign a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagTwist {
    pub rank: u8,
    /// Entry at position `p` is the weight of the `p`-th diagonal element.
    pub entries: Vec<TwistWeight>,
}

impl DiagTwist {
    /// `D = diag(exp(-phi_r), ..., exp(-phi_1), exp(phi_1), ..., exp(phi_r))`.
    pub fn fundamental(rank: u8) -> Self {
        let mut entries = Vec::with_capacity(2 * rank as usize);
        for p in 0..2 * rank as usize {
            let a = crate::matrix::SignedIndex::from_position(p, rank).0;
            let w = TwistWeight {
                coeff: Rational::from_integer(1.into()),
                exps: vec![(std_vars::t(a.unsigned_abs() as u8), a.signum())],
            };
            entries.push(w);
        }
        DiagTwist { rank, entries }
    }

    /// The primed transpose: diagonal entry at `a` becomes the one at `-a`.
    pub fn prime(&self) -> Self {
        let d = self.entries.len();
        DiagTwist {
            rank: self.rank,
            entries: (0..d).map(|p| self.entries[d - 1 - p].clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        DiagTwist {
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|w| w.is_one())
    }

    /// Evaluates to a rational diagonal OpMatrix.
    pub fn eval(
        &self,
        ctx: &Ctx,
        values: &BTreeMap<Var, Rational>,
    ) -> Result<OpMatrix, crate::error::AlgebraError> {
        let mut m = OpMatrix::zero(ctx, vec![self.rank]);
        for (p, w) in self.entries.iter().enumerate() {
            m.set(p, p, AlgebraElement::from_rational(ctx, w.eval(values)?));
        }
        Ok(m)
    }
}

/// Mode weights of the spinor-type regulator: mode `(i,-j)` carries
/// `t_i t_j`.
pub fn weights_spinor(rank: u8, reg: Register) -> WeightMap {
    let mut map = WeightMap::new();
    for i in 1..rank {
        for j in i + 1..=rank {
            let w = TwistWeight::var(std_vars::t(i)).mul(&TwistWeight::var(std_vars::t(j)));
            map.insert(spinor_mode(reg, i, j), w);
        }
    }
    map
}

/// Mode weights of the fundamental-type regulator: mode `+i` carries
/// `t_r t_i`, mode `-i` carries `t_r / t_i`.
pub fn weights_fund(rank: u8, reg: Register) -> WeightMap {
    let mut map = WeightMap::new();
    let tr = TwistWeight::var(std_vars::t(rank));
    for i in 1..rank {
        map.insert(
            vector_mode(reg, i as i8),
            tr.mul(&TwistWeight::var(std_vars::t(i))),
        );
        map.insert(
            vector_mode(reg, -(i as i8)),
            tr.mul(&TwistWeight::var(std_vars::t(i)).inverse()),
        );
    }
    map
}

/// A relabelling of the twist parameters: sign flips `phi_i -> alpha_i phi_i`
/// (so `t_i -> t_i^(alpha_i)`) and an optional swap `t_i <-> t_j`.
#[derive(Debug, Clone, Default)]
pub struct TwistTransform {
    pub flips: Vec<i8>,
    pub swap: Option<(u8, u8)>,
}

impl TwistTransform {
    pub fn identity(rank: u8) -> Self {
        TwistTransform {
            flips: vec![1; rank as usize],
            swap: None,
        }
    }

    pub fn from_sign_set(rank: u8, minus_positions: &[u8]) -> Self {
        let mut flips = vec![1i8; rank as usize];
        for &p in minus_positions {
            flips[p as usize - 1] = -1;
        }
        TwistTransform { flips, swap: None }
    }

    /// Applies the relabelling to concrete twist values `t_1..t_r`.
    pub fn apply_values(&self, values: &[Rational]) -> Vec<Rational> {
        let mut out: Vec<Rational> = values
            .iter()
            .zip(&self.flips)
            .map(|(v, &f)| if f == 1 { v.clone() } else { v.clone().recip() })
            .collect();
        if let Some((i, j)) = self.swap {
            out.swap(i as usize - 1, j as usize - 1);
        }
        out
    }

    /// The corresponding sign vector for the quantum-space conjugation.
    pub fn signs(&self) -> Vec<i8> {
        self.flips.clone()
    }
}

// ---------------------------------------------------------------------------
// LaxSpec: the serializable family descriptor
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaxFamily {
    D3Level3,
    D3Level2,
    SpinorDegenerate,
    FundDegenerate,
    SpinorFull,
    QuadWithSpinor,
    FundFull,
}

impl std::fmt::Display for LaxFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LaxFamily::D3Level3 => "d3-level3",
            LaxFamily::D3Level2 => "d3-level2",
            LaxFamily::SpinorDegenerate => "spinor-degenerate",
            LaxFamily::FundDegenerate => "fund-degenerate",
            LaxFamily::SpinorFull => "spinor-full",
            LaxFamily::QuadWithSpinor => "quad-with-spinor",
            LaxFamily::FundFull => "fund-full",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for LaxFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "d3-level3" => LaxFamily::D3Level3,
            "d3-level2" => LaxFamily::D3Level2,
            "spinor-degenerate" => LaxFamily::SpinorDegenerate,
            "fund-degenerate" => LaxFamily::FundDegenerate,
            "spinor-full" => LaxFamily::SpinorFull,
            "quad-with-spinor" => LaxFamily::QuadWithSpinor,
            "fund-full" => LaxFamily::FundFull,
            other => return Err(format!("unknown family `{other}`")),
        })
    }
}

/// A representation label: symbolic or a fixed rational value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarLabel {
    /// The symbol itself (`"sym"`).
    Symbolic(SymTag),
    /// A rational value such as `"0"` or `"3/2"`.
    Value(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymTag {
    Sym,
}

impl ScalarLabel {
    pub fn symbolic() -> Self {
        ScalarLabel::Symbolic(SymTag::Sym)
    }

    pub fn value(v: &str) -> Self {
        ScalarLabel::Value(v.to_string())
    }

    pub fn to_poly(&self, ctx: &Ctx, var: Var) -> Result<MultiPoly, LaxError> {
        match self {
            ScalarLabel::Symbolic(_) => Ok(MultiPoly::var(ctx, var)),
            ScalarLabel::Value(v) => parse_rational(v)
                .map(|r| MultiPoly::constant(ctx, r))
                .ok_or_else(|| LaxError::UnexpectedLabel("label".into(), v.clone())),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarLabel::Value(v) if parse_rational(v).map(|r| num_traits::Zero::is_zero(&r)).unwrap_or(false))
    }
}

/// Serializable description of a catalog Lax matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaxSpec {
    pub family: LaxFamily,
    pub rank: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap: Option<(u8, u8)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<ScalarLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<ScalarLabel>,
    #[serde(default = "default_register")]
    pub register: u8,
}

fn default_register() -> u8 {
    0
}

impl LaxSpec {
    pub fn new(family: LaxFamily, rank: u8) -> Self {
        LaxSpec {
            family,
            rank,
            signs: None,
            swap: None,
            s: None,
            n: None,
            register: 0,
        }
    }

    pub fn with_signs(mut self, signs: Vec<i8>) -> Self {
        self.signs = Some(signs);
        self
    }

    pub fn with_swap(mut self, i: u8, j: u8) -> Self {
        self.swap = Some((i, j));
        self
    }

    pub fn with_s(mut self, s: ScalarLabel) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_n(mut self, n: ScalarLabel) -> Self {
        self.n = Some(n);
        self
    }

    pub fn register(&self) -> Register {
        match self.register {
            1 => Register::One,
            2 => Register::Two,
            _ => Register::None,
        }
    }

    fn validate(&self) -> Result<(), LaxError> {
        if self.rank < 2 {
            return Err(LaxError::RankTooSmall(self.rank));
        }
        match self.family {
            LaxFamily::D3Level3 | LaxFamily::D3Level2 => {
                if self.rank != 3 {
                    return Err(LaxError::RankForcedMismatch(
                        self.family.to_string(),
                        3,
                        self.rank,
                    ));
                }
                if self.s.is_some() || self.n.is_some() {
                    return Err(LaxError::UnexpectedLabel(self.family.to_string(), "s/n".into()));
                }
            }
            LaxFamily::SpinorDegenerate | LaxFamily::FundDegenerate => {
                if self.s.is_some() || self.n.is_some() {
                    return Err(LaxError::UnexpectedLabel(self.family.to_string(), "s/n".into()));
                }
            }
            LaxFamily::SpinorFull | LaxFamily::QuadWithSpinor => {
                if self.s.is_none() {
                    return Err(LaxError::MissingLabel(self.family.to_string(), "s".into()));
                }
                if self.n.is_some() {
                    return Err(LaxError::UnexpectedLabel(self.family.to_string(), "n".into()));
                }
            }
            LaxFamily::FundFull => {
                if self.n.is_none() {
                    return Err(LaxError::MissingLabel(self.family.to_string(), "n".into()));
                }
            }
        }
        if let Some(signs) = &self.signs {
            if signs.len() != self.rank as usize || signs.iter().any(|&x| x != 1 && x != -1) {
                return Err(LaxError::BadSigns);
            }
        }
        if let Some((i, j)) = self.swap {
            if i == j || i == 0 || j == 0 || i > self.rank || j > self.rank {
                return Err(LaxError::Matrix(crate::error::MatrixError::BadSwap(i, j)));
            }
        }
        Ok(())
    }
}

/// Builds the Lax matrix described by `spec`, evaluated at the polynomial
/// spectral argument, then applies the recorded `B(alpha)` / `Btilde`
/// conjugations.
pub fn build_lax(ctx: &Ctx, spec: &LaxSpec, spectral: &MultiPoly) -> Result<OpMatrix, LaxError> {
    spec.validate()?;
    let reg = spec.register();
    let r = spec.rank;
    let base = match spec.family {
        LaxFamily::D3Level3 => d3_level3(ctx, spectral),
        LaxFamily::D3Level2 => d3_level2(ctx, spectral),
        LaxFamily::SpinorDegenerate => spinor_degenerate(ctx, r, reg, spectral),
        LaxFamily::FundDegenerate => fund_degenerate(ctx, r, reg, spectral),
        LaxFamily::SpinorFull => {
            let s = spec.s.as_ref().unwrap().to_poly(ctx, std_vars::S)?;
            spinor_full(ctx, r, reg, spectral, &s)
        }
        LaxFamily::QuadWithSpinor => {
            let s = spec.s.as_ref().unwrap().to_poly(ctx, std_vars::S)?;
            quad_with_spinor(ctx, r, reg, spectral, &s)
        }
        LaxFamily::FundFull => {
            let n = spec.n.as_ref().unwrap().to_poly(ctx, std_vars::N)?;
            match &spec.s {
                None => fund_full(ctx, r, reg, spectral, None, &n),
                Some(s) if s.is_zero() => fund_full(ctx, r, reg, spectral, None, &n),
                Some(s) => {
                    let sp = s.to_poly(ctx, std_vars::S)?;
                    fund_full(ctx, r, reg, spectral, Some(&sp), &n)
                }
            }
        }
    };
    let mut out = base;
    if let Some(signs) = &spec.signs {
        let b = b_alpha(ctx, signs, r)?;
        out = b.mul(&out).mul(&b);
    }
    if let Some((i, j)) = spec.swap {
        let b = b_tilde(ctx, i, j, r)?;
        out = b.mul(&out).mul(&b);
    }
    Ok(out)
}

/// The product of the factorised form for a family, for factor-consistency
/// checks (no conjugations applied).
pub fn factorized_form(ctx: &Ctx, spec: &LaxSpec, spectral: &MultiPoly) -> Result<OpMatrix, LaxError> {
    spec.validate()?;
    let reg = spec.register();
    let r = spec.rank;
    Ok(match spec.family {
        LaxFamily::SpinorDegenerate => spinor_degenerate_factors(ctx, r, reg, spectral),
        LaxFamily::FundDegenerate => fund_degenerate_factors(ctx, r, reg, spectral),
        LaxFamily::SpinorFull => {
            let s = spec.s.as_ref().unwrap().to_poly(ctx, std_vars::S)?;
            spinor_full_factors(ctx, r, reg, spectral, &s)
        }
        LaxFamily::QuadWithSpinor => {
            let s = spec.s.as_ref().unwrap().to_poly(ctx, std_vars::S)?;
            quad_with_spinor_factors(ctx, r, reg, spectral, &s)
        }
        LaxFamily::FundFull => build_lax(ctx, &LaxSpec { signs: None, swap: None, ..spec.clone() }, spectral)?,
        LaxFamily::D3Level2 => d3_level2(ctx, spectral),
        LaxFamily::D3Level3 => d3_level3(ctx, spectral),
    })
}

// ---------------------------------------------------------------------------
// Scaled limits
// ---------------------------------------------------------------------------

/// Result of a scaled limit: the order-0 matrix and the coefficient of the
/// first correction in the inverse label.
#[derive(Debug, Clone)]
pub struct ScaledLimit {
    pub limit: OpMatrix,
    pub correction: OpMatrix,
}

/// Families that admit a degenerate scaled limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitFamily {
    Spinor,
    Fundamental,
}

/// Rewrites `label^a eps^b -> factor^min(a,b) label^(a-min) eps^(b-min)`
/// (the bookkeeping identity `label * eps = factor`).
fn reduce_label_eps(p: &MultiPoly, label: Var, eps: Var, factor: &Rational) -> MultiPoly {
    let mut out = MultiPoly::zero(&p.ctx);
    for (m, c) in &p.terms {
        let (a, b) = (m.0[label.0], m.0[eps.0]);
        let k = a.min(b);
        let mut m2 = m.clone();
        m2.0[label.0] = a - k;
        m2.0[eps.0] = b - k;
        let mut coeff = c.clone();
        for _ in 0..k {
            coeff *= factor;
        }
        let term = MultiPoly {
            ctx: p.ctx.clone(),
            terms: BTreeMap::from([(m2, coeff)]),
        };
        out = out.add(&term);
    }
    out
}

/// Forms the scaled product of a full Lax matrix with its diagonal scaling,
/// expands in the inverse label, and returns the order-0 and order-1 parts.
/// Fails structurally if positive label powers survive.
pub fn scaled_limit(ctx: &Ctx, family: LimitFamily, rank: u8) -> Result<ScaledLimit, LaxError> {
    let z = MultiPoly::var(ctx, std_vars::Z);
    let eps = std_vars::EPS;
    let eps_poly = MultiPoly::var(ctx, eps);
    let (scaled, label, factor) = match family {
        LimitFamily::Spinor => {
            // L(z) = lim_s (1/(i sqrt(2s))) Ls(z - s) diag(i sqrt(2s) I, -i/sqrt(2s) I):
            // columnwise the prefactors reduce to (1, -eps) with eps = 1/(2s).
            let s = MultiPoly::var(ctx, std_vars::S);
            let ls = spinor_full(ctx, rank, Register::None, &z.sub(&s), &s);
            let mut diag = OpMatrix::zero(ctx, vec![rank]);
            for p in 0..rank as usize {
                diag.set(p, p, AlgebraElement::one(ctx));
                diag.set(
                    rank as usize + p,
                    rank as usize + p,
                    AlgebraElement::from_poly(eps_poly.neg()),
                );
            }
            (ls.mul(&diag), std_vars::S, rat(1, 2))
        }
        LimitFamily::Fundamental => {
            // L(z) = lim_n (1/n) Ln(z + x1) diag(n, -I, 1/n): columnwise
            // (1, -eps, eps^2) with eps = 1/n.
            let n = MultiPoly::var(ctx, std_vars::N);
            let (x1, _) = fund_full_shifts(ctx, rank, &n);
            let ln = fund_full(ctx, rank, Register::None, &z.add(&x1), None, &n);
            let d = 2 * rank as usize - 2;
            let mut diag = OpMatrix::zero(ctx, vec![rank]);
            diag.set(0, 0, AlgebraElement::one(ctx));
            for p in 0..d {
                diag.set(1 + p, 1 + p, AlgebraElement::from_poly(eps_poly.neg()));
            }
            diag.set(d + 1, d + 1, AlgebraElement::from_poly(eps_poly.pow(2)));
            (ln.mul(&diag), std_vars::N, rat(1, 1))
        }
    };
    let reduced = scaled.map(|e| {
        let mut out = AlgebraElement::zero(ctx);
        for (m, c) in &e.terms {
            out = out.add(&AlgebraElement::monomial(
                ctx,
                m.clone(),
                reduce_label_eps(c, label, eps, &factor),
            ));
        }
        out
    });
    // Divergence check: any eps^0 term with a surviving positive label power.
    let order0 = reduced.coeff_of(eps, 0);
    for (ridx, cidx, e) in order0.labelled_entries() {
        if e.terms.values().any(|c| c.degree_in(label) > 0) {
            return Err(LaxError::DivergentLimit(ridx[0], cidx[0]));
        }
    }
    let correction = reduced.coeff_of(eps, 1);
    Ok(ScaledLimit {
        limit: order0,
        correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::standard_context;

    #[test]
    fn spinor_degenerate_blocks() {
        // top-left z I + Abar A, bottom-right I, for several ranks
        for r in 2..=4u8 {
            let ctx = standard_context(r);
            let z = MultiPoly::var(&ctx, std_vars::Z);
            let l = spinor_degenerate(&ctx, r, Register::None, &z);
            let n = r as usize;
            for p in 0..n {
                assert_eq!(l.get(n + p, n + p), AlgebraElement::one(&ctx));
                let diag = l.get(p, p);
                assert_eq!(diag.scalar_part(), z, "rank {r}");
            }
            // oscillator count r(r-1)/2
            let modes: std::collections::BTreeSet<_> = l
                .entries
                .values()
                .flat_map(|e| e.modes())
                .collect();
            assert_eq!(modes.len(), (r as usize) * (r as usize - 1) / 2);
        }
    }

    #[test]
    fn d3_level3_matches_spinor_degenerate() {
        let ctx = standard_context(3);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let printed = d3_level3(&ctx, &z);
        let renamed = printed.rename_modes(&d3_level3_dictionary(Register::None));
        let general = spinor_degenerate(&ctx, 3, Register::None, &z);
        assert_eq!(renamed, general);
    }

    #[test]
    fn d3_level2_matches_fund_degenerate() {
        let ctx = standard_context(3);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        let printed = d3_level2(&ctx, &z);
        let renamed = printed.rename_modes(&d3_level2_dictionary(Register::None));
        let general = fund_degenerate(&ctx, 3, Register::None, &z);
        assert_eq!(renamed, general);
    }

    #[test]
    fn factor_consistency() {
        for r in 2..=4u8 {
            let ctx = standard_context(r);
            let z = MultiPoly::var(&ctx, std_vars::Z);
            let s = MultiPoly::var(&ctx, std_vars::S);
            assert_eq!(
                spinor_degenerate(&ctx, r, Register::None, &z),
                spinor_degenerate_factors(&ctx, r, Register::None, &z),
                "spinor rank {r}"
            );
            assert_eq!(
                fund_degenerate(&ctx, r, Register::None, &z),
                fund_degenerate_factors(&ctx, r, Register::None, &z),
                "fund rank {r}"
            );
            assert_eq!(
                spinor_full(&ctx, r, Register::None, &z, &s),
                spinor_full_factors(&ctx, r, Register::None, &z, &s),
                "spinor-full rank {r}"
            );
            if r >= 3 {
                assert_eq!(
                    quad_with_spinor(&ctx, r, Register::None, &z, &s),
                    quad_with_spinor_factors(&ctx, r, Register::None, &z, &s),
                    "quad rank {r}"
                );
            }
        }
    }

    #[test]
    fn block_symmetries() {
        // Abar_(-i,j) = -Abar_(-j,i) and A_(i,-j): entries match the pairing
        let ctx = standard_context(4);
        let amode = |i: u8, j: u8| spinor_mode(Register::None, i, j);
        let abar = abar_block(&ctx, 4, &amode);
        let a = a_block(&ctx, 4, &amode);
        let n = 4usize;
        // Abar_(-i,j) at dense position (n-i, j-1)
        let abar_at = |i: usize, j: usize| abar[n - i][j - 1].clone();
        let a_at = |i: usize, j: usize| a[i - 1][n - j].clone();
        for i in 1..=n {
            for j in 1..=n {
                assert_eq!(abar_at(i, j), abar_at(j, i).neg());
                // defining commutator [A_(i,-j), Abar_(-k,l)] = d_ik d_jl - d_il d_kj
                for k in 1..=n {
                    for l in 1..=n {
                        let comm = a_at(i, j).commutator(&abar_at(k, l));
                        let expected = (i == k && j == l) as i64 - (i == l && k == j) as i64;
                        assert_eq!(
                            comm,
                            AlgebraElement::from_poly(MultiPoly::int(&ctx, expected)),
                            "i={i} j={j} k={k} l={l}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quad_vacuum_reduction() {
        // <0| L_0(z) |0> over the inner modes equals the fund-degenerate L(z).
        for r in 3..=4u8 {
            let ctx = standard_context(r);
            let z = MultiPoly::var(&ctx, std_vars::Z);
            let zero_s = MultiPoly::zero(&ctx);
            let quad = quad_with_spinor(&ctx, r, Register::None, &z, &zero_s);
            let inner: std::collections::BTreeSet<OscMode> =
                spinor_modes(Register::None, r - 1).into_iter().collect();
            let projected = quad.map(|e| {
                // vacuum expectation over inner modes only
                let mut out = AlgebraElement::zero(&ctx);
                for (m, c) in &e.terms {
                    if m.0.iter().all(|(mode, _, _)| !inner.contains(mode)) {
                        out = out.add(&AlgebraElement::monomial(&ctx, m.clone(), c.clone()));
                    }
                }
                out
            });
            let fund = fund_degenerate(&ctx, r, Register::None, &z);
            assert_eq!(projected, fund, "rank {r}");
        }
    }

    #[test]
    fn g_matrices_satisfy_gg_prime() {
        for r in 3..=4u8 {
            let ctx = standard_context(r);
            let id = OpMatrix::identity(&ctx, vec![r]);
            for g in [
                g_spinor(&ctx, r, Register::Two),
                g_quad(&ctx, r, Register::Two),
                g_fund(&ctx, r, Register::Two),
            ] {
                assert_eq!(g.mul(&g.prime()), id, "rank {r}");
            }
        }
    }

    #[test]
    fn g_at_zero_oscillators_is_identity() {
        // dropping all oscillator terms from G leaves the identity
        let ctx = standard_context(3);
        let g = g_spinor(&ctx, 3, Register::Two);
        let scalar = g.map(|e| AlgebraElement::from_poly(e.scalar_part()));
        assert_eq!(scalar, OpMatrix::identity(&ctx, vec![3]));
    }

    #[test]
    fn twist_d_properties() {
        // D at r=2, t=(2,3) is diag(1/3, 1/2, 2, 3); D D' = I symbolically.
        let ctx = standard_context(2);
        let d = DiagTwist::fundamental(2);
        let values = BTreeMap::from([
            (std_vars::t(1), rat(2, 1)),
            (std_vars::t(2), rat(3, 1)),
        ]);
        let m = d.eval(&ctx, &values).unwrap();
        let expect = [rat(1, 3), rat(1, 2), rat(2, 1), rat(3, 1)];
        for (p, v) in expect.iter().enumerate() {
            assert_eq!(m.get(p, p), AlgebraElement::from_rational(&ctx, v.clone()));
        }
        assert!(d.mul(&d.prime()).is_identity());
    }

    #[test]
    fn spinor_weight_map() {
        // weight of mode (1,-2) is t1 t2
        let w = weights_spinor(3, Register::None);
        let got = w.get(&spinor_mode(Register::None, 1, 2)).unwrap();
        assert_eq!(
            got,
            &TwistWeight::var(std_vars::t(1)).mul(&TwistWeight::var(std_vars::t(2)))
        );
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn lax_spec_json_round_trip() {
        let spec = LaxSpec::new(LaxFamily::SpinorDegenerate, 4).with_signs(vec![1, -1, 1, -1]);
        let json = serde_json::to_string(&spec).unwrap();
        let back: LaxSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.family, spec.family);
        assert_eq!(back.rank, 4);
        assert_eq!(back.signs, spec.signs);
        // labels round-trip too
        let spec2 = LaxSpec::new(LaxFamily::FundFull, 3)
            .with_n(ScalarLabel::symbolic())
            .with_s(ScalarLabel::value("0"));
        let json2 = serde_json::to_string(&spec2).unwrap();
        let back2: LaxSpec = serde_json::from_str(&json2).unwrap();
        assert_eq!(back2.n, spec2.n);
        assert_eq!(back2.s, spec2.s);
    }

    #[test]
    fn invalid_specs_rejected() {
        let ctx = standard_context(3);
        let z = MultiPoly::var(&ctx, std_vars::Z);
        // d3 family with wrong rank
        let bad = LaxSpec::new(LaxFamily::D3Level3, 4);
        assert!(build_lax(&ctx, &bad, &z).is_err());
        // missing n for fund-full
        let bad = LaxSpec::new(LaxFamily::FundFull, 3);
        assert!(build_lax(&ctx, &bad, &z).is_err());
        // rank 0/1
        let bad = LaxSpec::new(LaxFamily::SpinorDegenerate, 1);
        assert!(build_lax(&ctx, &bad, &z).is_err());
    }
}

//! Variable contexts for the polynomial coefficient ring.
//!
//! A context declares, up front, the ordered list of commuting variables a
//! computation may use. Introducing a variable later is an error, which keeps
//! term ordering deterministic across the whole computation. Besides ordinary
//! polynomial variables a context may carry *quadratic symbols*: formal
//! square roots `v` with a fixed rational square `v^2 = c`. They are used to
//! adjoin the imaginary unit (`i^2 = -1`) and `q2 = sqrt(2)` for the basis
//! change of the generator-map operations; all other computations stay over the
//! plain rationals.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::AlgebraError;

/// Index of a declared variable inside its [`Context`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

/// An immutable variable table shared by all values of one computation.
#[derive(Debug, PartialEq, Eq)]
pub struct Context {
    names: Vec<String>,
    /// (variable index, square) pairs for quadratic symbols.
    quadratic: Vec<(usize, BigRational)>,
}

/// Shared handle to a context.
pub type Ctx = Arc<Context>;

impl Context {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Ctx {
        Arc::new(Context {
            names: names.into_iter().map(Into::into).collect(),
            quadratic: Vec::new(),
        })
    }

    /// Declares `names` plus quadratic symbols `(name, square)`.
    pub fn with_quadratic<S: Into<String>>(names: Vec<S>, quadratic: Vec<(S, BigRational)>) -> Ctx {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut quads = Vec::new();
        for (n, sq) in quadratic {
            quads.push((names.len(), sq));
            names.push(n.into());
        }
        Arc::new(Context {
            names,
            quadratic: quads,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0]
    }

    pub fn var(&self, name: &str) -> Result<Var, AlgebraError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(Var)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    /// The square of a quadratic symbol, if `v` is one.
    pub fn square_of(&self, v: Var) -> Option<&BigRational> {
        self.quadratic
            .iter()
            .find(|(i, _)| *i == v.0)
            .map(|(_, sq)| sq)
    }

    pub fn quadratic_symbols(&self) -> &[(usize, BigRational)] {
        &self.quadratic
    }

    /// True when two handles denote the same variable table.
    pub fn same(a: &Ctx, b: &Ctx) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names.join(", "))
    }
}

/// Standard context for rank-`r` computations.
///
/// Layout: `z, x, y, u, s, n, eps, t1..tr, i, q2` with `i^2 = -1` and
/// `q2^2 = 2`. Every builder in this crate works over this context so that
/// values from different modules compose without lifting.
pub fn standard_context(rank: u8) -> Ctx {
    let mut names: Vec<String> = ["z", "x", "y", "u", "s", "n", "eps"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in 1..=rank {
        names.push(format!("t{k}"));
    }
    Context::with_quadratic(
        names,
        vec![
            ("i".to_string(), BigRational::from_integer((-1).into())),
            ("q2".to_string(), BigRational::from_integer(2.into())),
        ],
    )
}

/// Well-known variable positions inside [`standard_context`].
pub mod std_vars {
    use super::Var;

    pub const Z: Var = Var(0);
    pub const X: Var = Var(1);
    pub const Y: Var = Var(2);
    pub const U: Var = Var(3);
    pub const S: Var = Var(4);
    pub const N: Var = Var(5);
    pub const EPS: Var = Var(6);

    /// Twist variable `t_k`, `1 <= k <= r`.
    pub fn t(k: u8) -> Var {
        Var(7 + (k as usize) - 1)
    }

    /// The imaginary unit of a rank-`r` standard context.
    pub fn imag(rank: u8) -> Var {
        Var(7 + rank as usize)
    }

    /// `sqrt(2)` of a rank-`r` standard context.
    pub fn sqrt2(rank: u8) -> Var {
        Var(8 + rank as usize)
    }
}

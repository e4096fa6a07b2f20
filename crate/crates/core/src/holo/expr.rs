use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::scalar::{cast_c, is_finite_c, plog, Scalar, C};

/// Holomorphic expression over `z_1..z_n`. Literals are stored in `f64` and
/// converted to the evaluation scalar on the fly.
///
/// `Coord` indices are 0-based; the text syntax is 1-based (`z1`).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Complex<f64>),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    /// Principal logarithm.
    Plog(Box<Expr>),
    /// `sum_j z_j * conj(w_j)`, i.e. the Hermitian pairing `<z, w>`.
    Hdot(Vec<Complex<f64>>),
}

impl Expr {
    pub fn lit(c: Complex<f64>) -> Self {
        Expr::Lit(c)
    }

    pub fn real(x: f64) -> Self {
        Expr::Lit(Complex::new(x, 0.0))
    }

    /// 0-based coordinate.
    pub fn z(j: usize) -> Self {
        Expr::Coord(j)
    }

    pub fn hdot(w: Vec<Complex<f64>>) -> Self {
        Expr::Hdot(w)
    }

    pub fn pow(self, n: i32) -> Self {
        Expr::Pow(Box::new(self), n)
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn plog(self) -> Self {
        Expr::Plog(Box::new(self))
    }

    /// Largest coordinate index used (0-based), counting `hdot` vectors.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Lit(_) => None,
            Expr::Coord(j) => Some(*j),
            Expr::Hdot(w) => w.len().checked_sub(1),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Plog(a) => a.max_coord(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_coord(), b.max_coord()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Lit(_) => true,
            Expr::Coord(_) | Expr::Hdot(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Plog(a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// Collapses every constant subtree into a literal (when it evaluates to
    /// a finite value).
    pub fn folded(&self) -> Expr {
        let e = match self {
            Expr::Lit(_) | Expr::Coord(_) | Expr::Hdot(_) => return self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.folded())),
            Expr::Pow(a, n) => Expr::Pow(Box::new(a.folded()), *n),
            Expr::Exp(a) => Expr::Exp(Box::new(a.folded())),
            Expr::Plog(a) => Expr::Plog(Box::new(a.folded())),
            Expr::Add(a, b) => Expr::Add(Box::new(a.folded()), Box::new(b.folded())),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.folded()), Box::new(b.folded())),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.folded()), Box::new(b.folded())),
            Expr::Div(a, b) => Expr::Div(Box::new(a.folded()), Box::new(b.folded())),
        };
        fold_node(e)
    }

    /// Substitutes `components[j]` for every occurrence of `z_j`.
    pub fn compose(&self, components: &[Expr]) -> Expr {
        match self {
            Expr::Lit(_) => self.clone(),
            Expr::Coord(j) => components[*j].clone(),
            Expr::Hdot(w) => {
                let mut terms = components
                    .iter()
                    .zip(w)
                    .filter(|(_, wj)| !wj.is_zero())
                    .map(|(c, wj)| c.clone() * Expr::Lit(wj.conj()));
                let first = terms.next().unwrap_or(Expr::real(0.0));
                terms.fold(first, |acc, t| acc + t)
            }
            Expr::Neg(a) => Expr::Neg(Box::new(a.compose(components))),
            Expr::Pow(a, n) => Expr::Pow(Box::new(a.compose(components)), *n),
            Expr::Exp(a) => Expr::Exp(Box::new(a.compose(components))),
            Expr::Plog(a) => Expr::Plog(Box::new(a.compose(components))),
            Expr::Add(a, b) => a.compose(components) + b.compose(components),
            Expr::Sub(a, b) => a.compose(components) - b.compose(components),
            Expr::Mul(a, b) => a.compose(components) * b.compose(components),
            Expr::Div(a, b) => a.compose(components) / b.compose(components),
        }
    }

    fn singular(&self) -> Error {
        Error::Singularity { expr: self.to_string() }
    }

    /// Value and holomorphic gradient at `z` by forward propagation.
    pub fn eval_jet<T: Scalar>(&self, z: &[C<T>]) -> Result<Jet<T>> {
        let n = z.len();
        let out = match self {
            Expr::Lit(c) => Jet::constant(cast_c(*c), n),
            Expr::Coord(j) => match z.get(*j) {
                Some(v) => Jet::variable(*v, *j, n),
                None => return Err(Error::IndexOutOfRange { index: j + 1, dim: n }),
            },
            Expr::Hdot(w) => {
                if w.len() != n {
                    return Err(Error::Argument(format!(
                        "hdot vector has length {}, point has dimension {n}",
                        w.len()
                    )));
                }
                let grad: Vec<C<T>> = w.iter().map(|wj| cast_c(wj.conj())).collect();
                let value = z.iter().zip(&grad).fold(C::zero(), |s, (a, b)| s + *a * *b);
                Jet { value, grad }
            }
            Expr::Neg(a) => a.eval_jet(z)?.neg(),
            Expr::Add(a, b) => a.eval_jet(z)?.add(b.eval_jet(z)?),
            Expr::Sub(a, b) => a.eval_jet(z)?.sub(b.eval_jet(z)?),
            Expr::Mul(a, b) => a.eval_jet(z)?.mul(b.eval_jet(z)?),
            Expr::Div(a, b) => {
                let den = b.eval_jet(z)?;
                if den.value.is_zero() {
                    return Err(self.singular());
                }
                a.eval_jet(z)?.div(den)
            }
            Expr::Pow(a, k) => {
                let base = a.eval_jet(z)?;
                if *k < 0 && base.value.is_zero() {
                    return Err(self.singular());
                }
                base.powi(*k)
            }
            Expr::Exp(a) => a.eval_jet(z)?.exp(),
            Expr::Plog(a) => {
                let arg = a.eval_jet(z)?;
                if arg.value.is_zero() {
                    return Err(self.singular());
                }
                arg.plog()
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(self.singular())
        }
    }

    /// Value only.
    pub fn eval<T: Scalar>(&self, z: &[C<T>]) -> Result<C<T>> {
        let v = match self {
            Expr::Lit(c) => cast_c(*c),
            Expr::Coord(j) => match z.get(*j) {
                Some(v) => *v,
                None => return Err(Error::IndexOutOfRange { index: j + 1, dim: z.len() }),
            },
            Expr::Hdot(w) => {
                if w.len() != z.len() {
                    return Err(Error::Argument(format!(
                        "hdot vector has length {}, point has dimension {}",
                        w.len(),
                        z.len()
                    )));
                }
                z.iter().zip(w).fold(C::zero(), |s, (a, b)| s + *a * cast_c::<T>(b.conj()))
            }
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let den = b.eval(z)?;
                if den.is_zero() {
                    return Err(self.singular());
                }
                a.eval(z)? / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(z)?;
                if *k < 0 && base.is_zero() {
                    return Err(self.singular());
                }
                if *k == 0 {
                    C::one()
                } else {
                    base.powi(*k)
                }
            }
            Expr::Exp(a) => a.eval(z)?.exp(),
            Expr::Plog(a) => {
                let arg = a.eval(z)?;
                if arg.is_zero() {
                    return Err(self.singular());
                }
                plog(arg)
            }
        };
        if is_finite_c(v) {
            Ok(v)
        } else {
            Err(self.singular())
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Lit(c) if c.im == 0.0 && c.re.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn fold_node(e: Expr) -> Expr {
    if !e.is_constant() {
        return e;
    }
    match e.eval::<f64>(&[]) {
        Ok(v) => Expr::Lit(v),
        Err(_) => e,
    }
}

fn fmt_lit(c: Complex<f64>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{}i", c.im)
    } else if c.im.is_sign_negative() {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    /// Precedence-aware; re-parsing the output yields the same (folded) tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Lit(c) => fmt_lit(*c, f),
            Expr::Coord(j) => write!(f, "z{}", j + 1),
            Expr::Hdot(w) => {
                write!(f, "hdot((")?;
                for (k, c) in w.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    fmt_lit(*c, f)?;
                }
                write!(f, "))")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                child(a, 3, f)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                child(a, 1, f)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                child(b, 2, f)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                child(a, 2, f)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                child(b, 3, f)
            }
            Expr::Pow(a, n) => {
                child(a, 5, f)?;
                write!(f, "^{n}")
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Plog(a) => write!(f, "plog({a})"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $var:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$var(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

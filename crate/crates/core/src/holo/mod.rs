//! Holomorphic expressions: parsing, evaluation and exact first derivatives.

pub mod dictionary;
mod expr;
mod jet;
mod parse;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use expr::Expr;
pub use jet::Jet;
pub use parse::parse;

use crate::error::{Error, Result};
use crate::geometry::{self, fmt_point, DomainKind, DomainSpec, Point, SampleStrategy};
use crate::linalg::CMatrix;
use crate::scalar::{Scalar, C};

fn validate(e: &Expr, dim: usize) -> Result<()> {
    match e {
        Expr::Lit(_) => Ok(()),
        Expr::Coord(j) if *j < dim => Ok(()),
        Expr::Coord(j) => Err(Error::IndexOutOfRange { index: j + 1, dim }),
        Expr::Hdot(w) if w.len() == dim => Ok(()),
        Expr::Hdot(w) => Err(Error::Argument(format!(
            "hdot vector has length {}, expected {dim}",
            w.len()
        ))),
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Plog(a) => validate(a, dim),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            validate(a, dim)?;
            validate(b, dim)
        }
    }
}

/// A holomorphic function `C^dim -> C`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    expr: Expr,
    dim: usize,
}

impl ScalarMap {
    pub fn new(expr: Expr, dim: usize) -> Result<Self> {
        validate(&expr, dim)?;
        Ok(Self { expr, dim })
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        Self::new(parse(text, dim)?, dim)
    }

    pub fn constant(c: Complex<f64>, dim: usize) -> Self {
        Self { expr: Expr::Lit(c), dim }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_constant(&self) -> bool {
        self.expr.is_constant()
    }

    pub fn eval<T: Scalar>(&self, z: &[C<T>]) -> Result<C<T>> {
        self.expr.eval(z)
    }

    pub fn jet<T: Scalar>(&self, z: &[C<T>]) -> Result<Jet<T>> {
        self.expr.eval_jet(z)
    }
}

/// Value and holomorphic gradient of `f` at `z`.
pub fn eval_jet<T: Scalar>(f: &ScalarMap, z: &[C<T>]) -> Result<Jet<T>> {
    f.jet(z)
}

/// A holomorphic map of a domain into itself (checked by sampling, see
/// [`self_map_check`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SelfMap {
    components: Vec<Expr>,
    domain: DomainSpec,
}

impl SelfMap {
    pub fn new(components: Vec<Expr>, domain: DomainSpec) -> Result<Self> {
        let n = domain.dim();
        if components.len() != n {
            return Err(Error::Argument(format!(
                "self-map of a {n}-dimensional domain needs {n} components, got {}",
                components.len()
            )));
        }
        for c in &components {
            validate(c, n)?;
        }
        Ok(Self { components, domain })
    }

    pub fn parse<S: AsRef<str>>(texts: &[S], domain: DomainSpec) -> Result<Self> {
        let comps = texts
            .iter()
            .map(|t| parse(t.as_ref(), domain.dim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps, domain)
    }

    pub fn identity(domain: DomainSpec) -> Self {
        Self { components: (0..domain.dim()).map(Expr::z).collect(), domain }
    }

    pub fn constant(value: &[Complex<f64>], domain: DomainSpec) -> Result<Self> {
        Self::new(value.iter().map(|c| Expr::Lit(*c)).collect(), domain)
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn eval<T: Scalar>(&self, z: &[C<T>]) -> Result<Vec<C<T>>> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }

    /// `phi(z)` together with the Jacobian (row `k` is the gradient of `phi_k`).
    pub fn eval_with_jacobian<T: Scalar>(&self, z: &[C<T>]) -> Result<(Vec<C<T>>, CMatrix<T>)> {
        let n = z.len();
        let mut value = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for c in &self.components {
            let j = c.eval_jet(z)?;
            value.push(j.value);
            rows.push(j.grad);
        }
        Ok((value, CMatrix::from_rows(rows)))
    }
}

pub fn jacobian<T: Scalar>(phi: &SelfMap, z: &[C<T>]) -> Result<CMatrix<T>> {
    Ok(phi.eval_with_jacobian(z)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfMapReport {
    pub pass: bool,
    pub checked: usize,
    /// Largest image "radius": `1 - boundary_gap(phi(z))`.
    pub max_image_norm_proxy: f64,
    pub worst_point: Point<f64>,
    pub worst_image: Point<f64>,
    /// First sample whose image left the domain or hit a singularity.
    pub witness: Option<Point<f64>>,
    pub witness_image: Option<Point<f64>>,
    pub singular: bool,
}

impl SelfMapReport {
    pub fn into_result(self) -> Result<Self> {
        match (&self.witness, self.pass) {
            (Some(w), false) => Err(Error::NotSelfMap {
                witness: fmt_point(w),
                image: match &self.witness_image {
                    Some(p) => fmt_point(p),
                    None => "singular".into(),
                },
            }),
            _ => Ok(self),
        }
    }
}

fn image_radius(domain: &DomainSpec, w: &[Complex<f64>]) -> f64 {
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => geometry::euclid_norm(w),
        DomainKind::Polydisk => w.iter().fold(0.0, |m: f64, c| m.max(c.norm())),
    }
}

/// Evaluates `phi` on the origin plus `count` uniform and `count`
/// boundary-biased samples; passes iff every image lies in `domain`.
pub fn self_map_check(
    phi: &SelfMap,
    domain: &DomainSpec,
    count: usize,
    seed: u64,
) -> Result<SelfMapReport> {
    if phi.domain() != domain {
        return Err(Error::Argument(format!(
            "map is defined on the {} but checked against the {domain}",
            phi.domain()
        )));
    }
    let mut pts = vec![Point::origin(domain.dim())];
    pts.extend(geometry::sample(domain, SampleStrategy::Uniform, count, seed)?);
    pts.extend(geometry::sample(
        domain,
        SampleStrategy::BoundaryBiased,
        count,
        seed.wrapping_add(1),
    )?);
    let mut rep = SelfMapReport {
        pass: true,
        checked: pts.len(),
        max_image_norm_proxy: 0.0,
        worst_point: pts[0].clone(),
        worst_image: Point::origin(domain.dim()),
        witness: None,
        witness_image: None,
        singular: false,
    };
    let mut first = true;
    for z in &pts {
        let w = match phi.eval::<f64>(z) {
            Ok(w) => w,
            Err(_) => {
                rep.pass = false;
                rep.singular = true;
                if rep.witness.is_none() {
                    rep.witness = Some(z.clone());
                }
                continue;
            }
        };
        let r = image_radius(domain, &w);
        if first || r > rep.max_image_norm_proxy {
            first = false;
            rep.max_image_norm_proxy = r;
            rep.worst_point = z.clone();
            rep.worst_image = Point::new(w.clone());
        }
        if !domain.contains(&w) {
            rep.pass = false;
            if rep.witness.is_none() {
                rep.witness = Some(z.clone());
                rep.witness_image = Some(Point::new(w));
            }
        }
    }
    Ok(rep)
}

/// Convenience for tests and fixtures: `phi(z)` as a point, or `None` when
/// `z` is singular for `phi`.
pub fn image(phi: &SelfMap, z: &[Complex<f64>]) -> Option<Point<f64>> {
    phi.eval(z).ok().map(Point::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn jet_examples() {
        let f = ScalarMap::parse("z1^2", 1).unwrap();
        let j = f.jet(&[c(0.5, 0.0)]).unwrap();
        assert_eq!(j.value, c(0.25, 0.0));
        assert_eq!(j.grad, vec![c(1.0, 0.0)]);

        let g = ScalarMap::parse("plog(1 - z1)", 1).unwrap();
        let j = g.jet(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(j.value, c(0.0, 0.0));
        assert_eq!(j.grad, vec![c(-1.0, 0.0)]);
    }

    #[test]
    fn singularity_names_subexpression() {
        let f = ScalarMap::parse("1/(z1 - 0.5)", 1).unwrap();
        match f.jet(&[c(0.5, 0.0)]) {
            Err(Error::Singularity { expr }) => assert!(expr.contains("z1 - 0.5"), "{expr}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jacobians() {
        let d = DomainSpec::ball(3);
        let z = vec![c(0.1, 0.2), c(-0.3, 0.0), c(0.0, 0.4)];
        assert_eq!(jacobian(&SelfMap::identity(d), &z).unwrap(), CMatrix::identity(3));
        let phi = SelfMap::parse(&["(0.5 - z1)/2", "(0.5i - z2)/2", "(0 - z3)/2"], d).unwrap();
        let jm = jacobian(&phi, &z).unwrap();
        let want = CMatrix::identity(3).scale(c(-0.5, 0.0));
        for i in 0..3 {
            for k in 0..3 {
                assert!((jm[(i, k)] - want[(i, k)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn wrong_component_count() {
        assert!(SelfMap::parse(&["z1"], DomainSpec::ball(2)).is_err());
        assert!(SelfMap::new(vec![Expr::hdot(vec![c(1.0, 0.0)])], DomainSpec::disk()).is_ok());
        assert!(ScalarMap::new(Expr::hdot(vec![c(1.0, 0.0)]), 2).is_err());
    }

    #[test]
    fn self_map_examples() {
        let pd = DomainSpec::polydisk(2);
        let phi = SelfMap::parse(&["(1 + z1)/2", "0"], pd).unwrap();
        assert!(self_map_check(&phi, &pd, 500, 3).unwrap().pass);

        let disk = DomainSpec::disk();
        let dbl = SelfMap::parse(&["2*z1"], disk).unwrap();
        let rep = self_map_check(&dbl, &disk, 500, 3).unwrap();
        assert!(!rep.pass);
        assert!(rep.witness.as_ref().unwrap()[0].norm() > 0.5);
        assert!(matches!(rep.into_result(), Err(Error::NotSelfMap { .. })));

        let ball = DomainSpec::ball(2);
        let half = SelfMap::parse(&["(0.6 - z1)/2", "(0.8i - z2)/2"], ball).unwrap();
        assert!(self_map_check(&half, &ball, 500, 3).unwrap().pass);
    }

    #[test]
    fn map_with_interior_pole_fails_check() {
        let disk = DomainSpec::disk();
        let phi = SelfMap::parse(&["0.1/(z1 - 0.3)"], disk).unwrap();
        let rep = self_map_check(&phi, &disk, 200, 1).unwrap();
        assert!(!rep.pass);
    }
}

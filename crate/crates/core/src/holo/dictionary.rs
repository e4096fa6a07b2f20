//! Built-in Bloch test functions with known semi-norms.
//!
//! Every member carries `beta`, an upper bound for its Bloch semi-norm that is
//! attained when `beta_exact` is set. Quantities divided by `beta` are
//! therefore never overstated, which keeps every dictionary-based lower bound
//! (omega, T_phi, direct operator norm) valid.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex;

use super::expr::Expr;
use super::ScalarMap;
use crate::geometry::{euclid_norm, DomainKind, DomainSpec};

type Cx = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub name: String,
    pub expr: Expr,
    pub beta: f64,
    pub beta_exact: bool,
}

impl Member {
    fn new(name: impl Into<String>, expr: Expr, beta: f64, beta_exact: bool) -> Self {
        Self { name: name.into(), expr, beta, beta_exact }
    }

    pub fn map(&self, dim: usize) -> ScalarMap {
        ScalarMap::new(self.expr.clone(), dim).expect("dictionary members match their domain")
    }

    /// `|f(0)| + beta`.
    pub fn bloch_norm(&self, dim: usize) -> f64 {
        let f0 = self.expr.eval::<f64>(&vec![Cx::new(0.0, 0.0); dim]).map(|v| v.norm());
        f0.unwrap_or(f64::INFINITY) + self.beta
    }
}

fn re(x: f64) -> Cx {
    Cx::new(x, 0.0)
}

fn unit(n: usize, k: usize) -> Vec<Cx> {
    let mut v = vec![re(0.0); n];
    v[k] = re(1.0);
    v
}

fn hpair(a: &[Cx], b: &[Cx]) -> Cx {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn normalized(v: &[Cx]) -> Option<Vec<Cx>> {
    let r = euclid_norm(v);
    (r > 1e-300).then(|| v.iter().map(|c| c / r).collect())
}

/// `<phi_a(w), zeta>` for the ball automorphism `phi_a` exchanging `a` and 0:
/// `(<a, zeta> - <w, v>) / (1 - <w, a>)`. Semi-norm 1 for unit `zeta`.
pub fn ball_mobius(a: &[Cx], zeta: &[Cx]) -> Expr {
    let c1 = hpair(a, zeta);
    let s = (1.0 - euclid_norm(a).powi(2)).max(0.0).sqrt();
    let v: Vec<Cx> = a
        .iter()
        .zip(zeta)
        .map(|(aj, zj)| c1.conj() * aj / (1.0 + s) + zj * s)
        .collect();
    (Expr::Lit(c1) - Expr::Hdot(v)) / (Expr::real(1.0) - Expr::Hdot(a.to_vec()))
}

/// Disk automorphism `(a_k - z_k) / (1 - conj(a_k) z_k)` in coordinate `k`.
pub fn coordinate_mobius(a: Cx, k: usize) -> Expr {
    (Expr::Lit(a) - Expr::z(k)) / (Expr::real(1.0) - Expr::Lit(a.conj()) * Expr::z(k))
}

/// `artanh(<z, zeta>)` written with the principal log.
pub fn atanh_direction(zeta: &[Cx]) -> Expr {
    let h = Expr::Hdot(zeta.to_vec());
    Expr::real(0.5) * ((Expr::real(1.0) + h.clone()) / (Expr::real(1.0) - h)).plog()
}

/// `log(2 / (1 - <z, a>))`; semi-norm exactly `2r / (1 + sqrt(1 - r^2))`, `r = |a|`.
pub fn log_kernel(a: &[Cx]) -> (Expr, f64) {
    let r = euclid_norm(a);
    let e = (Expr::real(2.0) / (Expr::real(1.0) - Expr::Hdot(a.to_vec()))).plog();
    (e, 2.0 * r / (1.0 + (1.0 - r * r).sqrt()))
}

/// `log(2 / (1 - <z, a>))^2 / log(2 / (1 - r^2))`, bounded semi-norm uniformly in `a`.
pub fn squared_log_kernel(a: &[Cx]) -> (Expr, f64) {
    let r = euclid_norm(a);
    let (g, _) = log_kernel(a);
    let scale = 1.0 / (2.0 / (1.0 - r * r)).ln();
    (Expr::real(scale) * g.pow(2), 4.0 * (2.0 + PI / (2.0 * LN_2)))
}

/// `(1 - r^2) / (1 - <z, a>)`; semi-norm exactly `r`.
pub fn kernel_quotient(a: &[Cx]) -> (Expr, f64) {
    let r = euclid_norm(a);
    let e = Expr::real(1.0 - r * r) / (Expr::real(1.0) - Expr::Hdot(a.to_vec()));
    (e, r)
}

fn weighted_sum(terms: Vec<(Cx, Expr)>) -> Expr {
    let mut it = terms.into_iter().map(|(c, e)| Expr::Lit(c) * e);
    let first = it.next().expect("non-empty sum");
    it.fold(first, |acc, t| acc + t)
}

/// Fixed, point-independent members for `domain`.
pub fn standard(domain: &DomainSpec) -> Vec<Member> {
    let n = domain.dim();
    let mut out = vec![Member::new("one", Expr::real(1.0), 0.0, true)];
    for k in 0..n {
        out.push(Member::new(format!("z{}", k + 1), Expr::z(k), 1.0, true));
    }
    let diag: Vec<Cx> = vec![re(1.0 / (n as f64).sqrt()); n];
    let half: Vec<Cx> = (0..n).map(|k| if k == 0 { re(0.5) } else { re(0.0) }).collect();
    let tilted: Vec<Cx> = (0..n)
        .map(|k| Cx::new(0.6, 0.3) / (n as f64).sqrt() * if k % 2 == 0 { re(1.0) } else { Cx::new(0.0, 1.0) })
        .collect();
    let near: Vec<Cx> = (0..n).map(|k| if k == 0 { re(0.95) } else { re(0.0) }).collect();
    if n > 1 {
        out.push(Member::new("linear", Expr::Hdot(diag.clone()), 1.0, true));
    }
    out.push(Member::new("atanh_e1", atanh_direction(&unit(n, 0)), 1.0, true));
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            out.push(Member::new("mobius_half", ball_mobius(&half, &unit(n, 0)), 1.0, true));
            if n > 1 {
                out.push(Member::new("mobius_tilted", ball_mobius(&tilted, &diag), 1.0, true));
            }
        }
        DomainKind::Polydisk => {
            out.push(Member::new("mobius_half", coordinate_mobius(re(0.5), 0), 1.0, true));
            if n > 1 {
                let w = re(1.0 / (n as f64).sqrt());
                let terms = (0..n).map(|k| (w, coordinate_mobius(tilted[k], k))).collect();
                out.push(Member::new("mobius_sum", weighted_sum(terms), 1.0, true));
                let terms = (0..n).map(|k| (w, atanh_direction(&unit(n, k)))).collect();
                out.push(Member::new("atanh_sum", weighted_sum(terms), 1.0, true));
            }
        }
    }
    for (tag, a) in [("half", &half), ("near", &near), ("tilted", &tilted)] {
        // off-axis kernels reach <z, a> beyond |a| on the polydisk, so their
        // ball semi-norms do not apply there
        if tag == "tilted" && domain.kind() == DomainKind::Polydisk && n > 1 {
            continue;
        }
        let (e, b) = log_kernel(a);
        out.push(Member::new(format!("log_kernel_{tag}"), e, b, true));
        let (e, b) = kernel_quotient(a);
        out.push(Member::new(format!("kernel_quotient_{tag}"), e, b, true));
    }
    let (e, b) = squared_log_kernel(&near);
    out.push(Member::new("squared_log_kernel_near", e, b, false));
    out
}

/// Members aimed at the point `a`: Möbius-type functions vanishing at `a`
/// and artanh functions maximizing `|f(a) - f(0)|`.
///
/// With `direction = Some(y)`, adds the Möbius combination whose derivative
/// at `a` is largest along `y`; its quotient `|f'(a) y| / beta` equals the
/// Bergman length of `y` at `a`.
pub fn witnesses_at(domain: &DomainSpec, a: &[Cx], direction: Option<&[Cx]>) -> Vec<Member> {
    let n = domain.dim();
    let mut out = Vec::new();
    let r = euclid_norm(a);
    if !domain.contains(a) {
        return out;
    }
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            for k in 0..n {
                out.push(Member::new(format!("mobius_at_e{}", k + 1), ball_mobius(a, &unit(n, k)), 1.0, true));
            }
            if let Some(ah) = normalized(a) {
                if n > 1 {
                    out.push(Member::new("mobius_at_radial", ball_mobius(a, &ah), 1.0, true));
                }
                out.push(Member::new("atanh_at", atanh_direction(&ah), 1.0, true));
            }
            if let Some(y) = direction {
                // derivative of <phi_a, zeta> at a along y is -<M y, zeta> with
                // M y = (<y, a> a / (1 + s) + s y) / (1 - |a|^2)
                let s = (1.0 - r * r).sqrt();
                let ya = hpair(y, a);
                let my: Vec<Cx> = a.iter().zip(y).map(|(aj, yj)| ya * aj / (1.0 + s) + yj * s).collect();
                if let Some(zeta) = normalized(&my) {
                    out.push(Member::new("mobius_aimed", ball_mobius(a, &zeta), 1.0, true));
                }
            }
        }
        DomainKind::Polydisk => {
            for (k, ak) in a.iter().enumerate() {
                out.push(Member::new(format!("mobius_at_{}", k + 1), coordinate_mobius(*ak, k), 1.0, true));
            }
            let rot: Vec<Cx> = a
                .iter()
                .map(|c| if c.norm() > 0.0 { c / c.norm() } else { re(1.0) })
                .collect();
            for k in 0..n {
                let mut zeta = vec![re(0.0); n];
                zeta[k] = rot[k];
                out.push(Member::new(format!("atanh_at_{}", k + 1), atanh_direction(&zeta), 1.0, true));
            }
            if n > 1 {
                let w = re(1.0 / (n as f64).sqrt());
                let terms = (0..n)
                    .map(|k| {
                        let mut zeta = vec![re(0.0); n];
                        zeta[k] = rot[k];
                        (w, atanh_direction(&zeta))
                    })
                    .collect();
                out.push(Member::new("atanh_at_sum", weighted_sum(terms), 1.0, true));
            }
            if let Some(y) = direction {
                let d: Vec<Cx> = a.iter().zip(y).map(|(ak, yk)| yk / (1.0 - ak.norm_sqr())).collect();
                if let Some(dn) = normalized(&d) {
                    let terms = (0..n).map(|k| (dn[k].conj(), coordinate_mobius(a[k], k))).collect();
                    out.push(Member::new("mobius_aimed", weighted_sum(terms), 1.0, true));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_mobius_reduces_to_disk_automorphism() {
        let a = [Cx::new(0.3, 0.4)];
        let e = ball_mobius(&a, &[re(1.0)]);
        let w = [Cx::new(-0.2, 0.1)];
        let want = (a[0] - w[0]) / (1.0 - a[0].conj() * w[0]);
        assert!((e.eval(&w).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn ball_mobius_swaps_a_and_origin() {
        let a = [Cx::new(0.3, 0.1), Cx::new(-0.2, 0.5)];
        let zeta = [Cx::new(0.6, 0.0), Cx::new(0.0, 0.8)];
        let e = ball_mobius(&a, &zeta);
        assert!(e.eval(&a).unwrap().norm() < 1e-15);
        assert!((e.eval(&[re(0.0), re(0.0)]).unwrap() - hpair(&a, &zeta)).norm() < 1e-15);
    }

    #[test]
    fn members_fit_their_domain() {
        for d in [DomainSpec::disk(), DomainSpec::ball(3), DomainSpec::polydisk(2)] {
            let n = d.dim();
            for m in standard(&d) {
                m.map(n);
                assert!(m.bloch_norm(n).is_finite(), "{}", m.name);
            }
            let a: Vec<Cx> = (0..n).map(|k| Cx::new(0.2, 0.1 * k as f64)).collect();
            let y: Vec<Cx> = (0..n).map(|k| Cx::new(1.0, k as f64)).collect();
            assert!(!witnesses_at(&d, &a, Some(&y)).is_empty());
        }
    }

    #[test]
    fn log_kernel_norm_formula() {
        let (_, b) = log_kernel(&[re(0.6)]);
        // max over x in (0,1) of (1 - x^2) 0.6 / (1 - 0.6 x)
        let brute = (1..100_000)
            .map(|i| i as f64 / 100_000.0)
            .map(|x| (1.0 - x * x) * 0.6 / (1.0 - 0.6 * x))
            .fold(0.0, f64::max);
        assert!((b - brute).abs() < 1e-8);
    }
}

//! Bloch-space quantities: the invariant gradient `Q_f`, semi-norm and
//! sup-norm estimates, the point-evaluation function `omega`, and a boundary
//! decay diagnostic for the little Bloch space.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{self, euclid_norm, metric_form, DomainKind, DomainSpec};
use crate::holo::{dictionary, ScalarMap};
use crate::scalar::{Scalar, C};
use crate::suprema::{self, ShellRow, SupConfig, SupEstimate};

/// Default decay threshold at the innermost shell.
pub const TOL_DECAY: f64 = 1e-3;

/// `Q_f(z)` from the holomorphic gradient `g = (df/dz_j)` by the closed form
/// of each domain. No membership check.
pub fn q_from_gradient<T: Scalar>(domain: &DomainSpec, z: &[C<T>], g: &[C<T>]) -> T {
    match domain.kind() {
        DomainKind::Disk => (T::one() - z[0].norm_sqr()) * g[0].norm(),
        DomainKind::Ball => {
            let r2 = z.iter().fold(T::zero(), |s, c| s + c.norm_sqr());
            let g2 = g.iter().fold(T::zero(), |s, c| s + c.norm_sqr());
            let radial = z.iter().zip(g).fold(C::<T>::zero(), |s, (a, b)| s + a * b).norm_sqr();
            ((T::one() - r2) * (g2 - radial).max(T::zero())).sqrt()
        }
        DomainKind::Polydisk => z
            .iter()
            .zip(g)
            .fold(T::zero(), |s, (a, b)| {
                let t = (T::one() - a.norm_sqr()) * b.norm();
                s + t * t
            })
            .sqrt(),
    }
}

/// Generic `Q_f(z) = sqrt(g* G_z^{-1} g)` with `g = conj(grad f)`, through a
/// Cholesky solve against the metric form.
pub fn q_rayleigh<T: Scalar>(domain: &DomainSpec, z: &[C<T>], grad: &[C<T>]) -> Result<T> {
    let gram = metric_form(domain, z)?.gram;
    let g: Vec<C<T>> = grad.iter().map(|c| c.conj()).collect();
    let x = gram.hpd_solve(&g)?;
    let q = g.iter().zip(&x).fold(C::<T>::zero(), |s, (a, b)| s + a.conj() * b);
    Ok(q.re.max(T::zero()).sqrt())
}

/// `Q_f(z)`.
pub fn q_f<T: Scalar>(f: &ScalarMap, domain: &DomainSpec, z: &[C<T>]) -> Result<T> {
    domain.check(z)?;
    let j = f.jet(z)?;
    Ok(q_from_gradient(domain, z, &j.grad))
}

/// Estimate of the Bloch semi-norm `sup_z Q_f(z)`.
pub fn beta_sup(f: &ScalarMap, domain: &DomainSpec, cfg: &SupConfig) -> Result<SupEstimate> {
    let field = |z: &[Complex<f64>]| -> Result<f64> {
        let j = f.jet(z)?;
        Ok(q_from_gradient(domain, z, &j.grad))
    };
    suprema::sup_estimate(&field, domain, cfg)
}

/// `|f(0)| + beta`: the Bloch norm from a semi-norm estimate.
pub fn bloch_norm(f: &ScalarMap, beta: f64) -> Result<f64> {
    Ok(f.eval::<f64>(&vec![Complex::zero(); f.dim()])?.norm() + beta)
}

/// Estimate of `sup_z |f(z)|`; `divergent` flags shell growth.
pub fn hinf_sup(f: &ScalarMap, domain: &DomainSpec, cfg: &SupConfig) -> Result<SupEstimate> {
    let field = |z: &[Complex<f64>]| -> Result<f64> { Ok(f.eval(z)?.norm()) };
    suprema::sup_estimate(&field, domain, cfg)
}

/// `omega(z)`, or an enclosing interval where it is not known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaValue<T> {
    pub lower: T,
    pub upper: T,
    pub exact: bool,
}

/// Disk/ball: `omega = rho(z, 0)` exactly. Polydisk: upper endpoint is the
/// product-metric distance, lower endpoint the best normalized dictionary
/// member `|f(z) - f(0)| / beta_f`.
pub fn omega<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> Result<OmegaValue<T>> {
    let upper = geometry::bergman_distance_origin(domain, z)?;
    if domain.is_radial() {
        return Ok(OmegaValue { lower: upper, upper, exact: true });
    }
    let lower = omega_dictionary(domain, z).min(upper);
    Ok(OmegaValue { lower, upper, exact: false })
}

fn omega_dictionary<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> T {
    let n = domain.dim();
    let a: Vec<Complex<f64>> = z.iter().map(|c| Complex::new(c.re.as_f64(), c.im.as_f64())).collect();
    let origin = vec![C::<T>::zero(); n];
    let mut best = T::zero();
    for m in dictionary::witnesses_at(domain, &a, None).into_iter().chain(dictionary::standard(domain)) {
        if m.beta <= 0.0 {
            continue;
        }
        if let (Ok(fz), Ok(f0)) = (m.expr.eval(z), m.expr.eval(&origin)) {
            let v = (fz - f0).norm() / T::lit(m.beta);
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Upper endpoint of omega; equals omega on disk and ball.
pub fn omega_upper<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> T {
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => geometry::disk_distance(euclid_norm(z)),
        DomainKind::Polydisk => z
            .iter()
            .fold(T::zero(), |s, c| {
                let d = geometry::disk_distance(c.norm());
                s + d * d
            })
            .sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    Decays,
    Persists,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub shell_sups: Vec<ShellRow>,
    pub verdict: DecayVerdict,
}

/// Default shells for [`little_bloch_decay`]: down to `1e-8`, since on the
/// ball `Q` of a polynomial only decays like the square root of the gap.
pub fn decay_shells() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
}

/// Sup of `Q_f` over each boundary annulus (see [`SupEstimate::shell_table`]).
///
/// Decays when the innermost sup is below `tol_decay` and the last three are
/// non-increasing; persists when the innermost sup is at least `tol_decay` and
/// at least half of the sup two shells further out.
pub fn little_bloch_decay(
    f: &ScalarMap,
    domain: &DomainSpec,
    shells: &[f64],
    tol_decay: f64,
    cfg: &SupConfig,
) -> Result<DecayReport> {
    let cfg = SupConfig { shells: shells.to_vec(), ..cfg.clone() };
    let est = beta_sup(f, domain, &cfg)?;
    let sups: Vec<f64> = est.shell_table.iter().map(|r| r.sup.unwrap_or(f64::NAN)).collect();
    let k = sups.len();
    let last = sups[k - 1];
    let tail = &sups[k.saturating_sub(3)..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    let verdict = if last < tol_decay && non_increasing {
        DecayVerdict::Decays
    } else if last >= tol_decay && last >= 0.5 * tail[0] {
        DecayVerdict::Persists
    } else {
        DecayVerdict::Inconclusive
    };
    Ok(DecayReport { shell_sups: est.shell_table, verdict })
}

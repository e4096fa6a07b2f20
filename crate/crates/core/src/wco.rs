//! Weighted composition operators `W f = psi * (f o phi)`: pointwise
//! criterion fields, the Bergman constant `B_phi`, classification and norm
//! estimates on the Bloch space, and the Bloch to `H^inf` pathway.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bloch::{self, q_from_gradient, OmegaValue};
use crate::error::{Error, Result};
use crate::geometry::{self, euclid_norm, fmt_point, metric_form, DomainKind, DomainSpec, Point};
use crate::holo::dictionary::{self, Member};
use crate::holo::{ScalarMap, SelfMap};
use crate::linalg::{pencil_max_direct, pencil_max_power, CMatrix};
use crate::scalar::{Scalar, C};
use crate::suprema::{self, LimsupEstimate, LimsupVerdict, SupConfig, SupEstimate};

type Cx = Complex<f64>;

/// Dimension up to which the pencil is solved directly.
const DIRECT_PENCIL_MAX_DIM: usize = 4;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPair {
    pub psi: ScalarMap,
    pub phi: SelfMap,
    pub domain: DomainSpec,
}

impl SymbolPair {
    pub fn new(psi: ScalarMap, phi: SelfMap) -> Result<Self> {
        let domain = *phi.domain();
        if psi.dim() != domain.dim() {
            return Err(Error::Argument(format!(
                "psi has dimension {} but phi acts on the {domain}",
                psi.dim()
            )));
        }
        Ok(Self { psi, phi, domain })
    }

    pub fn parse<S: AsRef<str>>(domain: DomainSpec, psi: &str, phi: &[S]) -> Result<Self> {
        Self::new(ScalarMap::parse(psi, domain.dim())?, SelfMap::parse(phi, domain)?)
    }

    /// `psi = 1`, `phi = id`.
    pub fn identity(domain: DomainSpec) -> Self {
        Self {
            psi: ScalarMap::constant(Cx::new(1.0, 0.0), domain.dim()),
            phi: SelfMap::identity(domain),
            domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The criterion fields at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseFields<T> {
    pub abs_psi: T,
    pub q_psi: T,
    pub b_phi: T,
    /// `omega(phi(z)) Q_psi(z)`, upper omega endpoint on the polydisk.
    pub sigma: T,
    /// `|psi(z)| B_phi(z)`.
    pub tau_upper: T,
    /// `|psi(z)|` times the dictionary lower bound for `T_phi(z)`.
    pub t_lower: T,
    /// Disk: `(1-|z|^2) |psi'(z)| log(2/(1-|phi(z)|^2))`.
    pub s_disk: Option<T>,
    /// Log-weighted gradient term (equals `s_disk` on the disk).
    pub zc_log: T,
    /// Polydisk: `sum_{j,k} |d_j phi_k| (1-|z_j|^2)/(1-|phi_k|^2)`.
    pub zc_jac: Option<T>,
}

fn check_image<T: Scalar>(domain: &DomainSpec, z: &[C<T>], w: &[C<T>]) -> Result<()> {
    if domain.contains(w) {
        Ok(())
    } else {
        Err(Error::NotSelfMap { witness: fmt_point(z), image: fmt_point(w) })
    }
}

fn same_domain(phi: &SelfMap, domain: &DomainSpec) -> Result<()> {
    if phi.domain() == domain {
        Ok(())
    } else {
        Err(Error::Argument(format!("map acts on the {}, not the {domain}", phi.domain())))
    }
}

/// The pencil `(J* G_phi(z) J, G_z)`.
fn pencil<T: Scalar>(
    domain: &DomainSpec,
    z: &[C<T>],
    w: &[C<T>],
    jac: &CMatrix<T>,
) -> Result<(CMatrix<T>, CMatrix<T>)> {
    let gw = metric_form(domain, w)?.gram;
    let gz = metric_form(domain, z)?.gram;
    let a = &(&jac.adjoint() * &gw) * jac;
    Ok((a, gz))
}

/// Largest pencil eigenvalue, with its eigenvector when solved directly.
fn pencil_top<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<(T, Option<Vec<C<T>>>)> {
    if a.dim() <= DIRECT_PENCIL_MAX_DIM {
        let (lam, x) = pencil_max_direct(a, b)?;
        Ok((lam.max(T::zero()), Some(x)))
    } else {
        let lam = pencil_max_power(a, b, T::lit(POWER_TOL), POWER_MAX_ITER)?;
        Ok((lam.max(T::zero()), None))
    }
}

/// `B_phi(z)` from the generalized eigenproblem, on every domain.
pub fn b_phi_pencil<T: Scalar>(phi: &SelfMap, domain: &DomainSpec, z: &[C<T>]) -> Result<T> {
    same_domain(phi, domain)?;
    domain.check(z)?;
    let (w, jac) = phi.eval_with_jacobian(z)?;
    check_image(domain, z, &w)?;
    let (a, b) = pencil(domain, z, &w, &jac)?;
    Ok(pencil_top(&a, &b)?.0.sqrt())
}

/// Bergman constant `B_phi(z)`: the largest stretch `|J u|_{phi(z)} / |u|_z`.
/// The disk uses `(1-|z|^2)|phi'(z)| / (1-|phi(z)|^2)`; ball and polydisk
/// use the closed-form metric square roots (same value as the pencil, without
/// the loss of accuracy a Cholesky factor suffers near the boundary).
pub fn b_phi<T: Scalar>(phi: &SelfMap, domain: &DomainSpec, z: &[C<T>]) -> Result<T> {
    same_domain(phi, domain)?;
    domain.check(z)?;
    let (w, jac) = phi.eval_with_jacobian(z)?;
    check_image(domain, z, &w)?;
    b_from_jacobian(domain, z, &w, &jac)
}

fn b_from_jacobian<T: Scalar>(domain: &DomainSpec, z: &[C<T>], w: &[C<T>], jac: &CMatrix<T>) -> Result<T> {
    if domain.kind() == DomainKind::Disk {
        Ok(disk_b(z[0], w[0], jac[(0, 0)]))
    } else {
        Ok(stretch_top(domain, z, w, jac)?.0.sqrt())
    }
}

fn disk_b<T: Scalar>(z: C<T>, w: C<T>, d: C<T>) -> T {
    (T::one() - z.norm_sqr()) * d.norm() / (T::one() - w.norm_sqr())
}

/// Squared pullback ratio `|J u|^2_{phi(z)} / |u|^2_z` in a fixed direction `u`.
pub fn pullback_ratio_sq<T: Scalar>(
    phi: &SelfMap,
    domain: &DomainSpec,
    z: &[C<T>],
    u: &[C<T>],
) -> Result<T> {
    same_domain(phi, domain)?;
    domain.check(z)?;
    let (w, jac) = phi.eval_with_jacobian(z)?;
    check_image(domain, z, &w)?;
    let (a, b) = pencil(domain, z, &w, &jac)?;
    Ok(a.quad_form(u) / b.quad_form(u))
}

fn to_f64<T: Scalar>(v: &[C<T>]) -> Vec<Cx> {
    v.iter().map(|c| Cx::new(c.re.as_f64(), c.im.as_f64())).collect()
}

/// Top stretch through the metric square roots: `B^2` is the largest
/// eigenvalue of `K* K` with `K = G_w^(1/2) J G_z^(-1/2)`, and the maximizing
/// direction is `G_z^(-1/2) v` for the top eigenvector `v`.
fn stretch_top<T: Scalar>(
    domain: &DomainSpec,
    z: &[C<T>],
    w: &[C<T>],
    jac: &CMatrix<T>,
) -> Result<(T, Vec<C<T>>)> {
    let (gw_half, _) = geometry::metric_sqrt(domain, w)?;
    let (_, gz_inv_half) = geometry::metric_sqrt(domain, z)?;
    let k = &(&gw_half * jac) * &gz_inv_half;
    let (vals, vecs) = (&k.adjoint() * &k).hermitian_eigen()?;
    let top = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    let v: Vec<C<T>> = (0..vals.len()).map(|i| vecs[(i, top)]).collect();
    Ok((vals[top].max(T::zero()), gz_inv_half.mul_vec(&v)))
}

/// Dictionary lower bound for `T_phi(z)`: the best `Q_{f o phi}(z) / beta_f`
/// over Möbius-type members aimed at `phi(z)` (including the one aimed along
/// the top pencil direction) and the standard members.
pub fn t_phi_lower<T: Scalar>(phi: &SelfMap, domain: &DomainSpec, z: &[C<T>]) -> Result<T> {
    same_domain(phi, domain)?;
    domain.check(z)?;
    let (w, jac) = phi.eval_with_jacobian(z)?;
    check_image(domain, z, &w)?;
    let (_, x) = stretch_top(domain, z, &w, &jac)?;
    let y = to_f64(&jac.mul_vec(&x));
    let members = dictionary::witnesses_at(domain, &to_f64(&w), Some(&y))
        .into_iter()
        .chain(dictionary::standard(domain));
    Ok(best_pullback(members, domain, z, &w, &jac))
}

fn best_pullback<T: Scalar>(
    members: impl Iterator<Item = Member>,
    domain: &DomainSpec,
    z: &[C<T>],
    w: &[C<T>],
    jac: &CMatrix<T>,
) -> T {
    let n = z.len();
    let mut best = T::zero();
    for m in members {
        if m.beta <= 0.0 {
            continue;
        }
        let Ok(jet) = m.expr.eval_jet(w) else { continue };
        // chain rule: d_j (f o phi) = sum_k (d_k f)(phi) d_j phi_k
        let g: Vec<C<T>> = (0..n)
            .map(|j| (0..n).fold(C::<T>::zero(), |s, k| s + jet.grad[k] * jac[(k, j)]))
            .collect();
        let v = q_from_gradient(domain, z, &g) / T::lit(m.beta);
        if v > best {
            best = v;
        }
    }
    best
}

/// `1 - |w|^2` per coordinate, or for the whole vector on disk/ball.
fn log_weight<T: Scalar>(domain: &DomainSpec, w: &[C<T>]) -> T {
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            let r2 = w.iter().fold(T::zero(), |s, c| s + c.norm_sqr());
            (T::lit(2.0) / (T::one() - r2)).ln()
        }
        DomainKind::Polydisk => w
            .iter()
            .fold(T::zero(), |s, c| s + (T::lit(4.0) / (T::one() - c.norm_sqr())).ln()),
    }
}

/// `(1-|z|^2) |grad psi|` (disk/ball) or `sum_j (1-|z_j|^2) |d_j psi|` (polydisk).
fn weighted_gradient<T: Scalar>(domain: &DomainSpec, z: &[C<T>], g: &[C<T>]) -> T {
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            let r2 = z.iter().fold(T::zero(), |s, c| s + c.norm_sqr());
            (T::one() - r2) * euclid_norm(g)
        }
        DomainKind::Polydisk => z
            .iter()
            .zip(g)
            .fold(T::zero(), |s, (a, b)| s + (T::one() - a.norm_sqr()) * b.norm()),
    }
}

fn zc_jac<T: Scalar>(z: &[C<T>], w: &[C<T>], jac: &CMatrix<T>) -> T {
    let n = z.len();
    let mut s = T::zero();
    for k in 0..n {
        let wk = T::one() - w[k].norm_sqr();
        for j in 0..n {
            s += jac[(k, j)].norm() * (T::one() - z[j].norm_sqr()) / wk;
        }
    }
    s
}

/// All criterion fields at `z`.
pub fn pointwise_fields<T: Scalar>(pair: &SymbolPair, z: &[C<T>]) -> Result<PointwiseFields<T>> {
    let d = &pair.domain;
    d.check(z)?;
    let psi = pair.psi.jet(z)?;
    let (w, jac) = pair.phi.eval_with_jacobian(z)?;
    check_image(d, z, &w)?;
    let abs_psi = psi.value.norm();
    let q_psi = q_from_gradient(d, z, &psi.grad);
    let sigma = bloch::omega_upper(d, &w) * q_psi;
    let zc_log = weighted_gradient(d, z, &psi.grad) * log_weight(d, &w);
    let (b, t) = if d.kind() == DomainKind::Disk {
        let b = disk_b(z[0], w[0], jac[(0, 0)]);
        (b, b)
    } else {
        let (lam, x) = stretch_top(d, z, &w, &jac)?;
        let y = to_f64(&jac.mul_vec(&x));
        let members = dictionary::witnesses_at(d, &to_f64(&w), Some(&y))
            .into_iter()
            .chain(dictionary::standard(d));
        (lam.sqrt(), best_pullback(members, d, z, &w, &jac))
    };
    Ok(PointwiseFields {
        abs_psi,
        q_psi,
        b_phi: b,
        sigma,
        tau_upper: abs_psi * b,
        t_lower: abs_psi * t,
        s_disk: (d.kind() == DomainKind::Disk).then_some(zc_log),
        zc_log,
        zc_jac: (d.kind() == DomainKind::Polydisk).then(|| zc_jac(z, &w, &jac)),
    })
}

/// Scalar fields fed to the estimation engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Disk `s`, or the log-weighted gradient term on ball/polydisk.
    ZcLog,
    /// `|psi| B_phi`.
    TauUpper,
    /// `|psi|` times the polydisk Jacobian sum.
    PsiZcJac,
    Sigma,
    /// `|psi| omega(phi)` (upper omega endpoint on the polydisk).
    Eta,
    /// `|psi| sum_j log((1+|phi_j|)/(1-|phi_j|))`.
    EtaSum,
    /// `|psi| log(2/(1-|phi|))`.
    HinfLog,
}

impl Quantity {
    pub fn name(self, domain: &DomainSpec) -> &'static str {
        match (self, domain.kind()) {
            (Quantity::ZcLog, DomainKind::Disk) => "s_disk",
            (Quantity::ZcLog, _) => "zc_log",
            (Quantity::TauUpper, _) => "tau_upper",
            (Quantity::PsiZcJac, _) => "psi_zc_jac",
            (Quantity::Sigma, _) => "sigma",
            (Quantity::Eta, _) => "eta",
            (Quantity::EtaSum, _) => "eta_sum",
            (Quantity::HinfLog, _) => "psi_log_gap",
        }
    }
}

/// One engine field at `z`; errors mark singular points.
pub fn quantity(pair: &SymbolPair, q: Quantity, z: &[Cx]) -> Result<f64> {
    let d = &pair.domain;
    let need_psi_grad = matches!(q, Quantity::ZcLog | Quantity::Sigma);
    let (psi_val, psi_grad) = if need_psi_grad {
        let j = pair.psi.jet(z)?;
        (j.value, j.grad)
    } else {
        (pair.psi.eval(z)?, Vec::new())
    };
    let (w, jac) = if matches!(q, Quantity::TauUpper | Quantity::PsiZcJac) {
        pair.phi.eval_with_jacobian(z)?
    } else {
        (pair.phi.eval(z)?, CMatrix::zeros(0))
    };
    check_image(d, z, &w)?;
    let abs_psi = psi_val.norm();
    Ok(match q {
        Quantity::ZcLog => weighted_gradient(d, z, &psi_grad) * log_weight(d, &w),
        Quantity::Sigma => bloch::omega_upper(d, &w) * q_from_gradient(d, z, &psi_grad),
        Quantity::TauUpper => {
            if abs_psi == 0.0 {
                0.0
            } else {
                abs_psi * b_from_jacobian(d, z, &w, &jac)?
            }
        }
        Quantity::PsiZcJac => abs_psi * zc_jac(z, &w, &jac),
        Quantity::Eta => abs_psi * bloch::omega_upper(d, &w),
        Quantity::EtaSum => {
            abs_psi * w.iter().map(|c| 2.0 * geometry::disk_distance(c.norm())).sum::<f64>()
        }
        Quantity::HinfLog => {
            let r = match d.kind() {
                DomainKind::Polydisk => w.iter().fold(0.0_f64, |m, c| m.max(c.norm())),
                _ => euclid_norm(&w),
            };
            abs_psi * (2.0 / (1.0 - r)).ln()
        }
    })
}

/// `boundary_gap(phi(z))`.
pub fn image_gap(pair: &SymbolPair, z: &[Cx]) -> Result<f64> {
    let w = pair.phi.eval(z)?;
    check_image(&pair.domain, z, &w)?;
    Ok(geometry::boundary_gap_unchecked(&pair.domain, &w))
}

pub fn sup_of(pair: &SymbolPair, q: Quantity, cfg: &SupConfig) -> Result<SupEstimate> {
    let field = |z: &[Cx]| quantity(pair, q, z);
    suprema::sup_estimate(&field, &pair.domain, cfg)
}

/// Extra decades appended below `cfg.shells` for boundary limsups. Criterion
/// fields of compact pairs typically decay like the square root of the image
/// gap, which at `1e-6` still sits right at the zero tolerance.
pub const LIMSUP_EXTRA_DECADES: usize = 2;

/// `cfg.shells` followed by [`LIMSUP_EXTRA_DECADES`] further decades.
pub fn limsup_shells(cfg: &SupConfig) -> Vec<f64> {
    let mut shells = cfg.shells.clone();
    if let Some(&last) = cfg.shells.last() {
        for k in 1..=LIMSUP_EXTRA_DECADES {
            shells.push(last * 10f64.powi(-(k as i32)));
        }
    }
    shells
}

/// Boundary limsup of a criterion field as `phi(z)` approaches the boundary,
/// over [`limsup_shells`].
pub fn limsup_of(pair: &SymbolPair, q: Quantity, cfg: &SupConfig) -> Result<LimsupEstimate> {
    let field = |z: &[Cx]| quantity(pair, q, z);
    let trigger = |z: &[Cx]| image_gap(pair, z);
    let cfg = SupConfig { shells: limsup_shells(cfg), ..cfg.clone() };
    suprema::shell_limsup(&field, &trigger, &pair.domain, &cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimate {
    Sup(SupEstimate),
    Limsup(LimsupEstimate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedEstimate {
    pub name: String,
    /// Whether the verdict depends on this estimate.
    pub drives_verdict: bool,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub criteria: Vec<NamedEstimate>,
    pub witnesses: Vec<Point<f64>>,
    pub rationale: String,
}

impl Classification {
    pub fn criterion(&self, name: &str) -> Option<&Estimate> {
        self.criteria.iter().find(|c| c.name == name).map(|c| &c.estimate)
    }

    pub fn sup(&self, name: &str) -> Option<&SupEstimate> {
        match self.criterion(name)? {
            Estimate::Sup(s) => Some(s),
            Estimate::Limsup(_) => None,
        }
    }

    pub fn limsup(&self, name: &str) -> Option<&LimsupEstimate> {
        match self.criterion(name)? {
            Estimate::Limsup(l) => Some(l),
            Estimate::Sup(_) => None,
        }
    }
}

/// Criterion fields for boundedness and compactness on each domain.
fn criterion_quantities(domain: &DomainSpec) -> [Quantity; 2] {
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => [Quantity::ZcLog, Quantity::TauUpper],
        DomainKind::Polydisk => [Quantity::ZcLog, Quantity::PsiZcJac],
    }
}

fn criterion_rationale(domain: &DomainSpec) -> &'static str {
    match domain.kind() {
        DomainKind::Disk => "disk: s and tau criterion fields",
        DomainKind::Ball => "ball: log-weighted gradient of psi and |psi| B_phi",
        DomainKind::Polydisk => "polydisk: log-weighted gradient sums of psi and |psi| times the Jacobian sum",
    }
}

/// Boundedness on the Bloch space: yes iff every criterion field has a
/// finite supremum, no iff one diverges (or `psi` itself is not Bloch).
pub fn classify_bounded(pair: &SymbolPair, cfg: &SupConfig) -> Result<Classification> {
    let d = &pair.domain;
    let mut criteria = Vec::new();
    let mut witnesses = Vec::new();
    let mut verdict = Verdict::Yes;
    for q in criterion_quantities(d) {
        let est = sup_of(pair, q, cfg)?;
        verdict = combine_growth(verdict, &est);
        witnesses.push(est.witness.clone());
        criteria.push(NamedEstimate {
            name: q.name(d).into(),
            drives_verdict: true,
            estimate: Estimate::Sup(est),
        });
    }
    let beta = bloch::beta_sup(&pair.psi, d, cfg)?;
    let mut rationale = format!("{}; bounded iff all suprema are finite", criterion_rationale(d));
    if beta.divergent {
        verdict = Verdict::No;
        rationale.push_str("; psi = W(1) is not a Bloch function");
    }
    criteria.push(NamedEstimate { name: "beta_psi".into(), drives_verdict: beta.divergent, estimate: Estimate::Sup(beta) });
    Ok(Classification { verdict, criteria, witnesses, rationale })
}

fn combine_growth(v: Verdict, est: &SupEstimate) -> Verdict {
    match (v, est.divergent, est.converged) {
        (Verdict::No, _, _) | (_, true, _) => Verdict::No,
        (Verdict::Yes, _, true) => Verdict::Yes,
        _ => Verdict::Inconclusive,
    }
}

fn combine_limsup(v: Verdict, est: &LimsupEstimate) -> Verdict {
    match (v, est.verdict) {
        (Verdict::No, _) | (_, LimsupVerdict::Positive) => Verdict::No,
        (Verdict::Yes, LimsupVerdict::Zero) => Verdict::Yes,
        _ => Verdict::Inconclusive,
    }
}

/// Compactness on the Bloch space: yes iff every criterion field has zero
/// limsup as `phi(z)` approaches the boundary, no iff one stays positive.
/// `tau_upper` is always reported (it is a criterion field on disk and ball).
pub fn classify_compact(pair: &SymbolPair, cfg: &SupConfig) -> Result<Classification> {
    let d = &pair.domain;
    let mut criteria = Vec::new();
    let mut witnesses = Vec::new();
    let mut verdict = Verdict::Yes;
    let qs = criterion_quantities(d);
    for q in qs {
        let est = limsup_of(pair, q, cfg)?;
        verdict = combine_limsup(verdict, &est);
        witnesses.extend(est.witness.clone());
        criteria.push(NamedEstimate { name: q.name(d).into(), drives_verdict: true, estimate: Estimate::Limsup(est) });
    }
    if !qs.contains(&Quantity::TauUpper) {
        let est = limsup_of(pair, Quantity::TauUpper, cfg)?;
        criteria.push(NamedEstimate {
            name: Quantity::TauUpper.name(d).into(),
            drives_verdict: false,
            estimate: Estimate::Limsup(est),
        });
    }
    let rationale = format!(
        "{}; compact iff all limsups vanish as phi(z) tends to the boundary",
        criterion_rationale(d)
    );
    Ok(Classification { verdict, criteria, witnesses, rationale })
}

/// Compactness presupposes boundedness: an unbounded operator is not compact
/// and an unsettled boundedness call caps a compact verdict at inconclusive.
pub fn reconcile(bounded: Verdict, compact: Verdict) -> Verdict {
    match (bounded, compact) {
        (Verdict::No, _) => Verdict::No,
        (Verdict::Inconclusive, Verdict::Yes) => Verdict::Inconclusive,
        (_, c) => c,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormPieces {
    pub bloch_norm_psi: f64,
    pub psi_at_0: f64,
    pub omega_phi0: OmegaValue<f64>,
    pub beta_psi: SupEstimate,
    pub tau: SupEstimate,
    pub sigma: SupEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
    /// False when one of the estimates behind `upper` did not converge.
    pub reliable: bool,
    pub pieces: NormPieces,
}

/// Two-sided operator norm estimate:
/// `max(|psi|_B, |psi(0)| omega(phi(0))) <= |W| <= max(|psi|_B, |psi(0)| omega(phi(0)) + tau + sigma)`.
/// On the polydisk the lower bound uses the lower omega endpoint, the upper
/// bound the upper one.
pub fn norm_bounds(pair: &SymbolPair, cfg: &SupConfig) -> Result<NormBounds> {
    let d = &pair.domain;
    let n = d.dim();
    let origin = vec![Cx::zero(); n];
    let beta = bloch::beta_sup(&pair.psi, d, cfg)?;
    let psi0 = pair.psi.eval(&origin)?.norm();
    let bloch_norm_psi = psi0 + beta.value;
    let phi0 = pair.phi.eval(&origin)?;
    let om = bloch::omega(d, &phi0)?;
    let tau = sup_of(pair, Quantity::TauUpper, cfg)?;
    let sigma = sup_of(pair, Quantity::Sigma, cfg)?;
    let lower = bloch_norm_psi.max(psi0 * om.lower);
    let upper = bloch_norm_psi.max(psi0 * om.upper + tau.value + sigma.value).max(lower);
    let reliable = beta.converged && tau.converged && sigma.converged;
    Ok(NormBounds {
        lower,
        upper,
        reliable,
        pieces: NormPieces { bloch_norm_psi, psi_at_0: psi0, omega_phi0: om, beta_psi: beta, tau, sigma },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectNorm {
    pub value: f64,
    pub best_member: String,
    /// Members skipped because the engine failed on them.
    pub skipped: Vec<String>,
}

/// Lower bound for `|W|` from test functions:
/// `max_f (|psi(0) f(phi(0))| + beta(W f)) / |f|_B`.
pub fn direct_norm_lower(pair: &SymbolPair, members: &[Member], cfg: &SupConfig) -> Result<DirectNorm> {
    let d = &pair.domain;
    let n = d.dim();
    let origin = vec![Cx::zero(); n];
    let phi0 = pair.phi.eval(&origin)?;
    let psi0 = pair.psi.eval(&origin)?;
    let mut out = DirectNorm { value: 0.0, best_member: String::new(), skipped: Vec::new() };
    for m in members {
        let norm_f = m.bloch_norm(n);
        if !(norm_f > 0.0) || !norm_f.is_finite() {
            continue;
        }
        let wf = pair.psi.expr().clone() * m.expr.compose(pair.phi.components());
        let wf = ScalarMap::new(wf, n)?;
        let est = match bloch::beta_sup(&wf, d, cfg) {
            Ok(e) => e,
            Err(_) => {
                out.skipped.push(m.name.clone());
                continue;
            }
        };
        let head = match m.expr.eval(&phi0) {
            Ok(v) => (psi0 * v).norm(),
            Err(_) => {
                out.skipped.push(m.name.clone());
                continue;
            }
        };
        let v = (head + est.value) / norm_f;
        if v > out.value || out.best_member.is_empty() {
            out.value = v;
            out.best_member = m.name.clone();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HinfReport {
    /// `sup |psi(z)| omega(phi(z))` (upper omega endpoint on the polydisk).
    pub eta: SupEstimate,
    /// Polydisk only: `sup |psi| sum_j log((1+|phi_j|)/(1-|phi_j|))`, the
    /// quantity the polydisk boundedness call is made on.
    pub eta_sum: Option<SupEstimate>,
    pub psi_sup: SupEstimate,
    pub bounded: Verdict,
    /// `max(sup |psi|, eta)`; only where omega is exact (disk, ball) and
    /// the operator is bounded.
    pub norm: Option<f64>,
    pub compact: Verdict,
    pub compact_criterion: LimsupEstimate,
}

/// The operator into `H^inf`: bounded iff `psi` and `eta` are bounded, with
/// norm `max(sup |psi|, eta)`; compact iff the domain's limit criterion
/// vanishes at the boundary.
pub fn hinf_target_report(pair: &SymbolPair, cfg: &SupConfig) -> Result<HinfReport> {
    let d = &pair.domain;
    let psi_sup = bloch::hinf_sup(&pair.psi, d, cfg)?;
    let eta = sup_of(pair, Quantity::Eta, cfg)?;
    let eta_sum = match d.kind() {
        DomainKind::Polydisk => Some(sup_of(pair, Quantity::EtaSum, cfg)?),
        _ => None,
    };
    let decisive = eta_sum.as_ref().unwrap_or(&eta);
    let bounded = combine_growth(combine_growth(Verdict::Yes, &psi_sup), decisive);
    let norm = (bounded == Verdict::Yes && d.is_radial()).then(|| psi_sup.value.max(eta.value));
    let q = match d.kind() {
        DomainKind::Polydisk => Quantity::EtaSum,
        _ => Quantity::HinfLog,
    };
    let compact_criterion = limsup_of(pair, q, cfg)?;
    let compact = reconcile(bounded, combine_limsup(Verdict::Yes, &compact_criterion));
    Ok(HinfReport { eta, eta_sum, psi_sup, bounded, norm, compact, compact_criterion })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn b_phi_trivial_cases() {
        let disk = DomainSpec::disk();
        let id = SelfMap::identity(disk);
        for z in [c(0.0, 0.0), c(0.3, -0.7), c(0.999, 0.0)] {
            assert!((b_phi(&id, &disk, &[z]).unwrap() - 1.0_f64).abs() < 1e-12);
        }
        let ball = DomainSpec::ball(3);
        let k = SelfMap::constant(&[c(0.1, 0.0), c(0.0, 0.2), c(0.3, 0.0)], ball).unwrap();
        assert_eq!(b_phi(&k, &ball, &[c(0.5, 0.0), c(0.0, 0.0), c(0.1, 0.1)]).unwrap(), 0.0);
    }

    #[test]
    fn b_phi_pencil_matches_disk_formula() {
        let disk = DomainSpec::disk();
        let phi = SelfMap::parse(&["(0.3 - z1)/(1 - 0.3*z1) * z1"], disk).unwrap();
        for z in [c(0.2, 0.1), c(-0.6, 0.5), c(0.9, 0.0)] {
            let a: f64 = b_phi(&phi, &disk, &[z]).unwrap();
            let b: f64 = b_phi_pencil(&phi, &disk, &[z]).unwrap();
            assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn ball_example_ratio_does_not_vanish() {
        let ball = DomainSpec::ball(2);
        let phi = SelfMap::parse(&["(1 + z1)/2", "0"], ball).unwrap();
        let x = 1.0 - 1e-5;
        let r: f64 = pullback_ratio_sq(&phi, &ball, &[c(x, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        // closed form along the real axis: (2(1+x)/(3+x))^2
        let want = (2.0 * (1.0 + x) / (3.0 + x)).powi(2);
        assert!((r - want).abs() < 1e-9, "{r} vs {want}");
        assert!(r > 0.1);
    }

    #[test]
    fn fields_of_identity_operator() {
        for d in [DomainSpec::disk(), DomainSpec::ball(2), DomainSpec::polydisk(2)] {
            let pair = SymbolPair::identity(d);
            let z: Vec<Cx> = (0..d.dim()).map(|j| c(0.3, 0.1 * j as f64)).collect();
            let f: PointwiseFields<f64> = pointwise_fields(&pair, &z).unwrap();
            assert_eq!(f.sigma, 0.0);
            assert_eq!(f.zc_log, 0.0);
            assert!((f.tau_upper - 1.0).abs() < 1e-12);
            assert!(f.t_lower <= f.tau_upper + 1e-9);
            assert!(f.t_lower > 0.99, "{d}: {}", f.t_lower);
        }
    }

    #[test]
    fn t_lower_is_exact_on_disk() {
        let disk = DomainSpec::disk();
        let phi = SelfMap::parse(&["0.5*z1^2 + 0.2i"], disk).unwrap();
        for z in [c(0.2, 0.1), c(-0.6, 0.5), c(0.95, 0.0)] {
            let b: f64 = b_phi(&phi, &disk, &[z]).unwrap();
            let t: f64 = t_phi_lower(&phi, &disk, &[z]).unwrap();
            assert!((b - t).abs() < 1e-9, "{b} vs {t}");
        }
    }

    #[test]
    fn t_lower_reaches_b_on_ball_and_polydisk() {
        for d in [DomainSpec::ball(2), DomainSpec::polydisk(2)] {
            let phi = SelfMap::parse(&["0.5*z1 + 0.3*z2^2", "0.4*z1*z2 - 0.2"], d).unwrap();
            let z = [c(0.3, 0.2), c(-0.1, 0.4)];
            let b: f64 = b_phi(&phi, &d, &z).unwrap();
            let t: f64 = t_phi_lower(&phi, &d, &z).unwrap();
            assert!(t <= b + 1e-9 && t >= b - 1e-9, "{d}: {t} vs {b}");
        }
    }

    #[test]
    fn reconcile_rules() {
        assert_eq!(reconcile(Verdict::No, Verdict::Yes), Verdict::No);
        assert_eq!(reconcile(Verdict::Inconclusive, Verdict::Yes), Verdict::Inconclusive);
        assert_eq!(reconcile(Verdict::Yes, Verdict::No), Verdict::No);
    }
}

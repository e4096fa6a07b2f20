//! Bergman geometry of the unit disk, ball and polydisk.
//!
//! Metric forms are normalized so that `G_0 = I` on every domain. With that
//! normalization the ball form reproduces the Zhu formula for `Q_f` and the
//! polydisk form is the product of Poincare factors.

use std::fmt;
use std::ops::Deref;

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Scalar, C};

/// Points closer than this to the boundary are rejected.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Disk,
    Ball,
    Polydisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct DomainSpec {
    kind: DomainKind,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawDomain {
    kind: DomainKind,
    #[serde(default = "one")]
    dim: usize,
}

fn one() -> usize {
    1
}

impl TryFrom<RawDomain> for DomainSpec {
    type Error = Error;
    fn try_from(r: RawDomain) -> Result<Self> {
        DomainSpec::new(r.kind, r.dim)
    }
}

impl From<DomainSpec> for RawDomain {
    fn from(d: DomainSpec) -> Self {
        RawDomain { kind: d.kind, dim: d.dim }
    }
}

impl DomainSpec {
    pub fn new(kind: DomainKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        if kind == DomainKind::Disk && dim != 1 {
            return Err(Error::InvalidDomain(format!("the disk has dimension 1, got {dim}")));
        }
        Ok(Self { kind, dim })
    }

    pub fn disk() -> Self {
        Self { kind: DomainKind::Disk, dim: 1 }
    }

    /// Panics on `dim == 0`.
    pub fn ball(dim: usize) -> Self {
        Self::new(DomainKind::Ball, dim).expect("ball dimension >= 1")
    }

    /// Panics on `dim == 0`.
    pub fn polydisk(dim: usize) -> Self {
        Self::new(DomainKind::Polydisk, dim).expect("polydisk dimension >= 1")
    }

    #[inline]
    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Disk and ball share all radial formulas.
    #[inline]
    pub fn is_radial(&self) -> bool {
        self.kind != DomainKind::Polydisk
    }

    pub fn contains<T: Scalar>(&self, z: &[C<T>]) -> bool {
        if z.len() != self.dim || z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return false;
        }
        let tol = T::lit(MEMBERSHIP_TOL);
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => euclid_norm(z) < T::one() - tol,
            DomainKind::Polydisk => z.iter().all(|c| c.norm() < T::one() - tol),
        }
    }

    pub fn check<T: Scalar>(&self, z: &[C<T>]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::Argument(format!(
                "point has {} coordinates, domain dimension is {}",
                z.len(),
                self.dim
            )));
        }
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { domain: self.to_string(), point: fmt_point(z) })
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DomainKind::Disk => write!(f, "unit disk"),
            DomainKind::Ball => write!(f, "unit ball B_{}", self.dim),
            DomainKind::Polydisk => write!(f, "unit polydisk D^{}", self.dim),
        }
    }
}

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T> {
    pub coords: Vec<Complex<T>>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<Complex<T>>) -> Self {
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: vec![Complex::zero(); dim] }
    }

    /// Point with real coordinates.
    pub fn real(xs: &[T]) -> Self {
        Self { coords: xs.iter().map(|&x| Complex::new(x, T::zero())).collect() }
    }

    pub fn cast<U: Scalar>(&self) -> Point<U> {
        Point {
            coords: self
                .coords
                .iter()
                .map(|c| Complex::new(U::lit(c.re.as_f64()), U::lit(c.im.as_f64())))
                .collect(),
        }
    }
}

impl<T> Deref for Point<T> {
    type Target = [Complex<T>];
    fn deref(&self) -> &[Complex<T>] {
        &self.coords
    }
}

impl<T: Scalar> From<Vec<Complex<T>>> for Point<T> {
    fn from(coords: Vec<Complex<T>>) -> Self {
        Self { coords }
    }
}

pub(crate) fn fmt_point<T: Scalar>(z: &[C<T>]) -> String {
    let parts: Vec<String> = z
        .iter()
        .map(|c| format!("{:.8e}{:+.8e}i", c.re.as_f64(), c.im.as_f64()))
        .collect();
    format!("({})", parts.join(", "))
}

#[inline]
pub fn euclid_norm<T: Scalar>(z: &[C<T>]) -> T {
    z.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt()
}

/// Hermitian form `G_z` with `H_z(u, u) = u* G_z u`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricForm<T> {
    pub gram: CMatrix<T>,
}

impl<T: Scalar> MetricForm<T> {
    /// `H_z(u, u)^(1/2)`.
    pub fn length(&self, u: &[C<T>]) -> T {
        self.gram.quad_form(u).max(T::zero()).sqrt()
    }
}

pub fn metric_form<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> Result<MetricForm<T>> {
    domain.check(z)?;
    let n = domain.dim();
    let gram = match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            let r2 = z.iter().fold(T::zero(), |s, c| s + c.norm_sqr());
            let w = T::one() - r2;
            let inv = T::one() / (w * w);
            let mut g = CMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let mut e = z[i] * z[j].conj();
                    if i == j {
                        e += Complex::new(w, T::zero());
                    }
                    g[(i, j)] = e * inv;
                }
            }
            g
        }
        DomainKind::Polydisk => {
            let d: Vec<C<T>> = z
                .iter()
                .map(|c| {
                    let w = T::one() - c.norm_sqr();
                    Complex::new(T::one() / (w * w), T::zero())
                })
                .collect();
            CMatrix::from_diag(&d)
        }
    };
    Ok(MetricForm { gram })
}

/// `G_z^(1/2)` and `G_z^(-1/2)` in closed form. On the ball, with
/// `s = 1 - |z|^2`, `G_z^(1/2) = (sqrt(s) I + z z*/(1 + sqrt(s))) / s` and
/// `G_z^(-1/2) = sqrt(s) (I - z z*/(1 + sqrt(s)))`; neither needs a
/// factorization, so both stay accurate close to the boundary.
pub fn metric_sqrt<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> Result<(CMatrix<T>, CMatrix<T>)> {
    domain.check(z)?;
    let n = domain.dim();
    Ok(match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            let s = T::one() - z.iter().fold(T::zero(), |a, c| a + c.norm_sqr());
            let rs = s.sqrt();
            let k = T::one() / (T::one() + rs);
            let mut half = CMatrix::zeros(n);
            let mut inv = CMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let zz = z[i] * z[j].conj() * k;
                    let id = if i == j { T::one() } else { T::zero() };
                    half[(i, j)] = (zz + Complex::new(rs * id, T::zero())) / s;
                    inv[(i, j)] = (Complex::new(id, T::zero()) - zz) * rs;
                }
            }
            (half, inv)
        }
        DomainKind::Polydisk => {
            let s: Vec<T> = z.iter().map(|c| T::one() - c.norm_sqr()).collect();
            let half: Vec<C<T>> = s.iter().map(|&v| Complex::new(T::one() / v, T::zero())).collect();
            let inv: Vec<C<T>> = s.iter().map(|&v| Complex::new(v, T::zero())).collect();
            (CMatrix::from_diag(&half), CMatrix::from_diag(&inv))
        }
    })
}

/// `artanh(r) = 1/2 log((1+r)/(1-r))`, the disk distance from 0 to radius `r`.
#[inline]
pub fn disk_distance<T: Scalar>(r: T) -> T {
    T::lit(0.5) * (r.ln_1p() - (-r).ln_1p())
}

/// Bergman distance from the origin. Exact on disk and ball; on the polydisk
/// the product-metric distance `(sum_j artanh(|z_j|)^2)^(1/2)`.
pub fn bergman_distance_origin<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> Result<T> {
    domain.check(z)?;
    Ok(match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => disk_distance(euclid_norm(z)),
        DomainKind::Polydisk => z
            .iter()
            .fold(T::zero(), |s, c| {
                let d = disk_distance(c.norm());
                s + d * d
            })
            .sqrt(),
    })
}

/// Ball/disk: `1 - |z|`; polydisk: `min_j (1 - |z_j|)`.
pub fn boundary_gap<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> Result<T> {
    domain.check(z)?;
    Ok(boundary_gap_unchecked(domain, z))
}

#[inline]
pub(crate) fn boundary_gap_unchecked<T: Scalar>(domain: &DomainSpec, z: &[C<T>]) -> T {
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => T::one() - euclid_norm(z),
        DomainKind::Polydisk => z.iter().fold(T::one(), |m, c| m.min(T::one() - c.norm())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStrategy {
    Uniform,
    /// Boundary gap log-uniform on `[1e-9, 1]`.
    BoundaryBiased,
    /// Boundary gap log-uniform on `[delta / 100, delta)`.
    Shell(f64),
}

pub(crate) const BIASED_MIN_GAP: f64 = 1e-9;
pub(crate) const SHELL_MIN_GAP: f64 = 1e-11;

/// Deterministic sample of `count` points for a fixed `seed`.
pub fn sample(
    domain: &DomainSpec,
    strategy: SampleStrategy,
    count: usize,
    seed: u64,
) -> Result<Vec<Point<f64>>> {
    if count == 0 {
        return Err(Error::Argument("sample count must be at least 1".into()));
    }
    if let SampleStrategy::Shell(d) = strategy {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Argument(format!("shell width must lie in (0, 1), got {d}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| draw(domain, strategy, &mut rng)).collect())
}

pub(crate) fn draw<R: Rng>(domain: &DomainSpec, strategy: SampleStrategy, rng: &mut R) -> Point<f64> {
    match strategy {
        SampleStrategy::Uniform => draw_uniform(domain, rng),
        SampleStrategy::BoundaryBiased => {
            let gap = log_uniform(rng, BIASED_MIN_GAP, 1.0);
            draw_with_gap(domain, gap, rng)
        }
        SampleStrategy::Shell(delta) => {
            let gap = log_uniform(rng, (delta * 1e-2).max(SHELL_MIN_GAP), delta);
            draw_with_gap(domain, gap, rng)
        }
    }
}

/// Log-uniform on `[lo, hi)`.
pub(crate) fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    let u: f64 = rng.gen();
    (a + u * (b - a)).exp().min(hi)
}

pub(crate) fn unit_direction<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex<f64>> {
    loop {
        let v: Vec<Complex<f64>> = (0..n)
            .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let r = euclid_norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

fn draw_uniform<R: Rng>(domain: &DomainSpec, rng: &mut R) -> Point<f64> {
    let n = domain.dim();
    loop {
        let p = match domain.kind() {
            DomainKind::Disk | DomainKind::Ball => {
                let u: f64 = rng.gen();
                let r = u.powf(1.0 / (2.0 * n as f64));
                unit_direction(n, rng).into_iter().map(|c| c * r).collect()
            }
            DomainKind::Polydisk => (0..n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                    Complex::from_polar(u.sqrt(), t)
                })
                .collect(),
        };
        let p = Point::new(p);
        if domain.contains(&p) {
            return p;
        }
    }
}

/// Random point whose boundary gap equals `gap`.
pub(crate) fn draw_with_gap<R: Rng>(domain: &DomainSpec, gap: f64, rng: &mut R) -> Point<f64> {
    let n = domain.dim();
    let radius = 1.0 - gap;
    match domain.kind() {
        DomainKind::Disk | DomainKind::Ball => {
            Point::new(unit_direction(n, rng).into_iter().map(|c| c * radius).collect())
        }
        DomainKind::Polydisk => {
            let pinned = rng.gen_range(0..n);
            Point::new(
                (0..n)
                    .map(|j| {
                        let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                        let r = if j == pinned { radius } else { radius * rng.gen::<f64>().sqrt() };
                        Complex::from_polar(r, t)
                    })
                    .collect(),
            )
        }
    }
}

//! Seeded supremum and boundary-limsup estimation over a domain.
//!
//! Estimates are lower bounds: every reported value is a field value at the
//! reported witness. Sampling is sequential and seeded; evaluation fans out
//! with rayon and is reduced in sample order, so results do not depend on the
//! thread count.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    boundary_gap_unchecked, draw, draw_with_gap, euclid_norm, log_uniform, DomainKind, DomainSpec,
    Point, SampleStrategy,
};

type Cx = Complex<f64>;

/// A real field on the domain. Errors mark singular points, which are
/// skipped and counted.
pub type Field<'a> = dyn Fn(&[Cx]) -> Result<f64> + Sync + 'a;

/// Innermost limsup shell below this counts as zero.
pub const LIMSUP_ZERO_TOL: f64 = 1e-3;
/// Innermost limsup shell above this counts as positive.
pub const LIMSUP_POSITIVE: f64 = 0.1;
/// Points wanted per limsup shell.
pub const LIMSUP_SHELL_POINTS: usize = 200;
const MAX_SINGULAR_FRACTION: f64 = 0.01;
const MIN_LOG_GAP: f64 = -11.0;
const GOLDEN_STEPS: usize = 12;
const STALL_SWEEPS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupConfig {
    pub seed: u64,
    pub n_uniform: usize,
    pub n_boundary: usize,
    /// Strictly decreasing boundary gaps in `(0, 1)`.
    pub shells: Vec<f64>,
    pub refine_top_k: usize,
    /// Coordinate sweeps per refinement.
    pub refine_iters: usize,
    pub tol: f64,
}

impl Default for SupConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_uniform: 20_000,
            n_boundary: 20_000,
            shells: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            refine_top_k: 16,
            refine_iters: 60,
            tol: 1e-6,
        }
    }
}

impl SupConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_uniform == 0 || self.n_boundary == 0 {
            return Err(Error::Argument("sample counts must be at least 1".into()));
        }
        if self.shells.is_empty() {
            return Err(Error::Argument("at least one shell is required".into()));
        }
        if self.shells.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return Err(Error::Argument("shell widths must lie in (0, 1)".into()));
        }
        if self.shells.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Argument("shells must be strictly decreasing".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Argument("tol must be positive".into()));
        }
        Ok(())
    }

    fn shell_samples(&self) -> usize {
        (self.n_boundary / 10).max(LIMSUP_SHELL_POINTS)
    }

    /// Annulus `[lo, hi)` of boundary gaps for shell `i`.
    fn annulus(&self, i: usize) -> (f64, f64) {
        let hi = self.shells[i];
        let lo = self.shells.get(i + 1).copied().unwrap_or(hi / 10.0);
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellRow {
    pub delta: f64,
    /// `None` when the shell holds no evaluable point.
    pub sup: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    pub witness: Point<f64>,
    /// Sup over each annulus `shells[i+1] <= gap < shells[i]` (the last one
    /// down to a tenth of its width).
    pub shell_table: Vec<ShellRow>,
    /// Least-squares slope of the shell sups against `log10(1/delta)`.
    pub slope: f64,
    pub converged: bool,
    pub divergent: bool,
    pub evaluations: usize,
    pub singular: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimsupVerdict {
    Zero,
    Positive,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupEstimate {
    /// Sup over `{trigger < delta}` for each shell.
    pub shell_table: Vec<ShellRow>,
    pub slope: f64,
    pub verdict: LimsupVerdict,
    pub note: Option<String>,
    pub witness: Option<Point<f64>>,
}

impl LimsupEstimate {
    /// Sup of the innermost non-empty shell.
    pub fn innermost(&self) -> Option<f64> {
        self.shell_table.last().and_then(|r| r.sup)
    }
}

/// Finiteness call from shell sups (see [`sup_estimate`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Finite,
    Divergent,
    Inconclusive,
}

/// Regression of shell sups against `log10(1/delta)`: finite when the slope
/// is below `0.02 * (max sup + 1)`, divergent above five times that.
pub fn classify_growth(table: &[ShellRow]) -> (f64, Growth) {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter_map(|r| r.sup.map(|s| ((1.0 / r.delta).log10(), s)))
        .collect();
    if pts.iter().any(|(_, s)| !s.is_finite()) {
        return (f64::INFINITY, Growth::Divergent);
    }
    if pts.len() < 3 {
        return (0.0, Growth::Inconclusive);
    }
    let slope = ls_slope(&pts);
    let top = pts.iter().fold(0.0_f64, |m, p| m.max(p.1));
    let thr = 0.02 * (top + 1.0);
    let g = if slope < thr {
        Growth::Finite
    } else if slope > 5.0 * thr {
        Growth::Divergent
    } else {
        Growth::Inconclusive
    };
    (slope, g)
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Boundary-adapted coordinates used by the local refiner.
///
/// Ball/disk: `(s, v)` with `z = (1 - 10^s) v / |v|`, `v` in `R^(2n)`.
/// Polydisk: `(s_j, theta_j)` with `z_j = (1 - 10^(s_j)) e^(i theta_j)`.
/// Keeping `s >= -11` keeps every chart point strictly interior.
struct Chart {
    kind: DomainKind,
    n: usize,
}

impl Chart {
    fn new(domain: &DomainSpec) -> Self {
        Self { kind: domain.kind(), n: domain.dim() }
    }

    fn log_gap(g: f64) -> f64 {
        g.max(1e-300).log10().clamp(MIN_LOG_GAP, 0.0)
    }

    fn params(&self, z: &[Cx]) -> Vec<f64> {
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => {
                let r = euclid_norm(z);
                let mut p = vec![Self::log_gap(1.0 - r)];
                if r > 0.0 {
                    p.extend(z.iter().flat_map(|c| [c.re / r, c.im / r]));
                } else {
                    p.extend((0..2 * self.n).map(|i| if i == 0 { 1.0 } else { 0.0 }));
                }
                p
            }
            DomainKind::Polydisk => z
                .iter()
                .flat_map(|c| [Self::log_gap(1.0 - c.norm()), c.im.atan2(c.re)])
                .collect(),
        }
    }

    fn point(&self, p: &[f64]) -> Option<Vec<Cx>> {
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => {
                let r = 1.0 - 10f64.powf(p[0]);
                let v = &p[1..];
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(norm > 0.0) || !norm.is_finite() {
                    return None;
                }
                Some((0..self.n).map(|j| Cx::new(v[2 * j], v[2 * j + 1]) * (r / norm)).collect())
            }
            DomainKind::Polydisk => Some(
                (0..self.n)
                    .map(|j| Cx::from_polar(1.0 - 10f64.powf(p[2 * j]), p[2 * j + 1]))
                    .collect(),
            ),
        }
    }

    fn is_log_gap(&self, i: usize) -> bool {
        match self.kind {
            DomainKind::Disk | DomainKind::Ball => i == 0,
            DomainKind::Polydisk => i.is_multiple_of(2),
        }
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        if self.is_log_gap(i) {
            (MIN_LOG_GAP, 0.0)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    }

    /// Initial bracket half-widths.
    fn steps(&self, p: &[f64]) -> Vec<f64> {
        (0..p.len()).map(|i| if self.is_log_gap(i) { 0.5 } else { 0.3 }).collect()
    }

    /// Gap-scaled random perturbation of `z`.
    fn jitter<R: Rng>(&self, z: &[Cx], rng: &mut R) -> Option<Vec<Cx>> {
        let mut p = self.params(z);
        let gap_scale = match self.kind {
            DomainKind::Disk | DomainKind::Ball => 10f64.powf(p[0]),
            DomainKind::Polydisk => 1.0,
        };
        for i in 0..p.len() {
            let e: f64 = rng.sample(StandardNormal);
            if self.is_log_gap(i) {
                p[i] = (p[i] + 0.05 * e).clamp(MIN_LOG_GAP, 0.0);
            } else {
                let scale = match self.kind {
                    DomainKind::Polydisk => 10f64.powf(p[i - 1]),
                    _ => gap_scale,
                };
                p[i] += 0.1 * scale * e;
            }
        }
        self.point(&p)
    }
}

/// Derivative-free local maximization: golden-section steps along each chart
/// coordinate, adaptive brackets, improvements only. `obj` returns `-inf` at
/// infeasible or singular points.
///
/// The trajectory of the first `k` sweeps does not depend on `sweeps`, so
/// more sweeps can only raise the result.
fn refine(
    chart: &Chart,
    start: &[Cx],
    obj: &mut dyn FnMut(&[Cx]) -> f64,
    sweeps: usize,
    tol: f64,
) -> (f64, Vec<Cx>) {
    let mut p = chart.params(start);
    let mut z = match chart.point(&p) {
        Some(z) => z,
        None => return (f64::NEG_INFINITY, start.to_vec()),
    };
    let mut best = obj(&z);
    if !best.is_finite() {
        // fall back to the exact start point
        z = start.to_vec();
        best = obj(&z);
        if best == f64::NEG_INFINITY {
            return (best, z);
        }
    }
    let mut h = chart.steps(&p);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut stall = 0;
    for _ in 0..sweeps {
        let before = best;
        for i in 0..p.len() {
            let (lo, hi) = chart.bounds(i);
            let (mut a, mut b) = ((p[i] - h[i]).max(lo), (p[i] + h[i]).min(hi));
            if !(b - a > 1e-15 * (1.0 + p[i].abs())) {
                h[i] = (h[i] * 0.3).max(1e-14);
                continue;
            }
            let mut eval = |x: f64, p: &mut Vec<f64>| -> (f64, Option<Vec<Cx>>) {
                let old = p[i];
                p[i] = x;
                let out = match chart.point(p) {
                    Some(w) => {
                        let v = obj(&w);
                        (if v.is_nan() { f64::NEG_INFINITY } else { v }, Some(w))
                    }
                    None => (f64::NEG_INFINITY, None),
                };
                p[i] = old;
                out
            };
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            let (mut fc, wc) = eval(c, &mut p);
            let (mut fd, wd) = eval(d, &mut p);
            let mut cand: (f64, f64, Option<Vec<Cx>>) = (best, p[i], None);
            for (x, f, w) in [(c, fc, wc), (d, fd, wd)] {
                if f > cand.0 {
                    cand = (f, x, w);
                }
            }
            for _ in 0..GOLDEN_STEPS {
                if fc >= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    let (f, w) = eval(c, &mut p);
                    fc = f;
                    if f > cand.0 {
                        cand = (f, c, w);
                    }
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    let (f, w) = eval(d, &mut p);
                    fd = f;
                    if f > cand.0 {
                        cand = (f, d, w);
                    }
                }
            }
            let step = cand.1 - p[i];
            if let (true, Some(w)) = (cand.0 > best, cand.2) {
                best = cand.0;
                p[i] = cand.1;
                z = w;
            }
            let floor = if chart.is_log_gap(i) { 1e-6 } else { 1e-14 };
            h[i] = (2.0 * step.abs()).max(0.3 * h[i]).max(floor);
        }
        if best - before <= tol * best.abs().max(1.0) {
            stall += 1;
            if stall >= STALL_SWEEPS {
                break;
            }
        } else {
            stall = 0;
        }
    }
    (best, z)
}

fn finite_or_neg(v: Result<f64>) -> f64 {
    match v {
        Ok(x) if !x.is_nan() => x,
        _ => f64::NEG_INFINITY,
    }
}

/// The sample pool shared by both estimators: origin, uniform,
/// boundary-biased, then one block per shell annulus.
fn sample_pool(domain: &DomainSpec, cfg: &SupConfig) -> Vec<Point<f64>> {
    let mut pts = vec![Point::origin(domain.dim())];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    pts.extend((0..cfg.n_uniform).map(|_| draw(domain, SampleStrategy::Uniform, &mut rng)));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    pts.extend((0..cfg.n_boundary).map(|_| draw(domain, SampleStrategy::BoundaryBiased, &mut rng)));
    for i in 0..cfg.shells.len() {
        let (lo, hi) = cfg.annulus(i);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2 + i as u64));
        pts.extend((0..cfg.shell_samples()).map(|_| {
            let gap = log_uniform(&mut rng, lo, hi);
            draw_with_gap(domain, gap, &mut rng)
        }));
    }
    pts
}

fn check_singular(singular: usize, total: usize) -> Result<()> {
    if total > 0 && singular as f64 > MAX_SINGULAR_FRACTION * total as f64 {
        return Err(Error::Engine(format!(
            "{singular} of {total} evaluations were singular; the field has interior singularities"
        )));
    }
    Ok(())
}

/// Indices of the `k` largest finite values, ties broken by lower index.
fn top_k(values: &[f64], k: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite() && keep(i)).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Estimates `sup_z field(z)` over `domain`.
///
/// Samples, refines the best `refine_top_k` points, then builds the shell
/// table (refining a few points inside each annulus) and decides finiteness
/// with [`classify_growth`].
pub fn sup_estimate(field: &Field, domain: &DomainSpec, cfg: &SupConfig) -> Result<SupEstimate> {
    cfg.validate()?;
    let chart = Chart::new(domain);
    let pts = sample_pool(domain, cfg);
    let raw: Vec<Result<f64>> = pts.par_iter().map(|z| field(z)).collect();
    let singular = raw.iter().filter(|r| r.is_err()).count();
    check_singular(singular, pts.len())?;
    let mut values: Vec<f64> = raw.into_iter().map(finite_or_neg).collect();
    let mut points: Vec<Vec<Cx>> = pts.into_iter().map(|p| p.coords).collect();
    let mut evaluations = values.len();

    // global refinement
    let seeds = top_k(&values, cfg.refine_top_k, |_| true);
    let refined: Vec<(f64, Vec<Cx>)> = seeds
        .par_iter()
        .map(|&i| {
            let mut obj = |z: &[Cx]| finite_or_neg(field(z));
            refine(&chart, &points[i], &mut obj, cfg.refine_iters, cfg.tol)
        })
        .collect();
    for (v, z) in refined {
        values.push(v);
        points.push(z);
        evaluations += 1;
    }

    // per-annulus refinement
    let gaps: Vec<f64> = points.iter().map(|z| boundary_gap_unchecked(domain, z)).collect();
    let per_shell = (cfg.refine_top_k / 4).max(2);
    let jobs: Vec<(usize, usize)> = (0..cfg.shells.len())
        .flat_map(|s| {
            let (lo, hi) = cfg.annulus(s);
            top_k(&values, per_shell, |i| gaps[i] >= lo && gaps[i] < hi)
                .into_iter()
                .map(move |i| (s, i))
        })
        .collect();
    let shell_refined: Vec<(usize, f64, Vec<Cx>)> = jobs
        .par_iter()
        .map(|&(s, i)| {
            let (lo, hi) = cfg.annulus(s);
            let mut obj = |z: &[Cx]| {
                let g = boundary_gap_unchecked(domain, z);
                if g >= lo && g < hi {
                    finite_or_neg(field(z))
                } else {
                    f64::NEG_INFINITY
                }
            };
            let (v, z) = refine(&chart, &points[i], &mut obj, cfg.refine_iters, cfg.tol);
            (s, v, z)
        })
        .collect();
    for (_, v, z) in shell_refined {
        values.push(v);
        points.push(z);
        evaluations += 1;
    }

    let gaps: Vec<f64> = points.iter().map(|z| boundary_gap_unchecked(domain, z)).collect();
    let shell_table: Vec<ShellRow> = (0..cfg.shells.len())
        .map(|s| {
            let (lo, hi) = cfg.annulus(s);
            let mut sup: Option<f64> = None;
            let mut count = 0;
            for (v, g) in values.iter().zip(&gaps) {
                if *g >= lo && *g < hi && *v > f64::NEG_INFINITY {
                    count += 1;
                    sup = Some(sup.map_or(*v, |m: f64| m.max(*v)));
                }
            }
            ShellRow { delta: cfg.shells[s], sup, count }
        })
        .collect();

    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    if values[best] == f64::NEG_INFINITY {
        return Err(Error::Engine("no evaluable point in the domain".into()));
    }
    let (slope, growth) = classify_growth(&shell_table);
    let value = values[best];
    let divergent = growth == Growth::Divergent || value.is_infinite();
    Ok(SupEstimate {
        value,
        witness: Point::new(points.swap_remove(best)),
        shell_table,
        slope,
        converged: growth == Growth::Finite && !divergent,
        divergent,
        evaluations,
        singular,
    })
}

/// Estimates `limsup field(z)` as `trigger(z) -> 0`.
///
/// Shell `delta` is `{z : trigger(z) < delta}`. Shells are populated from the
/// shared sample pool, from trigger-descent trajectories started at the
/// lowest-trigger samples, and from gap-scaled jitter around shell members;
/// the best few members of each shell are then refined inside the shell.
pub fn shell_limsup(
    field: &Field,
    trigger: &Field,
    domain: &DomainSpec,
    cfg: &SupConfig,
) -> Result<LimsupEstimate> {
    cfg.validate()?;
    let chart = Chart::new(domain);
    let pool: Vec<Vec<Cx>> = sample_pool(domain, cfg).into_iter().map(|p| p.coords).collect();
    let trig: Vec<f64> = pool.par_iter().map(|z| finite_or_pos(trigger(z))).collect();

    // trigger descent: maximize -log10(trigger), keeping every visited point
    let neg: Vec<f64> = trig.iter().map(|t| -t).collect();
    let seeds = top_k(&neg, cfg.refine_top_k, |_| true);
    let trails: Vec<Vec<(f64, Vec<Cx>)>> = seeds
        .par_iter()
        .map(|&i| {
            let mut seen = Vec::new();
            let mut obj = |z: &[Cx]| {
                let t = finite_or_pos(trigger(z));
                if t.is_finite() {
                    seen.push((t, z.to_vec()));
                    -t.max(1e-300).log10()
                } else {
                    f64::NEG_INFINITY
                }
            };
            refine(&chart, &pool[i], &mut obj, cfg.refine_iters, cfg.tol);
            seen
        })
        .collect();
    let mut cand_t = trig;
    let mut cand_z = pool;
    for trail in trails {
        for (t, z) in trail {
            cand_t.push(t);
            cand_z.push(z);
        }
    }

    let mut rows = Vec::with_capacity(cfg.shells.len());
    let mut note = None;
    let mut witness = None;
    let mut singular = 0;
    let mut total = 0;
    for (s, &delta) in cfg.shells.iter().enumerate() {
        let mut members: Vec<Vec<Cx>> = cand_t
            .iter()
            .zip(&cand_z)
            .filter(|(t, _)| **t < delta)
            .map(|(_, z)| z.clone())
            .collect();
        if !members.is_empty() && members.len() < LIMSUP_SHELL_POINTS {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 + s as u64));
            let base = members.len();
            let budget = 50 * LIMSUP_SHELL_POINTS;
            let mut k = 0;
            while members.len() < LIMSUP_SHELL_POINTS && k < budget {
                if let Some(w) = chart.jitter(&members[k % base], &mut rng) {
                    if domain.contains(&w) && finite_or_pos(trigger(&w)) < delta {
                        members.push(w);
                    }
                }
                k += 1;
            }
        }
        if members.is_empty() {
            rows.push(ShellRow { delta, sup: None, count: 0 });
            continue;
        }
        let raw: Vec<Result<f64>> = members.par_iter().map(|z| field(z)).collect();
        total += raw.len();
        singular += raw.iter().filter(|r| r.is_err()).count();
        let values: Vec<f64> = raw.into_iter().map(finite_or_neg).collect();
        let seeds = top_k(&values, (cfg.refine_top_k / 4).max(2), |_| true);
        let refined: Vec<(f64, Vec<Cx>)> = seeds
            .par_iter()
            .map(|&i| {
                let mut obj = |z: &[Cx]| {
                    if finite_or_pos(trigger(z)) < delta {
                        finite_or_neg(field(z))
                    } else {
                        f64::NEG_INFINITY
                    }
                };
                refine(&chart, &members[i], &mut obj, cfg.refine_iters, cfg.tol)
            })
            .collect();
        let mut best: Option<(f64, Vec<Cx>)> = None;
        for (v, z) in values.iter().zip(&members).map(|(v, z)| (*v, z.clone())).chain(refined) {
            if v > f64::NEG_INFINITY && best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, z));
            }
        }
        let count = members.len();
        match best {
            Some((v, z)) => {
                rows.push(ShellRow { delta, sup: Some(v), count });
                witness = Some(Point::new(z));
            }
            None => rows.push(ShellRow { delta, sup: None, count }),
        }
    }
    check_singular(singular, total)?;

    let slope = {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.sup.map(|s| ((1.0 / r.delta).log10(), s)))
            .collect();
        if pts.len() >= 2 {
            ls_slope(&pts)
        } else {
            0.0
        }
    };
    let last = rows.last().expect("validated non-empty shells");
    let verdict = if last.count == 0 {
        note = Some("empty-shell: range bounded away from boundary".to_string());
        LimsupVerdict::Zero
    } else if last.count < LIMSUP_SHELL_POINTS {
        note = Some(format!("sparse innermost shell ({} points)", last.count));
        LimsupVerdict::Inconclusive
    } else {
        match last.sup {
            None => LimsupVerdict::Inconclusive,
            Some(v) if v > LIMSUP_POSITIVE => LimsupVerdict::Positive,
            Some(v) if v < LIMSUP_ZERO_TOL && tail_non_increasing(&rows) => LimsupVerdict::Zero,
            Some(_) => LimsupVerdict::Inconclusive,
        }
    };
    Ok(LimsupEstimate { shell_table: rows, slope, verdict, note, witness })
}

fn finite_or_pos(v: Result<f64>) -> f64 {
    match v {
        Ok(x) if !x.is_nan() => x,
        _ => f64::INFINITY,
    }
}

/// Last three shell sups non-increasing (up to rounding).
fn tail_non_increasing(rows: &[ShellRow]) -> bool {
    let tail: Vec<f64> = rows.iter().rev().take(3).filter_map(|r| r.sup).collect();
    tail.len() == rows.len().min(3) && tail.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-9) + 1e-15)
}

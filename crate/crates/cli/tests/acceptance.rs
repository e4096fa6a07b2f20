//! Acceptance criteria: one line per criterion, non-zero exit if any fails.
//!
//! Tolerances are pinned here; oracles are computed independently of the
//! code under test wherever a closed form or brute-force evaluation exists.

use std::process::Command;
use std::time::{Duration, Instant};

use bloch_wco::bloch::{self, q_from_gradient, q_rayleigh};
use bloch_wco::geometry::{self, SampleStrategy};
use bloch_wco::holo::dictionary::{self, ball_mobius};
use bloch_wco::suprema::LIMSUP_ZERO_TOL;
use bloch_wco::wco::{self, reconcile, Quantity};
use bloch_wco::{Complex, DomainSpec, Expr, ScalarMap, SelfMap, SupConfig, SymbolPair, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit_s: u64, elapsed: Duration, detail: String) -> Outcome {
    ensure(elapsed <= Duration::from_secs(limit_s), format!("{detail}; limit {limit_s} s"))
}

/// Half uniform, half boundary-biased.
fn mixed_points(d: &DomainSpec, total: usize, seed: u64) -> Vec<bloch_wco::Point> {
    let mut pts = geometry::sample(d, SampleStrategy::Uniform, total / 2, seed).unwrap();
    pts.extend(geometry::sample(d, SampleStrategy::BoundaryBiased, total - total / 2, seed + 1).unwrap());
    pts
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

// 1. Rayleigh quotient vs closed-form Q at 10^4 points per domain.
fn metric_q_consistency() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    for d in [DomainSpec::disk(), DomainSpec::ball(2), DomainSpec::ball(3), DomainSpec::polydisk(2), DomainSpec::polydisk(3)] {
        let members = dictionary::standard(&d);
        let pts = geometry::sample(&d, SampleStrategy::Uniform, 10_000, 11).unwrap();
        for (i, z) in pts.iter().enumerate() {
            let m = &members[i % members.len()];
            let Ok(jet) = m.expr.eval_jet::<f64>(z) else { continue };
            let closed = q_from_gradient(&d, z, &jet.grad);
            let ray = q_rayleigh(&d, z, &jet.grad).unwrap();
            worst = worst.max(rel_err(closed, ray));
            evaluated += 1;
        }
    }
    let el = t.elapsed();
    let detail = format!("max rel err {worst:.2e} over {evaluated} points (tol 1e-10, {:.1} s)", el.as_secs_f64());
    ensure(worst <= 1e-10, detail.clone()).and_then(|_| within(10, el, detail))
}

// 2. Disk: pencil B against (1-|z|^2)|phi'(z)| / (1-|phi(z)|^2).
fn disk_b_identity() -> Outcome {
    let t = Instant::now();
    let d = DomainSpec::disk();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let one = [c(1.0, 0.0)];
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut point = |rmax: f64| {
            let r = rmax * rng.gen::<f64>().sqrt();
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            c(r * th.cos(), r * th.sin())
        };
        let a = point(0.95);
        let b = point(0.95);
        let z = point(0.999);
        let scale = 0.5 + 0.5 * rng.gen::<f64>();
        let factors = 1 + rng.gen_range(0..2);
        let mut e = Expr::real(scale) * ball_mobius(&[a], &one);
        if factors == 2 {
            e = e * ball_mobius(&[b], &one);
        }
        let phi = SelfMap::new(vec![e.clone()], d).unwrap();
        let pencil: f64 = wco::b_phi_pencil(&phi, &d, &[z]).unwrap();
        let jet = e.eval_jet::<f64>(&[z]).unwrap();
        let closed = (1.0 - z.norm_sqr()) * jet.grad[0].norm() / (1.0 - jet.value.norm_sqr());
        worst = worst.max(rel_err(pencil, closed));
    }
    let el = t.elapsed();
    let detail = format!("max rel err {worst:.2e} over 1000 pairs (tol 1e-9, {:.2} s)", el.as_secs_f64());
    ensure(worst <= 1e-9, detail.clone()).and_then(|_| within(5, el, detail))
}

fn polydisk_pairs(n: usize) -> Vec<SymbolPair> {
    let d = DomainSpec::polydisk(n);
    let rest = |first: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = first.iter().map(|s| s.to_string()).collect();
        for k in v.len()..n {
            v.push(format!("0.5*z{}", k + 1));
        }
        v
    };
    let specs: Vec<(&str, Vec<String>)> = vec![
        ("1 - z1", rest(&["(1 + z1)/2", "0"])),
        ("plog(2/(1 - z1))", rest(&["(1 - z1)/2", "0"])),
        ("z1*z2", rest(&["z2", "z1"])),
        ("exp(z1) - z2^2", rest(&["z1*z2", "(z1 + z2)/2"])),
        ("1/(2 - z1)", rest(&["(0.5 - z1)/(1 - 0.5*z1)", "0.9*z2"])),
    ];
    specs
        .into_iter()
        .map(|(psi, phi)| SymbolPair::parse(d, psi, &phi).unwrap())
        .collect()
}

// 3. Polydisk inequalities relating distance, sigma, B and tau to the
// coordinate-wise sums.
fn polydisk_inequalities() -> Outcome {
    let t = Instant::now();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for n in [2, 3] {
        let d = DomainSpec::polydisk(n);
        let pts = mixed_points(&d, 10_000, 30 + n as u64);
        for pair in polydisk_pairs(n) {
            for z in &pts {
                let Ok(f) = wco::pointwise_fields(&pair, z) else { continue };
                let w = pair.phi.eval::<f64>(z).unwrap();
                let jet = pair.psi.jet::<f64>(z).unwrap();
                let dist_sum: f64 = z.iter().map(|c| 0.5 * ((1.0 + c.norm()) / (1.0 - c.norm())).ln()).sum();
                let grad_sum: f64 = z.iter().zip(&jet.grad).map(|(a, g)| (1.0 - a.norm_sqr()) * g.norm()).sum();
                let log_sum: f64 = w.iter().map(|c| (4.0 / (1.0 - c.norm_sqr())).ln()).sum();
                let zc = f.zc_jac.unwrap();
                let dist = geometry::bergman_distance_origin(&d, z).unwrap();
                let slacks = [
                    (dist_sum - dist) / dist_sum.max(1.0),
                    (grad_sum * log_sum - f.sigma) / (grad_sum * log_sum).max(1.0),
                    (zc - f.b_phi) / zc.max(1.0),
                    (f.abs_psi * zc - f.tau_upper) / (f.abs_psi * zc).max(1.0),
                ];
                worst = slacks.iter().fold(worst, |m, &s| m.min(s));
                count += 1;
            }
        }
    }
    let el = t.elapsed();
    let detail = format!("min slack {worst:.2e} over {count} evaluations (tol -1e-9, {:.1} s)", el.as_secs_f64());
    ensure(worst >= -1e-9, detail.clone()).and_then(|_| within(30, el, detail))
}

// 4. (1/n) S <= Q <= S with S = sum_j (1-|z_j|^2)|d_j f| on the polydisk.
fn polydisk_sandwich() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for n in [2, 3] {
        let d = DomainSpec::polydisk(n);
        let members: Vec<_> = dictionary::standard(&d).into_iter().filter(|m| m.beta > 0.0).take(5).collect();
        let pts = mixed_points(&d, 10_000, 40 + n as u64);
        for m in &members {
            for z in &pts {
                let Ok(jet) = m.expr.eval_jet::<f64>(z) else { continue };
                let s: f64 = z.iter().zip(&jet.grad).map(|(a, g)| (1.0 - a.norm_sqr()) * g.norm()).sum();
                let q = q_from_gradient(&d, z, &jet.grad);
                let scale = s.max(1e-300);
                worst = worst.min((q - s / n as f64) / scale).min((s - q) / scale);
                count += 1;
            }
        }
    }
    ensure(worst >= -1e-12, format!("min relative slack {worst:.2e} over {count} evaluations"))
}

// 5. Identity operator on every domain.
fn identity_operator(cfg: &SupConfig) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for d in [DomainSpec::disk(), DomainSpec::ball(2), DomainSpec::ball(3), DomainSpec::polydisk(2), DomainSpec::polydisk(3)] {
        let pair = SymbolPair::identity(d);
        let b = wco::classify_bounded(&pair, cfg).map_err(|e| e.to_string())?;
        let nb = wco::norm_bounds(&pair, cfg).map_err(|e| e.to_string())?;
        let cc = wco::classify_compact(&pair, cfg).map_err(|e| e.to_string())?;
        let tau = cc.limsup(Quantity::TauUpper.name(&d)).and_then(|l| l.innermost()).unwrap_or(f64::NAN);
        let compact = reconcile(b.verdict, cc.verdict);
        let this = b.verdict == Verdict::Yes
            && (nb.lower - 1.0).abs() <= 1e-6
            && (nb.upper - 1.0).abs() <= 1e-6
            && compact == Verdict::No
            && (0.99..=1.01).contains(&tau);
        ok &= this;
        lines.push(format!(
            "{d}: bounded {} norm [{:.9}, {:.9}] compact {compact} tau {tau:.6}",
            b.verdict, nb.lower, nb.upper
        ));
    }
    ensure(ok, lines.join("; "))
}

// 6. Ball, psi = 1/2 log(1 - z1), phi = (lambda - z)/2.
fn ball_log_symbol(cfg: &SupConfig) -> Outcome {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "0.5*plog(1 - hdot((1, 0)))", &["(1 - z1)/2", "(0 - z2)/2"])
        .map_err(|e| e.to_string())?;
    let b = wco::classify_bounded(&pair, cfg).map_err(|e| e.to_string())?;
    let h = bloch::hinf_sup(&pair.psi, &pair.domain, cfg).map_err(|e| e.to_string())?;
    let inner = h.shell_table.last().and_then(|r| r.sup).unwrap_or(f64::NAN);
    ensure(
        b.verdict == Verdict::Yes && h.divergent && inner >= 3.0,
        format!("bounded {}; sup |psi| divergent {} innermost {inner:.4} (min 3.0)", b.verdict, h.divergent),
    )
}

// 7. Ball, psi = 1 - z1, phi = ((1 + z1)/2, 0): compact, although phi alone
// does not give a compact composition operator.
fn ball_compact(cfg: &SupConfig) -> Outcome {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "1 - z1", &["(1 + z1)/2", "0"]).map_err(|e| e.to_string())?;
    let b = wco::classify_bounded(&pair, cfg).map_err(|e| e.to_string())?;
    let cc = wco::classify_compact(&pair, cfg).map_err(|e| e.to_string())?;
    let compact = reconcile(b.verdict, cc.verdict);
    let z = [c(1.0 - 1e-5, 0.0), c(0.0, 0.0)];
    let u = [c(1.0, 0.0), c(0.0, 0.0)];
    let ratio = wco::pullback_ratio_sq(&pair.phi, &pair.domain, &z, &u).map_err(|e| e.to_string())?.sqrt();
    let worst = cc
        .criteria
        .iter()
        .filter(|k| k.drives_verdict)
        .filter_map(|k| cc.limsup(&k.name).and_then(|l| l.innermost()))
        .fold(0.0, f64::max);
    ensure(
        compact == Verdict::Yes && ratio > 0.1,
        format!("compact {compact} (innermost {worst:.3e} < {LIMSUP_ZERO_TOL}); B ratio at 1-1e-5 is {ratio:.6} (min 0.1)"),
    )
}

// 8. Polydisk examples: bounded with a log symbol, compact with 1 - z1.
fn polydisk_examples(cfg: &SupConfig) -> Outcome {
    let d = DomainSpec::polydisk(2);
    let a = SymbolPair::parse(d, "plog(2/(1 - z1))", &["(1 - z1)/2", "0"]).map_err(|e| e.to_string())?;
    let ba = wco::classify_bounded(&a, cfg).map_err(|e| e.to_string())?;
    let b = SymbolPair::parse(d, "1 - z1", &["(1 + z1)/2", "0"]).map_err(|e| e.to_string())?;
    let bb = wco::classify_bounded(&b, cfg).map_err(|e| e.to_string())?;
    let cb = wco::classify_compact(&b, cfg).map_err(|e| e.to_string())?;
    let compact = reconcile(bb.verdict, cb.verdict);
    let beta = bb.sup("beta_psi").map(|s| s.value).unwrap_or(0.0);
    ensure(
        ba.verdict == Verdict::Yes && compact == Verdict::Yes && beta > 0.0,
        format!("(a) bounded {}; (b) compact {compact}, beta_psi {beta:.6}", ba.verdict),
    )
}

// 9. Into H^inf: norm max(1, omega) for a dilation, 1 for a constant map.
fn hinf_norms(cfg: &SupConfig) -> Outcome {
    let d = DomainSpec::ball(2);
    let dil = SymbolPair::parse(d, "1", &["0.9*z1", "0.9*z2"]).map_err(|e| e.to_string())?;
    let h = wco::hinf_target_report(&dil, cfg).map_err(|e| e.to_string())?;
    let want = 1f64.max(0.5 * 19f64.ln());
    let konst = SymbolPair::parse(d, "1", &["0", "0"]).map_err(|e| e.to_string())?;
    let k = wco::hinf_target_report(&konst, cfg).map_err(|e| e.to_string())?;
    let n1 = h.norm.unwrap_or(f64::NAN);
    let n0 = k.norm.unwrap_or(f64::NAN);
    ensure(
        h.bounded == Verdict::Yes && (n1 - want).abs() <= 1e-3 && k.bounded == Verdict::Yes && n0 == 1.0,
        format!("dilation norm {n1:.7} (want {want:.7} +- 1e-3); constant map norm {n0}"),
    )
}

// 10. Into H^inf: the multiplier z1 with phi = id is unbounded.
fn hinf_multiplier(cfg: &SupConfig) -> Outcome {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "z1", &["z1", "z2"]).map_err(|e| e.to_string())?;
    let h = wco::hinf_target_report(&pair, cfg).map_err(|e| e.to_string())?;
    ensure(
        h.eta.divergent && h.bounded == Verdict::No,
        format!("eta divergent {} (slope {:.4}), bounded {}", h.eta.divergent, h.eta.slope, h.bounded),
    )
}

struct Rational {
    text: String,
    poles: Vec<(Complex, Complex)>,
    linear: Complex,
}

impl Rational {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let k = rng.gen_range(1..=3);
        let mut poles = Vec::new();
        let mut text = String::new();
        let linear = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        text.push_str(&format!("({} + {}i)*z1", linear.re, linear.im));
        for _ in 0..k {
            let r = rng.gen_range(1.3..3.0);
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = c(r * th.cos(), r * th.sin());
            let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            text.push_str(&format!(" + ({} + {}i)/(z1 - ({} + {}i))", a.re, a.im, p.re, p.im));
            poles.push((a, p));
        }
        Self { text, poles, linear }
    }

    /// `(1 - |z|^2) |f'(z)|` from the partial fractions.
    fn q(&self, z: Complex) -> f64 {
        let d = self.poles.iter().fold(self.linear, |s, (a, p)| s - a / ((z - p) * (z - p)));
        (1.0 - z.norm_sqr()) * d.norm()
    }

    /// Max over a polar grid: `radii` uniform radii plus as many with
    /// log-uniform boundary gaps, times `angles` angles; then a local grid
    /// around the best cell.
    fn grid_max(&self, radii: usize, angles: usize) -> f64 {
        let mut rs: Vec<f64> = (0..radii).map(|i| i as f64 / radii as f64).collect();
        rs.extend((0..radii).map(|i| 1.0 - 10f64.powf(-1.0 - 8.0 * i as f64 / (radii - 1) as f64)));
        rs.sort_by(f64::total_cmp);
        let dth = std::f64::consts::TAU / angles as f64;
        let (mut best, mut bi, mut bj) = (0.0, 0, 0);
        for (i, &r) in rs.iter().enumerate() {
            for j in 0..angles {
                let v = self.q(Complex::from_polar(r, j as f64 * dth));
                if v > best {
                    (best, bi, bj) = (v, i, j);
                }
            }
        }
        let r_lo = rs[bi.saturating_sub(1)];
        let r_hi = rs[(bi + 1).min(rs.len() - 1)];
        for a in 0..=100 {
            let r = r_lo + (r_hi - r_lo) * a as f64 / 100.0;
            for b in 0..=100 {
                let th = (bj as f64 - 1.0 + 2.0 * b as f64 / 100.0) * dth;
                best = f64::max(best, self.q(Complex::from_polar(r, th)));
            }
        }
        best
    }
}

// 11. Engine sup of Q_f for random rational f on the disk vs a dense grid.
fn engine_vs_grid(cfg: &SupConfig) -> Outcome {
    let t = Instant::now();
    let d = DomainSpec::disk();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = Rational::random(&mut rng);
        let map = ScalarMap::parse(&f.text, 1).map_err(|e| format!("{}: {e}", f.text))?;
        let est = bloch::beta_sup(&map, &d, cfg).map_err(|e| e.to_string())?;
        let oracle = f.grid_max(500, 1000);
        worst = worst.max(rel_err(est.value, oracle));
    }
    let el = t.elapsed();
    let detail = format!("max rel diff {worst:.2e} over 20 fields (tol 1e-3, {:.1} s)", el.as_secs_f64());
    ensure(worst <= 1e-3, detail.clone()).and_then(|_| within(60, el, detail))
}

// 12. Two runs of the example suite print the same bytes.
fn suite_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_bloch-wco"))
            .arg("paper-suite")
            .env_remove(bloch_wco_cli::SEED_ENV)
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    let passed = a.status.success();
    ensure(
        passed && a.stdout == b.stdout && !a.stdout.is_empty(),
        format!(
            "exit {:?}, {} bytes, identical {}",
            a.status.code(),
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let cfg = SupConfig::default();
    let criteria: Vec<Criterion> = vec![
        ("metric/Q consistency", Box::new(metric_q_consistency)),
        ("disk B identity", Box::new(disk_b_identity)),
        ("polydisk inequalities (a)-(d)", Box::new(polydisk_inequalities)),
        ("polydisk norm sandwich", Box::new(polydisk_sandwich)),
        ("identity operator", Box::new(|| identity_operator(&cfg))),
        ("ball log symbol bounded", Box::new(|| ball_log_symbol(&cfg))),
        ("ball weighted compact", Box::new(|| ball_compact(&cfg))),
        ("polydisk examples", Box::new(|| polydisk_examples(&cfg))),
        ("H-infinity norm formula", Box::new(|| hinf_norms(&cfg))),
        ("H-infinity multiplier unbounded", Box::new(|| hinf_multiplier(&cfg))),
        ("engine vs grid oracle", Box::new(|| engine_vs_grid(&cfg))),
        ("suite determinism", Box::new(suite_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status} {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! The `paper-suite` command: worked examples with known verdicts, run with
//! the default engine settings and printed as a fixed-order table.
//!
//! Conventions for the literature examples:
//! - In the ball and polydisk examples with `psi = 1 - z`, the weight is read
//!   in the first coordinate, `psi = 1 - z1`, matching the maps
//!   `phi = ((1 + z1)/2, 0)` which act along the first coordinate only.
//! - The polydisk maps built from one coordinate set the remaining
//!   components to 0.

use bloch_wco::bloch::{self, DecayVerdict, TOL_DECAY};
use bloch_wco::suprema::{LIMSUP_POSITIVE, LIMSUP_ZERO_TOL};
use bloch_wco::wco::{self, reconcile, Estimate};
use bloch_wco::{
    Classification, Complex, DomainSpec, LimsupEstimate, ScalarMap, SupConfig, SupEstimate, SymbolPair, Verdict,
};

use crate::report::fmt_num;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Innermost-shell tolerance of the little-Bloch decay fixtures.
    pub tol_decay: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { tol_decay: TOL_DECAY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub fixture: &'static str,
    pub check: String,
    pub expected: String,
    pub actual: String,
    /// Signed distance to the pass threshold (positive passes), where one
    /// exists.
    pub margin: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub rows: Vec<CheckRow>,
    pub table: String,
    pub fixtures: usize,
    pub failed_fixtures: Vec<&'static str>,
}

impl SuiteOutcome {
    pub fn all_pass(&self) -> bool {
        self.failed_fixtures.is_empty()
    }
}

struct Fixture {
    name: &'static str,
    run: fn(&SupConfig, &SuiteOptions, &mut Rows) -> Result<(), bloch_wco::Error>,
}

struct Rows {
    fixture: &'static str,
    rows: Vec<CheckRow>,
}

impl Rows {
    fn push(&mut self, check: &str, expected: String, actual: String, margin: Option<f64>, pass: bool) {
        self.rows.push(CheckRow { fixture: self.fixture, check: check.into(), expected, actual, margin, pass });
    }

    fn verdict(&mut self, check: &str, want: Verdict, got: Verdict, margin: Option<f64>) {
        self.push(check, want.to_string(), got.to_string(), margin, want == got);
    }

    /// Passes when `margin > 0`.
    fn above(&mut self, check: &str, expected: String, actual: f64, margin: f64) {
        self.push(check, expected, fmt_num(actual), Some(margin), margin > 0.0);
    }
}

fn innermost(est: &LimsupEstimate) -> f64 {
    est.innermost().unwrap_or(f64::NAN)
}

fn growth_threshold(est: &SupEstimate) -> f64 {
    let max = est.shell_table.iter().filter_map(|r| r.sup).fold(0.0, f64::max);
    0.02 * (max + 1.0)
}

/// Smallest distance to the finite-growth threshold over the criteria that
/// drive a boundedness verdict.
fn bounded_margin(c: &Classification) -> Option<f64> {
    c.criteria
        .iter()
        .filter(|k| k.drives_verdict)
        .filter_map(|k| match &k.estimate {
            Estimate::Sup(s) => Some(growth_threshold(s) - s.slope),
            Estimate::Limsup(_) => None,
        })
        .reduce(f64::min)
}

/// Largest innermost limsup among the driving criteria, against the zero
/// tolerance.
fn compact_zero_margin(c: &Classification) -> Option<f64> {
    c.criteria
        .iter()
        .filter(|k| k.drives_verdict)
        .filter_map(|k| match &k.estimate {
            Estimate::Limsup(l) => Some(LIMSUP_ZERO_TOL - innermost(l)),
            Estimate::Sup(_) => None,
        })
        .reduce(f64::min)
}

fn tau_innermost(c: &Classification, domain: &DomainSpec) -> f64 {
    c.limsup(wco::Quantity::TauUpper.name(domain)).map(innermost).unwrap_or(f64::NAN)
}

fn identity(domain: DomainSpec, cfg: &SupConfig, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::identity(domain);
    let b = wco::classify_bounded(&pair, cfg)?;
    rows.verdict("bounded", Verdict::Yes, b.verdict, bounded_margin(&b));
    let nb = wco::norm_bounds(&pair, cfg)?;
    let err = (nb.lower - 1.0).abs().max((nb.upper - 1.0).abs());
    rows.push(
        "norm_bounds",
        "[1, 1] +- 1e-6".into(),
        format!("[{}, {}]", fmt_num(nb.lower), fmt_num(nb.upper)),
        Some(1e-6 - err),
        err <= 1e-6,
    );
    let c = wco::classify_compact(&pair, cfg)?;
    let tau = tau_innermost(&c, &domain);
    rows.verdict("compact", Verdict::No, reconcile(b.verdict, c.verdict), Some(tau - LIMSUP_POSITIVE));
    rows.above("tau_innermost", "in [0.99, 1.01]".into(), tau, 0.01 - (tau - 1.0).abs());
    Ok(())
}

fn identity_disk(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    identity(DomainSpec::disk(), cfg, rows)
}

fn identity_ball2(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    identity(DomainSpec::ball(2), cfg, rows)
}

fn identity_ball3(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    identity(DomainSpec::ball(3), cfg, rows)
}

fn identity_polydisk2(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    identity(DomainSpec::polydisk(2), cfg, rows)
}

fn identity_polydisk3(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    identity(DomainSpec::polydisk(3), cfg, rows)
}

/// Floor for the innermost `sup |psi|`, which is about 6.9 at gap `1e-6`.
const LOG_SYMBOL_INNERMOST_MIN: f64 = 3.0;

fn ball_log_symbol(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "0.5*plog(1 - hdot((1, 0)))", &["(1 - z1)/2", "(0 - z2)/2"])?;
    let b = wco::classify_bounded(&pair, cfg)?;
    rows.verdict("bounded", Verdict::Yes, b.verdict, bounded_margin(&b));
    let h = bloch::hinf_sup(&pair.psi, &pair.domain, cfg)?;
    rows.push("psi_hinf", "divergent".into(), if h.divergent { "divergent" } else { "finite" }.into(), None, h.divergent);
    let inner = h.shell_table.last().and_then(|r| r.sup).unwrap_or(f64::NAN);
    rows.above("psi_hinf_innermost", format!(">= {}", fmt_num(LOG_SYMBOL_INNERMOST_MIN)), inner, inner - LOG_SYMBOL_INNERMOST_MIN);
    Ok(())
}

fn ball_shifted_symbol(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "1 - z1", &["(1 + z1)/2", "0"])?;
    let b = wco::classify_bounded(&pair, cfg)?;
    rows.verdict("bounded", Verdict::Yes, b.verdict, bounded_margin(&b));
    let c = wco::classify_compact(&pair, cfg)?;
    rows.verdict("compact", Verdict::Yes, reconcile(b.verdict, c.verdict), compact_zero_margin(&c));
    let z = [Complex::new(1.0 - 1e-5, 0.0), Complex::new(0.0, 0.0)];
    let u = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
    let ratio = wco::pullback_ratio_sq(&pair.phi, &pair.domain, &z, &u)?.sqrt();
    rows.above("composition_ratio", "> 0.1".into(), ratio, ratio - 0.1);
    Ok(())
}

fn polydisk_log_symbol(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::polydisk(2), "plog(2/(1 - z1))", &["(1 - z1)/2", "0"])?;
    let b = wco::classify_bounded(&pair, cfg)?;
    rows.verdict("bounded", Verdict::Yes, b.verdict, bounded_margin(&b));
    Ok(())
}

fn polydisk_shifted_symbol(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::polydisk(2), "1 - z1", &["(1 + z1)/2", "0"])?;
    let b = wco::classify_bounded(&pair, cfg)?;
    rows.verdict("bounded", Verdict::Yes, b.verdict, bounded_margin(&b));
    let c = wco::classify_compact(&pair, cfg)?;
    rows.verdict("compact", Verdict::Yes, reconcile(b.verdict, c.verdict), compact_zero_margin(&c));
    let beta = b.sup("beta_psi").map(|s| s.value).unwrap_or(f64::NAN);
    rows.above("beta_psi", "> 0".into(), beta, beta);
    Ok(())
}

fn hinf_dilation(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "1", &["0.9*z1", "0.9*z2"])?;
    let h = wco::hinf_target_report(&pair, cfg)?;
    rows.verdict("hinf_bounded", Verdict::Yes, h.bounded, None);
    // omega(0.9 e1) = atanh(0.9) exceeds sup |psi| = 1
    let want = 1f64.max(0.5 * 19f64.ln());
    match h.norm {
        Some(n) => rows.above("hinf_norm", format!("{} +- 1e-3", fmt_num(want)), n, 1e-3 - (n - want).abs()),
        None => rows.push("hinf_norm", fmt_num(want), "none".into(), None, false),
    }
    Ok(())
}

fn hinf_constant_map(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "1", &["0", "0"])?;
    let h = wco::hinf_target_report(&pair, cfg)?;
    rows.verdict("hinf_bounded", Verdict::Yes, h.bounded, None);
    match h.norm {
        Some(n) => rows.push("hinf_norm", "1".into(), fmt_num(n), None, n == 1.0),
        None => rows.push("hinf_norm", "1".into(), "none".into(), None, false),
    }
    Ok(())
}

fn hinf_multiplier(cfg: &SupConfig, _: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    let pair = SymbolPair::parse(DomainSpec::ball(2), "z1", &["z1", "z2"])?;
    let h = wco::hinf_target_report(&pair, cfg)?;
    let eta = if h.eta.divergent { "divergent" } else { "finite" };
    let margin = h.eta.slope - 5.0 * growth_threshold(&h.eta);
    rows.push("eta", "divergent".into(), eta.into(), Some(margin), h.eta.divergent);
    rows.verdict("hinf_bounded", Verdict::No, h.bounded, None);
    Ok(())
}

fn decay(
    f: &str,
    domain: DomainSpec,
    want: DecayVerdict,
    cfg: &SupConfig,
    opts: &SuiteOptions,
    rows: &mut Rows,
) -> Result<(), bloch_wco::Error> {
    let f = ScalarMap::parse(f, domain.dim())?;
    let r = bloch::little_bloch_decay(&f, &domain, &bloch::decay_shells(), opts.tol_decay, cfg)?;
    let inner = r.shell_sups.last().and_then(|s| s.sup).unwrap_or(f64::NAN);
    let margin = match want {
        DecayVerdict::Decays => opts.tol_decay - inner,
        _ => inner - opts.tol_decay,
    };
    let name = |v: DecayVerdict| match v {
        DecayVerdict::Decays => "decays",
        DecayVerdict::Persists => "persists",
        DecayVerdict::Inconclusive => "inconclusive",
    };
    rows.push("decay", name(want).into(), name(r.verdict).into(), Some(margin), want == r.verdict);
    Ok(())
}

fn little_bloch_polynomial(cfg: &SupConfig, opts: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    decay("z1^2 - 3*z1*z2 + z2", DomainSpec::ball(2), DecayVerdict::Decays, cfg, opts, rows)
}

fn little_bloch_log(cfg: &SupConfig, opts: &SuiteOptions, rows: &mut Rows) -> Result<(), bloch_wco::Error> {
    decay("plog(1 - z1)", DomainSpec::disk(), DecayVerdict::Persists, cfg, opts, rows)
}

const FIXTURES: &[Fixture] = &[
    Fixture { name: "identity-disk", run: identity_disk },
    Fixture { name: "identity-ball-2", run: identity_ball2 },
    Fixture { name: "identity-ball-3", run: identity_ball3 },
    Fixture { name: "identity-polydisk-2", run: identity_polydisk2 },
    Fixture { name: "identity-polydisk-3", run: identity_polydisk3 },
    Fixture { name: "ball-log-symbol", run: ball_log_symbol },
    Fixture { name: "ball-shifted-symbol", run: ball_shifted_symbol },
    Fixture { name: "polydisk-log-symbol", run: polydisk_log_symbol },
    Fixture { name: "polydisk-shifted-symbol", run: polydisk_shifted_symbol },
    Fixture { name: "hinf-dilation", run: hinf_dilation },
    Fixture { name: "hinf-constant-map", run: hinf_constant_map },
    Fixture { name: "hinf-multiplier", run: hinf_multiplier },
    Fixture { name: "little-bloch-polynomial", run: little_bloch_polynomial },
    Fixture { name: "little-bloch-log", run: little_bloch_log },
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

fn render(rows: &[CheckRow], fixtures: usize, failed: &[&str]) -> String {
    let head = ["fixture", "check", "expected", "actual", "margin", "status"].map(String::from);
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.fixture.to_string(),
                r.check.clone(),
                r.expected.clone(),
                r.actual.clone(),
                r.margin.map(fmt_num).unwrap_or_else(|| "-".into()),
                if r.pass { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut width = head.clone().map(|h| h.len());
    for r in &body {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String; 6]| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                s.push_str(&format!("{c:<w$}  ", w = width[i]));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(&head);
    for r in &body {
        out.push_str(&line(r));
    }
    out.push_str(&format!("{} of {fixtures} fixtures passed\n", fixtures - failed.len()));
    out
}

/// Runs the fixtures whose name contains `filter` (all when `None`).
pub fn run_paper_suite(filter: Option<&str>, opts: &SuiteOptions, cfg: &SupConfig) -> Result<SuiteOutcome, CliError> {
    if !(opts.tol_decay > 0.0) {
        return Err(CliError::Config("tol-decay must be positive".into()));
    }
    cfg.validate()?;
    let chosen: Vec<&Fixture> = FIXTURES.iter().filter(|f| filter.is_none_or(|p| f.name.contains(p))).collect();
    if chosen.is_empty() {
        return Err(CliError::Config(format!(
            "no fixture matches {:?}; known fixtures: {}",
            filter.unwrap_or(""),
            fixture_names().join(", ")
        )));
    }
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for f in &chosen {
        let mut r = Rows { fixture: f.name, rows: Vec::new() };
        if let Err(e) = (f.run)(cfg, opts, &mut r) {
            r.push("run", "ok".into(), format!("error: {e}"), None, false);
        }
        if r.rows.iter().any(|x| !x.pass) {
            failed.push(f.name);
        }
        rows.extend(r.rows);
    }
    let table = render(&rows, chosen.len(), &failed);
    Ok(SuiteOutcome { rows, table, fixtures: chosen.len(), failed_fixtures: failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_filter_is_a_config_error() {
        let e = run_paper_suite(Some("no-such-fixture"), &SuiteOptions::default(), &SupConfig::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn names_are_unique() {
        let mut names = fixture_names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), FIXTURES.len());
    }

    #[test]
    fn table_layout() {
        let rows = vec![CheckRow {
            fixture: "a",
            check: "b".into(),
            expected: "yes".into(),
            actual: "no".into(),
            margin: None,
            pass: false,
        }];
        let t = render(&rows, 1, &["a"]);
        assert!(t.ends_with("0 of 1 fixtures passed\n"), "{t}");
        assert!(t.lines().nth(1).unwrap().ends_with("FAIL"));
    }
}

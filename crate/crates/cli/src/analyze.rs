//! The `analyze` command.

use std::time::Instant;

use bloch_wco::bloch;
use bloch_wco::geometry::{self, Point, SampleStrategy};
use bloch_wco::holo::{dictionary, self_map_check};
use bloch_wco::wco::{self, reconcile};
use bloch_wco::{Classification, SupConfig, SymbolPair};

use crate::config::{AnalysisConfig, Check, Target};
use crate::report::{FieldSample, Report, Results, Timing};
use crate::CliError;

/// Samples per strategy in the self-map check.
pub const SELF_MAP_SAMPLES: usize = 2000;
/// Uniform points (besides the origin) reported by the `fields` check.
pub const FIELD_SAMPLES: usize = 8;

/// Runs the configured checks in order. `seed` is the resolved engine seed.
pub fn run_analyze(config: &AnalysisConfig, seed: u64) -> Result<Report, CliError> {
    let start = Instant::now();
    config.validate()?;
    let pair = config.pair()?;
    let cfg = config.sup.apply(seed);
    let self_map = self_map_check(&pair.phi, &pair.domain, SELF_MAP_SAMPLES, seed)?.into_result()?;

    let mut results = Results::default();
    let mut bounded: Option<Classification> = None;
    for check in &config.checks {
        match (config.target, check) {
            (Target::Bloch, Check::Bounded) => {
                results.bounded = Some(bounded_once(&pair, &cfg, &mut bounded)?.clone());
                results.psi_hinf = Some(bloch::hinf_sup(&pair.psi, &pair.domain, &cfg)?);
            }
            (Target::Bloch, Check::Compact) => {
                let b = bounded_once(&pair, &cfg, &mut bounded)?.verdict;
                let mut c = wco::classify_compact(&pair, &cfg)?;
                let capped = reconcile(b, c.verdict);
                if capped != c.verdict {
                    c.rationale.push_str(&format!("; capped at {capped} by the boundedness verdict ({b})"));
                    c.verdict = capped;
                }
                results.compact = Some(c);
            }
            (Target::Bloch, Check::NormBounds) => {
                results.norm_bounds = Some(wco::norm_bounds(&pair, &cfg)?);
            }
            (Target::Bloch, Check::DirectNorm) => {
                let members = dictionary::standard(&pair.domain);
                results.direct_norm = Some(wco::direct_norm_lower(&pair, &members, &cfg)?);
            }
            (Target::Hinf, Check::Bounded | Check::Compact | Check::NormBounds) => {
                if results.hinf.is_none() {
                    results.hinf = Some(wco::hinf_target_report(&pair, &cfg)?);
                }
            }
            (Target::Hinf, Check::DirectNorm) => {
                return Err(CliError::Config("direct_norm is only available for the bloch target".into()))
            }
            (_, Check::Fields) => results.fields = Some(field_samples(&pair, seed)?),
        }
    }
    Ok(Report {
        config: config.clone(),
        seed,
        engine: cfg,
        self_map,
        results,
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
    })
}

fn bounded_once<'a>(
    pair: &SymbolPair,
    cfg: &SupConfig,
    slot: &'a mut Option<Classification>,
) -> Result<&'a Classification, CliError> {
    if slot.is_none() {
        *slot = Some(wco::classify_bounded(pair, cfg)?);
    }
    Ok(slot.as_ref().expect("filled above"))
}

fn field_samples(pair: &SymbolPair, seed: u64) -> Result<Vec<FieldSample>, CliError> {
    let mut pts = vec![Point::origin(pair.domain.dim())];
    pts.extend(geometry::sample(&pair.domain, SampleStrategy::Uniform, FIELD_SAMPLES, seed)?);
    pts.into_iter()
        .map(|point| {
            let fields = wco::pointwise_fields(pair, &point)?;
            Ok(FieldSample { point, fields })
        })
        .collect()
}


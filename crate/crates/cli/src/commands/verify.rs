use divmetric_core::verify::{
    asymptotic_probe, chain_sweep, confirm_violation, dominance_probe, log_grid,
    monotonicity_probe, triangle_search, triangle_search_unrooted, SampleSpace, SamplerConfig,
};
use divmetric_core::{Distribution, MetricSpec};
use serde_json::{json, Value};

use crate::args::{Mode, VerifySuite};
use crate::error::{CliError, CliResult};
use crate::report::{to_value, Outcome};

pub fn run(suite: &VerifySuite) -> CliResult<Outcome> {
    match suite {
        VerifySuite::Triangle {
            grid,
            seed,
            trials,
            mode,
            n,
            lo,
            hi,
            tol,
            no_sqrt,
            confirm,
        } => {
            let space = match mode {
                Mode::Scalar => SampleSpace::Scalar { lo: *lo, hi: *hi },
                Mode::Simplex => SampleSpace::Simplex { n: *n },
            };
            let cfg = SamplerConfig {
                seed: seed.seed,
                trials: *trials,
                space,
            };
            cfg.validate()?;
            let mut results = Vec::new();
            let mut violations = Vec::new();
            let mut passed = true;
            for family in grid.family.families() {
                for &s in &grid.s_grid.values {
                    let m = MetricSpec::new(family, s);
                    let report = if *no_sqrt {
                        triangle_search_unrooted(m, &cfg, *tol)?
                    } else {
                        triangle_search(m, &cfg, *tol)?
                    };
                    passed &= report.passed();
                    let confirmations: Option<Vec<Value>> = confirm.then(|| {
                        report
                            .witnesses
                            .iter()
                            .map(|w| to_value(&confirm_violation(w, report.rooted, *tol)))
                            .collect()
                    });
                    violations.extend(report.witnesses.iter().map(to_value));
                    results.push(json!({
                        "family": family,
                        "s": s,
                        "violation_count": report.violation_count,
                        "max_relative_excess": report.max_relative_excess,
                        "witnesses_kept": report.witnesses.len(),
                        "confirmations": confirmations,
                    }));
                }
            }
            Ok(Outcome {
                command: "verify triangle",
                config: json!({
                    "grid": to_value(grid),
                    "sampler": to_value(&cfg),
                    "tol_rel": tol,
                    "rooted": !no_sqrt,
                    "confirm": confirm,
                }),
                seed: Some(seed.seed),
                passed,
                results: Value::Array(results),
                violations,
            })
        }
        VerifySuite::Chain {
            seed,
            pairs,
            n_min,
            n_max,
            tol,
        } => {
            let sweep = chain_sweep(seed.seed, *pairs, *n_min, *n_max, *tol)?;
            Ok(Outcome {
                command: "verify chain",
                config: json!({
                    "pairs": pairs,
                    "n_min": n_min,
                    "n_max": n_max,
                    "tol_abs": tol,
                }),
                seed: Some(seed.seed),
                passed: sweep.passed(),
                results: json!({
                    "pairs": sweep.pairs,
                    "order_failures": sweep.order_failures,
                    "strictness_failures": sweep.strictness_failures,
                    "min_relative_gap": sweep.min_relative_gap,
                }),
                violations: sweep.first_failures.iter().map(to_value).collect(),
            })
        }
        VerifySuite::Probe {
            grid,
            points,
            t_min,
            t_max,
            beta,
        } => {
            if *points < 2 || !(*t_min > 0.0 && t_max > t_min) {
                return Err(CliError::Usage(
                    "probe needs --points >= 2 and 0 < t-min < t-max".into(),
                ));
            }
            let t_grid = log_grid(*t_min, *t_max, *points);
            let mut results = Vec::new();
            let mut violations = Vec::new();
            let mut passed = true;
            for family in grid.family.families() {
                for &s in &grid.s_grid.values {
                    let report = monotonicity_probe(family, s, &t_grid)?;
                    passed &= report.passed;
                    if !report.passed {
                        violations.push(to_value(&report));
                    }
                    let dominance = beta
                        .iter()
                        .map(|&b| dominance_probe(family, s, b, &t_grid).map(|r| to_value(&r)))
                        .collect::<divmetric_core::Result<Vec<_>>>()?;
                    let mut entry = to_value(&report);
                    entry["dominance"] = Value::Array(dominance);
                    results.push(entry);
                }
            }
            Ok(Outcome {
                command: "verify probe",
                config: json!({
                    "grid": to_value(grid),
                    "points": points,
                    "t_min": t_min,
                    "t_max": t_max,
                    "beta": beta,
                }),
                seed: None,
                passed,
                results: Value::Array(results),
                violations,
            })
        }
        VerifySuite::Asymptotic {
            grid,
            q,
            p0,
            t_seq,
            tol,
        } => {
            let qd = Distribution::new(q)?;
            let pd = Distribution::new(p0)?;
            let mut results = Vec::new();
            let mut violations = Vec::new();
            let mut passed = true;
            for family in grid.family.families() {
                for &s in &grid.s_grid.values {
                    let table = asymptotic_probe(family, s, &qd, &pd, t_seq)?;
                    let ok = table.monotone && table.final_rel_error() <= *tol;
                    passed &= ok;
                    let mut entry = to_value(&table);
                    entry["first_t_within_tol"] = to_value(&table.first_t_within(*tol));
                    entry["passed"] = Value::Bool(ok);
                    if !ok {
                        violations.push(entry.clone());
                    }
                    results.push(entry);
                }
            }
            Ok(Outcome {
                command: "verify asymptotic",
                config: json!({
                    "grid": to_value(grid),
                    "q": q,
                    "p0": p0,
                    "t_seq": t_seq,
                    "tol_rel": tol,
                }),
                seed: None,
                passed,
                results: Value::Array(results),
                violations,
            })
        }
    }
}

//! Command implementations: build, spectrum, bounds, tile, verify, eval.
//!
//! Every file the commands emit is deterministic for a fixed configuration
//! and seed: floats are printed with 17 significant digits, map iteration
//! orders are sorted, and nothing records clocks, paths, or machine state.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use regionops::fock::hermitian_spectrum;
use regionops::geometry::RegionDim;
use regionops::regionop::build_region_operator;
use regionops::spectra::qpm_bounds;
use regionops::cpti::tile_run;
use regionops::verify::run_all_checks_with_seed;
use regionops::{FockOperator64, Region64};

use crate::ast::RegionExpr;
use crate::config::RunConfig;
use crate::errors::CliError;
use crate::opio::{content_hash, load_operator, save_operator, OperatorMeta, SavedOperator};
use crate::parser::parse_region_expression;
use crate::toolcheck::tooling_check;

/// Number of polyline samples for emitted region outlines.
const OUTLINE_SAMPLES: usize = 128;

fn parse_required_expr(cfg: &RunConfig) -> Result<(RegionExpr, Region64), CliError> {
    let text = cfg.required_expr()?;
    let expr = parse_region_expression(text)?;
    let region = expr.to_region().map_err(|e| {
        CliError::Usage(format!("region expression `{}`: {e}", expr.canonical()))
    })?;
    Ok((expr, region))
}

/// Normalization convention the builder applies to this region.
fn normalization_label(region: &Region64) -> &'static str {
    match region.dimensionality() {
        RegionDim::Area => "area-2d",
        RegionDim::Point => "kernel-sum",
        RegionDim::Curve => {
            let has_line = region
                .curve_components()
                .map(|cs| {
                    cs.iter().any(|c| {
                        matches!(c, regionops::geometry::CurveComponent::Line { .. })
                    })
                })
                .unwrap_or(false);
            if has_line {
                "line-projector"
            } else {
                "arc-length"
            }
        }
    }
}

/// Deterministic cache key over the canonical expression and the numeric
/// configuration that shapes the operator.
fn cache_key(canonical: &str, cfg: &RunConfig) -> String {
    let eff = cfg
        .effective_dim
        .map(|e| e.to_string())
        .unwrap_or_else(|| "default".into());
    let key_text = format!(
        "v1|expr={canonical}|dim={}|eff={eff}|quad={}",
        cfg.dim, cfg.quad_order
    );
    let digest = content_hash(key_text.as_bytes());
    digest
        .trim_start_matches("sha256:")
        .chars()
        .take(16)
        .collect()
}

fn operator_base(cfg: &RunConfig, key: &str) -> PathBuf {
    cfg.out_dir.join(format!("op-{key}"))
}

fn build_meta(cfg: &RunConfig, expr: &RegionExpr, region: &Region64) -> OperatorMeta {
    let mut params = BTreeMap::new();
    params.insert("expr".to_string(), expr.canonical());
    params.insert("dim".to_string(), cfg.dim.to_string());
    params.insert(
        "effective_dim".to_string(),
        cfg.effective_dim
            .map(|e| e.to_string())
            .unwrap_or_else(|| "default".into()),
    );
    params.insert("quad_order".to_string(), cfg.quad_order.to_string());
    OperatorMeta {
        normalization: normalization_label(region).to_string(),
        params,
    }
}

/// Builds (or reuses) the operator for the configured expression, returning
/// the operator, its canonical expression, and where it is stored.
fn build_or_reuse(
    cfg: &RunConfig,
) -> Result<(FockOperator64, RegionExpr, SavedOperator, bool), CliError> {
    let (expr, region) = parse_required_expr(cfg)?;
    let key = cache_key(&expr.canonical(), cfg);
    let base = operator_base(cfg, &key);
    let meta = build_meta(cfg, &expr, &region);
    if let Ok((op, loaded_meta, hash)) = load_operator(&base) {
        if loaded_meta == meta && op.dim() == cfg.dim {
            let saved = SavedOperator {
                header: base.with_extension("hdr"),
                matrix: base.with_extension("mat"),
                hash,
            };
            return Ok((op, expr, saved, true));
        }
    }
    let trunc = cfg.truncation()?;
    let quad = cfg.quadrature()?;
    let op = build_region_operator(&region, &trunc, quad)?;
    let saved = save_operator(&op, &meta, &base)?;
    Ok((op, expr, saved, false))
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// `build`: construct the operator and persist it (or report a cache hit).
pub fn cmd_build(cfg: &RunConfig) -> Result<(), CliError> {
    let (op, expr, saved, reused) = build_or_reuse(cfg)?;
    if reused {
        println!(
            "cache hit {} -> {} ({})",
            expr.canonical(),
            saved.matrix.display(),
            saved.hash
        );
    } else {
        println!(
            "built {} at dim {} -> {} ({})",
            expr.canonical(),
            op.dim(),
            saved.matrix.display(),
            saved.hash
        );
    }
    println!("trace = {}", fmt17(op.trace().re));
    Ok(())
}

/// `spectrum`: full deterministic eigenvalue list, written as CSV.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let (op, expr, saved, _) = build_or_reuse(cfg)?;
    let spectrum = hermitian_spectrum(&op, cfg.tol)?;
    let mut csv = String::from("index,eigenvalue\n");
    for (i, v) in spectrum.eigenvalues().iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", fmt17(*v));
    }
    let path = saved
        .matrix
        .with_file_name(format!("op-{}.spectrum.csv", cache_key(&expr.canonical(), cfg)));
    crate::opio::write_bytes_atomic(&path, csv.as_bytes())?;
    println!(
        "spectrum of {} at dim {} -> {}",
        expr.canonical(),
        op.dim(),
        path.display()
    );
    println!(
        "lambda_min = {:.6}, lambda_max = {:.6}",
        spectrum.eigenvalues()[op.dim() - 1],
        spectrum.eigenvalues()[0]
    );
    Ok(())
}

/// `bounds`: the extreme quasiprobability masses of the region operator.
pub fn cmd_bounds(cfg: &RunConfig) -> Result<(), CliError> {
    let (op, expr, _, _) = build_or_reuse(cfg)?;
    let (lo, hi) = qpm_bounds(&op)?;
    println!(
        "bounds of {} at dim {}: lambda_min = {lo:.6}, lambda_max = {hi:.6}",
        expr.canonical(),
        op.dim()
    );
    Ok(())
}

/// `tile`: doubling run from a rectangle or origin disk, with plot data.
pub fn cmd_tile(cfg: &RunConfig) -> Result<(), CliError> {
    let (expr, region) = parse_required_expr(cfg)?;
    let trunc = cfg.truncation()?;
    let quad = cfg.quadrature()?;
    let x0 = build_region_operator(&region, &trunc, quad)?;
    let trace = tile_run(&x0, &region, cfg.steps, &trunc)?;
    let records = trace.steps();

    let mut records_csv =
        String::from("step,area,trace,lambda_min,lambda_max,row_sum_dev,col_sum_dev\n");
    for (k, rec) in records.iter().enumerate() {
        let area = rec.region.measure()?;
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        let _ = writeln!(
            records_csv,
            "{k},{},{},{},{},{},{}",
            fmt17(area),
            fmt17(rec.operator.trace().re),
            fmt17(rec.lambda_min),
            fmt17(rec.lambda_max),
            opt(rec.row_sum_deviation),
            opt(rec.col_sum_deviation),
        );
    }
    let records_path = cfg.out_dir.join("tile-records.csv");
    crate::opio::write_bytes_atomic(&records_path, records_csv.as_bytes())?;

    let (env_min, env_max) = (records[0].lambda_min, records[0].lambda_max);
    let mut plot_csv = String::from("step,lambda_min,lambda_max,envelope_min,envelope_max\n");
    for (k, rec) in records.iter().enumerate() {
        let quadrupled = 4.0f64.powi(k as i32);
        let _ = writeln!(
            plot_csv,
            "{k},{},{},{},{}",
            fmt17(rec.lambda_min),
            fmt17(rec.lambda_max),
            fmt17(quadrupled * env_min),
            fmt17(quadrupled * env_max),
        );
    }
    let plot_path = cfg.out_dir.join("tile-plot.csv");
    crate::opio::write_bytes_atomic(&plot_path, plot_csv.as_bytes())?;

    for (k, rec) in records.iter().enumerate() {
        let mut outline_csv = String::from("x,y\n");
        for component in rec.region.outline(OUTLINE_SAMPLES) {
            for (x, y) in component {
                let _ = writeln!(outline_csv, "{},{}", fmt17(x), fmt17(y));
            }
            outline_csv.push('\n');
        }
        let path = cfg.out_dir.join(format!("tile-outline-{k}.csv"));
        crate::opio::write_bytes_atomic(&path, outline_csv.as_bytes())?;
    }

    println!(
        "tiled {} for {} steps at dim {} -> {}, {}",
        expr.canonical(),
        cfg.steps,
        cfg.dim,
        records_path.display(),
        plot_path.display()
    );
    for (k, rec) in records.iter().enumerate() {
        println!(
            "step {k}: area = {}, trace = {:.6}, lambda in [{:.6}, {:.6}]",
            rec.region.measure()?,
            rec.operator.trace().re,
            rec.lambda_min,
            rec.lambda_max
        );
    }
    Ok(())
}

/// `verify`: the named check suite; exits nonzero if anything fails. The
/// checks pin their own dimensions and tolerances; `--seed` feeds the
/// randomized duality pairs.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let mut reports = run_all_checks_with_seed(cfg.seed);
    reports.push(tooling_check());
    let total = reports.len();
    let mut failed = 0usize;
    for r in &reports {
        println!(
            "{} {} :: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.details
        );
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Verification { failed, total });
    }
    println!("all {total} checks passed");
    Ok(())
}

/// `eval`: parse, lower, build, and summarize without persisting.
pub fn cmd_eval(cfg: &RunConfig) -> Result<(), CliError> {
    let (expr, region) = parse_required_expr(cfg)?;
    println!("expression: {}", expr.canonical());
    let kind = match region.dimensionality() {
        RegionDim::Point => "point set",
        RegionDim::Curve => "curve",
        RegionDim::Area => "two-dimensional domain",
    };
    match region.measure() {
        Ok(m) => println!("{kind}, measure = {m}"),
        Err(regionops::Error::InfiniteMeasure) => println!("{kind}, measure = infinite"),
        Err(e) => return Err(e.into()),
    }
    let trunc = cfg.truncation()?;
    let quad = cfg.quadrature()?;
    let op = build_region_operator(&region, &trunc, quad)?;
    let (lo, hi) = qpm_bounds(&op)?;
    println!(
        "operator: dim {}, trace = {:.6}, lambda in [{lo:.6}, {hi:.6}]",
        op.dim(),
        op.trace().re
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use regionops::geometry::Region;

    #[test]
    fn normalization_labels_follow_dimensionality() {
        assert_eq!(
            normalization_label(&Region::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()),
            "area-2d"
        );
        assert_eq!(
            normalization_label(&Region::segment(1.0, 0.0).unwrap()),
            "arc-length"
        );
        assert_eq!(
            normalization_label(&Region::line(0.0, 0.0).unwrap()),
            "line-projector"
        );
        assert_eq!(normalization_label(&Region::point()), "kernel-sum");
    }

    #[test]
    fn cache_keys_separate_configurations() {
        let mut a = RunConfig::default();
        a.expr = Some("disk(0,0,2)".into());
        let mut b = a.clone();
        b.dim = a.dim * 2;
        let ka = cache_key("disk(0,0,2)", &a);
        let kb = cache_key("disk(0,0,2)", &b);
        assert_ne!(ka, kb);
        assert_eq!(ka.len(), 16);
        assert_eq!(ka, cache_key("disk(0,0,2)", &a.clone()));
    }
}

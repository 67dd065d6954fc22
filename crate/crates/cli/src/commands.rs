use std::path::Path;

use npannulus::assembly::{build_np_matrix, build_reduced_b};
use npannulus::geometry::AnnulusGeometry;
use npannulus::gershgorin::{
    analytic_disks, check_containment, disjointness_threshold, entry_disks, tail_interval,
    AnalyticDisk, ContainmentReport, Disjointness, EntryDisk, Region, DEFAULT_TAIL_TOL,
};
use npannulus::grunsky::{check_strong_grunsky, compute_table, ScaledGrunskyTable};
use npannulus::nystrom::assemble_oracle;
use npannulus::spectral::{
    compare_to_reference, default_reference_modes, eigenvalues, eigenvalues_real, nearest_matches,
    np_spectrum, reference_annulus_spectrum, sweep_hausdorff, symmetric_top_gap,
    truncated_annulus_spectrum, SpectrumReport, DEFAULT_IMAG_TOL,
};
use npannulus::Complex64;
use serde::Serialize;

use crate::output::{complex_cell, csv, emit, matrix_text, num};
use crate::svg::{Scatter, Series};
use crate::{CliError, Ctx, Reference, Which};

/// Containment tolerance for the analytic disks.
const DISK_TOL: f64 = 1e-10;
/// Twin-symmetry tolerance for the reproduction run.
const TWIN_TOL: f64 = 1e-8;
/// Agreement required between the two pipelines.
const CROSSCHECK_TOL: f64 = 1e-6;

fn geometry(ctx: &Ctx) -> Result<AnnulusGeometry, CliError> {
    let geom = ctx.cfg.geometry()?;
    let report = geom.validate(1024);
    if !report.passes() {
        return Err(CliError::Core(npannulus::Error::GeometryDegenerate(
            format!("map fails univalence/nesting checks: {report:?}"),
        )));
    }
    Ok(geom)
}

pub fn grunsky(ctx: &Ctx, radius: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let n = ctx.cfg.order;
    let table = compute_table(&geom.map, n)?;
    let header: Vec<String> = std::iter::once("m".to_string())
        .chain((1..=n).map(|k| format!("n={k}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (1..=n).map(|m| {
        std::iter::once(m.to_string())
            .chain((1..=n).map(|k| complex_cell(table.get(k, m))))
            .collect::<Vec<_>>()
    });
    emit(out, &csv(&header, rows))?;
    if let Some(radius) = radius {
        let report = check_strong_grunsky(&table, radius);
        ctx.note(format!(
            "strong Grunsky inequality at radius {radius}: max row sum {}, flagged rows {:?}",
            report.max_row_sum(),
            report.flagged
        ));
        if !report.holds() {
            return Err(CliError::Check(format!(
                "strong Grunsky inequality fails at radius {radius} on rows {:?}",
                report.flagged
            )));
        }
    }
    Ok(())
}

pub fn matrix(ctx: &Ctx, which: Which, out: Option<&Path>) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let n = ctx.cfg.order;
    let table = compute_table(&geom.map, n)?;
    let text = match which {
        Which::Np => {
            let k = build_np_matrix(&geom, &table, n)?;
            let m = k.entries();
            matrix_text(m.nrows(), m.ncols(), |i, j| m[(i, j)])
        }
        Which::B => {
            let scaled = scaled_table(ctx, table, &geom)?;
            let b = build_reduced_b(&geom, &scaled, n)?;
            let m = b.entries();
            matrix_text(m.nrows(), m.ncols(), |i, j| m[(i, j)])
        }
    };
    emit(out, &text)
}

fn scaled_table(
    ctx: &Ctx,
    table: npannulus::grunsky::GrunskyTable,
    geom: &AnnulusGeometry,
) -> Result<ScaledGrunskyTable, CliError> {
    Ok(match ctx.cfg.rho {
        Some(rho) => ScaledGrunskyTable::with_rho(table, geom.r_inner(), rho)?,
        None => ScaledGrunskyTable::new(table, geom.r_inner())?,
    })
}

fn reference_for(kind: Reference, ratio: f64, report: &SpectrumReport) -> Vec<f64> {
    match kind {
        Reference::Truncated => truncated_annulus_spectrum(ratio, report.truncation),
        Reference::SingleMode => {
            reference_annulus_spectrum(ratio, default_reference_modes(report.realized.len()))
        }
    }
}

fn spectrum_table(report: &SpectrumReport, reference: &[f64]) -> Result<String, CliError> {
    let cmp = compare_to_reference(&report.realized, reference)?;
    let rows = cmp.pairs.iter().map(|p| {
        vec![
            (p.index + 1).to_string(),
            num(p.computed),
            num(p.reference),
            num(p.rel_diff),
        ]
    });
    Ok(csv(&["index", "lambda", "reference", "rel_diff"], rows))
}

fn index_plot(
    title: &str,
    y_label: &str,
    series: Vec<(&'static str, &'static str, &[f64])>,
) -> String {
    Scatter {
        title,
        x_label: "index",
        y_label,
        series: series
            .into_iter()
            .map(|(name, color, values)| Series {
                name,
                color,
                points: values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| ((i + 1) as f64, v))
                    .collect(),
            })
            .collect(),
    }
    .render()
}

pub fn spectrum(
    ctx: &Ctx,
    reference: Reference,
    out: Option<&Path>,
    svg_path: Option<&Path>,
) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let report = np_spectrum(&geom, ctx.cfg.order, DEFAULT_IMAG_TOL)?;
    ctx.note(format!(
        "{} eigenvalues, max |Im| {:.3e}, twin defect {:.3e}",
        report.realized.len(),
        report.max_imag,
        report.twin_defect()
    ));
    let reference_values = reference_for(reference, geom.ratio(), &report);
    emit(out, &spectrum_table(&report, &reference_values)?)?;
    if let Some(path) = svg_path {
        let plot = index_plot(
            "Eigenvalues",
            "eigenvalue",
            vec![
                ("circular", "#ff7f0e", &reference_values),
                ("distorted", "#1f77b4", &report.realized),
            ],
        );
        emit(Some(path), &plot)?;
    }
    Ok(())
}

pub fn sweep(ctx: &Ctx, out: Option<&Path>) -> Result<(), CliError> {
    let geom = ctx.cfg.geometry()?;
    let points = sweep_hausdorff(&geom.map, geom.r_inner(), &ctx.cfg.ratios, ctx.cfg.order);
    let rows = points.iter().map(|p| {
        vec![
            num(p.ratio),
            p.hausdorff
                .as_ref()
                .map_or_else(|_| num(f64::NAN), |d| num(*d)),
        ]
    });
    emit(out, &csv(&["r", "hausdorff"], rows))?;
    let mut first_failure = None;
    for p in points {
        if let Err(e) = p.hausdorff {
            ctx.note(format!("ratio {}: {e}", p.ratio));
            first_failure.get_or_insert(e);
        }
    }
    match first_failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct GershgorinReport {
    order: usize,
    ratio: f64,
    rho: f64,
    rho_source: &'static str,
    m_max: usize,
    tail_tol: f64,
    disjointness: Disjointness,
    analytic_disks: Vec<AnalyticDisk>,
    tail_interval: Region,
    entry_disks: Vec<EntryDisk>,
    /// Eigenvalues of the truncated reduced matrix, sorted.
    eigenvalues: Vec<Complex64>,
    analytic_containment: ContainmentSummary,
    entry_containment: ContainmentSummary,
}

#[derive(Serialize)]
struct ContainmentSummary {
    contained: bool,
    worst_margin: f64,
    violations: Vec<Complex64>,
}

impl ContainmentSummary {
    fn new(report: &ContainmentReport) -> Self {
        Self {
            contained: report.contained(),
            worst_margin: report.worst_margin,
            violations: report
                .violations
                .iter()
                .map(|&i| report.entries[i].value)
                .collect(),
        }
    }
}

fn gershgorin_report(
    ctx: &Ctx,
    geom: &AnnulusGeometry,
    m_max: Option<usize>,
) -> Result<GershgorinReport, CliError> {
    let n = ctx.cfg.order;
    let scaled = scaled_table(ctx, compute_table(&geom.map, n)?, geom)?;
    let b = build_reduced_b(geom, &scaled, n)?;
    let mut mu = eigenvalues(b.entries())?;
    mu.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let (r, rho) = (geom.ratio(), scaled.rho());
    let m_max = m_max.unwrap_or(4 * n).max(1);
    let disks = analytic_disks(r, rho, m_max, DEFAULT_TAIL_TOL)?;
    let tail = tail_interval(r, rho, m_max, DEFAULT_TAIL_TOL)?;
    let mut regions: Vec<Region> = disks.iter().map(Region::from).collect();
    regions.push(tail);
    let analytic = check_containment(&mu, &regions)?;
    let entries = entry_disks(&b);
    let entry_regions: Vec<Region> = entries.iter().map(Region::from).collect();
    let entry = check_containment(&mu, &entry_regions)?;

    Ok(GershgorinReport {
        order: n,
        ratio: r,
        rho,
        rho_source: if ctx.cfg.rho.is_some() {
            "override"
        } else {
            "fit"
        },
        m_max,
        tail_tol: DEFAULT_TAIL_TOL,
        disjointness: disjointness_threshold(r, rho, &disks),
        analytic_disks: disks,
        tail_interval: tail,
        entry_disks: entries,
        eigenvalues: mu,
        analytic_containment: ContainmentSummary::new(&analytic),
        entry_containment: ContainmentSummary::new(&entry),
    })
}

fn gershgorin_failures(report: &GershgorinReport) -> Vec<String> {
    let mut failures = Vec::new();
    if report.analytic_containment.worst_margin < -DISK_TOL {
        failures.push(format!(
            "eigenvalue outside analytic disks by {:.3e}",
            -report.analytic_containment.worst_margin
        ));
    }
    if !report.entry_containment.contained {
        failures.push("eigenvalue outside entry disks".to_string());
    }
    failures
}

pub fn gershgorin(ctx: &Ctx, m_max: Option<usize>, out: Option<&Path>) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let report = gershgorin_report(ctx, &geom, m_max)?;
    ctx.note(format!(
        "rho = {} ({}), {:?}, analytic margin {:.3e}",
        report.rho,
        report.rho_source,
        report.disjointness,
        report.analytic_containment.worst_margin
    ));
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(out, &(json + "\n"))?;
    let failures = gershgorin_failures(&report);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failures.join("; ")))
    }
}

fn oracle_report(ctx: &Ctx, geom: &AnnulusGeometry) -> Result<SpectrumReport, CliError> {
    let nq = ctx.cfg.nq;
    let oracle = assemble_oracle(geom, nq)?;
    if oracle.resolution_warning() {
        ctx.note(format!(
            "warning: curves closer than twice the node spacing at nq = {nq}; increase --nq"
        ));
    }
    let raw = eigenvalues_real(&oracle.matrix)?;
    Ok(SpectrumReport::unchecked(
        raw,
        DEFAULT_IMAG_TOL,
        nq,
        geom.ratio(),
    )?)
}

pub fn oracle(ctx: &Ctx, out: Option<&Path>) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let report = oracle_report(ctx, &geom)?;
    let rows = report
        .realized
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), num(*v)]);
    emit(out, &csv(&["index", "lambda"], rows))
}

fn crosscheck_table(grunsky: &SpectrumReport, oracle: &SpectrumReport, count: usize) -> String {
    let rows = nearest_matches(&grunsky.realized, &oracle.realized, count)
        .into_iter()
        .enumerate()
        .map(|(i, (g, o))| {
            let gap = (g - o).abs();
            vec![
                (i + 1).to_string(),
                num(g),
                num(o),
                num(gap),
                num(gap / g.abs()),
            ]
        });
    csv(&["index", "grunsky", "oracle", "abs_gap", "rel_gap"], rows)
}

pub fn crosscheck(ctx: &Ctx, count: usize, out: Option<&Path>) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let grunsky = np_spectrum(&geom, ctx.cfg.order, DEFAULT_IMAG_TOL)?;
    let oracle = oracle_report(ctx, &geom)?;
    emit(out, &crosscheck_table(&grunsky, &oracle, count))?;
    ctx.note(format!(
        "top-{count} gap {:.3e}",
        symmetric_top_gap(&grunsky.realized, &oracle.realized, count)
    ));
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

pub fn reproduce(ctx: &Ctx) -> Result<(), CliError> {
    let geom = geometry(ctx)?;
    let dir = ctx.cfg.out.as_path();
    std::fs::create_dir_all(dir)?;
    let n = ctx.cfg.order;

    ctx.note(format!("Grunsky pipeline, N = {n}"));
    let report = np_spectrum(&geom, n, DEFAULT_IMAG_TOL)?;
    let circular = truncated_annulus_spectrum(geom.ratio(), n);
    let cmp = compare_to_reference(&report.realized, &circular)?;

    let rows = report
        .realized
        .iter()
        .zip(&circular)
        .enumerate()
        .map(|(i, (d, c))| vec![(i + 1).to_string(), num(*d), num(*c)]);
    emit(
        Some(&dir.join("eigenvalues.csv")),
        &csv(&["index", "distorted", "circular"], rows),
    )?;
    emit(
        Some(&dir.join("rel_diff.csv")),
        &spectrum_table(&report, &circular)?,
    )?;
    emit(
        Some(&dir.join("eigenvalues.svg")),
        &index_plot(
            "Eigenvalues of the truncated NP matrix",
            "eigenvalue",
            vec![
                ("circular", "#ff7f0e", &circular),
                ("distorted", "#1f77b4", &report.realized),
            ],
        ),
    )?;
    let rel: Vec<f64> = cmp.pairs.iter().map(|p| p.rel_diff).collect();
    emit(
        Some(&dir.join("rel_diff.svg")),
        &index_plot(
            "Relative difference to the circular annulus",
            "relative difference",
            vec![("distorted", "#1f77b4", &rel)],
        ),
    )?;

    ctx.note("Gershgorin report");
    let disks = gershgorin_report(ctx, &geom, None)?;
    let json = serde_json::to_string_pretty(&disks).expect("report serializes");
    emit(Some(&dir.join("disks.json")), &(json + "\n"))?;

    ctx.note(format!("Nyström oracle, nq = {}", ctx.cfg.nq));
    let oracle = oracle_report(ctx, &geom)?;
    emit(
        Some(&dir.join("crosscheck.csv")),
        &crosscheck_table(&report, &oracle, 20),
    )?;
    let matches = nearest_matches(&report.realized, &oracle.realized, 20);
    let (g, o): (Vec<f64>, Vec<f64>) = matches.into_iter().unzip();
    emit(
        Some(&dir.join("crosscheck.svg")),
        &index_plot(
            "Largest eigenvalues: Grunsky matrix vs Nyström",
            "eigenvalue",
            vec![("grunsky", "#1f77b4", &g), ("nystrom", "#d62728", &o)],
        ),
    )?;

    let hi = report.realized.first().copied().unwrap_or(0.0);
    let lo = report.realized.last().copied().unwrap_or(0.0);
    let gap = symmetric_top_gap(&report.realized, &oracle.realized, 20);
    let checks = vec![
        check("max_imag", report.max_imag, DEFAULT_IMAG_TOL),
        check("twin_defect", report.twin_defect(), TWIN_TOL),
        check("overshoot", (hi - 0.5).max(-0.5 - lo).max(0.0), TWIN_TOL),
        check(
            "analytic_disk_violation",
            (-disks.analytic_containment.worst_margin).max(0.0),
            DISK_TOL,
        ),
        Check {
            name: "entry_disk_violations",
            value: disks.entry_containment.violations.len() as f64,
            tolerance: 0.0,
            pass: disks.entry_containment.contained,
        },
        check("crosscheck_gap", gap, CROSSCHECK_TOL),
    ];
    let summary = serde_json::json!({
        "order": n,
        "nq": ctx.cfg.nq,
        "ratio": geom.ratio(),
        "matrix_size": report.realized.len(),
        "checks": checks,
    });
    emit(
        Some(&dir.join("summary.json")),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    for c in &checks {
        ctx.note(format!(
            "[{}] {} = {:.3e} (tolerance {:.0e})",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        ));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn check(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check {
        name,
        value,
        tolerance,
        pass: value <= tolerance,
    }
}

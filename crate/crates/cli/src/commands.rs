//! Subcommand implementations. Sweeps parallelize across grid points with a
//! fixed-order collect, so outputs are identical for any worker count.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use spinchain_core::corr;
use spinchain_core::ed::{self, FiniteSweeper};
use spinchain_core::ggm::{self, FinitePoint};
use spinchain_core::series;
use spinchain_core::twosite;
use spinchain_core::{model, Error};

use crate::config::Resolved;
use crate::output::{self, num, Csv};
use crate::AppError;

fn numerical(context: String) -> impl FnOnce(Error) -> AppError {
    move |e| AppError::Numerical(format!("{context}: {e}"))
}

/// Build the worker pool for this invocation.
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, AppError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AppError::Config(format!("thread pool: {e}")))
}

fn grid_of(r: &Resolved) -> Result<Vec<f64>, AppError> {
    series::uniform_grid(r.alpha_min, r.alpha_max, r.alpha_step)
        .map_err(|e| AppError::Config(format!("alpha grid: {e}")))
}

// ---------------------------------------------------------------------------
// infinite-sweep
// ---------------------------------------------------------------------------

pub fn infinite_sweep(r: &Resolved) -> Result<(), AppError> {
    let grid = grid_of(r)?;
    let pool = thread_pool(r.threads)?;

    let concurrence =
        twosite::concurrence_sweep(&grid).map_err(numerical("concurrence sweep".to_string()))?;

    struct Row {
        gs: Vec<f64>,
        ggm: f64,
        energy: f64,
    }
    let rows: Result<Vec<Row>, AppError> = pool.install(|| {
        grid.par_iter()
            .map(|&alpha| {
                let mut gs = Vec::with_capacity(r.n_max - 1);
                for n in 2..=r.n_max {
                    gs.push(
                        corr::nth_order_gm(n, alpha, r.convention)
                            .map_err(numerical(format!("G_{n} at alpha={alpha}")))?,
                    );
                }
                let ggm = corr::ggm_infinite(alpha, r.n_max, r.convention)
                    .map_err(numerical(format!("GGM at alpha={alpha}")))?;
                let energy = model::ground_energy_per_site(alpha);
                Ok(Row { gs, ggm, energy })
            })
            .collect()
    });
    let rows = rows?;

    let mut columns: Vec<String> = vec!["alpha".into(), "C".into(), "dC_dalpha".into()];
    for n in 2..=r.n_max {
        columns.push(format!("G{n}"));
    }
    columns.push("GGM".into());
    columns.push("E0_per_site".into());
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();

    let extra = vec![
        "concurrence unit: ebits".to_string(),
        "derivative stencil: central differences interior, one-sided ends".to_string(),
    ];
    let mut csv = Csv::new(&r.echo(), &extra, &column_refs);
    let deriv = concurrence
        .derivative
        .as_ref()
        .expect("derivative computed");
    for (i, row) in rows.iter().enumerate() {
        let mut cells = vec![num(grid[i]), num(concurrence.values[i]), num(deriv[i])];
        cells.extend(row.gs.iter().map(|&g| num(g)));
        cells.push(num(row.ggm));
        cells.push(num(row.energy));
        csv.row(&cells);
    }
    output::emit(r.out.as_deref(), &csv.finish())
}

// ---------------------------------------------------------------------------
// table-an
// ---------------------------------------------------------------------------

pub fn table_an(r: &Resolved) -> Result<(), AppError> {
    let mut csv = Csv::new(&r.echo(), &[], &["n", "A_n"]);
    for n in 2..=r.n_max {
        let a = corr::asymptotic_constant(n).map_err(numerical(format!("A_{n}")))?;
        csv.row(&[n.to_string(), num(a)]);
    }
    output::emit(r.out.as_deref(), &csv.finish())
}

// ---------------------------------------------------------------------------
// finite-sweep
// ---------------------------------------------------------------------------

pub fn finite_sweep(r: &Resolved) -> Result<(), AppError> {
    let grid = grid_of(r)?;
    let pool = thread_pool(r.threads)?;
    let single = r.chain_sizes.len() == 1;
    for &sites in &r.chain_sizes {
        let sweeper =
            FiniteSweeper::new(sites, r.h_field).map_err(numerical(format!("N={sites}")))?;
        let points: Result<Vec<FinitePoint>, AppError> = pool.install(|| {
            grid.par_iter()
                .map(|&a| {
                    ggm::finite_point_lenient(&sweeper, a, r.bipartitions)
                        .map_err(numerical(format!("N={sites} alpha={a}")))
                })
                .collect()
        });
        let points = points?;
        let sweep = ggm::finite_sweep_with(&sweeper, &grid, &points, r.threshold_factor)
            .map_err(numerical(format!("N={sites} sweep assembly")))?;

        let transitions = {
            let flags =
                series::detect_discontinuity_flags(&grid, &sweep.ggm.values, r.threshold_factor)
                    .map_err(numerical(format!("N={sites} detector")))?;
            ggm::extract_transition_points_anchored(
                &flags,
                &sweep.near_closings,
                3.0 * r.alpha_step,
            )
        };

        let mut extra = vec![
            format!("chain sites: N = {sites}"),
            format!("gap near-closings: {}", join_nums(&sweep.near_closings)),
            format!(
                "ggm derivative discontinuities: {}",
                join_nums(&sweep.ggm.discontinuities)
            ),
            "derivative stencil: central differences interior, one-sided ends".to_string(),
        ];
        if let Some(f) = transitions.first {
            extra.push(format!("first transition marker: alpha = {}", num(f.alpha)));
        }
        if let Some(f) = transitions.second {
            extra.push(format!(
                "second transition marker: alpha = {}",
                num(f.alpha)
            ));
        }

        let columns = [
            "alpha",
            "E0",
            "gap",
            "magnetization",
            "GGM",
            "dGGM_dalpha",
            "discontinuity_flag",
        ];
        let mut csv = Csv::new(&r.echo(), &extra, &columns);
        let deriv = sweep.ggm.derivative.as_ref().expect("derivative computed");
        for (i, p) in points.iter().enumerate() {
            let flagged = sweep
                .ggm
                .discontinuities
                .iter()
                .any(|&a| (a - grid[i]).abs() < 0.25 * r.alpha_step);
            csv.row(&[
                num(grid[i]),
                num(p.energy),
                num(p.gap),
                num(p.magnetization),
                num(p.ggm),
                num(deriv[i]),
                if flagged { "1".into() } else { "0".into() },
            ]);
        }
        let path = output::per_chain_path(r.out.as_deref(), "finite-sweep", sites, single)?;
        output::emit(path.as_deref(), &csv.finish())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gap-scan
// ---------------------------------------------------------------------------

pub fn gap_scan(r: &Resolved) -> Result<(), AppError> {
    let grid = grid_of(r)?;
    let pool = thread_pool(r.threads)?;
    let single = r.chain_sizes.len() == 1;
    for &sites in &r.chain_sizes {
        let sweeper =
            FiniteSweeper::new(sites, r.h_field).map_err(numerical(format!("N={sites}")))?;
        let gaps: Result<Vec<f64>, AppError> = pool.install(|| {
            grid.par_iter()
                .map(|&alpha| {
                    sweeper
                        .ground(alpha)
                        .map(|g| g.gap)
                        .map_err(numerical(format!("N={sites} alpha={alpha}")))
                })
                .collect()
        });
        let gaps = gaps?;
        let scan = ed::gap_scan_with_values(&sweeper, &grid, gaps)
            .map_err(numerical(format!("N={sites} gap scan")))?;

        let extra = vec![
            format!("chain sites: N = {sites}"),
            format!("near-closing gap threshold: {}", num(ed::NEAR_CLOSING_GAP)),
            format!("near-closings: {}", join_nums(&scan.near_closings)),
        ];
        let columns = ["alpha", "gap", "near_closing_flag"];
        let mut csv = Csv::new(&r.echo(), &extra, &columns);
        for (i, &g) in scan.series.values.iter().enumerate() {
            let near = scan
                .near_closings
                .iter()
                .any(|&a| (a - grid[i]).abs() <= r.alpha_step);
            csv.row(&[
                num(grid[i]),
                num(g),
                if near { "1".into() } else { "0".into() },
            ]);
        }
        let path = output::per_chain_path(r.out.as_deref(), "gap-scan", sites, single)?;
        output::emit(path.as_deref(), &csv.finish())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// scaling-fit
// ---------------------------------------------------------------------------

pub struct ScalingArgs {
    pub points: Option<String>,
    pub files: Vec<std::path::PathBuf>,
    pub alpha_c: f64,
    pub which: WhichTransition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WhichTransition {
    First,
    Second,
}

pub fn scaling_fit(r: &Resolved, args: &ScalingArgs) -> Result<(), AppError> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    if let Some(spec) = &args.points {
        for item in spec.split(',') {
            let Some((n, a)) = item.split_once(':') else {
                return Err(AppError::Config(format!(
                    "--points entries look like N:alpha, got `{item}`"
                )));
            };
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|_| AppError::Config(format!("bad N in --points: `{n}`")))?;
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| AppError::Config(format!("bad alpha in --points: `{a}`")))?;
            points.push((n, a));
        }
    }
    for file in &args.files {
        points.push(transition_from_csv(file, args.which)?);
    }
    if points.is_empty() {
        return Err(AppError::Config(
            "scaling-fit needs --points and/or finite-sweep CSV files".into(),
        ));
    }

    let fit = ggm::fit_power_law(&points, args.alpha_c)
        .map_err(numerical("power-law fit".to_string()))?;

    let mut text = String::new();
    let _ = writeln!(text, "power-law fit: alpha_N ~ alpha_c + c * N^-p");
    let _ = writeln!(text, "  points   : {}", join_points(&points));
    let _ = writeln!(text, "  alpha_c  : {}", num(fit.alpha_c));
    let _ = writeln!(text, "  exponent : {}", num(fit.exponent));
    let _ = writeln!(text, "  prefactor: {}", num(fit.prefactor));
    let _ = writeln!(text, "  r_squared: {}", num(fit.r_squared));

    let record = serde_json::json!({
        "kind": "scaling-fit",
        "alpha_c": fit.alpha_c,
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "r_squared": fit.r_squared,
        "points": points.iter().map(|&(n, a)| vec![n, a]).collect::<Vec<_>>(),
    });
    let json_line = format!("{record}\n");

    match &r.out {
        Some(path) => {
            print!("{text}");
            std::fs::write(path, &json_line)
                .map_err(|e| AppError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            print!("{text}");
            print!("{json_line}");
        }
    }
    Ok(())
}

/// Pull (N, transition alpha) out of a finite-sweep CSV: N from the header
/// echo, the location from the recorded transition markers.
fn transition_from_csv(path: &Path, which: WhichTransition) -> Result<(f64, f64), AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut sites: Option<f64> = None;
    let mut alpha: Option<f64> = None;
    let marker = match which {
        WhichTransition::First => "# first transition marker: alpha = ",
        WhichTransition::Second => "# second transition marker: alpha = ",
    };
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# chain sites: N = ") {
            sites = rest.trim().parse().ok();
        }
        if let Some(rest) = line.strip_prefix(marker) {
            alpha = rest.trim().parse().ok();
        }
    }
    match (sites, alpha) {
        (Some(n), Some(a)) => Ok((n, a)),
        (None, _) => Err(AppError::Config(format!(
            "{}: no chain-size header line",
            path.display()
        ))),
        (_, None) => Err(AppError::Config(format!(
            "{}: no {} transition marker (was the sweep grid too coarse?)",
            path.display(),
            match which {
                WhichTransition::First => "first",
                WhichTransition::Second => "second",
            }
        ))),
    }
}

fn join_nums(v: &[f64]) -> String {
    if v.is_empty() {
        return "none".to_string();
    }
    let strs: Vec<String> = v.iter().map(|&x| num(x)).collect();
    strs.join(" ")
}

fn join_points(v: &[(f64, f64)]) -> String {
    let strs: Vec<String> = v.iter().map(|&(n, a)| format!("({n}, {a})")).collect();
    strs.join(" ")
}

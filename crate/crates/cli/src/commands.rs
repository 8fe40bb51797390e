use aim_core::closed_form::{alpha_samples, exact_energy, reconstruct_solution};
use aim_core::eigensolver::{resolve_x0, scan, solve_spectrum, EigenvalueResult, SolverConfig, X0Policy};
use aim_core::oracle::oracle_spectrum;
use aim_core::problems::AsymptoticFactor;
use aim_core::{Error, Problem, Result};
use rayon::prelude::*;

use crate::args::{ReconstructArgs, SolveArgs, TableArgs, VerifyArgs};
use crate::output::{csv_bytes, emit, render_rows, render_table, Row};
use crate::args::Format;
use crate::resolve;

/// Process exit status for a run that completed but flagged a problem.
pub const EXIT_FLAGGED: i32 = 2;

fn io_err(e: std::io::Error) -> Error {
    Error::Usage(format!("cannot write output: {e}"))
}

fn echo(settings: &[(String, String)]) {
    for (k, v) in settings {
        eprintln!("# {k}={v}");
    }
}

fn row(p: &Problem, level: usize, r: &EigenvalueResult) -> Row {
    Row {
        problem: p.name().into(),
        param_json: p.params_json(),
        level: Some(level),
        e_aim: Some(r.energy),
        e_exact: exact_energy(p, level as u32),
        delta_residual: Some(r.delta_residual),
        n_iter: Some(r.n_used),
        x0: Some(r.x0_used),
        stabilized: Some(r.stabilized),
        ..Row::default()
    }
}

fn write_rows(rows: &[Row], out: &crate::args::OutputArgs) -> Result<()> {
    let bytes = render_rows(rows, out.format).map_err(io_err)?;
    emit(&bytes, out.out.as_deref()).map_err(io_err)
}

fn setup(args: &SolveArgs) -> Result<(Problem, SolverConfig)> {
    let p = resolve::problem(&args.problem)?;
    if !p.is_eigenproblem() {
        return Err(Error::Usage(format!(
            "{} has no energy parameter; use `aim reconstruct`",
            p.name()
        )));
    }
    let cfg = resolve::solver(&args.solver, &p)?;
    echo(&resolve::describe(&p, &cfg));
    Ok((p, cfg))
}

fn warn_short(found: usize, wanted: usize) {
    if found < wanted {
        eprintln!("warning: found {found} of {wanted} levels below the energy window limit");
    }
}

pub fn solve(args: &SolveArgs) -> Result<i32> {
    let (p, cfg) = setup(args)?;
    let roots = solve_spectrum(&p, &cfg, args.levels)?;
    warn_short(roots.len(), args.levels);
    let rows: Vec<Row> = roots.iter().enumerate().map(|(i, r)| row(&p, i, r)).collect();
    write_rows(&rows, &args.output)?;
    let unstable = roots.iter().filter(|r| !r.stabilized).count();
    if unstable > 0 {
        eprintln!("warning: {unstable} level(s) did not stabilize over the last depths");
        return Ok(EXIT_FLAGGED);
    }
    Ok(0)
}

pub fn scan_cmd(args: &SolveArgs) -> Result<i32> {
    let (p, cfg) = setup(args)?;
    let report = scan(&p, &cfg)?;
    for (e, err) in &report.skipped {
        eprintln!("warning: skipped E = {e}: {err}");
    }
    let x0 = match cfg.x0_policy {
        X0Policy::S0Zero => None,
        policy => resolve_x0(&p, policy, 0.0).ok(),
    };
    let rows: Vec<Row> = report
        .brackets
        .iter()
        .take(args.levels)
        .enumerate()
        .map(|(i, b)| Row {
            problem: p.name().into(),
            param_json: p.params_json(),
            level: Some(i),
            e_aim: Some(b.mid()),
            e_exact: exact_energy(&p, i as u32),
            n_iter: Some(cfg.max_iter),
            x0,
            ..Row::default()
        })
        .collect();
    write_rows(&rows, &args.output)?;
    Ok(0)
}

pub fn verify(args: &VerifyArgs) -> Result<i32> {
    let (p, cfg) = setup(&args.solve)?;
    if !(args.check_tol > 0.0) {
        return Err(Error::Usage(format!("--check-tol = {} must be positive", args.check_tol)));
    }
    let levels = args.solve.levels;
    let (roots, oracle) = rayon::join(
        || solve_spectrum(&p, &cfg, levels),
        || oracle_spectrum(&p, levels, args.oracle.rmax, args.oracle.oracle_m),
    );
    let (roots, oracle) = (roots?, oracle?);
    warn_short(roots.len(), levels);
    let mut worst = 0.0_f64;
    let rows: Vec<Row> = roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = row(&p, i, r);
            row.e_oracle = oracle.get(i).copied();
            if let Some(reference) = row.e_exact.or(row.e_oracle) {
                worst = worst.max((r.energy - reference).abs());
            }
            row
        })
        .collect();
    write_rows(&rows, &args.solve.output)?;
    let ok = worst <= args.check_tol && roots.len() == levels;
    eprintln!(
        "# max |E_aim - reference| = {worst:.3e} (tolerance {:.1e}): {}",
        args.check_tol,
        if ok { "ok" } else { "FAILED" }
    );
    Ok(if ok { 0 } else { EXIT_FLAGGED })
}

struct TableJob {
    problem: Problem,
    cfg: SolverConfig,
}

fn table_config(p: &Problem, args: &TableArgs, default_iters: usize) -> Result<SolverConfig> {
    let max_iter = args.iters.unwrap_or(default_iters);
    let cfg = SolverConfig {
        max_iter,
        jet_order: args.order,
        root_tol: args.tol,
        stab_window: 3.min(max_iter),
        ..SolverConfig::for_problem(p)
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run_table(jobs: Vec<TableJob>, levels: usize, args: &TableArgs) -> Result<i32> {
    if let Some(first) = jobs.first() {
        eprintln!("# iters={}", first.cfg.max_iter);
        eprintln!("# order={}", first.cfg.order());
        if !args.no_oracle {
            eprintln!("# oracle_m={} rmax={}", args.oracle.oracle_m, args.oracle.rmax);
        }
    }
    let results: Vec<Result<Vec<Row>>> = jobs
        .par_iter()
        .map(|job| {
            let p = &job.problem;
            let roots = solve_spectrum(p, &job.cfg, levels)?;
            let oracle = if args.no_oracle {
                Vec::new()
            } else {
                oracle_spectrum(p, levels, args.oracle.rmax, args.oracle.oracle_m)?
            };
            Ok(roots
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut rw = row(p, i, r);
                    rw.e_oracle = oracle.get(i).copied();
                    rw
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    write_rows(&rows, &args.output)?;
    Ok(0)
}

pub fn table1(args: &TableArgs) -> Result<i32> {
    let a = args.a.unwrap_or(10.0);
    let jobs = (2..=10)
        .map(|n_dim| {
            let problem = Problem::spiked_in_dimension(n_dim, 0, a, 1.9)?;
            let cfg = table_config(&problem, args, 12)?;
            Ok(TableJob { problem, cfg })
        })
        .collect::<Result<Vec<_>>>()?;
    run_table(jobs, 1, args)
}

pub fn table2(args: &TableArgs) -> Result<i32> {
    if args.a.is_some() {
        eprintln!("warning: table2 sweeps A itself; --A is ignored");
    }
    let mut jobs = Vec::new();
    for a in [0.001, 0.01, 0.1, 1.0] {
        for gamma in [3.0, 4.0, 5.0] {
            let problem = Problem::spiked(gamma, a, 4.0)?;
            let base = table_config(&problem, args, 20)?;
            let cfg = SolverConfig {
                e_min: 2.0 * gamma + 2.0,
                e_max: 2.0 * gamma + 4.0,
                ..base
            };
            jobs.push(TableJob { problem, cfg });
        }
    }
    run_table(jobs, 1, args)
}

pub fn table3(args: &TableArgs) -> Result<i32> {
    let problem = Problem::quartic(args.a.unwrap_or(0.1))?;
    let cfg = table_config(&problem, args, 40)?;
    run_table(vec![TableJob { problem, cfg }], 6, args)
}

fn level_energy(p: &Problem, args: &ReconstructArgs, iters: usize) -> Result<f64> {
    if let Some(e) = args.energy {
        return Ok(e);
    }
    if let Some(e) = exact_energy(p, args.level as u32) {
        return Ok(e);
    }
    let cfg = SolverConfig {
        max_iter: iters,
        jet_order: args.order,
        stab_window: 3.min(iters),
        ..SolverConfig::for_problem(p)
    };
    let roots = solve_spectrum(p, &cfg, args.level + 1)?;
    roots
        .get(args.level)
        .map(|r| r.energy)
        .ok_or_else(|| Error::NoSignChange(format!("level {} not found below E = {}", args.level, cfg.e_max)))
}

pub fn reconstruct(args: &ReconstructArgs) -> Result<i32> {
    let p = resolve::problem(&args.problem)?;
    if args.points < 3 {
        return Err(Error::Usage(format!("--points = {} must be at least 3", args.points)));
    }
    if !(args.xmin < args.xmax) {
        return Err(Error::Usage(format!(
            "--xmin = {} must be below --xmax = {}",
            args.xmin, args.xmax
        )));
    }
    let iters = args.iters.unwrap_or(resolve::DEFAULT_ITERS);
    let order = args.order.unwrap_or(2 * iters + 8);
    if order < iters {
        return Err(Error::Usage(format!("jet order {order} cannot support {iters} iterations")));
    }
    let energy = if p.is_eigenproblem() {
        Some(level_energy(&p, args, iters)?)
    } else {
        None
    };
    let e = energy.unwrap_or(0.0);
    eprintln!("# problem={}", p.name());
    eprintln!("# params={}", p.params_json());
    if let Some(e) = energy {
        eprintln!("# energy={e}");
    }
    eprintln!("# iters={iters}");
    eprintln!("# order={order}");

    let m = args.points;
    let xs: Vec<f64> = (0..m)
        .map(|i| args.xmin + (args.xmax - args.xmin) * i as f64 / (m - 1) as f64)
        .collect();
    let alpha = alpha_samples(|x| p.build_coefficients(e, x, order), iters, &xs)?;
    let lambda0 = |x: f64| {
        p.build_coefficients(e, x, 0)
            .map(|(l, _)| l.value())
            .unwrap_or(f64::NAN)
    };
    let envelope = match p {
        Problem::Hermite { .. } => AsymptoticFactor {
            power: 0.0,
            gaussian: true,
        },
        _ => p.asymptotic_factor(),
    };
    let rec = reconstruct_solution(lambda0, &alpha, &xs, args.c1, args.c2, Some(envelope))?;
    let header = ["x", "y", "psi"];
    let cells: Vec<Vec<String>> = rec
        .xs
        .iter()
        .zip(rec.y_vals.iter().zip(&rec.psi_vals))
        .map(|(x, (y, psi))| match args.output.format {
            Format::Csv => vec![x.to_string(), y.to_string(), psi.to_string()],
            Format::Table => vec![format!("{x:.6}"), format!("{y:.12e}"), format!("{psi:.12e}")],
        })
        .collect();
    let bytes = match args.output.format {
        Format::Csv => csv_bytes(&header, &cells).map_err(io_err)?,
        Format::Table => render_table(&header, &cells).into_bytes(),
    };
    emit(&bytes, args.output.out.as_deref()).map_err(io_err)?;
    Ok(0)
}

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use adaptive_mls::experiments::{
    evaluate_many, run_convergence_pair, run_discontinuity, ErrorReport, Method, OperatorParams,
    TestFunction,
};
use adaptive_mls::format::{self, curve_csv_for, error_report_csv, overshoot_csv};
use adaptive_mls::selftest::{self, SelftestOptions};
use adaptive_mls::{KernelKind, PartitionCover, PuConfig, Samples, WeightKernel};

use crate::input::{evaluation_points, read_xy};
use crate::settings::{Destination, Settings, UsageError};

fn operator_params(s: &Settings, kernel: WeightKernel, degree: usize) -> Result<OperatorParams> {
    Ok(OperatorParams {
        kernel,
        degree,
        gamma: s.gamma_for(&kernel)?,
        t: s.t()?,
        eps_weno: s.eps()?,
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_stdout(content: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(content.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Fits user data and writes `x,value_linear,value_nonlinear`.
pub fn approx(s: &Settings) -> Result<()> {
    let input = s
        .path("in")
        .ok_or_else(|| UsageError("approx needs --in FILE (`-` for stdin)".into()))?;
    let (xs, fs) = if input.as_os_str() == "-" {
        read_xy(io::stdin().lock(), "<stdin>")?
    } else {
        let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
        read_xy(BufReader::new(file), &input.display().to_string())?
    };
    let samples = Samples::new(xs, fs).context("invalid input data")?;

    let kernels = s.kernels(KernelKind::Wendland2)?;
    let [kernel] = kernels.as_slice() else {
        return Err(UsageError("approx takes a single --kernel".into()).into());
    };
    let degree: usize = s.parse_or("degree", 2)?;
    let params = operator_params(s, *kernel, degree)?;
    let config = PuConfig::new(params.kernel, degree, params.gamma)
        .with_t(params.t)
        .with_eps(params.eps_weno);
    let cover = PartitionCover::build(samples, config).context("cannot build the partition of unity")?;
    let zs = evaluation_points(s.raw("eval"), cover.samples().nodes())?;
    let evals = evaluate_many(&cover, &zs)?;

    let mut out = String::from("x,value_linear,value_nonlinear\n");
    for b in &evals {
        let _ = writeln!(
            out,
            "{},{},{}",
            format::full(b.x),
            format::full(b.value_linear),
            format::full(b.value_nonlinear)
        );
    }
    match Destination::from_setting(s.path("out")) {
        Destination::Stdout => write_stdout(&out),
        Destination::File(path) => write_file(&path, &out),
        Destination::Directory(dir) => {
            prepare_dir(&dir)?;
            write_file(&dir.join("approx.csv"), &out)
        }
    }
}

/// Mean of the last (up to) three rates.
fn tail_rate(report: &ErrorReport) -> Option<f64> {
    let rates: Vec<f64> = report.rows.iter().filter_map(|r| r.rate).collect();
    let tail = &rates[rates.len().saturating_sub(3)..];
    (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
}

fn summary_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from("method,kernel,degree,grid,levels,final_mae,mean_rate\n");
    for r in reports {
        let (first, last) = (r.rows.first().unwrap(), r.rows.last().unwrap());
        let _ = writeln!(
            out,
            "{},{},{},{},{}-{},{},{}",
            r.method,
            r.kernel,
            r.degree,
            r.grid,
            first.level,
            last.level,
            format::sci5(last.mae),
            tail_rate(r).map(format::rate).unwrap_or_default()
        );
    }
    out
}

/// Error tables of SIN for every requested kernel, degree and method.
pub fn convergence(s: &Settings) -> Result<()> {
    let kernels = s.kernels(KernelKind::Wendland2)?;
    let degrees: Vec<usize> = s.list("degree", &[2])?;
    let methods = s.methods()?;
    let levels = s.levels("7-10")?;
    let grid = s.grid()?;

    let mut reports = Vec::new();
    for kernel in &kernels {
        for &degree in &degrees {
            let params = operator_params(s, *kernel, degree)?;
            let (lin, nl) = run_convergence_pair(&params, &levels, grid)
                .with_context(|| format!("{} degree {degree}", kernel.kind()))?;
            for method in &methods {
                reports.push(match method {
                    Method::Linear => lin.clone(),
                    Method::Nonlinear => nl.clone(),
                });
            }
        }
    }

    match Destination::from_setting(s.path("out")) {
        Destination::Stdout if reports.len() == 1 => write_stdout(&error_report_csv(&reports[0])),
        Destination::Stdout => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "# {} {}", r.label(), r.grid);
                out.push_str(&error_report_csv(r));
            }
            out.push_str("# summary\n");
            out.push_str(&summary_csv(&reports));
            write_stdout(&out)
        }
        Destination::File(path) if reports.len() == 1 => write_file(&path, &error_report_csv(&reports[0])),
        Destination::File(path) => Err(UsageError(format!(
            "{} combinations need a directory for --out, got {}",
            reports.len(),
            path.display()
        ))
        .into()),
        Destination::Directory(dir) => {
            prepare_dir(&dir)?;
            for r in &reports {
                write_file(&dir.join(format!("{}_{}.csv", r.label(), r.grid)), &error_report_csv(r))?;
            }
            write_file(&dir.join("summary.csv"), &summary_csv(&reports))
        }
    }
}

/// Overshoot table for `g` or `z`, plus sampled curves when writing to a directory.
pub fn discontinuity(s: &Settings) -> Result<()> {
    let func = s.func(TestFunction::G)?;
    if !func.has_jump() {
        bail!(UsageError(format!("--func {func} has no jump; use g or z")));
    }
    let kernels = s.kernels(KernelKind::Wendland2)?;
    let degrees: Vec<usize> = s.list("degree", &[2])?;
    let methods = s.methods()?;
    let level: u32 = s.parse_or("level", 9)?;
    if !(1..=24).contains(&level) {
        bail!(UsageError(format!("--level {level} outside 1..=24")));
    }
    let spec = s.grid()?.at_level(level);
    let dest = Destination::from_setting(s.path("out"));
    let curve_points: usize = match dest {
        Destination::Directory(_) => s.parse_or("curve-points", 2001)?,
        _ => 0,
    };

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for kernel in &kernels {
        for &degree in &degrees {
            let params = operator_params(s, *kernel, degree)?;
            let result = run_discontinuity(func, &params, &spec, curve_points)
                .with_context(|| format!("{} degree {degree}", kernel.kind()))?;
            for &method in &methods {
                rows.push(result.report(method).clone());
            }
            curves.push((kernel.kind(), degree, result.curve));
        }
    }
    let table = overshoot_csv(&rows);

    match dest {
        Destination::Stdout => write_stdout(&table),
        Destination::File(path) => write_file(&path, &table),
        Destination::Directory(dir) => {
            prepare_dir(&dir)?;
            write_file(&dir.join("overshoot.csv"), &table)?;
            if let Some((_, _, curve)) = curves.first() {
                write_file(&dir.join(format!("{func}_exact.csv")), &curve_csv_for(curve, |p| p.exact))?;
            }
            for (kind, degree, curve) in &curves {
                for &method in &methods {
                    let prefix = match method {
                        Method::Linear => "MLSPU",
                        Method::Nonlinear => "NL-MLSPU",
                    };
                    let name = format!("{prefix}{degree}_{kind}_{func}.csv");
                    write_file(&dir.join(name), &curve_csv_for(curve, |p| method_value(method, p)))?;
                }
            }
            Ok(())
        }
    }
}

fn method_value(method: Method, p: &adaptive_mls::experiments::CurvePoint) -> f64 {
    match method {
        Method::Linear => p.linear,
        Method::Nonlinear => p.nonlinear,
    }
}

/// Runs the built-in suites. Returns whether all of them passed.
pub fn selftest(corrupt_indicators: bool) -> Result<bool> {
    let results = selftest::run(&SelftestOptions { corrupt_indicators });
    let mut out = String::new();
    for r in &results {
        let _ = writeln!(
            out,
            "{:<24} {} ({}) [{:.2}s]",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail,
            r.elapsed.as_secs_f64()
        );
    }
    let passed = results.iter().all(|r| r.passed);
    let failed = results.iter().filter(|r| !r.passed).count();
    if passed {
        out.push_str("all suites passed\n");
    } else {
        let _ = writeln!(out, "{failed} of {} suites failed", results.len());
    }
    write_stdout(&out)?;
    Ok(passed)
}

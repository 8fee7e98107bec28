use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::Local;
use lattice_kc::config::{FieldFormat, RunConfig, SweepParameter};
use lattice_kc::field_io;
use lattice_kc::kernel::{fundamental_octant, required_table_radius, CacheStatus};
use lattice_kc::verify::{run_suite, suite_csv, suite_summary, suite_table_radius};
use lattice_kc::{EnergyModel, GreenKernel, KernelCache, ProblemSpec, SolveReport};

use crate::Failure;

/// Fresh `run/<timestamp>` directory holding a snapshot of the config.
fn run_dir(config: &RunConfig) -> Result<PathBuf, Failure> {
    let stamp = Local::now().format("%Y%m%dT%H%M%S%.3f").to_string();
    let mut dir = config.output.directory.join(&stamp);
    let mut k = 1;
    while dir.exists() {
        dir = config.output.directory.join(format!("{stamp}-{k}"));
        k += 1;
    }
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.snapshot"), config.to_text())?;
    Ok(dir)
}

fn kernel_for(config: &RunConfig, alpha: f64, need: usize) -> Result<GreenKernel, Failure> {
    let radius = config.kernel.table_radius.unwrap_or(need);
    if radius < need {
        return Err(Failure::Config(lattice_kc::Error::KernelTooSmall { have: radius, need }));
    }
    let cache = KernelCache::new(&config.kernel.cache_dir);
    let (kernel, status) = cache.load_or_build(alpha, radius, config.kernel.method, config.kernel.resolution())?;
    let path = cache.path_for(alpha, radius, config.kernel.method, config.kernel.resolution());
    let label = match status {
        CacheStatus::Cached => "cached",
        CacheStatus::Built => "built",
    };
    println!(
        "kernel alpha={alpha} table_radius={radius} method={}: {label} ({})",
        config.kernel.method.as_str(),
        path.display()
    );
    Ok(kernel)
}

pub fn green(config: &RunConfig) -> Result<(), Failure> {
    let alpha = config.problem.alpha;
    let kernel = kernel_for(config, alpha, required_table_radius(&config.problem.lattice))?;
    let dir = run_dir(config)?;
    let mut csv = String::from("z1,z2,z3,R_alpha\n");
    for z in fundamental_octant(kernel.table_radius()) {
        let _ = writeln!(csv, "{},{},{},{:.17e}", z.0[0], z.0[1], z.0[2], kernel.value(z).unwrap());
    }
    fs::write(dir.join("kernel.csv"), csv)?;
    println!("K_alpha = {:.15}", kernel.k_alpha());
    let m = kernel.table_radius();
    let (lo, hi) = if m >= 30 { (10, 30) } else { ((m / 3).max(2), m) };
    match kernel.fit_axis_decay(lo, hi) {
        Some((slope, prefactor)) => println!(
            "decay exponent = {slope:.4} on |z| in [{lo}, {hi}] (alpha - 3 = {}), prefactor {prefactor:.4}",
            alpha - 3.0
        ),
        None => println!("decay exponent: table radius {m} too small to fit"),
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn solve_spec(config: &RunConfig, spec: &ProblemSpec) -> Result<SolveReport, Failure> {
    let kernel = kernel_for(config, spec.alpha, required_table_radius(&spec.lattice))?;
    let model = EnergyModel::new(spec, &kernel)?;
    Ok(lattice_kc::solve_ground_state(&model, &config.solve)?)
}

fn write_solution(config: &RunConfig, dir: &Path, report: &SolveReport) -> Result<(), Failure> {
    for format in &config.output.formats {
        match format {
            FieldFormat::Text => field_io::save_text(&report.solution, &dir.join("solution.field"))?,
            FieldFormat::Binary => field_io::save_binary(&report.solution, &dir.join("solution.bin"))?,
        }
    }
    fs::write(dir.join("report.txt"), report.to_text(&config.problem))?;
    fs::write(dir.join("history.csv"), report.history_csv())?;
    Ok(())
}

/// Invariants a converged report must satisfy, as messages for the violated ones.
fn invariant_violations(spec: &ProblemSpec, report: &SolveReport) -> Vec<String> {
    let mut out = Vec::new();
    if !report.converged {
        out.push(format!(
            "residual {:e} above tolerance after {} iterations",
            report.residual, report.iterations
        ));
    }
    if report.nehari_defect > 1e-8 {
        out.push(format!("nehari defect {:e}", report.nehari_defect));
    }
    if !(report.energy > 0.0) {
        out.push(format!("level {} is not positive", report.energy));
    }
    if !report.respects_level_bound(spec.nonlinearity.theta()) {
        out.push("level below (1/2 - 1/theta) eta^2".into());
    }
    out
}

pub fn solve(config: &RunConfig) -> Result<(), Failure> {
    let report = solve_spec(config, &config.problem)?;
    let dir = run_dir(config)?;
    write_solution(config, &dir, &report)?;
    print!("{}", report.to_text(&config.problem));
    println!("wrote {}", dir.display());
    let violations = invariant_violations(&config.problem, &report);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::NotConverged(violations.join("; ")))
    }
}

pub fn verify(config: &RunConfig) -> Result<(), Failure> {
    let spec = &config.problem;
    let kernel = kernel_for(config, spec.alpha, suite_table_radius(spec, &config.verify))?;
    let (reports, solved) = run_suite(spec, &kernel, &config.solve, &config.verify)?;
    let dir = run_dir(config)?;
    fs::write(dir.join("suite.csv"), suite_csv(&reports))?;
    if let Some(report) = &solved {
        write_solution(config, &dir, report)?;
    }
    print!("{}", suite_summary(&reports));
    println!("wrote {}", dir.display());
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed))
    }
}

pub fn sweep(config: &RunConfig) -> Result<(), Failure> {
    let Some(sweep) = &config.sweep else {
        return Err(Failure::Config(lattice_kc::Error::Config {
            line: 0,
            message: "sweep needs a [sweep] section with `parameter` and `values`".into(),
        }));
    };
    let dir = run_dir(config)?;
    let name = sweep.parameter.as_str();
    let mut csv = String::from("param,value,energy,residual,norm,iterations\n");
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for &value in &sweep.values {
        let result = sweep
            .apply(&config.problem, value)
            .map_err(Failure::from)
            .and_then(|spec| solve_spec(config, &spec).map(|r| (spec, r)));
        match result {
            Ok((spec, report)) => {
                let _ = writeln!(
                    csv,
                    "{name},{value},{:.16e},{:.6e},{:.16e},{}",
                    report.energy, report.residual, report.norm, report.iterations
                );
                let violations = invariant_violations(&spec, &report);
                if violations.is_empty() {
                    points.push((value, report.energy));
                } else {
                    failures.push(format!("{name}={value}: {}", violations.join("; ")));
                }
            }
            Err(e) => {
                let _ = writeln!(csv, "{name},{value},nan,nan,nan,0");
                failures.push(format!("{name}={value}: {e}"));
            }
        }
    }
    let mut notes = Vec::new();
    let mut broken = false;
    if points.len() >= 2 {
        let nondecreasing = points.windows(2).all(|w| w[0].1 <= w[1].1 + 1e-6 * w[1].1.abs());
        let nonincreasing = points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-6 * w[0].1.abs());
        let trend = match (nondecreasing, nonincreasing) {
            (true, true) => "constant",
            (true, false) => "nondecreasing",
            (false, true) => "nonincreasing",
            (false, false) => "not monotone",
        };
        notes.push(format!("c is {trend} in {name} over the converged points"));
        let sorted = sweep.values.windows(2).all(|w| w[0] <= w[1]);
        if sweep.parameter == SweepParameter::B && sorted {
            if nondecreasing {
                notes.push("c(b1) <= c(b2) for b1 <= b2 holds".into());
            } else {
                notes.push("VIOLATION: c decreases as b grows".into());
                broken = true;
            }
        }
    }
    for f in &failures {
        notes.push(format!("point failed: {f}"));
    }
    for n in &notes {
        let _ = writeln!(csv, "# {n}");
    }
    fs::write(dir.join("sweep.csv"), &csv)?;
    print!("{csv}");
    println!("wrote {}", dir.display());
    if broken {
        Err(Failure::Verify(vec!["b-monotonicity".into()]))
    } else if !failures.is_empty() {
        Err(Failure::NotConverged(failures.join("; ")))
    } else {
        Ok(())
    }
}

//! Run configuration in a sectioned `key = value` format.
//!
//! ```text
//! # comment
//! [problem]
//! a = 1
//! b = 1
//! alpha = 1
//! radius = 8
//! boundary = dirichlet        # or periodic
//!
//! [potential]
//! kind = coercive             # constant | coercive | periodic
//! v0 = 1
//! center = 0,0,0              # coercive
//! rate = 1                    # coercive
//! exponent = 2                # coercive
//! period = 2                  # periodic
//! table = 2,3,3,2,3,2,2,3     # periodic, period³ values
//!
//! [nonlinearity]
//! c = 1
//! p = 3
//! theta = 6                   # optional, defaults to 2p
//!
//! [solver]
//! max_iterations = 5000
//! gradient_tolerance = 1e-8
//! backtrack = 0.5
//! armijo = 1e-4
//! max_backtracks = 60
//! nehari_tolerance = 1e-10
//! seed = 42
//! initial_guess = gaussian_bump   # random | file:<path>
//!
//! [kernel]
//! table_radius = 20           # optional, defaults to what the run needs
//! method = heat_kernel        # or torus_quadrature
//! resolution = 48             # optional
//! cache_dir = kernel-cache
//!
//! [output]
//! directory = run
//! formats = text,binary
//!
//! [verify]
//! mountain_pass_trials = 100
//! hls_trials = 200
//! hls_radii = 4,6,8
//! ...
//!
//! [sweep]
//! parameter = b               # b | p | alpha | radius
//! values = 0,0.5,1
//! ```
//!
//! Every section and key is optional; missing keys take the defaults
//! shown. Unknown sections or keys, duplicates and invalid values are
//! errors carrying the offending line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::energy::{Nonlinearity, PotentialSpec, PowerLaw, ProblemSpec};
use crate::error::{Error, Result};
use crate::kernel::KernelMethod;
use crate::lattice::{BoundaryMode, Index3, LatticeBox};
use crate::solver::{InitialGuess, SolveConfig};
use crate::verify::VerifyConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Text,
    Binary,
}

impl FieldFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldFormat::Text => "text",
            FieldFormat::Binary => "binary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    /// `None` sizes the table to the run.
    pub table_radius: Option<usize>,
    pub method: KernelMethod,
    /// `None` takes the method's default.
    pub resolution: Option<usize>,
    pub cache_dir: PathBuf,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            table_radius: None,
            method: KernelMethod::HeatKernel,
            resolution: None,
            cache_dir: PathBuf::from("kernel-cache"),
        }
    }
}

impl KernelConfig {
    pub fn resolution(&self) -> usize {
        self.resolution.unwrap_or_else(|| self.method.default_resolution())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<FieldFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("run"),
            formats: vec![FieldFormat::Text],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    B,
    P,
    Alpha,
    Radius,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::B => "b",
            SweepParameter::P => "p",
            SweepParameter::Alpha => "alpha",
            SweepParameter::Radius => "radius",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "b" => Some(SweepParameter::B),
            "p" => Some(SweepParameter::P),
            "alpha" => Some(SweepParameter::Alpha),
            "radius" => Some(SweepParameter::Radius),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// `base` with the swept parameter set to `value`.
    pub fn apply(&self, base: &ProblemSpec, value: f64) -> Result<ProblemSpec> {
        let mut spec = base.clone();
        match self.parameter {
            SweepParameter::B => spec.b = value,
            SweepParameter::Alpha => spec.alpha = value,
            SweepParameter::P => {
                let Nonlinearity::Power(law) = &base.nonlinearity;
                // θ follows p when it was left at its default
                let theta = if law.theta == 2.0 * law.exponent { 2.0 * value } else { law.theta };
                spec.nonlinearity = Nonlinearity::Power(PowerLaw::with_theta(law.coefficient, value, theta)?);
            }
            SweepParameter::Radius => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("radius {value} is not a whole number")));
                }
                spec.lattice = LatticeBox::new(value as usize, base.lattice.mode());
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Everything one CLI invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub solve: SolveConfig,
    pub kernel: KernelConfig,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
    pub sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    /// The coercive model problem on a radius-8 box.
    fn default() -> Self {
        RunConfig {
            problem: ProblemSpec {
                a: 1.0,
                b: 1.0,
                alpha: 1.0,
                potential: PotentialSpec::Coercive {
                    v0: 1.0,
                    center: Index3::ORIGIN,
                    rate: 1.0,
                    exponent: 2.0,
                },
                nonlinearity: Nonlinearity::Power(PowerLaw {
                    coefficient: 1.0,
                    exponent: 3.0,
                    theta: 6.0,
                }),
                lattice: LatticeBox::dirichlet(8),
            },
            solve: SolveConfig::default(),
            kernel: KernelConfig::default(),
            output: OutputConfig::default(),
            verify: VerifyConfig::default(),
            sweep: None,
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("problem", &["a", "b", "alpha", "radius", "boundary"]),
    ("potential", &["kind", "v0", "center", "rate", "exponent", "period", "table"]),
    ("nonlinearity", &["c", "p", "theta"]),
    (
        "solver",
        &[
            "max_iterations",
            "gradient_tolerance",
            "backtrack",
            "armijo",
            "max_backtracks",
            "nehari_tolerance",
            "seed",
            "initial_guess",
        ],
    ),
    ("kernel", &["table_radius", "method", "resolution", "cache_dir"]),
    ("output", &["directory", "formats"]),
    (
        "verify",
        &[
            "seed",
            "mountain_pass_trials",
            "hls_trials",
            "hls_radii",
            "hls_stability",
            "fiber_trials",
            "fiber_grid",
            "level_samples",
            "level_tolerance",
            "box_radii",
            "box_tolerance",
            "translation_tolerance",
            "symmetry_tolerance",
        ],
    ),
    ("sweep", &["parameter", "values"]),
];

struct Entry {
    value: String,
    line: usize,
}

/// Raw `section.key -> value` view of a config file.
struct Document {
    entries: BTreeMap<(String, String), Entry>,
    sections: BTreeMap<String, usize>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut sections = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| config_error(line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(config_error(line, format!("unknown section [{name}]")));
                }
                if sections.insert(name.to_string(), line).is_some() {
                    return Err(config_error(line, format!("section [{name}] appears twice")));
                }
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(config_error(line, format!("expected `key = value`, found `{body}`")));
            };
            let section = current
                .as_deref()
                .ok_or_else(|| config_error(line, "key outside any section"))?;
            let key = key.trim();
            let known = SECTIONS.iter().find(|(s, _)| *s == section).unwrap().1;
            if !known.contains(&key) {
                return Err(config_error(line, format!("unknown key `{key}` in [{section}]")));
            }
            let entry = Entry {
                value: value.trim().to_string(),
                line,
            };
            if entries.insert((section.to_string(), key.to_string()), entry).is_some() {
                return Err(config_error(line, format!("duplicate key `{key}` in [{section}]")));
            }
        }
        Ok(Document { entries, sections })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    /// Line to blame for a whole-section problem.
    fn section_line(&self, section: &str) -> usize {
        self.sections.get(section).copied().unwrap_or(0)
    }

    fn parsed<T>(&self, section: &str, key: &str, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => parse(&e.value)
                .map(Some)
                .ok_or_else(|| config_error(e.line, format!("`{key}` must be {what}, found `{}`", e.value))),
        }
    }

    fn real(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self
            .parsed(section, key, |s| s.parse::<f64>().ok().filter(|v| v.is_finite()), "a finite number")?
            .unwrap_or(default))
    }

    fn count(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        Ok(self
            .parsed(section, key, |s| s.parse::<usize>().ok(), "a nonnegative integer")?
            .unwrap_or(default))
    }

    fn positive_count(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        Ok(self
            .parsed(section, key, |s| s.parse::<usize>().ok().filter(|v| *v > 0), "a positive integer")?
            .unwrap_or(default))
    }

    fn reals(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.parsed(section, key, |s| split_list(s, |t| t.parse::<f64>().ok().filter(|v| v.is_finite())), "a comma-separated list of numbers")
    }

    fn counts(&self, section: &str, key: &str) -> Result<Option<Vec<usize>>> {
        self.parsed(section, key, |s| split_list(s, |t| t.parse::<usize>().ok()), "a comma-separated list of integers")
    }

    /// Runs `check`, anchoring any error at `key`'s line (or the section header).
    fn anchored<T>(&self, section: &str, key: &str, check: impl FnOnce() -> Result<T>) -> Result<T> {
        check().map_err(|e| {
            let line = self
                .get(section, key)
                .map(|e| e.line)
                .unwrap_or_else(|| self.section_line(section));
            config_error(line, e.to_string())
        })
    }
}

fn split_list<T>(s: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    let v: Option<Vec<T>> = s.split(',').map(|t| item(t.trim())).collect();
    v.filter(|v| !v.is_empty())
}

fn config_error(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let base = RunConfig::default();
        let problem = parse_problem(&doc, &base.problem)?;
        let solve = parse_solver(&doc)?;
        let kernel = parse_kernel(&doc)?;
        let output = parse_output(&doc)?;
        let verify = parse_verify(&doc)?;
        let sweep = parse_sweep(&doc, &problem)?;
        Ok(RunConfig {
            problem,
            solve,
            kernel,
            output,
            verify,
            sweep,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Canonical text; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.problem;
        let _ = writeln!(out, "[problem]");
        let _ = writeln!(out, "a = {:?}\nb = {:?}\nalpha = {:?}", p.a, p.b, p.alpha);
        let _ = writeln!(out, "radius = {}\nboundary = {}", p.lattice.radius(), p.lattice.mode().as_str());
        let _ = writeln!(out, "\n[potential]");
        match &p.potential {
            PotentialSpec::Constant { v0 } => {
                let _ = writeln!(out, "kind = constant\nv0 = {v0:?}");
            }
            PotentialSpec::Coercive {
                v0,
                center,
                rate,
                exponent,
            } => {
                let c = center.0;
                let _ = writeln!(out, "kind = coercive\nv0 = {v0:?}\ncenter = {},{},{}", c[0], c[1], c[2]);
                let _ = writeln!(out, "rate = {rate:?}\nexponent = {exponent:?}");
            }
            PotentialSpec::Periodic { v0, period, table } => {
                let _ = writeln!(out, "kind = periodic\nv0 = {v0:?}\nperiod = {period}");
                let _ = writeln!(out, "table = {}", join(table.iter().map(|v| format!("{v:?}"))));
            }
        }
        let Nonlinearity::Power(law) = &p.nonlinearity;
        let _ = writeln!(
            out,
            "\n[nonlinearity]\nc = {:?}\np = {:?}\ntheta = {:?}",
            law.coefficient, law.exponent, law.theta
        );
        let s = &self.solve;
        let guess = match &s.initial_guess {
            InitialGuess::File(path) => format!("file:{}", path.display()),
            g => g.as_str().to_string(),
        };
        let _ = writeln!(
            out,
            "\n[solver]\nmax_iterations = {}\ngradient_tolerance = {:?}\nbacktrack = {:?}\narmijo = {:?}\nmax_backtracks = {}\nnehari_tolerance = {:?}\nseed = {}\ninitial_guess = {guess}",
            s.max_iterations, s.gradient_tolerance, s.backtrack, s.armijo, s.max_backtracks, s.nehari_tolerance, s.seed
        );
        let k = &self.kernel;
        let _ = writeln!(out, "\n[kernel]");
        if let Some(m) = k.table_radius {
            let _ = writeln!(out, "table_radius = {m}");
        }
        let _ = writeln!(out, "method = {}", k.method.as_str());
        if let Some(r) = k.resolution {
            let _ = writeln!(out, "resolution = {r}");
        }
        let _ = writeln!(out, "cache_dir = {}", k.cache_dir.display());
        let _ = writeln!(
            out,
            "\n[output]\ndirectory = {}\nformats = {}",
            self.output.directory.display(),
            join(self.output.formats.iter().map(|f| f.as_str().to_string()))
        );
        let v = &self.verify;
        let _ = writeln!(
            out,
            "\n[verify]\nseed = {}\nmountain_pass_trials = {}\nhls_trials = {}\nhls_radii = {}\nhls_stability = {:?}\nfiber_trials = {}\nfiber_grid = {}\nlevel_samples = {}\nlevel_tolerance = {:?}\nbox_radii = {}\nbox_tolerance = {:?}\ntranslation_tolerance = {:?}\nsymmetry_tolerance = {:?}",
            v.seed,
            v.mountain_pass_trials,
            v.hls_trials,
            join(v.hls_radii.iter().map(|r| r.to_string())),
            v.hls_stability,
            v.fiber_trials,
            v.fiber_grid,
            v.level_samples,
            v.level_tolerance,
            join(v.box_radii.iter().map(|r| r.to_string())),
            v.box_tolerance,
            v.translation_tolerance,
            v.symmetry_tolerance
        );
        if let Some(sw) = &self.sweep {
            let _ = writeln!(
                out,
                "\n[sweep]\nparameter = {}\nvalues = {}",
                sw.parameter.as_str(),
                join(sw.values.iter().map(|v| format!("{v:?}")))
            );
        }
        out
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(",")
}

fn parse_problem(doc: &Document, base: &ProblemSpec) -> Result<ProblemSpec> {
    let a = doc.real("problem", "a", base.a)?;
    doc.anchored("problem", "a", || positive("a", a))?;
    let b = doc.real("problem", "b", base.b)?;
    doc.anchored("problem", "b", || {
        if b >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("b must be nonnegative, got {b}")))
        }
    })?;
    let alpha = doc.real("problem", "alpha", base.alpha)?;
    doc.anchored("problem", "alpha", || {
        if alpha > 0.0 && alpha < 3.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("alpha must lie in (0, 3), got {alpha}")))
        }
    })?;
    let radius = doc.count("problem", "radius", base.lattice.radius())?;
    let mode = doc
        .parsed("problem", "boundary", BoundaryMode::parse, "dirichlet or periodic")?
        .unwrap_or(base.lattice.mode());
    let lattice = LatticeBox::new(radius, mode);

    let kind = doc
        .get("potential", "kind")
        .map(|e| e.value.as_str())
        .unwrap_or("coercive");
    let v0 = doc.real("potential", "v0", 1.0)?;
    let potential = doc.anchored("potential", "kind", || match kind {
        "constant" => PotentialSpec::constant(v0),
        "coercive" => {
            let center = doc
                .parsed(
                    "potential",
                    "center",
                    |s| split_list(s, |t| t.parse::<i64>().ok()).filter(|v| v.len() == 3),
                    "three comma-separated integers",
                )?
                .map(|c| Index3::new(c[0], c[1], c[2]))
                .unwrap_or(Index3::ORIGIN);
            let rate = doc.real("potential", "rate", 1.0)?;
            let exponent = doc.real("potential", "exponent", 2.0)?;
            PotentialSpec::coercive(v0, center, rate, exponent)
        }
        "periodic" => {
            let period = doc.positive_count("potential", "period", 2)?;
            let table = doc
                .reals("potential", "table")?
                .unwrap_or_else(|| vec![v0; period * period * period]);
            PotentialSpec::periodic(v0, period, table)
        }
        other => Err(Error::InvalidParameter(format!(
            "potential kind must be constant, coercive or periodic, found `{other}`"
        ))),
    })?;

    let c = doc.real("nonlinearity", "c", 1.0)?;
    let p = doc.real("nonlinearity", "p", 3.0)?;
    let theta = doc.real("nonlinearity", "theta", 2.0 * p)?;
    let nonlinearity = doc.anchored("nonlinearity", "p", || {
        Ok(Nonlinearity::Power(PowerLaw::with_theta(c, p, theta)?))
    })?;
    doc.anchored("nonlinearity", "p", || {
        ProblemSpec::new(a, b, alpha, potential, nonlinearity, lattice)
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn parse_solver(doc: &Document) -> Result<SolveConfig> {
    let d = SolveConfig::default();
    let initial_guess = doc
        .parsed(
            "solver",
            "initial_guess",
            |s| match s {
                "gaussian_bump" => Some(InitialGuess::GaussianBump),
                "random" => Some(InitialGuess::Random),
                _ => s
                    .strip_prefix("file:")
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| InitialGuess::File(PathBuf::from(p.trim()))),
            },
            "gaussian_bump, random or file:<path>",
        )?
        .unwrap_or(d.initial_guess.clone());
    let config = SolveConfig {
        max_iterations: doc.positive_count("solver", "max_iterations", d.max_iterations)?,
        gradient_tolerance: doc.real("solver", "gradient_tolerance", d.gradient_tolerance)?,
        backtrack: doc.real("solver", "backtrack", d.backtrack)?,
        armijo: doc.real("solver", "armijo", d.armijo)?,
        max_backtracks: doc.positive_count("solver", "max_backtracks", d.max_backtracks)?,
        nehari_tolerance: doc.real("solver", "nehari_tolerance", d.nehari_tolerance)?,
        seed: doc
            .parsed("solver", "seed", |s| s.parse::<u64>().ok(), "an unsigned integer")?
            .unwrap_or(d.seed),
        initial_guess,
    };
    for (key, ok) in [
        ("gradient_tolerance", config.gradient_tolerance > 0.0),
        ("nehari_tolerance", config.nehari_tolerance > 0.0),
        ("backtrack", config.backtrack > 0.0 && config.backtrack < 1.0),
        ("armijo", config.armijo > 0.0 && config.armijo < 1.0),
    ] {
        if !ok {
            doc.anchored("solver", key, || config.validate())?;
        }
    }
    Ok(config)
}

fn parse_kernel(doc: &Document) -> Result<KernelConfig> {
    let d = KernelConfig::default();
    Ok(KernelConfig {
        table_radius: doc.parsed("kernel", "table_radius", |s| s.parse().ok(), "a nonnegative integer")?,
        method: doc
            .parsed("kernel", "method", KernelMethod::parse, "heat_kernel or torus_quadrature")?
            .unwrap_or(d.method),
        resolution: doc.parsed(
            "kernel",
            "resolution",
            |s| s.parse().ok().filter(|r: &usize| *r >= 1),
            "a positive integer",
        )?,
        cache_dir: doc
            .get("kernel", "cache_dir")
            .map(|e| PathBuf::from(&e.value))
            .unwrap_or(d.cache_dir),
    })
}

fn parse_output(doc: &Document) -> Result<OutputConfig> {
    let d = OutputConfig::default();
    let formats = doc
        .parsed(
            "output",
            "formats",
            |s| {
                split_list(s, |t| match t {
                    "text" => Some(FieldFormat::Text),
                    "binary" => Some(FieldFormat::Binary),
                    _ => None,
                })
            },
            "a list of text and binary",
        )?
        .unwrap_or(d.formats);
    Ok(OutputConfig {
        directory: doc
            .get("output", "directory")
            .map(|e| PathBuf::from(&e.value))
            .unwrap_or(d.directory),
        formats,
    })
}

fn parse_verify(doc: &Document) -> Result<VerifyConfig> {
    let d = VerifyConfig::default();
    let config = VerifyConfig {
        seed: doc
            .parsed("verify", "seed", |s| s.parse::<u64>().ok(), "an unsigned integer")?
            .unwrap_or(d.seed),
        mountain_pass_trials: doc.positive_count("verify", "mountain_pass_trials", d.mountain_pass_trials)?,
        hls_trials: doc.positive_count("verify", "hls_trials", d.hls_trials)?,
        hls_radii: doc.counts("verify", "hls_radii")?.unwrap_or(d.hls_radii),
        hls_stability: doc.real("verify", "hls_stability", d.hls_stability)?,
        fiber_trials: doc.positive_count("verify", "fiber_trials", d.fiber_trials)?,
        fiber_grid: doc.positive_count("verify", "fiber_grid", d.fiber_grid)?,
        level_samples: doc.positive_count("verify", "level_samples", d.level_samples)?,
        level_tolerance: doc.real("verify", "level_tolerance", d.level_tolerance)?,
        box_radii: doc.counts("verify", "box_radii")?.unwrap_or(d.box_radii),
        box_tolerance: doc.real("verify", "box_tolerance", d.box_tolerance)?,
        translation_tolerance: doc.real("verify", "translation_tolerance", d.translation_tolerance)?,
        symmetry_tolerance: doc.real("verify", "symmetry_tolerance", d.symmetry_tolerance)?,
    };
    let blame = if config.mountain_pass_trials < 10 {
        "mountain_pass_trials"
    } else {
        "box_radii"
    };
    doc.anchored("verify", blame, || config.validate())?;
    Ok(config)
}

fn parse_sweep(doc: &Document, problem: &ProblemSpec) -> Result<Option<SweepSpec>> {
    let parameter = doc.parsed("sweep", "parameter", SweepParameter::parse, "one of b, p, alpha, radius")?;
    let values = doc.reals("sweep", "values")?;
    match (parameter, values) {
        (None, None) => Ok(None),
        (Some(parameter), Some(values)) => {
            let sweep = SweepSpec { parameter, values };
            for v in &sweep.values {
                doc.anchored("sweep", "values", || sweep.apply(problem, *v))?;
            }
            Ok(Some(sweep))
        }
        _ => Err(config_error(
            doc.section_line("sweep"),
            "[sweep] needs both `parameter` and `values`",
        )),
    }
}

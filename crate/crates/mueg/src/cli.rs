//! Batch front-end: `construct`, `verify`, `tile`, `ueg-scan` and `acceptance` jobs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::acceptance::{self, AcceptanceOptions};
use crate::config::{parse_list, Config};
use crate::constructor::{
    kinetic_bound_ledger, kinetic_upper_functional, verify_marginals, ConstructedRdm, ConstructorSpec,
    CurrentDecomposition, UQuadrature, WidthPolicy, DEFAULT_DELTA_FLOOR,
};
use crate::error::Context;
use crate::fields::io::FieldData;
use crate::fields::{GridSpec, ScalarField};
use crate::rdm::{
    check_integrated_bound, check_pointwise_bounds, GaussianDensity, Kernel, LinearVector, LowRankRdm, SampledScalar,
    SampledVector, ScalarFunction, VectorFunction,
};
use crate::report::{BoundReport, Document};
use crate::tiling::{
    boundary_constant_sweep, cutoff_scaling_residual, pou_regularized_average, IndicatorSum, Sampling,
    TetraDecomposition,
};
use crate::ueg::{
    build_trial, exchange_refinement, gauge_term_scan, surrogate_energies, DeltaPolicy, Domain,
    EnergyPerVolumeReport,
};
use crate::{Complex64, Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mueg", version, about = "Magnetic current-density functional laboratory")]
pub struct Cli {
    /// Job configuration (`[section]` headers, `key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory for report files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Use vorticity constant 1 instead of 1/sqrt(6).
    #[arg(long, global = true)]
    pub strict_vorticity: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Pointwise,
    Integrated,
    Gauge,
    Affine,
    Exchange,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the constructor kernel for a density/current pair and report its ledger.
    Construct,
    /// Inequality and identity suites on an orbital corpus.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
    },
    /// Tetrahedral tiling, partitions of unity and boundary classification.
    Tile,
    /// Uniform-electron-gas trial states over a list of scales.
    UegScan {
        /// Comma-separated scales, e.g. `4,8,16,32`.
        #[arg(long)]
        scales: Option<String>,
    },
    /// Run the acceptance criteria.
    Acceptance {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long)]
        criteria: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct => "construct",
            Command::Verify { .. } => "verify",
            Command::Tile => "tile",
            Command::UegScan { .. } => "ueg-scan",
            Command::Acceptance { .. } => "acceptance",
        }
    }
}

const JOB_KEYS: [(&str, &str); 4] = [("job", "seed"), ("job", "workers"), ("job", "out"), ("job", "strict_vorticity")];

const KEYS: &[(&str, &str)] = &[
    ("construct", "rho"),
    ("construct", "w"),
    ("construct", "g"),
    ("construct", "mass"),
    ("construct", "sigma"),
    ("construct", "velocity"),
    ("construct", "nu"),
    ("construct", "c"),
    ("construct", "extent"),
    ("construct", "grid"),
    ("construct", "t_order"),
    ("construct", "u_order"),
    ("construct", "floor"),
    ("construct", "epsilon"),
    ("construct", "dump_kernel"),
    ("verify", "suite"),
    ("verify", "sets"),
    ("verify", "orbitals"),
    ("verify", "occupations"),
    ("verify", "affine_maps"),
    ("tile", "ell"),
    ("tile", "delta"),
    ("tile", "samples"),
    ("tile", "indicator_points"),
    ("tile", "ratios"),
    ("tile", "delta_target"),
    ("tile", "off"),
    ("ueg", "rho0"),
    ("ueg", "nu0"),
    ("ueg", "domain"),
    ("ueg", "delta_policy"),
    ("ueg", "delta"),
    ("ueg", "scales"),
    ("ueg", "grid"),
    ("ueg", "exchange"),
    ("ueg", "exchange_grid"),
    ("acceptance", "criteria"),
    ("acceptance", "corpus_size"),
    ("acceptance", "enforce_budgets"),
    ("tolerances", "marginals"),
    ("tolerances", "construct_quadrature"),
    ("tolerances", "pointwise"),
    ("tolerances", "integrated"),
    ("tolerances", "gauge"),
    ("tolerances", "affine"),
    ("tolerances", "pou"),
    ("tolerances", "cutoff"),
    ("tolerances", "exponent"),
];

/// Parsed job: effective configuration (flags folded in) and command.
pub struct Job {
    pub config: Config,
    pub command: Command,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub strict: bool,
}

impl Job {
    pub fn from_cli(cli: Cli) -> Result<Job> {
        let mut config = match &cli.config {
            Some(p) => Config::read(p)?,
            None => Config::default(),
        };
        let allowed: Vec<(&str, &str)> = JOB_KEYS.iter().chain(KEYS.iter()).copied().collect();
        config.check_keys(&allowed)?;
        if let Some(s) = cli.seed {
            config.set("job", "seed", s);
        }
        if cli.strict_vorticity {
            config.set("job", "strict_vorticity", true);
        }
        match &cli.command {
            Command::Verify { suite: Some(s) } => config.set("verify", "suite", format!("{s:?}").to_lowercase()),
            Command::UegScan { scales: Some(s) } => {
                parse_list(s).map_err(|_| Error::invalid(format!("bad scale list '{s}'")))?;
                config.set("ueg", "scales", s)
            }
            Command::Acceptance { criteria: Some(c) } => config.set("acceptance", "criteria", c),
            _ => {}
        }
        let seed = config.u64("job", "seed", AcceptanceOptions::default().seed)?;
        // placement keys do not affect results and stay out of the hash
        let workers = match cli.workers {
            Some(w) => w,
            None => config.usize("job", "workers", 0)?,
        };
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(config.string("job", "out", "mueg-out")));
        config.remove("job", "workers");
        config.remove("job", "out");
        let strict = config.bool("job", "strict_vorticity", false)?;
        let job = Job { config, command: cli.command, seed, workers, out, strict };
        job.check_paths()?;
        Ok(job)
    }

    /// Every input path must exist before any work starts.
    fn check_paths(&self) -> Result<()> {
        let mut paths: Vec<String> = Vec::new();
        for key in ["rho", "w", "g"] {
            paths.extend(self.config.optional("construct", key));
        }
        if let Some(list) = self.config.optional("verify", "orbitals") {
            paths.extend(list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
        }
        for p in paths {
            if !Path::new(&p).is_file() {
                return Err(Error::invalid(format!("input file '{p}' not found")));
            }
        }
        Ok(())
    }

    fn header(&self, doc: &mut Document) {
        doc.push("job", "command", self.command.name());
        doc.push("job", "config_hash", self.config.hash());
        doc.push("job", "seed", self.seed);
        doc.push("job", "strict_vorticity", self.strict);
    }

    fn tol(&self, key: &str, default: f64) -> Result<f64> {
        self.config.f64("tolerances", key, default)
    }
}

/// Parse, run and write reports; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let job = match Job::from_cli(cli) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: configuration: {e}");
            return EXIT_USAGE;
        }
    };
    match run_job(&job) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

/// Run one job inside a pool of the configured size; true iff every check passed.
pub fn run_job(job: &Job) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.workers)
        .build()
        .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
    pool.install(|| {
        std::fs::create_dir_all(&job.out).context(format!("creating {}", job.out.display()))?;
        let mut doc = Document::new();
        job.header(&mut doc);
        let step = job.command.name();
        match &job.command {
            Command::Construct => construct(job, &mut doc),
            Command::Verify { .. } => verify(job, &mut doc),
            Command::Tile => tile(job, &mut doc),
            Command::UegScan { .. } => ueg_scan(job, &mut doc),
            Command::Acceptance { .. } => run_acceptance(job, &mut doc),
        }
        .context(format!("{step} job"))?;
        let text = doc.to_text();
        let path = job.out.join(format!("{step}.report"));
        std::fs::write(&path, &text).context(format!("writing {}", path.display()))?;
        print!("{text}");
        Ok(doc.all_passed())
    })
}

fn write_file(job: &Job, doc: &mut Document, name: &str, text: &str) -> Result<()> {
    let path = job.out.join(name);
    std::fs::write(&path, text).context(format!("writing {}", path.display()))?;
    doc.push("outputs", "file", name);
    Ok(())
}

fn read_field(path: &str) -> Result<FieldData> {
    FieldData::read(Path::new(path)).context(format!("reading {path}"))
}

/// Cell centres at least `margin` cells inside `g`. Interpolated second derivatives
/// jump at the data nodes, so the nodes themselves are avoided.
fn inner_grid(g: &GridSpec, margin: usize) -> Result<GridSpec> {
    let d = g.dim;
    let origin: Vec<f64> = (0..d).map(|a| g.origin[a] + (margin as f64 + 0.5) * g.spacing[a]).collect();
    let counts: Vec<usize> = (0..d).map(|a| g.counts[a].saturating_sub(2 * margin + 1)).collect();
    GridSpec::new(d, &origin, &g.spacing[..d], &counts)
}

// ---------------------------------------------------------------- construct

/// Interpolated density with interpolation undershoot cut at zero.
struct ClampedDensity(SampledScalar);

impl ScalarFunction for ClampedDensity {
    fn value(&self, x: crate::Point) -> f64 {
        self.0.value(x).max(0.0)
    }
    fn gradient(&self, x: crate::Point) -> crate::Point {
        if self.0.value(x) > 0.0 {
            self.0.gradient(x)
        } else {
            [0.0; 3]
        }
    }
    fn hessian(&self, x: crate::Point) -> crate::linalg::Mat3 {
        if self.0.value(x) > 0.0 {
            self.0.hessian(x)
        } else {
            [[0.0; 3]; 3]
        }
    }
}

fn construct(job: &Job, doc: &mut Document) -> Result<()> {
    let c = &job.config;
    let s = "construct";
    let (dim, rho, dec, grid): (usize, Arc<dyn ScalarFunction>, CurrentDecomposition, GridSpec) =
        match c.optional(s, "rho") {
            Some(path) => {
                let field = read_field(&path)?.to_scalar()?;
                let dim = field.grid.dim;
                let rho: Arc<dyn ScalarFunction> = Arc::new(ClampedDensity(SampledScalar::new(&field)));
                let w: Arc<dyn VectorFunction> = match c.optional(s, "w") {
                    Some(p) => Arc::new(SampledVector::new(&read_field(&p)?.to_vector()?)),
                    None => Arc::new(LinearVector::constant([0.0; 3])),
                };
                let g = match c.optional(s, "g") {
                    Some(p) => Some(Arc::new(SampledScalar::new(&read_field(&p)?.to_scalar()?)) as Arc<dyn ScalarFunction>),
                    None => None,
                };
                let grid = inner_grid(&field.grid, 2)?;
                doc.push("input", "rho", path);
                (dim, rho, CurrentDecomposition::new(g, w), grid)
            }
            None => {
                let mass = c.f64(s, "mass", 2.0)?;
                let sigma = c.f64(s, "sigma", 1.0)?;
                let extent = c.f64(s, "extent", 4.0 * sigma)?;
                let n = c.usize(s, "grid", 12)?;
                let rho: Arc<dyn ScalarFunction> = Arc::new(GaussianDensity { dim: 3, mass, center: [0.0; 3], sigma });
                let w: Arc<dyn VectorFunction> = match c.string(s, "velocity", "symmetric").as_str() {
                    "symmetric" => Arc::new(LinearVector::symmetric_gauge(c.point(s, "nu", [0.0, 0.0, 1.0])?)),
                    "constant" => Arc::new(LinearVector::constant(c.point(s, "c", [0.3, -0.2, 0.5])?)),
                    other => return Err(Error::invalid(format!("velocity must be symmetric or constant, got '{other}'"))),
                };
                doc.push("input", "rho", format!("gaussian mass {mass} sigma {sigma}"));
                (3, rho, CurrentDecomposition::new(None, w), GridSpec::cube(3, -extent, extent, n)?)
            }
        };
    let floor = c.f64(s, "floor", DEFAULT_DELTA_FLOOR)?;
    let mut spec = ConstructorSpec {
        width: WidthPolicy::Pointwise { floor },
        t_order: c.usize(s, "t_order", ConstructorSpec::default().t_order)?,
        u_rule: UQuadrature::GaussHermite(c.usize(s, "u_order", 32)?),
        tolerance: job.tol("construct_quadrature", 1e-6)?,
        ..ConstructorSpec::default()
    };
    if c.has(s, "epsilon") {
        spec = spec.with_epsilon(c.f64(s, "epsilon", 1.0)?)?;
    }
    doc.push("grid", "dim", dim);
    doc.push("grid", "points", grid.len());
    // the ledger integrates by parts, so inputs should decay inside the grid
    let (mut edge, mut peak) = (0.0f64, 0.0f64);
    for i in 0..grid.len() {
        let v = rho.value(grid.point(i)).abs();
        peak = peak.max(v);
        if !grid.is_interior(i, 1) {
            edge = edge.max(v);
        }
    }
    doc.push("grid", "edge_density_ratio", format!("{:.3e}", edge / peak.max(f64::MIN_POSITIVE)));
    let gamma = ConstructedRdm::build(dim, rho.clone(), dec.clone(), spec, &grid).context("building kernel")?;
    doc.push("constructor", "quadrature_error", format!("{:.6e}", gamma.quadrature_error));
    doc.push("constructor", "t_order", spec.t_order);
    doc.push("constructor", "epsilon", spec.epsilon());
    let (_, marg) = verify_marginals(&gamma, &grid, job.tol("marginals", 1e-6)?).context("marginals")?;
    doc.check(marg);
    if dim == 3 {
        let ledger = kinetic_bound_ledger(&gamma, &grid).context("kinetic ledger")?;
        doc.check(ledger.report());
        let up = kinetic_upper_functional(dim, rho.as_ref(), &dec, spec.width, &grid)?;
        doc.push("upper_functional", "value", format!("{:.12e}", up.value));
        doc.push("upper_functional", "argmin_epsilon", up.argmin_epsilon);
        doc.push("upper_functional", "gauge_term", format!("{:.12e}", up.gauge_term));
        doc.push("upper_functional", "strain_term", format!("{:.12e}", up.strain_term));
    }
    if c.bool(s, "dump_kernel", false)? {
        let x0 = grid.point(grid.len() / 2);
        let slice: ScalarField<Complex64> = ScalarField::from_fn(&grid, |x| gamma.eval(x, x0));
        write_file(job, doc, "kernel_slice.field", &FieldData::from_complex(&slice).to_text())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- verify

fn user_orbitals(job: &Job) -> Result<Option<LowRankRdm>> {
    let Some(list) = job.config.optional("verify", "orbitals") else {
        return Ok(None);
    };
    let fields = list
        .split(',')
        .map(|p| read_field(p.trim())?.to_complex())
        .collect::<Result<Vec<_>>>()?;
    let occ = job.config.list("verify", "occupations", &vec![1.0; fields.len()])?;
    Ok(Some(LowRankRdm::from_fields(&fields, occ)?))
}

fn verify(job: &Job, doc: &mut Document) -> Result<()> {
    let c = &job.config;
    let suite = match c.string("verify", "suite", "all").as_str() {
        "pointwise" => Suite::Pointwise,
        "integrated" => Suite::Integrated,
        "gauge" => Suite::Gauge,
        "affine" => Suite::Affine,
        "exchange" => Suite::Exchange,
        "all" => Suite::All,
        other => return Err(Error::invalid(format!("unknown suite '{other}'"))),
    };
    let sets = c.usize("verify", "sets", 100)?;
    let (tp, ti) = (job.tol("pointwise", 1e-10)?, job.tol("integrated", 1e-8)?);
    let want = |s: Suite| suite == s || suite == Suite::All;
    doc.push("verify", "suite", format!("{suite:?}").to_lowercase());
    if let Some(rdm) = user_orbitals(job)? {
        doc.push("verify", "orbitals", c.string("verify", "orbitals", ""));
        let obs = rdm.observables()?;
        if want(Suite::Pointwise) {
            let (a, b) = check_pointwise_bounds(&obs, job.strict, tp);
            doc.check(a);
            doc.check(b);
        }
        if want(Suite::Integrated) {
            doc.check(check_integrated_bound(&obs, rdm.kinetic_energy()?, job.strict, ti)?);
        }
        return Ok(());
    }
    doc.push("verify", "corpus_sets", sets);
    if want(Suite::Pointwise) {
        acceptance::pointwise_suite(job.seed, sets, job.strict, tp)?.into_iter().for_each(|r| doc.check(r));
    }
    if want(Suite::Integrated) {
        let modes: &[bool] = if job.strict { &[true] } else { &[false] };
        acceptance::integrated_suite(job.seed, sets, modes, ti)?.into_iter().for_each(|r| doc.check(r));
    }
    if want(Suite::Gauge) {
        acceptance::gauge_suite(job.seed, job.tol("gauge", 1e-8)?)?.into_iter().for_each(|r| doc.check(r));
    }
    if want(Suite::Affine) {
        let n = c.usize("verify", "affine_maps", 10)?;
        acceptance::affine_suite(job.seed, n, job.tol("affine", 1e-6)?)?.into_iter().for_each(|r| doc.check(r));
    }
    if want(Suite::Exchange) {
        acceptance::exchange_suite(job.seed)?.into_iter().for_each(|r| doc.check(r));
    }
    Ok(())
}

// ---------------------------------------------------------------- tile

fn tile(job: &Job, doc: &mut Document) -> Result<()> {
    let c = &job.config;
    let s = "tile";
    let ell = c.f64(s, "ell", 1.0)?;
    let delta = c.f64(s, "delta", 0.3 * ell)?;
    let samples = c.usize(s, "samples", 1_000_000)?;
    let dec = TetraDecomposition::build();
    dec.verify()?;
    doc.push("tiling", "ell", ell);
    doc.push("tiling", "delta", delta);
    doc.push("tiling", "tetrahedra", dec.len());
    let cov = dec.coverage(samples, job.seed);
    doc.push("coverage", "samples", cov.samples);
    doc.push("coverage", "resampled_on_faces", cov.resampled);
    doc.push("coverage", "uncovered", cov.uncovered);
    doc.push("coverage", "overlapping", cov.overlapping);
    doc.push("coverage", "max_z", format!("{:.6}", cov.max_z));
    for (j, f) in cov.per_tet_frequency.iter().enumerate() {
        doc.push("coverage", &format!("frequency_{j}"), format!("{f:.8}"));
    }
    doc.check(BoundReport::from_margins(
        "coverage-exact",
        "tiling-coverage",
        &[-(cov.uncovered as f64), -(cov.overlapping as f64)],
        0.0,
        cov.resampled,
    ));
    doc.check(BoundReport::inequality("coverage-frequency", "tiling-frequency", cov.max_z, 3.0, 0.0, 3.0));
    let n = c.usize(s, "indicator_points", 20_000)?;
    let grid = GridSpec::cube(3, -2.0 * ell, 2.0 * ell, (n as f64).cbrt().ceil() as usize)?;
    let (mut bad, mut faces) = (0usize, 0usize);
    for x in grid.points() {
        // offset keeps the lattice points generic
        let x = [x[0] + 0.1234567 * ell, x[1] + 0.0456789 * ell, x[2] - 0.0314159 * ell];
        match dec.pou_indicator_sum(x, ell) {
            IndicatorSum::Value(v) if v == 1.0 => {}
            IndicatorSum::Value(_) => bad += 1,
            IndicatorSum::OnFace => faces += 1,
        }
    }
    doc.check(BoundReport::from_margins("indicator-sum", "partition-of-unity", &[-(bad as f64)], 0.0, faces));
    let probes = [[0.13, -0.41, 0.27], [0.0; 3], [0.31, 0.02, -0.26]].map(|p: [f64; 3]| p.map(|v| v * ell));
    let devs = probes
        .iter()
        .map(|&x| pou_regularized_average(x, &dec, ell, delta, Sampling::default()).map(|a| -(a.estimate - 1.0).abs()))
        .collect::<Result<Vec<_>>>()?;
    doc.check(BoundReport::from_margins("averaged-pou", "averaged-partition", &devs, job.tol("pou", 1e-8)?, 0));
    let near = dec.reference_polyhedron().scaled(ell, [0.0; 3]).vertices()[1].map(|v| 0.97 * v);
    let res = [1.7, 0.6]
        .iter()
        .map(|&a| cutoff_scaling_residual(&dec, ell, delta, a, near).map(|r| -r))
        .collect::<Result<Vec<_>>>()?;
    doc.check(BoundReport::from_margins("cutoff-scaling", "cutoff-scaling", &res, job.tol("cutoff", 1e-10)?, 0));
    let ratios = c.list(s, "ratios", &[8.0, 16.0, 32.0])?;
    let dt = c.f64(s, "delta_target", 0.05 * ell)?;
    for (q, cst, cl) in boundary_constant_sweep(&dec, ell, delta, dt, &ratios)? {
        let sec = format!("boundary_q{q}");
        doc.push(&sec, "touching", cl.touching.len());
        doc.push(&sec, "interior", cl.interior.len());
        doc.push(&sec, "interior_volume_fraction", format!("{:.10}", cl.interior_volume() / cl.target_volume));
        doc.push(&sec, "boundary_constant", format!("{cst:.6}"));
        doc.push(&sec, "band_max_distance", format!("{:.6}", cl.band_max_distance));
        doc.check(BoundReport::inequality(
            &format!("band-distance-q{q}"),
            "boundary-band",
            cl.band_max_distance,
            cl.band_bound(),
            0.0,
            cl.band_bound(),
        ));
    }
    if c.bool(s, "off", false)? {
        write_file(job, doc, "tiling.off", &dec.to_off(ell))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- ueg-scan

fn ueg_scan(job: &Job, doc: &mut Document) -> Result<()> {
    let c = &job.config;
    let s = "ueg";
    let rho0 = c.f64(s, "rho0", 1.0)?;
    let nu0 = c.point(s, "nu0", [0.0, 0.0, 1.0])?;
    let unit = match c.string(s, "domain", "box").as_str() {
        "box" => Domain::Box { half: [0.5; 3] },
        "tetra" => Domain::Tetra { ell: 1.0 },
        other => return Err(Error::invalid(format!("domain must be box or tetra, got '{other}'"))),
    };
    let policy = match c.string(s, "delta_policy", "fixed").as_str() {
        "fixed" => DeltaPolicy::Fixed(c.f64(s, "delta", 1.0)?),
        "thermodynamic" => DeltaPolicy::Thermodynamic,
        other => return Err(Error::invalid(format!("delta_policy must be fixed or thermodynamic, got '{other}'"))),
    };
    let scales = c.list(s, "scales", &[4.0, 8.0, 16.0, 32.0])?;
    let n = c.usize(s, "grid", 40)?;
    doc.push("ueg", "rho0", rho0);
    doc.push("ueg", "nu0", format!("{}, {}, {}", nu0[0], nu0[1], nu0[2]));
    doc.push("ueg", "domain", unit.name());
    doc.push("ueg", "delta_policy", format!("{policy:?}"));
    doc.push("ueg", "surrogate", true);
    let mut tsv = format!("scale\t{}\n", EnergyPerVolumeReport::TSV_HEADER);
    if n > 0 {
        for &ell in &scales {
            let trial = build_trial(rho0, nu0, unit.scaled(ell), policy.delta(ell, rho0)?, None)
                .context(format!("trial at scale {ell}"))?;
            let grid = trial.support_grid(n)?;
            let mut row = surrogate_energies(&trial, &grid).context(format!("surrogate at scale {ell}"))?;
            if c.bool(s, "exchange", false)? {
                let g = trial.support_grid(c.usize(s, "exchange_grid", 12)?)?;
                row.exchange = Some(exchange_refinement(&trial, &g)?);
            }
            tsv.push_str(&format!("{ell}\t{}\n", row.tsv_row()));
        }
    }
    if scales.len() >= 4 {
        let scan = gauge_term_scan(rho0, nu0, unit, policy, &scales)?;
        tsv.push_str("# scale\tgauge_correction_per_volume\n");
        for (ell, v) in &scan.rows {
            tsv.push_str(&format!("gauge\t{ell}\t{v:.10e}\n"));
            doc.push("gauge_scan", &format!("per_volume_{ell}"), format!("{v:.10e}"));
        }
        if let (Some(p), Some(k)) = (scan.exponent, scan.constant) {
            tsv.push_str(&format!("exponent\t{p:.6}\tconstant\t{k:.10e}\n"));
            doc.check(
                BoundReport::identity("gauge-exponent", "gauge-term-growth", p, 2.0, job.tol("exponent", 0.05)?, 1.0)
                    .with("constant", k),
            );
        }
    }
    write_file(job, doc, "ueg_scan.tsv", &tsv)?;
    print!("{tsv}");
    Ok(())
}

// ---------------------------------------------------------------- acceptance

fn run_acceptance(job: &Job, doc: &mut Document) -> Result<()> {
    let c = &job.config;
    let ids: Vec<usize> = match c.optional("acceptance", "criteria") {
        Some(list) => list
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad criterion '{p}'"))))
            .collect::<Result<_>>()?,
        None => acceptance::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let opts = AcceptanceOptions {
        seed: job.seed,
        enforce_budgets: c.bool("acceptance", "enforce_budgets", true)?,
        corpus_size: c.usize("acceptance", "corpus_size", 100)?,
    };
    for id in ids {
        let o = acceptance::run_criterion(id, &opts)?;
        eprintln!("{}", o.line());
        let sec = format!("criterion_{id}");
        doc.push(&sec, "name", o.name);
        doc.push(&sec, "pass", o.passed);
        doc.push(&sec, "within_budget", o.within_budget);
        if let Some(e) = &o.error {
            doc.push(&sec, "error", e);
        }
        let mut verdict = BoundReport::from_margins(&format!("criterion-{id}"), o.name, &[], 0.0, 0);
        verdict.passed = o.passed;
        for mut r in o.checks {
            r.id = format!("{id}.{}", r.id);
            doc.check(r);
        }
        doc.check(verdict);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_from_args(["mueg", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run_from_args(["mueg", "tile", "--config", "/nonexistent/job.cfg"]), EXIT_USAGE);
    }
}

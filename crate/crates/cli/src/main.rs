mod args;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pfk_core::capacity::{ball_capacity, cheeger_constant, concentric_capacity, condenser_capacity, CondenserProblem};
use pfk_core::spectral::{eigen_grid, eigen_radial_shoot, EigenResult, Eigenfunction, SolverOptions};
use pfk_core::discretize::rasterize;
use pfk_core::verify::{run_suite, CatalogFile, VerifyConfig, DEFAULT_P_LIST};
use pfk_core::{Domain, PfkError};

use args::{parse_domain, parse_p_list, parse_tolerance};
use report::Format;

const ENV_RESOLUTION: &str = "PFK_DEFAULT_RESOLUTION";

#[derive(Parser)]
#[command(name = "pfk", version, about = "p-Laplacian eigenvalues, capacities and inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Grid solver for planar domains, shooting otherwise.
    Auto,
    Grid,
    Radial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Eig,
    EigRoot,
}

#[derive(Subcommand)]
enum Command {
    /// Principal eigenvalue of the Dirichlet p-Laplacian.
    Eig {
        /// Domain record (JSON, `@file`, or shorthand such as `rectangle(2,1)`).
        #[arg(long)]
        domain: String,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        /// Relative tolerance of the outer iteration (grid) or the bracket (radial).
        #[arg(long)]
        tol: Option<f64>,
        /// Write the eigenfunction as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// p-capacity of a condenser, or a closed-form ball capacity with `--analytic`.
    Cap {
        #[arg(long)]
        inner: Option<String>,
        #[arg(long)]
        outer: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        analytic: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Cheeger constant.
    Cheeger {
        #[arg(long)]
        domain: String,
    },
    /// Run the inequality checks over a catalog of domains.
    Verify {
        /// `default` or the path of a catalog file.
        #[arg(long, default_value = "default")]
        catalog: String,
        /// Comma-separated exponents, each greater than 1.
        #[arg(long)]
        p_list: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Directory receiving report.json, report.csv and report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        resolution: Option<usize>,
        /// Tolerance override `key=value`; repeatable.
        #[arg(long = "tolerance")]
        tolerances: Vec<String>,
        /// Add the p -> 1 and p -> infinity limit checks.
        #[arg(long)]
        include_limits: bool,
    },
    /// Tabulate the principal eigenvalue over a range of exponents.
    Sweep {
        #[arg(long)]
        domain: String,
        #[arg(long, allow_negative_numbers = true)]
        p_from: f64,
        #[arg(long, allow_negative_numbers = true)]
        p_to: f64,
        /// Number of intervals; `steps + 1` rows are printed.
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, value_enum, default_value = "eig")]
        quantity: Quantity,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long)]
        resolution: Option<usize>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<PfkError> for Failure {
    fn from(e: PfkError) -> Self {
        let code = match e {
            PfkError::NotConverged(_) | PfkError::Bracket { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    invalid(format!("i/o error: {e}"))
}

type CmdResult = Result<u8, Failure>;

fn default_resolution(fallback: usize) -> Result<usize, Failure> {
    match std::env::var(ENV_RESOLUTION) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(invalid(format!("{ENV_RESOLUTION} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(fallback),
    }
}

fn resolution_or_default(r: Option<usize>, fallback: usize) -> Result<usize, Failure> {
    match r {
        Some(0) => Err(invalid("resolution must be positive")),
        Some(r) => Ok(r),
        None => default_resolution(fallback),
    }
}

fn check_p(p: f64) -> Result<(), Failure> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("invalid exponent p = {p}: p must exceed 1")))
    }
}

fn solve(d: &Domain, p: f64, method: Method, resolution: usize, tol: Option<f64>) -> Result<EigenResult, Failure> {
    let radial = match method {
        Method::Radial => true,
        Method::Grid => false,
        Method::Auto => d.dim() != 2,
    };
    if radial {
        let r = match d.shape() {
            pfk_core::geometry::Shape::Ball { radius, .. } => *radius,
            _ => return Err(invalid("the radial method needs a ball")),
        };
        Ok(eigen_radial_shoot(d.dim(), p, r, tol.unwrap_or(1e-10))?)
    } else {
        let m = rasterize(d, resolution)?;
        let mut opts = SolverOptions::default();
        if let Some(t) = tol {
            opts.tolerance = t;
        }
        opts.validate()?;
        Ok(eigen_grid(&m, p, &opts)?)
    }
}

fn cmd_eig(
    domain: &str,
    p: f64,
    resolution: Option<usize>,
    method: Method,
    tol: Option<f64>,
    out: Option<PathBuf>,
) -> CmdResult {
    check_p(p)?;
    let d = parse_domain(domain)?;
    let res = resolution_or_default(resolution, 128)?;
    let e = solve(&d, p, method, res, tol)?;
    println!("lambda = {:.12}", e.lambda);
    println!("iterations = {}", e.iterations);
    println!("residual = {:.3e}", e.residual);
    println!("rayleigh_quotient = {:.12}", e.rayleigh_quotient);
    if let Some(path) = out {
        let csv = match &e.eigenfunction {
            Eigenfunction::Grid(f) => f.to_csv(),
            Eigenfunction::Radial(prof) => {
                let mut s = String::from("r,u\n");
                for (r, u) in prof.r.iter().zip(&prof.u) {
                    s.push_str(&format!("{r:e},{u:e}\n"));
                }
                s
            }
        };
        fs::write(&path, csv).map_err(io_failure)?;
    }
    if e.converged {
        Ok(0)
    } else {
        eprintln!("warning: solver did not converge");
        Ok(3)
    }
}

fn cmd_cap(
    inner: Option<String>,
    outer: Option<String>,
    p: f64,
    analytic: bool,
    n: Option<usize>,
    r: Option<f64>,
    resolution: Option<usize>,
) -> CmdResult {
    if !(p.is_finite() && p >= 1.0) {
        return Err(invalid(format!("invalid exponent p = {p}: p must be at least 1")));
    }
    match (inner, outer) {
        (Some(i), Some(o)) => {
            check_p(p)?;
            let (k, big) = (parse_domain(&i)?, parse_domain(&o)?);
            let res = resolution_or_default(resolution, 128)?;
            let prob = CondenserProblem::from_domains(&k, &big, p, res)?;
            let c = condenser_capacity(&prob, &SolverOptions::default())?;
            println!("capacity = {:.12}", c.value);
            println!("iterations = {}", c.iterations);
            if analytic {
                match concentric_radii(&k, &big) {
                    Some((n, rho, big_r)) => {
                        let exact = concentric_capacity(n, p, rho, big_r)?;
                        println!("analytic = {exact:.12}");
                        println!("relative_gap = {:.3e}", (c.value - exact).abs() / exact);
                    }
                    None => println!("analytic = n/a (closed form needs concentric balls)"),
                }
            }
            if c.converged {
                Ok(0)
            } else {
                eprintln!("warning: solver did not converge");
                Ok(3)
            }
        }
        (None, None) if analytic => {
            let n = n.ok_or_else(|| invalid("--analytic without a condenser needs --n"))?;
            let r = r.ok_or_else(|| invalid("--analytic without a condenser needs --r"))?;
            let c = ball_capacity(n, p, r)?;
            println!("capacity = {:.12}", c.value);
            println!("case = {}", serde_json::to_string(&c.case).unwrap_or_default().trim_matches('"'));
            Ok(0)
        }
        _ => Err(invalid("cap needs --inner and --outer, or --analytic with --n and --r")),
    }
}

fn concentric_radii(k: &Domain, big: &Domain) -> Option<(usize, f64, f64)> {
    use pfk_core::geometry::Shape;
    match (k.shape(), big.shape()) {
        (Shape::Ball { n, radius: a, center: c1 }, Shape::Ball { n: m, radius: b, center: c2 })
            if n == m && c1 == c2 && a < b =>
        {
            Some((*n, *a, *b))
        }
        _ => None,
    }
}

fn cmd_cheeger(domain: &str) -> CmdResult {
    let d = parse_domain(domain)?;
    println!("h = {:.12}", cheeger_constant(&d)?);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    catalog: &str,
    p_list: Option<String>,
    format: Format,
    out: Option<PathBuf>,
    jobs: usize,
    resolution: Option<usize>,
    overrides: Vec<String>,
    include_limits: bool,
) -> CmdResult {
    if jobs == 0 {
        return Err(invalid("--jobs must be at least 1"));
    }
    let file = if catalog == "default" {
        CatalogFile::default_file()
    } else {
        let text = fs::read_to_string(catalog).map_err(|e| invalid(format!("cannot read catalog {catalog}: {e}")))?;
        CatalogFile::from_json(&text)?
    };
    let ps = match p_list {
        Some(s) => parse_p_list(&s)?,
        None => file.p_list.clone().unwrap_or_else(|| DEFAULT_P_LIST.to_vec()),
    };
    let mut cfg = VerifyConfig {
        resolution: resolution_or_default(resolution.or(file.resolution), VerifyConfig::default().resolution)?,
        tolerances: file.tolerances()?,
        include_limits,
        ..VerifyConfig::default()
    };
    for o in &overrides {
        let (k, v) = parse_tolerance(o)?;
        cfg.tolerances.set(&k, v)?;
    }
    let catalog = file.domains;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let suite = pool.install(|| run_suite(&catalog, &ps, &cfg))?;

    match out {
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(io_failure)?;
            for f in [Format::Json, Format::Csv, Format::Text] {
                fs::write(dir.join(format!("report.{}", f.extension())), report::render(&suite, f)?).map_err(io_failure)?;
            }
            print!("{}", report::render(&suite, Format::Text)?);
        }
        None => print!("{}", report::render(&suite, format)?),
    }
    std::io::stdout().flush().map_err(io_failure)?;
    for r in suite.failures() {
        eprintln!("FAILED: {} [{}] margin {:.3e}", r.name, report::context_label(r), r.margin);
    }
    Ok(if suite.all_passed() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    domain: &str,
    p_from: f64,
    p_to: f64,
    steps: usize,
    quantity: Quantity,
    method: Method,
    resolution: Option<usize>,
) -> CmdResult {
    if steps == 0 {
        return Err(invalid("--steps must be at least 1"));
    }
    check_p(p_from)?;
    check_p(p_to)?;
    let d = parse_domain(domain)?;
    let res = resolution_or_default(resolution, 128)?;
    let mut code = 0;
    println!("p,{}", if quantity == Quantity::Eig { "lambda" } else { "lambda_root" });
    for k in 0..=steps {
        let p = p_from + (p_to - p_from) * k as f64 / steps as f64;
        let e = solve(&d, p, method, res, None)?;
        if !e.converged {
            code = 3;
        }
        let v = match quantity {
            Quantity::Eig => e.lambda,
            Quantity::EigRoot => e.lambda.powf(1.0 / p),
        };
        println!("{p},{v:.12}");
    }
    Ok(code)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Eig {
            domain,
            p,
            resolution,
            method,
            tol,
            out,
        } => cmd_eig(&domain, p, resolution, method, tol, out),
        Command::Cap {
            inner,
            outer,
            p,
            analytic,
            n,
            r,
            resolution,
        } => cmd_cap(inner, outer, p, analytic, n, r, resolution),
        Command::Cheeger { domain } => cmd_cheeger(&domain),
        Command::Verify {
            catalog,
            p_list,
            format,
            out,
            jobs,
            resolution,
            tolerances,
            include_limits,
        } => cmd_verify(&catalog, p_list, format, out, jobs, resolution, tolerances, include_limits),
        Command::Sweep {
            domain,
            p_from,
            p_to,
            steps,
            quantity,
            method,
            resolution,
        } => cmd_sweep(&domain, p_from, p_to, steps, quantity, method, resolution),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

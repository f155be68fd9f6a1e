//! The `itokit` command line: subcommands, reports and exit codes.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
//! usage, input or parameter errors. Diagnostics go to stderr.

pub mod document;
pub mod json;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::algebra::{check_axioms, Element, ItoAlgebra, DEFAULT_TOL};
use crate::catalog::{self, FiniteGroupData, IrrepData, PositiveDefiniteFunction, Standard};
use crate::decomposition::{self, Decomposition};
use crate::error::Error;
use crate::fock::{self, ToyFockConfig};
use crate::forms::{ThermalForm, VacuumForm};
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::representation::{self, FundamentalRep};

pub use document::{parse_algebra, AlgebraDocument, ParsedAlgebra};

pub const VERSION: &str = concat!("itokit ", env!("CARGO_PKG_VERSION"));
pub const TOL_ENV: &str = "ITOKIT_TOL";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "itokit", version, about = "Finite-dimensional Ito *-algebra toolkit")]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Numerical tolerance (overrides ITOKIT_TOL).
    #[arg(long, global = true, value_name = "EPS")]
    pub tol: Option<f64>,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Algebra document (JSON).
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Generic,
    Vacuum,
    Thermal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the Ito algebra axioms.
    Check(Input),
    /// Summarize the fundamental representation.
    Gns(Input),
    /// Triangular matrices of every basis element.
    Represent(Input),
    /// Split into Brownian and Levy parts.
    Decompose {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "generic")]
        via: Via,
    },
    /// Brownian/Levy/mixed kind and the vacuum and thermal flags.
    Classify(Input),
    /// Emit a catalog algebra as a document.
    Catalog {
        /// newton, wiener, poisson, hp, thermal_brownian, mixed_wiener_poisson,
        /// zero_intensity_poisson, vacuum_brownian, periodic_wiener, group_poisson
        name: String,
        /// thermal_brownian: RHO_PLUS RHO_MINUS; periodic_wiener: K RHO_1 .. RHO_K;
        /// group_poisson: GROUP [LAMBDA ..]
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
    },
    /// Positive-definite functions on finite groups.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Toy Fock space realization.
    #[command(subcommand)]
    Fock(FockCommand),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// trivial, zN (cyclic of order N) or s3.
    #[arg(long)]
    pub group: String,
    /// Values of λ in group order, each `re` or `re:im` (default: delta).
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub lambda: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum GroupCommand {
    /// Convolution self-inverse and positivity checks.
    Convolution(GroupArgs),
    /// Fourier coefficients over the built-in irreps.
    Spectral(GroupArgs),
}

#[derive(Debug, Subcommand)]
pub enum FockCommand {
    /// Vacuum means and moments of the discretized processes.
    Simulate {
        #[command(flatten)]
        input: Input,
        /// Basis label to simulate (default: all).
        #[arg(long)]
        element: Option<String>,
        #[arg(long, default_value_t = 0.125)]
        h: f64,
        #[arg(long, default_value_t = 8)]
        cells: usize,
        /// Highest vacuum moment reported at the final step.
        #[arg(long, default_value_t = 2)]
        moments: usize,
    },
    /// Order-two decay of the single-cell Ito table defect.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1e-2)]
        h: f64,
    },
    /// Reproduce the periodic Wiener table from independent modes.
    Modes {
        #[arg(long = "k")]
        k_max: usize,
        /// ρ_1 .. ρ_K.
        #[arg(long, num_args = 0..)]
        rho: Vec<f64>,
        #[arg(long)]
        cells: usize,
    },
}

/// Text and JSON forms of one command's result.
struct Report {
    pass: bool,
    body: Map<String, Value>,
    text: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::Shape { .. }
            | Error::Parameter(_)
            | Error::DimensionMismatch { .. }
            | Error::IncompleteIrreps { .. }
            | Error::DimensionCap { .. } => Failure::Usage(e.to_string()),
            other => Failure::Verification(other.to_string()),
        }
    }
}

/// Tolerance from the flag, else the environment, else the default.
pub fn resolve_tol(flag: Option<f64>, env: Option<&str>) -> Result<f64, String> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s.trim().parse().map_err(|_| format!("{TOL_ENV}: not a number: {s}"))?,
        (None, None) => DEFAULT_TOL,
    };
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(format!("tolerance must be positive, got {tol}"))
    }
}

/// Parse arguments, run and print; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let env = std::env::var(TOL_ENV).ok();
    let tol = match resolve_tol(cli.tol, env.as_deref()) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli, tol) {
        Ok(output) => {
            let (text, code) = output;
            if let Err(e) = write_output(cli.out.as_deref(), &text) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            code
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            EXIT_FAIL
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn execute(cli: &Cli, tol: f64) -> Result<(String, i32), Failure> {
    if let Command::Catalog { name, params } = &cli.command {
        let doc = catalog_document(name, params, tol)?;
        return Ok((doc.emit(), EXIT_PASS));
    }
    let (name, report) = match &cli.command {
        Command::Check(i) => ("check", check(&load(&i.input, tol)?)),
        Command::Gns(i) => ("gns", gns(&load(&i.input, tol)?)?),
        Command::Represent(i) => ("represent", represent(&load(&i.input, tol)?)?),
        Command::Decompose { input, via } => ("decompose", decompose(&load(&input.input, tol)?, *via)?),
        Command::Classify(i) => ("classify", classify(&load(&i.input, tol)?)?),
        Command::Group(GroupCommand::Convolution(g)) => ("group convolution", group_convolution(g, tol)?),
        Command::Group(GroupCommand::Spectral(g)) => ("group spectral", group_spectral(g, tol)?),
        Command::Fock(FockCommand::Simulate {
            input,
            element,
            h,
            cells,
            moments,
        }) => (
            "fock simulate",
            fock_simulate(&load(&input.input, tol)?, element.as_deref(), *h, *cells, *moments)?,
        ),
        Command::Fock(FockCommand::Verify { input, h }) => ("fock verify", fock_verify(&load(&input.input, tol)?, *h)?),
        Command::Fock(FockCommand::Modes { k_max, rho, cells }) => {
            ("fock modes", fock_modes(*k_max, rho, *cells, tol)?)
        }
        Command::Catalog { .. } => unreachable!("handled above"),
    };
    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    let text = if cli.json {
        let mut body = report.body;
        body.insert("command".into(), json!(name));
        body.insert("version".into(), json!(VERSION));
        body.insert("tol".into(), json!(tol));
        body.insert("pass".into(), json!(report.pass));
        json::to_canonical_string(&Value::Object(body))
    } else {
        format!("{VERSION} {name} (tol {tol:e})\n{}", report.text)
    };
    Ok((text, code))
}

fn load(path: &Path, tol: f64) -> Result<ParsedAlgebra, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let parsed = parse_algebra(&text, tol).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed)
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn vec_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| pair(*z)).collect())
}

fn mat_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| pair(m[(i, j)])).collect()))
            .collect(),
    )
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn mat_text(m: &CMat, indent: &str) -> String {
    (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect();
            format!("{indent}[{}]\n", row.join(", "))
        })
        .collect()
}

fn check(p: &ParsedAlgebra) -> Report {
    let r = check_axioms(&p.algebra);
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({"axiom": v.axiom, "witness": v.witness, "residual": v.residual}))
        .collect();
    let mut text = format!("axioms: {}\n", if r.pass { "pass" } else { "FAIL" });
    for v in &r.violations {
        let labels: Vec<&str> = v.witness.iter().map(|&i| p.algebra.labels()[i].as_str()).collect();
        text += &format!("  {}: residual {:e} at ({})\n", v.axiom, v.residual, labels.join(", "));
    }
    let mut body = Map::new();
    body.insert("dim".into(), json!(p.algebra.dim()));
    body.insert("violations".into(), Value::Array(violations));
    Report {
        pass: r.pass,
        body,
        text,
    }
}

/// The algebra itself when faithful, otherwise its quotient by the null ideal.
fn faithful(alg: &ItoAlgebra) -> Result<(ItoAlgebra, usize), Failure> {
    let ideal = representation::null_ideal(alg);
    if ideal.is_empty() {
        Ok((alg.clone(), 0))
    } else {
        let (q, _) = representation::quotient_faithful(alg)?;
        Ok((q, ideal.len()))
    }
}

fn fundamental(alg: &ItoAlgebra) -> Result<(ItoAlgebra, FundamentalRep, usize), Failure> {
    let report = check_axioms(alg);
    if !report.pass {
        return Err(Failure::Verification(format!("axioms fail, run `check` ({report})")));
    }
    let (q, null) = faithful(alg)?;
    let rep = representation::gns_build(&q)?;
    Ok((q, rep, null))
}

fn gns(p: &ParsedAlgebra) -> Result<Report, Failure> {
    let (alg, rep, null_dim) = fundamental(&p.algebra)?;
    let kr = representation::KreinRep::from_fundamental(&rep);
    let defect = kr.defect(&alg)?;
    let pass = defect <= rep.tol() * (1.0 + rep.scale()).powi(2);
    let mut body = Map::new();
    body.insert("dim".into(), json!(p.algebra.dim()));
    body.insert("null_ideal_dim".into(), json!(null_dim));
    body.insert("quotient_basis".into(), json!(alg.labels()));
    body.insert("gns_dim".into(), json!(rep.gns_dim()));
    body.insert("gram".into(), mat_json(&rep.gram()));
    body.insert("quotient_map".into(), mat_json(rep.quotient_map()));
    body.insert("operator_part_vanishes".into(), json!(rep.operator_part_vanishes()));
    body.insert("homomorphism_defect".into(), json!(defect));
    let mut text = format!(
        "dim {} -> gns dim {}{}\n",
        p.algebra.dim(),
        rep.gns_dim(),
        if null_dim > 0 {
            format!(" (quotient by a {null_dim}-dim null ideal)")
        } else {
            String::new()
        }
    );
    text += &format!("operator part vanishes: {}\n", rep.operator_part_vanishes());
    text += &format!("homomorphism defect: {defect:e}\n");
    Ok(Report { pass, body, text })
}

fn represent(p: &ParsedAlgebra) -> Result<Report, Failure> {
    let (alg, rep, null_dim) = fundamental(&p.algebra)?;
    let metric = rep.metric().matrix();
    let mut mats = Map::new();
    let mut text = format!("metric:\n{}", mat_text(&metric, "  "));
    for (i, label) in alg.labels().iter().enumerate() {
        let m = representation::fundamental_matrix(&rep, &alg.basis_element(i))?;
        text += &format!("{label}:\n{}", mat_text(&m, "  "));
        mats.insert(label.clone(), mat_json(&m));
    }
    let mut body = Map::new();
    body.insert("null_ideal_dim".into(), json!(null_dim));
    body.insert("gns_dim".into(), json!(rep.gns_dim()));
    body.insert("metric".into(), mat_json(&metric));
    body.insert("matrices".into(), Value::Object(mats));
    Ok(Report { pass: true, body, text })
}

fn elements_json(xs: &[Element]) -> Value {
    Value::Array(xs.iter().map(|x| vec_json(&x.0)).collect())
}

fn decomposition_report(alg: &ItoAlgebra, d: &Decomposition, via: &str) -> Report {
    let labels = alg.labels();
    let show = |xs: &[Element]| -> String {
        let parts: Vec<String> = xs.iter().map(|x| crate::algebra::format_element(labels, x)).collect();
        format!("[{}]", parts.join(", "))
    };
    let pass = d.verified(alg.dim());
    let r = &d.residuals;
    let residuals = json!({
        "orthogonality": r.orthogonality,
        "brownian_operator": r.brownian_operator,
        "brownian_nilpotency": r.brownian_nilpotency,
        "levy_closure": r.levy_closure,
        "idempotent": r.idempotent,
        "completeness_rank": r.completeness_rank,
    });
    let mut body = Map::new();
    body.insert("via".into(), json!(via));
    body.insert("basis".into(), json!(labels));
    body.insert(
        "quotient_identity".into(),
        d.e.as_ref().map_or(Value::Null, |e| vec_json(&e.0)),
    );
    body.insert("projector".into(), mat_json(&d.projector));
    body.insert("brownian".into(), elements_json(&d.brownian_basis));
    body.insert("levy".into(), elements_json(&d.levy_basis));
    body.insert("residuals".into(), residuals);
    body.insert("threshold".into(), json!(d.threshold));
    let mut text = format!("brownian={}\nlevy={}\n", show(&d.brownian_basis), show(&d.levy_basis));
    if let Some(e) = &d.e {
        text += &format!("quotient identity: {}\n", alg.display(e));
    }
    text += &format!(
        "residuals: orthogonality {:e}, brownian operator {:e}, nilpotency {:e}, levy closure {:e}, idempotent {:e}, rank {}/{}\n",
        r.orthogonality,
        r.brownian_operator,
        r.brownian_nilpotency,
        r.levy_closure,
        r.idempotent,
        r.completeness_rank,
        alg.dim()
    );
    text += &format!("verified: {}\n", if pass { "yes" } else { "NO" });
    Report { pass, body, text }
}

fn decompose(p: &ParsedAlgebra, via: Via) -> Result<Report, Failure> {
    let (alg, rep, _) = fundamental(&p.algebra)?;
    let quotiented = alg.dim() != p.algebra.dim();
    let d = match via {
        Via::Generic => decomposition::decompose(&alg, &rep)?,
        Via::Vacuum => {
            let form = match &p.vacuum {
                Some(f) if !quotiented => f.clone(),
                _ => VacuumForm::from_rep(&rep),
            };
            decomposition::vacuum_split(&alg, &form)?
        }
        Via::Thermal => {
            let form: &ThermalForm = match (&p.thermal, quotiented) {
                (Some(f), false) => f,
                _ => {
                    return Err(Failure::Usage(
                        "thermal split needs a document with a thermal tag".into(),
                    ))
                }
            };
            decomposition::thermal_split(&alg, form)?
        }
    };
    let name = match via {
        Via::Generic => "generic",
        Via::Vacuum => "vacuum",
        Via::Thermal => "thermal",
    };
    Ok(decomposition_report(&alg, &d, name))
}

fn classify(p: &ParsedAlgebra) -> Result<Report, Failure> {
    let (alg, rep, null_dim) = fundamental(&p.algebra)?;
    let cl = decomposition::classify(&alg, &rep)?;
    let kind = format!("{:?}", cl.kind);
    let two = cl.two_dim_type.map(|t| format!("{t:?}"));
    let mut body = Map::new();
    body.insert("null_ideal_dim".into(), json!(null_dim));
    body.insert("kind".into(), json!(kind));
    body.insert("vacuum_flag".into(), json!(cl.vacuum_flag));
    body.insert("thermal_flag".into(), json!(cl.thermal_flag));
    body.insert("two_dim_type".into(), json!(two));
    let mut text = format!(
        "kind: {kind}\nvacuum: {}\nthermal: {}\n",
        cl.vacuum_flag, cl.thermal_flag
    );
    if let Some(t) = two {
        text += &format!("two-dimensional type: {t}\n");
    }
    Ok(Report { pass: true, body, text })
}

fn number(s: &str) -> Result<f64, Failure> {
    s.parse().map_err(|_| Failure::Usage(format!("not a number: {s}")))
}

fn complex_value(s: &str) -> Result<C64, Failure> {
    match s.split_once(':') {
        Some((re, im)) => Ok(c(number(re)?, number(im)?)),
        None => Ok(c(number(s)?, 0.0)),
    }
}

/// `trivial`, `zN`/`ZN` or `s3`, with the built-in irreps.
pub fn named_group(name: &str) -> Result<(FiniteGroupData, Vec<IrrepData>), Error> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "trivial" => Ok((FiniteGroupData::trivial(), catalog::cyclic_irreps(1))),
        "s3" => Ok((FiniteGroupData::symmetric3(), catalog::s3_irreps())),
        _ => match lower.strip_prefix('z').and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 1 => Ok((FiniteGroupData::cyclic(n), catalog::cyclic_irreps(n))),
            _ => Err(Error::Parameter(format!(
                "unknown group `{name}`, expected trivial, zN or s3"
            ))),
        },
    }
}

fn lambda_values(group: &FiniteGroupData, raw: &[String]) -> Result<PositiveDefiniteFunction, Failure> {
    if raw.is_empty() {
        return Ok(PositiveDefiniteFunction::delta(group));
    }
    if raw.len() != group.order() {
        return Err(Failure::Usage(format!(
            "lambda: expected {} values, got {}",
            group.order(),
            raw.len()
        )));
    }
    let values = raw.iter().map(|s| complex_value(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(PositiveDefiniteFunction {
        values: CVec::from_vec(values),
    })
}

/// Catalog name and CLI parameters to a document.
pub fn catalog_document(name: &str, params: &[String], tol: f64) -> Result<AlgebraDocument, Error> {
    let num = |s: &String| {
        s.parse::<f64>()
            .map_err(|_| Error::Parameter(format!("not a number: {s}")))
    };
    match name {
        "periodic_wiener" => {
            let (k, rho) = params
                .split_first()
                .ok_or_else(|| Error::Parameter("periodic_wiener takes K RHO_1 .. RHO_K".into()))?;
            let k: usize = k
                .parse()
                .map_err(|_| Error::Parameter(format!("K must be a count, got {k}")))?;
            let rho = rho.iter().map(num).collect::<Result<Vec<_>, _>>()?;
            if rho.len() != k {
                return Err(Error::Parameter(format!(
                    "periodic_wiener with K = {k} takes {k} values of rho"
                )));
            }
            let alg = catalog::build_periodic_wiener(k, &catalog::self_inverse_spectrum(&rho), tol)?;
            Ok(AlgebraDocument::from_algebra(&alg, None, None))
        }
        "group_poisson" => {
            let (g, rest) = params
                .split_first()
                .ok_or_else(|| Error::Parameter("group_poisson takes GROUP [LAMBDA ..]".into()))?;
            let (group, _) = named_group(g)?;
            let lambda = lambda_values(&group, rest).map_err(|f| match f {
                Failure::Usage(m) | Failure::Verification(m) => Error::Parameter(m),
            })?;
            let gp = catalog::build_group_poisson(&group, &lambda, tol)?;
            if !gp.report.pass {
                eprintln!("warning: group Poisson table fails the axioms: {}", gp.report);
            }
            Ok(AlgebraDocument::from_algebra(&gp.algebra, None, gp.thermal.as_ref()))
        }
        _ => {
            let ps = params.iter().map(num).collect::<Result<Vec<_>, _>>()?;
            let which = Standard::parse(name, &ps)?;
            let alg = catalog::build_standard(&which)?.with_tol(tol);
            let (vacuum, thermal) = match which {
                Standard::Hp => (Some(catalog::hp_vacuum_form()), None),
                Standard::ThermalBrownian { rho_plus, rho_minus } => {
                    (None, catalog::thermal_brownian_form(rho_plus, rho_minus))
                }
                Standard::MixedWienerPoisson => (None, Some(catalog::mixed_wiener_poisson_form())),
                _ => (None, None),
            };
            Ok(AlgebraDocument::from_algebra(&alg, vacuum.as_ref(), thermal.as_ref()))
        }
    }
}

fn group_convolution(g: &GroupArgs, tol: f64) -> Result<Report, Failure> {
    let (group, _) = named_group(&g.group)?;
    let lambda = lambda_values(&group, &g.lambda)?;
    let r = catalog::convolution_checks(&group, &lambda, tol)?;
    let mut body = Map::new();
    body.insert("group".into(), json!(g.group));
    body.insert("lambda".into(), vec_json(&lambda.values));
    body.insert("self_inverse_residual".into(), json!(r.self_inverse_residual));
    body.insert("hermiticity_residual".into(), json!(r.hermiticity_residual));
    body.insert("min_eigenvalue".into(), json!(r.min_eigenvalue));
    body.insert("self_inverse".into(), json!(r.self_inverse));
    body.insert("positive".into(), json!(r.positive));
    let text = format!(
        "self-inverse: {} (residual {:e})\npositive: {} (min eigenvalue {:e}, hermiticity {:e})\n",
        r.self_inverse, r.self_inverse_residual, r.positive, r.min_eigenvalue, r.hermiticity_residual
    );
    Ok(Report {
        pass: r.self_inverse && r.positive,
        body,
        text,
    })
}

fn group_spectral(g: &GroupArgs, tol: f64) -> Result<Report, Failure> {
    let (group, irreps) = named_group(&g.group)?;
    let lambda = lambda_values(&group, &g.lambda)?;
    let r = catalog::spectral_decompose(&group, &irreps, &lambda, tol)?;
    let positive = r.min_eigenvalues.iter().all(|&e| e >= -tol) && r.hermiticity_residual <= tol;
    let pass = r.residual <= tol && positive;
    let mut rho = Map::new();
    let mut text = String::new();
    for (irrep, m) in irreps.iter().zip(&r.rho) {
        rho.insert(irrep.label.clone(), mat_json(m));
        text += &format!("rho[{}] (weight {}):\n{}", irrep.label, irrep.weight, mat_text(m, "  "));
    }
    text += &format!(
        "reconstruction residual: {:e}\nhermitian positive: {positive}\n",
        r.residual
    );
    let mut body = Map::new();
    body.insert("group".into(), json!(g.group));
    body.insert("lambda".into(), vec_json(&lambda.values));
    body.insert("rho".into(), Value::Object(rho));
    body.insert("residual".into(), json!(r.residual));
    body.insert("min_eigenvalues".into(), json!(r.min_eigenvalues));
    body.insert("hermiticity_residual".into(), json!(r.hermiticity_residual));
    Ok(Report { pass, body, text })
}

/// Tolerance on `⟨Λ_n(a)⟩ = n h l(a)`.
const MEAN_TOL: f64 = 1e-12;

fn fock_simulate(
    p: &ParsedAlgebra,
    element: Option<&str>,
    h: f64,
    cells: usize,
    moments: usize,
) -> Result<Report, Failure> {
    let (alg, rep, _) = fundamental(&p.algebra)?;
    let config = ToyFockConfig::new(h, cells)?;
    config.space_dim(rep.gns_dim())?;
    let indices: Vec<usize> = match element {
        Some(label) => vec![alg
            .index_of(label)
            .ok_or_else(|| Failure::Usage(format!("no basis element `{label}`")))?],
        None => (0..alg.dim()).collect(),
    };
    let mut pass = true;
    let mut results = Map::new();
    let mut text = format!("cells {cells}, h {h}, space dim {}\n", config.space_dim(rep.gns_dim())?);
    for i in indices {
        let a = alg.basis_element(i);
        let ell = rep.l(&a);
        let states = fock::simulate_process(&rep, &a, &config)?;
        let means: Vec<C64> = states.iter().map(|s| s.vacuum_mean()).collect();
        let deviation = means
            .iter()
            .enumerate()
            .map(|(n, m)| (m - ell * (n as f64 * h)).norm())
            .fold(0.0, f64::max);
        let ok = deviation <= MEAN_TOL * (1.0 + ell.norm() * cells as f64 * h);
        pass &= ok;
        let last = states.last().expect("at least one state");
        let moment_values = last.moments(moments);
        let label = &alg.labels()[i];
        text += &format!(
            "{label}: final mean {} (expected {}), mean deviation {deviation:e}, moments [{}]\n",
            fmt_c(*means.last().unwrap()),
            fmt_c(ell * (cells as f64 * h)),
            moment_values.iter().map(|z| fmt_c(*z)).collect::<Vec<_>>().join(", ")
        );
        results.insert(
            label.clone(),
            json!({
                "means": Value::Array(means.iter().map(|z| pair(*z)).collect()),
                "mean_deviation": deviation,
                "moments": Value::Array(moment_values.iter().map(|z| pair(*z)).collect()),
                "pass": ok,
            }),
        );
    }
    let mut body = Map::new();
    body.insert("h".into(), json!(h));
    body.insert("cells".into(), json!(cells));
    body.insert("elements".into(), Value::Object(results));
    Ok(Report { pass, body, text })
}

fn fock_verify(p: &ParsedAlgebra, h: f64) -> Result<Report, Failure> {
    let (alg, rep, _) = fundamental(&p.algebra)?;
    ToyFockConfig::new(h, 1)?;
    let mut pass = true;
    let mut rows = Vec::new();
    let mut text = format!("single-cell Ito defect at h = {h} and h/10\n");
    let labels = alg.labels();
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let r = fock::verify_ito_table(&alg, &rep, &alg.basis_element(i), &alg.basis_element(j), h)?;
            pass &= r.order_two;
            let ratio = r.ratio.map_or("exact".to_string(), |x| format!("{x:.3}"));
            text += &format!(
                "  {} {}: deviation {:e}, refined {:e}, ratio {ratio}{}\n",
                labels[i],
                labels[j],
                r.deviation,
                r.deviation_refined,
                if r.order_two { "" } else { "  NOT ORDER TWO" }
            );
            rows.push(json!({
                "a": labels[i],
                "b": labels[j],
                "deviation": r.deviation,
                "deviation_refined": r.deviation_refined,
                "ratio": r.ratio,
                "constant": r.constant,
                "order_two": r.order_two,
            }));
        }
    }
    let mut body = Map::new();
    body.insert("h".into(), json!(h));
    body.insert("pairs".into(), Value::Array(rows));
    Ok(Report { pass, body, text })
}

fn fock_modes(k_max: usize, rho: &[f64], cells: usize, tol: f64) -> Result<Report, Failure> {
    if rho.len() != k_max {
        return Err(Failure::Usage(format!("--rho: expected {k_max} values ρ_1 .. ρ_K")));
    }
    let spectrum = catalog::self_inverse_spectrum(rho);
    let mut body = Map::new();
    body.insert("k_max".into(), json!(k_max));
    body.insert("cells".into(), json!(cells));
    body.insert("rho".into(), json!(spectrum));
    match catalog::verify_mode_realization(k_max, &spectrum, cells, tol) {
        Ok(r) => {
            let grid = Value::Array(
                r.grid
                    .iter()
                    .map(|row| Value::Array(row.iter().map(|z| pair(*z)).collect()))
                    .collect(),
            );
            body.insert("grid".into(), grid);
            body.insert("residual".into(), json!(r.residual));
            body.insert("aliased".into(), json!([]));
            let mut text = String::new();
            for (i, row) in r.grid.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|z| fmt_c(linalg::chop(*z))).collect();
                text += &format!("  d_{} row: [{}]\n", i as i64 - k_max as i64, cells.join(", "));
            }
            text += &format!("residual {:e}\n", r.residual);
            Ok(Report { pass: true, body, text })
        }
        Err(Error::Aliasing { pairs, .. }) => {
            let text = format!("aliasing with N = {cells} at (i, k) in {pairs:?}\n");
            body.insert("aliased".into(), json!(pairs));
            Ok(Report {
                pass: false,
                body,
                text,
            })
        }
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_env() {
        assert_eq!(resolve_tol(Some(1e-6), Some("1e-3")), Ok(1e-6));
        assert_eq!(resolve_tol(None, Some("1e-3")), Ok(1e-3));
        assert_eq!(resolve_tol(None, None), Ok(DEFAULT_TOL));
        assert!(resolve_tol(None, Some("tiny")).is_err());
        assert!(resolve_tol(Some(-1.0), None).is_err());
    }

    #[test]
    fn group_names() {
        assert_eq!(named_group("Z3").unwrap().0.order(), 3);
        assert_eq!(named_group("s3").unwrap().1.len(), 3);
        assert_eq!(named_group("trivial").unwrap().0.order(), 1);
        assert!(named_group("z0").is_err());
        assert!(named_group("a5").is_err());
    }

    #[test]
    fn catalog_documents_parse_back() {
        let cases: &[(&str, &[&str])] = &[
            ("wiener", &[]),
            ("hp", &[]),
            ("thermal_brownian", &["2", "1"]),
            ("periodic_wiener", &["1", "2"]),
            ("group_poisson", &["s3"]),
        ];
        for (name, params) in cases {
            let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
            let doc = catalog_document(name, &params, 1e-9).unwrap();
            let parsed = parse_algebra(&doc.emit(), 1e-9).unwrap();
            assert!(parsed.warnings.is_empty(), "{name}");
        }
        assert_eq!(
            parse_algebra(&catalog_document("wiener", &[], 1e-9).unwrap().emit(), 1e-9)
                .unwrap()
                .algebra,
            catalog::wiener()
        );
    }

    #[test]
    fn catalog_parameter_errors() {
        assert!(matches!(
            catalog_document("thermal_brownian", &["1".into(), "2".into()], 1e-9),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            catalog_document("periodic_wiener", &["2".into(), "2".into()], 1e-9),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(catalog_document("gauss", &[], 1e-9), Err(Error::Parameter(_))));
    }
}

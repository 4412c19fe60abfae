//! `bihom` — squared-norm certificates for bihomogeneous polynomials.
//!
//! Subcommands mirror the library pipeline: `decompose` and `verify` work
//! with individual certificates, `stabilize` searches for the smallest
//! multiplier degree, `gram`/`phi`/`bergman-diag`/`mc-ip` expose the domain
//! integration layer, and `sphere-min` runs the positivity pre-check on its
//! own.
//!
//! Exit codes: `0` success, `1` bad input or I/O, `2` a degree cap was
//! exhausted, `3` the positivity hypothesis was disproved (a certified
//! negative value or a non-PSD coefficient matrix).
//!
//! All results are printed as JSON (CSV for `bergman-diag`) to stdout or
//! `--output`; reruns with identical inputs and seeds produce identical
//! bytes.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bihom::cert::{decompose, verify, DecomposeOutcome, DomainId, SosCertificate};
use bihom::domains::{DomainSpec, GramProvenance};
use bihom::error::Error;
use bihom::json as fmt;
use bihom::poly::{BihomPoly, HoloPoly};
use bihom::scalar::{format_f64, Complex64, GaussianRational, Scalar};
use bihom::stabilize::{check_positive_on_sphere, stabilize_domain, stabilize_euclidean, StabilizeOutcome};
use bihom::Result;

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 1;
const EXIT_CAP: i32 = 2;
const EXIT_DISPROOF: i32 = 3;

#[derive(Parser)]
#[command(
    name = "bihom",
    version,
    about = "Squared-norm certificates for bihomogeneous Hermitian polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tower {
    /// Gaussian-rational arithmetic; verdicts are exact.
    Exact,
    /// Double-precision complex arithmetic; verdicts are numeric.
    Float,
}

#[derive(Args)]
struct Common {
    /// Scalar arithmetic to run in.
    #[arg(long, value_enum, default_value_t = Tower::Exact)]
    tower: Tower,
    /// Worker threads for Monte-Carlo integration.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Find the smallest multiplier degree that yields a squared norm.
    Stabilize {
        /// Bihomogeneous polynomial (JSON file).
        #[arg(long)]
        input: PathBuf,
        /// Domain description (JSON file); omit for the Euclidean multiplier.
        #[arg(long)]
        domain: Option<PathBuf>,
        /// Largest multiplier degree to try.
        #[arg(long, default_value_t = 16)]
        d_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Decompose a polynomial as a squared norm, or report a witness.
    Decompose {
        /// Bihomogeneous polynomial (JSON file).
        #[arg(long)]
        input: PathBuf,
        /// Fail on merely semidefinite (rank-deficient) inputs.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a certificate against the product it claims to decompose.
    Verify {
        /// Certificate (JSON file).
        #[arg(long)]
        certificate: PathBuf,
        /// The original polynomial the certificate was produced for.
        #[arg(long)]
        input: PathBuf,
        /// Domain description; required when the certificate's multiplier
        /// cannot be reconstructed from its name alone (linear-ball,
        /// sampled).
        #[arg(long)]
        domain: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the monomial Gram matrix of a domain at one degree.
    Gram {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Print `‖Φᵈ(z)‖²`, the squared norm of the orthonormal basis.
    Phi {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the truncated Bergman kernel diagonal as CSV.
    BergmanDiag {
        #[arg(long)]
        domain: PathBuf,
        /// Truncation degree of the kernel.
        #[arg(long)]
        max_degree: u32,
        /// Evaluation points, one per line (re im pairs); defaults to a ray.
        #[arg(long)]
        points: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the minimum of a polynomial over the unit sphere.
    SphereMin {
        /// Bihomogeneous polynomial (JSON file).
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo inner product of two holomorphic polynomials.
    McIp {
        #[arg(long)]
        domain: PathBuf,
        /// Left factor (holomorphic polynomial, JSON file).
        #[arg(long)]
        p: PathBuf,
        /// Right factor; defaults to `p`.
        #[arg(long)]
        q: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } | Error::DegreeOverflow { .. } => EXIT_CAP,
                Error::HypothesisViolated { .. } => EXIT_DISPROOF,
                _ => EXIT_INPUT,
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Stabilize { input, domain, d_max, common } => match common.tower {
            Tower::Exact => cmd_stabilize::<GaussianRational>(&input, domain.as_deref(), d_max, &common),
            Tower::Float => cmd_stabilize::<Complex64>(&input, domain.as_deref(), d_max, &common),
        },
        Command::Decompose { input, strict, common } => match common.tower {
            Tower::Exact => cmd_decompose::<GaussianRational>(&input, strict, &common),
            Tower::Float => cmd_decompose::<Complex64>(&input, strict, &common),
        },
        Command::Verify { certificate, input, domain, common } => match common.tower {
            Tower::Exact => {
                cmd_verify::<GaussianRational>(&certificate, &input, domain.as_deref(), &common)
            }
            Tower::Float => cmd_verify::<Complex64>(&certificate, &input, domain.as_deref(), &common),
        },
        Command::Gram { domain, degree, common } => match common.tower {
            Tower::Exact => cmd_gram::<GaussianRational>(&domain, degree, &common),
            Tower::Float => cmd_gram::<Complex64>(&domain, degree, &common),
        },
        Command::Phi { domain, degree, common } => match common.tower {
            Tower::Exact => cmd_phi::<GaussianRational>(&domain, degree, &common),
            Tower::Float => cmd_phi::<Complex64>(&domain, degree, &common),
        },
        Command::BergmanDiag { domain, max_degree, points, common } => {
            cmd_bergman_diag(&domain, max_degree, points.as_deref(), &common)
        }
        Command::SphereMin { input, common } => match common.tower {
            Tower::Exact => cmd_sphere_min::<GaussianRational>(&input, &common),
            Tower::Float => cmd_sphere_min::<Complex64>(&input, &common),
        },
        Command::McIp { domain, p, q, samples, seed, common } => {
            cmd_mc_ip(&domain, &p, q.as_deref(), samples, seed, &common)
        }
    }
}

// ---------------------------------------------------------------------
// Command bodies
// ---------------------------------------------------------------------

fn cmd_stabilize<S: Scalar>(
    input: &Path,
    domain: Option<&Path>,
    d_max: u32,
    common: &Common,
) -> Result<i32> {
    let f: BihomPoly<S> = fmt::bihom_from_json(&read_json(input)?)?;
    let outcome = match domain {
        None => stabilize_euclidean(&f, d_max),
        Some(path) => {
            let dom = fmt::domain_from_json(&read_json(path)?)?;
            stabilize_domain(&f, &dom, d_max)
        }
    };
    match outcome {
        Ok(out) => {
            emit(common, &fmt::to_stable_string(&fmt::stabilize_outcome_to_json(&out)))?;
            Ok(match out {
                StabilizeOutcome::Stabilized(_) => EXIT_OK,
                StabilizeOutcome::CapExceeded { .. } => EXIT_CAP,
            })
        }
        Err(Error::HypothesisViolated { point, value }) => {
            emit(common, &fmt::to_stable_string(&hypothesis_json(&point, value)))?;
            Ok(EXIT_DISPROOF)
        }
        Err(e) => Err(e),
    }
}

fn cmd_decompose<S: Scalar>(input: &Path, strict: bool, common: &Common) -> Result<i32> {
    let f: BihomPoly<S> = fmt::bihom_from_json(&read_json(input)?)?;
    match decompose(&f, strict)? {
        DecomposeOutcome::Certificate(cert) => {
            let doc = json!({
                "psd": true,
                "certificate": fmt::certificate_to_json(&cert),
            });
            emit(common, &fmt::to_stable_string(&doc))?;
            Ok(EXIT_OK)
        }
        DecomposeOutcome::NotPsd(w) => {
            let doc = json!({
                "psd": false,
                "witness": fmt::witness_to_json(&w),
            });
            emit(common, &fmt::to_stable_string(&doc))?;
            Ok(EXIT_DISPROOF)
        }
    }
}

fn cmd_verify<S: Scalar>(
    certificate: &Path,
    input: &Path,
    domain: Option<&Path>,
    common: &Common,
) -> Result<i32> {
    // Accept either a bare certificate or the wrapped output of
    // `decompose`/`stabilize`, which embed one under "certificate".
    let mut cert_value = read_json(certificate)?;
    if let Some(inner) = cert_value.get("certificate") {
        cert_value = inner.clone();
    }
    let cert: SosCertificate<S> = fmt::certificate_from_json(&cert_value)?;
    let f: BihomPoly<S> = fmt::bihom_from_json(&read_json(input)?)?;
    let dom = domain
        .map(|p| fmt::domain_from_json(&read_json(p)?))
        .transpose()?;
    let product = certified_product(&cert, &f, dom.as_ref())?;
    let report = verify(&cert, &product)?;
    let pass = report.pass();
    emit(common, &fmt::to_stable_string(&fmt::verify_report_to_json(&report)))?;
    Ok(if pass { EXIT_OK } else { EXIT_DISPROOF })
}

/// Rebuild the product polynomial a certificate refers to: the input times
/// the multiplier its `domain`/`d` tags name.
fn certified_product<S: Scalar>(
    cert: &SosCertificate<S>,
    f: &BihomPoly<S>,
    dom: Option<&DomainSpec>,
) -> Result<BihomPoly<S>> {
    let multiplier: BihomPoly<S> = match &cert.domain {
        DomainId::Euclidean => BihomPoly::norm_power(f.vars(), cert.d),
        id => {
            let dom = match dom {
                Some(d) => d.clone(),
                None => match id {
                    DomainId::Ball => DomainSpec::ball(f.vars())?,
                    DomainId::Polydisc => DomainSpec::polydisc(f.vars())?,
                    DomainId::Egg(p) => DomainSpec::egg(*p)?,
                    _ => {
                        return Err(Error::invalid(
                            "verify",
                            format!(
                                "certificate multiplier `{id}` needs --domain to reconstruct"
                            ),
                        ))
                    }
                },
            };
            if dom.id() != *id {
                return Err(Error::invalid(
                    "verify",
                    format!("--domain is `{}` but the certificate says `{id}`", dom.id()),
                ));
            }
            dom.phi_squared_norm(cert.d)?
        }
    };
    multiplier.mul(f)
}

fn cmd_gram<S: Scalar>(domain: &Path, degree: u32, common: &Common) -> Result<i32> {
    let dom = fmt::domain_from_json(&read_json(domain)?)?;
    let gram = dom.gram::<S>(degree)?;
    let basis = bihom::multiindex::enumerate_basis(dom.vars(), degree);
    let rows: Vec<Value> = (0..gram.mat.nrows())
        .map(|i| {
            Value::Array(
                gram.mat
                    .row(i)
                    .iter()
                    .map(|e| Value::String(e.to_json_string()))
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "domain": dom.id().as_str(),
        "degree": degree,
        "basis": basis.iter().map(|a| a.exponents().to_vec()).collect::<Vec<_>>(),
        "matrix": rows,
        "provenance": match gram.provenance {
            GramProvenance::ClosedForm => "closed-form",
            GramProvenance::MonteCarlo => "monte-carlo",
        },
        "scale": format_f64(dom.scale_factor()),
    });
    emit(common, &fmt::to_stable_string(&doc))?;
    Ok(EXIT_OK)
}

fn cmd_phi<S: Scalar>(domain: &Path, degree: u32, common: &Common) -> Result<i32> {
    let dom = fmt::domain_from_json(&read_json(domain)?)?;
    let phi: BihomPoly<S> = dom.phi_squared_norm(degree)?;
    emit(common, &fmt::to_stable_string(&fmt::bihom_to_json(&phi)))?;
    Ok(EXIT_OK)
}

fn cmd_bergman_diag(
    domain: &Path,
    max_degree: u32,
    points: Option<&Path>,
    common: &Common,
) -> Result<i32> {
    let dom = fmt::domain_from_json(&read_json(domain)?)?;
    let pts: Vec<Vec<Complex64>> = match points {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let pts = fmt::parse_points_text(&text)?;
            for (i, p) in pts.iter().enumerate() {
                if p.len() != dom.vars() {
                    return Err(Error::DimensionMismatch {
                        expected: dom.vars(),
                        got: p.len(),
                    });
                }
                let _ = i;
            }
            pts
        }
        None => default_ray(dom.vars()),
    };
    let kernel = bihom::bergman::truncated_kernel(&dom, max_degree)?;
    let mut out = String::from("D");
    for j in 1..=dom.vars() {
        out.push_str(&format!(",z{j}_re,z{j}_im"));
    }
    out.push_str(",K\n");
    for z in &pts {
        for d in 0..=max_degree {
            let k = kernel.diag_partial(z, d)?;
            out.push_str(&d.to_string());
            for c in z {
                out.push(',');
                out.push_str(&format_f64(c.re));
                out.push(',');
                out.push_str(&format_f64(c.im));
            }
            out.push(',');
            out.push_str(&format_f64(k));
            out.push('\n');
        }
    }
    emit(common, &out)?;
    Ok(EXIT_OK)
}

/// Default evaluation points: eight steps along the diagonal direction
/// `(1, …, 1)/√n`, radii 0.1 … 0.8.
fn default_ray(n: usize) -> Vec<Vec<Complex64>> {
    let unit = 1.0 / (n as f64).sqrt();
    (1..=8)
        .map(|k| {
            let r = k as f64 / 10.0;
            vec![Complex64::new(r * unit, 0.0); n]
        })
        .collect()
}

fn cmd_sphere_min<S: Scalar>(input: &Path, common: &Common) -> Result<i32> {
    let f: BihomPoly<S> = fmt::bihom_from_json(&read_json(input)?)?;
    let est = check_positive_on_sphere(&f)?;
    let doc = json!({
        "min": format_f64(est.value),
        "point": est.point.iter()
            .map(|c| json!([format_f64(c.re), format_f64(c.im)]))
            .collect::<Vec<_>>(),
        "starts": est.starts,
    });
    emit(common, &fmt::to_stable_string(&doc))?;
    Ok(EXIT_OK)
}

fn cmd_mc_ip(
    domain: &Path,
    p: &Path,
    q: Option<&Path>,
    samples: u64,
    seed: u64,
    common: &Common,
) -> Result<i32> {
    let dom = fmt::domain_from_json(&read_json(domain)?)?;
    let pp: HoloPoly<Complex64> = fmt::holo_from_json(&read_json(p)?)?;
    let qq: HoloPoly<Complex64> = match q {
        Some(path) => fmt::holo_from_json(&read_json(path)?)?,
        None => pp.clone(),
    };
    let est = dom.mc_inner_product(&pp, &qq, samples, seed, common.jobs)?;
    let doc = json!({
        "domain": dom.id().as_str(),
        "value": [format_f64(est.value.re), format_f64(est.value.im)],
        "std_err": [format_f64(est.std_err.re), format_f64(est.std_err.im)],
        "samples": est.samples,
        "accepted": est.accepted,
        "seed": seed,
        "scale": format_f64(dom.scale_factor()),
    });
    emit(common, &fmt::to_stable_string(&doc))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------
// I/O plumbing
// ---------------------------------------------------------------------

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid("input", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::invalid("json", format!("{}: {e}", path.display())))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn hypothesis_json(point: &[(f64, f64)], value: f64) -> Value {
    json!({
        "stabilized": false,
        "hypothesis_violated": true,
        "min": format_f64(value),
        "point": point.iter()
            .map(|(re, im)| json!([format_f64(*re), format_f64(*im)]))
            .collect::<Vec<_>>(),
    })
}

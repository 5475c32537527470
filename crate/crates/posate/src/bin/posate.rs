//! Command-line driver: certificate search, theorem-hypothesis checks,
//! refutation witnesses, certificate re-verification, and the square-root
//! Taylor defect.
//!
//! Exit codes: 0 for a positive verdict, 1 for a negative verdict backed
//! by a verified payload, 2 for inconclusive, 3 and above for usage or
//! input errors.

use clap::{Parser, Subcommand, ValueEnum};
use posate::checkers::{
    check_boundary_theorem, check_interior_theorem, check_polytope_face, check_sumbiti,
    polytope_vertices, segment_grid, DecompositionTerm, IdealBasis, IdealRole, SampleSet,
    Strengthen, Verdict,
};
use posate::cone::{
    handelman_certify, verify_certificate, Certificate, CertifyOutcome, DEFAULT_BASIS_CAP,
};
use num::Signed;
use posate::poly::{sqrt_defect, taylor_sqrt, Point};
use posate::problem::{parse_problem, ProblemFile};
use posate::report::{render_certified, render_check_report, render_not_found, render_refutation};
use posate::witness::{quotient_witness, witness_search, WitnessAttempt};
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

const EXIT_POSITIVE: i32 = 0;
const EXIT_NEGATIVE: i32 = 1;
const EXIT_INCONCLUSIVE: i32 = 2;
const EXIT_USAGE: i32 = 3;

const DEFAULT_MAX_DEGREE: u32 = 8;
const DEFAULT_GRID_DENSITY: u32 = 5;
const BASIS_CAP_ENV: &str = "POSATE_BASIS_CAP";

#[derive(Parser)]
#[command(name = "posate", version, about = "Exact positivity certificates on semialgebraic sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a denominator-free certificate for the target; on
    /// failure, scan for a refutation witness.
    Certify {
        file: PathBuf,
        /// Highest product degree tried (defaults to 8).
        #[arg(long)]
        max_degree: Option<u32>,
        /// Largest product basis allowed (defaults to 20000).
        #[arg(long)]
        basis_cap: Option<usize>,
        /// Segment grid density for the refutation scan (defaults to 5).
        #[arg(long)]
        grid_density: Option<u32>,
    },
    /// Check the hypotheses of a positivity theorem on sample points.
    Check {
        file: PathBuf,
        #[arg(long)]
        theorem: Theorem,
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        basis_cap: Option<usize>,
        #[arg(long)]
        grid_density: Option<u32>,
    },
    /// Search for a refutation witness for the target.
    Refute {
        file: PathBuf,
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        grid_density: Option<u32>,
    },
    /// Re-verify a previously written certificate against its problem.
    Verify {
        file: PathBuf,
        /// Certificate path (defaults to `<file>.cert`).
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Print the degree-n Taylor approximation of sqrt(1-x) and its
    /// scaled defect, and report whether all defect coefficients are
    /// nonnegative.
    Taylor { n: u32 },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Sumbiti,
    Boundary,
    PolytopeFace,
    Interior,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            exit(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            exit(EXIT_USAGE);
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.cmd {
        Cmd::Certify {
            file,
            max_degree,
            basis_cap,
            grid_density,
        } => cmd_certify(&file, max_degree, basis_cap, grid_density),
        Cmd::Check {
            file,
            theorem,
            max_degree,
            basis_cap,
            grid_density,
        } => cmd_check(&file, theorem, max_degree, basis_cap, grid_density),
        Cmd::Refute {
            file,
            max_degree,
            grid_density,
        } => cmd_refute(&file, max_degree, grid_density),
        Cmd::Verify { file, certificate } => cmd_verify(&file, certificate),
        Cmd::Taylor { n } => cmd_taylor(n),
    }
}

fn estr(e: impl Display) -> String {
    e.to_string()
}

fn load(file: &Path) -> Result<ProblemFile, String> {
    let text =
        fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))
}

fn effective_max_degree(flag: Option<u32>, p: &ProblemFile) -> u32 {
    flag.or(p.options.max_degree).unwrap_or(DEFAULT_MAX_DEGREE)
}

fn effective_basis_cap(flag: Option<usize>, p: &ProblemFile) -> Result<usize, String> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    if let Ok(v) = std::env::var(BASIS_CAP_ENV) {
        return v
            .parse()
            .map_err(|_| format!("{BASIS_CAP_ENV}: bad integer `{v}`"));
    }
    Ok(p.options.basis_cap.unwrap_or(DEFAULT_BASIS_CAP))
}

fn effective_density(flag: Option<u32>, p: &ProblemFile) -> u32 {
    flag.or(p.options.grid_density).unwrap_or(DEFAULT_GRID_DENSITY)
}

fn cert_path(file: &Path, flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| PathBuf::from(format!("{}.cert", file.display())))
}

fn write_atomic(path: &Path, content: &str) -> Result<(), String> {
    let tmp = path.with_extension("cert.tmp");
    fs::write(&tmp, content).map_err(|e| format!("{}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Candidate points for the refutation scan: user samples plus, when
/// every generator is affine, the vertices and segment grid of the
/// polytope they cut out.
fn candidate_points(p: &ProblemFile, density: u32) -> Result<Vec<Point>, String> {
    let mut points = p.samples.clone();
    if let Some(z) = &p.witness.point {
        points.push(z.clone());
    }
    let affine = p
        .generators
        .iter()
        .all(|g| g.degree().unwrap_or(0) <= 1);
    if affine {
        if let Ok(vertices) = polytope_vertices(&p.generators) {
            points.extend(segment_grid(&vertices, density));
        }
    }
    points.sort();
    points.dedup();
    Ok(points)
}

fn exit_code_for(verdict: &Verdict) -> i32 {
    match verdict {
        Verdict::VerifiedOnSamples => EXIT_POSITIVE,
        Verdict::Violated(_) => EXIT_NEGATIVE,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    }
}

fn cmd_certify(
    file: &Path,
    max_degree: Option<u32>,
    basis_cap: Option<usize>,
    grid_density: Option<u32>,
) -> Result<i32, String> {
    let p = load(file)?;
    let gens = p.generator_set().map_err(estr)?;
    let d_max = effective_max_degree(max_degree, &p);
    let cap = effective_basis_cap(basis_cap, &p)?;
    match handelman_certify(&p.target, &gens, d_max, cap).map_err(estr)? {
        CertifyOutcome::Certified {
            degree,
            certificate,
        } => {
            if !verify_certificate(&p.target, &certificate, &gens).map_err(estr)? {
                return Err("internal: produced certificate failed verification".into());
            }
            let path = cert_path(file, None);
            write_atomic(&path, &certificate.to_text())?;
            print!(
                "{}",
                render_certified(degree, &certificate, &path.display().to_string())
            );
            Ok(EXIT_POSITIVE)
        }
        outcome @ CertifyOutcome::NotFound { .. } => {
            print!("{}", render_not_found(&outcome));
            let density = effective_density(grid_density, &p);
            let candidates = candidate_points(&p, density)?;
            match witness_search(&p.target, &gens, &candidates).map_err(estr)? {
                Some(report) => {
                    print!("{}", render_refutation(&report));
                    Ok(EXIT_NEGATIVE)
                }
                None => {
                    println!("refutation-scan: no-witness-found");
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
    }
}

fn variety_basis(p: &ProblemFile) -> Result<(IdealBasis, usize), String> {
    let (gens, dim) = p
        .variety
        .as_ref()
        .ok_or("missing [variety] section")?;
    let j = IdealBasis::new(gens.clone(), IdealRole::Variety).map_err(estr)?;
    Ok((j, p.dim() - dim))
}

fn cmd_check(
    file: &Path,
    theorem: Theorem,
    max_degree: Option<u32>,
    basis_cap: Option<usize>,
    grid_density: Option<u32>,
) -> Result<i32, String> {
    let p = load(file)?;
    let gens = p.generator_set().map_err(estr)?;
    let d = effective_max_degree(max_degree, &p);
    let cap = effective_basis_cap(basis_cap, &p)?;
    let report = match theorem {
        Theorem::Sumbiti => {
            if p.decomposition.is_empty() {
                return Err("missing [decomposition] section".into());
            }
            let terms: Vec<DecompositionTerm> = p
                .decomposition
                .iter()
                .map(|(weight, member)| {
                    let member_certificate =
                        match handelman_certify(member, &gens, d, cap) {
                            Ok(CertifyOutcome::Certified { certificate, .. }) => {
                                Some(certificate)
                            }
                            _ => None,
                        };
                    DecompositionTerm {
                        weight: weight.clone(),
                        member: member.clone(),
                        member_certificate,
                    }
                })
                .collect();
            let samples =
                SampleSet::user(p.samples.clone(), &p.target, &gens).map_err(estr)?;
            let strengthen = p.options.epsilon.clone().map(|epsilon| Strengthen {
                epsilon,
                d_max: d,
                cap,
            });
            check_sumbiti(&p.target, &terms, &gens, &samples, strengthen.as_ref())
                .map_err(estr)?
        }
        Theorem::Boundary => {
            if p.ideal.is_empty() {
                return Err("missing [ideal] section".into());
            }
            let (j, codim) = variety_basis(&p)?;
            let samples =
                SampleSet::user(p.samples.clone(), &p.target, &gens).map_err(estr)?;
            check_boundary_theorem(&p.target, &gens, &p.ideal, &j, &samples, d, codim)
                .map_err(estr)?
        }
        Theorem::PolytopeFace => {
            if p.face_active.is_empty() {
                return Err("missing [face] section".into());
            }
            let density = effective_density(grid_density, &p);
            check_polytope_face(
                &p.target,
                &p.generators,
                &p.face_active,
                &p.samples,
                d,
                density,
            )
            .map_err(estr)?
        }
        Theorem::Interior => {
            let (j, codim) = variety_basis(&p)?;
            let samples =
                SampleSet::user(p.samples.clone(), &p.target, &gens).map_err(estr)?;
            check_interior_theorem(
                &p.target,
                &gens,
                &j,
                &samples,
                d,
                codim,
                p.options.assert_lci,
            )
            .map_err(estr)?
        }
    };
    print!("{}", render_check_report(&report));
    Ok(exit_code_for(&report.verdict))
}

fn cmd_refute(
    file: &Path,
    max_degree: Option<u32>,
    grid_density: Option<u32>,
) -> Result<i32, String> {
    let p = load(file)?;
    let gens = p.generator_set().map_err(estr)?;
    let density = effective_density(grid_density, &p);
    let candidates = candidate_points(&p, density)?;
    if !candidates.is_empty() {
        if let Some(report) =
            witness_search(&p.target, &gens, &candidates).map_err(estr)?
        {
            print!("{}", render_refutation(&report));
            return Ok(EXIT_NEGATIVE);
        }
    }
    if let (Some(index), Some(z0)) = (p.witness.generator, &p.witness.point) {
        if index >= p.generators.len() {
            return Err(format!("witness generator index {index} out of range"));
        }
        let d = effective_max_degree(max_degree, &p);
        match quotient_witness(&p.target, &gens, index, z0, d, p.witness.assert_hypotheses)
            .map_err(estr)?
        {
            WitnessAttempt::Accepted(report) => {
                print!("{}", render_refutation(&report));
                return Ok(EXIT_NEGATIVE);
            }
            WitnessAttempt::Rejected(reason) => {
                println!("quotient-attempt: rejected ({reason})");
            }
        }
    }
    println!("outcome: no-witness-found");
    Ok(EXIT_INCONCLUSIVE)
}

fn cmd_verify(file: &Path, certificate: Option<PathBuf>) -> Result<i32, String> {
    let p = load(file)?;
    let gens = p.generator_set().map_err(estr)?;
    let path = cert_path(file, certificate);
    let text =
        fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cert = Certificate::parse(&text, p.dim())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    match verify_certificate(&p.target, &cert, &gens) {
        Ok(true) => {
            println!("outcome: verified");
            println!("terms: {}", cert.terms.len());
            Ok(EXIT_POSITIVE)
        }
        Ok(false) => {
            println!("outcome: verification-failed");
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => {
            println!("outcome: verification-failed");
            println!("reason: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_taylor(n: u32) -> Result<i32, String> {
    if n == 0 {
        return Err("taylor order must be at least 1".into());
    }
    let names = vec!["x".to_string()];
    let t = taylor_sqrt(n);
    let defect = sqrt_defect(n);
    println!("t_{n}: {}", t.to_string_with(&names));
    println!("p_{n}: {}", defect.to_string_with(&names));
    let nonnegative = defect.terms().all(|(_, c)| !c.is_negative());
    println!(
        "coefficients-nonnegative: {}",
        if nonnegative { "yes" } else { "no" }
    );
    Ok(if nonnegative {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    })
}

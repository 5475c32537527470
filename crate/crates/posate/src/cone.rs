//! Cone data model and linear-programming certificate search: product-basis
//! enumeration, denominator-free positivity certificates by exact
//! coefficient matching, linear (Minkowski) representations over polytopes,
//! and order-unit probes on an ideal.

use crate::lp::{self, FarkasCertificate, LinearSystem, OptOutcome, SolveOutcome, VarSign};
use crate::matrix::{in_span, Mat};
use crate::poly::{Monomial, Point, PolyError, Polynomial, Rat};
use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Default cap on the number of enumerated basis products.
pub const DEFAULT_BASIS_CAP: usize = 20_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConeError {
    #[error("product basis would exceed the cap of {cap} elements")]
    BasisCapExceeded { cap: usize },
    #[error("operation does not support cone kind {0}")]
    KindNotSupported(ConeKind),
    #[error("certificate indices are inconsistent with the generator set")]
    IndexMismatch,
    #[error("generator set must contain at least one generator")]
    EmptyGenerators,
    #[error("all polynomials must be affine-linear for this operation")]
    NotAffine,
    #[error("the described set is empty")]
    EmptySet,
    #[error("the described set is unbounded")]
    UnboundedSet,
    #[error("target polynomial does not lie in the ideal span at the working degree")]
    NotInIdeal,
    #[error("certificate parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Closure discipline of the generated cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    /// Closed under products: exponent vectors range over ℕ^s.
    Semiring,
    /// A semiring of products acting on extra module generators.
    SemiringModule,
    /// Only the bare generators (and 1) appear; square multipliers come
    /// from an explicit dictionary where supported.
    QuadraticModule,
    /// Squarefree products: exponent vectors range over {0,1}^s.
    Preordering,
}

impl fmt::Display for ConeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConeKind::Semiring => "semiring",
            ConeKind::SemiringModule => "semiring-module",
            ConeKind::QuadraticModule => "quadratic-module",
            ConeKind::Preordering => "preordering",
        };
        f.write_str(s)
    }
}

impl FromStr for ConeKind {
    type Err = ConeError;
    fn from_str(s: &str) -> Result<Self, ConeError> {
        match s {
            "semiring" => Ok(ConeKind::Semiring),
            "semiring-module" => Ok(ConeKind::SemiringModule),
            "quadratic-module" => Ok(ConeKind::QuadraticModule),
            "preordering" => Ok(ConeKind::Preordering),
            other => Err(ConeError::Parse(format!("unknown cone kind `{other}`"))),
        }
    }
}

/// Generators of a cone together with its closure discipline.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub kind: ConeKind,
    pub generators: Vec<Polynomial>,
    /// Only used for the semiring-module kind.
    pub module_generators: Vec<Polynomial>,
}

impl GeneratorSet {
    pub fn new(
        kind: ConeKind,
        generators: Vec<Polynomial>,
        module_generators: Vec<Polynomial>,
    ) -> Result<Self, ConeError> {
        if generators.is_empty() {
            return Err(ConeError::EmptyGenerators);
        }
        let dim = generators[0].dim();
        for g in generators.iter().chain(&module_generators) {
            if g.dim() != dim {
                return Err(ConeError::Poly(PolyError::DimensionMismatch(dim, g.dim())));
            }
        }
        if kind != ConeKind::SemiringModule && !module_generators.is_empty() {
            return Err(ConeError::IndexMismatch);
        }
        Ok(GeneratorSet {
            kind,
            generators,
            module_generators,
        })
    }

    pub fn simple(kind: ConeKind, generators: Vec<Polynomial>) -> Result<Self, ConeError> {
        GeneratorSet::new(kind, generators, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    /// Number of base generators (the arity of exponent vectors).
    pub fn arity(&self) -> usize {
        self.generators.len()
    }

    /// All generators evaluate nonnegatively at `z`.
    pub fn contains_point(&self, z: &Point) -> Result<bool, PolyError> {
        for g in self.generators.iter().chain(&self.module_generators) {
            if g.evaluate(z)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One product of the enumerated basis: g^α, optionally times a module
/// generator, optionally times a square from the dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisElem {
    pub alpha: Vec<u32>,
    pub module_index: Option<usize>,
    pub square: Option<Polynomial>,
    pub poly: Polynomial,
}

/// One term of a certificate: a strictly positive coefficient attached to
/// a basis product.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CertTerm {
    pub alpha: Vec<u32>,
    pub module_index: Option<usize>,
    /// Rendered form of the square factor, if any; kept as text so terms
    /// order and round-trip deterministically.
    pub square: Option<Polynomial>,
    pub coeff: Rat,
}

/// An exact conic-combination certificate: Σ c · g^α (· h · m²) = f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Ambient variable count, needed to render square factors.
    pub dim: usize,
    pub terms: Vec<CertTerm>,
}

impl Certificate {
    pub fn new(dim: usize, mut terms: Vec<CertTerm>) -> Self {
        terms.sort();
        Certificate { dim, terms }
    }

    /// One line per term: `alpha=(i1,…,is) [module=k] [square=(p)] coeff=p/q`,
    /// sorted by exponent vector.
    pub fn to_text(&self) -> String {
        let names = Polynomial::default_names(self.dim);
        let mut out = String::new();
        for t in &self.terms {
            out.push_str("alpha=(");
            let parts: Vec<String> = t.alpha.iter().map(|e| e.to_string()).collect();
            out.push_str(&parts.join(","));
            out.push(')');
            if let Some(k) = t.module_index {
                out.push_str(&format!(" module={k}"));
            }
            if let Some(sq) = &t.square {
                out.push_str(&format!(" square=({})", sq.to_string_with(&names)));
            }
            out.push_str(&format!(" coeff={}\n", t.coeff));
        }
        out
    }

    pub fn parse(text: &str, dim: usize) -> Result<Certificate, ConeError> {
        let names = Polynomial::default_names(dim);
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("alpha=(")
                .ok_or_else(|| ConeError::Parse(format!("expected `alpha=(` in `{line}`")))?;
            let close = rest
                .find(')')
                .ok_or_else(|| ConeError::Parse("unterminated exponent vector".into()))?;
            let alpha: Vec<u32> = rest[..close]
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| ConeError::Parse(format!("bad exponent `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let mut rest = rest[close + 1..].trim_start();
            let mut module_index = None;
            if let Some(r) = rest.strip_prefix("module=") {
                let end = r.find(' ').unwrap_or(r.len());
                module_index = Some(
                    r[..end]
                        .parse::<usize>()
                        .map_err(|_| ConeError::Parse(format!("bad module index in `{line}`")))?,
                );
                rest = r[end..].trim_start();
            }
            let mut square = None;
            if let Some(r) = rest.strip_prefix("square=(") {
                let end = r
                    .find(')')
                    .ok_or_else(|| ConeError::Parse("unterminated square factor".into()))?;
                square = Some(Polynomial::parse(&r[..end], &names)?);
                rest = r[end + 1..].trim_start();
            }
            let c = rest
                .strip_prefix("coeff=")
                .ok_or_else(|| ConeError::Parse(format!("expected `coeff=` in `{line}`")))?
                .trim();
            let coeff = parse_rat(c)?;
            terms.push(CertTerm {
                alpha,
                module_index,
                square,
                coeff,
            });
        }
        Ok(Certificate::new(dim, terms))
    }
}

fn parse_rat(s: &str) -> Result<Rat, ConeError> {
    let parse_int =
        |t: &str| BigInt::from_str(t).map_err(|_| ConeError::Parse(format!("bad rational `{s}`")));
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(ConeError::Parse("zero denominator".into()));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

fn power_product(gens: &GeneratorSet, alpha: &[u32]) -> Polynomial {
    let mut p = Polynomial::one(gens.dim());
    for (g, &e) in gens.generators.iter().zip(alpha) {
        if e > 0 {
            p = p.mul(&g.pow(e));
        }
    }
    p
}

/// Expand one certificate term against its generator set.
fn term_poly(gens: &GeneratorSet, t: &CertTerm) -> Result<Polynomial, ConeError> {
    if t.alpha.len() != gens.arity() {
        return Err(ConeError::IndexMismatch);
    }
    let mut p = power_product(gens, &t.alpha);
    if let Some(k) = t.module_index {
        let h = gens.module_generators.get(k).ok_or(ConeError::IndexMismatch)?;
        p = p.mul(h);
    }
    if let Some(sq) = &t.square {
        if sq.dim() != gens.dim() {
            return Err(ConeError::IndexMismatch);
        }
        p = p.mul(sq);
    }
    Ok(p)
}

fn poly_degree(p: &Polynomial) -> u32 {
    p.degree().unwrap_or(0)
}

/// All products of the generators with total degree ≤ d, per the cone
/// kind: full exponent vectors for semirings, squarefree ones for
/// preorderings, bare generators for quadratic modules.
pub fn product_basis(
    gens: &GeneratorSet,
    d: u32,
    cap: usize,
) -> Result<Vec<BasisElem>, ConeError> {
    let s = gens.arity();
    // weight 1 for constant generators so enumeration terminates
    let weights: Vec<u32> = gens
        .generators
        .iter()
        .map(|g| poly_degree(g).max(1))
        .collect();
    let mut out: Vec<BasisElem> = Vec::new();
    let push = |alpha: Vec<u32>, module_index: Option<usize>, poly: Polynomial,
                    out: &mut Vec<BasisElem>|
     -> Result<(), ConeError> {
        if out.len() >= cap {
            return Err(ConeError::BasisCapExceeded { cap });
        }
        out.push(BasisElem {
            alpha,
            module_index,
            square: None,
            poly,
        });
        Ok(())
    };
    match gens.kind {
        ConeKind::Semiring | ConeKind::SemiringModule => {
            let alphas = enumerate_alphas(&weights, d, cap)?;
            for alpha in &alphas {
                push(alpha.clone(), None, power_product(gens, alpha), &mut out)?;
            }
            for (j, h) in gens.module_generators.iter().enumerate() {
                let hd = poly_degree(h);
                if hd > d {
                    continue;
                }
                for alpha in enumerate_alphas(&weights, d - hd, cap)? {
                    let p = power_product(gens, &alpha).mul(h);
                    push(alpha, Some(j), p, &mut out)?;
                }
            }
        }
        ConeKind::Preordering => {
            for mask in 0u64..(1u64 << s) {
                let alpha: Vec<u32> = (0..s).map(|i| ((mask >> i) & 1) as u32).collect();
                let deg: u32 = alpha
                    .iter()
                    .zip(&weights)
                    .map(|(&a, &w)| a * w)
                    .sum();
                if deg <= d {
                    push(alpha.clone(), None, power_product(gens, &alpha), &mut out)?;
                }
            }
        }
        ConeKind::QuadraticModule => {
            push(vec![0; s], None, Polynomial::one(gens.dim()), &mut out)?;
            for (i, g) in gens.generators.iter().enumerate() {
                if poly_degree(g) <= d {
                    let mut alpha = vec![0; s];
                    alpha[i] = 1;
                    push(alpha, None, g.clone(), &mut out)?;
                }
            }
        }
    }
    Ok(out)
}

fn enumerate_alphas(weights: &[u32], budget: u32, cap: usize) -> Result<Vec<Vec<u32>>, ConeError> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; weights.len()];
    fn go(
        i: usize,
        remaining: u32,
        weights: &[u32],
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
    ) -> Result<(), ConeError> {
        if i == weights.len() {
            if out.len() >= cap {
                return Err(ConeError::BasisCapExceeded { cap });
            }
            out.push(cur.clone());
            return Ok(());
        }
        for e in 0..=remaining / weights[i] {
            cur[i] = e;
            go(i + 1, remaining - e * weights[i], weights, cur, out, cap)?;
            cur[i] = 0;
        }
        Ok(())
    }
    go(0, budget, weights, &mut cur, &mut out, cap)?;
    Ok(out)
}

/// The exact coefficient-matching system: one equality row per monomial,
/// one nonnegative variable per basis product.
pub fn matching_system(f: &Polynomial, basis: &[BasisElem]) -> LinearSystem {
    let mut monos: BTreeSet<Monomial> = f.terms().map(|(m, _)| m.clone()).collect();
    for b in basis {
        monos.extend(b.poly.terms().map(|(m, _)| m.clone()));
    }
    let monos: Vec<Monomial> = monos.into_iter().collect();
    let mut a = Mat::zero(monos.len(), basis.len());
    let mut rhs = Vec::with_capacity(monos.len());
    for (r, m) in monos.iter().enumerate() {
        for (c, b) in basis.iter().enumerate() {
            a.a[r][c] = b.poly.coeff(m);
        }
        rhs.push(f.coeff(m));
    }
    LinearSystem::new(a, rhs, vec![VarSign::NonNeg; basis.len()])
}

fn certificate_from(dim: usize, basis: &[BasisElem], solution: &[Rat]) -> Certificate {
    let terms = basis
        .iter()
        .zip(solution)
        .filter(|(_, c)| c.is_positive())
        .map(|(b, c)| CertTerm {
            alpha: b.alpha.clone(),
            module_index: b.module_index,
            square: b.square.clone(),
            coeff: c.clone(),
        })
        .collect();
    Certificate::new(dim, terms)
}

/// Infeasibility record for one degree of the escalation.
#[derive(Debug, Clone)]
pub struct DegreeAttempt {
    pub degree: u32,
    pub farkas: FarkasCertificate,
}

#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    Certified { degree: u32, certificate: Certificate },
    /// Absence at the truncation only — not a proof of non-membership.
    NotFound { d_max: u32, attempts: Vec<DegreeAttempt> },
}

/// Search for a conic-combination certificate of `f` over the product
/// basis, escalating the degree one step at a time up to `d_max`.
pub fn handelman_certify(
    f: &Polynomial,
    gens: &GeneratorSet,
    d_max: u32,
    cap: usize,
) -> Result<CertifyOutcome, ConeError> {
    if gens.kind == ConeKind::QuadraticModule {
        return Err(ConeError::KindNotSupported(gens.kind));
    }
    if f.dim() != gens.dim() {
        return Err(ConeError::Poly(PolyError::DimensionMismatch(
            gens.dim(),
            f.dim(),
        )));
    }
    let d0 = poly_degree(f).max(
        gens.generators
            .iter()
            .map(poly_degree)
            .max()
            .unwrap_or(0),
    );
    let mut attempts = Vec::new();
    let mut d = d0;
    while d <= d_max {
        let basis = product_basis(gens, d, cap)?;
        match lp::solve(&matching_system(f, &basis)) {
            SolveOutcome::Feasible(sol) => {
                return Ok(CertifyOutcome::Certified {
                    degree: d,
                    certificate: certificate_from(gens.dim(), &basis, &sol),
                });
            }
            SolveOutcome::Infeasible(farkas) => {
                attempts.push(DegreeAttempt { degree: d, farkas });
            }
        }
        d += 1;
    }
    Ok(CertifyOutcome::NotFound { d_max, attempts })
}

/// True iff Σ c·g^α(·h·m²) − f is the zero polynomial and every
/// coefficient is strictly positive, computed exactly.
pub fn verify_certificate(
    f: &Polynomial,
    cert: &Certificate,
    gens: &GeneratorSet,
) -> Result<bool, ConeError> {
    let mut sum = Polynomial::zero(gens.dim());
    for t in &cert.terms {
        if !t.coeff.is_positive() {
            return Ok(false);
        }
        sum = sum.add(&term_poly(gens, t)?.scale(&t.coeff));
    }
    Ok(sum == *f)
}

// ---------------------------------------------------------------------
// Linear (Minkowski) representations over polytopes

/// f = constant + Σ coeffs[i]·gᵢ with all parts nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCombo {
    pub constant: Rat,
    pub coeffs: Vec<Rat>,
}

impl LinearCombo {
    pub fn expand(&self, gens: &[Polynomial]) -> Polynomial {
        let dim = gens[0].dim();
        let mut p = Polynomial::constant(dim, self.constant.clone());
        for (c, g) in self.coeffs.iter().zip(gens) {
            p = p.add(&g.scale(c));
        }
        p
    }
}

#[derive(Debug, Clone)]
pub enum MinkowskiOutcome {
    Combo(LinearCombo),
    /// A point of the set where f is strictly negative.
    Negative { point: Point, value: Rat },
}

fn linear_part(g: &Polynomial) -> Result<(Vec<Rat>, Rat), ConeError> {
    if poly_degree(g) > 1 {
        return Err(ConeError::NotAffine);
    }
    let n = g.dim();
    let coeffs = (0..n).map(|i| g.coeff(&Monomial::var(n, i))).collect();
    Ok((coeffs, g.constant_term()))
}

/// Equality form of {x : gᵢ(x) ≥ 0}: free x plus one slack per generator.
fn polytope_system(gens: &[Polynomial]) -> Result<LinearSystem, ConeError> {
    let n = gens[0].dim();
    let mut a = Mat::zero(gens.len(), n + gens.len());
    let mut b = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let (coeffs, c0) = linear_part(g)?;
        a.a[i][..n].clone_from_slice(&coeffs);
        a.a[i][n + i] = -Rat::one();
        b.push(-c0);
    }
    let mut signs = vec![VarSign::Free; n];
    signs.extend(vec![VarSign::NonNeg; gens.len()]);
    Ok(LinearSystem::new(a, b, signs))
}

fn optimize_coordinate(sys: &LinearSystem, i: usize, maximize: bool) -> Result<Rat, ConeError> {
    let mut c = vec![Rat::zero(); sys.num_vars()];
    c[i] = Rat::one();
    let out = if maximize {
        lp::maximize(&c, sys)
    } else {
        lp::minimize(&c, sys)
    };
    match out {
        OptOutcome::Optimal { value, .. } => Ok(value),
        OptOutcome::Unbounded { .. } => Err(ConeError::UnboundedSet),
        OptOutcome::Infeasible(_) => Err(ConeError::EmptySet),
    }
}

/// Per-variable bounds of {x : gᵢ(x) ≥ 0}; errors if empty or unbounded.
fn coordinate_bounds(gens: &[Polynomial]) -> Result<Vec<(Rat, Rat)>, ConeError> {
    let n = gens[0].dim();
    let sys = polytope_system(gens)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = optimize_coordinate(&sys, i, false)?;
        let hi = optimize_coordinate(&sys, i, true)?;
        out.push((lo, hi));
    }
    Ok(out)
}

/// Try to write an affine-linear f as a nonnegative combination
/// constant + Σ cᵢgᵢ over the compact polytope {g ≥ 0}; on failure return
/// a point of the polytope where f is negative.
pub fn minkowski_linear_rep(
    f: &Polynomial,
    gens: &[Polynomial],
) -> Result<MinkowskiOutcome, ConeError> {
    if gens.is_empty() {
        return Err(ConeError::EmptyGenerators);
    }
    if poly_degree(f) > 1 {
        return Err(ConeError::NotAffine);
    }
    coordinate_bounds(gens)?; // compactness and nonemptiness check
    let n = gens[0].dim();
    // coefficient matching over {1, g₁, …, g_s}
    let mut a = Mat::zero(n + 1, gens.len() + 1);
    let mut b = Vec::with_capacity(n + 1);
    let (fc, f0) = linear_part(f)?;
    a.a[0][0] = Rat::one();
    for (j, g) in gens.iter().enumerate() {
        let (gc, g0) = linear_part(g)?;
        a.a[0][j + 1] = g0;
        for (i, c) in gc.iter().enumerate() {
            a.a[i + 1][j + 1] = c.clone();
        }
    }
    b.push(f0);
    b.extend(fc);
    let sys = LinearSystem::new(a, b, vec![VarSign::NonNeg; gens.len() + 1]);
    match lp::solve(&sys) {
        SolveOutcome::Feasible(sol) => Ok(MinkowskiOutcome::Combo(LinearCombo {
            constant: sol[0].clone(),
            coeffs: sol[1..].to_vec(),
        })),
        SolveOutcome::Infeasible(_) => {
            // not representable, so f dips negative on the polytope
            let psys = polytope_system(gens)?;
            let mut c = vec![Rat::zero(); psys.num_vars()];
            let (fc, _) = linear_part(f)?;
            c[..n].clone_from_slice(&fc);
            match lp::minimize(&c, &psys) {
                OptOutcome::Optimal { point, .. } => {
                    let z = Point::new(point[..n].to_vec());
                    let value = f.evaluate(&z)?;
                    debug_assert!(value.is_negative());
                    Ok(MinkowskiOutcome::Negative { point: z, value })
                }
                _ => Err(ConeError::UnboundedSet),
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum PolytopeArchimedean {
    /// For each variable xᵢ, verified combos for N − xᵢ and N + xᵢ.
    Certified {
        bound: Rat,
        combos: Vec<(Polynomial, LinearCombo)>,
    },
    NotCompact(ConeError),
}

/// Certify that the linear system {g ≥ 0} describes a nonempty compact
/// polytope by producing explicit bound combos N ± xᵢ.
pub fn archimedean_polytope_check(
    gens: &[Polynomial],
) -> Result<PolytopeArchimedean, ConeError> {
    if gens.is_empty() {
        return Err(ConeError::EmptyGenerators);
    }
    let bounds = match coordinate_bounds(gens) {
        Ok(b) => b,
        Err(e @ (ConeError::EmptySet | ConeError::UnboundedSet)) => {
            return Ok(PolytopeArchimedean::NotCompact(e));
        }
        Err(e) => return Err(e),
    };
    let n = gens[0].dim();
    let mut big = Rat::zero();
    for (lo, hi) in &bounds {
        big = big.max(lo.abs()).max(hi.abs());
    }
    let bound = Rat::from_integer(big.ceil().to_integer()).max(Rat::one());
    let mut combos = Vec::with_capacity(2 * n);
    for i in 0..n {
        for sign in [1i64, -1] {
            let target = Polynomial::constant(n, bound.clone()).add(
                &Polynomial::var(n, i).scale(&Rat::from_integer(BigInt::from(sign))),
            );
            match minkowski_linear_rep(&target, gens)? {
                MinkowskiOutcome::Combo(c) => combos.push((target, c)),
                MinkowskiOutcome::Negative { .. } => unreachable!("bound certified above"),
            }
        }
    }
    Ok(PolytopeArchimedean::Certified { bound, combos })
}

// ---------------------------------------------------------------------
// Order-unit probe

/// Squares usable as multipliers in preordering / quadratic-module
/// truncations: squares of monomials up to `half_deg`, plus (m ± m')²
/// for distinct monomial pairs.
pub fn square_dictionary(dim: usize, half_deg: u32) -> Vec<Polynomial> {
    let mut monos: Vec<Polynomial> = Vec::new();
    let mut cur = vec![0u32; dim];
    fn go(i: usize, rem: u32, dim: usize, cur: &mut Vec<u32>, out: &mut Vec<Polynomial>) {
        if i == dim {
            out.push(Polynomial::from_terms(
                dim,
                vec![(Monomial::new(cur.clone()), Rat::one())],
            ));
            return;
        }
        for e in 0..=rem {
            cur[i] = e;
            go(i + 1, rem - e, dim, cur, out);
            cur[i] = 0;
        }
    }
    go(0, half_deg, dim, &mut cur, &mut monos);
    let mut out: Vec<Polynomial> = monos.iter().map(|m| m.mul(m)).collect();
    for i in 0..monos.len() {
        for j in i + 1..monos.len() {
            let s = monos[i].add(&monos[j]);
            let d = monos[i].sub(&monos[j]);
            out.push(s.mul(&s));
            out.push(d.mul(&d));
        }
    }
    out
}

/// Coefficient vector of `p` over the ordered monomial list.
fn coeff_vector(p: &Polynomial, monos: &[Monomial]) -> Vec<Rat> {
    monos.iter().map(|m| p.coeff(m)).collect()
}

/// Degree-d linear span of the ideal (b₁,…,b_k): coefficient vectors of
/// all m·bⱼ with deg ≤ d.
struct IdealSpan {
    monos: Vec<Monomial>,
    rows: Vec<Vec<Rat>>,
}

impl IdealSpan {
    fn build(ideal: &[Polynomial], dim: usize, d: u32) -> IdealSpan {
        let mut monos = Vec::new();
        let mut cur = vec![0u32; dim];
        fn go(i: usize, rem: u32, dim: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == dim {
                out.push(Monomial::new(cur.clone()));
                return;
            }
            for e in 0..=rem {
                cur[i] = e;
                go(i + 1, rem - e, dim, cur, out);
                cur[i] = 0;
            }
        }
        go(0, d, dim, &mut cur, &mut monos);
        let mut rows = Vec::new();
        for b in ideal {
            let bd = poly_degree(b);
            if bd > d {
                continue;
            }
            for m in &monos {
                if m.total_degree() + bd > d {
                    continue;
                }
                let mp = Polynomial::from_terms(dim, vec![(m.clone(), Rat::one())]);
                rows.push(coeff_vector(&b.mul(&mp), &monos));
            }
        }
        IdealSpan { monos, rows }
    }

    fn contains(&self, p: &Polynomial) -> bool {
        if p.terms().any(|(m, _)| !self.monos.contains(m)) {
            return false;
        }
        in_span(&self.rows, &coeff_vector(p, &self.monos))
    }
}

/// Basis for probe certificates: cone products, augmented by the square
/// dictionary for preordering and quadratic-module kinds, filtered to lie
/// in the degree-d span of the ideal.
pub fn probe_basis(
    cone: &GeneratorSet,
    ideal: &[Polynomial],
    d: u32,
    cap: usize,
) -> Result<Vec<BasisElem>, ConeError> {
    let dim = cone.dim();
    let mut candidates = Vec::new();
    match cone.kind {
        ConeKind::Semiring | ConeKind::SemiringModule => {
            candidates = product_basis(cone, d, cap)?;
        }
        ConeKind::Preordering | ConeKind::QuadraticModule => {
            let products = product_basis(cone, d, cap)?;
            let squares = square_dictionary(dim, d / 2);
            for b in &products {
                let bd = poly_degree(&b.poly);
                for sq in &squares {
                    if bd + poly_degree(sq) > d {
                        continue;
                    }
                    if candidates.len() >= cap {
                        return Err(ConeError::BasisCapExceeded { cap });
                    }
                    candidates.push(BasisElem {
                        alpha: b.alpha.clone(),
                        module_index: b.module_index,
                        square: Some(sq.clone()),
                        poly: b.poly.mul(sq),
                    });
                }
            }
        }
    }
    if ideal.is_empty() {
        return Ok(candidates);
    }
    let span = IdealSpan::build(ideal, dim, d);
    Ok(candidates
        .into_iter()
        .filter(|b| span.contains(&b.poly))
        .collect())
}

/// Outcome of probing one target element.
#[derive(Debug, Clone)]
pub enum TargetProbe {
    /// Smallest n with verified certificates for both n·u + a and n·u − a.
    Found {
        n: u64,
        plus: Certificate,
        minus: Certificate,
    },
    NotFound {
        n_max: u64,
        failures: Vec<ProbeFailure>,
    },
}

/// Per-n infeasibility evidence: a Farkas vector for one failing sign.
#[derive(Debug, Clone)]
pub struct ProbeFailure {
    pub n: u64,
    /// True if the failing element is n·u + a, false for n·u − a.
    pub plus_sign: bool,
    pub farkas: FarkasCertificate,
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub degree: u32,
    pub targets: Vec<TargetProbe>,
}

/// For each target a, search the smallest n ≤ n_max with degree-d
/// certificates for n·u ± a inside the cone truncation intersected with
/// the ideal span. Not-found is evidence of absence at the truncation
/// only, never of non-membership in the full cone.
pub fn order_unit_probe(
    ideal: &[Polynomial],
    cone: &GeneratorSet,
    u: &Polynomial,
    targets: &[Polynomial],
    d: u32,
    n_max: u64,
    cap: usize,
) -> Result<ProbeResult, ConeError> {
    let dim = cone.dim();
    if !ideal.is_empty() {
        let span = IdealSpan::build(ideal, dim, d.max(poly_degree(u))); // membership sanity
        if !span.contains(u) {
            return Err(ConeError::NotInIdeal);
        }
        for a in targets {
            if !span.contains(a) {
                return Err(ConeError::NotInIdeal);
            }
        }
    }
    let basis = probe_basis(cone, ideal, d, cap)?;
    let mut results = Vec::with_capacity(targets.len());
    for a in targets {
        // the matrix is shared across n; cache one Farkas vector per sign
        // and recheck it cheaply before re-solving
        let mut cached: [Option<FarkasCertificate>; 2] = [None, None];
        let mut failures = Vec::new();
        let mut found = None;
        'nloop: for n in 1..=n_max {
            let nu = u.scale(&Rat::from_integer(BigInt::from(n)));
            let mut certs: Vec<Certificate> = Vec::with_capacity(2);
            for (si, sign_plus) in [(0usize, true), (1usize, false)] {
                let f = if sign_plus { nu.add(a) } else { nu.sub(a) };
                let sys = matching_system(&f, &basis);
                if let Some(y) = &cached[si] {
                    if y.verify(&sys) {
                        failures.push(ProbeFailure {
                            n,
                            plus_sign: sign_plus,
                            farkas: y.clone(),
                        });
                        continue 'nloop;
                    }
                }
                match lp::solve(&sys) {
                    SolveOutcome::Feasible(sol) => {
                        certs.push(certificate_from(dim, &basis, &sol));
                    }
                    SolveOutcome::Infeasible(farkas) => {
                        failures.push(ProbeFailure {
                            n,
                            plus_sign: sign_plus,
                            farkas: farkas.clone(),
                        });
                        cached[si] = Some(farkas);
                        continue 'nloop;
                    }
                }
            }
            let minus = certs.pop().expect("both signs certified");
            let plus = certs.pop().expect("both signs certified");
            found = Some(TargetProbe::Found { n, plus, minus });
            break;
        }
        results.push(found.unwrap_or(TargetProbe::NotFound { n_max, failures }));
    }
    Ok(ProbeResult {
        degree: d,
        targets: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn names2() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn p2(s: &str) -> Polynomial {
        Polynomial::parse(s, &names2()).unwrap()
    }

    fn simplex_gens() -> Vec<Polynomial> {
        vec![p2("x"), p2("y"), p2("1 - x - y")]
    }

    #[test]
    fn product_basis_semiring_degree2() {
        let gens =
            GeneratorSet::simple(ConeKind::Semiring, vec![p2("x"), p2("1 - x")]).unwrap();
        let basis = product_basis(&gens, 2, 100).unwrap();
        let polys: Vec<&Polynomial> = basis.iter().map(|b| &b.poly).collect();
        assert_eq!(basis.len(), 6);
        for expect in ["1", "x", "1 - x", "x^2", "x - x^2", "1 - 2 x + x^2"] {
            assert!(polys.contains(&&p2(expect)), "missing {expect}");
        }
    }

    #[test]
    fn product_basis_preordering_squarefree() {
        let gens =
            GeneratorSet::simple(ConeKind::Preordering, vec![p2("x"), p2("y")]).unwrap();
        let basis = product_basis(&gens, 10, 100).unwrap();
        assert_eq!(basis.len(), 4); // 1, g1, g2, g1 g2
        assert!(basis.iter().all(|b| b.alpha.iter().all(|&e| e <= 1)));
    }

    #[test]
    fn product_basis_simplex_degree1() {
        let gens = GeneratorSet::simple(ConeKind::Semiring, simplex_gens()).unwrap();
        let basis = product_basis(&gens, 1, 100).unwrap();
        assert_eq!(basis.len(), 4); // 1, x, y, 1−x−y
    }

    #[test]
    fn basis_cap_enforced() {
        let gens = GeneratorSet::simple(ConeKind::Semiring, simplex_gens()).unwrap();
        assert_eq!
            (product_basis(&gens, 10, 5).unwrap_err(),
            ConeError::BasisCapExceeded { cap: 5 });
    }

    #[test]
    fn certify_generator_itself() {
        let gens = GeneratorSet::simple(ConeKind::Semiring, simplex_gens()).unwrap();
        match handelman_certify(&p2("x"), &gens, 4, 1000).unwrap() {
            CertifyOutcome::Certified { certificate, .. } => {
                assert_eq!(certificate.terms.len(), 1);
                assert_eq!(certificate.terms[0].alpha, vec![1, 0, 0]);
                assert!(verify_certificate(&p2("x"), &certificate, &gens).unwrap());
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn certify_degree_two_example() {
        let gens =
            GeneratorSet::simple(ConeKind::Semiring, vec![p2("x"), p2("1 - x")]).unwrap();
        let f = p2("1 - x + x^2");
        match handelman_certify(&f, &gens, 2, 1000).unwrap() {
            CertifyOutcome::Certified { degree, certificate } => {
                assert_eq!(degree, 2);
                assert!(verify_certificate(&f, &certificate, &gens).unwrap());
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn certify_negative_polynomial_not_found() {
        let gens = GeneratorSet::simple(ConeKind::Semiring, simplex_gens()).unwrap();
        let f = p2("x - 2 x y"); // negative at (1/10, 9/10)
        match handelman_certify(&f, &gens, 5, 5000).unwrap() {
            CertifyOutcome::NotFound { attempts, .. } => {
                assert!(!attempts.is_empty());
                for at in &attempts {
                    let basis = product_basis(&gens, at.degree, 5000).unwrap();
                    assert!(at.farkas.verify(&matching_system(&f, &basis)));
                }
            }
            other => panic!("expected not-found, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_perturbed_coefficient() {
        let gens =
            GeneratorSet::simple(ConeKind::Semiring, vec![p2("x"), p2("1 - x")]).unwrap();
        let f = p2("1 - x + x^2");
        let cert = Certificate::new(
            2,
            vec![
                CertTerm { alpha: vec![0, 2], module_index: None, square: None, coeff: int(1) },
                CertTerm { alpha: vec![1, 1], module_index: None, square: None, coeff: int(1) },
                CertTerm { alpha: vec![2, 0], module_index: None, square: None, coeff: int(1) },
            ],
        );
        assert!(verify_certificate(&f, &cert, &gens).unwrap());
        let mut bad = cert.clone();
        bad.terms[0].coeff = int(1) + rat(1, 1000);
        assert!(!verify_certificate(&f, &bad, &gens).unwrap());
    }

    #[test]
    fn verify_empty_certificate_of_zero() {
        let gens = GeneratorSet::simple(ConeKind::Semiring, simplex_gens()).unwrap();
        let cert = Certificate::new(2, vec![]);
        assert!(verify_certificate(&Polynomial::zero(2), &cert, &gens).unwrap());
    }

    #[test]
    fn serialization_round_trip() {
        let cert = Certificate::new(
            2,
            vec![
                CertTerm {
                    alpha: vec![1, 0],
                    module_index: None,
                    square: Some(p2("x^2 + 2 x y + y^2")),
                    coeff: rat(3, 7),
                },
                CertTerm { alpha: vec![0, 2], module_index: Some(1), square: None, coeff: int(5) },
            ],
        );
        let text = cert.to_text();
        let back = Certificate::parse(&text, 2).unwrap();
        assert_eq!(cert, back);
        assert_eq!(text, back.to_text());
    }

    #[test]
    fn minkowski_simplex_examples() {
        let gens = simplex_gens();
        match minkowski_linear_rep(&p2("1 - x"), &gens).unwrap() {
            MinkowskiOutcome::Combo(c) => {
                assert_eq!(c.expand(&gens), p2("1 - x"));
                assert!(!c.constant.is_negative());
                assert!(c.coeffs.iter().all(|v| !v.is_negative()));
            }
            other => panic!("expected combo, got {other:?}"),
        }
        match minkowski_linear_rep(&p2("x - 2"), &gens).unwrap() {
            MinkowskiOutcome::Negative { point, value } => {
                assert!(value.is_negative());
                let check = p2("x - 2").evaluate(&point).unwrap();
                assert_eq!(check, value);
            }
            other => panic!("expected negative point, got {other:?}"),
        }
    }

    #[test]
    fn minkowski_rejects_unbounded_and_empty() {
        let half_line = vec![Polynomial::parse("x", &["x".into()]).unwrap()];
        assert_eq!(
            minkowski_linear_rep(&Polynomial::parse("1", &["x".into()]).unwrap(), &half_line)
                .unwrap_err(),
            ConeError::UnboundedSet
        );
        let empty = vec![
            Polynomial::parse("x", &["x".into()]).unwrap(),
            Polynomial::parse("-1 - x", &["x".into()]).unwrap(),
        ];
        assert_eq!(
            minkowski_linear_rep(&Polynomial::parse("1", &["x".into()]).unwrap(), &empty)
                .unwrap_err(),
            ConeError::EmptySet
        );
    }

    #[test]
    fn archimedean_simplex() {
        match archimedean_polytope_check(&simplex_gens()).unwrap() {
            PolytopeArchimedean::Certified { bound, combos } => {
                assert_eq!(bound, int(1));
                assert_eq!(combos.len(), 4);
                for (target, combo) in &combos {
                    assert_eq!(&combo.expand(&simplex_gens()), target);
                }
            }
            other => panic!("expected certified, got {other:?}"),
        }
    }

    #[test]
    fn archimedean_rejects_noncompact() {
        let half = vec![Polynomial::parse("x", &["x".into()]).unwrap()];
        assert!(matches!(
            archimedean_polytope_check(&half).unwrap(),
            PolytopeArchimedean::NotCompact(ConeError::UnboundedSet)
        ));
        let empty = vec![
            Polynomial::parse("x", &["x".into()]).unwrap(),
            Polynomial::parse("-1 - x", &["x".into()]).unwrap(),
        ];
        assert!(matches!(
            archimedean_polytope_check(&empty).unwrap(),
            PolytopeArchimedean::NotCompact(ConeError::EmptySet)
        ));
    }

    #[test]
    fn probe_finds_square_identity() {
        // targets inside (x, y) against squares allowed by the ball generator
        let cone =
            GeneratorSet::simple(ConeKind::Preordering, vec![p2("9 - x^2 - y^2")]).unwrap();
        let ideal = vec![p2("x"), p2("y")];
        let u = p2("x^2 + y^2");
        let res =
            order_unit_probe(&ideal, &cone, &u, &[p2("2 x y"), u.clone()], 2, 5, 5000).unwrap();
        for t in &res.targets {
            match t {
                TargetProbe::Found { n, plus, minus } => {
                    assert_eq!(*n, 1);
                    assert!(!plus.terms.iter().any(|t| !t.coeff.is_positive()));
                    assert!(!minus.terms.iter().any(|t| !t.coeff.is_positive()));
                }
                other => panic!("expected found, got {other:?}"),
            }
        }
    }

    #[test]
    fn probe_reports_not_found_with_farkas() {
        // no multiple of x dominates ±x y in the square-multiplier
        // truncation restricted to the ideal (x)
        let cone = GeneratorSet::simple(ConeKind::QuadraticModule, simplex_gens()).unwrap();
        let ideal = vec![p2("x")];
        let res =
            order_unit_probe(&ideal, &cone, &p2("x"), &[p2("x y")], 3, 4, 5000).unwrap();
        match &res.targets[0] {
            TargetProbe::NotFound { failures, .. } => {
                assert_eq!(failures.len(), 4);
                let basis = probe_basis(&cone, &ideal, 3, 5000).unwrap();
                for fail in failures {
                    let nu = p2("x").scale(&int(fail.n as i64));
                    let f = if fail.plus_sign {
                        nu.add(&p2("x y"))
                    } else {
                        nu.sub(&p2("x y"))
                    };
                    assert!(fail.farkas.verify(&matching_system(&f, &basis)));
                }
            }
            other => panic!("expected not-found, got {other:?}"),
        }
    }
}

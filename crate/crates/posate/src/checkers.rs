//! Exact hypothesis checkers for boundary- and interior-positivity
//! criteria on basic closed semialgebraic sets: fixed-degree ideal
//! membership, tangent spaces and nonsingularity at points, directional
//! cone conditions, weighted decompositions, polytope faces, and
//! second-order (Hessian) conditions.

use crate::cone::{verify_certificate, Certificate, ConeError, GeneratorSet};
use crate::matrix::{dot, in_span, psd_check, Mat, PsdResult};
use crate::poly::{Monomial, Point, PolyError, Polynomial, Rat};
use crate::rays::{extreme_rays, RayError};
use num::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CheckError {
    #[error("point {0} does not lie on the variety")]
    PointNotOnVariety(Point),
    #[error("point {0} violates a cone generator")]
    PointNotInSet(Point),
    #[error("the target does not vanish at point {0}")]
    PointNotOnZeroSet(Point),
    #[error("generator {index} does not vanish at sample {point}")]
    GeneratorNotVanishing { index: usize, point: Point },
    #[error("decomposition identity fails: sum differs from the target")]
    IdentityFailed,
    #[error("active set does not cut a nonempty face")]
    NotAFace,
    #[error("the polytope is not compact: {0}")]
    NotCompact(ConeError),
    #[error("sample set must not be empty")]
    NoSamples,
    #[error("linear system exceeds the size cap")]
    SystemTooLarge,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Ray(#[from] RayError),
}

/// Generators of an ideal, with the role they play in a check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealBasis {
    pub generators: Vec<Polynomial>,
    pub role: IdealRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealRole {
    /// The ideal the target must belong to.
    Constraint,
    /// The vanishing ideal of the variety carrying the tangent spaces.
    Variety,
}

impl IdealBasis {
    pub fn new(generators: Vec<Polynomial>, role: IdealRole) -> Result<Self, CheckError> {
        if generators.is_empty() {
            return Err(CheckError::Cone(ConeError::EmptyGenerators));
        }
        let dim = generators[0].dim();
        for g in &generators {
            if g.dim() != dim {
                return Err(CheckError::Poly(PolyError::DimensionMismatch(dim, g.dim())));
            }
        }
        Ok(IdealBasis { generators, role })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleTag {
    User,
    Grid,
}

/// Finite stand-in for the zero set of the target inside the
/// semialgebraic set; every point is checked exactly at construction.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub points: Vec<(Point, SampleTag)>,
}

impl SampleSet {
    pub fn new(
        points: Vec<(Point, SampleTag)>,
        f: &Polynomial,
        m: &GeneratorSet,
    ) -> Result<Self, CheckError> {
        if points.is_empty() {
            return Err(CheckError::NoSamples);
        }
        for (z, _) in &points {
            if !m.contains_point(z)? {
                return Err(CheckError::PointNotInSet(z.clone()));
            }
            if !f.evaluate(z)?.is_zero() {
                return Err(CheckError::PointNotOnZeroSet(z.clone()));
            }
        }
        Ok(SampleSet { points })
    }

    pub fn user(points: Vec<Point>, f: &Polynomial, m: &GeneratorSet) -> Result<Self, CheckError> {
        SampleSet::new(
            points.into_iter().map(|p| (p, SampleTag::User)).collect(),
            f,
            m,
        )
    }
}

/// An exactly re-verifiable violation: a point, an optional direction,
/// and the offending value.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub point: Point,
    pub direction: Option<Vec<Rat>>,
    pub value: Rat,
    pub condition: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    VerifiedOnSamples,
    Violated(Counterexample),
    Inconclusive(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubReport {
    pub condition: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub sub_reports: Vec<SubReport>,
}

/// Prefer strict violations (negative offending value) over degenerate
/// ones, then the lexicographically smallest point and direction; strict
/// violations admit refutation witnesses, so they come first.
fn pick_counterexample(mut found: Vec<Counterexample>) -> Option<Counterexample> {
    found.sort_by(|a, b| {
        b.value
            .is_negative()
            .cmp(&a.value.is_negative())
            .then_with(|| a.point.cmp(&b.point))
            .then_with(|| a.direction.cmp(&b.direction))
    });
    found.into_iter().next()
}

fn aggregate(sub_reports: Vec<SubReport>) -> CheckReport {
    let violations: Vec<Counterexample> = sub_reports
        .iter()
        .filter_map(|s| match &s.verdict {
            Verdict::Violated(c) => Some(c.clone()),
            _ => None,
        })
        .collect();
    let verdict = if let Some(c) = pick_counterexample(violations) {
        Verdict::Violated(c)
    } else if let Some(s) = sub_reports
        .iter()
        .find(|s| matches!(s.verdict, Verdict::Inconclusive(_)))
    {
        s.verdict.clone()
    } else {
        Verdict::VerifiedOnSamples
    };
    CheckReport {
        verdict,
        sub_reports,
    }
}

// ---------------------------------------------------------------------
// Ideal membership at fixed cofactor degree

#[derive(Debug, Clone, PartialEq)]
pub enum MembershipOutcome {
    /// f = Σ aᵢ·gᵢ with deg aᵢ ≤ d, found by exact linear solve.
    Cofactors(Vec<Polynomial>),
    /// Inconclusive: no cofactors at this degree bound.
    NotFoundAtDegree(u32),
}

fn monomials_up_to(dim: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
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
    go(0, d, dim, &mut cur, &mut out);
    out
}

/// Search for cofactors aᵢ of degree ≤ d with f = Σ aᵢgᵢ, by coefficient
/// matching over all monomials. Not finding any is inconclusive.
pub fn ideal_membership(
    f: &Polynomial,
    ideal: &IdealBasis,
    d: u32,
) -> Result<MembershipOutcome, CheckError> {
    let dim = ideal.dim();
    if f.dim() != dim {
        return Err(CheckError::Poly(PolyError::DimensionMismatch(dim, f.dim())));
    }
    let cof_monos = monomials_up_to(dim, d);
    let ncols = cof_monos.len() * ideal.generators.len();
    if ncols > 50_000 {
        return Err(CheckError::SystemTooLarge);
    }
    let max_deg = ideal
        .generators
        .iter()
        .map(|g| g.degree().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let row_monos = monomials_up_to(dim, d + max_deg);
    // any f-monomial outside the reachable support rules membership out
    if f
        .terms()
        .any(|(m, _)| !row_monos.contains(m))
    {
        return Ok(MembershipOutcome::NotFoundAtDegree(d));
    }
    let mut a = Mat::zero(row_monos.len(), ncols);
    for (gi, g) in ideal.generators.iter().enumerate() {
        for (mi, m) in cof_monos.iter().enumerate() {
            let col = gi * cof_monos.len() + mi;
            for (gm, gc) in g.terms() {
                let prod = m.mul(gm);
                if let Some(row) = row_monos.iter().position(|r| *r == prod) {
                    a.a[row][col] = a.a[row][col].clone() + gc;
                }
            }
        }
    }
    let b: Vec<Rat> = row_monos.iter().map(|m| f.coeff(m)).collect();
    match a.solve(&b) {
        None => Ok(MembershipOutcome::NotFoundAtDegree(d)),
        Some(x) => {
            let mut cofs = Vec::with_capacity(ideal.generators.len());
            for gi in 0..ideal.generators.len() {
                let terms: Vec<(Monomial, Rat)> = cof_monos
                    .iter()
                    .enumerate()
                    .map(|(mi, m)| (m.clone(), x[gi * cof_monos.len() + mi].clone()))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                cofs.push(Polynomial::from_terms(dim, terms));
            }
            debug_assert_eq!(
                cofs.iter()
                    .zip(&ideal.generators)
                    .fold(Polynomial::zero(dim), |acc, (a, g)| acc.add(&a.mul(g))),
                *f
            );
            Ok(MembershipOutcome::Cofactors(cofs))
        }
    }
}

// ---------------------------------------------------------------------
// Tangent spaces

#[derive(Debug, Clone, PartialEq)]
pub struct TangentSpace {
    /// Kernel basis of the Jacobian at the point.
    pub basis: Vec<Vec<Rat>>,
    /// Rank of the Jacobian, to compare against the declared codimension.
    pub rank: usize,
}

impl TangentSpace {
    pub fn contains(&self, v: &[Rat]) -> bool {
        in_span(&self.basis, v)
    }
}

/// Kernel of the Jacobian of the variety generators at `z`, which must
/// lie on the variety.
pub fn tangent_space(j: &IdealBasis, z: &Point) -> Result<TangentSpace, CheckError> {
    for g in &j.generators {
        if !g.evaluate(z)?.is_zero() {
            return Err(CheckError::PointNotOnVariety(z.clone()));
        }
    }
    let rows: Vec<Vec<Rat>> = j
        .generators
        .iter()
        .map(|g| g.gradient(z))
        .collect::<Result<_, _>>()?;
    let jac = Mat::from_rows(rows);
    Ok(TangentSpace {
        rank: jac.rank(),
        basis: jac.kernel_basis(),
    })
}

// ---------------------------------------------------------------------
// Directional cone condition

#[derive(Debug, Clone, PartialEq)]
pub enum ConeConditionOutcome {
    Ok,
    /// An inward direction v with D_vf(z) ≤ 0 that leaves the tangent
    /// space (strict violations carry a negative derivative).
    Violation { direction: Vec<Rat>, derivative: Rat },
}

/// Check that every direction v with D_vgᵢ(z) ≥ 0 and v ∉ T_z(V) has
/// D_vf(z) > 0, by decomposing the polyhedral direction cone into
/// extreme rays and lineality: the derivative must be nonnegative on all
/// generators, and generators where it vanishes must stay tangent.
pub fn cone_condition(
    f: &Polynomial,
    gens: &[Polynomial],
    j: &IdealBasis,
    z: &Point,
) -> Result<ConeConditionOutcome, CheckError> {
    if !f.evaluate(z)?.is_zero() {
        return Err(CheckError::PointNotOnZeroSet(z.clone()));
    }
    for g in gens {
        if g.evaluate(z)?.is_negative() {
            return Err(CheckError::PointNotInSet(z.clone()));
        }
    }
    let rows: Vec<Vec<Rat>> = gens
        .iter()
        .map(|g| g.gradient(z))
        .collect::<Result<_, _>>()?;
    let decomp = extreme_rays(&Mat::from_rows(rows))?;
    let grad = f.gradient(z)?;
    let tangent = tangent_space(j, z)?;
    let mut violations: Vec<Counterexample> = Vec::new();
    let mut check_dir = |v: &[Rat]| {
        let d = dot(&grad, v);
        if d.is_negative() || (d.is_zero() && !tangent.contains(v)) {
            violations.push(Counterexample {
                point: z.clone(),
                direction: Some(v.to_vec()),
                value: d,
                condition: "directional-cone".into(),
            });
        }
    };
    for r in &decomp.rays {
        check_dir(r);
    }
    for w in &decomp.lineality {
        check_dir(w);
        let neg: Vec<Rat> = w.iter().map(|x| -x.clone()).collect();
        check_dir(&neg);
    }
    Ok(match pick_counterexample(violations) {
        None => ConeConditionOutcome::Ok,
        Some(c) => ConeConditionOutcome::Violation {
            direction: c.direction.clone().unwrap(),
            derivative: c.value,
        },
    })
}

// ---------------------------------------------------------------------
// Weighted decompositions f = Σ bᵢsᵢ

#[derive(Debug, Clone)]
pub struct DecompositionTerm {
    pub weight: Polynomial,
    pub member: Polynomial,
    /// Evidence that `member` lies in the cone; verified when present.
    pub member_certificate: Option<Certificate>,
}

/// Optional strengthening: certify each weight minus epsilon over the
/// whole set, turning the per-sample check into a global one.
#[derive(Debug, Clone)]
pub struct Strengthen {
    pub epsilon: Rat,
    pub d_max: u32,
    pub cap: usize,
}

/// Verify an identity f = Σ bᵢsᵢ exactly and the strict positivity of
/// every weight bᵢ at every sample point.
pub fn check_sumbiti(
    f: &Polynomial,
    terms: &[DecompositionTerm],
    m: &GeneratorSet,
    samples: &SampleSet,
    strengthen: Option<&Strengthen>,
) -> Result<CheckReport, CheckError> {
    let dim = f.dim();
    let sum = terms.iter().fold(Polynomial::zero(dim), |acc, t| {
        acc.add(&t.weight.mul(&t.member))
    });
    if sum != *f {
        return Err(CheckError::IdentityFailed);
    }
    let mut subs = vec![SubReport {
        condition: "decomposition-identity".into(),
        verdict: Verdict::VerifiedOnSamples,
    }];
    for (i, t) in terms.iter().enumerate() {
        let verdict = match &t.member_certificate {
            Some(cert) if verify_certificate(&t.member, cert, m)? => Verdict::VerifiedOnSamples,
            Some(_) => Verdict::Inconclusive(format!(
                "certificate for member {i} does not verify"
            )),
            None => Verdict::Inconclusive(format!("member {i} has no cone certificate")),
        };
        subs.push(SubReport {
            condition: format!("member-{i}-in-cone"),
            verdict,
        });
    }
    for (i, t) in terms.iter().enumerate() {
        let mut violations = Vec::new();
        for (z, _) in &samples.points {
            let val = t.weight.evaluate(z)?;
            if !val.is_positive() {
                violations.push(Counterexample {
                    point: z.clone(),
                    direction: None,
                    value: val,
                    condition: format!("weight-{i}-positive"),
                });
            }
        }
        subs.push(SubReport {
            condition: format!("weight-{i}-positive-on-samples"),
            verdict: match pick_counterexample(violations) {
                None => Verdict::VerifiedOnSamples,
                Some(c) => Verdict::Violated(c),
            },
        });
    }
    if let Some(s) = strengthen {
        for (i, t) in terms.iter().enumerate() {
            let shifted = t
                .weight
                .sub(&Polynomial::constant(dim, s.epsilon.clone()));
            let verdict = match crate::cone::handelman_certify(&shifted, m, s.d_max, s.cap)? {
                crate::cone::CertifyOutcome::Certified { .. } => Verdict::VerifiedOnSamples,
                crate::cone::CertifyOutcome::NotFound { d_max, .. } => Verdict::Inconclusive(
                    format!("no lower-bound certificate for weight {i} at degree {d_max}"),
                ),
            };
            subs.push(SubReport {
                condition: format!("weight-{i}-lower-bound"),
                verdict,
            });
        }
    }
    Ok(aggregate(subs))
}

// ---------------------------------------------------------------------
// Full boundary-positivity hypothesis check

/// Aggregate check: (1) the target lies in the constraint ideal at the
/// degree bound, (2) the directional cone condition holds at every
/// sample, (3) every sample is a nonsingular point of the variety
/// (Jacobian rank equals the declared codimension).
pub fn check_boundary_theorem(
    f: &Polynomial,
    m: &GeneratorSet,
    i_gens: &[Polynomial],
    j: &IdealBasis,
    samples: &SampleSet,
    d: u32,
    codim: usize,
) -> Result<CheckReport, CheckError> {
    for (z, _) in &samples.points {
        for (idx, g) in i_gens.iter().enumerate() {
            if !g.evaluate(z)?.is_zero() {
                return Err(CheckError::GeneratorNotVanishing {
                    index: idx,
                    point: z.clone(),
                });
            }
        }
        if !m.contains_point(z)? {
            return Err(CheckError::PointNotInSet(z.clone()));
        }
    }
    let mut subs = Vec::new();
    let ideal = IdealBasis::new(i_gens.to_vec(), IdealRole::Constraint)?;
    subs.push(SubReport {
        condition: "target-in-ideal".into(),
        verdict: match ideal_membership(f, &ideal, d)? {
            MembershipOutcome::Cofactors(_) => Verdict::VerifiedOnSamples,
            MembershipOutcome::NotFoundAtDegree(d) => {
                Verdict::Inconclusive(format!("no ideal cofactors at degree {d}"))
            }
        },
    });
    let mut cone_violations = Vec::new();
    let mut singular = Vec::new();
    for (z, _) in &samples.points {
        match cone_condition(f, i_gens, j, z)? {
            ConeConditionOutcome::Ok => {}
            ConeConditionOutcome::Violation {
                direction,
                derivative,
            } => cone_violations.push(Counterexample {
                point: z.clone(),
                direction: Some(direction),
                value: derivative,
                condition: "directional-cone".into(),
            }),
        }
        let t = tangent_space(j, z)?;
        if t.rank != codim {
            singular.push(Counterexample {
                point: z.clone(),
                direction: None,
                value: Rat::zero(),
                condition: "nonsingularity".into(),
            });
        }
    }
    subs.push(SubReport {
        condition: "directional-cone-at-samples".into(),
        verdict: match pick_counterexample(cone_violations) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    subs.push(SubReport {
        condition: "nonsingularity-at-samples".into(),
        verdict: match pick_counterexample(singular) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    Ok(aggregate(subs))
}

// ---------------------------------------------------------------------
// Polytope faces

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn affine_parts(gens: &[Polynomial]) -> Result<Vec<(Vec<Rat>, Rat)>, CheckError> {
    let n = gens[0].dim();
    gens.iter()
        .map(|g| {
            if g.degree().unwrap_or(0) > 1 {
                return Err(CheckError::Cone(ConeError::NotAffine));
            }
            let coeffs = (0..n).map(|i| g.coeff(&Monomial::var(n, i))).collect();
            Ok((coeffs, g.constant_term()))
        })
        .collect()
}

/// Brute-force vertex enumeration of {x : gᵢ(x) ≥ 0}: intersect every
/// full-rank n-subset of constraint hyperplanes and keep feasible points.
pub fn polytope_vertices(gens: &[Polynomial]) -> Result<Vec<Point>, CheckError> {
    let n = gens[0].dim();
    let parts = affine_parts(gens)?;
    let mut out: Vec<Point> = Vec::new();
    for combo in combinations(gens.len(), n) {
        let a = Mat::from_rows(combo.iter().map(|&i| parts[i].0.clone()).collect());
        if a.rank() != n {
            continue;
        }
        let b: Vec<Rat> = combo.iter().map(|&i| -parts[i].1.clone()).collect();
        let x = match a.solve(&b) {
            Some(x) => x,
            None => continue,
        };
        let z = Point::new(x);
        let feasible = gens
            .iter()
            .map(|g| g.evaluate(&z))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .all(|v| !v.is_negative());
        if feasible && !out.contains(&z) {
            out.push(z);
        }
    }
    out.sort();
    Ok(out)
}

/// Rational grid spanned by a vertex list: the vertices plus convex
/// combinations of every vertex pair with weights k/(density−1).
pub fn segment_grid(vertices: &[Point], density: u32) -> Vec<Point> {
    let mut out: Vec<Point> = vertices.to_vec();
    let steps = density.max(2) - 1;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            for k in 1..steps {
                let t = Rat::new(k.into(), steps.into());
                let coords: Vec<Rat> = vertices[i]
                    .coords
                    .iter()
                    .zip(&vertices[j].coords)
                    .map(|(a, b)| a + &t * (b - a))
                    .collect();
                let z = Point::new(coords);
                if !out.contains(&z) {
                    out.push(z);
                }
            }
        }
    }
    out.sort();
    out
}

/// Face-positivity check on a compact polytope: the target must vanish
/// on the face cut out by the active generators, and its derivative must
/// be strictly positive in every direction leaving the face, tested at
/// the face's vertices and a rational grid.
pub fn check_polytope_face(
    f: &Polynomial,
    gens: &[Polynomial],
    active: &[usize],
    extra_samples: &[Point],
    d: u32,
    density: u32,
) -> Result<CheckReport, CheckError> {
    match crate::cone::archimedean_polytope_check(gens)? {
        crate::cone::PolytopeArchimedean::NotCompact(e) => {
            return Err(CheckError::NotCompact(e))
        }
        crate::cone::PolytopeArchimedean::Certified { .. } => {}
    }
    let face_gens: Vec<Polynomial> = active.iter().map(|&i| gens[i].clone()).collect();
    if face_gens.is_empty() {
        return Err(CheckError::NotAFace);
    }
    let vertices = polytope_vertices(gens)?;
    let face_vertices: Vec<Point> = vertices
        .into_iter()
        .filter(|z| {
            face_gens
                .iter()
                .all(|g| g.evaluate(z).map(|v| v.is_zero()).unwrap_or(false))
        })
        .collect();
    if face_vertices.is_empty() {
        return Err(CheckError::NotAFace);
    }
    // (a) exact face vanishing: membership in the ideal of the cutting
    // linear forms is equivalent to vanishing on their common zero set
    let ideal = IdealBasis::new(face_gens.clone(), IdealRole::Constraint)?;
    let vanish_deg = d.max(f.degree().unwrap_or(0));
    let vanishes = matches!(
        ideal_membership(f, &ideal, vanish_deg)?,
        MembershipOutcome::Cofactors(_)
    );
    if !vanishes {
        // locate an exact witness point on the face if one exists
        for z in segment_grid(&face_vertices, density) {
            let val = f.evaluate(&z)?;
            if !val.is_zero() {
                return Ok(CheckReport {
                    verdict: Verdict::Violated(Counterexample {
                        point: z.clone(),
                        direction: None,
                        value: val,
                        condition: "face-vanishing".into(),
                    }),
                    sub_reports: vec![SubReport {
                        condition: "face-vanishing".into(),
                        verdict: Verdict::Violated(Counterexample {
                            point: z,
                            direction: None,
                            value: Rat::zero(),
                            condition: "face-vanishing".into(),
                        }),
                    }],
                });
            }
        }
        return Ok(CheckReport {
            verdict: Verdict::Inconclusive("face vanishing not established".into()),
            sub_reports: vec![],
        });
    }
    let mut grid = segment_grid(&face_vertices, density);
    for z in extra_samples {
        if !grid.contains(z) {
            grid.push(z.clone());
        }
    }
    grid.sort();
    let m = GeneratorSet::simple(crate::cone::ConeKind::Semiring, gens.to_vec())?;
    let samples = SampleSet::new(
        grid.into_iter()
            .map(|z| {
                let tag = if extra_samples.contains(&z) {
                    SampleTag::User
                } else {
                    SampleTag::Grid
                };
                (z, tag)
            })
            .collect(),
        f,
        &m,
    )?;
    // per sample, the direction cone must use every constraint active
    // there, not only the face's own generators
    let mut subs = vec![SubReport {
        condition: "face-vanishing".into(),
        verdict: Verdict::VerifiedOnSamples,
    }];
    subs.push(SubReport {
        condition: "target-in-face-ideal".into(),
        verdict: Verdict::VerifiedOnSamples,
    });
    let codim = Mat::from_rows(
        affine_parts(&face_gens)?
            .into_iter()
            .map(|(c, _)| c)
            .collect(),
    )
    .rank();
    let j = IdealBasis::new(face_gens.clone(), IdealRole::Variety)?;
    let mut violations = Vec::new();
    let mut singular = Vec::new();
    for (z, _) in &samples.points {
        let active_here: Vec<Polynomial> = gens
            .iter()
            .filter(|g| g.evaluate(z).map(|v| v.is_zero()).unwrap_or(false))
            .cloned()
            .collect();
        match cone_condition(f, &active_here, &j, z)? {
            ConeConditionOutcome::Ok => {}
            ConeConditionOutcome::Violation {
                direction,
                derivative,
            } => violations.push(Counterexample {
                point: z.clone(),
                direction: Some(direction),
                value: derivative,
                condition: "directional-cone".into(),
            }),
        }
        let t = tangent_space(&j, z)?;
        if t.rank != codim {
            singular.push(Counterexample {
                point: z.clone(),
                direction: None,
                value: Rat::zero(),
                condition: "nonsingularity".into(),
            });
        }
    }
    subs.push(SubReport {
        condition: "directional-cone-at-samples".into(),
        verdict: match pick_counterexample(violations) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    subs.push(SubReport {
        condition: "nonsingularity-at-samples".into(),
        verdict: match pick_counterexample(singular) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    Ok(aggregate(subs))
}

// ---------------------------------------------------------------------
// Interior second-order check

/// Second-order hypothesis check at interior zeros: vanishing gradient,
/// exactly positive-semidefinite Hessian whose kernel stays inside the
/// tangent space, and membership of the target in the square of the
/// variety ideal.
pub fn check_interior_theorem(
    f: &Polynomial,
    m: &GeneratorSet,
    j: &IdealBasis,
    samples: &SampleSet,
    d: u32,
    codim: usize,
    local_complete_intersection_asserted: bool,
) -> Result<CheckReport, CheckError> {
    for (z, _) in &samples.points {
        if !m.contains_point(z)? {
            return Err(CheckError::PointNotInSet(z.clone()));
        }
    }
    let mut subs = vec![SubReport {
        condition: "local-complete-intersection".into(),
        verdict: if local_complete_intersection_asserted {
            Verdict::VerifiedOnSamples
        } else {
            Verdict::Inconclusive("hypothesis not asserted by the user".into())
        },
    }];
    // global: f must lie in the square of the variety ideal
    let mut products = Vec::new();
    for (i, a) in j.generators.iter().enumerate() {
        for b in &j.generators[i..] {
            products.push(a.mul(b));
        }
    }
    let squared = IdealBasis::new(products, IdealRole::Constraint)?;
    subs.push(SubReport {
        condition: "target-in-ideal-square".into(),
        verdict: match ideal_membership(f, &squared, d)? {
            MembershipOutcome::Cofactors(_) => Verdict::VerifiedOnSamples,
            MembershipOutcome::NotFoundAtDegree(d) => {
                Verdict::Inconclusive(format!("no ideal-square cofactors at degree {d}"))
            }
        },
    });
    let mut gradient_violations = Vec::new();
    let mut hessian_violations = Vec::new();
    let mut singular = Vec::new();
    for (z, _) in &samples.points {
        let t = tangent_space(j, z)?;
        if t.rank != codim {
            singular.push(Counterexample {
                point: z.clone(),
                direction: None,
                value: Rat::zero(),
                condition: "nonsingularity".into(),
            });
        }
        let grad = f.gradient(z)?;
        if grad.iter().any(|g| !g.is_zero()) {
            gradient_violations.push(Counterexample {
                point: z.clone(),
                direction: Some(grad.clone()),
                value: Rat::zero(),
                condition: "gradient-vanishes".into(),
            });
            continue;
        }
        let h = Mat::from_rows(f.hessian(z)?);
        match psd_check(&h) {
            PsdResult::NotPsd { witness } => {
                let val = dot(&h.mul_vec(&witness), &witness);
                hessian_violations.push(Counterexample {
                    point: z.clone(),
                    direction: Some(witness),
                    value: val,
                    condition: "hessian-psd".into(),
                });
            }
            PsdResult::Psd { kernel } => {
                for v in kernel {
                    if !t.contains(&v) {
                        hessian_violations.push(Counterexample {
                            point: z.clone(),
                            direction: Some(v),
                            value: Rat::zero(),
                            condition: "hessian-kernel-tangent".into(),
                        });
                    }
                }
            }
        }
    }
    subs.push(SubReport {
        condition: "gradient-vanishes-at-samples".into(),
        verdict: match pick_counterexample(gradient_violations) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    subs.push(SubReport {
        condition: "hessian-positive-at-samples".into(),
        verdict: match pick_counterexample(hessian_violations) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    subs.push(SubReport {
        condition: "nonsingularity-at-samples".into(),
        verdict: match pick_counterexample(singular) {
            None => Verdict::VerifiedOnSamples,
            Some(c) => Verdict::Violated(c),
        },
    });
    Ok(aggregate(subs))
}

//! Refutation witnesses: rational evidence that a polynomial cannot
//! belong to a cone. Evaluation witnesses exhibit a point of the set
//! where the target is negative; derivative witnesses exhibit a boundary
//! or interior zero together with a direction along which the target
//! dips negative inside the set; quotient witnesses evaluate a
//! derivative functional that is nonnegative on the cone's trace in a
//! principal ideal.

use crate::checkers::{ideal_membership, IdealBasis, IdealRole, MembershipOutcome};
use crate::cone::{ConeError, GeneratorSet};
use crate::matrix::{dot, psd_check, Mat, PsdResult};
use crate::poly::{Point, PolyError, Polynomial, Rat};
use crate::rays::extreme_rays;
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum WitnessError {
    #[error("distinguished generator must be affine-linear and nonconstant")]
    GeneratorNotLinear,
    #[error("base point {0} does not lie on the distinguished hyperplane")]
    PointNotOnHyperplane(Point),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("{0}")]
    Check(String),
}

/// A pure refutation witness with its offending value.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A point of the set where the target is strictly negative.
    TypeI { point: Point, value: Rat },
    /// A boundary zero with a certified inward direction of strictly
    /// negative directional derivative.
    FirstOrder {
        point: Point,
        direction: Vec<Rat>,
        derivative: Rat,
    },
    /// An interior zero with vanishing gradient and a direction of
    /// strictly negative Hessian form.
    SecondOrder {
        point: Point,
        direction: Vec<Rat>,
        form_value: Rat,
    },
    /// The derivative functional p ↦ D_v p(z₀) attached to a linear
    /// distinguished generator; nonnegative on the cone's trace in the
    /// generator's ideal under the asserted convexity hypotheses.
    Quotient {
        generator_index: usize,
        point: Point,
        value: Rat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessClass {
    /// Scaled point evaluations.
    TypeI,
    /// Derivative-like functionals annihilating evaluation.
    TypeII,
}

/// Evaluation witnesses are type I; derivative and quotient witnesses
/// are type II.
pub fn classify(w: &Witness) -> WitnessClass {
    match w {
        Witness::TypeI { .. } => WitnessClass::TypeI,
        _ => WitnessClass::TypeII,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Justification {
    Unconditional,
    /// Valid under the user-asserted convexity/radicality hypotheses of
    /// the quotient construction.
    ConditionalOnQuotientHypotheses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefutationReport {
    pub witness: Witness,
    /// Verified step ε with the target negative and the set containing
    /// z + εv; absent for evaluation and quotient witnesses.
    pub negativity_radius: Option<Rat>,
    /// The rational point witnessing negativity inside the set.
    pub negative_point: Option<Point>,
    pub justification: Justification,
}

/// Outcome of a witness construction: either a verified report or the
/// reason the candidate was rejected (rejection is never a proof of
/// membership).
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessAttempt {
    Accepted(RefutationReport),
    Rejected(String),
}

fn offset_point(z: &Point, v: &[Rat], eps: &Rat) -> Point {
    Point::new(
        z.coords
            .iter()
            .zip(v)
            .map(|(a, b)| a + eps * b)
            .collect(),
    )
}

/// Halving search from ε = 1 for a verified negative point z + εv of the
/// set; at most 64 steps.
fn negativity_radius(
    f: &Polynomial,
    m: &GeneratorSet,
    z: &Point,
    v: &[Rat],
) -> Result<Option<(Rat, Point)>, WitnessError> {
    let mut eps = Rat::one();
    for _ in 0..64 {
        let p = offset_point(z, v, &eps);
        if f.evaluate(&p)?.is_negative() && m.contains_point(&p)? {
            return Ok(Some((eps, p)));
        }
        eps /= Rat::from_integer(2.into());
    }
    Ok(None)
}

/// Accept z as an evaluation witness iff it lies in the set and the
/// target is strictly negative there; this refutes membership
/// unconditionally.
pub fn type1_witness(
    f: &Polynomial,
    m: &GeneratorSet,
    z: &Point,
) -> Result<WitnessAttempt, WitnessError> {
    if !m.contains_point(z)? {
        return Ok(WitnessAttempt::Rejected(format!(
            "point {z} lies outside the set"
        )));
    }
    let value = f.evaluate(z)?;
    if !value.is_negative() {
        return Ok(WitnessAttempt::Rejected(format!(
            "target is {value} >= 0 at {z}"
        )));
    }
    Ok(WitnessAttempt::Accepted(RefutationReport {
        witness: Witness::TypeI {
            point: z.clone(),
            value,
        },
        negativity_radius: None,
        negative_point: Some(z.clone()),
        justification: Justification::Unconditional,
    }))
}

/// Accept (z, v) as a first-order witness iff z is a zero of the target
/// inside the set, v is a certified inward direction (strict derivative
/// on active nonlinear generators, nonnegative on active linear ones),
/// and D_vf(z) < 0. A verified negativity radius is required.
pub fn first_order_witness(
    f: &Polynomial,
    m: &GeneratorSet,
    z: &Point,
    v: &[Rat],
) -> Result<WitnessAttempt, WitnessError> {
    if !m.contains_point(z)? {
        return Ok(WitnessAttempt::Rejected(format!(
            "point {z} lies outside the set"
        )));
    }
    if !f.evaluate(z)?.is_zero() {
        return Ok(WitnessAttempt::Rejected(format!(
            "target does not vanish at {z}"
        )));
    }
    for g in m.generators.iter().chain(&m.module_generators) {
        if !g.evaluate(z)?.is_zero() {
            continue; // inactive constraints impose no local condition
        }
        let dg = g.directional_derivative(z, v)?;
        let linear = g.degree().unwrap_or(0) <= 1;
        if dg.is_negative() || (!linear && dg.is_zero()) {
            return Ok(WitnessAttempt::Rejected(
                "direction is not certifiably inward".into(),
            ));
        }
    }
    let derivative = f.directional_derivative(z, v)?;
    if !derivative.is_negative() {
        return Ok(WitnessAttempt::Rejected(format!(
            "directional derivative is {derivative} >= 0"
        )));
    }
    match negativity_radius(f, m, z, v)? {
        Some((eps, p)) => Ok(WitnessAttempt::Accepted(RefutationReport {
            witness: Witness::FirstOrder {
                point: z.clone(),
                direction: v.to_vec(),
                derivative,
            },
            negativity_radius: Some(eps),
            negative_point: Some(p),
            justification: Justification::Unconditional,
        })),
        None => Ok(WitnessAttempt::Rejected(
            "no verified negativity radius within 64 halvings".into(),
        )),
    }
}

/// Accept (z, v) as a second-order witness iff z is an interior zero with
/// vanishing gradient and the Hessian form is strictly negative at v.
pub fn second_order_witness(
    f: &Polynomial,
    m: &GeneratorSet,
    z: &Point,
    v: &[Rat],
) -> Result<WitnessAttempt, WitnessError> {
    for g in m.generators.iter().chain(&m.module_generators) {
        if !g.evaluate(z)?.is_positive() {
            return Ok(WitnessAttempt::Rejected(format!(
                "point {z} is not interior to the set"
            )));
        }
    }
    if !f.evaluate(z)?.is_zero() {
        return Ok(WitnessAttempt::Rejected(format!(
            "target does not vanish at {z}"
        )));
    }
    if f.gradient(z)?.iter().any(|g| !g.is_zero()) {
        return Ok(WitnessAttempt::Rejected(format!(
            "gradient does not vanish at {z}"
        )));
    }
    let form_value = f.hessian_form(z, v)?;
    if !form_value.is_negative() {
        return Ok(WitnessAttempt::Rejected(format!(
            "Hessian form is {form_value} >= 0"
        )));
    }
    match negativity_radius(f, m, z, v)? {
        Some((eps, p)) => Ok(WitnessAttempt::Accepted(RefutationReport {
            witness: Witness::SecondOrder {
                point: z.clone(),
                direction: v.to_vec(),
                form_value,
            },
            negativity_radius: Some(eps),
            negative_point: Some(p),
            justification: Justification::Unconditional,
        })),
        None => Ok(WitnessAttempt::Rejected(
            "no verified negativity radius within 64 halvings".into(),
        )),
    }
}

/// Derivative-functional witness against membership in a quadratic
/// module whose distinguished generator is affine-linear: with z₀ on
/// {g = 0} and a direction v normalized by D_v g = 1, the functional
/// p ↦ D_v p(z₀) is nonnegative on the module's trace in (g) under the
/// asserted hypotheses; a negative value refutes membership of targets
/// inside (g), conditionally.
pub fn quotient_witness(
    f: &Polynomial,
    m: &GeneratorSet,
    generator_index: usize,
    z0: &Point,
    d: u32,
    hypotheses_asserted: bool,
) -> Result<WitnessAttempt, WitnessError> {
    if !hypotheses_asserted {
        return Ok(WitnessAttempt::Rejected(
            "quotient hypotheses not asserted".into(),
        ));
    }
    let g = m
        .generators
        .get(generator_index)
        .ok_or(WitnessError::Cone(ConeError::IndexMismatch))?;
    if g.degree().unwrap_or(0) != 1 {
        return Err(WitnessError::GeneratorNotLinear);
    }
    if !g.evaluate(z0)?.is_zero() {
        return Err(WitnessError::PointNotOnHyperplane(z0.clone()));
    }
    // the functional requires membership of the target in (g)
    let ideal = IdealBasis::new(vec![g.clone()], IdealRole::Constraint)
        .map_err(|e| WitnessError::Check(e.to_string()))?;
    match ideal_membership(f, &ideal, d).map_err(|e| WitnessError::Check(e.to_string()))? {
        MembershipOutcome::Cofactors(_) => {}
        MembershipOutcome::NotFoundAtDegree(d) => {
            return Ok(WitnessAttempt::Rejected(format!(
                "target not certified in the generator ideal at degree {d}"
            )));
        }
    }
    // any direction with D_v g = 1 computes the same functional on (g)
    let n = f.dim();
    let grad_g = g.gradient(z0)?;
    let k = grad_g
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonconstant linear generator");
    let mut v = vec![Rat::zero(); n];
    v[k] = Rat::one() / &grad_g[k];
    let value = f.directional_derivative(z0, &v)?;
    if !value.is_negative() {
        return Ok(WitnessAttempt::Rejected(format!(
            "quotient functional value is {value} >= 0"
        )));
    }
    Ok(WitnessAttempt::Accepted(RefutationReport {
        witness: Witness::Quotient {
            generator_index,
            point: z0.clone(),
            value,
        },
        negativity_radius: None,
        negative_point: None,
        justification: Justification::ConditionalOnQuotientHypotheses,
    }))
}

fn witness_sort_key(r: &RefutationReport) -> (Point, Vec<Rat>) {
    match &r.witness {
        Witness::TypeI { point, .. } => (point.clone(), Vec::new()),
        Witness::FirstOrder {
            point, direction, ..
        }
        | Witness::SecondOrder {
            point, direction, ..
        } => (point.clone(), direction.clone()),
        Witness::Quotient { point, .. } => (point.clone(), Vec::new()),
    }
}

/// Automated search over candidate points: evaluation witnesses where
/// the target is negative, first-order witnesses along the extreme rays
/// of the inward cone at boundary zeros, and second-order witnesses from
/// the Hessian decomposition at interior zeros with vanishing gradient.
/// Reports the lexicographically smallest accepted witness.
pub fn witness_search(
    f: &Polynomial,
    m: &GeneratorSet,
    candidates: &[Point],
) -> Result<Option<RefutationReport>, WitnessError> {
    let mut accepted: Vec<RefutationReport> = Vec::new();
    for z in candidates {
        if !m.contains_point(z)? {
            continue;
        }
        let fz = f.evaluate(z)?;
        if fz.is_negative() {
            if let WitnessAttempt::Accepted(r) = type1_witness(f, m, z)? {
                accepted.push(r);
            }
            continue;
        }
        if !fz.is_zero() {
            continue;
        }
        // boundary: directions from the cone of active constraints
        let active: Vec<&Polynomial> = m
            .generators
            .iter()
            .chain(&m.module_generators)
            .filter(|g| g.evaluate(z).map(|v| v.is_zero()).unwrap_or(false))
            .collect();
        if !active.is_empty() {
            let rows: Vec<Vec<Rat>> = active
                .iter()
                .map(|g| g.gradient(z))
                .collect::<Result<_, _>>()?;
            let decomp = extreme_rays(&Mat::from_rows(rows))
                .map_err(|e| WitnessError::Check(e.to_string()))?;
            let mut dirs = decomp.rays.clone();
            for w in &decomp.lineality {
                dirs.push(w.clone());
                dirs.push(w.iter().map(|x| -x.clone()).collect());
            }
            for v in dirs {
                if f.directional_derivative(z, &v)?.is_negative() {
                    if let WitnessAttempt::Accepted(r) = first_order_witness(f, m, z, &v)? {
                        accepted.push(r);
                    }
                }
            }
        } else if f.gradient(z)?.iter().all(|g| g.is_zero()) {
            // interior zero with flat gradient: look at the Hessian
            let h = Mat::from_rows(f.hessian(z)?);
            if let PsdResult::NotPsd { witness } = psd_check(&h) {
                debug_assert!(dot(&h.mul_vec(&witness), &witness).is_negative());
                if let WitnessAttempt::Accepted(r) = second_order_witness(f, m, z, &witness)? {
                    accepted.push(r);
                }
            }
        }
    }
    accepted.sort_by_key(witness_sort_key);
    Ok(accepted.into_iter().next())
}

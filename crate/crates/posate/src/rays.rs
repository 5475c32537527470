//! Double description: convert an inequality description {v : Gv ≥ 0}
//! of a polyhedral cone into extreme rays plus a lineality basis.

use crate::matrix::{dot, Mat};
use crate::poly::Rat;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Designed for small ambient dimension.
pub const MAX_DIM: usize = 10;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RayError {
    #[error("ambient dimension {0} exceeds the design limit {1}")]
    DimensionOverflow(usize, usize),
}

/// Generator description of a polyhedral cone: conic hull of `rays` plus
/// the linear span of `lineality`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayDecomposition {
    pub rays: Vec<Vec<Rat>>,
    pub lineality: Vec<Vec<Rat>>,
}

impl RayDecomposition {
    /// Exact re-verification: every ray satisfies Gr ≥ 0, every lineality
    /// vector satisfies Gw = 0.
    pub fn verify(&self, g: &Mat) -> bool {
        self.rays
            .iter()
            .all(|r| g.mul_vec(r).iter().all(|v| !v.is_negative()))
            && self
                .lineality
                .iter()
                .all(|w| g.mul_vec(w).iter().all(|v| v.is_zero()))
    }
}

/// Scale so the first nonzero coordinate has absolute value 1; rays may
/// only be scaled positively, so the leading sign is preserved.
fn normalize_ray(v: &mut [Rat]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        let s = lead.abs();
        for x in v.iter_mut() {
            *x = x.clone() / &s;
        }
    }
}

/// Lineality vectors may be negated: leading coordinate becomes +1.
fn normalize_line(v: &mut [Rat]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        for x in v.iter_mut() {
            *x = x.clone() / &lead;
        }
    }
}

/// Double-description construction of {v : Gv ≥ 0}.
pub fn extreme_rays(g: &Mat) -> Result<RayDecomposition, RayError> {
    let n = g.cols;
    if n > MAX_DIM {
        return Err(RayError::DimensionOverflow(n, MAX_DIM));
    }
    let mut lineality: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            v
        })
        .collect();
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    let mut processed: Vec<Vec<Rat>> = Vec::new();

    for row in &g.a {
        let lin_vals: Vec<Rat> = lineality.iter().map(|w| dot(row, w)).collect();
        if let Some(k) = lin_vals.iter().position(|v| !v.is_zero()) {
            // the hyperplane cuts the lineality space
            let mut w0 = lineality.remove(k);
            let mut d0 = lin_vals[k].clone();
            if d0.is_negative() {
                for x in w0.iter_mut() {
                    *x = -x.clone();
                }
                d0 = -d0;
            }
            for w in lineality.iter_mut() {
                let f = dot(row, w) / &d0;
                if !f.is_zero() {
                    for (x, y) in w.iter_mut().zip(&w0) {
                        *x -= &f * y;
                    }
                }
            }
            for r in rays.iter_mut() {
                let f = dot(row, r) / &d0;
                if !f.is_zero() {
                    for (x, y) in r.iter_mut().zip(&w0) {
                        *x -= &f * y;
                    }
                }
            }
            rays.push(w0);
        } else {
            // lineality lies in the hyperplane; split the rays
            let vals: Vec<Rat> = rays.iter().map(|r| dot(row, r)).collect();
            if vals.iter().any(|v| v.is_negative()) {
                let mut new_rays: Vec<Vec<Rat>> = Vec::new();
                for (r, v) in rays.iter().zip(&vals) {
                    if !v.is_negative() {
                        new_rays.push(r.clone());
                    }
                }
                let lin_dim = lineality.len();
                for (pi, pv) in vals.iter().enumerate() {
                    if !pv.is_positive() {
                        continue;
                    }
                    for (ni, nv) in vals.iter().enumerate() {
                        if !nv.is_negative() {
                            continue;
                        }
                        if !adjacent(&processed, &rays[pi], &rays[ni], n, lin_dim) {
                            continue;
                        }
                        // positive combination lying on the hyperplane
                        let comb: Vec<Rat> = rays[pi]
                            .iter()
                            .zip(&rays[ni])
                            .map(|(p, q)| pv * q - nv * p)
                            .collect();
                        new_rays.push(comb);
                    }
                }
                rays = new_rays;
            }
        }
        processed.push(row.clone());
    }

    for r in rays.iter_mut() {
        normalize_ray(r);
    }
    for w in lineality.iter_mut() {
        normalize_line(w);
    }
    rays.sort();
    rays.dedup();
    lineality.sort();
    Ok(RayDecomposition { rays, lineality })
}

// Algebraic adjacency test: the minimal face containing both rays must
// have dimension lineality+2, i.e. the constraints tight at both have
// rank n − lin_dim − 2.
fn adjacent(
    processed: &[Vec<Rat>],
    p: &[Rat],
    q: &[Rat],
    n: usize,
    lin_dim: usize,
) -> bool {
    let tight: Vec<Vec<Rat>> = processed
        .iter()
        .filter(|h| dot(h, p).is_zero() && dot(h, q).is_zero())
        .cloned()
        .collect();
    if n < lin_dim + 2 {
        return false;
    }
    let target = n - lin_dim - 2;
    if tight.is_empty() {
        return target == 0;
    }
    Mat::from_rows(tight).rank() == target
}

//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Everything here is exact: coefficients are `BigRational`, zero
//! coefficients are never stored, and term maps are ordered so that
//! serialization is deterministic.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Exact rational scalar. Always kept in lowest terms with a positive
/// denominator by `BigRational` itself.
pub type Rat = BigRational;

/// Rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A power product x1^e1 … xn^en, stored as its exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(dim: usize) -> Self {
        Monomial { exps: vec![0; dim] }
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut exps = vec![0; dim];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

// Graded lexicographic order: first by total degree, then lexicographically
// on the exponent vector. Gives canonical term ordering in the BTreeMap.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An evaluation point with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    pub coords: Vec<Rat>,
}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        Point { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![Rat::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

/// Sparse multivariate polynomial over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        let mut p = Polynomial::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(dim), c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Polynomial::constant(dim, Rat::one())
    }

    /// The variable x_{i+1} (0-based index).
    pub fn var(dim: usize, i: usize) -> Self {
        let mut p = Polynomial::zero(dim);
        p.terms.insert(Monomial::var(dim, i), Rat::one());
        p
    }

    pub fn from_terms(dim: usize, terms: Vec<(Monomial, Rat)>) -> Self {
        let mut p = Polynomial::zero(dim);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial (the −∞ sentinel).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.dim))
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.dim, other.dim);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.dim, other.dim);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Polynomial {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = -c.clone();
        }
        r
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.dim, other.dim);
        let mut r = Polynomial::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        let mut r = self.clone();
        for v in r.terms.values_mut() {
            *v = v.clone() * c;
        }
        r
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut r = Polynomial::one(self.dim);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Checked addition with dimension validation (the other arithmetic
    /// entry points mirror this; internal code uses the unchecked forms).
    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        Ok(self.mul(other))
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, z: &Point) -> Result<Rat, PolyError> {
        if z.dim() != self.dim {
            return Err(PolyError::DimensionMismatch(self.dim, z.dim()));
        }
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    v *= &z.coords[i];
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Partial derivative with respect to variable i.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut r = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] = e - 1;
            r.add_term(Monomial::new(exps), c * int(e as i64));
        }
        r
    }

    /// Substitute each variable by the given polynomial (general
    /// composition; all inputs must share the target ambient dimension).
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if subs.len() != self.dim {
            return Err(PolyError::DimensionMismatch(self.dim, subs.len()));
        }
        let target_dim = subs.first().map(|p| p.dim).unwrap_or(0);
        let mut r = Polynomial::zero(target_dim);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target_dim, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = t.mul(&subs[i].pow(e));
                }
            }
            r = r.add(&t);
        }
        Ok(r)
    }

    /// Univariate restriction t ↦ p(z + t v), returned as a polynomial in
    /// one variable.
    pub fn restrict_to_line(&self, z: &Point, v: &[Rat]) -> Result<Polynomial, PolyError> {
        if z.dim() != self.dim || v.len() != self.dim {
            return Err(PolyError::DimensionMismatch(self.dim, z.dim().min(v.len())));
        }
        let subs: Vec<Polynomial> = (0..self.dim)
            .map(|i| {
                Polynomial::constant(1, z.coords[i].clone())
                    .add(&Polynomial::var(1, 0).scale(&v[i]))
            })
            .collect();
        self.substitute(&subs)
    }

    /// Directional derivative D_v p(z): the coefficient of t in p(z + t v).
    pub fn directional_derivative(&self, z: &Point, v: &[Rat]) -> Result<Rat, PolyError> {
        let line = self.restrict_to_line(z, v)?;
        Ok(line.coeff(&Monomial::new(vec![1])))
    }

    /// Gradient at z, as an exact rational vector.
    pub fn gradient(&self, z: &Point) -> Result<Vec<Rat>, PolyError> {
        (0..self.dim).map(|i| self.partial(i).evaluate(z)).collect()
    }

    /// Hessian matrix at z (symmetric, n×n).
    #[allow(clippy::needless_range_loop)] // symmetric double-index fill
    pub fn hessian(&self, z: &Point) -> Result<Vec<Vec<Rat>>, PolyError> {
        let mut h = vec![vec![Rat::zero(); self.dim]; self.dim];
        for i in 0..self.dim {
            let pi = self.partial(i);
            for j in i..self.dim {
                let v = pi.partial(j).evaluate(z)?;
                h[i][j] = v.clone();
                h[j][i] = v;
            }
        }
        Ok(h)
    }

    /// The quadratic form vᵗ·H(z)·v, equal to twice the t² coefficient of
    /// the restriction p(z + t v).
    pub fn hessian_form(&self, z: &Point, v: &[Rat]) -> Result<Rat, PolyError> {
        let line = self.restrict_to_line(z, v)?;
        Ok(line.coeff(&Monomial::new(vec![2])) * int(2))
    }

    /// Render with explicit variable names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // highest-degree terms first
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let is_const = m.total_degree() == 0;
            if !abs.is_one() || is_const {
                out.push_str(&abs.to_string());
                if !is_const {
                    out.push(' ');
                }
            }
            let mut first = true;
            for (j, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&names[j]);
                if e > 1 {
                    out.push('^');
                    out.push_str(&e.to_string());
                }
            }
        }
        out
    }

    /// Parse the text format: signed terms `c x1^e1 x2^e2 …` with rational
    /// coefficients, whitespace-insensitive. Variable names are supplied by
    /// the caller.
    pub fn parse(input: &str, names: &[String]) -> Result<Polynomial, PolyError> {
        let dim = names.len();
        let mut p = Polynomial::zero(dim);
        let s: Vec<char> = input.chars().collect();
        let mut i = 0;
        let n = s.len();
        let skip_ws = |i: &mut usize| {
            while *i < n && s[*i].is_whitespace() {
                *i += 1;
            }
        };
        skip_ws(&mut i);
        if i == n {
            return Err(PolyError::Parse("empty polynomial".into()));
        }
        let mut first = true;
        while i < n {
            skip_ws(&mut i);
            if i == n {
                break;
            }
            // sign
            let mut sign = 1i64;
            if s[i] == '+' || s[i] == '-' {
                if s[i] == '-' {
                    sign = -1;
                }
                i += 1;
                skip_ws(&mut i);
            } else if !first {
                return Err(PolyError::Parse(format!(
                    "expected '+' or '-' at position {}",
                    i
                )));
            }
            first = false;
            // optional rational coefficient
            let mut coeff = int(sign);
            let mut saw_coeff = false;
            if i < n && s[i].is_ascii_digit() {
                let start = i;
                while i < n && s[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = s[start..i].iter().collect();
                let num: BigInt = num.parse().map_err(|_| {
                    PolyError::Parse(format!("bad integer at position {}", start))
                })?;
                let mut den = BigInt::one();
                skip_ws(&mut i);
                if i < n && s[i] == '/' {
                    i += 1;
                    skip_ws(&mut i);
                    let dstart = i;
                    while i < n && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(PolyError::Parse(format!(
                            "expected denominator at position {}",
                            i
                        )));
                    }
                    let d: String = s[dstart..i].iter().collect();
                    den = d.parse().map_err(|_| {
                        PolyError::Parse(format!("bad denominator at position {}", dstart))
                    })?;
                    if den.is_zero() {
                        return Err(PolyError::Parse("zero denominator".into()));
                    }
                }
                coeff = Rat::new(num, den) * int(sign);
                saw_coeff = true;
            }
            // variable factors
            let mut exps = vec![0u32; dim];
            let mut saw_var = false;
            loop {
                skip_ws(&mut i);
                if i >= n || s[i] == '+' || s[i] == '-' {
                    break;
                }
                if !(s[i].is_alphabetic() || s[i] == '_') {
                    return Err(PolyError::Parse(format!(
                        "unexpected character '{}' at position {}",
                        s[i], i
                    )));
                }
                let start = i;
                while i < n && (s[i].is_alphanumeric() || s[i] == '_') {
                    i += 1;
                }
                let name: String = s[start..i].iter().collect();
                let idx = names.iter().position(|v| *v == name).ok_or_else(|| {
                    PolyError::Parse(format!("undeclared variable '{}'", name))
                })?;
                let mut e = 1u32;
                skip_ws(&mut i);
                if i < n && s[i] == '^' {
                    i += 1;
                    skip_ws(&mut i);
                    let estart = i;
                    while i < n && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    if estart == i {
                        return Err(PolyError::Parse(format!(
                            "expected exponent at position {}",
                            i
                        )));
                    }
                    let es: String = s[estart..i].iter().collect();
                    e = es.parse().map_err(|_| {
                        PolyError::Parse(format!("bad exponent at position {}", estart))
                    })?;
                }
                exps[idx] += e;
                saw_var = true;
            }
            if !saw_coeff && !saw_var {
                return Err(PolyError::Parse(format!(
                    "empty term at position {}",
                    i
                )));
            }
            p.add_term(Monomial::new(exps), coeff);
        }
        Ok(p)
    }

    /// Default variable names x1..xn.
    pub fn default_names(dim: usize) -> Vec<String> {
        (1..=dim).map(|i| format!("x{}", i)).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&Polynomial::default_names(self.dim)))
    }
}

/// Exact binomial coefficient binom(1/2, k).
pub fn binom_half(k: u32) -> Rat {
    let mut num = Rat::one();
    let half = rat(1, 2);
    for j in 0..k {
        num *= half.clone() - int(j as i64);
    }
    let mut fact = Rat::one();
    for j in 1..=k {
        fact *= int(j as i64);
    }
    num / fact
}

/// The n-th Taylor polynomial t_n(x) of √(1−x):
/// t_n(x) = Σ_{k=0}^n binom(1/2,k)(−x)^k.
pub fn taylor_sqrt(n: u32) -> Polynomial {
    let mut p = Polynomial::zero(1);
    for k in 0..=n {
        let c = binom_half(k) * int(if k % 2 == 0 { 1 } else { -1 });
        p.add_term(Monomial::new(vec![k]), c);
    }
    p
}

/// The defect p_n(x) = t_n(x)² − (1−x). Its coefficients are nonnegative,
/// have power-of-two denominators, and are supported in degrees n+1..2n.
pub fn sqrt_defect(n: u32) -> Polynomial {
    assert!(n >= 1, "sqrt_defect requires n >= 1");
    let t = taylor_sqrt(n);
    let one_minus_x = Polynomial::one(1).sub(&Polynomial::var(1, 0));
    t.mul(&t).sub(&one_minus_x)
}

//! Exact rational linear programming.
//!
//! Two-phase simplex with Bland's pivoting rule, which guarantees
//! termination in exact arithmetic. Every answer carries a verifiable
//! payload: a feasible point, an optimal point, an improving ray, or a
//! Farkas infeasibility certificate.

use crate::matrix::Mat;
use crate::poly::Rat;
use num::{One, Signed, Zero};

/// Sign constraint on a variable of a [`LinearSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSign {
    Free,
    NonNeg,
}

/// Equality system A·x = b with per-variable sign constraints.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: Mat,
    pub b: Vec<Rat>,
    pub signs: Vec<VarSign>,
}

impl LinearSystem {
    pub fn new(a: Mat, b: Vec<Rat>, signs: Vec<VarSign>) -> Self {
        debug_assert_eq!(a.rows, b.len());
        debug_assert_eq!(a.cols, signs.len());
        LinearSystem { a, b, signs }
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols
    }

    /// Exact feasibility check of a candidate point.
    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        if x.len() != self.a.cols {
            return false;
        }
        if self
            .signs
            .iter()
            .zip(x)
            .any(|(s, v)| *s == VarSign::NonNeg && v.is_negative())
        {
            return false;
        }
        self.a.mul_vec(x) == self.b
    }
}

/// Farkas infeasibility certificate: yᵗA ≤ 0 on nonnegative columns,
/// yᵗA = 0 on free columns, and yᵗb > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub y: Vec<Rat>,
}

impl FarkasCertificate {
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        if self.y.len() != sys.a.rows {
            return false;
        }
        for j in 0..sys.a.cols {
            let yta: Rat = (0..sys.a.rows).map(|i| &self.y[i] * &sys.a.a[i][j]).sum();
            match sys.signs[j] {
                VarSign::NonNeg => {
                    if yta.is_positive() {
                        return false;
                    }
                }
                VarSign::Free => {
                    if !yta.is_zero() {
                        return false;
                    }
                }
            }
        }
        let ytb: Rat = self.y.iter().zip(&sys.b).map(|(y, b)| y * b).sum();
        ytb.is_positive()
    }
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Feasible(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

#[derive(Debug, Clone)]
pub enum OptOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    /// Feasible but unbounded below; the ray improves the objective and
    /// stays feasible from `point`.
    Unbounded { point: Vec<Rat>, ray: Vec<Rat> },
    Infeasible(FarkasCertificate),
}

// Internal simplex tableau over nonnegative variables only. Free user
// variables are split into differences of two nonnegative columns.
struct Tableau {
    t: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Step {
    Optimal,
    Unbounded { entering: usize },
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            *v = v.clone() / &piv;
        }
        self.rhs[row] = self.rhs[row].clone() / &piv;
        for i in 0..self.t.len() {
            if i == row || self.t[i][col].is_zero() {
                continue;
            }
            let f = self.t[i][col].clone();
            for j in 0..self.ncols {
                let d = &self.t[row][j] * &f;
                self.t[i][j] -= d;
            }
            let d = &self.rhs[row] * &f;
            self.rhs[i] -= d;
        }
        self.basis[row] = col;
    }

    /// Reduced cost vector for the given column costs.
    fn reduced_costs(&self, costs: &[Rat]) -> Vec<Rat> {
        let m = self.t.len();
        (0..self.ncols)
            .map(|j| {
                let pi: Rat = (0..m).map(|i| &costs[self.basis[i]] * &self.t[i][j]).sum();
                &costs[j] - pi
            })
            .collect()
    }

    /// Run Bland-rule simplex to optimality or unboundedness. Only the
    /// first `active_cols` columns may enter the basis.
    fn run(&mut self, costs: &[Rat], active_cols: usize) -> Step {
        loop {
            let rc = self.reduced_costs(costs);
            let entering = (0..active_cols).find(|&j| rc[j].is_negative());
            let Some(col) = entering else {
                return Step::Optimal;
            };
            // Bland leaving rule: min ratio, ties by smallest basis index.
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.t[i][col];
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Step::Unbounded { entering: col },
            }
        }
    }

    fn objective(&self, costs: &[Rat]) -> Rat {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, r)| &costs[b] * r)
            .sum()
    }
}

// Column layout after splitting free variables: for user variable j,
// colmap[j] = (plus_col, Some(minus_col)) when free, (col, None) when
// nonnegative.
struct Split {
    colmap: Vec<(usize, Option<usize>)>,
    ncols: usize,
}

fn split_vars(signs: &[VarSign]) -> Split {
    let mut colmap = Vec::with_capacity(signs.len());
    let mut c = 0;
    for s in signs {
        match s {
            VarSign::NonNeg => {
                colmap.push((c, None));
                c += 1;
            }
            VarSign::Free => {
                colmap.push((c, Some(c + 1)));
                c += 2;
            }
        }
    }
    Split { colmap, ncols: c }
}

struct Phase1 {
    tab: Tableau,
    split: Split,
    n_internal: usize,
    feasible: bool,
    farkas: Option<FarkasCertificate>,
}

fn phase1(sys: &LinearSystem) -> Phase1 {
    let m = sys.a.rows;
    let split = split_vars(&sys.signs);
    let n = split.ncols;
    let ncols = n + m;
    let mut t = vec![vec![Rat::zero(); ncols]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut row_sign = vec![false; m];
    for i in 0..m {
        let neg = sys.b[i].is_negative();
        row_sign[i] = neg;
        for (j, &(pc, mc)) in split.colmap.iter().enumerate() {
            let v = if neg {
                -sys.a.a[i][j].clone()
            } else {
                sys.a.a[i][j].clone()
            };
            t[i][pc] = v.clone();
            if let Some(mc) = mc {
                t[i][mc] = -v;
            }
        }
        t[i][n + i] = Rat::one();
        rhs.push(if neg { -sys.b[i].clone() } else { sys.b[i].clone() });
    }
    let mut tab = Tableau {
        t,
        rhs,
        basis: (n..ncols).collect(),
        ncols,
    };
    let mut costs = vec![Rat::zero(); ncols];
    for c in costs.iter_mut().skip(n) {
        *c = Rat::one();
    }
    match tab.run(&costs, ncols) {
        Step::Unbounded { .. } => unreachable!("phase-1 objective is bounded below by 0"),
        Step::Optimal => {}
    }
    let value = tab.objective(&costs);
    if value.is_positive() {
        // dual multipliers from the artificial columns, sign-adjusted back
        // to the user row orientation
        let y: Vec<Rat> = (0..m)
            .map(|i| {
                let pi: Rat = (0..m)
                    .map(|r| &costs[tab.basis[r]] * &tab.t[r][n + i])
                    .sum();
                if row_sign[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        return Phase1 {
            tab,
            split,
            n_internal: n,
            feasible: false,
            farkas: Some(FarkasCertificate { y }),
        };
    }
    // drive remaining zero-level artificials out of the basis
    let mut drop_rows = Vec::new();
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            } else {
                drop_rows.push(i); // redundant constraint
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        tab.t.remove(i);
        tab.rhs.remove(i);
        tab.basis.remove(i);
    }
    Phase1 {
        tab,
        split,
        n_internal: n,
        feasible: true,
        farkas: None,
    }
}

fn extract_point(tab: &Tableau, split: &Split) -> Vec<Rat> {
    let mut internal = vec![Rat::zero(); tab.ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        internal[b] = tab.rhs[i].clone();
    }
    split
        .colmap
        .iter()
        .map(|&(pc, mc)| match mc {
            None => internal[pc].clone(),
            Some(mc) => &internal[pc] - &internal[mc],
        })
        .collect()
}

/// Exact feasibility: a feasible point or a verifiable Farkas certificate.
pub fn solve(sys: &LinearSystem) -> SolveOutcome {
    let p1 = phase1(sys);
    if !p1.feasible {
        return SolveOutcome::Infeasible(p1.farkas.unwrap());
    }
    SolveOutcome::Feasible(extract_point(&p1.tab, &p1.split))
}

/// Exact minimization of cᵗx over the system.
pub fn minimize(c: &[Rat], sys: &LinearSystem) -> OptOutcome {
    debug_assert_eq!(c.len(), sys.num_vars());
    let mut p1 = phase1(sys);
    if !p1.feasible {
        return OptOutcome::Infeasible(p1.farkas.unwrap());
    }
    let n = p1.n_internal;
    let mut costs = vec![Rat::zero(); p1.tab.ncols];
    for (j, &(pc, mc)) in p1.split.colmap.iter().enumerate() {
        costs[pc] = c[j].clone();
        if let Some(mc) = mc {
            costs[mc] = -c[j].clone();
        }
    }
    match p1.tab.run(&costs, n) {
        Step::Optimal => OptOutcome::Optimal {
            value: p1.tab.objective(&costs),
            point: extract_point(&p1.tab, &p1.split),
        },
        Step::Unbounded { entering } => {
            let mut internal_ray = vec![Rat::zero(); p1.tab.ncols];
            internal_ray[entering] = Rat::one();
            for (i, &b) in p1.tab.basis.iter().enumerate() {
                internal_ray[b] = -p1.tab.t[i][entering].clone();
            }
            let ray: Vec<Rat> = p1
                .split
                .colmap
                .iter()
                .map(|&(pc, mc)| match mc {
                    None => internal_ray[pc].clone(),
                    Some(mc) => &internal_ray[pc] - &internal_ray[mc],
                })
                .collect();
            OptOutcome::Unbounded {
                point: extract_point(&p1.tab, &p1.split),
                ray,
            }
        }
    }
}

/// Exact maximization of cᵗx.
pub fn maximize(c: &[Rat], sys: &LinearSystem) -> OptOutcome {
    let neg: Vec<Rat> = c.iter().map(|x| -x.clone()).collect();
    match minimize(&neg, sys) {
        OptOutcome::Optimal { value, point } => OptOutcome::Optimal {
            value: -value,
            point,
        },
        other => other,
    }
}

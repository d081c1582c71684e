//! Exact rational LP: two-phase tableau simplex with Bland's rule.
//!
//! Variables are nonnegative. Every optimum is checked against a dual
//! certificate before it is returned.

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Optional upper bounds; lower bounds are always 0.
    pub upper: Vec<Option<Rational>>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
    pub maximize: bool,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            upper: vec![None; num_vars],
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
            maximize: false,
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    fn check(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.upper.len() != self.num_vars {
            return Err(Error::Internal("LP dimensions disagree".into()));
        }
        if self.constraints.iter().flat_map(|c| &c.coeffs).any(|(j, _)| *j >= self.num_vars) {
            return Err(Error::Internal("LP constraint refers to an unknown variable".into()));
        }
        Ok(())
    }

    /// All rows, upper bounds included.
    fn rows(&self) -> Vec<Constraint> {
        let mut rows = self.constraints.clone();
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                rows.push(Constraint { coeffs: vec![(j, Rational::one())], rel: Relation::Le, rhs: u.clone() });
            }
        }
        rows
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Exact primal feasibility.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows().iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
                match c.rel {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational, pivots: usize },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    enterable: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..=w).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                self.obj[j] -= &f * &pivot_row[j];
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Minimize the objective row; `false` when unbounded.
    fn run(&mut self) -> bool {
        let w = self.width();
        loop {
            let Some(c) = (0..w).find(|&j| self.enterable[j] && self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (k, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[c];
                let better = match &best {
                    None => true,
                    Some((b, br)) => ratio < *br || (ratio == *br && self.basis[k] < self.basis[*b]),
                };
                if better {
                    best = Some((k, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.check()?;
    let n = lp.num_vars;
    // Normalize every row to a nonnegative right-hand side.
    let mut rows: Vec<Constraint> = lp.rows();
    for c in rows.iter_mut() {
        if c.rhs.is_negative() {
            c.rhs = -c.rhs.clone();
            c.coeffs = c.coeffs.iter().map(|(j, a)| (*j, -a.clone())).collect();
            c.rel = match c.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let m = rows.len();
    // Columns: originals, one slack/surplus per inequality, one artificial per Ge/Eq row.
    let mut slack_col = vec![None; m];
    let mut art_col = vec![None; m];
    let mut width = n;
    for (k, c) in rows.iter().enumerate() {
        if c.rel != Relation::Eq {
            slack_col[k] = Some(width);
            width += 1;
        }
    }
    for (k, c) in rows.iter().enumerate() {
        if c.rel != Relation::Le {
            art_col[k] = Some(width);
            width += 1;
        }
    }
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        obj: vec![Rational::zero(); width + 1],
        basis: vec![0; m],
        enterable: vec![true; width],
        pivots: 0,
    };
    for (k, c) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        for (j, a) in &c.coeffs {
            row[*j] += a;
        }
        if let Some(s) = slack_col[k] {
            row[s] = if c.rel == Relation::Le { Rational::one() } else { -Rational::one() };
        }
        row[width] = c.rhs.clone();
        match art_col[k] {
            Some(a) => {
                row[a] = Rational::one();
                t.basis[k] = a;
            }
            None => t.basis[k] = slack_col[k].expect("Le rows have a slack"),
        }
        t.rows.push(row);
    }
    // Phase 1: minimize the sum of artificials.
    for k in 0..m {
        if art_col[k].is_some() {
            for j in 0..=width {
                if art_col.iter().flatten().any(|&a| a == j) {
                    continue;
                }
                let v = t.rows[k][j].clone();
                t.obj[j] -= v;
            }
        }
    }
    t.run();
    if !t.obj[width].is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    let is_art = |j: usize| art_col.iter().flatten().any(|&a| a == j);
    // Drive zero-level artificials out of the basis where possible.
    for k in 0..m {
        if is_art(t.basis[k]) {
            if let Some(j) = (0..width).find(|&j| !is_art(j) && !t.rows[k][j].is_zero()) {
                t.pivot(k, j);
            }
        }
    }
    for j in 0..width {
        t.enterable[j] = !is_art(j);
    }
    // Phase 2 on the minimization form.
    let sign = if lp.maximize { -Rational::one() } else { Rational::one() };
    let cost: Vec<Rational> =
        (0..width).map(|j| if j < n { &sign * &lp.objective[j] } else { Rational::zero() }).collect();
    for j in 0..=width {
        let mut r = if j < width { cost[j].clone() } else { Rational::zero() };
        for k in 0..m {
            let cb = &cost[t.basis[k]];
            if !cb.is_zero() && !t.rows[k][j].is_zero() {
                r -= cb * &t.rows[k][j];
            }
        }
        t.obj[j] = r;
    }
    if !t.run() {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Rational::zero(); n];
    for (k, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[k][width].clone();
        }
    }
    let value = lp.objective_value(&x);
    // Dual values read off the identity columns: y_k = -reduced cost.
    let y: Vec<Rational> = (0..m)
        .map(|k| {
            let id = art_col[k].or(slack_col[k]).expect("every row has an identity column");
            -t.obj[id].clone()
        })
        .collect();
    verify_certificate(lp, &rows, &cost[..n], &x, &y, &sign)?;
    Ok(LpOutcome::Optimal { x, value, pivots: t.pivots })
}

/// Primal feasibility, dual feasibility and equal objectives, all exact.
fn verify_certificate(
    lp: &LinearProgram,
    rows: &[Constraint],
    cost: &[Rational],
    x: &[Rational],
    y: &[Rational],
    sign: &Rational,
) -> Result<()> {
    if !lp.is_feasible(x) {
        return Err(Error::Internal("simplex returned an infeasible point".into()));
    }
    for (c, yk) in rows.iter().zip(y) {
        let ok = match c.rel {
            Relation::Le => !yk.is_positive(),
            Relation::Ge => !yk.is_negative(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(Error::Internal("dual certificate has a wrong sign".into()));
        }
    }
    let mut aty = vec![Rational::zero(); lp.num_vars];
    for (c, yk) in rows.iter().zip(y) {
        if yk.is_zero() {
            continue;
        }
        for (j, a) in &c.coeffs {
            aty[*j] += a * yk;
        }
    }
    if aty.iter().zip(cost).any(|(l, c)| l > c) {
        return Err(Error::Internal("dual certificate is infeasible".into()));
    }
    let dual: Rational = rows.iter().zip(y).map(|(c, yk)| &c.rhs * yk).sum();
    let primal: Rational = cost.iter().zip(x).map(|(c, v)| c * v).sum();
    if dual != primal || sign * &lp.objective_value(x) != primal {
        return Err(Error::Internal("primal and dual objectives differ".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn one_variable_max() {
        let mut lp = LinearProgram::new(1);
        lp.maximize = true;
        lp.objective[0] = q("1");
        lp.add(vec![(0, q("1"))], Relation::Le, q("1/3"));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(x, vec![q("1/3")]);
                assert_eq!(value, q("1/3"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_region_is_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![(0, q("1"))], Relation::Le, q("0"));
        lp.add(vec![(0, q("1"))], Relation::Ge, q("1"));
        assert_eq!(lp_solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(2);
        lp.maximize = true;
        lp.objective = vec![q("1"), q("0")];
        lp.add(vec![(0, q("1")), (1, q("-1"))], Relation::Le, q("1"));
        assert_eq!(lp_solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36.
        let mut lp = LinearProgram::new(2);
        lp.maximize = true;
        lp.objective = vec![q("3"), q("5")];
        lp.upper[0] = Some(q("4"));
        lp.add(vec![(1, q("2"))], Relation::Le, q("12"));
        lp.add(vec![(0, q("3")), (1, q("2"))], Relation::Le, q("18"));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(x, vec![q("2"), q("6")]);
                assert_eq!(value, q("36"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equalities_and_redundancy() {
        // x + y = 1 twice, minimize x - y with negative right-hand sides mixed in.
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![q("1"), q("-1")];
        lp.add(vec![(0, q("1")), (1, q("1"))], Relation::Eq, q("1"));
        lp.add(vec![(0, q("-1")), (1, q("-1"))], Relation::Eq, q("-1"));
        lp.add(vec![(0, q("-1"))], Relation::Le, q("-1/4"));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(x, vec![q("1/4"), q("3/4")]);
                assert_eq!(value, q("-1/2"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![q("-3/4"), q("150"), q("-1/50"), q("6")];
        lp.add(vec![(0, q("1/4")), (1, q("-60")), (2, q("-1/25")), (3, q("9"))], Relation::Le, q("0"));
        lp.add(vec![(0, q("1/2")), (1, q("-90")), (2, q("-1/50")), (3, q("3"))], Relation::Le, q("0"));
        lp.add(vec![(2, q("1"))], Relation::Le, q("1"));
        match lp_solve(&lp).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q("-1/20")),
            other => panic!("{other:?}"),
        }
    }
}

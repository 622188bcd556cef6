//! Exact rational linear programming: a dense two-phase simplex with Bland's
//! rule, plus strict-inequality feasibility through a margin variable.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Eq,
    Ge,
    Gt,
}

/// `coeffs . x REL rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinCon {
    pub coeffs: Vec<Q>,
    pub rel: Rel,
    pub rhs: Q,
}

impl LinCon {
    pub fn new(coeffs: Vec<Q>, rel: Rel, rhs: Q) -> Self {
        LinCon { coeffs, rel, rhs }
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let lhs: Q = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.rel {
            Rel::Le => lhs <= self.rhs,
            Rel::Lt => lhs < self.rhs,
            Rel::Eq => lhs == self.rhs,
            Rel::Ge => lhs >= self.rhs,
            Rel::Gt => lhs > self.rhs,
        }
    }

    fn is_strict(&self) -> bool {
        matches!(self.rel, Rel::Lt | Rel::Gt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Q]) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pr = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pr) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (v, pv) in obj.iter_mut().zip(&pr) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximize with reduced costs `obj` (last entry holds minus the value).
    /// Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [Q], usable: &[bool]) -> bool {
        let rhs = self.width;
        loop {
            let Some(c) = (0..self.width).find(|&j| usable[j] && obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c, obj),
                None => return false,
            }
        }
    }
}

/// Maximize `c . x` over free variables subject to non-strict constraints.
pub fn maximize(c: &[Q], cons: &[LinCon]) -> LpOutcome {
    let n = c.len();
    assert!(cons.iter().all(|k| !k.is_strict() && k.coeffs.len() == n));
    // columns: x+ (n), x- (n), one slack per inequality, one artificial per row
    let slack_rows: Vec<usize> = (0..cons.len())
        .filter(|&i| cons[i].rel != Rel::Eq)
        .collect();
    let ns = slack_rows.len();
    let m = cons.len();
    let art0 = 2 * n + ns;
    let width = art0 + m;
    let mut rows = Vec::with_capacity(m);
    for (i, k) in cons.iter().enumerate() {
        let mut row = vec![Q::zero(); width + 1];
        for j in 0..n {
            row[j] = k.coeffs[j].clone();
            row[n + j] = -k.coeffs[j].clone();
        }
        if let Some(s) = slack_rows.iter().position(|&r| r == i) {
            row[2 * n + s] = if k.rel == Rel::Le {
                Q::one()
            } else {
                -Q::one()
            };
        }
        row[width] = k.rhs.clone();
        if row[width].is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[art0 + i] = Q::one();
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (art0..art0 + m).collect(),
        width,
    };
    // phase 1: maximize minus the sum of artificials
    let mut obj = vec![Q::zero(); width + 1];
    for row in &t.rows {
        for j in 0..art0 {
            obj[j] += &row[j];
        }
        obj[width] += &row[width];
    }
    let all = vec![true; width];
    t.optimize(&mut obj, &all);
    if obj[width].is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            match (0..art0).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => {
                    let mut dummy = vec![Q::zero(); width + 1];
                    t.pivot(r, j, &mut dummy);
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    // phase 2
    let mut obj = vec![Q::zero(); width + 1];
    for j in 0..n {
        obj[j] = c[j].clone();
        obj[n + j] = -c[j].clone();
    }
    for (i, &b) in t.basis.iter().enumerate() {
        if !obj[b].is_zero() {
            let f = obj[b].clone();
            for (v, pv) in obj.iter_mut().zip(&t.rows[i]) {
                *v -= &f * pv;
            }
        }
    }
    let usable: Vec<bool> = (0..width).map(|j| j < art0).collect();
    if !t.optimize(&mut obj, &usable) {
        return LpOutcome::Unbounded;
    }
    let mut vals = vec![Q::zero(); width];
    for (i, &b) in t.basis.iter().enumerate() {
        vals[b] = t.rows[i][width].clone();
    }
    let x: Vec<Q> = (0..n).map(|j| &vals[j] - &vals[n + j]).collect();
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}

/// A point satisfying every constraint, strict ones included, or `None`.
/// Strict rows are shifted by a margin `delta <= 1` that is maximized; the
/// system is strictly feasible exactly when the optimal margin is positive.
pub fn find_point(n: usize, cons: &[LinCon]) -> Option<Vec<Q>> {
    if !cons.iter().any(LinCon::is_strict) {
        return match maximize(&vec![Q::zero(); n], cons) {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        };
    }
    let mut ext = Vec::with_capacity(cons.len() + 1);
    for k in cons {
        let mut coeffs = k.coeffs.clone();
        let (rel, margin) = match k.rel {
            Rel::Lt => (Rel::Le, Q::one()),
            Rel::Gt => (Rel::Ge, -Q::one()),
            r => (r, Q::zero()),
        };
        coeffs.push(margin);
        ext.push(LinCon::new(coeffs, rel, k.rhs.clone()));
    }
    let mut cap = vec![Q::zero(); n];
    cap.push(Q::one());
    ext.push(LinCon::new(cap, Rel::Le, Q::one()));
    let mut c = vec![Q::zero(); n];
    c.push(Q::one());
    match maximize(&c, &ext) {
        LpOutcome::Optimal { mut x, value } if value.is_positive() => {
            x.pop();
            debug_assert!(cons.iter().all(|k| k.holds(&x)));
            Some(x)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn con(c: &[i64], rel: Rel, r: i64) -> LinCon {
        LinCon::new(c.iter().map(|&v| q(v)).collect(), rel, q(r))
    }

    #[test]
    fn small_maximum() {
        // max x + y, x + 2y <= 4, 3x + y <= 6, x,y >= 0
        let cons = [
            con(&[1, 2], Rel::Le, 4),
            con(&[3, 1], Rel::Le, 6),
            con(&[1, 0], Rel::Ge, 0),
            con(&[0, 1], Rel::Ge, 0),
        ];
        match maximize(&[q(1), q(1)], &cons) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, qr(14, 5));
                assert_eq!(x, vec![qr(8, 5), qr(6, 5)]);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = [con(&[1], Rel::Ge, 2), con(&[1], Rel::Le, 1)];
        assert_eq!(maximize(&[q(0)], &cons), LpOutcome::Infeasible);
        assert_eq!(
            maximize(&[q(1)], &[con(&[1], Rel::Ge, 0)]),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn strict_versus_closed() {
        // x >= 1 and x < 1 is empty, x <= 1 is not
        assert!(find_point(1, &[con(&[1], Rel::Ge, 1), con(&[1], Rel::Lt, 1)]).is_none());
        assert!(find_point(1, &[con(&[1], Rel::Ge, 1), con(&[1], Rel::Le, 1)]).is_some());
        let p = find_point(2, &[con(&[1, 1], Rel::Gt, 0), con(&[1, -1], Rel::Eq, 3)]).unwrap();
        assert!(&p[0] + &p[1] > q(0) && &p[0] - &p[1] == q(3));
    }

    #[test]
    fn redundant_equalities() {
        let cons = [
            con(&[1, 1], Rel::Eq, 2),
            con(&[2, 2], Rel::Eq, 4),
            con(&[0, 1], Rel::Ge, 0),
        ];
        match maximize(&[q(1), q(0)], &cons) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(2)),
            o => panic!("{o:?}"),
        }
    }
}

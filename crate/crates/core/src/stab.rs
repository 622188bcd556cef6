//! Exact hyperplane stabbing of convex sets with excluded facets.
//!
//! A hyperplane `E(p) = t . p + t_last = 0` meets `hull(V) - union(excluded)`
//! iff it meets the relative interior of some face that no excluded facet
//! contains. For a face `F` that happens iff `E` takes both strict signs on
//! the vertices of `F`, or vanishes on all of them. The body of the hull is
//! never excluded, so the first alternative reduces to a pair of hull
//! vertices of opposite sign. Every choice of alternative per set is a
//! linear system in the coefficients `t`, decided by the exact LP.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{find_point, q, qr, LinCon, Rel, Q};

/// Convex hull of `vertices` minus the closed hulls of the excluded facets.
#[derive(Debug, Clone, PartialEq)]
pub struct FlaggedConvexSet {
    pub vertices: Vec<Vec<Q>>,
    /// Excluded facets as vertex index lists.
    pub excluded: Vec<Vec<usize>>,
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affine dimension of a point set.
pub fn affine_dim(pts: &[&Vec<Q>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let mut rows: Vec<Vec<Q>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0].iter()).map(|(a, b)| a - b).collect())
        .collect();
    let cols = rows[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, r);
        let piv = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &piv;
                for j in c..cols {
                    let t = &f * &rows[rank][j];
                    rows[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `x` is a convex combination of `pts`.
pub fn in_hull(pts: &[&Vec<Q>], x: &[Q]) -> bool {
    let k = pts.len();
    let mut cons = Vec::new();
    for (axis, xv) in x.iter().enumerate() {
        cons.push(LinCon::new(
            pts.iter().map(|p| p[axis].clone()).collect(),
            Rel::Eq,
            xv.clone(),
        ));
    }
    cons.push(LinCon::new(vec![Q::one(); k], Rel::Eq, Q::one()));
    for i in 0..k {
        let mut c = vec![Q::zero(); k];
        c[i] = Q::one();
        cons.push(LinCon::new(c, Rel::Ge, Q::zero()));
    }
    find_point(k, &cons).is_some()
}

impl FlaggedConvexSet {
    /// Build from hull points and excluded facets given by their points.
    pub fn new(vertices: Vec<Vec<Q>>, excluded: &[Vec<Vec<Q>>]) -> Self {
        let excluded = excluded
            .iter()
            .map(|f| {
                f.iter()
                    .map(|p| {
                        vertices
                            .iter()
                            .position(|v| v == p)
                            .expect("facet point is a hull vertex")
                    })
                    .collect()
            })
            .collect();
        FlaggedConvexSet { vertices, excluded }
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    fn pts(&self, idx: &[usize]) -> Vec<&Vec<Q>> {
        idx.iter().map(|&i| &self.vertices[i]).collect()
    }

    /// Whether the vertex subset is exactly the vertex set of a face: some
    /// linear functional is constant on it and strictly smaller elsewhere.
    pub fn is_face(&self, subset: &[usize]) -> bool {
        let n = self.dim();
        let mut cons = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let mut c: Vec<Q> = v.clone();
            c.push(-Q::one());
            if subset.contains(&i) {
                cons.push(LinCon::new(c, Rel::Eq, Q::zero()));
            } else {
                cons.push(LinCon::new(c, Rel::Le, -Q::one()));
            }
        }
        find_point(n + 1, &cons).is_some()
    }

    /// All nonempty faces including the whole hull.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let k = self.vertices.len();
        (1u32..(1 << k))
            .map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| self.is_face(s))
            .collect()
    }

    /// Faces whose relative interior belongs to the set.
    pub fn allowed_faces(&self) -> Vec<Vec<usize>> {
        self.faces()
            .into_iter()
            .filter(|f| {
                !self
                    .excluded
                    .iter()
                    .any(|g| f.iter().all(|i| g.contains(i)))
            })
            .collect()
    }

    /// Every listed point is a vertex and every excluded set is a facet.
    pub fn well_formed(&self) -> bool {
        let k = self.vertices.len();
        let all: Vec<usize> = (0..k).collect();
        let full = affine_dim(&self.pts(&all));
        (0..k).all(|i| self.is_face(&[i]))
            && self
                .excluded
                .iter()
                .all(|g| self.is_face(g) && affine_dim(&self.pts(g)) + 1 == full)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        in_hull(&self.pts(&all), x) && !self.excluded.iter().any(|g| in_hull(&self.pts(g), x))
    }

    fn centroid(&self, idx: &[usize]) -> Vec<Q> {
        let n = Q::from_integer((idx.len() as i64).into());
        (0..self.dim())
            .map(|a| idx.iter().map(|&i| self.vertices[i][a].clone()).sum::<Q>() / &n)
            .collect()
    }
}

/// Value of the affine functional with coefficients `t = (t_1..t_n, t_0)`.
pub fn eval(t: &[Q], p: &[Q]) -> Q {
    dot(&t[..p.len()], p) + &t[p.len()]
}

/// Direct test, independent of the face cases: the hyperplane cuts the hull
/// in a convex set whose vertex average lies in its relative interior; the
/// cut avoids the set only if it is empty or lies inside one excluded facet,
/// which is the case exactly when that average does.
pub fn meets_direct(t: &[Q], set: &FlaggedConvexSet) -> Option<Vec<Q>> {
    let vals: Vec<Q> = set.vertices.iter().map(|v| eval(t, v)).collect();
    let mut cut: Vec<Vec<Q>> = Vec::new();
    for i in 0..vals.len() {
        if vals[i].is_zero() {
            cut.push(set.vertices[i].clone());
        }
        for j in i + 1..vals.len() {
            if (vals[i].is_positive() && vals[j].is_negative())
                || (vals[i].is_negative() && vals[j].is_positive())
            {
                let s = &vals[i] / (&vals[i] - &vals[j]);
                let p = set.vertices[i]
                    .iter()
                    .zip(&set.vertices[j])
                    .map(|(a, b)| a + &s * (b - a))
                    .collect();
                cut.push(p);
            }
        }
    }
    if cut.is_empty() {
        return None;
    }
    let n = Q::from_integer((cut.len() as i64).into());
    let avg: Vec<Q> = (0..set.dim())
        .map(|a| cut.iter().map(|p| p[a].clone()).sum::<Q>() / &n)
        .collect();
    let on_excluded = set.excluded.iter().any(|g| in_hull(&set.pts(g), &avg));
    (!on_excluded).then_some(avg)
}

/// One alternative for one set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Case {
    /// `E(v) > 0 > E(w)` for hull vertices `v`, `w`.
    Split(usize, usize),
    /// `E` vanishes on an allowed face.
    Contains(Vec<usize>),
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Split(v, w) => write!(f, "E(v{v})>0>E(v{w})"),
            Case::Contains(face) => write!(f, "E=0 on {face:?}"),
        }
    }
}

fn cases(set: &FlaggedConvexSet) -> Vec<Case> {
    let k = set.vertices.len();
    let mut out: Vec<Case> = Vec::new();
    for v in 0..k {
        for w in 0..k {
            if v != w {
                out.push(Case::Split(v, w));
            }
        }
    }
    out.extend(set.allowed_faces().into_iter().map(Case::Contains));
    out
}

fn case_constraints(set: &FlaggedConvexSet, case: &Case) -> Vec<LinCon> {
    let row = |p: &Vec<Q>| {
        let mut c = p.clone();
        c.push(Q::one());
        c
    };
    match case {
        Case::Split(v, w) => vec![
            LinCon::new(row(&set.vertices[*v]), Rel::Gt, Q::zero()),
            LinCon::new(row(&set.vertices[*w]), Rel::Lt, Q::zero()),
        ],
        Case::Contains(face) => face
            .iter()
            .map(|&i| LinCon::new(row(&set.vertices[i]), Rel::Eq, Q::zero()))
            .collect(),
    }
}

/// A point of the set on the hyperplane, derived from the feasible case.
fn case_witness(set: &FlaggedConvexSet, case: &Case, t: &[Q]) -> Vec<Q> {
    match case {
        Case::Contains(face) => set.centroid(face),
        Case::Split(v, w) => {
            // pull both endpoints towards the centroid so the crossing point
            // lands in the relative interior of the hull
            let all: Vec<usize> = (0..set.vertices.len()).collect();
            let g = set.centroid(&all);
            let eg = eval(t, &g);
            if eg.is_zero() {
                return g;
            }
            let (pv, pw) = (&set.vertices[*v], &set.vertices[*w]);
            let (ev, ew) = (eval(t, pv), eval(t, pw));
            let bound = if eg.is_positive() {
                -&ew / (&eg - &ew)
            } else {
                ev.clone() / (&ev - &eg)
            };
            let s = bound / q(2);
            let mv: Vec<Q> = pv.iter().zip(&g).map(|(a, b)| a + &s * (b - a)).collect();
            let mw: Vec<Q> = pw.iter().zip(&g).map(|(a, b)| a + &s * (b - a)).collect();
            let (fv, fw) = (eval(t, &mv), eval(t, &mw));
            let r = &fv / (&fv - &fw);
            mv.iter().zip(&mw).map(|(a, b)| a + &r * (b - a)).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Regular,
    Singular,
    Planar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabbingProblem {
    pub dim: usize,
    pub sets: Vec<FlaggedConvexSet>,
    pub b: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabStatus {
    Feasible,
    Infeasible,
}

/// Coefficients `(t_1..t_n, t_0)` plus one point of every set on the
/// hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct StabWitness {
    pub coeffs: Vec<Q>,
    pub points: Vec<Vec<Q>>,
}

/// A partial case choice whose linear system has no solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Refutation {
    /// Index of the first coefficient normalized to 1; earlier ones are 0.
    pub normalized: usize,
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabVerdict {
    pub status: StabStatus,
    pub witness: Option<StabWitness>,
    pub refutations: Vec<Refutation>,
    pub systems_solved: usize,
}

fn p3(x: &Q, y: &Q, z: &Q) -> Vec<Q> {
    vec![x.clone(), y.clone(), z.clone()]
}

fn signed(sx: i64, sy: i64, sz: i64, s: &Q) -> Vec<Q> {
    p3(&(s * q(sx)), &(s * q(sy)), &(s * q(sz)))
}

/// Trapezoid with corners `(+-1) * near`, `(+-b) * far` along axis `free`,
/// minus its two non-parallel sides.
fn trapezoid(corner: [i64; 3], free: usize, b: &Q) -> FlaggedConvexSet {
    let one = Q::one();
    let mut lo = corner;
    let mut hi = corner;
    lo[free] = -1;
    hi[free] = 1;
    let a0 = signed(lo[0], lo[1], lo[2], &one);
    let b0 = signed(lo[0], lo[1], lo[2], b);
    let a1 = signed(hi[0], hi[1], hi[2], &one);
    let b1 = signed(hi[0], hi[1], hi[2], b);
    FlaggedConvexSet::new(
        vec![a0.clone(), b0.clone(), a1.clone(), b1.clone()],
        &[vec![a0, b0], vec![a1, b1]],
    )
}

fn segment(corner: [i64; 3], b: &Q) -> FlaggedConvexSet {
    let one = Q::one();
    FlaggedConvexSet::new(
        vec![
            signed(corner[0], corner[1], corner[2], &one),
            signed(corner[0], corner[1], corner[2], b),
        ],
        &[],
    )
}

/// The sets of the regular, singular or planar configuration at scale `b`,
/// with the shortest side normalized to 1.
pub fn build_config_sets(kind: Kind, b: &Q) -> Result<StabbingProblem> {
    if *b <= Q::one() {
        return Err(Error::BetaTooSmall("1".into()));
    }
    let sets = match kind {
        Kind::Regular => {
            let one = Q::one();
            let mut hex = Vec::new();
            for &(x, y) in &[(-1, -1), (-1, 1), (1, -1), (1, 1)] {
                hex.push(signed(x, y, 1, &one));
                hex.push(signed(x, y, 1, b));
            }
            let side = |fx: Option<i64>, fy: Option<i64>| -> Vec<Vec<Q>> {
                hex.iter()
                    .filter(|p| {
                        fx.is_none_or(|s| p[0].signum() == q(s))
                            && fy.is_none_or(|s| p[1].signum() == q(s))
                    })
                    .cloned()
                    .collect()
            };
            let excluded = [
                side(Some(-1), None),
                side(None, Some(-1)),
                side(None, Some(1)),
                side(Some(1), None),
            ];
            vec![
                segment([-1, -1, -1], b),
                segment([1, -1, -1], b),
                trapezoid([0, 1, -1], 0, b),
                FlaggedConvexSet::new(hex.clone(), &excluded),
            ]
        }
        Kind::Singular => vec![
            trapezoid([0, -1, -1], 0, b),
            trapezoid([0, 1, -1], 0, b),
            trapezoid([-1, 0, 1], 1, b),
            trapezoid([1, 0, 1], 1, b),
        ],
        Kind::Planar => {
            let h = qr(1, 2);
            let hb = b / q(2);
            let rect = |x0: &Q, x1: &Q, y0: &Q, y1: &Q| {
                vec![
                    vec![x0.clone(), y0.clone()],
                    vec![x1.clone(), y0.clone()],
                    vec![x0.clone(), y1.clone()],
                    vec![x1.clone(), y1.clone()],
                ]
            };
            let c0 = rect(&-hb.clone(), &-h.clone(), &-hb.clone(), &-h.clone());
            let c1 = rect(&-hb.clone(), &-h.clone(), &h, &hb);
            let c2 = rect(&h, &hb, &-hb.clone(), &hb);
            let lower = vec![c2[0].clone(), c2[1].clone()];
            vec![
                FlaggedConvexSet::new(c0, &[]),
                FlaggedConvexSet::new(c1, &[]),
                FlaggedConvexSet::new(c2, &[lower]),
            ]
        }
    };
    let dim = if kind == Kind::Planar { 2 } else { 3 };
    Ok(StabbingProblem {
        dim,
        sets,
        b: b.clone(),
    })
}

/// Decide whether one hyperplane meets every set.
pub fn stab(problem: &StabbingProblem) -> StabVerdict {
    let n = problem.dim;
    let all_cases: Vec<Vec<Case>> = problem.sets.iter().map(cases).collect();
    let mut verdict = StabVerdict {
        status: StabStatus::Infeasible,
        witness: None,
        refutations: Vec::new(),
        systems_solved: 0,
    };
    for k in 0..=n {
        let mut base = Vec::new();
        for j in 0..=k {
            let mut c = vec![Q::zero(); n + 1];
            c[j] = Q::one();
            let rhs = if j == k { Q::one() } else { Q::zero() };
            base.push(LinCon::new(c, Rel::Eq, rhs));
        }
        let mut chosen = Vec::new();
        if let Some(t) = dfs(problem, &all_cases, k, &mut base, &mut chosen, &mut verdict) {
            let points = problem
                .sets
                .iter()
                .zip(&chosen)
                .map(|(s, c)| case_witness(s, c, &t))
                .collect();
            let w = StabWitness { coeffs: t, points };
            assert!(
                witness_holds(problem, &w),
                "stabbing witness failed re-verification"
            );
            verdict.status = StabStatus::Feasible;
            verdict.witness = Some(w);
            return verdict;
        }
    }
    verdict
}

fn dfs(
    problem: &StabbingProblem,
    all_cases: &[Vec<Case>],
    normalized: usize,
    cons: &mut Vec<LinCon>,
    chosen: &mut Vec<Case>,
    verdict: &mut StabVerdict,
) -> Option<Vec<Q>> {
    let i = chosen.len();
    if i == problem.sets.len() {
        verdict.systems_solved += 1;
        return find_point(problem.dim + 1, cons);
    }
    for case in &all_cases[i] {
        let extra = case_constraints(&problem.sets[i], case);
        let len = cons.len();
        cons.extend(extra);
        chosen.push(case.clone());
        verdict.systems_solved += 1;
        if find_point(problem.dim + 1, cons).is_some() {
            if let Some(t) = dfs(problem, all_cases, normalized, cons, chosen, verdict) {
                return Some(t);
            }
        } else {
            verdict.refutations.push(Refutation {
                normalized,
                cases: chosen.clone(),
            });
        }
        chosen.pop();
        cons.truncate(len);
    }
    None
}

/// Exact re-check: every witness point lies on the hyperplane and in its set.
pub fn witness_holds(problem: &StabbingProblem, w: &StabWitness) -> bool {
    w.coeffs.iter().any(|c| !c.is_zero())
        && w.points.len() == problem.sets.len()
        && problem
            .sets
            .iter()
            .zip(&w.points)
            .all(|(s, p)| eval(&w.coeffs, p).is_zero() && s.contains(p))
}

/// Plane stabbing of the four sets of a 3D configuration.
pub fn plane_stab(problem: &StabbingProblem) -> Result<StabVerdict> {
    if problem.dim != 3 || problem.sets.len() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            found: problem.sets.len(),
        });
    }
    Ok(stab(problem))
}

/// Line stabbing of planar sets.
pub fn line_stab(problem: &StabbingProblem) -> Result<StabVerdict> {
    if problem.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: problem.dim,
        });
    }
    Ok(stab(problem))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_sets_match_listing() {
        let p = build_config_sets(Kind::Regular, &q(3)).unwrap();
        assert_eq!(
            p.sets[0].vertices,
            vec![signed(-1, -1, -1, &q(1)), signed(-1, -1, -1, &q(3))]
        );
        assert_eq!(p.sets[2].excluded.len(), 2);
        assert_eq!(p.sets[3].excluded.len(), 4);
        for s in &p.sets {
            assert!(s.well_formed());
        }
        let s = build_config_sets(Kind::Singular, &q(2)).unwrap();
        assert!(s
            .sets
            .iter()
            .all(|t| t.vertices.len() == 4 && t.excluded.len() == 2 && t.well_formed()));
    }

    #[test]
    fn trapezoid_faces() {
        let p = build_config_sets(Kind::Regular, &q(2)).unwrap();
        let t = &p.sets[2];
        // 4 vertices, 4 edges, the body
        assert_eq!(t.faces().len(), 9);
        // the two parallel sides and the body survive
        assert_eq!(t.allowed_faces().len(), 3);
        let hexa = &p.sets[3];
        assert_eq!(hexa.faces().len(), 8 + 12 + 6 + 1);
        assert_eq!(hexa.allowed_faces().len(), 3);
    }

    #[test]
    fn common_point_is_feasible() {
        let pt = |x: i64, y: i64| vec![q(x), q(y)];
        let sets = vec![
            FlaggedConvexSet::new(vec![pt(0, 0), pt(2, 0), pt(0, 2)], &[]),
            FlaggedConvexSet::new(vec![pt(0, 0), pt(-2, 0), pt(0, -2)], &[]),
            FlaggedConvexSet::new(vec![pt(0, 0), pt(5, 5)], &[]),
        ];
        let prob = StabbingProblem {
            dim: 2,
            sets,
            b: q(2),
        };
        assert_eq!(line_stab(&prob).unwrap().status, StabStatus::Feasible);
    }

    #[test]
    fn planar_threshold() {
        let at = |b: Q| {
            line_stab(&build_config_sets(Kind::Planar, &b).unwrap())
                .unwrap()
                .status
        };
        assert_eq!(at(q(3)), StabStatus::Feasible);
        assert_eq!(at(qr(29, 10)), StabStatus::Infeasible);
    }

    #[test]
    fn excluded_point_not_contained() {
        let p = build_config_sets(Kind::Planar, &q(3)).unwrap();
        let c2 = &p.sets[2];
        assert!(c2.contains(&[qr(1, 2), qr(3, 2)]));
        assert!(!c2.contains(&[qr(1, 1), qr(-3, 2)]));
        assert!(c2.contains(&[qr(1, 1), qr(-1, 1)]));
    }
}

//! Oracles and generators shared by the integration tests and the
//! acceptance harness. Everything here is deliberately naive.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::Rng;

use rectnerve::dual::DualComplex;
use rectnerve::embed::Projection;
use rectnerve::gadget::{bulge, joint_successor, Dir, ThinRect};
use rectnerve::model::{validate_partition, IntBox, Partition};
use rectnerve::orient::{orient2, Sign};
use rectnerve::solver::{Search, SolveStatus, SolverConfig};
use rectnerve::counterexamples::fill_with_pixels;
use rectnerve::reduction::{clause_gadget, clause_placement};

type Q = Ratio<i128>;

// ---------------------------------------------------------------- partitions

fn cells(n: i64, d: usize) -> usize {
    (n as usize).pow(d as u32)
}

fn index(cell: &[i64], n: i64) -> usize {
    cell.iter().rev().fold(0, |acc, &c| acc * n as usize + c as usize)
}

fn unindex(mut i: usize, n: i64, d: usize) -> Vec<i64> {
    (0..d)
        .map(|_| {
            let c = (i % n as usize) as i64;
            i /= n as usize;
            c
        })
        .collect()
}

fn box_cells(b: &IntBox) -> Vec<Vec<i64>> {
    let d = b.dim();
    let mut out = vec![b.lo().to_vec()];
    for k in 0..d {
        out = out
            .into_iter()
            .flat_map(|c| {
                (b.lo()[k]..b.hi()[k]).map(move |x| {
                    let mut c = c.clone();
                    c[k] = x;
                    c
                })
            })
            .collect();
    }
    out
}

fn free(b: &IntBox, used: &[bool], n: i64) -> bool {
    (0..b.dim()).all(|k| b.hi()[k] <= n) && box_cells(b).iter().all(|c| !used[index(c, n)])
}

fn mark(b: &IntBox, used: &mut [bool], n: i64, v: bool) {
    for c in box_cells(b) {
        used[index(&c, n)] = v;
    }
}

/// Every rectangular partition of `[0, n]^2`.
pub fn all_partitions_2d(n: i64) -> Vec<Partition> {
    fn go(n: i64, used: &mut Vec<bool>, boxes: &mut Vec<IntBox>, out: &mut Vec<Partition>) {
        let Some(first) = used.iter().position(|&u| !u) else {
            out.push(validate_partition(boxes.clone(), 2, n).unwrap());
            return;
        };
        let lo = unindex(first, n, 2);
        for w in 1..=n - lo[0] {
            for h in 1..=n - lo[1] {
                let b = IntBox::new(lo.clone(), vec![lo[0] + w, lo[1] + h]).unwrap();
                if free(&b, used, n) {
                    mark(&b, used, n, true);
                    boxes.push(b);
                    go(n, used, boxes, out);
                    let b = boxes.pop().unwrap();
                    mark(&b, used, n, false);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut vec![false; cells(n, 2)], &mut Vec::new(), &mut out);
    out
}

/// Random partition of `[0, n]^d`: the first free cell starts a box with
/// random sides in `1..=max_side`, shrunk until it fits.
pub fn random_partition(rng: &mut impl Rng, d: usize, n: i64, max_side: i64) -> Partition {
    let mut used = vec![false; cells(n, d)];
    let mut boxes = Vec::new();
    while let Some(first) = used.iter().position(|&u| !u) {
        let lo = unindex(first, n, d);
        let mut side: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=max_side)).collect();
        loop {
            let hi: Vec<i64> = lo.iter().zip(&side).map(|(a, s)| (a + s).min(n)).collect();
            let b = IntBox::new(lo.clone(), hi).unwrap();
            if free(&b, &used, n) {
                mark(&b, &mut used, n, true);
                boxes.push(b);
                break;
            }
            let k = (0..d).filter(|&k| side[k] > 1).max_by_key(|&k| (side[k], k)).unwrap();
            side[k] -= 1;
        }
    }
    validate_partition(boxes, d, n).unwrap()
}

/// A random faithful half-integral projection.
pub fn random_projection(rng: &mut impl Rng, p: &Partition) -> Projection {
    Projection::new(
        p.boxes()
            .iter()
            .map(|b| (0..b.dim()).map(|k| rng.gen_range(2 * b.lo()[k] + 1..2 * b.hi()[k])).collect())
            .collect(),
    )
}

// ------------------------------------------------------------ Voronoi oracle

/// Distorted pixel center with epsilon 1/8, scaled by 32 to stay integral:
/// `32 (c + 1/2) - 2 sum(c + 1/2)` in every coordinate.
fn distorted(cell: &[i64]) -> Vec<i128> {
    let sum: i128 = cell.iter().map(|&c| 2 * c as i128 + 1).sum();
    cell.iter().map(|&c| 16 * (2 * c as i128 + 1) - sum).collect()
}

fn solve_linear(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != Q::from(0))?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && a[r][col] != Q::from(0) {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    let t = a[col][c];
                    a[r][c] -= f * t;
                }
                let t = b[col];
                b[r] -= f * t;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn dist2(x: &[Q], s: &[i128]) -> Q {
    x.iter().zip(s).map(|(a, &b)| (*a - Q::from(b)) * (*a - Q::from(b))).sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Delaunay simplices of the distorted pixel centers (as pixel cells),
/// found by the empty-sphere test around every grid vertex of `[0, n]^d`.
/// Also checks that the simplices found around a vertex tile its cube of
/// pixel centers, so nothing is missed.
pub fn distorted_delaunay(d: usize, n: i64) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for wi in 0..(n as usize + 1).pow(d as u32) {
        let w = unindex(wi, n + 1, d);
        let around: Vec<Vec<i64>> = (0..1usize << d)
            .map(|m| (0..d).map(|k| w[k] - 1 + (m >> k & 1) as i64).collect())
            .collect();
        let near: Vec<Vec<i128>> = (0..4usize.pow(d as u32))
            .map(|m| {
                let c: Vec<i64> = (0..d).map(|k| w[k] - 2 + (m / 4usize.pow(k as u32) % 4) as i64).collect();
                distorted(&c)
            })
            .collect();
        let mut volume = 0i128;
        for sub in subsets(1 << d, d + 1) {
            let s: Vec<Vec<i128>> = sub.iter().map(|&i| distorted(&around[i])).collect();
            // circumcenter: 2 (s_j - s_0) . x = |s_j|^2 - |s_0|^2
            let norm = |v: &[i128]| v.iter().map(|x| x * x).sum::<i128>();
            let a = (1..=d)
                .map(|j| (0..d).map(|k| Q::from(2 * (s[j][k] - s[0][k]))).collect())
                .collect();
            let b = (1..=d).map(|j| Q::from(norm(&s[j]) - norm(&s[0]))).collect();
            let Some(x) = solve_linear(a, b) else { continue };
            let r = dist2(&x, &s[0]);
            if near.iter().any(|q| dist2(&x, q) < r) {
                continue;
            }
            // cospherical extras would make the sites non-generic
            let on = near.iter().filter(|q| dist2(&x, q) == r).count();
            assert_eq!(on, d + 1, "degenerate Delaunay cell at {w:?}");
            let m: Vec<Vec<i128>> = (1..=d)
                .map(|j| (0..d).map(|k| (around[sub[j]][k] - around[sub[0]][k]) as i128).collect())
                .collect();
            volume += det_i128(m).abs();
            out.push(sub.iter().map(|&i| around[i].clone()).collect());
        }
        let fact: i128 = (1..=d as i128).product();
        assert_eq!(volume, fact, "Delaunay cells around {w:?} do not tile the cube");
    }
    out
}

fn det_i128(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut q: Vec<Vec<Q>> = m.drain(..).map(|r| r.into_iter().map(Q::from).collect()).collect();
    let mut det = Q::from(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| q[r][col] != Q::from(0)) else { return 0 };
        if piv != col {
            q.swap(col, piv);
            det = -det;
        }
        det *= q[col][col];
        for r in col + 1..n {
            let f = q[r][col] / q[col][col];
            for c in col..n {
                let t = q[col][c];
                q[r][c] -= f * t;
            }
        }
    }
    det.to_integer()
}

/// Nerve of the distorted boxes: every face of every Delaunay simplex,
/// mapped to boxes, pixels outside the domain dropped.
pub fn voronoi_dual(p: &Partition, delaunay: &[Vec<Vec<i64>>]) -> BTreeSet<Vec<usize>> {
    let n = p.domain().side(0);
    let d = p.dim();
    let mut owner = vec![0usize; cells(n, d)];
    for (i, b) in p.boxes().iter().enumerate() {
        for c in box_cells(b) {
            owner[index(&c, n)] = i;
        }
    }
    let mut out = BTreeSet::new();
    for simplex in delaunay {
        let boxes: BTreeSet<usize> = simplex
            .iter()
            .filter(|c| c.iter().all(|&x| (0..n).contains(&x)))
            .map(|c| owner[index(c, n)])
            .collect();
        let boxes: Vec<usize> = boxes.into_iter().collect();
        for m in 1u32..1 << boxes.len() {
            out.insert((0..boxes.len()).filter(|&i| m >> i & 1 == 1).map(|i| boxes[i]).collect());
        }
    }
    out
}

// -------------------------------------------------------- injectivity oracle

fn pt(proj: &Projection, v: usize) -> [i64; 2] {
    [proj.coords[v][0], proj.coords[v][1]]
}

fn on_segment(a: [i64; 2], b: [i64; 2], p: [i64; 2]) -> bool {
    orient2(a, b, p) == Sign::Zero
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn segments_meet(a: [i64; 2], b: [i64; 2], c: [i64; 2], e: [i64; 2]) -> bool {
    let (o1, o2) = (orient2(a, b, c), orient2(a, b, e));
    let (o3, o4) = (orient2(c, e, a), orient2(c, e, b));
    if o1 != o2 && o3 != o4 && o1 != Sign::Zero && o2 != Sign::Zero && o3 != Sign::Zero && o4 != Sign::Zero {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, e) || on_segment(c, e, a) || on_segment(c, e, b)
}

fn in_closed_triangle(t: [[i64; 2]; 3], p: [i64; 2]) -> bool {
    let s = [orient2(t[0], t[1], p), orient2(t[1], t[2], p), orient2(t[2], t[0], p)];
    !(s.contains(&Sign::Positive) && s.contains(&Sign::Negative))
}

/// Whether the straight-line drawing of a planar dual complex is a
/// simplicial complex: distinct vertices, non-degenerate triangles, edges
/// meeting only in shared endpoints, no vertex inside a foreign triangle.
pub fn injective_2d(dc: &DualComplex, proj: &Projection) -> bool {
    let nv = dc.num_vertices();
    let pts: Vec<[i64; 2]> = (0..nv).map(|v| pt(proj, v)).collect();
    for i in 0..nv {
        for j in i + 1..nv {
            if pts[i] == pts[j] {
                return false;
            }
        }
    }
    let tris: Vec<&Vec<usize>> = dc.simplices(2).collect();
    if tris.iter().any(|t| orient2(pts[t[0]], pts[t[1]], pts[t[2]]) == Sign::Zero) {
        return false;
    }
    let edges: Vec<&Vec<usize>> = dc.simplices(1).collect();
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            let shared: Vec<usize> = e.iter().filter(|v| f.contains(v)).copied().collect();
            match shared.len() {
                0 => {
                    if segments_meet(pts[e[0]], pts[e[1]], pts[f[0]], pts[f[1]]) {
                        return false;
                    }
                }
                _ => {
                    let a = shared[0];
                    let b = if e[0] == a { e[1] } else { e[0] };
                    let c = if f[0] == a { f[1] } else { f[0] };
                    if on_segment(pts[a], pts[b], pts[c]) || on_segment(pts[a], pts[c], pts[b]) {
                        return false;
                    }
                }
            }
        }
        for v in 0..nv {
            if !e.contains(&v) && on_segment(pts[e[0]], pts[e[1]], pts[v]) {
                return false;
            }
        }
    }
    for t in &tris {
        let tri = [pts[t[0]], pts[t[1]], pts[t[2]]];
        for v in 0..nv {
            if !t.contains(&v) && in_closed_triangle(tri, pts[v]) {
                return false;
            }
        }
    }
    true
}

// ------------------------------------------------------------ gadget lemmas

const LEMMA_CFG: fn() -> SolverConfig = || SolverConfig { node_limit: 2_000_000, ..SolverConfig::default() };

fn index_of(p: &Partition, b: &IntBox) -> usize {
    p.boxes().iter().position(|x| x == b).expect("gadget box present")
}

/// A directed L-joint `t1 -> t2` of thin rectangles of length `len`,
/// padded with pixels: partition, box indices, and the two rectangles.
pub fn standalone_joint(d1: Dir, d2: Dir, len: i64) -> (Partition, usize, usize, ThinRect, ThinRect) {
    let n = 2 * len + 6;
    let c = len + 3;
    // start so the first rectangle ends at the middle of the domain
    let (dx, dy) = d1.delta();
    let first = (c - dx * (len - 1), c - dy * (len - 1));
    let t1 = ThinRect::new(first, d1, len);
    let t2 = joint_successor(&t1, d2, len);
    let _ = bulge(&t1);
    let p = fill_with_pixels(vec![t1.to_box(), t2.to_box()], 2, n).unwrap();
    let (i1, i2) = (index_of(&p, &t1.to_box()), index_of(&p, &t2.to_box()));
    (p, i1, i2, t1, t2)
}

/// The eight directed L-joints: four headings, two turns each.
pub fn joint_orientations() -> Vec<(Dir, Dir)> {
    let dirs = [Dir::North, Dir::East, Dir::South, Dir::West];
    dirs.iter()
        .flat_map(|&a| dirs.iter().filter(move |&&b| a.perpendicular(b)).map(move |&b| (a, b)))
        .collect()
}

/// L-joint property: with the first vertex in its back half the second
/// cannot leave its back half, and the back-half case is realizable.
pub fn joint_lemma(d1: Dir, d2: Dir, len: i64) -> Result<(), String> {
    let (p, i1, i2, t1, t2) = standalone_joint(d1, d2, len);
    let mut s = Search::new(&p).map_err(|e| e.to_string())?;
    s.restrict(i1, |x| t1.in_back_half(x));
    s.restrict(i2, |x| !t2.in_back_half(x));
    let r = s.run(&LEMMA_CFG());
    if r.status != SolveStatus::Unsat {
        return Err(format!("{d1:?}->{d2:?}: second vertex escapes the back half ({:?})", r.status));
    }
    let mut s = Search::new(&p).map_err(|e| e.to_string())?;
    s.restrict(i1, |x| t1.in_back_half(x));
    if s.run(&LEMMA_CFG()).status != SolveStatus::Sat {
        return Err(format!("{d1:?}->{d2:?}: no embedding with the first vertex in its back half"));
    }
    Ok(())
}

/// Standalone clause gadget: R0 with its three arms, padded with pixels.
pub struct ClauseBench {
    pub p: Partition,
    pub r0: usize,
    pub arms: [usize; 3],
    pub rects: [ThinRect; 3],
}

pub fn standalone_clause(arm: i64) -> ClauseBench {
    let scale = 2 * arm + 24;
    let (r0, rects) = clause_gadget((0, 0), scale, arm);
    let mut boxes: Vec<IntBox> = rects.iter().map(ThinRect::to_box).collect();
    boxes.push(r0.clone());
    let p = fill_with_pixels(boxes, 2, scale).unwrap();
    let arms = [0, 1, 2].map(|k| index_of(&p, &rects[k].to_box()));
    ClauseBench { r0: index_of(&p, &r0), arms, rects, p }
}

/// Clause part 1: all arms in their back halves leaves no embedding.
pub fn clause_part1(arm: i64) -> Result<(), String> {
    let b = standalone_clause(arm);
    let mut s = Search::new(&b.p).map_err(|e| e.to_string())?;
    for k in 0..3 {
        let t = b.rects[k];
        s.restrict(b.arms[k], move |x| t.in_back_half(x));
    }
    match s.run(&LEMMA_CFG()).status {
        SolveStatus::Unsat => Ok(()),
        st => Err(format!("all arms in back halves gives {st:?}")),
    }
}

/// Clause part 2: any one arm at its front pixel, the others anywhere in
/// their back halves, and R0 has an orientation-preserving placement. The
/// rest of the gadget sits at centers.
pub fn clause_part2(arm: i64) -> Result<usize, String> {
    let b = standalone_clause(arm);
    let dc = rectnerve::dual::build_dual(&b.p).map_err(|e| e.to_string())?;
    let base = rectnerve::embed::center_projection(&b.p);
    let back: Vec<i64> = (arm + 1..2 * arm).collect();
    let mut checked = 0;
    for front in 0..3 {
        for &s1 in &back {
            for &s2 in &back {
                let mut proj = base.clone();
                let mut others = [s1, s2].into_iter();
                for k in 0..3 {
                    let s = if k == front { 1 } else { others.next().unwrap() };
                    proj.coords[b.arms[k]] = b.rects[k].point_from_front(s);
                }
                if clause_placement(&b.p, &dc, &proj, b.r0).is_none() {
                    return Err(format!("arm {front} in front, back positions {s1} {s2}: no placement"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

// ------------------------------------------------------------- reductions

pub const INSTANCES: [&str; 6] = ["xxx", "nnn", "xyz", "equiv", "fig3", "unsat"];

pub fn load_instance(name: &str) -> rectnerve::reduction::Grid3SatInstance {
    let path = format!("{}/tests/data/{name}.g3s", env!("CARGO_MANIFEST_DIR"));
    rectnerve::reduction::parse_grid3sat(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Reduce, solve, and compare with brute force; SAT certificates must
/// decode to satisfying assignments and every satisfying assignment must
/// build a verified embedding.
pub fn reduction_round_trip(name: &str) -> Result<String, String> {
    use rectnerve::reduction::*;
    use rectnerve::solver::verify_certificate;
    let inst = load_instance(name);
    let (p, g) = reduce(&inst, GadgetProfile::HALF_INTEGRAL).map_err(|e| e.to_string())?;
    let expected = inst.brute_force_sat().is_some();
    let r = solve_reduced(&p, &g, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let got = match r.status {
        SolveStatus::Sat => true,
        SolveStatus::Unsat => false,
        SolveStatus::Timeout => return Err(format!("{name}: solver budget exhausted")),
    };
    if got != expected {
        return Err(format!("{name}: solver says {got}, brute force says {expected}"));
    }
    if let Some(c) = &r.certificate {
        if !verify_certificate(&p, c).valid {
            return Err(format!("{name}: certificate fails verification"));
        }
        let a = assignment_from_projection(c, &g).map_err(|e| e.to_string())?;
        if !inst.satisfied_by(&a) {
            return Err(format!("{name}: decoded assignment does not satisfy the formula"));
        }
    }
    let k = inst.variables.len();
    let mut built = 0;
    for m in 0u32..1 << k {
        let a: Vec<bool> = (0..k).map(|i| m >> i & 1 == 1).collect();
        if inst.satisfied_by(&a) {
            let proj = projection_from_assignment(&a, &p, &g).map_err(|e| e.to_string())?;
            if !verify_certificate(&p, &proj).valid {
                return Err(format!("{name}: constructed embedding for {a:?} fails"));
            }
            built += 1;
        }
    }
    Ok(format!("{name}: {} boxes, {}, {} nodes, {built} constructions", p.len(), if got { "SAT" } else { "UNSAT" }, r.stats.nodes))
}

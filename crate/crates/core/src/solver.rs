//! Backtracking search for a half-integral faithful embedding.
//!
//! Variables are boxes, values are the half-integral points strictly inside
//! each box, and every top simplex contributes one constraint: its projected
//! orientation must equal the seed orientation.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::dual::{build_dual, DualComplex};
use crate::embed::{classify_projection, Projection, VerdictKind};
use crate::error::{Error, Result};
use crate::model::{IntBox, Partition};
use crate::orient::{orient2, orient3, orientation, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrder {
    SmallestDomain,
    FileOrder,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    pub variable_order: VarOrder,
    pub enumerate_all: bool,
    /// Cap on stored solutions when enumerating.
    pub max_solutions: usize,
    /// Prune with every simplex whose other vertices span few enough
    /// combinations, not just simplices with one open vertex.
    pub arc_consistency: bool,
    pub support_limit: usize,
    /// Branch on halves of a domain instead of on single values.
    pub bisect: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: 10_000_000,
            time_limit: None,
            variable_order: VarOrder::SmallestDomain,
            enumerate_all: false,
            max_solutions: 100_000,
            arc_consistency: true,
            support_limit: 10_000,
            bisect: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub propagations: u64,
    pub solutions: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub certificate: Option<Projection>,
    /// All solutions found when enumerating (up to the cap).
    pub solutions: Vec<Projection>,
    /// False when enumeration stopped at a limit.
    pub complete: bool,
    pub stats: SolveStats,
}

/// Half-integral interior points of a box, doubled, lexicographic.
pub fn domain_points(b: &IntBox) -> Vec<Vec<i64>> {
    let d = b.dim();
    let mut out = Vec::new();
    let mut cur: Vec<i64> = b.lo().iter().map(|x| 2 * x + 1).collect();
    loop {
        out.push(cur.clone());
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            cur[axis] += 1;
            if cur[axis] < 2 * b.hi()[axis] {
                break;
            }
            cur[axis] = 2 * b.lo()[axis] + 1;
        }
    }
}

/// Number of candidate positions, `prod(2 l_i - 1)`.
pub fn domain_size(b: &IntBox) -> u128 {
    b.sides().iter().map(|&l| (2 * l - 1) as u128).product()
}

struct Constraint {
    vars: Vec<usize>,
    sign: Sign,
}

/// A search problem whose domains can be narrowed before solving.
pub struct Search<'a> {
    partition: &'a Partition,
    dual: DualComplex,
    points: Vec<Vec<Vec<i64>>>,
    allowed: Vec<Vec<bool>>,
    constraints: Vec<Constraint>,
    incident: Vec<Vec<usize>>,
    /// Boxes to branch on first, each with a two-way split of its domain.
    priority: Vec<(usize, Vec<bool>)>,
}

impl<'a> Search<'a> {
    pub fn new(p: &'a Partition) -> Result<Self> {
        let dual = build_dual(p)?;
        Search::with_dual(p, dual)
    }

    pub fn with_dual(p: &'a Partition, dual: DualComplex) -> Result<Self> {
        if dual.num_top() == 0 {
            return Err(Error::Unsupported("no top-dimensional simplex".into()));
        }
        let points: Vec<Vec<Vec<i64>>> = p.boxes().iter().map(domain_points).collect();
        let allowed = points.iter().map(|v| vec![true; v.len()]).collect();
        let mut constraints = Vec::with_capacity(dual.num_top());
        let mut incident = vec![Vec::new(); p.len()];
        for (_, seed) in dual.top_simplices() {
            let c = constraints.len();
            for &v in &seed.boxes {
                incident[v].push(c);
            }
            constraints.push(Constraint {
                vars: seed.boxes.clone(),
                sign: seed.orientation(),
            });
        }
        Ok(Search {
            partition: p,
            dual,
            points,
            allowed,
            constraints,
            incident,
            priority: Vec::new(),
        })
    }

    pub fn dual(&self) -> &DualComplex {
        &self.dual
    }

    /// Current candidate points of a box.
    pub fn domain(&self, v: usize) -> Vec<Vec<i64>> {
        self.points[v]
            .iter()
            .zip(&self.allowed[v])
            .filter(|(_, &a)| a)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Keep only the candidates of box `v` accepted by `keep`.
    pub fn restrict(&mut self, v: usize, keep: impl Fn(&[i64]) -> bool) {
        for (i, p) in self.points[v].iter().enumerate() {
            if !keep(p) {
                self.allowed[v][i] = false;
            }
        }
    }

    /// Branch on box `v` before anything else, splitting its candidates by
    /// `side`. Hints are taken in the order given.
    pub fn branch_first(&mut self, v: usize, side: impl Fn(&[i64]) -> bool) {
        let split = self.points[v].iter().map(|p| side(p)).collect();
        self.priority.push((v, split));
    }

    pub fn run(&self, cfg: &SolverConfig) -> SolveResult {
        let mut st = State::new(self, cfg);
        let mut result = SolveResult {
            status: SolveStatus::Unsat,
            certificate: None,
            solutions: Vec::new(),
            complete: true,
            stats: SolveStats::default(),
        };
        let all: Vec<usize> = (0..self.constraints.len()).collect();
        let outcome = if st.wiped || !st.propagate(&all) {
            Flow::Continue
        } else {
            st.search(&mut result)
        };
        result.stats.nodes = st.nodes;
        result.stats.propagations = st.propagations;
        result.stats.solutions = st.found;
        if outcome == Flow::Limit {
            result.complete = false;
        }
        result.status = if st.found > 0 {
            SolveStatus::Sat
        } else if outcome == Flow::Limit {
            SolveStatus::Timeout
        } else {
            SolveStatus::Unsat
        };
        result
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Limit,
}

struct State<'s, 'a> {
    s: &'s Search<'a>,
    cfg: &'s SolverConfig,
    // sparse-set domains over value indices
    vals: Vec<Vec<u32>>,
    pos: Vec<Vec<u32>>,
    size: Vec<usize>,
    trail: Vec<(usize, usize)>,
    open: Vec<usize>,
    queued: Vec<bool>,
    nodes: u64,
    propagations: u64,
    found: u64,
    start: Instant,
    wiped: bool,
}

impl<'s, 'a> State<'s, 'a> {
    fn new(s: &'s Search<'a>, cfg: &'s SolverConfig) -> Self {
        let n = s.points.len();
        let mut vals = Vec::with_capacity(n);
        let mut pos = Vec::with_capacity(n);
        let mut size = Vec::with_capacity(n);
        let mut wiped = false;
        for v in 0..n {
            let mut keep: Vec<u32> = Vec::new();
            let mut drop: Vec<u32> = Vec::new();
            for (i, &a) in s.allowed[v].iter().enumerate() {
                if a {
                    keep.push(i as u32)
                } else {
                    drop.push(i as u32)
                }
            }
            wiped |= keep.is_empty();
            size.push(keep.len());
            keep.extend(drop);
            let mut p = vec![0u32; keep.len()];
            for (i, &x) in keep.iter().enumerate() {
                p[x as usize] = i as u32;
            }
            vals.push(keep);
            pos.push(p);
        }
        let open = (0..n).filter(|&v| size[v] > 1).collect();
        State {
            s,
            cfg,
            vals,
            pos,
            size,
            trail: Vec::new(),
            open,
            queued: vec![false; s.constraints.len()],
            nodes: 0,
            propagations: 0,
            found: 0,
            start: Instant::now(),
            wiped,
        }
    }

    fn remove(&mut self, v: usize, val: u32) {
        let i = self.pos[v][val as usize] as usize;
        let last = self.size[v] - 1;
        debug_assert!(i <= last);
        let other = self.vals[v][last];
        self.vals[v].swap(i, last);
        self.pos[v][other as usize] = i as u32;
        self.pos[v][val as usize] = last as u32;
        self.trail.push((v, self.size[v]));
        self.size[v] = last;
    }

    fn fix(&mut self, v: usize, val: u32) {
        let i = self.pos[v][val as usize] as usize;
        let other = self.vals[v][0];
        self.vals[v].swap(i, 0);
        self.pos[v][other as usize] = i as u32;
        self.pos[v][val as usize] = 0;
        self.trail.push((v, self.size[v]));
        self.size[v] = 1;
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, s) = self.trail.pop().unwrap();
            self.size[v] = s;
        }
    }

    fn point(&self, v: usize, val: u32) -> &[i64] {
        &self.s.points[v][val as usize]
    }

    fn sign_of(&self, pts: &[&[i64]]) -> Sign {
        match pts.len() {
            3 => orient2(
                [pts[0][0], pts[0][1]],
                [pts[1][0], pts[1][1]],
                [pts[2][0], pts[2][1]],
            ),
            4 => orient3(
                [pts[0][0], pts[0][1], pts[0][2]],
                [pts[1][0], pts[1][1], pts[1][2]],
                [pts[2][0], pts[2][1], pts[2][2]],
                [pts[3][0], pts[3][1], pts[3][2]],
            ),
            _ => orientation(pts).expect("consistent dimensions"),
        }
    }

    /// Whether some combination of the other vertices' values, with `x`
    /// fixed at `val`, realizes the required sign.
    fn supported(&self, c: usize, slot: usize, val: u32) -> bool {
        let con = &self.s.constraints[c];
        let k = con.vars.len();
        let mut idx = vec![0usize; k];
        let mut pts: Vec<&[i64]> = vec![&[]; k];
        pts[slot] = self.point(con.vars[slot], val);
        loop {
            for j in 0..k {
                if j != slot {
                    let v = con.vars[j];
                    pts[j] = self.point(v, self.vals[v][idx[j]]);
                }
            }
            if self.sign_of(&pts) == con.sign {
                return true;
            }
            let mut j = 0;
            loop {
                if j == k {
                    return false;
                }
                if j != slot {
                    idx[j] += 1;
                    if idx[j] < self.size[con.vars[j]] {
                        break;
                    }
                    idx[j] = 0;
                }
                j += 1;
            }
        }
    }

    /// Revise every vertex of a constraint; false on a wipeout.
    fn revise(&mut self, c: usize, changed: &mut Vec<usize>) -> bool {
        let k = self.s.constraints[c].vars.len();
        for slot in 0..k {
            let x = self.s.constraints[c].vars[slot];
            let mut others: u128 = 1;
            let mut open_others = 0;
            for (j, &v) in self.s.constraints[c].vars.iter().enumerate() {
                if j != slot {
                    others = others.saturating_mul(self.size[v] as u128);
                    if self.size[v] > 1 {
                        open_others += 1;
                    }
                }
            }
            let limit = if self.cfg.arc_consistency {
                self.cfg.support_limit as u128
            } else {
                1
            };
            if open_others > 0 && others > limit {
                continue;
            }
            let mut i = 0;
            let mut removed = false;
            while i < self.size[x] {
                let val = self.vals[x][i];
                self.propagations += 1;
                if self.supported(c, slot, val) {
                    i += 1;
                } else {
                    self.remove(x, val);
                    removed = true;
                }
            }
            if self.size[x] == 0 {
                return false;
            }
            if removed {
                changed.push(x);
            }
        }
        true
    }

    fn propagate(&mut self, seeds: &[usize]) -> bool {
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &c in seeds {
            if !self.queued[c] {
                self.queued[c] = true;
                queue.push_back(c);
            }
        }
        let mut changed = Vec::new();
        while let Some(c) = queue.pop_front() {
            self.queued[c] = false;
            changed.clear();
            if !self.revise(c, &mut changed) {
                for c in queue.drain(..) {
                    self.queued[c] = false;
                }
                return false;
            }
            for &v in &changed {
                for &c2 in &self.s.incident[v] {
                    if c2 != c && !self.queued[c2] {
                        self.queued[c2] = true;
                        queue.push_back(c2);
                    }
                }
            }
        }
        true
    }

    fn out_of_budget(&self) -> bool {
        if self.nodes >= self.cfg.node_limit {
            return true;
        }
        match self.cfg.time_limit {
            Some(t) if self.nodes.is_multiple_of(64) => self.start.elapsed() >= t,
            _ => false,
        }
    }

    fn pick(&self) -> Option<usize> {
        if let Some(&(v, _)) = self
            .s
            .priority
            .iter()
            .find(|(v, _)| self.hinted_split(*v).is_some())
        {
            return Some(v);
        }
        let candidates = self.open.iter().copied().filter(|&v| self.size[v] > 1);
        match self.cfg.variable_order {
            VarOrder::FileOrder => candidates.min(),
            VarOrder::SmallestDomain => candidates.min_by_key(|&v| (self.size[v], v)),
        }
    }

    fn record(&mut self, result: &mut SolveResult) -> Flow {
        let coords: Vec<Vec<i64>> = (0..self.vals.len())
            .map(|v| self.point(v, self.vals[v][0]).to_vec())
            .collect();
        let proj = Projection::new(coords);
        let check = classify_projection(self.s.partition, &self.s.dual, &proj)
            .map(|v| v.kind == VerdictKind::Embedding)
            .unwrap_or(false);
        assert!(
            check,
            "solver produced a projection that fails verification"
        );
        self.found += 1;
        if result.certificate.is_none() {
            result.certificate = Some(proj.clone());
        }
        if !self.cfg.enumerate_all {
            return Flow::Stop;
        }
        result.solutions.push(proj);
        if result.solutions.len() >= self.cfg.max_solutions {
            return Flow::Limit;
        }
        Flow::Continue
    }

    /// Hinted split of `x` when it still separates the live candidates.
    fn hinted_split(&self, x: usize) -> Option<&'s [bool]> {
        let (_, split) = self.s.priority.iter().find(|(v, _)| *v == x)?;
        let live = &self.vals[x][..self.size[x]];
        let first = live.iter().filter(|&&v| split[v as usize]).count();
        (first > 0 && first < live.len()).then_some(split.as_slice())
    }

    /// Search each group of candidates of `x` in turn.
    fn branch_groups(&mut self, x: usize, groups: [Vec<u32>; 2], result: &mut SolveResult) -> Flow {
        let outer = self.trail.len();
        for k in 0..2 {
            if self.out_of_budget() {
                return Flow::Limit;
            }
            self.nodes += 1;
            for &v in &groups[1 - k] {
                self.remove(x, v);
            }
            let cons = self.s.incident[x].clone();
            if self.propagate(&cons) {
                let f = self.search(result);
                if f != Flow::Continue {
                    self.undo(outer);
                    return f;
                }
            }
            self.undo(outer);
        }
        Flow::Continue
    }

    fn search(&mut self, result: &mut SolveResult) -> Flow {
        let Some(x) = self.pick() else {
            return self.record(result);
        };
        let mut values: Vec<u32> = self.vals[x][..self.size[x]].to_vec();
        values.sort_unstable();
        let outer = self.trail.len();
        if let Some(split) = self.hinted_split(x) {
            let (a, b): (Vec<u32>, Vec<u32>) = values.iter().partition(|&&v| split[v as usize]);
            return self.branch_groups(x, [a, b], result);
        }
        if self.cfg.bisect && values.len() > 2 {
            // lexicographic order: the lower half is the part with the
            // smaller first coordinate where it varies
            let (lo, hi) = values.split_at(values.len() / 2);
            return self.branch_groups(x, [lo.to_vec(), hi.to_vec()], result);
        }
        for val in values {
            if self.out_of_budget() {
                return Flow::Limit;
            }
            self.nodes += 1;
            let mark = self.trail.len();
            self.fix(x, val);
            let cons = self.s.incident[x].clone();
            if self.propagate(&cons) {
                let f = self.search(result);
                if f != Flow::Continue {
                    self.undo(outer);
                    return f;
                }
            }
            self.undo(mark);
            // refute the value at this level before trying the next one
            self.remove(x, val);
            let cons = self.s.incident[x].clone();
            if self.size[x] == 0 || !self.propagate(&cons) {
                break;
            }
        }
        self.undo(outer);
        Flow::Continue
    }
}

/// Solve with the partition's own dual complex.
pub fn solve(p: &Partition, cfg: &SolverConfig) -> Result<SolveResult> {
    Ok(Search::new(p)?.run(cfg))
}

/// Outcome of certificate verification, with the failure reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub reason: Option<String>,
}

pub fn verify_certificate(p: &Partition, proj: &Projection) -> Verification {
    let fail = |r: String| Verification {
        valid: false,
        reason: Some(r),
    };
    let dc = match build_dual(p) {
        Ok(dc) => dc,
        Err(e) => return fail(e.to_string()),
    };
    match classify_projection(p, &dc, proj) {
        Ok(v) if v.kind == VerdictKind::Embedding => Verification {
            valid: true,
            reason: None,
        },
        Ok(v) if v.kind == VerdictKind::Unsupported => fail("no top-dimensional simplex".into()),
        Ok(v) => fail(format!(
            "{} simplices change orientation, first {:?}",
            v.violations.len(),
            v.violations[0].0
        )),
        Err(e) => fail(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_partition;

    fn grid2() -> Partition {
        let boxes = (0..4).map(|i| IntBox::pixel(&[i % 2, i / 2])).collect();
        validate_partition(boxes, 2, 2).unwrap()
    }

    #[test]
    fn domain_counts() {
        let b = IntBox::from_interleaved(&[0, 1, 0, 4]).unwrap();
        assert_eq!(domain_points(&b).len(), 7);
        assert_eq!(domain_size(&b), 7);
        let b = IntBox::from_interleaved(&[0, 3, 0, 2, 1, 3]).unwrap();
        assert_eq!(domain_points(&b).len() as u128, domain_size(&b));
    }

    #[test]
    fn pixel_grid_is_forced() {
        let p = grid2();
        let r = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Sat);
        assert_eq!(r.certificate.unwrap(), crate::embed::center_projection(&p));
    }

    #[test]
    fn swapped_certificate_rejected() {
        let p = grid2();
        let mut proj = crate::embed::center_projection(&p);
        proj.coords.swap(0, 3);
        assert!(!verify_certificate(&p, &proj).valid);
        assert!(verify_certificate(&p, &crate::embed::center_projection(&p)).valid);
    }
}

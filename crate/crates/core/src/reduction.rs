//! grid3sat instances and their reduction to planar embedding.
//!
//! Every grid point of the instance becomes a square block of
//! `2^refinement_levels` cells. Variables get a clockwise L-cycle of four
//! thin rectangles, clauses a 7x7 clause rectangle with three arms, and each
//! path an L-path routed through the blocks of its grid points.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::counterexamples::fill_with_pixels;
use crate::dual::{build_dual, DualComplex};
use crate::embed::{center_projection, Projection};
use crate::error::{Error, Result};
use crate::gadget::{bulge, is_joint, joint_successor, Dir, ThinRect};
use crate::model::{IntBox, Partition};
use crate::orient::orientation;
use crate::solver::{domain_points, verify_certificate, Search, SolveResult, SolverConfig};

pub type Point = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSpec {
    pub id: usize,
    pub at: Point,
    pub paths: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpec {
    pub id: usize,
    pub var: usize,
    pub clause: usize,
    pub positive: bool,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid3SatInstance {
    pub n: i64,
    /// Grid point of each variable, indexed by id.
    pub variables: Vec<Point>,
    pub clauses: Vec<ClauseSpec>,
    pub paths: Vec<PathSpec>,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

fn ints(line: usize, toks: &[&str]) -> Result<Vec<i64>> {
    toks.iter()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| syntax(line, format!("expected integer, found {t:?}")))
        })
        .collect()
}

pub fn parse_grid3sat(text: &str) -> Result<Grid3SatInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
    let h = ints(hl, &header.split_whitespace().collect::<Vec<_>>())?;
    if h.len() != 4 || h.iter().any(|&v| v < 0) {
        return Err(syntax(hl, "header must be `N V C P`"));
    }
    let (n, nv, nc, np) = (h[0], h[1] as usize, h[2] as usize, h[3] as usize);
    let mut variables = vec![None; nv];
    let mut clauses: Vec<Option<ClauseSpec>> = vec![None; nc];
    let mut paths: Vec<Option<PathSpec>> = vec![None; np];
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let slot = |id: i64, len: usize| -> Result<usize> {
            if id < 0 || id as usize >= len {
                Err(syntax(ln, format!("id {id} out of range")))
            } else {
                Ok(id as usize)
            }
        };
        match toks[0] {
            "V" => {
                let v = ints(ln, &toks[1..])?;
                if v.len() != 3 {
                    return Err(syntax(ln, "variable line is `V id x y`"));
                }
                let id = slot(v[0], nv)?;
                variables[id] = Some((v[1], v[2]));
            }
            "C" => {
                let v = ints(ln, &toks[1..])?;
                let id = slot(
                    *v.first().ok_or_else(|| syntax(ln, "empty clause line"))?,
                    nc,
                )?;
                if v.len() != 6 {
                    return Err(Error::ClauseArity(id));
                }
                let ps = [slot(v[3], np)?, slot(v[4], np)?, slot(v[5], np)?];
                clauses[id] = Some(ClauseSpec {
                    id,
                    at: (v[1], v[2]),
                    paths: ps,
                });
            }
            "P" => {
                if toks.len() < 6 {
                    return Err(syntax(
                        ln,
                        "path line is `P id var clause sign k x1 y1 ...`",
                    ));
                }
                let head = ints(ln, &toks[1..4])?;
                let positive = match toks[4] {
                    "+" => true,
                    "-" => false,
                    s => return Err(syntax(ln, format!("sign must be + or -, found {s:?}"))),
                };
                let rest = ints(ln, &toks[5..])?;
                let k = rest[0];
                if k < 2 || rest.len() != 1 + 2 * k as usize {
                    return Err(syntax(ln, "path point count does not match"));
                }
                let id = slot(head[0], np)?;
                let points = rest[1..].chunks(2).map(|c| (c[0], c[1])).collect();
                paths[id] = Some(PathSpec {
                    id,
                    var: slot(head[1], nv)?,
                    clause: slot(head[2], nc)?,
                    positive,
                    points,
                });
            }
            t => return Err(syntax(ln, format!("unknown record {t:?}"))),
        }
    }
    let missing =
        |what: &str, i: usize| Error::InvalidInstance(format!("{what} {i} is never defined"));
    let inst = Grid3SatInstance {
        n,
        variables: variables
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| missing("variable", i)))
            .collect::<Result<_>>()?,
        clauses: clauses
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| missing("clause", i)))
            .collect::<Result<_>>()?,
        paths: paths
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| missing("path", i)))
            .collect::<Result<_>>()?,
    };
    inst.validate()?;
    Ok(inst)
}

impl Grid3SatInstance {
    /// Structural checks: grid edges, endpoints, disjointness, arity.
    pub fn validate(&self) -> Result<()> {
        let inside = |p: Point| p.0 >= 0 && p.1 >= 0 && p.0 < self.n && p.1 < self.n;
        let mut special: HashMap<Point, String> = HashMap::new();
        for (i, &v) in self.variables.iter().enumerate() {
            if !inside(v) || special.insert(v, format!("variable {i}")).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "variable {i} at {v:?} is outside or shared"
                )));
            }
        }
        for c in &self.clauses {
            if !inside(c.at) || special.insert(c.at, format!("clause {}", c.id)).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "clause {} at {:?} is outside or shared",
                    c.id, c.at
                )));
            }
        }
        let mut owner: HashMap<Point, usize> = HashMap::new();
        let mut edges: HashMap<(Point, Point), usize> = HashMap::new();
        for p in &self.paths {
            let bad = |m: &str| Error::InvalidInstance(format!("path {}: {m}", p.id));
            if p.points[0] != self.variables[p.var]
                || *p.points.last().unwrap() != self.clauses[p.clause].at
            {
                return Err(bad("must run from its variable to its clause"));
            }
            for w in p.points.windows(2) {
                if (w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs() != 1 || !inside(w[1]) {
                    return Err(bad("leaves the grid edges"));
                }
                let key = if w[0] < w[1] {
                    (w[0], w[1])
                } else {
                    (w[1], w[0])
                };
                if let Some(&q) = edges.get(&key) {
                    return Err(Error::DisjointnessViolation(q, p.id));
                }
                edges.insert(key, p.id);
            }
            for &pt in &p.points[1..p.points.len() - 1] {
                if special.contains_key(&pt) {
                    return Err(Error::DisjointnessViolation(p.id, p.id));
                }
                if let Some(&q) = owner.get(&pt) {
                    return Err(Error::DisjointnessViolation(q, p.id));
                }
                owner.insert(pt, p.id);
            }
        }
        for c in &self.clauses {
            let incident: Vec<usize> = self
                .paths
                .iter()
                .filter(|p| p.clause == c.id)
                .map(|p| p.id)
                .collect();
            let mut listed = c.paths.to_vec();
            listed.sort_unstable();
            if incident != listed || listed.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::ClauseArity(c.id));
            }
        }
        for v in 0..self.variables.len() {
            if self.paths.iter().filter(|p| p.var == v).count() > 4 {
                return Err(Error::InvalidInstance(format!(
                    "variable {v} has more than four paths"
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.n,
            self.variables.len(),
            self.clauses.len(),
            self.paths.len()
        );
        for (i, v) in self.variables.iter().enumerate() {
            let _ = writeln!(s, "V {i} {} {}", v.0, v.1);
        }
        for c in &self.clauses {
            let _ = writeln!(
                s,
                "C {} {} {} {} {} {}",
                c.id, c.at.0, c.at.1, c.paths[0], c.paths[1], c.paths[2]
            );
        }
        for p in &self.paths {
            let _ = write!(
                s,
                "P {} {} {} {} {}",
                p.id,
                p.var,
                p.clause,
                if p.positive { '+' } else { '-' },
                p.points.len()
            );
            for q in &p.points {
                let _ = write!(s, " {} {}", q.0, q.1);
            }
            s.push('\n');
        }
        s
    }

    pub fn literal(&self, path: usize, assignment: &[bool]) -> bool {
        let p = &self.paths[path];
        assignment[p.var] == p.positive
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.paths.iter().any(|&p| self.literal(p, assignment)))
    }

    /// Exhaustive search; the first satisfying assignment in binary order.
    pub fn brute_force_sat(&self) -> Option<Vec<bool>> {
        let k = self.variables.len();
        assert!(k < 24, "brute force limited to small formulas");
        (0u32..1 << k)
            .map(|m| (0..k).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.satisfied_by(a))
    }
}

/// Sizes of the gadgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetProfile {
    pub thin_min_length: i64,
    pub clause_arm_length: i64,
    pub refinement_levels: u32,
}

impl GadgetProfile {
    pub const HALF_INTEGRAL: GadgetProfile = GadgetProfile {
        thin_min_length: 4,
        clause_arm_length: 4,
        refinement_levels: 5,
    };
    pub const CONTINUOUS: GadgetProfile = GadgetProfile {
        thin_min_length: 8,
        clause_arm_length: 14,
        refinement_levels: 5,
    };

    pub fn scale(&self) -> i64 {
        1 << self.refinement_levels
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableGadget {
    pub var: usize,
    /// Box ids of the cycle rectangles, clockwise from the top one.
    pub boxes: [usize; 4],
    pub cycle: [ThinRect; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathGadget {
    pub path: usize,
    pub var: usize,
    pub clause: usize,
    pub positive: bool,
    /// Box ids and rectangles from the variable side to the clause arm.
    pub boxes: Vec<usize>,
    pub rects: Vec<ThinRect>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGadget {
    pub clause: usize,
    pub r0: usize,
    /// Paths ending in the arms at the bottom-west, top-west and south slots.
    pub arms: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetMap {
    pub scale: i64,
    pub variables: Vec<VariableGadget>,
    pub paths: Vec<PathGadget>,
    pub clauses: Vec<ClauseGadget>,
}

/// The clockwise variable cycle centred in a block whose lower-left cell is
/// `origin`; rectangles start with the top one heading east.
pub fn variable_cycle(origin: Point, scale: i64) -> [ThinRect; 4] {
    let c = scale / 2;
    let a = ThinRect::new((origin.0 + c - 4, origin.1 + c + 4), Dir::East, 8);
    let b = joint_successor(&a, Dir::South, 8);
    let cc = joint_successor(&b, Dir::West, 8);
    let d = joint_successor(&cc, Dir::North, 8);
    debug_assert!(is_joint(&d, &a));
    [a, b, cc, d]
}

/// Clause rectangle and its arms (bottom-west, upper-west, south) in a
/// block whose lower-left cell is `origin`.
pub fn clause_gadget(origin: Point, scale: i64, arm: i64) -> (IntBox, [ThinRect; 3]) {
    let off = (arm + 10).min(scale - 8);
    let (x0, y0) = (origin.0 + off, origin.1 + off);
    let r0 = IntBox::new(vec![x0, y0], vec![x0 + 7, y0 + 7]).unwrap();
    // Long west arms both in back pin the clause vertex low and high at
    // once unless they sit close together.
    let upper = if arm >= 8 { 3 } else { 6 };
    let arms = [
        ThinRect::new((x0 - arm, y0), Dir::East, arm),
        ThinRect::new((x0 - arm, y0 + upper), Dir::East, arm),
        ThinRect::new((x0, y0 - arm), Dir::North, arm),
    ];
    (r0, arms)
}

/// Grid direction of a unit step.
fn step_dir(a: Point, b: Point) -> Dir {
    match (b.0 - a.0, b.1 - a.1) {
        (1, 0) => Dir::East,
        (-1, 0) => Dir::West,
        (0, 1) => Dir::North,
        _ => Dir::South,
    }
}

const FREE: u32 = 0;

/// Cell ownership during routing: rectangle ids are stored plus one, and
/// bulge pixels are reserved separately.
struct Board {
    size: i64,
    occ: Vec<u32>,
    reserved: Vec<bool>,
    allowed: Vec<bool>,
}

impl Board {
    fn idx(&self, c: Point) -> Option<usize> {
        (c.0 >= 0 && c.1 >= 0 && c.0 < self.size && c.1 < self.size)
            .then(|| (c.1 * self.size + c.0) as usize)
    }

    fn occupant(&self, c: Point) -> Option<u32> {
        self.idx(c).map(|i| self.occ[i])
    }

    fn put(&mut self, r: &ThinRect, id: usize) {
        for c in r.cells() {
            let i = self.idx(c).unwrap();
            self.occ[i] = id as u32 + 1;
        }
    }

    fn clear(&mut self, r: &ThinRect) {
        for c in r.cells() {
            let i = self.idx(c).unwrap();
            self.occ[i] = FREE;
        }
    }

    fn set_reserved(&mut self, c: Point, on: bool) {
        let i = self.idx(c).unwrap();
        self.reserved[i] = on;
    }

    /// Whether `r` fits: inside the allowed region on free cells, touching
    /// only `partners` and the reserved cells in `own`.
    fn fits(&self, r: &ThinRect, partners: &[usize], own: &[Point]) -> bool {
        for c in r.cells() {
            match self.idx(c) {
                Some(i) if self.allowed[i] && self.occ[i] == FREE && !self.reserved[i] => {}
                _ => return false,
            }
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let n = (c.0 + dx, c.1 + dy);
                    let Some(i) = self.idx(n) else { continue };
                    let o = self.occ[i];
                    if o != FREE && !partners.contains(&(o as usize - 1)) {
                        return false;
                    }
                    if self.reserved[i] && !own.contains(&n) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// A bulge pixel must be free and touch nothing but the two joint
    /// rectangles.
    fn bulge_ok(&self, b: Point, pair: &[usize]) -> bool {
        match self.idx(b) {
            Some(i) if self.occ[i] == FREE && !self.reserved[i] => {}
            _ => return false,
        }
        for dx in -1..=1 {
            for dy in -1..=1 {
                let n = (b.0 + dx, b.1 + dy);
                // another bulge next door is fine: both stay pixels
                if let Some(o) = self.occupant(n) {
                    if o != FREE && !pair.contains(&(o as usize - 1)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Breadth-first search over chains of thin rectangles. States are the
/// front pixel and heading of the last rectangle; the first chain reaching
/// a state closes it.
struct Router<'a> {
    board: &'a mut Board,
    profile: GadgetProfile,
    target: ThinRect,
    target_id: usize,
    next_id: usize,
    budget: usize,
}

struct Node {
    rect: ThinRect,
    parent: Option<usize>,
}

impl Router<'_> {
    fn chain(nodes: &[Node], mut at: usize) -> Vec<ThinRect> {
        let mut out = vec![nodes[at].rect];
        while let Some(p) = nodes[at].parent {
            out.push(nodes[p].rect);
            at = p;
        }
        out.reverse();
        out
    }

    /// Place a chain with its bulges, all but the last one reserved.
    fn lay(&mut self, chain: &[ThinRect], on: bool) {
        for (k, r) in chain.iter().enumerate() {
            if on {
                self.board.put(r, self.next_id + k);
            } else {
                self.board.clear(r);
            }
            if k + 1 < chain.len() {
                self.board.set_reserved(bulge(r), on);
            }
        }
    }

    fn run(&mut self, starts: &[ThinRect]) -> Option<Vec<ThinRect>> {
        let mut nodes: Vec<Node> = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        let mut closed = HashSet::new();
        for &r in starts {
            if closed.insert((r.last(), r.dir)) {
                queue.push_back(nodes.len());
                nodes.push(Node {
                    rect: r,
                    parent: None,
                });
            }
        }
        while let Some(at) = queue.pop_front() {
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            let chain = Self::chain(&nodes, at);
            let prev = *chain.last().unwrap();
            let prev_id = self.next_id + chain.len() - 1;
            let b = bulge(&prev);
            self.lay(&chain, true);
            let mut found = false;
            if prev.dir.perpendicular(self.target.dir)
                && joint_successor(&prev, self.target.dir, self.target.len) == self.target
            {
                found = self.board.bulge_ok(b, &[prev_id, self.target_id]);
            } else if self.board.bulge_ok(b, &[prev_id]) {
                self.board.set_reserved(b, true);
                for d in Dir::ALL {
                    if !d.perpendicular(prev.dir) {
                        continue;
                    }
                    for len in self.profile.thin_min_length..=self.profile.thin_min_length + 8 {
                        let r = joint_successor(&prev, d, len);
                        if closed.contains(&(r.last(), r.dir)) {
                            continue;
                        }
                        let mut partners = vec![prev_id];
                        if is_joint(&r, &self.target) {
                            partners.push(self.target_id);
                        }
                        if self.board.fits(&r, &partners, &[b]) {
                            closed.insert((r.last(), r.dir));
                            queue.push_back(nodes.len());
                            nodes.push(Node {
                                rect: r,
                                parent: Some(at),
                            });
                        }
                    }
                }
                self.board.set_reserved(b, false);
            }
            self.lay(&chain, false);
            if found {
                return Some(chain);
            }
        }
        None
    }
}

/// Side of the variable cycle facing a grid direction.
fn side_of(d: Dir) -> usize {
    match d {
        Dir::North => 0,
        Dir::East => 1,
        Dir::South => 2,
        Dir::West => 3,
    }
}

/// Build the partition and its gadget map.
pub fn reduce(inst: &Grid3SatInstance, profile: GadgetProfile) -> Result<(Partition, GadgetMap)> {
    inst.validate()?;
    let s = profile.scale();
    let size = inst.n * s;
    let cells = (size * size) as usize;
    let mut board = Board {
        size,
        occ: vec![FREE; cells],
        reserved: vec![false; cells],
        allowed: vec![false; cells],
    };
    let mut rects: Vec<ThinRect> = Vec::new();
    let mut fixed_boxes: Vec<(usize, IntBox)> = Vec::new();

    let mut variables = Vec::new();
    for (v, &pt) in inst.variables.iter().enumerate() {
        let cyc = variable_cycle((pt.0 * s, pt.1 * s), s);
        let mut boxes = [0; 4];
        for (k, r) in cyc.iter().enumerate() {
            boxes[k] = rects.len();
            board.put(r, rects.len());
            rects.push(*r);
            board.set_reserved(bulge(r), true);
        }
        variables.push(VariableGadget {
            var: v,
            boxes,
            cycle: cyc,
        });
    }
    // the clause rectangle is not thin; keep its id after the arms
    let mut clause_parts = Vec::new();
    for c in &inst.clauses {
        let (r0, arms) = clause_gadget((c.at.0 * s, c.at.1 * s), s, profile.clause_arm_length);
        let mut arm_ids = [0; 3];
        for (k, a) in arms.iter().enumerate() {
            arm_ids[k] = rects.len();
            board.put(a, rects.len());
            rects.push(*a);
        }
        let r0_id = rects.len() + fixed_boxes.len() + 100_000_000;
        fixed_boxes.push((r0_id, r0.clone()));
        for x in r0.lo()[0]..r0.hi()[0] {
            for y in r0.lo()[1]..r0.hi()[1] {
                let i = board.idx((x, y)).unwrap();
                board.occ[i] = r0_id as u32 + 1;
            }
        }
        clause_parts.push((r0_id, arms, arm_ids));
    }

    let mut path_rects: Vec<Option<(Vec<usize>, Vec<ThinRect>)>> = vec![None; inst.paths.len()];
    let mut clause_arms = Vec::new();
    for (ci, c) in inst.clauses.iter().enumerate() {
        let (r0_id, arms, arm_ids) = clause_parts[ci];
        let mut done = None;
        // slot assignments, then the order in which the slots are routed
        let perms = crate::dual::permutations(3);
        let attempts = perms
            .iter()
            .flat_map(|p| perms.iter().map(move |o| (p.clone(), o.clone())));
        for (perm, order) in attempts {
            let snapshot = (board.occ.clone(), board.reserved.clone(), rects.len());
            let mut routed = Vec::new();
            let mut ok = true;
            for &slot in &order {
                let pid = c.paths[perm[slot]];
                match route_path(
                    &mut board,
                    &inst.paths[pid],
                    profile,
                    &variables,
                    &rects,
                    arms[slot],
                    arm_ids[slot],
                ) {
                    Some(rs) => {
                        let mut ids = Vec::new();
                        for r in &rs {
                            ids.push(rects.len());
                            rects.push(*r);
                        }
                        ids.push(arm_ids[slot]);
                        let mut all = rs.clone();
                        all.push(arms[slot]);
                        routed.push((pid, ids, all));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                done = Some((perm, routed));
                break;
            }
            board.occ = snapshot.0;
            board.reserved = snapshot.1;
            rects.truncate(snapshot.2);
        }
        let Some((perm, routed)) = done else {
            return Err(Error::RoutingFailure(format!(
                "clause {} at {:?}",
                c.id, c.at
            )));
        };
        let mut arm_paths = [0; 3];
        for (slot, &k) in perm.iter().enumerate() {
            arm_paths[slot] = c.paths[k];
        }
        for (pid, ids, all) in routed {
            path_rects[pid] = Some((ids, all));
        }
        clause_arms.push((r0_id, arm_paths));
    }

    // assemble: thin rectangles first, then clause rectangles, then pixels
    let mut boxes: Vec<IntBox> = rects.iter().map(ThinRect::to_box).collect();
    let mut r0_index = HashMap::new();
    for (tmp, b) in fixed_boxes {
        r0_index.insert(tmp, boxes.len());
        boxes.push(b);
    }
    let partition = fill_with_pixels(boxes, 2, size)?;
    let paths = inst
        .paths
        .iter()
        .map(|p| {
            let (ids, rs) = path_rects[p.id]
                .clone()
                .expect("every path belongs to a clause");
            PathGadget {
                path: p.id,
                var: p.var,
                clause: p.clause,
                positive: p.positive,
                boxes: ids,
                rects: rs,
            }
        })
        .collect();
    let clauses = inst
        .clauses
        .iter()
        .zip(clause_arms)
        .map(|(c, (tmp, arms))| ClauseGadget {
            clause: c.id,
            r0: r0_index[&tmp],
            arms,
        })
        .collect();
    Ok((
        partition,
        GadgetMap {
            scale: s,
            variables,
            paths,
            clauses,
        },
    ))
}

#[allow(clippy::too_many_arguments)]
fn route_path(
    board: &mut Board,
    path: &PathSpec,
    profile: GadgetProfile,
    variables: &[VariableGadget],
    rects: &[ThinRect],
    arm: ThinRect,
    arm_id: usize,
) -> Option<Vec<ThinRect>> {
    let s = profile.scale();
    // allowed region: the inner cells of every block on the path, joined
    // across the borders between consecutive blocks
    let mut region = Vec::new();
    for w in path.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let lo = (a.0.min(b.0) * s + 1, a.1.min(b.1) * s + 1);
        let hi = ((a.0.max(b.0) + 1) * s - 2, (a.1.max(b.1) + 1) * s - 2);
        region.push((lo, hi));
    }
    for &(lo, hi) in &region {
        for x in lo.0..=hi.0 {
            for y in lo.1..=hi.1 {
                let i = board.idx((x, y)).unwrap();
                board.allowed[i] = true;
            }
        }
    }
    let var = &variables[path.var];
    let side = side_of(step_dir(path.points[0], path.points[1]));
    let cyc = var.cycle[side];
    let cyc_id = var.boxes[side];
    let out_dir = step_dir(path.points[0], path.points[1]);
    let prev_cycle = var.boxes[(side + 3) % 4];
    let (pred, partners, own) = if path.positive {
        (cyc, vec![cyc_id], vec![bulge(&cyc)])
    } else {
        let rev = cyc.reversed();
        (
            rev,
            vec![cyc_id, prev_cycle],
            vec![bulge(&var.cycle[(side + 3) % 4])],
        )
    };
    let next_id = rects.len();
    let starts: Vec<ThinRect> = (profile.thin_min_length..=profile.thin_min_length + 8)
        .map(|l| joint_successor(&pred, out_dir, l))
        .filter(|r| board.fits(r, &partners, &own))
        .collect();
    let mut router = Router {
        board,
        profile,
        target: arm,
        target_id: arm_id,
        next_id,
        budget: 400_000,
    };
    let result = router.run(&starts);
    if let Some(chain) = &result {
        router.lay(chain, true);
        board.set_reserved(bulge(chain.last().unwrap()), true);
    }
    for &(lo, hi) in &region {
        for x in lo.0..=hi.0 {
            for y in lo.1..=hi.1 {
                let i = board.idx((x, y)).unwrap();
                board.allowed[i] = false;
            }
        }
    }
    result
}

/// Variable `X` is true iff no cycle vertex sits in the back half.
pub fn assignment_from_projection(proj: &Projection, gmap: &GadgetMap) -> Result<Vec<bool>> {
    let mut out = vec![false; gmap.variables.len()];
    for g in &gmap.variables {
        let backs: Vec<bool> = g
            .boxes
            .iter()
            .zip(&g.cycle)
            .map(|(&b, r)| r.in_back_half(&proj.coords[b]))
            .collect();
        if backs.iter().all(|&x| x) {
            out[g.var] = false;
        } else if backs.iter().all(|&x| !x) {
            out[g.var] = true;
        } else {
            return Err(Error::InconsistentCycle(g.var));
        }
    }
    Ok(out)
}

/// Cycle and path vertices at their front or back pixels, clause rectangles
/// at the first placement keeping their triangles, everything else at its
/// center.
pub fn projection_from_assignment(
    assignment: &[bool],
    p: &Partition,
    gmap: &GadgetMap,
) -> Result<Projection> {
    for c in &gmap.clauses {
        if !c
            .arms
            .iter()
            .any(|&pid| assignment[gmap.paths[pid].var] == gmap.paths[pid].positive)
        {
            return Err(Error::UnsatisfiedClause(c.clause));
        }
    }
    let mut proj = center_projection(p);
    let place = |proj: &mut Projection, b: usize, r: &ThinRect, front: bool| {
        let s2 = if front { 1 } else { 2 * r.len - 1 };
        proj.coords[b] = r.point_from_front(s2);
    };
    for g in &gmap.variables {
        for (&b, r) in g.boxes.iter().zip(&g.cycle) {
            place(&mut proj, b, r, assignment[g.var]);
        }
    }
    for path in &gmap.paths {
        let lit = assignment[path.var] == path.positive;
        for (&b, r) in path.boxes.iter().zip(&path.rects) {
            place(&mut proj, b, r, lit);
        }
    }
    let dc = build_dual(p)?;
    for c in &gmap.clauses {
        let spot =
            clause_placement(p, &dc, &proj, c.r0).ok_or(Error::UnsatisfiedClause(c.clause))?;
        proj.coords[c.r0] = spot;
    }
    Ok(proj)
}

/// First domain point of `v` keeping every triangle at `v` oriented.
pub fn clause_placement(
    p: &Partition,
    dc: &DualComplex,
    proj: &Projection,
    v: usize,
) -> Option<Vec<i64>> {
    let tris: Vec<(&Vec<usize>, _)> = dc
        .top_simplices()
        .filter(|(s, _)| s.contains(&v))
        .map(|(_, seed)| (&seed.boxes, seed.orientation()))
        .collect();
    domain_points(&p.boxes()[v]).into_iter().find(|cand| {
        tris.iter().all(|&(t, sg)| {
            let pts: Vec<&[i64]> = t
                .iter()
                .map(|&b| {
                    if b == v {
                        cand.as_slice()
                    } else {
                        proj.coords[b].as_slice()
                    }
                })
                .collect();
            orientation(&pts).map(|o| o == sg).unwrap_or(false)
        })
    })
}

/// Solve a reduced partition, deciding the variable cycles first: once
/// every cycle sits in one half, propagation settles the clauses.
pub fn solve_reduced(p: &Partition, gmap: &GadgetMap, cfg: &SolverConfig) -> Result<SolveResult> {
    let mut search = Search::new(p)?;
    for g in &gmap.variables {
        let top = g.cycle[0];
        search.branch_first(g.boxes[0], move |pt| !top.in_back_half(pt));
    }
    Ok(search.run(cfg))
}

/// Round trip helper: the projection built from a satisfying assignment
/// must be an embedding.
pub fn check_construction(assignment: &[bool], p: &Partition, gmap: &GadgetMap) -> Result<bool> {
    let proj = projection_from_assignment(assignment, p, gmap)?;
    Ok(verify_certificate(p, &proj).valid)
}

fn dir_parse(line: usize, s: &str) -> Result<Dir> {
    let mut ch = s.chars();
    match (ch.next().and_then(Dir::from_letter), ch.next()) {
        (Some(d), None) => Ok(d),
        _ => Err(syntax(line, format!("bad direction {s:?}"))),
    }
}

impl GadgetMap {
    /// Line format: `M scale`, then `V var box x y dir len` per cycle
    /// rectangle, `P path var clause sign k` followed by `R box x y dir len`
    /// per rectangle, and `C clause r0 p1 p2 p3`.
    pub fn to_text(&self) -> String {
        let mut s = format!("M {}\n", self.scale);
        for g in &self.variables {
            for (b, r) in g.boxes.iter().zip(&g.cycle) {
                let _ = writeln!(
                    s,
                    "V {} {} {} {} {} {}",
                    g.var,
                    b,
                    r.first.0,
                    r.first.1,
                    r.dir.letter(),
                    r.len
                );
            }
        }
        for p in &self.paths {
            let sign = if p.positive { '+' } else { '-' };
            let _ = writeln!(
                s,
                "P {} {} {} {} {}",
                p.path,
                p.var,
                p.clause,
                sign,
                p.rects.len()
            );
            for (b, r) in p.boxes.iter().zip(&p.rects) {
                let _ = writeln!(
                    s,
                    "R {} {} {} {} {}",
                    b,
                    r.first.0,
                    r.first.1,
                    r.dir.letter(),
                    r.len
                );
            }
        }
        for c in &self.clauses {
            let _ = writeln!(
                s,
                "C {} {} {} {} {}",
                c.clause, c.r0, c.arms[0], c.arms[1], c.arms[2]
            );
        }
        s
    }

    pub fn parse(text: &str) -> Result<GadgetMap> {
        let mut map = GadgetMap {
            scale: 0,
            variables: Vec::new(),
            paths: Vec::new(),
            clauses: Vec::new(),
        };
        let mut pending: Vec<(usize, usize, ThinRect)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let num = |k: usize| -> Result<i64> {
                toks.get(k)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(ln, "missing or bad integer"))
            };
            match toks[0] {
                "M" => map.scale = num(1)?,
                "V" => {
                    let r = ThinRect::new(
                        (num(3)?, num(4)?),
                        dir_parse(ln, toks.get(5).copied().unwrap_or(""))?,
                        num(6)?,
                    );
                    pending.push((num(1)? as usize, num(2)? as usize, r));
                }
                "P" => {
                    let positive = match toks.get(4) {
                        Some(&"+") => true,
                        Some(&"-") => false,
                        _ => return Err(syntax(ln, "bad sign")),
                    };
                    map.paths.push(PathGadget {
                        path: num(1)? as usize,
                        var: num(2)? as usize,
                        clause: num(3)? as usize,
                        positive,
                        boxes: Vec::new(),
                        rects: Vec::new(),
                    });
                }
                "R" => {
                    let r = ThinRect::new(
                        (num(2)?, num(3)?),
                        dir_parse(ln, toks.get(4).copied().unwrap_or(""))?,
                        num(5)?,
                    );
                    let p = map
                        .paths
                        .last_mut()
                        .ok_or_else(|| syntax(ln, "rectangle before any path"))?;
                    p.boxes.push(num(1)? as usize);
                    p.rects.push(r);
                }
                "C" => map.clauses.push(ClauseGadget {
                    clause: num(1)? as usize,
                    r0: num(2)? as usize,
                    arms: [num(3)? as usize, num(4)? as usize, num(5)? as usize],
                }),
                t => return Err(syntax(ln, format!("unknown record {t:?}"))),
            }
        }
        for chunk in pending.chunks(4) {
            if chunk.len() != 4 || chunk.iter().any(|c| c.0 != chunk[0].0) {
                return Err(syntax(0, "variable cycles need four consecutive V lines"));
            }
            map.variables.push(VariableGadget {
                var: chunk[0].0,
                boxes: [chunk[0].1, chunk[1].1, chunk[2].1, chunk[3].1],
                cycle: [chunk[0].2, chunk[1].2, chunk[2].2, chunk[3].2],
            });
        }
        Ok(map)
    }

    /// Every mapped id names a box of `p` with the recorded geometry, and
    /// consecutive path rectangles form L-joints.
    pub fn consistent_with(&self, p: &Partition) -> bool {
        let same = |b: usize, r: &ThinRect| p.boxes().get(b) == Some(&r.to_box());
        self.variables
            .iter()
            .all(|g| g.boxes.iter().zip(&g.cycle).all(|(&b, r)| same(b, r)))
            && self.paths.iter().all(|q| {
                q.boxes.iter().zip(&q.rects).all(|(&b, r)| same(b, r))
                    && q.rects.windows(2).all(|w| is_joint(&w[0], &w[1]))
            })
            && self
                .clauses
                .iter()
                .all(|c| p.boxes().get(c.r0).is_some_and(|b| b.sides() == vec![7, 7]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XXX: &str = "5 1 1 3\nV 0 1 2\nC 0 3 2 0 1 2\nP 0 0 0 + 3 1 2 2 2 3 2\nP 1 0 0 + 5 1 2 1 3 2 3 3 3 3 2\nP 2 0 0 + 5 1 2 1 1 2 1 3 1 3 2\n";

    #[test]
    fn parse_and_print() {
        let inst = parse_grid3sat(XXX).unwrap();
        assert_eq!(
            (inst.variables.len(), inst.clauses.len(), inst.paths.len()),
            (1, 1, 3)
        );
        assert_eq!(parse_grid3sat(&inst.to_text()).unwrap(), inst);
        assert_eq!(inst.brute_force_sat(), Some(vec![true]));
    }

    #[test]
    fn shared_point_rejected() {
        let bad = XXX.replace(
            "P 2 0 0 + 5 1 2 1 1 2 1 3 1 3 2",
            "P 2 0 0 + 5 1 2 1 3 2 3 3 3 3 2",
        );
        assert!(matches!(
            parse_grid3sat(&bad),
            Err(Error::DisjointnessViolation(..))
        ));
        let two = XXX.replace("C 0 3 2 0 1 2", "C 0 3 2 0 1");
        assert!(matches!(parse_grid3sat(&two), Err(Error::ClauseArity(0))));
        assert!(matches!(
            parse_grid3sat("5 1 1 3\nV 0 x 2\n"),
            Err(Error::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn cycle_geometry() {
        let c = variable_cycle((0, 0), 32);
        assert_eq!(c[0].first, (12, 20));
        assert!(c.windows(2).all(|w| is_joint(&w[0], &w[1])) && is_joint(&c[3], &c[0]));
        let (r0, arms) = clause_gadget((0, 0), 32, 4);
        assert_eq!(r0.lo(), &[14, 14]);
        assert_eq!(arms[2].last(), (14, 13));
    }
}

//! Integral boxes, partitions of a cube, and balance measurements.

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::dual::DualComplex;
use crate::error::{Error, Result};

/// Axis-aligned box with integer corners and nonempty interior.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IntBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidBox(format!(
                "corner lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] >= hi[i]) {
            return Err(Error::InvalidBox(format!("empty extent along axis {i}")));
        }
        Ok(IntBox { lo, hi })
    }

    /// Box from interleaved `lo_1 hi_1 ... lo_d hi_d`, the file layout.
    pub fn from_interleaved(v: &[i64]) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::InvalidBox("odd number of coordinates".into()));
        }
        let lo = v.iter().step_by(2).copied().collect();
        let hi = v.iter().skip(1).step_by(2).copied().collect();
        IntBox::new(lo, hi)
    }

    /// The unit cube with lower corner `cell`.
    pub fn pixel(cell: &[i64]) -> Self {
        IntBox {
            lo: cell.to_vec(),
            hi: cell.iter().map(|x| x + 1).collect(),
        }
    }

    pub fn cube(lo: &[i64], side: i64) -> Result<Self> {
        IntBox::new(lo.to_vec(), lo.iter().map(|x| x + side).collect())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn side(&self, axis: usize) -> i64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn sides(&self) -> Vec<i64> {
        (0..self.dim()).map(|i| self.side(i)).collect()
    }

    pub fn volume(&self) -> i128 {
        self.sides().iter().map(|&s| s as i128).product()
    }

    pub fn is_pixel(&self) -> bool {
        self.sides().iter().all(|&s| s == 1)
    }

    pub fn is_square(&self) -> bool {
        let s = self.sides();
        s.iter().all(|&x| x == s[0])
    }

    /// Center with doubled coordinates, so it is always integral.
    pub fn center_doubled(&self) -> Vec<i64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| a + b).collect()
    }

    /// Whether the unit cell with lower corner `cell` lies inside.
    pub fn contains_cell(&self, cell: &[i64]) -> bool {
        cell.iter()
            .enumerate()
            .all(|(i, &c)| self.lo[i] <= c && c < self.hi[i])
    }

    pub fn contains_box(&self, other: &IntBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Whether a doubled-coordinate point is strictly inside.
    pub fn strictly_contains_doubled(&self, p: &[i64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, &c)| 2 * self.lo[i] < c && c < 2 * self.hi[i])
    }

    pub fn interiors_intersect(&self, other: &IntBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }

    pub fn closed_contains_point(&self, p: &[i64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, &c)| self.lo[i] <= c && c <= self.hi[i])
    }

    pub fn translated(&self, v: &[i64]) -> IntBox {
        IntBox {
            lo: self.lo.iter().zip(v).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(v).map(|(a, b)| a + b).collect(),
        }
    }

    /// Aspect ratio, longest side over shortest.
    pub fn aspect(&self) -> Ratio<i64> {
        let s = self.sides();
        Ratio::new(*s.iter().max().unwrap(), *s.iter().min().unwrap())
    }

    /// `lo_1 hi_1 ... lo_d hi_d`.
    pub fn interleaved(&self) -> Vec<i64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .flat_map(|(a, b)| [*a, *b])
            .collect()
    }
}

/// A unit cell together with its center.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pixel {
    pub cell: Vec<i64>,
}

impl Pixel {
    pub fn new(cell: Vec<i64>) -> Self {
        Pixel { cell }
    }

    pub fn center_doubled(&self) -> Vec<i64> {
        self.cell.iter().map(|c| 2 * c + 1).collect()
    }
}

/// Validated collection of boxes tiling a domain box. For everything built
/// from files or generators the domain is the cube `[0, n]^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    domain: IntBox,
    boxes: Vec<IntBox>,
    partial: bool,
}

impl Partition {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &IntBox {
        &self.domain
    }

    /// Side length `n` of the outer cube, if the domain is `[0, n]^d`.
    pub fn outer(&self) -> Option<i64> {
        let n = self.domain.side(0);
        let cubic = self.domain.is_square() && self.domain.lo().iter().all(|&x| x == 0);
        cubic.then_some(n)
    }

    pub fn boxes(&self) -> &[IntBox] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    pub fn into_boxes(self) -> Vec<IntBox> {
        self.boxes
    }

    /// Dense lookup from unit cells to box indices.
    pub fn cell_map(&self) -> CellMap {
        CellMap::new(self)
    }
}

/// `validate_partition` for the cube `[0, n]^d`.
pub fn validate_partition(boxes: Vec<IntBox>, d: usize, n: i64) -> Result<Partition> {
    validate_in(boxes, cube_domain(d, n)?, false)
}

/// Like [`validate_partition`] but skips the coverage check and marks the
/// result partial.
pub fn validate_partial(boxes: Vec<IntBox>, d: usize, n: i64) -> Result<Partition> {
    validate_in(boxes, cube_domain(d, n)?, true)
}

fn cube_domain(d: usize, n: i64) -> Result<IntBox> {
    if d == 0 || n < 1 {
        return Err(Error::InvalidBox(format!(
            "domain needs d >= 1 and n >= 1, got d={d}, n={n}"
        )));
    }
    IntBox::new(vec![0; d], vec![n; d])
}

/// Validation against an arbitrary domain box.
pub fn validate_in(boxes: Vec<IntBox>, domain: IntBox, partial: bool) -> Result<Partition> {
    let d = domain.dim();
    for (i, b) in boxes.iter().enumerate() {
        if b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            });
        }
        if !domain.contains_box(b) {
            return Err(Error::OutOfBounds(i));
        }
    }
    if let Some((i, j)) = sweep_overlap(&boxes) {
        return Err(Error::Overlap(i, j));
    }
    if !partial {
        let covered: i128 = boxes.iter().map(IntBox::volume).sum();
        let missing = domain.volume() - covered;
        if missing != 0 {
            return Err(Error::CoverageGap(missing));
        }
    }
    Ok(Partition {
        domain,
        boxes,
        partial,
    })
}

/// First overlapping pair found by sweeping along axis 0. Boxes are visited in
/// order of their lower x-coordinate; only boxes whose x-extent still covers
/// the sweep position are compared.
pub fn sweep_overlap(boxes: &[IntBox]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&i| (boxes[i].lo[0], i));
    let mut active: Vec<usize> = Vec::new();
    let mut hits: Vec<(usize, usize)> = Vec::new();
    for &i in &order {
        let x = boxes[i].lo[0];
        active.retain(|&j| boxes[j].hi[0] > x);
        for &j in &active {
            if boxes[i].interiors_intersect(&boxes[j]) {
                hits.push((i.min(j), i.max(j)));
            }
        }
        if !hits.is_empty() {
            return hits.into_iter().min();
        }
        active.push(i);
    }
    None
}

/// Quadratic reference used to cross-check the sweep.
pub fn all_pairs_overlap(boxes: &[IntBox]) -> Option<(usize, usize)> {
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].interiors_intersect(&boxes[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Row-major table of box indices, one entry per unit cell of the domain.
#[derive(Debug, Clone)]
pub struct CellMap {
    lo: Vec<i64>,
    extent: Vec<i64>,
    ids: Vec<u32>,
}

pub const NO_BOX: u32 = u32::MAX;

impl CellMap {
    fn new(p: &Partition) -> Self {
        let lo = p.domain.lo().to_vec();
        let extent = p.domain.sides();
        let total: i64 = extent.iter().product();
        let mut map = CellMap {
            lo,
            extent,
            ids: vec![NO_BOX; total as usize],
        };
        for (k, b) in p.boxes.iter().enumerate() {
            map.paint(b, k as u32);
        }
        map
    }

    fn paint(&mut self, b: &IntBox, id: u32) {
        let d = b.dim();
        let mut cell = b.lo().to_vec();
        loop {
            let idx = self.index(&cell).expect("box inside domain");
            self.ids[idx] = id;
            let mut axis = 0;
            loop {
                if axis == d {
                    return;
                }
                cell[axis] += 1;
                if cell[axis] < b.hi()[axis] {
                    break;
                }
                cell[axis] = b.lo()[axis];
                axis += 1;
            }
        }
    }

    fn index(&self, cell: &[i64]) -> Option<usize> {
        let mut idx = 0i64;
        for i in (0..cell.len()).rev() {
            let c = cell[i] - self.lo[i];
            if c < 0 || c >= self.extent[i] {
                return None;
            }
            idx = idx * self.extent[i] + c;
        }
        Some(idx as usize)
    }

    /// Box containing the unit cell, if the cell is in the domain and covered.
    pub fn get(&self, cell: &[i64]) -> Option<usize> {
        let id = self.ids[self.index(cell)?];
        (id != NO_BOX).then_some(id as usize)
    }
}

/// Whether at most `d + 1` closed boxes meet at every grid point; otherwise
/// the lexicographically first offending point.
pub fn is_generic(p: &Partition) -> (bool, Option<Vec<i64>>) {
    let d = p.dim();
    let map = p.cell_map();
    let lo = p.domain.lo().to_vec();
    let hi = p.domain.hi().to_vec();
    let mut w = lo.clone();
    let mut seen = BTreeSet::new();
    loop {
        seen.clear();
        for mask in 0..(1usize << d) {
            let cell: Vec<i64> = (0..d)
                .map(|i| w[i] - 1 + ((mask >> i) & 1) as i64)
                .collect();
            if let Some(b) = map.get(&cell) {
                seen.insert(b);
            }
        }
        if seen.len() > d + 1 {
            return (false, Some(w));
        }
        // lexicographic increment, first coordinate most significant
        let mut axis = d;
        loop {
            if axis == 0 {
                return (true, None);
            }
            axis -= 1;
            w[axis] += 1;
            if w[axis] <= hi[axis] {
                break;
            }
            w[axis] = lo[axis];
        }
    }
}

/// Balance of a set of boxes together with the boxes realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceReport {
    pub value: Ratio<i64>,
    pub witness: Vec<usize>,
}

/// Longest side over shortest side across every box in the set.
pub fn balance_of_set(boxes: &[IntBox]) -> Ratio<i64> {
    assert!(!boxes.is_empty(), "balance of an empty set");
    let sides = boxes.iter().flat_map(IntBox::sides);
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for s in sides {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ratio::new(hi, lo)
}

/// Maximum balance over the edges of the dual complex. A complex without
/// edges falls back to the worst single box.
pub fn partition_balance(p: &Partition, dc: &DualComplex) -> BalanceReport {
    let mut best: Option<BalanceReport> = None;
    for e in dc.simplices(1) {
        let v = balance_of_set(&[p.boxes[e[0]].clone(), p.boxes[e[1]].clone()]);
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(BalanceReport {
                value: v,
                witness: e.clone(),
            });
        }
    }
    best.unwrap_or_else(|| {
        let (i, b) = p
            .boxes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.aspect().cmp(&b.1.aspect()).then(b.0.cmp(&a.0)))
            .expect("partition has a box");
        BalanceReport {
            value: b.aspect(),
            witness: vec![i],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(v: &[i64]) -> IntBox {
        IntBox::from_interleaved(v).unwrap()
    }

    fn grid2() -> Vec<IntBox> {
        vec![
            bx(&[0, 1, 0, 1]),
            bx(&[1, 2, 0, 1]),
            bx(&[0, 1, 1, 2]),
            bx(&[1, 2, 1, 2]),
        ]
    }

    #[test]
    fn single_pixel_validates() {
        let p = validate_partition(vec![bx(&[0, 1, 0, 1])], 2, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.outer(), Some(1));
    }

    #[test]
    fn pixel_grid_validates() {
        assert!(validate_partition(grid2(), 2, 2).is_ok());
    }

    #[test]
    fn overlap_detected() {
        let r = validate_partition(vec![bx(&[0, 2, 0, 1]), bx(&[0, 1, 0, 2])], 2, 2);
        assert_eq!(r, Err(Error::Overlap(0, 1)));
    }

    #[test]
    fn gap_and_bounds() {
        let r = validate_partition(vec![bx(&[0, 1, 0, 1])], 2, 2);
        assert_eq!(r, Err(Error::CoverageGap(3)));
        let r = validate_partition(vec![bx(&[0, 3, 0, 1])], 2, 2);
        assert_eq!(r, Err(Error::OutOfBounds(0)));
        let r = validate_partial(vec![bx(&[0, 1, 0, 1])], 2, 2).unwrap();
        assert!(r.is_partial());
    }

    #[test]
    fn genericity() {
        let p = validate_partition(grid2(), 2, 2).unwrap();
        assert_eq!(is_generic(&p), (false, Some(vec![1, 1])));
        let p = validate_partition(vec![bx(&[0, 2, 0, 1]), bx(&[0, 2, 1, 2])], 2, 2).unwrap();
        assert_eq!(is_generic(&p), (true, None));
        let p = validate_partition(
            vec![bx(&[0, 1, 0, 2]), bx(&[1, 2, 0, 1]), bx(&[1, 2, 1, 2])],
            2,
            2,
        )
        .unwrap();
        assert!(is_generic(&p).0);
    }

    #[test]
    fn set_balance() {
        assert_eq!(balance_of_set(&[bx(&[0, 3, 0, 1])]), Ratio::from_integer(3));
        assert_eq!(balance_of_set(&grid2()), Ratio::from_integer(1));
        let b = 5;
        let set = [bx(&[0, b, 0, b]), bx(&[0, b, 0, b + 2])];
        assert_eq!(balance_of_set(&set), Ratio::new(b + 2, b));
    }

    #[test]
    fn centers_are_doubled() {
        assert_eq!(bx(&[0, 3, 0, 1]).center_doubled(), vec![3, 1]);
        assert_eq!(Pixel::new(vec![2, 5]).center_doubled(), vec![5, 11]);
    }
}

//! Dual complex of a partition via the diagonal-distortion nerve.
//!
//! Distorting every box towards the main diagonal turns the pixel grid's
//! Delaunay structure into the Kuhn triangulation: around a grid vertex `w`
//! the top simplices are the monotone chains of pixels from the all-negative
//! one to the all-positive one. Each chain is mapped to boxes; the distinct
//! boxes of a chain form a simplex.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::Partition;
use crate::orient::Sign;

/// Kuhn chain of `d + 1` pixels around a grid vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedChain {
    pub anchor: Vec<i64>,
    /// Axis order of the unit steps, 0-based.
    pub order: Vec<usize>,
    /// Lower corners of the pixels `u_0 .. u_d`.
    pub pixels: Vec<Vec<i64>>,
    /// Box containing each pixel, in chain order.
    pub boxes: Vec<usize>,
}

impl SeedChain {
    fn new(anchor: Vec<i64>, order: Vec<usize>) -> Self {
        let mut cell: Vec<i64> = anchor.iter().map(|x| x - 1).collect();
        let mut pixels = vec![cell.clone()];
        for &k in &order {
            cell[k] += 1;
            pixels.push(cell.clone());
        }
        SeedChain {
            anchor,
            order,
            pixels,
            boxes: Vec::new(),
        }
    }

    /// Doubled pixel centers in chain order.
    pub fn centers_doubled(&self) -> Vec<Vec<i64>> {
        self.pixels
            .iter()
            .map(|c| c.iter().map(|x| 2 * x + 1).collect())
            .collect()
    }

    /// Doubled pixel centers relative to the anchor.
    pub fn centers_relative_doubled(&self) -> Vec<Vec<i64>> {
        self.centers_doubled()
            .into_iter()
            .map(|c| c.iter().zip(&self.anchor).map(|(x, w)| x - 2 * w).collect())
            .collect()
    }

    /// Orientation of the chain's pixel centers. The step vectors are the
    /// permuted unit vectors, so this is the sign of the permutation.
    pub fn orientation(&self) -> Sign {
        if permutation_parity(&self.order) {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }
}

/// True for odd permutations.
pub fn permutation_parity(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// All permutations of `0..d` in lexicographic order.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    let mut used = vec![false; d];
    fn rec(d: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in 0..d {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(d, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(d, &mut cur, &mut used, &mut out);
    out
}

/// Vertices are box indices; simplices are sorted index lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualComplex {
    dim: usize,
    num_vertices: usize,
    simplices: Vec<BTreeSet<Vec<usize>>>,
    top: BTreeMap<Vec<usize>, SeedChain>,
}

impl DualComplex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Simplices with `k + 1` vertices.
    pub fn simplices(&self, k: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.get(k).into_iter().flatten()
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, BTreeSet::len)
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.simplices
            .get(s.len().wrapping_sub(1))
            .is_some_and(|set| set.contains(&s))
    }

    /// Top simplices with their stored chains, in sorted simplex order.
    pub fn top_simplices(&self) -> impl Iterator<Item = (&Vec<usize>, &SeedChain)> {
        self.top.iter()
    }

    pub fn num_top(&self) -> usize {
        self.top.len()
    }

    pub fn seed_of(&self, simplex: &[usize]) -> Result<&SeedChain> {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.top.get(&s).ok_or(Error::NotTopSimplex(s))
    }

    /// Every simplex of every dimension, as sorted vertex lists.
    pub fn all_simplices(&self) -> BTreeSet<Vec<usize>> {
        self.simplices.iter().flatten().cloned().collect()
    }
}

/// Orientation of `chain` after reordering its boxes increasingly.
fn sorted_sign(chain: &SeedChain) -> Sign {
    let mut idx: Vec<usize> = (0..chain.boxes.len()).collect();
    idx.sort_by_key(|&i| chain.boxes[i]);
    if permutation_parity(&idx) {
        chain.orientation().flip()
    } else {
        chain.orientation()
    }
}

/// Build the dual complex of a full partition.
pub fn build_dual(p: &Partition) -> Result<DualComplex> {
    let d = p.dim();
    let map = p.cell_map();
    let lo = p.domain().lo().to_vec();
    let hi = p.domain().hi().to_vec();
    let perms = permutations(d);
    let mut simplices: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); d + 1];
    let mut top: BTreeMap<Vec<usize>, SeedChain> = BTreeMap::new();
    for v in 0..p.len() {
        simplices[0].insert(vec![v]);
    }
    let mut w = lo.clone();
    let mut distinct: Vec<usize> = Vec::with_capacity(d + 1);
    loop {
        for perm in &perms {
            let mut chain = SeedChain::new(w.clone(), perm.clone());
            distinct.clear();
            let mut boxes = Vec::with_capacity(d + 1);
            for cell in &chain.pixels {
                if let Some(b) = map.get(cell) {
                    boxes.push(b);
                    if !distinct.contains(&b) {
                        distinct.push(b);
                    }
                }
            }
            distinct.sort_unstable();
            if distinct.len() == d + 1 {
                chain.boxes = boxes;
                match top.get(&distinct) {
                    Some(old) => {
                        if sorted_sign(old) != sorted_sign(&chain) {
                            return Err(Error::SeedConflict(distinct.clone()));
                        }
                    }
                    None => {
                        insert_faces(&mut simplices, &distinct);
                        top.insert(distinct.clone(), chain);
                    }
                }
            } else if distinct.len() > 1 && !simplices[distinct.len() - 1].contains(&distinct) {
                insert_faces(&mut simplices, &distinct);
            }
        }
        // Lexicographic order over anchors, so the first chain stored for a
        // simplex is the smallest (anchor, permutation).
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(DualComplex {
                    dim: d,
                    num_vertices: p.len(),
                    simplices,
                    top,
                });
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

fn insert_faces(simplices: &mut [BTreeSet<Vec<usize>>], s: &[usize]) {
    let k = s.len();
    for mask in 1u32..(1u32 << k) {
        let face: Vec<usize> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| s[i])
            .collect();
        simplices[face.len() - 1].insert(face);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_partition, IntBox};

    fn part(d: usize, n: i64, v: &[&[i64]]) -> Partition {
        let boxes = v
            .iter()
            .map(|b| IntBox::from_interleaved(b).unwrap())
            .collect();
        validate_partition(boxes, d, n).unwrap()
    }

    fn grid2() -> Partition {
        part(
            2,
            2,
            &[&[0, 1, 0, 1], &[1, 2, 0, 1], &[0, 1, 1, 2], &[1, 2, 1, 2]],
        )
    }

    #[test]
    fn pixel_grid_counts() {
        let dc = build_dual(&grid2()).unwrap();
        assert_eq!((dc.count(0), dc.count(1), dc.count(2)), (4, 5, 2));
        // lower-left (0) and upper-right (3) share the diagonal
        assert!(dc.contains(&[0, 3]));
        assert!(!dc.contains(&[1, 2]));
    }

    #[test]
    fn stacked_boxes() {
        let dc = build_dual(&part(2, 2, &[&[0, 2, 0, 1], &[0, 2, 1, 2]])).unwrap();
        assert_eq!((dc.count(0), dc.count(1), dc.count(2)), (2, 1, 0));
    }

    #[test]
    fn three_box_corner() {
        let dc = build_dual(&part(2, 2, &[&[0, 1, 0, 2], &[1, 2, 0, 1], &[1, 2, 1, 2]])).unwrap();
        assert_eq!(dc.num_top(), 1);
        let seed = dc.seed_of(&[0, 1, 2]).unwrap();
        assert_eq!(seed.anchor, vec![1, 1]);
    }

    #[test]
    fn seeds_of_pixel_triangles() {
        let dc = build_dual(&grid2()).unwrap();
        // ll=0, lr=1, ul=2, ur=3
        let s = dc.seed_of(&[0, 2, 3]).unwrap();
        assert_eq!(
            s.centers_relative_doubled(),
            vec![vec![-1, -1], vec![-1, 1], vec![1, 1]]
        );
        let s = dc.seed_of(&[0, 1, 3]).unwrap();
        assert_eq!(
            s.centers_relative_doubled(),
            vec![vec![-1, -1], vec![1, -1], vec![1, 1]]
        );
        assert!(matches!(dc.seed_of(&[0, 1]), Err(Error::NotTopSimplex(_))));
    }

    #[test]
    fn chain_sign_is_permutation_sign() {
        for perm in permutations(3) {
            let c = SeedChain::new(vec![0, 0, 0], perm);
            let pts = c.centers_doubled();
            let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
            assert_eq!(crate::orient::orientation(&refs).unwrap(), c.orientation());
        }
    }
}

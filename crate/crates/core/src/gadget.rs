//! Thin rectangles, directed L-joints and the planar pixel layouts built
//! from them.

use crate::model::IntBox;

/// Unit step on the planar grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    East,
    North,
    West,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::North, Dir::West, Dir::South];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::East => (1, 0),
            Dir::North => (0, 1),
            Dir::West => (-1, 0),
            Dir::South => (0, -1),
        }
    }

    pub fn reverse(self) -> Dir {
        match self {
            Dir::East => Dir::West,
            Dir::North => Dir::South,
            Dir::West => Dir::East,
            Dir::South => Dir::North,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Dir::East | Dir::West)
    }

    pub fn perpendicular(self, other: Dir) -> bool {
        self.is_horizontal() != other.is_horizontal()
    }

    pub fn step(self, c: (i64, i64)) -> (i64, i64) {
        let (dx, dy) = self.delta();
        (c.0 + dx, c.1 + dy)
    }

    pub fn letter(self) -> char {
        match self {
            Dir::East => 'E',
            Dir::North => 'N',
            Dir::West => 'W',
            Dir::South => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        Dir::ALL.into_iter().find(|d| d.letter() == c)
    }
}

/// Width-one rectangle traversed from its back pixel `first` towards its
/// front pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThinRect {
    pub first: (i64, i64),
    pub dir: Dir,
    pub len: i64,
}

impl ThinRect {
    pub fn new(first: (i64, i64), dir: Dir, len: i64) -> Self {
        ThinRect { first, dir, len }
    }

    /// Cell at offset `k` from the back pixel.
    pub fn cell(&self, k: i64) -> (i64, i64) {
        let (dx, dy) = self.dir.delta();
        (self.first.0 + k * dx, self.first.1 + k * dy)
    }

    pub fn last(&self) -> (i64, i64) {
        self.cell(self.len - 1)
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len).map(move |k| self.cell(k))
    }

    /// Same cells traversed the other way.
    pub fn reversed(&self) -> ThinRect {
        ThinRect {
            first: self.last(),
            dir: self.dir.reverse(),
            len: self.len,
        }
    }

    pub fn to_box(&self) -> IntBox {
        let (a, b) = (self.first, self.last());
        IntBox::new(
            vec![a.0.min(b.0), a.1.min(b.1)],
            vec![a.0.max(b.0) + 1, a.1.max(b.1) + 1],
        )
        .unwrap()
    }

    /// Doubled coordinates of the point at distance `s2 / 2` from the front
    /// end along the axis, on the midline.
    pub fn point_from_front(&self, s2: i64) -> Vec<i64> {
        let (dx, dy) = self.dir.delta();
        let f = self.last();
        // front edge of the front pixel, doubled
        let ex = 2 * f.0 + 1 + dx;
        let ey = 2 * f.1 + 1 + dy;
        vec![ex - s2 * dx, ey - s2 * dy]
    }

    /// Doubled distance from the front end of a doubled interior point.
    pub fn distance_from_front(&self, p: &[i64]) -> i64 {
        let (dx, dy) = self.dir.delta();
        let f = self.last();
        let ex = 2 * f.0 + 1 + dx;
        let ey = 2 * f.1 + 1 + dy;
        (ex - p[0]) * dx + (ey - p[1]) * dy
    }

    /// Whether a doubled point lies strictly in the back half.
    pub fn in_back_half(&self, p: &[i64]) -> bool {
        self.distance_from_front(p) > self.len
    }

    /// Whether a doubled point is the front pixel's center.
    pub fn at_front_pixel(&self, p: &[i64]) -> bool {
        self.distance_from_front(p) == 1
    }
}

/// Successor of `prev` in a directed L-joint turning to `dir`: it starts
/// beside `prev`'s front pixel. The bulge pixel is `prev`'s front pixel
/// stepped once more along `prev`.
pub fn joint_successor(prev: &ThinRect, dir: Dir, len: i64) -> ThinRect {
    debug_assert!(prev.dir.perpendicular(dir));
    ThinRect::new(dir.step(prev.last()), dir, len)
}

pub fn bulge(prev: &ThinRect) -> (i64, i64) {
    prev.dir.step(prev.last())
}

/// Whether `(a, b)` is a directed L-joint: perpendicular, `b` starting next
/// to `a`'s front pixel.
pub fn is_joint(a: &ThinRect, b: &ThinRect) -> bool {
    a.dir.perpendicular(b.dir) && b.first == b.dir.step(a.last())
}

/// Empty cells separating two thin rectangles along the wider-apart axis;
/// 0 when they touch, even at a corner.
pub fn king_gap(a: &ThinRect, b: &ThinRect) -> i64 {
    let (ba, bb) = (a.to_box(), b.to_box());
    let gap = |k: usize| {
        (bb.lo()[k] - ba.hi()[k])
            .max(ba.lo()[k] - bb.hi()[k])
            .max(0)
    };
    gap(0).max(gap(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn front_distances() {
        let t = ThinRect::new((2, 3), Dir::East, 4);
        assert_eq!(t.to_box(), IntBox::new(vec![2, 3], vec![6, 4]).unwrap());
        assert_eq!(t.point_from_front(1), vec![11, 7]);
        assert!(t.at_front_pixel(&[11, 7]));
        assert!(t.in_back_half(&[7, 7]));
        assert!(!t.in_back_half(&[8, 7]));
        let r = t.reversed();
        assert_eq!(r.point_from_front(1), vec![5, 7]);
    }

    #[test]
    fn joints_and_gaps() {
        let a = ThinRect::new((0, 0), Dir::East, 4);
        let b = joint_successor(&a, Dir::North, 5);
        assert_eq!(b.first, (3, 1));
        assert_eq!(bulge(&a), (4, 0));
        assert!(is_joint(&a, &b));
        assert_eq!(king_gap(&a, &b), 0);
        let c = ThinRect::new((0, 2), Dir::East, 2);
        assert_eq!(king_gap(&a, &c), 1);
        let d = ThinRect::new((0, 3), Dir::East, 2);
        assert_eq!(king_gap(&a, &d), 2);
    }
}

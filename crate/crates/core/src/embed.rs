//! Projections of the dual complex and the orientation-based embedding test.

use crate::dual::{build_dual, DualComplex};
use crate::error::{Error, Result};
use crate::model::Partition;
use crate::orient::{orientation, Sign};

/// Placement of every dual vertex, coordinates doubled. Integral storage
/// makes every projection half-integral.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Projection {
    pub coords: Vec<Vec<i64>>,
}

impl Projection {
    pub fn new(coords: Vec<Vec<i64>>) -> Self {
        Projection { coords }
    }

    /// Build from exact rationals `(num, den)`; fails unless every value has
    /// a denominator dividing 2.
    pub fn from_rationals(pts: &[Vec<(i64, i64)>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(pts.len());
        for (v, p) in pts.iter().enumerate() {
            let mut row = Vec::with_capacity(p.len());
            for &(num, den) in p {
                if den == 0 || (2 * num) % den != 0 {
                    return Err(Error::NotHalfIntegral(v));
                }
                row.push(2 * num / den);
            }
            coords.push(row);
        }
        Ok(Projection { coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// First vertex not strictly inside its box.
    pub fn unfaithful_vertex(&self, p: &Partition) -> Option<usize> {
        (0..p.len()).find(|&i| {
            self.coords.get(i).is_none_or(|c| {
                c.len() != p.dim() || !p.boxes()[i].strictly_contains_doubled(c)
            })
        })
    }

    pub fn is_faithful(&self, p: &Partition) -> bool {
        self.coords.len() == p.len() && self.unfaithful_vertex(p).is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Embedding,
    NotEmbedding,
    Unsupported,
}

/// Result of the orientation test. `violations` lists every top simplex
/// whose orientation flips or collapses, with the projected sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingVerdict {
    pub kind: VerdictKind,
    pub violations: Vec<(Vec<usize>, Sign)>,
}

/// Every box to its center.
pub fn center_projection(p: &Partition) -> Projection {
    Projection {
        coords: p.boxes().iter().map(|b| b.center_doubled()).collect(),
    }
}

/// Orientation of the projected simplex, vertices in chain order.
pub fn projected_sign(dc: &DualComplex, simplex: &[usize], proj: &Projection) -> Result<Sign> {
    let seed = dc.seed_of(simplex)?;
    let pts: Vec<&[i64]> = seed
        .boxes
        .iter()
        .map(|&b| proj.coords[b].as_slice())
        .collect();
    orientation(&pts)
}

/// Whether the projection keeps the seed orientation of a top simplex. A
/// collapsed simplex is never preserved.
pub fn simplex_preserved(dc: &DualComplex, simplex: &[usize], proj: &Projection) -> Result<bool> {
    let seed = dc.seed_of(simplex)?;
    Ok(projected_sign(dc, simplex, proj)? == seed.orientation())
}

pub fn classify_projection(
    p: &Partition,
    dc: &DualComplex,
    proj: &Projection,
) -> Result<EmbeddingVerdict> {
    if proj.coords.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: proj.coords.len(),
        });
    }
    if let Some(v) = proj.unfaithful_vertex(p) {
        return Err(Error::NotFaithful(v));
    }
    if dc.num_top() == 0 {
        return Ok(EmbeddingVerdict {
            kind: VerdictKind::Unsupported,
            violations: Vec::new(),
        });
    }
    let mut violations = Vec::new();
    for (s, seed) in dc.top_simplices() {
        let pts: Vec<&[i64]> = seed
            .boxes
            .iter()
            .map(|&b| proj.coords[b].as_slice())
            .collect();
        let sign = orientation(&pts)?;
        if sign != seed.orientation() {
            violations.push((s.clone(), sign));
        }
    }
    let kind = if violations.is_empty() {
        VerdictKind::Embedding
    } else {
        VerdictKind::NotEmbedding
    };
    Ok(EmbeddingVerdict { kind, violations })
}

pub fn center_embeddable(p: &Partition) -> Result<EmbeddingVerdict> {
    let dc = build_dual(p)?;
    classify_projection(p, &dc, &center_projection(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_partition, IntBox};

    fn pixels(n: i64) -> Partition {
        let mut boxes = Vec::new();
        for y in 0..n {
            for x in 0..n {
                boxes.push(IntBox::pixel(&[x, y]));
            }
        }
        validate_partition(boxes, 2, n).unwrap()
    }

    #[test]
    fn uniform_grid_embeds() {
        let v = center_embeddable(&pixels(4)).unwrap();
        assert_eq!(v.kind, VerdictKind::Embedding);
    }

    #[test]
    fn moved_vertex_breaks_embedding() {
        let p = pixels(3);
        let dc = build_dual(&p).unwrap();
        let mut proj = center_projection(&p);
        // cannot leave a pixel faithfully, so swap two vertices' roles instead
        proj.coords.swap(0, 4);
        assert!(matches!(
            classify_projection(&p, &dc, &proj),
            Err(Error::NotFaithful(0))
        ));
    }

    #[test]
    fn rational_input() {
        let pr = Projection::from_rationals(&[vec![(3, 2), (1, 2)]]).unwrap();
        assert_eq!(pr.coords, vec![vec![3, 1]]);
        assert_eq!(
            Projection::from_rationals(&[vec![(1, 3), (1, 2)]]),
            Err(Error::NotHalfIntegral(0))
        );
    }

    #[test]
    fn no_top_simplex_is_unsupported() {
        let boxes = vec![
            IntBox::from_interleaved(&[0, 2, 0, 1]).unwrap(),
            IntBox::from_interleaved(&[0, 2, 1, 2]).unwrap(),
        ];
        let p = validate_partition(boxes, 2, 2).unwrap();
        assert_eq!(
            center_embeddable(&p).unwrap().kind,
            VerdictKind::Unsupported
        );
    }
}

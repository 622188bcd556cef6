//! Exact orientation predicates and determinants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sign of an orientation determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_i128(v: i128) -> Sign {
        match v.cmp(&0) {
            std::cmp::Ordering::Less => Sign::Negative,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Positive,
        }
    }

    pub fn of_big(v: &BigInt) -> Sign {
        if v.is_zero() {
            Sign::Zero
        } else if v.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

// Coordinates below this bound keep the i128 fast paths overflow-free.
const FAST_BOUND: i64 = 1 << 40;

pub fn orient2(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> Sign {
    if [a, b, c].iter().flatten().all(|x| x.abs() < FAST_BOUND) {
        let (a, b, c) = (a.map(i128::from), b.map(i128::from), c.map(i128::from));
        Sign::of_i128((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    } else {
        bareiss_sign(&[&a[..], &b[..], &c[..]])
    }
}

pub fn orient3(a: [i64; 3], b: [i64; 3], c: [i64; 3], d: [i64; 3]) -> Sign {
    if [a, b, c, d].iter().flatten().all(|x| x.abs() < FAST_BOUND) {
        let a = a.map(i128::from);
        let u = b.map(i128::from);
        let v = c.map(i128::from);
        let w = d.map(i128::from);
        let (u0, u1, u2) = (u[0] - a[0], u[1] - a[1], u[2] - a[2]);
        let (v0, v1, v2) = (v[0] - a[0], v[1] - a[1], v[2] - a[2]);
        let (w0, w1, w2) = (w[0] - a[0], w[1] - a[1], w[2] - a[2]);
        let det = u0 * (v1 * w2 - v2 * w1) - u1 * (v0 * w2 - v2 * w0) + u2 * (v0 * w1 - v1 * w0);
        Sign::of_i128(det)
    } else {
        bareiss_sign(&[&a[..], &b[..], &c[..], &d[..]])
    }
}

/// Sign of `det[(1, p_i)]` for `d + 1` points in dimension `d`.
pub fn orientation(points: &[&[i64]]) -> Result<Sign> {
    let d = points.len().saturating_sub(1);
    if d == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.len(),
        });
    }
    Ok(match d {
        2 => orient2(
            [points[0][0], points[0][1]],
            [points[1][0], points[1][1]],
            [points[2][0], points[2][1]],
        ),
        3 => orient3(
            [points[0][0], points[0][1], points[0][2]],
            [points[1][0], points[1][1], points[1][2]],
            [points[2][0], points[2][1], points[2][2]],
            [points[3][0], points[3][1], points[3][2]],
        ),
        _ => bareiss_sign(points),
    })
}

/// Sign of the bordered determinant through fraction-free elimination.
fn bareiss_sign(points: &[&[i64]]) -> Sign {
    let m: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| {
            std::iter::once(BigInt::one())
                .chain(p.iter().map(|&x| BigInt::from(x)))
                .collect()
        })
        .collect();
    Sign::of_big(&bareiss(m))
}

/// Integer determinant by Bareiss elimination.
pub fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Rational determinant by Gaussian elimination.
pub fn det_rational(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigRational::zero();
        };
        if r != k {
            m.swap(k, r);
            det = -det;
        }
        let pivot = m[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

//! Counterexample generators and the square-filling number theory.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gadget::{joint_successor, Dir, ThinRect};
use crate::model::{validate_in, validate_partition, IntBox, Partition};
use crate::orient::{det_rational, orientation, Sign};

/// Fill every cell of `[0, n]^d` not covered by `boxes` with a pixel.
pub fn fill_with_pixels(mut boxes: Vec<IntBox>, d: usize, n: i64) -> Result<Partition> {
    let mut covered = vec![false; (n as usize).pow(d as u32)];
    let index = |cell: &[i64]| {
        cell.iter()
            .rev()
            .fold(0usize, |acc, &c| acc * n as usize + c as usize)
    };
    for b in &boxes {
        for axis in 0..d {
            if b.lo()[axis] < 0 || b.hi()[axis] > n {
                return Err(Error::OutOfBounds(0));
            }
        }
        let mut cell = b.lo().to_vec();
        loop {
            covered[index(&cell)] = true;
            let mut axis = 0;
            loop {
                if axis == d {
                    break;
                }
                cell[axis] += 1;
                if cell[axis] < b.hi()[axis] {
                    break;
                }
                cell[axis] = b.lo()[axis];
                axis += 1;
            }
            if axis == d {
                break;
            }
        }
    }
    let mut cell = vec![0i64; d];
    'outer: loop {
        if !covered[index(&cell)] {
            boxes.push(IntBox::pixel(&cell));
        }
        for axis in 0..d {
            cell[axis] += 1;
            if cell[axis] < n {
                continue 'outer;
            }
            cell[axis] = 0;
        }
        break;
    }
    validate_partition(boxes, d, n)
}

/// Three boxes meeting at one point with collinear centers
/// `(-3/2,-1/2)`, `(-1/2,1/2)`, `(1/2,3/2)`, padded with pixels.
pub fn gen_planar_3balanced() -> Partition {
    let boxes = vec![
        IntBox::new(vec![0, 0], vec![3, 1]).unwrap(),
        IntBox::new(vec![2, 1], vec![3, 2]).unwrap(),
        IntBox::new(vec![3, 1], vec![4, 4]).unwrap(),
    ];
    fill_with_pixels(boxes, 2, 4).unwrap()
}

/// The 3-balanced example with the long horizontal box stretched by one
/// unit, which flips the triangle instead of flattening it.
pub fn gen_planar_perturbed() -> Partition {
    let boxes = vec![
        IntBox::new(vec![0, 0], vec![4, 1]).unwrap(),
        IntBox::new(vec![3, 1], vec![4, 2]).unwrap(),
        IntBox::new(vec![4, 1], vec![5, 4]).unwrap(),
    ];
    fill_with_pixels(boxes, 2, 5).unwrap()
}

/// Thin rectangles of the L-cycle obstruction, `T_0` first. From each end
/// of the central `T_0` two L-paths run up and down and meet a vertical
/// rectangle from both of its ends; `T_5` closes the east side, `T_6` the
/// west side. Whatever half of `T_0` its vertex uses, one side propagates a
/// back-half requirement into both halves of its closing rectangle.
pub fn lcycle_rects(keep_t5: bool) -> Vec<ThinRect> {
    let t0 = ThinRect::new((7, 7), Dir::East, 5);
    let mut out = vec![t0];
    for (start, out_dir, closer) in [(t0, Dir::East, keep_t5), (t0.reversed(), Dir::West, true)] {
        let up = joint_successor(&start, Dir::North, 4);
        let up2 = joint_successor(&up, out_dir, 4);
        let down = joint_successor(&start, Dir::South, 4);
        let down2 = joint_successor(&down, out_dir, 4);
        out.extend([up, up2, down, down2]);
        if closer {
            out.push(joint_successor(&up2, Dir::South, 7));
        }
    }
    out
}

pub fn gen_planar_lcycle_variant(keep_t5: bool) -> Partition {
    let boxes = lcycle_rects(keep_t5).iter().map(ThinRect::to_box).collect();
    fill_with_pixels(boxes, 2, 19).unwrap()
}

/// Pixel-filled partition whose dual has no embedding.
pub fn gen_planar_lcycle() -> Partition {
    gen_planar_lcycle_variant(true)
}

/// Smallest integer `b >= 3` with `(b + 2) / (b - 2) < beta`.
pub fn layered_side(beta: &Ratio<i64>) -> Result<i64> {
    if *beta <= Ratio::one() {
        return Err(Error::BetaTooSmall(beta.to_string()));
    }
    let mut b = 3i64;
    while Ratio::new(b + 2, b - 2) >= *beta {
        b += 1;
        if b > 1 << 20 {
            return Err(Error::TooLarge(format!("beta {beta} needs b > 2^20")));
        }
    }
    Ok(b)
}

/// 64-box partition of `[0, 4b]^3` holding four cubes whose centers lie in
/// the plane `x = y`. The lower two are widened by a voxel layer on both y
/// faces and the upper two on both x faces, so the Kuhn chain stepping x, z,
/// y around the origin runs through all four.
pub fn gen_3d_layered(beta: &Ratio<i64>) -> Result<Partition> {
    let b = layered_side(beta)?;
    // octant signs and the widened axis of each cube
    let spec = [
        ([-1, -1, -1], 1),
        ([1, 1, -1], 1),
        ([-1, -1, 1], 0),
        ([1, 1, 1], 0),
    ];
    let cubes: Vec<IntBox> = spec
        .iter()
        .map(|&(sg, axis)| {
            let (lo, hi): (Vec<i64>, Vec<i64>) = (0..3)
                .map(|k| {
                    let w = i64::from(k == axis);
                    if sg[k] < 0 {
                        (-b - w, w)
                    } else {
                        (-w, b + w)
                    }
                })
                .unzip();
            IntBox::new(lo, hi).unwrap()
        })
        .collect();
    let mut boxes = Vec::with_capacity(64);
    for corner in 0..8 {
        let a: Vec<i64> = (0..3)
            .map(|k| if corner >> k & 1 == 1 { 2 * b } else { -2 * b })
            .collect();
        let voxel: Vec<i64> = a.iter().map(|&x| if x > 0 { 0 } else { -1 }).collect();
        let j = cubes.iter().position(|c| c.contains_cell(&voxel)).unwrap();
        let cube = &cubes[j];
        // corner of the cube nearest the origin, one unit off along its widened axis
        let near: Vec<i64> = (0..3)
            .map(|k| {
                if cube.lo()[k] == 0 || cube.hi()[k] == 0 {
                    0
                } else if cube.lo()[k] + cube.hi()[k] < 0 {
                    cube.hi()[k]
                } else {
                    cube.lo()[k]
                }
            })
            .collect();
        let lo: Vec<i64> = (0..3).map(|k| a[k].min(near[k])).collect();
        let hi: Vec<i64> = (0..3).map(|k| a[k].max(near[k])).collect();
        let part = IntBox::new(lo.clone(), hi.clone())?;
        let split: Vec<i64> = if part.contains_box(cube) {
            (0..3)
                .map(|k| {
                    if near[k] == cube.lo()[k] {
                        cube.hi()[k]
                    } else {
                        cube.lo()[k]
                    }
                })
                .collect()
        } else {
            (0..3).map(|k| (lo[k] + hi[k]).div_euclid(2)).collect()
        };
        for m in 0..8 {
            let (mut l, mut h) = (vec![0; 3], vec![0; 3]);
            for k in 0..3 {
                if m >> k & 1 == 0 {
                    l[k] = lo[k];
                    h[k] = split[k];
                } else {
                    l[k] = split[k];
                    h[k] = hi[k];
                }
            }
            boxes.push(IntBox::new(l, h)?.translated(&[2 * b, 2 * b, 2 * b]));
        }
    }
    validate_partition(boxes, 3, 4 * b)
}

/// The first `k` primes.
pub fn primes(k: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(k);
    let mut n = 2i64;
    while out.len() < k {
        if out.iter().take_while(|&&p| p * p <= n).all(|&p| n % p != 0) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// `b + z_i - 1` for `z_0 = 1` and the first `k` primes, with
/// `b = lambda * z_1 ... z_k + 1`.
pub fn coprime_base(k: usize, lambda: i64) -> Vec<i64> {
    let zs = primes(k);
    let b = lambda * zs.iter().product::<i64>() + 1;
    let out: Vec<i64> = std::iter::once(b)
        .chain(zs.iter().map(|z| b + z - 1))
        .collect();
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            assert_eq!(out[i].gcd(&out[j]), 1, "coprime base");
        }
    }
    out
}

/// `(lambda1, lambda2)` with `lambda1 * p1 + lambda2 * p2 = l`, minimal
/// `lambda2`.
pub fn represent_two_products(p1: &BigInt, p2: &BigInt, l: &BigInt) -> Option<(BigInt, BigInt)> {
    if l.is_negative() {
        return None;
    }
    // lambda2 runs over one residue class mod p1; the first is minimal
    let mut lambda2 = BigInt::zero();
    while &lambda2 < p1 {
        let rest = l - &lambda2 * p2;
        if rest.is_negative() {
            return None;
        }
        if rest.is_multiple_of(p1) {
            return Some((rest / p1, lambda2));
        }
        lambda2 += 1;
    }
    None
}

pub fn represent_small(p1: i64, p2: i64, l: i64) -> Option<(i64, i64)> {
    represent_two_products(&p1.into(), &p2.into(), &l.into())
        .map(|(a, b)| (a.to_i64().unwrap(), b.to_i64().unwrap()))
}

/// One more than the largest value not representable by some pair of
/// products over disjoint nonempty subsets. For coprime products that value
/// is `p1 p2 - p1 - p2`.
pub fn fill_bound(sides: &[i64]) -> BigInt {
    fill_bound_big(&sides.iter().map(|&s| BigInt::from(s)).collect::<Vec<_>>())
}

/// Partition of `bx` into cubes with the given pairwise coprime sides,
/// `2^d` of them, with a cube of the smallest side at the lower corner.
pub fn square_fill(bx: &IntBox, sides: &[i64]) -> Result<Partition> {
    let d = bx.dim();
    if sides.len() != 1 << d {
        return Err(Error::ArityMismatch {
            expected: 1 << d,
            found: sides.len(),
        });
    }
    let mut sorted = sides.to_vec();
    sorted.sort_unstable();
    let l0 = fill_bound(&sorted);
    let min_side = bx.sides().into_iter().min().unwrap();
    if BigInt::from(min_side) < l0 {
        return Err(Error::TooSmall {
            side: min_side,
            bound: l0.to_string(),
        });
    }
    let mut out = Vec::new();
    fill_rec(bx.lo(), &bx.sides(), &sorted, &mut out)?;
    validate_in(out, bx.clone(), false)
}

fn fill_rec(lo: &[i64], len: &[i64], sides: &[i64], out: &mut Vec<IntBox>) -> Result<()> {
    let d = len.len();
    let half = sides.len() / 2;
    let (s1, s2) = sides.split_at(half);
    let p1: i64 = s1.iter().product();
    let p2: i64 = s2.iter().product();
    let last = len[d - 1];
    let (l1, l2) = corner_representation(p1, p2, last)?;
    if d == 1 {
        let mut x = lo[0];
        for (count, s) in [(l1, s1[0]), (l2, s2[0])] {
            for _ in 0..count {
                out.push(IntBox::cube(&[x], s)?);
                x += s;
            }
        }
        return Ok(());
    }
    let mut layer = Vec::new();
    let mut z = lo[d - 1];
    for (count, group, height) in [(l1, s1, p1), (l2, s2, p2)] {
        if count == 0 {
            continue;
        }
        layer.clear();
        fill_rec(&lo[..d - 1], &len[..d - 1], group, &mut layer)?;
        for _ in 0..count {
            for sq in &layer {
                let s = sq.side(0);
                for k in 0..height / s {
                    let mut l = sq.lo().to_vec();
                    l.push(z + k * s);
                    out.push(IntBox::cube(&l, s)?);
                }
            }
            z += height;
        }
    }
    Ok(())
}

/// Representation with at least one block of the first kind when possible,
/// so the smallest side lands in the corner.
fn corner_representation(p1: i64, p2: i64, l: i64) -> Result<(i64, i64)> {
    match represent_small(p1, p2, l) {
        Some((0, _)) => match represent_small(p1, p2, l - p1) {
            Some((a, b)) => Ok((a + 1, b)),
            None => {
                represent_small(p1, p2, l).ok_or_else(|| Error::NotRepresentable(l.to_string()))
            }
        },
        Some(r) => Ok(r),
        None => Err(Error::NotRepresentable(l.to_string())),
    }
}

/// `M^(delta)_d` without its leading column of ones: the `d + 1` centers.
pub fn config_rows(d: usize, a: &BigInt, b: &BigInt, delta: i64) -> Vec<Vec<BigRational>> {
    let half = |x: &BigInt| BigRational::new(x.clone(), 2.into());
    let mut rows = vec![vec![-half(a); d]];
    for i in 0..d {
        let row = (0..d)
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => -half(b) + BigRational::from_integer(delta.into()),
                std::cmp::Ordering::Equal => half(b),
                std::cmp::Ordering::Greater => -half(b),
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn config_det(d: usize, a: &BigInt, b: &BigInt, delta: i64) -> BigRational {
    let m = config_rows(d, a, b, delta)
        .into_iter()
        .map(|r| std::iter::once(BigRational::one()).chain(r).collect())
        .collect();
    det_rational(m)
}

/// Exact determinant of `M^(0)_d` next to `b^(d-1) (d a - (d-2) b) / 2`.
pub fn verify_det_formula(d: usize, a: i64, b: i64) -> (BigRational, BigRational, bool) {
    let (ab, bb) = (BigInt::from(a), BigInt::from(b));
    let exact = config_det(d, &ab, &bb, 0);
    let di = BigInt::from(d as i64);
    let closed = BigRational::new(
        num_traits::pow(bb.clone(), d - 1) * (&di * &ab - (&di - 2) * &bb),
        2.into(),
    );
    let eq = exact == closed;
    (exact, closed, eq)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicalConfigReport {
    pub d: usize,
    pub beta: Ratio<i64>,
    pub lambda: i64,
    pub a: BigInt,
    pub b: BigInt,
    pub centers: Vec<Vec<BigRational>>,
    pub det_sign: Sign,
    pub seed_orientation: Sign,
    pub side_set: Vec<BigInt>,
    pub chain_holds: bool,
    pub coprime: bool,
    pub l0_bound: BigInt,
    pub materializable: bool,
}

/// Cell count above which a configuration is never materialized.
pub const MATERIALIZE_LIMIT: i64 = 10_000_000;

/// Choose `b = lambda z_1 ... z_{D-1} + 1` with the smallest `lambda`, then
/// the smallest `a` with `(b + z_{D-1} - 1) / a < beta`, `b / a >= d/(d-2)`
/// and `det M^(1)_d < 0`.
pub fn gen_cubical_config(d: usize, beta: &Ratio<i64>) -> Result<CubicalConfigReport> {
    if d < 3 {
        return Err(Error::Unsupported(format!(
            "cubical configuration needs d >= 3, got {d}"
        )));
    }
    let dd = d as i64;
    if *beta <= Ratio::new(dd, dd - 2) {
        return Err(Error::BetaTooSmall(format!("{beta} <= {dd}/{}", dd - 2)));
    }
    let count = (1usize << d) - 1;
    let zs = primes(count);
    let modulus: BigInt = zs.iter().map(|&z| BigInt::from(z)).product();
    let zmax = *zs.last().unwrap();
    let (bn, bd) = (BigInt::from(*beta.numer()), BigInt::from(*beta.denom()));
    for lambda in 1..=64i64 {
        let b = &modulus * lambda + 1;
        let top = &b + (zmax - 1);
        // a > top / beta and a <= b (d-2) / d
        let a_min = Integer::div_floor(&(&top * &bd), &bn) + 1;
        let a_max = Integer::div_floor(&(&b * (dd - 2)), &BigInt::from(dd));
        let mut a = a_min;
        let mut tries = 0;
        while a <= a_max && tries < 4096 {
            if config_det(d, &a, &b, 1).is_negative() {
                return Ok(report(d, beta, lambda, a, b, &zs));
            }
            a += 1;
            tries += 1;
        }
    }
    Err(Error::NoFeasibleAB)
}

fn report(
    d: usize,
    beta: &Ratio<i64>,
    lambda: i64,
    a: BigInt,
    b: BigInt,
    zs: &[i64],
) -> CubicalConfigReport {
    let centers = config_rows(d, &a, &b, 1);
    let det_sign = Sign::of_big(&config_det(d, &a, &b, 1).numer().clone());
    // u_0 = (-1/2, ..), u_i flips the first i coordinates to +1/2; doubled
    let seeds: Vec<Vec<i64>> = (0..=d)
        .map(|i| (0..d).map(|j| if j < i { 1 } else { -1 }).collect())
        .collect();
    let refs: Vec<&[i64]> = seeds.iter().map(Vec::as_slice).collect();
    let seed_orientation = orientation(&refs).expect("d + 1 points in R^d");
    let side_set: Vec<BigInt> = std::iter::once(b.clone())
        .chain(zs.iter().map(|&z| &b + (z - 1)))
        .collect();
    let zmax = *zs.last().unwrap();
    let beta_q = BigRational::new((*beta.numer()).into(), (*beta.denom()).into());
    let dd = BigInt::from(d as i64);
    let top = BigRational::new(&b + (zmax - 1), a.clone());
    let ratio = BigRational::new(b.clone(), a.clone());
    let chain_holds =
        beta_q > top && top > ratio && ratio >= BigRational::new(dd.clone(), dd.clone() - 2);
    let coprime = (0..side_set.len())
        .all(|i| (i + 1..side_set.len()).all(|j| side_set[i].gcd(&side_set[j]).is_one()));
    let l0_bound = fill_bound_big(&side_set);
    // the filled partition has at least b^d unit cells
    let materializable = b.pow(d as u32) <= BigInt::from(MATERIALIZE_LIMIT);
    CubicalConfigReport {
        d,
        beta: *beta,
        lambda,
        a,
        b,
        centers,
        det_sign,
        seed_orientation,
        side_set,
        chain_holds,
        coprime,
        l0_bound,
        materializable,
    }
}

fn fill_bound_big(sides: &[BigInt]) -> BigInt {
    let k = sides.len();
    let mut worst = BigInt::zero();
    for code in 0..3usize.pow(k as u32) {
        let (mut p1, mut p2) = (BigInt::one(), BigInt::one());
        let (mut n1, mut n2) = (false, false);
        let mut c = code;
        for s in sides {
            match c % 3 {
                1 => {
                    p1 *= s;
                    n1 = true;
                }
                2 => {
                    p2 *= s;
                    n2 = true;
                }
                _ => {}
            }
            c /= 3;
        }
        if n1 && n2 {
            let f = &p1 * &p2 - &p1 - &p2;
            if f > worst {
                worst = f;
            }
        }
    }
    worst + 1
}

//! Brute-force `h^0` oracle via exact rational interpolation.
//!
//! The sections of `(d; m_1, .., m_n)` for concrete points `p_1, .., p_n` are
//! the degree-`d` plane curves with multiplicity `>= m_i` at `p_i`. Fixing
//! the affine monomial basis `x^i y^j` (`i + j <= d`), multiplicity `>= m`
//! at `p` imposes the vanishing of all partial derivatives of order `< m`at
//! `p`; the section space is the kernel of that condition matrix, and with
//! random rational points its dimension equals the generic `h^0` with high
//! probability.
//!
//! Everything is exact: points are 64-bit rationals, condition rows are
//! cleared to arbitrary-precision integers, and rank is computed with
//! fraction-free (Bareiss) elimination over `BigInt`. This module exists to
//! cross-check [`crate::cohomology::h0`] and shares no code with it.

use crate::lattice::DivisorClass;
use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

/// Exact rational point in the affine plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RatPoint {
    pub x: Rational64,
    pub y: Rational64,
}

/// Deterministic pseudo-random pairwise-distinct rational points.
/// The seed pins the whole sequence; numerators stay small so the cleared
/// condition matrices keep modest entry sizes.
pub fn random_rational_points(seed: u64, count: usize) -> Vec<RatPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<RatPoint> = Vec::with_capacity(count);
    while pts.len() < count {
        let p = RatPoint {
            x: Rational64::new(rng.gen_range(-99..=99), rng.gen_range(1..=16)),
            y: Rational64::new(rng.gen_range(-99..=99), rng.gen_range(1..=16)),
        };
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// Falling factorial `i (i-1) .. (i-a+1)` — the coefficient produced by
/// `d^a/dx^a x^i = (i)_a x^{i-a}`.
fn falling(i: i64, a: i64) -> i64 {
    (0..a).map(|t| i - t).product()
}

/// Dimension of degree-`d` plane curves with multiplicity `>= m_i` at `p_i`,
/// as the kernel dimension of the exact condition matrix.
pub fn interpolation_h0(div: &DivisorClass, points: &[RatPoint]) -> i64 {
    assert!(div.d >= 0, "interpolation oracle needs d >= 0, got {}", div.d);
    assert!(
        div.m.iter().all(|&m| m >= 0),
        "interpolation oracle needs clamped multiplicities, got {:?}",
        div.m
    );
    assert_eq!(
        div.n(),
        points.len(),
        "one point per blown-up multiplicity required"
    );
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            assert_ne!(p, q, "interpolation points must be pairwise distinct");
        }
    }

    let d = div.d;
    // Monomials x^i y^j with i + j <= d, in a fixed order.
    let monomials: Vec<(i64, i64)> = (0..=d)
        .flat_map(|i| (0..=(d - i)).map(move |j| (i, j)))
        .collect();
    let cols = monomials.len();

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (p, &mult) in points.iter().zip(&div.m) {
        if mult == 0 {
            continue;
        }
        // Power tables for numerators and denominators up to degree d; a row
        // for point p scaled by qx^d qy^d has entries
        //   (i)_a (j)_b * px^(i-a) qx^(d-i+a) * py^(j-b) qy^(d-j+b),
        // integral and rank-equivalent to the rational row.
        let pow = |base: i64| -> Vec<BigInt> {
            let mut v = Vec::with_capacity(d as usize + 1);
            let mut acc = BigInt::one();
            for _ in 0..=d {
                v.push(acc.clone());
                acc *= base;
            }
            v
        };
        let (px, qx) = (pow(*p.x.numer()), pow(*p.x.denom()));
        let (py, qy) = (pow(*p.y.numer()), pow(*p.y.denom()));
        for a in 0..mult {
            for b in 0..(mult - a) {
                let row = monomials
                    .iter()
                    .map(|&(i, j)| {
                        if i < a || j < b {
                            return BigInt::zero();
                        }
                        let coeff = falling(i, a) * falling(j, b);
                        if coeff == 0 {
                            return BigInt::zero();
                        }
                        BigInt::from(coeff)
                            * &px[(i - a) as usize]
                            * &qx[(d - i + a) as usize]
                            * &py[(j - b) as usize]
                            * &qy[(d - j + b) as usize]
                    })
                    .collect();
                rows.push(row);
            }
        }
    }

    cols as i64 - bigint_rank(rows, cols) as i64
}

/// Rank over the rationals by fraction-free Gaussian elimination.
/// Rank-deficient columns are skipped; the exact division by the previous
/// pivot survives the skips (entries stay minors of the pivot submatrix).
fn bigint_rank(mut mat: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = mat.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let num = &mat[rank][col] * &mat[r][c] - &mat[r][col] * &mat[rank][c];
                mat[r][c] = num / &prev;
            }
            mat[r][col] = BigInt::zero();
        }
        prev = mat[rank][col].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::h0;

    fn ds(d: i64, m: &[i64]) -> DivisorClass {
        DivisorClass::new(d, m.to_vec())
    }

    #[test]
    fn linear_forms() {
        assert_eq!(interpolation_h0(&ds(1, &[]), &[]), 3);
    }

    #[test]
    fn conics_with_one_double_point() {
        let pts = random_rational_points(7, 1);
        assert_eq!(interpolation_h0(&ds(2, &[2]), &pts), 3);
    }

    #[test]
    fn cubics_through_eleven_points() {
        let pts = random_rational_points(42, 11);
        assert_eq!(interpolation_h0(&ds(3, &[1; 11]), &pts), 0);
    }

    #[test]
    fn double_conic_is_special() {
        // (4; 2 x 5) has chi = 0 but one section (the doubled conic through
        // the five points); both oracles must see it.
        let pts = random_rational_points(3, 5);
        assert_eq!(interpolation_h0(&ds(4, &[2; 5]), &pts), 1);
        assert_eq!(h0(&ds(4, &[2; 5])), (1, true));
    }

    #[test]
    fn agreement_on_fixed_classes() {
        for (seed, class) in [
            (10, ds(2, &[1, 1])),
            (11, ds(3, &[2])),
            (12, ds(4, &[2, 2, 2])),
            (13, ds(2, &[1, 1, 1, 1, 1])),
            (14, ds(5, &[2, 2, 2, 1, 1, 1])),
            (15, ds(6, &[3, 3, 3, 3])),
            (16, ds(0, &[0, 0])),
            (17, ds(8, &[3, 3, 3, 3, 3, 3])),
        ] {
            let pts = random_rational_points(seed, class.n());
            assert_eq!(
                interpolation_h0(&class, &pts),
                h0(&class).0,
                "disagreement on {class:?}"
            );
        }
    }

    #[test]
    fn points_are_deterministic_and_distinct() {
        let a = random_rational_points(99, 20);
        let b = random_rational_points(99, 20);
        assert_eq!(a, b);
        for (i, p) in a.iter().enumerate() {
            assert!(!a[i + 1..].contains(p));
        }
    }

    #[test]
    #[should_panic(expected = "pairwise distinct")]
    fn repeated_points_refused() {
        let p = RatPoint {
            x: Rational64::new(1, 2),
            y: Rational64::new(3, 4),
        };
        interpolation_h0(&ds(2, &[1, 1]), &[p, p]);
    }
}

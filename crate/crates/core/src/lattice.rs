//! Picard lattice of the blow-up of the plane in `n` points.
//!
//! A class is stored as `(d; m_1, .., m_n)` meaning `d*H - sum m_i * E_i`,
//! where `H` is the pullback of a line and `E_i` are the exceptional curves.
//! The intersection form is `A.B = d_A*d_B - sum m_i(A)*m_i(B)` (so `H^2 = 1`,
//! `E_i^2 = -1`, `H.E_i = 0`), the canonical class is `(-3; -1, .., -1)`, and
//! `chi(D) = D.(D - K)/2 + 1`.
//!
//! All arithmetic is checked; overflow aborts (it would falsify every
//! certificate downstream, so it is treated as corruption, not as an error
//! value).

use serde::{Deserialize, Serialize};

/// Blow-up of the projective plane in `n` general points.
///
/// Only the count of points enters any computation; generality is an
/// assumption recorded by the consumers that need it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface {
    pub n: usize,
}

impl Surface {
    /// Complex dimension of the surface.
    pub const DIM: i64 = 2;

    pub fn new(n: usize) -> Self {
        Surface { n }
    }

    /// Canonical class `K = -3H + sum E_i`, i.e. `(-3; -1, .., -1)`.
    pub fn canonical(&self) -> DivisorClass {
        DivisorClass::new(-3, vec![-1; self.n])
    }

    /// `K^2 = 9 - n` (with the checked form of the intersection product).
    pub fn canonical_self_intersection(&self) -> i64 {
        let k = self.canonical();
        intersect(&k, &k)
    }
}

/// `d*H - sum m_i*E_i` in the Picard lattice; `m.len()` is the number of
/// blown-up points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    pub d: i64,
    pub m: Vec<i64>,
}

#[inline]
pub(crate) fn cadd(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("lattice arithmetic overflow (add)")
}

#[inline]
pub(crate) fn csub(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("lattice arithmetic overflow (sub)")
}

#[inline]
pub(crate) fn cmul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("lattice arithmetic overflow (mul)")
}

impl DivisorClass {
    pub fn new(d: i64, m: Vec<i64>) -> Self {
        DivisorClass { d, m }
    }

    /// Structure sheaf class `0`.
    pub fn zero(n: usize) -> Self {
        DivisorClass::new(0, vec![0; n])
    }

    /// `H`, the pullback of a line.
    pub fn hyperplane(n: usize) -> Self {
        DivisorClass::new(1, vec![0; n])
    }

    /// `E_i` (0-based `i`), the `i`-th exceptional curve: `(0; .., m_i = -1, ..)`.
    pub fn exceptional(n: usize, i: usize) -> Self {
        assert!(i < n, "exceptional index {i} out of range for n = {n}");
        let mut m = vec![0; n];
        m[i] = -1;
        DivisorClass::new(0, m)
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        assert_eq!(self.n(), other.n(), "mismatched point counts in add");
        DivisorClass::new(
            cadd(self.d, other.d),
            self.m
                .iter()
                .zip(&other.m)
                .map(|(&a, &b)| cadd(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        assert_eq!(self.n(), other.n(), "mismatched point counts in sub");
        DivisorClass::new(
            csub(self.d, other.d),
            self.m
                .iter()
                .zip(&other.m)
                .map(|(&a, &b)| csub(a, b))
                .collect(),
        )
    }

    pub fn neg(&self) -> DivisorClass {
        DivisorClass::new(
            self.d.checked_neg().expect("lattice arithmetic overflow (neg)"),
            self.m
                .iter()
                .map(|&a| a.checked_neg().expect("lattice arithmetic overflow (neg)"))
                .collect(),
        )
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass::new(cmul(self.d, k), self.m.iter().map(|&a| cmul(a, k)).collect())
    }
}

/// Intersection product `A.B = d_A*d_B - sum m_i(A)*m_i(B)`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> i64 {
    assert_eq!(a.n(), b.n(), "mismatched point counts in intersect");
    let mut acc = cmul(a.d, b.d);
    for (&x, &y) in a.m.iter().zip(&b.m) {
        acc = csub(acc, cmul(x, y));
    }
    acc
}

/// Euler characteristic `chi(D) = D.(D - K)/2 + 1` (Riemann-Roch).
///
/// `D.(D - K)` is even for every genuine lattice class; an odd value can only
/// come from corrupted data and aborts.
pub fn euler_char(d: &DivisorClass) -> i64 {
    let k = Surface::new(d.n()).canonical();
    let prod = intersect(d, &d.sub(&k));
    assert!(
        prod % 2 == 0,
        "parity violation in chi: D.(D-K) = {prod} is odd (corrupted class {d:?})"
    );
    cadd(prod / 2, 1)
}

/// Serre dual `K - D`.
pub fn serre_dual(d: &DivisorClass) -> DivisorClass {
    Surface::new(d.n()).canonical().sub(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(d: i64, m: &[i64]) -> DivisorClass {
        DivisorClass::new(d, m.to_vec())
    }

    #[test]
    fn intersection_form_basis() {
        let n = 11;
        let h = DivisorClass::hyperplane(n);
        let e1 = DivisorClass::exceptional(n, 0);
        assert_eq!(intersect(&h, &h), 1);
        assert_eq!(intersect(&e1, &e1), -1);
        assert_eq!(intersect(&h, &e1), 0);
        let k = Surface::new(n).canonical();
        assert_eq!(intersect(&k, &k), -2); // 9 - 11
        assert_eq!(Surface::new(10).canonical_self_intersection(), -1);
        assert_eq!(intersect(&k, &h), -3);
        assert_eq!(intersect(&k, &e1), -1);
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Surface::new(4).canonical(), ds(-3, &[-1, -1, -1, -1]));
    }

    #[test]
    fn named_classes() {
        // D_1 = K - E_1 at n = 11.
        let n = 11;
        let d1 = Surface::new(n).canonical().sub(&DivisorClass::exceptional(n, 0));
        let mut m = vec![-1; n];
        m[0] = 0;
        assert_eq!(d1, DivisorClass::new(-3, m));
        // F = 3K - H at n = 11.
        let f = Surface::new(n)
            .canonical()
            .scale(3)
            .sub(&DivisorClass::hyperplane(n));
        assert_eq!(f, ds(-10, &[-3; 11]));
        // -2F = (20; 6 x 11).
        assert_eq!(f.scale(-2), ds(20, &[6; 11]));
    }

    #[test]
    fn euler_char_values() {
        let n = 11;
        assert_eq!(euler_char(&DivisorClass::zero(n)), 1);
        assert_eq!(euler_char(&DivisorClass::hyperplane(n)), 3);
        // -D_1 = -K + E_1: chi = 0.
        let d1 = Surface::new(n).canonical().sub(&DivisorClass::exceptional(n, 0));
        assert_eq!(euler_char(&d1.neg()), 0);
        // chi(-K) at n = 11 is -1; at n = 10 it is 0.
        assert_eq!(euler_char(&Surface::new(11).canonical().neg()), -1);
        assert_eq!(euler_char(&Surface::new(10).canonical().neg()), 0);
    }

    #[test]
    fn serre_dual_values() {
        let n = 11;
        let f = Surface::new(n)
            .canonical()
            .scale(3)
            .sub(&DivisorClass::hyperplane(n));
        // K - F = (7; 2 x 11).
        assert_eq!(serre_dual(&f), ds(7, &[2; 11]));
        assert_eq!(serre_dual(&DivisorClass::zero(n)), Surface::new(n).canonical());
    }

    #[test]
    #[should_panic(expected = "mismatched point counts")]
    fn mismatched_n_aborts() {
        intersect(&DivisorClass::zero(3), &DivisorClass::zero(4));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_aborts() {
        let big = ds(i64::MAX, &[]);
        let _ = intersect(&big, &big);
    }

    prop_compose! {
        fn arb_class(n: usize)(d in -40i64..=40, m in prop::collection::vec(-40i64..=40, n)) -> DivisorClass {
            DivisorClass::new(d, m)
        }
    }

    proptest! {
        #[test]
        fn bilinear_symmetric(a in arb_class(7), b in arb_class(7), c in arb_class(7), s in -5i64..=5) {
            prop_assert_eq!(intersect(&a, &b), intersect(&b, &a));
            prop_assert_eq!(
                intersect(&a.add(&b.scale(s)), &c),
                intersect(&a, &c) + s * intersect(&b, &c)
            );
        }

        #[test]
        fn serre_symmetry(a in arb_class(9)) {
            prop_assert_eq!(euler_char(&a), euler_char(&serre_dual(&a)));
        }

        #[test]
        fn chi_quadratic_defect_is_intersection(a in arb_class(6), b in arb_class(6)) {
            // chi(A+B) - chi(A) - chi(B) + chi(0) = A.B
            let lhs = euler_char(&a.add(&b)) - euler_char(&a) - euler_char(&b)
                + euler_char(&DivisorClass::zero(6));
            prop_assert_eq!(lhs, intersect(&a, &b));
        }

        #[test]
        fn serre_is_involution(a in arb_class(8)) {
            prop_assert_eq!(serre_dual(&serre_dual(&a)), a);
        }
    }
}

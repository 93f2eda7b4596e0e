//! Exceptionality of ordered collections of line bundles.
//!
//! Numerical exceptionality is a pure lattice statement
//! (`chi(L_i - L_j) = 0` for `i < j`). Genuine exceptionality additionally
//! needs all backward Ext groups to vanish and each diagonal to be
//! `(1, 0, 0)`; both are decided through the cohomology oracle, and every
//! report entry carries the oracle's certification flags. Maximal length in
//! the numerical Grothendieck group is decided by an exact integer
//! determinant (with a Smith-normal-form cross-check) of the coordinate
//! matrix `(rank, c_1, chi)` — integral coordinates in which unimodularity
//! is equivalent to spanning.

use crate::cohomology::{ext_dims, OracleError};
use crate::collection::LineBundleCollection;
use crate::intmat::{bareiss_det, smith_normal_form, IntMatError};
use crate::lattice::{euler_char, DivisorClass};
use crate::par::run_indexed;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairVerdict {
    Pass,
    Fail,
}

/// Euler-characteristic check for one ordered pair `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericalPairReport {
    pub i: usize,
    pub j: usize,
    pub chi: i64,
    pub verdict: PairVerdict,
}

/// Ext-dimension check for one ordered pair: for `i < j` the backward
/// direction `Ext^*(L_j, L_i)` (expected `(0,0,0)`), for `i = j` the
/// diagonal (expected `(1,0,0)`). `chi` is `chi(L_i - L_j)`, so
/// `hom - ext1 + ext2 = chi` always.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub chi: i64,
    pub hom: i64,
    pub ext1: i64,
    pub ext2: i64,
    pub certified: [bool; 3],
    pub verdict: PairVerdict,
}

/// `chi(O) = 1` and `chi(L_i - L_j) = 0` for all `i < j`.
pub fn verify_numerically_exceptional(
    c: &LineBundleCollection,
) -> (bool, Vec<NumericalPairReport>) {
    let mut reports = Vec::new();
    let mut ok = euler_char(&DivisorClass::zero(c.surface().n)) == 1;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let chi = euler_char(&c.class(i).sub(c.class(j)));
            let verdict = if chi == 0 {
                PairVerdict::Pass
            } else {
                PairVerdict::Fail
            };
            ok &= chi == 0;
            reports.push(NumericalPairReport { i, j, chi, verdict });
        }
    }
    (ok, reports)
}

/// Backward Ext vanishing for all `i < j` plus `(1,0,0)` diagonals. Reports
/// are ordered by `(i, j)` with `j = i` carrying the diagonal check.
pub fn verify_exceptional(
    c: &LineBundleCollection,
) -> Result<(bool, Vec<PairReport>), OracleError> {
    verify_exceptional_inner(c, true)
}

/// Sequential sibling of [`verify_exceptional`]; identical output.
pub fn verify_exceptional_seq(
    c: &LineBundleCollection,
) -> Result<(bool, Vec<PairReport>), OracleError> {
    verify_exceptional_inner(c, false)
}

fn verify_exceptional_inner(
    c: &LineBundleCollection,
    parallel: bool,
) -> Result<(bool, Vec<PairReport>), OracleError> {
    let pairs: Vec<(usize, usize)> = (0..c.len())
        .flat_map(|i| (i..c.len()).map(move |j| (i, j)))
        .collect();
    let computed: Vec<Result<PairReport, OracleError>> =
        run_indexed(pairs.len(), parallel, |idx| {
            let (i, j) = pairs[idx];
            // Backward direction for i < j; the diagonal when i = j.
            let v = ext_dims(c.class(j), c.class(i))?;
            let expected = if i == j { [1, 0, 0] } else { [0, 0, 0] };
            Ok(PairReport {
                i,
                j,
                chi: euler_char(&c.class(i).sub(c.class(j))),
                hom: v.h0,
                ext1: v.h1,
                ext2: v.h2,
                certified: v.certified,
                verdict: if v.dims() == expected {
                    PairVerdict::Pass
                } else {
                    PairVerdict::Fail
                },
            })
        });
    let mut reports = Vec::with_capacity(computed.len());
    for r in computed {
        reports.push(r?);
    }
    let ok = reports.iter().all(|r| r.verdict == PairVerdict::Pass);
    Ok((ok, reports))
}

/// Coordinate matrix of the collection in the numerical Grothendieck group:
/// one row `(1, d, m_1, .., m_n, chi)` per line bundle.
pub fn kgroup_matrix(c: &LineBundleCollection) -> Vec<Vec<i128>> {
    c.classes()
        .iter()
        .map(|cl| {
            let mut row = Vec::with_capacity(c.surface().n + 3);
            row.push(1i128);
            row.push(cl.d as i128);
            row.extend(cl.m.iter().map(|&v| v as i128));
            row.push(euler_char(cl) as i128);
            row
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalLengthReport {
    pub length: usize,
    pub expected_length: usize,
    pub length_ok: bool,
    /// Determinant of the square coordinate matrix (absent on wrong length).
    pub det: Option<i128>,
    /// Smith elementary divisors of the same matrix (independent route).
    pub snf_divisors: Option<Vec<i128>>,
    pub routes_agree: bool,
    pub passed: bool,
}

/// Length `n + 3` and unimodular coordinate matrix, with the determinant
/// and Smith routes cross-checked against each other.
pub fn maximal_length_report(
    c: &LineBundleCollection,
) -> Result<MaximalLengthReport, IntMatError> {
    let expected = c.surface().n + 3;
    let length = c.len();
    if length != expected {
        return Ok(MaximalLengthReport {
            length,
            expected_length: expected,
            length_ok: false,
            det: None,
            snf_divisors: None,
            routes_agree: true,
            passed: false,
        });
    }
    let mat = kgroup_matrix(c);
    let det = bareiss_det(&mat)?;
    let snf = smith_normal_form(&mat)?;
    let det_unimodular = det.abs() == 1;
    let snf_unimodular = snf.iter().all(|&d| d == 1);
    let routes_agree = det_unimodular == snf_unimodular
        && det.abs() == snf.iter().product::<i128>().abs();
    Ok(MaximalLengthReport {
        length,
        expected_length: expected,
        length_ok: true,
        det: Some(det),
        snf_divisors: Some(snf),
        routes_agree,
        passed: det_unimodular && snf_unimodular && routes_agree,
    })
}

/// Boolean view of [`maximal_length_report`]; integer overflow (possible
/// only for far-out-of-range input) counts as failure.
pub fn maximal_length_check(c: &LineBundleCollection) -> bool {
    maximal_length_report(c).is_ok_and(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases;
    use crate::collection::LineBundleCollection;
    use crate::lattice::Surface;

    fn two(n: usize, first: DivisorClass, second: DivisorClass) -> LineBundleCollection {
        LineBundleCollection::new(
            Surface::new(n),
            vec!["A".into(), "B".into()],
            vec![first, second],
        )
        .unwrap()
    }

    #[test]
    fn numerical_examples() {
        assert!(verify_numerically_exceptional(&cases::new11()).0);
        assert!(verify_numerically_exceptional(&cases::krah10()).0);
        let bad = two(5, DivisorClass::hyperplane(5), DivisorClass::zero(5));
        let (ok, reports) = verify_numerically_exceptional(&bad);
        assert!(!ok);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].chi, 3);
        assert_eq!(reports[0].verdict, PairVerdict::Fail);
    }

    #[test]
    fn exceptional_examples() {
        let (ok, reports) = verify_exceptional(&cases::new11()).unwrap();
        assert!(ok);
        assert!(reports.iter().all(|r| r.certified == [true; 3]));
        assert!(verify_exceptional(&cases::orlov(11)).unwrap().0);

        let bad = two(
            5,
            DivisorClass::exceptional(5, 0),
            DivisorClass::zero(5),
        );
        let (ok, reports) = verify_exceptional(&bad).unwrap();
        assert!(!ok);
        let backward = reports.iter().find(|r| (r.i, r.j) == (0, 1)).unwrap();
        assert_eq!(backward.hom, 1);
        assert_eq!(backward.verdict, PairVerdict::Fail);
    }

    #[test]
    fn pair_table_shape_for_new11() {
        let (_, reports) = verify_exceptional(&cases::new11()).unwrap();
        let off: Vec<_> = reports.iter().filter(|r| r.i != r.j).collect();
        let diag: Vec<_> = reports.iter().filter(|r| r.i == r.j).collect();
        assert_eq!(off.len(), 91);
        assert_eq!(diag.len(), 14);
        assert!(off.iter().all(|r| [r.hom, r.ext1, r.ext2] == [0, 0, 0]));
        assert!(diag.iter().all(|r| [r.hom, r.ext1, r.ext2] == [1, 0, 0]));
        // chi consistency inside every report.
        assert!(reports.iter().all(|r| r.hom - r.ext1 + r.ext2 == r.chi));
    }

    #[test]
    fn exceptional_implies_numerical() {
        for c in [cases::new11(), cases::krah10(), cases::orlov(10), cases::orlov(11)] {
            let (ok, _) = verify_exceptional(&c).unwrap();
            assert!(ok);
            assert!(verify_numerically_exceptional(&c).0);
        }
    }

    #[test]
    fn seq_matches_parallel() {
        let a = verify_exceptional(&cases::new11()).unwrap();
        let b = verify_exceptional_seq(&cases::new11()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn maximal_length_examples() {
        let r = maximal_length_report(&cases::new11()).unwrap();
        assert!(r.passed && r.length_ok && r.routes_agree);
        assert_eq!(r.det.unwrap().abs(), 1);
        assert_eq!(r.snf_divisors.unwrap(), vec![1; 14]);

        assert!(maximal_length_check(&cases::orlov(11)));
        assert!(maximal_length_check(&cases::krah10()));
        assert!(maximal_length_check(&cases::orlov(10)));

        // Dropping the last element breaks the length requirement.
        let c = cases::new11();
        let shorter = LineBundleCollection::new(
            c.surface(),
            c.labels()[..13].to_vec(),
            c.classes()[..13].to_vec(),
        )
        .unwrap();
        let r = maximal_length_report(&shorter).unwrap();
        assert!(!r.passed && !r.length_ok);
        assert_eq!(r.det, None);
    }
}

//! Relative-height matrix, exact pseudoheight minimization, and the phantom
//! certificate assembled from them.
//!
//! For an ordered collection `(L_0, .., L_{t-1})` the pseudoheight is the
//! exact minimum over strictly increasing index chains `a_0 < .. < a_p`
//! (`p >= 0`) of
//!
//! ```text
//! sum_k e(L_{a_k}, L_{a_{k+1}})  +  e(L_{a_p}, L_{a_0} - K)  -  p  +  dim
//! ```
//!
//! with `dim = 2` and `e` the relative height (least non-vanishing Ext
//! degree); an infinite entry prunes every chain through it. A positive
//! pseudoheight certifies the collection is not full, and when the minimum is
//! attained by a single-element chain (`ph = e(L_i, L_i - K) + 2` for some
//! `i`) the height itself equals the pseudoheight. The chain search is a
//! shortest-path sweep over the upper-triangular DAG, exact and exhaustive
//! for any collection length (the closed-form bound only needs lengths up to
//! 64), with ties broken toward the lexicographically smallest chain so
//! witnesses are deterministic.

use crate::cohomology::{relative_height, OracleError, RelativeHeight};
use crate::collection::LineBundleCollection;
use crate::exceptional::{maximal_length_report, MaximalLengthReport};
use crate::intmat::IntMatError;
use crate::lattice::Surface;
use crate::par::run_indexed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Matrix(#[from] IntMatError),
}

/// One matrix entry: a relative height and whether its determination used
/// only certified base cases of the section-counting oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightEntry {
    pub value: RelativeHeight,
    pub certified: bool,
}

/// Square grid of relative heights over a collection of length `t`.
///
/// Entry `(r, c)` holds the forward height `e(L_r, L_c)` when `r < c` and the
/// anticanonical closing height `e(L_r, L_c - K)` when `r >= c`; in
/// particular the diagonal holds the self-closings `e(L_i, L_i - K)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightMatrix {
    entries: Vec<Vec<HeightEntry>>,
}

impl HeightMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Raw grid, row-major; rows are sources, columns targets.
    pub fn rows(&self) -> &[Vec<HeightEntry>] {
        &self.entries
    }

    /// `e(L_i, L_j)` for `i < j`.
    pub fn forward(&self, i: usize, j: usize) -> HeightEntry {
        assert!(i < j, "forward entries need i < j, got ({i}, {j})");
        self.entries[i][j]
    }

    /// `e(L_j, L_i - K)` for `j >= i`.
    pub fn closing(&self, j: usize, i: usize) -> HeightEntry {
        assert!(j >= i, "closing entries need j >= i, got ({j}, {i})");
        self.entries[j][i]
    }

    /// `e(L_i, L_i - K)`.
    pub fn diagonal_closing(&self, i: usize) -> HeightEntry {
        self.entries[i][i]
    }

    pub fn all_certified(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.certified)
    }

    /// Grid positions of entries that rest on the SHGH-assumed extension,
    /// row-major.
    pub fn uncertified_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.entries.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                if !e.certified {
                    out.push((r, c));
                }
            }
        }
        out
    }
}

pub fn height_matrix(c: &LineBundleCollection) -> Result<HeightMatrix, OracleError> {
    height_matrix_inner(c, true)
}

pub fn height_matrix_seq(c: &LineBundleCollection) -> Result<HeightMatrix, OracleError> {
    height_matrix_inner(c, false)
}

fn height_matrix_inner(
    c: &LineBundleCollection,
    parallel: bool,
) -> Result<HeightMatrix, OracleError> {
    let t = c.len();
    let k = c.surface().canonical();
    let computed = run_indexed(t * t, parallel, |idx| {
        let (r, col) = (idx / t, idx % t);
        let target = if r < col {
            c.class(col).clone()
        } else {
            c.class(col).sub(&k)
        };
        relative_height(c.class(r), &target)
            .map(|(value, certified)| HeightEntry { value, certified })
    });
    let mut flat = Vec::with_capacity(t * t);
    for entry in computed {
        flat.push(entry?);
    }
    Ok(HeightMatrix {
        entries: flat.chunks(t).map(<[HeightEntry]>::to_vec).collect(),
    })
}

/// Exact pseudoheight of a precomputed matrix, with the minimizing chain.
///
/// Returns `(Infinite, None)` only when every chain is pruned by an infinite
/// entry. Ties resolve to the lexicographically smallest index chain; chains
/// ending at a common vertex never prefix one another, so per-vertex
/// tie-breaking composes and the global witness is the true lexicographic
/// minimum among all optimal chains.
#[allow(clippy::needless_range_loop)]
pub fn pseudoheight_of_matrix(m: &HeightMatrix) -> (RelativeHeight, Option<Vec<usize>>) {
    let t = m.len();
    let mut best_total: Option<(i64, Vec<usize>)> = None;
    for s in 0..t {
        // best[v]: minimal sum of (e - 1) over the edges of an increasing
        // chain from s to v, with its chain; tuple order = cost, then lex.
        let mut best: Vec<Option<(i64, Vec<usize>)>> = vec![None; t];
        best[s] = Some((0, vec![s]));
        for v in s + 1..t {
            let mut cand: Option<(i64, Vec<usize>)> = None;
            for u in s..v {
                let Some((cost_u, chain_u)) = &best[u] else {
                    continue;
                };
                let RelativeHeight::Finite(e) = m.forward(u, v).value else {
                    continue;
                };
                let mut chain = chain_u.clone();
                chain.push(v);
                let next = (cost_u + e - 1, chain);
                if cand.as_ref().is_none_or(|c| next < *c) {
                    cand = Some(next);
                }
            }
            best[v] = cand;
        }
        for v in s..t {
            let Some((cost, chain)) = &best[v] else {
                continue;
            };
            let RelativeHeight::Finite(close) = m.closing(v, s).value else {
                continue;
            };
            let total = (cost + close + Surface::DIM, chain.clone());
            if best_total.as_ref().is_none_or(|b| total < *b) {
                best_total = Some(total);
            }
        }
    }
    match best_total {
        Some((v, chain)) => (RelativeHeight::Finite(v), Some(chain)),
        None => (RelativeHeight::Infinite, None),
    }
}

/// Pseudoheight of a collection (matrix computed on the fly).
pub fn pseudoheight(
    c: &LineBundleCollection,
) -> Result<(RelativeHeight, Option<Vec<usize>>), OracleError> {
    Ok(pseudoheight_of_matrix(&height_matrix(c)?))
}

/// What can be asserted about the height itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Height {
    /// The single-chain criterion fired, so the height equals the
    /// pseudoheight.
    Exact { value: i64 },
    /// Only the general bound `height >= pseudoheight` applies.
    AtLeast { value: i64 },
    /// Every chain was pruned, forcing the height to be infinite too.
    Infinite,
}

/// Fullness is only ever refuted here (positive pseudoheight), never proven.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fullness {
    NotFull,
    Unknown,
}

/// Certificate that a collection's right orthogonal complement is a phantom:
/// positive pseudoheight (not full) plus maximal numerical length inside a
/// category generated by a declared full collection of the same length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhantomCertificate {
    pub collection_length: usize,
    pub labels: Vec<String>,
    pub pseudoheight: RelativeHeight,
    pub witness_chain: Option<Vec<usize>>,
    pub witness_labels: Option<Vec<String>>,
    pub criterion_fired: bool,
    pub height: Height,
    pub full: Fullness,
    pub maximal_length: MaximalLengthReport,
    pub reference_full_length: usize,
    pub phantom_complement: bool,
    /// True when no matrix entry used the SHGH-assumed extension.
    pub fully_certified: bool,
    pub assumptions: Vec<String>,
}

/// Assumption strings for every SHGH-assumed matrix entry, row-major.
pub fn shgh_assumptions(c: &LineBundleCollection, m: &HeightMatrix) -> Vec<String> {
    m.uncertified_positions()
        .into_iter()
        .map(|(r, col)| {
            if r < col {
                format!(
                    "SHGH-assumed: forward entry e({}, {}) at grid ({r}, {col}) \
                     rests on a base case with multiplicity above the certified bound",
                    c.label(r),
                    c.label(col),
                )
            } else {
                format!(
                    "SHGH-assumed: closing entry e({}, {} - K) at grid ({r}, {col}) \
                     rests on a base case with multiplicity above the certified bound",
                    c.label(r),
                    c.label(col),
                )
            }
        })
        .collect()
}

/// Build the certificate from a precomputed matrix (shared with the CLI so
/// the matrix is only computed once per run).
pub fn certificate_from_matrix(
    c: &LineBundleCollection,
    m: &HeightMatrix,
    reference_full_length: usize,
) -> Result<PhantomCertificate, CertificateError> {
    let (ph, witness) = pseudoheight_of_matrix(m);
    let criterion_fired = match ph {
        RelativeHeight::Finite(v) => (0..m.len())
            .any(|i| m.diagonal_closing(i).value == RelativeHeight::Finite(v - Surface::DIM)),
        RelativeHeight::Infinite => false,
    };
    let height = match (ph, criterion_fired) {
        (RelativeHeight::Infinite, _) => Height::Infinite,
        (RelativeHeight::Finite(v), true) => Height::Exact { value: v },
        (RelativeHeight::Finite(v), false) => Height::AtLeast { value: v },
    };
    let not_full = match ph {
        RelativeHeight::Finite(v) => v > 0,
        RelativeHeight::Infinite => true,
    };
    let maximal = maximal_length_report(c)?;
    let phantom_complement =
        not_full && maximal.passed && reference_full_length == c.len();
    let mut assumptions = shgh_assumptions(c, m);
    assumptions.push(
        "points are in general position (all section counts use the generic oracle)"
            .to_string(),
    );
    if phantom_complement {
        assumptions.push(format!(
            "the declared reference collection of length {reference_full_length} \
             is full; that input is an axiom of the certificate, not recomputed"
        ));
    }
    Ok(PhantomCertificate {
        collection_length: c.len(),
        labels: c.labels().to_vec(),
        pseudoheight: ph,
        witness_labels: witness
            .as_ref()
            .map(|w| w.iter().map(|&i| c.label(i).to_string()).collect()),
        witness_chain: witness,
        criterion_fired,
        height,
        full: if not_full {
            Fullness::NotFull
        } else {
            Fullness::Unknown
        },
        maximal_length: maximal,
        reference_full_length,
        phantom_complement,
        fully_certified: m.all_certified(),
        assumptions,
    })
}

pub fn height_certificate(
    c: &LineBundleCollection,
    reference_full_length: usize,
) -> Result<PhantomCertificate, CertificateError> {
    let m = height_matrix(c)?;
    certificate_from_matrix(c, &m, reference_full_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases;
    use crate::lattice::DivisorClass;
    use proptest::prelude::*;
    use RelativeHeight::{Finite, Infinite};

    /// Direct enumeration of every increasing chain; ground truth for the DP.
    fn pseudoheight_brute(m: &HeightMatrix) -> (RelativeHeight, Option<Vec<usize>>) {
        let t = m.len();
        assert!(t <= 16, "brute force is exponential; keep it small");
        let mut best: Option<(i64, Vec<usize>)> = None;
        'mask: for mask in 1u32..1 << t {
            let chain: Vec<usize> = (0..t).filter(|i| mask >> i & 1 == 1).collect();
            let mut total = Surface::DIM;
            for w in chain.windows(2) {
                match m.forward(w[0], w[1]).value {
                    Finite(e) => total += e - 1,
                    Infinite => continue 'mask,
                }
            }
            match m.closing(*chain.last().unwrap(), chain[0]).value {
                Finite(e) => total += e,
                Infinite => continue 'mask,
            }
            let cand = (total, chain);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        match best {
            Some((v, chain)) => (Finite(v), Some(chain)),
            None => (Infinite, None),
        }
    }

    /// Evaluate one explicit chain against the matrix (None when pruned).
    fn chain_total(m: &HeightMatrix, chain: &[usize]) -> Option<i64> {
        let mut total = Surface::DIM;
        for w in chain.windows(2) {
            total += m.forward(w[0], w[1]).value.finite()? - 1;
        }
        total += m.closing(*chain.last().unwrap(), chain[0]).value.finite()?;
        Some(total)
    }

    #[test]
    fn new11_matrix_is_the_case_analysis() {
        let c = cases::new11();
        let m = height_matrix(&c).unwrap();
        assert_eq!(m.len(), 14);
        for r in 0..14 {
            for col in 0..14 {
                let expected = if r < col {
                    if (1..=11).contains(&r) && (1..=11).contains(&col) {
                        Infinite
                    } else {
                        Finite(2)
                    }
                } else {
                    Finite(1)
                };
                let e = m.rows()[r][col];
                assert_eq!(e.value, expected, "grid ({r}, {col})");
                assert!(e.certified, "grid ({r}, {col}) must be certified");
            }
        }
        assert!(m.all_certified());
        assert!(shgh_assumptions(&c, &m).is_empty());
    }

    #[test]
    fn krah10_matrix_values_and_flags() {
        let c = cases::krah10();
        let m = height_matrix(&c).unwrap();
        assert_eq!(m.len(), 13);
        for r in 0..13 {
            for col in 0..13 {
                let expected = if r < col {
                    if (1..=10).contains(&r) && (1..=10).contains(&col) {
                        Infinite
                    } else {
                        Finite(2)
                    }
                } else if r == col {
                    // chi(-K) = 0 and -K has no sections for ten points, so
                    // every diagonal closing is infinite here.
                    Infinite
                } else {
                    Finite(1)
                };
                assert_eq!(m.rows()[r][col].value, expected, "grid ({r}, {col})");
            }
        }
        // The only SHGH-assumed entries are the closings out of O(2F), whose
        // base cases carry multiplicities 12 and 13.
        let expected_flags: Vec<(usize, usize)> = (0..=10).map(|c| (12, c)).collect();
        assert_eq!(m.uncertified_positions(), expected_flags);
        let texts = shgh_assumptions(&c, &m);
        assert_eq!(texts.len(), 11);
        assert!(texts.iter().all(|t| t.contains("closing entry")));
    }

    #[test]
    fn pseudoheight_new11() {
        let (ph, witness) = pseudoheight(&cases::new11()).unwrap();
        assert_eq!(ph, Finite(3));
        assert_eq!(witness, Some(vec![0]));
    }

    #[test]
    fn pseudoheight_krah10() {
        let (ph, witness) = pseudoheight(&cases::krah10()).unwrap();
        assert_eq!(ph, Finite(4));
        assert_eq!(witness, Some(vec![0, 1]));
    }

    #[test]
    fn pseudoheight_orlov11() {
        let c = cases::orlov(11);
        let (ph, witness) = pseudoheight(&c).unwrap();
        assert_eq!(ph, Finite(0));
        let w = witness.unwrap();
        assert_eq!(w, vec![0, 1, 12, 13]);
        let labels: Vec<&str> = w.iter().map(|&i| c.label(i)).collect();
        assert_eq!(labels, ["O", "O(E1)", "O(H)", "O(2H)"]);
    }

    #[test]
    fn pseudoheight_is_order_sensitive() {
        let c = cases::orlov(11);
        let reversed = LineBundleCollection::new(
            c.surface(),
            c.labels().iter().rev().cloned().collect(),
            c.classes().iter().rev().cloned().collect(),
        )
        .unwrap();
        let (ph, witness) = pseudoheight(&reversed).unwrap();
        // Every forward edge dies, so only single-element chains remain.
        assert_eq!(ph, Finite(3));
        assert_eq!(witness, Some(vec![0]));
    }

    #[test]
    fn new11_multi_chains_all_cost_at_least_four() {
        let m = height_matrix(&cases::new11()).unwrap();
        let t = m.len();
        for mask in 1u32..1 << t {
            let chain: Vec<usize> = (0..t).filter(|i| mask >> i & 1 == 1).collect();
            match chain_total(&m, &chain) {
                Some(total) if chain.len() == 1 => assert_eq!(total, 3),
                Some(total) => assert!(total >= 4, "chain {chain:?} came in at {total}"),
                None => {}
            }
        }
    }

    #[test]
    fn dp_matches_brute_force_on_builtins() {
        for case in cases::NamedCase::ALL {
            let m = height_matrix(&case.collection()).unwrap();
            assert_eq!(
                pseudoheight_of_matrix(&m),
                pseudoheight_brute(&m),
                "case {}",
                case.name()
            );
        }
    }

    #[test]
    fn diagonal_chain_bound_on_builtins() {
        for case in cases::NamedCase::ALL {
            let m = height_matrix(&case.collection()).unwrap();
            let (ph, _) = pseudoheight_of_matrix(&m);
            for i in 0..m.len() {
                if let Finite(e) = m.diagonal_closing(i).value {
                    assert!(ph <= Finite(e + Surface::DIM));
                }
            }
        }
    }

    #[test]
    fn new11_certificate() {
        let c = cases::new11();
        let cert = height_certificate(&c, 14).unwrap();
        assert_eq!(cert.pseudoheight, Finite(3));
        assert_eq!(cert.height, Height::Exact { value: 3 });
        assert!(cert.criterion_fired);
        assert_eq!(cert.full, Fullness::NotFull);
        assert!(cert.maximal_length.passed);
        assert!(cert.phantom_complement);
        assert!(cert.fully_certified);
        assert_eq!(cert.witness_chain, Some(vec![0]));
        assert_eq!(cert.witness_labels, Some(vec!["O".to_string()]));
        assert!(cert.assumptions.iter().all(|a| !a.contains("SHGH")));
        assert!(cert.assumptions.iter().any(|a| a.contains("axiom")));
    }

    #[test]
    fn krah10_certificate() {
        let cert = height_certificate(&cases::krah10(), 13).unwrap();
        assert_eq!(cert.pseudoheight, Finite(4));
        assert_eq!(cert.height, Height::AtLeast { value: 4 });
        assert!(!cert.criterion_fired);
        assert_eq!(cert.full, Fullness::NotFull);
        assert!(cert.phantom_complement);
        assert!(!cert.fully_certified);
        assert_eq!(
            cert.assumptions
                .iter()
                .filter(|a| a.contains("SHGH"))
                .count(),
            11
        );
    }

    #[test]
    fn orlov11_certificate_issues_no_phantom() {
        let cert = height_certificate(&cases::orlov(11), 14).unwrap();
        assert_eq!(cert.pseudoheight, Finite(0));
        assert!(!cert.criterion_fired);
        assert_eq!(cert.height, Height::AtLeast { value: 0 });
        assert_eq!(cert.full, Fullness::Unknown);
        assert!(cert.maximal_length.passed);
        assert!(!cert.phantom_complement);
    }

    #[test]
    fn singleton_certificate() {
        let c = LineBundleCollection::new(
            Surface::new(11),
            vec!["O".to_string()],
            vec![DivisorClass::zero(11)],
        )
        .unwrap();
        let cert = height_certificate(&c, 14).unwrap();
        assert_eq!(cert.pseudoheight, Finite(3));
        assert_eq!(cert.height, Height::Exact { value: 3 });
        assert_eq!(cert.full, Fullness::NotFull);
        // Wrong length for the lattice, so no phantom claim.
        assert!(!cert.maximal_length.passed);
        assert!(!cert.phantom_complement);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        for case in cases::NamedCase::ALL {
            let c = case.collection();
            assert_eq!(
                height_matrix(&c).unwrap(),
                height_matrix_seq(&c).unwrap(),
                "case {}",
                case.name()
            );
        }
    }

    #[test]
    fn certificate_serde_round_trip() {
        let cert = height_certificate(&cases::new11(), 14).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: PhantomCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        // Schema spot checks: heights render as bare ints or "inf".
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["pseudoheight"], 3);
        assert_eq!(v["height"]["kind"], "exact");
        assert_eq!(v["height"]["value"], 3);
        assert_eq!(v["full"], "not-full");
    }

    #[test]
    fn matrix_serde_round_trip() {
        let m = height_matrix(&cases::krah10()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: HeightMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["entries"][0][0]["value"], "inf");
        assert_eq!(v["entries"][0][1]["value"], 2);
    }

    fn arb_entry() -> impl Strategy<Value = HeightEntry> {
        prop_oneof![
            3 => (0i64..=3).prop_map(|v| HeightEntry { value: Finite(v), certified: true }),
            1 => Just(HeightEntry { value: Infinite, certified: true }),
        ]
    }

    prop_compose! {
        fn arb_matrix()(t in 1usize..=7)
            (vals in prop::collection::vec(arb_entry(), t * t), t in Just(t))
            -> HeightMatrix {
            HeightMatrix {
                entries: vals.chunks(t).map(<[HeightEntry]>::to_vec).collect(),
            }
        }
    }

    proptest! {
        #[test]
        fn dp_matches_brute_force(m in arb_matrix()) {
            prop_assert_eq!(pseudoheight_of_matrix(&m), pseudoheight_brute(&m));
        }

        #[test]
        fn singleton_chains_bound_the_pseudoheight(m in arb_matrix()) {
            let (ph, _) = pseudoheight_of_matrix(&m);
            for i in 0..m.len() {
                if let Finite(e) = m.diagonal_closing(i).value {
                    prop_assert!(ph <= Finite(e + Surface::DIM));
                }
            }
        }

        #[test]
        fn witness_reproduces_the_value(m in arb_matrix()) {
            let (ph, witness) = pseudoheight_of_matrix(&m);
            match (ph, witness) {
                (Finite(v), Some(chain)) => {
                    prop_assert!(chain.windows(2).all(|w| w[0] < w[1]));
                    prop_assert_eq!(chain_total(&m, &chain), Some(v));
                }
                (Infinite, None) => {}
                (ph, witness) => {
                    prop_assert!(false, "mismatched {:?} / {:?}", ph, witness);
                }
            }
        }
    }
}

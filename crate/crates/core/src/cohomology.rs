//! Cohomology oracle for line bundles on blow-ups of the plane in general
//! points.
//!
//! `h0` reduces a class by (a) clamping negative multiplicities to zero
//! (removing fixed exceptional components, which leaves `h^0` unchanged for
//! general points), (b) sorting multiplicities descending, and (c) applying
//! quadratic Cremona transformations centered on the three largest
//! multiplicities until the class is in standard form `d >= m_1+m_2+m_3` or
//! has negative degree. In standard form `h^0 = max(0, chi)`; that identity
//! is certified for `m_1 <= 11` and otherwise marked as resting on the
//! SHGH-assumed extension. Every consumer propagates the flag.
//!
//! `h^2` comes from Serre duality (`h^2(D) = h^0(K - D)`), `h^1` from the
//! Euler characteristic; a negative `h^1` is an inconsistency and is
//! reported as a hard error, never clamped.

use crate::lattice::{cadd, cmul, csub, euler_char, serre_dual, DivisorClass};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Largest multiplicity for which the standard-form identity
/// `h^0 = max(0, chi)` is certified rather than SHGH-assumed.
pub const DEFAULT_CERTIFIED_MULT_BOUND: i64 = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("cremona step refused: {0:?} is in standard form (d >= m1+m2+m3)")]
    StandardForm(DivisorClass),
    #[error("cremona step needs multiplicities sorted descending, got {0:?}")]
    Unsorted(DivisorClass),
    #[error("cremona step needs at least three multiplicities, got {0:?}")]
    TooFewPoints(DivisorClass),
    #[error(
        "inconsistent cohomology for {class:?}: h0 = {h0}, h2 = {h2}, chi = {chi} \
         give negative h1 = {h1}"
    )]
    NegativeH1 {
        class: DivisorClass,
        h0: i64,
        h2: i64,
        chi: i64,
        h1: i64,
    },
}

/// `(h^0, h^1, h^2)` with a per-entry flag: `true` when the value rests only
/// on the certified standard-form base case, `false` when the SHGH-assumed
/// extension (`m_1 > 11` in some base case) was used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyVector {
    pub h0: i64,
    pub h1: i64,
    pub h2: i64,
    pub certified: [bool; 3],
}

impl CohomologyVector {
    pub fn dims(&self) -> [i64; 3] {
        [self.h0, self.h1, self.h2]
    }

    pub fn fully_certified(&self) -> bool {
        self.certified.iter().all(|&c| c)
    }
}

/// One step of the `h0` reduction loop. Indices refer to the working class at
/// the time of the step (the loop re-sorts multiplicities each iteration, so
/// cremona centers are always positions 0,1,2 of the sorted class).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum ReductionStep {
    Clamp { index: usize },
    Cremona { indices: [usize; 3], d_after: i64 },
    Base { class: DivisorClass, chi: i64 },
    NegativeDegreeExit { d: i64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    /// Degrees after each cremona step, in order (strictly decreasing).
    pub fn cremona_degrees(&self) -> Vec<i64> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ReductionStep::Cremona { d_after, .. } => Some(*d_after),
                _ => None,
            })
            .collect()
    }
}

/// Clamp negative multiplicities to zero: each `m_i < 0` makes `E_i` a fixed
/// component (`D.E_i = m_i < 0`), and removing it (`m_i += 1`) preserves
/// `h^0`; iterated removal is the clamp. Degree is untouched. Idempotent.
pub fn clamp_fixed_components(d: &DivisorClass) -> (DivisorClass, ReductionTrace) {
    let mut out = d.clone();
    let mut steps = Vec::new();
    for (i, v) in out.m.iter_mut().enumerate() {
        if *v < 0 {
            steps.push(ReductionStep::Clamp { index: i });
            *v = 0;
        }
    }
    (out, ReductionTrace { steps })
}

/// Quadratic Cremona transformation centered on the first three
/// multiplicities: `(2d - m1-m2-m3; d-m2-m3, d-m1-m3, d-m1-m2, m4, ..)`.
/// Preserves `D.D` and `D.K` (it is a lattice isometry fixing `K`), hence
/// `chi`; strictly decreases `d` on non-standard-form input.
pub fn cremona_step(d: &DivisorClass) -> Result<DivisorClass, OracleError> {
    if d.m.len() < 3 {
        return Err(OracleError::TooFewPoints(d.clone()));
    }
    if d.m.windows(2).any(|w| w[0] < w[1]) {
        return Err(OracleError::Unsorted(d.clone()));
    }
    let (m1, m2, m3) = (d.m[0], d.m[1], d.m[2]);
    let s = cadd(cadd(m1, m2), m3);
    if d.d >= s {
        return Err(OracleError::StandardForm(d.clone()));
    }
    let mut m = d.m.clone();
    m[0] = csub(d.d, cadd(m2, m3));
    m[1] = csub(d.d, cadd(m1, m3));
    m[2] = csub(d.d, cadd(m1, m2));
    Ok(DivisorClass::new(csub(cmul(2, d.d), s), m))
}

/// `h^0` of a line bundle for general points, with certification flag.
pub fn h0(d: &DivisorClass) -> (i64, bool) {
    let (v, c, _) = h0_traced_with_bound(d, DEFAULT_CERTIFIED_MULT_BOUND);
    (v, c)
}

pub fn h0_with_bound(d: &DivisorClass, certified_bound: i64) -> (i64, bool) {
    let (v, c, _) = h0_traced_with_bound(d, certified_bound);
    (v, c)
}

pub fn h0_traced(d: &DivisorClass) -> (i64, bool, ReductionTrace) {
    h0_traced_with_bound(d, DEFAULT_CERTIFIED_MULT_BOUND)
}

/// Full reduction loop: clamp, sort descending, exit on `d < 0` (no sections)
/// or on standard form (`h^0 = max(0, chi)`, certified iff `m_1` is within
/// `certified_bound`), else one cremona step and re-enter.
pub fn h0_traced_with_bound(
    d: &DivisorClass,
    certified_bound: i64,
) -> (i64, bool, ReductionTrace) {
    let mut cur = d.clone();
    // A cremona center needs three multiplicities; extra points with
    // multiplicity 0 change neither h^0 nor chi.
    while cur.m.len() < 3 {
        cur.m.push(0);
    }
    let mut steps = Vec::new();
    loop {
        for (i, v) in cur.m.iter_mut().enumerate() {
            if *v < 0 {
                steps.push(ReductionStep::Clamp { index: i });
                *v = 0;
            }
        }
        cur.m.sort_unstable_by(|a, b| b.cmp(a));
        if cur.d < 0 {
            steps.push(ReductionStep::NegativeDegreeExit { d: cur.d });
            return (0, true, ReductionTrace { steps });
        }
        let top = cadd(cadd(cur.m[0], cur.m[1]), cur.m[2]);
        if cur.d >= top {
            let chi = euler_char(&cur);
            let certified = cur.m[0] <= certified_bound;
            steps.push(ReductionStep::Base {
                class: cur.clone(),
                chi,
            });
            return (chi.max(0), certified, ReductionTrace { steps });
        }
        cur = cremona_step(&cur).expect("cremona precondition established by the loop");
        steps.push(ReductionStep::Cremona {
            indices: [0, 1, 2],
            d_after: cur.d,
        });
    }
}

/// `(h^0, h^1, h^2)(D)`: `h^2 = h^0(K - D)` by Serre duality,
/// `h^1 = h^0 + h^2 - chi(D)`; negative `h^1` is an inconsistency error.
pub fn cohomology(d: &DivisorClass) -> Result<CohomologyVector, OracleError> {
    cohomology_with_bound(d, DEFAULT_CERTIFIED_MULT_BOUND)
}

pub fn cohomology_with_bound(
    d: &DivisorClass,
    certified_bound: i64,
) -> Result<CohomologyVector, OracleError> {
    let (h0v, c0) = h0_with_bound(d, certified_bound);
    let (h2v, c2) = h0_with_bound(&serre_dual(d), certified_bound);
    let chi = euler_char(d);
    let h1v = csub(cadd(h0v, h2v), chi);
    if h1v < 0 {
        return Err(OracleError::NegativeH1 {
            class: d.clone(),
            h0: h0v,
            h2: h2v,
            chi,
            h1: h1v,
        });
    }
    Ok(CohomologyVector {
        h0: h0v,
        h1: h1v,
        h2: h2v,
        // h1 is derived from both ends, so it is certified only when both are.
        certified: [c0, c0 && c2, c2],
    })
}

/// For line bundles `Ext^k(O(A), O(B))` has dimension `h^k(B - A)`.
pub fn ext_dims(a: &DivisorClass, b: &DivisorClass) -> Result<CohomologyVector, OracleError> {
    cohomology(&b.sub(a))
}

/// Relative height: minimal degree with a nonzero Ext, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelativeHeight {
    Finite(i64),
    Infinite,
}

impl RelativeHeight {
    pub fn is_finite(&self) -> bool {
        matches!(self, RelativeHeight::Finite(_))
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            RelativeHeight::Finite(k) => Some(*k),
            RelativeHeight::Infinite => None,
        }
    }
}

impl PartialOrd for RelativeHeight {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RelativeHeight {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use RelativeHeight::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for RelativeHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelativeHeight::Finite(k) => write!(f, "{k}"),
            RelativeHeight::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for RelativeHeight {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            RelativeHeight::Finite(k) => ser.serialize_i64(*k),
            RelativeHeight::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for RelativeHeight {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(k) => Ok(RelativeHeight::Finite(k)),
            Raw::Str(s) if s == "inf" => Ok(RelativeHeight::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected an integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// `e(A, B)`: minimal `k` with `Ext^k(O(A), O(B)) != 0`, infinite when all
/// three vanish. The flag certifies the whole determination (all entries up
/// to and including the first nonzero one, or all three for infinite).
pub fn relative_height(
    a: &DivisorClass,
    b: &DivisorClass,
) -> Result<(RelativeHeight, bool), OracleError> {
    Ok(height_of_vector(&ext_dims(a, b)?))
}

/// Height of an already-computed vector: least degree with a nonzero entry,
/// with the certification of exactly that determination.
pub fn height_of_vector(v: &CohomologyVector) -> (RelativeHeight, bool) {
    let dims = v.dims();
    for (k, &dim) in dims.iter().enumerate() {
        if dim != 0 {
            let certified = v.certified[..=k].iter().all(|&c| c);
            return (RelativeHeight::Finite(k as i64), certified);
        }
    }
    (RelativeHeight::Infinite, v.fully_certified())
}

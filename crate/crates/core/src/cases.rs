//! Builtin named collections.
//!
//! * `new11`  — the shape collection at `(n, a, b) = (11, 1, 3)`;
//! * `krah10` — the shape collection at `(10, 2, 6)`;
//! * `orlovN` — the standard full collection `(O, O(E_1), .., O(E_n), O(H), O(2H))`
//!   on the blow-up in `N` points (its fullness is the reference axiom the
//!   phantom certificates lean on).

use crate::collection::LineBundleCollection;
use crate::diophantine::{build_collection, CollectionTemplate};
use crate::lattice::{DivisorClass, Surface};
use serde::{Deserialize, Serialize};

pub fn new11() -> LineBundleCollection {
    build_collection(&CollectionTemplate::new(11, 1, 3))
}

pub fn krah10() -> LineBundleCollection {
    build_collection(&CollectionTemplate::new(10, 2, 6))
}

/// `(O, O(E_1), .., O(E_n), O(H), O(2H))` — length `n + 3`.
pub fn orlov(n: usize) -> LineBundleCollection {
    let mut labels = vec!["O".to_string()];
    let mut classes = vec![DivisorClass::zero(n)];
    for i in 0..n {
        labels.push(format!("O(E{})", i + 1));
        classes.push(DivisorClass::exceptional(n, i));
    }
    labels.push("O(H)".to_string());
    classes.push(DivisorClass::hyperplane(n));
    labels.push("O(2H)".to_string());
    classes.push(DivisorClass::hyperplane(n).scale(2));
    LineBundleCollection::new(Surface::new(n), labels, classes)
        .expect("standard collections are well-formed by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedCase {
    New11,
    Krah10,
    Orlov10,
    Orlov11,
}

impl NamedCase {
    pub const ALL: [NamedCase; 4] = [
        NamedCase::New11,
        NamedCase::Krah10,
        NamedCase::Orlov10,
        NamedCase::Orlov11,
    ];

    pub fn parse(s: &str) -> Option<NamedCase> {
        match s {
            "new11" => Some(NamedCase::New11),
            "krah10" => Some(NamedCase::Krah10),
            "orlov10" => Some(NamedCase::Orlov10),
            "orlov11" => Some(NamedCase::Orlov11),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedCase::New11 => "new11",
            NamedCase::Krah10 => "krah10",
            NamedCase::Orlov10 => "orlov10",
            NamedCase::Orlov11 => "orlov11",
        }
    }

    pub fn collection(self) -> LineBundleCollection {
        match self {
            NamedCase::New11 => new11(),
            NamedCase::Krah10 => krah10(),
            NamedCase::Orlov10 => orlov(10),
            NamedCase::Orlov11 => orlov(11),
        }
    }

    /// The standard full collection on the same surface, used as the
    /// reference when a certificate needs a known-full collection of equal
    /// length.
    pub fn reference_full(self) -> LineBundleCollection {
        orlov(self.collection().surface().n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(new11().len(), 14);
        assert_eq!(krah10().len(), 13);
        assert_eq!(orlov(11).len(), 14);
        assert_eq!(orlov(10).len(), 13);
        assert_eq!(orlov(11).label(1), "O(E1)");
        // O(E_1) is the line bundle of the exceptional curve itself.
        assert_eq!(orlov(11).class(1), &DivisorClass::exceptional(11, 0));
        assert_eq!(crate::cohomology::h0(orlov(11).class(1)), (1, true));
        assert_eq!(orlov(11).class(13), &DivisorClass::new(2, vec![0; 11]));
    }

    #[test]
    fn names_roundtrip() {
        for case in NamedCase::ALL {
            assert_eq!(NamedCase::parse(case.name()), Some(case));
        }
        assert_eq!(NamedCase::parse("nope"), None);
    }
}

//! Ordered collections of line bundles with display labels, plus the JSON
//! interchange schema `{"n": .., "labels": [..], "divisors": [{"d","m"},..]}`.

use crate::lattice::{DivisorClass, Surface};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Bounds applied to untrusted (file) input so that every downstream checked
/// computation stays far from i64/i128 range.
pub const MAX_POINTS: usize = 1024;
pub const MAX_COEFF: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollectionError {
    #[error("collection is empty")]
    Empty,
    #[error("labels ({labels}) and divisors ({divisors}) differ in count")]
    LengthMismatch { labels: usize, divisors: usize },
    #[error("divisor {index} has {got} multiplicities, surface has n = {n}")]
    MismatchedN { index: usize, got: usize, n: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("n = {0} exceeds the supported maximum {MAX_POINTS}")]
    TooManyPoints(usize),
    #[error("divisor {index} has a coefficient {value} outside |.| <= {MAX_COEFF}")]
    CoefficientOutOfRange { index: usize, value: i64 },
    #[error("malformed collection JSON: {0}")]
    Json(String),
}

/// An ordered collection of line-bundle classes on one surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CollectionFile", into = "CollectionFile")]
pub struct LineBundleCollection {
    surface: Surface,
    labels: Vec<String>,
    classes: Vec<DivisorClass>,
}

/// Raw serde shape of the interchange schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CollectionFile {
    n: usize,
    labels: Vec<String>,
    divisors: Vec<DivisorClass>,
}

impl TryFrom<CollectionFile> for LineBundleCollection {
    type Error = CollectionError;
    fn try_from(f: CollectionFile) -> Result<Self, Self::Error> {
        LineBundleCollection::new(Surface::new(f.n), f.labels, f.divisors)
    }
}

impl From<LineBundleCollection> for CollectionFile {
    fn from(c: LineBundleCollection) -> Self {
        CollectionFile {
            n: c.surface.n,
            labels: c.labels,
            divisors: c.classes,
        }
    }
}

impl LineBundleCollection {
    pub fn new(
        surface: Surface,
        labels: Vec<String>,
        classes: Vec<DivisorClass>,
    ) -> Result<Self, CollectionError> {
        if classes.is_empty() {
            return Err(CollectionError::Empty);
        }
        if labels.len() != classes.len() {
            return Err(CollectionError::LengthMismatch {
                labels: labels.len(),
                divisors: classes.len(),
            });
        }
        for (index, c) in classes.iter().enumerate() {
            if c.n() != surface.n {
                return Err(CollectionError::MismatchedN {
                    index,
                    got: c.n(),
                    n: surface.n,
                });
            }
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(CollectionError::DuplicateLabel(l.clone()));
            }
        }
        Ok(LineBundleCollection {
            surface,
            labels,
            classes,
        })
    }

    /// Parse the interchange schema from untrusted input, with size bounds.
    pub fn from_json_str(s: &str) -> Result<Self, CollectionError> {
        let out: LineBundleCollection =
            serde_json::from_str(s).map_err(|e| CollectionError::Json(e.to_string()))?;
        out.check_bounds()?;
        Ok(out)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("collection serialization cannot fail")
    }

    fn check_bounds(&self) -> Result<(), CollectionError> {
        if self.surface.n > MAX_POINTS {
            return Err(CollectionError::TooManyPoints(self.surface.n));
        }
        for (index, c) in self.classes.iter().enumerate() {
            for &v in std::iter::once(&c.d).chain(&c.m) {
                if v.abs() > MAX_COEFF {
                    return Err(CollectionError::CoefficientOutOfRange { index, value: v });
                }
            }
        }
        Ok(())
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> &DivisorClass {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[DivisorClass] {
        &self.classes
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

//! Exact arithmetic for line bundles on the blow-up of the projective plane
//! in `n` general points, together with the certificate engines built on it:
//!
//! * [`lattice`] — Picard-lattice classes `(d; m_1..m_n)`, intersection form,
//!   Riemann-Roch Euler characteristics, Serre duality;
//! * [`cohomology`] — a sheaf-cohomology oracle for line bundles (fixed-part
//!   clamping + quadratic Cremona reduction + a certified standard-form base
//!   case), with audit traces and certification flags;
//! * [`interpolation`] — an independent brute-force `h^0` oracle via exact
//!   rational interpolation matrices, used to cross-check [`cohomology`];
//! * [`diophantine`] — the residual system cutting out numerically exceptional
//!   collections of the shape `(O, aK-E_1, .., aK-E_n, bK-H, 2(bK-H))`, and
//!   the exhaustive integer scan that solves it;
//! * [`exceptional`] — exceptionality and maximal-length verification for
//!   ordered collections of line bundles;
//! * [`heights`] — relative-height matrices, pseudoheight via exact chain
//!   minimization, and phantom-complement certificates;
//! * [`coconnective`] — dual-collection bookkeeping: Ext concentration,
//!   spectral-region audit, and kernel-triviality checks;
//! * [`report`] — machine-readable run reports with bit-stable rendering.
//!
//! All arithmetic is exact: checked 64-bit integers in the lattice layer,
//! checked 128-bit integers in the determinant/Smith routes, and arbitrary
//! precision integers in the interpolation oracle. Overflow aborts rather
//! than wrapping.
//!
//! With the default `parallel` feature the table-shaped workloads (scans,
//! pair tables, height matrices, kernel tables) run on rayon; sequential
//! siblings (`*_seq`) are always available and produce identical output.

pub mod cases;
pub mod coconnective;
pub mod cohomology;
pub mod collection;
pub mod diophantine;
pub mod exceptional;
pub mod heights;
pub mod interpolation;
pub mod intmat;
pub mod lattice;
pub(crate) mod par;
pub mod report;

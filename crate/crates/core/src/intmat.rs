//! Exact integer linear algebra over checked `i128`: fraction-free (Bareiss)
//! determinants and Smith normal form. Two independent routes to
//! unimodularity — consumers cross-check one against the other.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum IntMatError {
    #[error("integer matrix arithmetic overflowed i128")]
    Overflow,
    #[error("operation needs a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

fn cadd(a: i128, b: i128) -> Result<i128, IntMatError> {
    a.checked_add(b).ok_or(IntMatError::Overflow)
}

fn csub(a: i128, b: i128) -> Result<i128, IntMatError> {
    a.checked_sub(b).ok_or(IntMatError::Overflow)
}

fn cmul(a: i128, b: i128) -> Result<i128, IntMatError> {
    a.checked_mul(b).ok_or(IntMatError::Overflow)
}

/// Determinant by fraction-free Gaussian elimination (Bareiss); every
/// division is exact.
pub fn bareiss_det(mat: &[Vec<i128>]) -> Result<i128, IntMatError> {
    let n = mat.len();
    if mat.iter().any(|r| r.len() != n) {
        return Err(IntMatError::NotSquare {
            rows: n,
            cols: mat.first().map_or(0, |r| r.len()),
        });
    }
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = mat.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = csub(cmul(a[k][k], a[i][j])?, cmul(a[i][k], a[k][j])?)?;
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    cmul(sign, a[n - 1][n - 1])
}

/// Smith normal form: the multiset of elementary divisors (non-negative,
/// each dividing the next; trailing zeros for rank deficiency). Transform
/// matrices are not tracked.
#[allow(clippy::needless_range_loop)]
pub fn smith_normal_form(mat: &[Vec<i128>]) -> Result<Vec<i128>, IntMatError> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    assert!(
        mat.iter().all(|r| r.len() == cols),
        "ragged matrix in smith_normal_form"
    );
    let mut a: Vec<Vec<i128>> = mat.to_vec();
    let steps = rows.min(cols);
    let mut divisors = vec![0i128; steps];

    for t in 0..steps {
        // Bring the absolutely-smallest nonzero entry of the trailing block
        // to (t, t); an empty block means all remaining divisors are zero.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            // Euclidean column reduction below the pivot.
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    for j in t..cols {
                        a[i][j] = csub(a[i][j], cmul(q, a[t][j])?)?;
                    }
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Euclidean row reduction right of the pivot.
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        row[j] = csub(row[j], cmul(q, row[t])?)?;
                    }
                    if a[t][j] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Pivot must divide the whole trailing block; if not, fold the
            // offending row in and restart the reduction.
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if a[i][j] % a[t][t] != 0 {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] = cadd(a[t][j], a[i][j])?;
                    }
                }
                None => break,
            }
        }
        divisors[t] = a[t][t].abs();
    }
    Ok(divisors)
}

/// `true` iff a square matrix spans the full integer lattice (determinant
/// `±1`; equivalently all Smith divisors are 1).
pub fn is_unimodular(mat: &[Vec<i128>]) -> Result<bool, IntMatError> {
    Ok(bareiss_det(mat)?.abs() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i128]]) -> Vec<Vec<i128>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn det_basics() {
        assert_eq!(bareiss_det(&m(&[])).unwrap(), 1);
        assert_eq!(bareiss_det(&m(&[&[5]])).unwrap(), 5);
        assert_eq!(bareiss_det(&m(&[&[1, 2], &[3, 4]])).unwrap(), -2);
        assert_eq!(
            bareiss_det(&m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])).unwrap(),
            -1
        );
        assert_eq!(
            bareiss_det(&m(&[&[2, 4], &[1, 2]])).unwrap(),
            0
        );
        assert!(matches!(
            bareiss_det(&m(&[&[1, 2]])),
            Err(IntMatError::NotSquare { .. })
        ));
    }

    #[test]
    fn snf_known_matrix() {
        // Classic example with divisors (2, 6, 12).
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(smith_normal_form(&a).unwrap(), vec![2, 6, 12]);
        assert_eq!(bareiss_det(&a).unwrap().abs(), 2 * 6 * 12);
    }

    #[test]
    fn snf_rank_deficient() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(smith_normal_form(&a).unwrap(), vec![1, 0]);
        let z = m(&[&[0, 0], &[0, 0]]);
        assert_eq!(smith_normal_form(&z).unwrap(), vec![0, 0]);
    }

    #[test]
    fn snf_rectangular() {
        let a = m(&[&[2, 0, 0], &[0, 3, 0]]);
        assert_eq!(smith_normal_form(&a).unwrap(), vec![1, 6]);
    }

    #[test]
    fn unimodular_check() {
        assert!(is_unimodular(&m(&[&[1, 5], &[0, -1]])).unwrap());
        assert!(!is_unimodular(&m(&[&[2, 0], &[0, 1]])).unwrap());
    }

    proptest! {
        #[test]
        fn det_matches_snf_product(
            flat in prop::collection::vec(-5i128..=5, 16)
        ) {
            let a: Vec<Vec<i128>> = flat.chunks(4).map(|c| c.to_vec()).collect();
            let det = bareiss_det(&a).unwrap();
            let snf = smith_normal_form(&a).unwrap();
            let product: i128 = snf.iter().product();
            prop_assert_eq!(det.abs(), product.abs());
            // Divisibility chain d1 | d2 | ... (zeros at the end).
            for w in snf.windows(2) {
                if w[0] != 0 {
                    prop_assert_eq!(if w[0] == 0 { 0 } else { w[1] % w[0] }, 0);
                } else {
                    prop_assert_eq!(w[1], 0);
                }
            }
        }
    }
}

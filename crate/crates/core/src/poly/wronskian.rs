use num_traits::One;

use super::{GaussianRational, PolyError, UniPoly};

/// Determinant of a square matrix of univariate polynomials by fraction-free
/// (Bareiss) elimination with exact polynomial division.
pub fn determinant(mut m: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = m.len();
    if n == 0 {
        return UniPoly::one();
    }
    let mut sign = GaussianRational::one();
    let mut prev = UniPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            // Prefer the lowest-degree nonzero pivot to limit growth.
            let swap = (k + 1..n)
                .filter(|&i| !m[i][k].is_zero())
                .min_by_key(|&i| m[i][k].degree());
            match swap {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

/// The derivative matrix `(p_j^{(l)})_{0 ≤ l,j ≤ m}`.
pub fn derivative_matrix(ps: &[UniPoly]) -> Vec<Vec<UniPoly>> {
    let mut rows = vec![ps.to_vec()];
    for l in 1..ps.len() {
        let next = rows[l - 1].iter().map(UniPoly::derivative).collect();
        rows.push(next);
    }
    rows
}

/// Wronskian determinant of `ps`.
pub fn wronskian(ps: &[UniPoly]) -> Result<UniPoly, PolyError> {
    if ps.is_empty() {
        return Err(PolyError::Empty);
    }
    Ok(determinant(derivative_matrix(ps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn small_wronskians() {
        assert_eq!(wronskian(&[p(&[1]), p(&[0, 1]), p(&[0, 0, 1])]).unwrap(), p(&[2]));
        assert_eq!(wronskian(&[p(&[1]), p(&[0, 1])]).unwrap(), p(&[1]));
        assert_eq!(wronskian(&[p(&[0, 1]), p(&[0, 2])]).unwrap(), UniPoly::zero());
        assert!(matches!(wronskian(&[]), Err(PolyError::Empty)));
    }

    #[test]
    fn determinant_with_zero_pivot() {
        // [[0, 1], [z, 0]] has determinant -z.
        let m = vec![vec![p(&[]), p(&[1])], vec![p(&[0, 1]), p(&[])]];
        assert_eq!(determinant(m), p(&[0, -1]));
        // 3x3 integer check against the cofactor expansion.
        let c = |v: i64| p(&[v]);
        let m = vec![
            vec![c(2), c(-1), c(0)],
            vec![c(-1), c(2), c(-1)],
            vec![c(0), c(-1), c(2)],
        ];
        assert_eq!(determinant(m), c(4));
    }
}

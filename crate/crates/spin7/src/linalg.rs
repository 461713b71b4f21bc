//! Exact row reduction for the small linear systems that must not be decided
//! by a floating tolerance (spinor kernel, stabiliser algebra, flow recovery).

use crate::scalar::Scalar;

/// Reduced row-echelon form in place; returns the pivot columns.
pub(crate) fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = S::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let d = f.clone() * m[row][j].clone();
                    m[i][j] = m[i][j].clone() - d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of `{x : M x = 0}`, one vector per free column.
pub(crate) fn null_space<S: Scalar>(mut m: Vec<Vec<S>>, cols: usize) -> Vec<Vec<S>> {
    let pivots = rref(&mut m);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![S::zero(); cols];
            v[free] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// Unique solution of `M x = rhs`, or `None` when the system is
/// inconsistent or under-determined.
pub(crate) fn solve_unique<S: Scalar>(m: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    let n = m.first()?.len();
    let mut aug: Vec<Vec<S>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| aug[i][n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    #[test]
    fn kernel_and_solve() {
        let q = |n| Q::int(n);
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ns = null_space(m.clone(), 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s: Q = m[0].iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
        assert!(solve_unique(&m, &[q(1), q(2)]).is_none());
        let sq = vec![vec![q(2), q(1)], vec![q(1), q(3)], vec![q(3), q(4)]];
        assert_eq!(solve_unique(&sq, &[q(3), q(4), q(7)]), Some(vec![q(1), q(1)]));
        assert!(solve_unique(&sq, &[q(3), q(4), q(8)]).is_none());
    }
}

//! Small dense row reduction, generic over the scalar type.

use crate::scalar::Scalar;

pub(crate) struct Reduced<T> {
    /// Values of the unknowns; free unknowns are set to zero.
    pub solution: Vec<T>,
    /// Unknowns without a pivot.
    pub free: Vec<usize>,
    /// Original index and residual of the first equation left unsatisfied.
    pub inconsistent: Option<(usize, T)>,
}

/// Gauss-Jordan elimination with partial pivoting on `a x = b`.
///
/// `a` is row-major with `rows` equations of `cols` unknowns. Pivots are
/// judged against the largest coefficient magnitude, residuals against
/// `rhs_scale`.
pub(crate) fn gauss_jordan<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>, rhs_scale: &T) -> Reduced<T> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut origin: Vec<usize> = (0..rows).collect();
    let coef_scale = a
        .iter()
        .flatten()
        .map(Scalar::magnitude)
        .fold(T::zero(), |m, v| if v > m { v } else { m });

    let mut pivots = Vec::with_capacity(cols);
    let mut free = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            free.push(c);
            continue;
        }
        let (best, best_mag) = (r..rows)
            .map(|i| (i, a[i][c].magnitude()))
            .fold((r, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if T::is_negligible(&best_mag, &coef_scale) {
            free.push(c);
            continue;
        }
        a.swap(r, best);
        b.swap(r, best);
        origin.swap(r, best);

        let pivot = a[r][c].clone();
        for j in c..cols {
            a[r][j] = a[r][j].clone() / pivot.clone();
        }
        b[r] = b[r].clone() / pivot;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for j in c..cols {
                let delta = factor.clone() * a[r][j].clone();
                a[i][j] = a[i][j].clone() - delta;
            }
            b[i] = b[i].clone() - factor * b[r].clone();
        }
        pivots.push(c);
        r += 1;
    }

    let inconsistent = (r..rows)
        .find(|&i| !T::is_negligible(&b[i], rhs_scale))
        .map(|i| (origin[i], b[i].clone()));

    let mut solution = vec![T::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        solution[c] = b[row].clone();
    }
    Reduced { solution, free, inconsistent }
}

/// Solves a square system, returning `None` when it is singular.
pub(crate) fn solve_square<T: Scalar>(a: Vec<Vec<T>>, b: Vec<T>) -> Option<Vec<T>> {
    let scale = b.iter().map(Scalar::magnitude).fold(T::zero(), |m, v| if v > m { v } else { m });
    let red = gauss_jordan(a, b, &scale);
    red.free.is_empty().then_some(red.solution)
}

use super::ParamScalar;

/// A dense matrix over the parameter field, stored row-major.
pub type Matrix = Vec<Vec<ParamScalar>>;

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip().expect("nonzero pivot");
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// A basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<ParamScalar>> {
    let (a, pivots) = rref(m);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![ParamScalar::zero(); cols];
        v[free] = ParamScalar::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[i][free];
        }
        out.push(v);
    }
    out
}

/// One solution of `m x = b` with free unknowns set to zero.
pub fn solve(m: &Matrix, b: &[ParamScalar], cols: usize) -> Option<Vec<ParamScalar>> {
    let aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (a, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![ParamScalar::zero(); cols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = a[i][cols].clone();
    }
    Some(x)
}

pub fn mat_vec(m: &Matrix, x: &[ParamScalar]) -> Vec<ParamScalar> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Symbol;

    #[test]
    fn nullspace_of_parametric_matrix() {
        let p = ParamScalar::param(&Symbol::new("p"));
        let one = ParamScalar::one();
        let m = vec![vec![p.clone(), one.clone()], vec![&p * &p, p.clone()]];
        let ns = nullspace(&m, 2);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&m, &ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let one = ParamScalar::one();
        let zero = ParamScalar::zero();
        let m = vec![vec![one.clone(), zero.clone()], vec![one.clone(), zero.clone()]];
        assert!(solve(&m, &[one.clone(), zero.clone()], 2).is_none());
        assert_eq!(solve(&m, &[one.clone(), one.clone()], 2), Some(vec![one, zero]));
    }
}

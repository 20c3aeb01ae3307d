//! Exact 4x4 integer and rational linear algebra.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Mat4 = [[i128; 4]; 4];
pub type Vec4 = [i128; 4];

pub const IDENTITY: Mat4 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    out
}

pub fn mat_vec(a: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [0i128; 4];
    for i in 0..4 {
        out[i] = (0..4).map(|t| a[i][t] * v[t]).sum();
    }
    out
}

pub fn transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn minor(a: &Mat4, row: usize, col: usize) -> i128 {
    let mut m = [[0i128; 3]; 3];
    let mut r = 0;
    for i in (0..4).filter(|&i| i != row) {
        let mut c = 0;
        for j in (0..4).filter(|&j| j != col) {
            m[r][c] = a[i][j];
            c += 1;
        }
        r += 1;
    }
    det3(m)
}

pub fn det(a: &Mat4) -> i128 {
    (0..4)
        .map(|j| {
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * a[0][j] * minor(a, 0, j)
        })
        .sum()
}

/// Classical adjoint, so that `a * adjugate(a) = det(a) * I`.
pub fn adjugate(a: &Mat4) -> Mat4 {
    let mut out = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            out[j][i] = s * minor(a, i, j);
        }
    }
    out
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(cols: &[Vec4; 4]) -> Mat4 {
    let mut out = [[0i128; 4]; 4];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..4 {
            out[i][j] = c[i];
        }
    }
    out
}

pub fn primitive(v: Vec4) -> Vec4 {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g == 0 {
        return v;
    }
    let mut w = v.map(|x| x / g);
    if w.iter().find(|&&x| x != 0).copied().unwrap_or(0) < 0 {
        w = w.map(|x| -x);
    }
    w
}

/// Reduced row echelon form over `Q`; returns the pivot columns.
fn rref(rows: &[Vec4]) -> (Vec<[Ratio<i128>; 4]>, Vec<usize>) {
    let mut m: Vec<[Ratio<i128>; 4]> = rows
        .iter()
        .map(|r| r.map(Ratio::from_integer))
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..4 {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in 0..4 {
            m[row][c] *= inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col];
                for c in 0..4 {
                    let t = m[row][c] * f;
                    m[i][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

pub fn rank(rows: &[Vec4]) -> usize {
    rref(rows).1.len()
}

/// Basis of the rational kernel `{x : r . x = 0 for every row r}`, each
/// vector scaled to a primitive integer vector.
pub fn kernel(rows: &[Vec4]) -> Vec<Vec4> {
    let (m, pivots) = rref(rows);
    let free: Vec<usize> = (0..4).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = [Ratio::<i128>::zero(); 4];
            x[f] = Ratio::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f];
            }
            let l = x.iter().fold(1i128, |l, q| l.lcm(q.denom()));
            primitive(x.map(|q| (q * l).to_integer()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_adjugate() {
        let a: Mat4 = [[2, 1, 0, 3], [0, 1, 4, 1], [5, 0, 1, 0], [1, 1, 1, 1]];
        let d = det(&a);
        let p = mat_mul(&a, &adjugate(&a));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p[i][j], if i == j { d } else { 0 });
            }
        }
        assert_eq!(det(&IDENTITY), 1);
    }

    #[test]
    fn kernel_of_three_rows() {
        let rows = [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 2]];
        let k = kernel(&rows);
        assert_eq!(k, vec![[0, 1, -1, 0]]);
        assert_eq!(rank(&rows), 3);
        assert!(kernel(&[[1, 2, 3, 4], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).is_empty());
        assert_eq!(kernel(&[]).len(), 4);
    }
}

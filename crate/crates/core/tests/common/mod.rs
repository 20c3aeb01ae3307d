//! Exhaustive root search used as an oracle for the enumeration.

use num_integer::Integer;
use num_rational::Ratio;

/// The bilinear form written out as a polynomial.
pub fn b(m: i64, x: [i64; 4], y: [i64; 4]) -> i64 {
    let hyp = -(x[0] * y[1] + x[1] * y[0]);
    if m % 4 == 3 {
        hyp + 2 * x[2] * y[2] + x[2] * y[3] + x[3] * y[2] + (m + 1) / 2 * x[3] * y[3]
    } else {
        hyp + 2 * x[2] * y[2] + 2 * m * x[3] * y[3]
    }
}

fn basis(i: usize) -> [i64; 4] {
    let mut e = [0; 4];
    e[i] = 1;
    e
}

pub fn initial(m: i64) -> Vec<[i64; 4]> {
    if m % 4 == 3 {
        vec![[0, 0, -1, 0], [1, 0, 1, 0], [0, 0, 1, -2], [m, 0, -1, 2]]
    } else {
        vec![[0, 0, -1, 0], [1, 0, 1, 0], [0, 0, 0, -1], [m, 0, 0, 1]]
    }
}

/// Every primitive crystallographic root with `0 < x2` and weight squared
/// at most `bound`, by exhaustive search.
///
/// `k | 2 B(e, e_1) = -2 x2` gives `k <= 2 x2`, and `x2^2 <= bound k` then
/// bounds `x2`. A generous box on `x3, x4` covers the sector for both forms.
pub fn brute_force_roots(m: i64, bound: i64) -> Vec<(Ratio<i64>, [i64; 4])> {
    let mut out = Vec::new();
    for x2 in 1..=2 * bound {
        for k in 1..=2 * x2 {
            if x2 * x2 > bound * k {
                continue;
            }
            for x3 in -x2..=x2 {
                for x4 in -x2..=x2 {
                    // B(e,e) = -2 x1 x2 + rest, so x1 is forced.
                    let rest = b(m, [0, 0, x3, x4], [0, 0, x3, x4]);
                    if (rest - k) % (2 * x2) != 0 {
                        continue;
                    }
                    let e = [(rest - k) / (2 * x2), x2, x3, x4];
                    let content = e.iter().fold(0i64, |g, &v| g.gcd(&v));
                    if content != 1 {
                        continue;
                    }
                    if (0..4).all(|i| (2 * b(m, e, basis(i))) % k == 0) {
                        out.push((Ratio::new(x2 * x2, k), e));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

pub fn greedy(m: i64, candidates: &[(Ratio<i64>, [i64; 4])]) -> Vec<[i64; 4]> {
    let mut acc = initial(m);
    for (_, e) in candidates {
        if acc.iter().all(|&r| b(m, *e, r) <= 0) {
            acc.push(*e);
        }
    }
    acc
}

//! Fixed-size matrix helpers for phase-space maps.

pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];

/// The symplectic form `Ω = [[0, 1], [−1, 0]]`.
pub const OMEGA: Mat2 = [[0.0, 1.0], [-1.0, 0.0]];

pub fn mul2(x: &Mat2, y: &Mat2) -> Mat2 {
    core::array::from_fn(|i| core::array::from_fn(|j| x[i][0] * y[0][j] + x[i][1] * y[1][j]))
}

pub fn transpose2(x: &Mat2) -> Mat2 {
    [[x[0][0], x[1][0]], [x[0][1], x[1][1]]]
}

pub fn det2(x: &Mat2) -> f64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

pub fn trace2(x: &Mat2) -> f64 {
    x[0][0] + x[1][1]
}

pub fn apply2(x: &Mat2, v: &[f64; 2]) -> [f64; 2] {
    [x[0][0] * v[0] + x[0][1] * v[1], x[1][0] * v[0] + x[1][1] * v[1]]
}

/// `S Σ Sᵀ`.
pub fn congruence(s: &Mat2, sigma: &Mat2) -> Mat2 {
    mul2(&mul2(s, sigma), &transpose2(s))
}

/// Largest entry of `S Ω Sᵀ − Ω` in modulus.
pub fn symplectic_defect(s: &Mat2) -> f64 {
    let m = congruence(s, &OMEGA);
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((m[i][j] - OMEGA[i][j]).abs());
        }
    }
    worst
}

fn mul3(x: &Mat3, y: &Mat3) -> Mat3 {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| (0..3).map(|k| x[i][k] * y[k][j]).sum())
    })
}

fn identity3() -> Mat3 {
    core::array::from_fn(|i| core::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

fn norm1(x: &Mat3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| x[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `q X = p` by Gaussian elimination with partial pivoting.
fn solve3(q: &Mat3, p: &Mat3) -> Mat3 {
    let mut a = *q;
    let mut b = *p;
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let (pr, br) = (a[col], b[col]);
            for (x, p) in a[row].iter_mut().zip(pr).skip(col) {
                *x -= f * p;
            }
            for (x, p) in b[row].iter_mut().zip(br) {
                *x -= f * p;
            }
        }
    }
    let mut x = [[0.0; 3]; 3];
    for row in (0..3).rev() {
        for k in 0..3 {
            let s: f64 = (row + 1..3).map(|j| a[row][j] * x[j][k]).sum();
            x[row][k] = (b[row][k] - s) / a[row][row];
        }
    }
    x
}

// Diagonal Padé(8, 8) coefficients c_k = (2m−k)! m! / ((2m)! k! (m−k)!).
const PADE8: [f64; 9] = [
    1.0,
    0.5,
    0.116_666_666_666_666_67,
    0.016_666_666_666_666_666,
    0.001_602_564_102_564_102_6,
    0.000_106_837_606_837_606_84,
    4.856_254_856_254_856e-6,
    1.387_501_387_501_387_6e-7,
    1.927_085_260_418_593_7e-9,
];

/// Matrix exponential by scaling and squaring with a diagonal Padé(8, 8)
/// approximant on the scaled matrix (`‖A‖₁ ≤ 1/2`).
pub fn expm3(x: &Mat3) -> Mat3 {
    let norm = norm1(x);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = libm::ceil(libm::log2(norm / 0.5)) as u32;
    }
    let scale = libm::ldexp(1.0, -(squarings as i32));
    let a: Mat3 = core::array::from_fn(|i| core::array::from_fn(|j| x[i][j] * scale));

    let id = identity3();
    let mut num = id;
    let mut den = id;
    let mut power = id;
    for (k, c) in PADE8.iter().enumerate().skip(1) {
        power = mul3(&power, &a);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..3 {
            for j in 0..3 {
                num[i][j] += c * power[i][j];
                den[i][j] += sign * c * power[i][j];
            }
        }
    }
    let mut e = solve3(&den, &num);
    for _ in 0..squarings {
        e = mul3(&e, &e);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pade_coefficients() {
        let m = 8u64;
        let fact = |n: u64| (1..=n).map(|k| k as f64).product::<f64>();
        for k in 0..=m {
            let c = fact(2 * m - k) * fact(m) / (fact(2 * m) * fact(k) * fact(m - k));
            assert!((PADE8[k as usize] - c).abs() <= 1e-15 * c, "k={k}");
        }
    }

    #[test]
    fn rotation_generator() {
        let t = 7.3;
        let e = expm3(&[[0.0, t, 0.0], [-t, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let (s, c) = (libm::sin(t), libm::cos(t));
        let want = [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((e[i][j] - want[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn nilpotent_generator() {
        let e = expm3(&[[0.0, 2.0, 3.0], [0.0, 0.0, 5.0], [0.0, 0.0, 0.0]]);
        let want = [[1.0, 2.0, 3.0 + 5.0], [0.0, 1.0, 5.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((e[i][j] - want[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn hyperbolic_generator() {
        let r = 1.9;
        let e = expm3(&[[r, 0.0, 0.0], [0.0, -r, 0.0], [0.0, 0.0, 0.0]]);
        assert!((e[0][0] - libm::exp(r)).abs() < 1e-13 * libm::exp(r));
        assert!((e[1][1] - libm::exp(-r)).abs() < 1e-13);
    }
}

//! Exact determinants: fraction-free Bareiss elimination over integers,
//! with a rational wrapper and an i128 fast path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Fraction-free Bareiss determinant over the integers.
pub fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(pr) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, pr);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Determinant of an integer matrix, routed through an i128 Bareiss fast
/// path and falling back to big integers on overflow.
pub fn det_int(m: &[Vec<i128>]) -> BigInt {
    if let Ok(d) = det_i128_checked(m.to_vec()) {
        return BigInt::from(d);
    }
    let big: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    det_bigint(big)
}

/// Bareiss over i128; errors when an intermediate product would overflow.
fn det_i128_checked(mut m: Vec<Vec<i128>>) -> Result<i128, ()> {
    if m.is_empty() {
        return Ok(1);
    }
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(pr) => {
                    m.swap(k, pr);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k]).ok_or(())?;
                let b = m[i][k].checked_mul(m[k][j]).ok_or(())?;
                m[i][j] = a.checked_sub(b).ok_or(())? / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Exact determinant of a rational matrix: rows are cleared to integers
/// and the scale is divided back out of the Bareiss result.
pub fn det_exact(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigInt::one();
    let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in m {
        let mut lcm = BigInt::one();
        for x in row {
            lcm = num_integer::lcm(lcm, x.denom().abs());
        }
        scale *= &lcm;
        int_rows.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
    }
    BigRational::new(det_bigint(int_rows), scale)
}

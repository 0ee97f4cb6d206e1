//! Arithmetic and dense linear algebra over a 64-bit prime field.

/// Multiplication mod p via 128-bit widening.
#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a.wrapping_add(b);
    if s >= p || s < a {
        s.wrapping_sub(p)
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

pub fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat; requires p prime and a not divisible by p.
pub fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    // This witness set decides primality for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Determinant of a square matrix over F_p, by Gaussian elimination.
/// Consumes the matrix buffer.
pub fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] % p != 0);
        let Some(pr) = pivot else { return 0 };
        if pr != col {
            m.swap(pr, col);
            det = submod(0, det, p);
        }
        let inv = invmod(m[col][col] % p, p);
        det = mulmod(det, m[col][col] % p, p);
        for r in col + 1..n {
            if m[r][col] % p == 0 {
                continue;
            }
            let factor = mulmod(m[r][col] % p, inv, p);
            for c in col..n {
                let sub = mulmod(factor, m[col][c] % p, p);
                m[r][c] = submod(m[r][c] % p, sub, p);
            }
        }
    }
    det
}

/// Incremental rank tracker over F_p: columns are inserted one at a time
/// and accepted when they enlarge the span.
pub struct RankTracker {
    p: u64,
    /// Reduced rows in echelon form, each paired with its pivot position.
    rows: Vec<(usize, Vec<u64>)>,
}

impl RankTracker {
    pub fn new(p: u64) -> Self {
        RankTracker {
            p,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; if a nonzero residue remains the
    /// vector is added to the basis and `true` is returned.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (pivot, row) in &self.rows {
            if v[*pivot] != 0 {
                let factor = v[*pivot];
                for (x, y) in v.iter_mut().zip(row) {
                    *x = submod(*x, mulmod(factor, *y, p), p);
                }
            }
        }
        if let Some(pivot) = v.iter().position(|&x| x != 0) {
            let inv = invmod(v[pivot], p);
            for x in v.iter_mut() {
                *x = mulmod(*x, inv, p);
            }
            self.rows.push((pivot, v));
            true
        } else {
            false
        }
    }
}

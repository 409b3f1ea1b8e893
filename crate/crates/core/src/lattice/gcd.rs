//! Extended Euclid with a reproducible choice of Bézout coefficients.

use super::LatticeError;

/// `gcd(a, b) ≥ 0` with `gcd(0, k) = |k|`.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

/// Extended gcd: `(g, s, t)` with `a·s + b·t = g = gcd(a, b)`.
///
/// Among all Bézout pairs `(s + k·b/g, t − k·a/g)` the one of minimal
/// `s² + t²` is returned; on a tie the pair with `t ≥ 0` wins, then the
/// smaller `s`. For `a = b = 0` the result is `(0, 0, 0)`.
pub fn ext_gcd(a: i64, b: i64) -> Result<(i64, i64, i64), LatticeError> {
    if a == 0 && b == 0 {
        return Ok((0, 0, 0));
    }
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    let g = r0;
    let (da, db) = (a as i128 / g, b as i128 / g);
    // continuous minimiser of |(s0 + k db, t0 - k da)|²
    let denom = (da * da + db * db) as f64;
    let k_star = -((s0 * db - t0 * da) as f64) / denom;
    let base = k_star.floor() as i128;
    let mut best: Option<(i128, i128, i128)> = None;
    for k in base - 1..=base + 2 {
        let s = s0 + k * db;
        let t = t0 - k * da;
        let norm = s * s + t * t;
        let better = match best {
            None => true,
            Some((bs, bt, bn)) => {
                norm < bn || (norm == bn && ((t >= 0 && bt < 0) || ((t >= 0) == (bt >= 0) && s < bs)))
            }
        };
        if better {
            best = Some((s, t, norm));
        }
    }
    let (s, t, _) = best.expect("candidate range is non-empty");
    Ok((to_i64(g)?, to_i64(s)?, to_i64(t)?))
}

fn to_i64(x: i128) -> Result<i64, LatticeError> {
    i64::try_from(x).map_err(|_| LatticeError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conventions() {
        assert_eq!(gcd(0, -7), 7);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd3(2, 4, 6), 2);
        assert_eq!(ext_gcd(0, 0).unwrap(), (0, 0, 0));
        assert_eq!(ext_gcd(0, -5).unwrap(), (5, 0, -1));
        assert_eq!(ext_gcd(2, 5).unwrap(), (1, -2, 1));
    }

    proptest! {
        #[test]
        fn bezout_identity(a in -1000i64..1000, b in -1000i64..1000) {
            let (g, s, t) = ext_gcd(a, b).unwrap();
            prop_assert_eq!(g, gcd(a, b));
            prop_assert_eq!(a * s + b * t, g);
        }

        #[test]
        fn pair_is_minimal(a in -200i64..200, b in -200i64..200) {
            prop_assume!(a != 0 || b != 0);
            let (g, s, t) = ext_gcd(a, b).unwrap();
            let norm = s * s + t * t;
            for k in -50i64..=50 {
                let s2 = s + k * (b / g);
                let t2 = t - k * (a / g);
                prop_assert!(s2 * s2 + t2 * t2 >= norm);
            }
        }
    }
}

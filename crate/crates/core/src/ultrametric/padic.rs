use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{Form, UltrametricError, UltrametricMatrix};
use crate::extended::Extended;
use crate::scalar::{rational_pow, render_rational};

/// Valuations beyond this magnitude are refused rather than materialised as `p^a`.
pub const MAX_VALUATION: i64 = 4096;

const PRIME_LIMIT: u64 = 1 << 31;

/// Trial division; inputs above 2^31 are rejected by callers.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<(), UltrametricError> {
    if p >= PRIME_LIMIT || !is_prime(p) {
        return Err(UltrametricError::NotPrime(p));
    }
    Ok(())
}

fn count_factor(n: &BigInt, p: &BigInt) -> Result<i64, UltrametricError> {
    let mut rest = n.abs();
    let mut count = 0i64;
    loop {
        let (quot, rem) = rest.div_rem(p);
        if !rem.is_zero() {
            return Ok(count);
        }
        rest = quot;
        count += 1;
        if count > MAX_VALUATION {
            return Err(UltrametricError::CapacityError(format!("valuation exceeds {MAX_VALUATION}")));
        }
    }
}

/// The exponent `a` in `q = p^a · r/s` with `p ∤ r s`; `None` for `q = 0`.
pub fn padic_valuation(q: &BigRational, p: u64) -> Result<Option<i64>, UltrametricError> {
    check_prime(p)?;
    if q.is_zero() {
        return Ok(None);
    }
    let pb = BigInt::from(p);
    Ok(Some(count_factor(q.numer(), &pb)? - count_factor(q.denom(), &pb)?))
}

/// `||q||_p = p^{-a}`, with `||0||_p = 0`.
pub fn padic_norm(q: &BigRational, p: u64) -> Result<BigRational, UltrametricError> {
    match padic_valuation(q, p)? {
        None => Ok(BigRational::zero()),
        Some(a) => Ok(rational_pow(&BigRational::from_integer(BigInt::from(p)), -a)),
    }
}

/// Matrix of `||x - y||_p` over the given rationals, labelled by their values.
pub fn padic_sample(points: &[BigRational], p: u64) -> Result<UltrametricMatrix<BigRational>, UltrametricError> {
    let n = points.len();
    let mut d = vec![vec![Extended::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = Extended::Finite(padic_norm(&(&points[i] - &points[j]), p)?);
            d[j][i] = v.clone();
            d[i][j] = v;
        }
    }
    UltrametricMatrix::new(points.iter().map(render_rational).collect(), d, Form::MaxForm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn q(t: &str) -> BigRational {
        parse_rational(t).unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(padic_norm(&q("1/8"), 2).unwrap(), q("8"));
        assert_eq!(padic_norm(&q("0"), 5).unwrap(), q("0"));
        assert_eq!(padic_norm(&q("12/5"), 2).unwrap(), q("1/4"));
        assert_eq!(padic_norm(&q("-7"), 7).unwrap(), q("1/7"));
        for p in [2u64, 3, 5, 7] {
            for n in 0..6 {
                let x = rational_pow(&BigRational::from_integer(p.into()), -n);
                assert_eq!(padic_norm(&x, p).unwrap(), rational_pow(&BigRational::from_integer(p.into()), n));
            }
        }
    }

    #[test]
    fn rejects_non_primes() {
        assert_eq!(padic_norm(&q("1"), 4), Err(UltrametricError::NotPrime(4)));
        assert_eq!(padic_norm(&q("1"), 1), Err(UltrametricError::NotPrime(1)));
        assert_eq!(padic_norm(&q("1"), 1 << 31), Err(UltrametricError::NotPrime(1 << 31)));
        assert!(is_prime(2_147_483_647));
    }

    #[test]
    fn huge_valuations_hit_capacity() {
        let x = rational_pow(&q("2"), MAX_VALUATION + 1);
        assert!(matches!(padic_norm(&x, 2), Err(UltrametricError::CapacityError(_))));
    }
}

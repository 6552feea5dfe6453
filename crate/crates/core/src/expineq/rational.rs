//! Small helpers on `BigRational`: string form for certificates and
//! outward rounding to a fixed number of significant bits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `numerator/denominator`, or just `numerator` for integers.
pub fn to_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n.trim().parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.trim().parse().ok()?)),
    }
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: compare bit lengths first.
        let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
        if shift > 1100 {
            if q.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            0.0
        }
    })
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// `q · 2^e` for signed `e`.
fn scale_pow2(q: &Q, e: i64) -> Q {
    if e >= 0 {
        q * Q::from_integer(pow2(e as u64))
    } else {
        q / Q::from_integer(pow2((-e) as u64))
    }
}

fn rounding_shift(q: &Q, bits: u32) -> i64 {
    let mag = q.numer().bits() as i64 - q.denom().bits() as i64;
    bits as i64 - mag
}

/// Largest dyadic with `bits` significant bits that is `<= q`.
pub fn round_down(q: &Q, bits: u32) -> Q {
    if q.is_zero() {
        return Q::zero();
    }
    let shift = rounding_shift(q, bits);
    let m = scale_pow2(q, shift).floor();
    scale_pow2(&m, -shift)
}

/// Smallest dyadic with `bits` significant bits that is `>= q`.
pub fn round_up(q: &Q, bits: u32) -> Q {
    if q.is_zero() {
        return Q::zero();
    }
    let shift = rounding_shift(q, bits);
    let m = scale_pow2(q, shift).ceil();
    scale_pow2(&m, -shift)
}

/// Positive content of a list of rationals: the value `c > 0` such that
/// dividing by `c` leaves coprime integers.
pub fn content<'a>(coeffs: impl IntoIterator<Item = &'a Q>) -> Q {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in coeffs {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    if num.is_zero() {
        Q::one()
    } else {
        Q::new(num, den)
    }
}

pub mod serde_q {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod serde_opt_q {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&to_string(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(s) => parse(&s)
                .map(Some)
                .ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))),
            None => Ok(None),
        }
    }
}

pub mod serde_vec_q {
    use super::*;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&to_string(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_brackets() {
        let third = frac(1, 3);
        let lo = round_down(&third, 20);
        let hi = round_up(&third, 20);
        assert!(lo < third && third < hi);
        assert!(&hi - &lo < frac(1, 1 << 20));
        let d = lo.denom().magnitude().clone();
        assert_eq!(&d & (&d - 1u32), num_bigint::BigUint::from(0u32));
        assert_eq!(round_down(&int(5), 20), int(5));
        let neg = frac(-7, 3);
        assert!(round_down(&neg, 10) <= neg && neg <= round_up(&neg, 10));
    }

    #[test]
    fn string_round_trip() {
        for q in [frac(-7, 3), int(12), frac(1, 1 << 40)] {
            assert_eq!(parse(&to_string(&q)).unwrap(), q);
        }
        assert!(parse("1/0").is_none());
        assert_eq!(content([&frac(2, 3), &frac(-4, 9)].into_iter()), frac(2, 9));
    }
}

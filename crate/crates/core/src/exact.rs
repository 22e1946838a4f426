//! Exact rational helpers: binomials, `"p/q"` formatting and serde glue.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = BigRational;

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Lowest-terms `"num/den"`, always with an explicit denominator.
pub fn fmt_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Option<Rational> {
    let (n, d) = s.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

pub mod ratio_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod opt_ratio_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&fmt_ratio(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| {
            parse_ratio(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
        })
        .transpose()
    }
}

/// Index lists are 0-based in memory and 1-based on the wire.
pub mod one_based {
    use serde::ser::SerializeSeq;

    use super::*;

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&(x + 1))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        v.into_iter()
            .map(|x| {
                x.checked_sub(1)
                    .ok_or_else(|| serde::de::Error::custom("indices are 1-based; got 0"))
            })
            .collect()
    }
}

pub mod one_based_nested {
    use serde::ser::SerializeSeq;

    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<usize>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for inner in v {
            let shifted: Vec<usize> = inner.iter().map(|x| x + 1).collect();
            seq.serialize_element(&shifted)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<usize>>, D::Error> {
        let v = Vec::<Vec<usize>>::deserialize(d)?;
        v.into_iter()
            .map(|inner| {
                inner
                    .into_iter()
                    .map(|x| {
                        x.checked_sub(1)
                            .ok_or_else(|| serde::de::Error::custom("indices are 1-based; got 0"))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Bit-mask helpers for small index sets.
pub fn mask_of(items: &[usize]) -> u64 {
    items.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

pub fn items_of(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// All `k`-subsets of `0..n` as masks, in increasing numeric order (Gosper's hack).
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n < 64);
    let limit = 1u64 << n;
    let mut cur = if k == 0 {
        Some(0u64)
    } else if k > n {
        None
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let v = cur?;
        cur = if v == 0 {
            None
        } else {
            let c = v & v.wrapping_neg();
            let r = v + c;
            let next = (((r ^ v) >> 2) / c) | r;
            (next < limit).then_some(next)
        };
        Some(v)
    })
}

/// All `k`-subsets of `items` (as sorted vectors), lexicographic in positions.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len() - need {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.into());
        assert_eq!(binom(4, 0), 1.into());
        assert_eq!(binom(0, 0), 1.into());
        assert_eq!(binom(3, 4), 0.into());
        assert_eq!(binom(3, -1), 0.into());
        assert_eq!(binom(30, 15), 155_117_520.into());
    }

    #[test]
    fn ratio_format_keeps_denominator() {
        assert_eq!(fmt_ratio(&ratio(4, 2)), "2/1");
        assert_eq!(fmt_ratio(&ratio(2, 5)), "2/5");
        assert_eq!(parse_ratio("6/15"), Some(ratio(2, 5)));
        assert_eq!(parse_ratio("1/0"), None);
    }

    #[test]
    fn gosper_counts() {
        for n in 0..10 {
            for k in 0..=n + 1 {
                let subs: Vec<u64> = subsets_of_size(n, k).collect();
                assert_eq!(
                    subs.len() as u64,
                    binom(n as i64, k as i64).try_into().unwrap_or(0u64)
                );
                assert!(subs
                    .iter()
                    .all(|m| m.count_ones() as usize == k && *m < (1 << n)));
            }
        }
    }

    #[test]
    fn combinations_match_binomial() {
        let items = [1, 3, 5, 7, 9];
        for k in 0..=6 {
            let c = combinations(&items, k);
            assert_eq!(c.len() as u64, u64::try_from(binom(5, k as i64)).unwrap());
        }
        assert_eq!(combinations(&items, 2)[0], vec![1, 3]);
    }
}

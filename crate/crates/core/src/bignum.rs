//! Arbitrary-precision natural numbers built on the four schoolbook
//! algorithms: addition with carry, subtraction with borrow, long
//! multiplication and long division.
//!
//! Values are stored as little-endian `u32` limbs (radix 2^32), so a limb
//! product plus two carries always fits in a `u64`. Zero is the empty limb
//! vector and no value ever carries a most-significant zero limb.
//!
//! Every kernel has a `*_counted` twin that also returns the number of
//! inner-loop limb steps it executed. The plain functions call the same
//! kernels and discard the count.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Rem, Sub};
use std::str::FromStr;

use thiserror::Error;

/// A single limb.
pub type Limb = u32;
/// Twice the width of a limb.
pub type DoubleLimb = u64;

/// Bits per limb.
pub const LIMB_BITS: u32 = Limb::BITS;

/// Largest power of ten below the limb radix, and its exponent.
const DECIMAL_CHUNK: Limb = 1_000_000_000;
const DECIMAL_CHUNK_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BignumError {
    #[error("subtraction underflow: subtrahend exceeds minuend")]
    Underflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error(transparent)]
    Parse(#[from] ParseNaturalError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseNaturalError {
    #[error("cannot parse a natural number from an empty string")]
    Empty,
    #[error("invalid digit {found:?} at byte offset {offset}")]
    InvalidDigit { found: char, offset: usize },
}

/// An arbitrary-precision unsigned integer.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Natural {
    limbs: Vec<Limb>,
}

/// Quotient and remainder of a long division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivModResult {
    pub quotient: Natural,
    pub remainder: Natural,
}

impl Natural {
    pub const fn zero() -> Self {
        Natural { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        Natural { limbs: vec![1] }
    }

    /// Builds a value from little-endian limbs, dropping high zero limbs.
    pub fn from_limbs(mut limbs: Vec<Limb>) -> Self {
        trim(&mut limbs);
        Natural { limbs }
    }

    pub fn limbs(&self) -> &[Limb] {
        &self.limbs
    }

    /// Number of limbs; zero has none.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.limbs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Returns the value as a `u64` if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.as_slice() {
            [] => Some(0),
            [lo] => Some(u64::from(*lo)),
            [lo, hi] => Some(u64::from(*lo) | (u64::from(*hi) << LIMB_BITS)),
            _ => None,
        }
    }

    /// Returns the value as a `u128` if it fits.
    pub fn to_u128(&self) -> Option<u128> {
        if self.limbs.len() > 4 {
            return None;
        }
        Some(
            self.limbs
                .iter()
                .rev()
                .fold(0u128, |acc, &l| (acc << LIMB_BITS) | u128::from(l)),
        )
    }

    /// True when there is no most-significant zero limb. Always holds for
    /// values built through this module.
    pub fn is_canonical(&self) -> bool {
        self.limbs.last() != Some(&0)
    }
}

fn trim(limbs: &mut Vec<Limb>) {
    while limbs.last() == Some(&0) {
        limbs.pop();
    }
}

impl From<u32> for Natural {
    fn from(v: u32) -> Self {
        Natural::from(u64::from(v))
    }
}

impl From<u64> for Natural {
    fn from(v: u64) -> Self {
        Natural::from_limbs(vec![v as Limb, (v >> LIMB_BITS) as Limb])
    }
}

impl From<u128> for Natural {
    fn from(v: u128) -> Self {
        let limbs = (0..4).map(|i| (v >> (i * LIMB_BITS)) as Limb).collect();
        Natural::from_limbs(limbs)
    }
}

/// Numeric comparison. Canonical form lets the limb count decide first.
pub fn compare(x: &Natural, y: &Natural) -> Ordering {
    x.limbs
        .len()
        .cmp(&y.limbs.len())
        .then_with(|| x.limbs.iter().rev().cmp(y.limbs.iter().rev()))
}

impl Ord for Natural {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for Natural {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Schoolbook addition with carry.
pub fn add(x: &Natural, y: &Natural) -> Natural {
    add_counted(x, y).0
}

/// [`add`], also returning the number of limb steps taken.
pub fn add_counted(x: &Natural, y: &Natural) -> (Natural, u64) {
    let (long, short) = if x.len() >= y.len() {
        (&x.limbs, &y.limbs)
    } else {
        (&y.limbs, &x.limbs)
    };
    let mut out = Vec::with_capacity(long.len() + 1);
    let mut carry: DoubleLimb = 0;
    let mut steps = 0u64;
    for (i, &a) in long.iter().enumerate() {
        let b = short.get(i).copied().unwrap_or(0);
        let sum = DoubleLimb::from(a) + DoubleLimb::from(b) + carry;
        out.push(sum as Limb);
        carry = sum >> LIMB_BITS;
        steps += 1;
    }
    if carry != 0 {
        out.push(carry as Limb);
        steps += 1;
    }
    (Natural { limbs: out }, steps)
}

/// `x + k` for a single limb `k`; the carry chain stops as soon as it dies.
pub fn add_limb(x: &Natural, k: Limb) -> Natural {
    add_limb_counted(x, k).0
}

/// [`add_limb`], also returning the number of limb steps taken.
pub fn add_limb_counted(x: &Natural, k: Limb) -> (Natural, u64) {
    let mut out = Vec::with_capacity(x.len() + 1);
    let mut carry = k;
    let mut steps = 0u64;
    let mut rest = x.limbs.iter();
    for &l in rest.by_ref() {
        let (sum, overflow) = l.overflowing_add(carry);
        out.push(sum);
        steps += 1;
        carry = Limb::from(overflow);
        if carry == 0 {
            break;
        }
    }
    out.extend(rest);
    if carry != 0 {
        out.push(carry);
        steps += 1;
    }
    (Natural { limbs: out }, steps)
}

/// `x + x`, computed by self-addition.
pub fn double(x: &Natural) -> Natural {
    add(x, x)
}

/// Schoolbook subtraction with borrow. Fails when `y > x`.
pub fn sub(x: &Natural, y: &Natural) -> Result<Natural, BignumError> {
    sub_counted(x, y).map(|(d, _)| d)
}

/// [`sub`], also returning the number of limb steps taken.
pub fn sub_counted(x: &Natural, y: &Natural) -> Result<(Natural, u64), BignumError> {
    if compare(x, y) == Ordering::Less {
        return Err(BignumError::Underflow);
    }
    let mut out = Vec::with_capacity(x.len());
    let mut borrow: Limb = 0;
    let mut steps = 0u64;
    for (i, &a) in x.limbs.iter().enumerate() {
        let b = y.limbs.get(i).copied().unwrap_or(0);
        let (d1, o1) = a.overflowing_sub(b);
        let (d2, o2) = d1.overflowing_sub(borrow);
        out.push(d2);
        borrow = Limb::from(o1 || o2);
        steps += 1;
    }
    debug_assert_eq!(borrow, 0);
    trim(&mut out);
    Ok((Natural { limbs: out }, steps))
}

/// Schoolbook long multiplication.
pub fn mul(x: &Natural, y: &Natural) -> Natural {
    mul_counted(x, y).0
}

/// [`mul`], also returning the number of limb multiply-accumulate steps.
pub fn mul_counted(x: &Natural, y: &Natural) -> (Natural, u64) {
    if x.is_zero() || y.is_zero() {
        return (Natural::zero(), 0);
    }
    let mut out = vec![0 as Limb; x.len() + y.len()];
    let mut steps = 0u64;
    for (i, &a) in x.limbs.iter().enumerate() {
        let a = DoubleLimb::from(a);
        let mut carry: DoubleLimb = 0;
        for (j, &b) in y.limbs.iter().enumerate() {
            // (R-1)^2 + 2(R-1) = R^2 - 1, so this never overflows.
            let t = a * DoubleLimb::from(b) + DoubleLimb::from(out[i + j]) + carry;
            out[i + j] = t as Limb;
            carry = t >> LIMB_BITS;
            steps += 1;
        }
        out[i + y.len()] = carry as Limb;
        steps += 1;
    }
    trim(&mut out);
    (Natural { limbs: out }, steps)
}

/// Schoolbook long division. Fails on a zero divisor.
pub fn divmod(dividend: &Natural, divisor: &Natural) -> Result<DivModResult, BignumError> {
    divmod_counted(dividend, divisor).map(|(r, _)| r)
}

/// [`divmod`], also returning the number of limb steps taken.
pub fn divmod_counted(
    dividend: &Natural,
    divisor: &Natural,
) -> Result<(DivModResult, u64), BignumError> {
    if divisor.is_zero() {
        return Err(BignumError::DivisionByZero);
    }
    if compare(dividend, divisor) == Ordering::Less {
        let r = DivModResult {
            quotient: Natural::zero(),
            remainder: dividend.clone(),
        };
        return Ok((r, 0));
    }
    if divisor.len() == 1 {
        let (quotient, rem, steps) = div_rem_limb(dividend, divisor.limbs[0]);
        let r = DivModResult {
            quotient,
            remainder: Natural::from(rem),
        };
        return Ok((r, steps));
    }
    Ok(long_divide(&dividend.limbs, &divisor.limbs))
}

/// Short division by a single nonzero limb.
fn div_rem_limb(x: &Natural, d: Limb) -> (Natural, Limb, u64) {
    debug_assert!(d != 0);
    let d = DoubleLimb::from(d);
    let mut q = vec![0 as Limb; x.len()];
    let mut rem: DoubleLimb = 0;
    for (i, &l) in x.limbs.iter().enumerate().rev() {
        let cur = (rem << LIMB_BITS) | DoubleLimb::from(l);
        q[i] = (cur / d) as Limb;
        rem = cur % d;
    }
    trim(&mut q);
    (Natural { limbs: q }, rem as Limb, x.len() as u64)
}

/// Long division for a divisor of at least two limbs, `u >= v`.
///
/// Each quotient limb is estimated from the top two remainder limbs and
/// the top divisor limb, refined against the second divisor limb (at most
/// two decrements), then fixed by one add-back if the multiply-subtract
/// went negative.
fn long_divide(u: &[Limb], v: &[Limb]) -> (DivModResult, u64) {
    const RADIX: DoubleLimb = 1 << LIMB_BITS;
    const MASK: DoubleLimb = RADIX - 1;

    let n = v.len();
    let m = u.len() - n;
    let shift = v[n - 1].leading_zeros();

    // Normalize so the top divisor limb has its high bit set.
    let vn = shl_bits(v, shift, false);
    let mut un = shl_bits(u, shift, true);
    let mut q = vec![0 as Limb; m + 1];
    let mut steps = 0u64;

    let v_top = DoubleLimb::from(vn[n - 1]);
    let v_next = DoubleLimb::from(vn[n - 2]);

    for j in (0..=m).rev() {
        let num = (DoubleLimb::from(un[j + n]) << LIMB_BITS) | DoubleLimb::from(un[j + n - 1]);
        let mut qhat = num / v_top;
        let mut rhat = num % v_top;
        while qhat >= RADIX
            || qhat * v_next > ((rhat << LIMB_BITS) | DoubleLimb::from(un[j + n - 2]))
        {
            qhat -= 1;
            rhat += v_top;
            if rhat >= RADIX {
                break;
            }
        }

        // Multiply and subtract qhat * vn from un[j..=j+n].
        let mut borrow: i64 = 0;
        for i in 0..n {
            let p = qhat * DoubleLimb::from(vn[i]);
            let t = i64::from(un[i + j]) - borrow - (p & MASK) as i64;
            un[i + j] = t as Limb;
            borrow = (p >> LIMB_BITS) as i64 - (t >> LIMB_BITS);
            steps += 1;
        }
        let t = i64::from(un[j + n]) - borrow;
        un[j + n] = t as Limb;

        if t < 0 {
            qhat -= 1;
            let mut carry: DoubleLimb = 0;
            for i in 0..n {
                let s = DoubleLimb::from(un[i + j]) + DoubleLimb::from(vn[i]) + carry;
                un[i + j] = s as Limb;
                carry = s >> LIMB_BITS;
                steps += 1;
            }
            un[j + n] = un[j + n].wrapping_add(carry as Limb);
        }
        q[j] = qhat as Limb;
    }

    let mut rem = shr_bits(&un[..n], shift);
    trim(&mut rem);
    trim(&mut q);
    let r = DivModResult {
        quotient: Natural { limbs: q },
        remainder: Natural { limbs: rem },
    };
    (r, steps)
}

fn shl_bits(x: &[Limb], shift: u32, extra_limb: bool) -> Vec<Limb> {
    let mut out = Vec::with_capacity(x.len() + 1);
    if shift == 0 {
        out.extend_from_slice(x);
        if extra_limb {
            out.push(0);
        }
        return out;
    }
    let mut carry: Limb = 0;
    for &l in x {
        out.push((l << shift) | carry);
        carry = l >> (LIMB_BITS - shift);
    }
    if extra_limb {
        out.push(carry);
    } else {
        debug_assert_eq!(carry, 0);
    }
    out
}

fn shr_bits(x: &[Limb], shift: u32) -> Vec<Limb> {
    if shift == 0 {
        return x.to_vec();
    }
    let mut out = vec![0 as Limb; x.len()];
    for i in 0..x.len() {
        let hi = x.get(i + 1).map_or(0, |&h| h << (LIMB_BITS - shift));
        out[i] = (x[i] >> shift) | hi;
    }
    out
}

/// Parses a string of ASCII decimal digits. Leading zeros are accepted.
pub fn from_decimal(text: &str) -> Result<Natural, ParseNaturalError> {
    if text.is_empty() {
        return Err(ParseNaturalError::Empty);
    }
    if let Some((offset, found)) = text.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        return Err(ParseNaturalError::InvalidDigit { found, offset });
    }
    let bytes = text.as_bytes();
    let head = match bytes.len() % DECIMAL_CHUNK_DIGITS {
        0 => DECIMAL_CHUNK_DIGITS,
        r => r,
    };
    let mut limbs: Vec<Limb> = Vec::with_capacity(bytes.len() / DECIMAL_CHUNK_DIGITS + 1);
    let mut start = 0;
    let mut end = head;
    while start < bytes.len() {
        let chunk = bytes[start..end]
            .iter()
            .fold(0 as Limb, |acc, &b| acc * 10 + Limb::from(b - b'0'));
        mul_small_add_in_place(&mut limbs, DECIMAL_CHUNK, chunk);
        start = end;
        end += DECIMAL_CHUNK_DIGITS;
    }
    trim(&mut limbs);
    Ok(Natural { limbs })
}

/// `limbs = limbs * m + a` for single-limb `m` and `a`.
fn mul_small_add_in_place(limbs: &mut Vec<Limb>, m: Limb, a: Limb) {
    let m = DoubleLimb::from(m);
    let mut carry = DoubleLimb::from(a);
    for l in limbs.iter_mut() {
        let t = DoubleLimb::from(*l) * m + carry;
        *l = t as Limb;
        carry = t >> LIMB_BITS;
    }
    if carry != 0 {
        limbs.push(carry as Limb);
    }
}

/// Renders the value in decimal by repeated short division by 10^9.
pub fn to_decimal(x: &Natural) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let mut chunks = Vec::new();
    let mut rest = x.clone();
    while !rest.is_zero() {
        let (q, r, _) = div_rem_limb(&rest, DECIMAL_CHUNK);
        chunks.push(r);
        rest = q;
    }
    let mut out = String::with_capacity(chunks.len() * DECIMAL_CHUNK_DIGITS);
    let mut iter = chunks.iter().rev();
    if let Some(top) = iter.next() {
        out.push_str(&top.to_string());
    }
    for c in iter {
        out.push_str(&format!("{c:09}"));
    }
    out
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad_integral(true, "", &to_decimal(self))
    }
}

impl fmt::Debug for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Natural({})", to_decimal(self))
    }
}

impl FromStr for Natural {
    type Err = ParseNaturalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        from_decimal(s)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, |$x:ident, $y:ident| $body:expr) => {
        impl $trait<&Natural> for &Natural {
            type Output = Natural;

            fn $method(self, rhs: &Natural) -> Natural {
                let ($x, $y) = (self, rhs);
                $body
            }
        }

        impl $trait<Natural> for Natural {
            type Output = Natural;

            fn $method(self, rhs: Natural) -> Natural {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| add(x, y));
forward_binop!(Mul, mul, |x, y| mul(x, y));
forward_binop!(Sub, sub, |x, y| sub(x, y).expect("natural subtraction underflow"));
forward_binop!(Div, div, |x, y| divmod(x, y).expect("division by zero").quotient);
forward_binop!(Rem, rem, |x, y| divmod(x, y).expect("division by zero").remainder);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n(v: u128) -> Natural {
        Natural::from(v)
    }

    fn pow2(k: u32) -> Natural {
        // Independent of `double`: set the bit directly.
        let mut limbs = vec![0; (k / LIMB_BITS) as usize + 1];
        limbs[(k / LIMB_BITS) as usize] = 1 << (k % LIMB_BITS);
        Natural::from_limbs(limbs)
    }

    #[test]
    fn add_examples() {
        assert_eq!(add(&n(999), &n(1)), n(1000));
        assert_eq!(add(&n(123_456), &Natural::zero()), n(123_456));
        let max = n(u64::MAX as u128);
        assert_eq!(add(&max, &n(1)), n(1u128 << 64));
        assert_eq!(add(&max, &n(1)), pow2(64));
    }

    #[test]
    fn sub_examples() {
        assert_eq!(sub(&n(1000), &n(1)).unwrap(), n(999));
        let x = n(987_654_321_987_654_321);
        assert_eq!(sub(&x, &x).unwrap(), Natural::zero());
        assert!(sub(&x, &x).unwrap().limbs().is_empty());
        assert_eq!(sub(&n(1), &n(2)), Err(BignumError::Underflow));
        assert_eq!(sub(&pow2(64), &n(1)).unwrap(), n(u64::MAX as u128));
    }

    #[test]
    fn mul_examples() {
        // repeated-addition oracle
        let oracle = (0..12).fold(Natural::zero(), |acc, _| add(&acc, &n(12)));
        assert_eq!(mul(&n(12), &n(12)), oracle);
        assert_eq!(mul(&n(12), &n(12)), n(144));
        let x = n(0xdead_beef_cafe_babe_1234);
        assert_eq!(mul(&x, &Natural::one()), x);
        assert_eq!(mul(&x, &Natural::zero()), Natural::zero());
    }

    #[test]
    fn divmod_examples() {
        let r = divmod(&n(144), &n(12)).unwrap();
        assert_eq!((r.quotient, r.remainder), (n(12), Natural::zero()));
        let x = pow2(200);
        let r = divmod(&x, &Natural::one()).unwrap();
        assert_eq!((r.quotient, r.remainder), (x.clone(), Natural::zero()));
        assert_eq!(
            divmod(&x, &Natural::zero()),
            Err(BignumError::DivisionByZero)
        );
        let r = divmod(&n(5), &pow2(70)).unwrap();
        assert_eq!((r.quotient, r.remainder), (Natural::zero(), n(5)));
    }

    #[test]
    fn divmod_add_back_path() {
        // Classic case where the estimated quotient limb is one too large
        // and the multiply-subtract goes negative.
        let u = Natural::from_limbs(vec![0, 0, 0x8000_0000, 0x7fff_ffff]);
        let v = Natural::from_limbs(vec![1, 0, 0x8000_0000]);
        let DivModResult { quotient, remainder } = divmod(&u, &v).unwrap();
        assert!(remainder < v);
        assert_eq!(add(&mul(&quotient, &v), &remainder), u);
        let (q, r) = (u.to_u128().unwrap() / v.to_u128().unwrap(), u.to_u128().unwrap() % v.to_u128().unwrap());
        assert_eq!((quotient, remainder), (n(q), n(r)));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&Natural::zero(), &Natural::zero()), Ordering::Equal);
        assert_eq!(compare(&n(999), &n(1000)), Ordering::Less);
        assert_eq!(compare(&pow2(64), &n(u64::MAX as u128)), Ordering::Greater);
        assert_eq!(compare(&n(u64::MAX as u128), &pow2(64)), Ordering::Less);
    }

    #[test]
    fn decimal_examples() {
        assert!(from_decimal("0").unwrap().limbs().is_empty());
        assert_eq!(from_decimal("007").unwrap(), n(7));
        assert_eq!(from_decimal("000000000000000000").unwrap(), Natural::zero());
        let doubled = (0..64).fold(Natural::one(), |acc, _| add(&acc, &acc));
        assert_eq!(from_decimal("18446744073709551616").unwrap(), doubled);
        assert_eq!(from_decimal(""), Err(ParseNaturalError::Empty));
        assert_eq!(
            from_decimal("12a4"),
            Err(ParseNaturalError::InvalidDigit { found: 'a', offset: 2 })
        );
        assert!(from_decimal("-1").is_err());
        assert!(from_decimal(" 1").is_err());

        assert_eq!(to_decimal(&Natural::zero()), "0");
        let billion = n(1_000_000_000);
        assert_eq!(
            to_decimal(&mul(&billion, &billion)),
            format!("1{}", "0".repeat(18))
        );
        assert_eq!(to_decimal(&n(1_000_000_007)), "1000000007");
        assert_eq!(format!("{:>6}", n(42)), "    42");
    }

    #[test]
    fn add_limb_matches_add() {
        assert_eq!(add_limb(&Natural::zero(), 0), Natural::zero());
        assert_eq!(add_limb(&Natural::zero(), 7), n(7));
        assert_eq!(add_limb(&n(u64::MAX as u128), 1), pow2(64));
        let x = Natural::from_limbs(vec![Limb::MAX, Limb::MAX, 5, 9]);
        let (sum, steps) = add_limb_counted(&x, 2);
        assert_eq!(sum, add(&x, &Natural::from(2u32)));
        assert_eq!(steps, 3);
    }

    #[test]
    fn double_examples() {
        assert_eq!(double(&Natural::zero()), Natural::zero());
        assert_eq!(double(&n(5)), add(&n(5), &n(5)));
        assert_eq!(double(&n(5)), n(10));
        assert_eq!(double(&pow2(63)), pow2(64));
    }

    #[test]
    fn size_bounds_on_extremes() {
        let all_ones = Natural::from_limbs(vec![Limb::MAX; 8]);
        assert_eq!(add(&all_ones, &all_ones).len(), 9);
        assert_eq!(mul(&all_ones, &all_ones).len(), 16);
        assert_eq!(sub(&all_ones, &Natural::one()).unwrap().len(), 8);
    }

    #[test]
    fn counted_kernels_report_loop_trips() {
        let x = Natural::from_limbs(vec![7; 10]);
        let y = Natural::from_limbs(vec![9; 6]);
        assert_eq!(add_counted(&x, &y).1, 10);
        assert_eq!(mul_counted(&x, &y).1, 10 * 6 + 10);
        assert_eq!(sub_counted(&x, &y).unwrap().1, 10);
    }

    #[test]
    fn oracle_equivalence_below_2_32() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..20_000 {
            let a: u64 = rng.gen_range(0..1u64 << 32);
            let b: u64 = rng.gen_range(0..1u64 << 32);
            let (x, y) = (Natural::from(a), Natural::from(b));
            assert_eq!(add(&x, &y).to_u64(), Some(a + b));
            assert_eq!(mul(&x, &y).to_u64(), Some(a * b));
            assert_eq!(double(&x).to_u64(), Some(2 * a));
            assert_eq!(compare(&x, &y), a.cmp(&b));
            match sub(&x, &y) {
                Ok(d) => assert_eq!(d.to_u64(), Some(a - b)),
                Err(e) => {
                    assert!(a < b);
                    assert_eq!(e, BignumError::Underflow);
                }
            }
            if b != 0 {
                let r = divmod(&x, &y).unwrap();
                assert_eq!(r.quotient.to_u64(), Some(a / b));
                assert_eq!(r.remainder.to_u64(), Some(a % b));
            }
        }
    }

    fn natural(max_limbs: usize) -> impl Strategy<Value = Natural> {
        prop::collection::vec(any::<Limb>(), 0..=max_limbs).prop_map(Natural::from_limbs)
    }

    proptest! {
        #[test]
        fn ring_laws(x in natural(64), y in natural(64), z in natural(64)) {
            let xy = add(&x, &y);
            prop_assert!(xy.is_canonical());
            prop_assert_eq!(&xy, &add(&y, &x));
            prop_assert_eq!(add(&xy, &z), add(&x, &add(&y, &z)));
            let p = mul(&x, &y);
            prop_assert!(p.is_canonical());
            prop_assert_eq!(&p, &mul(&y, &x));
            prop_assert_eq!(mul(&p, &z), mul(&x, &mul(&y, &z)));
            prop_assert_eq!(mul(&x, &add(&y, &z)), add(&p, &mul(&x, &z)));
            prop_assert_eq!(sub(&xy, &y).unwrap(), x.clone());
            prop_assert!(xy.len() <= x.len().max(y.len()) + 1);
            prop_assert!(p.len() <= x.len() + y.len());
        }

        #[test]
        fn division_identity(x in natural(64), y in natural(40)) {
            prop_assume!(!y.is_zero());
            let DivModResult { quotient, remainder } = divmod(&x, &y).unwrap();
            prop_assert!(quotient.is_canonical() && remainder.is_canonical());
            prop_assert!(remainder < y);
            prop_assert_eq!(add(&mul(&quotient, &y), &remainder), x);
        }

        #[test]
        fn add_limb_agrees_with_add(x in natural(16), k in any::<Limb>()) {
            prop_assert_eq!(add_limb(&x, k), add(&x, &Natural::from(k)));
        }

        #[test]
        fn double_matches_mul_by_two(x in natural(64)) {
            prop_assert_eq!(double(&x), mul(&x, &Natural::from(2u32)));
        }

        #[test]
        fn decimal_round_trip(x in natural(20)) {
            let s = to_decimal(&x);
            prop_assert!(s == "0" || !s.starts_with('0'));
            prop_assert_eq!(from_decimal(&s).unwrap(), x);
        }

        #[test]
        fn decimal_matches_u128(v in any::<u128>()) {
            prop_assert_eq!(to_decimal(&Natural::from(v)), v.to_string());
            prop_assert_eq!(from_decimal(&v.to_string()).unwrap().to_u128(), Some(v));
        }
    }
}

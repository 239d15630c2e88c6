//! Word-level carryless multiplication and bit-vector helpers shared by
//! [`Gf2Poly`](super::Gf2Poly) and [`LaurentSeries`](super::LaurentSeries).
//!
//! Bit vectors are little-endian: bit `i` lives in word `i / 64`, position
//! `i % 64`.

/// 64x64 -> 128 carryless product, returned as `(lo, hi)`.
#[inline]
pub fn clmul64(a: u64, b: u64) -> (u64, u64) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: feature presence checked at runtime just above.
            return unsafe { clmul64_pclmul(a, b) };
        }
    }
    clmul64_soft(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq", enable = "sse2")]
unsafe fn clmul64_pclmul(a: u64, b: u64) -> (u64, u64) {
    use std::arch::x86_64::*;
    let va = _mm_set_epi64x(0, a as i64);
    let vb = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128(va, vb, 0x00);
    let lo = _mm_cvtsi128_si64(r) as u64;
    let hi = _mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r)) as u64;
    (lo, hi)
}

/// Portable fallback: 4-bit windowed table method.
pub fn clmul64_soft(a: u64, b: u64) -> (u64, u64) {
    let mut table = [0u128; 16];
    let a = a as u128;
    for i in 1..16usize {
        let mut acc = 0u128;
        for bit in 0..4 {
            if i >> bit & 1 == 1 {
                acc ^= a << bit;
            }
        }
        table[i] = acc;
    }
    let mut r = 0u128;
    for nib in (0..16).rev() {
        r <<= 4;
        r ^= table[((b >> (4 * nib)) & 0xf) as usize];
    }
    (r as u64, (r >> 64) as u64)
}

/// Schoolbook product of two bit vectors, keeping only the lowest `keep`
/// bits (`None` keeps everything).
pub fn mul_words(a: &[u64], b: &[u64], keep: Option<usize>) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let full = a.len() + b.len();
    let out_words = match keep {
        Some(k) => full.min(k.div_ceil(64)),
        None => full,
    };
    if out_words == 0 {
        return Vec::new();
    }
    let mut out = vec![0u64; out_words];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= out_words {
            continue;
        }
        let limit = (out_words - i).min(b.len());
        for (j, &y) in b[..limit].iter().enumerate() {
            if y == 0 {
                continue;
            }
            let (lo, hi) = clmul64(x, y);
            out[i + j] ^= lo;
            if i + j + 1 < out_words {
                out[i + j + 1] ^= hi;
            }
        }
    }
    if let Some(k) = keep {
        truncate_bits(&mut out, k);
    }
    out
}

/// Spreads bit `i` to bit `2i` (the Frobenius map on coefficient vectors).
pub fn square_words(a: &[u64], keep: Option<usize>) -> Vec<u64> {
    let mut out = Vec::with_capacity(2 * a.len());
    for &w in a {
        out.push(spread32(w as u32));
        out.push(spread32((w >> 32) as u32));
    }
    if let Some(k) = keep {
        truncate_bits(&mut out, k);
    }
    out
}

#[inline]
fn spread32(x: u32) -> u64 {
    let mut x = x as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

/// Clears every bit at index `>= nbits` and drops the surplus words.
pub fn truncate_bits(v: &mut Vec<u64>, nbits: usize) {
    let words = nbits.div_ceil(64);
    v.truncate(words);
    if !nbits.is_multiple_of(64) {
        if let Some(last) = v.get_mut(words - 1) {
            *last &= (1u64 << (nbits % 64)) - 1;
        }
    }
}

/// Removes trailing zero words.
pub fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Index of the highest set bit, if any.
pub fn top_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| 64 * i + 63 - w.leading_zeros() as usize)
}

/// Index of the lowest set bit, if any.
pub fn low_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| 64 * i + w.trailing_zeros() as usize)
}

#[inline]
pub fn get_bit(v: &[u64], i: usize) -> bool {
    v.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
}

#[inline]
pub fn set_bit(v: &mut Vec<u64>, i: usize) {
    if v.len() <= i / 64 {
        v.resize(i / 64 + 1, 0);
    }
    v[i / 64] |= 1u64 << (i % 64);
}

#[inline]
pub fn flip_bit(v: &mut Vec<u64>, i: usize) {
    if v.len() <= i / 64 {
        v.resize(i / 64 + 1, 0);
    }
    v[i / 64] ^= 1u64 << (i % 64);
}

pub fn xor_into(dst: &mut Vec<u64>, src: &[u64]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), 0);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// `v << s` (towards higher indices).
pub fn shl(v: &[u64], s: usize) -> Vec<u64> {
    if v.is_empty() {
        return Vec::new();
    }
    let (ws, bs) = (s / 64, s % 64);
    let mut out = vec![0u64; v.len() + ws + 1];
    for (i, &w) in v.iter().enumerate() {
        out[i + ws] ^= w << bs;
        if bs != 0 {
            out[i + ws + 1] ^= w >> (64 - bs);
        }
    }
    trim(&mut out);
    out
}

/// `v >> s` (towards lower indices); low bits fall off.
pub fn shr(v: &[u64], s: usize) -> Vec<u64> {
    let (ws, bs) = (s / 64, s % 64);
    if ws >= v.len() {
        return Vec::new();
    }
    let src = &v[ws..];
    let mut out = vec![0u64; src.len()];
    for i in 0..src.len() {
        out[i] = src[i] >> bs;
        if bs != 0 && i + 1 < src.len() {
            out[i] |= src[i + 1] << (64 - bs);
        }
    }
    trim(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn clmul_naive(a: u64, b: u64) -> u128 {
        let mut r = 0u128;
        for i in 0..64 {
            if b >> i & 1 == 1 {
                r ^= (a as u128) << i;
            }
        }
        r
    }

    proptest! {
        #[test]
        fn clmul_matches_naive(a in any::<u64>(), b in any::<u64>()) {
            let expect = clmul_naive(a, b);
            let (lo, hi) = clmul64(a, b);
            prop_assert_eq!(((hi as u128) << 64) | lo as u128, expect);
            let (lo, hi) = clmul64_soft(a, b);
            prop_assert_eq!(((hi as u128) << 64) | lo as u128, expect);
        }

        #[test]
        fn square_is_self_product(v in proptest::collection::vec(any::<u64>(), 0..5)) {
            let mut s = square_words(&v, None);
            let mut p = mul_words(&v, &v, None);
            trim(&mut s);
            trim(&mut p);
            prop_assert_eq!(s, p);
        }

        #[test]
        fn shifts_invert(v in proptest::collection::vec(any::<u64>(), 0..4), s in 0usize..200) {
            let mut v = v;
            trim(&mut v);
            prop_assert_eq!(shr(&shl(&v, s), s), v);
        }
    }

    #[test]
    fn truncated_product_keeps_low_bits() {
        let a = vec![u64::MAX, u64::MAX];
        let b = vec![0b11];
        let full = mul_words(&a, &b, None);
        let cut = mul_words(&a, &b, Some(70));
        let mut expect = full.clone();
        truncate_bits(&mut expect, 70);
        assert_eq!(cut, expect);
    }
}

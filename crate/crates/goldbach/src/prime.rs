//! Odd-only bitset sieve with rank-accelerated prime counting.

use crate::error::{GoldbachError, Result};
use std::fs;
use std::io::Write;
use std::path::Path;

const CACHE_MAGIC: [u8; 4] = *b"GBSV";
const CACHE_VERSION: u32 = 1;
/// Words per rank block: one cumulative popcount every 512 odd candidates.
const RANK_SPAN: usize = 8;
/// Bits sieved per segment; 2^20 odd candidates keeps the working set in L2.
const SEG_BITS: usize = 1 << 20;

/// Immutable primality table covering [0, limit]. Bit i of the underlying
/// bitset stands for the odd number 2i+1; the prime 2 is special-cased.
/// Safe to share across threads once built.
pub struct PrimeTable {
    limit: u64,
    words: Vec<u64>,
    rank: Vec<u64>,
}

impl PrimeTable {
    /// Sieve all primes up to `limit` inclusive. Construction strikes odd
    /// composites segment by segment using base primes up to sqrt(limit).
    pub fn build(limit: u64) -> Result<PrimeTable> {
        if limit < 2 {
            return Err(GoldbachError::BadLimit(limit));
        }
        let n_bits = ((limit + 1) / 2) as usize;
        let n_words = n_bits.div_ceil(64);
        let mut words = vec![!0u64; n_words];
        let tail = n_bits % 64;
        if tail != 0 {
            words[n_words - 1] &= (1u64 << tail) - 1;
        }
        words[0] &= !1; // 1 is not prime

        let base = small_odd_primes(limit.isqrt());
        let mut lo_bit = 0usize;
        while lo_bit < n_bits {
            let hi_bit = (lo_bit + SEG_BITS).min(n_bits);
            for &p in &base {
                let p = p as usize;
                // bit of p^2, then every p-th bit is the next odd multiple
                let mut b = (p * p - 1) / 2;
                if b < lo_bit {
                    b += (lo_bit - b).div_ceil(p) * p;
                }
                while b < hi_bit {
                    words[b >> 6] &= !(1u64 << (b & 63));
                    b += p;
                }
            }
            lo_bit = hi_bit;
        }

        Ok(PrimeTable::from_words(limit, words))
    }

    fn from_words(limit: u64, words: Vec<u64>) -> PrimeTable {
        let mut rank = Vec::with_capacity(words.len() / RANK_SPAN + 1);
        let mut acc = 0u64;
        for (i, w) in words.iter().enumerate() {
            if i % RANK_SPAN == 0 {
                rank.push(acc);
            }
            acc += u64::from(w.count_ones());
        }
        PrimeTable { limit, words, rank }
    }

    /// Inclusive upper bound of coverage.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Exact primality for n <= limit. Panics beyond coverage; callers that
    /// cannot guarantee coverage must check `limit()` first.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "is_prime({n}) beyond table limit {}", self.limit);
        if n < 3 || n % 2 == 0 {
            return n == 2;
        }
        let bit = ((n - 1) / 2) as usize;
        self.words[bit >> 6] >> (bit & 63) & 1 == 1
    }

    /// All primes in ascending order.
    pub fn primes(&self) -> Primes<'_> {
        Primes {
            words: &self.words,
            word_idx: 0,
            current: self.words[0],
            two_pending: true,
        }
    }

    /// Primes p <= x in ascending order.
    pub fn primes_up_to(&self, x: u64) -> impl Iterator<Item = u64> + '_ {
        self.primes().take_while(move |&p| p <= x)
    }

    /// PE: the largest prime strictly below e.
    pub fn largest_prime_below(&self, e: u64) -> Result<u64> {
        if e <= 2 {
            return Err(GoldbachError::Usage(format!(
                "no prime below {e}; need e > 2"
            )));
        }
        if e - 1 > self.limit {
            return Err(GoldbachError::Coverage {
                what: "largest_prime_below",
                needed: e - 1,
                limit: self.limit,
            });
        }
        let hi_odd = if (e - 1) % 2 == 1 { e - 1 } else { e - 2 };
        if hi_odd >= 3 {
            let start = ((hi_odd - 1) / 2) as usize;
            let mut wi = start >> 6;
            let top = start & 63;
            let mut w = self.words[wi] & if top == 63 { !0 } else { (1u64 << (top + 1)) - 1 };
            loop {
                if w != 0 {
                    let bit = (wi << 6) + (63 - w.leading_zeros() as usize);
                    return Ok(2 * bit as u64 + 1);
                }
                if wi == 0 {
                    break;
                }
                wi -= 1;
                w = self.words[wi];
            }
        }
        Ok(2)
    }

    /// pi(x): the number of primes <= x.
    pub fn prime_count_up_to(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(GoldbachError::Coverage {
                what: "prime_count_up_to",
                needed: x,
                limit: self.limit,
            });
        }
        if x < 2 {
            return Ok(0);
        }
        Ok(1 + self.prefix_count(((x - 1) / 2) as usize))
    }

    /// Set bits with index <= bit_hi: rank block plus a short word walk.
    fn prefix_count(&self, bit_hi: usize) -> u64 {
        let wi = bit_hi >> 6;
        let block = wi / RANK_SPAN;
        let mut sum = self.rank[block];
        for w in &self.words[block * RANK_SPAN..wi] {
            sum += u64::from(w.count_ones());
        }
        let top = bit_hi & 63;
        let mask = if top == 63 { !0 } else { (1u64 << (top + 1)) - 1 };
        sum + u64::from((self.words[wi] & mask).count_ones())
    }

    /// The sieve divisors for e: primes P(1)=2 .. P(m), the largest prime
    /// <= sqrt(e-1). E=4 is handled explicitly as {2}.
    pub fn divisor_set(&self, e: u64) -> Result<Vec<u64>> {
        if e < 4 || e % 2 != 0 {
            return Err(GoldbachError::BadEven(e));
        }
        if e == 4 {
            return Ok(vec![2]);
        }
        let s = (e - 1).isqrt();
        if s > self.limit {
            return Err(GoldbachError::Coverage {
                what: "divisor_set",
                needed: s,
                limit: self.limit,
            });
        }
        Ok(self.primes_up_to(s).collect())
    }

    /// Serialize as magic, version, limit, word count, words, FNV-1a checksum
    /// (all integers little-endian).
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let mut buf =
            Vec::with_capacity(4 + 4 + 8 + 8 + self.words.len() * 8 + 8);
        buf.extend_from_slice(&CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.limit.to_le_bytes());
        buf.extend_from_slice(&(self.words.len() as u64).to_le_bytes());
        for w in &self.words {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let sum = fnv1a(&buf);
        buf.extend_from_slice(&sum.to_le_bytes());
        let mut f = fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    /// Load a table saved by `save_cache`, verifying magic, version, sizes,
    /// and checksum. Rank blocks are rebuilt, never trusted from disk.
    pub fn load_cache(path: &Path) -> Result<PrimeTable> {
        let fail = |reason: &str| GoldbachError::Cache {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        let buf = fs::read(path)?;
        if buf.len() < 32 {
            return Err(fail("file too short"));
        }
        if buf[0..4] != CACHE_MAGIC {
            return Err(fail("bad magic"));
        }
        let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(fail(&format!("unsupported version {version}")));
        }
        let limit = u64::from_le_bytes(buf[8..16].try_into().unwrap());
        let n_words = u64::from_le_bytes(buf[16..24].try_into().unwrap()) as usize;
        if limit < 2 || n_words != (((limit + 1) / 2) as usize).div_ceil(64) {
            return Err(fail("limit and word count disagree"));
        }
        if buf.len() != 24 + n_words * 8 + 8 {
            return Err(fail("truncated or oversized payload"));
        }
        let body = &buf[..buf.len() - 8];
        let stored = u64::from_le_bytes(buf[buf.len() - 8..].try_into().unwrap());
        if fnv1a(body) != stored {
            return Err(fail("checksum mismatch"));
        }
        let words = buf[24..24 + n_words * 8]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(PrimeTable::from_words(limit, words))
    }
}

/// Ascending prime iterator; yields 2 first, then walks set bits word by word.
pub struct Primes<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
    two_pending: bool,
}

impl Iterator for Primes<'_> {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if self.two_pending {
            self.two_pending = false;
            return Some(2);
        }
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(((self.word_idx << 6 | tz) * 2 + 1) as u64);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

/// Plain sieve for the base primes (odd primes <= s).
fn small_odd_primes(s: u64) -> Vec<u64> {
    if s < 3 {
        return Vec::new();
    }
    let s = s as usize;
    let mut comp = vec![false; s + 1];
    let mut primes = Vec::new();
    for n in (3..=s).step_by(2) {
        if !comp[n] {
            primes.push(n as u64);
            let mut m = n * n;
            while m <= s {
                comp[m] = true;
                m += 2 * n;
            }
        }
    }
    primes
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

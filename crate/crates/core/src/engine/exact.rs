//! Exact summation of `f64` values.
//!
//! Every finite double is an integer multiple of 2^-1074, so a wide enough
//! fixed-point register holds any sum exactly. The register is a vector of
//! signed 64-bit limbs, each nominally carrying 32 bits; carries are
//! propagated lazily. Because integer addition is associative the final
//! value is independent of summation order and grouping.

const LIMB_BITS: u32 = 32;
const LIMB_MASK: i64 = (1 << LIMB_BITS) - 1;
// Bit 0 of the register is 2^-1074; the largest double reaches bit 2097.
// Two spare limbs of headroom absorb at least 2^60 maximal additions.
const LIMBS: usize = 68;
// Limbs stay below 2^63 if normalized at least this often.
const NORMALIZE_EVERY: u32 = 1 << 29;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactSum {
    limbs: Vec<i64>,
    pending: u32,
    // Sum of non-finite inputs; NaN/inf poison the result.
    special: Option<u64>,
}

impl std::fmt::Debug for ExactSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("ExactSum").field(&self.to_f64()).finish()
    }
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        Self {
            limbs: vec![0; LIMBS],
            pending: 0,
            special: None,
        }
    }

    pub fn add(&mut self, x: f64) {
        if !x.is_finite() {
            let prev = self.special.map_or(0.0, f64::from_bits);
            self.special = Some((prev + x).to_bits());
            return;
        }
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as u32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, position) = if biased == 0 {
            (frac, 0u32)
        } else {
            (frac | (1u64 << 52), biased - 1)
        };
        let limb = (position / LIMB_BITS) as usize;
        let shifted = u128::from(mantissa) << (position % LIMB_BITS);
        let negative = bits >> 63 == 1;
        for k in 0..3 {
            let digit = ((shifted >> (LIMB_BITS * k as u32)) as i64) & LIMB_MASK;
            if negative {
                self.limbs[limb + k] -= digit;
            } else {
                self.limbs[limb + k] += digit;
            }
        }
        self.pending += 1;
        if self.pending >= NORMALIZE_EVERY {
            self.normalize();
        }
    }

    /// Adds another accumulator into this one.
    pub fn merge(&mut self, other: &ExactSum) {
        let mut other = other.clone();
        other.normalize();
        self.normalize();
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a += *b;
        }
        if let Some(s) = other.special {
            let prev = self.special.map_or(0.0, f64::from_bits);
            self.special = Some((prev + f64::from_bits(s)).to_bits());
        }
        self.normalize();
    }

    // Canonical form: limbs 0..LIMBS-1 in [0, 2^32), the top limb signed.
    fn normalize(&mut self) {
        let mut carry = 0i64;
        let last = self.limbs.len() - 1;
        for (i, limb) in self.limbs.iter_mut().enumerate() {
            let v = *limb + carry;
            if i == last {
                *limb = v;
            } else {
                *limb = v & LIMB_MASK;
                carry = v >> LIMB_BITS;
            }
        }
        self.pending = 0;
    }

    /// Nearest double to the exact sum (ties to even).
    pub fn to_f64(&self) -> f64 {
        if let Some(s) = self.special {
            return f64::from_bits(s);
        }
        let mut limbs = self.limbs.clone();
        let mut copy = ExactSum {
            limbs: std::mem::take(&mut limbs),
            pending: self.pending,
            special: None,
        };
        copy.normalize();
        let mut mag = copy.limbs;
        let negative = *mag.last().unwrap() < 0;
        if negative {
            // Two's-complement negate across limbs.
            let mut carry = 1i64;
            let last = mag.len() - 1;
            for (i, limb) in mag.iter_mut().enumerate() {
                let v = if i == last {
                    -*limb - 1 + carry
                } else {
                    (!*limb & LIMB_MASK) + carry
                };
                if i == last {
                    *limb = v;
                } else {
                    *limb = v & LIMB_MASK;
                    carry = v >> LIMB_BITS;
                }
            }
        }
        let Some(top) = mag.iter().rposition(|&l| l != 0) else {
            return 0.0;
        };
        // Gather 96 bits (or all that exist) plus a sticky bit for the rest.
        let lo = top.saturating_sub(2);
        let mut window: u128 = 0;
        for i in (lo..=top).rev() {
            window = (window << LIMB_BITS) | mag[i] as u128;
        }
        if mag[..lo].iter().any(|&l| l != 0) {
            window |= 1;
        }
        // `as` rounds to nearest-even; the sticky bit sits far below bit 53.
        let scaled = window as f64;
        let exponent = (lo as i32) * LIMB_BITS as i32 - 1074;
        let value = libm::scalbn(scaled, exponent);
        if negative {
            -value
        } else {
            value
        }
    }
}

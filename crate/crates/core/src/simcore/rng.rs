use super::normal::inverse_normal_cdf;

/// Dimension index of the asset-price shock.
pub const ASSET_SHOCK: u8 = 0;
/// Dimension index of the variance shock (Heston only).
pub const VARIANCE_SHOCK: u8 = 1;

/// Address of one random draw.
///
/// The seed becomes the Philox key and `(path_id, step, dim)` the 128-bit
/// counter, so distinct keys always land on distinct stream positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngKey {
    pub global_seed: u64,
    pub path_id: u64,
    pub step: u32,
    pub dim: u8,
}

impl RngKey {
    pub fn new(global_seed: u64, path_id: u64, step: u32, dim: u8) -> Self {
        Self {
            global_seed,
            path_id,
            step,
            dim,
        }
    }

    fn counter(&self) -> [u32; 4] {
        [
            self.path_id as u32,
            (self.path_id >> 32) as u32,
            self.step,
            u32::from(self.dim),
        ]
    }

    fn key(&self) -> [u32; 2] {
        [self.global_seed as u32, (self.global_seed >> 32) as u32]
    }
}

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

#[inline(always)]
fn philox_round(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
    let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// Philox4x32 block function with 10 rounds (Salmon et al., SC'11).
#[inline]
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    ctr = philox_round(ctr, key);
    for _ in 1..10 {
        key[0] = key[0].wrapping_add(PHILOX_W0);
        key[1] = key[1].wrapping_add(PHILOX_W1);
        ctr = philox_round(ctr, key);
    }
    ctr
}

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform deviate in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn uniform(key: RngKey) -> f64 {
    let block = philox4x32_10(key.counter(), key.key());
    let bits = (u64::from(block[0]) << 21) | (u64::from(block[1]) >> 11);
    bits as f64 * TWO_POW_NEG_53
}

/// Standard normal deviate, the inverse normal CDF of [`uniform`].
///
/// A uniform draw of exactly zero (probability 2^-53) is moved to half the
/// grid spacing so the result stays finite.
#[inline]
pub fn gaussian(key: RngKey) -> f64 {
    let u = uniform(key);
    let u = if u == 0.0 { 0.5 * TWO_POW_NEG_53 } else { u };
    inverse_normal_cdf(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vectors from the Random123 distribution (kat_vectors).
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0, 0, 0, 0], [0, 0]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn uniform_is_pure_and_in_range() {
        let key = RngKey::new(42, 7, 3, ASSET_SHOCK);
        assert_eq!(uniform(key).to_bits(), uniform(key).to_bits());
        for path in 0..10_000 {
            let u = uniform(RngKey::new(1, path, 0, 0));
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn uniform_mean_over_a_million_keys() {
        let n = 1_000_000u64;
        let sum: f64 = (0..n).map(|i| uniform(RngKey::new(2024, i, 0, 0))).sum();
        assert!((sum / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn gaussian_mean_over_a_million_keys() {
        let n = 1_000_000u64;
        let sum: f64 = (0..n).map(|i| gaussian(RngKey::new(99, i, 1, 0))).sum();
        assert!((sum / n as f64).abs() < 0.004);
    }

    #[test]
    fn key_fields_select_distinct_streams() {
        let base = RngKey::new(5, 10, 20, 0);
        let variants = [
            RngKey { global_seed: 6, ..base },
            RngKey { path_id: 11, ..base },
            RngKey { step: 21, ..base },
            RngKey { dim: 1, ..base },
            // Swapping the 32-bit halves of path and seed must not alias.
            RngKey {
                path_id: 10 << 32,
                ..base
            },
        ];
        let u0 = uniform(base);
        for k in variants {
            assert_ne!(uniform(k).to_bits(), u0.to_bits(), "{k:?}");
        }
    }
}

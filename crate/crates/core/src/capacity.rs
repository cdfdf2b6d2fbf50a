//! Exact rational figures of merit: retrieval capacity, the shared-randomness
//! threshold, and per-configuration rate accounting.
//!
//! All ratios are exact `u64` rationals; nothing here touches floating point
//! except the explicit conversion helpers, so equality assertions on rates
//! and thresholds are meaningful.

use crate::params::{Model, SchemeParams};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<u64>;

/// Shared randomness needed for a positive rate, relative to message length:
/// `T / (N - T - B)`. Callers must have `N > T + B`.
pub fn rho_threshold(servers: usize, collusion: usize, byzantine: usize) -> Rational {
    assert!(servers > collusion + byzantine, "capacity-zero regime");
    Ratio::new(
        collusion as u64,
        (servers - collusion - byzantine) as u64,
    )
}

/// Retrieval capacity with `T`-collusion and `B` corruptions when the
/// relative shared randomness is `rho`: `1 - (T + B)/N` when `N > T + B` and
/// `rho` meets the threshold, zero otherwise.
pub fn capacity(servers: usize, collusion: usize, byzantine: usize, rho: Rational) -> Rational {
    if servers <= collusion + byzantine {
        return Ratio::new(0, 1);
    }
    if rho < rho_threshold(servers, collusion, byzantine) {
        return Ratio::new(0, 1);
    }
    Ratio::new((servers - collusion - byzantine) as u64, servers as u64)
}

/// The comparison point for an all-knowing adversary when no decoding error
/// at all is tolerated: `1 - (T + 2B)/N`, clamped at zero.
pub fn capacity_omniscient_zero_error(
    servers: usize,
    collusion: usize,
    byzantine: usize,
) -> Rational {
    let penalty = collusion + 2 * byzantine;
    if servers <= penalty {
        return Ratio::new(0, 1);
    }
    Ratio::new((servers - penalty) as u64, servers as u64)
}

/// Bits needed to address one field symbol: `ceil(log2 q)`.
pub fn bits_per_symbol(modulus: u64) -> u64 {
    debug_assert!(modulus >= 2);
    64 - (modulus - 1).leading_zeros() as u64
}

/// Where the hash material travels and what it costs, in field symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelCost {
    /// Adversary-invisible point-to-point channels: `alpha (N - B + 1)`
    /// symbols, not counted against the download.
    Secret { symbols: u64 },
    /// Authenticated broadcast of `(K + 1) alpha` symbols, at
    /// `N^2 (N - E)` downloaded symbols per broadcast bit; counted against
    /// the download.
    Broadcast { symbols: u64 },
}

impl ChannelCost {
    pub fn symbols(&self) -> u64 {
        match self {
            ChannelCost::Secret { symbols } | ChannelCost::Broadcast { symbols } => *symbols,
        }
    }
}

/// Exact resource accounting for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accounting {
    /// Retrieved symbols over downloaded symbols.
    pub rate: Rational,
    /// The capacity the configuration is measured against.
    pub rate_capacity: Rational,
    /// Shared mask symbols over retrieved symbols, `T(l + beta) / (N-T-B)l`.
    pub rho: Rational,
    /// Minimum `rho` for the capacity to be positive.
    pub rho_threshold: Rational,
    /// Answer symbols downloaded in the retrieval phase, `N(l + beta)`.
    pub answer_symbols: u64,
    /// Hash-material delivery cost.
    pub channel: ChannelCost,
    /// Hash-phase randomness (exponent points plus appended message padding)
    /// relative to message length; vanishes as `l` grows.
    pub setup_randomness_share: Option<Rational>,
}

/// Computes the exact accounting for a validated parameter set.
pub fn accounting(params: &SchemeParams) -> Accounting {
    let n = params.servers() as u64;
    let block = params.block_len() as u64;
    let l = params.instances() as u64;
    let total = params.total_instances() as u64;
    let alpha = params.hash_count() as u64;
    let retrieved = block * l;
    let answer_symbols = n * total;
    let rho = Ratio::new(params.collusion() as u64 * total, retrieved);
    let threshold = rho_threshold(params.servers(), params.collusion(), params.byzantine());
    let rate_capacity = capacity(
        params.servers(),
        params.collusion(),
        params.byzantine(),
        rho,
    );
    match params.model() {
        Model::SecretChannel => Accounting {
            rate: Ratio::new(retrieved, answer_symbols),
            rate_capacity,
            rho,
            rho_threshold: threshold,
            answer_symbols,
            channel: ChannelCost::Secret {
                symbols: alpha * (n - params.byzantine() as u64 + 1),
            },
            setup_randomness_share: None,
        },
        Model::Untouched { observed } => {
            let broadcast = n
                * n
                * (n - observed as u64)
                * (params.messages() as u64 + 1)
                * alpha
                * bits_per_symbol(params.field().modulus());
            Accounting {
                rate: Ratio::new(retrieved, broadcast + answer_symbols),
                rate_capacity,
                rho,
                rho_threshold: threshold,
                answer_symbols,
                channel: ChannelCost::Broadcast { symbols: broadcast },
                setup_randomness_share: Some(Ratio::new(
                    (params.messages() as u64 + 1) * alpha,
                    retrieved,
                )),
            }
        }
    }
}

/// Rational to floating point, for report emission only.
pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().expect("u64 rational converts to f64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SchemeSpec;

    fn r(n: u64, d: u64) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn capacity_reference_points() {
        assert_eq!(capacity(3, 1, 1, r(1, 1)), r(1, 3));
        assert_eq!(capacity(5, 2, 1, r(1, 1)), r(2, 5));
        // Below the shared-randomness threshold the capacity collapses.
        assert_eq!(capacity(4, 1, 1, r(2, 5)), r(0, 1));
        assert_eq!(capacity(4, 1, 1, r(1, 2)), r(2, 4));
        // Too many colluding plus corrupted servers: zero regardless of rho.
        assert_eq!(capacity(3, 2, 1, r(100, 1)), r(0, 1));
        assert_eq!(capacity(2, 1, 1, r(1, 1)), r(0, 1));
    }

    #[test]
    fn thresholds() {
        assert_eq!(rho_threshold(3, 1, 1), r(1, 1));
        assert_eq!(rho_threshold(4, 1, 1), r(1, 2));
        assert_eq!(rho_threshold(5, 2, 1), r(1, 1));
        assert_eq!(rho_threshold(8, 3, 2), r(3, 3));
        assert_eq!(rho_threshold(5, 0, 2), r(0, 3));
    }

    #[test]
    fn omniscient_zero_error_comparison() {
        assert_eq!(capacity_omniscient_zero_error(3, 1, 1), r(0, 1));
        assert_eq!(capacity_omniscient_zero_error(5, 2, 1), r(1, 5));
        assert_eq!(capacity_omniscient_zero_error(4, 1, 1), r(1, 4));
        // Tolerating errors strictly helps whenever corruption is present and
        // the epsilon-error capacity is positive.
        for n in 2..=8usize {
            for b in 1..n {
                for t in 0..n - b {
                    let eps = capacity(n, t, b, r(t as u64 + 1, 1));
                    if eps > r(0, 1) {
                        assert!(eps > capacity_omniscient_zero_error(n, t, b));
                    }
                }
            }
        }
    }

    #[test]
    fn bits_per_symbol_frozen() {
        assert_eq!(bits_per_symbol(2), 1);
        assert_eq!(bits_per_symbol(5), 3);
        assert_eq!(bits_per_symbol(1031), 11);
        assert_eq!(bits_per_symbol(4096), 12);
        assert_eq!(bits_per_symbol(4099), 13);
        assert_eq!(bits_per_symbol(10007), 14);
    }

    #[test]
    fn secret_channel_accounting_is_exact() {
        let params = SchemeSpec::secret_channel(2, 5, 2, 1, 32, 2).build().unwrap();
        let acc = accounting(&params);
        assert_eq!(acc.rate, r(2, 5));
        assert_eq!(acc.rho, r(1, 1));
        assert_eq!(acc.rho_threshold, r(1, 1));
        assert_eq!(acc.rate_capacity, r(2, 5));
        assert_eq!(acc.answer_symbols, 5 * 32);
        assert_eq!(acc.channel, ChannelCost::Secret { symbols: 2 * 5 });
        assert_eq!(acc.setup_randomness_share, None);
    }

    #[test]
    fn secret_channel_rate_is_length_free() {
        for l in [1usize, 4, 16, 64] {
            let params = SchemeSpec::secret_channel(3, 4, 1, 1, l, 1).build().unwrap();
            assert_eq!(accounting(&params).rate, r(2, 4));
        }
    }

    #[test]
    fn broadcast_accounting_matches_formula_oracle() {
        // Independent evaluation of N^2 (N - E)(K + 1) alpha ceil(log2 q).
        let params = SchemeSpec::untouched(2, 4, 1, 1, 2, 100, 2)
            .modulus(10007)
            .build()
            .unwrap();
        let acc = accounting(&params);
        let broadcast = 4u64 * 4 * (4 - 2) * (2 + 1) * 4 * 14;
        assert_eq!(broadcast, 5376);
        assert_eq!(acc.channel, ChannelCost::Broadcast { symbols: broadcast });
        assert_eq!(acc.answer_symbols, 4 * 102);
        assert_eq!(acc.rate, r(2 * 100, broadcast + 4 * 102));
        assert_eq!(acc.rho, r(102, 200));
        assert_eq!(acc.rho_threshold, r(1, 2));
        assert_eq!(acc.setup_randomness_share, Some(r(3 * 4, 200)));
    }

    #[test]
    fn broadcast_rate_converges_to_capacity() {
        let mut last = r(0, 1);
        for l in [8usize, 64, 512, 4096, 100_000, 1_000_000] {
            let params = SchemeSpec::untouched(2, 4, 1, 1, 2, l, 2).build().unwrap();
            let acc = accounting(&params);
            assert!(acc.rate >= last, "rate dipped at l = {l}");
            assert!(acc.rate < r(1, 2));
            last = acc.rate;
        }
        assert!(to_f64(last) > 0.49);
    }

    #[test]
    fn rho_exceeds_threshold_for_every_valid_shape() {
        for n in 2..=8usize {
            for b in 0..n {
                for t in 0..n {
                    if t + b >= n {
                        continue;
                    }
                    let Ok(params) = SchemeSpec::secret_channel(2, n, t, b, 4, 1).build() else {
                        panic!("valid shape rejected: N={n} T={t} B={b}");
                    };
                    let acc = accounting(&params);
                    assert!(acc.rho >= acc.rho_threshold);
                    assert_eq!(acc.rate, r((n - t - b) as u64, n as u64));
                    assert_eq!(acc.rate, acc.rate_capacity);
                }
            }
        }
    }
}

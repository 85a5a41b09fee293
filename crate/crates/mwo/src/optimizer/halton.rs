//! Low-discrepancy Halton points used for the diversity-preserving male
//! role update. Dimension `d` uses the `d`-th prime base.

/// Radical inverse of `index` in the given base: digit-reverse the base-b
/// expansion across the radix point.
pub fn radical_inverse(base: u64, mut index: u64) -> f64 {
    debug_assert!(base >= 2);
    let mut result = 0.0;
    let mut fraction = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * fraction;
        index /= base;
        fraction /= base as f64;
    }
    result
}

/// First `count` primes (2, 3, 5, ...), one per dimension.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate: u64 = 2;
    while primes.len() < count {
        if primes.iter().all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Halton point number `index` (1-based) in the unit cube of dimension
/// `bases.len()`.
pub fn halton_point(bases: &[u64], index: u64) -> Vec<f64> {
    bases
        .iter()
        .map(|&b| radical_inverse(b, index))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base2_prefix() {
        // Hand-computed radical inverses in base 2.
        assert_eq!(radical_inverse(2, 1), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(2, 3), 0.75);
        assert_eq!(radical_inverse(2, 4), 0.125);
    }

    #[test]
    fn base3_prefix() {
        assert!((radical_inverse(3, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((radical_inverse(3, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((radical_inverse(3, 3) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn primes() {
        assert_eq!(first_primes(8), [2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn points_stay_in_unit_interval() {
        let bases = first_primes(10);
        for index in 1..200 {
            for v in halton_point(&bases, index) {
                assert!(v > 0.0 && v < 1.0);
            }
        }
    }
}

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, k) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Number of divisors d(n).
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).into_iter().map(|(_, k)| k as u64 + 1).product()
}

/// Level arithmetic for Γ₀(N): the index ν(N) and σ₋₁(N), both exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelData {
    pub n: u64,
    pub factorization: Vec<(u64, u32)>,
    /// ν(N) = [SL₂(ℤ):Γ₀(N)] = N ∏_{p|N}(1 + 1/p).
    pub nu: u64,
    /// σ₋₁(N) = Σ_{d|N} 1/d.
    #[serde(serialize_with = "ser_ratio")]
    pub sigma_minus_one: Ratio<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl LevelData {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "level must be positive");
        let factorization = factorize(n);
        let nu = factorization.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
        let sigma: u64 = divisors(n).iter().sum();
        LevelData {
            n,
            factorization,
            nu,
            sigma_minus_one: Ratio::new(sigma, n),
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factorization.iter().map(|&(p, _)| p)
    }

    pub fn sigma_minus_one_f64(&self) -> f64 {
        *self.sigma_minus_one.numer() as f64 / *self.sigma_minus_one.denom() as f64
    }
}

pub fn level_data(n: u64) -> LevelData {
    LevelData::new(n)
}

/// Whether σ₋₁(N) − 1 ≤ N^{−δ}. The constant in front of N^{−δ} is fixed
/// at 1; the asymptotic statement it stands in for has no explicit constant.
pub fn admissible_level(n: u64, delta: f64) -> bool {
    assert!(delta > 0.0, "delta must be positive");
    let ld = LevelData::new(n);
    let excess = ld.sigma_minus_one - Ratio::from_integer(1u64);
    let excess = *excess.numer() as f64 / *excess.denom() as f64;
    excess <= (n as f64).powf(-delta)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_examples() {
        let one = level_data(1);
        assert_eq!(one.nu, 1);
        assert_eq!(one.sigma_minus_one, Ratio::from_integer(1));
        assert_eq!(level_data(5).nu, 6);
        let twelve = level_data(12);
        assert_eq!(twelve.nu, 24);
        assert_eq!(twelve.sigma_minus_one, Ratio::new(7, 3));
    }

    #[test]
    fn nu_multiplicative_and_prime_values() {
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            assert_eq!(level_data(p).nu, p + 1);
        }
        for a in 1..40u64 {
            for b in 1..40u64 {
                if gcd(a, b) == 1 {
                    assert_eq!(level_data(a * b).nu, level_data(a).nu * level_data(b).nu);
                }
            }
        }
    }

    #[test]
    fn sigma_at_least_one() {
        for n in 2..200 {
            assert!(level_data(n).sigma_minus_one > Ratio::from_integer(1));
        }
    }

    #[test]
    fn admissibility() {
        for p in [2u64, 3, 5, 101, 1009] {
            assert!(admissible_level(p, 0.5));
        }
        assert!(!admissible_level(12, 0.5));
        assert!(admissible_level(1, 0.5));
    }

    #[test]
    fn phi_and_divisors() {
        assert_eq!(euler_phi(5), 4);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisor_count(36), 9);
    }
}

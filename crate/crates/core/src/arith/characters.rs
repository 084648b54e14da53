use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;

use super::level::{divisors, factorize, gcd};
use crate::error::{LabError, Result};

/// A Dirichlet character mod `q`.
///
/// Values are stored exactly as root-of-unity exponents: `χ(n) = e(k/order)`
/// where `k = table[n mod q]`, and `None` marks residues sharing a factor
/// with `q`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    table: Vec<Option<u64>>,
    index: Option<usize>,
}

/// Generators of (ℤ/qℤ)^× lifted by CRT, with their orders.
#[derive(Clone, Debug)]
struct GroupBasis {
    gens: Vec<(u64, u64)>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Multiplicative order of `a` mod `m` (gcd(a, m) = 1).
fn mult_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = (x as u128 * a as u128 % m as u128) as u64;
        k += 1;
    }
    k
}

/// Solves x ≡ r1 (mod m1), x ≡ r2 (mod m2) for coprime moduli.
fn crt(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    let (g, inv, _) = ext_gcd(m1 as i128, m2 as i128);
    debug_assert_eq!(g, 1);
    let m = m1 as i128 * m2 as i128;
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128);
    let t = (diff * inv.rem_euclid(m2 as i128)).rem_euclid(m2 as i128);
    ((r1 as i128 + m1 as i128 * t).rem_euclid(m)) as u64
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

impl GroupBasis {
    fn new(q: u64) -> Self {
        let mut gens = Vec::new();
        for (p, k) in factorize(q) {
            let pk = p.pow(k);
            let rest = q / pk;
            let lift = |g: u64| if rest == 1 { g % pk } else { crt(g % pk, pk, 1, rest) };
            if p == 2 {
                match k {
                    1 => {}
                    2 => gens.push((lift(3), 2)),
                    _ => {
                        gens.push((lift(pk - 1), 2));
                        gens.push((lift(5), pk / 4));
                    }
                }
            } else {
                let phi = pk / p * (p - 1);
                let g = (2..pk)
                    .find(|&g| g % p != 0 && mult_order(g, pk) == phi)
                    .expect("odd prime powers are cyclic");
                gens.push((lift(g), phi));
            }
        }
        GroupBasis { gens }
    }

    fn exponent(&self) -> u64 {
        self.gens.iter().fold(1, |acc, &(_, o)| acc.lcm(&o))
    }

    /// For every residue coprime to q, its coordinates against the generators.
    fn discrete_logs(&self, q: u64) -> Vec<Option<Vec<u64>>> {
        let mut logs = vec![None; q as usize];
        let mut coords = vec![0u64; self.gens.len()];
        loop {
            let n = self.gens.iter().zip(&coords).fold(1 % q, |acc, (&(g, _), &a)| {
                (acc as u128 * pow_mod(g, a, q) as u128 % q as u128) as u64
            });
            logs[n as usize] = Some(coords.clone());
            // odometer increment, last coordinate fastest
            let mut i = self.gens.len();
            loop {
                if i == 0 {
                    return logs;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < self.gens[i].1 {
                    break;
                }
                coords[i] = 0;
            }
        }
    }
}

/// All φ(q) characters mod q, ordered lexicographically by their exponent
/// vectors against the generator basis (smallest primitive root for odd
/// prime powers; −1 then 5 for 2^k with k ≥ 3; 3 for 4).
pub fn enumerate_characters(q: u64) -> Vec<DirichletCharacter> {
    assert!(q >= 1, "modulus must be positive");
    let basis = GroupBasis::new(q);
    let order = basis.exponent();
    let logs = basis.discrete_logs(q);
    let mut out = Vec::new();
    let mut exps = vec![0u64; basis.gens.len()];
    loop {
        let table = logs
            .iter()
            .map(|l| {
                l.as_ref().map(|coords| {
                    coords
                        .iter()
                        .zip(&exps)
                        .zip(&basis.gens)
                        .map(|((&a, &e), &(_, o))| a * e % o * (order / o))
                        .sum::<u64>()
                        % order
                })
            })
            .collect();
        out.push(DirichletCharacter {
            modulus: q,
            order,
            table,
            index: Some(out.len()),
        });
        let mut i = exps.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < basis.gens[i].1 {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// The index-th character mod q in `enumerate_characters` order.
pub fn character(q: u64, index: usize) -> Result<DirichletCharacter> {
    enumerate_characters(q)
        .into_iter()
        .nth(index)
        .ok_or_else(|| LabError::InvalidArgument(format!("no character {q}:{index}")))
}

/// A real non-principal character mod q, preferring primitive ones.
pub fn quadratic_character(q: u64) -> Option<DirichletCharacter> {
    let all = enumerate_characters(q);
    let quads: Vec<_> = all.into_iter().filter(|c| c.is_quadratic()).collect();
    quads
        .iter()
        .find(|c| c.is_primitive())
        .or_else(|| quads.first())
        .cloned()
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        DirichletCharacter {
            modulus: 1,
            order: 1,
            table: vec![Some(0)],
            index: Some(0),
        }
    }

    pub fn principal(q: u64) -> Self {
        DirichletCharacter {
            modulus: q,
            order: 1,
            table: (0..q).map(|n| (gcd(n, q) == 1).then_some(0)).collect(),
            index: Some(0),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Exponent `m` with χ(n)^m = 1 for all n; values are e(k/m).
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Position in `enumerate_characters(q)`, when known.
    pub fn index(&self) -> Option<usize> {
        self.index
    }

    fn residue(&self, n: i64) -> usize {
        n.rem_euclid(self.modulus as i64) as usize
    }

    /// Exact value as a root-of-unity exponent k (χ(n) = e(k/order)).
    pub fn exponent(&self, n: i64) -> Option<u64> {
        self.table[self.residue(n)]
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.exponent(n) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k, self.order),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.table.iter().all(|v| v.map_or(true, |k| k == 0))
    }

    /// True when every value is ±1 or 0 and the character is not principal.
    pub fn is_quadratic(&self) -> bool {
        !self.is_principal() && self.table.iter().flatten().all(|&k| (2 * k) % self.order == 0)
    }

    pub fn is_real(&self) -> bool {
        self.table.iter().flatten().all(|&k| (2 * k) % self.order == 0)
    }

    /// χ(−1) as ±1.
    pub fn parity(&self) -> i8 {
        match self.exponent(-1) {
            Some(0) => 1,
            Some(_) => -1,
            None => unreachable!("−1 is a unit"),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    /// Smallest d | q such that χ is trivial on units ≡ 1 mod d.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        divisors(q)
            .into_iter()
            .find(|&d| {
                (1..q)
                    .step_by(d as usize)
                    .all(|n| self.table[(n % q) as usize].map_or(true, |k| k == 0))
            })
            .unwrap_or(q)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    pub fn conj(&self) -> Self {
        DirichletCharacter {
            modulus: self.modulus,
            order: self.order,
            table: self
                .table
                .iter()
                .map(|v| v.map(|k| (self.order - k) % self.order))
                .collect(),
            index: None,
        }
    }

    /// χ^{+1} = χ, χ^{−1} = conj(χ).
    pub fn signed_power(&self, sign: i8) -> Self {
        if sign >= 0 {
            self.clone()
        } else {
            self.conj()
        }
    }

    /// Pointwise product as a character mod lcm(q₁, q₂).
    pub fn mul(&self, other: &Self) -> Self {
        let q = self.modulus.lcm(&other.modulus);
        let order = self.order.lcm(&other.order);
        let (sa, sb) = (order / self.order, order / other.order);
        let table = (0..q as i64)
            .map(|n| match (self.exponent(n), other.exponent(n)) {
                (Some(a), Some(b)) => Some((a * sa + b * sb) % order),
                _ => None,
            })
            .collect();
        DirichletCharacter {
            modulus: q,
            order,
            table,
            index: None,
        }
        .reduced()
    }

    /// The character mod `m` (a multiple of q) induced by χ.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.modulus == 0, "lift target must be a multiple");
        self.mul(&DirichletCharacter::principal(m))
    }

    /// Shrinks `order` to the true exponent of the value group.
    fn reduced(mut self) -> Self {
        let g = self.table.iter().flatten().fold(self.order, |acc, &k| acc.gcd(&k));
        if g > 1 {
            self.order /= g;
            for v in self.table.iter_mut().flatten() {
                *v /= g;
            }
        }
        self
    }

    /// Whether both characters take identical values on all integers.
    pub fn same_values(&self, other: &Self) -> bool {
        if self.modulus != other.modulus {
            return false;
        }
        self.table.iter().zip(&other.table).all(|(a, b)| match (a, b) {
            (None, None) => true,
            (Some(x), Some(y)) => x * other.order == y * self.order,
            _ => false,
        })
    }

    /// Restriction to the CRT factor mod d (d | q, gcd(d, q/d) = 1):
    /// χ_d(n) = χ(n′) with n′ ≡ n (mod d), n′ ≡ 1 (mod q/d).
    pub fn crt_component(&self, d: u64) -> Result<Self> {
        let q = self.modulus;
        if d == 0 || q % d != 0 || gcd(d, q / d) != 1 {
            return Err(LabError::InvalidArgument(format!(
                "{d} is not a unitary divisor of {q}"
            )));
        }
        let rest = q / d;
        let table = (0..d)
            .map(|n| {
                if gcd(n, d) != 1 {
                    return None;
                }
                let lifted = if rest == 1 { n } else { crt(n % d.max(1), d, 1, rest) };
                self.table[lifted as usize]
            })
            .collect();
        Ok(DirichletCharacter {
            modulus: d,
            order: self.order,
            table,
            index: None,
        }
        .reduced()
        .with_index())
    }

    /// Looks the character up in its modulus' enumeration.
    pub fn with_index(mut self) -> Self {
        if self.index.is_none() {
            self.index = enumerate_characters(self.modulus)
                .iter()
                .position(|c| c.same_values(&self));
        }
        self
    }

    pub fn label(&self) -> String {
        match self.index {
            Some(i) => format!("{}:{}", self.modulus, i),
            None => format!("{}:?", self.modulus),
        }
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.same_values(other)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `q:index` or `q:quad`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterRef {
    pub modulus: u64,
    pub selector: CharacterSelector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterSelector {
    Index(usize),
    Quadratic,
}

impl FromStr for CharacterRef {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || LabError::InvalidArgument(format!("bad character reference `{s}`"));
        let (q, sel) = s.split_once(':').ok_or_else(bad)?;
        let modulus: u64 = q.trim().parse().map_err(|_| bad())?;
        if modulus == 0 {
            return Err(bad());
        }
        let selector = match sel.trim() {
            "quad" => CharacterSelector::Quadratic,
            i => CharacterSelector::Index(i.parse().map_err(|_| bad())?),
        };
        Ok(CharacterRef { modulus, selector })
    }
}

impl CharacterRef {
    pub fn resolve(&self) -> Result<DirichletCharacter> {
        match self.selector {
            CharacterSelector::Index(i) => character(self.modulus, i),
            CharacterSelector::Quadratic => quadratic_character(self.modulus)
                .ok_or_else(|| LabError::InvalidArgument(format!("no quadratic character mod {}", self.modulus))),
        }
    }
}

pub(crate) fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * k == m {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == m {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * k == 3 * m {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

/// τ(χ) = Σ_{a mod q} χ(a) e(a/q), angles reduced exactly before rounding.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus;
    let m = chi.order;
    (0..q)
        .filter_map(|a| {
            chi.table[a as usize].map(|k| {
                // e(k/m + a/q) = e((k q + a m) / (m q))
                let num = (k as u128 * q as u128 + a as u128 * m as u128) % (m as u128 * q as u128);
                let den = m as u128 * q as u128;
                let g = gcd_u128(num, den);
                root_of_unity((num / g) as u64, (den / g) as u64)
            })
        })
        .sum()
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a.max(1)
    } else {
        gcd_u128(b, a % b)
    }
}

/// The splitting χ = χ₁·conj(χ₂) attached to a cusp 1/f, with ψ = χ₁χ₂.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Primitive mod N/f.
    pub chi1: DirichletCharacter,
    /// Primitive mod f.
    pub chi2: DirichletCharacter,
    /// χ₁χ₂ as a character mod N.
    pub psi: DirichletCharacter,
}

pub fn decompose(chi: &DirichletCharacter, f: u64) -> Result<Decomposition> {
    let n = chi.modulus();
    if f == 0 || n % f != 0 {
        return Err(LabError::InvalidArgument(format!("{f} does not divide {n}")));
    }
    if gcd(f, n / f) != 1 {
        return Err(LabError::InvalidArgument(format!("gcd({f}, {}) > 1", n / f)));
    }
    if !chi.is_primitive() {
        return Err(LabError::InvalidArgument(format!("{} is not primitive", chi.label())));
    }
    let chi1 = chi.crt_component(n / f)?;
    let chi2 = chi.crt_component(f)?.conj().with_index();
    let psi = chi1.mul(&chi2).lift(n).with_index();
    Ok(Decomposition { chi1, chi2, psi })
}

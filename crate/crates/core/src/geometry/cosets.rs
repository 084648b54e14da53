use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use super::mat::{reduce, Mat2};
use crate::arith::level_data;

/// Right coset representatives of Γ₀(N)\SL₂(ℤ), indexed by P¹(ℤ/N), with
/// the cusp structure read off from the right action of T = [[1,1],[0,1]].
#[derive(Clone, Debug, Serialize)]
pub struct CosetList {
    pub n: u64,
    pub reps: Vec<Mat2>,
    #[serde(skip)]
    index: HashMap<(u64, u64), usize>,
    /// cusp index of each coset
    pub cusp_of: Vec<usize>,
    /// k with rep_j ∈ Γ₀(N)·rep_cusp·T^k
    pub offset: Vec<i64>,
    /// h_j ∈ Γ₀(N) with rep_j = h_j·rep_cusp·T^k
    #[serde(skip)]
    pub(crate) h: Vec<Mat2>,
    pub cusps: Vec<Cusp>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CuspLabel {
    Infinity,
    Zero,
    Other { num: i64, den: i64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cusp {
    pub label: CuspLabel,
    /// the coset whose representative g has g·∞ equal to this cusp
    pub coset: usize,
    pub width: u64,
}

impl Cusp {
    /// σ = g·diag(√m, 1/√m): sends ∞ to the cusp and conjugates its
    /// stabilizer to integer translations. Returned as real entries.
    pub fn scaling_map(&self, reps: &[Mat2]) -> [f64; 4] {
        let g = reps[self.coset];
        let r = (self.width as f64).sqrt();
        [g.a as f64 * r, g.b as f64 / r, g.c as f64 * r, g.d as f64 / r]
    }
}

fn canonical(c: u64, d: u64, n: u64) -> (u64, u64) {
    let mut best = (c % n, d % n);
    for u in 1..n {
        if u.gcd(&n) == 1 {
            let cand = (u * c % n, u * d % n);
            if cand < best {
                best = cand;
            }
        }
    }
    best
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A matrix in SL₂(ℤ) with bottom row ≡ (c, d) mod N.
fn lift(c: u64, d: u64, n: u64) -> Mat2 {
    if n == 1 || (c % n == 0 && d % n == 1 % n) {
        return Mat2::IDENTITY;
    }
    let c1 = if c == 0 { n as i64 } else { c as i64 };
    let mut d1 = d as i64;
    while c1.gcd(&d1) != 1 {
        d1 += n as i64;
    }
    if c1 == 1 {
        return Mat2::new(0, -1, 1, d1);
    }
    // a·d1 − b·c1 = 1
    let (_, x, y) = ext_gcd(d1, c1);
    Mat2::new(x, -y, c1, d1)
}

impl CosetList {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index j with g ∈ Γ₀(N)·rep_j.
    pub fn index_of(&self, g: &Mat2) -> usize {
        let n = self.n as i64;
        let key = canonical(g.c.rem_euclid(n) as u64, g.d.rem_euclid(n) as u64, self.n);
        self.index[&key]
    }

    pub fn cusp_index(&self, label: CuspLabel) -> Option<usize> {
        self.cusps.iter().position(|c| c.label == label)
    }
}

pub fn in_gamma0(g: &Mat2, n: u64) -> bool {
    g.det() == 1 && g.c.rem_euclid(n as i64) == 0
}

/// Canonical coset representatives via P¹(ℤ/N); for prime N these are
/// the identity and ST^k = [[0,−1],[1,k]], 0 ≤ k < N.
pub fn coset_reps(n: u64) -> CosetList {
    assert!(n >= 1);
    let mut reps = Vec::new();
    let mut index = HashMap::new();
    if n == 1 {
        reps.push(Mat2::IDENTITY);
        index.insert((0, 0), 0);
    } else {
        // (0:1) first so the identity is coset 0
        let mut points = vec![(0u64, 1u64)];
        for c in 0..n {
            for d in 0..n {
                if (c, d) != (0, 1) && c.gcd(&d).gcd(&n) == 1 && canonical(c, d, n) == (c, d) {
                    points.push((c, d));
                }
            }
        }
        for (c, d) in points {
            index.insert((c, d), reps.len());
            reps.push(lift(c, d, n));
        }
    }
    let mut list = CosetList {
        n,
        reps,
        index,
        cusp_of: Vec::new(),
        offset: Vec::new(),
        h: Vec::new(),
        cusps: Vec::new(),
    };
    let count = list.reps.len();
    let (mut cusp_of, mut offset, mut h) = (vec![usize::MAX; count], vec![0; count], vec![Mat2::IDENTITY; count]);
    let mut cusps = Vec::new();
    // S-coset first after the identity so cusp 0 gets a clean representative
    let s_coset = list.index_of(&Mat2::S);
    let order: Vec<usize> = std::iter::once(0)
        .chain(std::iter::once(s_coset))
        .chain(0..count)
        .collect();
    for start in order {
        if cusp_of[start] != usize::MAX {
            continue;
        }
        let ci = cusps.len();
        let base = list.reps[start];
        let mut k = 0i64;
        loop {
            let g = base * Mat2::translation(k);
            let j = list.index_of(&g);
            if cusp_of[j] != usize::MAX {
                break;
            }
            cusp_of[j] = ci;
            offset[j] = k;
            let hj = list.reps[j] * g.inverse();
            debug_assert!(in_gamma0(&hj, n));
            h[j] = hj;
            k += 1;
        }
        let label = if start == 0 {
            CuspLabel::Infinity
        } else if base.c != 0 && base.a == 0 {
            CuspLabel::Zero
        } else {
            let g = base.a.gcd(&base.c);
            CuspLabel::Other {
                num: base.a / g,
                den: base.c / g,
            }
        };
        cusps.push(Cusp {
            label,
            coset: start,
            width: k as u64,
        });
    }
    list.cusp_of = cusp_of;
    list.offset = offset;
    list.h = h;
    list.cusps = cusps;
    list
}

/// Vol(Γ₀(N)\ℍ) = (π/3) ν(N).
pub fn volume(n: u64) -> f64 {
    PI / 3.0 * level_data(n).nu as f64
}

/// Where a point sits in Γ₀(N)\ℍ: the cusp sector it reduces into and its
/// coordinate w = σ_𝔞⁻¹ h⁻¹ z in that cusp's frame.
#[derive(Clone, Copy, Debug)]
pub struct Location {
    pub coset: usize,
    pub cusp: usize,
    /// z = h·σ_𝔞·w with h ∈ Γ₀(N)
    pub h: Mat2,
    pub w: Complex64,
}

pub fn locate(z: Complex64, cosets: &CosetList) -> Location {
    let (z0, g) = reduce(z);
    let j = cosets.index_of(&g);
    let hg = g * cosets.reps[j].inverse();
    let cusp = cosets.cusp_of[j];
    let m = cosets.cusps[cusp].width as f64;
    Location {
        coset: j,
        cusp,
        h: hg * cosets.h[j],
        w: (z0 + cosets.offset[j] as f64) / m,
    }
}

/// The cusp 𝔞 with Im(σ_𝔞⁻¹ z) > Y (modulo Γ₀(N)), if any. Unique for Y > 1.
pub fn cuspidal_zone_membership(z: Complex64, cosets: &CosetList, y: f64) -> Option<(CuspLabel, Location)> {
    let loc = locate(z, cosets);
    (loc.w.im > y).then(|| (cosets.cusps[loc.cusp].label, loc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::level_data;

    #[test]
    fn counts_match_index() {
        for n in 1..=60 {
            let c = coset_reps(n);
            assert_eq!(c.len() as u64, level_data(n).nu, "N={n}");
            assert_eq!(c.cusps.iter().map(|c| c.width).sum::<u64>(), level_data(n).nu);
        }
        assert_eq!(coset_reps(2).len(), 3);
        assert_eq!(coset_reps(1).reps, vec![Mat2::IDENTITY]);
    }

    #[test]
    fn pairwise_inequivalent() {
        for n in [2u64, 5, 12, 18, 29] {
            let c = coset_reps(n);
            for (i, a) in c.reps.iter().enumerate() {
                assert_eq!(a.det(), 1);
                for (j, b) in c.reps.iter().enumerate() {
                    assert_eq!(in_gamma0(&(*a * b.inverse()), n), i == j);
                }
            }
        }
    }

    #[test]
    fn prime_level_shape() {
        let c = coset_reps(5);
        assert_eq!(c.reps[0], Mat2::IDENTITY);
        for k in 0..5 {
            assert!(c.reps.contains(&Mat2::new(0, -1, 1, k)));
        }
        assert_eq!(c.cusps.len(), 2);
        assert_eq!(c.cusps[0].label, CuspLabel::Infinity);
        assert_eq!(c.cusps[0].width, 1);
        assert_eq!(c.cusps[1].label, CuspLabel::Zero);
        assert_eq!(c.cusps[1].width, 5);
    }

    #[test]
    fn squarefree_cusp_widths() {
        // cusps of Γ₀(N), N squarefree, are 1/d with width N/d
        let c = coset_reps(15);
        let mut widths: Vec<u64> = c.cusps.iter().map(|c| c.width).collect();
        widths.sort();
        assert_eq!(widths, vec![1, 3, 5, 15]);
    }

    #[test]
    fn scaling_map_sends_infinity_to_cusp() {
        let c = coset_reps(5);
        let zero = c.cusps[1];
        let [a, b, cc, d] = zero.scaling_map(&c.reps);
        assert!((a * d - b * cc - 1.0).abs() < 1e-14);
        assert_eq!(a, 0.0);
        // σ T σ⁻¹ ∈ Γ₀(5): [[1 − ac, a²], [−c², 1 + ac]] with c² = 5
        assert!((cc * cc - 5.0).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        let c = coset_reps(5);
        let (label, _) = cuspidal_zone_membership(Complex64::new(0.2, 5.0), &c, 2.0).unwrap();
        assert_eq!(label, CuspLabel::Infinity);
        assert!(cuspidal_zone_membership(Complex64::new(0.2, 0.9), &c, 2.0).is_none());
        // σ₀ w = −1/(5w) for w = 0.3 + 3i, Im w > Y
        let w = Complex64::new(0.3, 3.0);
        let z = -1.0 / (w * 5.0);
        let (label, loc) = cuspidal_zone_membership(z, &c, 2.0).unwrap();
        assert_eq!(label, CuspLabel::Zero);
        assert!((loc.w.im - 3.0).abs() < 1e-10);
        assert!(in_gamma0(&loc.h, 5));
    }

    #[test]
    fn location_reconstructs_point() {
        let c = coset_reps(13);
        for z in [
            Complex64::new(0.11, 0.004),
            Complex64::new(-0.4, 0.3),
            Complex64::new(3.3, 2.0),
        ] {
            let loc = locate(z, &c);
            let [a, b, cc, d] = c.cusps[loc.cusp].scaling_map(&c.reps);
            let sw = (loc.w * a + b) / (loc.w * cc + d);
            assert!((loc.h.apply(sw) - z).norm() < 1e-9, "{z}");
            assert!(in_gamma0(&loc.h, 13));
        }
    }

    #[test]
    fn volume_values() {
        assert!((volume(1) - PI / 3.0).abs() < 1e-15);
        assert!((volume(5) - 2.0 * PI).abs() < 1e-14);
    }
}

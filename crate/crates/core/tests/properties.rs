use eisenlab::arith::{enumerate_characters, gauss_sum, quadratic_character};
use eisenlab::geometry::{coset_reps, in_gamma0, locate, reduce};
use eisenlab::lfun::{dirichlet_l, zeta};
use eisenlab::moment::{divisor_character_sums, integrand_h, mellin_g, PipelineContext};
use eisenlab::recipe::threshold_scan;
use eisenlab::special::log_gamma;
use eisenlab::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characters_are_multiplicative(q in 2u64..60, idx in 0usize..64, m in 1i64..500, n in 1i64..500) {
        let chars = enumerate_characters(q);
        let chi = &chars[idx % chars.len()];
        let lhs = chi.value(m * n);
        let rhs = chi.value(m) * chi.value(n);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((chi.value(m + q as i64) - chi.value(m)).norm() < 1e-12);
    }

    #[test]
    fn gauss_sum_norm(q in 3u64..120, idx in 0usize..128) {
        let prim: Vec<_> = enumerate_characters(q).into_iter().filter(|c| c.is_primitive()).collect();
        prop_assume!(!prim.is_empty());
        let chi = &prim[idx % prim.len()];
        prop_assert!((gauss_sum(chi).norm_sqr() - q as f64).abs() < 1e-9);
    }

    #[test]
    fn log_gamma_recurrence(re in 0.1f64..20.0, im in -30.0f64..30.0) {
        let z = c(re, im);
        let lhs = log_gamma(z + 1.0).unwrap().exp();
        let rhs = z * log_gamma(z).unwrap().exp();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm());
    }

    #[test]
    fn l_functions_respect_conjugation(re in -2.0f64..3.0, im in 0.5f64..25.0, idx in 0usize..12) {
        let s = c(re, im);
        let z = zeta(s).unwrap();
        prop_assert!((zeta(s.conj()).unwrap() - z.conj()).norm() <= 1e-10 * z.norm().max(1.0));
        let chars = enumerate_characters(13);
        let chi = &chars[idx % chars.len()];
        let l = dirichlet_l(s, chi).unwrap();
        let lbar = dirichlet_l(s.conj(), &chi.conj()).unwrap();
        prop_assert!((lbar - l.conj()).norm() <= 1e-10 * l.norm().max(1.0));
    }

    #[test]
    fn reduction_lands_in_the_standard_domain(x in -20.0f64..20.0, y in 1e-3f64..5.0) {
        let z = c(x, y);
        let (z0, g) = reduce(z);
        prop_assert!(z0.re.abs() <= 0.5 + 1e-12 && z0.norm() >= 1.0 - 1e-12);
        prop_assert_eq!(g.det(), 1);
        prop_assert!((g.apply(z0) - z).norm() <= 1e-9 * z.norm().max(1.0));
    }

    #[test]
    fn located_points_reassemble(x in -3.0f64..3.0, y in 0.01f64..3.0, ni in 0usize..4) {
        let n = [5u64, 6, 13, 12][ni];
        let cosets = coset_reps(n);
        let z = c(x, y);
        let loc = locate(z, &cosets);
        prop_assert!(in_gamma0(&loc.h, n));
        let [a, b, cc, d] = cosets.cusps[loc.cusp].scaling_map(&cosets.reps);
        let sw = (a * loc.w + b) / (cc * loc.w + d);
        let back = loc.h.apply(sw);
        prop_assert!((back - z).norm() <= 1e-8 * z.norm().max(1.0), "{back} vs {z}");
        prop_assert!(loc.w.im > 0.0);
    }

    #[test]
    fn mellin_g_conjugate_symmetric(re in 0.1f64..5.0, im in 0.0f64..10.0) {
        let s = c(re, im);
        let g = mellin_g(s).unwrap();
        prop_assert!((mellin_g(s.conj()).unwrap() - g.conj()).norm() <= 1e-12 * g.norm());
    }

    #[test]
    fn h_is_real_on_the_real_axis(sigma in prop_oneof![-0.45f64..-0.01, 0.01f64..3.0], y in 1.1f64..8.0) {
        let ctx = PipelineContext::new(5, y).unwrap();
        let h = integrand_h(c(sigma, 0.0), &ctx).unwrap();
        prop_assert!(h.im.abs() <= 1e-10 * h.norm());
    }

    #[test]
    fn divisor_sums_are_multiplicative(m in 1usize..60, n in 1usize..60) {
        prop_assume!(num_gcd(m, n) == 1);
        let psi = quadratic_character(17).unwrap();
        let lam = divisor_character_sums(&psi, m * n);
        prop_assert_eq!(lam[m * n], lam[m] * lam[n]);
    }

    #[test]
    fn threshold_bracket_bounded(n in 2u64..10_000, t in 0.0f64..50.0) {
        let r = threshold_scan(n, &[t])[0];
        let log_n = (n as f64).ln();
        prop_assert!(r.bracket.abs() <= 2.0 * log_n * (1.0 + 1e-12));
        if t > 0.0 {
            prop_assert!(r.bracket.abs() <= r.envelope * (1.0 + 1e-12));
        }
    }
}

fn num_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

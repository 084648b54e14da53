use eisenlab::arith::quadratic_character;
use eisenlab::eisenstein::{constant_term, direct_series_oracle, eval_e_star, EisensteinModel};
use eisenlab::special::PrecisionBudget;
use eisenlab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(n: u64, s: f64) -> EisensteinModel {
    EisensteinModel::trivial_twist(quadratic_character(n).unwrap(), Complex64::new(s, 0.0)).unwrap()
}

#[test]
fn fourier_side_matches_lattice_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budget = PrecisionBudget::new(1e-12, 20_000, Default::default()).unwrap();
    for n in [5, 13] {
        let m = model(n, 2.0);
        for _ in 0..20 {
            let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..3.0));
            let f = eval_e_star(z, &m, &budget).unwrap();
            let o = direct_series_oracle(z, &m, 2000.0).unwrap();
            let err = (f - o.value).norm();
            assert!(err <= 1e-8 * f.norm().max(1.0), "N={n} z={z}: {f} vs {}", o.value);
        }
    }
}

#[test]
fn constant_term_against_lattice_average() {
    let m = model(5, 2.0);
    let y = 3.0;
    let k = 8;
    let mean: Complex64 = (0..k)
        .map(|j| {
            direct_series_oracle(Complex64::new(j as f64 / k as f64, y), &m, 2000.0)
                .unwrap()
                .value
        })
        .sum::<Complex64>()
        / k as f64;
    let e0 = constant_term(y, &m).unwrap();
    assert!((mean - e0).norm() < 1e-9 * e0.norm(), "{mean} vs {e0}");
}

#[test]
fn complex_s_matches_lattice_sum() {
    let m = EisensteinModel::trivial_twist(quadratic_character(13).unwrap(), Complex64::new(1.8, 2.5)).unwrap();
    let z = Complex64::new(0.17, 1.3);
    let f = eval_e_star(z, &m, &PrecisionBudget::default()).unwrap();
    let o = direct_series_oracle(z, &m, 2000.0).unwrap();
    assert!((f - o.value).norm() <= 1e-8 * f.norm().max(1.0), "{f} vs {}", o.value);
}

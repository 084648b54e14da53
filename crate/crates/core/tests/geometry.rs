use eisenlab::arith::quadratic_character;
use eisenlab::eisenstein::PrimeLevelEisenstein;
use eisenlab::geometry::{integrate, integrate_refined, volume, GridSpec, QuadratureGrid};
use eisenlab::special::PrecisionBudget;
use eisenlab::Complex64;

#[test]
fn truncated_square_is_refinement_stable() {
    let eis = PrimeLevelEisenstein::new(quadratic_character(5).unwrap(), PrecisionBudget::default()).unwrap();
    let grid = QuadratureGrid::for_zones(5, 2.0, 24, 24);
    let r = integrate_refined(
        |p| Ok(Complex64::new(eis.truncate_at(2.0, p.z)?.norm_sqr(), 0.0)),
        &grid,
    )
    .unwrap();
    let v = r.value.re;
    assert!(v > 0.0 && r.value.im == 0.0);
    assert!(r.refinement < 5e-4 * v, "value {v}, refinement {}", r.refinement);
}

#[test]
fn volume_of_level_five() {
    let grid = QuadratureGrid::new(5, GridSpec::default());
    let r = integrate(|_| Ok(Complex64::new(1.0, 0.0)), &grid).unwrap();
    assert!((r.value.re - volume(5)).abs() < 1e-3);
    assert!((volume(5) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

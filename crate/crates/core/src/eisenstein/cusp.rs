use num_complex::Complex64;
use serde::Serialize;

use super::model::{eval_e_star, eval_e_star_row, eval_nonconstant_row, CompletionMode, EisensteinModel};
use crate::arith::{is_prime, DirichletCharacter};
use crate::error::{LabError, Result};
use crate::geometry::{coset_reps, locate, CosetList, CuspLabel, Location};
use crate::lfun::completed_lambda;
use crate::special::PrecisionBudget;

/// A cusp of the prime-level Atkin–Lehner pair with its scaling map
/// σ = [[a, b], [c, d]] (real entries) and width.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CuspData {
    pub label: CuspLabel,
    pub scaling_map: [f64; 4],
    pub width: u64,
}

impl CuspData {
    pub fn of(cosets: &CosetList, label: CuspLabel) -> Result<Self> {
        let i = cosets
            .cusp_index(label)
            .ok_or_else(|| LabError::InvalidArgument(format!("no cusp {label:?} at level {}", cosets.n)))?;
        let cusp = cosets.cusps[i];
        Ok(CuspData {
            label,
            scaling_map: cusp.scaling_map(&cosets.reps),
            width: cusp.width,
        })
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        let [a, b, c, d] = self.scaling_map;
        (w * a + b) / (w * c + d)
    }
}

fn check_setting(model: &EisensteinModel) -> Result<DirichletCharacter> {
    let n = model.level();
    if !is_prime(n) {
        return Err(LabError::Unsupported(format!(
            "cusp expansions need prime level, got {n}"
        )));
    }
    if (model.s - 0.5).norm() > 1e-14 {
        return Err(LabError::Unsupported(
            "cusp expansions are modelled at s = 1/2 only".into(),
        ));
    }
    let psi = model.psi();
    if !psi.is_quadratic() {
        return Err(LabError::Unsupported(
            "cusp expansions need a quadratic character".into(),
        ));
    }
    Ok(psi)
}

/// Floor low enough for every sector coordinate at level N (Im w ≥ √3/2N).
fn sector_floor(n: u64) -> f64 {
    (0.8 / n as f64).min(super::model::DEFAULT_Y_FLOOR)
}

/// ε with E*_{1,ψ}(−1/(Nz), ½) = ε E*_{1,ψ}(z, ½), read off at one interior point.
fn fricke_sign(base: &EisensteinModel, budget: &PrecisionBudget) -> Result<f64> {
    let n = base.level() as f64;
    let z = Complex64::new(0.1, 1.1) / n.sqrt();
    let a = eval_e_star(-1.0 / (n * z), base, budget)?;
    let b = eval_e_star(z, base, budget)?;
    let r = a / b;
    for sign in [1.0, -1.0] {
        if (r - sign).norm() < 1e-6 {
            return Ok(sign);
        }
    }
    Err(LabError::CancellationFailure {
        what: "Fricke sign".into(),
        residual: (r.norm() - 1.0).abs(),
    })
}

/// E|σ_𝔞 as a multiple of E*_{1,ψ}(·, ½), with E normalized to have
/// constant term √y at ∞: the multiple is ±N^{−½} θ_{1,ψ}(½)^{−1} = ±1/Λ(1, ψ).
pub fn cusp_slash(model: &EisensteinModel, cusp: &CuspData) -> Result<EisensteinModel> {
    let psi = check_setting(model)?;
    let n = psi.modulus();
    let base = EisensteinModel::trivial_twist(psi.clone(), Complex64::new(0.5, 0.0))?.with_y_floor(sector_floor(n));
    let sign = match cusp.label {
        CuspLabel::Infinity => 1.0,
        CuspLabel::Zero => fricke_sign(&base, &PrecisionBudget::default())?,
        CuspLabel::Other { .. } => {
            return Err(LabError::Unsupported(
                "only the cusps ∞ and 0 exist at prime level".into(),
            ))
        }
    };
    let lam = completed_lambda(Complex64::new(1.0, 0.0), &psi)?;
    let mut out = base;
    out.completion_mode = CompletionMode::NewformNormalized;
    out.scalar = sign / lam;
    Ok(out)
}

/// E at prime level N with quadratic ψ, evaluated anywhere in ℍ by routing
/// each point to its cusp sector, plus the truncation E^Y.
#[derive(Clone, Debug)]
pub struct PrimeLevelEisenstein {
    pub psi: DirichletCharacter,
    pub cosets: CosetList,
    /// models of E|σ_𝔞, indexed like `cosets.cusps`
    pub slashed: Vec<EisensteinModel>,
    pub budget: PrecisionBudget,
}

/// One evaluation with its routing data.
#[derive(Clone, Copy, Debug)]
pub struct RoutedValue {
    pub value: Complex64,
    pub location: Location,
    /// e_𝔞 at this point, ψ(d_h)·√(Im w)
    pub cusp_term: Complex64,
}

impl PrimeLevelEisenstein {
    pub fn new(psi: DirichletCharacter, budget: PrecisionBudget) -> Result<Self> {
        let model = EisensteinModel::trivial_twist(psi.clone(), Complex64::new(0.5, 0.0))?;
        Self::from_model(&model, budget)
    }

    pub fn from_model(model: &EisensteinModel, budget: PrecisionBudget) -> Result<Self> {
        let psi = check_setting(model)?;
        let cosets = coset_reps(psi.modulus());
        let slashed = cosets
            .cusps
            .iter()
            .map(|c| cusp_slash(model, &CuspData::of(&cosets, c.label)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(PrimeLevelEisenstein {
            psi,
            cosets,
            slashed,
            budget,
        })
    }

    pub fn level(&self) -> u64 {
        self.psi.modulus()
    }

    pub fn cusp(&self, label: CuspLabel) -> Result<CuspData> {
        CuspData::of(&self.cosets, label)
    }

    /// E(z) = ψ(d_h)·(E|σ_𝔞)(w) where z = h σ_𝔞 w.
    pub fn eval_routed(&self, z: Complex64) -> Result<RoutedValue> {
        let loc = locate(z, &self.cosets);
        let chi = self.psi.value(loc.h.d);
        let m = &self.slashed[loc.cusp];
        let value = chi * eval_e_star(loc.w, m, &self.budget)? * m.scalar;
        Ok(RoutedValue {
            value,
            location: loc,
            cusp_term: chi * loc.w.im.sqrt(),
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_routed(z)?.value)
    }

    /// E^Y(z): E minus e_𝔞 inside the cuspidal zone of height Y.
    pub fn truncate_at(&self, y_cut: f64, z: Complex64) -> Result<Complex64> {
        if !(y_cut > 1.0) {
            return Err(LabError::InvalidArgument(format!(
                "truncation height must exceed 1, got {y_cut}"
            )));
        }
        let loc = locate(z, &self.cosets);
        if loc.w.im <= y_cut {
            return self.eval(z);
        }
        // the constant term of E|σ_𝔞 is exactly e_𝔞, so drop it before summing
        let m = &self.slashed[loc.cusp];
        let tail = eval_nonconstant_row(loc.w.im, &[loc.w.re], m, &self.budget)?[0];
        Ok(self.psi.value(loc.h.d) * m.scalar * tail)
    }

    /// (E|σ_𝔞)(w) on a row of points w = x + iy in the cusp frame.
    pub fn slashed_row(&self, cusp: usize, y: f64, xs: &[f64]) -> Result<Vec<Complex64>> {
        let m = &self.slashed[cusp];
        Ok(eval_e_star_row(y, xs, m, &self.budget)?
            .into_iter()
            .map(|v| v * m.scalar)
            .collect())
    }
}

/// E^Y(z) for a prime-level quadratic model at s = ½.
pub fn truncate_at(model: &EisensteinModel, y_cut: f64, z: Complex64, budget: &PrecisionBudget) -> Result<Complex64> {
    PrimeLevelEisenstein::from_model(model, *budget)?.truncate_at(y_cut, z)
}

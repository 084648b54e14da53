use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::context::PipelineContext;
use super::contour::{integrand_h, residue_at_zero, shifted_contour_integral};
use super::mellin::g_function;
use super::series::divisor_character_sums;
use crate::eisenstein::{eval_nonconstant_row, EisensteinModel, PrimeLevelEisenstein};
use crate::error::{LabError, Result};
use crate::geometry::{cuspidal_zone_membership, integrate_refined, QuadratureGrid};
use crate::quad::{adaptive_with_limit, exp_sinh};
use crate::report::{MomentReport, PassPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneRoute {
    /// 2D quadrature of y|E*|² over the zone at ∞
    Quadrature,
    /// Σ λ²/n g(2πnY)
    CoefficientSum,
    /// residue at 0 plus the integral on Re s = −c
    Contour,
    /// the Mellin integral taken on the saddle line Re s ≈ 4πY, with no residue
    SaddleLine,
}

impl ZoneRoute {
    pub const SPECIFIED: [ZoneRoute; 3] = [ZoneRoute::Quadrature, ZoneRoute::CoefficientSum, ZoneRoute::Contour];
    pub const ALL: [ZoneRoute; 4] = [
        ZoneRoute::Quadrature,
        ZoneRoute::CoefficientSum,
        ZoneRoute::Contour,
        ZoneRoute::SaddleLine,
    ];
}

impl fmt::Display for ZoneRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZoneRoute::Quadrature => "quadrature",
            ZoneRoute::CoefficientSum => "coefficient_sum",
            ZoneRoute::Contour => "contour",
            ZoneRoute::SaddleLine => "saddle_line",
        })
    }
}

impl FromStr for ZoneRoute {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "quadrature" => Ok(ZoneRoute::Quadrature),
            "coefficient_sum" | "coefficients" => Ok(ZoneRoute::CoefficientSum),
            "contour" => Ok(ZoneRoute::Contour),
            "saddle_line" | "saddle" => Ok(ZoneRoute::SaddleLine),
            other => Err(LabError::InvalidArgument(format!("unknown route {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZoneValue {
    pub n: u64,
    pub y: f64,
    pub route: ZoneRoute,
    /// 12/Λ²(1,ψ) ∫_Y^∞ ∫_0^1 y |E*_{1,ψ}(z, ½) − e*|² dμ
    pub value: Complex64,
    pub err_bound: f64,
    pub runtime_ms: f64,
}

const X_NODES: usize = 64;

fn x_nodes() -> Vec<f64> {
    (0..X_NODES).map(|k| (k as f64 + 0.5) / X_NODES as f64).collect()
}

/// Runs `f` inside a quadrature closure, keeping the first error.
fn guarded<F: Fn(f64) -> Result<f64>>(f: F) -> (impl Fn(f64) -> f64, std::rc::Rc<Cell<Option<LabError>>>) {
    let failure = std::rc::Rc::new(Cell::new(None));
    let slot = failure.clone();
    (
        move |t: f64| match f(t) {
            Ok(v) => v,
            Err(e) => {
                slot.set(Some(e));
                0.0
            }
        },
        failure,
    )
}

/// ∫_Y^∞ dy/y² ∫_0^1 dx of w(y)·Φ(f(x+iy)) where f is a row of values in the cusp frame.
fn zone_integral<R, P>(y_cut: f64, row: R, weight: P) -> Result<(f64, f64)>
where
    R: Fn(f64, &[f64]) -> Result<Vec<Complex64>>,
    P: Fn(f64, Complex64) -> f64,
{
    let xs = x_nodes();
    let (f, failure) = guarded(|y: f64| -> Result<f64> {
        let vals = row(y, &xs)?;
        let mean = vals.iter().map(|&v| weight(y, v)).sum::<f64>() / X_NODES as f64;
        Ok(mean / (y * y))
    });
    // decay e^{−4πy} at least
    let r = exp_sinh(f, y_cut, 1.0 / (4.0 * PI), 1e-13);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((r.value, r.error))
}

fn e_star(ctx: &PipelineContext) -> Result<EisensteinModel> {
    EisensteinModel::trivial_twist(ctx.psi.clone(), Complex64::new(0.5, 0.0))
}

fn quadrature_route(ctx: &PipelineContext) -> Result<(f64, f64)> {
    let model = e_star(ctx)?;
    let lam2 = ctx.lambda_one()?.powi(2);
    let (v, err) = zone_integral(
        ctx.y,
        |y, xs| eval_nonconstant_row(y, xs, &model, &ctx.budget),
        |y, v| y * v.norm_sqr(),
    )?;
    Ok((12.0 / lam2 * v, 12.0 / lam2 * err))
}

fn coefficient_route(ctx: &PipelineContext) -> Result<(f64, f64)> {
    let lam2 = ctx.lambda_one()?.powi(2);
    // g(2πnY) ≈ e^{−4πnY}/(8nY): stop once a term is negligible
    let mut n_max = 1;
    while (-4.0 * PI * (n_max as f64) * ctx.y).exp() > 1e-20 {
        n_max += 1;
    }
    let lam = divisor_character_sums(&ctx.psi, n_max + 1);
    let mut acc = 0.0;
    for n in 1..=n_max {
        if lam[n] != 0.0 {
            acc += lam[n] * lam[n] / n as f64 * g_function(2.0 * PI * n as f64 * ctx.y)?;
        }
    }
    let next = (n_max + 1) as f64;
    // λ² ≤ d² ≤ 4n, geometric tail of ratio e^{−4πY}
    let tail = 4.0 * g_function(2.0 * PI * next * ctx.y)? / (1.0 - (-4.0 * PI * ctx.y).exp());
    let scale = 12.0 / lam2 * 8.0 / (2.0 * PI);
    Ok((scale * acc, scale * (tail + 1e-14 * acc)))
}

fn contour_route(ctx: &PipelineContext) -> Result<(f64, f64)> {
    let res = residue_at_zero(ctx)?.value;
    let shifted = shifted_contour_integral(ctx)?;
    let pref = 12.0 / (ctx.n as f64 * PI * ctx.l_one * ctx.l_one);
    let sum = res + shifted.value;
    // both pieces are O(1) and cancel; roundoff in each sets the floor
    let floor = 1e-14 * (res.norm() + shifted.value.norm());
    let err = shifted.quadrature_error + shifted.tail_bound + floor;
    Ok((pref * sum.re, pref * err))
}

/// (1/2πi) ∫_{(σ)} H(s) ds with σ near the saddle of Γ⁴((1+s)/2)/Γ(1+s) (πY)^{−s}.
pub fn saddle_line_integral(ctx: &PipelineContext) -> Result<(f64, f64)> {
    let sigma = (4.0 * PI * ctx.y - 1.0).max(3.0);
    let h = |t: f64| integrand_h(Complex64::new(sigma, t), ctx);
    let mut peak = h(0.0)?.norm();
    let mut t_max = 10.0;
    loop {
        let v = h(t_max)?.norm();
        peak = peak.max(v);
        if v < 1e-18 * peak {
            break;
        }
        t_max += 10.0;
        if t_max > 400.0 {
            return Err(LabError::BudgetExceeded {
                what: "saddle-line truncation",
                estimate: v,
                target: 1e-18 * peak,
            });
        }
    }
    let (f, failure) = guarded(|t| Ok(h(t)?.re));
    let r = adaptive_with_limit(f, 0.0, t_max, 1e-18 * peak, 1e-13, 4000);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((r.value / PI, r.error / PI))
}

fn saddle_route(ctx: &PipelineContext) -> Result<(f64, f64)> {
    let (v, err) = saddle_line_integral(ctx)?;
    let pref = 12.0 / (ctx.n as f64 * PI * ctx.l_one * ctx.l_one);
    Ok((pref * v, pref * err))
}

pub fn cuspzone_integral(ctx: &PipelineContext, route: ZoneRoute) -> Result<ZoneValue> {
    let start = Instant::now();
    let (value, err_bound) = match route {
        ZoneRoute::Quadrature => quadrature_route(ctx)?,
        ZoneRoute::CoefficientSum => coefficient_route(ctx)?,
        ZoneRoute::Contour => contour_route(ctx)?,
        ZoneRoute::SaddleLine => saddle_route(ctx)?,
    };
    Ok(ZoneValue {
        n: ctx.n,
        y: ctx.y,
        route,
        value: Complex64::new(value, 0.0),
        err_bound,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Relative agreement of each route with the coefficient sum.
pub fn route_agreement(values: &[ZoneValue], tolerance: f64) -> Vec<MomentReport> {
    let Some(reference) = values.iter().find(|v| v.route == ZoneRoute::CoefficientSum) else {
        return Vec::new();
    };
    values
        .iter()
        .filter(|v| v.route != ZoneRoute::CoefficientSum)
        .map(|v| {
            MomentReport::with_policy(
                format!("cuspzone {} vs coefficient_sum", v.route),
                v.value,
                reference.value,
                tolerance,
                PassPolicy::Relative,
            )
            .note("N", v.n)
            .note("Y", v.y)
            .note("err_bound", format!("{:e}", v.err_bound))
        })
        .collect()
}

/// Pieces of the Cauchy inequality for ∫_F (E^Y)³ e_𝔞 dμ.
#[derive(Clone, Debug, Serialize)]
pub struct CrossTerm {
    /// ∫_F (E^Y)³ e_𝔞
    pub lhs: Complex64,
    /// ∫_F (E^Y)² e_𝔞²
    pub square_e: Complex64,
    /// ∫_F (E^Y)⁴ on the modular-geometry grid
    pub fourth: Complex64,
    pub fourth_refinement: f64,
    /// the same integral summed in the cusp frames
    pub fourth_direct: f64,
}

pub fn cross_term_parts(ctx: &PipelineContext) -> Result<CrossTerm> {
    let eis = PrimeLevelEisenstein::new(ctx.psi.clone(), ctx.budget)?;
    let (mut lhs, mut sq, mut fourth_direct) = (0.0, 0.0, 0.0);
    let (mut lhs_im, mut sq_im) = (0.0f64, 0.0f64);
    for m in &eis.slashed {
        let row = |y: f64, xs: &[f64]| -> Result<Vec<Complex64>> {
            Ok(eval_nonconstant_row(y, xs, m, &ctx.budget)?
                .into_iter()
                .map(|v| v * m.scalar)
                .collect())
        };
        // e_𝔞 = √y in both zones
        lhs += zone_integral(ctx.y, row, |y, v| (v.powi(3) * y.sqrt()).re)?.0;
        lhs_im += zone_integral(ctx.y, row, |y, v| (v.powi(3) * y.sqrt()).im)?.0.abs();
        sq += zone_integral(ctx.y, row, |y, v| (v * v * y).re)?.0;
        sq_im += zone_integral(ctx.y, row, |y, v| (v * v * y).im)?.0.abs();
        fourth_direct += zone_integral(ctx.y, row, |_, v| v.powi(4).re)?.0;
    }
    let grid = QuadratureGrid::for_zones(ctx.n, ctx.y, 24, 48);
    let cosets = eis.cosets.clone();
    let fourth = integrate_refined(
        |p| {
            if cuspidal_zone_membership(p.z, &cosets, ctx.y).is_some() {
                Ok(eis.truncate_at(ctx.y, p.z)?.powi(4))
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        },
        &grid,
    )?;
    Ok(CrossTerm {
        lhs: Complex64::new(lhs, lhs_im),
        square_e: Complex64::new(sq, sq_im),
        fourth: fourth.value,
        fourth_refinement: fourth.refinement,
        fourth_direct,
    })
}

/// |∫(E^Y)³e| ≤ (∫(E^Y)²e²)^{½} (∫(E^Y)⁴)^{½}, after checking the integrands are real.
pub fn cross_term(ctx: &PipelineContext) -> Result<MomentReport> {
    let parts = cross_term_parts(ctx)?;
    let rhs = (parts.square_e.re * parts.fourth.re).sqrt();
    let mut report = MomentReport::with_policy(
        "cross-term Cauchy inequality",
        Complex64::new(parts.lhs.re.abs(), 0.0),
        Complex64::new(rhs, 0.0),
        0.0,
        PassPolicy::UpperBound,
    )
    .note("N", ctx.n)
    .note("Y", ctx.y)
    .note("square_e", format!("{:e}", parts.square_e.re))
    .note("fourth_grid", format!("{:e}", parts.fourth.re))
    .note("fourth_grid_refinement", format!("{:e}", parts.fourth_refinement))
    .note("fourth_direct", format!("{:e}", parts.fourth_direct))
    .note("ratio", format!("{:e}", parts.lhs.re.abs() / rhs));
    let im = [parts.lhs.im, parts.square_e.im, parts.fourth.im];
    let scale = parts.square_e.re.abs().max(parts.fourth.re.abs());
    if im.iter().any(|v| v.abs() > 1e-8 * scale.max(1e-300)) {
        report = report.fail(format!("imaginary parts {im:?} are not negligible"));
    }
    if !(parts.square_e.re > 0.0 && parts.fourth.re > 0.0) {
        report = report.fail("Cauchy factors are not positive");
    }
    Ok(report)
}

/// One level of the sweep, everything normalized by log²N/ν(N).
#[derive(Clone, Debug, Serialize)]
pub struct Theorem0Row {
    pub n: u64,
    pub y: f64,
    pub scale: f64,
    pub cleaned: f64,
    /// 2·(Cauchy bound) for the cross terms, that is 2·2·√(∫(E^Y)²e²·∫(E^Y)⁴)
    pub cross_bound: f64,
    pub cleaned_normalized: f64,
    pub total_normalized: f64,
}

pub fn theorem0diff_row(ctx: &PipelineContext) -> Result<Theorem0Row> {
    let cleaned = cuspzone_integral(ctx, ZoneRoute::CoefficientSum)?.value.re;
    let parts = cross_term_parts(ctx)?;
    let cross_bound = 4.0 * (parts.square_e.re * parts.fourth.re).sqrt();
    let nf = ctx.n as f64;
    let scale = nf.ln().powi(2) / ctx.nu as f64;
    Ok(Theorem0Row {
        n: ctx.n,
        y: ctx.y,
        scale,
        cleaned,
        cross_bound,
        cleaned_normalized: cleaned / scale,
        total_normalized: (cleaned + cross_bound) / scale,
    })
}

/// Sweep summary: whether the normalized (cleaned) piece decreases with N,
/// and the offset Φ from fitting total = A·log²N/ν + Φ.
pub fn theorem0diff_report(levels: &[u64], y: f64) -> Result<(Vec<Theorem0Row>, MomentReport)> {
    if levels.len() < 2 {
        return Err(LabError::InvalidArgument("the sweep needs at least two levels".into()));
    }
    let rows = levels
        .iter()
        .map(|&n| theorem0diff_row(&PipelineContext::new(n, y)?))
        .collect::<Result<Vec<_>>>()?;
    let decreasing = rows
        .windows(2)
        .all(|w| w[1].cleaned_normalized < w[0].cleaned_normalized);
    let xs: Vec<f64> = rows.iter().map(|r| r.scale).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.cleaned + r.cross_bound).collect();
    let (slope, offset, offset_err) = linear_fit(&xs, &ys);
    let loo: Vec<f64> = (0..rows.len())
        .filter(|_| rows.len() > 2)
        .map(|skip| {
            let (x, y): (Vec<f64>, Vec<f64>) = xs
                .iter()
                .zip(&ys)
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, (a, b))| (*a, *b))
                .unzip();
            linear_fit(&x, &y).1
        })
        .collect();
    let first = rows.first().expect("non-empty");
    let last = rows.last().expect("non-empty");
    let mut report = MomentReport::with_policy(
        "theorem0diff trend",
        Complex64::new(last.cleaned_normalized, 0.0),
        Complex64::new(first.cleaned_normalized, 0.0),
        0.0,
        PassPolicy::UpperBound,
    )
    .note("Y", y)
    .note("levels", format!("{levels:?}"))
    .note("decreasing", decreasing)
    .note("fit_slope", format!("{slope:e}"))
    .note("phi_offset", format!("{offset:e}"))
    .note("phi_offset_err", format!("{offset_err:e}"))
    .note("phi_leave_one_out", format!("{loo:?}"));
    for r in &rows {
        report = report.note(format!("N={}", r.n), format!("{:e}", r.cleaned_normalized));
    }
    if !decreasing {
        report = report.fail("normalized (cleaned) piece is not decreasing along the sweep");
    }
    Ok((rows, report))
}

/// Least squares y = a x + b, returning (a, b, standard error of b).
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let rss: f64 = x.iter().zip(y).map(|(p, q)| (q - a * p - b).powi(2)).sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let se = (rss / dof * (1.0 / n + mx * mx / sxx.max(1e-300))).sqrt();
    (a, b, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree_at_five() {
        let ctx = PipelineContext::new(5, 2.0).unwrap();
        let vals: Vec<ZoneValue> = ZoneRoute::ALL
            .iter()
            .map(|&r| cuspzone_integral(&ctx, r).unwrap())
            .collect();
        for v in &vals {
            println!(
                "{} {:e} ± {:e} ({:.1} ms)",
                v.route, v.value.re, v.err_bound, v.runtime_ms
            );
        }
        let coeff = vals[1].value.re;
        assert!((vals[0].value.re - coeff).abs() < 1e-6 * coeff);
        assert!((vals[3].value.re - coeff).abs() < 1e-6 * coeff);
        // the literal contour route agrees only to its cancellation floor
        assert!((vals[2].value.re - coeff).abs() <= vals[2].err_bound + vals[1].err_bound);
    }

    #[test]
    fn fourier_cutoff_doubling() {
        let mut ctx = PipelineContext::new(5, 2.0).unwrap();
        let a = cuspzone_integral(&ctx, ZoneRoute::Quadrature).unwrap().value.re;
        ctx.budget.target_abs_err = 1e-40;
        let b = cuspzone_integral(&ctx, ZoneRoute::Quadrature).unwrap().value.re;
        assert!((a - b).abs() <= 1e-8 * a.abs());
    }

    #[test]
    fn decreasing_in_y() {
        let v: Vec<f64> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&y| {
                let ctx = PipelineContext::new(5, y).unwrap();
                cuspzone_integral(&ctx, ZoneRoute::CoefficientSum).unwrap().value.re
            })
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2] && v[2] > 0.0, "{v:?}");
    }

    #[test]
    fn cauchy_inequality_at_five() {
        let ctx = PipelineContext::new(5, 2.0).unwrap();
        let parts = cross_term_parts(&ctx).unwrap();
        println!("{parts:?}");
        let r = cross_term(&ctx).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(parts.square_e.re > 0.0 && parts.fourth.re > 0.0);
        // ∫(E^Y)²e² over both zones is one sixth of the (cleaned) value
        let cleaned = cuspzone_integral(&ctx, ZoneRoute::CoefficientSum).unwrap().value.re;
        assert!((6.0 * parts.square_e.re - cleaned).abs() < 1e-8 * cleaned);
        assert!((parts.fourth.re - parts.fourth_direct).abs() < 1e-3 * parts.fourth_direct);
    }

    #[test]
    fn routes_agree_at_thirteen() {
        let ctx = PipelineContext::new(13, 2.0).unwrap();
        let coeff = cuspzone_integral(&ctx, ZoneRoute::CoefficientSum).unwrap();
        for r in [ZoneRoute::Quadrature, ZoneRoute::SaddleLine] {
            let v = cuspzone_integral(&ctx, r).unwrap();
            assert!((v.value - coeff.value).norm() < 1e-5 * coeff.value.norm(), "{v:?}");
        }
        let v = cuspzone_integral(&ctx, ZoneRoute::Contour).unwrap();
        assert!((v.value - coeff.value).norm() <= v.err_bound + coeff.err_bound, "{v:?}");
    }

    #[test]
    fn sweep_is_driven_by_l_one() {
        let (rows, report) = theorem0diff_report(&[5, 13, 17, 29], 2.0).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(report.pass, report.metadata["decreasing"] == "true");
        // only n = 1 survives at Y = 2, so N L²(1,ψ)·(cleaned) is level-free
        let k: Vec<f64> = rows
            .iter()
            .map(|r| {
                let ctx = PipelineContext::new(r.n, 2.0).unwrap();
                r.cleaned * r.n as f64 * ctx.l_one * ctx.l_one
            })
            .collect();
        for v in &k {
            assert!((v / k[0] - 1.0).abs() < 1e-9, "{k:?}");
        }
        for r in &rows {
            assert!(r.cross_bound > 0.0 && r.cross_bound < r.cleaned);
        }
    }

    #[test]
    fn route_names_round_trip() {
        for r in ZoneRoute::ALL {
            assert_eq!(r.to_string().parse::<ZoneRoute>().unwrap(), r);
        }
        assert!("bogus".parse::<ZoneRoute>().is_err());
    }
}

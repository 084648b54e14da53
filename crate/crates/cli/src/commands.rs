use std::collections::BTreeMap;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Subcommand};
use eisenlab::arith::{level_data, CharacterRef, DirichletCharacter};
use eisenlab::eisenstein::{direct_series_oracle, eval_e_star, EisensteinModel};
use eisenlab::geometry::{coset_reps, locate, volume, CuspLabel};
use eisenlab::lfun::{completed_lambda, dirichlet_l};
use eisenlab::moment::{
    cross_term, cuspzone_integral, residue_at_zero, route_agreement, shifted_contour_integral, theorem0diff_report,
    PipelineContext, ZoneRoute, ZoneValue, DEFAULT_C,
};
use eisenlab::recipe::{
    auto_schedule, corollary_consistency, f_eps, i2_main, limit_path_evaluate, main_prediction, threshold_scan,
    ChiKind, LimitSettings, ShiftState,
};
use eisenlab::report::{MomentReport, PassPolicy};
use eisenlab::special::PrecisionBudget;
use eisenlab::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{parse_list, RunConfig, Section};
use crate::output::{num, Output, Table};
use crate::verify::{run_core, Params};

/// `re` or `re,im`.
fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<f64> = parse_list(s)?;
    match parts.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => bail!("expected `re` or `re,im`, got {s:?}"),
    }
}

fn parse_kind(s: &str) -> Result<ChiKind> {
    match s {
        "quadratic" | "quad" => Ok(ChiKind::Quadratic),
        "complex" => Ok(ChiKind::Complex),
        _ => bail!("kind must be quadratic or complex, got {s:?}"),
    }
}

fn parse_chi(s: &str) -> Result<DirichletCharacter> {
    Ok(CharacterRef::from_str(s)?.resolve()?)
}

fn kind_name(k: ChiKind) -> &'static str {
    match k {
        ChiKind::Quadratic => "quadratic",
        ChiKind::Complex => "complex",
    }
}

fn routes_arg(s: &str) -> Result<Vec<ZoneRoute>> {
    if s == "all" {
        return Ok(ZoneRoute::ALL.to_vec());
    }
    parse_list(s)
}

fn joined<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite name
    #[arg(long)]
    suite: Option<String>,
    /// Relative perturbation injected into one kernel (a sensitivity self-test)
    #[arg(long)]
    perturb: Option<f64>,
    /// Kernel the perturbation hits
    #[arg(long)]
    perturb_kernel: Option<String>,
    /// Seeded points per randomized check
    #[arg(long)]
    points: Option<usize>,
    /// Levels for the Eisenstein and pipeline checks
    #[arg(long = "N", value_delimiter = ',')]
    levels: Vec<u64>,
    /// Cusp-zone routes compared against the coefficient sum
    #[arg(long)]
    routes: Option<String>,
    #[arg(long)]
    gauss_q_max: Option<u64>,
    /// Run only these checks
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

impl VerifyArgs {
    pub fn overrides(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("suite", self.suite.clone());
        put("perturb", self.perturb.map(|p| p.to_string()));
        put("perturb_kernel", self.perturb_kernel.clone());
        put("points", self.points.map(|p| p.to_string()));
        put("levels", (!self.levels.is_empty()).then(|| joined(&self.levels)));
        put("routes", self.routes.clone());
        put("gauss_q_max", self.gauss_q_max.map(|q| q.to_string()));
        m
    }
}

pub fn verify(cfg: &RunConfig, only: &[String]) -> Result<Output> {
    if cfg.command != Section::Verify {
        bail!("not a verify configuration");
    }
    let params = Params::from_config(cfg)?;
    let reports = run_core(&params, only)?;
    Ok(Output::reports("verify", &reports).with_seed(cfg.seed))
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// prediction, threshold, trend or zone
    #[arg(long)]
    what: Option<String>,
    #[arg(long = "N", value_delimiter = ',')]
    levels: Vec<u64>,
    /// T for prediction; a T list for threshold
    #[arg(long = "T")]
    t: Option<String>,
    #[arg(long = "Y")]
    y: Option<f64>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    routes: Option<String>,
}

impl SweepArgs {
    pub fn overrides(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("what", self.what.clone());
        put("levels", (!self.levels.is_empty()).then(|| joined(&self.levels)));
        put("t", self.t.clone());
        put("y", self.y.map(|y| y.to_string()));
        put("kind", self.kind.clone());
        put("routes", self.routes.clone());
        m
    }
}

fn zone_table(levels: &[u64], y: f64, c: f64, routes: &[ZoneRoute]) -> Result<(Table, Vec<ZoneValue>)> {
    let jobs: Vec<(u64, ZoneRoute)> = levels
        .iter()
        .flat_map(|&n| routes.iter().map(move |&r| (n, r)))
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(n, r)| cuspzone_integral(&PipelineContext::with_c(n, y, c)?, r))
        .collect::<eisenlab::Result<Vec<_>>>()?;
    let mut t = Table::new(&["N", "Y", "route", "value_re", "value_im", "err_bound", "runtime_ms"]);
    for v in &values {
        t.push(vec![
            json!(v.n),
            num(v.y),
            json!(v.route.to_string()),
            num(v.value.re),
            num(v.value.im),
            num(v.err_bound),
            num(v.runtime_ms),
        ]);
    }
    Ok((t, values))
}

pub fn sweep(cfg: &RunConfig) -> Result<Output> {
    if cfg.command != Section::Sweep {
        bail!("not a sweep configuration");
    }
    let what: String = cfg.get("what", "prediction".to_string())?;
    let table = match what.as_str() {
        "prediction" => {
            let levels = cfg.list("levels", &[101u64, 211, 401])?;
            let t: f64 = cfg.get("t", 0.0)?;
            let kind = parse_kind(&cfg.get("kind", "quadratic".to_string())?)?;
            let mut tab = Table::new(&["N", "nu", "T", "kind", "log2N_over_nu", "main_prediction", "i2_main"]);
            for n in levels {
                let nu = level_data(n).nu;
                tab.push(vec![
                    json!(n),
                    json!(nu),
                    num(t),
                    json!(kind_name(kind)),
                    num((n as f64).ln().powi(2) / nu as f64),
                    num(main_prediction(n, t, kind)),
                    num(i2_main(n)),
                ]);
            }
            tab
        }
        "threshold" => {
            let levels = cfg.list("levels", &[101u64])?;
            let mut tab = Table::new(&[
                "N",
                "T",
                "x",
                "bracket",
                "small_x_reference",
                "envelope",
                "upndown_displayed",
                "upndown_rescaled",
            ]);
            for n in levels {
                let schedule = match cfg.parameters.get("t") {
                    Some(s) => parse_list(s)?,
                    None => auto_schedule(n),
                };
                for r in threshold_scan(n, &schedule) {
                    tab.push(vec![
                        json!(n),
                        num(r.t),
                        num(r.x),
                        num(r.bracket),
                        num(r.small_x_reference),
                        num(r.envelope),
                        num(r.upndown_displayed),
                        num(r.upndown_rescaled),
                    ]);
                }
            }
            tab
        }
        "trend" => {
            let levels = cfg.list("levels", &[5u64, 13, 17, 29])?;
            let (rows, _) = theorem0diff_report(&levels, cfg.get("y", 2.0)?)?;
            trend_table(&rows)
        }
        "zone" => {
            let levels = cfg.list("levels", &[5u64, 13, 17, 29])?;
            let routes = routes_arg(&cfg.get("routes", "all".to_string())?)?;
            zone_table(&levels, cfg.get("y", 2.0)?, DEFAULT_C, &routes)?.0
        }
        other => bail!("unknown sweep {other:?} (prediction, threshold, trend or zone)"),
    };
    Ok(Output::table(format!("sweep {what}"), table).with_seed(cfg.seed))
}

fn trend_table(rows: &[eisenlab::moment::Theorem0Row]) -> Table {
    let mut t = Table::new(&[
        "N",
        "Y",
        "scale",
        "cleaned",
        "cross_bound",
        "cleaned_normalized",
        "total_normalized",
    ]);
    for r in rows {
        t.push(vec![
            json!(r.n),
            num(r.y),
            num(r.scale),
            num(r.cleaned),
            num(r.cross_bound),
            num(r.cleaned_normalized),
            num(r.total_normalized),
        ]);
    }
    t
}

#[derive(Subcommand, Debug)]
pub enum RecipeCmd {
    /// The limit α → α₀ for all four (ε₃, ε₄)
    Limit {
        #[arg(long, default_value = "5:quad")]
        chi: String,
        #[arg(long = "T", default_value_t = 0.1)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        eta_prime: f64,
    },
    /// F_ε at α₀
    Feps {
        #[arg(long = "T", default_value_t = 0.0)]
        t: f64,
        /// four signs, e.g. 1,1,1,-1
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,1,1,1")]
        eps: Vec<i8>,
    },
    /// The two-case ratio of the assembled predictors
    Corollary {
        #[arg(long = "N", default_value_t = 101)]
        n: u64,
        #[arg(long = "T", default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value = "quadratic")]
        kind: String,
    },
}

pub fn recipe(cmd: &RecipeCmd) -> Result<Output> {
    match cmd {
        RecipeCmd::Limit { chi, t, eta_prime } => {
            let chi = parse_chi(chi)?;
            let settings = LimitSettings {
                eta_prime: *eta_prime,
                ..LimitSettings::default()
            };
            let p = limit_path_evaluate(&chi, *t, settings, &PrecisionBudget::default())?;
            let mut tab = Table::new(&[
                "eps3",
                "eps4",
                "case",
                "value_re",
                "value_im",
                "displayed_re",
                "displayed_im",
                "pole_residual",
            ]);
            for (i, term) in p.terms.iter().enumerate() {
                tab.push(vec![
                    json!(term.state.epsilon[2]),
                    json!(term.state.epsilon[3]),
                    json!(term.case_label),
                    num(term.value.re),
                    num(term.value.im),
                    num(p.displayed[i].re),
                    num(p.displayed[i].im),
                    num(p.pole_residuals[i]),
                ]);
            }
            Ok(Output::table("recipe limit", tab))
        }
        RecipeCmd::Feps { t, eps } => {
            let epsilon: [i8; 4] = eps
                .as_slice()
                .try_into()
                .map_err(|_| anyhow!("--eps needs four signs"))?;
            if epsilon.iter().any(|e| e.abs() != 1) {
                bail!("signs must be ±1");
            }
            let st = ShiftState {
                epsilon,
                alpha: ShiftState::alpha0(*t),
                t: *t,
                n: 1,
                chi_kind: ChiKind::Quadratic,
            };
            let f = f_eps(&st, &PrecisionBudget::default())?;
            let mut tab = Table::new(&["T", "eps", "value_re", "value_im", "abs_error", "tail_bound"]);
            tab.push(vec![
                num(*t),
                json!(joined(&epsilon)),
                num(f.value.re),
                num(f.value.im),
                num(f.abs_error),
                num(f.tail_bound),
            ]);
            Ok(Output::table("recipe feps", tab))
        }
        RecipeCmd::Corollary { n, t, kind } => {
            let r = corollary_consistency(*n, *t, parse_kind(kind)?);
            Ok(Output::reports("recipe corollary", &[r]))
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum MomentCmd {
    /// Cusp-zone integral by several routes, checked against the coefficient sum
    Pipeline {
        #[arg(long = "N", default_value_t = 5)]
        n: u64,
        #[arg(long = "Y", default_value_t = 2.0)]
        y: f64,
        /// comma list or `all`
        #[arg(long, default_value = "all")]
        routes: String,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        /// relative tolerance for route agreement
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Route values over a list of levels
    Sweep {
        #[arg(long = "N", value_delimiter = ',', default_value = "5,13,17,29")]
        levels: Vec<u64>,
        #[arg(long = "Y", default_value_t = 2.0)]
        y: f64,
        #[arg(long, default_value = "all")]
        routes: String,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
    },
    /// Residue at 0 and the shifted line integral
    Residue {
        #[arg(long = "N", default_value_t = 5)]
        n: u64,
        #[arg(long = "Y", default_value_t = 2.0)]
        y: f64,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
    },
    /// Cauchy bound for the cross term
    Cross {
        #[arg(long = "N", default_value_t = 5)]
        n: u64,
        #[arg(long = "Y", default_value_t = 2.0)]
        y: f64,
    },
    /// Normalized (cleaned) piece along a level sweep
    Trend {
        #[arg(long = "N", value_delimiter = ',', default_value = "5,13,17,29")]
        levels: Vec<u64>,
        #[arg(long = "Y", default_value_t = 2.0)]
        y: f64,
    },
}

pub fn moment(cmd: &MomentCmd) -> Result<Output> {
    match cmd {
        MomentCmd::Pipeline { n, y, routes, c, tol } => {
            let mut routes = routes_arg(routes)?;
            if !routes.contains(&ZoneRoute::CoefficientSum) {
                routes.insert(0, ZoneRoute::CoefficientSum);
            }
            let (_, values) = zone_table(&[*n], *y, *c, &routes)?;
            let mut reports = route_agreement(&values, *tol);
            for (r, v) in reports
                .iter_mut()
                .zip(values.iter().filter(|v| v.route != ZoneRoute::CoefficientSum))
            {
                *r = r.clone().note("runtime_ms", format!("{:.3}", v.runtime_ms));
            }
            Ok(Output::reports("moment pipeline", &reports))
        }
        MomentCmd::Sweep { levels, y, routes, c } => {
            let (t, _) = zone_table(levels, *y, *c, &routes_arg(routes)?)?;
            Ok(Output::table("moment sweep", t))
        }
        MomentCmd::Residue { n, y, c } => {
            let ctx = PipelineContext::with_c(*n, *y, *c)?;
            let r = residue_at_zero(&ctx)?;
            let s = shifted_contour_integral(&ctx)?;
            let mut t = Table::new(&["quantity", "re", "im"]);
            let mut row = |name: &str, v: Complex64| t.push(vec![json!(name), num(v.re), num(v.im)]);
            row("residue", r.value);
            row("K(0)", r.k[0]);
            row("K'(0)", r.k[1]);
            row("K''(0)", r.k[2]);
            row("K(0) closed", r.k0_closed.into());
            row("shifted integral", s.value);
            row("shifted quadrature error", s.quadrature_error.into());
            row("shifted tail bound", s.tail_bound.into());
            row("residue + shifted", r.value + s.value);
            Ok(Output::table("moment residue", t))
        }
        MomentCmd::Cross { n, y } => {
            let r = cross_term(&PipelineContext::new(*n, *y)?)?;
            Ok(Output::reports("moment cross", &[r]))
        }
        MomentCmd::Trend { levels, y } => {
            let (rows, report) = theorem0diff_report(levels, *y)?;
            let mut out = Output::reports("moment trend", &[report]);
            // rows go to the table; the report decides the exit status
            let pass = out.pass;
            out = Output::table("moment trend", trend_table(&rows));
            out.pass = pass;
            Ok(out)
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum EisCmd {
    /// E*(z, s) from the Fourier expansion
    Eval {
        #[arg(long, default_value = "5:quad")]
        chi: String,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        s: String,
        /// x,y
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Fourier value against the lattice sum (Re s > 1)
    Oracle {
        #[arg(long, default_value = "5:quad")]
        chi: String,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

pub fn eis(cmd: &EisCmd) -> Result<Output> {
    let (chi, s, z) = match cmd {
        EisCmd::Eval { chi, s, z } | EisCmd::Oracle { chi, s, z } => (chi, s, z),
    };
    let model = EisensteinModel::trivial_twist(parse_chi(chi)?, parse_complex(s)?)?;
    let z = parse_complex(z)?;
    if z.im <= 0.0 {
        bail!("z must lie in the upper half-plane");
    }
    let budget = PrecisionBudget::default();
    let v = eval_e_star(z, &model, &budget)?;
    match cmd {
        EisCmd::Eval { .. } => {
            let mut t = Table::new(&["x", "y", "value_re", "value_im"]);
            t.push(vec![num(z.re), num(z.im), num(v.re), num(v.im)]);
            Ok(Output::table("eis eval", t))
        }
        EisCmd::Oracle { .. } => {
            let o = direct_series_oracle(z, &model, 2000.0)?;
            let r = MomentReport::with_policy("E* Fourier vs lattice sum", v, o.value, 1e-8, PassPolicy::Relative)
                .note("z", z);
            Ok(Output::reports("eis oracle", &[r]))
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum GeomCmd {
    /// Cusps of Γ₀(N) with widths, and the volume
    Cusps {
        #[arg(long = "N")]
        n: u64,
    },
    /// Reduce z to the fundamental domain and name its coset
    Locate {
        #[arg(long = "N")]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

fn cusp_name(l: CuspLabel) -> String {
    match l {
        CuspLabel::Infinity => "inf".into(),
        CuspLabel::Zero => "0".into(),
        CuspLabel::Other { num, den } => format!("{num}/{den}"),
    }
}

pub fn geom(cmd: &GeomCmd) -> Result<Output> {
    match cmd {
        GeomCmd::Cusps { n } => {
            if *n == 0 {
                bail!("N must be positive");
            }
            let cosets = coset_reps(*n);
            let mut t = Table::new(&["cusp", "width", "coset", "index", "volume"]);
            for cusp in &cosets.cusps {
                t.push(vec![
                    json!(cusp_name(cusp.label)),
                    json!(cusp.width),
                    json!(cusp.coset),
                    json!(cosets.len()),
                    num(volume(*n)),
                ]);
            }
            Ok(Output::table("geom cusps", t))
        }
        GeomCmd::Locate { n, z } => {
            let z = parse_complex(z)?;
            if z.im <= 0.0 {
                bail!("z must lie in the upper half-plane");
            }
            let cosets = coset_reps(*n);
            let loc = locate(z, &cosets);
            let cusp = cosets.cusps[loc.cusp].label;
            let mut t = Table::new(&["x", "y", "coset", "cusp", "w_re", "w_im"]);
            t.push(vec![
                num(z.re),
                num(z.im),
                json!(loc.coset),
                json!(cusp_name(cusp)),
                num(loc.w.re),
                num(loc.w.im),
            ]);
            Ok(Output::table("geom locate", t))
        }
    }
}

#[derive(Args, Debug)]
pub struct LvalueArgs {
    /// `q:index` or `q:quad`
    #[arg(long, default_value = "5:quad")]
    chi: String,
    /// re or re,im
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    s: String,
}

pub fn lvalue(a: &LvalueArgs) -> Result<Output> {
    let chi = parse_chi(&a.chi)?;
    let s = parse_complex(&a.s)?;
    let l = dirichlet_l(s, &chi)?;
    let mut t = Table::new(&["chi", "s_re", "s_im", "L_re", "L_im", "Lambda_re", "Lambda_im"]);
    let lam = if chi.is_primitive() {
        completed_lambda(s, &chi).ok()
    } else {
        None
    };
    let lam = lam.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    t.push(vec![
        json!(chi.label()),
        num(s.re),
        num(s.im),
        num(l.re),
        num(l.im),
        num(lam.re),
        num(lam.im),
    ]);
    Ok(Output::table("lvalue", t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_and_kind_parsing() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.1,-2").unwrap(), Complex64::new(0.1, -2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert_eq!(parse_kind("quad").unwrap(), ChiKind::Quadratic);
        assert!(parse_kind("real").is_err());
        assert_eq!(routes_arg("all").unwrap().len(), 4);
        assert_eq!(
            routes_arg("contour,saddle").unwrap(),
            vec![ZoneRoute::Contour, ZoneRoute::SaddleLine]
        );
    }
}

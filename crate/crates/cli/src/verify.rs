//! The registered identity checks behind `verify`.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use eisenlab::arith::{enumerate_characters, gauss_sum, is_prime, quadratic_character, DirichletCharacter};
use eisenlab::eisenstein::{direct_series_oracle, eval_e_star, EisensteinModel};
use eisenlab::moment::{
    cuspzone_integral, mellin_g, mellin_g_numeric, residue_at_zero, residue_by_laurent, route_agreement,
    PipelineContext, ZoneRoute,
};
use eisenlab::recipe::{corollary_consistency, quadruple_diagonal_sum, ramanujan_ratio, ChiKind, ShiftState};
use eisenlab::report::{MomentReport, PassPolicy};
use eisenlab::special::{dbw_integral, PrecisionBudget};
use eisenlab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;

pub const CORE_CHECKS: [&str; 8] = [
    "dbw",
    "gauss-sum",
    "mellin-pair",
    "ramanujan",
    "oracle-eisenstein",
    "residue-vs-contour",
    "triple-route",
    "corollary",
];

/// Per-run inputs shared by the checks.
pub struct Params {
    pub seed: u64,
    pub points: usize,
    pub levels: Vec<u64>,
    pub routes: Vec<ZoneRoute>,
    pub gauss_q_max: u64,
    /// relative perturbation applied to one kernel's computed side
    pub perturb: Option<(String, f64)>,
}

impl Params {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let suite: String = cfg.get("suite", "core".to_string())?;
        if suite != "core" {
            bail!("unknown suite {suite:?} (available: core)");
        }
        let eps: f64 = cfg.get("perturb", 0.0)?;
        let kernel: String = cfg.get("perturb_kernel", "dbw".to_string())?;
        if !CORE_CHECKS.contains(&kernel.as_str()) {
            bail!(
                "perturb_kernel {kernel:?} is not a check (one of {})",
                CORE_CHECKS.join(", ")
            );
        }
        let routes = match cfg.parameters.get("routes").map(String::as_str) {
            Some("all") => ZoneRoute::ALL.to_vec(),
            _ => cfg.list(
                "routes",
                &[ZoneRoute::Quadrature, ZoneRoute::CoefficientSum, ZoneRoute::SaddleLine],
            )?,
        };
        let levels: Vec<u64> = cfg.list("levels", &[5, 13])?;
        for &n in &levels {
            if !is_prime(n) || n % 4 != 1 {
                bail!("unsupported level {n}: the pipeline checks need a prime N ≡ 1 mod 4");
            }
        }
        Ok(Params {
            seed: cfg.seed,
            points: cfg.get("points", 10)?,
            levels,
            routes,
            gauss_q_max: cfg.get("gauss_q_max", 200)?,
            perturb: (eps != 0.0).then_some((kernel, eps)),
        })
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    fn factor(&self, kernel: &str) -> f64 {
        match &self.perturb {
            Some((k, e)) if k == kernel => 1.0 + e,
            _ => 1.0,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn errored(name: &str, e: impl std::fmt::Display) -> MomentReport {
    MomentReport::compare(name, c(f64::NAN, 0.0), c(0.0, 0.0), 0.0).fail(e)
}

fn dbw(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("dbw");
    [0.0, 0.1, 0.5, 1.0]
        .into_iter()
        .map(|t| match dbw_integral(t, PrecisionBudget::default()) {
            Ok(r) => MomentReport::with_policy(
                "dbw integral = 8π³",
                c(r.value * f, 0.0),
                c(8.0 * PI.powi(3), 0.0),
                1e-7,
                PassPolicy::Absolute,
            )
            .note("T", t),
            Err(e) => errored("dbw integral = 8π³", e),
        })
        .collect()
}

fn gauss(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("gauss-sum");
    let (mut worst, mut at, mut count) = (0.0f64, (1u64, 1.0f64), 0usize);
    for q in 2..=p.gauss_q_max {
        for chi in enumerate_characters(q).into_iter().filter(|c| c.is_primitive()) {
            let t = gauss_sum(&chi).norm_sqr() * f;
            count += 1;
            if (t - q as f64).abs() >= worst {
                worst = (t - q as f64).abs();
                at = (q, t);
            }
        }
    }
    vec![MomentReport::with_policy(
        "|τ(χ)|² = q, worst primitive χ",
        c(at.1, 0.0),
        c(at.0 as f64, 0.0),
        1e-9,
        PassPolicy::Absolute,
    )
    .note("q_max", p.gauss_q_max)
    .note("characters", count)]
}

fn mellin(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("mellin-pair");
    let mut out: Vec<MomentReport> = [c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)]
        .into_iter()
        .map(|s| match (mellin_g_numeric(s), mellin_g(s)) {
            (Ok(a), Ok(b)) => {
                MomentReport::with_policy("Mellin pair of g", a * f, b, 1e-8, PassPolicy::Absolute).note("s", s)
            }
            (Err(e), _) | (_, Err(e)) => errored("Mellin pair of g", e),
        })
        .collect();
    let s = c(1e-9, 0.0);
    out.push(
        MomentReport::with_policy(
            "s·G(s) → π²/4",
            s * mellin_g(s).expect("G near 0"),
            c(PI * PI / 4.0, 0.0),
            1e-8,
            PassPolicy::Absolute,
        )
        .note("s", s),
    );
    out
}

fn ramanujan(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("ramanujan");
    let mut rng = p.rng(1);
    let chars = [
        quadratic_character(5).expect("ψ mod 5"),
        enumerate_characters(7)
            .into_iter()
            .find(|c| !c.is_real())
            .expect("complex χ mod 7"),
        DirichletCharacter::trivial(),
    ];
    let states: Vec<(ShiftState, DirichletCharacter)> = (0..p.points)
        .map(|_| {
            let chi = chars[rng.gen_range(0..chars.len())].clone();
            let mut epsilon = [1i8; 4];
            let mut alpha = [c(0.0, 0.0); 4];
            for j in 0..4 {
                epsilon[j] = if rng.gen_bool(0.5) { 1 } else { -1 };
                alpha[j] = c(rng.gen_range(0.15..0.4), rng.gen_range(-0.3..0.3)) * epsilon[j] as f64;
            }
            let st = ShiftState {
                epsilon,
                alpha,
                t: 0.0,
                n: chi.modulus(),
                chi_kind: ChiKind::of(&chi),
            };
            (st, chi)
        })
        .collect();
    states
        .par_iter()
        .map(|(st, chi)| {
            let name = "Ramanujan diagonal vs L-ratio";
            match (quadruple_diagonal_sum(st, chi, 100_000), ramanujan_ratio(st, chi)) {
                (Ok(d), Ok(r)) => {
                    MomentReport::with_policy(name, d.corrected * f, r, d.tail_estimate, PassPolicy::Absolute)
                        .note("chi", chi.label())
                        .note("epsilon", format!("{:?}", st.epsilon))
                        .note(
                            "alpha",
                            st.alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
                        )
                }
                (Err(e), _) | (_, Err(e)) => errored(name, e),
            }
        })
        .collect()
}

fn oracle(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("oracle-eisenstein");
    let mut rng = p.rng(2);
    let budget = PrecisionBudget::new(1e-12, 20_000, Default::default()).expect("budget");
    let mut points = Vec::new();
    for &n in &p.levels {
        for _ in 0..p.points {
            points.push((n, c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..3.0))));
        }
    }
    points
        .par_iter()
        .map(|&(n, z)| {
            let name = "E* Fourier vs lattice sum at s = 2";
            let run = || -> eisenlab::Result<MomentReport> {
                let psi = quadratic_character(n)
                    .ok_or_else(|| eisenlab::LabError::InvalidArgument(format!("no quadratic character mod {n}")))?;
                let m = EisensteinModel::trivial_twist(psi, c(2.0, 0.0))?;
                let a = eval_e_star(z, &m, &budget)?;
                let o = direct_series_oracle(z, &m, 2000.0)?;
                Ok(
                    MomentReport::with_policy(name, a * f, o.value, 1e-8, PassPolicy::Relative)
                        .note("N", n)
                        .note("z", z),
                )
            };
            run().unwrap_or_else(|e| errored(name, e))
        })
        .collect()
}

fn residue(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("residue-vs-contour");
    let cases: Vec<(u64, f64)> = p.levels.iter().flat_map(|&n| [(n, 2.0), (n, 8.0)]).collect();
    cases
        .par_iter()
        .map(|&(n, y)| {
            let name = "triple-pole residue vs Laurent contour";
            let run = || -> eisenlab::Result<MomentReport> {
                let ctx = PipelineContext::new(n, y)?;
                let a = residue_at_zero(&ctx)?.value;
                let b = residue_by_laurent(&ctx)?;
                Ok(MomentReport::with_policy(name, a * f, b, 1e-6, PassPolicy::Relative)
                    .note("N", n)
                    .note("Y", y))
            };
            run().unwrap_or_else(|e| errored(name, e))
        })
        .collect()
}

fn triple_route(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("triple-route");
    let mut routes = p.routes.clone();
    if !routes.contains(&ZoneRoute::CoefficientSum) {
        routes.push(ZoneRoute::CoefficientSum);
    }
    p.levels
        .par_iter()
        .flat_map_iter(|&n| {
            let tol = if n == 5 { 1e-6 } else { 1e-5 };
            let run = || -> eisenlab::Result<Vec<MomentReport>> {
                let ctx = PipelineContext::new(n, 2.0)?;
                let mut values = routes
                    .iter()
                    .map(|&r| cuspzone_integral(&ctx, r))
                    .collect::<eisenlab::Result<Vec<_>>>()?;
                for v in values.iter_mut().filter(|v| v.route != ZoneRoute::CoefficientSum) {
                    v.value *= f;
                }
                Ok(route_agreement(&values, tol))
            };
            run().unwrap_or_else(|e| vec![errored("cusp-zone routes", e)])
        })
        .collect()
}

fn corollary(p: &Params) -> Vec<MomentReport> {
    let f = p.factor("corollary");
    [
        (101u64, 0.0, ChiKind::Quadratic),
        (101, 1.0, ChiKind::Complex),
        (5, 0.0, ChiKind::Quadratic),
        (13, 0.3, ChiKind::Quadratic),
    ]
    .into_iter()
    .map(|(n, t, kind)| {
        let mut r = corollary_consistency(n, t, kind);
        if f != 1.0 {
            r = MomentReport::compare(r.check_name.clone(), r.lhs * f, r.rhs, r.tolerance)
                .note("N", n)
                .note("T", t);
        }
        r
    })
    .collect()
}

/// Runs the checks in declared order; each may fan out over the pool.
pub fn run_core(p: &Params, only: &[String]) -> Result<Vec<MomentReport>> {
    for name in only {
        if !CORE_CHECKS.contains(&name.as_str()) {
            bail!("unknown check {name:?} (one of {})", CORE_CHECKS.join(", "));
        }
    }
    let selected: Vec<&str> = CORE_CHECKS
        .iter()
        .copied()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == c))
        .collect();
    let groups: Vec<Vec<MomentReport>> = selected
        .par_iter()
        .map(|&name| {
            let reports = match name {
                "dbw" => dbw(p),
                "gauss-sum" => gauss(p),
                "mellin-pair" => mellin(p),
                "ramanujan" => ramanujan(p),
                "oracle-eisenstein" => oracle(p),
                "residue-vs-contour" => residue(p),
                "triple-route" => triple_route(p),
                "corollary" => corollary(p),
                _ => unreachable!(),
            };
            reports.into_iter().map(|r| r.note("check", name)).collect()
        })
        .collect();
    Ok(groups.into_iter().flatten().collect())
}

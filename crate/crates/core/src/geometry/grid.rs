use num_complex::Complex64;
use serde::Serialize;

use super::cosets::{coset_reps, CosetList};
use crate::error::Result;
use crate::par;
use crate::quad::gauss_legendre_on;

/// Resolution and panel layout of the base grid on the standard domain.
#[derive(Clone, Debug, Serialize)]
pub struct GridSpec {
    pub n_x: usize,
    /// Gauss points per t-panel (t = 1/y)
    pub n_t: usize,
    /// heights where the integrand may jump; t-panels break at 1/y
    pub y_breaks: Vec<f64>,
    /// drop nodes above this height (tail handled by the caller)
    pub y_cap: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_x: 24,
            n_t: 16,
            y_breaks: Vec::new(),
            y_cap: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BaseNode {
    pub z: Complex64,
    /// weight for dμ = dx dy / y² (= dx dt with t = 1/y)
    pub weight: f64,
}

/// Tensor Gauss grid on {|x| ≤ ½, |z| ≥ 1} in (x, t = 1/y), plus the coset
/// list that carries it over Γ₀(N)\ℍ.
#[derive(Clone, Debug, Serialize)]
pub struct QuadratureGrid {
    pub spec: GridSpec,
    pub cosets: CosetList,
    pub nodes: Vec<BaseNode>,
}

/// One transformed node g_j·z_k.
#[derive(Clone, Copy, Debug)]
pub struct GridPoint {
    pub z: Complex64,
    pub base: Complex64,
    pub coset: usize,
    pub weight: f64,
}

impl QuadratureGrid {
    pub fn new(n: u64, spec: GridSpec) -> Self {
        Self::with_cosets(coset_reps(n), spec)
    }

    pub fn with_cosets(cosets: CosetList, spec: GridSpec) -> Self {
        let mut nodes = Vec::new();
        let t_lo = spec.y_cap.map_or(0.0, |c| 1.0 / c);
        for (x, wx) in gauss_legendre_on(spec.n_x, -0.5, 0.5) {
            let t_hi = 1.0 / (1.0 - x * x).sqrt();
            let mut cuts = vec![t_lo];
            let mut inner: Vec<f64> = spec
                .y_breaks
                .iter()
                .map(|y| 1.0 / y)
                .filter(|&t| t > t_lo && t < t_hi)
                .collect();
            inner.sort_by(f64::total_cmp);
            cuts.extend(inner);
            cuts.push(t_hi);
            for w in cuts.windows(2) {
                for (t, wt) in gauss_legendre_on(spec.n_t, w[0], w[1]) {
                    nodes.push(BaseNode {
                        z: Complex64::new(x, 1.0 / t),
                        weight: wx * wt,
                    });
                }
            }
        }
        QuadratureGrid { spec, cosets, nodes }
    }

    /// Grid with t-breaks at Y·width for every cusp, so the cuspidal zones
    /// of height Y are unions of whole panels.
    pub fn for_zones(n: u64, y: f64, n_x: usize, n_t: usize) -> Self {
        let cosets = coset_reps(n);
        let mut y_breaks: Vec<f64> = cosets.cusps.iter().map(|c| y * c.width as f64).collect();
        y_breaks.dedup();
        Self::with_cosets(
            cosets,
            GridSpec {
                n_x,
                n_t,
                y_breaks,
                y_cap: None,
            },
        )
    }

    pub fn coarsened(&self) -> Self {
        let spec = GridSpec {
            n_x: (self.spec.n_x / 2).max(2),
            n_t: (self.spec.n_t / 2).max(2),
            ..self.spec.clone()
        };
        Self::with_cosets(self.cosets.clone(), spec)
    }

    pub fn level(&self) -> u64 {
        self.cosets.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len() * self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn point(&self, idx: usize) -> GridPoint {
        let (j, k) = (idx / self.nodes.len(), idx % self.nodes.len());
        let node = self.nodes[k];
        GridPoint {
            z: self.cosets.reps[j].apply(node.z),
            base: node.z,
            coset: j,
            weight: node.weight,
        }
    }

    pub fn base_weight_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridIntegral {
    pub value: Complex64,
    /// |fine − half-resolution| when requested, else NaN
    pub refinement: f64,
    pub nodes: usize,
}

fn sum_over<F>(f: &F, grid: &QuadratureGrid) -> Result<Complex64>
where
    F: Fn(&GridPoint) -> Result<Complex64> + Sync + Send,
{
    let terms = par::try_map_range(grid.len(), |i| {
        let p = grid.point(i);
        Ok(f(&p)? * p.weight)
    })?;
    Ok(par::pairwise_sum(&terms))
}

/// Σ_j Σ_k f(g_j z_k) w_k over Γ₀(N)\ℍ.
pub fn integrate<F>(f: F, grid: &QuadratureGrid) -> Result<GridIntegral>
where
    F: Fn(&GridPoint) -> Result<Complex64> + Sync + Send,
{
    Ok(GridIntegral {
        value: sum_over(&f, grid)?,
        refinement: f64::NAN,
        nodes: grid.len(),
    })
}

/// As [`integrate`], with a refinement estimate from the half-resolution grid.
pub fn integrate_refined<F>(f: F, grid: &QuadratureGrid) -> Result<GridIntegral>
where
    F: Fn(&GridPoint) -> Result<Complex64> + Sync + Send,
{
    let fine = sum_over(&f, grid)?;
    let coarse = sum_over(&f, &grid.coarsened())?;
    Ok(GridIntegral {
        value: fine,
        refinement: (fine - coarse).norm(),
        nodes: grid.len(),
    })
}

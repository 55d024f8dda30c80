//! Reference inversion, error metrics, and report assembly.

use std::path::Path;

use serde::Serialize;

use crate::catalog::{SystemKind, SystemSpec};
use crate::error::{Error, Result};
use crate::potential::PotentialFn;

/// Float formatting used in every CSV artifact: 17 significant digits, so
/// values round-trip losslessly through text.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write-temp-then-rename, so readers never observe partial files.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV table with a header row and float cells at full precision.
pub fn csv_table<'a>(header: &[&str], rows: impl Iterator<Item = &'a Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Root mean square difference of two equal-length sample vectors.
pub fn rmse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Config(format!(
            "rmse needs equal nonempty lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let terms: Vec<f64> = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .collect();
    Ok((crate::parallel::pairwise_sum(&terms) / a.len() as f64).sqrt())
}

pub fn uniform_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Uniform grid over the system's first coordinate with nodal neighborhoods
/// removed, for kinetic-ratio-based diagnostics.
pub fn eval_grid_1d(spec: &SystemSpec, count: usize) -> Vec<f64> {
    let iv = spec.potential_domain()[0];
    uniform_grid(iv[0], iv[1], count)
        .into_iter()
        .filter(|&x| match spec.amp_abs_potential_axis(x) {
            Some(a) => a >= crate::catalog::NODAL_EPSILON,
            None => true,
        })
        .collect()
}

/// Pointwise learned-energy estimates `K(x) + U(x)`; flatness of this curve
/// is the conservation diagnostic. Nodal grid points surface as errors.
pub fn energy_curve(
    u: &dyn PotentialFn,
    spec: &SystemSpec,
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| Ok(spec.kinetic_ratio(p)? + u.value(p)?))
        .collect()
}

/// Classical fourth-order Runge–Kutta inversion of the potential along a
/// grid: integrates `U'(x) = -d/dx K(x)` (closed-form right-hand side) from
/// the initial condition in both directions.
///
/// Grid points sitting on a node are an error (split the grid and invert
/// each segment). Interior stage evaluations that land on a node — a seed
/// point exactly at a removable node, or a step whose midpoint crosses one —
/// are handled by nudging off the node and golden-ratio sub-stepping, which
/// keeps the stencil clear of the rejection radius.
pub fn rk4_invert(spec: &SystemSpec, grid: &[f64], ic: (f64, f64)) -> Result<Vec<f64>> {
    if grid.len() < 2 {
        return Err(Error::Config("need at least two grid points".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("grid must be strictly increasing".into()));
    }
    if spec.potential_domain().len() != 1 {
        return Err(Error::Config(format!(
            "{} is not a 1D stationary system",
            spec.id()
        )));
    }
    let rhs = |x: f64| -> Result<f64> { Ok(-spec.kinetic_ratio_grad(&[x])?.1[0]) };
    // Every grid point must be clear of nodes; stage points are rescued.
    for &x in grid {
        rhs(x)?;
    }
    let (x0, y0) = ic;
    let i0 = grid
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - x0)
                .abs()
                .partial_cmp(&(b.1 - x0).abs())
                .expect("finite grid")
        })
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let span = grid[grid.len() - 1] - grid[0];
    if (grid[i0] - x0).abs() > 0.05 * span {
        return Err(Error::Config(format!(
            "initial condition abscissa {x0} is far from the grid"
        )));
    }

    let mut u = vec![0.0; grid.len()];
    u[i0] = y0 + integrate_rhs_safe(&rhs, x0, grid[i0], span)?;
    for i in i0..grid.len() - 1 {
        u[i + 1] = u[i] + integrate_rhs_safe(&rhs, grid[i], grid[i + 1], span)?;
    }
    for i in (0..i0).rev() {
        u[i] = u[i + 1] + integrate_rhs_safe(&rhs, grid[i + 1], grid[i], span)?;
    }
    Ok(u)
}

/// Signed RK4 increment over `[a, b]` (either orientation) with nodal-stage
/// rescue.
fn integrate_rhs_safe(rhs: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, span: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    // A nodal endpoint (e.g. seeding exactly on a removable node) is nudged
    // inward by a sliver and bridged with a first-order hop; the sliver is
    // ~1e-9 of the domain, far below the integrator's own error.
    let mut a = a;
    let mut hop = 0.0;
    if rhs(a).is_err() {
        let mut eps = 1e-9 * span.abs() * if b > a { 1.0 } else { -1.0 };
        for _ in 0..20 {
            if let Ok(f) = rhs(a + eps) {
                hop = f * eps;
                a += eps;
                break;
            }
            eps *= 4.0;
        }
    }
    Ok(hop + rk4_step(rhs, a, b, 12)?)
}

fn rk4_step(rhs: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, depth: u32) -> Result<f64> {
    let h = b - a;
    let mid = 0.5 * (a + b);
    match (rhs(a), rhs(mid), rhs(b)) {
        (Ok(k1), Ok(k2), Ok(k4)) => {
            // Classical stencil with k3 = k2 for an x-only right-hand side.
            Ok(h / 6.0 * (k1 + 4.0 * k2 + k4))
        }
        _ if depth > 0 => {
            // An asymmetric split cannot land on the same node again.
            let s = a + 0.618_033_988_749_894_9 * h;
            Ok(rk4_step(rhs, a, s, depth - 1)? + rk4_step(rhs, s, b, depth - 1)?)
        }
        _ => Err(Error::NodalPoint(vec![mid])),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Nn,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergySample {
    pub point: Vec<f64>,
    pub energy: f64,
}

/// Metrics of one inversion run against the catalog truth.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub rmse_potential: f64,
    pub rmse_energy: Option<f64>,
    pub grid: Vec<GridSpec>,
    pub method: Method,
    pub seed_list: Vec<u64>,
    pub energy_curve: Vec<EnergySample>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Evaluation grid for a system's potential: a uniform per-dimension grid
/// with nodal neighborhoods excluded.
pub fn report_grid(spec: &SystemSpec, count: usize) -> (Vec<GridSpec>, Vec<Vec<f64>>) {
    let pdom = spec.potential_domain();
    match pdom.len() {
        1 => {
            let pts = eval_grid_1d(spec, count);
            let gs = GridSpec {
                start: pdom[0][0],
                stop: pdom[0][1],
                count: pts.len(),
            };
            (vec![gs], pts.into_iter().map(|x| vec![x]).collect())
        }
        _ => {
            let xs = uniform_grid(pdom[0][0], pdom[0][1], count);
            let ys = uniform_grid(pdom[1][0], pdom[1][1], count);
            let mut pts = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    let p = vec![x, y];
                    let ok = match spec.kind {
                        SystemKind::HarmonicOsc2D { .. } => spec
                            .amp_abs(&p)
                            .map(|a| a.unwrap_or(1.0) >= crate::catalog::NODAL_EPSILON)
                            .unwrap_or(true),
                        _ => true,
                    };
                    if ok {
                        pts.push(p);
                    }
                }
            }
            (
                vec![
                    GridSpec {
                        start: pdom[0][0],
                        stop: pdom[0][1],
                        count: xs.len(),
                    },
                    GridSpec {
                        start: pdom[1][0],
                        stop: pdom[1][1],
                        count: ys.len(),
                    },
                ],
                pts,
            )
        }
    }
}

/// Assemble both RMSE figures and the energy curve for a trained or
/// reference potential.
pub fn build_report(
    u: &dyn PotentialFn,
    spec: &SystemSpec,
    grid_count: usize,
    method: Method,
    seed_list: Vec<u64>,
) -> Result<MetricsReport> {
    let (grid, points) = report_grid(spec, grid_count);
    let learned: Vec<f64> = points
        .iter()
        .map(|p| u.value(p))
        .collect::<Result<Vec<_>>>()?;
    let truth: Vec<f64> = points
        .iter()
        .map(|p| spec.true_potential(p))
        .collect::<Result<Vec<_>>>()?;
    let rmse_potential = rmse(&learned, &truth)?;

    let (rmse_energy, curve) = if spec.supports_energy_curve() {
        let energies = energy_curve(u, spec, &points)?;
        let rmse_energy = spec.exact_energy().map(|e_ref| {
            let flat = vec![e_ref; energies.len()];
            rmse(&energies, &flat).expect("equal lengths")
        });
        let curve = points
            .iter()
            .zip(energies.iter())
            .map(|(p, &e)| EnergySample {
                point: p.clone(),
                energy: e,
            })
            .collect();
        (rmse_energy, curve)
    } else {
        (None, Vec::new())
    };

    Ok(MetricsReport {
        rmse_potential,
        rmse_energy,
        grid,
        method,
        seed_list,
        energy_curve: curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::TruePotential;
    use crate::rng::Rng;

    #[test]
    fn rmse_basics() {
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        let v = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((v - (12.5f64).sqrt()).abs() < 1e-15);
        let off = rmse(&[1.0, 2.0, 5.0], &[1.0 - 0.7, 2.0 - 0.7, 5.0 - 0.7]).unwrap();
        assert!((off - 0.7).abs() < 1e-15);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    #[test]
    fn rmse_is_a_metric() {
        let mut rng = Rng::new(8);
        for _ in 0..50 {
            let a: Vec<f64> = (0..16).map(|_| rng.range(-2.0, 2.0)).collect();
            let b: Vec<f64> = (0..16).map(|_| rng.range(-2.0, 2.0)).collect();
            let c: Vec<f64> = (0..16).map(|_| rng.range(-2.0, 2.0)).collect();
            let ab = rmse(&a, &b).unwrap();
            let ba = rmse(&b, &a).unwrap();
            assert_eq!(ab.to_bits(), ba.to_bits());
            assert_eq!(rmse(&a, &a).unwrap(), 0.0);
            let ac = rmse(&a, &c).unwrap();
            let cb = rmse(&c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-12);
        }
    }

    #[test]
    fn oscillator_baseline_beats_the_table_bound() {
        let spec = SystemSpec::harmonic_1d(0);
        let grid = uniform_grid(-5.0, 5.0, 401);
        let u = rk4_invert(&spec, &grid, (0.0, 0.0)).unwrap();
        let truth: Vec<f64> = grid.iter().map(|&x| 0.5 * x * x).collect();
        let err = rmse(&u, &truth).unwrap();
        assert!(err <= 1e-2, "oscillator rk4 rmse {err:.3e}");
    }

    #[test]
    fn sech_well_baseline_beats_the_table_bound() {
        let spec = SystemSpec::poschl_teller(2, 1).unwrap();
        let grid = eval_grid_1d(&spec, 401);
        assert!(grid.len() >= 400);
        let u = rk4_invert(&spec, &grid, (0.0, -3.0)).unwrap();
        let truth: Vec<f64> = grid.iter().map(|&x| -3.0 / (x.cosh() * x.cosh())).collect();
        let err = rmse(&u, &truth).unwrap();
        assert!(err <= 1e-3, "sech-well rk4 rmse {err:.3e}");
    }

    #[test]
    fn rk4_error_shrinks_at_fourth_order() {
        let spec = SystemSpec::hydrogen_radial(2, 1).unwrap();
        let truth = |r: f64| 1.0 / (r * r) - 1.0 / r;
        let err_at = |count: usize| {
            let grid = uniform_grid(0.5, 10.0, count);
            let u = rk4_invert(&spec, &grid, (1.0, 0.0)).unwrap();
            let t: Vec<f64> = grid.iter().map(|&r| truth(r)).collect();
            rmse(&u, &t).unwrap()
        };
        let coarse = err_at(26);
        let fine = err_at(51);
        let ratio = coarse / fine;
        assert!(
            (10.0..40.0).contains(&ratio),
            "expected ~16x per halving, got {ratio:.1} ({coarse:.3e} -> {fine:.3e})"
        );
    }

    #[test]
    fn rk4_rejects_grids_with_nodes() {
        let spec = SystemSpec::poschl_teller(2, 1).unwrap();
        let grid = uniform_grid(-3.0, 3.0, 201); // midpoint lands exactly on 0
        assert!(matches!(
            rk4_invert(&spec, &grid, (0.0, -3.0)),
            Err(Error::NodalPoint(_))
        ));
    }

    #[test]
    fn energy_curve_of_truth_is_flat() {
        let cases = vec![
            (SystemSpec::harmonic_1d(0), 0.5),
            (SystemSpec::hydrogen_radial(2, 1).unwrap(), -0.125),
        ];
        for (spec, expect) in cases {
            let (_, pts) = report_grid(&spec, 201);
            let truth = TruePotential(&spec);
            let curve = energy_curve(&truth, &spec, &pts).unwrap();
            for e in &curve {
                assert!((e - expect).abs() < 1e-10, "{}: {e}", spec.id());
            }
            let mean = curve.iter().sum::<f64>() / curve.len() as f64;
            let sd =
                (curve.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / curve.len() as f64).sqrt();
            assert!(sd <= 1e-9);
        }
    }

    #[test]
    fn perturbed_box_energy_is_genuinely_not_conserved() {
        let spec = SystemSpec::particle_in_box(1).unwrap();
        let (_, pts) = report_grid(&spec, 201);
        let truth = TruePotential(&spec);
        let curve = energy_curve(&truth, &spec, &pts).unwrap();
        let mean = curve.iter().sum::<f64>() / curve.len() as f64;
        let sd =
            (curve.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / curve.len() as f64).sqrt();
        assert!(
            sd > 1e-3,
            "perturbation should break conservation, sd = {sd:.3e}"
        );
    }

    #[test]
    fn oracle_report_is_exact() {
        let spec = SystemSpec::harmonic_1d(0);
        let truth = TruePotential(&spec);
        let report = build_report(&truth, &spec, 201, Method::Nn, vec![7]).unwrap();
        assert!(report.rmse_potential <= 1e-12);
        assert!(report.rmse_energy.unwrap() <= 1e-9);
        assert_eq!(report.energy_curve.len(), report.grid[0].count);
        assert_eq!(report.seed_list, vec![7]);
        let json = report.to_json();
        for field in [
            "rmse_potential",
            "rmse_energy",
            "grid",
            "method",
            "seed_list",
        ] {
            assert!(json.contains(field), "missing {field}");
        }
    }

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.1, -3.5355339059327378, 1.0 / 3.0, 12.5, 1e-300] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}

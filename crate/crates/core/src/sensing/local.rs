//! Per-satellite estimation and local-estimate-then-fusion.

use nalgebra::{Matrix2, Vector2};

use super::echo::EchoData;
use super::processor::{Cube, Processor};
use super::scene::{wrap_angle, Vec2};
use super::SensingError;

const FUSION_MAX_ITERS: usize = 20;
const FUSION_STEP_TOL_KM: f64 = 1e-9;

/// A position fix with its covariance (km, km^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionFix {
    pub position: Vec2,
    pub covariance: Matrix2<f64>,
}

/// Result of processing one satellite's echo on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEstimate {
    pub node: usize,
    pub node_position: Vec2,
    pub boresight: f64,
    /// km
    pub range: f64,
    /// Hz
    pub doppler: f64,
    /// rad off broadside
    pub bearing: f64,
    /// Covariance of (range, bearing).
    pub range_bearing_cov: Matrix2<f64>,
    pub fix: PositionFix,
    /// `|c|^2` at the estimate.
    pub peak: f64,
}

/// Vertex offset of the parabola through three samples around a maximum,
/// in steps; zero when the samples do not bracket a maximum.
pub(crate) fn parabolic_offset(minus: f64, centre: f64, plus: f64) -> f64 {
    let denom = minus - 2.0 * centre + plus;
    if denom < 0.0 {
        let delta = 0.5 * (minus - plus) / denom;
        if delta.abs() <= 0.5 {
            return delta;
        }
    }
    0.0
}

fn polar_fix(
    node_position: Vec2,
    boresight: f64,
    range: f64,
    bearing: f64,
    cov: &Matrix2<f64>,
) -> PositionFix {
    let theta = boresight + bearing;
    let (s, c) = theta.sin_cos();
    let jac = Matrix2::new(c, -range * s, s, range * c);
    PositionFix {
        position: node_position + Vec2::new(c, s) * range,
        covariance: jac * cov * jac.transpose(),
    }
}

impl Processor {
    /// Noncoherent (range, Doppler, bearing) estimate and position fix of
    /// one echo.
    pub fn estimate_local(&self, echo: &EchoData) -> LocalEstimate {
        let cube = self.cube(echo);
        self.estimate_local_from_cube(echo, &cube)
    }

    pub fn estimate_local_from_cube(&self, echo: &EchoData, cube: &Cube) -> LocalEstimate {
        let g = &self.grids[echo.node];
        let node = &self.scene.nodes[echo.node];
        let (r, d, b) = cube.argmax();
        let j = |r: usize, d: usize, b: usize| cube.at(r, d, b).norm_sqr();
        let j0 = j(r, d, b);
        let [nr, nd, nb] = cube.dims;
        let interior = |i: usize, n: usize| i > 0 && i + 1 < n;

        let dr = if interior(r, nr) {
            parabolic_offset(j(r - 1, d, b), j0, j(r + 1, d, b))
        } else {
            0.0
        };
        let dd = if interior(d, nd) {
            parabolic_offset(j(r, d - 1, b), j0, j(r, d + 1, b))
        } else {
            0.0
        };
        let db = if interior(b, nb) {
            parabolic_offset(j(r, d, b - 1), j0, j(r, d, b + 1))
        } else {
            0.0
        };
        let grid_point = (g.range.value(r), g.doppler.value(d), g.bearing.value(b));
        let refined = (
            g.range.center + (r as f64 + dr - g.range.half as f64) * g.range.step,
            g.doppler.center + (d as f64 + dd - g.doppler.half as f64) * g.doppler.step,
            g.bearing.center + (b as f64 + db - g.bearing.half as f64) * g.bearing.step,
        );
        // Keep the refinement only if it really raises the objective.
        let refined_peak = self
            .matched_filter(echo, refined.0, refined.1, refined.2)
            .norm_sqr();
        let ((range, doppler, bearing), peak) = if refined_peak >= j0 {
            (refined, refined_peak)
        } else {
            (grid_point, j0)
        };

        // Observed information from the curvature of |c|^2 / (sigma^2 E).
        let scale = self.scene.noise_variance().max(1e-12) * echo.energy();
        let (hr, hb) = (g.range.step, g.bearing.step);
        let curv_r =
            interior(r, nr).then(|| -(j(r + 1, d, b) - 2.0 * j0 + j(r - 1, d, b)) / (hr * hr));
        let curv_b =
            interior(b, nb).then(|| -(j(r, d, b + 1) - 2.0 * j0 + j(r, d, b - 1)) / (hb * hb));
        let cross = (interior(r, nr) && interior(b, nb)).then(|| {
            -(j(r + 1, d, b + 1) - j(r + 1, d, b - 1) - j(r - 1, d, b + 1) + j(r - 1, d, b - 1))
                / (4.0 * hr * hb)
        });
        let span_r = g.range.len() as f64 * hr;
        let span_b = g.bearing.len() as f64 * hb;
        let var = |curv: Option<f64>, span: f64| match curv {
            Some(c) if c > 0.0 => (scale / c).min(span * span),
            _ => span * span,
        };
        let range_bearing_cov = match (curv_r, curv_b, cross) {
            (Some(a), Some(c), Some(x)) if a > 0.0 && c > 0.0 && a * c - x * x > 0.0 => {
                let info = Matrix2::new(a, x, x, c) / scale;
                let cov = info.try_inverse().unwrap_or_else(|| {
                    Matrix2::from_diagonal(&Vector2::new(var(curv_r, span_r), var(curv_b, span_b)))
                });
                if cov[(0, 0)] <= span_r * span_r && cov[(1, 1)] <= span_b * span_b {
                    cov
                } else {
                    Matrix2::from_diagonal(&Vector2::new(var(curv_r, span_r), var(curv_b, span_b)))
                }
            }
            _ => Matrix2::from_diagonal(&Vector2::new(var(curv_r, span_r), var(curv_b, span_b))),
        };

        LocalEstimate {
            node: echo.node,
            node_position: node.position,
            boresight: node.boresight,
            range,
            doppler,
            bearing,
            range_bearing_cov,
            fix: polar_fix(
                node.position,
                node.boresight,
                range,
                bearing,
                &range_bearing_cov,
            ),
            peak,
        }
    }
}

fn invert(cov: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    if !cov.iter().all(|x| x.is_finite()) {
        return None;
    }
    cov.try_inverse()
        .filter(|w| w.iter().all(|x| x.is_finite()))
}

/// Inverse-covariance weighted least squares over position fixes.
pub fn fuse_positions(fixes: &[PositionFix]) -> Result<Vec2, SensingError> {
    if fixes.len() < 2 {
        return Err(SensingError::InsufficientFixes(fixes.len()));
    }
    let weighted: Vec<(Vec2, Matrix2<f64>)> = fixes
        .iter()
        .filter_map(|f| invert(&f.covariance).map(|w| (f.position, w)))
        .collect();
    if weighted.is_empty() {
        return Err(SensingError::SingularCovariance);
    }
    let mut p = weighted[0].0;
    for _ in 0..FUSION_MAX_ITERS {
        let mut normal = Matrix2::zeros();
        let mut grad = Vec2::zeros();
        for (z, w) in &weighted {
            normal += w;
            grad += w * (z - p);
        }
        let Some(step) = normal.try_inverse().map(|n| n * grad) else {
            return Err(SensingError::SingularCovariance);
        };
        p += step;
        if step.norm() < FUSION_STEP_TOL_KM {
            break;
        }
    }
    Ok(p)
}

/// Fuses local estimates by Gauss-Newton on their (range, bearing)
/// measurements, started from the fused position fixes.
pub fn fuse_lef(locals: &[LocalEstimate]) -> Result<Vec2, SensingError> {
    let fixes: Vec<PositionFix> = locals.iter().map(|l| l.fix).collect();
    let mut p = fuse_positions(&fixes)?;
    let weighted: Vec<(&LocalEstimate, Matrix2<f64>)> = locals
        .iter()
        .filter_map(|l| invert(&l.range_bearing_cov).map(|w| (l, w)))
        .collect();
    if weighted.is_empty() {
        return Err(SensingError::SingularCovariance);
    }

    let residuals = |p: &Vec2| -> Vec<(Vector2<f64>, Matrix2<f64>)> {
        weighted
            .iter()
            .map(|(l, _)| {
                let d = p - l.node_position;
                let rho = d.norm().max(1e-12);
                let bearing = wrap_angle(d.y.atan2(d.x) - l.boresight);
                let res = Vector2::new(l.range - rho, wrap_angle(l.bearing - bearing));
                let jac = Matrix2::new(d.x / rho, d.y / rho, -d.y / (rho * rho), d.x / (rho * rho));
                (res, jac)
            })
            .collect()
    };
    let cost = |res: &[(Vector2<f64>, Matrix2<f64>)]| -> f64 {
        res.iter()
            .zip(&weighted)
            .map(|((r, _), (_, w))| (r.transpose() * w * r)[(0, 0)])
            .sum()
    };

    let mut current = residuals(&p);
    let mut current_cost = cost(&current);
    for _ in 0..FUSION_MAX_ITERS {
        let mut normal = Matrix2::zeros();
        let mut grad = Vec2::zeros();
        for ((r, h), (_, w)) in current.iter().zip(&weighted) {
            let hw = h.transpose() * w;
            normal += hw * h;
            grad += hw * r;
        }
        let Some(mut step) = normal.try_inverse().map(|n| n * grad) else {
            break;
        };
        // Backtrack if the linearization overshoots.
        let mut accepted = false;
        for _ in 0..30 {
            let trial = p + step;
            let res = residuals(&trial);
            let c = cost(&res);
            if c <= current_cost {
                p = trial;
                current = res;
                current_cost = c;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || step.norm() < FUSION_STEP_TOL_KM {
            break;
        }
    }
    Ok(p)
}

//! Data-fusion-then-estimate: coherent sum of the satellites' matched-filter
//! outputs over a common position/velocity grid.
//!
//! The nodes are assumed phase synchronized: each node's carrier phase
//! (the phase of its echo amplitude) is known and removed before the
//! coherent sum.

use num_complex::Complex64;

use super::echo::EchoData;
use super::local::parabolic_offset;
use super::processor::{Axis, Cube, NodeGrid, Processor};
use super::scene::{SearchConfig, SensingScene, Vec2};
use super::SensingError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfeEstimate {
    pub position: Vec2,
    pub velocity: Vec2,
    /// `|sum_s c_s|^2` at the estimate.
    pub objective: f64,
}

/// Candidate grid and, per candidate and node, the fractional cube indices
/// of the implied (range, Doppler, bearing).
#[derive(Debug, Clone)]
pub(crate) struct DfeGrid {
    pub x: Axis,
    pub y: Axis,
    pub velocities: Vec<Vec2>,
    /// `[(ix * ny + iy) * nv + iv][node]`, `None` outside the node grid.
    stencils: Vec<Option<(f64, f64, f64)>>,
}

impl DfeGrid {
    pub fn new(scene: &SensingScene, search: &SearchConfig, grids: &[NodeGrid]) -> Self {
        let p0 = scene.target_position;
        let half = (search.position_half_width / search.range_step).round() as usize;
        let x = Axis {
            center: p0.x,
            step: search.range_step,
            half,
        };
        let y = Axis {
            center: p0.y,
            step: search.range_step,
            half,
        };
        let pts = search.velocity_points;
        let vw = search.velocity_half_width;
        let coord = |i: usize| {
            if pts == 1 {
                0.0
            } else {
                -vw + 2.0 * vw * i as f64 / (pts - 1) as f64
            }
        };
        let velocities: Vec<Vec2> = (0..pts)
            .flat_map(|i| {
                (0..pts).map(move |j| scene.target_velocity + Vec2::new(coord(i), coord(j)))
            })
            .collect();

        let fc = scene.waveform.fc;
        let mut stencils = Vec::with_capacity(x.len() * y.len() * velocities.len() * grids.len());
        for ix in 0..x.len() {
            for iy in 0..y.len() {
                let p = Vec2::new(x.value(ix), y.value(iy));
                for v in &velocities {
                    for (node, g) in scene.nodes.iter().zip(grids) {
                        let (r, d, b) = (
                            node.range_to(&p),
                            node.doppler_to(&p, v, fc),
                            node.bearing_to(&p),
                        );
                        let inside =
                            g.range.contains(r) && g.doppler.contains(d) && g.bearing.contains(b);
                        stencils.push(inside.then(|| {
                            (
                                g.range.position(r),
                                g.doppler.position(d),
                                g.bearing.position(b),
                            )
                        }));
                    }
                }
            }
        }
        Self {
            x,
            y,
            velocities,
            stencils,
        }
    }

    pub fn contains(
        &self,
        position: &Vec2,
        velocity: &Vec2,
        velocity_half_width: f64,
        centre_velocity: &Vec2,
    ) -> bool {
        let dv = velocity - centre_velocity;
        self.x.contains(position.x)
            && self.y.contains(position.y)
            && dv.x.abs() <= velocity_half_width
            && dv.y.abs() <= velocity_half_width
    }
}

impl Processor {
    /// Phase-compensated matched-filter sum at an arbitrary state.
    fn coherent_sum(
        &self,
        echoes: &[EchoData],
        phases: &[Complex64],
        p: &Vec2,
        v: &Vec2,
    ) -> Complex64 {
        let fc = self.scene.waveform.fc;
        echoes
            .iter()
            .zip(phases)
            .map(|(e, ph)| {
                let node = &self.scene.nodes[e.node];
                ph * self.matched_filter(
                    e,
                    node.range_to(p),
                    node.doppler_to(p, v, fc),
                    node.bearing_to(p),
                )
            })
            .sum()
    }

    /// DFE objective `|sum_s c_s|^2` at a state, evaluated exactly.
    pub fn dfe_objective(&self, echoes: &[EchoData], position: &Vec2, velocity: &Vec2) -> f64 {
        let phases = sync_phases(echoes);
        self.coherent_sum(echoes, &phases, position, velocity)
            .norm_sqr()
    }

    pub fn estimate_dfe(&self, echoes: &[EchoData]) -> Result<DfeEstimate, SensingError> {
        let cubes: Vec<Cube> = echoes.iter().map(|e| self.cube(e)).collect();
        self.estimate_dfe_from_cubes(echoes, &cubes)
    }

    /// Grid search on interpolated cubes, then a local refinement with exact
    /// matched-filter evaluations.
    pub fn estimate_dfe_from_cubes(
        &self,
        echoes: &[EchoData],
        cubes: &[Cube],
    ) -> Result<DfeEstimate, SensingError> {
        let grid = &self.dfe_grid;
        let n_nodes = self.scene.nodes.len();
        if echoes.len() != n_nodes || cubes.len() != n_nodes {
            return Err(SensingError::InvalidScene(format!(
                "expected {n_nodes} echoes and cubes"
            )));
        }
        let phases = sync_phases(echoes);
        let nv = grid.velocities.len();
        let mut best: Option<(usize, f64)> = None;
        for (c, stencil) in grid.stencils.chunks(n_nodes).enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut valid = true;
            for ((s, cube), ph) in stencil.iter().zip(cubes).zip(&phases) {
                match s.and_then(|(r, d, b)| cube.interpolate(r, d, b)) {
                    Some(v) => sum += ph * v,
                    None => {
                        valid = false;
                        break;
                    }
                }
            }
            let obj = sum.norm_sqr();
            if valid && best.map_or(true, |(_, b)| obj > b) {
                best = Some((c, obj));
            }
        }
        let (c, _) = best.ok_or_else(|| {
            SensingError::InvalidScene("no DFE candidate lies inside every node grid".into())
        })?;
        let iv = c % nv;
        let iy = (c / nv) % grid.y.len();
        let ix = c / (nv * grid.y.len());
        let v = grid.velocities[iv];

        let h = grid.x.step;
        let eval = |p: &Vec2| self.coherent_sum(echoes, &phases, p, &v).norm_sqr();
        let coarse = Vec2::new(grid.x.value(ix), grid.y.value(iy));
        let mut centre = coarse;
        let mut centre_val = eval(&coarse);
        for dx in [-1.0, 0.0, 1.0] {
            for dy in [-1.0, 0.0, 1.0] {
                let p = coarse + Vec2::new(dx * h, dy * h);
                let val = eval(&p);
                if val > centre_val {
                    centre = p;
                    centre_val = val;
                }
            }
        }
        let ox = parabolic_offset(
            eval(&(centre - Vec2::new(h, 0.0))),
            centre_val,
            eval(&(centre + Vec2::new(h, 0.0))),
        );
        let oy = parabolic_offset(
            eval(&(centre - Vec2::new(0.0, h))),
            centre_val,
            eval(&(centre + Vec2::new(0.0, h))),
        );
        let refined = centre + Vec2::new(ox * h, oy * h);
        let refined_val = eval(&refined);
        let (position, objective) = if refined_val >= centre_val {
            (refined, refined_val)
        } else {
            (centre, centre_val)
        };
        Ok(DfeEstimate {
            position,
            velocity: v,
            objective,
        })
    }
}

/// Conjugate unit phasors of the echo amplitudes.
fn sync_phases(echoes: &[EchoData]) -> Vec<Complex64> {
    echoes
        .iter()
        .map(|e| {
            let a = e.truth.amplitude;
            if a.norm() > 0.0 {
                a.conj() / a.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::echo::simulate_echoes;
    use crate::sensing::scene::SensingBench;

    fn processor(bench: &SensingBench, n: usize) -> (Processor, SensingScene) {
        let scene = bench.scene(n).unwrap();
        (
            Processor::new(&scene, &bench.search().unwrap()).unwrap(),
            scene,
        )
    }

    #[test]
    fn noiseless_recovery_and_coherent_gain() {
        let bench = SensingBench {
            snr_db: f64::INFINITY,
            ..SensingBench::default()
        };
        let (proc_, scene) = processor(&bench, 4);
        let echoes = simulate_echoes(&scene, 0).unwrap();
        let est = proc_.estimate_dfe(&echoes).unwrap();
        assert!((est.position - scene.target_position).norm() < 1e-9);
        let e = echoes[0].energy();
        let single = e * e;
        assert!((est.objective / single - 16.0).abs() < 1e-9);
        // Noncoherent total at the truth is 4 single peaks: ratio S.
        let noncoherent: f64 = echoes
            .iter()
            .map(|ec| {
                let t = ec.truth;
                proc_
                    .matched_filter(ec, t.range, t.doppler, t.bearing)
                    .norm_sqr()
            })
            .sum();
        assert!((est.objective / noncoherent - 4.0).abs() < 1e-9);
    }

    #[test]
    fn single_node_objective_is_noncoherent() {
        let bench = SensingBench {
            snr_db: -5.0,
            angles_deg: vec![90.0],
            distances_km: vec![50.0],
            ..SensingBench::default()
        };
        let (proc_, mut scene) = processor(&bench, 3);
        scene.target_position = Vec2::new(0.4, 0.9);
        let echoes = simulate_echoes(&scene, 5).unwrap();
        let node = &scene.nodes[0];
        let (p, v) = (Vec2::new(-0.3, 1.2), Vec2::new(0.05, 0.0));
        let direct = proc_
            .matched_filter(
                &echoes[0],
                node.range_to(&p),
                node.doppler_to(&p, &v, scene.waveform.fc),
                node.bearing_to(&p),
            )
            .norm_sqr();
        let dfe = proc_.dfe_objective(&echoes, &p, &v);
        assert!((dfe - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let (proc_, scene) = processor(&SensingBench::default(), 2);
        let echoes = simulate_echoes(&scene, 0).unwrap();
        assert!(proc_.estimate_dfe(&echoes[..2]).is_err());
    }
}

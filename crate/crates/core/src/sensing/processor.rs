//! Search grids and matched-filter cubes.

use num_complex::Complex64;

use super::dfe::DfeGrid;
use super::echo::{doppler_phases, range_phases, steering, EchoData, EchoTruth};
use super::scene::{SearchConfig, SensingNode, SensingScene, Vec2};
use super::SensingError;
use crate::waveform::OfdmConfig;

/// Uniform grid `center + (i - half) * step`, `i = 0 ..= 2 half`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub center: f64,
    pub step: f64,
    pub half: usize,
}

impl Axis {
    /// Smallest axis with two guard cells beyond `[lo, hi]`.
    pub fn covering(center: f64, step: f64, lo: f64, hi: f64) -> Self {
        let reach = (hi - center).max(center - lo).max(0.0);
        Self {
            center,
            step,
            half: (reach / step).ceil() as usize + 2,
        }
    }

    pub fn len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.center + (i as f64 - self.half as f64) * self.step
    }

    /// Fractional index of `x`.
    pub fn position(&self, x: f64) -> f64 {
        (x - self.center) / self.step + self.half as f64
    }

    pub fn contains(&self, x: f64) -> bool {
        let p = self.position(x);
        p >= 0.0 && p <= (self.len() - 1) as f64
    }
}

/// Per-node (range, Doppler, bearing) grid with matched-filter tables.
#[derive(Debug, Clone)]
pub struct NodeGrid {
    pub range: Axis,
    pub doppler: Axis,
    pub bearing: Axis,
    /// `range.len() x N_sc`, conjugate range phases.
    range_table: Vec<Complex64>,
    /// `doppler.len() x M`
    doppler_table: Vec<Complex64>,
    /// `bearing.len() x N`
    bearing_table: Vec<Complex64>,
}

impl NodeGrid {
    fn new(
        node: &SensingNode,
        cfg: &OfdmConfig,
        scene: &SensingScene,
        search: &SearchConfig,
    ) -> Self {
        // Extremes of the observables over the search box, sampled densely.
        let (p0, v0) = (scene.target_position, scene.target_velocity);
        let (w, vw) = (search.position_half_width, search.velocity_half_width);
        let lattice = 20;
        let mut ranges = (f64::INFINITY, f64::NEG_INFINITY);
        let mut bearings = ranges;
        let mut dopplers = ranges;
        let widen = |acc: &mut (f64, f64), x: f64| {
            acc.0 = acc.0.min(x);
            acc.1 = acc.1.max(x);
        };
        for i in 0..=lattice {
            for j in 0..=lattice {
                let off = Vec2::new(
                    -w + 2.0 * w * i as f64 / lattice as f64,
                    -w + 2.0 * w * j as f64 / lattice as f64,
                );
                let p = p0 + off;
                widen(&mut ranges, node.range_to(&p));
                widen(&mut bearings, node.bearing_to(&p));
                for (sx, sy) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    let v = v0 + Vec2::new(sx * vw, sy * vw);
                    widen(&mut dopplers, node.doppler_to(&p, &v, cfg.fc));
                }
            }
        }
        let range = Axis::covering(node.range_to(&p0), search.range_step, ranges.0, ranges.1);
        let doppler = Axis::covering(
            node.doppler_to(&p0, &v0, cfg.fc),
            search.doppler_step,
            dopplers.0,
            dopplers.1,
        );
        let bearing = Axis::covering(
            node.bearing_to(&p0),
            search.bearing_step,
            bearings.0,
            bearings.1,
        );

        let conj = |v: Vec<Complex64>| v.into_iter().map(|x| x.conj());
        let range_table = (0..range.len())
            .flat_map(|i| conj(range_phases(cfg, range.value(i))))
            .collect();
        let doppler_table = (0..doppler.len())
            .flat_map(|i| conj(doppler_phases(cfg, doppler.value(i))))
            .collect();
        let bearing_table = (0..bearing.len())
            .flat_map(|i| {
                conj(steering(
                    node.n_antennas(),
                    node.array.element_spacing,
                    bearing.value(i),
                ))
            })
            .collect();
        Self {
            range,
            doppler,
            bearing,
            range_table,
            doppler_table,
            bearing_table,
        }
    }

    pub fn contains(&self, truth: &EchoTruth) -> bool {
        self.range.contains(truth.range)
            && self.doppler.contains(truth.doppler)
            && self.bearing.contains(truth.bearing)
    }
}

/// Complex matched-filter output over a node grid, indexed
/// `(range, doppler, bearing)` with bearing fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub dims: [usize; 3],
    pub values: Vec<Complex64>,
}

impl Cube {
    pub fn at(&self, r: usize, d: usize, b: usize) -> Complex64 {
        self.values[(r * self.dims[1] + d) * self.dims[2] + b]
    }

    /// Index of the largest `|c|^2`; ties keep the lowest index.
    pub fn argmax(&self) -> (usize, usize, usize) {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, c) in self.values.iter().enumerate() {
            let v = c.norm_sqr();
            if v > best_v {
                best_v = v;
                best = i;
            }
        }
        let b = best % self.dims[2];
        let d = (best / self.dims[2]) % self.dims[1];
        (best / (self.dims[1] * self.dims[2]), d, b)
    }

    /// Trilinear interpolation at fractional indices; `None` outside.
    pub fn interpolate(&self, r: f64, d: f64, b: f64) -> Option<Complex64> {
        let corner = |x: f64, len: usize| -> Option<(usize, f64)> {
            if !(x >= 0.0 && x <= (len - 1) as f64) {
                return None;
            }
            let i = (x.floor() as usize).min(len.saturating_sub(2));
            Some((i, x - i as f64))
        };
        let (r0, wr) = corner(r, self.dims[0])?;
        let (d0, wd) = corner(d, self.dims[1])?;
        let (b0, wb) = corner(b, self.dims[2])?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (dr, fr) in [(0, 1.0 - wr), (1, wr)] {
            for (dd, fd) in [(0, 1.0 - wd), (1, wd)] {
                for (db, fb) in [(0, 1.0 - wb), (1, wb)] {
                    let f = fr * fd * fb;
                    if f != 0.0 {
                        acc += self.at(r0 + dr, d0 + dd, b0 + db) * f;
                    }
                }
            }
        }
        Some(acc)
    }
}

/// Grids and filters for a fixed scene geometry and search region; reused
/// across trials.
#[derive(Debug, Clone)]
pub struct Processor {
    pub scene: SensingScene,
    pub search: SearchConfig,
    pub grids: Vec<NodeGrid>,
    pub(crate) dfe_grid: DfeGrid,
}

impl Processor {
    /// Grids are centred on the scene's target state, which acts as the
    /// prior.
    pub fn new(scene: &SensingScene, search: &SearchConfig) -> Result<Self, SensingError> {
        scene.validate()?;
        search.validate()?;
        let grids: Vec<NodeGrid> = scene
            .nodes
            .iter()
            .map(|n| NodeGrid::new(n, &scene.waveform, scene, search))
            .collect();
        let dfe_grid = DfeGrid::new(scene, search, &grids);
        Ok(Self {
            scene: scene.clone(),
            search: *search,
            grids,
            dfe_grid,
        })
    }

    /// Matched filter over the node grid, computed one dimension at a time.
    pub fn cube(&self, echo: &EchoData) -> Cube {
        let g = &self.grids[echo.node];
        let (ns, nm, nk) = (echo.n_subcarriers, echo.n_symbols, echo.n_antennas);
        let (nr, nd, nb) = (g.range.len(), g.doppler.len(), g.bearing.len());
        let zero = Complex64::new(0.0, 0.0);

        // Antennas -> bearing: x1[(n, m), b].
        let mut x1 = vec![zero; ns * nm * nb];
        for nm_i in 0..ns * nm {
            let y = &echo.data[nm_i * nk..(nm_i + 1) * nk];
            let out = &mut x1[nm_i * nb..(nm_i + 1) * nb];
            for (b, o) in out.iter_mut().enumerate() {
                let w = &g.bearing_table[b * nk..(b + 1) * nk];
                *o = w.iter().zip(y).map(|(a, c)| a * c).sum();
            }
        }
        // Pulses -> Doppler: x2[(n, d), b].
        let mut x2 = vec![zero; ns * nd * nb];
        for n in 0..ns {
            for d in 0..nd {
                let out = &mut x2[(n * nd + d) * nb..(n * nd + d + 1) * nb];
                for m in 0..nm {
                    let coef = g.doppler_table[d * nm + m];
                    let src = &x1[(n * nm + m) * nb..(n * nm + m + 1) * nb];
                    out.iter_mut().zip(src).for_each(|(o, s)| *o += coef * s);
                }
            }
        }
        // Subcarriers -> range: cube[(r, d), b].
        let slab = nd * nb;
        let mut values = vec![zero; nr * slab];
        for r in 0..nr {
            let out = &mut values[r * slab..(r + 1) * slab];
            for n in 0..ns {
                let coef = g.range_table[r * ns + n];
                let src = &x2[n * slab..(n + 1) * slab];
                out.iter_mut().zip(src).for_each(|(o, s)| *o += coef * s);
            }
        }
        Cube {
            dims: [nr, nd, nb],
            values,
        }
    }

    /// Matched-filter output of `echo` at an arbitrary (range, Doppler,
    /// bearing).
    pub fn matched_filter(
        &self,
        echo: &EchoData,
        range: f64,
        doppler: f64,
        bearing: f64,
    ) -> Complex64 {
        let node = &self.scene.nodes[echo.node];
        let cfg = &self.scene.waveform;
        let rp = range_phases(cfg, range);
        let dp = doppler_phases(cfg, doppler);
        let st = steering(node.n_antennas(), node.array.element_spacing, bearing);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, r) in rp.iter().enumerate() {
            let mut inner_n = Complex64::new(0.0, 0.0);
            for (m, d) in dp.iter().enumerate() {
                let base = (n * echo.n_symbols + m) * echo.n_antennas;
                let s: Complex64 = st
                    .iter()
                    .zip(&echo.data[base..base + echo.n_antennas])
                    .map(|(a, y)| a.conj() * y)
                    .sum();
                inner_n += d.conj() * s;
            }
            acc += r.conj() * inner_n;
        }
        acc
    }

    /// Whether a target state lies inside every search grid.
    pub fn covers(
        &self,
        echoes: &[EchoData],
        position: &Vec2,
        velocity: &Vec2,
    ) -> Result<(), SensingError> {
        for e in echoes {
            if !self.grids[e.node].contains(&e.truth) {
                return Err(SensingError::TruthOutsideGrid(e.node));
            }
        }
        if !self.dfe_grid.contains(
            position,
            velocity,
            self.search.velocity_half_width,
            &self.scene.target_velocity,
        ) {
            return Err(SensingError::TruthOutsideGrid(usize::MAX));
        }
        Ok(())
    }

    /// Fractional cube indices of a (range, Doppler, bearing) triple.
    pub fn cube_position(
        &self,
        node: usize,
        range: f64,
        doppler: f64,
        bearing: f64,
    ) -> (f64, f64, f64) {
        let g = &self.grids[node];
        (
            g.range.position(range),
            g.doppler.position(doppler),
            g.bearing.position(bearing),
        )
    }
}

//! Seeded generators of random smooth configurations (metrics, surfaces,
//! corners, conformal factors) for the property suites. ChaCha-based so
//! identical seeds give identical tuples on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corner::CornerFaces;
use crate::fields::ScalarField;
use crate::metric::{MetricField, MetricKind, TrigTerm};
use crate::surface::{HypersurfaceChart, RuledDir, SurfaceKind, TrigCorner};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn unif(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn trig_term(&mut self, nvars: usize, sym_dim: usize) -> TrigTerm {
        let sym_len = if sym_dim == 0 { 0 } else { sym_dim * (sym_dim + 1) / 2 };
        TrigTerm {
            sym: (0..sym_len).map(|_| self.unif(-1.0, 1.0)).collect(),
            wave: (0..nvars).map(|_| self.unif(-2.0, 2.0)).collect(),
            phase: self.unif(0.0, 6.28),
            use_sin: self.rng.random_bool(0.5),
        }
    }

    /// Smooth perturbation of flat R⁴, SPD by construction at the sampled
    /// amplitude.
    pub fn metric4(&mut self, amplitude: f64) -> MetricField {
        let terms = (0..2).map(|_| self.trig_term(4, 4)).collect();
        MetricField::new(MetricKind::Perturbed { dim: 4, terms, amplitude })
    }

    pub fn metric3(&mut self, amplitude: f64) -> MetricField {
        let terms = (0..2).map(|_| self.trig_term(3, 3)).collect();
        MetricField::new(MetricKind::Perturbed { dim: 3, terms, amplitude })
    }

    /// Smooth conformal exponent.
    pub fn omega(&mut self, amplitude: f64) -> ScalarField {
        ScalarField::Trig {
            offset: self.unif(-0.3, 0.3),
            terms: vec![(amplitude, self.trig_term(4, 0))],
        }
    }

    /// Smooth ambient scalar field.
    pub fn field(&mut self, amplitude: f64) -> ScalarField {
        ScalarField::Trig {
            offset: self.unif(-1.0, 1.0),
            terms: vec![
                (amplitude, self.trig_term(4, 0)),
                (0.5 * amplitude, self.trig_term(4, 0)),
            ],
        }
    }

    /// Graph hypersurface over the first three coordinates.
    pub fn graph_surface(&mut self) -> HypersurfaceChart {
        let terms = vec![
            (self.unif(0.1, 0.25), self.trig_term(3, 0)),
            (self.unif(0.05, 0.15), self.trig_term(3, 0)),
        ];
        HypersurfaceChart::new(
            SurfaceKind::TrigGraph { ambient_dim: 4, offset: self.unif(-0.3, 0.3), terms },
            4,
            3,
        )
    }

    pub fn point3(&mut self) -> [f64; 3] {
        [self.unif(-0.5, 0.5), self.unif(-0.5, 0.5), self.unif(-0.5, 0.5)]
    }

    /// A wiggly corner surface with two transversal ruled faces, oriented
    /// consistently, plus a parameter point.
    pub fn corner(&mut self, metric: &MetricField) -> crate::error::Result<(CornerFaces, [f64; 2])> {
        let corner = TrigCorner {
            origin: (0..4).map(|_| self.unif(-0.2, 0.2)).collect(),
            span: vec![
                vec![1.0, self.unif(-0.15, 0.15), self.unif(-0.1, 0.1), self.unif(-0.1, 0.1)],
                vec![self.unif(-0.15, 0.15), 1.0, self.unif(-0.1, 0.1), self.unif(-0.1, 0.1)],
            ],
            bump: vec![
                (2, self.unif(0.05, 0.15), self.trig_term(2, 0)),
                (3, self.unif(0.05, 0.15), self.trig_term(2, 0)),
            ],
        };
        let mut dir = |main: usize, other: usize| -> RuledDir {
            let mut v = vec![0.0; 4];
            v[main] = 1.0;
            v[other] = self.unif(-0.35, 0.35);
            v[0] = self.unif(-0.15, 0.15);
            v[1] = self.unif(-0.15, 0.15);
            RuledDir {
                v,
                v_terms: vec![(main, self.unif(0.03, 0.1), self.trig_term(2, 0))],
                w2: (0..4).map(|_| self.unif(-0.1, 0.1)).collect(),
            }
        };
        let face_n = HypersurfaceChart::new(
            SurfaceKind::RuledFace { corner: corner.clone(), dir: dir(2, 3) },
            4,
            3,
        );
        let face_s =
            HypersurfaceChart::new(SurfaceKind::RuledFace { corner, dir: dir(3, 2) }, 4, 3);
        let q = [self.unif(-0.3, 0.3), self.unif(-0.3, 0.3)];
        let q3 = [q[0], q[1], 0.0];
        let probe = crate::shape::shape_ctx(metric, &face_n, &q3, 2)?;
        let inside = [
            probe.point[0],
            probe.point[1],
            probe.point[2] + 0.4,
            probe.point[3] + 0.4,
        ];
        let face_n = crate::shape::orient_toward(metric, &face_n, &q3, &inside)?;
        let face_s = crate::shape::orient_toward(metric, &face_s, &q3, &inside)?;
        Ok((CornerFaces::new(metric.clone(), face_n, face_s), q))
    }
}

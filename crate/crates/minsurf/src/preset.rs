//! Built-in test maps. Every preset has a closed form, so solver and
//! diagnostic output can always be checked against analytic knowledge:
//! `linear` and `zero` solve the minimal surface system exactly, `scherk`
//! solves the scalar equation on |x|, |y| < π/2, `holomorphic_quadratic` is
//! a complex curve in R⁴ (hence minimal and area-decreasing for small
//! coefficients), and the remaining presets provide generic smooth data.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::GridError;
use crate::grid::{GridDomain, VectorField};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    /// `f(x) = A x + b` with A given row-major (m×n).
    Linear {
        n: usize,
        m: usize,
        matrix: Vec<f64>,
        offset: Vec<f64>,
    },
    /// `f ≡ 0`.
    Zero { m: usize },
    /// Polynomial bump `f^α = amp/(1+α) · Π_i 4 t_i (1 − t_i)` in box
    /// coordinates `t`; vanishes exactly on the boundary.
    Bump { m: usize, amp: f64 },
    /// `f = ln(cos x / cos y)`, m = 1, n = 2; solves the scalar minimal
    /// surface equation wherever both cosines are positive.
    Scherk,
    /// Real and imaginary part of `c z²`: `f¹ = c(x² − y²)`, `f² = 2cxy`.
    HolomorphicQuadratic { c: f64 },
    /// Product of sines, one phase offset per component: generic smooth
    /// non-solution data.
    Trig { m: usize, amp: f64, freq: f64 },
    /// Sum of `waves` random plane waves with wave vectors in [−1.5, 1.5]^n;
    /// gradient bounded by `1.5 amp √n`. Deterministic in `seed`.
    RandomLipschitz {
        m: usize,
        amp: f64,
        seed: u64,
        waves: usize,
    },
    /// Another preset scaled by a constant factor.
    Scaled { inner: Box<Preset>, scale: f64 },
}

impl Preset {
    /// Resolve a preset by name. Unknown names are a structured error;
    /// parameters not used by the named preset are ignored.
    pub fn parse(name: &str, params: &PresetParams) -> Result<Preset, GridError> {
        let p = match name {
            "linear" => Preset::Linear {
                n: params.n,
                m: params.m,
                matrix: params.matrix.clone(),
                offset: params.offset.clone(),
            },
            "zero" => Preset::Zero { m: params.m },
            "bump" => Preset::Bump {
                m: params.m,
                amp: params.amp,
            },
            "scherk" => Preset::Scherk,
            "holomorphic_quadratic" => Preset::HolomorphicQuadratic { c: params.c },
            "trig" => Preset::Trig {
                m: params.m,
                amp: params.amp,
                freq: params.freq,
            },
            "random_lipschitz" => Preset::RandomLipschitz {
                m: params.m,
                amp: params.amp,
                seed: params.seed,
                waves: params.waves,
            },
            _ => return Err(GridError::UnknownPreset),
        };
        Ok(if params.scale == 1.0 {
            p
        } else {
            Preset::Scaled {
                inner: Box::new(p),
                scale: params.scale,
            }
        })
    }

    /// Number of target components the preset produces.
    pub fn codimension(&self) -> usize {
        match self {
            Preset::Linear { m, .. }
            | Preset::Zero { m }
            | Preset::Bump { m, .. }
            | Preset::Trig { m, .. }
            | Preset::RandomLipschitz { m, .. } => *m,
            Preset::Scherk => 1,
            Preset::HolomorphicQuadratic { .. } => 2,
            Preset::Scaled { inner, .. } => inner.codimension(),
        }
    }

    /// Sample the closed form on every node of `domain`.
    pub fn sample(&self, domain: &GridDomain) -> Result<VectorField, GridError> {
        let m = self.codimension();
        self.validate(domain)?;
        let eval = self.evaluator(domain)?;
        VectorField::from_fn(domain.clone(), m, |x, out| eval.eval(x, out))
    }

    fn validate(&self, domain: &GridDomain) -> Result<(), GridError> {
        let n = domain.dim();
        let m = self.codimension();
        if !(1..=4).contains(&m) {
            return Err(GridError::UnsupportedCodimension { m });
        }
        match self {
            Preset::Scherk if n != 2 => Err(GridError::PresetDimensions { n, m }),
            Preset::HolomorphicQuadratic { .. } if n != 2 => {
                Err(GridError::PresetDimensions { n, m })
            }
            Preset::Linear {
                n: pn,
                m: pm,
                matrix,
                offset,
            } => {
                if *pn != n || matrix.len() != pn * pm || offset.len() != *pm {
                    Err(GridError::PresetDimensions { n, m })
                } else {
                    Ok(())
                }
            }
            Preset::Scaled { inner, .. } => inner.validate(domain),
            _ => Ok(()),
        }
    }

    fn evaluator(&self, domain: &GridDomain) -> Result<Evaluator, GridError> {
        let n = domain.dim();
        Ok(match self {
            Preset::Linear {
                m, matrix, offset, ..
            } => Evaluator::Linear {
                n,
                m: *m,
                matrix: matrix.clone(),
                offset: offset.clone(),
            },
            Preset::Zero { m } => Evaluator::Zero { m: *m },
            Preset::Bump { m, amp } => Evaluator::Bump {
                n,
                m: *m,
                amp: *amp,
                lower: [
                    domain.lower(0),
                    domain.lower(1),
                    if n > 2 { domain.lower(2) } else { 0.0 },
                ],
                extent: {
                    let mut e = [1.0; 3];
                    for k in 0..n {
                        e[k] = domain.upper(k) - domain.lower(k);
                    }
                    e
                },
            },
            Preset::Scherk => Evaluator::Scherk,
            Preset::HolomorphicQuadratic { c } => Evaluator::Holomorphic { c: *c },
            Preset::Trig { m, amp, freq } => Evaluator::Trig {
                n,
                m: *m,
                amp: *amp,
                freq: *freq,
            },
            Preset::RandomLipschitz {
                m,
                amp,
                seed,
                waves,
            } => {
                let count = (*waves).max(1);
                let mut rng = SplitMix64::new(*seed);
                let mut table = Vec::with_capacity(count);
                for _ in 0..count {
                    let mut k = [0.0f64; 3];
                    for kk in k.iter_mut().take(n) {
                        *kk = rng.range(-1.5, 1.5);
                    }
                    let mut phases = [0.0f64; 4];
                    for p in phases.iter_mut().take(*m) {
                        *p = rng.range(0.0, core::f64::consts::TAU);
                    }
                    table.push((k, phases));
                }
                Evaluator::Waves {
                    n,
                    m: *m,
                    amp: *amp,
                    table,
                }
            }
            Preset::Scaled { inner, scale } => Evaluator::Scaled {
                inner: Box::new(inner.evaluator(domain)?),
                scale: *scale,
            },
        })
    }
}

enum Evaluator {
    Linear {
        n: usize,
        m: usize,
        matrix: Vec<f64>,
        offset: Vec<f64>,
    },
    Zero {
        m: usize,
    },
    Bump {
        n: usize,
        m: usize,
        amp: f64,
        lower: [f64; 3],
        extent: [f64; 3],
    },
    Scherk,
    Holomorphic {
        c: f64,
    },
    Trig {
        n: usize,
        m: usize,
        amp: f64,
        freq: f64,
    },
    Waves {
        n: usize,
        m: usize,
        amp: f64,
        table: Vec<([f64; 3], [f64; 4])>,
    },
    Scaled {
        inner: Box<Evaluator>,
        scale: f64,
    },
}

impl Evaluator {
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Evaluator::Linear {
                n,
                m,
                matrix,
                offset,
            } => {
                for a in 0..*m {
                    let mut s = offset[a];
                    for i in 0..*n {
                        s += matrix[a * n + i] * x[i];
                    }
                    out[a] = s;
                }
            }
            Evaluator::Zero { m } => {
                out[..*m].fill(0.0);
            }
            Evaluator::Bump {
                n,
                m,
                amp,
                lower,
                extent,
            } => {
                let mut prod = 1.0;
                for k in 0..*n {
                    let t = (x[k] - lower[k]) / extent[k];
                    prod *= 4.0 * t * (1.0 - t);
                }
                for a in 0..*m {
                    out[a] = amp / (1.0 + a as f64) * prod;
                }
            }
            Evaluator::Scherk => {
                out[0] = x[0].cos().ln() - x[1].cos().ln();
            }
            Evaluator::Holomorphic { c } => {
                out[0] = c * (x[0] * x[0] - x[1] * x[1]);
                out[1] = 2.0 * c * x[0] * x[1];
            }
            Evaluator::Trig { n, m, amp, freq } => {
                for a in 0..*m {
                    let mut v = *amp;
                    for k in 0..*n {
                        v *= (freq * x[k] + 0.4 * (a + 1) as f64 + 0.15 * k as f64).sin();
                    }
                    out[a] = v;
                }
            }
            Evaluator::Waves { n, m, amp, table } => {
                let scale = amp / table.len() as f64;
                for a in 0..*m {
                    let mut s = 0.0;
                    for (k, phases) in table {
                        let mut arg = phases[a];
                        for i in 0..*n {
                            arg += k[i] * x[i];
                        }
                        s += arg.sin();
                    }
                    out[a] = scale * s;
                }
            }
            Evaluator::Scaled { inner, scale } => {
                inner.eval(x, out);
                for v in out.iter_mut() {
                    *v *= scale;
                }
            }
        }
    }
}

/// Flat parameter bag for [`Preset::parse`]; fields not used by the named
/// preset are ignored.
#[derive(Clone, Debug)]
pub struct PresetParams {
    pub n: usize,
    pub m: usize,
    pub amp: f64,
    pub c: f64,
    pub freq: f64,
    pub seed: u64,
    pub waves: usize,
    pub scale: f64,
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
}

impl Default for PresetParams {
    fn default() -> Self {
        PresetParams {
            n: 2,
            m: 1,
            amp: 0.1,
            c: 0.3,
            freq: 1.0,
            seed: 1,
            waves: 4,
            scale: 1.0,
            matrix: Vec::new(),
            offset: Vec::new(),
        }
    }
}

/// SplitMix64; reproducible across platforms, used only for the seeded
/// random preset.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_unknown() {
        let params = PresetParams::default();
        assert!(matches!(
            Preset::parse("does_not_exist", &params),
            Err(GridError::UnknownPreset)
        ));
    }

    #[test]
    fn linear_with_zero_matrix_is_zero_field() {
        let d = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        let p = Preset::Linear {
            n: 2,
            m: 2,
            matrix: alloc::vec![0.0; 4],
            offset: alloc::vec![0.0; 2],
        };
        let f = p.sample(&d).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn holomorphic_quadratic_components() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = Preset::HolomorphicQuadratic { c: 0.3 }.sample(&d).unwrap();
        for (flat, mi) in d.nodes() {
            let x = d.coords(&mi);
            assert!((f.value(flat, 0) - 0.3 * (x[0] * x[0] - x[1] * x[1])).abs() < 1e-15);
            assert!((f.value(flat, 1) - 0.6 * x[0] * x[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn scherk_satisfies_scalar_equation_analytically() {
        // (1 + f_y²) f_xx − 2 f_x f_y f_xy + (1 + f_x²) f_yy with the exact
        // derivatives f_x = −tan x, f_y = tan y, f_xx = −sec²x, f_yy = sec²y.
        for &(x, y) in &[(0.3, -0.7), (0.0, 0.0), (-0.9, 0.5), (0.99, 0.99)] {
            let (fx, fy): (f64, f64) = (-x.tan(), y.tan());
            let fxx = -1.0 / x.cos().powi(2);
            let fyy = 1.0 / y.cos().powi(2);
            let fxy = 0.0;
            let r = (1.0 + fy * fy) * fxx - 2.0 * fx * fy * fxy + (1.0 + fx * fx) * fyy;
            assert!(r.abs() < 1e-12, "residual {r} at ({x}, {y})");
        }
        // And the grid samples match the closed form.
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = Preset::Scherk.sample(&d).unwrap();
        let mid = d.flat_index(&[4, 4, 0]);
        assert!(f.value(mid, 0).abs() < 1e-15);
    }

    #[test]
    fn scherk_rejects_oversized_domain() {
        // cos x < 0 inside the box makes the sample non-finite.
        let d = GridDomain::cube(2, -3.0, 3.0, 9).unwrap();
        assert!(matches!(
            Preset::Scherk.sample(&d),
            Err(GridError::NonFinite { .. })
        ));
    }

    #[test]
    fn random_lipschitz_deterministic_in_seed() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let p = Preset::RandomLipschitz {
            m: 2,
            amp: 0.2,
            seed: 9,
            waves: 4,
        };
        let a = p.sample(&d).unwrap();
        let b = p.sample(&d).unwrap();
        assert_eq!(a.values(), b.values());
        let c = Preset::RandomLipschitz {
            m: 2,
            amp: 0.2,
            seed: 10,
            waves: 4,
        }
        .sample(&d)
        .unwrap();
        assert!(a.sup_distance(&c) > 0.0);
    }

    #[test]
    fn scaled_wrapper_scales() {
        let d = GridDomain::cube(2, -1.0, 1.0, 7).unwrap();
        let base = Preset::HolomorphicQuadratic { c: 0.3 };
        let scaled = Preset::Scaled {
            inner: Box::new(base.clone()),
            scale: 0.5,
        };
        let f = base.sample(&d).unwrap();
        let g = scaled.sample(&d).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((0.5 * a - b).abs() < 1e-16);
        }
    }
}

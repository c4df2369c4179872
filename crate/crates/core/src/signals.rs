//! Drive and target signals: the Lorenz system, the Sprott catalog of minimal
//! chaotic flows, and uniform noise.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::rng::{rng_from_seed, uniform_symmetric};
use crate::{Error, Result};

/// Equal-length real time series sharing one sample interval.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultivariateSeries {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    dt: f64,
}

impl MultivariateSeries {
    /// Builds a series, checking equal lengths (≥ 1) and finiteness.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>, dt: f64) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch { expected: names.len(), found: columns.len() });
        }
        let len = columns.first().map_or(0, Vec::len);
        if len == 0 {
            return Err(Error::InsufficientData { needed: 1, available: 0 });
        }
        for c in &columns {
            if c.len() != len {
                return Err(Error::DimensionMismatch { expected: len, found: c.len() });
            }
            if let Some(step) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::Divergence { step });
            }
        }
        Ok(MultivariateSeries { names, columns, dt })
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn by_name(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.columns
    }
}

type Vec3 = [f64; 3];

#[inline]
fn axpy(a: &Vec3, h: f64, k: &Vec3) -> Vec3 {
    [a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2]]
}

/// One classical fourth-order Runge–Kutta step.
#[inline]
pub fn rk4_step(f: impl Fn(&Vec3) -> Vec3, s: &Vec3, h: f64) -> Vec3 {
    let k1 = f(s);
    let k2 = f(&axpy(s, 0.5 * h, &k1));
    let k3 = f(&axpy(s, 0.5 * h, &k2));
    let k4 = f(&axpy(s, h, &k3));
    [
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Integrates `f` with `substeps` RK4 steps per sample and records samples
/// `transient .. transient + n_samples` (sample 0 is `x0`).
fn integrate(
    f: impl Fn(&Vec3) -> Vec3,
    x0: Vec3,
    dt: f64,
    substeps: usize,
    n_samples: usize,
    transient: usize,
) -> Result<[Vec<f64>; 3]> {
    let h = dt / substeps as f64;
    let mut out = [Vec::with_capacity(n_samples), Vec::with_capacity(n_samples), Vec::with_capacity(n_samples)];
    let mut s = x0;
    for step in 0..transient + n_samples {
        if step > 0 {
            for _ in 0..substeps {
                s = rk4_step(&f, &s, h);
            }
        }
        if !s.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { step });
        }
        if step >= transient {
            for (c, v) in out.iter_mut().zip(s) {
                c.push(v);
            }
        }
    }
    Ok(out)
}

/// Lorenz system parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorenzParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub dt: f64,
    pub x0: [f64; 3],
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams { c1: 10.0, c2: 28.0, c3: 8.0 / 3.0, dt: 0.02, x0: [1.0, 1.0, 20.0] }
    }
}

impl LorenzParams {
    #[inline]
    pub fn rhs(&self, s: &Vec3) -> Vec3 {
        let [x, y, z] = *s;
        [self.c1 * y - self.c1 * x, x * (self.c2 - z) - y, x * y - self.c3 * z]
    }
}

/// Fixed-step RK4 integration of the Lorenz system; returns `x, y, z`
/// sampled every `dt` after dropping `transient` samples.
pub fn integrate_lorenz(params: &LorenzParams, n_steps: usize, transient: usize) -> Result<MultivariateSeries> {
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be at least 1"));
    }
    if !(params.dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let [x, y, z] = integrate(|s| params.rhs(s), params.x0, params.dt, 1, n_steps, transient)?;
    MultivariateSeries::new(vec!["x".to_string(), "y".to_string(), "z".to_string()], vec![x, y, z], params.dt)
}

/// RK4 substeps per Sprott sample; several flows are unstable under RK4 at
/// the 0.5 sampling interval itself.
pub const SPROTT_SUBSTEPS: usize = 10;

/// Sample interval used for the Sprott classification corpus.
pub const SPROTT_DT: f64 = 0.5;

/// One entry of the Sprott catalog.
#[derive(Clone, Copy)]
pub struct SprottSystem {
    pub label: char,
    pub equations: &'static str,
    pub initial_condition: Vec3,
    pub rhs: fn(&Vec3) -> Vec3,
}

impl core::fmt::Debug for SprottSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SprottSystem")
            .field("label", &self.label)
            .field("equations", &self.equations)
            .field("initial_condition", &self.initial_condition)
            .finish()
    }
}

macro_rules! sprott {
    ($label:literal, $eq:literal, $ic:expr, |$x:ident, $y:ident, $z:ident| $body:expr) => {
        SprottSystem {
            label: $label,
            equations: $eq,
            initial_condition: $ic,
            rhs: {
                #[allow(unused_variables)]
                fn f(s: &Vec3) -> Vec3 {
                    let [$x, $y, $z] = *s;
                    $body
                }
                f
            },
        }
    };
}

const IC: Vec3 = [0.05, 0.05, 0.05];

/// The 19 flows A–S. Initial conditions were chosen by a boundedness scan;
/// A is conservative and only chaotic from (0, 5, 0).
pub const SPROTT_CATALOG: [SprottSystem; 19] = [
    sprott!('A', "x' = y; y' = -x + yz; z' = 1 - y^2", [0.0, 5.0, 0.0], |x, y, z| [y, -x + y * z, 1.0 - y * y]),
    sprott!('B', "x' = yz; y' = x - y; z' = 1 - xy", IC, |x, y, z| [y * z, x - y, 1.0 - x * y]),
    sprott!('C', "x' = yz; y' = x - y; z' = 1 - x^2", IC, |x, y, z| [y * z, x - y, 1.0 - x * x]),
    sprott!('D', "x' = -y; y' = x + z; z' = xz + 3y^2", IC, |x, y, z| [-y, x + z, x * z + 3.0 * y * y]),
    sprott!('E', "x' = yz; y' = x^2 - y; z' = 1 - 4x", IC, |x, y, z| [y * z, x * x - y, 1.0 - 4.0 * x]),
    sprott!('F', "x' = y + z; y' = -x + 0.5y; z' = x^2 - z", IC, |x, y, z| [y + z, -x + 0.5 * y, x * x - z]),
    sprott!('G', "x' = 0.4x + z; y' = xz - y; z' = -x + y", IC, |x, y, z| [0.4 * x + z, x * z - y, -x + y]),
    sprott!('H', "x' = -y + z^2; y' = x + 0.5y; z' = x - z", IC, |x, y, z| [-y + z * z, x + 0.5 * y, x - z]),
    sprott!('I', "x' = -0.2y; y' = x + z; z' = x + y^2 - z", IC, |x, y, z| [-0.2 * y, x + z, x + y * y - z]),
    sprott!('J', "x' = 2z; y' = -2y + z; z' = -x + y + y^2", IC, |x, y, z| [2.0 * z, -2.0 * y + z, -x + y + y * y]),
    sprott!('K', "x' = xy - z; y' = x - y; z' = x + 0.3z", IC, |x, y, z| [x * y - z, x - y, x + 0.3 * z]),
    sprott!('L', "x' = y + 3.9z; y' = 0.9x^2 - y; z' = 1 - x", IC, |x, y, z| [y + 3.9 * z, 0.9 * x * x - y, 1.0 - x]),
    sprott!('M', "x' = -z; y' = -x^2 - y; z' = 1.7 + 1.7x + y", IC, |x, y, z| [-z, -x * x - y, 1.7 + 1.7 * x + y]),
    sprott!('N', "x' = -2y; y' = x + z^2; z' = 1 + y - 2z", IC, |x, y, z| [-2.0 * y, x + z * z, 1.0 + y - 2.0 * z]),
    sprott!('O', "x' = y; y' = x - z; z' = x + xz + 2.7y", IC, |x, y, z| [y, x - z, x + x * z + 2.7 * y]),
    sprott!('P', "x' = 2.7y + z; y' = -x + y^2; z' = x + y", IC, |x, y, z| [2.7 * y + z, -x + y * y, x + y]),
    sprott!('Q', "x' = -z; y' = x - y; z' = 3.1x + y^2 + 0.5z", IC, |x, y, z| [-z, x - y, 3.1 * x + y * y + 0.5 * z]),
    sprott!('R', "x' = 0.9 - y; y' = 0.4 + z; z' = xy - z", IC, |x, y, z| [0.9 - y, 0.4 + z, x * y - z]),
    sprott!('S', "x' = -x - 4y; y' = x + z^2; z' = 1 + x", IC, |x, y, z| [-x - 4.0 * y, x + z * z, 1.0 + x]),
];

/// Catalog entry for `system_id` in `1..=19` (A = 1).
pub fn sprott_system(system_id: usize) -> Result<&'static SprottSystem> {
    if !(1..=SPROTT_CATALOG.len()).contains(&system_id) {
        return Err(Error::param("system_id", "must be in 1..=19"));
    }
    Ok(&SPROTT_CATALOG[system_id - 1])
}

/// The `x` component of Sprott system `system_id`, sampled every `dt`
/// (integrated with [`SPROTT_SUBSTEPS`] RK4 substeps per sample).
pub fn generate_sprott(
    system_id: usize,
    dt: f64,
    n_steps: usize,
    transient: usize,
    x0: [f64; 3],
) -> Result<MultivariateSeries> {
    let sys = sprott_system(system_id)?;
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be at least 1"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let [x, _, _] = integrate(sys.rhs, x0, dt, SPROTT_SUBSTEPS, n_steps, transient)?;
    MultivariateSeries::new(vec!["x".to_string()], vec![x], dt)
}

/// `n` i.i.d. samples from U(-1, 1) (see [`crate::rng`] for the generator).
pub fn uniform_noise(seed: u64, n: usize) -> Result<MultivariateSeries> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    MultivariateSeries::new(vec!["s".to_string()], vec![uniform_symmetric(&mut rng, n)], 1.0)
}

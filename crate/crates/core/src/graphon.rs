//! Benchmark graphons, latent sampling and Bernoulli network generation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::seed::rng_from_seed;

/// A symmetric function `[0,1]² → [0,1]`.
///
/// The six closed forms are
///
/// | kind | h(x, y) |
/// |------|---------|
/// | a | `sin(5π(x + y − 1) + 1) / 2 + 0.5` |
/// | b | `1 − 0.5·max(x, y)` |
/// | c | `1 − 1 / (1 + exp(−15·(0.8·|x − y|)^(4/5) − 0.1))` |
/// | d | `(x² + y²)/3 · cos(1/(x² + y²)) + 0.15`, with `h(0, 0) = 0.15` |
/// | e | `1 / (1 + exp(−x − y))` |
/// | f | `0.3` if `⌊2x⌋ = ⌊2y⌋`, else `0.03` |
///
/// `Grid` is a piecewise-constant function on an `m × m` partition of the square.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphonSpec {
    A,
    B,
    C,
    D,
    E,
    F,
    Grid(SymMatrix),
}

impl GraphonSpec {
    pub const CLOSED_FORMS: [GraphonSpec; 6] = [
        GraphonSpec::A,
        GraphonSpec::B,
        GraphonSpec::C,
        GraphonSpec::D,
        GraphonSpec::E,
        GraphonSpec::F,
    ];

    pub fn grid(values: SymMatrix) -> Result<Self> {
        if values.n() == 0 {
            return Err(Error::InvalidArgument("empty graphon grid".into()));
        }
        values.validate_probability()?;
        Ok(GraphonSpec::Grid(values))
    }

    /// A letter `a`–`f`, or a path to a CSV grid.
    pub fn from_name_or_path(s: &str) -> Result<Self> {
        match s.parse() {
            Ok(spec) => Ok(spec),
            Err(_) => Self::grid(SymMatrix::read_csv(Path::new(s))?),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GraphonSpec::A => "a".into(),
            GraphonSpec::B => "b".into(),
            GraphonSpec::C => "c".into(),
            GraphonSpec::D => "d".into(),
            GraphonSpec::E => "e".into(),
            GraphonSpec::F => "f".into(),
            GraphonSpec::Grid(m) => format!("grid{}", m.n()),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::InvalidArgument(format!(
                "graphon arguments ({x}, {y}) outside [0, 1]"
            )));
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        use std::f64::consts::PI;
        let v = match self {
            GraphonSpec::A => (5.0 * PI * (x + y - 1.0) + 1.0).sin() / 2.0 + 0.5,
            GraphonSpec::B => 1.0 - 0.5 * x.max(y),
            GraphonSpec::C => {
                let z = (0.8 * (x - y).abs()).powf(0.8);
                1.0 - 1.0 / (1.0 + (-15.0 * z - 0.1).exp())
            }
            GraphonSpec::D => {
                let r2 = x * x + y * y;
                if r2 == 0.0 {
                    0.15
                } else {
                    r2 / 3.0 * (1.0 / r2).cos() + 0.15
                }
            }
            GraphonSpec::E => 1.0 / (1.0 + (-x - y).exp()),
            GraphonSpec::F => {
                let bx = ((2.0 * x).floor() as i64).min(1);
                let by = ((2.0 * y).floor() as i64).min(1);
                if bx == by {
                    0.3
                } else {
                    0.03
                }
            }
            GraphonSpec::Grid(g) => {
                let m = g.n();
                let cell = |t: f64| ((t * m as f64).floor() as usize).min(m - 1);
                g.get(cell(x), cell(y))
            }
        };
        v.clamp(0.0, 1.0)
    }
}

impl FromStr for GraphonSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(GraphonSpec::A),
            "b" => Ok(GraphonSpec::B),
            "c" => Ok(GraphonSpec::C),
            "d" => Ok(GraphonSpec::D),
            "e" => Ok(GraphonSpec::E),
            "f" => Ok(GraphonSpec::F),
            other => Err(Error::InvalidArgument(format!("unknown graphon {other:?}"))),
        }
    }
}

impl fmt::Display for GraphonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Latent vertex positions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector(Vec<f64>);

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("latent value {v} outside [0, 1]")));
        }
        Ok(LatentVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn sample_latents(n: usize, seed: u64) -> Result<LatentVector> {
    if n == 0 {
        return Err(Error::TooSmall { n, min: 1 });
    }
    let mut rng = rng_from_seed(seed);
    Ok(LatentVector((0..n).map(|_| rng.random::<f64>()).collect()))
}

/// `P[i][j] = h(ξ_i, ξ_j)`, diagonal included.
pub fn build_prob_matrix(spec: &GraphonSpec, latents: &LatentVector) -> SymMatrix {
    let xi = latents.as_slice();
    SymMatrix::from_upper_fn(xi.len(), |i, j| spec.eval_unchecked(xi[i], xi[j]))
}

/// Independent Bernoulli edges for `i < j`, drawn in row-major upper-triangle
/// order from a single seeded stream. The diagonal is zero.
pub fn sample_adjacency(prob: &SymMatrix, seed: u64) -> SymMatrix {
    let n = prob.n();
    let mut rng = rng_from_seed(seed);
    let mut adj = SymMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let u: f64 = rng.random();
            if u < prob.get(i, j) {
                adj.set(i, j, 1.0);
            }
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(GraphonSpec::B.eval(0.4, 0.8).unwrap(), 0.6);
        assert_eq!(GraphonSpec::F.eval(0.1, 0.2).unwrap(), 0.3);
        assert_eq!(GraphonSpec::F.eval(0.1, 0.9).unwrap(), 0.03);
        assert_eq!(GraphonSpec::E.eval(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(GraphonSpec::D.eval(0.0, 0.0).unwrap(), 0.15);
        // 1 - 1/(1 + e^{-0.1}) on the diagonal.
        let c0 = GraphonSpec::C.eval(0.3, 0.3).unwrap();
        assert!((c0 - (1.0 - 1.0 / (1.0 + (-0.1f64).exp()))).abs() < 1e-15);
        assert!(GraphonSpec::C.eval(0.0, 1.0).unwrap() < 1e-4);
        assert!(GraphonSpec::A.eval(1.2, 0.0).is_err());
        assert!(GraphonSpec::A.eval(0.5, -0.1).is_err());
    }

    #[test]
    fn range_symmetry_and_shape_on_a_grid() {
        let ticks: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
        for spec in GraphonSpec::CLOSED_FORMS.iter() {
            for &x in &ticks {
                for &y in &ticks {
                    let v = spec.eval(x, y).unwrap();
                    assert!((0.0..=1.0).contains(&v), "{spec} at ({x},{y}) = {v}");
                    assert_eq!(v, spec.eval(y, x).unwrap());
                }
            }
        }
        let mut f_values: Vec<f64> = ticks
            .iter()
            .flat_map(|&x| ticks.iter().map(move |&y| GraphonSpec::F.eval(x, y).unwrap()))
            .collect();
        f_values.sort_by(f64::total_cmp);
        f_values.dedup();
        assert_eq!(f_values, vec![0.03, 0.3]);

        let mut last = f64::INFINITY;
        for &m in &ticks {
            let v = GraphonSpec::B.eval(m, m * 0.5).unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn grid_graphon() {
        let g = SymMatrix::from_rows(&[vec![0.1, 0.2], vec![0.2, 0.9]]).unwrap();
        let spec = GraphonSpec::grid(g).unwrap();
        assert_eq!(spec.eval(0.1, 0.1).unwrap(), 0.1);
        assert_eq!(spec.eval(0.1, 0.7).unwrap(), 0.2);
        assert_eq!(spec.eval(1.0, 1.0).unwrap(), 0.9);
        assert!(GraphonSpec::grid(SymMatrix::filled(2, 1.5)).is_err());
    }

    #[test]
    fn latents() {
        assert!(sample_latents(0, 1).is_err());
        assert_eq!(sample_latents(50, 9).unwrap(), sample_latents(50, 9).unwrap());
        assert_ne!(sample_latents(50, 9).unwrap(), sample_latents(50, 10).unwrap());
        let big = sample_latents(100_000, 2024).unwrap();
        let mean = big.as_slice().iter().sum::<f64>() / big.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
        assert!(big.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn prob_matrix() {
        let constant = GraphonSpec::grid(SymMatrix::filled(1, 0.3)).unwrap();
        let xi = sample_latents(5, 1).unwrap();
        let p = build_prob_matrix(&constant, &xi);
        assert!(p.as_slice().iter().all(|&v| v == 0.3));

        let xi = LatentVector::new(vec![0.0, 1.0]).unwrap();
        let p = build_prob_matrix(&GraphonSpec::B, &xi);
        assert_eq!(p.get(0, 1), 0.5);

        let xi = sample_latents(6, 77).unwrap();
        let p = build_prob_matrix(&GraphonSpec::A, &xi);
        for i in 0..6 {
            for j in 0..6 {
                let s = xi.as_slice();
                assert_eq!(p.get(i, j), GraphonSpec::A.eval(s[i], s[j]).unwrap());
            }
        }
    }

    #[test]
    fn adjacency_sampling() {
        let zero = SymMatrix::zeros(20);
        assert_eq!(sample_adjacency(&zero, 1), zero);

        let mut ones = SymMatrix::filled(20, 1.0);
        for i in 0..20 {
            ones.set(i, i, 0.0);
        }
        assert_eq!(sample_adjacency(&ones, 1), ones);

        let p = SymMatrix::filled(200, 0.3);
        let a = sample_adjacency(&p, 5);
        a.validate_adjacency().unwrap();
        let density = a.edge_count() as f64 / (200.0 * 199.0 / 2.0);
        assert!((density - 0.3).abs() < 0.03, "density {density}");
        assert_eq!(a, sample_adjacency(&p, 5));
    }
}

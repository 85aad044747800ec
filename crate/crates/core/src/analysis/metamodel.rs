//! Total-degree polynomial response surfaces over one or two factors.
//!
//! Inputs are normalised to `[-1, 1]` per axis before fitting. Monomials
//! are ordered by total degree, then by descending power of the first
//! axis: `1, x, y, x², xy, y², …`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl MetaAxis {
    pub fn new(name: &str, min: f64, max: f64) -> Self {
        Self { name: name.to_string(), min, max }
    }

    pub fn normalize(&self, x: f64) -> f64 {
        if self.max > self.min {
            2.0 * (x - self.min) / (self.max - self.min) - 1.0
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-12 * (self.max - self.min).abs().max(1.0);
        x >= self.min - tol && x <= self.max + tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub r2: f64,
    pub sse: f64,
    pub max_abs_residual: f64,
    pub samples: usize,
    /// `‖Xᵀr‖∞ / ‖y‖₂` at the solution.
    pub orthogonality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaModel {
    pub axes: Vec<MetaAxis>,
    pub degree: u32,
    pub exponents: Vec<Vec<u32>>,
    pub coefficients: Vec<f64>,
    pub stats: FitStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub y: f64,
    pub extrapolated: bool,
}

/// Exponent tuples of all monomials of total degree ≤ `degree` in `dims` variables.
pub fn monomials(dims: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=degree {
        match dims {
            1 => out.push(vec![total]),
            2 => {
                for j in 0..=total {
                    out.push(vec![total - j, j]);
                }
            }
            _ => unreachable!("1 or 2 axes"),
        }
    }
    out
}

/// Number of coefficients of a total-degree polynomial: C(degree + d, d).
pub fn coefficient_count(dims: usize, degree: u32) -> usize {
    let (d, n) = (dims as u64, degree as u64);
    ((1..=d).fold(1u64, |acc, i| acc * (n + i) / i)) as usize
}

fn row(axes: &[MetaAxis], exps: &[Vec<u32>], x: &[f64]) -> Vec<f64> {
    let z: Vec<f64> = axes.iter().zip(x).map(|(a, &v)| a.normalize(v)).collect();
    exps.iter()
        .map(|e| e.iter().zip(&z).map(|(&p, &zi)| zi.powi(p as i32)).product())
        .collect()
}

/// Least-squares fit of `y ≈ f(x)`; `xs[i]` has one entry per axis.
pub fn fit_metamodel(xs: &[Vec<f64>], ys: &[f64], axes: Vec<MetaAxis>, degree: u32) -> Result<MetaModel, AnalysisError> {
    let dims = axes.len();
    if !(1..=2).contains(&dims) {
        return Err(AnalysisError::MetaModel(format!("need 1 or 2 axes, got {dims}")));
    }
    if xs.len() != ys.len() || xs.iter().any(|x| x.len() != dims) {
        return Err(AnalysisError::MetaModel("sample shapes do not match the axes".into()));
    }
    let exps = monomials(dims, degree);
    let p = exps.len();
    let n = xs.len();
    if n < p {
        return Err(AnalysisError::MetaModel(format!(
            "{n} samples cannot determine {p} coefficients of a degree-{degree} model"
        )));
    }

    let x = DMatrix::from_fn(n, p, |_, _| 0.0);
    let mut x = x;
    for (i, xi) in xs.iter().enumerate() {
        for (j, v) in row(&axes, &exps, xi).into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    let y = DVector::from_column_slice(ys);

    let svd = x.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let tol = s_max * 1e-10 * (n.max(p) as f64);
    if !(s_min > tol) {
        let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
        return Err(AnalysisError::RankDeficient { rank, columns: p });
    }
    let beta = svd
        .solve(&y, 0.0)
        .map_err(|e| AnalysisError::MetaModel(e.to_string()))?;

    let resid = &y - &x * &beta;
    let sse = resid.norm_squared();
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse <= f64::EPSILON * y.norm_squared().max(1.0) {
        1.0
    } else {
        0.0
    };
    let ortho = (x.transpose() * &resid).amax() / y.norm().max(f64::MIN_POSITIVE);

    Ok(MetaModel {
        axes,
        degree,
        exponents: exps,
        coefficients: beta.iter().copied().collect(),
        stats: FitStats {
            r2,
            sse,
            max_abs_residual: resid.amax(),
            samples: n,
            orthogonality: ortho,
        },
    })
}

impl MetaModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        row(&self.axes, &self.exponents, x)
            .iter()
            .zip(&self.coefficients)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Evaluates the model; points outside the training range are flagged.
    pub fn eval(&self, x: &[f64]) -> Prediction {
        let extrapolated = self.axes.iter().zip(x).any(|(a, &v)| !a.contains(v));
        Prediction { y: self.predict(x), extrapolated }
    }

    /// Row-major table of `(x1[, x2], ŷ)` over the cartesian product of the
    /// given per-axis values (first axis outer).
    pub fn surface(&self, grid: &[Vec<f64>]) -> Vec<Vec<f64>> {
        assert_eq!(grid.len(), self.axes.len(), "one value list per axis");
        match grid {
            [xs] => xs.iter().map(|&x| vec![x, self.predict(&[x])]).collect(),
            [xs, ys] => xs
                .iter()
                .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
                .map(|(x, y)| vec![x, y, self.predict(&[x, y])])
                .collect(),
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::linspace;
    use proptest::prelude::*;

    fn axis() -> Vec<MetaAxis> {
        vec![MetaAxis::new("x", -1.0, 1.0)]
    }

    #[test]
    fn coefficient_counts() {
        assert_eq!(coefficient_count(1, 4), 5);
        assert_eq!(coefficient_count(2, 4), 15);
        assert_eq!(monomials(2, 4).len(), 15);
        assert_eq!(monomials(2, 2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn two_points_linear_interpolates() {
        let m = fit_metamodel(&[vec![0.0], vec![1.0]], &[3.0, 5.0], axis(), 1).unwrap();
        assert!((m.stats.r2 - 1.0).abs() < 1e-12);
        assert!((m.predict(&[0.5]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_recovered_exactly() {
        let xs: Vec<Vec<f64>> = linspace(-1.0, 1.0, 8).into_iter().map(|x| vec![x]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0] * x[0]).collect();
        let m = fit_metamodel(&xs, &ys, axis(), 2).unwrap();
        for (c, e) in m.coefficients.iter().zip([0.0, 0.0, 1.0]) {
            assert!((c - e).abs() < 1e-9, "{:?}", m.coefficients);
        }
        assert!(m.stats.max_abs_residual < 1e-9);
        assert!((m.eval(&[0.5]).y - 0.25).abs() < 1e-9);
        assert!(m.stats.orthogonality < 1e-8);
    }

    #[test]
    fn duplicate_points_rank_deficient() {
        let xs = vec![vec![0.3], vec![0.3], vec![0.3]];
        let err = fit_metamodel(&xs, &[1.0, 1.0, 1.0], axis(), 2).unwrap_err();
        assert!(matches!(err, AnalysisError::RankDeficient { rank: 1, columns: 3 }), "{err:?}");
    }

    #[test]
    fn too_few_samples() {
        assert!(fit_metamodel(&[vec![0.0]], &[1.0], axis(), 2).is_err());
    }

    #[test]
    fn constant_model_is_flat() {
        let m = fit_metamodel(&[vec![0.0], vec![0.5], vec![1.0]], &[2.0, 2.0, 2.0], axis(), 0).unwrap();
        for x in [-1.0, 0.0, 0.3, 1.0] {
            assert!((m.predict(&[x]) - 2.0).abs() < 1e-12);
        }
        assert_eq!(m.stats.r2, 1.0);
    }

    #[test]
    fn extrapolation_flagged() {
        let m = fit_metamodel(&[vec![0.0], vec![1.0]], &[0.0, 1.0], vec![MetaAxis::new("x", 0.0, 1.0)], 1).unwrap();
        assert!(!m.eval(&[0.5]).extrapolated);
        assert!(m.eval(&[1.5]).extrapolated);
    }

    #[test]
    fn surface_cardinality() {
        let ax = vec![MetaAxis::new("a", 0.0, 1.0), MetaAxis::new("b", 0.0, 1.0)];
        let g = linspace(0.0, 1.0, 8);
        let xs: Vec<Vec<f64>> = g.iter().flat_map(|&a| g.iter().map(move |&b| vec![a, b])).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0] + 2.0 * x[1]).collect();
        let m = fit_metamodel(&xs, &ys, ax, 2).unwrap();
        let rows = m.surface(&[g.clone(), g.clone()]);
        assert_eq!(rows.len(), 64);
        assert_eq!(rows[1][0], 0.0);
        assert_eq!(rows[1][1], g[1]);
    }

    proptest! {
        #[test]
        fn sse_non_increasing_in_degree(ys in proptest::collection::vec(-10.0f64..10.0, 12)) {
            let xs: Vec<Vec<f64>> = linspace(0.0, 5.0, 12).into_iter().map(|x| vec![x]).collect();
            let ax = vec![MetaAxis::new("x", 0.0, 5.0)];
            let mut prev = f64::INFINITY;
            for deg in 0..=6 {
                let m = fit_metamodel(&xs, &ys, ax.clone(), deg).unwrap();
                prop_assert!(m.stats.sse <= prev * (1.0 + 1e-9) + 1e-12);
                prev = m.stats.sse;
            }
        }
    }
}

//! Principal component analysis for feature reduction.
//!
//! Fitting centers the data, builds either the `d x d` covariance matrix or
//! the `n x n` Gram matrix (whichever is smaller), and diagonalizes it with a
//! cyclic Jacobi sweep. Jacobi is cubic but bulletproof for the symmetric
//! matrices seen here, and its fixed sweep order keeps results bit-identical
//! for identical input.
//!
//! Component signs follow one rule everywhere: a component whose
//! largest-magnitude entry is negative is flipped, ties resolved toward the
//! lowest index. That makes models comparable across fits and platforms.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::error::CoreError;
use crate::matrix::FeatureMatrix;
use crate::Result;

/// Feature width PCA reduces to when the caller does not pick one.
pub const DEFAULT_COMPONENTS: usize = 32;

/// How raw features are turned into the vectors the two-sample test sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducerKind {
    /// Project onto the top `components` principal axes of the pooled data.
    Pca { components: usize },
    /// Use rows exactly as provided.
    Identity,
    /// Rows are already classifier scores from an external model; passed
    /// through unchanged, the name records their provenance.
    ExternalScores,
}

/// Which matrix gets diagonalized during a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenPath {
    /// Covariance when `d <= n`, Gram otherwise.
    Auto,
    Covariance,
    Gram,
}

/// Fitted projection. `components` is `k x d` row-major with orthonormal
/// rows; `eigenvalues` is nonnegative and descending; `total_variance` is the
/// trace of the covariance of the fitting data.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    components: Vec<f64>,
    eigenvalues: Vec<f64>,
    total_variance: f64,
    d: usize,
    k: usize,
}

impl PcaModel {
    /// Reassembles a model from stored parts, validating shapes and ranges.
    pub fn from_parts(
        mean: Vec<f64>,
        components: Vec<f64>,
        eigenvalues: Vec<f64>,
        total_variance: f64,
        d: usize,
        k: usize,
    ) -> Result<Self> {
        if d == 0 || k == 0 || k > d {
            return Err(CoreError::InvalidParam {
                name: "k",
                reason: alloc::format!("requires 1 <= k <= d, got k={k}, d={d}"),
            });
        }
        if mean.len() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                actual: mean.len(),
            });
        }
        if components.len() != k * d {
            return Err(CoreError::DimensionMismatch {
                expected: k * d,
                actual: components.len(),
            });
        }
        if eigenvalues.len() != k {
            return Err(CoreError::DimensionMismatch {
                expected: k,
                actual: eigenvalues.len(),
            });
        }
        let finite = mean.iter().chain(&components).chain(&eigenvalues).all(|v| v.is_finite())
            && total_variance.is_finite();
        if !finite {
            return Err(CoreError::NonFinite {
                what: "model values",
            });
        }
        if total_variance < 0.0
            || eigenvalues.iter().any(|&e| e < 0.0)
            || eigenvalues.windows(2).any(|w| w[0] < w[1])
        {
            return Err(CoreError::InvalidParam {
                name: "eigenvalues",
                reason: String::from("must be nonnegative and descending"),
            });
        }
        Ok(PcaModel {
            mean,
            components,
            eigenvalues,
            total_variance,
            d,
            k,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Row-major `k x d` component matrix.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.d..(i + 1) * self.d]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Fraction of total variance captured per component; all zeros when the
    /// fitting data had no variance at all.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        if self.total_variance == 0.0 {
            return vec![0.0; self.k];
        }
        self.eigenvalues
            .iter()
            .map(|&e| e / self.total_variance)
            .collect()
    }
}

/// Fits a `k`-component PCA on `m`, choosing the eigendecomposition path
/// automatically. Requires `n >= 2` and `1 <= k <= d`.
pub fn pca_fit(m: &FeatureMatrix, k: usize) -> Result<PcaModel> {
    pca_fit_with(m, k, EigenPath::Auto)
}

/// [`pca_fit`] with an explicit eigendecomposition path. Both paths agree on
/// inputs where both are applicable; exposing the choice makes that testable.
pub fn pca_fit_with(m: &FeatureMatrix, k: usize, path: EigenPath) -> Result<PcaModel> {
    let n = m.n();
    let d = m.d();
    if n < 2 {
        return Err(CoreError::InvalidParam {
            name: "n",
            reason: alloc::format!("PCA needs at least 2 rows, got {n}"),
        });
    }
    if k == 0 || k > d {
        return Err(CoreError::InvalidParam {
            name: "k",
            reason: alloc::format!("requires 1 <= k <= d, got k={k}, d={d}"),
        });
    }

    let mut mean = vec![0.0; d];
    for row in m.rows() {
        for (s, v) in mean.iter_mut().zip(row) {
            *s += v;
        }
    }
    for s in mean.iter_mut() {
        *s /= n as f64;
    }

    let mut centered = Vec::with_capacity(n * d);
    for row in m.rows() {
        for (v, mu) in row.iter().zip(&mean) {
            centered.push(v - mu);
        }
    }

    let denom = (n - 1) as f64;
    let total_variance: f64 = centered.iter().map(|v| v * v).sum::<f64>() / denom;

    let use_gram = match path {
        EigenPath::Auto => d > n,
        EigenPath::Covariance => false,
        EigenPath::Gram => true,
    };

    let (eigenvalues, components) = if use_gram {
        fit_via_gram(&centered, n, d, k, denom)
    } else {
        fit_via_covariance(&centered, n, d, k, denom)
    };

    let mut components = components;
    for row in components.chunks_exact_mut(d) {
        fix_sign(row);
    }

    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
        total_variance,
        d,
        k,
    })
}

fn fit_via_covariance(centered: &[f64], n: usize, d: usize, k: usize, denom: f64) -> (Vec<f64>, Vec<f64>) {
    let mut cov = vec![0.0; d * d];
    for row in centered.chunks_exact(d) {
        for i in 0..d {
            let ri = row[i];
            for j in i..d {
                cov[i * d + j] += ri * row[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    let _ = n;
    let (evals, evecs) = jacobi_eigh(cov, d);
    let order = descending_order(&evals);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut components = Vec::with_capacity(k * d);
    for &idx in order.iter().take(k) {
        eigenvalues.push(evals[idx].max(0.0));
        // eigenvectors are columns of evecs
        for r in 0..d {
            components.push(evecs[r * d + idx]);
        }
    }
    (eigenvalues, components)
}

fn fit_via_gram(centered: &[f64], n: usize, d: usize, k: usize, denom: f64) -> (Vec<f64>, Vec<f64>) {
    let mut gram = vec![0.0; n * n];
    for r in 0..n {
        let row_r = &centered[r * d..(r + 1) * d];
        for s in r..n {
            let row_s = &centered[s * d..(s + 1) * d];
            let dot: f64 = row_r.iter().zip(row_s).map(|(a, b)| a * b).sum();
            gram[r * n + s] = dot / denom;
            gram[s * n + r] = gram[r * n + s];
        }
    }
    let (evals, evecs) = jacobi_eigh(gram, n);
    let order = descending_order(&evals);
    let lead = evals[order[0]].max(0.0);
    // directions below this are numerically zero-variance and are filled in
    // by basis completion instead of an ill-conditioned back-projection
    let cutoff = lead * 1e-12;

    let mut eigenvalues = Vec::with_capacity(k);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &idx in order.iter() {
        if rows.len() == k {
            break;
        }
        let lambda = evals[idx].max(0.0);
        if lambda <= cutoff || lambda == 0.0 {
            break;
        }
        // map Gram eigenvector u back to feature space: w = X^T u / ||X^T u||
        let mut w = vec![0.0; d];
        for r in 0..n {
            let u = evecs[r * n + idx];
            if u != 0.0 {
                let row = &centered[r * d..(r + 1) * d];
                for (wj, xj) in w.iter_mut().zip(row) {
                    *wj += u * xj;
                }
            }
        }
        let norm = sqrt(w.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            break;
        }
        for v in w.iter_mut() {
            *v /= norm;
        }
        eigenvalues.push(lambda);
        rows.push(w);
    }
    complete_basis(&mut rows, d, k);
    while eigenvalues.len() < k {
        eigenvalues.push(0.0);
    }
    let mut components = Vec::with_capacity(k * d);
    for row in rows {
        components.extend_from_slice(&row);
    }
    (eigenvalues, components)
}

/// Extends `rows` to `k` orthonormal vectors by Gram-Schmidt over the
/// standard basis, scanned in index order. Deterministic.
fn complete_basis(rows: &mut Vec<Vec<f64>>, d: usize, k: usize) {
    let mut axis = 0;
    while rows.len() < k && axis < d {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        for _ in 0..2 {
            for row in rows.iter() {
                let dot: f64 = v.iter().zip(row).map(|(a, b)| a * b).sum();
                for (vj, rj) in v.iter_mut().zip(row) {
                    *vj -= dot * rj;
                }
            }
        }
        let norm = sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-8 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            rows.push(v);
        }
        axis += 1;
    }
}

fn descending_order(evals: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..evals.len()).collect();
    order.sort_by(|&a, &b| evals[b].total_cmp(&evals[a]).then(a.cmp(&b)));
    order
}

/// Flips the row so its largest-magnitude entry is positive; on magnitude
/// ties the lowest index decides.
fn fix_sign(row: &mut [f64]) {
    let mut best = 0;
    for i in 1..row.len() {
        if fabs(row[i]) > fabs(row[best]) {
            best = i;
        }
    }
    if row[best] < 0.0 {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
}

/// Projects rows of `m` onto the model's components.
pub fn pca_transform(model: &PcaModel, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    if m.d() != model.d {
        return Err(CoreError::DimensionMismatch {
            expected: model.d,
            actual: m.d(),
        });
    }
    let mut out = Vec::with_capacity(m.n() * model.k);
    let mut centered = vec![0.0; model.d];
    for row in m.rows() {
        for (c, (v, mu)) in centered.iter_mut().zip(row.iter().zip(&model.mean)) {
            *c = v - mu;
        }
        for comp in model.components.chunks_exact(model.d) {
            let z: f64 = centered.iter().zip(comp).map(|(a, b)| a * b).sum();
            out.push(z);
        }
    }
    FeatureMatrix::from_flat(m.ids().to_vec(), out, model.k)
}

/// Maps reduced rows back to the original feature space.
pub fn pca_inverse_transform(model: &PcaModel, z: &FeatureMatrix) -> Result<FeatureMatrix> {
    if z.d() != model.k {
        return Err(CoreError::DimensionMismatch {
            expected: model.k,
            actual: z.d(),
        });
    }
    let mut out = Vec::with_capacity(z.n() * model.d);
    for row in z.rows() {
        let start = out.len();
        out.extend_from_slice(&model.mean);
        for (c, comp) in row.iter().zip(model.components.chunks_exact(model.d)) {
            for (o, w) in out[start..].iter_mut().zip(comp) {
                *o += c * w;
            }
        }
    }
    FeatureMatrix::from_flat(z.ids().to_vec(), out, model.d)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major, `n x n`).
/// Returns unsorted eigenvalues and an orthogonal matrix whose columns are the
/// matching eigenvectors.
fn jacobi_eigh(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n < 2 {
        let d = if n == 1 { vec![a[0]] } else { Vec::new() };
        return (d, v);
    }
    let mut b: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut d = b.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..100 {
        let mut sm = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                sm += fabs(a[p * n + q]);
            }
        }
        if sm == 0.0 {
            break;
        }
        let tresh = if sweep < 3 {
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = 100.0 * fabs(a[p * n + q]);
                if sweep > 3 && fabs(d[p]) + g == fabs(d[p]) && fabs(d[q]) + g == fabs(d[q]) {
                    a[p * n + q] = 0.0;
                } else if fabs(a[p * n + q]) > tresh {
                    let mut h = d[q] - d[p];
                    let t = if fabs(h) + g == fabs(h) {
                        a[p * n + q] / h
                    } else {
                        let theta = 0.5 * h / a[p * n + q];
                        let mut t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta));
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / sqrt(1.0 + t * t);
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * a[p * n + q];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p * n + q] = 0.0;
                    for j in 0..p {
                        rotate(&mut a, n, j, p, j, q, s, tau);
                    }
                    for j in p + 1..q {
                        rotate(&mut a, n, p, j, j, q, s, tau);
                    }
                    for j in q + 1..n {
                        rotate(&mut a, n, p, j, q, j, s, tau);
                    }
                    for j in 0..n {
                        rotate(&mut v, n, j, p, j, q, s, tau);
                    }
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    (d, v)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn rotate(m: &mut [f64], n: usize, i: usize, j: usize, k: usize, l: usize, s: f64, tau: f64) {
    let g = m[i * n + j];
    let h = m[k * n + l];
    m[i * n + j] = g - s * (h + g * tau);
    m[k * n + l] = h + s * (g - h * tau);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{CounterRng, RngSeed};
    use alloc::string::ToString;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn matrix_from(rows: &[Vec<f64>]) -> FeatureMatrix {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        FeatureMatrix::from_rows(ids, rows).unwrap()
    }

    fn random_matrix(n: usize, d: usize, seed: u64) -> FeatureMatrix {
        let mut rng = CounterRng::new(RngSeed(seed));
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|j| rng.standard_normal() * (1.0 + j as f64)).collect())
            .collect();
        matrix_from(&rows)
    }

    #[test]
    fn diagonal_points_give_diagonal_axis() {
        let m = matrix_from(&[
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
            vec![4.0, 4.0],
        ]);
        let model = pca_fit(&m, 1).unwrap();
        let half_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(model.component(0)[0], half_sqrt2, epsilon = 1e-12);
        assert_relative_eq!(model.component(0)[1], half_sqrt2, epsilon = 1e-12);
        let evr = model.explained_variance_ratio();
        assert_relative_eq!(evr[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        let m = matrix_from(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(pca_fit(&m, 0).is_err());
        assert!(pca_fit(&m, 3).is_err());
        let single = matrix_from(&[vec![1.0, 2.0]]);
        assert!(pca_fit(&single, 1).is_err());
    }

    #[test]
    fn components_are_orthonormal() {
        let m = random_matrix(40, 6, 11);
        let model = pca_fit(&m, 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let dot: f64 = model
                    .component(i)
                    .iter()
                    .zip(model.component(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, want, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn projected_variance_matches_eigenvalue() {
        let m = random_matrix(60, 5, 3);
        let model = pca_fit(&m, 5).unwrap();
        let z = pca_transform(&model, &m).unwrap();
        for c in 0..5 {
            let vals: Vec<f64> = z.rows().map(|r| r[c]).collect();
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            let var: f64 =
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (vals.len() - 1) as f64;
            assert_relative_eq!(var, model.eigenvalues()[c], epsilon = 1e-8, max_relative = 1e-8);
        }
    }

    #[test]
    fn full_rank_ratios_sum_to_one() {
        let m = random_matrix(30, 7, 5);
        let model = pca_fit(&m, 7).unwrap();
        let sum: f64 = model.explained_variance_ratio().iter().sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn full_rank_round_trip_reconstructs() {
        let m = random_matrix(25, 4, 9);
        let model = pca_fit(&m, 4).unwrap();
        let z = pca_transform(&model, &m).unwrap();
        let back = pca_inverse_transform(&model, &z).unwrap();
        for (orig, rec) in m.rows().zip(back.rows()) {
            for (a, b) in orig.iter().zip(rec) {
                assert_relative_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn reconstruction_error_never_worsens_with_more_components() {
        let m = random_matrix(50, 8, 21);
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let model = pca_fit(&m, k).unwrap();
            let z = pca_transform(&model, &m).unwrap();
            let back = pca_inverse_transform(&model, &z).unwrap();
            let err: f64 = m
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            assert!(err <= prev + 1e-9, "k={k}: {err} > {prev}");
            prev = err;
        }
    }

    #[test]
    fn constant_rows_give_zero_ratios_not_nan() {
        let m = matrix_from(&vec![vec![2.0, 3.0, 4.0]; 5]);
        let model = pca_fit(&m, 2).unwrap();
        assert_eq!(model.total_variance(), 0.0);
        for (e, r) in model.eigenvalues().iter().zip(model.explained_variance_ratio()) {
            assert_eq!(*e, 0.0);
            assert_eq!(r, 0.0);
            assert!(!r.is_nan());
        }
    }

    #[test]
    fn fit_is_bit_deterministic() {
        let m = random_matrix(30, 6, 2);
        let a = pca_fit(&m, 4).unwrap();
        let b = pca_fit(&m, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gram_path_agrees_with_covariance_path() {
        let m = random_matrix(20, 6, 17);
        let cov = pca_fit_with(&m, 6, EigenPath::Covariance).unwrap();
        let gram = pca_fit_with(&m, 6, EigenPath::Gram).unwrap();
        for (a, b) in cov.eigenvalues().iter().zip(gram.eigenvalues()) {
            assert_relative_eq!(a, b, epsilon = 1e-8, max_relative = 1e-8);
        }
        // rank is n-1 at most; compare the well-determined directions
        for i in 0..5 {
            for (a, b) in cov.component(i).iter().zip(gram.component(i)) {
                assert_relative_eq!(a, b, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn wide_data_uses_gram_and_stays_orthonormal() {
        let m = random_matrix(6, 12, 31);
        let model = pca_fit(&m, 12).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let dot: f64 = model
                    .component(i)
                    .iter()
                    .zip(model.component(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, want, epsilon = 1e-8);
            }
        }
        // beyond the data rank the spectrum is exactly zero
        for &e in &model.eigenvalues()[6..] {
            assert_eq!(e, 0.0);
        }
    }

    #[test]
    fn transform_rejects_width_mismatch() {
        let m = random_matrix(10, 4, 1);
        let model = pca_fit(&m, 2).unwrap();
        let other = random_matrix(3, 5, 2);
        assert!(pca_transform(&model, &other).is_err());
        let z = random_matrix(3, 3, 2);
        assert!(pca_inverse_transform(&model, &z).is_err());
    }

    #[test]
    fn sign_rule_makes_peak_entry_positive() {
        for seed in 0..20 {
            let m = random_matrix(15, 5, 100 + seed);
            let model = pca_fit(&m, 5).unwrap();
            for i in 0..5 {
                let row = model.component(i);
                let mut best = 0;
                for j in 1..row.len() {
                    if fabs(row[j]) > fabs(row[best]) {
                        best = j;
                    }
                }
                assert!(row[best] > 0.0);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn leading_eigenvalue_maximizes_variance(seed in 0u64..1000) {
            let m = random_matrix(30, 4, seed);
            let model = pca_fit(&m, 1).unwrap();
            // variance along a random direction never beats the leading eigenvalue
            let mut rng = CounterRng::new(RngSeed(seed ^ 0xABCD));
            let mut u: Vec<f64> = (0..4).map(|_| rng.standard_normal()).collect();
            let norm = sqrt(u.iter().map(|v| v * v).sum::<f64>());
            prop_assume!(norm > 1e-6);
            for v in u.iter_mut() { *v /= norm; }
            let proj: Vec<f64> = m.rows().map(|r| r.iter().zip(&u).map(|(a, b)| a * b).sum()).collect();
            let mean: f64 = proj.iter().sum::<f64>() / proj.len() as f64;
            let var: f64 = proj.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (proj.len() - 1) as f64;
            prop_assert!(var <= model.eigenvalues()[0] + 1e-8);
        }
    }
}

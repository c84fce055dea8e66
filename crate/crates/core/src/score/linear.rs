//! Seven-parameter linear scorer: an intercept minus a non-negative
//! weighted sum of the six costs, fitted by non-negative least squares.

use super::features::{FeatureVector, FEATURE_COUNT};
use super::model::{feature_names, Hyperparams, Mode, Model, TrainMeta};
use crate::error::{Error, Result};

type Square = [[f64; FEATURE_COUNT]; FEATURE_COUNT];

/// Solves `g[p][p] z = h[p]` for the passive set `p`; dependent columns
/// get zero.
fn solve_passive(g: &Square, h: &[f64; FEATURE_COUNT], passive: &[bool; FEATURE_COUNT]) -> [f64; FEATURE_COUNT] {
    let idx: Vec<usize> = (0..FEATURE_COUNT).filter(|&j| passive[j]).collect();
    let k = idx.len();
    let mut a: Vec<Vec<f64>> = idx
        .iter()
        .map(|&r| {
            let mut row: Vec<f64> = idx.iter().map(|&c| g[r][c]).collect();
            row.push(h[r]);
            row
        })
        .collect();
    let scale = idx
        .iter()
        .map(|&j| g[j][j].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut pivot_of = vec![None; k];
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else {
            break;
        };
        if a[p][col].abs() <= 1e-12 * scale {
            continue;
        }
        a.swap(row, p);
        let pivot_row = a[row].clone();
        for (r, target) in a.iter_mut().enumerate() {
            let factor = target[col] / pivot_row[col];
            if r != row && factor != 0.0 {
                for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                    *t -= factor * p;
                }
            }
        }
        pivot_of[col] = Some(row);
        row += 1;
    }
    let mut z = [0.0; FEATURE_COUNT];
    for (col, &j) in idx.iter().enumerate() {
        if let Some(r) = pivot_of[col] {
            z[j] = a[r][k] / a[r][col];
        }
    }
    z
}

/// Lawson-Hanson active-set NNLS on the normal equations `g w = h`.
fn nnls(g: &Square, h: &[f64; FEATURE_COUNT]) -> [f64; FEATURE_COUNT] {
    let tol = 1e-12 * h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut w = [0.0; FEATURE_COUNT];
    let mut passive = [false; FEATURE_COUNT];
    for _ in 0..(3 * FEATURE_COUNT) {
        let grad: Vec<f64> = (0..FEATURE_COUNT)
            .map(|i| h[i] - (0..FEATURE_COUNT).map(|j| g[i][j] * w[j]).sum::<f64>())
            .collect();
        let Some(enter) = (0..FEATURE_COUNT)
            .filter(|&j| !passive[j] && grad[j] > tol)
            .max_by(|&a, &b| grad[a].total_cmp(&grad[b]).then(b.cmp(&a)))
        else {
            break;
        };
        passive[enter] = true;
        loop {
            let z = solve_passive(g, h, &passive);
            if (0..FEATURE_COUNT).all(|j| !passive[j] || z[j] > 0.0) {
                w = z;
                break;
            }
            let alpha = (0..FEATURE_COUNT)
                .filter(|&j| passive[j] && z[j] <= 0.0)
                .map(|j| w[j] / (w[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            for j in 0..FEATURE_COUNT {
                w[j] += alpha * (z[j] - w[j]);
                if passive[j] && w[j] <= tol {
                    passive[j] = false;
                    w[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    w
}

pub fn train_linear(x: &[FeatureVector], y: &[f64], seed: u64) -> Result<Model> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature vectors but {} labels",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Invariant("training needs at least two samples".into()));
    }
    let n = x.len() as f64;
    let rows: Vec<[f64; FEATURE_COUNT]> = x.iter().map(FeatureVector::to_array).collect();
    let y_mean = y.iter().sum::<f64>() / n;
    let mut f_mean = [0.0; FEATURE_COUNT];
    for r in &rows {
        for j in 0..FEATURE_COUNT {
            f_mean[j] += r[j] / n;
        }
    }

    // minimise |(-Fc) w - yc|^2 with w >= 0
    let mut g = [[0.0; FEATURE_COUNT]; FEATURE_COUNT];
    let mut h = [0.0; FEATURE_COUNT];
    for (r, &yi) in rows.iter().zip(y) {
        let c: [f64; FEATURE_COUNT] = std::array::from_fn(|j| r[j] - f_mean[j]);
        for i in 0..FEATURE_COUNT {
            h[i] -= c[i] * (yi - y_mean);
            for j in 0..FEATURE_COUNT {
                g[i][j] += c[i] * c[j];
            }
        }
    }
    let w = nnls(&g, &h);
    let init = y_mean + (0..FEATURE_COUNT).map(|j| w[j] * f_mean[j]).sum::<f64>();

    Ok(Model {
        mode: Mode::Linear,
        init,
        lr: 1.0,
        feature_names: feature_names(),
        trees: Vec::new(),
        weights: Some(w),
        train_meta: TrainMeta {
            hyperparams: Hyperparams {
                seed,
                ..Hyperparams::default()
            },
            seed,
            label_bounds: None,
            n_samples: x.len(),
            lang_pair: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::feature_importances;
    use proptest::prelude::*;

    fn fv(v: [f64; 6]) -> FeatureVector {
        FeatureVector::from_array(v)
    }

    #[test]
    fn recovers_a_penalty_model() {
        let truth = [0.5, 0.0, 1.0, 0.0, 0.25, 2.0];
        let x: Vec<_> = (0..40)
            .map(|i| {
                let i = i as f64;
                fv([
                    (i * 0.37) % 1.0,
                    (i * 0.11) % 0.7,
                    (i * 0.53) % 0.9,
                    (i * 0.29) % 0.4,
                    (i * 0.71) % 0.3,
                    (i * 0.17) % 1.3,
                ])
            })
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|f| 0.9 - f.to_array().iter().zip(truth).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let m = train_linear(&x, &y, 0).unwrap();
        let w = m.weights.unwrap();
        for j in 0..6 {
            assert!((w[j] - truth[j]).abs() < 1e-9, "w[{j}] = {}", w[j]);
        }
        assert!((m.init - 0.9).abs() < 1e-9);
        assert!((m.predict(&x[7]) - y[7]).abs() < 1e-9);
    }

    #[test]
    fn costs_that_help_get_zero_weight() {
        // the score rises with extra, which a penalty model cannot express
        let x: Vec<_> = (0..10)
            .map(|i| fv([i as f64, 0.0, 0.0, 0.0, 0.0, (i % 3) as f64]))
            .collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64 - (i % 3) as f64).collect();
        let m = train_linear(&x, &y, 0).unwrap();
        let w = m.weights.unwrap();
        assert_eq!(w[0], 0.0);
        assert!(w[5] >= 0.0);
        let imp = feature_importances(&m);
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_features_do_not_break_the_solver() {
        let x: Vec<_> = (0..8).map(|i| fv([i as f64, i as f64, 0.0, 0.0, 0.0, 0.0])).collect();
        let y: Vec<f64> = (0..8).map(|i| 1.0 - 0.1 * i as f64).collect();
        let m = train_linear(&x, &y, 0).unwrap();
        for (f, yi) in x.iter().zip(&y) {
            assert!((m.predict(f) - yi).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn weights_are_non_negative_and_fit_is_no_worse_than_the_mean(
            rows in prop::collection::vec((prop::array::uniform6(0.0f64..1.0), 0.0f64..1.0), 2..40),
        ) {
            let x: Vec<_> = rows.iter().map(|(v, _)| fv(*v)).collect();
            let y: Vec<_> = rows.iter().map(|(_, y)| *y).collect();
            let m = train_linear(&x, &y, 0).unwrap();
            prop_assert!(m.weights.unwrap().iter().all(|&w| w >= 0.0));
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let sse: f64 = x.iter().zip(&y).map(|(f, yi)| (m.predict(f) - yi).powi(2)).sum();
            let sst: f64 = y.iter().map(|yi| (yi - mean).powi(2)).sum();
            prop_assert!(sse <= sst + 1e-9);
        }
    }
}

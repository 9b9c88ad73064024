//! Central finite-difference gradient verification, plus the standard
//! battery run over seeded random instances of every differentiable kernel.

use serde::{Deserialize, Serialize};

use crate::genkit::RngState;
use crate::{Error, Result};

use super::contrastive::contrastive_loss;
use super::pool::{pool_forward, MlpParams, PoolingSpec, RepMatrix};
use super::tokenloss::{cross_entropy_with_grad, unlikelihood_with_grad};

/// Compares an analytic gradient against central finite differences of `f`
/// at `x`, returning the maximum relative error over all coordinates.
///
/// Relative error per coordinate: |a − n| / max(1e−8, |a| + |n|).
pub fn grad_check<F>(f: F, x: &[f64], analytic: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::Invalid(format!(
            "finite-difference step must be in [1e-7, 1e-3], got {h}"
        )));
    }
    if x.len() != analytic.len() {
        return Err(Error::Invalid(format!(
            "gradient length {} does not match input length {}",
            analytic.len(),
            x.len()
        )));
    }

    let mut worst = 0.0f64;
    let mut point = x.to_vec();
    for i in 0..x.len() {
        let original = point[i];
        point[i] = original + h;
        let plus = f(&point);
        point[i] = original - h;
        let minus = f(&point);
        point[i] = original;

        let numeric = (plus - minus) / (2.0 * h);
        let a = analytic[i];
        let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Worst relative errors per kernel over a battery of seeded instances.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub instances: usize,
    pub step: f64,
    pub contrastive: f64,
    pub pooled_mlp: f64,
    pub cross_entropy: f64,
    pub unlikelihood: f64,
}

impl GradCheckReport {
    pub fn worst(&self) -> f64 {
        self.contrastive
            .max(self.pooled_mlp)
            .max(self.cross_entropy)
            .max(self.unlikelihood)
    }
}

/// Central differences at step h carry roundoff noise of roughly
/// ulp(loss) / 2h in every coordinate. Coordinates whose true gradient
/// sits below this scale cannot be checked meaningfully, so instance
/// generation redraws until all analytic coordinates clear it. A wrong
/// gradient formula still fails on the well-conditioned coordinates.
const MIN_CHECKABLE_GRAD: f64 = 5e-6;

const MAX_REDRAWS: usize = 100;

fn well_conditioned(analytic: &[f64]) -> bool {
    analytic.iter().all(|a| a.abs() >= MIN_CHECKABLE_GRAD)
}

/// Random vector with norm bounded away from zero, so cosine stays smooth
/// under the finite-difference perturbation.
fn safe_vector(rng: &mut RngState, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.next_range_f64(-1.0, 1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>().sqrt() > 0.3 {
            return v;
        }
    }
}

fn check_contrastive(rng: &mut RngState, h: f64) -> Result<f64> {
    for _ in 0..MAX_REDRAWS {
        let dim = 2 + rng.next_index(5);
        let m = 2 + rng.next_index(3);
        let n = rng.next_index(5);
        let positives: Vec<Vec<f64>> = (0..m).map(|_| safe_vector(rng, dim)).collect();
        let negatives: Vec<Vec<f64>> = (0..n).map(|_| safe_vector(rng, dim)).collect();
        let tau = 0.5 + rng.next_unit();

        let result = contrastive_loss(&positives, &negatives, tau)?;
        let analytic: Vec<f64> = result
            .grad_positives
            .iter()
            .chain(result.grad_negatives.iter())
            .flatten()
            .copied()
            .collect();
        if !well_conditioned(&analytic) {
            continue;
        }
        let flat: Vec<f64> =
            positives.iter().chain(negatives.iter()).flatten().copied().collect();
        let unpack = move |x: &[f64]| -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
            let mut vectors: Vec<Vec<f64>> = x.chunks(dim).map(<[f64]>::to_vec).collect();
            let negs = vectors.split_off(m);
            (vectors, negs)
        };
        return grad_check(
            |x| {
                let (p, ng) = unpack(x);
                contrastive_loss(&p, &ng, tau).expect("perturbed instance stays valid").value
            },
            &flat,
            &analytic,
            h,
        );
    }
    Err(Error::Invalid("could not draw a well-conditioned contrastive instance".into()))
}

/// Packs representation rows and MLP parameters into one flat vector so a
/// single check covers the full pooling + projection + contrastive chain.
fn check_pooled_mlp(rng: &mut RngState, h: f64) -> Result<f64> {
    for _ in 0..MAX_REDRAWS {
        let dim = 2 + rng.next_index(3);
        let spec = PoolingSpec { kind: super::pool::PoolKind::AllTokens, use_mlp: true };
        let sample_rows: Vec<usize> = (0..4).map(|_| 1 + rng.next_index(3)).collect();
        let m = 2; // two positives, two negatives
        let mlp = MlpParams::seeded(dim, rng.next_index(1 << 16) as u64);
        let tau = 1.0;

        let total_rows: usize = sample_rows.iter().sum();
        let rows_flat: Vec<f64> = (0..total_rows * dim)
            .map(|_| rng.next_range_f64(-1.0, 1.0))
            .collect();
        let mlp_flat: Vec<f64> = mlp
            .w1
            .iter()
            .flatten()
            .chain(mlp.b1.iter())
            .chain(mlp.w2.iter().flatten())
            .chain(mlp.b2.iter())
            .copied()
            .collect();
        let mut flat = rows_flat;
        flat.extend(mlp_flat);

        let sample_rows_for_unpack = sample_rows.clone();
        let unpack = move |x: &[f64]| -> (Vec<RepMatrix>, MlpParams) {
            let mut cursor = 0;
            let mut reps = Vec::new();
            for rows in &sample_rows_for_unpack {
                let matrix: Vec<Vec<f64>> = (0..*rows)
                    .map(|_| {
                        let row = x[cursor..cursor + dim].to_vec();
                        cursor += dim;
                        row
                    })
                    .collect();
                reps.push(RepMatrix::new(matrix, vec![false; *rows]));
            }
            let mut take = |n: usize| -> Vec<f64> {
                let out = x[cursor..cursor + n].to_vec();
                cursor += n;
                out
            };
            let w1: Vec<Vec<f64>> = (0..dim).map(|_| take(dim)).collect();
            let b1 = take(dim);
            let w2: Vec<Vec<f64>> = (0..dim).map(|_| take(dim)).collect();
            let b2 = take(dim);
            (reps, MlpParams { w1, b1, w2, b2 })
        };

        // analytic gradient via the chain rule
        let (reps, params) = unpack(&flat);
        let forwards: Vec<_> = reps
            .iter()
            .map(|r| pool_forward(r, &spec, Some(&params)).unwrap())
            .collect();
        let vectors: Vec<Vec<f64>> = forwards.iter().map(|f| f.output().to_vec()).collect();
        let cl = contrastive_loss(&vectors[..m], &vectors[m..], tau)?;
        let mut analytic = Vec::new();
        let mut mlp_total = super::pool::MlpGrads::zeros_like(&params);
        for (fwd, grad) in forwards
            .iter()
            .zip(cl.grad_positives.iter().chain(cl.grad_negatives.iter()))
        {
            let (rows, mlp_part) = fwd.backward(grad, Some(&params));
            analytic.extend(rows.into_iter().flatten());
            if let Some(part) = mlp_part {
                mlp_total.add_scaled(&part, 1.0);
            }
        }
        analytic.extend(
            mlp_total
                .w1
                .iter()
                .flatten()
                .chain(mlp_total.b1.iter())
                .chain(mlp_total.w2.iter().flatten())
                .chain(mlp_total.b2.iter())
                .copied(),
        );
        if !well_conditioned(&analytic) {
            continue;
        }

        let forward = move |x: &[f64]| -> f64 {
            let (reps, params) = unpack(x);
            let vectors: Vec<Vec<f64>> = reps
                .iter()
                .map(|r| pool_forward(r, &spec, Some(&params)).unwrap().output().to_vec())
                .collect();
            contrastive_loss(&vectors[..m], &vectors[m..], tau).unwrap().value
        };
        return grad_check(forward, &flat, &analytic, h);
    }
    Err(Error::Invalid("could not draw a well-conditioned pooled-MLP instance".into()))
}

fn check_cross_entropy(rng: &mut RngState, h: f64) -> Result<f64> {
    let count = 3 + rng.next_index(8);
    let probs: Vec<f64> = (0..count).map(|_| rng.next_range_f64(0.05, 0.95)).collect();
    let (_, analytic) = cross_entropy_with_grad(&probs)?;
    grad_check(
        |x| cross_entropy_with_grad(x).unwrap().0,
        &probs,
        &analytic,
        h,
    )
}

fn check_unlikelihood(rng: &mut RngState, h: f64) -> Result<f64> {
    let count = 3 + rng.next_index(8);
    let probs: Vec<f64> = (0..count).map(|_| rng.next_range_f64(0.01, 0.9)).collect();
    let (_, analytic) = unlikelihood_with_grad(&probs)?;
    grad_check(
        |x| unlikelihood_with_grad(x).unwrap().0,
        &probs,
        &analytic,
        h,
    )
}

/// Runs every kernel's gradient check over `instances` seeded random
/// instances, reporting the worst relative error per kernel.
pub fn gradient_battery(instances: usize, seed: u64, h: f64) -> Result<GradCheckReport> {
    let mut report = GradCheckReport {
        instances,
        step: h,
        contrastive: 0.0,
        pooled_mlp: 0.0,
        cross_entropy: 0.0,
        unlikelihood: 0.0,
    };
    for i in 0..instances {
        let mut rng = RngState::with_stream(seed, i as u64);
        report.contrastive = report.contrastive.max(check_contrastive(&mut rng, h)?);
        report.pooled_mlp = report.pooled_mlp.max(check_pooled_mlp(&mut rng, h)?);
        report.cross_entropy = report.cross_entropy.max(check_cross_entropy(&mut rng, h)?);
        report.unlikelihood = report.unlikelihood.max(check_unlikelihood(&mut rng, h)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_function_checks_at_machine_scale() {
        let weights = [2.0, -3.0, 0.5];
        let f = |x: &[f64]| x.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>();
        let x = [1.0, 2.0, 3.0];
        let err = grad_check(f, &x, &weights, 1e-5).unwrap();
        assert!(err < 1e-9, "err {err}");
    }

    #[test]
    fn quadratic_function_checks() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let x = [0.3, -0.7, 1.1];
        let analytic: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let err = grad_check(f, &x, &analytic, 1e-5).unwrap();
        assert!(err < 1e-8, "err {err}");
    }

    #[test]
    fn wrong_gradient_is_caught() {
        let f = |x: &[f64]| x[0] * x[0];
        let err = grad_check(f, &[1.0], &[1.0], 1e-5).unwrap(); // true grad is 2.0
        assert!(err > 0.1);
    }

    #[test]
    fn step_size_bounds_are_enforced() {
        let f = |x: &[f64]| x[0];
        assert!(grad_check(&f, &[1.0], &[1.0], 1e-8).is_err());
        assert!(grad_check(&f, &[1.0], &[1.0], 1e-2).is_err());
    }

    #[test]
    fn battery_passes_on_a_small_run() {
        let report = gradient_battery(10, 99, 1e-5).unwrap();
        assert!(report.worst() < 1e-5, "{report:?}");
    }
}

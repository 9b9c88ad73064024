//! Summary-representation pooling and the optional MLP projection head,
//! with exact backward passes.

use serde::{Deserialize, Serialize};

use crate::genkit::RngState;
use crate::{Error, Result};

/// Per-token representation rows for one summary, with a mask marking
/// entity tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepMatrix {
    pub rows: Vec<Vec<f64>>,
    pub entity_mask: Vec<bool>,
}

impl RepMatrix {
    pub fn new(rows: Vec<Vec<f64>>, entity_mask: Vec<bool>) -> Self {
        RepMatrix { rows, entity_mask }
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Invalid("representation matrix has no rows".into()));
        }
        let d = self.dim();
        if d == 0 {
            return Err(Error::Invalid("representation rows must have dimension >= 1".into()));
        }
        if self.rows.iter().any(|r| r.len() != d) {
            return Err(Error::Invalid("representation rows have inconsistent dimensions".into()));
        }
        if self.entity_mask.len() != self.rows.len() {
            return Err(Error::Invalid(format!(
                "entity mask length {} does not match row count {}",
                self.entity_mask.len(),
                self.rows.len()
            )));
        }
        Ok(())
    }
}

/// Which token rows feed the summary vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    AllTokens,
    EntityTokens,
    LastToken,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolingSpec {
    pub kind: PoolKind,
    pub use_mlp: bool,
}

impl Default for PoolingSpec {
    fn default() -> Self {
        PoolingSpec { kind: PoolKind::AllTokens, use_mlp: false }
    }
}

/// One-hidden-layer tanh MLP. Shapes: `w1` is hidden × d, `w2` is out × hidden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
}

/// Gradients with the same shapes as [`MlpParams`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MlpGrads {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
}

impl MlpParams {
    /// Deterministic initialization: every weight and bias drawn uniformly
    /// from ±1/√d. Hidden and output widths default to d.
    pub fn seeded(d: usize, seed: u64) -> Self {
        Self::seeded_with_shape(d, d, d, seed)
    }

    pub fn seeded_with_shape(d: usize, hidden: usize, out: usize, seed: u64) -> Self {
        let bound = 1.0 / (d as f64).sqrt();
        let mut rng = RngState::new(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.next_range_f64(-bound, bound)).collect()
        };
        let w1 = (0..hidden).map(|_| draw(d)).collect();
        let b1 = draw(hidden);
        let w2 = (0..out).map(|_| draw(hidden)).collect();
        let b2 = draw(out);
        MlpParams { w1, b1, w2, b2 }
    }

    pub fn in_dim(&self) -> usize {
        self.w1.first().map_or(0, Vec::len)
    }

    pub fn out_dim(&self) -> usize {
        self.b2.len()
    }

    fn forward(&self, input: &[f64]) -> MlpCache {
        let hidden: Vec<f64> = self
            .w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect();
        let activated: Vec<f64> = hidden.iter().map(|z| z.tanh()).collect();
        let output: Vec<f64> = self
            .w2
            .iter()
            .zip(&self.b2)
            .map(|(row, b)| row.iter().zip(&activated).map(|(w, a)| w * a).sum::<f64>() + b)
            .collect();
        MlpCache { input: input.to_vec(), activated, output }
    }

    fn backward(&self, cache: &MlpCache, upstream: &[f64]) -> (Vec<f64>, MlpGrads) {
        let hidden = self.b1.len();
        let d = self.in_dim();

        // through the output layer
        let mut d_activated = vec![0.0; hidden];
        let mut gw2 = vec![vec![0.0; hidden]; self.b2.len()];
        for (o, up) in upstream.iter().enumerate() {
            for h in 0..hidden {
                gw2[o][h] = up * cache.activated[h];
                d_activated[h] += self.w2[o][h] * up;
            }
        }
        let gb2 = upstream.to_vec();

        // through tanh
        let d_pre: Vec<f64> = d_activated
            .iter()
            .zip(&cache.activated)
            .map(|(g, a)| g * (1.0 - a * a))
            .collect();

        // through the input layer
        let mut gw1 = vec![vec![0.0; d]; hidden];
        let mut d_input = vec![0.0; d];
        for h in 0..hidden {
            for i in 0..d {
                gw1[h][i] = d_pre[h] * cache.input[i];
                d_input[i] += self.w1[h][i] * d_pre[h];
            }
        }
        let gb1 = d_pre;

        (d_input, MlpGrads { w1: gw1, b1: gb1, w2: gw2, b2: gb2 })
    }
}

impl MlpGrads {
    pub fn zeros_like(params: &MlpParams) -> Self {
        MlpGrads {
            w1: params.w1.iter().map(|r| vec![0.0; r.len()]).collect(),
            b1: vec![0.0; params.b1.len()],
            w2: params.w2.iter().map(|r| vec![0.0; r.len()]).collect(),
            b2: vec![0.0; params.b2.len()],
        }
    }

    pub fn add_scaled(&mut self, other: &MlpGrads, scale: f64) {
        for (a, b) in self.w1.iter_mut().zip(&other.w1) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
        for (x, y) in self.b1.iter_mut().zip(&other.b1) {
            *x += scale * y;
        }
        for (a, b) in self.w2.iter_mut().zip(&other.w2) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
        for (x, y) in self.b2.iter_mut().zip(&other.b2) {
            *x += scale * y;
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let mut s = 0.0;
        for row in self.w1.iter().chain(self.w2.iter()) {
            s += row.iter().map(|x| x * x).sum::<f64>();
        }
        s += self.b1.iter().map(|x| x * x).sum::<f64>();
        s += self.b2.iter().map(|x| x * x).sum::<f64>();
        s.sqrt()
    }
}

#[derive(Debug, Clone)]
struct MlpCache {
    input: Vec<f64>,
    activated: Vec<f64>,
    output: Vec<f64>,
}

/// Forward pooling state: the summary vector plus what backward needs.
#[derive(Debug, Clone)]
pub struct PoolForward {
    output: Vec<f64>,
    used_fallback: bool,
    selected: Vec<usize>,
    n_rows: usize,
    d: usize,
    mlp_cache: Option<MlpCache>,
}

impl PoolForward {
    pub fn output(&self) -> &[f64] {
        &self.output
    }

    /// True when entity pooling found no entity tokens and fell back to
    /// all-token pooling.
    pub fn used_fallback(&self) -> bool {
        self.used_fallback
    }

    /// Propagates a gradient on the pooled output back to the selected
    /// representation rows (and the MLP parameters when one was applied).
    pub fn backward(
        &self,
        upstream: &[f64],
        mlp: Option<&MlpParams>,
    ) -> (Vec<Vec<f64>>, Option<MlpGrads>) {
        let (d_pooled, mlp_grads) = match (&self.mlp_cache, mlp) {
            (Some(cache), Some(params)) => {
                let (d_in, grads) = params.backward(cache, upstream);
                (d_in, Some(grads))
            }
            _ => (upstream.to_vec(), None),
        };
        let mut row_grads = vec![vec![0.0; self.d]; self.n_rows];
        let share = 1.0 / self.selected.len() as f64;
        for &row in &self.selected {
            for (g, up) in row_grads[row].iter_mut().zip(&d_pooled) {
                *g += share * up;
            }
        }
        (row_grads, mlp_grads)
    }
}

/// Pools token rows into one summary vector: the mean of all rows, of the
/// entity-masked rows, or the last row alone, optionally projected by the
/// MLP. Entity pooling with an empty mask falls back to all tokens and
/// flags the sample.
pub fn pool_forward(
    rep: &RepMatrix,
    spec: &PoolingSpec,
    mlp: Option<&MlpParams>,
) -> Result<PoolForward> {
    rep.validate()?;
    let n = rep.rows.len();
    let d = rep.dim();

    let (selected, used_fallback) = match spec.kind {
        PoolKind::AllTokens => ((0..n).collect::<Vec<_>>(), false),
        PoolKind::LastToken => (vec![n - 1], false),
        PoolKind::EntityTokens => {
            let masked: Vec<usize> = (0..n).filter(|i| rep.entity_mask[*i]).collect();
            if masked.is_empty() {
                ((0..n).collect(), true)
            } else {
                (masked, false)
            }
        }
    };

    let mut pooled = vec![0.0; d];
    for &row in &selected {
        for (acc, x) in pooled.iter_mut().zip(&rep.rows[row]) {
            *acc += x;
        }
    }
    let share = 1.0 / selected.len() as f64;
    for x in &mut pooled {
        *x *= share;
    }

    let (output, mlp_cache) = if spec.use_mlp {
        let params = mlp.ok_or_else(|| {
            Error::Invalid("pooling spec requests an MLP but no parameters were given".into())
        })?;
        if params.in_dim() != d {
            return Err(Error::Invalid(format!(
                "MLP input dimension {} does not match representation dimension {d}",
                params.in_dim()
            )));
        }
        let cache = params.forward(&pooled);
        (cache.output.clone(), Some(cache))
    } else {
        (pooled, None)
    };

    Ok(PoolForward { output, used_fallback, selected, n_rows: n, d, mlp_cache })
}

/// Convenience wrapper returning only the pooled vector.
pub fn pool(rep: &RepMatrix, spec: &PoolingSpec, mlp: Option<&MlpParams>) -> Result<Vec<f64>> {
    Ok(pool_forward(rep, spec, mlp)?.output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(rows: Vec<Vec<f64>>, mask: Vec<bool>) -> RepMatrix {
        RepMatrix::new(rows, mask)
    }

    #[test]
    fn all_tokens_is_arithmetic_mean() {
        let r = rep(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![false, false]);
        let v = pool(&r, &PoolingSpec::default(), None).unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
    }

    #[test]
    fn last_token_takes_final_row() {
        let r = rep(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![false, false]);
        let spec = PoolingSpec { kind: PoolKind::LastToken, use_mlp: false };
        assert_eq!(pool(&r, &spec, None).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn entity_tokens_use_mask() {
        let r = rep(
            vec![vec![2.0, 0.0], vec![4.0, 0.0], vec![0.0, 8.0]],
            vec![true, false, true],
        );
        let spec = PoolingSpec { kind: PoolKind::EntityTokens, use_mlp: false };
        assert_eq!(pool(&r, &spec, None).unwrap(), vec![1.0, 4.0]);
    }

    #[test]
    fn empty_entity_mask_falls_back_and_flags() {
        let r = rep(vec![vec![1.0], vec![3.0]], vec![false, false]);
        let spec = PoolingSpec { kind: PoolKind::EntityTokens, use_mlp: false };
        let fwd = pool_forward(&r, &spec, None).unwrap();
        assert!(fwd.used_fallback());
        assert_eq!(fwd.output(), &[2.0]);
    }

    #[test]
    fn zero_vector_through_mlp_is_bias_path() {
        let d = 3;
        let params = MlpParams::seeded(d, 11);
        let r = rep(vec![vec![0.0; d]], vec![false]);
        let spec = PoolingSpec { kind: PoolKind::AllTokens, use_mlp: true };
        let out = pool(&r, &spec, Some(&params)).unwrap();
        // expected: w2 · tanh(b1) + b2
        let expected: Vec<f64> = params
            .w2
            .iter()
            .zip(&params.b2)
            .map(|(row, b)| {
                row.iter()
                    .zip(&params.b1)
                    .map(|(w, z)| w * z.tanh())
                    .sum::<f64>()
                    + b
            })
            .collect();
        for (o, e) in out.iter().zip(&expected) {
            assert!((o - e).abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_rows_are_rejected() {
        let r = rep(vec![vec![1.0, 2.0], vec![1.0]], vec![false, false]);
        assert!(pool(&r, &PoolingSpec::default(), None).is_err());
    }

    #[test]
    fn seeded_init_is_reproducible_and_bounded() {
        let a = MlpParams::seeded(4, 7);
        let b = MlpParams::seeded(4, 7);
        assert_eq!(a, b);
        let bound = 1.0 / 2.0;
        for row in a.w1.iter().chain(a.w2.iter()) {
            assert!(row.iter().all(|w| w.abs() <= bound));
        }
    }
}

//! Feed-forward vol approximator: 6 inputs, five ELU hidden layers of 64
//! units, linear head, trained from scratch with mini-batch ADAM on MSE and
//! patience-based early stopping.
//!
//! Everything is deterministic given the seed: weight init, batch order and
//! the single-threaded matrix products, so a training run reproduces bit
//! for bit.

use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, VolPoint};
use crate::error::SabrError;
use crate::math::rng::SeqRng;

/// Production architecture: alpha_hat, beta, rho, nu, T, k_hat in, vol out.
pub const STANDARD_DIMS: [usize; 7] = [6, 64, 64, 64, 64, 64, 1];

/// Weight-file schema version.
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 500,
            patience: 50,
            batch_size: 8192,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validated(self) -> crate::Result<Self> {
        if self.patience > self.max_epochs || self.max_epochs == 0 {
            return Err(SabrError::InvalidInput(format!(
                "patience {} must not exceed max_epochs {}",
                self.patience, self.max_epochs
            )));
        }
        if self.batch_size == 0 {
            return Err(SabrError::InvalidInput("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(SabrError::InvalidInput("learning_rate must be positive".into()));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_rmse: f64,
    pub seed: u64,
    /// Wall-clock training time; absent in older weight files.
    #[serde(default)]
    pub train_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub dims: Vec<usize>,
    /// One (fan_in, fan_out) matrix per layer.
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub scaler_mean: Array1<f64>,
    pub scaler_std: Array1<f64>,
    pub meta: TrainMeta,
}

/// Per-layer loss gradients, same shapes as the parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[inline]
fn elu(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        z.exp_m1()
    }
}

/// ELU derivative recovered from the activation value: a = e^z - 1 for
/// z <= 0, so the slope e^z equals a + 1.
#[inline]
fn elu_grad_from_activation(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else {
        a + 1.0
    }
}

impl MlpModel {
    /// Network of arbitrary layer sizes with uniform fan-in-scaled weights
    /// and an identity scaler; used for toy-size gradient checks as well as
    /// the production shape.
    pub fn with_dims(dims: &[usize], seed: u64) -> crate::Result<MlpModel> {
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(SabrError::InvalidInput(format!(
                "need at least input and output layer sizes, got {dims:?}"
            )));
        }
        let mut rng = SeqRng::new(seed);
        let mut weights = Vec::with_capacity(dims.len() - 1);
        let mut biases = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let weight = Array2::from_shape_fn((fan_in, fan_out), |_| {
                (2.0 * rng.next_uniform() - 1.0) * bound
            });
            weights.push(weight);
            biases.push(Array1::zeros(fan_out));
        }
        Ok(MlpModel {
            dims: dims.to_vec(),
            weights,
            biases,
            scaler_mean: Array1::zeros(dims[0]),
            scaler_std: Array1::ones(dims[0]),
            meta: TrainMeta {
                seed,
                ..TrainMeta::default()
            },
        })
    }

    /// Fresh production-shape network.
    pub fn new(seed: u64) -> MlpModel {
        Self::with_dims(&STANDARD_DIMS, seed).expect("standard dims are valid")
    }

    pub fn n_inputs(&self) -> usize {
        self.dims[0]
    }

    fn standardize(&self, x: &Array2<f64>) -> Array2<f64> {
        (x - &self.scaler_mean) / &self.scaler_std
    }

    /// Forward pass of a feature matrix (rows = samples), returning one
    /// prediction per row.
    pub fn forward_batch(&self, x: &Array2<f64>) -> Array1<f64> {
        let mut a = self.standardize(x);
        let last = self.weights.len() - 1;
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            a = a.dot(w) + b;
            if i < last {
                a.mapv_inplace(elu);
            }
        }
        a.index_axis(Axis(1), 0).to_owned()
    }

    /// Single-sample convenience wrapper.
    pub fn forward(&self, features: &[f64]) -> crate::Result<f64> {
        if features.len() != self.n_inputs() {
            return Err(SabrError::InvalidInput(format!(
                "expected {} features, got {}",
                self.n_inputs(),
                features.len()
            )));
        }
        let x = Array2::from_shape_vec((1, features.len()), features.to_vec())
            .expect("shape matches length");
        Ok(self.forward_batch(&x)[0])
    }

    /// Mean-squared-error loss over the batch and its gradient for every
    /// parameter.
    pub fn loss_and_grads(&self, x: &Array2<f64>, y: &Array1<f64>) -> (f64, Gradients) {
        let n = x.nrows() as f64;
        let last = self.weights.len() - 1;
        // Forward, keeping activations (input counts as activation 0).
        let mut acts = Vec::with_capacity(self.weights.len() + 1);
        acts.push(self.standardize(x));
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut a = acts[i].dot(w) + b;
            if i < last {
                a.mapv_inplace(elu);
            }
            acts.push(a);
        }
        let pred = acts[last + 1].index_axis(Axis(1), 0);
        let resid = &pred - y;
        let loss = resid.mapv(|r| r * r).sum() / n;

        // Backward: delta starts as dL/d(output) of the linear head.
        let mut delta = resid.mapv(|r| 2.0 * r / n).insert_axis(Axis(1));
        let mut dw = vec![Array2::zeros((0, 0)); self.weights.len()];
        let mut db = vec![Array1::zeros(0); self.weights.len()];
        for i in (0..self.weights.len()).rev() {
            dw[i] = acts[i].t().dot(&delta);
            db[i] = delta.sum_axis(Axis(0));
            if i > 0 {
                delta = delta.dot(&self.weights[i].t());
                delta.zip_mut_with(&acts[i], |d, &a| *d *= elu_grad_from_activation(a));
            }
        }
        (
            loss,
            Gradients {
                weights: dw,
                biases: db,
            },
        )
    }

    pub fn save(&self, path: &Path) -> crate::Result<()> {
        let file = WeightFile {
            version: FORMAT_VERSION,
            dims: self.dims.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| w.outer_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: self.biases.iter().map(|b| b.to_vec()).collect(),
            scaler_mean: self.scaler_mean.to_vec(),
            scaler_std: self.scaler_std.to_vec(),
            meta: self.meta.clone(),
        };
        let mut out = serde_json::to_string(&file)?;
        out.push('\n');
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> crate::Result<MlpModel> {
        let text = std::fs::read_to_string(path)?;
        let file: WeightFile = serde_json::from_str(&text)?;
        if file.version != FORMAT_VERSION {
            return Err(SabrError::Format(format!(
                "weight file version {} unsupported (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        let n_layers = file.dims.len().saturating_sub(1);
        if n_layers == 0
            || file.weights.len() != n_layers
            || file.biases.len() != n_layers
            || file.scaler_mean.len() != file.dims[0]
            || file.scaler_std.len() != file.dims[0]
        {
            return Err(SabrError::Format("weight file shape mismatch".into()));
        }
        let mut weights = Vec::with_capacity(n_layers);
        let mut biases = Vec::with_capacity(n_layers);
        for (i, (w, b)) in file.weights.iter().zip(&file.biases).enumerate() {
            let (fan_in, fan_out) = (file.dims[i], file.dims[i + 1]);
            if w.len() != fan_in || w.iter().any(|row| row.len() != fan_out) || b.len() != fan_out
            {
                return Err(SabrError::Format(format!(
                    "layer {i} shape mismatch against dims {:?}",
                    file.dims
                )));
            }
            let flat: Vec<f64> = w.iter().flatten().copied().collect();
            weights.push(
                Array2::from_shape_vec((fan_in, fan_out), flat).expect("checked shape"),
            );
            biases.push(Array1::from_vec(b.clone()));
        }
        if file.scaler_std.iter().any(|&s| !(s > 0.0)) {
            return Err(SabrError::Format("scaler std must be positive".into()));
        }
        Ok(MlpModel {
            dims: file.dims,
            weights,
            biases,
            scaler_mean: Array1::from_vec(file.scaler_mean),
            scaler_std: Array1::from_vec(file.scaler_std),
            meta: file.meta,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct WeightFile {
    version: u32,
    dims: Vec<usize>,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    scaler_mean: Vec<f64>,
    scaler_std: Vec<f64>,
    meta: TrainMeta,
}

/// Feature vector of one corpus row, in the fixed model input order.
pub fn features(p: &VolPoint) -> [f64; 6] {
    [p.alpha_hat, p.beta, p.rho, p.nu, p.t, p.k_hat]
}

/// Feature matrix and target vector of a corpus.
pub fn design_matrix(ds: &Dataset) -> (Array2<f64>, Array1<f64>) {
    let x = Array2::from_shape_fn((ds.len(), 6), |(i, j)| features(&ds.rows[i])[j]);
    let y = Array1::from_iter(ds.rows.iter().map(|r| r.sigma));
    (x, y)
}

/// Column means and population standard deviations of a feature matrix.
pub fn fit_scaler(x: &Array2<f64>) -> crate::Result<(Array1<f64>, Array1<f64>)> {
    if x.nrows() == 0 {
        return Err(SabrError::InvalidInput("empty dataset".into()));
    }
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = x - &mean;
    let std = (centered.mapv(|v| v * v).mean_axis(Axis(0)).expect("non-empty")).mapv(f64::sqrt);
    if let Some(j) = std.iter().position(|&s| !(s > 0.0)) {
        return Err(SabrError::InvalidInput(format!(
            "feature column {j} has zero variance"
        )));
    }
    Ok((mean, std))
}

/// Evaluation summary in absolute vol units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rmse: f64,
    /// Fraction of |error| above 1 vol point (0.01).
    pub frac_abs_err_gt_1pct: f64,
    /// Fraction of |error| above 5 vol points (0.05).
    pub frac_abs_err_gt_5pct: f64,
    pub n: usize,
}

pub fn evaluate(model: &MlpModel, ds: &Dataset) -> crate::Result<EvalReport> {
    if ds.is_empty() {
        return Err(SabrError::InvalidInput("empty dataset".into()));
    }
    let (x, y) = design_matrix(ds);
    let pred = model.forward_batch(&x);
    let err = &pred - &y;
    let n = ds.len();
    let rmse = (err.mapv(|e| e * e).sum() / n as f64).sqrt();
    let count = |thr: f64| err.iter().filter(|e| e.abs() > thr).count() as f64 / n as f64;
    Ok(EvalReport {
        rmse,
        frac_abs_err_gt_1pct: count(0.01),
        frac_abs_err_gt_5pct: count(0.05),
        n,
    })
}

struct Adam {
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
    t: u64,
}

impl Adam {
    fn new(model: &MlpModel) -> Self {
        Adam {
            m_w: model.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_w: model.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_b: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            v_b: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            t: 0,
        }
    }

    fn step(&mut self, model: &mut MlpModel, grads: &Gradients, cfg: &TrainConfig) {
        self.t += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(self.t as i32);
        let lr = cfg.learning_rate;
        for i in 0..model.weights.len() {
            self.m_w[i].zip_mut_with(&grads.weights[i], |m, &g| {
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g
            });
            self.v_w[i].zip_mut_with(&grads.weights[i], |v, &g| {
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g
            });
            let (m, v) = (&self.m_w[i], &self.v_w[i]);
            model.weights[i].zip_mut_with(
                &(m / bc1 / ((v / bc2).mapv(f64::sqrt) + cfg.epsilon)),
                |w, &u| *w -= lr * u,
            );
            self.m_b[i].zip_mut_with(&grads.biases[i], |m, &g| {
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g
            });
            self.v_b[i].zip_mut_with(&grads.biases[i], |v, &g| {
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g
            });
            let (m, v) = (&self.m_b[i], &self.v_b[i]);
            model.biases[i].zip_mut_with(
                &(m / bc1 / ((v / bc2).mapv(f64::sqrt) + cfg.epsilon)),
                |b, &u| *b -= lr * u,
            );
        }
    }
}

fn val_rmse(model: &MlpModel, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let err = model.forward_batch(x) - y;
    (err.mapv(|e| e * e).sum() / y.len() as f64).sqrt()
}

/// Train a production-shape network on corpus rows.
///
/// The scaler is fitted on the training features; batches follow a seeded
/// per-epoch shuffle; validation RMSE is checked after every epoch and the
/// weights of the best epoch are returned once `patience` epochs pass
/// without improvement (or at `max_epochs`).
pub fn train(train_set: &Dataset, val_set: &Dataset, cfg: &TrainConfig) -> crate::Result<MlpModel> {
    let cfg = cfg.validated()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(SabrError::InvalidInput(
            "training and validation sets must be non-empty".into(),
        ));
    }
    let (x_train, y_train) = design_matrix(train_set);
    let (x_val, y_val) = design_matrix(val_set);
    train_arrays(&x_train, &y_train, &x_val, &y_val, &STANDARD_DIMS, &cfg)
}

/// Array-level training entry point (any architecture), used by [`train`]
/// and by synthetic-function experiments.
pub fn train_arrays(
    x_train: &Array2<f64>,
    y_train: &Array1<f64>,
    x_val: &Array2<f64>,
    y_val: &Array1<f64>,
    dims: &[usize],
    cfg: &TrainConfig,
) -> crate::Result<MlpModel> {
    let cfg = cfg.validated()?;
    let started = std::time::Instant::now();
    let mut model = MlpModel::with_dims(dims, cfg.seed)?;
    let (mean, std) = fit_scaler(x_train)?;
    model.scaler_mean = mean;
    model.scaler_std = std;

    let n = x_train.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = SeqRng::new(crate::math::rng::derive_seed(cfg.seed, 1));
    let mut adam = Adam::new(&model);

    let mut best = model.clone();
    let mut best_rmse = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut stale = 0usize;
    let mut epochs_run = 0usize;

    for epoch in 1..=cfg.max_epochs {
        epochs_run = epoch;
        shuffle_rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            let xb = x_train.select(Axis(0), batch);
            let yb = y_train.select(Axis(0), batch);
            let (loss, grads) = model.loss_and_grads(&xb, &yb);
            if !loss.is_finite() {
                return Err(SabrError::Divergence { epoch, loss });
            }
            adam.step(&mut model, &grads, &cfg);
        }
        let rmse = val_rmse(&model, x_val, y_val);
        if std::env::var_os("SABRCAL_TRAIN_LOG").is_some() {
            eprintln!("epoch {epoch} val_rmse {rmse:.6}");
        }
        if rmse < best_rmse {
            best_rmse = rmse;
            best_epoch = epoch;
            best = model.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    best.meta = TrainMeta {
        epochs_run,
        best_epoch,
        best_val_rmse: best_rmse,
        seed: cfg.seed,
        train_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(best)
}

/// Maturity-routed set of per-subset networks.
#[derive(Debug, Default)]
pub struct Router {
    models: [Option<MlpModel>; 3],
}

impl Router {
    pub fn new() -> Router {
        Router::default()
    }

    pub fn insert(&mut self, subset_id: u8, model: MlpModel) -> crate::Result<()> {
        if !(1..=3).contains(&subset_id) {
            return Err(SabrError::InvalidInput(format!(
                "subset id must be 1..=3, got {subset_id}"
            )));
        }
        self.models[subset_id as usize - 1] = Some(model);
        Ok(())
    }

    pub fn get(&self, subset_id: u8) -> Option<&MlpModel> {
        self.models.get(subset_id as usize - 1)?.as_ref()
    }

    /// Model owning fixing time `t`.
    pub fn model_for(&self, t: f64) -> crate::Result<&MlpModel> {
        let id = crate::dataset::subset_for_maturity(t).ok_or_else(|| {
            SabrError::InvalidInput(format!("no subset covers fixing time {t}"))
        })?;
        self.get(id).ok_or_else(|| {
            SabrError::InvalidInput(format!("no model loaded for subset {id}"))
        })
    }

    /// Predicted shifted-Black vol for scaled parameters at (t, k_hat).
    pub fn vol(
        &self,
        alpha_hat: f64,
        beta: f64,
        rho: f64,
        nu: f64,
        t: f64,
        k_hat: f64,
    ) -> crate::Result<f64> {
        self.model_for(t)?
            .forward(&[alpha_hat, beta, rho, nu, t, k_hat])
    }
}

//! Dense layers, activations and a central-difference gradient checker
//! shared by the neural recommenders.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed through the activation output. Relu picks 0 at
    /// the kink, matching `apply`'s subgradient there.
    #[inline]
    pub fn slope_at_output(&self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

/// Fully connected layer, weights stored output-major.
#[derive(Clone, Debug)]
pub struct DenseLayer {
    pub w: Mat,
    pub b: Vec<f64>,
    pub act: Activation,
}

impl DenseLayer {
    /// Normal init scaled by fan-in and fan-out. Relu layers start with a
    /// small positive bias so no unit is born dead when the inputs are near
    /// zero, which would freeze the layer permanently.
    pub fn new(inputs: usize, outputs: usize, act: Activation, rng: &mut ChaCha8Rng) -> Self {
        let std = (2.0 / (inputs + outputs) as f64).sqrt();
        let normal = Normal::new(0.0, std).unwrap();
        let mut w = Mat::zeros(outputs, inputs);
        for v in w.data_mut() {
            *v = normal.sample(rng);
        }
        let bias = if act == Activation::Relu { 0.01 } else { 0.0 };
        DenseLayer {
            w,
            b: vec![bias; outputs],
            act,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.w
            .mat_vec(x)
            .into_iter()
            .zip(&self.b)
            .map(|(z, b)| self.act.apply(z + b))
            .collect()
    }

    /// Propagates `grad_out` (dL/dy for y = forward(x)) backwards:
    /// accumulates parameter gradients into `gw`/`gb` and returns dL/dx.
    pub fn backward(
        &self,
        x: &[f64],
        y: &[f64],
        grad_out: &[f64],
        gw: &mut Mat,
        gb: &mut [f64],
    ) -> Vec<f64> {
        let mut grad_in = vec![0.0; x.len()];
        for (o, (&g, &yo)) in grad_out.iter().zip(y).enumerate() {
            let gz = g * self.act.slope_at_output(yo);
            if gz == 0.0 {
                continue;
            }
            gb[o] += gz;
            let wrow = self.w.row(o);
            let gwrow = gw.row_mut(o);
            for i in 0..x.len() {
                gwrow[i] += gz * x[i];
                grad_in[i] += gz * wrow[i];
            }
        }
        grad_in
    }

    pub fn grad_buffers(&self) -> (Mat, Vec<f64>) {
        (
            Mat::zeros(self.w.n_rows(), self.w.n_cols()),
            vec![0.0; self.b.len()],
        )
    }

    /// SGD step: params -= lr * grads.
    pub fn apply_grads(&mut self, gw: &Mat, gb: &[f64], lr: f64) {
        for (w, g) in self.w.data_mut().iter_mut().zip(gw.data()) {
            *w -= lr * g;
        }
        for (b, g) in self.b.iter_mut().zip(gb) {
            *b -= lr * g;
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub checked: usize,
}

/// Compares analytic gradients against central differences at randomly
/// probed coordinates. `loss` must be a pure function of `params`.
///
/// The relative error uses max(|analytic|, |numeric|) as the scale; when both
/// are below `1e-8` the coordinate counts as exact, since the difference
/// quotient itself is noise at that magnitude.
pub fn gradient_check(
    loss: &mut dyn FnMut(&[f64]) -> f64,
    params: &mut [f64],
    analytic: &[f64],
    probes: usize,
    seed: u64,
) -> GradCheckReport {
    assert_eq!(params.len(), analytic.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_err = 0.0f64;
    let mut checked = 0;
    for _ in 0..probes.min(params.len() * 4) {
        let idx = rng.gen_range(0..params.len());
        let original = params[idx];
        let h = 1e-5 * original.abs().max(1.0);
        params[idx] = original + h;
        let up = loss(params);
        params[idx] = original - h;
        let down = loss(params);
        params[idx] = original;
        let numeric = (up - down) / (2.0 * h);
        let a = analytic[idx];
        let scale = a.abs().max(numeric.abs());
        if scale > 1e-8 {
            max_rel_err = max_rel_err.max((a - numeric).abs() / scale);
        }
        checked += 1;
    }
    GradCheckReport {
        max_rel_err,
        checked,
    }
}

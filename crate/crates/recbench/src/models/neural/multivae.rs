//! Variational autoencoder over user rows with a multinomial likelihood.
//!
//! The encoder maps an L2-normalized, dropout-masked profile to a Gaussian
//! over the latent space; the decoder maps a latent sample back to catalog
//! logits. The loss is the reconstruction term against the raw binary row
//! plus a KL penalty whose weight ramps linearly from 0 to its cap over the
//! first half of all training steps. Ranking uses the mean latent code.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::InteractionMatrix;
use crate::linalg::{matmul, matmul_nt, matmul_tn, Mat};
use crate::models::neural::net::{gradient_check, Activation, DenseLayer, GradCheckReport};
use crate::models::RecommenderModel;

const DROPOUT_KEEP: f64 = 0.5;

#[derive(Clone, Copy, Debug)]
pub struct MultiVaeConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub intermediate: usize,
    pub latent: usize,
    /// Final weight of the KL term.
    pub reg: f64,
}

pub struct MultiVae {
    train: InteractionMatrix,
    enc1: DenseLayer,
    enc2: DenseLayer,
    dec1: DenseLayer,
    dec2: DenseLayer,
    latent: usize,
}

/// KL weight after `step` of `total_steps`: linear ramp to `cap` across the
/// first half, flat afterwards.
pub(crate) fn annealed_beta(step: usize, total_steps: usize, cap: f64) -> f64 {
    let ramp = (total_steps / 2).max(1);
    cap * (step as f64 / ramp as f64).min(1.0)
}

fn forward_batch(layer: &DenseLayer, x: &Mat) -> Mat {
    let mut z = matmul_nt(x, &layer.w);
    for r in 0..z.n_rows() {
        let row = z.row_mut(r);
        for (v, b) in row.iter_mut().zip(&layer.b) {
            *v = layer.act.apply(*v + b);
        }
    }
    z
}

/// dL/dz from dL/dy through the activation, elementwise.
fn through_activation(layer: &DenseLayer, y: &Mat, dy: &Mat) -> Mat {
    let mut dz = dy.clone();
    for r in 0..dz.n_rows() {
        let yr = y.row(r);
        let dr = dz.row_mut(r);
        for c in 0..dr.len() {
            dr[c] *= layer.act.slope_at_output(yr[c]);
        }
    }
    dz
}

fn column_sums(m: &Mat) -> Vec<f64> {
    let mut out = vec![0.0; m.n_cols()];
    for r in 0..m.n_rows() {
        for (o, v) in out.iter_mut().zip(m.row(r)) {
            *o += v;
        }
    }
    out
}

pub(crate) struct VaeGrads {
    enc1: (Mat, Vec<f64>),
    enc2: (Mat, Vec<f64>),
    dec1: (Mat, Vec<f64>),
    dec2: (Mat, Vec<f64>),
}

impl MultiVae {
    fn normalized_rows(&self, users: &[u32]) -> Mat {
        let n_items = self.train.n_items();
        let rows: Vec<Vec<f64>> = users
            .iter()
            .map(|&u| {
                let profile = self.train.row(u);
                let mut x = vec![0.0; n_items];
                if !profile.is_empty() {
                    let norm = (profile.len() as f64).sqrt();
                    for &i in profile {
                        x[i as usize] = 1.0 / norm;
                    }
                }
                x
            })
            .collect();
        Mat::from_rows(&rows)
    }

    /// Mean loss over the batch plus parameter gradients. `mask` (0/1 over
    /// the input) and `eps` (standard normal, batch x latent) are passed in
    /// so the whole computation is a pure function of the parameters.
    pub(crate) fn batch_loss_and_grads(
        &self,
        users: &[u32],
        mask: &Mat,
        eps: &Mat,
        beta: f64,
    ) -> (f64, VaeGrads) {
        let latent = self.latent;
        let batch = users.len();
        let scale = 1.0 / batch as f64;

        let xn = self.normalized_rows(users);
        let mut xd = xn.clone();
        for r in 0..batch {
            let mr = mask.row(r);
            let xr = xd.row_mut(r);
            for c in 0..xr.len() {
                xr[c] *= mr[c] / DROPOUT_KEEP;
            }
        }

        let h1 = forward_batch(&self.enc1, &xd);
        let s = forward_batch(&self.enc2, &h1);
        let mut z = Mat::zeros(batch, latent);
        for r in 0..batch {
            let sr = s.row(r);
            let er = eps.row(r);
            let zr = z.row_mut(r);
            for c in 0..latent {
                let sigma = (0.5 * sr[latent + c]).exp();
                zr[c] = sr[c] + er[c] * sigma;
            }
        }
        let h3 = forward_batch(&self.dec1, &z);
        let logits = forward_batch(&self.dec2, &h3);

        let mut loss = 0.0;
        let mut dlogits = Mat::zeros(batch, logits.n_cols());
        for (r, &u) in users.iter().enumerate() {
            let lr = logits.row(r);
            let max = lr.iter().fold(f64::MIN, |m, &v| m.max(v));
            let sum_exp: f64 = lr.iter().map(|&v| (v - max).exp()).sum();
            let lse = max + sum_exp.ln();

            let profile = self.train.row(u);
            let n_pos = profile.len() as f64;
            let mut nll = 0.0;
            for &i in profile {
                nll += lse - lr[i as usize];
            }
            let sr = s.row(r);
            let mut kl = 0.0;
            for c in 0..latent {
                let (mu, lv) = (sr[c], sr[latent + c]);
                kl += -0.5 * (1.0 + lv - mu * mu - lv.exp());
            }
            loss += scale * (nll + beta * kl);

            let dr = dlogits.row_mut(r);
            for c in 0..dr.len() {
                dr[c] = scale * n_pos * ((lr[c] - max).exp() / sum_exp);
            }
            for &i in profile {
                dr[i as usize] -= scale;
            }
        }

        let g_dec2 = (matmul_tn(&dlogits, &h3), column_sums(&dlogits));
        let dh3 = matmul(&dlogits, &self.dec2.w);
        let dz3 = through_activation(&self.dec1, &h3, &dh3);
        let g_dec1 = (matmul_tn(&dz3, &z), column_sums(&dz3));
        let dz = matmul(&dz3, &self.dec1.w);

        let mut ds = Mat::zeros(batch, 2 * latent);
        for r in 0..batch {
            let sr = s.row(r);
            let er = eps.row(r);
            let dzr = dz.row(r);
            let dsr = ds.row_mut(r);
            for c in 0..latent {
                let (mu, lv) = (sr[c], sr[latent + c]);
                dsr[c] = dzr[c] + scale * beta * mu;
                dsr[latent + c] = dzr[c] * er[c] * 0.5 * (0.5 * lv).exp()
                    + scale * beta * 0.5 * (lv.exp() - 1.0);
            }
        }

        let g_enc2 = (matmul_tn(&ds, &h1), column_sums(&ds));
        let dh1 = matmul(&ds, &self.enc2.w);
        let dz1 = through_activation(&self.enc1, &h1, &dh1);
        let g_enc1 = (matmul_tn(&dz1, &xd), column_sums(&dz1));

        (
            loss,
            VaeGrads {
                enc1: g_enc1,
                enc2: g_enc2,
                dec1: g_dec1,
                dec2: g_dec2,
            },
        )
    }

    fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in [&self.enc1, &self.enc2, &self.dec1, &self.dec2] {
            out.extend_from_slice(l.w.data());
            out.extend_from_slice(&l.b);
        }
        out
    }

    fn load_flat_params(&mut self, flat: &[f64]) {
        let mut pos = 0;
        for l in [
            &mut self.enc1,
            &mut self.enc2,
            &mut self.dec1,
            &mut self.dec2,
        ] {
            let n = l.w.data().len();
            l.w.data_mut().copy_from_slice(&flat[pos..pos + n]);
            pos += n;
            let n = l.b.len();
            l.b.copy_from_slice(&flat[pos..pos + n]);
            pos += n;
        }
        assert_eq!(pos, flat.len());
    }

    fn flat_grads(grads: &VaeGrads) -> Vec<f64> {
        let mut out = Vec::new();
        for (gw, gb) in [&grads.enc1, &grads.enc2, &grads.dec1, &grads.dec2] {
            out.extend_from_slice(gw.data());
            out.extend_from_slice(gb);
        }
        out
    }

    /// Checks the analytic batch gradients against central differences on a
    /// freshly initialized model, with dropout mask and latent noise frozen
    /// so the loss is a pure function of the parameters. The KL weight is
    /// held at `cfg.reg`.
    pub fn check_gradients(
        train: &InteractionMatrix,
        cfg: &MultiVaeConfig,
        seed: u64,
    ) -> GradCheckReport {
        let init = MultiVaeConfig { epochs: 0, ..*cfg };
        let model = MultiVae::fit(train, &init, seed);
        let users: Vec<u32> =
            (0..train.n_users() as u32).filter(|&u| !train.row(u).is_empty()).collect();
        assert!(!users.is_empty(), "empty training matrix");

        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let mut mask = Mat::zeros(users.len(), train.n_items());
        for v in mask.data_mut() {
            *v = if rng.gen_bool(DROPOUT_KEEP) { 1.0 } else { 0.0 };
        }
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut eps = Mat::zeros(users.len(), cfg.latent);
        for v in eps.data_mut() {
            *v = normal.sample(&mut rng);
        }
        let beta = cfg.reg;

        let (_, grads) = model.batch_loss_and_grads(&users, &mask, &eps, beta);
        let analytic = MultiVae::flat_grads(&grads);
        let mut params = model.flat_params();
        let mut probe = MultiVae {
            train: train.clone(),
            enc1: model.enc1.clone(),
            enc2: model.enc2.clone(),
            dec1: model.dec1.clone(),
            dec2: model.dec2.clone(),
            latent: model.latent,
        };
        gradient_check(
            &mut |p| {
                probe.load_flat_params(p);
                probe.batch_loss_and_grads(&users, &mask, &eps, beta).0
            },
            &mut params,
            &analytic,
            200,
            seed.wrapping_add(2),
        )
    }

    pub fn fit(train: &InteractionMatrix, cfg: &MultiVaeConfig, seed: u64) -> MultiVae {
        assert!(cfg.latent >= 1 && cfg.intermediate >= 1);
        let n_items = train.n_items();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = MultiVae {
            train: train.clone(),
            enc1: DenseLayer::new(n_items, cfg.intermediate, Activation::Tanh, &mut rng),
            enc2: DenseLayer::new(
                cfg.intermediate,
                2 * cfg.latent,
                Activation::Identity,
                &mut rng,
            ),
            dec1: DenseLayer::new(cfg.latent, cfg.intermediate, Activation::Tanh, &mut rng),
            dec2: DenseLayer::new(cfg.intermediate, n_items, Activation::Identity, &mut rng),
            latent: cfg.latent,
        };

        let mut order: Vec<u32> = (0..train.n_users() as u32).collect();
        let steps_per_epoch = order.len().div_ceil(cfg.batch_size);
        let total_steps = steps_per_epoch * cfg.epochs;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut step = 0;
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(cfg.batch_size) {
                let beta = annealed_beta(step, total_steps, cfg.reg);
                let mut mask = Mat::zeros(chunk.len(), n_items);
                for v in mask.data_mut() {
                    *v = if rng.gen_bool(DROPOUT_KEEP) { 1.0 } else { 0.0 };
                }
                let mut eps = Mat::zeros(chunk.len(), cfg.latent);
                for v in eps.data_mut() {
                    *v = normal.sample(&mut rng);
                }
                let (_, grads) = model.batch_loss_and_grads(chunk, &mask, &eps, beta);
                let lr = cfg.learning_rate;
                model.enc1.apply_grads(&grads.enc1.0, &grads.enc1.1, lr);
                model.enc2.apply_grads(&grads.enc2.0, &grads.enc2.1, lr);
                model.dec1.apply_grads(&grads.dec1.0, &grads.dec1.1, lr);
                model.dec2.apply_grads(&grads.dec2.0, &grads.dec2.1, lr);
                step += 1;
            }
        }
        model
    }
}

impl RecommenderModel for MultiVae {
    fn name(&self) -> &'static str {
        "MultiVAE"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        // deterministic path: no dropout, latent code at the mean
        let profile = self.train.row(user);
        let mut x = vec![0.0; self.train.n_items()];
        if !profile.is_empty() {
            let norm = (profile.len() as f64).sqrt();
            for &i in profile {
                x[i as usize] = 1.0 / norm;
            }
        }
        let h1 = self.enc1.forward(&x);
        let s = self.enc2.forward(&h1);
        let mu = &s[..self.latent];
        let h3 = self.dec1.forward(mu);
        self.dec2.forward(&h3)
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}

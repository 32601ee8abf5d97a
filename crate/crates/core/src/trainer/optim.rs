use serde::{Deserialize, Serialize};

use crate::model::Params;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OptimizerConfig {
    Sgd,
    Adam {
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_beta1() -> f64 {
    0.9
}

fn default_beta2() -> f64 {
    0.999
}

fn default_eps() -> f64 {
    1e-8
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Adam {
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
        }
    }
}

/// Optimizer with its running state.
#[derive(Clone, Debug)]
pub struct Optimizer {
    pub config: OptimizerConfig,
    pub lr: f64,
    pub steps: u64,
    moments: Option<(Params, Params)>,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig, lr: f64) -> Self {
        Optimizer {
            config,
            lr,
            steps: 0,
            moments: None,
        }
    }

    /// First and second Adam moments, once a step has been taken.
    pub fn moments(&self) -> Option<(&Params, &Params)> {
        self.moments.as_ref().map(|(m, v)| (m, v))
    }

    pub fn step(&mut self, params: &mut Params, grads: &Params) -> Result<()> {
        params.check_congruent(grads)?;
        self.steps += 1;
        match self.config {
            OptimizerConfig::Sgd => {
                for (w, g) in params.tensors_mut().into_iter().zip(grads.tensors()) {
                    for (wi, gi) in w.as_mut_slice().iter_mut().zip(g.as_slice()) {
                        *wi -= self.lr * gi;
                    }
                }
            }
            OptimizerConfig::Adam { beta1, beta2, eps } => {
                let (m, v) = self
                    .moments
                    .get_or_insert_with(|| (params.zeros_like(), params.zeros_like()));
                let t = self.steps as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                let tensors = params
                    .tensors_mut()
                    .into_iter()
                    .zip(grads.tensors())
                    .zip(m.tensors_mut())
                    .zip(v.tensors_mut());
                for (((w, g), m), v) in tensors {
                    let it = w
                        .as_mut_slice()
                        .iter_mut()
                        .zip(g.as_slice())
                        .zip(m.as_mut_slice())
                        .zip(v.as_mut_slice());
                    for (((wi, &gi), mi), vi) in it {
                        *mi = beta1 * *mi + (1.0 - beta1) * gi;
                        *vi = beta2 * *vi + (1.0 - beta2) * gi * gi;
                        *wi -= self.lr * (*mi / c1) / ((*vi / c2).sqrt() + eps);
                    }
                }
            }
        }
        Ok(())
    }
}

//! Parameter containers, initialization, and the flat parameter layout.
//!
//! The optimizer and the checkpoint format both see the model as one flat
//! `f64` vector. The layout is fixed: per-point layers, classifier layers,
//! input transform predictor, feature transform predictor; within a
//! predictor, point layers, then fully-connected layers, then the output
//! layer; within a layer, weights row-major (input-major) then biases.
//! Initialization draws follow the same order, so equal seeds give equal
//! models and a variant with transforms disabled shares its main-stack
//! initialization with one that has them enabled.

use crate::error::{Error, Result};
use crate::numcore::{LinearLayer, Tensor2D};
use crate::rng::DetRng;

use super::{ModelSpec, TNetConfig, Variant};

/// One transform predictor: a small PointNet that regresses a `dim × dim`
/// matrix from the cloud it is about to transform.
#[derive(Clone, Debug, PartialEq)]
pub struct TNetWeights {
    pub dim: usize,
    pub point_layers: Vec<LinearLayer<f64>>,
    pub fc_layers: Vec<LinearLayer<f64>>,
    /// Maps the last FC activation to the flattened matrix; initialized to
    /// zero weights and an identity-matrix bias so training starts from the
    /// identity transform.
    pub out_layer: LinearLayer<f64>,
}

/// All learnable parameters plus the spec that shaped them.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelWeights {
    pub spec: ModelSpec,
    pub per_point: Vec<LinearLayer<f64>>,
    pub classifier: Vec<LinearLayer<f64>>,
    pub input_tnet: Option<TNetWeights>,
    pub feature_tnet: Option<TNetWeights>,
}

fn validate_widths(context: &str, widths: &[usize]) -> Result<()> {
    if widths.is_empty() {
        return Err(Error::InvalidParam(format!("{context} must not be empty")));
    }
    if widths.iter().any(|&w| w == 0) {
        return Err(Error::InvalidParam(format!("{context} must be positive: {widths:?}")));
    }
    Ok(())
}

fn validate_spec(spec: &ModelSpec) -> Result<()> {
    validate_widths("per_point_widths", &spec.per_point_widths)?;
    validate_widths("classifier_widths", &spec.classifier_widths)?;
    if spec.num_classes() < 2 {
        return Err(Error::InvalidParam("need at least two classes".into()));
    }
    if let Variant::BaselineTNet(cfg) = &spec.variant {
        if cfg.input_transform || cfg.feature_transform {
            validate_widths("tnet point_widths", &cfg.point_widths)?;
            validate_widths("tnet fc_widths", &cfg.fc_widths)?;
        }
        if cfg.feature_transform && spec.per_point_widths.len() < 3 {
            return Err(Error::InvalidParam(
                "feature transform sits after the second per-point layer; need at least 3".into(),
            ));
        }
    }
    Ok(())
}

/// Uniform `(-1/sqrt(fan_in), 1/sqrt(fan_in))` weights, zero biases.
fn init_layer(in_dim: usize, out_dim: usize, rng: &mut DetRng) -> LinearLayer<f64> {
    let bound = 1.0 / (in_dim as f64).sqrt();
    let data: Vec<f64> = (0..in_dim * out_dim).map(|_| rng.uniform_in(-bound, bound)).collect();
    let weights = Tensor2D::from_vec(in_dim, out_dim, data).expect("sized data");
    LinearLayer::new(weights, vec![0.0; out_dim]).expect("sized bias")
}

fn init_chain(mut in_dim: usize, widths: &[usize], rng: &mut DetRng) -> Vec<LinearLayer<f64>> {
    let mut layers = Vec::with_capacity(widths.len());
    for &w in widths {
        layers.push(init_layer(in_dim, w, rng));
        in_dim = w;
    }
    layers
}

fn init_tnet(dim: usize, cfg: &TNetConfig, rng: &mut DetRng) -> TNetWeights {
    let point_layers = init_chain(dim, &cfg.point_widths, rng);
    let fc_layers = init_chain(*cfg.point_widths.last().expect("nonempty"), &cfg.fc_widths, rng);
    let fc_out = *cfg.fc_widths.last().expect("nonempty");
    let mut out_layer = LinearLayer::zeros(fc_out, dim * dim);
    for i in 0..dim {
        out_layer.bias[i * dim + i] = 1.0;
    }
    TNetWeights {
        dim,
        point_layers,
        fc_layers,
        out_layer,
    }
}

/// Builds a freshly initialized model for `spec`, all randomness taken from
/// `seed`.
pub fn build_model(spec: &ModelSpec, seed: u64) -> Result<ModelWeights> {
    validate_spec(spec)?;
    let mut rng = DetRng::seed(seed);
    let per_point = init_chain(3, &spec.per_point_widths, &mut rng);
    let classifier = init_chain(spec.feature_length(), &spec.classifier_widths, &mut rng);
    let (input_tnet, feature_tnet) = match &spec.variant {
        Variant::Directional => (None, None),
        Variant::BaselineTNet(cfg) => {
            let input = cfg.input_transform.then(|| init_tnet(3, cfg, &mut rng));
            let feature = cfg
                .feature_transform
                .then(|| init_tnet(spec.per_point_widths[1], cfg, &mut rng));
            (input, feature)
        }
    };
    Ok(ModelWeights {
        spec: spec.clone(),
        per_point,
        classifier,
        input_tnet,
        feature_tnet,
    })
}

fn zero_chain(mut in_dim: usize, widths: &[usize]) -> Vec<LinearLayer<f64>> {
    let mut layers = Vec::with_capacity(widths.len());
    for &w in widths {
        layers.push(LinearLayer::zeros(in_dim, w));
        in_dim = w;
    }
    layers
}

impl ModelWeights {
    /// Same shapes as `build_model`, every parameter zero. Gradient
    /// accumulators start here.
    pub fn zeros(spec: &ModelSpec) -> Result<ModelWeights> {
        validate_spec(spec)?;
        let zero_tnet = |dim: usize, cfg: &TNetConfig| TNetWeights {
            dim,
            point_layers: zero_chain(dim, &cfg.point_widths),
            fc_layers: zero_chain(*cfg.point_widths.last().expect("nonempty"), &cfg.fc_widths),
            out_layer: LinearLayer::zeros(*cfg.fc_widths.last().expect("nonempty"), dim * dim),
        };
        let (input_tnet, feature_tnet) = match &spec.variant {
            Variant::Directional => (None, None),
            Variant::BaselineTNet(cfg) => (
                cfg.input_transform.then(|| zero_tnet(3, cfg)),
                cfg.feature_transform.then(|| zero_tnet(spec.per_point_widths[1], cfg)),
            ),
        };
        Ok(ModelWeights {
            spec: spec.clone(),
            per_point: zero_chain(3, &spec.per_point_widths),
            classifier: zero_chain(spec.feature_length(), &spec.classifier_widths),
            input_tnet,
            feature_tnet,
        })
    }

    /// All layers in flat-layout order.
    pub fn layer_refs(&self) -> Vec<&LinearLayer<f64>> {
        let mut layers = Vec::new();
        layers.extend(self.per_point.iter());
        layers.extend(self.classifier.iter());
        for t in [&self.input_tnet, &self.feature_tnet].into_iter().flatten() {
            layers.extend(t.point_layers.iter());
            layers.extend(t.fc_layers.iter());
            layers.push(&t.out_layer);
        }
        layers
    }

    /// Visits every layer mutably in flat-layout order.
    pub fn for_each_layer_mut<F: FnMut(&mut LinearLayer<f64>)>(&mut self, mut f: F) {
        for l in &mut self.per_point {
            f(l);
        }
        for l in &mut self.classifier {
            f(l);
        }
        for t in [&mut self.input_tnet, &mut self.feature_tnet].into_iter().flatten() {
            for l in &mut t.point_layers {
                f(l);
            }
            for l in &mut t.fc_layers {
                f(l);
            }
            f(&mut t.out_layer);
        }
    }

    pub fn param_count(&self) -> usize {
        self.layer_refs().iter().map(|l| l.param_count()).sum()
    }

    /// Copies all parameters into one vector in flat-layout order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        for l in self.layer_refs() {
            flat.extend_from_slice(l.weights.data());
            flat.extend_from_slice(&l.bias);
        }
        flat
    }

    /// Overwrites all parameters from a flat vector.
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        let expected = self.param_count();
        if flat.len() != expected {
            return Err(Error::LengthMismatch {
                context: "flat parameter vector",
                expected,
                found: flat.len(),
            });
        }
        let mut offset = 0;
        self.for_each_layer_mut(|l| {
            let w = l.weights.data_mut();
            w.copy_from_slice(&flat[offset..offset + w.len()]);
            offset += w.len();
            let b = l.bias.len();
            l.bias.copy_from_slice(&flat[offset..offset + b]);
            offset += b;
        });
        Ok(())
    }

    /// Accumulates `other` into `self`, layer by layer. Shapes must match.
    pub fn add_assign(&mut self, other: &ModelWeights) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidParam("cannot add weights of different specs".into()));
        }
        let others = other.layer_refs();
        let mut i = 0;
        let mut status = Ok(());
        self.for_each_layer_mut(|l| {
            if status.is_ok() {
                if let Err(e) = l.weights.add_assign(&others[i].weights) {
                    status = Err(e);
                    return;
                }
                for (b, o) in l.bias.iter_mut().zip(&others[i].bias) {
                    *b += o;
                }
            }
            i += 1;
        });
        status
    }
}

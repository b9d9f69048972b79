//! Fully connected feed-forward networks with piecewise-linear activations.
//!
//! A network with `L` layers alternates affine maps and activations:
//! the activation is applied after layers `1..L-1` and never after the
//! output layer.
//!
//! Parameters are laid out in one canonical order, used by [`ParamVector`],
//! the samplers and the serialization format alike: layer by layer, the
//! weight matrix row-major (`outputs × inputs`) followed by the bias vector.
//! This order is frozen; seeds reproduce across versions only as long as it
//! stays that way.

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{Error, Result};

/// Layer widths of a network, without its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkShape {
    pub input_dim: usize,
    /// `n_1, …, n_L`; the last entry is the output dimension.
    pub widths: Vec<usize>,
}

impl NetworkShape {
    pub fn new(input_dim: usize, widths: Vec<usize>) -> Result<Self> {
        let shape = NetworkShape { input_dim, widths };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Shape("input dimension must be positive".into()));
        }
        if self.widths.is_empty() {
            return Err(Error::Shape("a network needs at least one layer".into()));
        }
        if self.widths.contains(&0) {
            return Err(Error::Shape(format!("zero-width layer in {:?}", self.widths)));
        }
        Ok(())
    }

    /// Number of layers `L` (the input layer is not counted).
    pub fn depth(&self) -> usize {
        self.widths.len()
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("validated shape")
    }

    /// `n_1, …, n_{L-1}`.
    pub fn hidden_widths(&self) -> &[usize] {
        &self.widths[..self.widths.len() - 1]
    }

    /// Total number of hidden units.
    pub fn hidden_units(&self) -> usize {
        self.hidden_widths().iter().sum()
    }

    /// `(inputs, outputs)` of every layer.
    pub fn layer_dims(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        std::iter::once(self.input_dim).chain(self.widths.iter().copied()).zip(self.widths.iter().copied())
    }

    /// Total parameter count `M`.
    pub fn param_count(&self) -> usize {
        self.layer_dims().map(|(i, o)| o * i + o).sum()
    }
}

/// Flat parameter vector in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// One affine map `z = W x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    pub fn new(inputs: usize, outputs: usize, weights: Vec<f64>, biases: Vec<f64>) -> Result<Self> {
        if weights.len() != inputs * outputs {
            return Err(Error::Shape(format!("weight matrix must be {outputs}x{inputs}, got {} entries", weights.len())));
        }
        if biases.len() != outputs {
            return Err(Error::Shape(format!("bias vector must have {outputs} entries, got {}", biases.len())));
        }
        Ok(Layer { inputs, outputs, weights, biases })
    }

    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer { inputs, outputs, weights: vec![0.0; inputs * outputs], biases: vec![0.0; outputs] }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    #[inline]
    pub fn weight(&self, out: usize, inp: usize) -> f64 {
        self.weights[out * self.inputs + inp]
    }

    #[inline]
    pub fn set_weight(&mut self, out: usize, inp: usize, value: f64) {
        self.weights[out * self.inputs + inp] = value;
    }

    pub fn set_bias(&mut self, out: usize, value: f64) {
        self.biases[out] = value;
    }

    #[inline]
    pub fn row(&self, out: usize) -> &[f64] {
        &self.weights[out * self.inputs..(out + 1) * self.inputs]
    }

    #[inline]
    fn apply_into(&self, x: &[f64], z: &mut Vec<f64>) {
        z.clear();
        z.extend((0..self.outputs).map(|j| dot(self.row(j), x) + self.biases[j]));
    }
}

#[inline]
pub(crate) fn dot(row: &[f64], x: &[f64]) -> f64 {
    row.iter().zip(x).fold(0.0, |acc, (w, v)| acc + w * v)
}

/// A feed-forward network `F_θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDocument", into = "NetworkDocument")]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
    activation: Activation,
}

impl Network {
    pub fn new(input_dim: usize, layers: Vec<Layer>, activation: Activation) -> Result<Self> {
        if input_dim == 0 || layers.is_empty() {
            return Err(Error::Shape("network needs a positive input dimension and at least one layer".into()));
        }
        let mut expected = input_dim;
        for (l, layer) in layers.iter().enumerate() {
            if layer.inputs != expected {
                return Err(Error::Shape(format!(
                    "layer {} expects {} inputs but the previous layer has {} outputs",
                    l + 1,
                    layer.inputs,
                    expected
                )));
            }
            if layer.outputs == 0 {
                return Err(Error::Shape(format!("layer {} has zero width", l + 1)));
            }
            expected = layer.outputs;
        }
        Ok(Network { input_dim, layers, activation })
    }

    /// Unpack a canonical parameter vector.
    pub fn from_params(shape: &NetworkShape, activation: Activation, params: &ParamVector) -> Result<Self> {
        shape.validate()?;
        if params.len() != shape.param_count() {
            return Err(Error::Shape(format!("parameter vector has {} entries, shape needs {}", params.len(), shape.param_count())));
        }
        let mut rest = params.as_slice();
        let mut layers = Vec::with_capacity(shape.depth());
        for (i, o) in shape.layer_dims() {
            let (w, tail) = rest.split_at(i * o);
            let (b, tail) = tail.split_at(o);
            layers.push(Layer::new(i, o, w.to_vec(), b.to_vec())?);
            rest = tail;
        }
        Network::new(shape.input_dim, layers, activation)
    }

    /// Pack into canonical order.
    pub fn to_params(&self) -> ParamVector {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        ParamVector(out)
    }

    pub fn shape(&self) -> NetworkShape {
        NetworkShape { input_dim: self.input_dim, widths: self.layers.iter().map(|l| l.outputs).collect() }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").outputs
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn activation(&self) -> &Activation {
        &self.activation
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.outputs).collect()
    }

    /// Evaluate `F_θ(x)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::Shape(format!("input has length {}, network expects {}", x.len(), self.input_dim)));
        }
        let mut scratch = Scratch::default();
        Ok(self.forward_with(x, &mut scratch).to_vec())
    }

    /// Evaluate many inputs stored row-major (`points × input_dim`); the
    /// result is row-major `points × output_dim`.
    pub fn forward_batch(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if xs.len() % self.input_dim != 0 {
            return Err(Error::Shape(format!("batch of {} values is not a multiple of the input dimension {}", xs.len(), self.input_dim)));
        }
        let mut scratch = Scratch::default();
        let mut out = Vec::with_capacity(xs.len() / self.input_dim * self.output_dim());
        for x in xs.chunks_exact(self.input_dim) {
            out.extend_from_slice(self.forward_with(x, &mut scratch));
        }
        Ok(out)
    }

    /// Scalar-in, scalar-out evaluation over a list of points.
    pub fn eval_scalar(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if self.input_dim != 1 || self.output_dim() != 1 {
            return Err(Error::Shape(format!("scalar evaluation needs a 1 -> 1 network, got {} -> {}", self.input_dim, self.output_dim())));
        }
        self.forward_batch(xs)
    }

    fn forward_with<'a>(&self, x: &[f64], scratch: &'a mut Scratch) -> &'a [f64] {
        let Scratch { cur, next } = scratch;
        cur.clear();
        cur.extend_from_slice(x);
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            layer.apply_into(cur, next);
            if l < last {
                for v in next.iter_mut() {
                    *v = self.activation.eval(*v);
                }
            }
            std::mem::swap(cur, next);
        }
        cur
    }

    /// The same parameters under a different activation.
    pub fn with_activation(&self, activation: Activation) -> Network {
        Network { activation, ..self.clone() }
    }

    /// `outer ∘ inner`: the output layer of `inner` is fused into the first
    /// layer of `outer`, so the result has `inner.depth() + outer.depth() - 1`
    /// layers. Both must share the activation.
    pub fn compose(outer: &Network, inner: &Network) -> Result<Network> {
        if outer.input_dim != inner.output_dim() {
            return Err(Error::Shape(format!(
                "cannot compose: outer takes {} inputs, inner produces {}",
                outer.input_dim,
                inner.output_dim()
            )));
        }
        if outer.activation != inner.activation {
            return Err(Error::Shape("cannot compose networks with different activations".into()));
        }
        let tail = inner.layers.last().expect("non-empty");
        let head = &outer.layers[0];
        let mut fused = Layer::zeros(tail.inputs, head.outputs);
        for j in 0..head.outputs {
            for i in 0..tail.inputs {
                let w = (0..head.inputs).fold(0.0, |acc, k| acc + head.weight(j, k) * tail.weight(k, i));
                fused.set_weight(j, i, w);
            }
            fused.biases[j] = dot(head.row(j), &tail.biases) + head.biases[j];
        }
        let mut layers: Vec<Layer> = inner.layers[..inner.layers.len() - 1].to_vec();
        layers.push(fused);
        layers.extend_from_slice(&outer.layers[1..]);
        Network::new(inner.input_dim, layers, inner.activation.clone())
    }

    /// Append zero-parameter units so hidden layer `l` has `widths[l]` units.
    /// Zero units output `σ(0)`, so the downstream weights that read them are
    /// zero too and the function is unchanged.
    pub fn pad_hidden_widths(&self, widths: &[usize]) -> Result<Network> {
        let hidden = self.hidden_widths();
        if widths.len() != hidden.len() || widths.iter().zip(&hidden).any(|(w, h)| w < h) {
            return Err(Error::Shape(format!("cannot pad hidden widths {hidden:?} to {widths:?}")));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut prev_in = self.input_dim;
        for (l, layer) in self.layers.iter().enumerate() {
            let outputs = widths.get(l).copied().unwrap_or(layer.outputs);
            let mut padded = Layer::zeros(prev_in, outputs);
            for j in 0..layer.outputs {
                for i in 0..layer.inputs {
                    padded.set_weight(j, i, layer.weight(j, i));
                }
                padded.biases[j] = layer.biases[j];
            }
            layers.push(padded);
            prev_in = outputs;
        }
        Network::new(self.input_dim, layers, self.activation.clone())
    }

    /// Restrict to the line through `base` along coordinate `axis`, giving a
    /// network with a scalar input.
    pub fn restrict_to_axis(&self, base: &[f64], axis: usize) -> Result<Network> {
        if base.len() != self.input_dim || axis >= self.input_dim {
            return Err(Error::Shape(format!(
                "axis restriction needs a base point of length {} and axis < {}",
                self.input_dim, self.input_dim
            )));
        }
        let first = &self.layers[0];
        let mut line = Layer::zeros(1, first.outputs);
        for j in 0..first.outputs {
            line.set_weight(j, 0, first.weight(j, axis));
            let fixed: f64 = (0..first.inputs).filter(|&i| i != axis).map(|i| first.weight(j, i) * base[i]).sum();
            line.biases[j] = first.biases[j] + fixed;
        }
        let mut layers = vec![line];
        layers.extend_from_slice(&self.layers[1..]);
        Network::new(1, layers, self.activation.clone())
    }

    /// Keep only output coordinate `j`.
    pub fn select_output(&self, j: usize) -> Result<Network> {
        let last = self.layers.last().expect("non-empty");
        if j >= last.outputs {
            return Err(Error::Shape(format!("output {j} out of range for {} outputs", last.outputs)));
        }
        let picked = Layer::new(last.inputs, 1, last.row(j).to_vec(), vec![last.biases[j]])?;
        let mut layers = self.layers[..self.layers.len() - 1].to_vec();
        layers.push(picked);
        Network::new(self.input_dim, layers, self.activation.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Network> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

#[derive(Default)]
struct Scratch {
    cur: Vec<f64>,
    next: Vec<f64>,
}

/// On-disk form: nested arrays, layer-major.
#[derive(Serialize, Deserialize)]
struct NetworkDocument {
    input_dim: usize,
    widths: Vec<usize>,
    activation: Activation,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
}

impl From<Network> for NetworkDocument {
    fn from(net: Network) -> Self {
        NetworkDocument {
            input_dim: net.input_dim,
            widths: net.layers.iter().map(|l| l.outputs).collect(),
            weights: net.layers.iter().map(|l| l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect()).collect(),
            biases: net.layers.iter().map(|l| l.biases.clone()).collect(),
            activation: net.activation,
        }
    }
}

impl TryFrom<NetworkDocument> for Network {
    type Error = Error;

    fn try_from(doc: NetworkDocument) -> Result<Network> {
        let shape = NetworkShape::new(doc.input_dim, doc.widths)?;
        if doc.weights.len() != shape.depth() || doc.biases.len() != shape.depth() {
            return Err(Error::Shape(format!(
                "document lists {} widths but {} weight and {} bias layers",
                shape.depth(),
                doc.weights.len(),
                doc.biases.len()
            )));
        }
        let mut layers = Vec::with_capacity(shape.depth());
        for (((i, o), rows), biases) in shape.layer_dims().zip(doc.weights).zip(doc.biases) {
            if rows.len() != o || rows.iter().any(|r| r.len() != i) {
                return Err(Error::Shape(format!("weight matrix must be {o}x{i}")));
            }
            layers.push(Layer::new(i, o, rows.concat(), biases)?);
        }
        Network::new(shape.input_dim, layers, doc.activation)
    }
}

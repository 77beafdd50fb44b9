//! Networks evaluated from a flat weight vector.
//!
//! Three architectures share one parameter encoding scheme:
//!
//! * `mrnn`: two hidden layers, each with its own Elman context layer.
//!   A hidden neuron sums two separately activated terms,
//!   `h1_j = f(sum_i v1_ji x_i + b1_j) + f(sum_l u1_jl ctx1_l)`, and the
//!   second layer does the same over `h1` and `ctx2`. The output is
//!   `f(sum_g w_kg h2_g + b_k)`. Because of the two-term sum every hidden
//!   activation lies in `(0, 2)`.
//! * `mlp`: one sigmoid hidden layer, stateless.
//! * `cmlp`: the `mlp` plus direct input-to-output shortcut weights.
//!
//! Weight matrices are stored row-major by destination neuron: the weight
//! from source `i` into neuron `j` sits at `j * sources + i` inside its
//! segment. Segment order is listed in [`WeightLayout`].

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("weight vector has length {actual}, layout needs {expected}")]
    Layout { expected: usize, actual: usize },
    #[error("{what} has length {actual}, expected {expected}")]
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("mse needs at least one value")]
    Empty,
}

pub type Result<T> = std::result::Result<T, NetworkError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Mrnn,
    Mlp,
    Cmlp,
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkKind::Mrnn => "mrnn",
            NetworkKind::Mlp => "mlp",
            NetworkKind::Cmlp => "cmlp",
        })
    }
}

impl FromStr for NetworkKind {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mrnn" => Ok(NetworkKind::Mrnn),
            "mlp" => Ok(NetworkKind::Mlp),
            "cmlp" => Ok(NetworkKind::Cmlp),
            other => Err(NetworkError::Topology(format!(
                "unknown network kind `{other}`"
            ))),
        }
    }
}

/// Activation of the first (input-side) term of each hidden neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HiddenActivation {
    #[default]
    Sigmoid,
    /// Softmax across the layer's input-side nets.
    Softmax,
}

impl fmt::Display for HiddenActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HiddenActivation::Sigmoid => "sigmoid",
            HiddenActivation::Softmax => "softmax",
        })
    }
}

impl FromStr for HiddenActivation {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sigmoid" => Ok(HiddenActivation::Sigmoid),
            "softmax" => Ok(HiddenActivation::Softmax),
            other => Err(NetworkError::Topology(format!(
                "unknown activation `{other}`"
            ))),
        }
    }
}

/// Architecture descriptor.
///
/// For `mrnn`, `hidden` holds `[h1, h2]` and the context layers have the
/// same sizes. For `mlp` and `cmlp`, `hidden` holds `[h]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    pub kind: NetworkKind,
    pub inputs: usize,
    pub hidden: Vec<usize>,
    pub outputs: usize,
    pub activation: HiddenActivation,
}

impl Topology {
    pub fn mrnn(inputs: usize, h1: usize, h2: usize, outputs: usize) -> Result<Self> {
        Self::mrnn_with_contexts(inputs, h1, h1, h2, h2, outputs)
    }

    /// Context sizes must equal their hidden layer sizes.
    pub fn mrnn_with_contexts(
        inputs: usize,
        h1: usize,
        c1: usize,
        h2: usize,
        c2: usize,
        outputs: usize,
    ) -> Result<Self> {
        if c1 != h1 || c2 != h2 {
            return Err(NetworkError::Topology(format!(
                "context layers copy their hidden layers: got {h1}-{c1}, {h2}-{c2}"
            )));
        }
        Self::build(NetworkKind::Mrnn, inputs, vec![h1, h2], outputs)
    }

    pub fn mlp(inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        Self::build(NetworkKind::Mlp, inputs, vec![hidden], outputs)
    }

    pub fn cmlp(inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        Self::build(NetworkKind::Cmlp, inputs, vec![hidden], outputs)
    }

    fn build(kind: NetworkKind, inputs: usize, hidden: Vec<usize>, outputs: usize) -> Result<Self> {
        let topology = Self {
            kind,
            inputs,
            hidden,
            outputs,
            activation: HiddenActivation::Sigmoid,
        };
        topology.validate()?;
        Ok(topology)
    }

    pub fn with_activation(mut self, activation: HiddenActivation) -> Self {
        self.activation = activation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let expected_hidden = match self.kind {
            NetworkKind::Mrnn => 2,
            NetworkKind::Mlp | NetworkKind::Cmlp => 1,
        };
        if self.hidden.len() != expected_hidden {
            return Err(NetworkError::Topology(format!(
                "{} takes {expected_hidden} hidden layer size(s), got {}",
                self.kind,
                self.hidden.len()
            )));
        }
        if self.inputs == 0 || self.outputs == 0 || self.hidden.contains(&0) {
            return Err(NetworkError::Topology(
                "all layer sizes must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Context layer sizes (empty for stateless kinds).
    pub fn context_sizes(&self) -> Vec<usize> {
        match self.kind {
            NetworkKind::Mrnn => self.hidden.clone(),
            NetworkKind::Mlp | NetworkKind::Cmlp => Vec::new(),
        }
    }

    /// Length of the flat weight vector.
    pub fn dimension(&self) -> usize {
        dimension(self)
    }
}

impl fmt::Display for Topology {
    /// `mrnn` renders as `18,10-10,10-10,1`; the others as `18,26,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NetworkKind::Mrnn => write!(
                f,
                "{},{h1}-{h1},{h2}-{h2},{}",
                self.inputs,
                self.outputs,
                h1 = self.hidden[0],
                h2 = self.hidden[1]
            ),
            NetworkKind::Mlp | NetworkKind::Cmlp => {
                write!(f, "{},{},{}", self.inputs, self.hidden[0], self.outputs)
            }
        }
    }
}

/// Number of trainable parameters.
///
/// `mrnn`: `(i+1)h1 + (h1+1)h2 + (h2+1)o + c1 h1 + c2 h2`;
/// `mlp`: `(i+1)h + (h+1)o`; `cmlp`: `mlp + i o`.
pub fn dimension(topology: &Topology) -> usize {
    let (i, o) = (topology.inputs, topology.outputs);
    match topology.kind {
        NetworkKind::Mrnn => {
            let (h1, h2) = (topology.hidden[0], topology.hidden[1]);
            let (c1, c2) = (h1, h2);
            (i + 1) * h1 + (h1 + 1) * h2 + (h2 + 1) * o + c1 * h1 + c2 * h2
        }
        NetworkKind::Mlp => {
            let h = topology.hidden[0];
            (i + 1) * h + (h + 1) * o
        }
        NetworkKind::Cmlp => {
            let h = topology.hidden[0];
            (i + 1) * h + (h + 1) * o + i * o
        }
    }
}

/// Parameter groups, named by what they connect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamGroup {
    InputToHidden1,
    Hidden1Bias,
    Context1ToHidden1,
    Hidden1ToHidden2,
    Hidden2Bias,
    Context2ToHidden2,
    Hidden2ToOutput,
    InputToHidden,
    HiddenBias,
    HiddenToOutput,
    OutputBias,
    InputToOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub group: ParamGroup,
    pub offset: usize,
    /// Destination neurons.
    pub rows: usize,
    /// Source neurons (1 for biases).
    pub cols: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Where each parameter group lives in the flat vector.
///
/// * `mrnn`: input→h1, h1 bias, context1→h1, h1→h2, h2 bias, context2→h2,
///   h2→output, output bias.
/// * `mlp`: input→hidden, hidden bias, hidden→output, output bias.
/// * `cmlp`: the `mlp` groups followed by input→output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightLayout {
    segments: Vec<Segment>,
    dimension: usize,
}

impl WeightLayout {
    pub fn new(topology: &Topology) -> Self {
        use ParamGroup::*;
        let (i, o) = (topology.inputs, topology.outputs);
        let shapes: Vec<(ParamGroup, usize, usize)> = match topology.kind {
            NetworkKind::Mrnn => {
                let (h1, h2) = (topology.hidden[0], topology.hidden[1]);
                vec![
                    (InputToHidden1, h1, i),
                    (Hidden1Bias, h1, 1),
                    (Context1ToHidden1, h1, h1),
                    (Hidden1ToHidden2, h2, h1),
                    (Hidden2Bias, h2, 1),
                    (Context2ToHidden2, h2, h2),
                    (Hidden2ToOutput, o, h2),
                    (OutputBias, o, 1),
                ]
            }
            NetworkKind::Mlp | NetworkKind::Cmlp => {
                let h = topology.hidden[0];
                let mut s = vec![
                    (InputToHidden, h, i),
                    (HiddenBias, h, 1),
                    (HiddenToOutput, o, h),
                    (OutputBias, o, 1),
                ];
                if topology.kind == NetworkKind::Cmlp {
                    s.push((InputToOutput, o, i));
                }
                s
            }
        };
        let mut offset = 0;
        let segments = shapes
            .into_iter()
            .map(|(group, rows, cols)| {
                let segment = Segment {
                    group,
                    offset,
                    rows,
                    cols,
                };
                offset += segment.len();
                segment
            })
            .collect();
        Self {
            segments,
            dimension: offset,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, group: ParamGroup) -> Option<&Segment> {
        self.segments.iter().find(|s| s.group == group)
    }

    /// Split a flat vector into per-group slices.
    pub fn decode<'a>(&self, flat: &'a [f64]) -> Result<Parameters<'a>> {
        if flat.len() != self.dimension {
            return Err(NetworkError::Layout {
                expected: self.dimension,
                actual: flat.len(),
            });
        }
        Ok(Parameters {
            groups: self
                .segments
                .iter()
                .map(|s| (*s, &flat[s.range()]))
                .collect(),
        })
    }

    /// Concatenate groups back into a flat vector, in layout order.
    pub fn encode(&self, params: &Parameters<'_>) -> Result<Vec<f64>> {
        let mut flat = Vec::with_capacity(self.dimension);
        for segment in &self.segments {
            let values = params.group(segment.group).ok_or(NetworkError::Layout {
                expected: self.dimension,
                actual: flat.len(),
            })?;
            if values.len() != segment.len() {
                return Err(NetworkError::Shape {
                    what: "parameter group",
                    expected: segment.len(),
                    actual: values.len(),
                });
            }
            flat.extend_from_slice(values);
        }
        Ok(flat)
    }
}

/// Borrowed per-group views into a flat weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<'a> {
    groups: Vec<(Segment, &'a [f64])>,
}

impl<'a> Parameters<'a> {
    pub fn group(&self, group: ParamGroup) -> Option<&'a [f64]> {
        self.groups
            .iter()
            .find(|(s, _)| s.group == group)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamGroup, &'a [f64])> + '_ {
        self.groups.iter().map(|(s, v)| (s.group, *v))
    }

    fn get(&self, group: ParamGroup) -> &'a [f64] {
        self.group(group).expect("group present in layout")
    }
}

/// Validated weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatWeights(Vec<f64>);

impl FlatWeights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NetworkError::NonFinite("weight"));
        }
        Ok(Self(values))
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Context layers carried between time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub context1: Vec<f64>,
    pub context2: Vec<f64>,
}

/// All-zero contexts sized for `topology` (empty for stateless kinds).
pub fn reset_state(topology: &Topology) -> NetworkState {
    let sizes = topology.context_sizes();
    NetworkState {
        context1: vec![0.0; sizes.first().copied().unwrap_or(0)],
        context2: vec![0.0; sizes.get(1).copied().unwrap_or(0)],
    }
}

pub fn sigmoid(net: f64) -> f64 {
    1.0 / (1.0 + (-net).exp())
}

fn softmax_in_place(values: &mut [f64]) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
}

/// `out_j = bias_j + sum_i w_ji x_i`, with `w` row-major by destination.
fn affine(weights: &[f64], bias: Option<&[f64]>, x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (j, o) in out.iter_mut().enumerate() {
        let row = &weights[j * cols..(j + 1) * cols];
        let mut net = bias.map_or(0.0, |b| b[j]);
        for (w, v) in row.iter().zip(x) {
            net += w * v;
        }
        *o = net;
    }
}

fn activate(nets: &mut [f64], activation: HiddenActivation) {
    match activation {
        HiddenActivation::Sigmoid => nets.iter_mut().for_each(|n| *n = sigmoid(*n)),
        HiddenActivation::Softmax => softmax_in_place(nets),
    }
}

/// `f(input net) + sigmoid(context net)` for one hidden layer.
fn dual_context_layer(
    input_w: &[f64],
    bias: &[f64],
    context_w: &[f64],
    x: &[f64],
    context: &[f64],
    activation: HiddenActivation,
) -> Vec<f64> {
    let n = bias.len();
    let mut first = vec![0.0; n];
    affine(input_w, Some(bias), x, &mut first);
    activate(&mut first, activation);
    let mut second = vec![0.0; n];
    affine(context_w, None, context, &mut second);
    first
        .iter()
        .zip(second)
        .map(|(a, c)| a + sigmoid(c))
        .collect()
}

/// A topology bound to its layout. Cheap to clone; holds no weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    topology: Topology,
    layout: WeightLayout,
}

impl Network {
    pub fn new(topology: Topology) -> Result<Self> {
        topology.validate()?;
        let layout = WeightLayout::new(&topology);
        Ok(Self { topology, layout })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn layout(&self) -> &WeightLayout {
        &self.layout
    }

    pub fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    pub fn reset_state(&self) -> NetworkState {
        reset_state(&self.topology)
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.topology.inputs {
            return Err(NetworkError::Shape {
                what: "input",
                expected: self.topology.inputs,
                actual: input.len(),
            });
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(NetworkError::NonFinite("input"));
        }
        Ok(())
    }

    fn params<'a>(&self, weights: &'a [f64]) -> Result<Parameters<'a>> {
        let params = self.layout.decode(weights)?;
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(NetworkError::NonFinite("weight"));
        }
        Ok(params)
    }

    /// One time step of the dual-context recurrent network.
    ///
    /// Returns the output and the next state, which holds the hidden
    /// activations just computed.
    pub fn forward_mrnn(
        &self,
        weights: &[f64],
        input: &[f64],
        state: &NetworkState,
    ) -> Result<(Vec<f64>, NetworkState)> {
        if self.topology.kind != NetworkKind::Mrnn {
            return Err(NetworkError::Topology(format!(
                "forward_mrnn called on a {} network",
                self.topology.kind
            )));
        }
        self.check_input(input)?;
        let (h1n, h2n) = (self.topology.hidden[0], self.topology.hidden[1]);
        if state.context1.len() != h1n || state.context2.len() != h2n {
            return Err(NetworkError::Shape {
                what: "context state",
                expected: h1n + h2n,
                actual: state.context1.len() + state.context2.len(),
            });
        }
        if state
            .context1
            .iter()
            .chain(&state.context2)
            .any(|v| !v.is_finite())
        {
            return Err(NetworkError::NonFinite("context state"));
        }
        let p = self.params(weights)?;
        use ParamGroup::*;
        let act = self.topology.activation;

        let h1 = dual_context_layer(
            p.get(InputToHidden1),
            p.get(Hidden1Bias),
            p.get(Context1ToHidden1),
            input,
            &state.context1,
            act,
        );
        let h2 = dual_context_layer(
            p.get(Hidden1ToHidden2),
            p.get(Hidden2Bias),
            p.get(Context2ToHidden2),
            &h1,
            &state.context2,
            act,
        );
        let mut output = vec![0.0; self.topology.outputs];
        affine(
            p.get(Hidden2ToOutput),
            Some(p.get(OutputBias)),
            &h2,
            &mut output,
        );
        output.iter_mut().for_each(|v| *v = sigmoid(*v));

        Ok((
            output,
            NetworkState {
                context1: h1,
                context2: h2,
            },
        ))
    }

    /// Single hidden layer pass: `sigmoid(V f(Wx + b) + c)`.
    pub fn forward_mlp(&self, weights: &[f64], input: &[f64]) -> Result<Vec<f64>> {
        if self.topology.kind != NetworkKind::Mlp {
            return Err(NetworkError::Topology(format!(
                "forward_mlp called on a {} network",
                self.topology.kind
            )));
        }
        self.check_input(input)?;
        let p = self.params(weights)?;
        Ok(self.feedforward(&p, input, None))
    }

    /// [`Network::forward_mlp`] plus `S x` added to the output nets.
    pub fn forward_cmlp(&self, weights: &[f64], input: &[f64]) -> Result<Vec<f64>> {
        if self.topology.kind != NetworkKind::Cmlp {
            return Err(NetworkError::Topology(format!(
                "forward_cmlp called on a {} network",
                self.topology.kind
            )));
        }
        self.check_input(input)?;
        let p = self.params(weights)?;
        let shortcut = p.get(ParamGroup::InputToOutput);
        Ok(self.feedforward(&p, input, Some(shortcut)))
    }

    fn feedforward(&self, p: &Parameters<'_>, input: &[f64], shortcut: Option<&[f64]>) -> Vec<f64> {
        use ParamGroup::*;
        let mut hidden = vec![0.0; self.topology.hidden[0]];
        affine(
            p.get(InputToHidden),
            Some(p.get(HiddenBias)),
            input,
            &mut hidden,
        );
        activate(&mut hidden, self.topology.activation);
        let mut output = vec![0.0; self.topology.outputs];
        affine(
            p.get(HiddenToOutput),
            Some(p.get(OutputBias)),
            &hidden,
            &mut output,
        );
        if let Some(direct) = shortcut {
            let mut extra = vec![0.0; self.topology.outputs];
            affine(direct, None, input, &mut extra);
            output.iter_mut().zip(extra).for_each(|(o, e)| *o += e);
        }
        output.iter_mut().for_each(|v| *v = sigmoid(*v));
        output
    }

    /// Dispatch on kind. Stateless kinds return the state unchanged.
    pub fn forward(
        &self,
        weights: &[f64],
        input: &[f64],
        state: &NetworkState,
    ) -> Result<(Vec<f64>, NetworkState)> {
        match self.topology.kind {
            NetworkKind::Mrnn => self.forward_mrnn(weights, input, state),
            NetworkKind::Mlp => Ok((self.forward_mlp(weights, input)?, state.clone())),
            NetworkKind::Cmlp => Ok((self.forward_cmlp(weights, input)?, state.clone())),
        }
    }
}

/// Mean squared error over output neurons.
pub fn mse(outputs: &[f64], targets: &[f64]) -> Result<f64> {
    if outputs.len() != targets.len() {
        return Err(NetworkError::Shape {
            what: "targets",
            expected: outputs.len(),
            actual: targets.len(),
        });
    }
    if outputs.is_empty() {
        return Err(NetworkError::Empty);
    }
    let sum: f64 = outputs
        .iter()
        .zip(targets)
        .map(|(o, t)| (o - t) * (o - t))
        .sum();
    Ok(sum / outputs.len() as f64)
}

/// Mean of per-sample errors over the number of samples.
pub fn total_mse(per_sample: &[f64]) -> Result<f64> {
    if per_sample.is_empty() {
        return Err(NetworkError::Empty);
    }
    Ok(per_sample.iter().sum::<f64>() / per_sample.len() as f64)
}

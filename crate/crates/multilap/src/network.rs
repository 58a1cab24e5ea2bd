//! Multilayer network data model.
//!
//! A multilayer network is a set of `M` layers, each with its own node count,
//! plus weighted undirected edges both within a layer (intralayer) and between
//! any pair of node-layer pairs (interlayer). Unlike a multiplex, layers need
//! not share node counts and interlayer links are arbitrary.
//!
//! Edge weights are raw; every query goes through *diffusion scales*: a
//! per-layer scale multiplying intralayer weights and a per-layer-pair scale
//! multiplying interlayer weights (both default 1). Keeping the scales
//! separate from the weights lets a sweep vary one coupling constant without
//! rebuilding the topology.
//!
//! ```
//! use multilap::network::{NetworkBuilder, NodeLayerId};
//!
//! let net = NetworkBuilder::new(vec![2, 2])
//!     .intra_edge(0, 0, 1, 1.0)
//!     .inter_edge(NodeLayerId::new(0, 0), NodeLayerId::new(1, 0), 1.0)
//!     .inter_scale(0, 1, 0.5)
//!     .build()
//!     .unwrap();
//!
//! assert_eq!(net.n_total(), 4);
//! let a = NodeLayerId::new(0, 0);
//! let b = NodeLayerId::new(1, 0);
//! assert_eq!(net.scaled_weight(a, b).unwrap(), 0.5);
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A node within a specific layer, both 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeLayerId {
    /// Layer index h̃, 0-based.
    pub layer: usize,
    /// Node index i within the layer, 0-based.
    pub node: usize,
}

impl NodeLayerId {
    pub fn new(layer: usize, node: usize) -> Self {
        Self { layer, node }
    }
}

impl fmt::Display for NodeLayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(layer {}, node {})", self.layer, self.node)
    }
}

/// Canonical key for an undirected edge: endpoints sorted so the smaller
/// (layer, node) pair comes first. Two insertions of the same physical edge,
/// in either orientation, collide on this key, which is how asymmetric
/// weights are detected.
fn edge_key(a: NodeLayerId, b: NodeLayerId) -> (NodeLayerId, NodeLayerId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Weighted undirected multilayer network with heterogeneous layer sizes.
///
/// Immutable after construction; build one with [`NetworkBuilder`] or parse
/// one from the text format in [`crate::format`]. The scale-modifying methods
/// ([`with_inter_scale`](Self::with_inter_scale),
/// [`with_intra_scale`](Self::with_intra_scale)) return modified copies.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilayerNetwork {
    layer_sizes: Vec<usize>,
    /// Undirected edges keyed by canonical endpoint pair. Intralayer edges
    /// have equal layer indices; interlayer edges differ. BTreeMap keeps
    /// iteration deterministic.
    edges: BTreeMap<(NodeLayerId, NodeLayerId), f64>,
    /// Per-layer intralayer scale D^h, indexed by layer; entries default 1.
    intra_scales: Vec<f64>,
    /// Interlayer scale D^{h→k} keyed by (h, k) with h < k. Absent pairs
    /// default 1; explicit 1.0 entries are dropped at construction so equal
    /// data models compare equal.
    inter_scales: BTreeMap<(usize, usize), f64>,
}

impl MultilayerNetwork {
    /// Number of layers M.
    pub fn layer_count(&self) -> usize {
        self.layer_sizes.len()
    }

    /// Node count N(h̃) of one layer.
    pub fn layer_size(&self, layer: usize) -> Result<usize> {
        self.layer_sizes
            .get(layer)
            .copied()
            .ok_or(Error::LayerOutOfRange {
                layer,
                count: self.layer_sizes.len(),
            })
    }

    /// Per-layer node counts.
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// Total node-layer count Σ N(h̃).
    pub fn n_total(&self) -> usize {
        self.layer_sizes.iter().sum()
    }

    fn check_id(&self, id: NodeLayerId) -> Result<()> {
        let size = self.layer_size(id.layer)?;
        if id.node >= size {
            return Err(Error::NodeOutOfRange {
                layer: id.layer,
                node: id.node,
                size,
            });
        }
        Ok(())
    }

    /// Intralayer diffusion scale D^h (default 1).
    pub fn intra_scale(&self, layer: usize) -> f64 {
        self.intra_scales.get(layer).copied().unwrap_or(1.0)
    }

    /// Interlayer diffusion scale D^{h→k} for an unordered layer pair
    /// (default 1).
    pub fn inter_scale(&self, h: usize, k: usize) -> f64 {
        let key = if h < k { (h, k) } else { (k, h) };
        self.inter_scales.get(&key).copied().unwrap_or(1.0)
    }

    /// Explicitly stored interlayer scales, keyed by (h, k) with h < k.
    pub fn inter_scales(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.inter_scales
    }

    fn scale_for(&self, a: NodeLayerId, b: NodeLayerId) -> f64 {
        if a.layer == b.layer {
            self.intra_scale(a.layer)
        } else {
            self.inter_scale(a.layer, b.layer)
        }
    }

    /// Raw (unscaled) weight stored for an edge; 0 if absent.
    pub fn raw_weight(&self, a: NodeLayerId, b: NodeLayerId) -> Result<f64> {
        self.check_id(a)?;
        self.check_id(b)?;
        Ok(self.edges.get(&edge_key(a, b)).copied().unwrap_or(0.0))
    }

    /// Diffusion-scaled weight w_ij(h̃k̃) · D: raw weight times the layer
    /// scale D^h̃ for intralayer pairs, times D^{h̃→k̃} for interlayer pairs;
    /// 0 if no edge. Symmetric in its arguments by construction.
    pub fn scaled_weight(&self, a: NodeLayerId, b: NodeLayerId) -> Result<f64> {
        Ok(self.raw_weight(a, b)? * self.scale_for(a, b))
    }

    /// Multidegree (strength) k_{ih̃}: total scaled weight incident on a
    /// node-layer pair, summed over all layers.
    pub fn multidegree(&self, a: NodeLayerId) -> Result<f64> {
        self.check_id(a)?;
        let mut sum = 0.0;
        for (&(p, q), &w) in &self.edges {
            if p == a || q == a {
                sum += w * self.scale_for(p, q);
            }
        }
        Ok(sum)
    }

    /// All edges with their raw and scaled weights, in canonical key order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeLayerId, NodeLayerId, f64, f64)> + '_ {
        self.edges
            .iter()
            .map(|(&(a, b), &w)| (a, b, w, w * self.scale_for(a, b)))
    }

    /// Intralayer edges as (layer, i, j, raw weight), i < j.
    pub fn intra_edges(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.edges.iter().filter_map(|(&(a, b), &w)| {
            (a.layer == b.layer).then_some((a.layer, a.node, b.node, w))
        })
    }

    /// Interlayer edges as (a, b, raw weight) with a.layer < b.layer.
    pub fn inter_edges(&self) -> impl Iterator<Item = (NodeLayerId, NodeLayerId, f64)> + '_ {
        self.edges
            .iter()
            .filter_map(|(&(a, b), &w)| (a.layer != b.layer).then_some((a, b, w)))
    }

    /// All node-layer pairs in layer-major, node-minor order.
    pub fn ids(&self) -> impl Iterator<Item = NodeLayerId> + '_ {
        self.layer_sizes
            .iter()
            .enumerate()
            .flat_map(|(h, &n)| (0..n).map(move |i| NodeLayerId::new(h, i)))
    }

    /// True iff the flattened supra graph over all node-layer pairs, with
    /// edges of positive scaled weight, has a single connected component.
    /// A single node is connected by definition.
    pub fn is_connected(&self) -> bool {
        let n = self.n_total();
        if n == 0 {
            return false;
        }
        // Flatten ids layer-major for the traversal.
        let mut offsets = Vec::with_capacity(self.layer_sizes.len());
        let mut acc = 0;
        for &s in &self.layer_sizes {
            offsets.push(acc);
            acc += s;
        }
        let flat = |id: NodeLayerId| offsets[id.layer] + id.node;

        let mut adjacency = vec![Vec::new(); n];
        for (a, b, _, scaled) in self.edges() {
            if scaled > 0.0 {
                adjacency[flat(a)].push(flat(b));
                adjacency[flat(b)].push(flat(a));
            }
        }

        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Copy of this network with one interlayer scale replaced.
    pub fn with_inter_scale(&self, h: usize, k: usize, scale: f64) -> Result<Self> {
        let mut builder = NetworkBuilder::from_network(self);
        builder = builder.inter_scale(h, k, scale);
        builder.build()
    }

    /// Copy of this network with one intralayer scale replaced.
    pub fn with_intra_scale(&self, layer: usize, scale: f64) -> Result<Self> {
        let mut builder = NetworkBuilder::from_network(self);
        builder = builder.intra_scale(layer, scale);
        builder.build()
    }
}

/// Incremental construction of a [`MultilayerNetwork`] with validation.
///
/// Edge and scale insertions record the first problem they see; `build`
/// surfaces it. Inserting the same edge twice with the same weight is
/// idempotent; differing weights are rejected as an asymmetric pair.
#[derive(Debug)]
pub struct NetworkBuilder {
    layer_sizes: Vec<usize>,
    edges: BTreeMap<(NodeLayerId, NodeLayerId), f64>,
    intra_scales: Vec<f64>,
    inter_scales: BTreeMap<(usize, usize), f64>,
    error: Option<Error>,
}

impl NetworkBuilder {
    /// Start a network with the given per-layer node counts.
    pub fn new(layer_sizes: Vec<usize>) -> Self {
        let n_layers = layer_sizes.len();
        Self {
            layer_sizes,
            edges: BTreeMap::new(),
            intra_scales: vec![1.0; n_layers],
            inter_scales: BTreeMap::new(),
            error: None,
        }
    }

    /// Builder pre-populated with an existing network's contents.
    pub fn from_network(net: &MultilayerNetwork) -> Self {
        Self {
            layer_sizes: net.layer_sizes.clone(),
            edges: net.edges.clone(),
            intra_scales: net.intra_scales.clone(),
            inter_scales: net.inter_scales.clone(),
            error: None,
        }
    }

    fn record(&mut self, err: Error) {
        if self.error.is_none() {
            self.error = Some(err);
        }
    }

    fn check_id(&self, id: NodeLayerId) -> Result<()> {
        let size = *self
            .layer_sizes
            .get(id.layer)
            .ok_or(Error::LayerOutOfRange {
                layer: id.layer,
                count: self.layer_sizes.len(),
            })?;
        if id.node >= size {
            return Err(Error::NodeOutOfRange {
                layer: id.layer,
                node: id.node,
                size,
            });
        }
        Ok(())
    }

    fn check_weight(&self, value: f64, context: &str) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::BadWeight {
                value,
                context: context.to_string(),
            });
        }
        Ok(())
    }

    fn insert_edge(&mut self, a: NodeLayerId, b: NodeLayerId, weight: f64) -> Result<()> {
        self.check_id(a)?;
        self.check_id(b)?;
        self.check_weight(weight, "edge weight")?;
        if a == b {
            return Err(Error::SelfLoop {
                layer: a.layer,
                node: a.node,
            });
        }
        let key = edge_key(a, b);
        if let Some(&existing) = self.edges.get(&key) {
            if existing != weight {
                return Err(Error::AsymmetricWeight {
                    a: key.0,
                    b: key.1,
                    first: existing,
                    second: weight,
                });
            }
        } else {
            self.edges.insert(key, weight);
        }
        Ok(())
    }

    /// Add an intralayer edge (i ≠ j) with raw weight w ≥ 0.
    pub fn intra_edge(mut self, layer: usize, i: usize, j: usize, weight: f64) -> Self {
        let r = self.insert_edge(
            NodeLayerId::new(layer, i),
            NodeLayerId::new(layer, j),
            weight,
        );
        if let Err(e) = r {
            self.record(e);
        }
        self
    }

    /// Add an interlayer edge between node-layer pairs in distinct layers.
    pub fn inter_edge(mut self, a: NodeLayerId, b: NodeLayerId, weight: f64) -> Self {
        let r = if a.layer == b.layer {
            Err(Error::BadWeight {
                value: weight,
                context: format!("inter edge {a} -- {b} must join distinct layers"),
            })
        } else {
            self.insert_edge(a, b, weight)
        };
        if let Err(e) = r {
            self.record(e);
        }
        self
    }

    /// Set the intralayer diffusion scale D^h for one layer.
    pub fn intra_scale(mut self, layer: usize, scale: f64) -> Self {
        if layer >= self.layer_sizes.len() {
            self.record(Error::LayerOutOfRange {
                layer,
                count: self.layer_sizes.len(),
            });
        } else if let Err(e) = self.check_weight(scale, "intralayer scale") {
            self.record(e);
        } else {
            self.intra_scales[layer] = scale;
        }
        self
    }

    /// Set the interlayer diffusion scale D^{h→k} for an unordered layer pair.
    pub fn inter_scale(mut self, h: usize, k: usize, scale: f64) -> Self {
        let count = self.layer_sizes.len();
        if h >= count || k >= count {
            self.record(Error::LayerOutOfRange {
                layer: h.max(k),
                count,
            });
        } else if h == k {
            self.record(Error::BadWeight {
                value: scale,
                context: format!("interlayer scale for identical layers ({h}, {k})"),
            });
        } else if let Err(e) = self.check_weight(scale, "interlayer scale") {
            self.record(e);
        } else {
            let key = if h < k { (h, k) } else { (k, h) };
            if scale == 1.0 {
                self.inter_scales.remove(&key);
            } else {
                self.inter_scales.insert(key, scale);
            }
        }
        self
    }

    /// Validate global invariants and produce the immutable network.
    pub fn build(self) -> Result<MultilayerNetwork> {
        if let Some(e) = self.error {
            return Err(e);
        }
        if self.layer_sizes.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        if let Some(layer) = self.layer_sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyLayer { layer });
        }
        Ok(MultilayerNetwork {
            layer_sizes: self.layer_sizes,
            edges: self.edges,
            intra_scales: self.intra_scales,
            inter_scales: self.inter_scales,
        })
    }
}

/// The built-in experiment topologies.
///
/// Intralayer edge lists for these are conventions of this crate (paths, and
/// a ring for the second multiplex layer), with unit raw weights throughout;
/// the interlayer link patterns and default diffusion scales are fixed per
/// topology. `FourLayer`'s scale for the (2, 4) layer pair is an assumption
/// (no established value); it defaults to 0.1 and is flagged wherever the
/// topology is exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Builtin {
    /// Two layers of 3 and 5 nodes, two interlayer links, D^{1→2} = 0.5.
    #[serde(rename = "two-layer")]
    TwoLayer,
    /// Four layers of 3, 4, 5, 6 nodes; every first-layer node links to one
    /// node of each other layer, and two second-layer nodes link to one node
    /// each of layers 3 and 4.
    #[serde(rename = "four-layer")]
    FourLayer,
    /// Multiplex of two 5-node layers with one-to-one replica links,
    /// D^{1→2} = 0.4.
    #[serde(rename = "multiplex-2x5")]
    Multiplex2x5,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::TwoLayer, Builtin::FourLayer, Builtin::Multiplex2x5];

    /// CLI/manifest name.
    pub fn name(self) -> &'static str {
        match self {
            Builtin::TwoLayer => "two-layer",
            Builtin::FourLayer => "four-layer",
            Builtin::Multiplex2x5 => "multiplex-2x5",
        }
    }

    /// Human-readable notes about assumptions baked into the topology.
    pub fn assumptions(self) -> Vec<String> {
        match self {
            Builtin::FourLayer => {
                vec!["dinter 2 4 = 0.1 assumed (no established value)".to_string()]
            }
            _ => Vec::new(),
        }
    }

    /// Construct the topology.
    pub fn network(self) -> MultilayerNetwork {
        match self {
            Builtin::TwoLayer => two_layer(),
            Builtin::FourLayer => four_layer(),
            Builtin::Multiplex2x5 => multiplex_2x5(),
        }
    }
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-layer" => Ok(Builtin::TwoLayer),
            "four-layer" => Ok(Builtin::FourLayer),
            "multiplex-2x5" => Ok(Builtin::Multiplex2x5),
            other => Err(Error::Manifest(format!(
                "unknown builtin network '{other}' (expected two-layer, four-layer, or multiplex-2x5)"
            ))),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn path(mut builder: NetworkBuilder, layer: usize, n: usize) -> NetworkBuilder {
    for i in 0..n.saturating_sub(1) {
        builder = builder.intra_edge(layer, i, i + 1, 1.0);
    }
    builder
}

fn ring(mut builder: NetworkBuilder, layer: usize, n: usize) -> NetworkBuilder {
    builder = path(builder, layer, n);
    if n > 2 {
        builder = builder.intra_edge(layer, n - 1, 0, 1.0);
    }
    builder
}

fn two_layer() -> MultilayerNetwork {
    let mut b = NetworkBuilder::new(vec![3, 5]);
    b = path(b, 0, 3);
    b = path(b, 1, 5);
    // Node 1 of layer 1 to node 2 of layer 2, node 3 of layer 1 to node 4 of
    // layer 2 (1-based labels; stored 0-based).
    b = b.inter_edge(NodeLayerId::new(0, 0), NodeLayerId::new(1, 1), 1.0);
    b = b.inter_edge(NodeLayerId::new(0, 2), NodeLayerId::new(1, 3), 1.0);
    b = b.inter_scale(0, 1, 0.5);
    b.build().expect("builtin two-layer network is valid")
}

fn four_layer() -> MultilayerNetwork {
    let sizes = [3usize, 4, 5, 6];
    let mut b = NetworkBuilder::new(sizes.to_vec());
    for (layer, &n) in sizes.iter().enumerate() {
        b = path(b, layer, n);
    }
    // Every layer-1 node to the same-indexed node of layers 2, 3, 4.
    for i in 0..3 {
        for target in 1..4 {
            b = b.inter_edge(NodeLayerId::new(0, i), NodeLayerId::new(target, i), 1.0);
        }
    }
    // Layer-2 nodes 1 and 2 (1-based) each to one node of layers 3 and 4.
    b = b.inter_edge(NodeLayerId::new(1, 0), NodeLayerId::new(2, 3), 1.0);
    b = b.inter_edge(NodeLayerId::new(1, 0), NodeLayerId::new(3, 3), 1.0);
    b = b.inter_edge(NodeLayerId::new(1, 1), NodeLayerId::new(2, 4), 1.0);
    b = b.inter_edge(NodeLayerId::new(1, 1), NodeLayerId::new(3, 4), 1.0);
    b = b.inter_scale(0, 1, 0.1);
    b = b.inter_scale(0, 2, 0.5);
    b = b.inter_scale(0, 3, 0.2);
    b = b.inter_scale(1, 2, 0.1);
    b = b.inter_scale(1, 3, 0.1); // assumed; see Builtin::assumptions
    b = b.inter_scale(2, 3, 0.3);
    b.build().expect("builtin four-layer network is valid")
}

fn multiplex_2x5() -> MultilayerNetwork {
    let mut b = NetworkBuilder::new(vec![5, 5]);
    b = path(b, 0, 5);
    b = ring(b, 1, 5);
    for i in 0..5 {
        b = b.inter_edge(NodeLayerId::new(0, i), NodeLayerId::new(1, i), 1.0);
    }
    b = b.inter_scale(0, 1, 0.4);
    b.build().expect("builtin multiplex network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> MultilayerNetwork {
        NetworkBuilder::new(vec![1]).build().unwrap()
    }

    #[test]
    fn trivial_single_node() {
        let net = trivial();
        assert_eq!(net.n_total(), 1);
        assert!(net.is_connected());
    }

    #[test]
    fn empty_network_rejected() {
        assert!(matches!(
            NetworkBuilder::new(vec![]).build(),
            Err(Error::EmptyNetwork)
        ));
        assert!(matches!(
            NetworkBuilder::new(vec![2, 0]).build(),
            Err(Error::EmptyLayer { layer: 1 })
        ));
    }

    #[test]
    fn self_loop_rejected() {
        let err = NetworkBuilder::new(vec![3])
            .intra_edge(0, 1, 1, 1.0)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::SelfLoop { layer: 0, node: 1 }));
    }

    #[test]
    fn asymmetric_weight_rejected() {
        let err = NetworkBuilder::new(vec![3])
            .intra_edge(0, 0, 1, 1.0)
            .intra_edge(0, 1, 0, 2.0)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::AsymmetricWeight { .. }));
    }

    #[test]
    fn duplicate_equal_weight_is_idempotent() {
        let net = NetworkBuilder::new(vec![3])
            .intra_edge(0, 0, 1, 1.5)
            .intra_edge(0, 1, 0, 1.5)
            .build()
            .unwrap();
        assert_eq!(net.edges().count(), 1);
    }

    #[test]
    fn out_of_range_indices_rejected() {
        assert!(matches!(
            NetworkBuilder::new(vec![2])
                .intra_edge(0, 0, 5, 1.0)
                .build(),
            Err(Error::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            NetworkBuilder::new(vec![2])
                .intra_edge(3, 0, 1, 1.0)
                .build(),
            Err(Error::LayerOutOfRange { .. })
        ));
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(matches!(
            NetworkBuilder::new(vec![2])
                .intra_edge(0, 0, 1, -1.0)
                .build(),
            Err(Error::BadWeight { .. })
        ));
    }

    #[test]
    fn scaled_weight_applies_scales() {
        let net = NetworkBuilder::new(vec![2, 2])
            .intra_edge(0, 0, 1, 1.0)
            .inter_edge(NodeLayerId::new(0, 0), NodeLayerId::new(1, 0), 1.0)
            .inter_scale(0, 1, 0.5)
            .build()
            .unwrap();
        // Intralayer default scale is the identity.
        assert_eq!(
            net.scaled_weight(NodeLayerId::new(0, 0), NodeLayerId::new(0, 1))
                .unwrap(),
            1.0
        );
        // Interlayer weight 1.0 scaled by 0.5.
        assert_eq!(
            net.scaled_weight(NodeLayerId::new(0, 0), NodeLayerId::new(1, 0))
                .unwrap(),
            0.5
        );
        // Absent pair.
        assert_eq!(
            net.scaled_weight(NodeLayerId::new(0, 1), NodeLayerId::new(1, 1))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn scaled_weight_is_symmetric() {
        let net = Builtin::FourLayer.network();
        let ids: Vec<_> = net.ids().collect();
        for &a in &ids {
            for &b in &ids {
                assert_eq!(
                    net.scaled_weight(a, b).unwrap(),
                    net.scaled_weight(b, a).unwrap()
                );
            }
        }
    }

    #[test]
    fn scaled_weight_out_of_range() {
        let net = trivial();
        assert!(net
            .scaled_weight(NodeLayerId::new(0, 0), NodeLayerId::new(0, 7))
            .is_err());
    }

    #[test]
    fn two_layer_topology() {
        let net = Builtin::TwoLayer.network();
        assert_eq!(net.layer_sizes(), &[3, 5]);
        assert_eq!(net.n_total(), 8);
        assert_eq!(net.inter_edges().count(), 2);
        assert_eq!(net.inter_scale(0, 1), 0.5);
        assert!(net.is_connected());
    }

    #[test]
    fn four_layer_topology() {
        let net = Builtin::FourLayer.network();
        assert_eq!(net.n_total(), 18);
        assert_eq!(net.inter_edges().count(), 13);
        assert!(net.is_connected());
        assert_eq!(net.inter_scale(1, 3), 0.1);
        assert_eq!(net.inter_scale(2, 3), 0.3);
    }

    #[test]
    fn multiplex_topology() {
        let net = Builtin::Multiplex2x5.network();
        assert_eq!(net.n_total(), 10);
        let replicas: Vec<_> = net.inter_edges().collect();
        assert_eq!(replicas.len(), 5);
        for (a, b, _) in replicas {
            assert_eq!(a.node, b.node);
        }
        assert_eq!(net.inter_scale(0, 1), 0.4);
    }

    #[test]
    fn disconnected_without_interlayer_edges() {
        let net = NetworkBuilder::new(vec![2, 2])
            .intra_edge(0, 0, 1, 1.0)
            .intra_edge(1, 0, 1, 1.0)
            .build()
            .unwrap();
        assert!(!net.is_connected());
    }

    #[test]
    fn zero_scale_disconnects() {
        let net = Builtin::TwoLayer.network();
        assert!(net.is_connected());
        let cut = net.with_inter_scale(0, 1, 0.0).unwrap();
        assert!(!cut.is_connected());
    }

    #[test]
    fn multidegree_hand_sums() {
        // Isolated node.
        let net = NetworkBuilder::new(vec![2]).build().unwrap();
        assert_eq!(net.multidegree(NodeLayerId::new(0, 0)).unwrap(), 0.0);

        // One intra edge w=1 plus one inter edge w=1 scaled by 0.5.
        let net = NetworkBuilder::new(vec![2, 1])
            .intra_edge(0, 0, 1, 1.0)
            .inter_edge(NodeLayerId::new(0, 0), NodeLayerId::new(1, 0), 1.0)
            .inter_scale(0, 1, 0.5)
            .build()
            .unwrap();
        assert_eq!(net.multidegree(NodeLayerId::new(0, 0)).unwrap(), 1.5);

        // Middle replica of the multiplex: two intra neighbours at weight 1
        // plus one replica link scaled by 0.4.
        let net = Builtin::Multiplex2x5.network();
        assert_eq!(net.multidegree(NodeLayerId::new(0, 2)).unwrap(), 2.4);
    }
}

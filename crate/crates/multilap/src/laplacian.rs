//! Combinatorial Laplacian of a multilayer network in supra (flattened) form.
//!
//! The Laplacian tensor has entries l_ij(h̃k̃) = d_ij(h̃k̃) − w_ij(h̃k̃), where
//! the degree part is diagonal in both node and layer indices and carries the
//! multidegree — the total scaled weight incident on a node-layer pair across
//! every layer. Flattening node-layer pairs to a single index (layer-major,
//! node-minor) turns the rank-4 tensor into a symmetric positive
//! semidefinite matrix whose rows sum to zero; that matrix is what this
//! module stores and what the flows in [`crate::dynamics`] consume.
//!
//! ```
//! use multilap::laplacian::LaplacianTensor;
//! use multilap::network::Builtin;
//!
//! let lap = LaplacianTensor::from_network(&Builtin::TwoLayer.network());
//! let spectrum = lap.spectrum().unwrap();
//! assert!(spectrum[0].abs() < 1e-12); // constant vector is always null
//! assert!(lap.lambda2().unwrap() > 0.0); // connected network
//! ```

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, SymmetricEigen};
use crate::network::{MultilayerNetwork, NodeLayerId};

/// Bijection between node-layer pairs and flat supra indices, layer-major
/// and node-minor: layer 0's nodes come first, then layer 1's, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupraIndexMap {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl SupraIndexMap {
    pub fn new(layer_sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(layer_sizes.len());
        let mut acc = 0;
        for &s in layer_sizes {
            offsets.push(acc);
            acc += s;
        }
        Self {
            sizes: layer_sizes.to_vec(),
            offsets,
        }
    }

    /// Total flattened dimension Σ N(h̃).
    pub fn n_total(&self) -> usize {
        self.offsets
            .last()
            .map_or(0, |&o| o + self.sizes[self.sizes.len() - 1])
    }

    /// Number of layers.
    pub fn layer_count(&self) -> usize {
        self.sizes.len()
    }

    /// Per-layer node counts.
    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Flat index of a node-layer pair.
    pub fn flatten(&self, id: NodeLayerId) -> Result<usize> {
        let size = *self.sizes.get(id.layer).ok_or(Error::LayerOutOfRange {
            layer: id.layer,
            count: self.sizes.len(),
        })?;
        if id.node >= size {
            return Err(Error::NodeOutOfRange {
                layer: id.layer,
                node: id.node,
                size,
            });
        }
        Ok(self.offsets[id.layer] + id.node)
    }

    /// Node-layer pair of a flat index.
    pub fn unflatten(&self, flat: usize) -> Result<NodeLayerId> {
        let n = self.n_total();
        if flat >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: flat,
                context: "flat supra index out of range".to_string(),
            });
        }
        // offsets is ascending; find the last layer whose offset ≤ flat.
        let layer = match self.offsets.binary_search(&flat) {
            Ok(h) => h,
            Err(insert) => insert - 1,
        };
        Ok(NodeLayerId::new(layer, flat - self.offsets[layer]))
    }

    /// Flat index range covered by one layer.
    pub fn layer_range(&self, layer: usize) -> Result<std::ops::Range<usize>> {
        let size = *self.sizes.get(layer).ok_or(Error::LayerOutOfRange {
            layer,
            count: self.sizes.len(),
        })?;
        let start = self.offsets[layer];
        Ok(start..start + size)
    }

    /// All node-layer pairs in flat order.
    pub fn ids(&self) -> impl Iterator<Item = NodeLayerId> + '_ {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(h, &n)| (0..n).map(move |i| NodeLayerId::new(h, i)))
    }
}

/// Supra representation of the combinatorial Laplacian tensor: a dense
/// symmetric matrix over flattened node-layer indices, plus the index map
/// that gives those indices meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianTensor {
    matrix: Array2<f64>,
    index_map: SupraIndexMap,
}

impl LaplacianTensor {
    /// Assemble the supra Laplacian from a network: off-diagonal entries are
    /// negated scaled weights, diagonal entries are multidegrees.
    ///
    /// The diagonal is accumulated edge-by-edge in the network's canonical
    /// edge order — the same order [`MultilayerNetwork::multidegree`] uses —
    /// so the two agree bit for bit and rows sum to zero to within roundoff.
    pub fn from_network(network: &MultilayerNetwork) -> Self {
        let index_map = SupraIndexMap::new(network.layer_sizes());
        let n = index_map.n_total();
        let mut matrix = Array2::zeros((n, n));
        for (a, b, _, scaled) in network.edges() {
            let ia = index_map
                .flatten(a)
                .expect("network edge endpoints are in range");
            let ib = index_map
                .flatten(b)
                .expect("network edge endpoints are in range");
            matrix[[ia, ib]] -= scaled;
            matrix[[ib, ia]] -= scaled;
            matrix[[ia, ia]] += scaled;
            matrix[[ib, ib]] += scaled;
        }
        Self { matrix, index_map }
    }

    /// Wrap an existing supra matrix, validating Laplacian structure: square
    /// and matching the index map, exactly symmetric, non-positive
    /// off-diagonals, and row sums zero to within 1e-12 of the row scale.
    pub fn from_matrix(matrix: Array2<f64>, index_map: SupraIndexMap) -> Result<Self> {
        let n = index_map.n_total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows().max(matrix.ncols()),
                context: "supra matrix must match the index map".to_string(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = matrix[[i, j]];
                if !v.is_finite() {
                    return Err(Error::InvalidLaplacian(format!(
                        "non-finite entry {v} at ({i}, {j})"
                    )));
                }
                if matrix[[i, j]] != matrix[[j, i]] {
                    return Err(Error::InvalidLaplacian(format!(
                        "asymmetric entries at ({i}, {j}): {} vs {}",
                        matrix[[i, j]],
                        matrix[[j, i]]
                    )));
                }
                if i != j && v > 1e-12 {
                    return Err(Error::InvalidLaplacian(format!(
                        "positive off-diagonal entry {v} at ({i}, {j})"
                    )));
                }
            }
            let row_scale = (0..n).fold(0.0f64, |acc, j| acc.max(matrix[[i, j]].abs()));
            let row_sum: f64 = (0..n).map(|j| matrix[[i, j]]).sum();
            if row_sum.abs() > 1e-12 * row_scale.max(1.0) {
                return Err(Error::InvalidLaplacian(format!(
                    "row {i} sums to {row_sum:e}, expected 0"
                )));
            }
        }
        Ok(Self { matrix, index_map })
    }

    /// The dense supra matrix.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// The flattening used by the matrix rows/columns.
    pub fn index_map(&self) -> &SupraIndexMap {
        &self.index_map
    }

    /// Flattened dimension.
    pub fn n_total(&self) -> usize {
        self.index_map.n_total()
    }

    /// One tensor entry l_ij(h̃k̃) by node-layer pair.
    pub fn entry(&self, a: NodeLayerId, b: NodeLayerId) -> Result<f64> {
        let ia = self.index_map.flatten(a)?;
        let ib = self.index_map.flatten(b)?;
        Ok(self.matrix[[ia, ib]])
    }

    /// Matrix-vector product 𝓛x.
    pub fn apply(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.n_total() {
            return Err(Error::DimensionMismatch {
                expected: self.n_total(),
                got: x.len(),
                context: "Laplacian apply".to_string(),
            });
        }
        Ok(self.matrix.dot(x))
    }

    /// Full eigendecomposition of the supra matrix.
    pub fn eigen(&self) -> Result<SymmetricEigen> {
        jacobi_eigh(&self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Result<Array1<f64>> {
        Ok(self.eigen()?.values)
    }

    /// Algebraic connectivity: the second-smallest eigenvalue. Positive iff
    /// the network is connected (up to eigensolver roundoff near zero).
    pub fn lambda2(&self) -> Result<f64> {
        let spectrum = self.spectrum()?;
        if spectrum.len() < 2 {
            return Err(Error::InvalidLaplacian(
                "need at least two node-layer pairs for algebraic connectivity".to_string(),
            ));
        }
        Ok(spectrum[1])
    }
}

//! Line-oriented text format for networks and cost coefficients.
//!
//! The grammar, one directive per line (blank lines and `#` comments
//! ignored; all layer and node indices 1-based on disk, 0-based in the API):
//!
//! ```text
//! layers: N1 N2 ... NM        # per-layer node counts; must come first
//! dintra h D                  # intralayer diffusion scale for layer h
//! dinter h k D                # interlayer diffusion scale for layer pair
//! intra h i j w               # intralayer edge in layer h
//! inter h i k j w             # edge between node i of layer h, node j of layer k
//! gamma h i value             # linear cost coefficient for node i of layer h
//! ```
//!
//! ```
//! use multilap::format::parse_network;
//!
//! let text = "layers: 2 2\nintra 1 1 2 1.0\ninter 1 1 2 1 1.0\ndinter 1 2 0.5\n";
//! let file = parse_network(text).unwrap();
//! assert_eq!(file.network.n_total(), 4);
//! assert_eq!(file.network.inter_scale(0, 1), 0.5);
//! assert!(file.gammas.is_empty());
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{MultilayerNetwork, NetworkBuilder, NodeLayerId};

/// Result of parsing a network file: the topology plus any cost coefficients
/// declared alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub network: MultilayerNetwork,
    /// `gamma` directives, keyed by node-layer pair.
    pub gammas: BTreeMap<NodeLayerId, f64>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_usize(token: &str, line: usize, what: &str) -> Result<usize> {
    token.parse().map_err(|_| {
        parse_err(
            line,
            format!("{what} must be a positive integer, got '{token}'"),
        )
    })
}

fn parse_f64(token: &str, line: usize, what: &str) -> Result<f64> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("{what} must be a number, got '{token}'")))
}

/// Convert a 1-based file index to 0-based, rejecting 0.
fn to_zero_based(index: usize, line: usize, what: &str) -> Result<usize> {
    index
        .checked_sub(1)
        .ok_or_else(|| parse_err(line, format!("{what} is 1-based; 0 is out of range")))
}

/// Parse the text format. The `layers:` directive must appear before any
/// directive that references a layer.
pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let mut builder: Option<NetworkBuilder> = None;
    let mut n_layers = 0usize;
    let mut gammas = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        let tokens: Vec<&str> = line.split_whitespace().collect();
        let directive = tokens[0];

        if directive == "layers:" {
            if builder.is_some() {
                return Err(parse_err(line_no, "duplicate 'layers:' directive"));
            }
            if tokens.len() < 2 {
                return Err(parse_err(
                    line_no,
                    "'layers:' needs at least one node count",
                ));
            }
            let mut sizes = Vec::with_capacity(tokens.len() - 1);
            for tok in &tokens[1..] {
                sizes.push(parse_usize(tok, line_no, "layer size")?);
            }
            n_layers = sizes.len();
            builder = Some(NetworkBuilder::new(sizes));
            continue;
        }

        let Some(b) = builder.take() else {
            return Err(parse_err(
                line_no,
                format!("'{directive}' before the 'layers:' directive"),
            ));
        };

        let expect_args = |n: usize| -> Result<()> {
            if tokens.len() != n + 1 {
                Err(parse_err(
                    line_no,
                    format!(
                        "'{directive}' takes {n} arguments, got {}",
                        tokens.len() - 1
                    ),
                ))
            } else {
                Ok(())
            }
        };

        let check_layer = |h: usize| -> Result<usize> {
            let h0 = to_zero_based(h, line_no, "layer index")?;
            if h0 >= n_layers {
                return Err(parse_err(
                    line_no,
                    format!("layer {h} out of range (network has {n_layers} layers)"),
                ));
            }
            Ok(h0)
        };

        builder = Some(match directive {
            "dintra" => {
                expect_args(2)?;
                let h = check_layer(parse_usize(tokens[1], line_no, "layer index")?)?;
                let d = parse_f64(tokens[2], line_no, "diffusion scale")?;
                b.intra_scale(h, d)
            }
            "dinter" => {
                expect_args(3)?;
                let h = check_layer(parse_usize(tokens[1], line_no, "layer index")?)?;
                let k = check_layer(parse_usize(tokens[2], line_no, "layer index")?)?;
                if h == k {
                    return Err(parse_err(line_no, "'dinter' layers must differ"));
                }
                let d = parse_f64(tokens[3], line_no, "diffusion scale")?;
                b.inter_scale(h, k, d)
            }
            "intra" => {
                expect_args(4)?;
                let h = check_layer(parse_usize(tokens[1], line_no, "layer index")?)?;
                let i = to_zero_based(
                    parse_usize(tokens[2], line_no, "node index")?,
                    line_no,
                    "node index",
                )?;
                let j = to_zero_based(
                    parse_usize(tokens[3], line_no, "node index")?,
                    line_no,
                    "node index",
                )?;
                let w = parse_f64(tokens[4], line_no, "edge weight")?;
                b.intra_edge(h, i, j, w)
            }
            "inter" => {
                expect_args(5)?;
                let h = check_layer(parse_usize(tokens[1], line_no, "layer index")?)?;
                let i = to_zero_based(
                    parse_usize(tokens[2], line_no, "node index")?,
                    line_no,
                    "node index",
                )?;
                let k = check_layer(parse_usize(tokens[3], line_no, "layer index")?)?;
                let j = to_zero_based(
                    parse_usize(tokens[4], line_no, "node index")?,
                    line_no,
                    "node index",
                )?;
                let w = parse_f64(tokens[5], line_no, "edge weight")?;
                if h == k {
                    return Err(parse_err(line_no, "'inter' layers must differ"));
                }
                b.inter_edge(NodeLayerId::new(h, i), NodeLayerId::new(k, j), w)
            }
            "gamma" => {
                expect_args(3)?;
                let h = check_layer(parse_usize(tokens[1], line_no, "layer index")?)?;
                let i = to_zero_based(
                    parse_usize(tokens[2], line_no, "node index")?,
                    line_no,
                    "node index",
                )?;
                let v = parse_f64(tokens[3], line_no, "gamma value")?;
                if !v.is_finite() {
                    return Err(parse_err(line_no, format!("gamma value {v} is not finite")));
                }
                gammas.insert(NodeLayerId::new(h, i), v);
                b
            }
            other => {
                return Err(parse_err(
                    line_no,
                    format!(
                        "unknown directive '{other}' (expected layers:, dintra, dinter, intra, inter, or gamma)"
                    ),
                ));
            }
        });
    }

    let builder = builder.ok_or_else(|| parse_err(0, "missing 'layers:' directive"))?;
    let network = builder.build()?;

    // Gamma node references were range-checked against n_layers only; check
    // node bounds against the finished network.
    for id in gammas.keys() {
        let size = network.layer_size(id.layer)?;
        if id.node >= size {
            return Err(Error::NodeOutOfRange {
                layer: id.layer,
                node: id.node,
                size,
            });
        }
    }

    Ok(NetworkFile { network, gammas })
}

/// Serialize a network (and optional cost coefficients) back to the text
/// format. Output is deterministic: directives are grouped and sorted, and
/// scales equal to 1 are omitted.
pub fn write_network(network: &MultilayerNetwork, gammas: &BTreeMap<NodeLayerId, f64>) -> String {
    let mut out = String::new();
    out.push_str("layers:");
    for &s in network.layer_sizes() {
        out.push_str(&format!(" {s}"));
    }
    out.push('\n');

    for layer in 0..network.layer_count() {
        let d = network.intra_scale(layer);
        if d != 1.0 {
            out.push_str(&format!("dintra {} {}\n", layer + 1, d));
        }
    }
    for (&(h, k), &d) in network.inter_scales() {
        out.push_str(&format!("dinter {} {} {}\n", h + 1, k + 1, d));
    }
    for (layer, i, j, w) in network.intra_edges() {
        out.push_str(&format!("intra {} {} {} {}\n", layer + 1, i + 1, j + 1, w));
    }
    for (a, b, w) in network.inter_edges() {
        out.push_str(&format!(
            "inter {} {} {} {} {}\n",
            a.layer + 1,
            a.node + 1,
            b.layer + 1,
            b.node + 1,
            w
        ));
    }
    for (id, v) in gammas {
        out.push_str(&format!("gamma {} {} {}\n", id.layer + 1, id.node + 1, v));
    }
    out
}

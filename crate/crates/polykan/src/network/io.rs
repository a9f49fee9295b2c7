//! Model persistence: the `polykan/1` JSON schema.
//!
//! Numbers round-trip exactly (shortest-representation decimal formatting),
//! so `save(load(save(net)))` is byte-identical to `save(net)`. Schema
//! violations produce errors naming the offending path, e.g.
//! `layers[1].splines[0][2].knots`.

use super::{KanLayer, KanNetwork, OutOfDomainPolicy};
use crate::error::{Error, Result};
use crate::poly::{Interval, Polynomial};
use crate::spline::PiecewiseSpline;
use crate::MODEL_FORMAT;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    architecture: Vec<usize>,
    input_domain: Vec<[f64; 2]>,
    out_of_domain_policy: String,
    layers: Vec<LayerDoc>,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    splines: Vec<Vec<SplineDoc>>,
}

#[derive(Serialize, Deserialize)]
struct SplineDoc {
    knots: Vec<f64>,
    degree: usize,
    pieces: Vec<Vec<f64>>,
}

/// Serializes a network to the `polykan/1` JSON document.
pub fn save_model(net: &KanNetwork) -> String {
    let doc = ModelDoc {
        format: MODEL_FORMAT.to_string(),
        architecture: net.architecture(),
        input_domain: net.input_domain().iter().map(|iv| [iv.lo, iv.hi]).collect(),
        out_of_domain_policy: net.policy().as_str().to_string(),
        layers: net
            .layers()
            .iter()
            .map(|layer| LayerDoc {
                splines: layer
                    .splines()
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| SplineDoc {
                                knots: s.knots().to_vec(),
                                degree: s.degree(),
                                pieces: s.pieces().iter().map(|p| p.coeffs().to_vec()).collect(),
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
}

/// Parses and validates a `polykan/1` JSON document.
pub fn load_model(json: &str) -> Result<KanNetwork> {
    // Two-step parse so a wrong format version is reported as such even if
    // the rest of the document would not deserialize.
    let value: serde_json::Value = serde_json::from_str(json)?;
    match value.get("format").and_then(|v| v.as_str()) {
        None => return Err(Error::schema("format", "missing or non-string")),
        Some(f) if f != MODEL_FORMAT => {
            return Err(Error::schema(
                "format",
                format!("unsupported format {f:?}, expected {MODEL_FORMAT:?}"),
            ));
        }
        Some(_) => {}
    }
    let doc: ModelDoc = serde_json::from_value(value)?;

    if doc.architecture.len() < 2 {
        return Err(Error::schema("architecture", "needs at least two entries"));
    }
    if doc.architecture.contains(&0) {
        return Err(Error::schema(
            "architecture",
            "layer sizes must be positive",
        ));
    }
    if doc.layers.len() + 1 != doc.architecture.len() {
        return Err(Error::schema(
            "layers",
            format!(
                "expected {} layers for this architecture, got {}",
                doc.architecture.len() - 1,
                doc.layers.len()
            ),
        ));
    }
    if doc.input_domain.len() != doc.architecture[0] {
        return Err(Error::schema(
            "input_domain",
            format!(
                "expected {} intervals, got {}",
                doc.architecture[0],
                doc.input_domain.len()
            ),
        ));
    }
    let policy = OutOfDomainPolicy::parse(&doc.out_of_domain_policy)
        .map_err(|e| Error::schema("out_of_domain_policy", e.to_string()))?;
    let mut input_domain = Vec::with_capacity(doc.input_domain.len());
    for (i, [lo, hi]) in doc.input_domain.iter().enumerate() {
        let iv = Interval::new(*lo, *hi)
            .map_err(|e| Error::schema(format!("input_domain[{i}]"), e.to_string()))?;
        if iv.is_degenerate() {
            return Err(Error::schema(
                format!("input_domain[{i}]"),
                "interval must be non-degenerate",
            ));
        }
        input_domain.push(iv);
    }

    let mut layers = Vec::with_capacity(doc.layers.len());
    for (l, layer_doc) in doc.layers.iter().enumerate() {
        let (want_out, want_in) = (doc.architecture[l + 1], doc.architecture[l]);
        if layer_doc.splines.len() != want_out {
            return Err(Error::schema(
                format!("layers[{l}].splines"),
                format!("expected {want_out} rows, got {}", layer_doc.splines.len()),
            ));
        }
        let mut grid = Vec::with_capacity(want_out);
        for (j, row) in layer_doc.splines.iter().enumerate() {
            if row.len() != want_in {
                return Err(Error::schema(
                    format!("layers[{l}].splines[{j}]"),
                    format!("expected {want_in} splines, got {}", row.len()),
                ));
            }
            let mut out_row = Vec::with_capacity(want_in);
            for (i, sd) in row.iter().enumerate() {
                let path = format!("layers[{l}].splines[{j}][{i}]");
                let pieces = sd
                    .pieces
                    .iter()
                    .map(|c| Polynomial::new(c.clone()))
                    .collect();
                let s = PiecewiseSpline::new(sd.knots.clone(), pieces, sd.degree)
                    .map_err(|e| Error::schema(&path, e.to_string()))?;
                out_row.push(s);
            }
            grid.push(out_row);
        }
        let layer = KanLayer::new(grid)
            .map_err(|e| Error::schema(format!("layers[{l}]"), e.to_string()))?;
        layers.push(layer);
    }
    KanNetwork::new(layers, input_domain, policy)
        .map_err(|e| Error::schema("layers", e.to_string()))
}

//! JSON circuit files. All indices are 1-based on disk.
//!
//! ```json
//! {"n": 5, "gates": [{"pos": [1, 2], "neg": []}],
//!  "top": {"kind": "named", "name": "PARITY"}}
//! ```
//!
//! A table top is `{"kind": "table", "arity": 6, "hex": "..."}`; layered
//! circuits replace `gates`/`top` with `layers`, bottom first.

use serde::{Deserialize, Serialize};

use super::circuit::{AndGate, SharedInputCircuit, TopFunction};
use super::layered::{GateKind, LayeredCircuit, Literal};
use super::truth_table::{NamedFunction, TruthTable};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GateJson {
    #[serde(default)]
    pub pos: Vec<usize>,
    #[serde(default)]
    pub neg: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TopJson {
    Named {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arity: Option<usize>,
    },
    Table { arity: usize, hex: String },
    Restricted { base: Box<TopJson>, fixed: Vec<Option<u8>> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub n: usize,
    pub gates: Vec<GateJson>,
    pub top: TopJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LayerGateJson {
    Literals(GateJson),
    Children(Vec<usize>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LayerJson {
    pub kind: String,
    pub gates: Vec<LayerGateJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LayeredJson {
    pub n: usize,
    pub layers: Vec<LayerJson>,
}

/// Parses JSON into `T`, reporting line, column and field path on failure.
pub fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::parse(
            format!("line {} column {} field {}", inner.line(), inner.column(), path),
            inner.to_string(),
        )
    })
}

fn zero_based(indices: &[usize], field: &str) -> Result<Vec<usize>> {
    indices
        .iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| Error::parse(field.to_string(), "indices are 1-based"))
        })
        .collect()
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

fn gate_from_json(g: &GateJson, field: &str) -> Result<AndGate> {
    let pos = zero_based(&g.pos, &format!("{field}.pos"))?;
    let neg = zero_based(&g.neg, &format!("{field}.neg"))?;
    AndGate::new(pos, neg).map_err(|e| Error::parse(field.to_string(), e.to_string()))
}

fn gate_to_json(g: &AndGate) -> GateJson {
    GateJson {
        pos: one_based(g.pos()),
        neg: one_based(g.neg()),
    }
}

pub fn top_from_json(t: &TopJson, m: usize, field: &str) -> Result<TopFunction> {
    match t {
        TopJson::Named { name, arity } => {
            let kind = NamedFunction::from_name(name)
                .ok_or_else(|| Error::parse(format!("{field}.name"), format!("unknown function {name:?}")))?;
            let arity = arity.unwrap_or(m);
            TopFunction::named(kind, arity).map_err(|e| Error::parse(field.to_string(), e.to_string()))
        }
        TopJson::Table { arity, hex } => Ok(TopFunction::Table(
            TruthTable::from_hex(*arity, hex).map_err(|e| Error::parse(format!("{field}.hex"), e.to_string()))?,
        )),
        TopJson::Restricted { base, fixed } => {
            let base = top_from_json(base, fixed.len(), &format!("{field}.base"))?;
            let fixed = fixed
                .iter()
                .map(|v| match v {
                    None => Ok(None),
                    Some(0) => Ok(Some(false)),
                    Some(1) => Ok(Some(true)),
                    Some(other) => Err(Error::parse(format!("{field}.fixed"), format!("value {other} is not 0/1/null"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if fixed.len() != base.arity() {
                return Err(Error::parse(format!("{field}.fixed"), "length differs from base arity"));
            }
            Ok(TopFunction::Restricted {
                base: Box::new(base),
                fixed,
            })
        }
    }
}

pub fn top_to_json(t: &TopFunction) -> TopJson {
    match t {
        TopFunction::Named { kind, arity } => TopJson::Named {
            name: kind.name().to_string(),
            arity: Some(*arity),
        },
        TopFunction::Table(t) => TopJson::Table {
            arity: t.arity(),
            hex: t.to_hex(),
        },
        TopFunction::Restricted { base, fixed } => TopJson::Restricted {
            base: Box::new(top_to_json(base)),
            fixed: fixed.iter().map(|v| v.map(|b| b as u8)).collect(),
        },
    }
}

impl SharedInputCircuit {
    pub fn from_json_value(c: &CircuitJson) -> Result<Self> {
        let gates = c
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| gate_from_json(g, &format!("gates[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let top = top_from_json(&c.top, gates.len(), "top")?;
        SharedInputCircuit::new(c.n, gates, top).map_err(|e| Error::parse("circuit", e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_value(&from_json_str::<CircuitJson>(text)?)
    }

    pub fn to_json_value(&self) -> CircuitJson {
        CircuitJson {
            n: self.n(),
            gates: self.gates().iter().map(gate_to_json).collect(),
            top: top_to_json(self.top()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }
}

fn kind_from_str(s: &str, field: &str) -> Result<GateKind> {
    match s.to_ascii_uppercase().as_str() {
        "AND" => Ok(GateKind::And),
        "OR" => Ok(GateKind::Or),
        _ => Err(Error::parse(field.to_string(), format!("unknown gate kind {s:?}"))),
    }
}

impl LayeredCircuit {
    pub fn from_json_value(c: &LayeredJson) -> Result<Self> {
        let Some(first) = c.layers.first() else {
            return Err(Error::parse("layers", "at least one layer is required"));
        };
        let bottom_kind = kind_from_str(&first.kind, "layers[0].kind")?;
        let mut bottom = Vec::new();
        for (g, gate) in first.gates.iter().enumerate() {
            let field = format!("layers[0].gates[{g}]");
            let LayerGateJson::Literals(lits) = gate else {
                return Err(Error::parse(field, "bottom gates take {\"pos\", \"neg\"}"));
            };
            let pos = zero_based(&lits.pos, &format!("{field}.pos"))?;
            let neg = zero_based(&lits.neg, &format!("{field}.neg"))?;
            bottom.push(
                pos.into_iter()
                    .map(Literal::pos)
                    .chain(neg.into_iter().map(Literal::neg))
                    .collect(),
            );
        }
        let mut upper = Vec::new();
        for (l, layer) in c.layers.iter().enumerate().skip(1) {
            let kind = kind_from_str(&layer.kind, &format!("layers[{l}].kind"))?;
            let expected = if l % 2 == 0 { bottom_kind } else { bottom_kind.flip() };
            if kind != expected {
                return Err(Error::parse(format!("layers[{l}].kind"), "layers must alternate AND/OR"));
            }
            let mut gates = Vec::new();
            for (g, gate) in layer.gates.iter().enumerate() {
                let field = format!("layers[{l}].gates[{g}]");
                let LayerGateJson::Children(children) = gate else {
                    return Err(Error::parse(field, "upper gates are lists of child indices"));
                };
                gates.push(zero_based(children, &field)?);
            }
            upper.push(gates);
        }
        LayeredCircuit::new(c.n, bottom_kind, bottom, upper).map_err(|e| Error::parse("layers", e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_value(&from_json_str::<LayeredJson>(text)?)
    }

    pub fn to_json_value(&self) -> LayeredJson {
        let mut layers = vec![LayerJson {
            kind: self.bottom_kind().name().to_string(),
            gates: self
                .bottom()
                .iter()
                .map(|lits| {
                    LayerGateJson::Literals(GateJson {
                        pos: lits.iter().filter(|l| !l.negated).map(|l| l.var + 1).collect(),
                        neg: lits.iter().filter(|l| l.negated).map(|l| l.var + 1).collect(),
                    })
                })
                .collect(),
        }];
        for (l, layer) in self.upper().iter().enumerate() {
            layers.push(LayerJson {
                kind: self.layer_kind(l + 1).name().to_string(),
                gates: layer.iter().map(|c| LayerGateJson::Children(one_based(c))).collect(),
            });
        }
        LayeredJson { n: self.n(), layers }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_and_table_tops() {
        let c = SharedInputCircuit::from_json(
            r#"{"n":3,"gates":[{"pos":[1,2],"neg":[]},{"pos":[3],"neg":[1]}],"top":{"kind":"named","name":"OR"}}"#,
        )
        .unwrap();
        assert!(c.eval(&[true, true, false]).unwrap());
        let back = SharedInputCircuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let t = SharedInputCircuit::from_json(
            r#"{"n":2,"gates":[{"pos":[1]},{"pos":[2]}],"top":{"kind":"table","arity":2,"hex":"08"}}"#,
        )
        .unwrap();
        assert!(t.eval(&[true, true]).unwrap());
        assert!(!t.eval(&[true, false]).unwrap());
    }

    #[test]
    fn malformed_files_name_the_field() {
        let err = SharedInputCircuit::from_json(r#"{"n":3,"gates":[{"pos":["a"]}],"top":{"kind":"named","name":"OR"}}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gates[0].pos"), "{msg}");
        let err = SharedInputCircuit::from_json(r#"{"n":3,"gates":[{"pos":[0]}],"top":{"kind":"named","name":"OR"}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("gates[0].pos"), "{err}");
        let err = SharedInputCircuit::from_json(r#"{"n":3,"gates":[{"pos":[1]}],"top":{"kind":"named","name":"FOO"}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("top.name"), "{err}");
    }

    #[test]
    fn layered_round_trip() {
        let text = r#"{"n":4,"layers":[
            {"kind":"AND","gates":[{"pos":[1,2]},{"pos":[3],"neg":[4]}]},
            {"kind":"OR","gates":[[1,2]]}]}"#;
        let c = LayeredCircuit::from_json(text).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(LayeredCircuit::from_json(&c.to_json()).unwrap(), c);
        let bad = r#"{"n":4,"layers":[{"kind":"AND","gates":[{"pos":[1]}]},{"kind":"AND","gates":[[1]]}]}"#;
        assert!(LayeredCircuit::from_json(bad).unwrap_err().to_string().contains("layers[1].kind"));
    }
}

//! JSON diagram files.
//!
//! ```json
//! {
//!   "strands": [{"foot": 11, "head": 12, "passages": [[1, 2], [2, 3]]},
//!               {"closed": true, "passages": [[3, 0], [3, 1]]}],
//!   "vertices": {"1": {"kind": "classical", "over": [0, 2], "sign": 1},
//!                "2": {"kind": "virtual"},
//!                "11": {"kind": "endpoint", "label": 1}},
//!   "rotation": {"1": [0, 1, 2, 3], "2": [0, 1, 2, 3]},
//!   "placement": {"1": {"host": [1, 0], "outer": [3, 2]}}
//! }
//! ```
//!
//! Passages are `[vertex, entry slot]`. A placement value may also be an
//! integer face id: faces of all components, taken separately, numbered by
//! their smallest `(vertex, position)` corner. The component is then placed
//! with its largest face inside that face.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ComponentPlacement, DiagramError, Passage, PlanarDiagram, Sign, Strand, VertexKind};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    strands: Vec<RawStrand>,
    vertices: BTreeMap<u32, RawVertex>,
    rotation: BTreeMap<u32, [u8; 4]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    placement: BTreeMap<usize, RawPlacement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrand {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    foot: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    closed: bool,
    passages: Vec<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawVertex {
    Classical {
        over: [u8; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sign: Option<i64>,
    },
    Virtual,
    Endpoint {
        label: u32,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPlacement {
    Face(usize),
    Corners { host: [u32; 2], outer: [u32; 2] },
}

fn parse_err(locus: impl Into<String>, message: impl Into<String>) -> DiagramError {
    DiagramError::Parse { locus: locus.into(), message: message.into() }
}

fn slot(x: u32, locus: &str) -> Result<u8, DiagramError> {
    u8::try_from(x).map_err(|_| parse_err(locus, format!("slot {x} out of range")))
}

/// Parse a diagram file, returning the optional provenance block as well.
pub(crate) fn parse_with_provenance(
    text: &str,
) -> Result<(PlanarDiagram, Option<Value>), DiagramError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let obj = value.as_object().ok_or_else(|| parse_err("root", "expected a JSON object"))?;
    for key in ["strands", "vertices", "rotation"] {
        if !obj.contains_key(key) {
            return Err(parse_err(key, format!("missing field \"{key}\"")));
        }
    }
    let raw: RawDiagram = serde_json::from_value(value.clone()).map_err(|e| {
        let msg = e.to_string();
        let locus = ["strands", "vertices", "rotation", "placement"]
            .into_iter()
            .find(|k| obj.get(*k).is_some_and(|v| field_fails(k, v)))
            .unwrap_or("root");
        parse_err(locus, msg)
    })?;

    let mut d = PlanarDiagram::default();
    for (id, v) in raw.vertices {
        let kind = match v {
            RawVertex::Classical { over, sign } => {
                let sign = match sign {
                    None => None,
                    Some(s) => Some(Sign::from_value(s).ok_or_else(|| {
                        parse_err(format!("vertices.{id}.sign"), format!("sign must be 1 or -1, got {s}"))
                    })?),
                };
                VertexKind::Classical { over, sign }
            }
            RawVertex::Virtual => VertexKind::Virtual,
            RawVertex::Endpoint { label } => VertexKind::Endpoint { label },
        };
        d.vertices.insert(id, kind);
    }
    d.rotation = raw.rotation;
    for (i, s) in raw.strands.into_iter().enumerate() {
        let locus = format!("strands[{i}]");
        let ends = match (s.closed, s.foot, s.head) {
            (true, None, None) => None,
            (false, Some(a), Some(b)) => Some((a, b)),
            _ => {
                return Err(parse_err(locus, "a strand needs both \"foot\" and \"head\", or \"closed\": true"))
            }
        };
        let passages = s
            .passages
            .into_iter()
            .map(|[v, sl]| Ok(Passage { vertex: v, slot: slot(sl, &locus)? }))
            .collect::<Result<Vec<_>, DiagramError>>()?;
        d.strands.push(Strand { passages, ends });
    }

    if !raw.placement.is_empty() {
        let needs_faces = raw.placement.values().any(|p| matches!(p, RawPlacement::Face(_)));
        let faces = if needs_faces {
            let v = d.structural_violations();
            if !v.is_empty() {
                return Err(parse_err(
                    "placement",
                    "face ids need a structurally valid diagram".to_string(),
                ));
            }
            Some(d.faces())
        } else {
            None
        };
        for (c, p) in raw.placement {
            let locus = format!("placement.{c}");
            let placement = match p {
                RawPlacement::Corners { host, outer } => ComponentPlacement {
                    host: (host[0], slot(host[1], &locus)?),
                    outer: (outer[0], slot(outer[1], &locus)?),
                },
                RawPlacement::Face(f) => {
                    let fs = faces.as_ref().unwrap();
                    let host = *fs
                        .raw_face_corners
                        .get(f)
                        .ok_or_else(|| parse_err(&locus, format!("no face {f}")))?
                        .iter()
                        .min()
                        .unwrap();
                    let outer = fs
                        .raw_face_corners
                        .iter()
                        .filter(|cs| fs.vertex_component[&cs[0].0] == c)
                        .fold(None::<&Vec<_>>, |best, cs| match best {
                            Some(b) if b.len() >= cs.len() => Some(b),
                            _ => Some(cs),
                        })
                        .ok_or_else(|| parse_err(&locus, format!("no component {c}")))?;
                    let outer = *outer.iter().min().unwrap();
                    ComponentPlacement {
                        host: (host.0, d.slot_at(host.0, host.1)),
                        outer: (outer.0, d.slot_at(outer.0, outer.1)),
                    }
                }
            };
            d.placement.insert(c, placement);
        }
    }
    Ok((d, raw.provenance))
}

fn field_fails(key: &str, v: &Value) -> bool {
    match key {
        "strands" => serde_json::from_value::<Vec<RawStrand>>(v.clone()).is_err(),
        "vertices" => serde_json::from_value::<BTreeMap<u32, RawVertex>>(v.clone()).is_err(),
        "rotation" => serde_json::from_value::<BTreeMap<u32, [u8; 4]>>(v.clone()).is_err(),
        "placement" => serde_json::from_value::<BTreeMap<usize, RawPlacement>>(v.clone()).is_err(),
        _ => false,
    }
}

pub(crate) fn to_value(d: &PlanarDiagram, provenance: Option<Value>) -> Value {
    let signs = if d.structural_violations().is_empty() { d.compute_signs() } else { BTreeMap::new() };
    let vertices = d
        .vertices
        .iter()
        .map(|(&id, k)| {
            let raw = match k {
                VertexKind::Classical { over, sign } => RawVertex::Classical {
                    over: *over,
                    sign: signs.get(&id).copied().or(*sign).map(|s| s.value() as i64),
                },
                VertexKind::Virtual => RawVertex::Virtual,
                VertexKind::Endpoint { label } => RawVertex::Endpoint { label: *label },
            };
            (id, raw)
        })
        .collect();
    let strands = d
        .strands
        .iter()
        .map(|s| RawStrand {
            foot: s.ends.map(|e| e.0),
            head: s.ends.map(|e| e.1),
            closed: s.ends.is_none(),
            passages: s.passages.iter().map(|p| [p.vertex, p.slot as u32]).collect(),
        })
        .collect();
    let placement = d
        .placement
        .iter()
        .map(|(&c, p)| {
            (
                c,
                RawPlacement::Corners {
                    host: [p.host.0, p.host.1 as u32],
                    outer: [p.outer.0, p.outer.1 as u32],
                },
            )
        })
        .collect();
    let raw = RawDiagram { strands, vertices, rotation: d.rotation.clone(), placement, provenance };
    serde_json::to_value(raw).expect("diagram serializes")
}

impl PlanarDiagram {
    pub fn from_json(text: &str) -> Result<PlanarDiagram, DiagramError> {
        parse_with_provenance(text).map(|(d, _)| d)
    }

    /// Normalized pretty JSON: signs written out, placements as corner pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&to_value(self, None)).unwrap()
    }

    pub fn to_json_value(&self) -> Value {
        to_value(self, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOPF: &str = r#"{
      "strands": [{"foot": 11, "head": 12, "passages": [[1, 2], [2, 3]]},
                  {"foot": 13, "head": 14, "passages": [[1, 3], [2, 2]]}],
      "vertices": {"1": {"kind": "classical", "over": [0, 2]},
                   "2": {"kind": "classical", "over": [0, 2]},
                   "11": {"kind": "endpoint", "label": 1}, "12": {"kind": "endpoint", "label": 2},
                   "13": {"kind": "endpoint", "label": 3}, "14": {"kind": "endpoint", "label": 4}},
      "rotation": {"1": [0, 1, 2, 3], "2": [0, 1, 2, 3]}
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let d = PlanarDiagram::from_json(HOPF).unwrap();
        assert!(d.is_valid(), "{:?}", d.validate());
        let text = d.to_json();
        let e = PlanarDiagram::from_json(&text).unwrap();
        assert_eq!(e, d.clone().with_computed_signs());
        assert_eq!(e.to_json(), text);
    }

    #[test]
    fn missing_rotation_names_the_field() {
        let v: Value = serde_json::from_str(HOPF).unwrap();
        let mut o = v.as_object().unwrap().clone();
        o.remove("rotation");
        let err = PlanarDiagram::from_json(&Value::Object(o).to_string()).unwrap_err();
        match err {
            DiagramError::Parse { locus, .. } => assert_eq!(locus, "rotation"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = PlanarDiagram::from_json("{\n\"strands\": [,]}").unwrap_err();
        match err {
            DiagramError::Parse { locus, .. } => assert!(locus.starts_with("line 2"), "{locus}"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn bad_vertex_kind_is_located() {
        let text = HOPF.replacen(r#""kind": "classical", "over": [0, 2]}"#, r#""kind": "weird"}"#, 1);
        match PlanarDiagram::from_json(&text).unwrap_err() {
            DiagramError::Parse { locus, .. } => assert_eq!(locus, "vertices"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn integer_placement_resolves_to_corners() {
        // two separate crossingless strands, the second placed in face 0
        let text = r#"{
          "strands": [{"foot": 1, "head": 2, "passages": []}, {"foot": 3, "head": 4, "passages": []}],
          "vertices": {"1": {"kind": "endpoint", "label": 1}, "2": {"kind": "endpoint", "label": 2},
                       "3": {"kind": "endpoint", "label": 3}, "4": {"kind": "endpoint", "label": 4}},
          "rotation": {},
          "placement": {"1": 0}
        }"#;
        let d = PlanarDiagram::from_json(text).unwrap();
        assert_eq!(d.placement[&1], ComponentPlacement { host: (1, 0), outer: (3, 0) });
        assert!(d.is_valid());
        assert_eq!(d.face_count(), 1);
    }
}

//! TOML model files.
//!
//! ```toml
//! [[section]]
//! name = "G1"
//! area = 11230.0            # mm²
//! second_moment = 4.68e8    # mm⁴
//! elastic_modulus = 2.05e5  # N/mm²
//! section_modulus = 1.872e6 # mm³, optional
//!
//! [[node]]
//! id = "F1A"
//! x = 0.0                   # mm
//! y = 0.0
//! mass = 0.0                # kg, acts on ux and uy
//! restrain = ["ux", "uy", "rz"]   # optional, default free
//!
//! [[member]]
//! id = "C1A"
//! i = "F1A"
//! j = "F2A"
//! section = "C1"
//! kind = "column"           # or "beam"
//!
//! [[spring]]                # semi-rigid end, group is 1-based
//! member = "G21"
//! end = "i"
//! group = 1
//!
//! [[moment_sensor]]
//! id = "C1A-bot"
//! member = "C1A"
//! end = "i"
//!
//! [[displacement_sensor]]
//! id = "F2-x"
//! node = "F2A"
//! direction = "x"
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    Direction, DisplacementSensor, EndSpring, FrameError, FrameModel, FrameParts, Member,
    MemberEnd, MemberKind, MomentSensor, NmbmVector, Node, Restraint, Section,
};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("model file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("model file: {0}")]
    Reference(String),
    #[error("model file: {0}")]
    Model(#[from] FrameError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionEntry {
    pub name: String,
    pub area: f64,
    pub second_moment: f64,
    pub elastic_modulus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_modulus: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DofName {
    Ux,
    Uy,
    Rz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restrain: Vec<DofName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Beam,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndName {
    I,
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionName {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberEntry {
    pub id: String,
    pub i: String,
    pub j: String,
    pub section: String,
    pub kind: KindName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringEntry {
    pub member: String,
    pub end: EndName,
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentSensorEntry {
    pub id: String,
    pub member: String,
    pub end: EndName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementSensorEntry {
    pub id: String,
    pub node: String,
    pub direction: DirectionName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(rename = "section")]
    pub sections: Vec<SectionEntry>,
    #[serde(rename = "node")]
    pub nodes: Vec<NodeEntry>,
    #[serde(rename = "member")]
    pub members: Vec<MemberEntry>,
    #[serde(rename = "spring", default)]
    pub springs: Vec<SpringEntry>,
    #[serde(rename = "moment_sensor", default)]
    pub moment_sensors: Vec<MomentSensorEntry>,
    #[serde(rename = "displacement_sensor", default)]
    pub displacement_sensors: Vec<DisplacementSensorEntry>,
}

fn end_of(e: EndName) -> MemberEnd {
    match e {
        EndName::I => MemberEnd::I,
        EndName::J => MemberEnd::J,
    }
}

fn end_name(e: MemberEnd) -> EndName {
    match e {
        MemberEnd::I => EndName::I,
        MemberEnd::J => EndName::J,
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ModelFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    pub fn into_model(&self) -> Result<FrameModel<f64>, ModelFileError> {
        let index =
            |names: Vec<&str>, what: &str| -> Result<HashMap<String, usize>, ModelFileError> {
                let mut map = HashMap::new();
                for (i, n) in names.into_iter().enumerate() {
                    if map.insert(n.to_string(), i).is_some() {
                        return Err(ModelFileError::Reference(format!(
                            "duplicate {what} id `{n}`"
                        )));
                    }
                }
                Ok(map)
            };
        let sections = index(
            self.sections.iter().map(|s| s.name.as_str()).collect(),
            "section",
        )?;
        let nodes = index(self.nodes.iter().map(|n| n.id.as_str()).collect(), "node")?;
        let members = index(
            self.members.iter().map(|m| m.id.as_str()).collect(),
            "member",
        )?;
        let lookup = |map: &HashMap<String, usize>, key: &str, ctx: String| {
            map.get(key)
                .copied()
                .ok_or_else(|| ModelFileError::Reference(format!("{ctx}: unknown id `{key}`")))
        };

        let mut parts = FrameParts {
            nodes: Vec::new(),
            sections: Vec::new(),
            members: Vec::new(),
            restraints: Vec::new(),
            springs: Vec::new(),
            moment_sensors: Vec::new(),
            displacement_sensors: Vec::new(),
        };
        for s in &self.sections {
            parts.sections.push(Section {
                name: s.name.clone(),
                area: s.area,
                second_moment: s.second_moment,
                elastic_modulus: s.elastic_modulus,
                section_modulus: s.section_modulus,
            });
        }
        for n in &self.nodes {
            parts.nodes.push(Node {
                id: n.id.clone(),
                x: n.x,
                y: n.y,
                mass: n.mass,
            });
            let mut r = Restraint::FREE;
            for d in &n.restrain {
                match d {
                    DofName::Ux => r.ux = true,
                    DofName::Uy => r.uy = true,
                    DofName::Rz => r.rz = true,
                }
            }
            parts.restraints.push(r);
        }
        for m in &self.members {
            let ctx = || format!("member `{}`", m.id);
            parts.members.push(Member {
                id: m.id.clone(),
                node_i: lookup(&nodes, &m.i, ctx())?,
                node_j: lookup(&nodes, &m.j, ctx())?,
                section: lookup(&sections, &m.section, ctx())?,
                kind: match m.kind {
                    KindName::Beam => MemberKind::Beam,
                    KindName::Column => MemberKind::Column,
                },
            });
        }
        for (k, s) in self.springs.iter().enumerate() {
            if s.group == 0 {
                return Err(ModelFileError::Reference(format!(
                    "spring #{}: groups are numbered from 1",
                    k + 1
                )));
            }
            parts.springs.push(EndSpring {
                member: lookup(&members, &s.member, format!("spring #{}", k + 1))?,
                end: end_of(s.end),
                group: s.group - 1,
            });
        }
        for s in &self.moment_sensors {
            parts.moment_sensors.push(MomentSensor {
                id: s.id.clone(),
                member: lookup(&members, &s.member, format!("moment sensor `{}`", s.id))?,
                end: end_of(s.end),
            });
        }
        for s in &self.displacement_sensors {
            parts.displacement_sensors.push(DisplacementSensor {
                id: s.id.clone(),
                node: lookup(&nodes, &s.node, format!("displacement sensor `{}`", s.id))?,
                direction: match s.direction {
                    DirectionName::X => Direction::X,
                    DirectionName::Y => Direction::Y,
                },
            });
        }
        Ok(FrameModel::new(parts)?)
    }

    pub fn from_model(model: &FrameModel<f64>) -> Self {
        let node_id = |i: usize| model.nodes()[i].id.clone();
        let member_id = |i: usize| model.members()[i].id.clone();
        Self {
            sections: model
                .sections()
                .iter()
                .map(|s| SectionEntry {
                    name: s.name.clone(),
                    area: s.area,
                    second_moment: s.second_moment,
                    elastic_modulus: s.elastic_modulus,
                    section_modulus: s.section_modulus,
                })
                .collect(),
            nodes: model
                .nodes()
                .iter()
                .zip(model.restraints())
                .map(|(n, r)| NodeEntry {
                    id: n.id.clone(),
                    x: n.x,
                    y: n.y,
                    mass: n.mass,
                    restrain: [
                        (r.ux, DofName::Ux),
                        (r.uy, DofName::Uy),
                        (r.rz, DofName::Rz),
                    ]
                    .into_iter()
                    .filter_map(|(on, d)| on.then_some(d))
                    .collect(),
                })
                .collect(),
            members: model
                .members()
                .iter()
                .map(|m| MemberEntry {
                    id: m.id.clone(),
                    i: node_id(m.node_i),
                    j: node_id(m.node_j),
                    section: model.sections()[m.section].name.clone(),
                    kind: match m.kind {
                        MemberKind::Beam => KindName::Beam,
                        MemberKind::Column => KindName::Column,
                    },
                })
                .collect(),
            springs: model
                .springs()
                .iter()
                .map(|s| SpringEntry {
                    member: member_id(s.member),
                    end: end_name(s.end),
                    group: s.group + 1,
                })
                .collect(),
            moment_sensors: model
                .moment_sensors()
                .iter()
                .map(|s| MomentSensorEntry {
                    id: s.id.clone(),
                    member: member_id(s.member),
                    end: end_name(s.end),
                })
                .collect(),
            displacement_sensors: model
                .displacement_sensors()
                .iter()
                .map(|s| DisplacementSensorEntry {
                    id: s.id.clone(),
                    node: node_id(s.node),
                    direction: match s.direction {
                        Direction::X => DirectionName::X,
                        Direction::Y => DirectionName::Y,
                    },
                })
                .collect(),
        }
    }
}

/// nMBM as CSV: `sensor_id,member,end,value_kNm_per_mm`.
pub fn nmbm_csv(model: &FrameModel<f64>, nmbm: &NmbmVector<f64>) -> String {
    let mut out = String::from("sensor_id,member,end,value_kNm_per_mm\n");
    for (s, v) in model.moment_sensors().iter().zip(&nmbm.values) {
        let end = match s.end {
            MemberEnd::I => "i",
            MemberEnd::J => "j",
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.id,
            model.members()[s.member].id,
            end,
            v
        ));
    }
    out
}

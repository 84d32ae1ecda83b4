//! Planar frame finite elements with semi-rigid beam-end springs.
//!
//! Maps a vector of fixity factors to normalized modal bending moments
//! (modal end moments divided by the norm of the modal displacements at the
//! displacement sensors). Units inside the engine are N, mm, s; masses are
//! given in kg and converted to N·s²/mm during assembly; moments are reported
//! in kNm and normalized moments in kNm/mm.

mod assembly;
mod element;
mod file;
mod fixity;
mod library;
mod modal;

use thiserror::Error;

use crate::scalar::Scalar;

pub use assembly::{assemble_system, DofMap};
pub use element::{semi_rigid_local_stiffness, ElementGeometry};
pub use file::{nmbm_csv, ModelFile, ModelFileError};
pub use fixity::{effective_fixity, fixity_to_stiffness, stiffness_to_fixity, RIGID_CAP};
pub use library::{
    one_bay_two_story, one_bay_two_story_layout, two_bay_three_story, two_bay_three_story_layout,
    RegularFrame, SectionSpec, GRAVITY,
};
pub use modal::{
    member_end_moments, modal_analysis, normalized_moments, simulate_nmbm, solve_modes,
    ModalResult, Modes, NmbmVector,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("fixity factor {value} at index {index} is outside [0, 1]")]
    FixityOutOfRange { index: usize, value: f64 },
    #[error("rigid joint (gamma = 1) has no finite rotational stiffness")]
    RigidJoint,
    #[error("expected {expected} fixity factors, got {got}")]
    FixityLength { expected: usize, got: usize },
    #[error("unstable model: stiffness is singular at dofs {dofs:?}")]
    UnstableModel { dofs: Vec<String> },
    #[error("modal solver did not converge (eigenvalue {index})")]
    NoConvergence { index: usize },
    #[error("mode {mode} has non-positive eigenvalue {value}")]
    NegativeEigenvalue { mode: usize, value: f64 },
    #[error("mode {mode} residual {residual:e} exceeds tolerance")]
    Residual { mode: usize, residual: f64 },
    #[error("requested {requested} modes but only {available} mass-carrying dofs")]
    TooManyModes { requested: usize, available: usize },
    #[error("mode {mode} is unobservable: zero displacement at all displacement sensors")]
    UnobservableMode { mode: usize },
    #[error("mode shape has {got} entries, expected {expected}")]
    ShapeLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section<T> {
    pub name: String,
    /// mm²
    pub area: T,
    /// mm⁴
    pub second_moment: T,
    /// N/mm²
    pub elastic_modulus: T,
    /// mm³, only needed for strain-to-moment conversion.
    pub section_modulus: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberKind {
    Beam,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberEnd {
    I,
    J,
}

impl MemberEnd {
    pub fn index(self) -> usize {
        match self {
            MemberEnd::I => 0,
            MemberEnd::J => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node<T> {
    pub id: String,
    /// mm
    pub x: T,
    /// mm
    pub y: T,
    /// Translational lumped mass in kg, applied to both x and y.
    pub mass: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub id: String,
    pub node_i: usize,
    pub node_j: usize,
    pub section: usize,
    pub kind: MemberKind,
}

/// Restrained degrees of freedom of a node (`true` = fixed to ground).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Restraint {
    pub ux: bool,
    pub uy: bool,
    pub rz: bool,
}

impl Restraint {
    pub const FREE: Restraint = Restraint {
        ux: false,
        uy: false,
        rz: false,
    };
    pub const FIXED: Restraint = Restraint {
        ux: true,
        uy: true,
        rz: true,
    };
    pub const PINNED: Restraint = Restraint {
        ux: true,
        uy: true,
        rz: false,
    };

    pub fn any(&self) -> bool {
        self.ux || self.uy || self.rz
    }

    pub(crate) fn as_array(&self) -> [bool; 3] {
        [self.ux, self.uy, self.rz]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndSpring {
    pub member: usize,
    pub end: MemberEnd,
    /// Zero-based spring group; all ends in a group share one fixity factor.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSensor {
    pub id: String,
    pub member: usize,
    pub end: MemberEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementSensor {
    pub id: String,
    pub node: usize,
    pub direction: Direction,
}

/// Everything that defines a frame apart from its fixity factors.
/// Built through [`FrameModel::new`], which checks consistency; immutable
/// afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameModel<T> {
    nodes: Vec<Node<T>>,
    sections: Vec<Section<T>>,
    members: Vec<Member>,
    restraints: Vec<Restraint>,
    springs: Vec<EndSpring>,
    moment_sensors: Vec<MomentSensor>,
    displacement_sensors: Vec<DisplacementSensor>,
    spring_groups: usize,
    // per member: spring group at (end i, end j)
    end_groups: Vec<[Option<usize>; 2]>,
    dofs: DofMap,
}

/// Raw parts of a [`FrameModel`] before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameParts<T> {
    pub nodes: Vec<Node<T>>,
    pub sections: Vec<Section<T>>,
    pub members: Vec<Member>,
    /// One entry per node.
    pub restraints: Vec<Restraint>,
    pub springs: Vec<EndSpring>,
    pub moment_sensors: Vec<MomentSensor>,
    pub displacement_sensors: Vec<DisplacementSensor>,
}

impl<T: Scalar> FrameModel<T> {
    pub fn new(parts: FrameParts<T>) -> Result<Self, FrameError> {
        let FrameParts {
            nodes,
            sections,
            members,
            restraints,
            springs,
            moment_sensors,
            displacement_sensors,
        } = parts;
        let bad = |msg: String| Err(FrameError::InvalidModel(msg));

        if nodes.is_empty() {
            return bad("model has no nodes".into());
        }
        if restraints.len() != nodes.len() {
            return bad(format!(
                "{} restraint entries for {} nodes",
                restraints.len(),
                nodes.len()
            ));
        }
        for node in &nodes {
            if !(node.x.is_finite() && node.y.is_finite()) {
                return bad(format!("node {} has non-finite coordinates", node.id));
            }
            if !(node.mass >= T::zero()) || !node.mass.is_finite() {
                return bad(format!("node {} has invalid mass", node.id));
            }
        }
        if !nodes.iter().any(|n| n.mass > T::zero()) {
            return bad("at least one node must carry mass".into());
        }
        for s in &sections {
            let positive = |v: T| v > T::zero() && v.is_finite();
            if !(positive(s.area) && positive(s.second_moment) && positive(s.elastic_modulus)) {
                return bad(format!("section {} must have positive A, I, E", s.name));
            }
            if let Some(z) = s.section_modulus {
                if !positive(z) {
                    return bad(format!(
                        "section {} has non-positive section modulus",
                        s.name
                    ));
                }
            }
        }
        for m in &members {
            if m.node_i >= nodes.len() || m.node_j >= nodes.len() {
                return bad(format!("member {} references a missing node", m.id));
            }
            if m.node_i == m.node_j {
                return bad(format!("member {} connects a node to itself", m.id));
            }
            if m.section >= sections.len() {
                return bad(format!("member {} references a missing section", m.id));
            }
            let (a, b) = (&nodes[m.node_i], &nodes[m.node_j]);
            if (b.x - a.x).hypot(b.y - a.y) <= T::zero() {
                return bad(format!("member {} has zero length", m.id));
            }
        }

        let mut end_groups = vec![[None, None]; members.len()];
        let mut spring_groups = 0;
        for s in &springs {
            if s.member >= members.len() {
                return bad(format!("spring references missing member {}", s.member));
            }
            let slot = &mut end_groups[s.member][s.end.index()];
            if slot.is_some() {
                return bad(format!(
                    "member {} end {:?} has two springs",
                    members[s.member].id, s.end
                ));
            }
            *slot = Some(s.group);
            spring_groups = spring_groups.max(s.group + 1);
        }
        for g in 0..spring_groups {
            if !springs.iter().any(|s| s.group == g) {
                return bad(format!("spring group {} is never referenced", g + 1));
            }
        }
        for s in &moment_sensors {
            if s.member >= members.len() {
                return bad(format!(
                    "moment sensor {} references a missing member",
                    s.id
                ));
            }
        }
        for s in &displacement_sensors {
            if s.node >= nodes.len() {
                return bad(format!(
                    "displacement sensor {} references a missing node",
                    s.id
                ));
            }
        }

        let dofs = DofMap::new(&nodes, &restraints);
        for s in &displacement_sensors {
            if dofs.free_index(s.node, s.direction as usize).is_none() {
                return bad(format!(
                    "displacement sensor {} sits on a restrained dof",
                    s.id
                ));
            }
        }

        Ok(Self {
            nodes,
            sections,
            members,
            restraints,
            springs,
            moment_sensors,
            displacement_sensors,
            spring_groups,
            end_groups,
            dofs,
        })
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn sections(&self) -> &[Section<T>] {
        &self.sections
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn restraints(&self) -> &[Restraint] {
        &self.restraints
    }

    pub fn springs(&self) -> &[EndSpring] {
        &self.springs
    }

    pub fn moment_sensors(&self) -> &[MomentSensor] {
        &self.moment_sensors
    }

    pub fn displacement_sensors(&self) -> &[DisplacementSensor] {
        &self.displacement_sensors
    }

    /// Number of fixity parameters D.
    pub fn spring_groups(&self) -> usize {
        self.spring_groups
    }

    pub fn end_group(&self, member: usize, end: MemberEnd) -> Option<usize> {
        self.end_groups[member][end.index()]
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn member_length(&self, member: usize) -> T {
        let m = &self.members[member];
        let (a, b) = (&self.nodes[m.node_i], &self.nodes[m.node_j]);
        (b.x - a.x).hypot(b.y - a.y)
    }

    pub fn member_geometry(&self, member: usize) -> ElementGeometry<T> {
        let m = &self.members[member];
        let (a, b) = (&self.nodes[m.node_i], &self.nodes[m.node_j]);
        let sec = &self.sections[m.section];
        ElementGeometry::new(
            b.x - a.x,
            b.y - a.y,
            sec.area,
            sec.second_moment,
            sec.elastic_modulus,
        )
    }

    /// Node ids of a member's two ends.
    pub fn member_nodes(&self, member: usize) -> [usize; 2] {
        let m = &self.members[member];
        [m.node_i, m.node_j]
    }

    pub fn members_at(&self, node: usize) -> usize {
        self.members
            .iter()
            .filter(|m| m.node_i == node || m.node_j == node)
            .count()
    }

    /// Copy of the model with every node mirrored about `x = axis`.
    pub fn mirrored(&self, axis: T) -> Self {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.x = axis + axis - n.x;
        }
        out
    }
}

/// Fixity factors γ ∈ [0, 1], one per spring group.
#[derive(Debug, Clone, PartialEq)]
pub struct FixityVector<T>(Vec<T>);

impl<T: Scalar> FixityVector<T> {
    pub fn new(gamma: Vec<T>) -> Result<Self, FrameError> {
        for (index, &g) in gamma.iter().enumerate() {
            if !(g >= T::zero() && g <= T::one()) {
                return Err(FrameError::FixityOutOfRange {
                    index,
                    value: crate::scalar::to_f64(g),
                });
            }
        }
        Ok(Self(gamma))
    }

    pub fn uniform(value: T, len: usize) -> Result<Self, FrameError> {
        Self::new(vec![value; len])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> std::ops::Index<usize> for FixityVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

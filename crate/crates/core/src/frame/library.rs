use crate::scalar::{lit, Scalar};

use super::{
    Direction, DisplacementSensor, EndSpring, FrameError, FrameModel, FrameParts, Member,
    MemberEnd, MemberKind, MomentSensor, Node, Restraint, Section,
};

/// Standard gravity in mm/s².
pub const GRAVITY: f64 = 9806.65;

/// Section data in file units (f64).
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpec {
    pub name: String,
    pub area: f64,
    pub second_moment: f64,
    pub elastic_modulus: f64,
    pub section_modulus: Option<f64>,
}

/// A regular multi-bay, multi-story moment frame with semi-rigid beam ends.
///
/// Spring groups run floor by floor from the lowest beam level upward; within
/// a floor they run left to right with one group per exterior beam end and
/// one shared group for the pair of beam ends meeting at each interior
/// column. Moment sensors sit at the bottom and top of every column (story by
/// story, left to right); one horizontal displacement sensor sits at the left
/// node of each floor.
///
/// Lumped masses use tributary lengths: each beam's line load plus self
/// weight goes half to each end node, each column's self weight half to each
/// end node, and `floor_mass` is split evenly over a floor's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularFrame {
    /// Bay widths in mm, left to right.
    pub bays: Vec<f64>,
    /// Story heights in mm, bottom to top.
    pub stories: Vec<f64>,
    pub sections: Vec<SectionSpec>,
    /// Section index per beam level (length = stories).
    pub beam_sections: Vec<usize>,
    /// Section index per story of columns.
    pub column_sections: Vec<usize>,
    pub base: Restraint,
    /// Beam line load in N/mm (equivalently kN/m) in addition to self weight.
    pub line_load: f64,
    /// Specific gravity of the steel (dimensionless, water = 1).
    pub specific_gravity: f64,
    /// Extra mass per floor in kg.
    pub floor_mass: f64,
}

impl RegularFrame {
    pub fn build<T: Scalar>(&self) -> Result<FrameModel<T>, FrameError> {
        let n_lines = self.bays.len() + 1;
        let n_floors = self.stories.len() + 1;
        if self.bays.is_empty() || self.stories.is_empty() {
            return Err(FrameError::InvalidModel(
                "need at least one bay and one story".into(),
            ));
        }
        if self.beam_sections.len() != self.stories.len()
            || self.column_sections.len() != self.stories.len()
        {
            return Err(FrameError::InvalidModel(
                "one beam and one column section per story required".into(),
            ));
        }
        let line_name = |l: usize| -> String {
            if l < 26 {
                ((b'A' + l as u8) as char).to_string()
            } else {
                format!("L{}", l + 1)
            }
        };
        let node_at = |floor: usize, line: usize| floor * n_lines + line;

        let mut xs = vec![0.0; n_lines];
        for (i, w) in self.bays.iter().enumerate() {
            xs[i + 1] = xs[i] + w;
        }
        let mut ys = vec![0.0; n_floors];
        for (i, h) in self.stories.iter().enumerate() {
            ys[i + 1] = ys[i] + h;
        }

        // unit weight N/mm³
        let unit_weight = self.specific_gravity * 1e-3 * 1e-6 * GRAVITY;
        let mut weight = vec![0.0; n_floors * n_lines];
        let mut members = Vec::new();
        let mut springs = Vec::new();
        let mut moment_sensors = Vec::new();

        for story in 0..self.stories.len() {
            let sec = self.column_sections[story];
            let w =
                self.sections.get(sec).map_or(0.0, |s| s.area) * unit_weight * self.stories[story];
            for line in 0..n_lines {
                let (lo, hi) = (node_at(story, line), node_at(story + 1, line));
                weight[lo] += w / 2.0;
                weight[hi] += w / 2.0;
                let id = format!("C{}{}", story + 1, line_name(line));
                let member = members.len();
                members.push(Member {
                    id: id.clone(),
                    node_i: lo,
                    node_j: hi,
                    section: sec,
                    kind: MemberKind::Column,
                });
                moment_sensors.push(MomentSensor {
                    id: format!("{id}-bot"),
                    member,
                    end: MemberEnd::I,
                });
                moment_sensors.push(MomentSensor {
                    id: format!("{id}-top"),
                    member,
                    end: MemberEnd::J,
                });
            }
        }

        let mut group = 0;
        for level in 0..self.stories.len() {
            let floor = level + 1;
            let sec = self.beam_sections[level];
            let area = self.sections.get(sec).map_or(0.0, |s| s.area);
            for (bay, width) in self.bays.iter().enumerate() {
                let (l, r) = (node_at(floor, bay), node_at(floor, bay + 1));
                let w = (self.line_load + area * unit_weight) * width;
                weight[l] += w / 2.0;
                weight[r] += w / 2.0;
                let member = members.len();
                members.push(Member {
                    id: format!("G{}{}", floor + 1, bay + 1),
                    node_i: l,
                    node_j: r,
                    section: sec,
                    kind: MemberKind::Beam,
                });
                // left end: exterior group, or the shared interior group opened by the previous bay
                let left_group = if bay == 0 {
                    group += 1;
                    group - 1
                } else {
                    group - 1
                };
                springs.push(EndSpring {
                    member,
                    end: MemberEnd::I,
                    group: left_group,
                });
                group += 1;
                springs.push(EndSpring {
                    member,
                    end: MemberEnd::J,
                    group: group - 1,
                });
            }
        }

        let nodes = (0..n_floors)
            .flat_map(|f| (0..n_lines).map(move |l| (f, l)))
            .map(|(f, l)| {
                let idx = node_at(f, l);
                let extra = if f > 0 {
                    self.floor_mass / n_lines as f64
                } else {
                    0.0
                };
                Node {
                    id: format!("F{}{}", f + 1, line_name(l)),
                    x: lit::<T>(xs[l]),
                    y: lit::<T>(ys[f]),
                    // N / (mm/s²) = N·s²/mm = 1000 kg
                    mass: lit::<T>(weight[idx] / GRAVITY * 1e3 + extra),
                }
            })
            .collect();
        let restraints = (0..n_floors * n_lines)
            .map(|i| {
                if i < n_lines {
                    self.base
                } else {
                    Restraint::FREE
                }
            })
            .collect();
        let displacement_sensors = (1..n_floors)
            .map(|f| DisplacementSensor {
                id: format!("F{}-x", f + 1),
                node: node_at(f, 0),
                direction: Direction::X,
            })
            .collect();
        let sections = self
            .sections
            .iter()
            .map(|s| Section {
                name: s.name.clone(),
                area: lit(s.area),
                second_moment: lit(s.second_moment),
                elastic_modulus: lit(s.elastic_modulus),
                section_modulus: s.section_modulus.map(lit),
            })
            .collect();

        FrameModel::new(FrameParts {
            nodes,
            sections,
            members,
            restraints,
            springs,
            moment_sensors,
            displacement_sensors,
        })
    }
}

const STEEL_E: f64 = 2.05e5;

fn spec(name: &str, area: f64, second_moment: f64, depth: f64) -> SectionSpec {
    SectionSpec {
        name: name.into(),
        area,
        second_moment,
        elastic_modulus: STEEL_E,
        section_modulus: Some(second_moment / (depth / 2.0)),
    }
}

/// Layout of the three-story, two-bay frame used for the synthetic study:
/// 8 m bays, 4 m stories, fixed bases, G1 girders on floors 2-3, G2 on the
/// roof, C1 columns in stories 1-2 and C2 in story 3; 43.75 kN/m beam load.
pub fn two_bay_three_story_layout() -> RegularFrame {
    RegularFrame {
        bays: vec![8000.0, 8000.0],
        stories: vec![4000.0, 4000.0, 4000.0],
        sections: vec![
            spec("G1", 1.123e4, 4.680e8, 500.0),
            spec("G2", 8.337e3, 2.350e8, 400.0),
            spec("C1", 2.043e4, 2.620e8, 300.0),
            spec("C2", 1.345e4, 1.830e8, 300.0),
        ],
        beam_sections: vec![0, 0, 1],
        column_sections: vec![2, 2, 3],
        base: Restraint::FIXED,
        line_load: 43.75,
        specific_gravity: 7.85,
        floor_mass: 0.0,
    }
}

pub fn two_bay_three_story<T: Scalar>() -> FrameModel<T> {
    two_bay_three_story_layout()
        .build()
        .expect("bundled frame is valid")
}

/// One-bay, two-story frame with pinned column bases and 6800 kg added per
/// floor; four spring groups (floor 2 west/east, roof west/east).
pub fn one_bay_two_story_layout() -> RegularFrame {
    RegularFrame {
        bays: vec![6000.0],
        stories: vec![3000.0, 3000.0],
        sections: vec![
            spec("G", 4.678e3, 7.21e7, 300.0),
            spec("C", 6.67e3, 4.0e7, 200.0),
        ],
        beam_sections: vec![0, 0],
        column_sections: vec![1, 1],
        base: Restraint::PINNED,
        line_load: 0.0,
        specific_gravity: 7.85,
        floor_mass: 6800.0,
    }
}

pub fn one_bay_two_story<T: Scalar>() -> FrameModel<T> {
    one_bay_two_story_layout()
        .build()
        .expect("bundled frame is valid")
}

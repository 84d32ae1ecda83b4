use crate::linalg::{Cholesky, Matrix};
use crate::scalar::{lit, Scalar};

use super::fixity::effective_fixity;
use super::{FixityVector, FrameError, FrameModel, MemberEnd, Node, Restraint};

const DOF_NAMES: [&str; 3] = ["ux", "uy", "rz"];

/// Numbering of the unrestrained degrees of freedom, node-major
/// (ux, uy, rz per node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    free: Vec<Option<usize>>,
    labels: Vec<String>,
}

impl DofMap {
    pub(crate) fn new<T>(nodes: &[Node<T>], restraints: &[Restraint]) -> Self {
        let mut free = Vec::with_capacity(nodes.len() * 3);
        let mut labels = Vec::new();
        for (node, r) in nodes.iter().zip(restraints) {
            for (d, fixed) in r.as_array().into_iter().enumerate() {
                if fixed {
                    free.push(None);
                } else {
                    free.push(Some(labels.len()));
                    labels.push(format!("{}.{}", node.id, DOF_NAMES[d]));
                }
            }
        }
        Self { free, labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Free-DOF index of `(node, local dof)` with local dof 0 = ux, 1 = uy, 2 = rz.
    pub fn free_index(&self, node: usize, dof: usize) -> Option<usize> {
        self.free[node * 3 + dof]
    }

    pub fn label(&self, free: usize) -> &str {
        &self.labels[free]
    }

    pub(crate) fn element_dofs(&self, nodes: [usize; 2]) -> [Option<usize>; 6] {
        let mut out = [None; 6];
        for (k, &n) in nodes.iter().enumerate() {
            for d in 0..3 {
                out[k * 3 + d] = self.free_index(n, d);
            }
        }
        out
    }
}

/// Assemble the stiffness and (diagonal, lumped) mass matrices over the free
/// DOFs. Mass is in N·s²/mm.
///
/// Fails with [`FrameError::UnstableModel`] when the stiffness matrix is
/// singular, i.e. the frame is a mechanism for the given fixities.
pub fn assemble_system<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
) -> Result<(Matrix<T>, Matrix<T>), FrameError> {
    let (k, m) = assemble_unchecked(model, theta)?;
    if let Err(pivot) = Cholesky::new(&k, stability_tolerance::<T>()) {
        return Err(FrameError::UnstableModel {
            dofs: vec![model.dofs().label(pivot).to_string()],
        });
    }
    Ok((k, m))
}

pub(crate) fn stability_tolerance<T: Scalar>() -> T {
    T::epsilon() * lit(1e3)
}

pub(crate) fn member_fixities<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
    member: usize,
) -> (T, T) {
    let end = |e: MemberEnd| match model.end_group(member, e) {
        Some(g) => effective_fixity(theta[g]),
        None => T::one(),
    };
    (end(MemberEnd::I), end(MemberEnd::J))
}

pub(crate) fn assemble_unchecked<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
) -> Result<(Matrix<T>, Matrix<T>), FrameError> {
    if theta.len() != model.spring_groups() {
        return Err(FrameError::FixityLength {
            expected: model.spring_groups(),
            got: theta.len(),
        });
    }
    let dofs = model.dofs();
    let n = dofs.len();
    let mut k = Matrix::zeros(n, n);
    for member in 0..model.members().len() {
        let geom = model.member_geometry(member);
        let (ri, rj) = member_fixities(model, theta, member);
        let ke = geom.global_stiffness(ri, rj);
        let map = dofs.element_dofs(model.member_nodes(member));
        for a in 0..6 {
            let Some(p) = map[a] else { continue };
            for b in 0..6 {
                if let Some(q) = map[b] {
                    k[(p, q)] += ke[a][b];
                }
            }
        }
    }

    // kg -> N·s²/mm
    let to_mass = lit::<T>(1e-3);
    let mut m = Matrix::zeros(n, n);
    for (i, node) in model.nodes().iter().enumerate() {
        for d in 0..2 {
            if let Some(p) = dofs.free_index(i, d) {
                m[(p, p)] = node.mass * to_mass;
            }
        }
    }
    Ok((k, m))
}

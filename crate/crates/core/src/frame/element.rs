use crate::scalar::{lit, Scalar};

/// Geometry and section data for one 2-node planar frame element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry<T> {
    pub length: T,
    pub cos: T,
    pub sin: T,
    pub axial: T,
    pub flexural: T,
}

impl<T: Scalar> ElementGeometry<T> {
    pub fn new(dx: T, dy: T, area: T, second_moment: T, modulus: T) -> Self {
        let length = dx.hypot(dy);
        Self {
            length,
            cos: dx / length,
            sin: dy / length,
            axial: modulus * area,
            flexural: modulus * second_moment,
        }
    }

    /// Local element stiffness with the given end fixities.
    pub fn local_stiffness(&self, fixity_i: T, fixity_j: T) -> [[T; 6]; 6] {
        semi_rigid_local_stiffness(self.axial, self.flexural, self.length, fixity_i, fixity_j)
    }

    /// Rotate global nodal displacements (u, v, θ per node) into the local frame.
    pub fn to_local(&self, global: &[T; 6]) -> [T; 6] {
        let (c, s) = (self.cos, self.sin);
        [
            c * global[0] + s * global[1],
            -s * global[0] + c * global[1],
            global[2],
            c * global[3] + s * global[4],
            -s * global[3] + c * global[4],
            global[5],
        ]
    }

    /// `Tᵀ k T`.
    pub fn global_stiffness(&self, fixity_i: T, fixity_j: T) -> [[T; 6]; 6] {
        let k = self.local_stiffness(fixity_i, fixity_j);
        let (c, s) = (self.cos, self.sin);
        let z = T::zero();
        let mut t = [[z; 6]; 6];
        for b in [0, 3] {
            t[b][b] = c;
            t[b][b + 1] = s;
            t[b + 1][b] = -s;
            t[b + 1][b + 1] = c;
            t[b + 2][b + 2] = T::one();
        }
        let mut kt = [[z; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                let mut acc = z;
                for m in 0..6 {
                    acc += k[i][m] * t[m][j];
                }
                kt[i][j] = acc;
            }
        }
        let mut out = [[z; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                let mut acc = z;
                for m in 0..6 {
                    acc += t[m][i] * kt[m][j];
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

/// Local stiffness of an Euler–Bernoulli frame element whose ends are
/// connected to the nodes through rotational springs, expressed through the
/// end fixity factors r₁, r₂ ∈ [0, 1] (the springs are statically condensed
/// out). DOF order: (u₁, v₁, θ₁, u₂, v₂, θ₂).
///
/// With e = 4 − r₁r₂ the bending terms are
///
/// ```text
/// k_vv   = 12 EI/L³ · (r₁ + r₂ + r₁r₂) / e
/// k_vθ₁  =  6 EI/L² · r₁ (2 + r₂) / e
/// k_vθ₂  =  6 EI/L² · r₂ (2 + r₁) / e
/// k_θ₁θ₁ = 12 EI/L  · r₁ / e
/// k_θ₂θ₂ = 12 EI/L  · r₂ / e
/// k_θ₁θ₂ =  6 EI/L  · r₁ r₂ / e
/// ```
///
/// r = 1 at both ends recovers the rigid element (12, 6L, 4L², 2L²); r = 0
/// at both ends leaves a pin-ended truss bar.
pub fn semi_rigid_local_stiffness<T: Scalar>(ea: T, ei: T, length: T, r1: T, r2: T) -> [[T; 6]; 6] {
    let z = T::zero();
    let (two, four, six, twelve) = (lit::<T>(2.0), lit::<T>(4.0), lit::<T>(6.0), lit::<T>(12.0));
    let l = length;
    let e = four - r1 * r2;
    let kvv = twelve * ei / (l * l * l) * (r1 + r2 + r1 * r2) / e;
    let kv1 = six * ei / (l * l) * r1 * (two + r2) / e;
    let kv2 = six * ei / (l * l) * r2 * (two + r1) / e;
    let k11 = twelve * ei / l * r1 / e;
    let k22 = twelve * ei / l * r2 / e;
    let k12 = six * ei / l * r1 * r2 / e;
    let ka = ea / l;
    [
        [ka, z, z, -ka, z, z],
        [z, kvv, kv1, z, -kvv, kv2],
        [z, kv1, k11, z, -kv1, k12],
        [-ka, z, z, ka, z, z],
        [z, -kvv, -kv1, z, kvv, -kv2],
        [z, kv2, k12, z, -kv2, k22],
    ]
}

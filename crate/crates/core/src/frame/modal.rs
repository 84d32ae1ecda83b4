use crate::linalg::{Cholesky, Matrix, SymmetricEigen};
use crate::scalar::{lit, to_f64, Scalar};

use super::assembly::{assemble_unchecked, member_fixities, stability_tolerance};
use super::{assemble_system, FixityVector, FrameError, FrameModel, MemberEnd};

/// Generalized eigenpairs of `K φ = ω² M φ`, lowest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Modes<T> {
    /// Circular frequencies, rad/s, ascending.
    pub frequencies: Vec<T>,
    /// One vector per mode over all free DOFs (mm / rad, arbitrary scale).
    pub shapes: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalResult<T> {
    pub frequencies: Vec<T>,
    pub mode_shapes: Vec<Vec<T>>,
    /// Per mode, moments at the model's moment sensors in kNm, on the same
    /// scale as the mode shape.
    pub member_end_moments: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmbmVector<T> {
    /// kNm/mm, one entry per moment sensor.
    pub values: Vec<T>,
    /// 1-based mode number.
    pub mode_index: usize,
}

/// Lowest `n_modes` eigenpairs of the pencil (K, M) with diagonal M.
///
/// DOFs without mass are removed by exact static condensation
/// `K_c = K_mm − K_ms K_ss⁻¹ K_sm`; the reduced problem is symmetrized with
/// `M^{-1/2}` and the massless part of each shape is recovered as
/// `φ_s = −K_ss⁻¹ K_sm φ_m`.
pub fn solve_modes<T: Scalar>(
    k: &Matrix<T>,
    m: &Matrix<T>,
    n_modes: usize,
) -> Result<Modes<T>, FrameError> {
    solve_modes_labeled(k, m, n_modes, &|i| format!("dof {i}"))
}

pub(crate) fn solve_modes_labeled<T: Scalar>(
    k: &Matrix<T>,
    m: &Matrix<T>,
    n_modes: usize,
    label: &dyn Fn(usize) -> String,
) -> Result<Modes<T>, FrameError> {
    let n = k.rows();
    let mass = m.diagonal();
    let massive: Vec<usize> = (0..n).filter(|&i| mass[i] > T::zero()).collect();
    let massless: Vec<usize> = (0..n).filter(|&i| !(mass[i] > T::zero())).collect();
    if n_modes == 0 || n_modes > massive.len() {
        return Err(FrameError::TooManyModes {
            requested: n_modes,
            available: massive.len(),
        });
    }

    let kmm = k.select(&massive, &massive);
    let (condensed, recovery) = if massless.is_empty() {
        (kmm, None)
    } else {
        let kss = k.select(&massless, &massless);
        let ksm = k.select(&massless, &massive);
        let chol = Cholesky::new(&kss, stability_tolerance::<T>()).map_err(|p| {
            FrameError::UnstableModel {
                dofs: vec![label(massless[p])],
            }
        })?;
        // X = K_ss⁻¹ K_sm
        let x = chol.solve_matrix(&ksm);
        let mut kc = kmm;
        for i in 0..massive.len() {
            for j in 0..massive.len() {
                let mut s = T::zero();
                for p in 0..massless.len() {
                    s += ksm[(p, i)] * x[(p, j)];
                }
                kc[(i, j)] -= s;
            }
        }
        (kc, Some(x))
    };

    let inv_sqrt: Vec<T> = massive.iter().map(|&i| T::one() / mass[i].sqrt()).collect();
    let nm = massive.len();
    let mut a = Matrix::zeros(nm, nm);
    for i in 0..nm {
        for j in 0..=i {
            let v =
                (condensed[(i, j)] + condensed[(j, i)]) * lit::<T>(0.5) * inv_sqrt[i] * inv_sqrt[j];
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let no_conv = |e: crate::linalg::NoConvergence| FrameError::NoConvergence { index: e.index };

    let recover = |eig: &SymmetricEigen<T>| -> Result<Modes<T>, FrameError> {
        let mut frequencies = Vec::with_capacity(n_modes);
        let mut shapes = Vec::with_capacity(n_modes);
        for mode in 0..n_modes {
            let lambda = eig.values[mode];
            if !(lambda > T::zero()) {
                return Err(FrameError::NegativeEigenvalue {
                    mode: mode + 1,
                    value: to_f64(lambda),
                });
            }
            let y = eig.vector(mode);
            let mut phi = vec![T::zero(); n];
            let phi_m: Vec<T> = y.iter().zip(&inv_sqrt).map(|(&v, &s)| v * s).collect();
            for (a, &i) in massive.iter().enumerate() {
                phi[i] = phi_m[a];
            }
            if let Some(x) = &recovery {
                for (p, &i) in massless.iter().enumerate() {
                    let mut s = T::zero();
                    for (a, &v) in phi_m.iter().enumerate() {
                        s += x[(p, a)] * v;
                    }
                    phi[i] = -s;
                }
            }
            let residual = eigen_residual(k, &mass, lambda, &phi);
            if !(residual <= T::eigen_residual_tolerance()) {
                return Err(FrameError::Residual {
                    mode: mode + 1,
                    residual: to_f64(residual),
                });
            }
            frequencies.push(lambda.sqrt());
            shapes.push(phi);
        }
        Ok(Modes {
            frequencies,
            shapes,
        })
    };

    // few modes of a larger system: partial solve, full solve if it misses
    if 2 * n_modes <= nm {
        let fast = SymmetricEigen::lowest(&a, n_modes)
            .map_err(no_conv)
            .and_then(|eig| recover(&eig));
        if let Ok(modes) = fast {
            return Ok(modes);
        }
    }
    recover(&SymmetricEigen::new(&a).map_err(no_conv)?)
}

/// `‖Kφ − ω²Mφ‖ / ‖Kφ‖` for diagonal M.
pub(crate) fn eigen_residual<T: Scalar>(k: &Matrix<T>, mass: &[T], lambda: T, phi: &[T]) -> T {
    let kphi = k.mul_vec(phi);
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..phi.len() {
        let r = kphi[i] - lambda * mass[i] * phi[i];
        num += r * r;
        den += kphi[i] * kphi[i];
    }
    (num / den).sqrt()
}

/// Member-end bending moments (kNm) at the model's moment sensors for a
/// displacement field over the free DOFs.
///
/// A sensor at a member end that meets an unrestrained-rotation support with
/// no other member framing in reads exactly zero.
pub fn member_end_moments<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
    shape: &[T],
) -> Result<Vec<T>, FrameError> {
    let dofs = model.dofs();
    if shape.len() != dofs.len() {
        return Err(FrameError::ShapeLength {
            expected: dofs.len(),
            got: shape.len(),
        });
    }
    if theta.len() != model.spring_groups() {
        return Err(FrameError::FixityLength {
            expected: model.spring_groups(),
            got: theta.len(),
        });
    }
    // N·mm -> kNm
    let to_knm = lit::<T>(1e-6);
    let mut out = Vec::with_capacity(model.moment_sensors().len());
    for sensor in model.moment_sensors() {
        let nodes = model.member_nodes(sensor.member);
        let node = nodes[sensor.end.index()];
        let restraint = model.restraints()[node];
        if restraint.any() && !restraint.rz && model.members_at(node) == 1 {
            out.push(T::zero());
            continue;
        }
        let geom = model.member_geometry(sensor.member);
        let (ri, rj) = member_fixities(model, theta, sensor.member);
        let ke = geom.local_stiffness(ri, rj);
        let map = dofs.element_dofs(nodes);
        let mut global = [T::zero(); 6];
        for (a, slot) in map.iter().enumerate() {
            if let Some(p) = slot {
                global[a] = shape[*p];
            }
        }
        let local = geom.to_local(&global);
        let row = match sensor.end {
            MemberEnd::I => 2,
            MemberEnd::J => 5,
        };
        let moment = ke[row]
            .iter()
            .zip(&local)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        out.push(moment * to_knm);
    }
    Ok(out)
}

/// Full modal analysis: frequencies, shapes, and sensor moments for the
/// lowest `n_modes` modes.
pub fn modal_analysis<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
    n_modes: usize,
) -> Result<ModalResult<T>, FrameError> {
    let (k, m) = assemble_system(model, theta)?;
    let modes = solve_modes_labeled(&k, &m, n_modes, &|i| model.dofs().label(i).to_string())?;
    let member_end_moments = modes
        .shapes
        .iter()
        .map(|s| member_end_moments(model, theta, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModalResult {
        frequencies: modes.frequencies,
        mode_shapes: modes.shapes,
        member_end_moments,
    })
}

/// Normalized modal bending moments `r / ‖d‖` for mode `mode_index`
/// (1-based). Mode shapes are sign-normalized so the first nonzero
/// displacement-sensor reading is positive.
pub fn simulate_nmbm<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
    mode_index: usize,
) -> Result<NmbmVector<T>, FrameError> {
    // Stability is checked through the condensation and eigen solve; the
    // extra full factorization in `assemble_system` is skipped on this path.
    let (k, m) = assemble_unchecked(model, theta)?;
    if mode_index == 0 {
        return Err(FrameError::TooManyModes {
            requested: 0,
            available: 0,
        });
    }
    let modes = solve_modes_labeled(&k, &m, mode_index, &|i| model.dofs().label(i).to_string())?;
    normalized_moments(model, theta, &modes.shapes[mode_index - 1], mode_index)
}

/// nMBM of a given mode shape; the result does not depend on the shape's
/// scale or sign.
pub fn normalized_moments<T: Scalar>(
    model: &FrameModel<T>,
    theta: &FixityVector<T>,
    shape: &[T],
    mode_index: usize,
) -> Result<NmbmVector<T>, FrameError> {
    let dofs = model.dofs();
    let d: Vec<T> = model
        .displacement_sensors()
        .iter()
        .map(|s| {
            dofs.free_index(s.node, s.direction as usize)
                .map_or(T::zero(), |p| shape[p])
        })
        .collect();
    let norm = d.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    let Some(&lead) = d.iter().find(|v| **v != T::zero()) else {
        return Err(FrameError::UnobservableMode { mode: mode_index });
    };
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(FrameError::UnobservableMode { mode: mode_index });
    }
    let signed_norm = if lead > T::zero() { norm } else { -norm };
    let r = member_end_moments(model, theta, shape)?;
    Ok(NmbmVector {
        values: r.into_iter().map(|v| v / signed_norm).collect(),
        mode_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_dof_frequency() {
        let k = Matrix::from_rows(&[vec![4.0f64]]);
        let m = Matrix::from_rows(&[vec![1.0]]);
        let modes = solve_modes(&k, &m, 1).unwrap();
        assert!((modes.frequencies[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_dof_chain() {
        // springs 2 (ground) and 1 (between masses), unit masses
        let k = Matrix::from_rows(&[vec![3.0f64, -1.0], vec![-1.0, 1.0]]);
        let m = Matrix::identity(2);
        let modes = solve_modes(&k, &m, 2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((modes.frequencies[0].powi(2) - (2.0 - s2)).abs() < 1e-13);
        assert!((modes.frequencies[1].powi(2) - (2.0 + s2)).abs() < 1e-13);
    }

    #[test]
    fn massless_dof_is_condensed_exactly() {
        // chain ground -k1- massless -k2- mass: series stiffness k1 k2 / (k1 + k2)
        let (k1, k2, mass) = (6.0f64, 3.0, 2.0);
        let k = Matrix::from_rows(&[vec![k1 + k2, -k2], vec![-k2, k2]]);
        let m = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.0, mass]]);
        let modes = solve_modes(&k, &m, 1).unwrap();
        let expected = (k1 * k2 / (k1 + k2) / mass).sqrt();
        assert!((modes.frequencies[0] - expected).abs() < 1e-14);
        let phi = &modes.shapes[0];
        // massless node sits at the static deflection k2/(k1+k2) of the mass
        assert!((phi[0] / phi[1] - k2 / (k1 + k2)).abs() < 1e-14);
    }

    #[test]
    fn too_many_modes_is_rejected() {
        let k = Matrix::from_rows(&[vec![4.0f64]]);
        let m = Matrix::from_rows(&[vec![1.0]]);
        assert!(matches!(
            solve_modes(&k, &m, 2),
            Err(FrameError::TooManyModes { .. })
        ));
        assert!(matches!(
            solve_modes(&k, &m, 0),
            Err(FrameError::TooManyModes { .. })
        ));
    }

    #[test]
    fn singular_massless_block_is_unstable() {
        let k = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        let m = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            solve_modes(&k, &m, 1),
            Err(FrameError::UnstableModel { .. })
        ));
    }
}

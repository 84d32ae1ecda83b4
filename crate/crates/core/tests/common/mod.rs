#![allow(dead_code)]

pub mod oracles;

use dphbmu::frame::{
    assemble_system, modal_analysis, simulate_nmbm, FixityVector, FrameModel, RegularFrame,
    Restraint, SectionSpec,
};
use dphbmu::linalg::Matrix;
use nalgebra::DMatrix;
use rand::Rng;

pub fn to_dense(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// ω² of (K, M) from the dense reference: with K = LLᵀ the nonzero
/// eigenvalues μ of L⁻¹ M L⁻ᵀ give ω² = 1/μ.
pub fn oracle_omega2(k: &Matrix<f64>, m: &Matrix<f64>) -> Vec<f64> {
    let k = to_dense(k);
    let m = to_dense(m);
    let l = k.cholesky().expect("stiffness is positive definite").l();
    let linv = l.clone().try_inverse().unwrap();
    let a = &linv * m * linv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let eig = a.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut w2: Vec<f64> = eig
        .eigenvalues
        .iter()
        .filter(|&&mu| mu > max * 1e-12)
        .map(|&mu| 1.0 / mu)
        .collect();
    w2.sort_by(f64::total_cmp);
    w2
}

/// Largest relative gap between solver and oracle ω² over all modes.
pub fn oracle_gap(model: &FrameModel<f64>, theta: &FixityVector<f64>) -> f64 {
    let (k, m) = assemble_system(model, theta).unwrap();
    let expected = oracle_omega2(&k, &m);
    let modal = modal_analysis(model, theta, expected.len()).unwrap();
    modal
        .frequencies
        .iter()
        .zip(&expected)
        .map(|(w, e)| (w * w - e).abs() / e)
        .fold(0.0, f64::max)
}

/// Largest relative residual ‖Kφ − ω²Mφ‖ / ‖Kφ‖ over all modes.
pub fn eigen_residual(model: &FrameModel<f64>, theta: &FixityVector<f64>) -> f64 {
    let (k, m) = assemble_system(model, theta).unwrap();
    let n = m.diagonal().iter().filter(|&&v| v > 0.0).count();
    let modal = modal_analysis(model, theta, n).unwrap();
    let kd = to_dense(&k);
    let md = to_dense(&m);
    modal
        .frequencies
        .iter()
        .zip(&modal.mode_shapes)
        .map(|(w, phi)| {
            let phi = nalgebra::DVector::from_column_slice(phi);
            let kphi = &kd * &phi;
            (&kphi - &md * &phi * (w * w)).norm() / kphi.norm()
        })
        .fold(0.0, f64::max)
}

/// Magnitude mismatch between mirrored column-end sensors of a symmetric
/// frame under a mirror-symmetric fixity pattern, relative to the largest
/// entry.
pub fn mirror_gap(model: &FrameModel<f64>, theta: &FixityVector<f64>, lines: usize) -> f64 {
    let r = simulate_nmbm(model, theta, 1).unwrap().values;
    let ids: Vec<&str> = model
        .moment_sensors()
        .iter()
        .map(|s| s.id.as_str())
        .collect();
    let line = |i: usize| (b'A' + i as u8) as char;
    let scale = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut worst = 0.0f64;
    for (p, id) in ids.iter().enumerate() {
        // ids look like C{story}{line}-{bot|top}
        let split = id.find('-').unwrap() - 1;
        let idx = (id.as_bytes()[split] - b'A') as usize;
        let mirror = format!(
            "{}{}{}",
            &id[..split],
            line(lines - 1 - idx),
            &id[split + 1..]
        );
        let q = ids
            .iter()
            .position(|s| *s == mirror)
            .expect("mirrored sensor exists");
        worst = worst.max((r[p].abs() - r[q].abs()).abs() / scale);
    }
    worst
}

/// Fixity vector of a regular frame that is symmetric about its centre line.
pub fn symmetric_fixity<R: Rng>(bays: usize, stories: usize, rng: &mut R) -> Vec<f64> {
    // per floor: left exterior end, one shared value per interior line, right exterior end
    let per_floor = bays + 1;
    let mut gamma = Vec::with_capacity(per_floor * stories);
    for _ in 0..stories {
        let half: Vec<f64> = (0..per_floor.div_ceil(2))
            .map(|_| rng.gen_range(0.05..0.95))
            .collect();
        for g in 0..per_floor {
            gamma.push(half[g.min(per_floor - 1 - g)]);
        }
    }
    gamma
}

/// Random regular frame with at most 50 free DOFs.
pub fn random_regular_frame<R: Rng>(rng: &mut R) -> RegularFrame {
    loop {
        let frame = random_frame_any_size(rng);
        let lines = frame.bays.len() + 1;
        let floors = frame.stories.len();
        let base_rotations = if frame.base == Restraint::PINNED {
            lines
        } else {
            0
        };
        if 3 * lines * floors + base_rotations <= 50 {
            return frame;
        }
    }
}

fn random_frame_any_size<R: Rng>(rng: &mut R) -> RegularFrame {
    let bays = rng.gen_range(1..=3);
    let stories = rng.gen_range(1..=4);
    let sections = vec![
        SectionSpec {
            name: "B".into(),
            area: rng.gen_range(5e3..2e4),
            second_moment: rng.gen_range(1e8..6e8),
            elastic_modulus: 2.05e5,
            section_modulus: None,
        },
        SectionSpec {
            name: "C".into(),
            area: rng.gen_range(1e4..3e4),
            second_moment: rng.gen_range(1e8..4e8),
            elastic_modulus: 2.05e5,
            section_modulus: None,
        },
    ];
    RegularFrame {
        bays: (0..bays).map(|_| rng.gen_range(4000.0..9000.0)).collect(),
        stories: (0..stories)
            .map(|_| rng.gen_range(2800.0..4500.0))
            .collect(),
        sections,
        beam_sections: vec![0; stories],
        column_sections: vec![1; stories],
        base: if rng.gen_bool(0.5) {
            Restraint::FIXED
        } else {
            Restraint::PINNED
        },
        line_load: rng.gen_range(10.0..60.0),
        specific_gravity: 7.85,
        floor_mass: 0.0,
    }
}

pub fn first_omega(model: &FrameModel<f64>, gamma: &[f64]) -> f64 {
    modal_analysis(model, &FixityVector::new(gamma.to_vec()).unwrap(), 1)
        .unwrap()
        .frequencies[0]
}

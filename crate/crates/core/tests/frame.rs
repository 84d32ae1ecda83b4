mod common;

use dphbmu::frame::{
    assemble_system, fixity_to_stiffness, member_end_moments, modal_analysis, normalized_moments,
    one_bay_two_story, simulate_nmbm, stiffness_to_fixity, two_bay_three_story, FixityVector,
    FrameError, ModelFile,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixity(v: Vec<f64>) -> FixityVector<f64> {
    FixityVector::new(v).unwrap()
}

const MODERATE: [f64; 9] = [0.4, 0.7, 0.6, 0.7, 0.9, 0.8, 0.9, 0.9, 0.9];
const SEVERE: [f64; 9] = [0.2, 0.3, 0.3, 0.5, 0.6, 0.6, 0.7, 0.8, 0.8];

#[test]
fn eigenvalues_match_dense_reference() {
    let model = two_bay_three_story::<f64>();
    for gamma in [
        vec![0.9; 9],
        MODERATE.to_vec(),
        SEVERE.to_vec(),
        vec![0.05; 9],
        vec![1.0; 9],
    ] {
        let theta = fixity(gamma);
        assert!(common::oracle_gap(&model, &theta) <= 1e-8);
        assert!(common::eigen_residual(&model, &theta) <= 1e-8);
    }
    let small = one_bay_two_story::<f64>();
    let theta = fixity(vec![0.7; small.spring_groups()]);
    assert!(common::oracle_gap(&small, &theta) <= 1e-8);
}

#[test]
fn random_frames_match_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..25 {
        let model = common::random_regular_frame(&mut rng)
            .build::<f64>()
            .unwrap();
        assert!(model.dofs().len() <= 50);
        let gamma: Vec<f64> = (0..model.spring_groups())
            .map(|_| rand::Rng::gen_range(&mut rng, 0.05..1.0))
            .collect();
        let theta = fixity(gamma);
        assert!(common::oracle_gap(&model, &theta) <= 1e-8);
        assert!(common::eigen_residual(&model, &theta) <= 1e-8);
    }
}

#[test]
fn first_mode_is_lateral_sway() {
    let model = two_bay_three_story::<f64>();
    let modal = modal_analysis(&model, &fixity(vec![0.9; 9]), 3).unwrap();
    assert!(modal.frequencies.windows(2).all(|w| w[0] < w[1]));
    let dofs = model.dofs();
    let shape = &modal.mode_shapes[0];
    // every floor moves the same way horizontally
    let ux: Vec<f64> = model
        .displacement_sensors()
        .iter()
        .map(|s| shape[dofs.free_index(s.node, 0).unwrap()])
        .collect();
    assert!(ux.iter().all(|&v| v * ux[0] > 0.0));
    assert!(ux.windows(2).all(|w| w[1].abs() > w[0].abs()));
}

#[test]
fn mirrored_sensors_agree_for_symmetric_fixity() {
    let model = two_bay_three_story::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let theta = fixity(common::symmetric_fixity(2, 3, &mut rng));
        assert!(common::mirror_gap(&model, &theta, 3) <= 1e-8);
    }
}

#[test]
fn mirrored_model_gives_same_nmbm() {
    let model = two_bay_three_story::<f64>();
    let mirrored = model.mirrored(8000.0);
    let theta = fixity(SEVERE.to_vec());
    let a = simulate_nmbm(&model, &theta, 1).unwrap().values;
    let b = simulate_nmbm(&mirrored, &theta, 1).unwrap().values;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
    }
}

#[test]
fn rigid_limit_matches_frame_without_springs() {
    let model = two_bay_three_story::<f64>();
    let mut file = ModelFile::from_model(&model);
    file.springs.clear();
    let rigid = file.into_model().unwrap();
    assert_eq!(rigid.spring_groups(), 0);
    let (k_cap, _) = assemble_system(&model, &fixity(vec![1.0; 9])).unwrap();
    let (k_rigid, _) = assemble_system(&rigid, &fixity(vec![])).unwrap();
    let mut gap = 0.0f64;
    for i in 0..k_cap.rows() {
        for j in 0..k_cap.cols() {
            gap = gap.max((k_cap[(i, j)] - k_rigid[(i, j)]).abs());
        }
    }
    assert!(gap / k_rigid.max_abs() < 1e-4, "{gap}");
    let w_cap = modal_analysis(&model, &fixity(vec![1.0; 9]), 1)
        .unwrap()
        .frequencies[0];
    let w_rigid = modal_analysis(&rigid, &fixity(vec![]), 1)
        .unwrap()
        .frequencies[0];
    assert!((w_cap - w_rigid).abs() / w_rigid < 1e-4);
}

#[test]
fn fixity_stiffness_round_trip() {
    let (ei, l) = (2.05e5 * 4.68e8, 8000.0);
    for i in 1..1000 {
        let g = i as f64 / 1000.0;
        let k = fixity_to_stiffness(g, ei, l).unwrap();
        assert!((stiffness_to_fixity(k, ei, l) - g).abs() <= 1e-12);
    }
    let k = fixity_to_stiffness(0.9, ei, l).unwrap();
    assert!((k / (27.0 * ei / l) - 1.0).abs() < 1e-12);
    assert!(matches!(
        fixity_to_stiffness(1.0, ei, l),
        Err(FrameError::RigidJoint)
    ));
}

#[test]
fn nmbm_is_independent_of_shape_scale_and_sign() {
    let model = two_bay_three_story::<f64>();
    let theta = fixity(MODERATE.to_vec());
    let modal = modal_analysis(&model, &theta, 1).unwrap();
    let base = normalized_moments(&model, &theta, &modal.mode_shapes[0], 1)
        .unwrap()
        .values;
    for c in [4.0, -1.0, -3.7, 1e-3] {
        let scaled: Vec<f64> = modal.mode_shapes[0].iter().map(|v| v * c).collect();
        let again = normalized_moments(&model, &theta, &scaled, 1)
            .unwrap()
            .values;
        for (x, y) in base.iter().zip(&again) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}

#[test]
fn simulation_is_pure() {
    let model = two_bay_three_story::<f64>();
    let theta = fixity(SEVERE.to_vec());
    let a = simulate_nmbm(&model, &theta, 1).unwrap();
    let b = simulate_nmbm(&model.clone(), &theta, 1).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.values), bits(&b.values));
}

#[test]
fn pinned_base_moments_vanish() {
    let model = one_bay_two_story::<f64>();
    let theta = fixity(vec![0.8; model.spring_groups()]);
    let r = simulate_nmbm(&model, &theta, 1).unwrap().values;
    let mut seen = 0;
    for (s, v) in model.moment_sensors().iter().zip(&r) {
        if s.id.starts_with("C1") && s.id.ends_with("-bot") {
            assert_eq!(*v, 0.0, "{}", s.id);
            seen += 1;
        } else {
            assert!(v.abs() > 1e-6, "{}", s.id);
        }
    }
    assert_eq!(seen, 2);
}

#[test]
fn severe_damage_softens_first_story_columns() {
    let model = two_bay_three_story::<f64>();
    let intact = simulate_nmbm(&model, &fixity(vec![0.9; 9]), 1)
        .unwrap()
        .values;
    let severe = simulate_nmbm(&model, &fixity(SEVERE.to_vec()), 1)
        .unwrap()
        .values;
    for (p, s) in model.moment_sensors().iter().enumerate() {
        if s.id.starts_with("C1") && s.id.ends_with("-top") {
            assert!(
                severe[p].abs() < 0.6 * intact[p].abs(),
                "{}: {} vs {}",
                s.id,
                severe[p],
                intact[p]
            );
        }
    }
    let w_intact = modal_analysis(&model, &fixity(vec![0.9; 9]), 1)
        .unwrap()
        .frequencies[0];
    let w_severe = modal_analysis(&model, &fixity(SEVERE.to_vec()), 1)
        .unwrap()
        .frequencies[0];
    assert!(w_severe < w_intact);
}

#[test]
fn bundled_model_files_match_builders() {
    let two = ModelFile::parse(include_str!("../models/two_bay_three_story.toml"))
        .unwrap()
        .into_model()
        .unwrap();
    assert_eq!(two, two_bay_three_story::<f64>());
    let one = ModelFile::parse(include_str!("../models/one_bay_two_story.toml"))
        .unwrap()
        .into_model()
        .unwrap();
    assert_eq!(one, one_bay_two_story::<f64>());
}

const LONE_BEAM: &str = r#"
[[section]]
name = "S"
area = 1.0e4
second_moment = 3.0e8
elastic_modulus = 2.05e5

[[node]]
id = "a"
x = 0.0
y = 0.0
mass = 100.0

[[node]]
id = "b"
x = 6000.0
y = 0.0
mass = 100.0

[[member]]
id = "m"
i = "a"
j = "b"
section = "S"
kind = "beam"

[[spring]]
member = "m"
end = "i"
group = 1

[[spring]]
member = "m"
end = "j"
group = 2

[[moment_sensor]]
id = "m-i"
member = "m"
end = "i"

[[moment_sensor]]
id = "m-j"
member = "m"
end = "j"
"#;

#[test]
fn pinned_pinned_beam_carries_no_moment() {
    let model = ModelFile::parse(LONE_BEAM).unwrap().into_model().unwrap();
    let theta = fixity(vec![0.0, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let shape: Vec<f64> = (0..model.dofs().len())
            .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
            .collect();
        let r = member_end_moments(&model, &theta, &shape).unwrap();
        assert!(r.iter().all(|&v| v == 0.0), "{r:?}");
    }
}

#[test]
fn rigid_body_motion_carries_no_moment() {
    let model = ModelFile::parse(LONE_BEAM).unwrap().into_model().unwrap();
    let theta = fixity(vec![0.7, 0.4]);
    // translation (2, -1) plus rotation 1e-3 about node a
    let rot = 1e-3;
    let shape = vec![2.0, -1.0, rot, 2.0, -1.0 + rot * 6000.0, rot];
    let r = member_end_moments(&model, &theta, &shape).unwrap();
    // a unit end rotation on this beam is of order 4EI/L ≈ 4e10 N·mm = 4e4 kNm
    assert!(r.iter().all(|v| v.abs() < 1e-9 * 4e4), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn first_frequency_never_drops_when_a_joint_stiffens(
        seed in any::<u64>(),
        index in 0usize..64,
        base in 0.02f64..0.95,
        step in 0.001f64..0.5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = common::random_regular_frame(&mut rng).build::<f64>().unwrap();
        let d = model.spring_groups();
        let mut gamma: Vec<f64> = (0..d).map(|_| rand::Rng::gen_range(&mut rng, 0.02..0.98)).collect();
        let i = index % d;
        gamma[i] = base;
        let w0 = common::first_omega(&model, &gamma);
        gamma[i] = (base + step).min(1.0);
        let w1 = common::first_omega(&model, &gamma);
        prop_assert!(w1 >= w0 * (1.0 - 1e-12), "{} -> {}", w0, w1);
    }

    #[test]
    fn single_precision_tracks_double(gamma in proptest::collection::vec(0.1f64..0.95, 9)) {
        let m64 = two_bay_three_story::<f64>();
        let m32 = two_bay_three_story::<f32>();
        let a = simulate_nmbm(&m64, &fixity(gamma.clone()), 1).unwrap().values;
        let g32: Vec<f32> = gamma.iter().map(|&v| v as f32).collect();
        let b = simulate_nmbm(&m32, &FixityVector::new(g32).unwrap(), 1).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - *y as f64).abs() < 1e-2 * x.abs().max(0.1));
        }
    }
}

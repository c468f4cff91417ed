mod common;

use chopstick_core::kinematics::{forward_kinematics, inverse_kinematics, Axis};
use chopstick_core::mechanism::{default_params, MechanismParams, PlatformCommand, TipPose};
use chopstick_core::vector::Vec2;
use common::oracle_horn_angle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn box_target(rng: &mut ChaCha8Rng, p: &MechanismParams) -> TipPose {
    let z0 = p.zero_pose_z();
    TipPose::new(
        rng.random_range(-40.0..40.0),
        rng.random_range(-40.0..40.0),
        rng.random_range(z0..z0 + 35.0),
    )
}

#[test]
fn closed_form_matches_root_finding_oracle() {
    let p: MechanismParams = default_params();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100 {
        let t = box_target(&mut rng, &p);
        let Ok(sol) = inverse_kinematics(&p, t) else {
            continue;
        };
        let pitch = oracle_horn_angle(&p, Axis::Pitch, t).unwrap();
        let yaw = oracle_horn_angle(&p, Axis::Yaw, t).unwrap();
        assert!(
            (sol.command.pitch_deg - pitch).abs() < 1e-6,
            "{t:?}: {} vs {pitch}",
            sol.command.pitch_deg
        );
        assert!(
            (sol.command.yaw_deg - yaw).abs() < 1e-6,
            "{t:?}: {} vs {yaw}",
            sol.command.yaw_deg
        );
        checked += 1;
    }
}

#[test]
fn whole_box_is_solvable_without_tilt_limits() {
    // only the travel bound may reject targets in the validated box
    let p: MechanismParams = default_params();
    for i in 0..=16 {
        for j in 0..=16 {
            let t = TipPose::new(-40.0 + 5.0 * i as f64, -40.0 + 5.0 * j as f64, 175.0);
            inverse_kinematics(&p, t).unwrap_or_else(|e| panic!("{t:?}: {e}"));
        }
    }
}

#[test]
fn zero_command_round_trip() {
    let p: MechanismParams = default_params();
    let tip = forward_kinematics(&p, PlatformCommand::new(0.0, 0.0, 0.0)).unwrap();
    assert!(tip.distance(&p.zero_pose()) < 1e-9);
}

#[test]
fn travel_is_affine_in_target_z() {
    let p: MechanismParams = default_params();
    let a = inverse_kinematics(&p, TipPose::new(12.0, -7.0, 165.0)).unwrap();
    for dz in [0.5, 3.0, 11.25] {
        let b = inverse_kinematics(&p, TipPose::new(12.0, -7.0, 165.0 + dz)).unwrap();
        assert!((b.command.travel_mm - a.command.travel_mm - dz).abs() < 1e-12);
        assert_eq!(b.command.pitch_deg, a.command.pitch_deg);
        assert_eq!(b.command.yaw_deg, a.command.yaw_deg);
    }
}

/// Pivots whose horn tips sit level with the pivot joint at zero angle, so
/// that tilting within one servo plane leaves the other linkage length
/// untouched.
fn level_tip_params() -> MechanismParams {
    let mut p: MechanismParams = default_params();
    let h = |lb: f64| -(p.linkage_len * p.linkage_len - lb * lb).sqrt();
    p.pitch_pivot = Vec2::new(h(p.pitch_horn_len), -p.pitch_horn_len);
    p.yaw_pivot = Vec2::new(h(p.yaw_horn_len), -p.yaw_horn_len);
    p.validate().unwrap();
    p
}

#[test]
fn pure_pitch_target_needs_no_yaw() {
    let p = level_tip_params();
    for y in [-30.0, -12.5, 0.0, 4.0, 25.0] {
        let s = inverse_kinematics(&p, TipPose::new(0.0, y, 170.0)).unwrap();
        assert!(
            s.command.yaw_deg.abs() < 1e-9,
            "y={y}: yaw {}",
            s.command.yaw_deg
        );
    }
}

#[test]
fn pure_pitch_command_stays_in_pitch_plane() {
    let p = level_tip_params();
    let tip = forward_kinematics(&p, PlatformCommand::new(5.0, 0.0, 10.0)).unwrap();
    assert!(tip.x.abs() < 1e-9, "{tip:?}");
    assert!(tip.y.abs() > 1.0);
}

#[test]
fn default_geometry_couples_axes() {
    // with horizontal linkages a pure pitch tilt lifts the yaw mount
    let p: MechanismParams = default_params();
    let s = inverse_kinematics(&p, TipPose::new(0.0, 20.0, 170.0)).unwrap();
    assert!(s.command.yaw_deg.abs() > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fk_inverts_ik(x in -40.0..40.0f64, y in -40.0..40.0f64, dz in 0.0..35.0f64) {
        let p: MechanismParams = default_params();
        let t = TipPose::new(x, y, p.zero_pose_z() + dz);
        if let Ok(sol) = inverse_kinematics(&p, t) {
            let back = forward_kinematics(&p, sol.command).unwrap();
            prop_assert!(back.distance(&t) < 1e-6, "{:?} -> {:?}", t, back);
        }
    }

    #[test]
    fn ik_is_continuous(x in -38.0..38.0f64, y in -38.0..38.0f64, ang in 0.0..std::f64::consts::TAU) {
        let p: MechanismParams = default_params();
        let a = TipPose::new(x, y, 175.0);
        let b = TipPose::new(x + 1e-3 * ang.cos(), y + 1e-3 * ang.sin(), 175.0);
        let (sa, sb) = (inverse_kinematics(&p, a).unwrap(), inverse_kinematics(&p, b).unwrap());
        prop_assert!((sa.command.pitch_deg - sb.command.pitch_deg).abs() < 0.01);
        prop_assert!((sa.command.yaw_deg - sb.command.yaw_deg).abs() < 0.01);
    }

    #[test]
    fn z_calc_is_real_or_out_of_reach(x in -200.0..200.0f64, y in -200.0..200.0f64) {
        let p: MechanismParams = default_params();
        match inverse_kinematics(&p, TipPose::new(x, y, 170.0)) {
            Ok(s) => prop_assert!(s.z_calc.is_finite() && s.z_calc > 0.0),
            Err(chopstick_core::IkError::OutOfReach { .. }) => prop_assert!(x.hypot(y) >= 162.0),
            Err(_) => prop_assert!(x.hypot(y) < 162.0),
        }
    }
}

#[test]
fn single_precision_tracks_double() {
    let p64: MechanismParams = default_params();
    let p32: chopstick_core::MechanismParamsF32 = default_params();
    let z0 = p64.zero_pose_z();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (x, y, dz) = (
            rng.random_range(-40.0..40.0),
            rng.random_range(-40.0..40.0),
            rng.random_range(0.0..35.0),
        );
        let Ok(a) = inverse_kinematics(&p64, TipPose::new(x, y, z0 + dz)) else {
            continue;
        };
        let a = a.command;
        let b = inverse_kinematics(
            &p32,
            chopstick_core::TipPoseF32::new(x as f32, y as f32, (z0 + dz) as f32),
        )
        .unwrap()
        .command;
        assert!(
            (a.pitch_deg - b.pitch_deg as f64).abs() < 0.05,
            "{a:?} {b:?}"
        );
        assert!((a.yaw_deg - b.yaw_deg as f64).abs() < 0.05);
        assert!((a.travel_mm - b.travel_mm as f64).abs() < 0.01);
        let pose = forward_kinematics(&p32, b).unwrap();
        assert!(((pose.x as f64) - x).abs() < 0.05 && ((pose.y as f64) - y).abs() < 0.05);
    }
}

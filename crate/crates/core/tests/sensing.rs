use chopstick_core::sensing::*;
use chopstick_core::vector::Vec3;
use proptest::prelude::*;

fn model() -> SensorModel {
    SensorModel::default()
}

fn force_sample(t: f64, f: [f64; 3]) -> FtSample {
    FtSample::new(t, Vec3::new(f[0], f[1], f[2]), Vec3::zero())
}

const LSB: f64 = 50.0 / 1024.0;

#[test]
fn quantizer_examples() {
    let m = model();
    let zero = quantize(&m, &force_sample(0.0, [0.0; 3]));
    assert_eq!(zero.force, Vec3::zero());
    assert!(zero.quantized && !zero.saturated);

    let over = quantize(&m, &force_sample(0.0, [30.0, 0.0, 0.0]));
    assert!(over.saturated);
    assert_eq!(over.force.x, 511.0 * LSB);
    assert!(over.force.x <= 25.0 && 25.0 - over.force.x <= LSB);
    let under = quantize(&m, &force_sample(0.0, [-30.0, 0.0, 0.0]));
    assert_eq!(under.force.x, -25.0);

    let small = quantize(&m, &force_sample(0.0, [0.03, 0.0, 0.0]));
    assert_eq!(small.force.x, 0.048828125);
    assert!((small.force.x - 0.0488).abs() < 1e-4);

    let torque = quantize(
        &m,
        &FtSample::new(0.0, Vec3::zero(), Vec3::new(200.0, -1.0, 0.1)),
    );
    assert_eq!(torque.torque.x, 511.0 * 250.0 / 1024.0);
    assert!(torque.saturated);
}

#[test]
fn tare_examples() {
    let stream: Vec<FtSample> = (0..100)
        .map(|i| {
            FtSample::new(
                i as f64 * 1e-3,
                Vec3::new(1.0, 2.0, 3.0),
                Vec3::new(4.0, 5.0, 6.0),
            )
        })
        .collect();
    let b = tare(&stream, 0.05).unwrap();
    assert_eq!(b.force, Vec3::new(1.0, 2.0, 3.0));
    for s in apply_bias(&stream, &b) {
        assert_eq!(s.force, Vec3::zero());
        assert_eq!(s.torque, Vec3::zero());
    }
    assert_eq!(
        tare(&stream[..5], 1.0),
        Err(SenseError::WindowTooShort {
            found: 5,
            needed: 10
        })
    );
    assert!(tare(&[], 1.0).is_err());
}

#[test]
fn tare_of_drifting_stream_is_the_midpoint() {
    let m = model();
    let stream: Vec<FtSample> = (0..1000)
        .map(|i| {
            let t = i as f64 * 1e-3;
            quantize(&m, &force_sample(t, [0.01 * t, 0.0, 0.0]))
        })
        .collect();
    let b = tare(&stream, 1.0).unwrap();
    assert!((b.force.x - 0.005).abs() <= LSB);
}

#[test]
fn retare_after_subtraction_is_small() {
    let m = model();
    let stream: Vec<FtSample> = (0..200)
        .map(|i| quantize(&m, &force_sample(i as f64 * 1e-3, [1.3, -0.7, 2.2])))
        .collect();
    let b = tare(&stream, 0.1).unwrap();
    let b2 = tare(&apply_bias(&stream, &b), 0.1).unwrap();
    for v in [b2.force.x, b2.force.y, b2.force.z] {
        assert!(v.abs() <= LSB);
    }
}

#[test]
fn contact_examples() {
    let zeros: Vec<FtSample> = (0..100).map(|i| force_sample(i as f64, [0.0; 3])).collect();
    assert!(detect_contact(&zeros, 0.15, 0.05).unwrap().is_empty());

    // rises, wobbles inside the band, then drops
    let profile = [0.0, 0.2, 0.12, 0.16, 0.11, 0.14, 0.3, 0.0, 0.0];
    let s: Vec<FtSample> = profile
        .iter()
        .enumerate()
        .map(|(i, &f)| force_sample(i as f64, [f, 0.0, 0.0]))
        .collect();
    let ev = detect_contact(&s, 0.15, 0.05).unwrap();
    assert_eq!(
        ev,
        vec![ContactEvent {
            onset: 1.0,
            release: Some(7.0)
        }]
    );

    let open: Vec<FtSample> = [0.0, 0.5, 0.5]
        .iter()
        .enumerate()
        .map(|(i, &f)| force_sample(i as f64, [0.0, f, 0.0]))
        .collect();
    assert_eq!(detect_contact(&open, 0.15, 0.05).unwrap()[0].release, None);

    assert_eq!(
        detect_contact(&s, 0.05, 0.05),
        Err(SenseError::InvalidThreshold)
    );
    assert_eq!(
        detect_contact(&s, 0.15, 0.0),
        Err(SenseError::InvalidThreshold)
    );
}

#[test]
fn no_contact_when_separation_stays_open() {
    let m = model();
    let cycle = GripCycle::repeated(m.rate, 1.0, 20.0, -2.0, 3);
    let s = simulate_grip_cycle(&m, &cycle, 1).unwrap();
    assert!(s.iter().all(|x| x.force.x.abs() < 0.15));
    assert_eq!(
        estimate_stiffness(&s, &cycle.separation),
        Err(SenseError::NoContact)
    );
}

#[test]
fn hooke_plateau() {
    let m = model();
    let cycle = GripCycle::repeated(m.rate, 1.0, 20.0, 2.0, 1);
    let s = simulate_grip_cycle(&m, &cycle, 2).unwrap();
    let plateau: Vec<f64> = s
        .iter()
        .zip(&cycle.separation)
        .filter(|(_, &sep)| sep == 18.0)
        .map(|(x, _)| x.force.x)
        .collect();
    let mean = plateau.iter().sum::<f64>() / plateau.len() as f64;
    assert!((mean - 2.0).abs() < 0.02, "{mean}");
    // torque follows the lever arm on the y axis
    let ty = s
        .iter()
        .zip(&cycle.separation)
        .filter(|(_, &sep)| sep == 18.0)
        .map(|(x, _)| x.torque.y)
        .sum::<f64>()
        / plateau.len() as f64;
    assert!((ty + 20.0 * 2.0).abs() < 0.5, "{ty}");
    assert!(s.windows(2).all(|w| (w[1].t - w[0].t - 1e-3).abs() < 1e-12));
}

#[test]
fn plateaus_follow_stiffness_order() {
    let m = model();
    let mut last = f64::NEG_INFINITY;
    for mat in reference_materials() {
        let cycle = mat.cycle(m.rate, 1);
        let s = simulate_grip_cycle(&m, &cycle, 3).unwrap();
        let peak = s
            .iter()
            .map(|x| x.force.x)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(peak > last, "{}: {peak}", mat.name);
        last = peak;
    }
}

#[test]
fn unit_stiffness_recovered() {
    let m = model();
    let cycle = GripCycle::repeated(m.rate, 1.0, 30.0, 3.0, 1);
    let s = simulate_grip_cycle(&m, &cycle, 4).unwrap();
    let est = estimate_stiffness(&s, &cycle.separation).unwrap();
    assert!((0.95..=1.05).contains(&est.k_hat), "{est:?}");
    assert!(est.r_squared > 0.99, "{est:?}");
    assert_eq!(est.events, 1);
    assert!(est.contact_onset > 0.3 && est.contact_onset < 0.6);
}

#[test]
fn zero_force_stream_has_no_contact() {
    let s: Vec<FtSample> = (0..500)
        .map(|i| force_sample(i as f64 * 1e-3, [0.0; 3]))
        .collect();
    assert_eq!(
        estimate_stiffness(&s, &vec![10.0; 500]),
        Err(SenseError::NoContact)
    );
    assert!(matches!(
        estimate_stiffness(&s, &[1.0]),
        Err(SenseError::LengthMismatch { .. })
    ));
}

#[test]
fn eight_cycles_per_material_ordered_with_eight_events() {
    let m = model();
    let mut means = Vec::new();
    for (i, mat) in reference_materials().iter().enumerate() {
        let cycle = mat.cycle(m.rate, 8);
        let s = simulate_grip_cycle(&m, &cycle, 100 + i as u64).unwrap();
        let tared = apply_bias(&s, &tare(&s, 0.1).unwrap());
        let events = detect_contact_smoothed(
            &tared,
            DEFAULT_THRESHOLD,
            DEFAULT_HYSTERESIS,
            DEFAULT_SMOOTHING,
        )
        .unwrap();
        assert_eq!(events.len(), 8, "{}", mat.name);
        let per = estimate_stiffness_per_event(&s, &cycle.separation, &StiffnessOptions::default())
            .unwrap();
        assert_eq!(per.len(), 8);
        means.push(per.iter().map(|e| e.k_hat).sum::<f64>() / 8.0);
    }
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
}

#[test]
fn bias_injection_barely_moves_estimate() {
    let m = model();
    let cycle = GripCycle::repeated(m.rate, 0.5, 30.0, 3.0, 2);
    let s = simulate_grip_cycle(&m, &cycle, 8).unwrap();
    let base = estimate_stiffness(&s, &cycle.separation).unwrap().k_hat;
    for b in [1.0, -1.0] {
        let shifted: Vec<FtSample> = s
            .iter()
            .map(|x| FtSample {
                force: x.force + Vec3::new(b, 0.0, 0.0),
                ..*x
            })
            .collect();
        let k = estimate_stiffness(&shifted, &cycle.separation)
            .unwrap()
            .k_hat;
        assert!((k - base).abs() < 0.01 * base, "{b}: {k} vs {base}");
    }
}

#[test]
fn samples_csv_round_trip() {
    let m = model();
    let cycle = GripCycle::repeated(m.rate, 0.8, 30.0, 3.0, 1);
    let s = simulate_grip_cycle(&m, &cycle, 5).unwrap();
    let mut buf = Vec::new();
    write_samples_csv(&s, &mut buf).unwrap();
    assert!(buf.starts_with(b"t,fx,fy,fz,tx,ty,tz,flags\n"));
    assert_eq!(read_samples_csv(&buf[..]).unwrap(), s);
}

#[test]
fn materials_csv() {
    let text = "# synthetic\nname,stiffness,rest_width,penetration\nfoam,0.1,25,2\n";
    let m = read_materials_csv(text.as_bytes()).unwrap();
    assert_eq!(m[0].name, "foam");
    assert!(
        read_materials_csv("name,stiffness,rest_width,penetration\nx,-1,2,3\n".as_bytes()).is_err()
    );
}

#[test]
fn simulation_is_seeded() {
    let m = model();
    let cycle = GripCycle::repeated(m.rate, 0.8, 30.0, 3.0, 1);
    assert_eq!(
        simulate_grip_cycle(&m, &cycle, 9).unwrap(),
        simulate_grip_cycle(&m, &cycle, 9).unwrap()
    );
    assert!(simulate_grip_cycle(&SensorModel { rate: 0.0, ..m }, &cycle, 0).is_err());
}

#[test]
fn smoothed_detection_counts_cycles_over_many_seeds() {
    let m = model();
    for mat in reference_materials() {
        let cycle = mat.cycle(m.rate, 8);
        for seed in 0..20 {
            let s = simulate_grip_cycle(&m, &cycle, seed).unwrap();
            let tared = apply_bias(&s, &tare(&s, 0.1).unwrap());
            let n = detect_contact_smoothed(
                &tared,
                DEFAULT_THRESHOLD,
                DEFAULT_HYSTERESIS,
                DEFAULT_SMOOTHING,
            )
            .unwrap()
            .len();
            assert_eq!(n, 8, "{} seed {seed}", mat.name);
        }
    }
}

proptest! {
    #[test]
    fn quantize_idempotent_and_within_half_step(f in prop::array::uniform3(-30.0..30.0f64), t in prop::array::uniform3(-150.0..150.0f64)) {
        let m = model();
        let s = FtSample::new(0.0, Vec3::from(f), Vec3::from(t));
        let q = quantize(&m, &s);
        prop_assert_eq!(quantize(&m, &q), q);
        for (orig, qv, lsb, fs) in [
            (f[0], q.force.x, m.lsb_force(), 25.0),
            (f[1], q.force.y, m.lsb_force(), 25.0),
            (f[2], q.force.z, m.lsb_force(), 25.0),
            (t[0], q.torque.x, m.lsb_torque(), 125.0),
        ] {
            prop_assert!(qv.abs() <= fs);
            if orig.abs() <= fs - lsb {
                prop_assert!((orig - qv).abs() <= lsb / 2.0);
            }
        }
    }
}

use chopstick_core::kinematics::Axis;
use chopstick_core::mechanism::{MechanismParams, TipPose};

/// Horn angle closing one linkage, found by scanning the servo range for
/// sign changes of the length error and bisecting. Shares no code with the
/// circle-intersection path.
pub fn oracle_horn_angle(p: &MechanismParams, axis: Axis, target: TipPose) -> Option<f64> {
    let r = target.x.hypot(target.y);
    let lc = p.chopstick_len;
    let u = [target.x / lc, target.y / lc, (lc * lc - r * r).sqrt() / lc];
    let (dist, pivot) = match axis {
        Axis::Pitch => (p.pitch_horn_len, p.pitch_pivot),
        Axis::Yaw => (p.yaw_horn_len, p.yaw_pivot),
    };
    let mount = [-dist * u[0], -dist * u[1], -dist * u[2]];
    let g = |deg: f64| {
        let a = deg.to_radians();
        let (hh, hv) = (pivot.h + dist * a.sin(), pivot.v + dist * a.cos());
        let tip = match axis {
            Axis::Pitch => [0.0, hh, hv],
            Axis::Yaw => [hh, 0.0, hv],
        };
        let d: f64 = (0..3)
            .map(|i| (tip[i] - mount[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        d - p.linkage_len
    };
    let (lo, hi) = (p.servo_rom.min, p.servo_rom.max);
    let steps = ((hi - lo) / 0.25).round() as usize;
    let mut roots = Vec::new();
    for k in 0..steps {
        let (mut a, mut b) = (lo + k as f64 * 0.25, lo + (k + 1) as f64 * 0.25);
        let (mut ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga * gb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let gm = g(m);
            if gm == 0.0 || (b - a) < 1e-13 {
                a = m;
                b = m;
                break;
            }
            if ga * gm < 0.0 {
                b = m;
            } else {
                a = m;
                ga = gm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.into_iter().min_by(|x, y| {
        x.abs()
            .partial_cmp(&y.abs())
            .unwrap()
            .then(x.partial_cmp(y).unwrap())
    })
}

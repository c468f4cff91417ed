//! Forward kinematics by damped Newton iteration on the two linkage
//! closure equations.
//!
//! The unknown chopstick direction is parameterized by its horizontal
//! components `(a, b) = (sin phi sin psi, sin phi cos psi)`, which stay
//! regular at the zero pose where `psi` is undefined. Seeds come from a
//! coarse `(phi, psi)` grid; distinct converged roots inside the search
//! cone are reported rather than silently picked.

use thiserror::Error;

use super::inverse::servo_horn_tip;
use super::Axis;
use crate::geometry::SphericalDir;
use crate::mechanism::{MechanismParams, PlatformCommand, TipPose};
use crate::scalar::{deg_to_rad, lit, to_f64, Real};
use crate::vector::Vec3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FkError {
    #[error("command outside servo range or platform travel")]
    CommandOutOfBounds,
    #[error("forward kinematics did not converge (best residual {residual} mm)")]
    NoConvergence { residual: f64 },
    #[error("ambiguous forward kinematics: {first:?} and {second:?}")]
    MultipleBranches {
        first: TipPose<f64>,
        second: TipPose<f64>,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct FkOptions<T = f64> {
    /// Seeds per grid dimension.
    pub grid: usize,
    /// Half-angle of the searched cone of chopstick directions, degrees.
    pub phi_max_deg: T,
    /// Central-difference step, in direction units (radians near the axis).
    pub fd_step: T,
    /// Convergence threshold on both linkage residuals, mm.
    pub tolerance: T,
    pub max_iterations: usize,
    /// Tip separation above which two roots count as distinct, mm.
    pub branch_tolerance: T,
}

impl<T: Real> Default for FkOptions<T> {
    /// The f64 thresholds; coarser scalars get thresholds they can resolve.
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            grid: 16,
            phi_max_deg: lit(45.0),
            fd_step: lit::<T>(1e-6).max(lit::<T>(10.0) * eps.sqrt()),
            tolerance: lit::<T>(1e-9).max(lit::<T>(1e3) * eps),
            max_iterations: 100,
            branch_tolerance: lit::<T>(1e-5).max(lit::<T>(1e4) * eps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkSolution<T = f64> {
    pub tip: TipPose<T>,
    pub dir: SphericalDir<T>,
    /// Largest absolute linkage residual at the solution, mm.
    pub residual: T,
    pub iterations: usize,
}

/// Tip pose for a servo command, with default solver options.
pub fn forward_kinematics<T: Real>(
    params: &MechanismParams<T>,
    command: PlatformCommand<T>,
) -> Result<TipPose<T>, FkError> {
    forward_kinematics_with(params, command, &FkOptions::default()).map(|s| s.tip)
}

struct Closure<T> {
    pitch_tip: Vec3<T>,
    yaw_tip: Vec3<T>,
    pitch_dist: T,
    yaw_dist: T,
    linkage_len: T,
}

impl<T: Real> Closure<T> {
    fn residual(&self, a: T, b: T) -> Option<[T; 2]> {
        let c2 = T::one() - a * a - b * b;
        if !(c2 > T::zero()) {
            return None;
        }
        let u = Vec3::new(a, b, c2.sqrt());
        let pitch_mount = -(u * self.pitch_dist);
        let yaw_mount = -(u * self.yaw_dist);
        Some([
            self.pitch_tip.distance(pitch_mount) - self.linkage_len,
            self.yaw_tip.distance(yaw_mount) - self.linkage_len,
        ])
    }

    fn jacobian(&self, a: T, b: T, h: T) -> Option<[[T; 2]; 2]> {
        let two_h = h + h;
        let ra_p = self.residual(a + h, b)?;
        let ra_m = self.residual(a - h, b)?;
        let rb_p = self.residual(a, b + h)?;
        let rb_m = self.residual(a, b - h)?;
        Some([
            [(ra_p[0] - ra_m[0]) / two_h, (rb_p[0] - rb_m[0]) / two_h],
            [(ra_p[1] - ra_m[1]) / two_h, (rb_p[1] - rb_m[1]) / two_h],
        ])
    }
}

fn max_abs<T: Real>(r: [T; 2]) -> T {
    r[0].abs().max(r[1].abs())
}

fn sum_sq<T: Real>(r: [T; 2]) -> T {
    r[0] * r[0] + r[1] * r[1]
}

struct Root<T> {
    a: T,
    b: T,
    residual: T,
    iterations: usize,
}

fn newton<T: Real>(
    closure: &Closure<T>,
    mut a: T,
    mut b: T,
    opts: &FkOptions<T>,
) -> Result<Root<T>, T> {
    let mut r = match closure.residual(a, b) {
        Some(r) => r,
        None => return Err(T::infinity()),
    };
    let mut polish = 0;
    for it in 0..opts.max_iterations {
        if max_abs(r) < opts.tolerance {
            // two extra steps push the root to round-off before returning
            if polish == 2 {
                return Ok(Root {
                    a,
                    b,
                    residual: max_abs(r),
                    iterations: it,
                });
            }
            polish += 1;
        }
        let j = closure.jacobian(a, b, opts.fd_step).ok_or(max_abs(r))?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == T::zero() || !det.is_finite() {
            return Err(max_abs(r));
        }
        let da = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let db = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        let mut step = T::one();
        let base = sum_sq(r);
        let mut accepted = None;
        while step > lit(1e-4) {
            let (na, nb) = (a + da * step, b + db * step);
            if let Some(nr) = closure.residual(na, nb) {
                if sum_sq(nr) < base {
                    accepted = Some((na, nb, nr));
                    break;
                }
            }
            step *= lit(0.5);
        }
        match accepted {
            Some((na, nb, nr)) => {
                a = na;
                b = nb;
                r = nr;
            }
            None if max_abs(r) < opts.tolerance => {
                return Ok(Root {
                    a,
                    b,
                    residual: max_abs(r),
                    iterations: it,
                })
            }
            None => return Err(max_abs(r)),
        }
    }
    if max_abs(r) < opts.tolerance {
        Ok(Root {
            a,
            b,
            residual: max_abs(r),
            iterations: opts.max_iterations,
        })
    } else {
        Err(max_abs(r))
    }
}

/// Tip pose for a servo command.
///
/// Solves for the chopstick direction at which both linkages close, then
/// places the tip `chopstick_len` along it and reconstructs Z as
/// `travel + z_calc + z_offset`.
pub fn forward_kinematics_with<T: Real>(
    params: &MechanismParams<T>,
    command: PlatformCommand<T>,
    opts: &FkOptions<T>,
) -> Result<FkSolution<T>, FkError> {
    if !command.within(params) {
        return Err(FkError::CommandOutOfBounds);
    }
    let closure = Closure {
        pitch_tip: servo_horn_tip(params, Axis::Pitch, command.pitch_deg),
        yaw_tip: servo_horn_tip(params, Axis::Yaw, command.yaw_deg),
        pitch_dist: params.pitch_horn_len,
        yaw_dist: params.yaw_horn_len,
        linkage_len: params.linkage_len,
    };
    let phi_max = deg_to_rad(opts.phi_max_deg);
    let sin_max = phi_max.sin();
    let n = opts.grid.max(1);
    let n_t: T = lit(n as f64);
    let two_pi = T::PI() + T::PI();
    let lc = params.chopstick_len;

    let mut roots: Vec<Root<T>> = Vec::new();
    let mut best_failure = T::infinity();
    for i in 0..n {
        let phi = phi_max * (lit::<T>(i as f64) + lit(0.5)) / n_t;
        for j in 0..n {
            let psi = -T::PI() + two_pi * lit::<T>((j + 1) as f64) / n_t;
            let (sp, _) = phi.sin_cos();
            let (ss, cs) = psi.sin_cos();
            match newton(&closure, sp * ss, sp * cs, opts) {
                Ok(root) => {
                    if (root.a * root.a + root.b * root.b).sqrt() > sin_max {
                        continue;
                    }
                    let dup = roots
                        .iter_mut()
                        .find(|r| lc * (r.a - root.a).hypot(r.b - root.b) <= opts.branch_tolerance);
                    match dup {
                        Some(existing) => {
                            if root.residual < existing.residual {
                                *existing = root;
                            }
                        }
                        None => roots.push(root),
                    }
                }
                Err(res) => best_failure = best_failure.min(res),
            }
        }
    }

    let to_tip = |r: &Root<T>| {
        let c = (T::one() - r.a * r.a - r.b * r.b).sqrt();
        TipPose::new(
            lc * r.a,
            lc * r.b,
            command.travel_mm + lc * c + params.z_offset,
        )
    };
    match roots.len() {
        0 => Err(FkError::NoConvergence {
            residual: to_f64(best_failure),
        }),
        1 => {
            let r = &roots[0];
            let s = r.a.hypot(r.b).min(T::one());
            let psi = if s == T::zero() {
                T::zero()
            } else {
                r.a.atan2(r.b)
            };
            Ok(FkSolution {
                tip: to_tip(r),
                dir: SphericalDir::new(s.asin(), psi),
                residual: r.residual,
                iterations: r.iterations,
            })
        }
        _ => {
            let conv = |t: TipPose<T>| TipPose::new(to_f64(t.x), to_f64(t.y), to_f64(t.z));
            Err(FkError::MultipleBranches {
                first: conv(to_tip(&roots[0])),
                second: conv(to_tip(&roots[1])),
            })
        }
    }
}

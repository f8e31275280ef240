#pragma once

#include <vector>

#include "atomflow/geom3.hpp"
#include "atomflow/rng.hpp"

namespace atomflow::flowmatch {

using geom3::Rotation;
using geom3::RigidTransform;
using geom3::TangentVector;
using geom3::Vec3;

inline constexpr double kTimeSingularityEps = 1e-6;

// Rotation time schedule. Linear is the training-side parameterization;
// Exponential (kappa(t) = e^{-c t}, default c = 10) is used at inference.
struct Schedule {
  enum class Kind { Linear, Exponential };
  Kind kind = Kind::Linear;
  double c = 10.0;

  static Schedule linear() { return {Kind::Linear, 0.0}; }
  static Schedule exponential(double c = 10.0) {
    require(c > 0.0, Errc::invalid_argument, "exponential schedule: c <= 0");
    return {Kind::Exponential, c};
  }
};

// One rigid frame per residue.
using FrameSet = std::vector<RigidTransform>;

// (1-t) x0 + t x1.
Vec3 interp_trans(const Vec3& x0, const Vec3& x1, double t);

// Geodesic point at parameter t (Linear) or 1 - e^{-c t} (Exponential).
Rotation interp_rot(const Rotation& r0, const Rotation& r1, double t,
                    const Schedule& sched);

// (x1 - xt) / (1 - t). Throws time_singularity for t > 1 - eps.
Vec3 vf_trans(const Vec3& xt, const Vec3& x1, double t);

// Linear: log_{rt}(r1) / (1 - t); Exponential: c * log_{rt}(r1).
// Tangents are expressed in the body frame of rt.
TangentVector vf_rot(const Rotation& rt, const Rotation& r1, double t,
                     const Schedule& sched);

// One explicit Euler step toward target_pred: translations follow the linear
// field, rotations the given schedule (applied in the body frame, then
// re-orthonormalized). Requires t + dt <= 1.
FrameSet euler_step(const FrameSet& frames, const FrameSet& target_pred,
                    double t, double dt, const Schedule& rot_sched);

// Prior: rotations i.i.d. uniform on SO(3); translations i.i.d. isotropic
// Gaussian with the given per-coordinate std, recentered to zero mean.
FrameSet sample_prior(int n, Rng& rng, double trans_std = 10.0);

}  // namespace atomflow::flowmatch

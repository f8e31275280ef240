#include "atomflow/flowmatch.hpp"

#include <cmath>
#include <exception>

namespace atomflow::flowmatch {

Vec3 interp_trans(const Vec3& x0, const Vec3& x1, double t) {
  require(t >= 0.0 && t <= 1.0, Errc::invalid_argument,
          "interp_trans: t outside [0, 1]");
  return (1.0 - t) * x0 + t * x1;
}

Rotation interp_rot(const Rotation& r0, const Rotation& r1, double t,
                    const Schedule& sched) {
  require(t >= 0.0 && t <= 1.0, Errc::invalid_argument,
          "interp_rot: t outside [0, 1]");
  const double s = sched.kind == Schedule::Kind::Linear
                       ? t
                       : 1.0 - std::exp(-sched.c * t);
  return geom3::geodesic(r0, r1, s);
}

Vec3 vf_trans(const Vec3& xt, const Vec3& x1, double t) {
  require(t < 1.0 - kTimeSingularityEps, Errc::time_singularity,
          "vf_trans: t too close to 1");
  return (x1 - xt) / (1.0 - t);
}

TangentVector vf_rot(const Rotation& rt, const Rotation& r1, double t,
                     const Schedule& sched) {
  const TangentVector log_rt_r1 = geom3::so3_log(rt.transpose() * r1);
  if (sched.kind == Schedule::Kind::Linear) {
    require(t < 1.0 - kTimeSingularityEps, Errc::time_singularity,
            "vf_rot: t too close to 1 under the linear schedule");
    return log_rt_r1 / (1.0 - t);
  }
  return sched.c * log_rt_r1;
}

FrameSet euler_step(const FrameSet& frames, const FrameSet& target_pred,
                    double t, double dt, const Schedule& rot_sched) {
  require(frames.size() == target_pred.size(), Errc::shape_mismatch,
          "euler_step: frame count mismatch");
  require(dt > 0.0 && t + dt <= 1.0 + 1e-12, Errc::invalid_argument,
          "euler_step: need dt > 0 and t + dt <= 1");
  require(t < 1.0 - kTimeSingularityEps, Errc::time_singularity,
          "euler_step: t too close to 1");
  FrameSet out(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
  std::exception_ptr pending = nullptr;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto& cur = frames[i];
      const auto& tgt = target_pred[i];
      const Vec3 x = cur.translation + dt * vf_trans(cur.translation,
                                                     tgt.translation, t);
      const TangentVector w = vf_rot(cur.rotation, tgt.rotation, t, rot_sched);
      const Rotation r = cur.rotation * geom3::so3_exp(dt * w);
      out[i] = {geom3::orthonormalize(r.matrix()), x};
    } catch (...) {
#pragma omp critical
      if (!pending) pending = std::current_exception();
    }
  }
  if (pending) std::rethrow_exception(pending);
  return out;
}

FrameSet sample_prior(int n, Rng& rng, double trans_std) {
  require(n >= 1, Errc::invalid_argument, "sample_prior: n < 1");
  FrameSet out(n);
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    out[i].rotation = geom3::uniform_random_rotation(rng);
    out[i].translation =
        trans_std * Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian());
    mean += out[i].translation;
  }
  mean /= static_cast<double>(n);
  for (auto& f : out) f.translation -= mean;
  return out;
}

}  // namespace atomflow::flowmatch

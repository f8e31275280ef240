#pragma once

#include <Eigen/Core>
#include <vector>

#include "atomflow/errors.hpp"
#include "atomflow/rng.hpp"

namespace atomflow::geom3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;

// Axis-angle coordinates of so(3), radians.
using TangentVector = Vec3;

inline constexpr double kRotationTol = 1e-9;      // orthonormality / det check
inline constexpr double kExpSmallAngle = 1e-8;    // series branch in so3_exp
inline constexpr double kLogSmallAngle = 1e-6;    // series branch in so3_log
inline constexpr double kAntipodalMargin = 1e-6;  // log is an error above pi - this

// 3x3 orthonormal matrix with det +1. Construction through from_matrix
// validates; internal code that produces rotations by composition uses the
// unchecked path.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }
  static Rotation from_matrix(const Mat3& m);  // throws invalid_argument
  static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  bool is_valid(double tol = kRotationTol) const;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

// Rigid transform (rotation then translation): p -> R p + x. Translations in
// angstroms.
struct RigidTransform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  // this ∘ other: apply `other` first.
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation,
            rotation * other.translation + translation};
  }
  RigidTransform inverse() const {
    Rotation rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const {
    return rotation.transpose() * (p - translation);
  }
};

// Rodrigues rotation by angle |v| about v/|v|; second-order series below
// kExpSmallAngle. Throws invalid_argument on non-finite input.
Rotation so3_exp(const TangentVector& v);

// Inverse of so3_exp. Throws near_antipodal when the rotation angle is within
// kAntipodalMargin of pi (callers must perturb).
TangentVector so3_log(const Rotation& r);

// Rotation angle between a and b via the trace; safe for all inputs,
// including antipodal pairs.
double geodesic_angle(const Rotation& a, const Rotation& b);

// exp_{r0}(s * log_{r0}(r1)); s in [0, 1].
Rotation geodesic(const Rotation& r0, const Rotation& r1, double s);

// Row-major flattening of the rotation matrix.
Vec9 mat2vec(const Rotation& r);

// R p + x for every point.
std::vector<Vec3> apply_frame(const RigidTransform& t,
                              const std::vector<Vec3>& pts);

// Nearest rotation to an arbitrary matrix (polar factor via SVD).
Rotation orthonormalize(const Mat3& m);

// Uniform sample from SO(3) (quaternion method).
Rotation uniform_random_rotation(Rng& rng);

}  // namespace atomflow::geom3

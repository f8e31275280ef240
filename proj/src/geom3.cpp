#include "atomflow/geom3.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace atomflow::geom3 {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m) {
  Rotation r = Rotation::from_matrix_unchecked(m);
  require(r.is_valid(), Errc::invalid_argument,
          "matrix is not a rotation (orthonormality or determinant check "
          "failed)");
  return r;
}

bool Rotation::is_valid(double tol) const {
  if (!m_.allFinite()) return false;
  const Mat3 gram = m_.transpose() * m_;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m_.determinant() - 1.0) <= tol;
}

Rotation so3_exp(const TangentVector& v) {
  require(v.allFinite(), Errc::invalid_argument, "so3_exp: non-finite input");
  const double theta = v.norm();
  const Mat3 k = skew(v);
  double a, b;  // sin(t)/t, (1-cos(t))/t^2
  if (theta < kExpSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Rotation::from_matrix_unchecked(Mat3::Identity() + a * k +
                                         b * (k * k));
}

TangentVector so3_log(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double cos_theta =
      std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  require(theta < M_PI - kAntipodalMargin, Errc::near_antipodal,
          "so3_log: rotation angle within margin of pi");
  const Vec3 w(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  if (theta < kLogSmallAngle) {
    // w = 2 sin(theta) * axis; sin(theta)/theta -> 1
    return 0.5 * (1.0 + theta * theta / 6.0) * w;
  }
  return (theta / (2.0 * std::sin(theta))) * w;
}

double geodesic_angle(const Rotation& a, const Rotation& b) {
  const double tr = (a.matrix().transpose() * b.matrix()).trace();
  return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

Rotation geodesic(const Rotation& r0, const Rotation& r1, double s) {
  require(s >= 0.0 && s <= 1.0, Errc::invalid_argument,
          "geodesic: s outside [0, 1]");
  const TangentVector v = so3_log(r0.transpose() * r1);
  return r0 * so3_exp(s * v);
}

Vec9 mat2vec(const Rotation& r) {
  const Mat3& m = r.matrix();
  Vec9 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(3 * i + j) = m(i, j);
  return out;
}

std::vector<Vec3> apply_frame(const RigidTransform& t,
                              const std::vector<Vec3>& pts) {
  std::vector<Vec3> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = t.apply(pts[i]);
  return out;
}

Rotation orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  Mat3 r = u * v.transpose();
  if (r.determinant() < 0) {
    u.col(2) *= -1.0;
    r = u * v.transpose();
  }
  return Rotation::from_matrix_unchecked(r);
}

Rotation uniform_random_rotation(Rng& rng) {
  // Shoemake's method: uniform unit quaternion from three uniforms.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double two_pi = 6.283185307179586476925286766559;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double qx = a * std::sin(two_pi * u2);
  const double qy = a * std::cos(two_pi * u2);
  const double qz = b * std::sin(two_pi * u3);
  const double qw = b * std::cos(two_pi * u3);
  Mat3 m;
  m << 1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw),
      2 * (qx * qz + qy * qw),  //
      2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz),
      2 * (qy * qz - qx * qw),  //
      2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw),
      1 - 2 * (qx * qx + qy * qy);
  return Rotation::from_matrix_unchecked(m);
}

}  // namespace atomflow::geom3

#include "ksmpc/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ksmpc {

double wrap_angle(double a) {
  if (a > -M_PI && a <= M_PI) return a;  // exact passthrough inside the range
  constexpr double kTwoPi = 2.0 * M_PI;
  double y = std::fmod(a + M_PI, kTwoPi);
  if (y <= 0.0) y += kTwoPi;
  return y - M_PI;
}

BodyVelocity mode_input(int sigma, const ModeSet& modes) {
  if (sigma < 1 || sigma > ModeSet::kCount) {
    throw std::domain_error("mode_input: sigma " + std::to_string(sigma) +
                            " outside 1.." + std::to_string(ModeSet::kCount));
  }
  BodyVelocity v;
  if (sigma == 1) return v;
  if (sigma <= 4) {
    v.linear[sigma - 2] = modes.v_bar;
  } else if (sigma <= 7) {
    v.angular[sigma - 5] = modes.w_bar;
  } else if (sigma <= 10) {
    v.linear[sigma - 8] = -modes.v_bar;
  } else {
    v.angular[sigma - 11] = -modes.w_bar;
  }
  return v;
}

Matrix6d body_to_world_map(const Eigen::Vector3d& attitude, double eps,
                           RotationConvention convention) {
  const double phi = attitude[0];
  const double theta = attitude[1];
  const double psi = attitude[2];
  if (std::abs(theta) >= M_PI / 2.0 - eps) {
    throw std::domain_error("body_to_world_map: pitch " + std::to_string(theta) +
                            " too close to +/-pi/2");
  }

  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);
  const double cpsi = std::cos(psi), spsi = std::sin(psi);

  Eigen::Matrix3d rv;
  if (convention == RotationConvention::Zyx) {
    rv << cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi,
          cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi,
          -sth,       sphi * cth,                      cphi * cth;
  } else {
    // Alternate form with pitch in place of roll in the mixed terms. Kept
    // only for comparison; this matrix is not orthogonal away from theta=0.
    rv << cth * cpsi, sphi * sth * cpsi - cth * spsi, cphi * sth * cpsi + sth * spsi,
          cth * spsi, sphi * sth * spsi + cth * cpsi, cphi * sth * spsi - sth * cpsi,
          -sth,       sphi * cth,                     cphi * cth;
  }

  const double tth = sth / cth;
  Eigen::Matrix3d rw;
  rw << 1.0, sphi * tth, cphi * tth,
        0.0, cphi,       -sphi,
        0.0, sphi / cth, cphi / cth;

  Matrix6d r = Matrix6d::Zero();
  r.topLeftCorner<3, 3>() = rv;
  r.bottomRightCorner<3, 3>() = rw;
  return r;
}

Pose step(const Pose& pose, int sigma, double T, const ModeSet& modes) {
  if (T <= 0.0) throw std::domain_error("step: sampling time must be positive");
  const Matrix6d r = body_to_world_map(pose.attitude);
  const Vector6d rate = r * mode_input(sigma, modes).to_vector();

  Pose next;
  next.position = pose.position + T * rate.head<3>();
  next.attitude = pose.attitude + T * rate.tail<3>();
  next.attitude[0] = wrap_angle(next.attitude[0]);
  next.attitude[2] = wrap_angle(next.attitude[2]);
  return next;
}

std::vector<Pose> rollout(const Pose& pose, const SwitchSequence& seq, double T,
                          const ModeSet& modes) {
  std::vector<Pose> out;
  out.reserve(seq.size() + 1);
  out.push_back(pose);
  for (int sigma : seq) {
    out.push_back(step(out.back(), sigma, T, modes));
  }
  return out;
}

}  // namespace ksmpc

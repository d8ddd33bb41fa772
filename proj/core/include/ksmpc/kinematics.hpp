#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ksmpc {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Absolute UAV pose: world position plus roll/pitch/yaw Euler attitude.
/// Pitch must stay strictly inside (-pi/2, pi/2); roll and yaw are kept
/// wrapped to (-pi, pi].
struct Pose {
  Eigen::Vector3d position{0.0, 0.0, 0.0};  // [m]
  Eigen::Vector3d attitude{0.0, 0.0, 0.0};  // roll, pitch, yaw [rad]
};

/// Body-frame velocity command: (v_u, v_v, v_w) linear, (w_p, w_q, w_r) angular.
struct BodyVelocity {
  Eigen::Vector3d linear{0.0, 0.0, 0.0};   // [m/s]
  Eigen::Vector3d angular{0.0, 0.0, 0.0};  // [rad/s]

  Vector6d to_vector() const {
    Vector6d v;
    v << linear, angular;
    return v;
  }
};

/// The 13-mode velocity alphabet: hover, +/- v_bar on each body linear axis,
/// +/- w_bar on each body angular axis.
struct ModeSet {
  double v_bar = 0.2;  // linear speed magnitude [m/s]
  double w_bar = 0.6;  // angular speed magnitude [rad/s]
  static constexpr int kCount = 13;
};

/// Horizon-length sequence of mode indices, each in 1..13.
using SwitchSequence = std::vector<int>;

/// Which rotation-block convention body_to_world_map uses for the linear part.
/// Zyx is the proper world-from-body rotation (orthogonal, det +1).
/// PitchMixed substitutes pitch for roll in four off-diagonal terms; it is
/// not orthogonal and exists only for cross-checking against sources that
/// state the map in that form.
enum class RotationConvention { Zyx, PitchMixed };

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

/// Velocity vector for mode sigma (1..13). Throws std::domain_error outside
/// that range.
BodyVelocity mode_input(int sigma, const ModeSet& modes);

/// Block-diagonal diag(R_v, R_w) mapping body velocity to world pose rates.
/// Throws std::domain_error when |pitch| >= pi/2 - eps (R_w singularity).
Matrix6d body_to_world_map(const Eigen::Vector3d& attitude,
                           double eps = 1e-6,
                           RotationConvention convention = RotationConvention::Zyx);

/// One forward-Euler step of the switched kinematics with sampling time T.
/// Roll/yaw are re-wrapped after the update.
Pose step(const Pose& pose, int sigma, double T, const ModeSet& modes);

/// Iterated step over a mode sequence. Returns N+1 poses including the start.
std::vector<Pose> rollout(const Pose& pose, const SwitchSequence& seq, double T,
                          const ModeSet& modes);

}  // namespace ksmpc

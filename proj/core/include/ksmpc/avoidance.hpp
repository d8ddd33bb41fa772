#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ksmpc {

/// Center-to-center keep-out ball: radius = R_a + R_b + delta.
struct SafetySphere {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  double radius = 0.0;  // [m]
};

inline double safety_radius(double r_a, double r_b, double delta) {
  return r_a + r_b + delta;
}

/// Polytope outer approximation of a ball: unit normals and plane offsets.
/// The tangent construction (offsets = radius everywhere) makes any single
/// facet inequality sufficient for the spherical separation.
struct FacetSet {
  std::vector<Eigen::Vector3d> normals;
  Eigen::VectorXd offsets;  // d_mu [m]

  int size() const { return static_cast<int>(normals.size()); }

  static FacetSet tangent(std::vector<Eigen::Vector3d> normals, double radius);
};

enum class FacetLayout {
  Fibonacci,    // deterministic near-uniform sphere covering, any gamma >= 6
  AxisAligned,  // +/- e_x, e_y, e_z; gamma must be exactly 6
};

/// Deterministic unit normals covering the sphere. Throws std::domain_error
/// for gamma < 6 or an AxisAligned request with gamma != 6.
std::vector<Eigen::Vector3d> facet_normals(int gamma,
                                           FacetLayout layout = FacetLayout::Fibonacci);

/// rho_mu = eta_mu . (p - o) - d_mu for every facet.
Eigen::VectorXd signed_distances(const Eigen::Vector3d& p, const Eigen::Vector3d& o,
                                 const FacetSet& facets);

/// Index of the largest signed distance; ties go to the lowest index.
/// Throws std::domain_error on an empty vector.
int select_facet(const Eigen::VectorXd& rho);

/// Single half-space avoidance constraint anchored at a reference position:
/// satisfied(p) iff normal . (p - reference) >= offset.
struct LinearConstraint {
  Eigen::Vector3d normal{1.0, 0.0, 0.0};
  double offset = 0.0;  // [m]
  Eigen::Vector3d reference{0.0, 0.0, 0.0};
  int time_index = 0;

  double margin(const Eigen::Vector3d& p) const {
    return normal.dot(p - reference) - offset;
  }
  bool satisfied(const Eigen::Vector3d& p) const { return margin(p) >= 0.0; }
};

/// Most-restrictive tangent facet of a precomputed set, evaluated at the
/// nominal point and anchored at the reference.
LinearConstraint select_constraint(const Eigen::Vector3d& p_nominal,
                                   const Eigen::Vector3d& reference,
                                   const FacetSet& facets, int time_index = 0);

/// Tangent-polytope linearization of the obstacle keep-out sphere: builds the
/// facet set for sphere.radius, picks the facet most aligned with
/// p_nominal - o_pred, and returns that single linear constraint.
LinearConstraint build_obstacle_constraint(const Eigen::Vector3d& p_nominal,
                                           const Eigen::Vector3d& o_pred,
                                           const SafetySphere& sphere, int gamma,
                                           int time_index = 0,
                                           FacetLayout layout = FacetLayout::Fibonacci);

/// Same construction against a neighboring agent's predicted position.
LinearConstraint build_agent_constraint(const Eigen::Vector3d& p_nominal,
                                        const Eigen::Vector3d& q_pred,
                                        const SafetySphere& sphere, int gamma,
                                        int time_index = 0,
                                        FacetLayout layout = FacetLayout::Fibonacci);

}  // namespace ksmpc

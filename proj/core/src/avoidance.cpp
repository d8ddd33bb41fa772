#include "ksmpc/avoidance.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ksmpc {

FacetSet FacetSet::tangent(std::vector<Eigen::Vector3d> normals, double radius) {
  if (radius <= 0.0) throw std::domain_error("FacetSet: radius must be positive");
  FacetSet f;
  f.offsets = Eigen::VectorXd::Constant(static_cast<int>(normals.size()), radius);
  f.normals = std::move(normals);
  return f;
}

std::vector<Eigen::Vector3d> facet_normals(int gamma, FacetLayout layout) {
  if (gamma < 6) {
    throw std::domain_error("facet_normals: need at least 6 facets to bound a ball");
  }
  std::vector<Eigen::Vector3d> normals;
  normals.reserve(gamma);

  if (layout == FacetLayout::AxisAligned) {
    if (gamma != 6) {
      throw std::domain_error("facet_normals: axis-aligned layout requires gamma == 6");
    }
    for (int axis = 0; axis < 3; ++axis) {
      normals.push_back(Eigen::Vector3d::Unit(axis));
      normals.push_back(-Eigen::Vector3d::Unit(axis));
    }
    return normals;
  }

  // Fibonacci spiral lattice on the unit sphere.
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < gamma; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / gamma;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    Eigen::Vector3d n(r * std::cos(a), r * std::sin(a), z);
    normals.push_back(n.normalized());
  }
  return normals;
}

Eigen::VectorXd signed_distances(const Eigen::Vector3d& p, const Eigen::Vector3d& o,
                                 const FacetSet& facets) {
  const Eigen::Vector3d diff = p - o;
  Eigen::VectorXd rho(facets.size());
  for (int mu = 0; mu < facets.size(); ++mu) {
    rho[mu] = facets.normals[mu].dot(diff) - facets.offsets[mu];
  }
  return rho;
}

int select_facet(const Eigen::VectorXd& rho) {
  if (rho.size() == 0) throw std::domain_error("select_facet: empty signed distances");
  int best = 0;
  for (int mu = 1; mu < rho.size(); ++mu) {
    if (rho[mu] > rho[best]) best = mu;
  }
  return best;
}

LinearConstraint select_constraint(const Eigen::Vector3d& p_nominal,
                                   const Eigen::Vector3d& reference,
                                   const FacetSet& facets, int time_index) {
  const int mu = select_facet(signed_distances(p_nominal, reference, facets));
  return LinearConstraint{facets.normals[mu], facets.offsets[mu], reference, time_index};
}

LinearConstraint build_obstacle_constraint(const Eigen::Vector3d& p_nominal,
                                           const Eigen::Vector3d& o_pred,
                                           const SafetySphere& sphere, int gamma,
                                           int time_index, FacetLayout layout) {
  const FacetSet facets = FacetSet::tangent(facet_normals(gamma, layout), sphere.radius);
  return select_constraint(p_nominal, o_pred, facets, time_index);
}

LinearConstraint build_agent_constraint(const Eigen::Vector3d& p_nominal,
                                        const Eigen::Vector3d& q_pred,
                                        const SafetySphere& sphere, int gamma,
                                        int time_index, FacetLayout layout) {
  const FacetSet facets = FacetSet::tangent(facet_normals(gamma, layout), sphere.radius);
  return select_constraint(p_nominal, q_pred, facets, time_index);
}

}  // namespace ksmpc

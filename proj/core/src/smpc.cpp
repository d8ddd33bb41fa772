#include "ksmpc/smpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace ksmpc {

namespace {

constexpr double kTieEps = 1e-12;

SwitchSequence pad_to_horizon(SwitchSequence seq, int horizon) {
  seq.resize(horizon, 1);  // hover-pad; also truncates longer sequences
  return seq;
}

}  // namespace

std::vector<int> compute_cluster(const std::map<int, Eigen::Vector3d>& positions,
                                 int agent, double r_cl) {
  const auto it = positions.find(agent);
  if (it == positions.end()) {
    throw std::domain_error("compute_cluster: unknown agent id " + std::to_string(agent));
  }
  if (r_cl <= 0.0) throw std::domain_error("compute_cluster: r_cl must be positive");
  std::vector<int> cluster;
  for (const auto& [id, p] : positions) {
    if (id == agent) continue;
    if ((it->second - p).norm() < r_cl) cluster.push_back(id);
  }
  return cluster;
}

std::map<int, std::vector<Eigen::Vector3d>> neighbor_trajectories(
    const ClusterView& view, double T, const ModeSet& modes, int horizon) {
  std::map<int, std::vector<Eigen::Vector3d>> out;
  for (const NeighborPlan& nb : view.neighbors) {
    std::vector<Eigen::Vector3d>& track = out[nb.id];
    track.reserve(horizon);
    if (nb.sequence.empty()) {
      track.assign(horizon, nb.state.position);
      continue;
    }
    const auto poses = rollout(nb.state, pad_to_horizon(nb.sequence, horizon), T, modes);
    for (int t = 1; t <= horizon; ++t) track.push_back(poses[t].position);
  }
  return out;
}

std::vector<std::vector<LinearConstraint>> assemble_constraints(
    const OcpProblem& problem, const std::vector<Pose>& candidate) {
  const int N = problem.horizon;
  if (static_cast<int>(candidate.size()) != N) {
    throw std::domain_error("assemble_constraints: candidate pose list must have length N");
  }

  FacetSet obstacle_facets, agent_facets;
  if (!problem.obstacle_tracks.empty()) {
    obstacle_facets = FacetSet::tangent(
        facet_normals(problem.gamma, problem.facet_layout), problem.obstacle_radius);
  }
  if (!problem.neighbor_tracks.empty()) {
    agent_facets = FacetSet::tangent(facet_normals(problem.gamma, problem.facet_layout),
                                     problem.agent_radius);
  }

  std::vector<std::vector<LinearConstraint>> all(N);
  for (int t = 0; t < N; ++t) {
    for (const auto& track : problem.obstacle_tracks) {
      all[t].push_back(
          select_constraint(candidate[t].position, track.at(t), obstacle_facets, t + 1));
    }
    for (const auto& track : problem.neighbor_tracks) {
      all[t].push_back(
          select_constraint(candidate[t].position, track.at(t), agent_facets, t + 1));
    }
  }
  return all;
}

namespace {

// Depth-first enumeration in ascending-mode (lexicographic) order. Phase one
// minimizes cost over feasible sequences; when nothing is feasible a second
// pass minimizes the accumulated constraint slack instead.
class TreeSearch {
 public:
  explicit TreeSearch(const OcpProblem& p) : prob_(p) {
    if (prob_.horizon < 1) throw std::domain_error("solve: horizon must be >= 1");
    for (const auto& track : prob_.obstacle_tracks) {
      if (static_cast<int>(track.size()) != prob_.horizon) {
        throw std::domain_error("solve: obstacle track length must equal the horizon");
      }
    }
    for (const auto& track : prob_.neighbor_tracks) {
      if (static_cast<int>(track.size()) != prob_.horizon) {
        throw std::domain_error("solve: neighbor track length must equal the horizon");
      }
    }
    if (!prob_.obstacle_tracks.empty()) {
      obstacle_normals_ = facet_normals(prob_.gamma, prob_.facet_layout);
    }
    if (!prob_.neighbor_tracks.empty()) {
      agent_normals_ = facet_normals(prob_.gamma, prob_.facet_layout);
    }
    poses_.resize(prob_.horizon + 1);
    seq_.assign(prob_.horizon, 1);
  }

  Solution run() {
    poses_[0] = prob_.state;

    minimize_violation_ = false;
    best_found_ = false;
    best_value_ = std::numeric_limits<double>::infinity();
    expand(0, 0.0, 0.0);

    if (best_found_) {
      return make_solution(best_seq_, true, 0.0);
    }

    minimize_violation_ = true;
    best_found_ = false;
    best_value_ = std::numeric_limits<double>::infinity();
    expand(0, 0.0, 0.0);

    return make_solution(best_seq_, false, best_value_);
  }

 private:
  // Slack of the most permissive facet against every track at step index s
  // (0-based successor step). Zero means all constraints hold.
  double step_slack(const Eigen::Vector3d& p, int s) const {
    double total = 0.0;
    for (const auto& track : prob_.obstacle_tracks) {
      total += pair_slack(p, track[s], obstacle_normals_, prob_.obstacle_radius);
    }
    for (const auto& track : prob_.neighbor_tracks) {
      total += pair_slack(p, track[s], agent_normals_, prob_.agent_radius);
    }
    return total;
  }

  static double pair_slack(const Eigen::Vector3d& p, const Eigen::Vector3d& ref,
                           const std::vector<Eigen::Vector3d>& normals, double radius) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& n : normals) {
      const double d = n.dot(p - ref);
      if (d > best) best = d;
    }
    const double slack = radius - best;
    return slack > 0.0 ? slack : 0.0;
  }

  // Admissible lower bound on the remaining cost from distance d with
  // `remaining` steps to go: the coarse per-horizon bound plus the tighter
  // per-step shrink bound (each step moves the position by at most T*v_bar).
  double remaining_bound(double d, int remaining) const {
    const double vT = prob_.T * prob_.modes.v_bar;
    const double coarse =
        remaining * std::max(0.0, d - remaining * vT * std::sqrt(3.0));
    int m = remaining;
    if (vT > 0.0) {
      const double md = std::floor(d / vT);
      if (md < remaining) m = static_cast<int>(md);
    }
    const double stepped = m * d - vT * (static_cast<double>(m) * (m + 1) / 2.0);
    return std::max(coarse, stepped);
  }

  void expand(int depth, double cost, double violation) {
    if (depth == prob_.horizon) {
      const double value = minimize_violation_ ? violation : cost;
      if (!best_found_ || value < best_value_ - kTieEps) {
        best_found_ = true;
        best_value_ = value;
        best_seq_ = seq_;
      }
      return;
    }

    if (best_found_) {
      if (minimize_violation_) {
        if (violation >= best_value_ - kTieEps) return;
      } else {
        const double d = (poses_[depth].position - prob_.reference).norm();
        if (cost + remaining_bound(d, prob_.horizon - depth) >= best_value_ - kTieEps) {
          return;
        }
      }
    }

    Matrix6d map;
    try {
      map = body_to_world_map(poses_[depth].attitude);
    } catch (const std::domain_error&) {
      return;  // pitch guard: no sequence through this pose is usable
    }

    for (int sigma = 1; sigma <= ModeSet::kCount; ++sigma) {
      // Same arithmetic as kinematics::step with the body-to-world map hoisted
      // out of the mode loop.
      const Vector6d rate = map * mode_input(sigma, prob_.modes).to_vector();
      Pose next;
      next.position = poses_[depth].position + prob_.T * rate.head<3>();
      next.attitude = poses_[depth].attitude + prob_.T * rate.tail<3>();
      next.attitude[0] = wrap_angle(next.attitude[0]);
      next.attitude[2] = wrap_angle(next.attitude[2]);

      const double slack = step_slack(next.position, depth);
      if (!minimize_violation_ && slack > 0.0) continue;

      poses_[depth + 1] = next;
      seq_[depth] = sigma;
      const double step_cost = (next.position - prob_.reference).norm();
      expand(depth + 1, cost + step_cost, violation + slack);
    }
    seq_[depth] = 1;
  }

  Solution make_solution(const SwitchSequence& seq, bool feasible, double violation) {
    Solution sol;
    sol.sequence = seq;
    sol.poses = rollout(prob_.state, seq, prob_.T, prob_.modes);
    sol.cost = 0.0;
    for (int t = 1; t <= prob_.horizon; ++t) {
      sol.cost += (sol.poses[t].position - prob_.reference).norm();
    }
    sol.feasible = feasible;
    sol.violation = violation;
    return sol;
  }

  const OcpProblem& prob_;
  std::vector<Eigen::Vector3d> obstacle_normals_;
  std::vector<Eigen::Vector3d> agent_normals_;

  std::vector<Pose> poses_;
  SwitchSequence seq_;
  bool minimize_violation_ = false;
  bool best_found_ = false;
  double best_value_ = 0.0;
  SwitchSequence best_seq_;
};

}  // namespace

Solution solve(const OcpProblem& problem) { return TreeSearch(problem).run(); }

std::vector<AgentOutcome> sequential_round(
    const std::vector<AgentState>& agents,
    const std::vector<std::vector<std::vector<Eigen::Vector3d>>>& obstacle_tracks,
    const RoundParams& params, const std::vector<int>& order) {
  if (obstacle_tracks.size() != agents.size()) {
    throw std::domain_error("sequential_round: obstacle_tracks must align with agents");
  }

  std::unordered_map<int, std::size_t> index;
  std::map<int, Eigen::Vector3d> positions;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!index.emplace(agents[i].id, i).second) {
      throw std::domain_error("sequential_round: duplicate agent id");
    }
    positions[agents[i].id] = agents[i].pose.position;
  }
  if (order.size() != agents.size()) {
    throw std::domain_error("sequential_round: order must be a permutation of agent ids");
  }
  {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int id : sorted) {
      if (index.find(id) == index.end()) {
        throw std::domain_error("sequential_round: order contains unknown id");
      }
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::domain_error("sequential_round: order repeats an id");
    }
  }

  std::map<int, SwitchSequence> published;
  std::vector<AgentOutcome> outcomes(agents.size());

  for (int id : order) {
    const std::size_t i = index[id];
    const AgentState& self = agents[i];

    ClusterView view;
    view.owner = id;
    for (int j : compute_cluster(positions, id, params.r_cl)) {
      const AgentState& nb = agents[index[j]];
      NeighborPlan plan;
      plan.id = j;
      plan.state = nb.pose;
      if (auto it = published.find(j); it != published.end()) {
        plan.sequence = it->second;
        plan.fresh = true;
      } else if (!nb.previous.empty()) {
        // Previous plan advanced by one step, hover-padded at the tail.
        plan.sequence.assign(nb.previous.begin() + 1, nb.previous.end());
        plan.sequence = pad_to_horizon(std::move(plan.sequence), params.horizon);
      }
      view.neighbors.push_back(std::move(plan));
    }

    OcpProblem problem;
    problem.state = self.pose;
    problem.reference = self.reference;
    problem.horizon = params.horizon;
    problem.T = params.T;
    problem.modes = params.modes;
    problem.obstacle_tracks = obstacle_tracks[i];
    problem.obstacle_radius = params.obstacle_radius;
    problem.agent_radius = params.agent_radius;
    problem.gamma = params.gamma;
    problem.facet_layout = params.facet_layout;
    for (auto& [nb_id, track] : neighbor_trajectories(view, params.T, params.modes,
                                                      params.horizon)) {
      problem.neighbor_tracks.push_back(std::move(track));
    }

    AgentOutcome& out = outcomes[i];
    out.id = id;
    out.solution = solve(problem);
    out.committed_mode = out.solution.sequence.front();
    for (const NeighborPlan& nb : view.neighbors) out.cluster.push_back(nb.id);
    published[id] = out.solution.sequence;
  }
  return outcomes;
}

}  // namespace ksmpc

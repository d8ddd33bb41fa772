#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "ksmpc/avoidance.hpp"
#include "ksmpc/kinematics.hpp"

namespace ksmpc {

/// One neighbor as seen by the solving agent: its reported state and the
/// input sequence it shared. `fresh` marks sequences solved this round;
/// stale entries carry the previous round's plan shifted by one. An empty
/// sequence means the neighbor is assumed static.
struct NeighborPlan {
  int id = -1;
  Pose state;
  SwitchSequence sequence;
  bool fresh = false;
};

/// Cluster-local information available to one agent when it solves.
struct ClusterView {
  int owner = -1;
  std::vector<NeighborPlan> neighbors;
};

/// Ids within r_cl of agent i (strict inequality), excluding i itself.
/// Throws std::domain_error when i is not in the map.
std::vector<int> compute_cluster(const std::map<int, Eigen::Vector3d>& positions,
                                 int agent, double r_cl);

/// Reconstruct each neighbor's next `horizon` positions from its shared
/// sequence (padded with hover / truncated to the horizon). Neighbors with
/// an empty sequence are held static.
std::map<int, std::vector<Eigen::Vector3d>> neighbor_trajectories(
    const ClusterView& view, double T, const ModeSet& modes, int horizon);

/// Finite-horizon switched OCP for one agent. Obstacle and neighbor tracks
/// hold the N successor positions aligned with the candidate poses reached
/// after 1..N mode applications.
struct OcpProblem {
  Pose state;
  Eigen::Vector3d reference{0.0, 0.0, 0.0};
  int horizon = 4;
  double T = 0.01;
  ModeSet modes;
  std::vector<std::vector<Eigen::Vector3d>> obstacle_tracks;
  std::vector<std::vector<Eigen::Vector3d>> neighbor_tracks;
  double obstacle_radius = 0.24;  // center-to-center floor vs obstacles [m]
  double agent_radius = 0.24;     // center-to-center floor vs neighbors [m]
  int gamma = 26;
  FacetLayout facet_layout = FacetLayout::Fibonacci;
};

struct Solution {
  SwitchSequence sequence;  // N modes
  std::vector<Pose> poses;  // N+1 poses including the start
  double cost = 0.0;        // sum over successor steps of |p_t - p_ref|
  bool feasible = false;
  double violation = 0.0;   // total positive constraint slack when infeasible
};

/// Per-step avoidance constraints for a candidate trajectory (the N successor
/// poses): one constraint per obstacle and per neighbor at each step, each
/// anchored at the candidate pose.
std::vector<std::vector<LinearConstraint>> assemble_constraints(
    const OcpProblem& problem, const std::vector<Pose>& candidate);

/// Depth-first search over the 13^N mode tree with prefix-feasibility and
/// admissible-bound pruning. Returns the feasible cost minimizer; equal costs
/// (within 1e-12) resolve to the lexicographically smallest sequence. When no
/// sequence is feasible, returns the total-violation minimizer flagged
/// infeasible. Deterministic.
Solution solve(const OcpProblem& problem);

/// One agent entering a sequential round.
struct AgentState {
  int id = -1;
  Pose pose;
  Eigen::Vector3d reference{0.0, 0.0, 0.0};
  SwitchSequence previous;  // last published sequence; empty before the first solve
};

struct RoundParams {
  double T = 0.01;
  int horizon = 4;
  ModeSet modes;
  double r_cl = 0.9;
  double obstacle_radius = 0.24;
  double agent_radius = 0.24;
  int gamma = 26;
  FacetLayout facet_layout = FacetLayout::Fibonacci;
};

struct AgentOutcome {
  int id = -1;
  int committed_mode = 1;
  Solution solution;
  std::vector<int> cluster;
};

/// One sequential distributed round: agents solve in `order`, each seeing
/// fresh sequences from already-solved cluster members and shifted previous
/// sequences (hover-padded) from the rest; agents with no previous sequence
/// are treated as static. obstacle_tracks is indexed [agent][obstacle][step]
/// and aligned with `agents`. Outcomes are returned in `agents` order.
std::vector<AgentOutcome> sequential_round(
    const std::vector<AgentState>& agents,
    const std::vector<std::vector<std::vector<Eigen::Vector3d>>>& obstacle_tracks,
    const RoundParams& params, const std::vector<int>& order);

}  // namespace ksmpc

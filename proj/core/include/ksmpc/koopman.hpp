#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ksmpc {

/// Fixed per-coordinate observable set [z, z^2, sin z, cos z, z^2 sin z,
/// z^2 cos z], concatenated over the tracked coordinates. coords = 2 lifts
/// planar (x, y) positions, coords = 3 adds an identical z block.
class LiftingDictionary {
 public:
  static constexpr int kPerCoord = 6;

  explicit LiftingDictionary(int coords = 2);

  int coords() const { return coords_; }
  int lifted_dim() const { return coords_ * kPerCoord; }

  /// Lift a position (length coords) into the observable space (length L).
  Eigen::VectorXd lift(const Eigen::VectorXd& position) const;

  /// Read the position back out of a lifted vector: the linear observable
  /// leads each coordinate block. Exact inverse of lift on those entries.
  Eigen::VectorXd extract_position(const Eigen::VectorXd& lifted) const;

 private:
  int coords_;
};

struct Observation {
  double time = 0.0;
  Eigen::VectorXd position;
};

/// Ring buffer of timestamped position measurements, oldest first.
/// Timestamps must be strictly increasing; when an expected sample spacing
/// dt > 0 is set, pushes that break the uniform grid are rejected.
class ObservationBuffer {
 public:
  explicit ObservationBuffer(std::size_t capacity = 200, double dt = 0.0);

  void push(double time, const Eigen::VectorXd& position);
  void clear() { buf_.clear(); }

  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return buf_.empty(); }
  double dt() const { return dt_; }

  const Observation& operator[](std::size_t i) const { return buf_[i]; }
  const Observation& latest() const { return buf_.back(); }

 private:
  std::size_t capacity_;
  double dt_;
  std::deque<Observation> buf_;
};

/// Lifted-space linear operator fitted from snapshot pairs.
struct KoopmanModel {
  Eigen::MatrixXd K;
  LiftingDictionary dictionary{2};
  double residual = 0.0;  // RMS one-step lifted error over the training pairs
};

/// Horizon forecast for one obstacle: one position per lookahead step.
struct ObstaclePrediction {
  int obstacle_id = -1;
  std::vector<Eigen::Vector3d> positions;
  bool unreliable = false;  // some |o_t| exceeded the magnitude bound
  bool from_model = true;   // false for the constant-position fallback
};

/// Minimum number of buffered samples before fit() produces a model:
/// L + 1 samples give the L consecutive pairs needed for a full-rank Gram.
inline int min_fit_samples(const LiftingDictionary& dict) {
  return dict.lifted_dim() + 1;
}

/// Scale-aware default ridge, 1e-8 * trace(Gram) / L, for a buffer about to
/// be fitted. Returns 0 for an empty buffer.
double auto_ridge(const ObservationBuffer& buffer, const LiftingDictionary& dict);

/// Ridge-regularized EDMD over consecutive lifted snapshot pairs:
/// K = (sum y x^T)(sum x x^T + ridge I)^-1. Returns nullopt while the buffer
/// holds fewer than min_fit_samples entries. With ridge = 0 a structurally
/// rank-deficient snapshot matrix raises std::runtime_error advising a
/// positive ridge.
std::optional<KoopmanModel> fit(const ObservationBuffer& buffer, double ridge,
                                const LiftingDictionary& dict);

/// Iterate the lifted dynamics N steps from the latest measurement and
/// extract positions. For a planar dictionary the z coordinate is carried
/// through unchanged from the measurement.
ObstaclePrediction predict(const KoopmanModel& model, const Eigen::Vector3d& latest,
                           int horizon, double magnitude_bound = 1e3);

struct TrackerConfig {
  int coords = 2;
  std::size_t buffer_capacity = 200;
  double dt = 0.0;            // expected sample spacing; 0 disables the check
  double ridge = -1.0;        // < 0 selects auto_ridge
  double magnitude_bound = 1e3;
};

/// Per-obstacle measurement ingestion and forecasting. Refits on every
/// forecast once enough samples have accumulated; before that it returns the
/// latest measurement repeated. A gap in the sample grid restarts the track.
class ObstacleTracker {
 public:
  ObstacleTracker(int obstacle_id, const TrackerConfig& cfg);

  void ingest(double time, const Eigen::Vector3d& measured);

  bool has_measurement() const { return !buffer_.empty(); }
  bool ready() const;

  /// Forecast `horizon` steps ahead. Throws std::logic_error when no
  /// measurement has ever been ingested.
  ObstaclePrediction forecast(int horizon);

  const std::optional<KoopmanModel>& model() const { return model_; }
  const ObservationBuffer& buffer() const { return buffer_; }
  int id() const { return id_; }

 private:
  int id_;
  TrackerConfig cfg_;
  LiftingDictionary dict_;
  ObservationBuffer buffer_;
  std::optional<KoopmanModel> model_;
  Eigen::Vector3d last_measured_{0.0, 0.0, 0.0};
};

}  // namespace ksmpc

#include "ksmpc/koopman.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ksmpc {

LiftingDictionary::LiftingDictionary(int coords) : coords_(coords) {
  if (coords != 2 && coords != 3) {
    throw std::domain_error("LiftingDictionary: coords must be 2 or 3");
  }
}

Eigen::VectorXd LiftingDictionary::lift(const Eigen::VectorXd& position) const {
  if (position.size() != coords_) {
    throw std::domain_error("lift: expected " + std::to_string(coords_) +
                            " coordinates, got " + std::to_string(position.size()));
  }
  Eigen::VectorXd g(lifted_dim());
  for (int c = 0; c < coords_; ++c) {
    const double z = position[c];
    const double z2 = z * z;
    const double s = std::sin(z);
    const double co = std::cos(z);
    g.segment<kPerCoord>(c * kPerCoord) << z, z2, s, co, z2 * s, z2 * co;
  }
  return g;
}

Eigen::VectorXd LiftingDictionary::extract_position(const Eigen::VectorXd& lifted) const {
  if (lifted.size() != lifted_dim()) {
    throw std::domain_error("extract_position: expected lifted dimension " +
                            std::to_string(lifted_dim()) + ", got " +
                            std::to_string(lifted.size()));
  }
  Eigen::VectorXd p(coords_);
  for (int c = 0; c < coords_; ++c) p[c] = lifted[c * kPerCoord];
  return p;
}

ObservationBuffer::ObservationBuffer(std::size_t capacity, double dt)
    : capacity_(capacity), dt_(dt) {
  if (capacity_ == 0) throw std::domain_error("ObservationBuffer: zero capacity");
}

void ObservationBuffer::push(double time, const Eigen::VectorXd& position) {
  if (!buf_.empty()) {
    const double prev = buf_.back().time;
    if (time <= prev) {
      throw std::domain_error("ObservationBuffer: timestamps must strictly increase");
    }
    if (dt_ > 0.0 && std::abs((time - prev) - dt_) > 1e-9 * std::max(1.0, dt_)) {
      throw std::domain_error("ObservationBuffer: sample spacing breaks the dt grid");
    }
  }
  buf_.push_back({time, position});
  if (buf_.size() > capacity_) buf_.pop_front();
}

double auto_ridge(const ObservationBuffer& buffer, const LiftingDictionary& dict) {
  if (buffer.size() < 2) return 0.0;
  double trace = 0.0;
  for (std::size_t j = 0; j + 1 < buffer.size(); ++j) {
    trace += dict.lift(buffer[j].position).squaredNorm();
  }
  return 1e-8 * trace / dict.lifted_dim();
}

namespace {

// Relative singular-value cutoff separating structural rank deficiency
// (constant or otherwise degenerate tracks) from the benign near-collinearity
// of smooth observables sampled on a short arc.
constexpr double kRankTol = 1e-12;

}  // namespace

std::optional<KoopmanModel> fit(const ObservationBuffer& buffer, double ridge,
                                const LiftingDictionary& dict) {
  if (ridge < 0.0) throw std::domain_error("fit: ridge must be nonnegative");
  const int L = dict.lifted_dim();
  if (buffer.size() < static_cast<std::size_t>(min_fit_samples(dict))) {
    return std::nullopt;
  }

  const int pairs = static_cast<int>(buffer.size()) - 1;
  Eigen::MatrixXd X(L, pairs);
  Eigen::MatrixXd Y(L, pairs);
  for (int j = 0; j < pairs; ++j) {
    X.col(j) = dict.lift(buffer[j].position.head(dict.coords()));
    Y.col(j) = dict.lift(buffer[j + 1].position.head(dict.coords()));
  }

  Eigen::MatrixXd K(L, L);
  if (ridge > 0.0) {
    Eigen::MatrixXd gram = X * X.transpose();
    gram.diagonal().array() += ridge;
    // K = Y X^T (X X^T + ridge I)^-1, solved as the transposed SPD system.
    K = gram.ldlt().solve(X * Y.transpose()).transpose();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X.transpose(),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTol);
    if (svd.rank() < L) {
      throw std::runtime_error(
          "fit: snapshot Gram matrix is near-singular with ridge = 0; "
          "use a positive ridge");
    }
    K = svd.solve(Y.transpose()).transpose();
  }

  const double rms =
      std::sqrt((Y - K * X).colwise().squaredNorm().sum() / static_cast<double>(pairs));
  return KoopmanModel{std::move(K), dict, rms};
}

ObstaclePrediction predict(const KoopmanModel& model, const Eigen::Vector3d& latest,
                           int horizon, double magnitude_bound) {
  if (horizon < 1) throw std::domain_error("predict: horizon must be >= 1");
  const int c = model.dictionary.coords();

  ObstaclePrediction out;
  out.positions.reserve(horizon);

  Eigen::VectorXd g = model.dictionary.lift(latest.head(c));
  for (int t = 0; t < horizon; ++t) {
    g = model.K * g;
    const Eigen::VectorXd p = model.dictionary.extract_position(g);
    Eigen::Vector3d o = latest;  // planar lift carries z through unchanged
    o.head(c) = p;
    if (o.norm() > magnitude_bound) out.unreliable = true;
    out.positions.push_back(o);
  }
  return out;
}

ObstacleTracker::ObstacleTracker(int obstacle_id, const TrackerConfig& cfg)
    : id_(obstacle_id),
      cfg_(cfg),
      dict_(cfg.coords),
      buffer_(cfg.buffer_capacity, cfg.dt) {}

void ObstacleTracker::ingest(double time, const Eigen::Vector3d& measured) {
  const Eigen::VectorXd pos = measured.head(dict_.coords());
  if (!buffer_.empty() && cfg_.dt > 0.0) {
    const double gap = time - buffer_.latest().time;
    if (std::abs(gap - cfg_.dt) > 1e-9 * std::max(1.0, cfg_.dt)) {
      // Track was interrupted; restart so the buffer keeps its uniform grid.
      buffer_.clear();
      model_.reset();
    }
  }
  buffer_.push(time, pos);
  last_measured_ = measured;
}

bool ObstacleTracker::ready() const {
  return buffer_.size() >= static_cast<std::size_t>(min_fit_samples(dict_));
}

ObstaclePrediction ObstacleTracker::forecast(int horizon) {
  if (buffer_.empty()) {
    throw std::logic_error("ObstacleTracker: forecast before any measurement");
  }
  if (ready()) {
    const double ridge = cfg_.ridge < 0.0 ? auto_ridge(buffer_, dict_) : cfg_.ridge;
    model_ = fit(buffer_, ridge, dict_);
  }
  if (model_) {
    ObstaclePrediction p =
        predict(*model_, last_measured_, horizon, cfg_.magnitude_bound);
    p.obstacle_id = id_;
    return p;
  }
  ObstaclePrediction p;
  p.obstacle_id = id_;
  p.from_model = false;
  p.positions.assign(horizon, last_measured_);
  return p;
}

}  // namespace ksmpc

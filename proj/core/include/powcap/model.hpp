#pragma once

#include <optional>

#include <Eigen/Core>

namespace powcap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// An M-link interference network.
///
/// `gain(j, i)` is the gain from transmitter j into receiver i, so the
/// interference seen by receiver i is the sum over column i minus the
/// diagonal. Powers and noise are in milliwatts.
struct NetworkModel {
  Matrix gain;
  Vector p_max;
  Vector noise;
  Vector weights;
  /// Per-link rate floors in bits per channel use; only the latency solver
  /// reads these.
  std::optional<Vector> min_rates;

  Eigen::Index size() const { return p_max.size(); }
};

struct PowerAllocation {
  Vector p;
};

struct LinkMetrics {
  Vector sinr;
  Vector capacity_bits;
  Vector capacity_nats;
};

/// Throws powcap::Error if any model invariant is violated.
void validate(const NetworkModel& model);

/// Interference plus noise at every receiver: sum_{j != i} gain(j,i) p_j + noise_i.
Vector interference(const NetworkModel& model, const Vector& p);

Vector sinr(const NetworkModel& model, const PowerAllocation& p);
LinkMetrics capacity(const NetworkModel& model, const PowerAllocation& p);

/// min_i w_i log2(1 + SINR_i).
double weighted_min_capacity(const NetworkModel& model, const PowerAllocation& p);

/// sum_i w_i / log2(1 + SINR_i). Throws ErrorCode::kZeroRate if a link is silent.
double weighted_latency(const NetworkModel& model, const PowerAllocation& p);

/// Same as weighted_latency with rates measured in nats.
double weighted_latency_nats(const NetworkModel& model, const PowerAllocation& p);

}  // namespace powcap

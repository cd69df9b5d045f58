#include "powcap/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "powcap/error.hpp"

namespace powcap {

void validate(const NetworkModel& model) {
  const Eigen::Index m = model.p_max.size();
  if (m < 1) throw Error(ErrorCode::kDimensionMismatch, "model has no links");
  if (model.gain.rows() != m || model.gain.cols() != m || model.noise.size() != m ||
      model.weights.size() != m || (model.min_rates && model.min_rates->size() != m)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gain must be " + std::to_string(m) + "x" + std::to_string(m) +
                    " and every per-link vector must have length " + std::to_string(m));
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double g = model.gain(j, i);
      if (!std::isfinite(g) || g < 0.0) {
        throw Error(ErrorCode::kNegativeGain, "gain(" + std::to_string(j) + "," +
                                                  std::to_string(i) + ") must be >= 0");
      }
    }
    if (!(model.gain(j, j) > 0.0)) {
      throw Error(ErrorCode::kNonpositiveDiagonalGain,
                  "direct gain of link " + std::to_string(j) + " must be > 0");
    }
  }
  auto all_positive = [](const Vector& v) {
    return (v.array().isFinite() && v.array() > 0.0).all();
  };
  if (!all_positive(model.p_max)) {
    throw Error(ErrorCode::kNonpositivePowerCap, "all p_max must be > 0");
  }
  if (!all_positive(model.noise)) {
    throw Error(ErrorCode::kNonpositiveNoise, "all noise powers must be > 0");
  }
  if (!all_positive(model.weights)) {
    throw Error(ErrorCode::kNonpositiveWeight, "all weights must be > 0");
  }
  if (model.min_rates &&
      !(model.min_rates->array().isFinite() && model.min_rates->array() >= 0.0).all()) {
    throw Error(ErrorCode::kInvalidArgument, "all min_rates must be >= 0");
  }
}

Vector interference(const NetworkModel& model, const Vector& p) {
  Vector total = model.gain.transpose() * p;
  total -= model.gain.diagonal().cwiseProduct(p);
  return total + model.noise;
}

Vector sinr(const NetworkModel& model, const PowerAllocation& p) {
  const Vector direct = model.gain.diagonal().cwiseProduct(p.p);
  return direct.cwiseQuotient(interference(model, p.p));
}

LinkMetrics capacity(const NetworkModel& model, const PowerAllocation& p) {
  LinkMetrics out;
  out.sinr = sinr(model, p);
  out.capacity_nats = out.sinr.array().log1p();
  out.capacity_bits = out.capacity_nats / std::numbers::ln2;
  return out;
}

double weighted_min_capacity(const NetworkModel& model, const PowerAllocation& p) {
  return model.weights.cwiseProduct(capacity(model, p).capacity_bits).minCoeff();
}

namespace {

double latency_of(const Vector& weights, const Vector& rates) {
  for (Eigen::Index i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0)) {
      throw Error(ErrorCode::kZeroRate, "link " + std::to_string(i) + " has zero rate");
    }
  }
  return weights.cwiseQuotient(rates).sum();
}

}  // namespace

double weighted_latency(const NetworkModel& model, const PowerAllocation& p) {
  return latency_of(model.weights, capacity(model, p).capacity_bits);
}

double weighted_latency_nats(const NetworkModel& model, const PowerAllocation& p) {
  return latency_of(model.weights, capacity(model, p).capacity_nats);
}

}  // namespace powcap

#include "powcap/oracle.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <limits>
#include <numbers>
#include <string>

#include "powcap/error.hpp"

namespace powcap::oracle {

namespace {

constexpr long kFixedPointCap = 1'000'000;
constexpr double kCauchyTol = 1e-12;
constexpr long kRefineBudget = 200'000;
constexpr double kRefineTol = 1e-12;

// Capacities in bits for every link at p, computed directly from the SINR
// definition without going through the model helpers.
void link_bits(const NetworkModel& model, const Vector& p, Vector& out) {
  const Eigen::Index m = model.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    double denom = model.noise[i];
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) denom += model.gain(j, i) * p[j];
    }
    out[i] = std::log2(1.0 + model.gain(i, i) * p[i] / denom);
  }
}

// Upper bound on link i's capacity over the cell [lo, hi]: own power at its
// top, every interferer at its bottom.
double optimistic_bits(const NetworkModel& model, const Vector& lo, const Vector& hi,
                       Eigen::Index i) {
  double denom = model.noise[i];
  for (Eigen::Index j = 0; j < model.size(); ++j) {
    if (j != i) denom += model.gain(j, i) * lo[j];
  }
  return std::log2(1.0 + model.gain(i, i) * hi[i] / denom);
}

class GridWalker {
 public:
  GridWalker(const NetworkModel& model, int points)
      : model_(model), points_(points), index_(model.size(), 0) {}

  Eigen::Index dims() const { return model_.size(); }

  double coordinate(Eigen::Index axis, int k) const {
    return model_.p_max[axis] * static_cast<double>(k) / (points_ - 1);
  }

  Vector point() const {
    Vector p(dims());
    for (Eigen::Index a = 0; a < dims(); ++a) p[a] = coordinate(a, index_[static_cast<size_t>(a)]);
    return p;
  }

  // Lexicographic odometer with the first axis most significant.
  bool next(int limit) {
    for (Eigen::Index a = dims() - 1; a >= 0; --a) {
      if (++index_[static_cast<size_t>(a)] < limit) return true;
      index_[static_cast<size_t>(a)] = 0;
    }
    return false;
  }

  const std::vector<int>& index() const { return index_; }

 private:
  const NetworkModel& model_;
  int points_;
  std::vector<int> index_;
};

void check_grid(const NetworkModel& model, const GridSpec& grid, Eigen::Index max_links) {
  validate(model);
  if (grid.points_per_axis < 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least 2 points per axis");
  }
  if (model.size() > max_links) {
    throw Error(ErrorCode::kGridTooLarge,
                "grid oracle supports at most " + std::to_string(max_links) + " links");
  }
  if (std::pow(static_cast<double>(grid.points_per_axis), static_cast<double>(model.size())) >
      kMaxGridPoints) {
    throw Error(ErrorCode::kGridTooLarge, "grid exceeds 1e8 points");
  }
}

struct Cell {
  Vector lo;
  Vector hi;
  double bound = 0.0;
};

// Best-first refinement of the cell bounds. `bound` returns an optimistic
// value over a cell, or nothing when the cell holds no admissible point.
// Cells that cannot beat `incumbent` are discarded; the most optimistic
// remaining cell is bisected along its widest axis until the budget runs
// out. Returns the most optimistic bound left.
double certify(const NetworkModel& model, int points, double incumbent,
               const std::function<std::optional<double>(const Vector&, const Vector&)>& bound,
               bool maximize) {
  const Eigen::Index m = model.size();
  auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };
  auto worse_first = [&](const Cell& a, const Cell& b) { return better(b.bound, a.bound); };
  std::priority_queue<Cell, std::vector<Cell>, decltype(worse_first)> queue(worse_first);

  double discarded = maximize ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
  auto consider = [&](Vector lo, Vector hi) {
    const std::optional<double> b = bound(lo, hi);
    if (!b) return;
    if (better(*b, incumbent)) {
      queue.push({std::move(lo), std::move(hi), *b});
    } else if (better(*b, discarded)) {
      discarded = *b;
    }
  };

  GridWalker cells(model, points);
  Vector lo(m), hi(m);
  do {
    for (Eigen::Index a = 0; a < m; ++a) {
      const int k = cells.index()[static_cast<size_t>(a)];
      lo[a] = cells.coordinate(a, k);
      hi[a] = cells.coordinate(a, k + 1);
    }
    consider(lo, hi);
  } while (cells.next(points - 1));

  for (long split = 0; split < kRefineBudget && !queue.empty(); ++split) {
    Cell top = queue.top();
    if (std::abs(top.bound - incumbent) <= kRefineTol * (1.0 + std::abs(incumbent))) break;
    queue.pop();
    Eigen::Index axis = 0;
    ((top.hi - top.lo).cwiseQuotient(model.p_max)).maxCoeff(&axis);
    const double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
    Vector left_hi = top.hi;
    left_hi[axis] = mid;
    Vector right_lo = top.lo;
    right_lo[axis] = mid;
    consider(top.lo, left_hi);
    consider(right_lo, top.hi);
  }
  if (queue.empty()) return better(discarded, incumbent) ? discarded : incumbent;
  return better(queue.top().bound, discarded) ? queue.top().bound : discarded;
}

}  // namespace

FixedPointResult fixed_point_feasibility(const NetworkModel& model, const Vector& gamma) {
  validate(model);
  const Eigen::Index m = model.size();
  if (gamma.size() != m || !(gamma.array() >= 0.0).all()) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be nonnegative with one entry per link");
  }
  FixedPointResult out;
  Vector p = Vector::Zero(m);
  Vector next(m);
  for (long iter = 1; iter <= kFixedPointCap; ++iter) {
    for (Eigen::Index i = 0; i < m; ++i) {
      double denom = model.noise[i];
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j != i) denom += model.gain(j, i) * p[j];
      }
      next[i] = gamma[i] * denom / model.gain(i, i);
    }
    out.iterations = iter;
    if ((next.array() > model.p_max.array()).any()) return out;
    const double step = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (step < kCauchyTol) {
      out.feasible = true;
      out.p_min = p;
      return out;
    }
  }
  throw Error(ErrorCode::kIterationCap, "fixed-point iteration did not settle in 1e6 steps");
}

GridResult grid_search_maxmin(const NetworkModel& model, const GridSpec& grid) {
  check_grid(model, grid, 4);
  const Eigen::Index m = model.size();
  const int n = grid.points_per_axis;

  GridResult out;
  out.objective_bits = -std::numeric_limits<double>::infinity();
  Vector bits(m);
  GridWalker walker(model, n);
  do {
    const Vector p = walker.point();
    link_bits(model, p, bits);
    const double value = model.weights.cwiseProduct(bits).minCoeff();
    ++out.evaluated;
    if (value > out.objective_bits) {
      out.objective_bits = value;
      out.p = p;
    }
  } while (walker.next(n));

  // Every cell's optimum is bounded by its optimistic corner evaluation.
  auto cell_upper = [&](const Vector& lo, const Vector& hi) {
    double bound = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      bound = std::min(bound, model.weights[i] * optimistic_bits(model, lo, hi, i));
    }
    return bound;
  };
  const double upper = certify(model, n, out.objective_bits, [&](const Vector& lo, const Vector& hi) {
    return std::optional<double>(cell_upper(lo, hi));
  }, true);
  out.certified_gap = std::max(0.0, upper - out.objective_bits);
  return out;
}

GridResult grid_search_latency(const NetworkModel& model, const GridSpec& grid) {
  check_grid(model, grid, 3);
  if (!model.min_rates) {
    throw Error(ErrorCode::kMissingRates, "latency oracle needs min_rates");
  }
  const Eigen::Index m = model.size();
  const int n = grid.points_per_axis;
  const Vector& floors = *model.min_rates;

  GridResult out;
  out.objective_bits = std::numeric_limits<double>::infinity();
  Vector bits(m);
  GridWalker walker(model, n);
  do {
    const Vector p = walker.point();
    link_bits(model, p, bits);
    ++out.evaluated;
    if ((bits.array() < floors.array()).any() || !(bits.array() > 0.0).all()) continue;
    const double value = model.weights.cwiseQuotient(bits).sum();
    if (value < out.objective_bits) {
      out.objective_bits = value;
      out.p = p;
    }
  } while (walker.next(n));
  if (!std::isfinite(out.objective_bits)) {
    throw Error(ErrorCode::kNoFeasibleGridPoint, "no grid point meets the rate floors");
  }

  auto cell_lower = [&](const Vector& lo, const Vector& hi) -> std::optional<double> {
    double bound = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double best = optimistic_bits(model, lo, hi, i);
      if (best < floors[i] || !(best > 0.0)) return std::nullopt;
      bound += model.weights[i] / best;
    }
    return bound;
  };
  const double lower = certify(model, n, out.objective_bits, cell_lower, false);
  out.certified_gap = std::max(0.0, out.objective_bits - lower);
  return out;
}

NetworkModel random_instance(std::mt19937_64& rng, int links) {
  if (links < 1) throw Error(ErrorCode::kInvalidArgument, "random_instance needs links >= 1");
  std::uniform_real_distribution<double> cross(0.0, 1.0);
  std::uniform_real_distribution<double> direct(0.1, 1.0);
  NetworkModel m;
  m.gain = Matrix(links, links);
  for (int j = 0; j < links; ++j) {
    for (int i = 0; i < links; ++i) m.gain(j, i) = j == i ? direct(rng) : 0.1 * cross(rng);
  }
  m.p_max = Vector::Ones(links);
  m.noise = Vector::Constant(links, 1e-4);
  m.weights = Vector::Ones(links);
  return m;
}

}  // namespace powcap::oracle

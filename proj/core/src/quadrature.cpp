#include "powcap/quadrature.hpp"

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "powcap/error.hpp"

namespace powcap {

namespace {

struct Panel {
  double a, b;
  double fa, fm, fb;  // endpoints and midpoint
  double flm, frm;    // quarter points
  double coarse;      // Simpson on [a, b]
  double fine;        // composite Simpson on the two halves
  double error;

  double value() const { return fine + (fine - coarse) / 15.0; }
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(const std::function<double(double)>& f, double a, double b, double fa,
                 double fm, double fb) {
  Panel p{a, b, fa, fm, fb, 0.0, 0.0, 0.0, 0.0, 0.0};
  const double m = 0.5 * (a + b);
  p.flm = f(0.5 * (a + m));
  p.frm = f(0.5 * (m + b));
  const double h = b - a;
  p.coarse = h / 6.0 * (fa + 4.0 * fm + fb);
  p.fine = h / 12.0 * (fa + 4.0 * p.flm + 2.0 * fm + 4.0 * p.frm + fb);
  p.error = std::abs(p.fine - p.coarse) / 15.0;
  return p;
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_intervals) {
  if (!(b > a) || !(abs_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "adaptive_simpson needs a < b and abs_tol > 0");
  }
  std::priority_queue<Panel> heap;
  heap.push(make_panel(f, a, b, f(a), f(0.5 * (a + b)), f(b)));
  double total_error = heap.top().error;
  int intervals = 1;

  while (total_error > abs_tol) {
    if (intervals >= max_intervals) {
      throw Error(ErrorCode::kQuadratureFailure,
                  "tolerance not met within " + std::to_string(max_intervals) + " intervals");
    }
    const Panel worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    const Panel left = make_panel(f, worst.a, m, worst.fa, worst.flm, worst.fm);
    const Panel right = make_panel(f, m, worst.b, worst.fm, worst.frm, worst.fb);
    heap.push(left);
    heap.push(right);
    ++intervals;
    total_error += left.error + right.error - worst.error;
    // The running sum drifts; resync before trusting a termination decision.
    if (total_error <= abs_tol) {
      total_error = 0.0;
      std::vector<Panel> panels;
      panels.reserve(heap.size());
      while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
      }
      for (const Panel& p : panels) {
        total_error += p.error;
        heap.push(p);
      }
    }
  }

  // Sum smallest-first for a reproducible, well-conditioned total.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  QuadratureResult out;
  out.intervals = intervals;
  for (auto it = panels.rbegin(); it != panels.rend(); ++it) {
    out.value += it->value();
    out.error_estimate += it->error;
  }
  return out;
}

}  // namespace powcap

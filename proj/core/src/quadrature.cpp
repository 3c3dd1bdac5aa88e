#include "mincap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "mincap/error.hpp"

namespace mincap {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::Divergent: return "divergent";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "convergent") return Verdict::Convergent;
  if (s == "divergent") return Verdict::Divergent;
  if (s == "undetermined") return Verdict::Undetermined;
  throw InputError("unknown verdict '" + s + "'");
}

namespace quad {
namespace {

constexpr std::size_t kMaxSegments = 2000;

auto guarded(const Integrand& f) {
  return [&f](double x) {
    const double y = f(x);
    return std::isfinite(y) ? y : 0.0;
  };
}

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// 31-point Kronrod rule with the roundoff-aware error estimate of QUADPACK's qk31.
template <class F>
Segment kronrod31(const F& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  static const auto& x = Rule::abscissa();
  static const auto& wk = Rule::weights();
  static const auto& wg = boost::math::quadrature::gauss<double, 15>::weights();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 16> f1{}, f2{};
  const double fc = f(c);
  double kron = fc * wk[0];
  double gauss = fc * wg[0];
  double abs_k = std::abs(kron);
  for (std::size_t i = 1; i < x.size(); ++i) {
    f1[i] = f(c - h * x[i]);
    f2[i] = f(c + h * x[i]);
    kron += wk[i] * (f1[i] + f2[i]);
    abs_k += wk[i] * (std::abs(f1[i]) + std::abs(f2[i]));
    if (i % 2 == 0) gauss += wg[i / 2] * (f1[i] + f2[i]);
  }
  const double mean = 0.5 * kron;
  double asc = wk[0] * std::abs(fc - mean);
  for (std::size_t i = 1; i < x.size(); ++i) asc += wk[i] * (std::abs(f1[i] - mean) + std::abs(f2[i] - mean));
  const double value = kron * h;
  abs_k *= h;
  asc *= h;
  double err = std::abs((kron - gauss) * h);
  if (asc != 0 && err != 0) err = asc * std::min(1.0, std::pow(200 * err / asc, 1.5));
  if (abs_k > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * abs_k, err);
  return {a, b, value, err};
}

}  // namespace

double gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double* error_estimate) {
  if (!(b > a)) return 0.0;
  auto g = guarded(f);
  std::priority_queue<Segment> queue;
  const Segment first = kronrod31(g, a, b);
  double value = first.value;
  double error = first.error;
  queue.push(first);
  // roundoff counters as in QUADPACK's qag: splits that stop improving end the loop
  int stalled = 0;
  int growing = 0;
  while (error > rel_tol * std::abs(value) && queue.size() < kMaxSegments && stalled < 6 && growing < 20) {
    const Segment worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    queue.pop();
    const Segment left = kronrod31(g, worst.a, mid);
    const Segment right = kronrod31(g, mid, worst.b);
    const double split_value = left.value + right.value;
    const double split_error = left.error + right.error;
    if (std::abs(worst.value - split_value) <= 1e-5 * std::abs(split_value) && split_error >= 0.99 * worst.error)
      ++stalled;
    if (queue.size() > 10 && split_error > worst.error) ++growing;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  // fresh left-to-right sums shed the drift of the running updates
  std::vector<Segment> all;
  all.reserve(queue.size());
  for (; !queue.empty(); queue.pop()) all.push_back(queue.top());
  std::sort(all.begin(), all.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
  value = 0;
  error = 0;
  for (const Segment& s : all) {
    value += s.value;
    error += s.error;
  }
  if (error_estimate) *error_estimate = error;
  return value;
}

double tanh_sinh(const Integrand& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  auto g = guarded(f);
  try {
    return integrator.integrate(g, a, b, rel_tol);
  } catch (const std::exception&) {
    // boost rejects some pathological ranges; Gauss-Kronrod still gives a usable value.
    return gauss_kronrod(f, a, b, rel_tol);
  }
}

double sqrt_substituted(const Integrand& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  const double mid = 0.5 * (a + b);
  // a node that rounds onto an endpoint says nothing about the open interval
  auto left = [&](double s) {
    const double r = a + s * s;
    return r > a ? 2.0 * s * f(r) : 0.0;
  };
  auto right = [&](double s) {
    const double r = b - s * s;
    return r < b ? 2.0 * s * f(r) : 0.0;
  };
  return gauss_kronrod(left, 0.0, std::sqrt(mid - a), rel_tol) +
         gauss_kronrod(right, 0.0, std::sqrt(b - mid), rel_tol);
}

double piecewise(const Integrand& f, std::span<const double> breaks, Rule rule, double rel_tol) {
  double total = 0;
  auto apply = [&](double a, double b) {
    switch (rule) {
      case Rule::GaussKronrod: return gauss_kronrod(f, a, b, rel_tol);
      case Rule::TanhSinh: return tanh_sinh(f, a, b, rel_tol);
      case Rule::SqrtSubstituted: return sqrt_substituted(f, a, b, rel_tol);
    }
    return 0.0;
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i];
    const double b = breaks[i + 1];
    if (!(b > a)) continue;
    // interior geometric splitting keeps each piece within a factor 4
    while (a > 0 && b / a > 4.0) {
      const double next = 4.0 * a;
      total += apply(a, next);
      a = next;
    }
    total += apply(a, b);
  }
  return total;
}

IntegralCertificate certify_tail(const std::function<double(double, double)>& piece, double r0,
                                 const TailOptions& options) {
  if (!(r0 > 0)) throw InputError("improper integral needs r0 > 0");
  IntegralCertificate cert;
  cert.radii.push_back(r0);
  cert.partial_sums.push_back(0.0);

  std::vector<double> pieces;
  double sum = 0;
  double a = r0;
  constexpr double kDecayMargin = 1e-3;
  while (2.0 * a <= options.r_max) {
    const double b = 2.0 * a;
    const double p = piece(a, b);
    if (!std::isfinite(p)) {
      cert.value = std::numeric_limits<double>::infinity();
      cert.verdict = Verdict::Divergent;
      cert.r_cut = b;
      cert.radii.push_back(b);
      cert.partial_sums.push_back(cert.value);
      return cert;
    }
    pieces.push_back(p);
    sum += p;
    cert.radii.push_back(b);
    cert.partial_sums.push_back(sum);
    a = b;

    const std::size_t k = pieces.size();
    if (k < 4) continue;
    double rho_max = 0;
    double rho_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = k - 3; j < k; ++j) {
      double rho;
      if (pieces[j - 1] > 0) {
        rho = pieces[j] / pieces[j - 1];
      } else {
        rho = pieces[j] > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      }
      rho_max = std::max(rho_max, rho);
      rho_min = std::min(rho_min, rho);
    }
    if (rho_max < 1.0 - kDecayMargin) {
      const double tail = pieces.back() * rho_max / (1.0 - rho_max);
      if (tail < options.tol) {
        cert.value = sum;
        cert.verdict = Verdict::Convergent;
        cert.tail_bound = tail;
        cert.r_cut = b;
        return cert;
      }
    } else if (rho_min >= 1.0 - kDecayMargin && sum > options.blowup_factor * options.tol) {
      cert.value = std::numeric_limits<double>::infinity();
      cert.verdict = Verdict::Divergent;
      cert.r_cut = b;
      return cert;
    }
  }
  cert.value = sum;
  cert.verdict = Verdict::Undetermined;
  cert.r_cut = a;
  return cert;
}

}  // namespace quad
}  // namespace mincap

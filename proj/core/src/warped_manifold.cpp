#include "mincap/warped_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "mincap/error.hpp"

namespace mincap {

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

std::vector<double> log_grid(double a, double b, int per_decade, int min_points) {
  if (!(b > a)) return {a};
  int count = min_points;
  if (a > 0) count = std::max(count, static_cast<int>(std::ceil(per_decade * std::log10(b / a))) + 1);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / (count - 1);
    out[static_cast<std::size_t>(i)] = a > 0 ? a * std::pow(b / a, s) : a + s * (b - a);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

WarpedManifold::WarpedManifold(int n, WarpPtr warp, int kappa, Closure closure, double r_min)
    : n_(n), warp_(std::move(warp)), kappa_(kappa), closure_(closure), r_min_(r_min) {
  if (n < 2) throw InputError("dimension must be >= 2");
  if (!warp_) throw InputError("missing warp function");
  if (kappa != n - 1 && kappa != n) throw InputError("kappa must be n-1 or n");
  if (closure == Closure::SmoothPole && r_min != 0) throw InputError("a smooth pole sits at r = 0");
  if (r_min < warp_->domain_min()) throw InputError("inner radius lies below the warp's domain");
  if (!(r_min < warp_->domain_max())) throw InputError("empty radial domain");
  unit_sphere_area_ = n * unit_ball_volume(n);
}

WarpedManifold::WarpedManifold(int n, WarpPtr warp)
    : WarpedManifold(n, warp, n - 1, warp ? warp->natural_closure() : Closure::SmoothPole,
                     warp && warp->natural_closure() == Closure::OpenInner ? warp->domain_min() : 0.0) {}

WarpedManifold WarpedManifold::with_kappa(int kappa) const {
  return WarpedManifold(n_, warp_, kappa, closure_, r_min_);
}

void WarpedManifold::check_domain(double r) const {
  if (!(r >= r_min_) || r > warp_->domain_max())
    throw InputError("radius " + std::to_string(r) + " outside the manifold's radial domain");
}

double WarpedManifold::warp(double r) const {
  check_domain(r);
  const double w = warp_->value(r);
  if (std::isnan(w) || w < 0 || (w == 0 && r > 0))
    throw InputError("warp is not positive at r = " + std::to_string(r));
  return w;
}

double WarpedManifold::weight(double r) const {
  const double w = warp(r);
  return n_ == 2 ? w : std::pow(w, n_ - 1);
}

std::vector<double> WarpedManifold::breakpoints(double a, double b) const {
  std::vector<double> out{a};
  if (std::isfinite(b)) {
    for (double x : warp_->critical_points(a, b))
      if (x > a && x < b) out.push_back(x);
  }
  out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double WarpedManifold::ball_volume(double r, double rel_tol) const {
  if (closure_ != Closure::SmoothPole) throw UnsupportedError("ball volume needs a smooth pole at r = 0");
  check_domain(r);
  if (r == 0) return 0.0;
  std::vector<double> breaks = breakpoints(0.0, r);
  if (r > 1) {
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  }
  auto area = [this](double s) { return s > 0 ? sphere_area(s) : 0.0; };
  return quad::piecewise(area, breaks, quad::Rule::GaussKronrod, rel_tol);
}

double WarpedManifold::integrate_power(double p, double a, double b, double rel_tol) const {
  check_domain(a);
  check_domain(b);
  const std::vector<double> breaks = breakpoints(a, b);
  auto f = [this, p](double r) { return std::pow(warp(r), p); };
  return quad::piecewise(f, breaks, quad::Rule::SqrtSubstituted, rel_tol);
}

IntegralCertificate WarpedManifold::improper_integral(double p, double r0, const quad::TailOptions& options) const {
  check_domain(r0);
  if (!(r0 > 0)) throw InputError("improper integral needs r0 > 0");
  quad::TailOptions opts = options;
  opts.r_max = std::min(opts.r_max, warp_->domain_max());
  return quad::certify_tail([&](double a, double b) { return integrate_power(p, a, b); }, r0, opts);
}

IntegralCertificate WarpedManifold::completeness_test(const quad::TailOptions& options) const {
  return improper_integral(1.0, std::max(1.0, r_min_ > 0 ? r_min_ : 1.0), options);
}

WarpedManifold::Minimum WarpedManifold::weight_infimum(double a, double b) const {
  check_domain(a);
  check_domain(b);
  if (!(b > a)) return {weight(a), a};
  std::vector<double> samples = a > 0 ? log_grid(a, b, 64, 257) : log_grid(a, b, 0, 1025);
  const std::vector<double> crit = warp_->critical_points(a, b);
  samples.insert(samples.end(), crit.begin(), crit.end());
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> values(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    values[i] = weight(samples[i]);
    if (values[i] < best_value) {
      best_value = values[i];
      best = i;
    }
  }
  Minimum result{best_value, samples[best]};
  const bool is_critical = std::binary_search(crit.begin(), crit.end(), samples[best]);
  if (!is_critical) {
    const double lo = samples[best == 0 ? 0 : best - 1];
    const double hi = samples[std::min(best + 1, samples.size() - 1)];
    if (hi > lo) {
      auto f = [this](double r) { return weight(r); };
      const auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, 52);
      if (fx < result.value) result = {fx, x};
    }
  }
  return result;
}

nlohmann::json WarpedManifold::to_json() const {
  return {{"n", n_}, {"kappa", kappa_}, {"closure", to_string(closure_)}, {"r_min", r_min_}, {"warp", warp_->to_json()}};
}

WarpedManifold WarpedManifold::from_json(const nlohmann::json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    WarpPtr warp = warp_from_json(doc.at("warp"));
    const int kappa = doc.value("kappa", n - 1);
    Closure closure = warp->natural_closure();
    if (doc.contains("closure")) {
      const std::string c = doc.at("closure").get<std::string>();
      if (c == "pole") {
        closure = Closure::SmoothPole;
      } else if (c == "open") {
        closure = Closure::OpenInner;
      } else {
        throw InputError("closure must be 'pole' or 'open'");
      }
    }
    const double default_min = closure == Closure::OpenInner ? warp->domain_min() : 0.0;
    const double r_min = doc.value("r_min", default_min);
    return WarpedManifold(n, std::move(warp), kappa, closure, r_min);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifold document: ") + e.what());
  }
}

}  // namespace mincap

#include "mincap/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mincap/error.hpp"
#include "mincap/expression.hpp"

namespace mincap {

std::string to_string(Closure c) { return c == Closure::SmoothPole ? "pole" : "open"; }

namespace {

using json = nlohmann::json;

class ExpressionWarp final : public WarpFunction {
 public:
  explicit ExpressionWarp(const std::string& source) : expr_(Expression::parse(source)) {}

  double value(double r) const override { return static_cast<double>(expr_.evaluate(r)); }

  json to_json() const override { return {{"kind", "expr"}, {"expr", expr_.source()}}; }

 private:
  Expression expr_;
};

class TableWarp final : public WarpFunction {
 public:
  TableWarp(std::vector<double> radii, std::vector<double> values, Interpolation interp)
      : r_(std::move(radii)), w_(std::move(values)), interp_(interp) {
    if (r_.size() < 2 || r_.size() != w_.size())
      throw InputError("tabulated warp needs >= 2 samples with matching radii and values");
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (!(w_[i] > 0) || !std::isfinite(w_[i]))
        throw InputError("tabulated warp must be strictly positive at every sample");
      if (i > 0 && !(r_[i] > r_[i - 1])) throw InputError("tabulated radii must be strictly increasing");
    }
    if (r_.front() < 0) throw InputError("tabulated radii must be nonnegative");
    if (interp_ == Interpolation::MonotoneCubic) build_slopes();
  }

  double value(double r) const override {
    if (r < r_.front() || r > r_.back())
      throw InputError("radius " + std::to_string(r) + " outside tabulated warp range");
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = static_cast<std::size_t>(std::distance(r_.begin(), it));
    i = std::clamp<std::size_t>(i, 1, r_.size() - 1) - 1;
    const double h = r_[i + 1] - r_[i];
    const double s = (r - r_[i]) / h;
    if (interp_ == Interpolation::Linear) return w_[i] + s * (w_[i + 1] - w_[i]);
    // cubic Hermite with Fritsch-Carlson slopes
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * w_[i] + h10 * h * m_[i] + h01 * w_[i + 1] + h11 * h * m_[i + 1];
  }

  std::vector<double> critical_points(double lo, double hi) const override {
    std::vector<double> out;
    for (double x : r_)
      if (x >= lo && x <= hi) out.push_back(x);
    return out;
  }

  double domain_min() const override { return r_.front(); }
  double domain_max() const override { return r_.back(); }
  Closure natural_closure() const override { return Closure::OpenInner; }

  json to_json() const override {
    return {{"kind", "table"},
            {"r", r_},
            {"w", w_},
            {"interpolation", interp_ == Interpolation::Linear ? "linear" : "monotone_cubic"}};
  }

 private:
  void build_slopes() {
    const std::size_t n = r_.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (w_[i + 1] - w_[i]) / (r_[i + 1] - r_[i]);
    m_.assign(n, 0.0);
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      m_[i] = (delta[i - 1] * delta[i] <= 0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (delta[i] == 0) {
        m_[i] = m_[i + 1] = 0;
        continue;
      }
      const double a = m_[i] / delta[i];
      const double b = m_[i + 1] / delta[i];
      const double s = a * a + b * b;
      if (s > 9) {
        const double tau = 3 / std::sqrt(s);
        m_[i] = tau * a * delta[i];
        m_[i + 1] = tau * b * delta[i];
      }
    }
  }

  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<double> m_;
  Interpolation interp_;
};

class FlatWarp final : public WarpFunction {
 public:
  double value(double r) const override { return r; }
  json to_json() const override { return {{"kind", "builtin"}, {"name", "flat"}, {"params", json::object()}}; }
};

class CylinderWarp final : public WarpFunction {
 public:
  double value(double) const override { return 1.0; }
  Closure natural_closure() const override { return Closure::OpenInner; }
  json to_json() const override {
    return {{"kind", "builtin"}, {"name", "cylinder"}, {"params", json::object()}};
  }
};

class HyperbolicWarp final : public WarpFunction {
 public:
  double value(double r) const override { return std::sinh(r); }
  json to_json() const override {
    return {{"kind", "builtin"}, {"name", "hyperbolic"}, {"params", json::object()}};
  }
};

class CylinderCapWarp final : public WarpFunction {
 public:
  // smooth min(r, 1): w(0) = 0, w'(0) = 1, w -> 1
  double value(double r) const override {
    const long double x = r;
    return static_cast<double>(x / std::pow(1.0L + x * x * x * x, 0.25L));
  }
  json to_json() const override {
    return {{"kind", "builtin"}, {"name", "cylinder_cap"}, {"params", json::object()}};
  }
};

class PowerWarp final : public WarpFunction {
 public:
  explicit PowerWarp(double alpha) : alpha_(alpha) {
    if (!(alpha > 0)) throw InputError("power warp needs alpha > 0");
  }
  double value(double r) const override { return std::pow(r, alpha_); }
  json to_json() const override {
    return {{"kind", "builtin"}, {"name", "power"}, {"params", {{"alpha", alpha_}}}};
  }

 private:
  double alpha_;
};

/// f(r) = r (1 + r) (sin^2 r + (1 + r^2)^{-4(n+1)})^{1/(4n)}, necks at k*pi.
class NeckedPoleWarp final : public WarpFunction {
 public:
  explicit NeckedPoleWarp(int n) : n_(n) {
    if (n < 2) throw InputError("prop2_6 warp needs n >= 2");
  }

  double value(double r) const override {
    const long double x = r;
    constexpr long double pi = std::numbers::pi_v<long double>;
    const long double k = std::nearbyint(x / pi);
    long double delta = x - k * pi;
    // the double nearest k*pi stands for the neck itself; sin(k*pi) = 0
    if (k >= 1 && r == static_cast<double>(k * pi)) delta = 0;
    const long double s = std::sin(delta);
    const long double floor_term = std::pow(1.0L + x * x, -4.0L * (n_ + 1));
    return static_cast<double>(x * (1 + x) * std::pow(s * s + floor_term, 1.0L / (4.0L * n_)));
  }

  std::vector<double> critical_points(double lo, double hi) const override {
    std::vector<double> out;
    constexpr long double pi = std::numbers::pi_v<long double>;
    for (long k = std::max(1L, static_cast<long>(std::ceil(lo / std::numbers::pi))); k * pi <= hi; ++k) {
      const double x = static_cast<double>(k * pi);
      if (x >= lo && x <= hi) out.push_back(x);
    }
    return out;
  }

  json to_json() const override {
    return {{"kind", "builtin"}, {"name", "prop2_6"}, {"params", {{"n", n_}}}};
  }

 private:
  int n_;
};

/// w = e^{-f} with f(r) = lambda r / (n - 1), so w^{n-1} = e^{-lambda r}.
class ExpWarp final : public WarpFunction {
 public:
  ExpWarp(double lambda, int n) : lambda_(lambda), n_(n) {
    if (!(lambda > 0) || n < 2) throw InputError("exp warp needs lambda > 0 and n >= 2");
  }
  double value(double r) const override { return std::exp(-lambda_ * r / (n_ - 1)); }
  Closure natural_closure() const override { return Closure::OpenInner; }
  json to_json() const override {
    return {{"kind", "builtin"}, {"name", "exp"}, {"params", {{"lambda", lambda_}, {"n", n_}}}};
  }

 private:
  double lambda_;
  int n_;
};

/// Staircase weight: w^{n-1} = 1 + 2^{-j} on the necks (2^j - 2^{-j}, 2^j + 2^{-j})
/// and 2^{j^2} on the plateaus [2^j + 2^{-j}, 2^{j+1} - 2^{-j-1}]. The mollified
/// variant replaces each plateau edge by a log-linear ramp of width 2^{-j-3}.
class StaircaseWarp final : public WarpFunction {
 public:
  StaircaseWarp(int n, bool mollified) : n_(n), mollified_(mollified) {
    if (n < 2) throw InputError("staircase warp needs n >= 2");
  }

  static double neck_value(int j) { return 1.0 + std::ldexp(1.0, -j); }
  static double plateau_value(int j) { return std::exp2(static_cast<double>(j) * j); }
  static double neck_start(int j) { return std::ldexp(1.0, j) - std::ldexp(1.0, -j); }
  static double neck_end(int j) { return std::ldexp(1.0, j) + std::ldexp(1.0, -j); }
  static double ramp_width(int j) { return std::ldexp(1.0, -j - 3); }

  double weight(double r) const {
    if (r < neck_start(1)) throw InputError("staircase warp is defined for r >= 1.5");
    int j = static_cast<int>(std::floor(std::log2(r)));
    if (j < 1) j = 1;
    // guard log2 rounding at exact powers of two
    while (std::ldexp(1.0, j) > r && j > 1) --j;
    while (std::ldexp(1.0, j + 1) <= r) ++j;
    if (r < neck_end(j)) return r > neck_start(j) || j == 1 ? neck_value(j) : plateau_value(j - 1);
    if (r > neck_start(j + 1)) return neck_value(j + 1);
    const double plateau = plateau_value(j);
    if (!mollified_) return plateau;
    const double width = ramp_width(j);
    const double lo = neck_end(j);
    const double hi = neck_start(j + 1);
    if (r < lo + width) return log_ramp(neck_value(j), plateau, (r - lo) / width);
    if (r > hi - width) return log_ramp(neck_value(j + 1), plateau, (hi - r) / width);
    return plateau;
  }

  double value(double r) const override {
    const double W = weight(r);
    return n_ == 2 ? W : std::pow(W, 1.0 / (n_ - 1));
  }

  std::vector<double> critical_points(double lo, double hi) const override {
    std::vector<double> out;
    for (int j = 1; j < 1000 && neck_start(j) <= hi; ++j) {
      std::vector<double> cand = {neck_start(j), std::ldexp(1.0, j), neck_end(j)};
      if (mollified_) {
        cand.push_back(neck_end(j) + ramp_width(j));
        cand.push_back(neck_start(j + 1) - ramp_width(j));
      }
      for (double x : cand)
        if (x >= lo && x <= hi) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  double domain_min() const override { return neck_start(1); }
  Closure natural_closure() const override { return Closure::OpenInner; }

  json to_json() const override {
    return {{"kind", "builtin"},
            {"name", "staircase"},
            {"params", {{"n", n_}, {"mollified", mollified_}}}};
  }

 private:
  static double log_ramp(double low, double high, double s) {
    return std::exp(std::log(low) + s * (std::log(high) - std::log(low)));
  }

  int n_;
  bool mollified_;
};

/// Cylinder of radius 1 pinched at r = k*spacing down to ratio^k.
class NeckCylinderWarp final : public WarpFunction {
 public:
  NeckCylinderWarp(double spacing, double width, double ratio)
      : spacing_(spacing), width_(width), ratio_(ratio) {
    if (!(spacing > 0) || !(width > 0) || !(ratio > 0 && ratio < 1))
      throw InputError("neck_cylinder needs spacing > 0, width > 0, 0 < ratio < 1");
  }
  double value(double r) const override {
    const double k = std::max(1.0, std::nearbyint(r / spacing_));
    const double z = (r - k * spacing_) / width_;
    return 1.0 - (1.0 - std::pow(ratio_, k)) * std::exp(-z * z);
  }
  std::vector<double> critical_points(double lo, double hi) const override {
    std::vector<double> out;
    for (double k = std::max(1.0, std::ceil(lo / spacing_)); k * spacing_ <= hi; k += 1) out.push_back(k * spacing_);
    return out;
  }
  Closure natural_closure() const override { return Closure::OpenInner; }
  json to_json() const override {
    return {{"kind", "builtin"},
            {"name", "neck_cylinder"},
            {"params", {{"spacing", spacing_}, {"width", width_}, {"ratio", ratio_}}}};
  }

 private:
  double spacing_;
  double width_;
  double ratio_;
};

template <class T>
T param_or(const json& params, const char* key, T fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  return params.at(key).get<T>();
}

}  // namespace

WarpPtr make_expression_warp(const std::string& source) { return std::make_shared<ExpressionWarp>(source); }

WarpPtr make_table_warp(std::vector<double> radii, std::vector<double> values, Interpolation interp) {
  return std::make_shared<TableWarp>(std::move(radii), std::move(values), interp);
}

WarpPtr make_builtin_warp(const std::string& name, const json& params) {
  if (name == "flat") return std::make_shared<FlatWarp>();
  if (name == "cylinder") return std::make_shared<CylinderWarp>();
  if (name == "hyperbolic") return std::make_shared<HyperbolicWarp>();
  if (name == "cylinder_cap") return std::make_shared<CylinderCapWarp>();
  if (name == "power") return std::make_shared<PowerWarp>(param_or(params, "alpha", 1.0));
  if (name == "prop2_6") return std::make_shared<NeckedPoleWarp>(param_or(params, "n", 2));
  if (name == "exp")
    return std::make_shared<ExpWarp>(param_or(params, "lambda", 1.0), param_or(params, "n", 2));
  if (name == "staircase")
    return std::make_shared<StaircaseWarp>(param_or(params, "n", 2), param_or(params, "mollified", false));
  if (name == "neck_cylinder")
    return std::make_shared<NeckCylinderWarp>(param_or(params, "spacing", 4.0), param_or(params, "width", 0.4),
                                              param_or(params, "ratio", 0.5));
  throw InputError("unknown builtin warp '" + name + "'");
}

WarpPtr warp_from_json(const json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "expr") return make_expression_warp(doc.at("expr").get<std::string>());
    if (kind == "table") {
      const std::string interp = doc.value("interpolation", std::string("monotone_cubic"));
      Interpolation mode;
      if (interp == "linear") {
        mode = Interpolation::Linear;
      } else if (interp == "monotone_cubic") {
        mode = Interpolation::MonotoneCubic;
      } else {
        throw InputError("unknown interpolation '" + interp + "'");
      }
      return make_table_warp(doc.at("r").get<std::vector<double>>(), doc.at("w").get<std::vector<double>>(), mode);
    }
    if (kind == "builtin")
      return make_builtin_warp(doc.at("name").get<std::string>(), doc.value("params", json::object()));
    throw InputError("unknown warp kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed warp document: ") + e.what());
  }
}

}  // namespace mincap

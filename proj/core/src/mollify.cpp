#include <algorithm>
#include <cmath>

#include "mincap/error.hpp"
#include "mincap/estimates.hpp"

namespace mincap {

GridField GridField::sample(int dim, std::size_t nx, std::size_t ny, double h, double x0, double y0,
                            const std::function<double(double, double)>& f) {
  if (dim != 1 && dim != 2) throw InputError("grid fields are 1-D or 2-D");
  GridField g;
  g.dim = dim;
  g.nx = nx;
  g.ny = dim == 1 ? 1 : ny;
  g.h = h;
  g.x0 = x0;
  g.y0 = y0;
  g.values.resize(g.nx * g.ny);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) g.at(i, j) = f(g.x(i), dim == 1 ? 0.0 : g.y(j));
  return g;
}

namespace {

double relaxed_area(double g2) { return g2 / (std::sqrt(1 + g2) + 1); }

// |Df|^2 by forward differences (backward on the last row/column).
std::vector<double> gradient_sq(const GridField& f) {
  std::vector<double> out(f.values.size());
  for (std::size_t j = 0; j < f.ny; ++j) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      const std::size_t i1 = i + 1 < f.nx ? i + 1 : i;
      const std::size_t i0 = i + 1 < f.nx ? i : i - 1;
      double gx = (f.at(i1, j) - f.at(i0, j)) / f.h;
      double gy = 0;
      if (f.dim == 2) {
        const std::size_t j1 = j + 1 < f.ny ? j + 1 : j;
        const std::size_t j0 = j + 1 < f.ny ? j : j - 1;
        gy = (f.at(i, j1) - f.at(i, j0)) / f.h;
      }
      out[j * f.nx + i] = gx * gx + gy * gy;
    }
  }
  return out;
}

}  // namespace

MollifyResult mollify(const GridField& f, double lambda) {
  if (f.dim != 1 && f.dim != 2) throw InputError("grid fields are 1-D or 2-D");
  if (f.nx < 2 || f.values.size() != f.nx * f.ny) throw InputError("malformed grid field");
  if (!(f.h > 0)) throw InputError("grid spacing must be positive");
  if (!(lambda >= 8 * f.h)) throw InputError("lambda must cover at least 8 grid cells");

  MollifyResult res;
  res.field = f;
  res.gradient_norm.assign(f.values.size(), 0.0);
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(lambda / f.h));
  const auto nx = static_cast<std::ptrdiff_t>(f.nx);
  const auto ny = static_cast<std::ptrdiff_t>(f.ny);

  const std::vector<double> g2 = gradient_sq(f);
  std::vector<double> energy(g2.size());
  for (std::size_t i = 0; i < g2.size(); ++i) energy[i] = relaxed_area(g2[i]);

  for (double v : f.values) res.sup_f = std::max(res.sup_f, std::abs(v));

  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const double x = f.x(static_cast<std::size_t>(i));
      const double y = f.dim == 2 ? f.y(static_cast<std::size_t>(j)) : 0.0;
      // weights act on offsets from the centre value, which keeps constants exact
      const double centre = f.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      double wsum = 0, fsum = 0, gx = 0, gy = 0, gw = 0;
      double e_sum = 0;
      std::size_t e_count = 0;
      const std::ptrdiff_t jlo = f.dim == 2 ? std::max<std::ptrdiff_t>(0, j - reach) : 0;
      const std::ptrdiff_t jhi = f.dim == 2 ? std::min(ny - 1, j + reach) : 0;
      const std::ptrdiff_t ilo = std::max<std::ptrdiff_t>(0, i - reach);
      const std::ptrdiff_t ihi = std::min(nx - 1, i + reach);
      // first pass: weights and the weighted mean
      for (std::ptrdiff_t jj = jlo; jj <= jhi; ++jj) {
        for (std::ptrdiff_t ii = ilo; ii <= ihi; ++ii) {
          const double dx = f.x(static_cast<std::size_t>(ii)) - x;
          const double dy = f.dim == 2 ? f.y(static_cast<std::size_t>(jj)) - y : 0.0;
          const double d = std::hypot(dx, dy);
          if (d >= lambda) continue;
          const double w = lambda - d;
          const double v = f.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
          wsum += w;
          fsum += w * (v - centre);
          e_sum += energy[static_cast<std::size_t>(jj * nx + ii)];
          ++e_count;
        }
      }
      const double mean = centre + fsum / wsum;
      // second pass: D f_lambda = sum grad(w_j) (f_j - f_lambda) / sum w_j, grad w_j = (y_j - x)/|y_j - x|
      for (std::ptrdiff_t jj = jlo; jj <= jhi; ++jj) {
        for (std::ptrdiff_t ii = ilo; ii <= ihi; ++ii) {
          const double dx = f.x(static_cast<std::size_t>(ii)) - x;
          const double dy = f.dim == 2 ? f.y(static_cast<std::size_t>(jj)) - y : 0.0;
          const double d = std::hypot(dx, dy);
          if (d >= lambda || d == 0) continue;
          const double diff = f.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) - mean;
          gx += dx / d * diff;
          gy += dy / d * diff;
        }
      }
      gw = std::hypot(gx, gy) / wsum;
      const std::size_t idx = static_cast<std::size_t>(j * nx + i);
      res.field.values[idx] = mean;
      res.gradient_norm[idx] = gw;
      res.sup_gradient = std::max(res.sup_gradient, gw);

      const double num = relaxed_area(gw * gw);
      const double den = e_count ? e_sum / static_cast<double>(e_count) : 0.0;
      // both sides vanish on locally constant data; count 0/0 as 0
      if (num > 1e-14 || den > 0) {
        const double ratio = den > 0 ? num / den : std::numeric_limits<double>::infinity();
        res.energy_ratio = std::max(res.energy_ratio, ratio);
      }
    }
  }
  res.gradient_ratio = res.sup_f > 0 && res.sup_gradient > 0 ? res.sup_gradient * lambda / res.sup_f : 0.0;
  return res;
}

}  // namespace mincap

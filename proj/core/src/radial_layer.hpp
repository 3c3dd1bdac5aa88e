#pragma once

#include <functional>

#include "mincap/warped_manifold.hpp"

namespace mincap::detail {

/// Integral over [a, b] of phi(W(r)), W = w^{n-1}, for integrands that blow up
/// like (W - q)^{-1/2} where W meets the flux q at an endpoint.
///
/// Near such an endpoint W - q is mostly roundoff, so a layer of relative
/// width 1e-9 is integrated in closed form under W = q + g0 + D x:
/// `layer(y0, y1)` must return the integral of phi(q + y) dy over [y0, y1].
double integrate_touching(const WarpedManifold& m, double a, double b, double q,
                          const std::function<double(double)>& phi,
                          const std::function<double(double, double)>& layer, double rel_tol);

/// Closed-form layers: slope q / sqrt(y (y + 2q)) and area density
/// (q + y)^2 / sqrt(y (y + 2q)) - (q + y).
double slope_layer(double q, double y0, double y1);
double area_layer(double q, double y0, double y1);

}  // namespace mincap::detail

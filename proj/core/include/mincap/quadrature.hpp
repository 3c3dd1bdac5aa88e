#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mincap {

/// Outcome of an improper-integral convergence test.
enum class Verdict { Convergent, Divergent, Undetermined };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// Carrier for improper integrals: value, verdict and tail evidence.
///
/// `partial_sums` holds the running integral at each doubling radius so a
/// divergence verdict always comes with its witnessed blow-up sequence.
struct IntegralCertificate {
  double value = 0;
  Verdict verdict = Verdict::Undetermined;
  double tail_bound = std::numeric_limits<double>::infinity();
  double r_cut = 0;
  std::vector<double> radii;
  std::vector<double> partial_sums;
};

namespace quad {

using Integrand = std::function<double(double)>;

/// Adaptive 31-point Gauss-Kronrod. Non-finite integrand samples count as 0.
double gauss_kronrod(const Integrand& f, double a, double b, double rel_tol,
                     double* error_estimate = nullptr);

/// Double-exponential rule; tolerates integrable endpoint singularities of any order.
double tanh_sinh(const Integrand& f, double a, double b, double rel_tol);

/// Gauss-Kronrod after r = a + s^2 (left half) and r = b - s^2 (right half);
/// inverse-square-root endpoint blow-ups become bounded integrands.
double sqrt_substituted(const Integrand& f, double a, double b, double rel_tol);

enum class Rule { GaussKronrod, TanhSinh, SqrtSubstituted };

/// Sums `rule` over consecutive pieces of the sorted break list. Long pieces
/// (ratio b/a > 4 with a > 0) are further split geometrically.
double piecewise(const Integrand& f, std::span<const double> breaks, Rule rule, double rel_tol);

/// Tail test for integral over [r0, inf) of a nonnegative integrand.
///
/// `piece(a, b)` returns the integral over [a, b]. Radii double from r0.
/// Convergent once the geometric tail model P_k * rho / (1 - rho) drops below
/// `tol`; divergent once the pieces stop decaying and the partial sum exceeds
/// `blowup_factor * tol`; undetermined if r_max is reached first.
struct TailOptions {
  double tol = 1e-8;
  double r_max = 1e30;
  double blowup_factor = 1e6;
};
IntegralCertificate certify_tail(const std::function<double(double, double)>& piece, double r0,
                                 const TailOptions& options);

}  // namespace quad
}  // namespace mincap

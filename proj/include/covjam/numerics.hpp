#pragma once

#include <functional>
#include <span>
#include <vector>

namespace covjam::numerics {

struct ToleranceSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-12;
  int max_iter = 1000;

  void validate() const;
};

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction otherwise.
double reg_gamma_upper(double a, double x);
/// Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x).
double reg_gamma_lower(double a, double x);

// Hot-loop variants: caller supplies lgamma(a) and guarantees a > 0, x >= 0.
double reg_gamma_upper(double a, double x, double lgamma_a);
double reg_gamma_lower(double a, double x, double lgamma_a);
/// log P(a, x); stays finite where P(a, x) itself underflows.
double log_reg_gamma_lower(double a, double x, double lgamma_a);

/// Evaluates f at every abscissa of its first argument, writing into the second.
using BatchFunction = std::function<void(std::span<const double>, std::span<double>)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature. Bisects the interval
/// with the largest error estimate until the summed estimate is at most
/// max(abs_tol, rel_tol * |I|). Throws BudgetExceeded after max_iter bisections.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          const ToleranceSpec& tol = {});
/// Same rule; each call of f receives the 15 nodes of one panel, so the
/// caller may evaluate them concurrently.
double integrate_adaptive(const BatchFunction& f, double lo, double hi,
                          const ToleranceSpec& tol = {});

/// Bisection on a sign change. Stops at |f(x)| <= abs_tol or when the bracket
/// width falls to rel_tol * |x|. Throws NoBracket when f(lo), f(hi) share a sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const ToleranceSpec& tol = {});

struct Minimum {
  double argmin = 0.0;
  double value = 0.0;
};

/// Golden-section search for a unimodal f on [lo, hi]. Stops when the bracket
/// is narrower than abs_tol + rel_tol * |x| or after max_iter steps; returns
/// the best point evaluated, ties going to the smaller argument.
Minimum golden_min(const std::function<double(double)>& f, double lo, double hi,
                   const ToleranceSpec& tol = {});

/// Evaluates f on an ascending grid, then refines with golden_min between the
/// neighbours of the best grid point. `floor` is the left end of the refinement
/// bracket when the best point is grid[0]. Grid evaluations go through
/// parallel_for.
Minimum scan_then_refine(const std::function<double(double)>& f, std::span<const double> grid,
                         double floor, const ToleranceSpec& tol = {});

/// n points from lo to hi (inclusive), equally spaced in log10.
std::vector<double> log_space(double lo, double hi, std::size_t n);
std::vector<double> lin_space(double lo, double hi, std::size_t n);

}  // namespace covjam::numerics

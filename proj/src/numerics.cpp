#include "covjam/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "covjam/errors.hpp"
#include "covjam/parallel.hpp"

namespace covjam::numerics {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kGammaMaxIter = 100000;

void check_gamma_domain(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: a must be finite and > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be >= 0");
}

// log of the series part of P(a,x): sum_{n>=0} x^n / (a (a+1) ... (a+n)).
double log_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kGammaMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) return std::log(sum);
  }
  throw BudgetExceeded("incomplete gamma series did not converge");
}

// Continued fraction for Gamma(a,x) e^x x^-a (modified Lentz).
double continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw BudgetExceeded("incomplete gamma continued fraction did not converge");
}

double log_prefactor(double a, double x, double lgamma_a) { return -x + a * std::log(x) - lgamma_a; }

}  // namespace

void ToleranceSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("tolerance: abs_tol and rel_tol must be > 0");
  if (max_iter < 1) throw DomainError("tolerance: max_iter must be >= 1");
}

double reg_gamma_lower(double a, double x, double lgamma_a) {
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::exp(log_prefactor(a, x, lgamma_a) + log_series(a, x));
  return 1.0 - std::exp(log_prefactor(a, x, lgamma_a)) * continued_fraction(a, x);
}

double reg_gamma_upper(double a, double x, double lgamma_a) {
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - std::exp(log_prefactor(a, x, lgamma_a) + log_series(a, x));
  return std::exp(log_prefactor(a, x, lgamma_a)) * continued_fraction(a, x);
}

double log_reg_gamma_lower(double a, double x, double lgamma_a) {
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return log_prefactor(a, x, lgamma_a) + log_series(a, x);
  return std::log1p(-std::exp(log_prefactor(a, x, lgamma_a)) * continued_fraction(a, x));
}

double reg_gamma_upper(double a, double x) {
  check_gamma_domain(a, x);
  return reg_gamma_upper(a, x, std::lgamma(a));
}

double reg_gamma_lower(double a, double x) {
  check_gamma_domain(a, x);
  return reg_gamma_lower(a, x, std::lgamma(a));
}

namespace {

// QUADPACK qk15 abscissae/weights; xgk[1], xgk[3], xgk[5], xgk[7] are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const BatchFunction& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<double, 15> nodes{};
  for (int j = 0; j < 7; ++j) {
    nodes[2 * j] = center - half * kXgk[j];
    nodes[2 * j + 1] = center + half * kXgk[j];
  }
  nodes[14] = center;
  std::array<double, 15> fv{};
  f(nodes, fv);
  for (double v : fv)
    if (!std::isfinite(v)) throw DomainError("integrate_adaptive: integrand is not finite on the interval");

  const double fc = fv[14];
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::fabs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[2 * j] + fv[2 * j + 1];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::fabs(fv[2 * j]) + std::fabs(fv[2 * j + 1]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = std::fabs(fc - mean) * kWgk[7];
  for (int j = 0; j < 7; ++j)
    asc += kWgk[j] * (std::fabs(fv[2 * j] - mean) + std::fabs(fv[2 * j + 1] - mean));

  const double result = kronrod * half;
  abs_sum *= std::fabs(half);
  asc *= std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * abs_sum, err);
  return {lo, hi, result, err};
}

}  // namespace

double integrate_adaptive(const BatchFunction& f, double lo, double hi, const ToleranceSpec& tol) {
  tol.validate();
  if (!(lo <= hi)) throw DomainError("integrate_adaptive: lo must be <= hi");
  if (lo == hi) return 0.0;

  std::vector<Panel> panels{gauss_kronrod(f, lo, hi)};
  double total = panels[0].value;
  double total_err = panels[0].error;

  for (int iter = 0;; ++iter) {
    if (total_err <= std::max(tol.abs_tol, tol.rel_tol * std::fabs(total))) break;
    if (iter >= tol.max_iter)
      throw BudgetExceeded("integrate_adaptive: exceeded " + std::to_string(tol.max_iter) + " subdivisions");
    const auto worst_it = std::max_element(panels.begin(), panels.end());
    const Panel worst = *worst_it;
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;  // panel at machine resolution
    *worst_it = gauss_kronrod(f, worst.lo, mid);
    panels.push_back(gauss_kronrod(f, mid, worst.hi));
    // re-sum from scratch each split; summation order is the panel creation order
    total = 0.0;
    total_err = 0.0;
    for (const auto& p : panels) {
      total += p.value;
      total_err += p.error;
    }
  }
  return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          const ToleranceSpec& tol) {
  return integrate_adaptive(
      BatchFunction([&f](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
      }),
      lo, hi, tol);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, const ToleranceSpec& tol) {
  tol.validate();
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi))
    throw NoBracket("bisect_root: f(lo) and f(hi) have the same sign");

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::fabs(fm) <= tol.abs_tol) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= tol.rel_tol * std::fabs(mid)) return 0.5 * (lo + hi);
  }
  return mid;
}

Minimum golden_min(const std::function<double(double)>& f, double lo, double hi, const ToleranceSpec& tol) {
  tol.validate();
  if (hi < lo) std::swap(lo, hi);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  Minimum best{lo, std::numeric_limits<double>::infinity()};
  auto eval = [&](double x) {
    const double v = f(x);
    if (v < best.value || (v == best.value && x < best.argmin)) best = {x, v};
    return v;
  };

  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = eval(c);
  double fd = eval(d);
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if (hi - lo <= tol.abs_tol + tol.rel_tol * std::fabs(0.5 * (lo + hi))) break;
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = eval(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = eval(d);
    }
  }
  return best;
}

Minimum scan_then_refine(const std::function<double(double)>& f, std::span<const double> grid, double floor,
                         const ToleranceSpec& tol) {
  if (grid.empty()) throw DomainError("scan_then_refine: empty grid");
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = f(grid[i]); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (values[i] < values[best]) best = i;

  Minimum out{grid[best], values[best]};
  if (grid.size() == 1) return out;
  const double lo = best == 0 ? floor : grid[best - 1];
  const double hi = best + 1 == grid.size() ? grid[best] : grid[best + 1];
  const Minimum refined = golden_min(f, lo, hi, tol);
  if (refined.value < out.value) out = refined;
  return out;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw DomainError("log_space: bounds must be > 0");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

}  // namespace covjam::numerics

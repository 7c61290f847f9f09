#include "bsc/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsc/core.hpp"

namespace bsc {
namespace {

constexpr double kEulerGamma = std::numbers::egamma;

// e^x K0(x) and e^x K1(x).
void scaled_k01(double x, double& k0s, double& k1s) {
  if (!(x > 0.0)) throw NumericError("bessel_k: argument must be positive");
  if (x <= 2.0) {
    const double y = 0.25 * x * x;
    const double lx = std::log(0.5 * x);
    double term0 = 1.0;  // y^k / (k!)^2
    double term1 = 1.0;  // y^k / (k! (k+1)!)
    double harmonic = 0.0;
    double i0 = 0.0, i1_sum = 0.0, k0_tail = 0.0, k1_tail = 0.0;
    for (int k = 0; k < 60; ++k) {
      if (k > 0) {
        harmonic += 1.0 / k;
        term0 *= y / (static_cast<double>(k) * k);
        term1 *= y / (static_cast<double>(k) * (k + 1));
      }
      i0 += term0;
      i1_sum += term1;
      k0_tail += harmonic * term0;
      const double psi_sum = -2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (k + 1);
      k1_tail += psi_sum * term1;
      if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1_sum) break;
    }
    const double i1 = 0.5 * x * i1_sum;
    const double k0 = -(lx + kEulerGamma) * i0 + k0_tail;
    const double k1 = 1.0 / x + lx * i1 - 0.25 * x * k1_tail;
    const double ex = std::exp(x);
    k0s = k0 * ex;
    k1s = k1 * ex;
    return;
  }
  // e^x K_nu(x) = ∫_0^∞ exp(-x (cosh t - 1)) cosh(nu t) dt. The integrand is
  // entire and decays double-exponentially, so the trapezoidal rule converges
  // geometrically in 1/h. Near t = 0 the integrand is ~exp(-x t²/2), so the
  // step shrinks like 1/sqrt(x).
  const double h = std::min(0.2, 0.5 / std::sqrt(x));
  k0s = 0.5;
  k1s = 0.5;
  for (int k = 1;; ++k) {
    const double t = k * h;
    const double e = x * (std::cosh(t) - 1.0);
    if (e > 50.0) break;
    const double f = std::exp(-e);
    k0s += f;
    k1s += f * std::cosh(t);
  }
  k0s *= h;
  k1s *= h;
}

}  // namespace

double bessel_k0(double x) {
  double k0s, k1s;
  scaled_k01(x, k0s, k1s);
  return k0s * std::exp(-x);
}

double bessel_k1(double x) {
  double k0s, k1s;
  scaled_k01(x, k0s, k1s);
  return k1s * std::exp(-x);
}

std::vector<double> log_bessel_k_sequence(int nmax, double x) {
  double k0s, k1s;
  scaled_k01(x, k0s, k1s);
  std::vector<double> out(static_cast<std::size_t>(std::max(nmax, 1)) + 1);
  out[0] = std::log(k0s) - x;
  out[1] = std::log(k1s) - x;
  // K_{n+1} = K_{n-1} + (2n/x) K_n, carried as a ratio so nothing overflows.
  for (int n = 1; n < nmax; ++n) {
    const double ratio = std::exp(out[n - 1] - out[n]);
    out[n + 1] = out[n] + std::log(ratio + 2.0 * n / x);
  }
  out.resize(static_cast<std::size_t>(nmax) + 1);
  return out;
}

double bessel_kn(int n, double x) {
  if (n < 0) n = -n;
  return std::exp(log_bessel_k_sequence(n, x)[static_cast<std::size_t>(n)]);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

std::complex<double> lgamma_complex(std::complex<double> z) {
  using C = std::complex<double>;
  static constexpr double g = 7.0;
  static constexpr double p[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                  771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                  -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  C a = p[0];
  for (int i = 1; i < 9; ++i) a += p[i] / (z + static_cast<double>(i));
  const C t = z + g + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

namespace {

double log_integrand_real_axis(double c, double log_z, double a1, const std::array<double, 3>& b) {
  return std::lgamma(b[0] - c) + std::lgamma(b[1] - c) + std::lgamma(b[2] - c) - std::lgamma(a1 - c) +
         c * log_z;
}

double saddle_abscissa(double z, double a1, const std::array<double, 3>& b) {
  const double log_z = std::log(z);
  const double top = std::min({b[0], b[1], b[2], a1}) - 0.05;
  double lo = top - (2.0 * std::sqrt(z) + 20.0);
  double hi = top;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = log_integrand_real_axis(x1, log_z, a1, b);
  double f2 = log_integrand_real_axis(x2, log_z, a1, b);
  for (int it = 0; it < 400 && hi - lo > 1e-6 * std::max(1.0, std::abs(lo)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = log_integrand_real_axis(x1, log_z, a1, b);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = log_integrand_real_axis(x2, log_z, a1, b);
    }
  }
  return 0.5 * (lo + hi);
}

MeijerResult contour_integral(double z, double a1, const std::array<double, 3>& b, double c, double rel_tol) {
  using C = std::complex<double>;
  using boost::math::quadrature::gauss_kronrod;
  const double log_z = std::log(z);
  auto log_f = [&](double t) {
    const C s(c, t);
    return lgamma_complex(b[0] - s) + lgamma_complex(b[1] - s) + lgamma_complex(b[2] - s) -
           lgamma_complex(a1 - s) + s * log_z;
  };
  // Work relative to the integrand magnitude at t = 0 so huge or tiny values
  // of G do not underflow inside the quadrature.
  const double scale = log_f(0.0).real();
  auto f = [&](double t) { return std::exp(log_f(t) - scale).real(); };
  MeijerResult r;
  r.abscissa = c;
  // |F| peaks near t = 0 on the saddle line and the normalized integral is
  // at most a few thousand, so below this G underflows a double anyway.
  if (scale < -800.0) return r;

  // Panels scale with the Gaussian width of |F| around the saddle, which
  // grows like |c|^{1/2} when the saddle moves left for large z.
  const double min_b = std::min({b[0], b[1], b[2]});
  const double width = std::clamp(0.5 * std::sqrt(std::max(1.0, -c)), 0.25, 4.0);
  const double first = std::clamp(min_b - c, 0.05, width);
  const double abs_tol = rel_tol * 1e-2;
  double total = 0.0;
  double err_total = 0.0;
  // Recursive bisection with an absolute tolerance in normalized units; the
  // integrand is O(1) at t = 0 by construction.
  auto adaptive = [&](auto&& self, double a, double bb, double tol, int depth) -> double {
    double err = 0.0;
    const double v = gauss_kronrod<double, 21>::integrate(f, a, bb, 0, 0.0, &err);
    if (err <= std::max(tol, 1e-15 * std::abs(v)) || depth >= 10) {
      err_total += err;
      return v;
    }
    const double m = 0.5 * (a + bb);
    return self(self, a, m, tol * M_SQRT1_2, depth + 1) + self(self, m, bb, tol * M_SQRT1_2, depth + 1);
  };
  double t0 = 0.0;
  int quiet = 0;
  for (int panel = 0; panel < 10000; ++panel) {
    const double t1 = t0 + (panel == 0 ? first : width);
    const double part = adaptive(adaptive, t0, t1, abs_tol, 0);
    total += part;
    const double edge = std::exp(log_f(t1).real() - scale);
    if (std::abs(part) <= 1e-17 * std::abs(total) && edge * width <= 1e-17 * std::abs(total)) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    t0 = t1;
  }
  const double factor = std::exp(scale) / kPi;
  r.value = total * factor;
  r.error_estimate = err_total * factor;
  return r;
}

}  // namespace

MeijerResult meijer_g_3_0_1_3(double z, double a1, const std::array<double, 3>& b, const MeijerOptions& opt) {
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericError("meijer_g: z must be positive and finite");
  const double min_b = std::min({b[0], b[1], b[2]});
  double c = std::isnan(opt.abscissa) ? saddle_abscissa(z, a1, b) : opt.abscissa;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    if (c < min_b - 1e-9) {
      MeijerResult r = contour_integral(z, a1, b, c, opt.rel_tol);
      if (std::isfinite(r.value)) return r;
    }
    // A pole of Γ(b_j - s) lies on or right of the line; move left.
    c = std::min(c, min_b) - 0.5;
  }
  throw NumericError("meijer_g: contour placement failed after " + std::to_string(opt.max_retries) + " retries");
}

}  // namespace bsc

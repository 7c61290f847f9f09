#pragma once

// Reference computations for the tests. Nothing here calls into the library's
// numerics: densities come from std special functions, integrals from plain
// composite Simpson rules, samples from a separate std::mt19937_64 stream.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// Rician envelope density; sigma2 is the total diffuse power, k the K-factor.
inline double rice_pdf(double x, double k, double sigma2) {
  if (x <= 0.0) return 0.0;
  const double s2 = sigma2 / 2.0;
  const double nu = std::sqrt(k * sigma2);
  const double z = x * nu / s2;
  // I0(z) e^{-z} stays finite where I0 alone would overflow.
  const double i0s = z < 600.0 ? std::cyl_bessel_i(0.0, z) * std::exp(-z) : 1.0 / std::sqrt(2.0 * std::numbers::pi * z);
  return x / s2 * std::exp(-(x - nu) * (x - nu) / (2.0 * s2)) * i0s;
}

// Density of |h1 h2| as the Mellin convolution of two Rician laws.
inline double product_pdf(double r, double k1, double s1, double k2, double s2, int n = 6000) {
  if (r <= 0.0) return 0.0;
  auto g = [&](double u) {
    const double x = std::exp(u);
    return rice_pdf(x, k1, s1) * rice_pdf(r / x, k2, s2);
  };
  return simpson(g, -25.0, 8.0, n);
}

// Double-Rayleigh density with E|h1|² = w1, E|h2|² = w2.
inline double double_rayleigh_pdf(double r, double w1, double w2) {
  const double om = w1 * w2;
  return 4.0 * r / om * std::cyl_bessel_k(0.0, 2.0 * r / std::sqrt(om));
}

// E[exp(-s |h1 h2|²)] for the double-Rayleigh case:
// E_x[1/(1 + a x)] with x ~ Exp(1), a = s w1 w2, which is e^{1/a} E1(1/a) / a.
inline double double_rayleigh_laplace(double s, double w1, double w2) {
  const double a = s * w1 * w2;
  if (a == 0.0) return 1.0;
  const double x = 1.0 / a;
  if (x > 30.0) {
    // e^x E1(x) ~ (1/x) Σ (-1)^k k!/x^k, truncated at the smallest term.
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      const double next = -term * k / x;
      if (std::abs(next) >= std::abs(term)) break;
      term = next;
      sum += term;
    }
    return sum;  // (1/a)·(1/x)·Σ = Σ
  }
  return std::exp(x) * -std::expint(-x) / a;
}

inline double q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Independent sampler for the cascaded channel.
class ProductSampler {
 public:
  ProductSampler(std::uint64_t seed, double k1, double s1, double k2, double s2)
      : eng_(seed), k1_(k1), s1_(s1), k2_(k2), s2_(s2) {}
  std::complex<double> draw() { return hop(k1_, s1_) * hop(k2_, s2_); }

 private:
  std::complex<double> hop(double k, double sigma2) {
    const double sd = std::sqrt(sigma2 / 2.0);
    return {std::sqrt(k * sigma2) + sd * n_(eng_), sd * n_(eng_)};
  }
  std::mt19937_64 eng_;
  std::normal_distribution<double> n_;
  double k1_, s1_, k2_, s2_;
};

// Sample |h| values, sorted, for a Kolmogorov-Smirnov check.
inline std::vector<double> sorted_envelopes(ProductSampler& s, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = std::abs(s.draw());
  std::sort(v.begin(), v.end());
  return v;
}

// Two-sided 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(int n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle

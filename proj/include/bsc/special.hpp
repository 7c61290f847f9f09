#pragma once

#include <array>
#include <complex>
#include <limits>
#include <vector>

namespace bsc {

// Modified Bessel functions of the second kind, integer order, x > 0.
double bessel_k0(double x);
double bessel_k1(double x);
double bessel_kn(int n, double x);

// log K_0(x) .. log K_nmax(x). Finite for any x > 0, including where K_n
// itself would overflow or underflow a double.
std::vector<double> log_bessel_k_sequence(int nmax, double x);

double q_function(double x);

// log Gamma on the complex plane (Lanczos g = 7, 9 terms, reflection for
// Re z < 1/2). The imaginary part is only defined modulo 2π.
std::complex<double> lgamma_complex(std::complex<double> z);

struct MeijerOptions {
  // Contour abscissa. NaN selects the real-axis saddle of the integrand.
  double abscissa = std::numeric_limits<double>::quiet_NaN();
  double rel_tol = 1e-12;
  int max_retries = 4;
};

struct MeijerResult {
  double value = 0.0;
  double abscissa = 0.0;
  double error_estimate = 0.0;
};

// G^{3,0}_{1,3}(z | a1; b1, b2, b3) by numeric Mellin–Barnes integration on
// the vertical line Re s = c, c < min(b).
MeijerResult meijer_g_3_0_1_3(double z, double a1, const std::array<double, 3>& b,
                              const MeijerOptions& opt = {});

}  // namespace bsc

#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <tuple>

namespace confimm::testing {

// Extended gcd: returns (g, x, y) with a x + b y = g.
inline std::tuple<long, long, long> egcd(long a, long b) {
  if (b == 0) return {a, 1, 0};
  const auto [g, x, y] = egcd(b, a % b);
  return {g, y, x - (a / b) * y};
}

// Brute-force reduction of tau into 0 <= a <= 1/2, a^2 + b^2 >= 1: pick the
// coprime (c, d) minimizing |c tau + d| by exhaustive search, complete it to
// an element of SL(2, Z), translate, then reflect.
inline std::complex<double> reduce_by_search(std::complex<double> tau) {
  const long cmax = static_cast<long>(std::ceil(1.0 / tau.imag())) + 1;
  long best_c = 0, best_d = 1;
  double best = 1.0;
  for (long c = 0; c <= cmax; ++c) {
    const long dmax = static_cast<long>(std::ceil(c * std::abs(tau) + 1.0));
    for (long d = -dmax; d <= dmax; ++d) {
      if ((c == 0 && d != 1) || std::gcd(c, d) != 1) continue;
      const double len = std::abs(static_cast<double>(c) * tau + static_cast<double>(d));
      if (len < best - 1e-14) {
        best = len;
        best_c = c;
        best_d = d;
      }
    }
  }
  // a d - b c = 1
  const auto [g, x, y] = egcd(best_d, best_c);
  const long a = x * g, b = -y * g;
  std::complex<double> t = (static_cast<double>(a) * tau + static_cast<double>(b)) /
                           (static_cast<double>(best_c) * tau + static_cast<double>(best_d));
  t -= std::round(t.real());
  if (t.real() < 0.0) t = {-t.real(), t.imag()};
  return t;
}

}  // namespace confimm::testing

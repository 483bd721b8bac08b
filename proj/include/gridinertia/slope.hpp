#pragma once

#include <cstddef>
#include <span>

namespace gridinertia {

// Ordinary least-squares slope of equally spaced samples, per unit time.
// Abscissae are centred so the fit is offset-free; with two samples this is
// exactly the chord (y1 - y0) / dt. Values are taken relative to the first
// sample to avoid cancellation around 60 Hz.
inline double least_squares_slope(std::span<const double> y, double dt) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const double mid = 0.5 * static_cast<double>(n - 1);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) - mid;
    sxx += x * x;
    sxy += x * (y[k] - y[0]);
  }
  return sxy / (sxx * dt);
}

}  // namespace gridinertia

#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace fracvisc {

/// n log-uniform points spanning [lo, hi] inclusive; lo, hi > 0, n >= 2.
inline Eigen::ArrayXd log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("log grid requires 0 < lo < hi");
    if (n < 2) throw std::invalid_argument("log grid requires at least 2 points");
    Eigen::ArrayXd g =
        Eigen::ArrayXd::LinSpaced(n, std::log10(lo), std::log10(hi));
    g = Eigen::pow(10.0, g);
    g[0] = lo;  // pin endpoints against round-off
    g[n - 1] = hi;
    return g;
}

}  // namespace fracvisc

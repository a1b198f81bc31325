#include "penduflow/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace penduflow {

namespace {

constexpr double kSeriesLimit = 15.0;

void check_args(int order, double z) {
    if (order != 0 && order != 1) throw std::domain_error("bessel_i: order must be 0 or 1");
    if (!(z >= 0.0)) throw std::domain_error("bessel_i: argument must be non-negative");
}

// Σ (z/2)^{2k+n} / (k!·(k+n)!)
double series(int order, double z) {
    const double half = 0.5 * z;
    const double q = half * half;
    double term = order == 0 ? 1.0 : half;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + order));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// Hankel expansion of e^{−z}·I_n(z): (2πz)^{-1/2}·Σ (−1)^k a_k(n) / z^k,
// truncated at the smallest term.
double asymptotic_scaled(int order, double z) {
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * z);
        const double mag = std::abs(term);
        if (mag >= last) break;
        sum += term;
        last = mag;
        if (mag < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace

double bessel_i(int order, double z) {
    check_args(order, z);
    if (z <= kSeriesLimit) return series(order, z);
    return std::exp(z) * asymptotic_scaled(order, z);
}

double bessel_i_scaled(int order, double z) {
    check_args(order, z);
    if (z <= kSeriesLimit) return std::exp(-z) * series(order, z);
    return asymptotic_scaled(order, z);
}

}  // namespace penduflow

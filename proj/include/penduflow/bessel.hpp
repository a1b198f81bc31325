#pragma once

namespace penduflow {

/// Modified Bessel function of the first kind I_n(z) for n ∈ {0, 1}, z ≥ 0.
/// Power series up to z = 15, Hankel asymptotic expansion above.
/// Throws std::domain_error for negative z or other orders.
double bessel_i(int order, double z);

/// e^{−z}·I_n(z); finite for arbitrarily large z.
double bessel_i_scaled(int order, double z);

}  // namespace penduflow

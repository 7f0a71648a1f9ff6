#pragma once

#include <functional>
#include <vector>

namespace kez {

struct QuadratureRule {
    std::vector<double> nodes;  // on [-1, 1], ascending
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule; cached per n.
const QuadratureRule& gauss_legendre(int n);

// Gauss-Legendre integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int n = 32);

// P_0(t) .. P_L(t) by the three-term recurrence.
std::vector<double> legendre_values(int L, double t);

}  // namespace kez

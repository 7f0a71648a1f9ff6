#pragma once

// Explicit partition functions as GammaProducts, and zero/pole analyses on
// them.
//
// Parameter names: the Selberg family uses "w1", "w2", "w3" for the weights
// at 0, 1 and infinity; the one-temperature families use "beta"; the
// Gaussian determinant uses "s".

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/gamma_mero.hpp"

namespace kez {

// Z_N(Delta) for Delta = w1 [0] + w2 [1] + w3 [inf] at beta = -1, with
// c = d / (2(N - 1)), d = 2 - (w1 + w2 + w3):
//   N! (pi / l(-c))^N prod_{j=1}^{N} l(-j c)
//     / prod_{j=0}^{N-1} l(w1 + j c) l(w2 + j c) l(w3 + j c),
// l(x) = Gamma(x) / Gamma(1 - x).
GammaProduct selberg_gamma_product(int N);

// Whether the defining integral converges at real weights w. Decided from the
// product itself: every positive-exponent factor must lie in the same
// pole-free cell ((0, inf) or (-n-1, -n)) it occupies at w = (1/2, 1/2, 1/2),
// where the integral is known to converge. Equivalent to
//   d > 0, N d < 2(N - 1), w_i + d/2 < 1.
bool selberg_integral_converges(int N, const std::array<Rational, 3>& w);
bool selberg_integral_converges_direct(int N, const std::array<Rational, 3>& w);

// Z_{n+1}(beta) on P^n, minimal N = n + 1, normalized so Z(0) = 1:
//   c_n prod_{j=1}^{n} Gamma(s + j) / Gamma(s + n + 1)^n,  s = (n + 1) beta.
GammaProduct pn_minimal_Z(int n);

// N = 3 points on P^1, trivial divisor, plane normalization:
//   pi^3 Gamma(2b + 2)^-3 Gamma(3b + 2) Gamma(b + 1)^3,
// the integral of prod_{i<j} |z_i - z_j|^{2b} prod_i (1 + |z_i|^2)^{-2b-2}.
GammaProduct p1_three_point_Z();
// log of the same integral against the uniform probability measure on S^2
// with the chordal norm, prod_{i<j} |x_i - x_j|^{2b}: 4^{3b} / pi^3 times
// the plane form. Throws StabilityError at or below the first pole.
double p1_three_point_sphere_log_Z(double beta);

// Circular ensemble: (2 pi)^N Gamma(1 + beta/(N-1))^-N Gamma(1 + beta N/(N-1)),
// the integral over the torus of prod_{j<k} |e^{i t_j} - e^{i t_k}|^{2 beta/(N-1)}.
GammaProduct circular_Z(int N);

// int |det Z|^{2s} e^{-|Z|^2} d lambda over (n+1)x(n+1) complex matrices:
//   Z(s) = pi^{(n+1)^2} / prod Gamma(j) * prod_{j=1}^{n+1} Gamma(s + j).
GammaProduct gaussian_det_Z(int n);

struct TubeConstraint {
    enum class Sense { Less, Greater };
    std::map<std::string, Rational> coeffs;  // on real parts
    Sense sense = Sense::Less;
    Rational bound;
};

// Open tube {w : Re w in P}, P an intersection of strict half-spaces.
struct TubeDomain {
    std::vector<TubeConstraint> constraints;

    TubeDomain& less(std::map<std::string, Rational> coeffs, Rational bound);
    TubeDomain& greater(std::map<std::string, Rational> coeffs, Rational bound);
    bool contains(const std::map<std::string, Rational>& re_w) const;

    // {Re w_i < 1, sum Re w_i > 0}
    static TubeDomain selberg_omega();
    // {0 < Re w_i < 1}
    static TubeDomain selberg_positive_cube();

    nlohmann::json to_json() const;
};

struct TubeReport {
    bool zero_free = true;
    // A real point inside the tube on a zero hyperplane, validated by eval.
    std::optional<std::map<std::string, Rational>> witness;
    std::string witness_hyperplane;
    int hyperplanes_checked = 0;

    nlohmann::json to_json() const;
};

// Decides whether some zero hyperplane {a(w) = -m} of a negative-exponent
// factor meets the tube with negative net order after cancellation against
// every factor singular on the same hyperplane.
TubeReport zero_free_in_tube(const GammaProduct& gp, const TubeDomain& dom);

}  // namespace kez

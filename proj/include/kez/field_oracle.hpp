#pragma once

// Axially symmetric field solvers on P^1 = S^2 in the coordinate t = cos(theta).
//
// Conventions: densities are against dt (the uniform probability measure is
// 1/2 dt). The mean-field equation for a probability measure mu is
//   (1/2) (1 + reduced_laplacian(phi) / V) = mu = e^{beta phi} rho_Delta / Z,
// with V = d_L and reduced_laplacian = c_lap d/dt[(1 - t^2) d/dt]. The
// constant c_lap is pinned by calibrate_laplacian() against the axial average
// of the pair potential.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/stability.hpp"

namespace kez {

inline constexpr double kLaplacianConstant = 1.0;

struct FieldOptions {
    int grid = 2000;  // M: nodes t_k = -1 + 2k/M, k = 0..M
    double c_lap = kLaplacianConstant;
    int max_newton = 50;
    double tolerance = 1e-8;
    int legendre_degree = 64;
};

enum class FieldKind { Potential, Density };

struct AxialField {
    FieldKind kind = FieldKind::Potential;
    std::vector<double> t;
    std::vector<double> values;

    static AxialField on_grid(int M, FieldKind kind);
    int M() const { return static_cast<int>(t.size()) - 1; }
    double h() const { return 2.0 / M(); }
    // Trapezoid weight of node k, equal to the length of its dual cell.
    double cell_length(int k) const;
    double trapezoid() const;
    double at(double x) const;  // piecewise linear
    // Density only: cdf with uniform density inside each dual cell.
    double cdf(double x) const;
    std::vector<double> cell_masses() const;  // Density only
    std::string to_csv() const;             // t,value
    nlohmann::json to_json() const;
};

struct HarmonicCoeffs {
    std::vector<double> a;  // Legendre coefficients a_0 .. a_L
    double eval(double t) const;
};

// Averages of 2 log ||x - y|| over the azimuth of y, axial coordinates t, s:
//   log(1 + max(t, s)) + log(1 - min(t, s)).
double axial_kernel(double t, double s);

// c_lap d/dt[(1 - t^2) dphi/dt] by centered fluxes; zero flux at t = +-1.
AxialField reduced_laplacian(const AxialField& phi, double c_lap = kLaplacianConstant);

// Normalized reference density rho_Delta(t) for a curve whose marked points
// sit at the poles; times an optional extra smooth factor.
struct AxialReference {
    double w_north = 0.0, w_south = 0.0;
    std::function<double(double)> extra;  // empty: 1

    static AxialReference from_curve(const LogFanoCurve& curve);
    // probability masses of the dual cells of an M-grid (sum to 1)
    std::vector<double> cell_masses(int M) const;
    double unnormalized(double t) const;
};

// Newton on the finite-volume equation, then a fixed-point polish onto the
// minimizer of the discretized free energy (see free_energy_functional).
struct MeanFieldSolution {
    AxialField phi;  // V * Kbar mu, mean zero against the reference measure
    AxialField mu;   // Density
    double residual = 0.0;  // finite-volume Newton residual
    double fixed_point_residual = 0.0;
    int newton_steps = 0;
    double log_normalization = 0.0;  // log Z in mu = e^{beta phi} rho / Z
    nlohmann::json to_json() const;
};

// Requires beta > -1 + 1e-3, pole-only marked points, w < 1.
MeanFieldSolution solve_mean_field(const LogFanoCurve& curve, double beta, const FieldOptions& opt = {},
                                   std::function<double(double)> extra_reference = {});

struct FreeEnergyValue {
    double energy = 0.0;
    double entropy = 0.0;
    double free_energy = 0.0;
};

// F = beta E(mu) + Ent(mu | dV_Delta), with E(uniform) = 0 and mu piecewise
// proportional to dV_Delta on the dual cells.
FreeEnergyValue free_energy_functional(const AxialField& mu, const LogFanoCurve& curve, double beta);

// Exact dual-cell averages of the axial kernel, applied to cell masses p:
// (K p)_k = sum_l Kbar_{kl} p_l. O(M).
std::vector<double> apply_axial_kernel(const std::vector<double>& p, int M);

struct PoissonSolution {
    AxialField phi;         // on the requested grid, mean zero against the target
    HarmonicCoeffs coeffs;  // Legendre coefficients, a_0 = 0
    double gauge_shift = 0.0;
    double residual = 0.0;
    std::vector<std::string> warnings;
};

// (1/2) (1 + reduced_laplacian(phi) / V) = target, target a dt-density.
PoissonSolution solve_poisson(const std::function<double(double)>& target, const FieldOptions& opt = {},
                              double V = 2.0);
PoissonSolution solve_poisson(const AxialField& target, const FieldOptions& opt = {}, double V = 2.0);

struct CalibrationReport {
    double c_lap = 0.0;
    double sup_error = 0.0;
    double tolerance = 1e-4;
    bool pass = false;
    nlohmann::json to_json() const;
};

// Poisson solve of a narrow bump at t0 against the closed-form axial average
// of the pair potential.
CalibrationReport calibrate_laplacian(const FieldOptions& opt = {}, double t0 = 0.3);

enum class PhiMode { Quadrature, MonteCarlo };

struct PhiOptions {
    PhiMode mode = PhiMode::Quadrature;
    std::int64_t samples = 10000;
    std::uint64_t seed = 1;
};

// phi_N for the trivial divisor (d_L = 2) and an axial target dt-density,
// gauged to mean zero against the target.
AxialField phi_N_approximant(const std::function<double(double)>& target, int N, const PhiOptions& popt = {},
                             const FieldOptions& opt = {});

}  // namespace kez

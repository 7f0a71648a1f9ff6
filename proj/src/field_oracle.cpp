#include "kez/field_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kez/errors.hpp"
#include "kez/quadrature.hpp"
#include "kez/random.hpp"

namespace kez {

namespace {

constexpr int kMinGrid = 200;

// v log v - v, continuous at 0
double xlogx_m(double v) { return v > 0.0 ? v * std::log(v) - v : 0.0; }
// v^2/2 log v - v^2/4
double x2logx(double v) { return v > 0.0 ? 0.5 * v * v * std::log(v) - 0.25 * v * v : 0.0; }

void require_grid(int M) {
    if (M < kMinGrid) throw ValidationError("grid too coarse: need M >= " + std::to_string(kMinGrid));
}

struct DualCells {
    std::vector<double> lo, hi;
    explicit DualCells(int M) {
        const double h = 2.0 / M;
        for (int k = 0; k <= M; ++k) {
            const double t = -1.0 + k * h;
            lo.push_back(k == 0 ? -1.0 : t - 0.5 * h);
            hi.push_back(k == M ? 1.0 : t + 0.5 * h);
        }
    }
};

// (p_k, t_k) -> densities
AxialField density_from_masses(const std::vector<double>& p) {
    const int M = static_cast<int>(p.size()) - 1;
    AxialField f = AxialField::on_grid(M, FieldKind::Density);
    for (int k = 0; k <= M; ++k) f.values[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)] / f.cell_length(k);
    return f;
}

// Thomas algorithm; a sub, b diag, c super. Overwrites d with the solution.
void thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double>& d) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

// V ∫ K(t, s) rho(s) ds for a smooth probability dt-density rho, with the
// endpoint logarithms integrated exactly against rho(+-1).
double kernel_potential(const std::function<double(double)>& rho, double t, double r_north, double r_south, int n = 64) {
    const double R = t <= -1.0 ? 0.0 : integrate(rho, -1.0, t, n);
    const double J1 = (t > -1.0 ? integrate([&](double s) { return std::log(1.0 - s) * (rho(s) - r_north); }, -1.0, t, n) : 0.0) +
                      r_north * (xlogx_m(2.0) - xlogx_m(1.0 - t));
    const double J2 = (t < 1.0 ? integrate([&](double s) { return std::log(1.0 + s) * (rho(s) - r_south); }, t, 1.0, n) : 0.0) +
                      r_south * (xlogx_m(2.0) - xlogx_m(1.0 + t));
    const double a = R > 0.0 ? std::log(1.0 + t) * R : 0.0;
    const double b = (1.0 - R) > 0.0 && t < 1.0 ? std::log(1.0 - t) * (1.0 - R) : 0.0;
    return a + J1 + J2 + b;
}

}  // namespace

AxialField AxialField::on_grid(int M, FieldKind kind) {
    if (M < 1) throw ValidationError("grid needs at least one cell");
    AxialField f;
    f.kind = kind;
    for (int k = 0; k <= M; ++k) f.t.push_back(-1.0 + 2.0 * k / M);
    f.t.back() = 1.0;
    f.values.assign(static_cast<std::size_t>(M + 1), 0.0);
    return f;
}

double AxialField::cell_length(int k) const { return (k == 0 || k == M()) ? 0.5 * h() : h(); }

double AxialField::trapezoid() const {
    double s = 0.0;
    for (int k = 0; k <= M(); ++k) s += cell_length(k) * values[static_cast<std::size_t>(k)];
    return s;
}

double AxialField::at(double x) const {
    if (x <= -1.0) return values.front();
    if (x >= 1.0) return values.back();
    const double u = (x + 1.0) / h();
    const int k = std::min(static_cast<int>(u), M() - 1);
    const double f = u - k;
    return (1.0 - f) * values[static_cast<std::size_t>(k)] + f * values[static_cast<std::size_t>(k + 1)];
}

double AxialField::cdf(double x) const {
    if (kind != FieldKind::Density) throw ValidationError("cdf of a potential field");
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return trapezoid();
    // dual cell k covers [t_k - h/2, t_k + h/2]
    const double hh = h();
    const int k = std::clamp(static_cast<int>(std::floor((x + 1.0) / hh + 0.5)), 0, M());
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += cell_length(j) * values[static_cast<std::size_t>(j)];
    const double lo = k == 0 ? -1.0 : t[static_cast<std::size_t>(k)] - 0.5 * hh;
    return s + (x - lo) * values[static_cast<std::size_t>(k)];
}

std::vector<double> AxialField::cell_masses() const {
    if (kind != FieldKind::Density) throw ValidationError("cell masses of a potential field");
    std::vector<double> p;
    for (int k = 0; k <= M(); ++k) p.push_back(cell_length(k) * values[static_cast<std::size_t>(k)]);
    return p;
}

std::string AxialField::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,value\n";
    for (std::size_t k = 0; k < t.size(); ++k) os << t[k] << ',' << values[k] << '\n';
    return os.str();
}

nlohmann::json AxialField::to_json() const {
    return {{"kind", kind == FieldKind::Potential ? "potential" : "density"}, {"M", M()}, {"t", t}, {"values", values}};
}

double HarmonicCoeffs::eval(double t) const {
    if (a.empty()) return 0.0;
    const auto p = legendre_values(static_cast<int>(a.size()) - 1, t);
    double s = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) s += a[l] * p[l];
    return s;
}

double axial_kernel(double t, double s) {
    const double hi = std::max(t, s), lo = std::min(t, s);
    return std::log(1.0 + hi) + std::log(1.0 - lo);
}

AxialField reduced_laplacian(const AxialField& phi, double c_lap) {
    require_grid(phi.M());
    const int M = phi.M();
    const double h = phi.h();
    AxialField out = AxialField::on_grid(M, FieldKind::Density);
    std::vector<double> flux(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) {
        const double e = phi.t[static_cast<std::size_t>(k)] + 0.5 * h;
        flux[static_cast<std::size_t>(k)] = (1.0 - e * e) * (phi.values[static_cast<std::size_t>(k + 1)] - phi.values[static_cast<std::size_t>(k)]) / h;
    }
    for (int k = 0; k <= M; ++k) {
        const double right = k < M ? flux[static_cast<std::size_t>(k)] : 0.0;
        const double left = k > 0 ? flux[static_cast<std::size_t>(k - 1)] : 0.0;
        out.values[static_cast<std::size_t>(k)] = c_lap * (right - left) / out.cell_length(k);
    }
    return out;
}

AxialReference AxialReference::from_curve(const LogFanoCurve& curve) {
    AxialReference r;
    for (std::size_t k = 0; k < curve.size(); ++k) {
        const auto& p = curve.marked_sphere_points()[k];
        const double w = curve.weights()[k];
        if (p == SpherePoint::north()) r.w_north = w;
        else if (p == SpherePoint::south()) r.w_south = w;
        else throw UnsupportedError("axial solvers need marked points at t = +-1 only");
    }
    if (!(r.w_north < 1.0) || !(r.w_south < 1.0)) throw ValidationError("singular weight: w >= 1 at a pole");
    return r;
}

double AxialReference::unnormalized(double t) const {
    double v = 1.0;
    if (w_north != 0.0) v *= std::pow(2.0 - 2.0 * t, -w_north);
    if (w_south != 0.0) v *= std::pow(2.0 + 2.0 * t, -w_south);
    if (extra) v *= extra(t);
    return v;
}

std::vector<double> AxialReference::cell_masses(int M) const {
    const DualCells cells(M);
    std::vector<double> m(static_cast<std::size_t>(M + 1));
    const auto ex = [&](double t) { return extra ? extra(t) : 1.0; };
    for (int k = 0; k <= M; ++k) {
        const double a = cells.lo[static_cast<std::size_t>(k)], b = cells.hi[static_cast<std::size_t>(k)];
        double v;
        if (k == M && w_north != 0.0) {
            // x = (1 - t)^{1 - w} removes the endpoint power
            const double w = w_north, X = std::pow(1.0 - a, 1.0 - w);
            v = integrate(
                [&](double x) {
                    const double t = 1.0 - std::pow(x, 1.0 / (1.0 - w));
                    return std::pow(2.0, -w) / (1.0 - w) * (w_south != 0.0 ? std::pow(2.0 + 2.0 * t, -w_south) : 1.0) * ex(t);
                },
                0.0, X, 16);
        } else if (k == 0 && w_south != 0.0) {
            const double w = w_south, X = std::pow(1.0 + b, 1.0 - w);
            v = integrate(
                [&](double x) {
                    const double t = -1.0 + std::pow(x, 1.0 / (1.0 - w));
                    return std::pow(2.0, -w) / (1.0 - w) * (w_north != 0.0 ? std::pow(2.0 - 2.0 * t, -w_north) : 1.0) * ex(t);
                },
                0.0, X, 16);
        } else {
            v = integrate([&](double t) { return unnormalized(t); }, a, b, 16);
        }
        m[static_cast<std::size_t>(k)] = v;
    }
    double s = 0.0;
    for (double v : m) s += v;
    for (double& v : m) v /= s;
    return m;
}

std::vector<double> apply_axial_kernel(const std::vector<double>& p, int M) {
    if (static_cast<int>(p.size()) != M + 1) throw ValidationError("mass vector does not match the grid");
    const DualCells cells(M);
    const auto n = static_cast<std::size_t>(M + 1);
    std::vector<double> A(n), B(n), D(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = cells.lo[k], b = cells.hi[k], L = b - a;
        A[k] = (xlogx_m(1.0 + b) - xlogx_m(1.0 + a)) / L;
        B[k] = (xlogx_m(1.0 - a) - xlogx_m(1.0 - b)) / L;
        // int int_{[a,b]^2} log(1 + max) + log(1 - min)
        const double al = 1.0 + a, ga = 1.0 - b;
        const double i1 = 2.0 * ((x2logx(1.0 + b) - al * xlogx_m(1.0 + b)) - (x2logx(1.0 + a) - al * xlogx_m(1.0 + a)));
        const double i2 = 2.0 * ((x2logx(1.0 - a) - ga * xlogx_m(1.0 - a)) - (x2logx(1.0 - b) - ga * xlogx_m(1.0 - b)));
        D[k] = (i1 + i2) / (L * L);
    }
    // (Kp)_k = A_k P_{<k} + sum_{l<k} B_l p_l + sum_{l>k} A_l p_l + B_k P_{>k} + D_k p_k
    std::vector<double> out(n);
    double below = 0.0, below_B = 0.0;
    double above = 0.0, above_A = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        above += p[k];
        above_A += A[k] * p[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
        above -= p[k];
        above_A -= A[k] * p[k];
        out[k] = A[k] * below + below_B + above_A + B[k] * above + D[k] * p[k];
        below += p[k];
        below_B += B[k] * p[k];
    }
    return out;
}

namespace {

// sum_l p_l * (average over dual cell l of K(t_k, s)), at the nodes.
std::vector<double> node_potential(const std::vector<double>& p, int M) {
    const DualCells cells(M);
    const auto n = static_cast<std::size_t>(M + 1);
    std::vector<double> A(n), B(n), out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = cells.lo[k], b = cells.hi[k], L = b - a;
        A[k] = (xlogx_m(1.0 + b) - xlogx_m(1.0 + a)) / L;
        B[k] = (xlogx_m(1.0 - a) - xlogx_m(1.0 - b)) / L;
    }
    double below = 0.0, below_B = 0.0, above = 0.0, above_A = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        above += p[k];
        above_A += A[k] * p[k];
    }
    auto safe_log_times = [](double v, double c) { return c != 0.0 ? c * std::log(v) : 0.0; };
    for (std::size_t k = 0; k < n; ++k) {
        above -= p[k];
        above_A -= A[k] * p[k];
        const double t = -1.0 + 2.0 * static_cast<double>(k) / M;
        const double lo = cells.lo[k], hi = cells.hi[k];
        const double left = std::max(t - lo, 0.0), right = std::max(hi - t, 0.0);
        const double own = (safe_log_times(1.0 + t, left) + (xlogx_m(1.0 - lo) - xlogx_m(1.0 - t)) +
                            (xlogx_m(1.0 + hi) - xlogx_m(1.0 + t)) + safe_log_times(1.0 - t, right)) /
                           (hi - lo);
        out[k] = safe_log_times(1.0 + t, k > 0 ? below : 0.0) + below_B + above_A +
                 safe_log_times(1.0 - t, k + 1 < n ? above : 0.0) + own * p[k];
        below += p[k];
        below_B += B[k] * p[k];
    }
    return out;
}

}  // namespace

FreeEnergyValue free_energy_functional(const AxialField& mu, const LogFanoCurve& curve, double beta) {
    if (mu.kind != FieldKind::Density) throw ValidationError("free energy needs a density field");
    const AxialReference ref = AxialReference::from_curve(curve);
    const int M = mu.M();
    const auto p = mu.cell_masses();
    double total = 0.0;
    for (double v : p) {
        if (v < 0.0 || !std::isfinite(v)) throw ValidationError("density must be finite and nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-8) throw ValidationError("density must integrate to 1");
    const auto m = ref.cell_masses(M);
    const auto Kp = apply_axial_kernel(p, M);
    const double dL = curve.d_L();
    double pkp = 0.0, ent = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        pkp += p[k] * Kp[k];
        if (p[k] > 0.0) ent += m[k] > 0.0 ? p[k] * std::log(p[k] / m[k]) : std::numeric_limits<double>::infinity();
    }
    FreeEnergyValue f;
    // W = -(d_L/2) K; E(uniform) = 0 fixes the constant at -d_L (log 2 - 1/2)
    f.energy = -0.5 * dL * pkp + dL * (std::log(2.0) - 0.5);
    f.entropy = ent;
    f.free_energy = beta * f.energy + ent;
    return f;
}

nlohmann::json MeanFieldSolution::to_json() const {
    return {{"residual", residual}, {"fixed_point_residual", fixed_point_residual}, {"newton_steps", newton_steps}, {"log_normalization", log_normalization}};
}

MeanFieldSolution solve_mean_field(const LogFanoCurve& curve, double beta, const FieldOptions& opt,
                                   std::function<double(double)> extra_reference) {
    require_grid(opt.grid);
    if (!std::isfinite(beta) || !(beta > -1.0 + 1e-3)) throw ValidationError("mean-field solver needs beta > -1 + 1e-3");
    curve.require_log_fano();
    AxialReference ref = AxialReference::from_curve(curve);
    ref.extra = std::move(extra_reference);
    const int M = opt.grid;
    const auto n = static_cast<std::size_t>(M + 1);
    const double V = curve.d_L(), h = 2.0 / M;
    const auto m = ref.cell_masses(M);
    AxialField phi = AxialField::on_grid(M, FieldKind::Potential);
    std::vector<double> len(n), coup(static_cast<std::size_t>(M));
    for (std::size_t k = 0; k < n; ++k) len[k] = phi.cell_length(static_cast<int>(k));
    for (int k = 0; k < M; ++k) {
        const double e = phi.t[static_cast<std::size_t>(k)] + 0.5 * h;
        coup[static_cast<std::size_t>(k)] = opt.c_lap / (2.0 * V) * (1.0 - e * e) / h;
    }
    auto& x = phi.values;
    auto residual = [&](std::vector<double>& F) {
        F.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double lap = 0.0;
            if (k + 1 < n) lap += coup[k] * (x[k + 1] - x[k]);
            if (k > 0) lap -= coup[k - 1] * (x[k] - x[k - 1]);
            F[k] = 0.5 * len[k] + lap - m[k] * std::exp(beta * x[k]);
        }
        double r = 0.0;
        for (std::size_t k = 0; k < n; ++k) r = std::max(r, std::abs(F[k]) / len[k]);
        return r;
    };
    MeanFieldSolution sol;
    std::vector<double> F;
    double r = residual(F);
    if (beta == 0.0) {
        // Poisson with phi_0 pinned; the equations sum to zero
        const std::size_t ni = n - 1;
        std::vector<double> a(ni, 0.0), b(ni, 0.0), c(ni, 0.0), d(ni);
        for (std::size_t i = 0; i < ni; ++i) {
            const std::size_t k = i + 1;
            b[i] = -coup[k - 1] - (k + 1 < n ? coup[k] : 0.0);
            if (i > 0) a[i] = coup[k - 1];
            if (k + 1 < n) c[i] = coup[k];
            d[i] = -F[k];
        }
        thomas(a, b, c, d);
        for (std::size_t i = 0; i < ni; ++i) x[i + 1] += d[i];
        r = residual(F);
        sol.newton_steps = 1;
    } else {
        int it = 0;
        for (; it < opt.max_newton && r >= opt.tolerance; ++it) {
            std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n);
            for (std::size_t k = 0; k < n; ++k) {
                b[k] = -beta * m[k] * std::exp(beta * x[k]);
                if (k + 1 < n) {
                    b[k] -= coup[k];
                    c[k] = coup[k];
                }
                if (k > 0) {
                    b[k] -= coup[k - 1];
                    a[k] = coup[k - 1];
                }
                d[k] = -F[k];
            }
            thomas(a, b, c, d);
            const std::vector<double> x0 = x;
            double lam = 1.0, rn = r;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t k = 0; k < n; ++k) x[k] = x0[k] + lam * d[k];
                rn = residual(F);
                if (std::isfinite(rn) && rn < r) break;
                lam *= 0.5;
            }
            r = rn;
        }
        sol.newton_steps = it;
        if (!(r < opt.tolerance))
            throw ConvergenceError("mean-field Newton did not converge: residual " + std::to_string(r) + " after " +
                                   std::to_string(it) + " steps");
    }
    sol.residual = r;
    // Polish onto the fixed point p = m e^{beta d_L Kbar p} / Z of the
    // exact-cell free energy; the finite-volume solution is within O(h^2).
    std::vector<double> p(n), psi(n);
    double Z = 0.0;
    for (std::size_t k = 0; k < n; ++k) Z += (p[k] = m[k] * std::exp(beta * x[k]));
    for (auto& v : p) v /= Z;
    double step = 0.0;
    for (int it = 0; it < 20000; ++it) {
        const auto Kp = apply_axial_kernel(p, M);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, beta * (psi[k] = V * Kp[k]));
        Z = 0.0;
        std::vector<double> q(n);
        for (std::size_t k = 0; k < n; ++k) Z += (q[k] = m[k] * std::exp(beta * psi[k] - mx));
        step = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            q[k] /= Z;
            step = std::max(step, std::abs(q[k] - p[k]) / std::max(p[k], 1e-300));
        }
        p = std::move(q);
        Z = std::log(Z) + mx;
        if (step < 1e-12) break;
    }
    sol.fixed_point_residual = step;
    if (!(step < 1e-10)) throw ConvergenceError("mean-field fixed point did not settle: step " + std::to_string(step));
    // log Z for mu = e^{beta psi} m / Z with psi mean zero against m
    double shift = 0.0;
    for (std::size_t k = 0; k < n; ++k) shift += m[k] * psi[k];
    sol.log_normalization = Z - beta * shift;
    const auto pot = node_potential(p, M);
    shift = 0.0;
    for (std::size_t k = 0; k < n; ++k) shift += m[k] * V * pot[k];
    for (std::size_t k = 0; k < n; ++k) x[k] = V * pot[k] - shift;
    sol.mu = density_from_masses(p);
    sol.phi = phi;
    return sol;
}

namespace {

PoissonSolution poisson_impl(const std::vector<double>& nodes, const std::vector<double>& weights,
                             const std::vector<double>& f, const FieldOptions& opt, double V) {
    require_grid(opt.grid);
    if (!(V > 0.0)) throw ValidationError("volume must be positive");
    const int L = opt.legendre_degree;
    if (L < 1) throw ValidationError("legendre degree must be positive");
    const int Q = static_cast<int>(nodes.size());
    struct {
        const std::vector<double>& nodes;
        const std::vector<double>& weights;
    } gl{nodes, weights};
    double mass = 0.0;
    for (int i = 0; i < Q; ++i) mass += gl.weights[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
    if (std::abs(mass - 1.0) > 1e-8) throw ValidationError("Poisson target must integrate to 1");
    // target = sum c_l P_l; coefficients up to 2L for the tail check
    std::vector<double> c(static_cast<std::size_t>(2 * L + 1), 0.0);
    std::vector<std::vector<double>> P(static_cast<std::size_t>(Q));
    for (int i = 0; i < Q; ++i) {
        P[static_cast<std::size_t>(i)] = legendre_values(2 * L, gl.nodes[static_cast<std::size_t>(i)]);
        for (int l = 0; l <= 2 * L; ++l)
            c[static_cast<std::size_t>(l)] += gl.weights[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)] * P[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
    }
    for (int l = 0; l <= 2 * L; ++l) c[static_cast<std::size_t>(l)] *= (2.0 * l + 1.0) / 2.0;
    PoissonSolution sol;
    double tail = 0.0;
    for (int l = L + 1; l <= 2 * L; ++l) tail += std::abs(c[static_cast<std::size_t>(l)]);
    if (tail > 1e-8) sol.warnings.push_back("spectral truncation: coefficients above degree " + std::to_string(L) + " carry " + std::to_string(tail));
    // L phi = (V / c_lap)(2 target - 1), L P_l = -l(l+1) P_l
    sol.coeffs.a.assign(static_cast<std::size_t>(L + 1), 0.0);
    for (int l = 1; l <= L; ++l)
        sol.coeffs.a[static_cast<std::size_t>(l)] = -(V / opt.c_lap) * 2.0 * c[static_cast<std::size_t>(l)] / (l * (l + 1.0));
    double gauge = 0.0, res = 0.0;
    for (int i = 0; i < Q; ++i) {
        double phi = 0.0, lap = 0.0;
        for (int l = 1; l <= L; ++l) {
            const double pl = P[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
            phi += sol.coeffs.a[static_cast<std::size_t>(l)] * pl;
            lap -= l * (l + 1.0) * sol.coeffs.a[static_cast<std::size_t>(l)] * pl;
        }
        gauge += gl.weights[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)] * phi;
        res = std::max(res, std::abs(0.5 * (1.0 + opt.c_lap * lap / V) - f[static_cast<std::size_t>(i)]));
    }
    sol.gauge_shift = -gauge;
    sol.residual = res;
    sol.phi = AxialField::on_grid(opt.grid, FieldKind::Potential);
    for (std::size_t k = 0; k < sol.phi.t.size(); ++k) sol.phi.values[k] = sol.coeffs.eval(sol.phi.t[k]) + sol.gauge_shift;
    return sol;
}

}  // namespace

PoissonSolution solve_poisson(const std::function<double(double)>& target, const FieldOptions& opt, double V) {
    const auto& gl = gauss_legendre(std::max(2 * opt.legendre_degree + 2, 256));
    std::vector<double> f;
    for (double x : gl.nodes) f.push_back(target(x));
    return poisson_impl(gl.nodes, gl.weights, f, opt, V);
}

PoissonSolution solve_poisson(const AxialField& target, const FieldOptions& opt, double V) {
    if (target.kind != FieldKind::Density) throw ValidationError("Poisson target must be a density");
    if (std::abs(target.trapezoid() - 1.0) > 1e-8) throw ValidationError("Poisson target must integrate to 1");
    // composite rule, exact for the piecewise-linear interpolant times P_l, l <= 2L
    const auto& gl = gauss_legendre(opt.legendre_degree + 2);
    std::vector<double> nodes, weights, f;
    const double h = target.h();
    for (int k = 0; k < target.M(); ++k) {
        const double a = target.t[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double x = a + 0.5 * h * (gl.nodes[i] + 1.0);
            nodes.push_back(x);
            weights.push_back(0.5 * h * gl.weights[i]);
            f.push_back(target.at(x));
        }
    }
    return poisson_impl(nodes, weights, f, opt, V);
}

nlohmann::json CalibrationReport::to_json() const {
    return {{"c_lap", c_lap}, {"sup_error", sup_error}, {"tolerance", tolerance}, {"pass", pass}};
}

CalibrationReport calibrate_laplacian(const FieldOptions& opt, double t0) {
    const double sigma = 0.05, V = 2.0;
    const auto raw = [&](double s) { return std::exp(-0.5 * (s - t0) * (s - t0) / (sigma * sigma)); };
    const double Zb = integrate(raw, -1.0, 1.0, 400);
    const std::function<double(double)> bump = [&](double s) { return raw(s) / Zb; };
    FieldOptions o = opt;
    o.legendre_degree = std::max(opt.legendre_degree, 160);
    const PoissonSolution ps = solve_poisson(bump, o, V);
    // reference: V * int K(t, s) bump(s) ds, gauged against the bump
    const auto ref_raw = [&](double t) { return V * kernel_potential(bump, t, bump(1.0), bump(-1.0), 200); };
    const double g = integrate([&](double t) { return ref_raw(t) * bump(t); }, -1.0, 1.0, 200);
    CalibrationReport rep;
    rep.c_lap = opt.c_lap;
    for (int k = 0; k <= 200; ++k) {
        const double t = -1.0 + 2.0 * k / 200;
        rep.sup_error = std::max(rep.sup_error, std::abs(ps.coeffs.eval(t) + ps.gauge_shift - (ref_raw(t) - g)));
    }
    rep.pass = rep.sup_error < rep.tolerance;
    return rep;
}

AxialField phi_N_approximant(const std::function<double(double)>& target, int N, const PhiOptions& popt,
                             const FieldOptions& opt) {
    if (N < 2) throw ValidationError("phi_N needs N >= 2");
    require_grid(opt.grid);
    const double dL = 2.0;
    const double mass = integrate(target, -1.0, 1.0, 128);
    if (std::abs(mass - 1.0) > 1e-8) throw ValidationError("target must integrate to 1");
    std::function<double(double)> single;  // int K(t, y) dV(y) for one factor
    std::vector<std::vector<double>> groups;
    if (popt.mode == PhiMode::Quadrature) {
        const double rn = target(1.0), rs = target(-1.0);
        single = [=](double t) { return kernel_potential(target, t, rn, rs); };
    } else {
        if (popt.samples < N - 1) throw ValidationError("need at least one sample per factor");
        // inverse cdf on a fine table
        const int T = 20000;
        std::vector<double> grid(T + 1), cdf(T + 1, 0.0);
        for (int i = 0; i <= T; ++i) grid[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / T;
        for (int i = 1; i <= T; ++i)
            cdf[static_cast<std::size_t>(i)] = cdf[static_cast<std::size_t>(i - 1)] + integrate(target, grid[static_cast<std::size_t>(i - 1)], grid[static_cast<std::size_t>(i)], 4);
        for (auto& v : cdf) v /= cdf.back();
        Rng rng(popt.seed);
        const std::int64_t per = popt.samples / (N - 1);
        groups.resize(static_cast<std::size_t>(N - 1));
        for (auto& gset : groups)
            for (std::int64_t s = 0; s < per; ++s) {
                const double u = rng.uniform();
                const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
                const auto i = static_cast<std::size_t>(std::clamp<long>(it - cdf.begin(), 1, T));
                const double f = (u - cdf[i - 1]) / std::max(cdf[i] - cdf[i - 1], 1e-300);
                gset.push_back(grid[i - 1] + f * (grid[i] - grid[i - 1]));
            }
    }
    // phi_N(t) = d_L/(N-1) sum_{j=2}^N int 2 log||x - x_j|| dV(x_j)
    const auto phi = [&](double t) {
        double s = 0.0;
        if (popt.mode == PhiMode::Quadrature) {
            const double one = single(t);
            for (int j = 2; j <= N; ++j) s += one;
        } else {
            for (auto& gset : groups) {
                double m = 0.0;
                for (double y : gset) m += axial_kernel(t, y);
                s += m / static_cast<double>(gset.size());
            }
        }
        return dL / (N - 1) * s;
    };
    const double gauge = integrate([&](double t) { return phi(t) * target(t); }, -1.0, 1.0, 128);
    AxialField out = AxialField::on_grid(opt.grid, FieldKind::Potential);
    for (std::size_t k = 0; k < out.t.size(); ++k) out.values[k] = phi(out.t[k]) - gauge;
    return out;
}

}  // namespace kez

#pragma once

// P^1 realized as the unit sphere in R^3.
//
// Chart: z -> (2 Re z, 2 Im z, |z|^2 - 1) / (1 + |z|^2), so 0 is the south
// pole (0,0,-1) and infinity the north pole (0,0,1). Under this chart
//   |x(z) - x(w)|^2 = kChordalKappa * |z - w|^2 / ((1 + |z|^2)(1 + |w|^2)).

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kez/random.hpp"

namespace kez {

class LogFanoCurve;

using Vec3 = std::array<double, 3>;

inline constexpr double kChordalKappa = 4.0;
inline constexpr double kCoincidenceTol = 1e-14;

class SpherePoint {
public:
    SpherePoint() : x_{0.0, 0.0, -1.0} {}
    // Renormalized to unit length; throws ValidationError for a zero or
    // non-finite vector.
    explicit SpherePoint(const Vec3& v);
    SpherePoint(double a, double b, double c) : SpherePoint(Vec3{a, b, c}) {}

    const Vec3& vec() const { return x_; }
    double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
    double t() const { return x_[2]; }  // axial coordinate cos(theta)

    static SpherePoint north() { return SpherePoint(Vec3{0.0, 0.0, 1.0}, Unchecked{}); }
    static SpherePoint south() { return SpherePoint(Vec3{0.0, 0.0, -1.0}, Unchecked{}); }

    friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

private:
    struct Unchecked {};
    SpherePoint(const Vec3& v, Unchecked) : x_(v) {}
    Vec3 x_;
};

class PlaneCoord {
public:
    PlaneCoord() = default;
    PlaneCoord(std::complex<double> z) : z_(z) {}  // NOLINT(implicit)
    static PlaneCoord infinity();

    bool is_infinity() const { return inf_; }
    std::complex<double> z() const;  // throws for infinity

    std::string str() const;
    static PlaneCoord parse(const std::string& s);  // "inf", "x", "x+yi", "x,y"

private:
    std::complex<double> z_{0.0, 0.0};
    bool inf_ = false;
};

class PointConfiguration {
public:
    PointConfiguration() = default;
    // Requires N >= 2 and no two bit-identical points.
    explicit PointConfiguration(std::vector<SpherePoint> points);

    std::size_t size() const { return points_.size(); }
    const SpherePoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<SpherePoint>& points() const { return points_; }

    std::string to_csv() const;
    static PointConfiguration from_csv(std::istream& in);
    nlohmann::json to_json() const;  // array of plane coordinates
    static PointConfiguration from_json(const nlohmann::json& j);

private:
    std::vector<SpherePoint> points_;
};

SpherePoint stereo_to_sphere(const PlaneCoord& p);
PlaneCoord sphere_to_stereo(const SpherePoint& x);

double chordal_sq(const SpherePoint& x, const SpherePoint& y);
double chordal(const SpherePoint& x, const SpherePoint& y);
// -log chordal; CoincidenceError below kCoincidenceTol.
double green(const SpherePoint& x, const SpherePoint& y);

// E = d_L / (N (N - 1)) * sum_{i != j} green(x_i, x_j)
double config_energy(const PointConfiguration& c, double d_L);
double config_energy(const PointConfiguration& c, const LogFanoCurve& curve);

SpherePoint sample_uniform(Rng& rng);
// Point at chordal distance r from c (0 <= r <= 2), azimuth phi around c.
SpherePoint point_at_chordal(const SpherePoint& c, double r, double phi);

}  // namespace kez

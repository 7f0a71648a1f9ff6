#include "kez/sphere_geom.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>

#include "kez/errors.hpp"
#include "kez/stability.hpp"

namespace kez {

SpherePoint::SpherePoint(const Vec3& v) {
    const double n = std::hypot(v[0], v[1], v[2]);
    if (!std::isfinite(n) || n == 0.0) throw ValidationError("sphere point needs a finite nonzero vector");
    x_ = {v[0] / n, v[1] / n, v[2] / n};
}

PlaneCoord PlaneCoord::infinity() {
    PlaneCoord p;
    p.inf_ = true;
    return p;
}

std::complex<double> PlaneCoord::z() const {
    if (inf_) throw ValidationError("plane coordinate of the point at infinity");
    return z_;
}

std::string PlaneCoord::str() const {
    if (inf_) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << z_.real();
    if (z_.imag() != 0.0) os << (z_.imag() < 0 ? "" : "+") << z_.imag() << "i";
    return os.str();
}

PlaneCoord PlaneCoord::parse(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "INFINITY") return infinity();
    try {
        std::size_t pos = 0;
        const double re = std::stod(s, &pos);
        if (pos == s.size()) return PlaneCoord({re, 0.0});
        std::string rest = s.substr(pos);
        if (rest[0] == ',') rest = rest.substr(1);
        std::size_t pos2 = 0;
        const double im = std::stod(rest, &pos2);
        const std::string tail = rest.substr(pos2);
        if (!(tail.empty() || tail == "i")) throw ValidationError("bad plane coordinate '" + s + "'");
        return PlaneCoord({re, im});
    } catch (const std::logic_error&) {
        throw ValidationError("bad plane coordinate '" + s + "'");
    }
}

PointConfiguration::PointConfiguration(std::vector<SpherePoint> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw ValidationError("configuration needs at least two points");
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (points_[i] == points_[j]) throw CoincidenceError("configuration has identical points");
}

std::string PointConfiguration::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "x,y,z\n";
    for (auto& p : points_) os << p[0] << "," << p[1] << "," << p[2] << "\n";
    return os.str();
}

PointConfiguration PointConfiguration::from_csv(std::istream& in) {
    std::string line;
    std::vector<SpherePoint> pts;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'x') continue;
        std::stringstream ss(line);
        Vec3 v{};
        char c;
        if (!(ss >> v[0] >> c >> v[1] >> c >> v[2])) throw ValidationError("bad configuration row '" + line + "'");
        pts.emplace_back(v);
    }
    return PointConfiguration(std::move(pts));
}

nlohmann::json PointConfiguration::to_json() const {
    auto arr = nlohmann::json::array();
    for (auto& p : points_) {
        const PlaneCoord z = sphere_to_stereo(p);
        if (z.is_infinity()) arr.push_back("inf");
        else arr.push_back({z.z().real(), z.z().imag()});
    }
    return arr;
}

PointConfiguration PointConfiguration::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ValidationError("configuration JSON must be an array");
    std::vector<SpherePoint> pts;
    for (auto& e : j) {
        if (e.is_string()) pts.push_back(stereo_to_sphere(PlaneCoord::parse(e.get<std::string>())));
        else if (e.is_array() && e.size() == 2) pts.push_back(stereo_to_sphere(PlaneCoord({e[0].get<double>(), e[1].get<double>()})));
        else throw ValidationError("configuration entries are [re, im] or \"inf\"");
    }
    return PointConfiguration(std::move(pts));
}

SpherePoint stereo_to_sphere(const PlaneCoord& p) {
    if (p.is_infinity()) return SpherePoint::north();
    const auto z = p.z();
    const double r2 = std::norm(z);
    if (r2 > 1.0) {
        // with u = 1/z the north-pole neighbourhood stays accurate
        const auto u = 1.0 / z;
        const double s2 = std::norm(u);
        return SpherePoint(2.0 * u.real() / (1.0 + s2), -2.0 * u.imag() / (1.0 + s2), (1.0 - s2) / (1.0 + s2));
    }
    return SpherePoint(2.0 * z.real() / (1.0 + r2), 2.0 * z.imag() / (1.0 + r2), (r2 - 1.0) / (1.0 + r2));
}

PlaneCoord sphere_to_stereo(const SpherePoint& x) {
    if (x[2] >= 1.0 && x[0] == 0.0 && x[1] == 0.0) return PlaneCoord::infinity();
    if (x[2] > 0.0) {
        // z = (x + iy)/(1 - t) = (1 + t)/(x - iy)
        const std::complex<double> w(x[0], -x[1]);
        if (w == 0.0) return PlaneCoord::infinity();
        return PlaneCoord((1.0 + x[2]) / w);
    }
    return PlaneCoord(std::complex<double>(x[0], x[1]) / (1.0 - x[2]));
}

double chordal_sq(const SpherePoint& x, const SpherePoint& y) {
    const double a = x[0] - y[0], b = x[1] - y[1], c = x[2] - y[2];
    return a * a + b * b + c * c;
}

double chordal(const SpherePoint& x, const SpherePoint& y) { return std::sqrt(chordal_sq(x, y)); }

double green(const SpherePoint& x, const SpherePoint& y) {
    const double r = chordal(x, y);
    if (r < kCoincidenceTol) throw CoincidenceError("green: coincident points");
    return -std::log(r);
}

double config_energy(const PointConfiguration& c, double d_L) {
    const std::size_t n = c.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * green(c[i], c[j]);
    return d_L / static_cast<double>(n * (n - 1)) * s;
}

double config_energy(const PointConfiguration& c, const LogFanoCurve& curve) {
    return config_energy(c, curve.d_L());
}

SpherePoint sample_uniform(Rng& rng) {
    const double t = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    return SpherePoint(s * std::cos(phi), s * std::sin(phi), t);
}

SpherePoint point_at_chordal(const SpherePoint& c, double r, double phi) {
    // polar angle alpha from c: cos = 1 - r^2/2, sin = r sqrt(1 - r^2/4)
    const double ca = 1.0 - 0.5 * r * r;
    const double sa = r * std::sqrt(std::max(0.0, 1.0 - 0.25 * r * r));
    // orthonormal frame (e1, e2) perpendicular to c
    const Vec3& v = c.vec();
    Vec3 a = std::abs(v[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    const double dot = a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
    Vec3 e1{a[0] - dot * v[0], a[1] - dot * v[1], a[2] - dot * v[2]};
    const double n1 = std::hypot(e1[0], e1[1], e1[2]);
    for (auto& e : e1) e /= n1;
    const Vec3 e2{v[1] * e1[2] - v[2] * e1[1], v[2] * e1[0] - v[0] * e1[2], v[0] * e1[1] - v[1] * e1[0]};
    const double cp = std::cos(phi), sp = std::sin(phi);
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = ca * v[i] + sa * (cp * e1[i] + sp * e2[i]);
    return SpherePoint(out);
}

}  // namespace kez

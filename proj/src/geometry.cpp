#include "conemag/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "conemag/errors.hpp"

namespace conemag {

ConeConfig::ConeConfig(double sigma, double b0, double alpha)
    : sigma_(sigma), b0_(b0), alpha_(alpha) {
    std::ostringstream msg;
    if (!std::isfinite(sigma) || !std::isfinite(b0) || !std::isfinite(alpha)) {
        throw ConfigError("cone parameters must be finite");
    }
    if (sigma < 1.0) {
        msg << "sigma must be >= 1 (got " << sigma << ")";
        throw ConfigError(msg.str());
    }
    if (b0 <= 0.0) {
        msg << "b0 must be > 0 (got " << b0 << ")";
        throw ConfigError(msg.str());
    }
    if (!(alpha > 0.0 && alpha < 1.0 / sigma)) {
        msg << "alpha must lie strictly inside (0, 1/sigma) = (0, " << 1.0 / sigma << ") (got "
            << alpha << ")";
        throw ConfigError(msg.str());
    }
}

double canonical_angle(double theta, double period) {
    double t = std::fmod(theta, period);
    if (t < 0.0) t += period;
    if (t >= period) t -= period;
    return t;
}

double reduce_symmetric(double theta, double period) {
    const double half = 0.5 * period;
    double t = std::fmod(theta, period);
    if (t > half) t -= period;
    if (t <= -half) t += period;
    return t;
}

ConePoint::ConePoint(double r, double theta, const ConeConfig& cfg) : r_(r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radial coordinate must be finite and >= 0");
    if (!std::isfinite(theta)) throw DomainError("angle must be finite");
    theta_ = canonical_angle(theta, cfg.period());
}

double angular_difference(double t1, double t2, const ConeConfig& cfg) {
    return reduce_symmetric(t1 - t2, cfg.period());
}

double cone_distance(const ConePoint& p, const ConePoint& q, const ConeConfig& cfg) {
    const double d = std::abs(angular_difference(p.theta(), q.theta(), cfg));
    const double r1 = p.r();
    const double r2 = q.r();
    if (d >= kPi) return r1 + r2;
    if (d == 0.0) return std::abs(r1 - r2);
    // (r1-r2)^2 + 4 r1 r2 sin^2(d/2) avoids cancellation near d = 0.
    const double s = std::sin(0.5 * d);
    const double v = (r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s;
    return std::sqrt(std::max(v, 0.0));
}

FluxDistance kappa_sigma(const ConeConfig& cfg) {
    const double a = cfg.alpha();
    const double s = cfg.sigma();
    const long nmax = static_cast<long>(std::ceil(s * a)) + 1;
    double best = std::numeric_limits<double>::infinity();
    for (long n = -nmax; n <= nmax; ++n) {
        best = std::min(best, std::abs(a - static_cast<double>(n) / s));
    }
    return {best};
}

}  // namespace conemag

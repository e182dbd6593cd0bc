#pragma once

#include <numbers>

namespace conemag {

inline constexpr double kPi = std::numbers::pi;

// Cone cross-section radius sigma >= 1, field strength b0 > 0,
// flux 0 < alpha < 1/sigma. Validated on construction.
class ConeConfig {
public:
    ConeConfig(double sigma, double b0, double alpha);

    double sigma() const { return sigma_; }
    double b0() const { return b0_; }
    double alpha() const { return alpha_; }
    // Angular period 2*sigma*pi.
    double period() const { return 2.0 * sigma_ * kPi; }

    bool operator==(const ConeConfig&) const = default;

private:
    double sigma_;
    double b0_;
    double alpha_;
};

// Point (r, theta) with theta reduced to [0, 2*sigma*pi).
class ConePoint {
public:
    ConePoint(double r, double theta, const ConeConfig& cfg);

    double r() const { return r_; }
    double theta() const { return theta_; }

private:
    double r_;
    double theta_;
};

struct FluxDistance {
    double kappa;
};

// Reduce an angle to [0, period).
double canonical_angle(double theta, double period);

// Representative of t1 - t2 modulo 2*sigma*pi in (-sigma*pi, sigma*pi].
double angular_difference(double t1, double t2, const ConeConfig& cfg);

// Same reduction for an arbitrary angle.
double reduce_symmetric(double theta, double period);

// Geodesic distance on the flat cone; paths through the tip once the
// angular separation reaches pi.
double cone_distance(const ConePoint& p, const ConePoint& q, const ConeConfig& cfg);

// Distance from alpha to the lattice (1/sigma)Z.
FluxDistance kappa_sigma(const ConeConfig& cfg);

}  // namespace conemag

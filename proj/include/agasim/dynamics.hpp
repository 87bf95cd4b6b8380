#ifndef AGASIM_DYNAMICS_HPP
#define AGASIM_DYNAMICS_HPP

#include <cmath>
#include <stdexcept>

#include "agasim/planet.hpp"

namespace agasim {

// Planar circular restricted three-body problem in canonical units. The
// rotating frame is centred on the barycentre with the Sun at (-mu, 0), the
// planet at (1 - mu, 0) and unit angular rate.

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(Vec2 o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counterclockwise rotation by angle (radians).
inline Vec2 rotate(Vec2 v, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Position/velocity in the rotating frame (DU, VU) at canonical time t (TU).
struct RotatingState {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double t = 0.0;

    Vec2 position() const { return {x, y}; }
    Vec2 velocity() const { return {vx, vy}; }
    bool operator==(const RotatingState&) const = default;
};

/// Same layout, barycentric inertial frame aligned with the rotating frame at t = 0.
struct InertialState {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double t = 0.0;

    Vec2 position() const { return {x, y}; }
    Vec2 velocity() const { return {vx, vy}; }
};

struct StateDerivative {
    double dx = 0.0;
    double dy = 0.0;
    double dvx = 0.0;
    double dvy = 0.0;
};

class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Distances below this (DU) from either primary are rejected.
inline constexpr double kSingularDistance = 1e-12;

struct PrimaryDistances {
    double r1; // to the Sun
    double r2; // to the planet
};

/// Throws SingularityError when either distance is below kSingularDistance.
PrimaryDistances primary_distances(Vec2 position, double mu);

inline Vec2 planet_position(double mu) { return {1.0 - mu, 0.0}; }

/// Omega = (x^2 + y^2)/2 + (1 - mu)/r1 + mu/r2.
double omega_potential(Vec2 position, double mu);

/// Analytic (dOmega/dx, dOmega/dy).
Vec2 omega_gradient(Vec2 position, double mu);

/// Equations of motion with an additional planar acceleration (canonical units).
StateDerivative crtbp_derivative(const RotatingState& s, double mu, Vec2 perturbation = {});

/// C = 2 Omega - v^2.
double jacobi_constant(const RotatingState& s, double mu);

InertialState to_inertial(const RotatingState& s);
RotatingState to_rotating(const InertialState& s);

/// Two-body heliocentric energy 0.5 v_inertial^2 - (1 - mu)/r1. The planet
/// potential is deliberately left out; evaluate far from the planet.
double heliocentric_energy(const RotatingState& s, double mu);

struct PlanetRelative {
    double r2_du = 0.0;
    double altitude_km = 0.0;
    Vec2 velocity_inertial; // VU, inertial axes, relative to the planet
    double energy = 0.0;    // 0.5 |v_rel|^2 - mu / r2; > 0 means hyperbolic
};

PlanetRelative planet_relative(const RotatingState& s, const PlanetModel& planet);

/// Altitude above the mean surface (km) without the singularity check.
inline double altitude_km(Vec2 position, const PlanetModel& planet)
{
    return norm(position - planet_position(planet.mass_ratio)) * planet.du_km() - planet.radius_km;
}

} // namespace agasim

#endif

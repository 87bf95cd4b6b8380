#include "agasim/dynamics.hpp"

#include <string>

namespace agasim {

PrimaryDistances primary_distances(Vec2 position, double mu)
{
    const double r1 = std::hypot(position.x + mu, position.y);
    const double r2 = std::hypot(position.x - 1.0 + mu, position.y);
    if (!(r1 >= kSingularDistance) || !(r2 >= kSingularDistance)) {
        throw SingularityError("position (" + std::to_string(position.x) + ", " + std::to_string(position.y) +
                               ") coincides with a primary");
    }
    return {r1, r2};
}

double omega_potential(Vec2 position, double mu)
{
    const auto [r1, r2] = primary_distances(position, mu);
    return 0.5 * (position.x * position.x + position.y * position.y) + (1.0 - mu) / r1 + mu / r2;
}

Vec2 omega_gradient(Vec2 position, double mu)
{
    const auto [r1, r2] = primary_distances(position, mu);
    const double k1 = (1.0 - mu) / (r1 * r1 * r1);
    const double k2 = mu / (r2 * r2 * r2);
    const double x = position.x;
    const double y = position.y;
    return {
        x - k1 * (x + mu) - k2 * (x - 1.0 + mu),
        y - k1 * y - k2 * y,
    };
}

StateDerivative crtbp_derivative(const RotatingState& s, double mu, Vec2 perturbation)
{
    const Vec2 g = omega_gradient(s.position(), mu);
    return {
        s.vx,
        s.vy,
        2.0 * s.vy + g.x + perturbation.x,
        -2.0 * s.vx + g.y + perturbation.y,
    };
}

double jacobi_constant(const RotatingState& s, double mu)
{
    return 2.0 * omega_potential(s.position(), mu) - (s.vx * s.vx + s.vy * s.vy);
}

InertialState to_inertial(const RotatingState& s)
{
    // v_in = R(t) (v_rot + w x r), w = (0, 0, 1)
    const Vec2 r = s.position();
    const Vec2 v = s.velocity() + Vec2{-r.y, r.x};
    const Vec2 ri = rotate(r, s.t);
    const Vec2 vi = rotate(v, s.t);
    return {ri.x, ri.y, vi.x, vi.y, s.t};
}

RotatingState to_rotating(const InertialState& s)
{
    const Vec2 r = rotate(s.position(), -s.t);
    const Vec2 v = rotate(s.velocity(), -s.t) - Vec2{-r.y, r.x};
    return {r.x, r.y, v.x, v.y, s.t};
}

double heliocentric_energy(const RotatingState& s, double mu)
{
    const double r1 = std::hypot(s.x + mu, s.y);
    if (!(r1 >= kSingularDistance)) {
        throw SingularityError("heliocentric energy evaluated at the Sun");
    }
    // |v_in| is rotation invariant, so skip the rotation itself.
    const Vec2 v = s.velocity() + Vec2{-s.y, s.x};
    return 0.5 * dot(v, v) - (1.0 - mu) / r1;
}

PlanetRelative planet_relative(const RotatingState& s, const PlanetModel& planet)
{
    const double mu = planet.mass_ratio;
    const Vec2 rel = s.position() - planet_position(mu);
    const double r2 = norm(rel);
    const Vec2 v_rot = s.velocity() + Vec2{-rel.y, rel.x};
    const Vec2 v_in = rotate(v_rot, s.t);
    PlanetRelative out;
    out.r2_du = r2;
    out.altitude_km = r2 * planet.du_km() - planet.radius_km;
    out.velocity_inertial = v_in;
    out.energy = r2 > 0.0 ? 0.5 * dot(v_in, v_in) - mu / r2 : -INFINITY;
    return out;
}

} // namespace agasim

#ifndef AGASIM_RKF78_HPP
#define AGASIM_RKF78_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace agasim {

template <std::size_t N>
using StateVector = std::array<double, N>;

struct IntegratorSettings {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double h_init = 1e-4;
    double h_min = 1e-14;
    double h_max = 1e-2;
    std::size_t max_steps = 5'000'000;
    double event_time_tol = 1e-10;
    /// When false every step has length h_init and no error control is applied.
    bool adaptive = true;

    void validate() const;
    bool operator==(const IntegratorSettings&) const = default;
};

IntegratorSettings integrator_from_json(const nlohmann::json& j, IntegratorSettings base = {});
nlohmann::json integrator_to_json(const IntegratorSettings& s);

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StepUnderflowError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

class MaxStepsError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

class NoSignChangeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Fehlberg's 13-stage 7(8) pair (NASA TR R-287).
namespace rkf78 {

inline constexpr std::size_t kStages = 13;

inline constexpr std::array<double, kStages> c = {
    0.0, 2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 1.0 / 2.0, 5.0 / 6.0,
    1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0, 1.0,
};

inline constexpr std::array<std::array<double, kStages - 1>, kStages> a = {{
    {},
    {2.0 / 27.0},
    {1.0 / 36.0, 1.0 / 12.0},
    {1.0 / 24.0, 0.0, 1.0 / 8.0},
    {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
    {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
    {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
    {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
    {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
    {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0},
    {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0, 2133.0 / 4100.0, 45.0 / 82.0,
     45.0 / 164.0, 18.0 / 41.0},
    {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0},
    {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0, 2193.0 / 4100.0, 51.0 / 82.0,
     33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0},
}};

inline constexpr std::array<double, kStages> b7 = {
    41.0 / 840.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0, 41.0 / 840.0,
    0.0, 0.0,
};

inline constexpr std::array<double, kStages> b8 = {
    0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0, 0.0,
    41.0 / 840.0, 41.0 / 840.0,
};

} // namespace rkf78

template <std::size_t N>
struct StepResult {
    StateVector<N> low;  // 7th order
    StateVector<N> high; // 8th order, the propagated solution
    /// Max over components of |high - low| / (abs_tol + rel_tol * |y|);
    /// a step is acceptable when this is <= 1.
    double error = 0.0;
};

/// One embedded RKF 7(8) step of size h from (t, y).
template <std::size_t N, class Rhs>
StepResult<N> rkf78_step(Rhs&& f, const StateVector<N>& y, double t, double h, double rel_tol, double abs_tol)
{
    std::array<StateVector<N>, rkf78::kStages> k;
    k[0] = f(t, y);
    for (std::size_t s = 1; s < rkf78::kStages; ++s) {
        StateVector<N> stage = y;
        for (std::size_t j = 0; j < s; ++j) {
            const double aj = rkf78::a[s][j];
            if (aj == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < N; ++i) {
                stage[i] += h * aj * k[j][i];
            }
        }
        k[s] = f(t + rkf78::c[s] * h, stage);
    }

    StepResult<N> out;
    out.low = y;
    out.high = y;
    for (std::size_t s = 0; s < rkf78::kStages; ++s) {
        for (std::size_t i = 0; i < N; ++i) {
            out.low[i] += h * rkf78::b7[s] * k[s][i];
            out.high[i] += h * rkf78::b8[s] * k[s][i];
        }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.high[i]));
        err = std::max(err, std::abs(out.high[i] - out.low[i]) / scale);
    }
    out.error = err;
    return out;
}

/// Sign changes are classified along the direction of integration, so a
/// "rising" event in a backward run is one whose value grows as t decreases.
enum class Crossing { rising, falling, any };

template <std::size_t N>
struct EventSpec {
    std::string label;
    std::function<double(double, const StateVector<N>&)> function;
    Crossing direction = Crossing::any;
    bool terminal = false;
    /// Optional gate; roots at which it returns false are discarded.
    std::function<bool(double, const StateVector<N>&)> active;
};

template <std::size_t N>
struct EventRecord {
    std::size_t event_index = 0;
    std::string label;
    double t = 0.0;
    StateVector<N> state{};
    bool rising = false;
    bool terminal = false;
};

enum class Termination { time_limit, terminal_event };

template <std::size_t N>
struct Propagation {
    std::vector<double> times;
    std::vector<StateVector<N>> states;
    std::vector<EventRecord<N>> events;
    Termination reason = Termination::time_limit;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    double final_time() const { return times.back(); }
    const StateVector<N>& final_state() const { return states.back(); }
};

/// Root of a scalar function on [ta, tb] with g(ta), g(tb) of opposite sign.
/// Illinois false position with a bisection fallback whenever the bracket
/// fails to halve; stops once the bracket is no wider than `tol`. The
/// returned point lies on the `tb` side of the crossing (or at an exact zero).
template <class G>
double locate_root(G&& g, double ta, double tb, double ga, double gb, double tol)
{
    if (ga == 0.0) {
        return ta;
    }
    if (gb == 0.0) {
        return tb;
    }
    if ((ga > 0.0) == (gb > 0.0)) {
        throw NoSignChangeError("event function has no sign change on the bracket");
    }
    auto same_sign = [](double u, double v) { return (u > 0.0) == (v > 0.0); };
    int last_moved = 0; // -1: a moved last, +1: b moved last
    for (int iter = 0; iter < 200 && std::abs(tb - ta) > tol; ++iter) {
        const double width = std::abs(tb - ta);
        double tm = tb - gb * (tb - ta) / (gb - ga);
        const double frac = (tm - ta) / (tb - ta);
        if (!(frac > 0.01 && frac < 0.99)) {
            tm = ta + std::clamp(std::isfinite(frac) ? frac : 0.5, 0.01, 0.99) * (tb - ta);
        }
        const double gm = g(tm);
        if (gm == 0.0) {
            return tm;
        }
        if (same_sign(gm, ga)) {
            ta = tm;
            ga = gm;
            if (last_moved == -1) {
                gb *= 0.5;
            }
            last_moved = -1;
        } else {
            tb = tm;
            gb = gm;
            if (last_moved == 1) {
                ga *= 0.5;
            }
            last_moved = 1;
        }
        if (std::abs(tb - ta) > 0.5 * width) {
            const double mid = 0.5 * (ta + tb);
            const double gmid = g(mid);
            if (gmid == 0.0) {
                return mid;
            }
            if (same_sign(gmid, ga)) {
                ta = mid;
                ga = gmid;
            } else {
                tb = mid;
                gb = gmid;
            }
            last_moved = 0;
        }
    }
    return tb;
}

/// Refines an event bracket on a dense solution: `dense(t)` returns the state
/// at t, `event(t, y)` the event value.
template <std::size_t N, class Event, class Dense>
std::pair<double, StateVector<N>> locate_event(double ta, double tb, Event&& event, Dense&& dense, double tol)
{
    auto g = [&](double t) { return event(t, dense(t)); };
    const double t = locate_root(g, ta, tb, g(ta), g(tb), tol);
    return {t, dense(t)};
}

namespace detail {

inline bool crossed(double g0, double g1, Crossing dir)
{
    const bool rising = g0 < 0.0 && g1 >= 0.0;
    const bool falling = g0 > 0.0 && g1 <= 0.0;
    switch (dir) {
    case Crossing::rising: return rising;
    case Crossing::falling: return falling;
    case Crossing::any: return rising || falling;
    }
    return false;
}

} // namespace detail

/// Adaptive RKF 7(8) propagation from t0 toward t_limit (either direction),
/// advancing with the 8th-order solution. Every step point is recorded.
/// Events are detected from sign changes between step points and refined by
/// re-integrating from the step start, so event states carry full
/// integrator accuracy. Terminal events end the run at the event time.
template <std::size_t N, class Rhs>
Propagation<N> propagate(Rhs&& f, const StateVector<N>& y0, double t0, double t_limit,
                         std::span<const EventSpec<N>> events, const IntegratorSettings& settings)
{
    settings.validate();
    if (t_limit == t0) {
        throw std::invalid_argument("propagate: t_limit must differ from t0");
    }
    const double dir = t_limit > t0 ? 1.0 : -1.0;
    // Overshooting the limit by less than this is treated as reaching it.
    const double t_eps = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t0), std::abs(t_limit));

    Propagation<N> out;
    out.times.push_back(t0);
    out.states.push_back(y0);

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
        g_prev[e] = events[e].function(t0, y0);
    }

    double t = t0;
    StateVector<N> y = y0;
    double h = dir * std::clamp(settings.h_init, settings.h_min, settings.h_max);

    while (true) {
        if (out.accepted_steps >= settings.max_steps) {
            throw MaxStepsError("propagate: exceeded " + std::to_string(settings.max_steps) + " steps");
        }
        const double remaining = t_limit - t;
        const bool last = std::abs(remaining) <= std::abs(h) + t_eps;
        const double h_try = last ? remaining : h;

        const StepResult<N> step = rkf78_step(f, y, t, h_try, settings.rel_tol, settings.abs_tol);
        const double err = std::isfinite(step.error) ? step.error : 1e300;

        if (settings.adaptive && err > 1.0) {
            ++out.rejected_steps;
            const double shrink = std::max(0.2, 0.9 * std::pow(err, -1.0 / 8.0));
            h = h_try * shrink;
            if (std::abs(h) < settings.h_min) {
                throw StepUnderflowError("propagate: step size fell below h_min at t = " + std::to_string(t));
            }
            continue;
        }

        ++out.accepted_steps;
        const double t_new = last ? t_limit : t + h_try;
        const StateVector<N>& y_new = step.high;

        // Event scan on the accepted step.
        struct Hit {
            std::size_t index;
            double t;
            StateVector<N> state;
            bool rising;
        };
        std::vector<Hit> hits;
        std::vector<double> g_new(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            g_new[e] = events[e].function(t_new, y_new);
            if (!detail::crossed(g_prev[e], g_new[e], events[e].direction)) {
                continue;
            }
            const double t_start = t;
            const StateVector<N> y_start = y;
            auto dense = [&](double tq) -> StateVector<N> {
                if (tq == t_start) {
                    return y_start;
                }
                if (tq == t_new) {
                    return y_new;
                }
                return rkf78_step(f, y_start, t_start, tq - t_start, settings.rel_tol, settings.abs_tol).high;
            };
            auto [te, ye] = locate_event<N>(t_start, t_new, events[e].function, dense, settings.event_time_tol);
            if (events[e].active && !events[e].active(te, ye)) {
                continue;
            }
            hits.push_back({e, te, ye, g_prev[e] < 0.0});
        }
        std::stable_sort(hits.begin(), hits.end(),
                         [dir](const Hit& l, const Hit& r) { return dir * l.t < dir * r.t; });

        bool stop = false;
        for (const Hit& hit : hits) {
            const auto& spec = events[hit.index];
            out.events.push_back({hit.index, spec.label, hit.t, hit.state, hit.rising, spec.terminal});
            if (spec.terminal) {
                out.times.push_back(hit.t);
                out.states.push_back(hit.state);
                out.reason = Termination::terminal_event;
                stop = true;
                break;
            }
        }
        if (stop) {
            return out;
        }

        t = t_new;
        y = y_new;
        g_prev = std::move(g_new);
        out.times.push_back(t);
        out.states.push_back(y);
        if (last) {
            out.reason = Termination::time_limit;
            return out;
        }

        if (settings.adaptive) {
            const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -1.0 / 8.0), 0.2, 5.0);
            h = dir * std::min(std::abs(h_try) * grow, settings.h_max);
            h = dir * std::max(std::abs(h), settings.h_min);
        }
    }
}

template <std::size_t N, class Rhs>
Propagation<N> propagate(Rhs&& f, const StateVector<N>& y0, double t0, double t_limit,
                         const std::vector<EventSpec<N>>& events, const IntegratorSettings& settings)
{
    return propagate<N>(std::forward<Rhs>(f), y0, t0, t_limit, std::span<const EventSpec<N>>(events), settings);
}

} // namespace agasim

#endif

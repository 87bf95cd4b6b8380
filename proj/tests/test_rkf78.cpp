#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "agasim/dynamics.hpp"
#include "agasim/rkf78.hpp"

using namespace agasim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using S4 = StateVector<4>;

S4 two_body(double, const S4& y)
{
    const double r = std::hypot(y[0], y[1]);
    const double r3 = r * r * r;
    return {y[2], y[3], -y[0] / r3, -y[1] / r3};
}

// Kepler ellipse with GM = 1, a = 1, periapsis on +x at t = 0.
S4 kepler_ellipse(double e, double t)
{
    double E = t;
    for (int i = 0; i < 50; ++i) {
        E -= (E - e * std::sin(E) - t) / (1.0 - e * std::cos(E));
    }
    const double b = std::sqrt(1.0 - e * e);
    const double edot = 1.0 / (1.0 - e * std::cos(E));
    return {std::cos(E) - e, b * std::sin(E), -std::sin(E) * edot, b * std::cos(E) * edot};
}

// Hyperbola with GM = 1, pericenter radius 1 at t = 0, parameterised by the
// hyperbolic anomaly F.
struct HyperbolaPoint {
    double t;
    S4 state;
};

HyperbolaPoint kepler_hyperbola(double e, double F)
{
    const double a = 1.0 / (e - 1.0); // |a|
    const double n = std::sqrt(1.0 / (a * a * a));
    const double fdot = n / (e * std::cosh(F) - 1.0);
    const double k = std::sqrt(e * e - 1.0);
    return {(e * std::sinh(F) - F) / n,
            {a * (e - std::cosh(F)), a * k * std::sinh(F), -a * std::sinh(F) * fdot, a * k * std::cosh(F) * fdot}};
}

double state_error(const S4& a, const S4& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace

TEST(Coefficients, ConsistencyConditions)
{
    EXPECT_NEAR(std::accumulate(rkf78::b7.begin(), rkf78::b7.end(), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(std::accumulate(rkf78::b8.begin(), rkf78::b8.end(), 0.0), 1.0, 1e-15);
    for (std::size_t i = 0; i < rkf78::kStages; ++i) {
        const double row = std::accumulate(rkf78::a[i].begin(), rkf78::a[i].end(), 0.0);
        EXPECT_NEAR(row, rkf78::c[i], 1e-14) << "stage " << i;
    }
}

TEST(Step, ZeroDerivativeLeavesStateUnchanged)
{
    const StateVector<2> y{1.5, -2.0};
    const auto r = rkf78_step([](double, const StateVector<2>&) { return StateVector<2>{}; }, y, 0.0, 0.1, 1e-12,
                              1e-12);
    EXPECT_EQ(r.high, y);
    EXPECT_EQ(r.low, y);
    EXPECT_EQ(r.error, 0.0);
}

TEST(Step, ExponentialOracle)
{
    const auto r = rkf78_step([](double, const StateVector<1>& y) { return y; }, StateVector<1>{1.0}, 0.0, 0.1,
                              1e-12, 1e-12);
    EXPECT_NEAR(r.high[0], std::exp(0.1), 1e-12);
}

TEST(Propagate, FixedStepEighthOrderConvergence)
{
    const double e = 0.3;
    const S4 y0 = kepler_ellipse(e, 0.0);
    double previous = 0.0;
    for (int n : {20, 40, 80}) {
        IntegratorSettings s;
        s.adaptive = false;
        s.h_init = kTwoPi / n;
        s.h_max = s.h_init;
        const auto p = propagate<4>(two_body, y0, 0.0, kTwoPi, std::vector<EventSpec<4>>{}, s);
        const double err = state_error(p.final_state(), y0);
        if (previous > 0.0) {
            EXPECT_GE(previous / err, 100.0) << "n = " << n;
        }
        previous = err;
    }
}

TEST(Propagate, CrtbpWithoutPlanetFollowsConic)
{
    const double e = 0.3;
    const S4 k0 = kepler_ellipse(e, 0.0);
    const RotatingState r0 = to_rotating({k0[0], k0[1], k0[2], k0[3], 0.0});
    auto rhs = [](double t, const S4& y) {
        const auto d = crtbp_derivative({y[0], y[1], y[2], y[3], t}, 0.0);
        return S4{d.dx, d.dy, d.dvx, d.dvy};
    };
    const auto p = propagate<4>(rhs, S4{r0.x, r0.y, r0.vx, r0.vy}, 0.0, kTwoPi, std::vector<EventSpec<4>>{},
                                IntegratorSettings{});
    double worst = 0.0;
    for (std::size_t i = 0; i < p.states.size(); ++i) {
        const auto& y = p.states[i];
        const InertialState in = to_inertial({y[0], y[1], y[2], y[3], p.times[i]});
        const S4 ref = kepler_ellipse(e, p.times[i]);
        worst = std::max(worst, std::hypot(in.x - ref[0], in.y - ref[1]));
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(Propagate, TighterToleranceReducesError)
{
    const double e = 0.5;
    const S4 y0 = kepler_ellipse(e, 0.0);
    auto final_error = [&](double tol) {
        IntegratorSettings s;
        s.rel_tol = tol;
        s.abs_tol = tol;
        s.h_max = 1.0;
        const auto p = propagate<4>(two_body, y0, 0.0, kTwoPi, std::vector<EventSpec<4>>{}, s);
        return state_error(p.final_state(), y0);
    };
    EXPECT_GE(final_error(1e-7) / final_error(1e-9), 10.0);
}

TEST(Propagate, HarmonicOscillatorZeroCrossings)
{
    const std::vector<EventSpec<2>> events = {
        {"zero", [](double, const StateVector<2>& y) { return y[0]; }, Crossing::any, false, {}},
    };
    const auto p = propagate<2>([](double, const StateVector<2>& y) { return StateVector<2>{y[1], -y[0]}; },
                                StateVector<2>{std::sin(0.5), std::cos(0.5)}, 0.5, 10.5, events, IntegratorSettings{});
    ASSERT_EQ(p.events.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(p.events[k].t, (k + 1.0) * std::numbers::pi, 1e-9);
        EXPECT_EQ(p.events[k].rising, k % 2 == 1);
    }
    EXPECT_EQ(p.reason, Termination::time_limit);
    EXPECT_EQ(p.final_time(), 10.5);
}

TEST(Propagate, TerminalEventStopsAndLocalizes)
{
    const std::vector<EventSpec<2>> events = {
        {"edge", [](double, const StateVector<2>& y) { return y[0] - 0.75; }, Crossing::rising, true, {}},
    };
    const auto p = propagate<2>([](double, const StateVector<2>& y) { return StateVector<2>{y[1], -y[0]}; },
                                StateVector<2>{0.0, 1.0}, 0.0, 10.0, events, IntegratorSettings{});
    ASSERT_EQ(p.reason, Termination::terminal_event);
    EXPECT_NEAR(p.final_time(), std::asin(0.75), 1e-10);
    EXPECT_LE(std::abs(p.final_state()[0] - 0.75), 1e-10);
}

TEST(Propagate, DirectionIsMeasuredAlongIntegration)
{
    const std::vector<EventSpec<1>> events = {
        {"rising", [](double, const StateVector<1>& y) { return y[0]; }, Crossing::rising, false, {}},
        {"falling", [](double, const StateVector<1>& y) { return y[0]; }, Crossing::falling, false, {}},
    };
    const auto p = propagate<1>([](double, const StateVector<1>&) { return StateVector<1>{1.0}; },
                                StateVector<1>{0.5}, 0.0, -2.0, events, IntegratorSettings{});
    ASSERT_EQ(p.events.size(), 1u);
    EXPECT_EQ(p.events[0].label, "falling");
    EXPECT_NEAR(p.events[0].t, -0.5, 1e-10);
}

TEST(Propagate, InactiveRootsAreDiscarded)
{
    std::vector<EventSpec<2>> events = {
        {"zero", [](double, const StateVector<2>& y) { return y[0]; }, Crossing::any, false, {}},
    };
    events[0].active = [](double t, const StateVector<2>&) { return t > 5.0; };
    const auto p = propagate<2>([](double, const StateVector<2>& y) { return StateVector<2>{y[1], -y[0]}; },
                                StateVector<2>{0.0, 1.0}, 0.0, 10.0, events, IntegratorSettings{});
    ASSERT_EQ(p.events.size(), 2u);
    EXPECT_NEAR(p.events[0].t, 2.0 * std::numbers::pi, 1e-9);
}

TEST(Propagate, KeplerHyperbolaPericenterTiming)
{
    const double e = 1.5;
    const HyperbolaPoint start = kepler_hyperbola(e, -1.2);
    const std::vector<EventSpec<4>> events = {
        {"pericenter", [](double, const S4& y) { return 2.0 * (y[0] * y[2] + y[1] * y[3]); }, Crossing::rising,
         false, {}},
    };
    const auto p = propagate<4>(two_body, start.state, start.t, -start.t, events, IntegratorSettings{});
    ASSERT_EQ(p.events.size(), 1u);
    EXPECT_NEAR(p.events[0].t, 0.0, 1e-9);
    EXPECT_NEAR(std::hypot(p.events[0].state[0], p.events[0].state[1]), 1.0, 1e-10);
    const HyperbolaPoint end = kepler_hyperbola(e, 1.2);
    EXPECT_NEAR(end.t, -start.t, 1e-12);
    EXPECT_LE(state_error(p.final_state(), end.state), 1e-9);
}

TEST(Propagate, BackwardThenForwardReturnsToStart)
{
    const double mu = 2.448e-6;
    const S4 y0{1.0 - mu, 5.824e-5, -0.5, 0.0};
    auto rhs = [mu](double t, const S4& y) {
        const auto d = crtbp_derivative({y[0], y[1], y[2], y[3], t}, mu);
        return S4{d.dx, d.dy, d.dvx, d.dvy};
    };
    const std::vector<EventSpec<4>> none;
    const auto back = propagate<4>(rhs, y0, 0.0, -std::numbers::pi / 2.0, none, IntegratorSettings{});
    const auto fwd = propagate<4>(rhs, back.final_state(), back.final_time(), 0.0, none, IntegratorSettings{});
    EXPECT_LE(state_error(fwd.final_state(), y0), 1e-9);
}

TEST(Propagate, SampleTimesStrictlyMonotone)
{
    const auto p = propagate<4>(two_body, kepler_ellipse(0.6, 0.0), 0.0, -kTwoPi, std::vector<EventSpec<4>>{},
                                IntegratorSettings{});
    for (std::size_t i = 1; i < p.times.size(); ++i) {
        EXPECT_LT(p.times[i], p.times[i - 1]);
    }
    EXPECT_GT(p.accepted_steps, 0u);
}

TEST(Propagate, BitIdenticalReruns)
{
    const std::vector<EventSpec<2>> events = {
        {"zero", [](double, const StateVector<2>& y) { return y[0]; }, Crossing::any, false, {}},
    };
    auto run = [&] {
        return propagate<2>([](double, const StateVector<2>& y) { return StateVector<2>{y[1], -y[0]}; },
                            StateVector<2>{0.3, 1.0}, 0.0, 20.0, events, IntegratorSettings{});
    };
    const auto a = run();
    const auto b = run();
    ASSERT_EQ(a.events.size(), b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        EXPECT_EQ(a.events[i].t, b.events[i].t);
    }
    EXPECT_EQ(a.times, b.times);
}

TEST(Propagate, StepUnderflowAndMaxSteps)
{
    IntegratorSettings stiff;
    stiff.h_min = 1e-2;
    stiff.h_init = 1e-2;
    stiff.h_max = 1e-2;
    EXPECT_THROW(propagate<1>([](double, const StateVector<1>& y) { return StateVector<1>{-1e6 * y[0]}; },
                              StateVector<1>{1.0}, 0.0, 1.0, std::vector<EventSpec<1>>{}, stiff),
                 StepUnderflowError);

    IntegratorSettings few;
    few.max_steps = 3;
    EXPECT_THROW(propagate<4>(two_body, kepler_ellipse(0.1, 0.0), 0.0, kTwoPi, std::vector<EventSpec<4>>{}, few),
                 MaxStepsError);
    EXPECT_THROW(propagate<4>(two_body, kepler_ellipse(0.1, 0.0), 0.0, 0.0, std::vector<EventSpec<4>>{},
                              IntegratorSettings{}),
                 std::invalid_argument);
}

TEST(LocateRoot, LinearFunction)
{
    const double tol = 1e-10;
    auto g = [](double t) { return t - 0.3; };
    EXPECT_NEAR(locate_root(g, 0.0, 1.0, g(0.0), g(1.0), tol), 0.3, tol);
    EXPECT_NEAR(locate_root(g, 1.0, 0.0, g(1.0), g(0.0), tol), 0.3, tol);
}

TEST(LocateRoot, SteepAndFlatFunctions)
{
    const double tol = 1e-12;
    auto cubic = [](double t) { return std::pow(t - 0.7, 3); };
    EXPECT_NEAR(locate_root(cubic, 0.0, 1.0, cubic(0.0), cubic(1.0), tol), 0.7, 1e-4);
    auto steep = [](double t) { return std::tanh(1e4 * (t - 0.123)); };
    EXPECT_NEAR(locate_root(steep, 0.0, 1.0, steep(0.0), steep(1.0), tol), 0.123, 1e-11);
}

TEST(LocateRoot, GrazingDoubleRootHasNoSignChange)
{
    auto dense = [](double t) { return StateVector<1>{(t - 0.5) * (t - 0.5)}; };
    auto event = [](double, const StateVector<1>& y) { return y[0]; };
    EXPECT_THROW((locate_event<1>(0.0, 1.0, event, dense, 1e-10)), NoSignChangeError);
}

TEST(Settings, ValidationAndJson)
{
    IntegratorSettings s;
    s.h_min = 1.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    IntegratorSettings t;
    t.rel_tol = 1e-10;
    t.adaptive = false;
    EXPECT_EQ(integrator_from_json(integrator_to_json(t)), t);
    EXPECT_THROW(integrator_from_json(nlohmann::json{{"tolerance", 1e-9}}), std::invalid_argument);
    EXPECT_THROW(integrator_from_json(nlohmann::json{{"max_steps", 1.5}}), std::invalid_argument);
}

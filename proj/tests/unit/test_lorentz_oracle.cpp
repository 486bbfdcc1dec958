#include "fieldline/classical_dynamics.hpp"
#include "fieldline/errors.hpp"
#include "fieldline/lorentz_oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fieldline;

namespace {

constexpr double pi = std::numbers::pi;

ParticleParams particle(double x0, double y0, double vx0, double vy0) { return {1, 1, x0, y0, vx0, vy0}; }

double positionError(const Trajectory& a, double x, double y)
{
    const auto& s = a.samples.back();
    return std::hypot(s.x - x, s.y - y);
}

}  // namespace

TEST_CASE("Lorentz acceleration")
{
    auto a0 = acceleration(makeBuiltin(BuiltinKind::ZeroField, 1), particle(0, 1, 0.3, -2), {0, 1, 0.3, -2});
    CHECK(a0[0] == 0);
    CHECK(a0[1] == 0);

    auto a1 = acceleration(makeBuiltin(BuiltinKind::Uniform, 1), particle(0, 0, 0, 1), {0, 0, 0, 1});
    CHECK(a1[0] == 1);
    CHECK(a1[1] == 0);

    auto a2 = acceleration(makeBuiltin(BuiltinKind::ExpDecay, 0.1), particle(0, 0, 1, 0), {0, 0, 1, 0});
    CHECK(a2[0] == 0);
    CHECK(a2[1] == doctest::Approx(-0.1).epsilon(1e-15));

    // charge-to-mass ratio scales the force
    ParticleParams heavy{3, 2, 0, 0, 0, 1};
    CHECK(acceleration(makeBuiltin(BuiltinKind::Uniform, 1), heavy, {0, 0, 0, 1})[0] == 1.5);

    // radial profiles see the field at r = |(x, y)|
    auto radial = makeBuiltin(BuiltinKind::RadialExp, 1);
    CHECK(fieldAt(radial, 3, 4) == doctest::Approx(evalB(radial, 5)));
}

TEST_CASE("uniform orbit closes after one cyclotron period")
{
    auto traj = integrateLorentz(makeBuiltin(BuiltinKind::Uniform, 1), particle(0, 1, 1, 0), 2 * pi, 101,
                                 {1e-3, 1e-12, 1e-14, 1'000'000});
    CHECK(positionError(traj, 0, 1) < 1e-8);
    CHECK(traj.method == Method::OdeOracle);
    CHECK(traj.samples.front().x == 0);
    CHECK(traj.samples.front().y == 1);
}

TEST_CASE("speed and gauge momentum are conserved for every profile")
{
    const double relTol = 1e-10, tEnd = 30;
    OdeSettings settings{1e-3, relTol, 1e-12, 10'000'000};
    struct Case {
        FieldProfile p;
        ParticleParams start;
    };
    const Case cases[] = {
        {makeBuiltin(BuiltinKind::Uniform, 1), particle(0, 0.5, 0.8, -0.3)},
        {makeBuiltin(BuiltinKind::ZeroField, 1), particle(0, 0, 0.6, 0.8)},
        {makeBuiltin(BuiltinKind::ExpDecay, 0.7), particle(0, -0.2, 0.9, 0.4)},
        {makeBuiltin(BuiltinKind::ExpDecay, 0.7).withAxis(GaugeAxis::X), particle(0.3, 0, 0.2, 1)},
        {makeBuiltin(BuiltinKind::RadialExp, 1), particle(1, 0.5, -0.3, 0.7)},
        {makeBuiltin(BuiltinKind::RationalAB, 1, 0.5, 2), particle(1.5, 0, 0, 0.8)},
    };
    for(const auto& cs : cases) {
        auto traj = integrateLorentz(cs.p, cs.start, tEnd, 601, settings);
        double v0 = std::hypot(cs.start.vx0, cs.start.vy0), drift = 0;
        for(const auto& s : traj.samples) drift = std::max(drift, std::fabs(std::hypot(s.vx, s.vy) - v0) / v0);
        CHECK_MESSAGE(drift < 10 * relTol * tEnd, cs.p.label() << " speed drift " << drift);
        CHECK_MESSAGE(traj.maxMomentumResidual() < 100 * relTol,
                      cs.p.label() << " momentum residual " << traj.maxMomentumResidual());
    }
}

TEST_CASE("exponential field: period of y(t) from zero crossings")
{
    MotionConstants c{std::sqrt(5.0) / 2 - 0.1, 0.1, 1};
    auto profile = makeBuiltin(BuiltinKind::ExpDecay, c.k2);
    auto p = particleFromConstants(c, profile, 1, 1, +1);
    auto dense = integrateDense(profile, p, 50, {1e-3, 1e-12, 1e-14, 10'000'000});
    double level = 0.5 * (std::log(0.44721359549995794 - 0.4) + std::log(0.44721359549995794 + 0.4));
    auto up = dense.crossings(1, level, +1);
    REQUIRE(up.size() >= 3);
    CHECK(periodFromCrossings(up) == doctest::Approx(4 * pi).epsilon(1e-8));
    CHECK(std::isnan(periodFromCrossings({1.0})));
    for(size_t i = 1; i < up.size(); i++) CHECK(dense(up[i])[3] > 0);
}

TEST_CASE("comparison of trajectories")
{
    auto profile = makeBuiltin(BuiltinKind::Uniform, 1);
    auto a = integrateLorentz(profile, particle(0, 1, 1, 0), 5, 51);
    auto same = compareTrajectories(a, a);
    CHECK(same.maxPosition == 0);
    CHECK(same.rmsPosition == 0);
    CHECK(same.samples == 51);

    auto quad = trajectoryQuadrature(particle(0, 1, 1, 0), profile, 5, 51);
    auto closed = trajectoryClosedForm(particle(0, 1, 1, 0), profile, 5, 51);
    CHECK(compareTrajectories(quad, closed).maxPosition < 1e-6);

    // different grids overlap on [0, 2]
    auto shortRun = integrateLorentz(profile, particle(0, 1, 1, 0), 2, 1001);
    auto r = compareTrajectories(shortRun, a);
    CHECK(r.samples == 1001);
    CHECK(r.maxPosition < 1e-2);

    Trajectory later = a;
    for(auto& s : later.samples) s.t += 100;
    CHECK_THROWS_AS(compareTrajectories(a, later), UsageError);
}

TEST_CASE("error falls with the tolerance")
{
    auto profile = makeBuiltin(BuiltinKind::Uniform, 1);
    auto p = particle(0, 1, 1, 0);
    const double T = 20 * pi;
    double previous = INFINITY;
    for(double tol : {1e-6, 1e-8, 1e-10}) {
        auto traj = integrateLorentz(profile, p, T, 2, {1e-3, tol, tol * 1e-2, 10'000'000});
        double err = positionError(traj, 0, 1);
        CHECK_MESSAGE(err < previous / 10, "tolerance " << tol << " error " << err);
        previous = err;
    }
}

TEST_CASE("dense solution and settings")
{
    auto dense = integrateDense(makeBuiltin(BuiltinKind::Uniform, 1), particle(0, 1, 1, 0), 7);
    CHECK(dense.tBegin() == 0);
    CHECK(dense.tEnd() == 7);
    CHECK(dense.steps() > 10);
    CHECK(dense(3.3)[0] == doctest::Approx(std::sin(3.3)).epsilon(1e-8));
    CHECK_THROWS_AS(dense(7.5), DomainError);
    CHECK_THROWS_AS(dense.crossings(4, 0), UsageError);
    auto zeros = dense.crossings(0, 0, 0);
    REQUIRE(zeros.size() == 2);
    CHECK(zeros[0] == doctest::Approx(pi).epsilon(1e-8));
    CHECK(zeros[1] == doctest::Approx(2 * pi).epsilon(1e-8));

    CHECK_THROWS_AS((OdeSettings{0, 1e-9, 1e-9, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((OdeSettings{1e-3, 1e-9, 1e-9, 0}.validate()), ConfigError);
    CHECK_THROWS_AS(integrateLorentz(makeBuiltin(BuiltinKind::Uniform, 1), particle(0, 1, 1, 0), -1, 10),
                    ConfigError);
}

TEST_CASE("running out of steps keeps the partial trajectory")
{
    try {
        integrateLorentz(makeBuiltin(BuiltinKind::Uniform, 1), particle(0, 1, 1, 0), 100, 1001,
                         {1e-3, 1e-10, 1e-12, 50});
        FAIL("expected an integration failure");
    } catch(const IntegrationFailure& e) {
        const auto& partial = e.partial();
        CHECK(partial.samples.size() > 1);
        CHECK(partial.samples.size() < 1001);
        CHECK(partial.samples.back().t < 100);
        CHECK(partial.maxEnergyResidual() < 1e-6);
    }
}

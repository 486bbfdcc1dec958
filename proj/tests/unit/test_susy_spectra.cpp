#include "fieldline/errors.hpp"
#include "fieldline/susy_spectra.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace fieldline;
using namespace fieldline::susy;
using fieldline::testing::near;

namespace {

SusyProblem problem(FieldProfile p, int m = 0, SpinBranch spin = SpinBranch::Lower)
{
    SusyProblem pr{std::move(p)};
    pr.mQuantum = m;
    pr.spin = spin;
    return pr;
}

FieldProfile uniformRadial(double b0) { return makeBuiltin(BuiltinKind::Uniform, b0).withAxis(GaugeAxis::Radial); }
FieldProfile radialExp(double b0 = 1) { return makeBuiltin(BuiltinKind::RadialExp, b0); }
FieldProfile rational() { return makeBuiltin(BuiltinKind::RationalAB, 1, 0.5, 2); }

}  // namespace

TEST_CASE("effective potential of the uniform field")
{
    const double B = 1.3;
    auto m0 = problem(uniformRadial(B), 0), m1 = problem(uniformRadial(B), -1);
    for(double r : {0.2, 1.0, 3.5}) {
        CHECK(effectivePotential(m0, r) == doctest::Approx(B * B * r * r - 2 * B - 0.25 / (r * r)));
        CHECK(effectivePotential(m1, r) == doctest::Approx(B * B * r * r - 2 * B - 2 * B + 0.75 / (r * r)));
    }
    CHECK_THROWS_AS(effectivePotential(m0, 0), DomainError);
    CHECK_THROWS_AS(effectivePotential(m0, -1), DomainError);
}

TEST_CASE("annihilation operator coefficient")
{
    CHECK(annihilationCoefficient(problem(uniformRadial(1)), 1) == 0.5);
    for(int m : {0, -1, -3}) {
        const double B = 0.8, p = std::abs(m) + 0.5;
        CHECK(std::fabs(annihilationCoefficient(problem(uniformRadial(B), m), std::sqrt(p / B))) < 1e-15);
    }
    auto rx = problem(radialExp(1), -2);
    CHECK(annihilationCoefficient(rx, 1e-6) == doctest::Approx(-2.5e6).epsilon(1e-9));
}

TEST_CASE("factorisation reproduces the potential for m <= 0 on the lower branch")
{
    fieldline::testing::Draw draw(7201);
    for(const auto& p : {uniformRadial(1.1), radialExp(0.7), rational()})
        for(int m : {0, -1, -2})
            for(int i = 0; i < 20; i++) {
                double r = draw.uniform(0.05, 6);
                auto pr = problem(p, m);
                CHECK_MESSAGE(near(factorizedPotential(pr, r), effectivePotential(pr, r), 1e-9),
                              p.label() << " m=" << m << " r=" << r);
            }
    CHECK(problem(uniformRadial(1), 1).outOfFactorizationRegime());
    CHECK(problem(uniformRadial(1), 0, SpinBranch::Upper).outOfFactorizationRegime());
    CHECK_FALSE(problem(uniformRadial(1), -1).outOfFactorizationRegime());
}

TEST_CASE("spin branches differ by the sigma_z term")
{
    for(const auto& p : {uniformRadial(0.9), radialExp(1.4), rational()})
        for(double r : {0.3, 1.0, 2.7}) {
            double B = p.b0();
            double diff = effectivePotential(problem(p, -1, SpinBranch::Upper), r) -
                          effectivePotential(problem(p, -1, SpinBranch::Lower), r);
            CHECK(near(diff, 2 * (2 * B * p.f(r) + B * r * p.fPrime(r)), 1e-12));
        }
}

TEST_CASE("zero-mode action")
{
    const double B = 1.7;
    ZeroMode uz(problem(uniformRadial(B), -1));
    CHECK(uz.p() == 1.5);
    CHECK(uz.closedFormAction());
    ZeroMode rz(problem(radialExp(B)));
    for(double r : {0.01, 0.5, 3.0, 20.0}) {
        CHECK(near(uz.action(r), B * r * r / 2, 1e-14));
        CHECK(near(rz.action(r), B * (r + std::expm1(-r)), 1e-13));
    }
    CHECK(rz.action(1e-8) < 1e-15);  // S(0) = 0
    CHECK(rz.logPsi(2) == doctest::Approx(0.5 * std::log(2.0) - B * (2 + std::exp(-2.0) - 1)));

    // no field: psi_0 = r^p
    auto none = FieldProfile::custom(GaugeAxis::Radial, 1, "none", [](double) { return 0.0; },
                                     [](double) { return 0.0; });
    ZeroMode nz(problem(none));
    CHECK_FALSE(nz.closedFormAction());
    CHECK(nz.action(5) == 0);
    CHECK(nz.logPsi(5) == doctest::Approx(0.5 * std::log(5.0)));
    CHECK(normalizability(nz).verdict == Verdict::NotNormalizable);

    // a tabulated action agrees with the closed form
    auto shape = radialExp(1);
    auto custom = FieldProfile::custom(GaugeAxis::Radial, B, "exp_custom", [shape](double r) { return shape.f(r); },
                                       [shape](double r) { return shape.fPrime(r); });
    ZeroMode cz(problem(custom));
    CHECK_FALSE(cz.closedFormAction());
    for(double r : {0.01, 0.5, 3.0, 20.0}) CHECK(near(cz.action(r), rz.action(r), 1e-9));
}

TEST_CASE("zero mode solves the first-order equation")
{
    for(const auto& p : {uniformRadial(1.2), radialExp(0.8), rational()}) {
        auto pr = problem(p, -1);
        ZeroMode zm(pr);
        for(double r : {0.4, 1.0, 2.2}) {
            const double h = 1e-5;
            double psi = std::exp(zm.logPsi(r));
            double dpsi = (std::exp(zm.logPsi(r + h)) - std::exp(zm.logPsi(r - h))) / (2 * h);
            double residual = dpsi + annihilationCoefficient(pr, r) * psi;
            CHECK_MESSAGE(std::fabs(residual) < 1e-6 * psi, p.label() << " r=" << r);
        }
    }
}

TEST_CASE("normalizability verdicts")
{
    SUBCASE("uniform field: integral of r e^{-r^2} is 1/2")
    {
        auto v = normalizability(ZeroMode(problem(uniformRadial(1))));
        CHECK(v.verdict == Verdict::Normalizable);
        CHECK(near(v.logNormValue, -std::log(2.0), 1e-10));
        REQUIRE(v.normValue);
        CHECK(near(*v.normValue, 0.5, 1e-10));
        CHECK(v.tailSlope < 0);
    }
    SUBCASE("reversed uniform field diverges")
    {
        auto v = normalizability(ZeroMode(problem(uniformRadial(-1))));
        CHECK(v.verdict == Verdict::NotNormalizable);
        CHECK_FALSE(v.normValue);
    }
    SUBCASE("radial exponential field converges (30-digit reference)")
    {
        auto v = normalizability(ZeroMode(problem(radialExp(1))));
        CHECK(v.verdict == Verdict::Normalizable);
        CHECK(near(v.logNormValue, -0.174634721635375679, 1e-10));
    }
    SUBCASE("rational profile: psi^2 ~ 1/r at the origin")
    {
        auto v = normalizability(ZeroMode(problem(rational())));
        CHECK(v.verdict == Verdict::NotNormalizable);
        CHECK(v.originLogSlope == doctest::Approx(-1).epsilon(1e-3));
    }
    SUBCASE("the verdict does not depend on the ladder base")
    {
        for(const auto& p : {uniformRadial(1), uniformRadial(-1), radialExp(1), radialExp(0.3), rational()}) {
            ZeroMode zm(problem(p));
            CHECK(normalizability(zm, 4).verdict == normalizability(zm, 3).verdict);
        }
        CHECK_THROWS_AS(normalizability(ZeroMode(problem(radialExp(1))), 1), ConfigError);
    }
    CHECK(verdictName(Verdict::Normalizable) == "NORMALIZABLE");
}

TEST_CASE("superpotential")
{
    const double B = 1.5, s2 = std::sqrt(2.0);
    auto u = problem(uniformRadial(B), -1);
    ZeroMode uz(u);
    double p = uz.p();
    for(double r : {0.3, 1.0, 4.0}) CHECK(near(superpotential(uz, u, r), (B * r - p / r) / s2, 1e-14));
    CHECK(std::fabs(superpotential(uz, u, std::sqrt(p / B))) < 1e-15);

    auto x = problem(radialExp(B));
    ZeroMode xz(x);
    for(double r : {0.3, 1.0, 4.0})
        CHECK(near(superpotential(xz, x, r), (B * (1 - std::exp(-r)) - 0.5 / r) / s2, 1e-14));

    x.hbar = 2;
    x.mass = 8;
    CHECK(near(superpotential(xz, x, 1), 2 / 4.0 * (B * (1 - std::exp(-1.0)) - 0.5), 1e-14));
}

TEST_CASE("SWKB integral")
{
    SUBCASE("uniform field closed form")
    {
        for(double B : {0.5, 1.0, 2.5})
            for(int m : {0, -2}) {
                auto pr = problem(uniformRadial(B), m);
                SwkbIntegral I(pr);
                CHECK(I(I.wellMinimum()) == 0);
                CHECK(I(I.wellMinimum() - 1) == 0);
                for(double E : {0.1, 1.0, 7.5})
                    CHECK_MESSAGE(std::fabs(I(E) - swkbUniformClosedForm(pr, E)) < 1e-9, "B=" << B << " E=" << E);
            }
        CHECK_THROWS_AS(swkbUniformClosedForm(problem(radialExp(1)), 1), DomainError);
    }
    SUBCASE("monotone on a grid of energies")
    {
        SwkbIntegral I(problem(radialExp(1)));
        double prev = -1;
        for(int k = 0; k <= 60; k++) {
            double E = I.wellMinimum() + k * (I.continuumThreshold() - I.wellMinimum()) / 62;
            double v = I(E);
            CHECK(v > prev);
            prev = v;
        }
        CHECK(I.continuumThreshold() == doctest::Approx(0.5));
        CHECK_THROWS_AS(I(0.6), DomainError);
        auto tp = I.turningPoints(0.3);
        CHECK(tp.first < I.wellBottom());
        CHECK(tp.second > I.wellBottom());
        CHECK(near(I.w2(tp.first), 0.3, 1e-10));
        CHECK(near(I.w2(tp.second), 0.3, 1e-10));
    }
    SUBCASE("no well without a field")
    {
        // W = -p / (sqrt(2) r): W^2 falls monotonically
        auto none = FieldProfile::custom(GaugeAxis::Radial, 1, "none", [](double) { return 0.0; },
                                         [](double) { return 0.0; });
        CHECK_THROWS_AS((SwkbIntegral(problem(none))), DomainError);
    }
    SUBCASE("a reversed field still has a well")
    {
        // W^2 = (r + p/r)^2 / 2 has its minimum 2p at r = sqrt(p), although psi_0 diverges
        SwkbIntegral I(problem(uniformRadial(-1)));
        CHECK(I.wellMinimum() == doctest::Approx(1.0));
        CHECK(I.wellBottom() == doctest::Approx(std::sqrt(0.5)));
    }
}

TEST_CASE("SWKB levels")
{
    SUBCASE("uniform field: E_n = (2n + 1) B")
    {
        const double B = 1.4;
        auto s = swkbLevels(problem(uniformRadial(B)), 5);
        REQUIRE(s.levels.size() == 6);
        for(const auto& l : s.levels) {
            CHECK(near(l.energy, (2 * l.n + 1) * B, 1e-9));
            CHECK(l.residual < 1e-8);
        }
        auto integer = swkbLevels(problem(uniformRadial(B)), 3, QuantizationConvention::Integer);
        CHECK(integer.convention == QuantizationConvention::Integer);
        CHECK(integer.levels[0].energy == doctest::Approx(0).scale(1));
        CHECK(near(integer.levels[2].energy, 4 * B, 1e-9));
    }
    SUBCASE("radial exponential field (30-digit reference)")
    {
        auto s = swkbLevels(problem(radialExp(1)), 1);
        REQUIRE(s.levels.size() == 2);
        CHECK(near(s.levels[0].energy, 0.33765891217916099, 1e-9));
        CHECK(near(s.levels[1].energy, 0.46637574357479635, 1e-9));
    }
    SUBCASE("strictly increasing, small residuals")
    {
        for(const auto& p : {uniformRadial(1), radialExp(4)}) {
            auto s = swkbLevels(problem(p), 5);
            REQUIRE(s.levels.size() == 6);
            for(size_t i = 0; i < s.levels.size(); i++) {
                CHECK(s.levels[i].residual < 1e-8);
                if(i) CHECK(s.levels[i].energy > s.levels[i - 1].energy);
            }
        }
    }
    SUBCASE("a double well is refused")
    {
        CHECK_THROWS_AS(swkbLevels(problem(rational()), 3), DomainError);
    }
    CHECK_THROWS_AS(swkbLevels(problem(uniformRadial(1)), -1), ConfigError);
}

TEST_CASE("published statements for the built-in radial fields")
{
    CHECK(publishedUnbroken(uniformRadial(1)) == true);
    CHECK(publishedUnbroken(radialExp(1)) == false);
    CHECK(publishedUnbroken(rational()) == true);
    CHECK_FALSE(publishedUnbroken(uniformRadial(-1)).has_value());
}

TEST_CASE("problem validation and output tables")
{
    CHECK_THROWS_AS(problem(makeBuiltin(BuiltinKind::ExpDecay, 1)).validate(), ConfigError);
    auto bad = problem(radialExp(1));
    bad.hbar = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    auto pr = problem(radialExp(1));
    ZeroMode zm(pr);
    std::string zcsv = zeroModeCsv(zm, pr, 0.1, 2, 5);
    CHECK(zcsv.rfind("r,log_psi,W\n", 0) == 0);
    CHECK(std::count(zcsv.begin(), zcsv.end(), '\n') == 6);
    CHECK_THROWS_AS(zeroModeCsv(zm, pr, 0, 2, 5), ConfigError);

    std::string scsv = spectrumCsv(swkbLevels(pr, 2));
    CHECK(scsv.rfind("n,E_n,residual\n", 0) == 0);

    std::string json = verdictJson(pr, normalizability(zm));
    for(const char* key : {"\"verdict\"", "\"norm_value\"", "\"tail_report\"", "\"paper_claim_agrees\""})
        CHECK_MESSAGE(json.find(key) != std::string::npos, key);
}

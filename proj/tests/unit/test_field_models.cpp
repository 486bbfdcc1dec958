#include "fieldline/errors.hpp"
#include "fieldline/field_models.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace fieldline;
using fieldline::testing::Draw;
using fieldline::testing::near;

namespace {

FieldProfile expDecay(double b0 = 1) { return makeBuiltin(BuiltinKind::ExpDecay, b0); }

/// d/du [u f(u)] by a fourth-order central difference
double productRuleFd(const FieldProfile& p, double u, double h = 1e-3)
{
    auto uf = [&](double s) { return s * p.f(s); };
    return (-uf(u + 2 * h) + 8 * uf(u + h) - 8 * uf(u - h) + uf(u - 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("built-in shapes evaluate to their closed forms")
{
    CHECK(makeBuiltin(BuiltinKind::Uniform, 1).f(3.7) == 1);
    CHECK(makeBuiltin(BuiltinKind::Uniform, 1).fPrime(-2) == 0);
    CHECK(expDecay().f(0) == 1);
    CHECK(expDecay().f(1) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(expDecay().f(1) == doctest::Approx(0.63212055882855767).epsilon(1e-15));
    CHECK(makeBuiltin(BuiltinKind::ZeroField, 1).f(4) == 0.25);

    auto rational = makeBuiltin(BuiltinKind::RationalAB, 1, 0.5, 2);
    CHECK(rational.axis() == GaugeAxis::Radial);
    CHECK(rational.f(1) == doctest::Approx((1 - 0.5) * (1 - 2)));
    CHECK(rational.f(3) == doctest::Approx(2.5 / 9));

    auto radial = makeBuiltin(BuiltinKind::RadialExp, 2);
    CHECK(radial.axis() == GaugeAxis::Radial);
    CHECK(radial.b0() == 2);
    CHECK(radial.f(0.7) == expDecay().f(0.7));
}

TEST_CASE("profiles are addressable by name")
{
    CHECK(makeBuiltin("exp_decay", 1).kind() == ProfileKind::ExpDecay);
    CHECK(makeBuiltin("zero_field", 1).kind() == ProfileKind::ZeroField);
    CHECK(makeBuiltin("rational_ab", 1, 1, 2).kind() == ProfileKind::RationalAB);
    CHECK_THROWS_AS(makeBuiltin("dipole", 1), ConfigError);
    CHECK_THROWS_AS(makeBuiltin(BuiltinKind::Uniform, NAN), ConfigError);
    CHECK(parseAxis("radial") == GaugeAxis::Radial);
    CHECK(axisName(GaugeAxis::X) == "x");
    CHECK_THROWS_AS(parseAxis("z"), ConfigError);
}

TEST_CASE("physical field of the built-ins")
{
    CHECK(evalB(makeBuiltin(BuiltinKind::ZeroField, 1), 2.0) == 0);
    CHECK(evalB(makeBuiltin(BuiltinKind::ZeroField, 3), -0.5) == 0);
    const double B = 0.7;
    for(double y : {-3.0, -1e-6, 0.0, 1e-5, 0.5, 4.0})
        CHECK(evalB(expDecay(B), y) == doctest::Approx(B * std::exp(-y)).epsilon(1e-14));
    for(double u : {-10.0, 0.0, 2.5}) CHECK(evalB(makeBuiltin(BuiltinKind::Uniform, B), u) == B);
}

TEST_CASE("singular points raise domain errors")
{
    CHECK_THROWS_AS(makeBuiltin(BuiltinKind::ZeroField, 1).f(0), DomainError);
    CHECK_THROWS_AS(evalB(makeBuiltin(BuiltinKind::RationalAB, 1, 0.5, 2), 0), DomainError);
}

TEST_CASE("series branch of (1 - e^-u)/u joins the direct branch")
{
    auto p = expDecay();
    const double eps = 1e-4;
    for(double u : {eps, -eps}) {
        double inside = p.f(std::nextafter(u, 0.0));
        double outside = p.f(std::nextafter(u, 2 * u));
        CHECK(std::fabs(inside - outside) < 1e-12);
        double inD = p.fPrime(std::nextafter(u, 0.0));
        double outD = p.fPrime(std::nextafter(u, 2 * u));
        CHECK(std::fabs(inD - outD) < 1e-9);
    }
    CHECK(p.fPrime(0) == doctest::Approx(-0.5));
}

TEST_CASE("f' agrees with finite differences of f at random points")
{
    Draw draw(7001);
    const FieldProfile profiles[] = {makeBuiltin(BuiltinKind::Uniform, 1), makeBuiltin(BuiltinKind::ZeroField, 1),
                                     expDecay(), makeBuiltin(BuiltinKind::RadialExp, 1),
                                     makeBuiltin(BuiltinKind::RationalAB, 1, 0.5, 2)};
    for(const auto& p : profiles) {
        for(int i = 0; i < 50; i++) {
            double u = draw.uniform(0.2, 6) * (p.axis() == GaugeAxis::Radial ? 1 : draw.sign());
            double h = 1e-4 * std::max(1.0, std::fabs(u));
            double fd = (p.f(u + h) - p.f(u - h)) / (2 * h);
            CHECK_MESSAGE(near(fd, p.fPrime(u), 1e-6), p.label() << " at u = " << u);
        }
    }
}

TEST_CASE("field equals the derivative of u f(u)")
{
    Draw draw(7002);
    const FieldProfile profiles[] = {makeBuiltin(BuiltinKind::Uniform, 2), makeBuiltin(BuiltinKind::ZeroField, 2),
                                     expDecay(2), makeBuiltin(BuiltinKind::RationalAB, 2, 1, 3)};
    for(const auto& p : profiles) {
        for(int i = 0; i < 40; i++) {
            double u = draw.uniform(0.3, 5);
            CHECK_MESSAGE(std::fabs(evalB(p, u) / p.b0() - productRuleFd(p, u)) < 1e-6, p.label() << " at " << u);
        }
    }
}

TEST_CASE("inverting a field shape")
{
    SUBCASE("exponential field, finite at the origin")
    {
        auto p = profileFromField([](double y) { return std::exp(-y); }, 0, GaugeAxis::Y);
        for(double y : {-2.0, 0.0, 1e-7, 0.3, 1.0, 5.0})
            CHECK(near(p.f(y), expDecay().f(y), 1e-10));
        CHECK(near(evalB(p, 0.8), std::exp(-0.8), 1e-10));
    }
    SUBCASE("unit field gives the unit shape")
    {
        auto p = profileFromField([](double) { return 1.0; }, 0, GaugeAxis::Y);
        for(double y : {-3.0, 0.0, 2.0}) CHECK(near(p.f(y), 1, 1e-13));
    }
    SUBCASE("linear field 2y gives f = y")
    {
        auto p = profileFromField([](double y) { return 2 * y; }, 0, GaugeAxis::X);
        for(double y : {-1.5, 0.25, 3.0}) {
            CHECK(near(p.f(y), y, 1e-12));
            CHECK(near(p.fPrime(y), 1, 1e-9));
        }
    }
    SUBCASE("the integration constant adds c/u")
    {
        auto p = profileFromField([](double) { return 0.0; }, 1, GaugeAxis::Y);
        CHECK(near(p.f(4), 0.25, 1e-14));
        CHECK(evalB(p, 4) == doctest::Approx(0).scale(1));
    }
    SUBCASE("closed-form antiderivative replaces the quadrature")
    {
        auto p = profileFromField([](double y) { return std::exp(-y); }, 0, GaugeAxis::Y, 1, 0,
                                  [](double y) { return -std::expm1(-y); });
        CHECK(near(p.f(2), expDecay().f(2), 1e-15));
    }
    SUBCASE("non-integrable shapes are reported")
    {
        auto p = profileFromField([](double u) { return 1 / (u * u); }, 0, GaugeAxis::Y);
        CHECK_THROWS_AS(p.f(1), NumericError);
    }
}

TEST_CASE("round trip: field of every built-in inverts back to its shape")
{
    struct Case {
        FieldProfile p;
        double c, anchor, lo, hi;
    };
    auto rational = makeBuiltin(BuiltinKind::RationalAB, 1, 0.5, 2);
    const Case cases[] = {
        {makeBuiltin(BuiltinKind::Uniform, 1), 0, 0, -5, 5},
        {makeBuiltin(BuiltinKind::ZeroField, 1), 1, 0, 0.1, 5},
        {expDecay(), 0, 0, -3, 6},
        {makeBuiltin(BuiltinKind::RadialExp, 1), 0, 0, 0.01, 8},
        // (u f)' = 1 - ab/u^2 is not integrable at 0, anchor the integral at u = 1
        {rational, rational.uf(1), 1, 0.05, 8},
    };
    for(const auto& cs : cases) {
        const FieldProfile& p = cs.p;
        auto inv = profileFromField([&p](double u) { return evalB(p, u) / p.b0(); }, cs.c, p.axis(), p.b0(),
                                    cs.anchor);
        double worst = 0;
        for(int i = 0; i < 100; i++) {
            double u = cs.lo + (cs.hi - cs.lo) * (i + 0.5) / 100;
            if(std::fabs(u) < 1e-3) continue;
            worst = std::max(worst, std::fabs(inv.f(u) - p.f(u)) / std::max(std::fabs(p.f(u)), 1e-300));
        }
        CHECK_MESSAGE(worst < 1e-8, p.label() << " relative error " << worst);
    }
}

TEST_CASE("tabulated shapes")
{
    std::vector<double> u, f;
    for(int i = 0; i <= 200; i++) {
        u.push_back(-2 + i * 0.05);
        f.push_back(expDecay().f(u.back()));
    }
    auto p = profileFromTable(u, f, GaugeAxis::Y, 1.5);
    CHECK(p.kind() == ProfileKind::Table);
    CHECK(p.b0() == 1.5);
    CHECK(near(p.f(0.525), expDecay().f(0.525), 1e-6));
    CHECK(near(evalB(p, 1.0) / 1.5, std::exp(-1.0), 1e-4));
    CHECK_THROWS_AS(p.f(9), DomainError);
    CHECK_THROWS_AS(profileFromTable({0, 1}, {1, 1}, GaugeAxis::Y, 1), ConfigError);
}

TEST_CASE("CSV tables")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "fieldline_unit_tables";
    fs::create_directories(dir);
    {
        std::ofstream(dir / "good.csv") << "u,f\n0,1\n1,2\n2,3\n3,4\n";
        std::ofstream(dir / "bad_header.csv") << "x,f\n0,1\n";
        std::ofstream(dir / "bad_row.csv") << "u,f\n0,1\n1,two\n";
    }
    std::vector<double> a, b;
    readTwoColumnCsv((dir / "good.csv").string(), "u", "f", a, b);
    CHECK(a == std::vector<double>{0, 1, 2, 3});
    CHECK(b == std::vector<double>{1, 2, 3, 4});
    CHECK_THROWS_AS(readTwoColumnCsv((dir / "bad_header.csv").string(), "u", "f", a, b), ConfigError);
    CHECK_THROWS_AS(readTwoColumnCsv((dir / "bad_row.csv").string(), "u", "f", a, b), ConfigError);
    CHECK_THROWS_AS(readTwoColumnCsv((dir / "absent.csv").string(), "u", "f", a, b), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("field table text")
{
    std::string csv = fieldTableCsv(makeBuiltin(BuiltinKind::ZeroField, 1), -1, 1, 3);
    CHECK(csv.rfind("u,f,f_prime,B\n", 0) == 0);
    CHECK(csv.find("nan") != std::string::npos);  // f = 1/u at u = 0
    CHECK_THROWS_AS(fieldTableCsv(expDecay(), 1, 0, 10), ConfigError);
}

TEST_CASE("axis and scale variants share the shape")
{
    auto p = expDecay(1);
    auto q = p.withAxis(GaugeAxis::X).withScale(3);
    CHECK(q.axis() == GaugeAxis::X);
    CHECK(q.b0() == 3);
    CHECK(q.f(1.1) == p.f(1.1));
    CHECK(evalB(q, 1.1) == doctest::Approx(3 * evalB(p, 1.1)));
    CHECK(p.axis() == GaugeAxis::Y);
}

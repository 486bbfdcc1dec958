#include "fieldline/errors.hpp"
#include "fieldline/numerics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace fieldline;
using fieldline::testing::near;

TEST_CASE("adaptive quadrature of smooth integrands")
{
    CHECK(near(math::integrateAdaptive([](double x) { return x * x * x; }, 0, 1), 0.25, 1e-14));
    CHECK(near(math::integrateAdaptive([](double x) { return std::sin(x); }, 0, std::numbers::pi), 2.0, 1e-13));
    double err = -1;
    double v = math::integrateAdaptive([](double x) { return std::exp(-x * x); }, -8, 8, 1e-12, &err);
    CHECK(near(v, std::sqrt(std::numbers::pi), 1e-12));
    CHECK(err >= 0);
    CHECK(err < 1e-10);
}

TEST_CASE("adaptive quadrature reports non-finite integrands")
{
    CHECK_THROWS_AS(math::integrateAdaptive([](double) { return NAN; }, 0, 1), NumericError);
}

TEST_CASE("Gauss-Legendre rule is exact for polynomials of moderate degree")
{
    double v = math::integrateGauss([](double x) { return std::pow(x, 20) - 3 * std::pow(x, 7); }, -1, 2);
    double exact = (std::pow(2.0, 21) + 1) / 21 - 3 * (std::pow(2.0, 8) - 1) / 8;
    CHECK(near(v, exact, 1e-13));
}

TEST_CASE("bisection and golden-section search")
{
    double r = math::bisect([](double x) { return x * x - 2; }, 0, 2);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(math::bisect([](double x) { return x - 1; }, 1, 3) == 1);

    double m = math::goldenMinimize([](double x) { return (x - 0.3) * (x - 0.3) + 1; }, -2, 2);
    CHECK(std::fabs(m - 0.3) < 1e-7);
}

TEST_CASE("cumulative Simpson integral on uniform and graded grids")
{
    std::vector<double> t, y;
    for(int i = 0; i <= 400; i++) {
        t.push_back(i * 0.01);
        y.push_back(std::cos(t.back()));
    }
    auto c = math::cumulativeSimpson(t, y);
    REQUIRE(c.size() == t.size());
    CHECK(c.front() == 0);
    double worst = 0;
    for(size_t i = 0; i < t.size(); i++) worst = std::max(worst, std::fabs(c[i] - std::sin(t[i])));
    CHECK(worst < 1e-9);

    // graded grid, quadratic data is integrated exactly
    t.clear();
    y.clear();
    for(int i = 0; i <= 50; i++) {
        double s = i / 50.0;
        t.push_back(s * s * 3);
        y.push_back(1 + 2 * t.back() - t.back() * t.back());
    }
    c = math::cumulativeSimpson(t, y);
    double T = t.back();
    CHECK(near(c.back(), T + T * T - T * T * T / 3, 1e-12));
}

TEST_CASE("monotone cubic interpolation")
{
    std::vector<double> x{0, 1, 2, 3, 4, 5}, y{0, 0.1, 0.15, 2, 2.01, 5};
    math::MonotoneCubic p(x, y);
    CHECK(p(0) == 0);
    CHECK(p(5) == 5);
    CHECK(p(2) == doctest::Approx(0.15));
    double prev = -1;
    for(int i = 0; i <= 1000; i++) {
        double v = p(i * 0.005);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(p(5.5), DomainError);
    CHECK_THROWS_AS(p(-0.1), DomainError);

    // straight lines are reproduced, including the derivative
    math::MonotoneCubic line({0, 0.5, 2, 3}, {1, 2, 5, 7});
    CHECK(line(1.3) == doctest::Approx(3.6).epsilon(1e-14));
    CHECK(line.derivative(2.7) == doctest::Approx(2).epsilon(1e-14));
}

TEST_CASE("doubles are printed with enough digits to round-trip")
{
    for(double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, std::numbers::pi}) {
        std::string s = math::formatDouble(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("atomic writes replace the target and leave no temporaries")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "fieldline_unit_atomic";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string path = (dir / "out.txt").string();
    math::writeFileAtomic(path, "first\n");
    math::writeFileAtomic(path, "second\n");
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "second\n");
    size_t files = 0;
    for([[maybe_unused]] auto& entry : fs::directory_iterator(dir)) files++;
    CHECK(files == 1);
    math::writeFileAtomic((dir / "nested" / "x.txt").string(), "x");
    CHECK(fs::exists(dir / "nested" / "x.txt"));
    // a regular file where a directory is needed
    CHECK_THROWS_AS(math::writeFileAtomic((dir / "out.txt" / "x.txt").string(), "x"), IoError);
    fs::remove_all(dir);
}

#include "fieldline/classical_dynamics.hpp"
#include "fieldline/trajectory.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <sstream>

using namespace fieldline;

namespace {

Trajectory circle()
{
    return trajectoryQuadrature({1, 1, 0, 1, 1, 0}, makeBuiltin(BuiltinKind::Uniform, 1), 3, 4);
}

}  // namespace

TEST_CASE("trajectory CSV")
{
    std::string csv = trajectoryCsv(circle());
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,vx,vy,energy_residual,momentum_residual");
    int rows = 0;
    while(std::getline(in, line)) {
        rows++;
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    CHECK(rows == 4);
    // the first sample reproduces the initial conditions exactly
    CHECK(csv.find("\n0,0,1,1,0,") != std::string::npos);
}

TEST_CASE("trajectory JSON")
{
    auto traj = circle();
    auto j = nlohmann::json::parse(trajectoryJson(traj));
    CHECK(j["metadata"]["profile"] == "uniform");
    CHECK(j["metadata"]["method"] == methodName(Method::Quadrature));
    CHECK(j["metadata"]["constants"]["k3"] == 1.0);
    for(const char* column : {"t", "x", "y", "vx", "vy", "energy_residual", "momentum_residual"})
        CHECK_MESSAGE(j["samples"][column].size() == 4, column);
    CHECK(j["samples"]["t"][3] == 3.0);
}

TEST_CASE("trajectory samples increase in time")
{
    auto traj = circle();
    for(size_t i = 1; i < traj.samples.size(); i++) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
}

#include "fieldline/trajectory.hpp"
#include "fieldline/errors.hpp"
#include "fieldline/numerics.hpp"

#include <json.hpp>

#include <algorithm>

namespace fieldline {

void ParticleParams::validate() const
{
    for(double v : {q, m, x0, y0, vx0, vy0})
        if(!std::isfinite(v))
            throw ConfigError("particle parameters must be finite");
    if(!(m > 0))
        throw ConfigError("particle mass must be positive");
}

std::string methodName(Method method)
{
    switch(method) {
        case Method::Quadrature: return "quadrature";
        case Method::ClosedForm: return "closed-form";
        case Method::OdeOracle: return "ode";
    }
    return "?";
}

double Trajectory::maxEnergyResidual() const
{
    double m = 0;
    for(const Sample& s : samples) m = std::max(m, s.energyResidual);
    return m;
}

double Trajectory::maxMomentumResidual() const
{
    double m = 0;
    for(const Sample& s : samples) m = std::max(m, s.momentumResidual);
    return m;
}

double gaugeMomentum(const FieldProfile& profile, double k2, double x, double y, double vx, double vy)
{
    switch(profile.axis()) {
    case GaugeAxis::Y:
        return vx - k2 * profile.uf(y);
    case GaugeAxis::X:
        return vy + k2 * profile.uf(x);
    case GaugeAxis::Radial: {
        // d/dt (x vy - y vx) = -k2 r (u f)'(r) dr/dt, and r (u f)' integrates to r u f - int u f
        double r = std::hypot(x, y);
        double flux = profile.hasRadialAction()
                          ? profile.radialAction(r)
                          : math::integrateAdaptive([&](double s) { return profile.uf(s); }, 0, r, 1e-13);
        return x * vy - y * vx + k2 * (r * profile.uf(r) - flux);
    }
    }
    return NAN;
}

void fillDiagnostics(Trajectory& trajectory, const FieldProfile& profile)
{
    const MotionConstants& c = trajectory.constants;
    const double scale = std::max(c.k3, 1e-12);
    for(Sample& s : trajectory.samples) {
        s.energyResidual = std::fabs(s.vx * s.vx + s.vy * s.vy - c.k3) / scale;
        s.momentumResidual = std::fabs(gaugeMomentum(profile, c.k2, s.x, s.y, s.vx, s.vy) - c.k1);
    }
}

std::string trajectoryCsv(const Trajectory& trajectory)
{
    using math::formatDouble;
    std::string out = "t,x,y,vx,vy,energy_residual,momentum_residual\n";
    out.reserve(out.size() + trajectory.samples.size() * 170);
    for(const Sample& s : trajectory.samples) {
        out += formatDouble(s.t) + ',' + formatDouble(s.x) + ',' + formatDouble(s.y) + ',' +
               formatDouble(s.vx) + ',' + formatDouble(s.vy) + ',' + formatDouble(s.energyResidual) + ',' +
               formatDouble(s.momentumResidual) + '\n';
    }
    return out;
}

std::string trajectoryJson(const Trajectory& trajectory)
{
    using nlohmann::ordered_json;
    ordered_json meta;
    meta["profile"] = trajectory.profileLabel;
    meta["axis"] = axisName(trajectory.axis);
    meta["b0"] = trajectory.b0;
    meta["method"] = methodName(trajectory.method);
    meta["constants"] = {{"k1", trajectory.constants.k1}, {"k2", trajectory.constants.k2},
                         {"k3", trajectory.constants.k3}};
    const ParticleParams& p = trajectory.particle;
    meta["particle"] = {{"q", p.q}, {"m", p.m}, {"x0", p.x0}, {"y0", p.y0}, {"vx0", p.vx0}, {"vy0", p.vy0}};
    ordered_json tol = ordered_json::object();
    for(const auto& [name, value] : trajectory.tolerances) tol[name] = value;
    meta["tolerances"] = tol;
    if(trajectory.orbit.bounded)
        meta["orbit"] = {{"bounded", true}, {"lower_turning_point", trajectory.orbit.lower},
                         {"upper_turning_point", trajectory.orbit.upper}, {"period", trajectory.orbit.period}};
    else
        meta["orbit"] = {{"bounded", false}};
    meta["max_energy_residual"] = trajectory.maxEnergyResidual();
    meta["max_momentum_residual"] = trajectory.maxMomentumResidual();

    ordered_json cols;
    auto column = [&](const char* name, double Sample::*field) {
        ordered_json arr = ordered_json::array();
        for(const Sample& s : trajectory.samples) arr.push_back(s.*field);
        cols[name] = std::move(arr);
    };
    column("t", &Sample::t);
    column("x", &Sample::x);
    column("y", &Sample::y);
    column("vx", &Sample::vx);
    column("vy", &Sample::vy);
    column("energy_residual", &Sample::energyResidual);
    column("momentum_residual", &Sample::momentumResidual);

    ordered_json doc;
    doc["metadata"] = std::move(meta);
    doc["samples"] = std::move(cols);
    return doc.dump(2) + "\n";
}

void writeTrajectoryCsv(const Trajectory& trajectory, const std::string& path)
{
    math::writeFileAtomic(path, trajectoryCsv(trajectory));
}

void writeTrajectoryJson(const Trajectory& trajectory, const std::string& path)
{
    math::writeFileAtomic(path, trajectoryJson(trajectory));
}

}  // namespace fieldline

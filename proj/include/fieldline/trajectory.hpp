#pragma once

#include "fieldline/field_models.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace fieldline {

/// initial data of a planar charged particle (no motion along z)
struct ParticleParams {
    double q = 1, m = 1;
    double x0 = 0, y0 = 0;
    double vx0 = 0, vy0 = 0;

    /// m > 0 and every field finite, else ConfigError
    void validate() const;
};

/** First integrals per unit mass.
    k1: conserved canonical momentum of the cyclic coordinate (angular momentum for Radial),
    k2: q b0 / m, k3: vx^2 + vy^2 = 2H/m. */
struct MotionConstants {
    double k1 = 0, k2 = 0, k3 = 0;
};

enum class Method { Quadrature, ClosedForm, OdeOracle };
std::string methodName(Method method);

struct Sample {
    double t, x, y, vx, vy;
    double energyResidual = 0, momentumResidual = 0;
};

/// turning points of the gauge coordinate and the period, when the motion is bounded
struct OrbitInfo {
    bool bounded = false;
    double lower = NAN, upper = NAN;
    double period = NAN;
};

struct Trajectory {
    Method method = Method::Quadrature;
    std::vector<Sample> samples;

    // metadata
    std::string profileLabel;
    GaugeAxis axis = GaugeAxis::Y;
    double b0 = 0;
    ParticleParams particle;
    MotionConstants constants;
    OrbitInfo orbit;
    std::vector<std::pair<std::string, double>> tolerances;

    double maxEnergyResidual() const;
    double maxMomentumResidual() const;
};

/// canonical momentum per unit mass of the cyclic coordinate at a phase-space point
double gaugeMomentum(const FieldProfile& profile, double k2, double x, double y, double vx, double vy);

/// fill energyResidual = |v^2 - k3| / max(k3, 1e-12) and
/// momentumResidual = |gauge momentum - k1| for every sample
void fillDiagnostics(Trajectory& trajectory, const FieldProfile& profile);

/// CSV with header t,x,y,vx,vy,energy_residual,momentum_residual (17 significant digits)
std::string trajectoryCsv(const Trajectory& trajectory);
/// JSON: {"metadata": {...}, "samples": {column name: [values]}}
std::string trajectoryJson(const Trajectory& trajectory);

void writeTrajectoryCsv(const Trajectory& trajectory, const std::string& path);
void writeTrajectoryJson(const Trajectory& trajectory, const std::string& path);

}  // namespace fieldline

#pragma once

#include "fieldline/errors.hpp"
#include "fieldline/field_models.hpp"
#include "fieldline/trajectory.hpp"

#include <array>
#include <vector>

/** Direct integration of the planar Newton-Lorentz equations
        dv/dt = (q/m) v x (Bz e_z)
    with an adaptive Dormand-Prince 5(4) scheme. It never touches the first integrals
    used by the quadrature, so it serves as an independent reference. */
namespace fieldline {

struct OdeSettings {
    double dtInitial = 1e-3;
    double relTol = 1e-10;
    double absTol = 1e-12;
    size_t maxSteps = 20'000'000;

    /// positive tolerances and step, nonzero step budget; ConfigError otherwise
    void validate() const;
};

/// (x, y, vx, vy)
using PlaneState = std::array<double, 4>;

/// Bz at a point of the plane: the gauge coordinate is y, x or r = hypot(x, y) by axis
double fieldAt(const FieldProfile& profile, double x, double y);

/// (ax, ay) = (q/m) (vy Bz, -vx Bz)
std::array<double, 2> acceleration(const FieldProfile& profile, const ParticleParams& params,
                                   const PlaneState& state);

/// accepted steps of an integration with cubic Hermite interpolation between them.
/// An optional per-step correction (the Dormand-Prince continuous extension) lifts
/// the interpolant from third to fourth order.
class DenseSolution {
public:
    /// `correction` belongs to the step ending at this node
    void append(double t, const PlaneState& state, const PlaneState& derivative, const PlaneState& correction = {});

    double tBegin() const { return t_.front(); }
    double tEnd() const { return t_.back(); }
    size_t steps() const { return t_.empty() ? 0 : t_.size() - 1; }
    bool empty() const { return t_.empty(); }

    /// interpolated state; DomainError outside [tBegin, tEnd]
    PlaneState operator()(double t) const;

    /// times where component `index` crosses `level`, refined by bisection on the interpolant.
    /// direction > 0 keeps upward crossings only, < 0 downward only, 0 both.
    std::vector<double> crossings(size_t index, double level, int direction = 0) const;

private:
    std::vector<double> t_;
    std::vector<PlaneState> y_, dy_, corr_;
};

/// raised when the step size underflows or the step budget runs out; carries what was computed
class IntegrationFailure : public NumericError {
public:
    IntegrationFailure(const std::string& message, Trajectory partial)
        : NumericError(message), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

/// dense solution on [0, tEnd]
DenseSolution integrateDense(const FieldProfile& profile, const ParticleParams& params, double tEnd,
                             const OdeSettings& settings = {});

/// samples at nSamples uniform times in [0, tEnd] from the dense solution, with diagnostics
Trajectory integrateLorentz(const FieldProfile& profile, const ParticleParams& params, double tEnd,
                            size_t nSamples, const OdeSettings& settings = {});

/// mean spacing of successive same-direction crossings; NaN with fewer than two crossings
double periodFromCrossings(const std::vector<double>& times);

struct DeviationReport {
    double maxPosition = 0;
    double rmsPosition = 0;
    double maxEnergyResidualDiff = 0;
    double timeOfMax = 0;
    size_t samples = 0;
};

/** Position deviation of b from a on a's time grid (restricted to the overlap).
    When the grids differ, b is interpolated linearly in time.
    UsageError if the time ranges do not overlap. */
DeviationReport compareTrajectories(const Trajectory& a, const Trajectory& b);

}  // namespace fieldline

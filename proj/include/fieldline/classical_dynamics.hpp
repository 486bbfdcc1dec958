#pragma once

#include "fieldline/field_models.hpp"
#include "fieldline/trajectory.hpp"

#include <optional>
#include <vector>

/** Planar motion in fields B_z = b0 (u f(u))' via the first integrals of the
    Landau-gauge Lagrangian.

    Writing u for the gauge coordinate (y for GaugeAxis::Y, x for GaugeAxis::X) and
    w for the cyclic one, both gauges reduce to
        dw/dt = k1 + kappa * u f(u),     (du/dt)^2 = g(u) = k3 - (k1 + kappa * u f(u))^2
    with kappa = +k2 for the y gauge and kappa = -k2 for the x gauge.
    The trajectory follows from t(u) = integral du / sqrt(g(u)). */
namespace fieldline {

/// k1 from the gauge momentum, k2 = q b0 / m, k3 = |v0|^2.
/// For GaugeAxis::Radial k1 is the canonical angular momentum per unit mass.
MotionConstants deriveConstants(const ParticleParams& params, const FieldProfile& profile);

/// +k2 for the y gauge, -k2 for the x gauge (sign of the u f(u) term in dw/dt)
double gaugeCoupling(const MotionConstants& constants, const FieldProfile& profile);

/// g(u) = k3 - (k1 + kappa u f(u))^2
double radicand(const MotionConstants& constants, const FieldProfile& profile, double u);

/// dg/du = -2 (k1 + kappa u f) kappa (u f)'
double radicandDerivative(const MotionConstants& constants, const FieldProfile& profile, double u);

enum class RootKind { Simple, Double };

struct TurningPoint {
    double u;
    RootKind kind;
    int signLeft, signRight;  ///< sign of g just left / right of the root
};

struct TurningPointScan {
    std::vector<TurningPoint> roots;
    bool degenerate = false;           ///< at least one double root (infinite-period separatrix)
    bool unboundedOrForbidden = false; ///< no root at all in the bracket
};

/// all roots of g in [lo, hi]; sign changes refined by bisection to machine precision,
/// touching zeros detected as double roots
TurningPointScan turningPoints(const MotionConstants& constants, const FieldProfile& profile,
                               double lo, double hi, size_t cells = 4096);

struct QuadratureSettings {
    double tolerance = 1e-10;   ///< absolute tolerance of the adaptive pieces
    size_t nodesPerLeg = 512;   ///< interpolation nodes per monotone leg
};

/** Trajectory from inverting t(u) = integral du/sqrt(g).
    Each monotone stretch of u between turning points is parametrised as
    u = a + (b - a) sin^2(s), which removes the inverse-square-root endpoint
    singularities; unbounded stretches use u = p +/- s^2. Samples are returned
    at n uniform times in [0, tEnd].
    Errors: DomainError when the start is classically forbidden or the axis is not
    a Landau gauge; NumericError when a degenerate (double) turning point lies within reach. */
Trajectory trajectoryQuadrature(const ParticleParams& params, const FieldProfile& profile, double tEnd,
                                size_t nSamples, const QuadratureSettings& settings = {});

struct PlanePosition {
    double x, y;
};

/// x = sqrt(k3)/k2 sin(k2 t),  y = sqrt(k3)/k2 cos(k2 t) - k1/k2   (k2 != 0)
PlanePosition closedFormUniform(const MotionConstants& constants, double t);

/// constants of the exponential-field closed form
struct ExpClosedFormConstants {
    double alpha2;  ///< (k1+k2)^2 - k3
    double beta;    ///< 2 k1 k2 + 2 k2^2
    double l;       ///< sqrt(k3) k2 / alpha2
    double mAux;    ///< beta / (2 alpha2)

    static ExpClosedFormConstants from(const MotionConstants& constants);
    double alpha() const;
    /// alpha2 > 0 and mAux > |l| (logarithm argument positive at all times)
    bool valid() const;
};

/** Exponentially decaying field in the y gauge:
        y = log(l sin(+-alpha t) + m),
        x = (k1+k2) t - 2 arctan( ((k1+k2) tan(alpha t/2) +- sqrt(k3)) / alpha )
    with the arctan continued across the poles of tan so that x(t) is continuous.
    sign selects the +- branch. */
PlanePosition closedFormExponential(const MotionConstants& constants, double t, int sign);

/// closed-form trajectory anchored to the initial conditions (phase and offset fitted);
/// available for Uniform / ZeroField in either Landau gauge and ExpDecay when
/// ExpClosedFormConstants::valid() (or k3 = 0). Otherwise DomainError.
Trajectory trajectoryClosedForm(const ParticleParams& params, const FieldProfile& profile, double tEnd,
                                size_t nSamples);

/// cumulative Simpson integral of dw/dt = k1 + kappa u f(u) over the sampled u(t), anchored at w0
std::vector<double> companionCoordinate(const std::vector<double>& t, const std::vector<double>& u,
                                        const MotionConstants& constants, const FieldProfile& profile,
                                        double w0);

/** Initial conditions reproducing given motion constants (q, m fixed; b0 = k2 m / q is
    taken from the profile, which must already carry that scale).
    With u0 given: start there, moving in the direction `sign`.
    Without: ExpDecay with a valid closed form starts at the closed form's t = 0 point
    (branch `sign`); otherwise the start is the turning point nearest to u = 0. */
ParticleParams particleFromConstants(const MotionConstants& constants, const FieldProfile& profile,
                                     double q = 1, double m = 1, int sign = 1,
                                     std::optional<double> u0 = std::nullopt);

}  // namespace fieldline

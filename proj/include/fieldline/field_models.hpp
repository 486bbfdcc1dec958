#pragma once

#include "fieldline/numerics.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fieldline {

/// Which Landau-type gauge carries the non-uniformity:
///   Y:      A_x = -B y f(y)          (x is cyclic)
///   X:      A_y =  B x f(x)          (y is cyclic)
///   Radial: A_x = -B y f(r), A_y = B x f(r)
enum class GaugeAxis { Y, X, Radial };

enum class ProfileKind { Uniform, ZeroField, ExpDecay, RadialExp, RationalAB, Table, FromField, Custom };

std::string axisName(GaugeAxis axis);
GaugeAxis parseAxis(const std::string& name);

/** A field of the class B_z = b0 * (u f(u))' with u the gauge coordinate.

    The profile is an immutable value: copies share the underlying functions,
    and every evaluation is const and free of side effects, so one profile can be
    used from several threads at once.

    Besides f and f' the profile carries two derived functions that the dynamics
    actually needs: the gauge function u*f(u) (regular for f = 1/u) and the field
    shape (u f)' = u f' + f. Built-ins provide all four analytically. */
class FieldProfile {
public:
    struct Functions {
        math::ScalarFunction f, fPrime, uf, fieldShape;
        /// integral_0^r s f(s) ds, if known in closed form (used by the zero-mode solver)
        math::ScalarFunction radialAction;
    };

    FieldProfile(ProfileKind kind, GaugeAxis axis, double b0, std::string label, Functions fns);

    /// f given only as a function and its derivative; u*f and the field shape are built from them
    static FieldProfile custom(GaugeAxis axis, double b0, std::string label,
                               math::ScalarFunction f, math::ScalarFunction fPrime);

    ProfileKind kind() const { return kind_; }
    GaugeAxis axis() const { return axis_; }
    double b0() const { return b0_; }
    const std::string& label() const { return label_; }

    double f(double u) const;
    double fPrime(double u) const;
    double uf(double u) const;
    double fieldShape(double u) const;
    bool hasRadialAction() const { return static_cast<bool>(fns_->radialAction); }
    double radialAction(double r) const;

    /// same shape on another axis / with another field scale
    FieldProfile withAxis(GaugeAxis axis) const;
    FieldProfile withScale(double b0) const;

private:
    ProfileKind kind_;
    GaugeAxis axis_;
    double b0_;
    std::string label_;
    std::shared_ptr<const Functions> fns_;
};

enum class BuiltinKind { Uniform, ZeroField, ExpDecay, RadialExp, RationalAB };

/// Built-in shapes: f = 1, f = 1/u, f = (1 - e^-u)/u (on the y axis for ExpDecay and
/// the radial axis for RadialExp) and f = (u-a)(u-b)/u^2. a, b are used by RationalAB only.
FieldProfile makeBuiltin(BuiltinKind kind, double b0, double a = 0, double b = 0);

/// Same, addressed by configuration name ("uniform", "zero_field", "exp_decay",
/// "radial_exp", "rational_ab"); unknown names raise ConfigError
FieldProfile makeBuiltin(const std::string& name, double b0, double a = 0, double b = 0);

/// Physical field B_z = b0 (u f'(u) + f(u)) at the gauge coordinate u (y, x or r)
double evalB(const FieldProfile& profile, double u);

/** Invert a field shape b(u) = B(u)/b0 back to a gauge shape:
        f(u) = ( integral_{anchor}^{u} b(s) ds + c ) / u ,   f' = (b - f) / u .
    With anchor = 0, c = 0 gives the solution that is finite at the origin.
    If antiderivative is given it must return integral_{anchor}^{u} b(s) ds
    and replaces the adaptive quadrature. */
FieldProfile profileFromField(math::ScalarFunction fieldShape, double c, GaugeAxis axis,
                              double b0 = 1, double anchor = 0,
                              math::ScalarFunction antiderivative = {},
                              std::string label = "from_field");

/// f tabulated at (u, f) pairs, monotone-cubic interpolated
FieldProfile profileFromTable(std::vector<double> u, std::vector<double> f, GaugeAxis axis,
                              double b0, std::string label = "table");

/// two numeric columns from a CSV file with a header line; the header must name
/// the columns (firstName, secondName)
void readTwoColumnCsv(const std::string& path, const std::string& firstName,
                      const std::string& secondName, std::vector<double>& first,
                      std::vector<double>& second);

/// tabulate u, f, f', B on a uniform grid as CSV text; points where f is singular get "nan"
std::string fieldTableCsv(const FieldProfile& profile, double uMin, double uMax, size_t points);

}  // namespace fieldline

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

/// Small numerical toolbox shared by the physics modules: quadrature wrappers,
/// bracketing root finders, monotone interpolation and output helpers.
namespace fieldline::math {

using ScalarFunction = std::function<double(double)>;

/// globally adaptive Gauss-Kronrod (31 points, GSL QAG) on [a,b] with relative tolerance tol
/// (floored at 1e-13) or absolute tolerance absTol, whichever is looser. Exceptions thrown by f
/// propagate. NumericError if the result is not finite or the requested accuracy is clearly missed.
double integrateAdaptive(const ScalarFunction& f, double a, double b, double tol = 1e-12,
                         double* errorEstimate = nullptr, double absTol = 0);

/// fixed 20-point Gauss-Legendre rule; exact to machine precision for smooth integrands
/// on short intervals
double integrateGauss(const ScalarFunction& f, double a, double b);

/// bisection on a sign-changing bracket, continued until the bracket cannot shrink further;
/// f(a) and f(b) must have opposite signs (zero at an endpoint returns that endpoint)
double bisect(const ScalarFunction& f, double a, double b);

/// golden-section search for the minimum of a unimodal function on [a,b]
double goldenMinimize(const ScalarFunction& f, double a, double b, double tol = 1e-14);

/// cumulative integral of sampled data, anchored at 0 at the first node;
/// each panel of two intervals is integrated through the parabola on its three samples
/// (composite Simpson on uniform grids); with an odd interval count the last interval
/// uses the parabola through the last three samples
std::vector<double> cumulativeSimpson(std::span<const double> t, std::span<const double> y);

/// Fritsch-Carlson monotone piecewise-cubic (PCHIP) interpolant of tabulated data.
/// Evaluation outside [front, back] of the abscissae throws DomainError.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;
    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }
    bool empty() const { return !impl_; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    double xmin_ = 0, xmax_ = 0;
};

/// 17 significant digits, locale-independent ("%.17g")
std::string formatDouble(double value);

/// write the file through a temporary in the same directory followed by rename()
void writeFileAtomic(const std::string& path, const std::string& content);

}  // namespace fieldline::math

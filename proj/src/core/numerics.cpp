#include "fieldline/numerics.hpp"
#include "fieldline/errors.hpp"

#include <cmath>
// boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fieldline::math {

namespace {

struct GslCall {
    const ScalarFunction* f;
    std::exception_ptr error;
};

/// exceptions must not unwind through the C library; park them and report NaN instead
double gslTrampoline(double x, void* data)
{
    auto* call = static_cast<GslCall*>(data);
    if(call->error) return NAN;
    try {
        return (*call->f)(x);
    } catch(...) {
        call->error = std::current_exception();
        return NAN;
    }
}

struct Workspace {
    static constexpr size_t LIMIT = 4000;
    gsl_integration_workspace* ws;
    Workspace() : ws(gsl_integration_workspace_alloc(LIMIT))
    {
        static const bool handlerOff = [] {
            gsl_set_error_handler_off();
            return true;
        }();
        (void)handlerOff;
    }
    ~Workspace() { gsl_integration_workspace_free(ws); }
};

}  // namespace

double integrateAdaptive(const ScalarFunction& f, double a, double b, double tol, double* errorEstimate,
                         double absTol)
{
    if(a == b) {
        if(errorEstimate) *errorEstimate = 0;
        return 0;
    }
    tol = std::max(tol, 1e-13);
    thread_local Workspace work;
    GslCall call{&f, nullptr};
    gsl_function fn{&gslTrampoline, &call};
    double result = 0, err = 0;
    int status = gsl_integration_qag(&fn, a, b, std::max(absTol, 0.0), tol, Workspace::LIMIT, GSL_INTEG_GAUSS31, work.ws, &result, &err);
    if(call.error) std::rethrow_exception(call.error);
    if(errorEstimate) *errorEstimate = err;
    if(!std::isfinite(result) || !std::isfinite(err))
        throw NumericError("adaptive quadrature produced a non-finite value on [" +
                           formatDouble(a) + ", " + formatDouble(b) + "]");
    // roundoff-limited results are accepted when the estimate is still small
    if(status != GSL_SUCCESS && err > 100 * tol * std::fabs(result) && err > 1e-8 * std::fabs(result) &&
       err > std::max(absTol, 1e-300))
        throw NumericError("adaptive quadrature did not converge on [" + formatDouble(a) + ", " +
                           formatDouble(b) + "] (" + gsl_strerror(status) + "), error estimate " +
                           formatDouble(err));
    return result;
}

double integrateGauss(const ScalarFunction& f, double a, double b)
{
    if(a == b) return 0;
    return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

double bisect(const ScalarFunction& f, double a, double b)
{
    double fa = f(a), fb = f(b);
    if(fa == 0) return a;
    if(fb == 0) return b;
    if((fa > 0) == (fb > 0))
        throw NumericError("bisection bracket [" + formatDouble(a) + ", " + formatDouble(b) +
                           "] does not contain a sign change");
    for(int iter = 0; iter < 2000; iter++) {
        double mid = 0.5 * (a + b);
        if(mid <= std::min(a, b) || mid >= std::max(a, b))
            break;
        double fm = f(mid);
        if(fm == 0) return mid;
        if((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // the endpoint with the smaller residual
    return std::fabs(f(a)) <= std::fabs(f(b)) ? a : b;
}

double goldenMinimize(const ScalarFunction& f, double a, double b, double tol)
{
    const double invPhi = 0.5 * (std::sqrt(5.0) - 1);
    double c = b - invPhi * (b - a), d = a + invPhi * (b - a);
    double fc = f(c), fd = f(d);
    while(std::fabs(b - a) > tol * (1 + std::fabs(a) + std::fabs(b))) {
        if(fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invPhi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invPhi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> cumulativeSimpson(std::span<const double> t, std::span<const double> y)
{
    if(t.size() != y.size())
        throw UsageError("cumulativeSimpson: size mismatch");
    const size_t n = t.size();
    std::vector<double> out(n, 0.0);
    if(n < 2) return out;
    if(n == 2) {
        out[1] = 0.5 * (y[0] + y[1]) * (t[1] - t[0]);
        return out;
    }
    // integral over [t1, t2] of the parabola through (t0,y0),(t1,y1),(t2,y2)
    auto segment = [](double t0, double t1, double t2, double y0, double y1, double y2,
                      double from, double to) {
        // Lagrange basis integrated analytically on [from, to]
        auto prim = [&](double x) {
            double l0 = (x * x * x / 3 - (t1 + t2) * x * x / 2 + t1 * t2 * x) / ((t0 - t1) * (t0 - t2));
            double l1 = (x * x * x / 3 - (t0 + t2) * x * x / 2 + t0 * t2 * x) / ((t1 - t0) * (t1 - t2));
            double l2 = (x * x * x / 3 - (t0 + t1) * x * x / 2 + t0 * t1 * x) / ((t2 - t0) * (t2 - t1));
            return y0 * l0 + y1 * l1 + y2 * l2;
        };
        // shift the origin to 'from' to limit cancellation in the cubic terms
        double s0 = t0 - from, s1 = t1 - from, s2 = t2 - from;
        t0 = s0; t1 = s1; t2 = s2;
        return prim(to - from) - prim(0.0);
    };
    // accumulate whole panels [k, k+2] only; the midpoint value is read off the same parabola,
    // so the error at every node stays that of composite Simpson
    size_t k = 0;
    for(; k + 2 < n; k += 2) {
        out[k + 1] = out[k] + segment(t[k], t[k + 1], t[k + 2], y[k], y[k + 1], y[k + 2], t[k], t[k + 1]);
        out[k + 2] = out[k] + segment(t[k], t[k + 1], t[k + 2], y[k], y[k + 1], y[k + 2], t[k], t[k + 2]);
    }
    if(k + 1 < n)  // an odd number of intervals leaves one: use the last three nodes
        out[k + 1] = out[k] + segment(t[k - 1], t[k], t[k + 1], y[k - 1], y[k], y[k + 1], t[k], t[k + 1]);
    return out;
}

struct MonotoneCubic::Impl {
    boost::math::interpolators::pchip<std::vector<double>> spline;
    explicit Impl(std::vector<double>&& x, std::vector<double>&& y)
        : spline(std::move(x), std::move(y)) {}
};

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
{
    if(x.size() != y.size() || x.size() < 4)
        throw ConfigError("monotone interpolation needs at least 4 (x, y) pairs of equal length");
    for(size_t i = 1; i < x.size(); i++)
        if(!(x[i] > x[i - 1]))
            throw ConfigError("interpolation abscissae must be strictly increasing");
    for(double v : y)
        if(!std::isfinite(v))
            throw ConfigError("interpolation table contains a non-finite value");
    xmin_ = x.front();
    xmax_ = x.back();
    impl_ = std::make_shared<const Impl>(std::move(x), std::move(y));
}

double MonotoneCubic::operator()(double x) const
{
    if(!impl_ || !(x >= xmin_ && x <= xmax_))
        throw DomainError("interpolation point " + formatDouble(x) + " outside table range [" +
                          formatDouble(xmin_) + ", " + formatDouble(xmax_) + "]");
    return impl_->spline(x);
}

double MonotoneCubic::derivative(double x) const
{
    if(!impl_ || !(x >= xmin_ && x <= xmax_))
        throw DomainError("interpolation point " + formatDouble(x) + " outside table range");
    return impl_->spline.prime(x);
}

std::string formatDouble(double value)
{
    if(std::isnan(value)) return "nan";
    if(std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void writeFileAtomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    if(target.has_parent_path() && !fs::exists(target.parent_path())) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if(ec) throw IoError("cannot create directory " + target.parent_path().string());
    }
    std::random_device rd;
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(rd() % 1000000);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if(!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if(!out) throw IoError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if(ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename temporary file onto " + path);
    }
}

}  // namespace fieldline::math

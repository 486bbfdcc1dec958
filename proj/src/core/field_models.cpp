#include "fieldline/field_models.hpp"
#include "fieldline/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fieldline {

namespace {

/// below this |u| the shape (1 - e^-u)/u and its derivative are evaluated from the Taylor series
constexpr double SERIES_THRESHOLD = 1e-4;

double expShape(double u)
{
    if(std::fabs(u) < SERIES_THRESHOLD)
        return 1 - u / 2 * (1 - u / 3 * (1 - u / 4));
    return -std::expm1(-u) / u;
}

double expShapePrime(double u)
{
    if(std::fabs(u) < SERIES_THRESHOLD)
        return -0.5 + u / 3 - u * u / 8 + u * u * u / 30;
    return (std::exp(-u) - expShape(u)) / u;
}

void requireFinite(double value, const char* what)
{
    if(!std::isfinite(value))
        throw ConfigError(std::string(what) + " must be finite");
}

[[noreturn]] void singular(const std::string& label, double u)
{
    throw DomainError("profile '" + label + "' is singular at u = " + math::formatDouble(u));
}

}  // namespace

std::string axisName(GaugeAxis axis)
{
    switch(axis) {
        case GaugeAxis::Y: return "y";
        case GaugeAxis::X: return "x";
        case GaugeAxis::Radial: return "radial";
    }
    return "?";
}

GaugeAxis parseAxis(const std::string& name)
{
    if(name == "y") return GaugeAxis::Y;
    if(name == "x") return GaugeAxis::X;
    if(name == "radial" || name == "r") return GaugeAxis::Radial;
    throw ConfigError("unknown gauge axis '" + name + "' (expected y, x or radial)");
}

FieldProfile::FieldProfile(ProfileKind kind, GaugeAxis axis, double b0, std::string label, Functions fns)
    : kind_(kind), axis_(axis), b0_(b0), label_(std::move(label)),
      fns_(std::make_shared<const Functions>(std::move(fns)))
{
    requireFinite(b0, "field scale b0");
    if(!fns_->f || !fns_->fPrime || !fns_->uf || !fns_->fieldShape)
        throw ConfigError("profile '" + label_ + "' is missing a shape function");
}

FieldProfile FieldProfile::custom(GaugeAxis axis, double b0, std::string label,
                                  math::ScalarFunction f, math::ScalarFunction fPrime)
{
    Functions fns;
    fns.f = f;
    fns.fPrime = fPrime;
    fns.uf = [f](double u) { return u * f(u); };
    fns.fieldShape = [f, fPrime](double u) { return f(u) + u * fPrime(u); };
    return FieldProfile(ProfileKind::Custom, axis, b0, std::move(label), std::move(fns));
}

double FieldProfile::f(double u) const { return fns_->f(u); }
double FieldProfile::fPrime(double u) const { return fns_->fPrime(u); }
double FieldProfile::uf(double u) const { return fns_->uf(u); }
double FieldProfile::fieldShape(double u) const { return fns_->fieldShape(u); }

double FieldProfile::radialAction(double r) const
{
    if(!fns_->radialAction)
        throw UsageError("profile '" + label_ + "' has no closed-form radial action");
    return fns_->radialAction(r);
}

FieldProfile FieldProfile::withAxis(GaugeAxis axis) const
{
    FieldProfile copy(*this);
    copy.axis_ = axis;
    return copy;
}

FieldProfile FieldProfile::withScale(double b0) const
{
    requireFinite(b0, "field scale b0");
    FieldProfile copy(*this);
    copy.b0_ = b0;
    return copy;
}

FieldProfile makeBuiltin(BuiltinKind kind, double b0, double a, double b)
{
    requireFinite(b0, "field scale b0");
    FieldProfile::Functions fns;
    switch(kind) {
    case BuiltinKind::Uniform:
        fns.f = [](double) { return 1.0; };
        fns.fPrime = [](double) { return 0.0; };
        fns.uf = [](double u) { return u; };
        fns.fieldShape = [](double) { return 1.0; };
        fns.radialAction = [](double r) { return 0.5 * r * r; };
        return FieldProfile(ProfileKind::Uniform, GaugeAxis::Y, b0, "uniform", std::move(fns));

    case BuiltinKind::ZeroField:
        fns.f = [](double u) {
            if(u == 0) singular("zero_field", u);
            return 1 / u;
        };
        fns.fPrime = [](double u) {
            if(u == 0) singular("zero_field", u);
            return -1 / (u * u);
        };
        // u f(u) = 1 identically, so the field vanishes everywhere including u = 0
        fns.uf = [](double) { return 1.0; };
        fns.fieldShape = [](double) { return 0.0; };
        fns.radialAction = [](double r) { return r; };
        return FieldProfile(ProfileKind::ZeroField, GaugeAxis::Y, b0, "zero_field", std::move(fns));

    case BuiltinKind::ExpDecay:
    case BuiltinKind::RadialExp: {
        fns.f = expShape;
        fns.fPrime = expShapePrime;
        fns.uf = [](double u) { return -std::expm1(-u); };
        fns.fieldShape = [](double u) { return std::exp(-u); };
        fns.radialAction = [](double r) { return r + std::expm1(-r); };
        bool radial = kind == BuiltinKind::RadialExp;
        return FieldProfile(radial ? ProfileKind::RadialExp : ProfileKind::ExpDecay,
            radial ? GaugeAxis::Radial : GaugeAxis::Y, b0,
            radial ? "radial_exp" : "exp_decay", std::move(fns));
    }

    case BuiltinKind::RationalAB: {
        requireFinite(a, "rational_ab parameter a");
        requireFinite(b, "rational_ab parameter b");
        const double sum = a + b, prod = a * b;
        fns.f = [a, b](double u) {
            if(u == 0) singular("rational_ab", u);
            return (u - a) * (u - b) / (u * u);
        };
        fns.fPrime = [sum, prod](double u) {
            if(u == 0) singular("rational_ab", u);
            return (sum - 2 * prod / u) / (u * u);
        };
        fns.uf = [sum, prod](double u) {
            if(u == 0) {
                if(prod != 0) singular("rational_ab", u);
                return -sum;
            }
            return u - sum + prod / u;
        };
        fns.fieldShape = [prod](double u) {
            if(u == 0) {
                if(prod != 0) singular("rational_ab", u);
                return 1.0;
            }
            return 1 - prod / (u * u);
        };
        // integral of s - (a+b) + ab/s; the logarithm is kept, its regular part vanishes at 0
        fns.radialAction = [sum, prod](double r) {
            if(r <= 0) {
                if(prod != 0 || r < 0) singular("rational_ab", r);
                return 0.0;
            }
            return 0.5 * r * r - sum * r + (prod != 0 ? prod * std::log(r) : 0.0);
        };
        return FieldProfile(ProfileKind::RationalAB, GaugeAxis::Radial, b0,
            "rational_ab(" + math::formatDouble(a) + "," + math::formatDouble(b) + ")", std::move(fns));
    }
    }
    throw ConfigError("unknown built-in profile kind");
}

FieldProfile makeBuiltin(const std::string& name, double b0, double a, double b)
{
    if(name == "uniform") return makeBuiltin(BuiltinKind::Uniform, b0);
    if(name == "zero_field") return makeBuiltin(BuiltinKind::ZeroField, b0);
    if(name == "exp_decay") return makeBuiltin(BuiltinKind::ExpDecay, b0);
    if(name == "radial_exp") return makeBuiltin(BuiltinKind::RadialExp, b0);
    if(name == "rational_ab") return makeBuiltin(BuiltinKind::RationalAB, b0, a, b);
    throw ConfigError("unknown profile '" + name +
                      "' (expected uniform, zero_field, exp_decay, radial_exp or rational_ab)");
}

double evalB(const FieldProfile& profile, double u)
{
    double shape = profile.fieldShape(u);
    if(!std::isfinite(shape))
        throw DomainError("field of profile '" + profile.label() + "' is not finite at u = " +
                          math::formatDouble(u));
    return profile.b0() * shape;
}

FieldProfile profileFromField(math::ScalarFunction fieldShape, double c, GaugeAxis axis, double b0,
                              double anchor, math::ScalarFunction antiderivative, std::string label)
{
    requireFinite(c, "integration constant c");
    requireFinite(anchor, "integration anchor");
    if(!fieldShape)
        throw ConfigError("profileFromField needs a field shape function");

    // primitive P(u) = integral_{anchor}^{u} b(s) ds + c, which is u*f(u)
    math::ScalarFunction primitive;
    if(antiderivative) {
        primitive = [antiderivative, c](double u) { return antiderivative(u) + c; };
    } else {
        primitive = [fieldShape, c, anchor](double u) {
            double err = 0;
            double value = math::integrateAdaptive(fieldShape, anchor, u, 1e-13, &err);
            if(!std::isfinite(value))
                throw NumericError("field shape is not integrable on [" + math::formatDouble(anchor) +
                                   ", " + math::formatDouble(u) + "]");
            return value + c;
        };
    }
    const bool regularAtOrigin = anchor == 0 && c == 0;

    FieldProfile::Functions fns;
    fns.uf = primitive;
    fns.fieldShape = fieldShape;
    fns.f = [primitive, fieldShape, regularAtOrigin, label](double u) {
        if(u == 0) {
            if(!regularAtOrigin) singular(label, u);
            return fieldShape(0.0);
        }
        return primitive(u) / u;
    };
    // f' = (b(u) - f(u))/u; near the origin of a regular profile the equivalent form
    // (1/u^2) * integral_0^u (b(u) - b(s)) ds avoids the cancellation
    constexpr double TINY = 1e-7;
    fns.fPrime = [primitive, fieldShape, regularAtOrigin, label](double u) {
        if(regularAtOrigin && std::fabs(u) < 0.1) {
            double v = std::fabs(u) < TINY ? (u < 0 ? -TINY : TINY) : u;
            double bv = fieldShape(v);
            double inner = math::integrateAdaptive(
                [&](double s) { return bv - fieldShape(s); }, 0.0, v, 1e-15);
            return inner / (v * v);
        }
        if(u == 0) singular(label, u);
        return (fieldShape(u) - primitive(u) / u) / u;
    };
    return FieldProfile(ProfileKind::FromField, axis, b0, std::move(label), std::move(fns));
}

FieldProfile profileFromTable(std::vector<double> u, std::vector<double> f, GaugeAxis axis, double b0,
                              std::string label)
{
    math::MonotoneCubic spline(std::move(u), std::move(f));
    FieldProfile::Functions fns;
    fns.f = [spline](double x) { return spline(x); };
    fns.fPrime = [spline](double x) { return spline.derivative(x); };
    fns.uf = [spline](double x) { return x * spline(x); };
    fns.fieldShape = [spline](double x) { return spline(x) + x * spline.derivative(x); };
    return FieldProfile(ProfileKind::Table, axis, b0, std::move(label), std::move(fns));
}

void readTwoColumnCsv(const std::string& path, const std::string& firstName, const std::string& secondName,
                      std::vector<double>& first, std::vector<double>& second)
{
    std::ifstream in(path);
    if(!in)
        throw ConfigError("cannot open table '" + path + "'");
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string line;
    if(!std::getline(in, line))
        throw ConfigError("table '" + path + "' is empty");
    {
        std::stringstream header(line);
        std::string c1, c2, extra;
        std::getline(header, c1, ',');
        std::getline(header, c2, ',');
        if(trim(c1) != firstName || trim(c2) != secondName || std::getline(header, extra, ','))
            throw ConfigError("table '" + path + "' must have header '" + firstName + "," + secondName + "'");
    }
    first.clear();
    second.clear();
    size_t lineNo = 1;
    while(std::getline(in, line)) {
        lineNo++;
        if(trim(line).empty()) continue;
        std::stringstream row(line);
        std::string c1, c2;
        std::getline(row, c1, ',');
        std::getline(row, c2, ',');
        try {
            size_t p1 = 0, p2 = 0;
            double v1 = std::stod(trim(c1), &p1), v2 = std::stod(trim(c2), &p2);
            if(p1 != trim(c1).size() || p2 != trim(c2).size()) throw std::invalid_argument("trailing");
            first.push_back(v1);
            second.push_back(v2);
        } catch(const std::exception&) {
            throw ConfigError("table '" + path + "' line " + std::to_string(lineNo) + ": expected two numbers");
        }
    }
}

std::string fieldTableCsv(const FieldProfile& profile, double uMin, double uMax, size_t points)
{
    if(!std::isfinite(uMin) || !std::isfinite(uMax) || !(uMax > uMin) || points < 2)
        throw ConfigError("field grid needs finite u_min < u_max and at least 2 points");
    auto orNan = [](auto&& fn) {
        try {
            return fn();
        } catch(const DomainError&) {
            return std::nan("");
        }
    };
    std::string out = "u,f,f_prime,B\n";
    for(size_t i = 0; i < points; i++) {
        double u = i + 1 == points ? uMax : uMin + (uMax - uMin) * static_cast<double>(i) / (points - 1);
        double f = orNan([&] { return profile.f(u); });
        double fp = orNan([&] { return profile.fPrime(u); });
        double field = orNan([&] { return evalB(profile, u); });
        out += math::formatDouble(u) + "," + math::formatDouble(f) + "," + math::formatDouble(fp) + "," +
               math::formatDouble(field) + "\n";
    }
    return out;
}

}  // namespace fieldline

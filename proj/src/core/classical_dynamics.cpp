#include "fieldline/classical_dynamics.hpp"
#include "fieldline/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fieldline {

namespace {

constexpr double PI = std::numbers::pi;

/// relative size of |g| below which a point counts as a turning point
constexpr double TURNING_TOLERANCE = 1e-12;
/// relative depth below which a touching minimum of g counts as a double root
constexpr double DOUBLE_ROOT_TOLERANCE = 1e-10;

/// The one-dimensional problem in the gauge coordinate u:
///   dw/dt = A(u) = k1 + kappa u f(u),   (du/dt)^2 = g(u) = k3 - A(u)^2
struct Reduced {
    const FieldProfile& profile;
    double k1, kappa, k3, sqrtK3;

    Reduced(const FieldProfile& p, const MotionConstants& c)
        : profile(p), k1(c.k1), kappa(gaugeCoupling(c, p)), k3(c.k3), sqrtK3(std::sqrt(c.k3)) {}

    double companionVelocity(double u) const { return k1 + kappa * profile.uf(u); }
    double g(double u) const
    {
        double a = companionVelocity(u);
        return (sqrtK3 - a) * (sqrtK3 + a);
    }
    double gPrime(double u) const { return -2 * companionVelocity(u) * kappa * profile.fieldShape(u); }
    /// g with singular points of the profile treated as impenetrable walls
    double gSafe(double u) const
    {
        try {
            double v = g(u);
            return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        } catch(const DomainError&) {
            return -std::numeric_limits<double>::infinity();
        }
    }
    double scale() const { return std::max(k3, std::numeric_limits<double>::min()); }
};

/// position/velocity of the reduced problem mapped back to the plane
Sample toPlane(const FieldProfile& profile, double t, double u, double w, double udot, double wdot)
{
    Sample s{};
    s.t = t;
    if(profile.axis() == GaugeAxis::X) {
        s.x = u; s.y = w; s.vx = udot; s.vy = wdot;
    } else {
        s.x = w; s.y = u; s.vx = wdot; s.vy = udot;
    }
    return s;
}

struct GaugeStart {
    double u, w, udot, wdot;
};

GaugeStart gaugeStart(const ParticleParams& p, const FieldProfile& profile)
{
    if(profile.axis() == GaugeAxis::X)
        return {p.x0, p.y0, p.vx0, p.vy0};
    return {p.y0, p.x0, p.vy0, p.vx0};
}

ParticleParams fromGauge(const FieldProfile& profile, double q, double m, double u, double w, double udot,
                         double wdot)
{
    ParticleParams p;
    p.q = q;
    p.m = m;
    if(profile.axis() == GaugeAxis::X) {
        p.x0 = u; p.y0 = w; p.vx0 = udot; p.vy0 = wdot;
    } else {
        p.x0 = w; p.y0 = u; p.vx0 = wdot; p.vy0 = udot;
    }
    return p;
}

std::vector<double> uniformTimes(double tEnd, size_t n)
{
    std::vector<double> t(n);
    for(size_t i = 0; i < n; i++)
        t[i] = i + 1 == n ? tEnd : tEnd * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

void checkTimeGrid(double tEnd, size_t n)
{
    if(!std::isfinite(tEnd) || !(tEnd > 0))
        throw ConfigError("t_end must be finite and positive");
    if(n < 2)
        throw ConfigError("at least 2 samples are required");
}

/// refine a touching minimum of g near u; returns true (and the location) if it is a double root
bool probeDoubleRoot(const Reduced& red, double lo, double hi, double& where)
{
    double umin = math::goldenMinimize([&](double u) { return red.gSafe(u); }, lo, hi);
    if(red.gSafe(umin) <= DOUBLE_ROOT_TOLERANCE * red.scale()) {
        where = umin;
        return true;
    }
    return false;
}

[[noreturn]] void degenerateError(double where)
{
    throw NumericError("degenerate (double) turning point at u = " + math::formatDouble(where) +
                       ": the period diverges, use the ODE oracle for this trajectory");
}

/// first root of g met when walking from u0 in direction dir, within distance reach.
/// Steps grow geometrically from a tiny first step so that roots close to u0 are resolved.
std::optional<double> findTurningPoint(const Reduced& red, double u0, int dir, double reach)
{
    double h = std::max(reach * 1e-7, 1e-13 * (1 + std::fabs(u0)));
    double dist = 0;
    double uPrev = u0, gPrev = std::max(red.gSafe(u0), 0.0);
    double uPrev2 = u0, gPrev2 = std::numeric_limits<double>::infinity();
    while(dist < reach) {
        double step = std::min(h, reach - dist);
        dist += step;
        double u = u0 + dir * dist;
        double gu = red.gSafe(u);
        if(gu < 0)
            return math::bisect([&](double x) { return red.gSafe(x); }, uPrev, u);
        // g dipped towards zero and came back up: check for a double root
        if(uPrev != u0 && gPrev <= gPrev2 && gPrev < gu && gPrev < 1e-6 * red.scale()) {
            double where;
            if(probeDoubleRoot(red, std::min(uPrev2, u), std::max(uPrev2, u), where))
                degenerateError(where);
        }
        uPrev2 = uPrev; gPrev2 = gPrev;
        uPrev = u; gPrev = gu;
        h *= 1.05;
    }
    return std::nullopt;
}

/** One monotone stretch of the gauge coordinate.

    Finite legs run from p to e with u = p + (e - p) sin^2(s), s in [0, pi/2];
    open legs run from p in direction dir with u = p + dir s^2.
    In both parametrisations dt/ds stays finite at a simple turning point, so the
    time and companion displacement tables are built with plain Gauss rules per cell.
    Inversion t -> s uses a monotone cubic guess refined by safeguarded Newton steps
    on the exact cell integral. */
class Leg {
public:
    static Leg finite(const Reduced& red, double p, double e, bool pIsRoot, bool eIsRoot, size_t cells)
    {
        Leg leg(red);
        leg.open_ = false;
        leg.p_ = p;
        leg.span_ = e - p;
        leg.pIsRoot_ = pIsRoot;
        leg.eIsRoot_ = eIsRoot;
        if(pIsRoot) leg.setStartRoot(p);
        if(eIsRoot) leg.setEndRoot(e);
        leg.build(0.5 * PI, cells, std::numeric_limits<double>::infinity());
        return leg;
    }

    static Leg open(const Reduced& red, double p, int dir, bool pIsRoot, double neededTime, double reach,
                    size_t cells)
    {
        Leg leg(red);
        leg.open_ = true;
        leg.p_ = p;
        leg.dir_ = dir;
        leg.pIsRoot_ = pIsRoot;
        if(pIsRoot) leg.setStartRoot(p);
        double sReach = std::sqrt(reach) * 1.001 + 1e-300;
        leg.build(sReach, cells, neededTime);
        return leg;
    }

    double duration() const { return t_.back(); }
    double displacement() const { return w_.back(); }
    double paramEnd() const { return s_.back(); }

    double u(double s) const
    {
        if(open_) return p_ + dir_ * s * s;
        double sn = std::sin(s);
        return p_ + span_ * sn * sn;
    }

    struct Point {
        double u, w;
    };

    /// state after time tau on this leg
    Point at(double tau) const
    {
        double s = paramAtTime(tau);
        return {u(s), displacementAtParam(s)};
    }

    double timeAtParam(double s) const
    {
        size_t i = cellOf(s);
        return t_[i] + math::integrateGauss([this](double x) { return dtds(x); }, s_[i], s);
    }

    double displacementAtParam(double s) const
    {
        size_t i = cellOf(s);
        return w_[i] + math::integrateGauss([this](double x) { return dwds(x); }, s_[i], s);
    }

    /// consistency check of the tabulated duration against one adaptive integral
    double adaptiveDuration(double tol) const
    {
        return math::integrateAdaptive([this](double x) { return dtds(x); }, s_.front(), s_.back(), tol);
    }

private:
    explicit Leg(const Reduced& red) : red_(&red) {}

    /// at a root A(u) = +-sqrt(k3) exactly; keep the sign of the computed value
    double rootVelocity(double root) const
    {
        return red_->companionVelocity(root) >= 0 ? red_->sqrtK3 : -red_->sqrtK3;
    }
    void setStartRoot(double root)
    {
        gpStart_ = red_->gPrime(root);
        aStart_ = rootVelocity(root);
    }
    void setEndRoot(double root)
    {
        gpEnd_ = red_->gPrime(root);
        aEnd_ = rootVelocity(root);
    }

    /// g at distance du from a root, from the field integral over [root, root + du];
    /// avoids the cancellation in k3 - A^2 that otherwise limits the endpoint accuracy
    double radicandFromRoot(double root, double aRoot, double du) const
    {
        const FieldProfile& prof = red_->profile;
        double dA = red_->kappa * math::integrateGauss([&](double v) { return prof.fieldShape(root + v); }, 0, du);
        return -dA * (2 * aRoot + dA);
    }

    double dtds(double s) const
    {
        if(open_) {
            double s2 = s * s;
            if(pIsRoot_ && s2 < 1e-280)
                return 2 / std::sqrt(std::fabs(gpStart_));
            double g = pIsRoot_ && s2 <= 0.05 * (1 + std::fabs(p_)) ? radicandFromRoot(p_, aStart_, dir_ * s2)
                                                                     : red_->g(u(s));
            if(!(g > 0)) {
                if(pIsRoot_) return 2 / std::sqrt(std::fabs(gpStart_));
                throw NumericError("radicand vanished inside an open leg at u = " + math::formatDouble(u(s)));
            }
            return 2 * s / std::sqrt(g);
        }
        double sn = std::sin(s), cs = std::cos(s);
        // limits of dt/ds at simple turning points
        auto nearStart = [&] { return 2 * std::sqrt(span_ / gpStart_) * cs; };
        auto nearEnd = [&] { return 2 * std::sqrt(-span_ / gpEnd_) * sn; };
        double sn2 = sn * sn, cs2 = cs * cs;
        if(pIsRoot_ && sn2 < 1e-280) return nearStart();
        if(eIsRoot_ && cs2 < 1e-280) return nearEnd();
        double g;
        if(pIsRoot_ && sn2 <= 0.05)
            g = radicandFromRoot(p_, aStart_, span_ * sn2);
        else if(eIsRoot_ && cs2 <= 0.05)
            g = radicandFromRoot(p_ + span_, aEnd_, -span_ * cs2);
        else
            g = red_->g(u(s));
        if(!(g > 0)) {
            if(pIsRoot_ && sn < cs) return nearStart();
            if(eIsRoot_) return nearEnd();
            if(sn2 < 1e-12) return 0;  // interior start with vanishing velocity
            throw NumericError("radicand vanished inside a leg at u = " + math::formatDouble(u(s)));
        }
        return std::fabs(span_ * 2 * sn * cs) / std::sqrt(g);
    }

    double dwds(double s) const { return red_->companionVelocity(u(s)) * dtds(s); }

    void build(double sEnd, size_t cells, double neededTime)
    {
        cells = std::max<size_t>(cells, 8);
        const double h = sEnd / static_cast<double>(cells);
        s_ = {0.0};
        t_ = {0.0};
        w_ = {0.0};
        auto dt = [this](double x) { return dtds(x); };
        auto dw = [this](double x) { return dwds(x); };
        for(size_t i = 0;; i++) {
            double a = s_.back(), b = open_ || i + 1 < cells ? a + h : sEnd;
            double ti = math::integrateGauss(dt, a, b), wi = math::integrateGauss(dw, a, b);
            if(!std::isfinite(ti) || !std::isfinite(wi) || !(ti > 0))
                throw NumericError("time integral is not finite near u = " + math::formatDouble(u(b)) +
                                   " (degenerate turning point?)");
            s_.push_back(b);
            t_.push_back(t_.back() + ti);
            w_.push_back(w_.back() + wi);
            if(!open_ && i + 1 >= cells) break;
            if(open_ && t_.back() >= neededTime && s_.size() >= 5) break;
            if(open_ && b > 4 * sEnd + 10)
                throw NumericError("open leg did not cover the requested time span");
        }
        guess_ = math::MonotoneCubic(t_, s_);
    }

    size_t cellOf(double s) const
    {
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        size_t i = it == s_.begin() ? 0 : static_cast<size_t>(it - s_.begin()) - 1;
        return std::min(i, s_.size() - 2);
    }

    double paramAtTime(double tau) const
    {
        if(tau <= 0) return 0;
        if(tau >= t_.back()) {
            if(!open_) return s_.back();
            throw NumericError("requested time beyond the tabulated open leg");
        }
        auto it = std::upper_bound(t_.begin(), t_.end(), tau);
        size_t i = static_cast<size_t>(it - t_.begin()) - 1;
        double lo = s_[i], hi = s_[i + 1];
        double s = std::clamp(guess_(tau), lo, hi);
        auto F = [&](double x) {
            return t_[i] + math::integrateGauss([this](double y) { return dtds(y); }, s_[i], x) - tau;
        };
        double fs = F(s);
        for(int iter = 0; iter < 60 && fs != 0; iter++) {
            if(fs > 0) hi = s; else lo = s;
            double deriv = dtds(s);
            double step = deriv > 0 ? fs / deriv : std::numeric_limits<double>::infinity();
            if(std::fabs(step) <= 1e-15 * (1 + std::fabs(s))) {
                s = std::clamp(s - step, lo, hi);
                break;
            }
            double next = s - step;
            if(!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket
            s = next;
            fs = F(s);
        }
        return s;
    }

    const Reduced* red_;
    bool open_ = false;
    double p_ = 0, span_ = 0;
    int dir_ = 1;
    bool pIsRoot_ = false, eIsRoot_ = false;
    double gpStart_ = 0, gpEnd_ = 0;
    double aStart_ = 0, aEnd_ = 0;
    std::vector<double> s_, t_, w_;
    math::MonotoneCubic guess_;
};

Trajectory baseTrajectory(Method method, const ParticleParams& params, const FieldProfile& profile,
                          const MotionConstants& constants)
{
    Trajectory traj;
    traj.method = method;
    traj.profileLabel = profile.label();
    traj.axis = profile.axis();
    traj.b0 = profile.b0();
    traj.particle = params;
    traj.constants = constants;
    return traj;
}

double unwrappedArctanTerm(double K, double alpha, double sqrtK3, double tau, int sign)
{
    double half = 0.5 * alpha * tau;
    double arg = (K * std::tan(half) + sign * sqrtK3) / alpha;
    double poles = std::floor(half / PI + 0.5);
    return std::atan(arg) + PI * (K > 0 ? 1 : -1) * poles;
}

}  // namespace

MotionConstants deriveConstants(const ParticleParams& params, const FieldProfile& profile)
{
    params.validate();
    MotionConstants c;
    c.k2 = params.q * profile.b0() / params.m;
    c.k3 = params.vx0 * params.vx0 + params.vy0 * params.vy0;
    c.k1 = gaugeMomentum(profile, c.k2, params.x0, params.y0, params.vx0, params.vy0);
    if(!std::isfinite(c.k1))
        throw DomainError("gauge function of '" + profile.label() + "' is not finite at the initial position");
    return c;
}

double gaugeCoupling(const MotionConstants& constants, const FieldProfile& profile)
{
    if(profile.axis() == GaugeAxis::Radial)
        throw DomainError("the radial gauge has no single cyclic Cartesian coordinate");
    return profile.axis() == GaugeAxis::X ? -constants.k2 : constants.k2;
}

double radicand(const MotionConstants& constants, const FieldProfile& profile, double u)
{
    return Reduced(profile, constants).g(u);
}

double radicandDerivative(const MotionConstants& constants, const FieldProfile& profile, double u)
{
    return Reduced(profile, constants).gPrime(u);
}

TurningPointScan turningPoints(const MotionConstants& constants, const FieldProfile& profile, double lo,
                               double hi, size_t cells)
{
    if(!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw ConfigError("turning-point bracket must be a finite interval with lo < hi");
    cells = std::max<size_t>(cells, 4);
    Reduced red(profile, constants);
    auto gs = [&](double u) { return red.gSafe(u); };
    std::vector<double> us(cells + 1), gv(cells + 1);
    for(size_t i = 0; i <= cells; i++) {
        us[i] = i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        gv[i] = gs(us[i]);
    }
    auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
    TurningPointScan scan;
    const double tiny = DOUBLE_ROOT_TOLERANCE * red.scale();
    for(size_t i = 0; i < cells; i++) {
        int sa = sgn(gv[i]), sb = sgn(gv[i + 1]);
        if(sa * sb < 0) {
            double root = math::bisect(gs, us[i], us[i + 1]);
            scan.roots.push_back({root, RootKind::Simple, sa, sb});
        } else if(sb == 0 && i + 1 < cells) {
            int sl = sa, sr = sgn(gv[i + 2]);
            scan.roots.push_back({us[i + 1], sl * sr < 0 ? RootKind::Simple : RootKind::Double, sl, sr});
        }
    }
    // touching zeros: local extrema of g close to zero without a sign change
    for(size_t i = 1; i < cells; i++) {
        bool localMin = gv[i] <= gv[i - 1] && gv[i] <= gv[i + 1] && gv[i] > 0;
        bool localMax = gv[i] >= gv[i - 1] && gv[i] >= gv[i + 1] && gv[i] < 0;
        if(!localMin && !localMax) continue;
        if(sgn(gv[i - 1]) * sgn(gv[i + 1]) < 0) continue;
        auto objective = [&](double u) { return localMin ? gs(u) : -gs(u); };
        double where = math::goldenMinimize(objective, us[i - 1], us[i + 1]);
        if(std::fabs(gs(where)) <= tiny) {
            int s = localMin ? 1 : -1;
            scan.roots.push_back({where, RootKind::Double, s, s});
        }
    }
    std::sort(scan.roots.begin(), scan.roots.end(),
              [](const TurningPoint& a, const TurningPoint& b) { return a.u < b.u; });
    for(const TurningPoint& tp : scan.roots)
        if(tp.kind == RootKind::Double) scan.degenerate = true;
    scan.unboundedOrForbidden = scan.roots.empty();
    return scan;
}

Trajectory trajectoryQuadrature(const ParticleParams& params, const FieldProfile& profile, double tEnd,
                                size_t nSamples, const QuadratureSettings& settings)
{
    checkTimeGrid(tEnd, nSamples);
    if(profile.axis() == GaugeAxis::Radial)
        throw DomainError("quadrature inversion needs a Landau gauge (y or x axis); use the ODE oracle "
                          "for radial profiles");
    const MotionConstants constants = deriveConstants(params, profile);
    const Reduced red(profile, constants);
    const GaugeStart start = gaugeStart(params, profile);
    const std::vector<double> times = uniformTimes(tEnd, nSamples);

    Trajectory traj = baseTrajectory(Method::Quadrature, params, profile, constants);
    traj.tolerances = {{"quadrature_abs", settings.tolerance},
                       {"nodes_per_leg", static_cast<double>(settings.nodesPerLeg)}};
    traj.samples.reserve(nSamples);

    auto emit = [&](double t, double u, double w, double udot) {
        traj.samples.push_back(toPlane(profile, t, u, w, udot, red.companionVelocity(u)));
    };

    if(constants.k3 == 0) {
        for(double t : times) emit(t, start.u, start.w, 0.0);
        fillDiagnostics(traj, profile);
        return traj;
    }

    const double scale = red.scale();
    const double g0 = red.g(start.u);
    if(g0 < -TURNING_TOLERANCE * scale)
        throw DomainError("initial gauge coordinate u = " + math::formatDouble(start.u) +
                          " is classically forbidden (g = " + math::formatDouble(g0) + ")");
    const bool atTurning = std::fabs(g0) <= TURNING_TOLERANCE * scale || start.udot == 0;
    int dir = start.udot > 0 ? 1 : -1;
    if(atTurning) {
        double gp = red.gPrime(start.u);
        if(std::fabs(gp) <= TURNING_TOLERANCE * scale / (1 + std::fabs(start.u))) {
            // resting on a double root of g: u stays put, w drifts uniformly
            for(double t : times) emit(t, start.u, start.w + red.companionVelocity(start.u) * t, 0.0);
            fillDiagnostics(traj, profile);
            return traj;
        }
        dir = gp > 0 ? 1 : -1;
    }

    const double reach = red.sqrtK3 * tEnd * (1 + 1e-6) + 1e-12 * (1 + std::fabs(start.u));
    std::optional<double> ahead = findTurningPoint(red, start.u, dir, reach);
    std::optional<double> behind = findTurningPoint(red, start.u, -dir, reach);
    const size_t cells = settings.nodesPerLeg;

    auto speed = [&](double u) { return std::sqrt(std::max(red.g(u), 0.0)); };

    if(ahead && behind) {
        // periodic: leg from the lower to the upper turning point, mirrored on the way back
        const double a = std::min(*ahead, *behind), b = std::max(*ahead, *behind);
        Leg leg = Leg::finite(red, a, b, true, true, cells);
        const double halfPeriod = leg.duration(), halfShift = leg.displacement();
        double check = leg.adaptiveDuration(settings.tolerance);
        if(std::fabs(check - halfPeriod) > 100 * settings.tolerance * std::max(1.0, halfPeriod))
            throw NumericError("half-period quadrature is inconsistent: tabulated " +
                               math::formatDouble(halfPeriod) + " vs adaptive " + math::formatDouble(check));
        const double period = 2 * halfPeriod;

        double frac = std::clamp((start.u - a) / (b - a), 0.0, 1.0);
        double s0 = std::asin(std::sqrt(frac));
        double legTime0 = leg.timeAtParam(s0);
        double tau0 = dir > 0 ? legTime0 : period - legTime0;

        // companion displacement as a function of orbital phase time in [0, period)
        auto phaseState = [&](double tau, double& u, double& udot) {
            double cycles = std::floor(tau / period);
            double r = tau - cycles * period;
            double w = cycles * 2 * halfShift;
            if(r < halfPeriod) {
                Leg::Point pt = leg.at(r);
                u = pt.u;
                udot = speed(u);
                w += pt.w;
            } else {
                Leg::Point pt = leg.at(period - r);
                u = pt.u;
                udot = -speed(u);
                w += 2 * halfShift - pt.w;
            }
            return w;
        };
        double uTmp, udotTmp;
        const double wRef = phaseState(tau0, uTmp, udotTmp);
        for(double t : times) {
            double u, udot;
            double w = phaseState(tau0 + t, u, udot);
            if(t == 0) {
                u = start.u;
                udot = start.udot;
            }
            emit(t, u, start.w + (w - wRef), udot);
        }
        traj.orbit = {true, a, b, period};
    } else {
        // at most one turning point within reach
        std::optional<Leg> first;
        double firstTime = 0, firstShift = 0;
        double openStart = start.u;
        int openDir = dir;
        bool openFromRoot = atTurning;
        if(ahead) {
            first = Leg::finite(red, start.u, *ahead, atTurning, true, cells);
            firstTime = first->duration();
            firstShift = first->displacement();
            openStart = *ahead;
            openDir = -dir;
            openFromRoot = true;
        }
        double needed = std::max(tEnd - firstTime, 0.0) * (1 + 1e-9) + 1e-12;
        Leg open = Leg::open(red, openStart, openDir, openFromRoot, needed, reach, cells);
        for(double t : times) {
            double u, w, udot;
            if(first && t <= firstTime) {
                Leg::Point pt = first->at(t);
                u = pt.u;
                w = pt.w;
                udot = dir * speed(u);
            } else {
                Leg::Point pt = open.at(t - firstTime);
                u = pt.u;
                w = firstShift + pt.w;
                udot = openDir * speed(u);
            }
            if(t == 0) {
                u = start.u;
                udot = start.udot;
            }
            emit(t, u, start.w + w, udot);
        }
        // a single turning point bounds the motion on one side only
        if(std::optional<double> wall = ahead ? ahead : behind) {
            if(*wall > start.u) traj.orbit.upper = *wall;
            else traj.orbit.lower = *wall;
        }
    }
    fillDiagnostics(traj, profile);
    return traj;
}

PlanePosition closedFormUniform(const MotionConstants& c, double t)
{
    if(c.k2 == 0)
        throw DomainError("uniform closed form needs k2 != 0; use the zero-field (straight line) form");
    double r = std::sqrt(c.k3) / c.k2;
    return {r * std::sin(c.k2 * t), r * std::cos(c.k2 * t) - c.k1 / c.k2};
}

ExpClosedFormConstants ExpClosedFormConstants::from(const MotionConstants& c)
{
    ExpClosedFormConstants e;
    double K = c.k1 + c.k2;
    e.alpha2 = K * K - c.k3;
    e.beta = 2 * c.k1 * c.k2 + 2 * c.k2 * c.k2;
    e.l = std::sqrt(c.k3) * c.k2 / e.alpha2;
    e.mAux = e.beta / (2 * e.alpha2);
    return e;
}

double ExpClosedFormConstants::alpha() const { return std::sqrt(alpha2); }

bool ExpClosedFormConstants::valid() const
{
    return alpha2 > 0 && std::isfinite(l) && mAux > std::fabs(l);
}

PlanePosition closedFormExponential(const MotionConstants& c, double t, int sign)
{
    if(sign != 1 && sign != -1)
        throw ConfigError("branch sign must be +1 or -1");
    ExpClosedFormConstants e = ExpClosedFormConstants::from(c);
    if(!(e.alpha2 > 0))
        throw DomainError("exponential closed form needs (k1+k2)^2 > k3; fall back to quadrature");
    double alpha = e.alpha();
    double arg = e.l * std::sin(sign * alpha * t) + e.mAux;
    if(!(arg > 0))
        throw DomainError("logarithm argument of the exponential closed form is not positive at t = " +
                          math::formatDouble(t));
    double K = c.k1 + c.k2;
    double x = K * t - 2 * unwrappedArctanTerm(K, alpha, std::sqrt(c.k3), t, sign);
    return {x, std::log(arg)};
}

Trajectory trajectoryClosedForm(const ParticleParams& params, const FieldProfile& profile, double tEnd,
                                size_t nSamples)
{
    checkTimeGrid(tEnd, nSamples);
    const MotionConstants c = deriveConstants(params, profile);
    Trajectory traj = baseTrajectory(Method::ClosedForm, params, profile, c);
    const std::vector<double> times = uniformTimes(tEnd, nSamples);
    const GaugeStart st = gaugeStart(params, profile);

    if(profile.axis() == GaugeAxis::Radial)
        throw DomainError("no closed form for radial profiles");
    const double kappa = gaugeCoupling(c, profile);
    const double sqrtK3 = std::sqrt(c.k3);

    auto straightLine = [&] {
        for(double t : times)
            traj.samples.push_back(toPlane(profile, t, st.u + st.udot * t, st.w + st.wdot * t, st.udot, st.wdot));
    };
    // zero energy: no force acts, the start is kept exactly
    auto stationary = [&] {
        for(double t : times) traj.samples.push_back(toPlane(profile, t, st.u, st.w, 0, 0));
    };

    switch(profile.kind()) {
    case ProfileKind::ZeroField:
        straightLine();
        break;
    case ProfileKind::Uniform: {
        if(c.k3 == 0) {
            stationary();
            break;
        }
        if(kappa == 0) {
            straightLine();
            break;
        }
        const double radius = sqrtK3 / kappa;  // signed
        const double phase = std::atan2(-st.udot, st.wdot);
        for(double t : times) {
            double ang = kappa * t + phase;
            double u = radius * std::cos(ang) - c.k1 / kappa;
            double w = st.w + radius * (std::sin(ang) - std::sin(phase));
            double udot = -sqrtK3 * std::sin(ang), wdot = sqrtK3 * std::cos(ang);
            if(t == 0) { u = st.u; udot = st.udot; wdot = st.wdot; }
            traj.samples.push_back(toPlane(profile, t, u, w, udot, wdot));
        }
        traj.orbit = {true, -c.k1 / kappa - std::fabs(radius), -c.k1 / kappa + std::fabs(radius),
                      2 * PI / std::fabs(kappa)};
        break;
    }
    case ProfileKind::ExpDecay: {
        if(c.k3 == 0) {
            stationary();
            break;
        }
        // generic coupling: dw/dt = K - kappa e^{-u}
        MotionConstants mapped{c.k1, kappa, c.k3};
        ExpClosedFormConstants e = ExpClosedFormConstants::from(mapped);
        if(!e.valid())
            throw DomainError("exponential closed form unavailable for these constants "
                              "(needs (k1+k2)^2 > k3 with a bounded orbit); use quadrature");
        const double alpha = e.alpha(), K = c.k1 + kappa;
        const double eu0 = std::exp(st.u);
        const double sinPhi = (eu0 - e.mAux) / e.l;
        const double cosPhi = st.udot * eu0 / (e.l * alpha);
        const double phi = std::atan2(sinPhi, cosPhi);
        const double shift = phi / alpha;
        auto X = [&](double tau) { return K * tau - 2 * unwrappedArctanTerm(K, alpha, sqrtK3, tau, 1); };
        const double xRef = X(shift);
        for(double t : times) {
            double ang = alpha * t + phi;
            double arg = e.l * std::sin(ang) + e.mAux;
            double u = std::log(arg);
            double udot = e.l * alpha * std::cos(ang) / arg;
            double w = st.w + X(t + shift) - xRef;
            double wdot = K - kappa / arg;
            if(t == 0) { u = st.u; udot = st.udot; wdot = st.wdot; }
            traj.samples.push_back(toPlane(profile, t, u, w, udot, wdot));
        }
        traj.orbit = {true, std::log(e.mAux - std::fabs(e.l)), std::log(e.mAux + std::fabs(e.l)), 2 * PI / alpha};
        break;
    }
    default:
        throw DomainError("no closed form registered for profile '" + profile.label() + "'");
    }
    fillDiagnostics(traj, profile);
    return traj;
}

std::vector<double> companionCoordinate(const std::vector<double>& t, const std::vector<double>& u,
                                        const MotionConstants& constants, const FieldProfile& profile, double w0)
{
    if(t.size() != u.size())
        throw UsageError("companionCoordinate: t and u sample counts differ");
    Reduced red(profile, constants);
    std::vector<double> rate(u.size());
    for(size_t i = 0; i < u.size(); i++) rate[i] = red.companionVelocity(u[i]);
    std::vector<double> w = math::cumulativeSimpson(t, rate);
    for(double& v : w) v += w0;
    return w;
}

ParticleParams particleFromConstants(const MotionConstants& c, const FieldProfile& profile, double q, double m,
                                     int sign, std::optional<double> u0)
{
    if(!(m > 0) || !std::isfinite(q) || q == 0)
        throw ConfigError("particleFromConstants needs finite q != 0 and m > 0");
    if(sign != 1 && sign != -1)
        throw ConfigError("branch sign must be +1 or -1");
    if(!std::isfinite(c.k1) || !std::isfinite(c.k2) || !std::isfinite(c.k3) || c.k3 < 0)
        throw ConfigError("motion constants must be finite with k3 >= 0");
    if(std::fabs(q * profile.b0() / m - c.k2) > 1e-12 * std::max(1.0, std::fabs(c.k2)))
        throw ConfigError("profile field scale does not reproduce k2 = q b0 / m");
    Reduced red(profile, c);

    auto startAt = [&](double u, double udot) {
        return fromGauge(profile, q, m, u, 0.0, udot, red.companionVelocity(u));
    };

    if(u0) {
        double g = red.g(*u0);
        if(g < -TURNING_TOLERANCE * red.scale())
            throw DomainError("u0 = " + math::formatDouble(*u0) + " is classically forbidden for these constants");
        return startAt(*u0, sign * std::sqrt(std::max(g, 0.0)));
    }

    if(profile.kind() == ProfileKind::ExpDecay) {
        MotionConstants mapped{c.k1, red.kappa, c.k3};
        ExpClosedFormConstants e = ExpClosedFormConstants::from(mapped);
        if(e.valid() && c.k3 > 0) {
            const double alpha = e.alpha(), K = c.k1 + red.kappa;
            double u = std::log(e.mAux);
            double udot = sign * e.l * alpha / e.mAux;
            double w = -2 * unwrappedArctanTerm(K, alpha, red.sqrtK3, 0.0, sign);
            // k3 is matched by construction; momentum follows from u
            return fromGauge(profile, q, m, u, w, udot, K - red.kappa / e.mAux);
        }
    }

    // nearest turning point to the origin, searching outward
    for(double half : {1.0, 10.0, 100.0, 1000.0}) {
        TurningPointScan scan = turningPoints(c, profile, -half, half, 8192);
        const TurningPoint* best = nullptr;
        for(const TurningPoint& tp : scan.roots)
            if(tp.kind == RootKind::Simple && (!best || std::fabs(tp.u) < std::fabs(best->u))) best = &tp;
        if(best) return startAt(best->u, 0.0);
    }
    double g = red.gSafe(0.0);
    if(g >= 0) return startAt(0.0, sign * std::sqrt(g));
    throw ConfigError("no classically allowed start found for these motion constants");
}

}  // namespace fieldline

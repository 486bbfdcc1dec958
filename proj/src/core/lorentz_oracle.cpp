#include "fieldline/lorentz_oracle.hpp"
#include "fieldline/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fieldline {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1. / 5;
constexpr double A31 = 3. / 40, A32 = 9. / 40;
constexpr double A41 = 44. / 45, A42 = -56. / 15, A43 = 32. / 9;
constexpr double A51 = 19372. / 6561, A52 = -25360. / 2187, A53 = 64448. / 6561, A54 = -212. / 729;
constexpr double A61 = 9017. / 3168, A62 = -355. / 33, A63 = 46732. / 5247, A64 = 49. / 176,
                 A65 = -5103. / 18656;
constexpr double B1 = 35. / 384, B3 = 500. / 1113, B4 = 125. / 192, B5 = -2187. / 6784, B6 = 11. / 84;
/// difference between the 5th and embedded 4th order weights
constexpr double E1 = 71. / 57600, E3 = -71. / 16695, E4 = 71. / 1920, E5 = -17253. / 339200,
                 E6 = 22. / 525, E7 = -1. / 40;
/// weights of the fourth-order continuous extension (Hairer & Wanner, dopri5)
constexpr double D1 = -12715105075. / 11282082432, D3 = 87487479700. / 32700410799,
                 D4 = -10690763975. / 1880347072, D5 = 701980252875. / 199316789632,
                 D6 = -1453857185. / 822651844, D7 = 69997945. / 29380423;

PlaneState rhs(const FieldProfile& profile, double qm, const PlaneState& s)
{
    double bz = fieldAt(profile, s[0], s[1]);
    return {s[2], s[3], qm * s[3] * bz, -qm * s[2] * bz};
}

PlaneState combine(const PlaneState& y, double h, std::initializer_list<std::pair<double, const PlaneState*>> terms)
{
    PlaneState out = y;
    for(size_t i = 0; i < 4; i++) {
        double acc = 0;
        for(const auto& [w, k] : terms) acc += w * (*k)[i];
        out[i] += h * acc;
    }
    return out;
}

struct RunResult {
    DenseSolution dense;
    std::string failure;  ///< empty on success
};

RunResult run(const FieldProfile& profile, const ParticleParams& params, double tEnd, const OdeSettings& settings)
{
    settings.validate();
    params.validate();
    if(!std::isfinite(tEnd) || !(tEnd > 0))
        throw ConfigError("t_end must be finite and positive");
    const double qm = params.q / params.m;

    RunResult res;
    double t = 0;
    PlaneState y{params.x0, params.y0, params.vx0, params.vy0};
    PlaneState k1 = rhs(profile, qm, y);
    res.dense.append(t, y, k1);
    double h = std::min(settings.dtInitial, tEnd);
    size_t steps = 0;

    while(t < tEnd) {
        if(steps++ >= settings.maxSteps) {
            res.failure = "step budget of " + std::to_string(settings.maxSteps) + " exhausted at t = " +
                          math::formatDouble(t);
            return res;
        }
        if(h < 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t))) {
            res.failure = "step size underflow at t = " + math::formatDouble(t);
            return res;
        }
        bool last = t + h >= tEnd;
        if(last) h = tEnd - t;

        PlaneState k2 = rhs(profile, qm, combine(y, h, {{A21, &k1}}));
        PlaneState k3 = rhs(profile, qm, combine(y, h, {{A31, &k1}, {A32, &k2}}));
        PlaneState k4 = rhs(profile, qm, combine(y, h, {{A41, &k1}, {A42, &k2}, {A43, &k3}}));
        PlaneState k5 = rhs(profile, qm, combine(y, h, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}}));
        PlaneState k6 =
            rhs(profile, qm, combine(y, h, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}}));
        PlaneState yNew = combine(y, h, {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
        PlaneState k7 = rhs(profile, qm, yNew);

        double errNorm = 0;
        for(size_t i = 0; i < 4; i++) {
            double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            double sc = settings.absTol + settings.relTol * std::max(std::fabs(y[i]), std::fabs(yNew[i]));
            errNorm += (e / sc) * (e / sc);
        }
        errNorm = std::sqrt(errNorm / 4);
        if(!std::isfinite(errNorm)) {
            h *= 0.25;
            continue;
        }
        if(errNorm <= 1) {
            t = last ? tEnd : t + h;
            y = yNew;
            PlaneState corr;
            for(size_t i = 0; i < 4; i++)
                corr[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            k1 = k7;  // first-same-as-last
            res.dense.append(t, y, k1, corr);
        }
        double factor = errNorm == 0 ? 5 : 0.9 * std::pow(errNorm, -0.2);
        h *= std::clamp(factor, 0.2, errNorm <= 1 ? 5.0 : 1.0);
    }
    return res;
}

Trajectory sampleDense(const DenseSolution& dense, const FieldProfile& profile, const ParticleParams& params,
                       double tEnd, size_t nSamples, const OdeSettings& settings)
{
    Trajectory traj;
    traj.method = Method::OdeOracle;
    traj.profileLabel = profile.label();
    traj.axis = profile.axis();
    traj.b0 = profile.b0();
    traj.particle = params;
    traj.constants.k2 = params.q * profile.b0() / params.m;
    traj.constants.k3 = params.vx0 * params.vx0 + params.vy0 * params.vy0;
    traj.constants.k1 = gaugeMomentum(profile, traj.constants.k2, params.x0, params.y0, params.vx0, params.vy0);
    traj.tolerances = {{"rel_tol", settings.relTol},
                       {"abs_tol", settings.absTol},
                       {"dt_initial", settings.dtInitial},
                       {"accepted_steps", static_cast<double>(dense.steps())}};
    for(size_t i = 0; i < nSamples; i++) {
        double t = i + 1 == nSamples ? tEnd : tEnd * static_cast<double>(i) / static_cast<double>(nSamples - 1);
        if(t > dense.tEnd()) break;
        PlaneState s = dense(t);
        traj.samples.push_back({t, s[0], s[1], s[2], s[3]});
    }
    fillDiagnostics(traj, profile);
    return traj;
}

}  // namespace

void OdeSettings::validate() const
{
    if(!(dtInitial > 0) || !(relTol > 0) || !(absTol > 0) || !std::isfinite(dtInitial) || !std::isfinite(relTol) ||
       !std::isfinite(absTol))
        throw ConfigError("ODE settings need positive finite dt_initial, rel_tol and abs_tol");
    if(maxSteps == 0)
        throw ConfigError("ODE settings need max_steps > 0");
}

double fieldAt(const FieldProfile& profile, double x, double y)
{
    switch(profile.axis()) {
        case GaugeAxis::Y: return evalB(profile, y);
        case GaugeAxis::X: return evalB(profile, x);
        case GaugeAxis::Radial: return evalB(profile, std::hypot(x, y));
    }
    return NAN;
}

std::array<double, 2> acceleration(const FieldProfile& profile, const ParticleParams& params,
                                   const PlaneState& state)
{
    double qm = params.q / params.m;
    double bz = fieldAt(profile, state[0], state[1]);
    return {qm * state[3] * bz, -qm * state[2] * bz};
}

void DenseSolution::append(double t, const PlaneState& state, const PlaneState& derivative,
                           const PlaneState& correction)
{
    if(!t_.empty() && !(t > t_.back()))
        throw UsageError("dense solution nodes must be strictly increasing in time");
    t_.push_back(t);
    y_.push_back(state);
    dy_.push_back(derivative);
    corr_.push_back(correction);
}

PlaneState DenseSolution::operator()(double t) const
{
    if(t_.empty() || t < t_.front() || t > t_.back())
        throw DomainError("time " + math::formatDouble(t) + " outside the integrated interval");
    if(t_.size() == 1) return y_.front();
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    size_t i = std::min(static_cast<size_t>(std::max<ptrdiff_t>(it - t_.begin() - 1, 0)), t_.size() - 2);
    double h = t_[i + 1] - t_[i], th = (t - t_[i]) / h;
    double th2 = th * th, th3 = th2 * th;
    double h10 = th3 - 2 * th2 + th;
    double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
    // correction vanishes with its first derivative at both ends of the step
    double bump = th2 * (1 - th) * (1 - th);
    PlaneState out;
    for(size_t k = 0; k < 4; k++)
        // increment form: a constant state is reproduced exactly
        out[k] = y_[i][k] + h01 * (y_[i + 1][k] - y_[i][k]) + h * (h10 * dy_[i][k] + h11 * dy_[i + 1][k]) +
                 bump * corr_[i + 1][k];
    return out;
}

std::vector<double> DenseSolution::crossings(size_t index, double level, int direction) const
{
    if(index > 3)
        throw UsageError("state component index must be 0..3");
    std::vector<double> out;
    for(size_t i = 0; i + 1 < t_.size(); i++) {
        double a = y_[i][index] - level, b = y_[i + 1][index] - level;
        bool up = a < 0 && b >= 0, down = a > 0 && b <= 0;
        if(!(up && direction >= 0) && !(down && direction <= 0)) continue;
        if(b == 0) {
            out.push_back(t_[i + 1]);
            continue;
        }
        out.push_back(math::bisect([&](double t) { return (*this)(t)[index] - level; }, t_[i], t_[i + 1]));
    }
    return out;
}

DenseSolution integrateDense(const FieldProfile& profile, const ParticleParams& params, double tEnd,
                             const OdeSettings& settings)
{
    RunResult res = run(profile, params, tEnd, settings);
    if(!res.failure.empty())
        throw IntegrationFailure(res.failure, sampleDense(res.dense, profile, params, tEnd,
                                                          std::max<size_t>(res.dense.steps() + 1, 2), settings));
    return res.dense;
}

Trajectory integrateLorentz(const FieldProfile& profile, const ParticleParams& params, double tEnd,
                            size_t nSamples, const OdeSettings& settings)
{
    if(nSamples < 2)
        throw ConfigError("at least 2 samples are required");
    RunResult res = run(profile, params, tEnd, settings);
    Trajectory traj = sampleDense(res.dense, profile, params, tEnd, nSamples, settings);
    if(!res.failure.empty())
        throw IntegrationFailure(res.failure, std::move(traj));
    return traj;
}

double periodFromCrossings(const std::vector<double>& times)
{
    if(times.size() < 2) return NAN;
    return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

DeviationReport compareTrajectories(const Trajectory& a, const Trajectory& b)
{
    if(a.samples.empty() || b.samples.empty())
        throw UsageError("cannot compare empty trajectories");
    const double lo = std::max(a.samples.front().t, b.samples.front().t);
    const double hi = std::min(a.samples.back().t, b.samples.back().t);
    if(lo > hi)
        throw UsageError("trajectories cover disjoint time ranges");

    bool sameGrid = a.samples.size() == b.samples.size();
    for(size_t i = 0; sameGrid && i < a.samples.size(); i++)
        sameGrid = a.samples[i].t == b.samples[i].t;

    auto interpolateB = [&](double t, double& x, double& y, double& e) {
        auto it = std::lower_bound(b.samples.begin(), b.samples.end(), t,
                                   [](const Sample& s, double v) { return s.t < v; });
        if(it == b.samples.end()) it = std::prev(it);
        if(it->t == t || it == b.samples.begin()) {
            x = it->x; y = it->y; e = it->energyResidual;
            return;
        }
        const Sample& s1 = *it;
        const Sample& s0 = *std::prev(it);
        double w = (t - s0.t) / (s1.t - s0.t);
        x = s0.x + w * (s1.x - s0.x);
        y = s0.y + w * (s1.y - s0.y);
        e = s0.energyResidual + w * (s1.energyResidual - s0.energyResidual);
    };

    DeviationReport rep;
    double sumSq = 0;
    for(size_t i = 0; i < a.samples.size(); i++) {
        const Sample& s = a.samples[i];
        if(s.t < lo || s.t > hi) continue;
        double x, y, e;
        if(sameGrid) {
            x = b.samples[i].x; y = b.samples[i].y; e = b.samples[i].energyResidual;
        } else {
            interpolateB(s.t, x, y, e);
        }
        double d = std::hypot(s.x - x, s.y - y);
        sumSq += d * d;
        rep.samples++;
        if(d > rep.maxPosition || rep.samples == 1) {
            rep.maxPosition = d;
            rep.timeOfMax = s.t;
        }
        rep.maxEnergyResidualDiff = std::max(rep.maxEnergyResidualDiff, std::fabs(s.energyResidual - e));
    }
    rep.rmsPosition = rep.samples ? std::sqrt(sumSq / static_cast<double>(rep.samples)) : 0;
    return rep;
}

}  // namespace fieldline

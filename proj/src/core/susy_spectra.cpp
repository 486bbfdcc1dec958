#include "fieldline/susy_spectra.hpp"
#include "fieldline/errors.hpp"
#include "fieldline/numerics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fieldline::susy {

namespace {

constexpr double PI = std::numbers::pi;

void requirePositiveRadius(double r)
{
    if(!(r > 0) || !std::isfinite(r))
        throw DomainError("radius must be positive and finite, got " + math::formatDouble(r));
}

double angularExponent(int m) { return std::abs(m) + 0.5; }

/// log(exp(a) + exp(b)) without overflow
double logAddExp(double a, double b)
{
    if(a == -std::numeric_limits<double>::infinity()) return b;
    if(b == -std::numeric_limits<double>::infinity()) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// log of int_a^b exp(phi(rho)) d rho. phi is shifted by its maximum before exponentiating, and
/// breakpoints are graded geometrically towards the maximum so that narrow spikes are resolved.
double logIntegral(const std::function<double(double)>& phi, double a, double b)
{
    constexpr int SAMPLES = 64;
    double peak = -std::numeric_limits<double>::infinity(), where = a;
    int best = 0;
    for(int i = 0; i <= SAMPLES; i++) {
        double x = a + (b - a) * i / SAMPLES;
        double v = phi(x);
        if(std::isnan(v))
            throw NumericError("zero mode is not finite inside the normalisation range");
        if(v > peak) { peak = v; where = x; best = i; }
    }
    if(peak == -std::numeric_limits<double>::infinity() || peak == std::numeric_limits<double>::infinity())
        return peak;
    if(best > 0 && best < SAMPLES) {
        double step = (b - a) / SAMPLES;
        where = math::goldenMinimize([&](double x) { return -phi(x); }, where - step, where + step);
        peak = std::max(peak, phi(where));
    }
    std::vector<double> cuts{a, b, where};
    const double floor = 1e-13 * std::max({std::fabs(a), std::fabs(b), 1.0});
    for(double d = 0.5 * (b - a); d > floor; d *= 0.5) {
        if(where - d > a) cuts.push_back(where - d);
        if(where + d < b) cuts.push_back(where + d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto shifted = [&](double x) { return std::exp(phi(x) - peak); };
    // accumulate outward from the peak so far pieces only need accuracy relative to the running sum
    std::vector<size_t> order(cuts.size() - 1);
    for(size_t i = 0; i < order.size(); i++) order[i] = i;
    auto distance = [&](size_t i) { return std::min(std::fabs(cuts[i] - where), std::fabs(cuts[i + 1] - where)); };
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) { return distance(x) < distance(y); });
    // phi carries a rounding error of a few ulp of its magnitude, which caps the attainable accuracy
    const double tol = std::max(1e-12, 1e-14 * std::fabs(peak));
    double integral = 0;
    for(size_t i : order)
        integral += math::integrateAdaptive(shifted, cuts[i], cuts[i + 1], tol, nullptr, 1e-3 * tol * integral);
    return integral > 0 ? peak + std::log(integral) : -std::numeric_limits<double>::infinity();
}

/// log of the remainder of a power-law end piece: int r^s dr from the cut outwards, given
/// log psi^2 at the cut and the local log-slope s; +inf when the power law is not integrable
double logPowerRemainder(double logPsi2, double r, double s, bool towardsOrigin)
{
    double exponent = towardsOrigin ? s + 1 : -(s + 1);
    if(!(exponent > 0)) return std::numeric_limits<double>::infinity();
    return logPsi2 + std::log(r) - std::log(exponent);
}

std::string describeSlope(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

void SusyProblem::validate() const
{
    if(profile.axis() != GaugeAxis::Radial)
        throw ConfigError("the SUSY analysis needs a profile on the radial axis");
    if(!(hbar > 0) || !std::isfinite(hbar) || !(mass > 0) || !std::isfinite(mass))
        throw ConfigError("hbar and mass must be positive and finite");
    if(!std::isfinite(profile.b0()))
        throw ConfigError("field scale must be finite");
}

double effectivePotential(const SusyProblem& problem, double r)
{
    requirePositiveRadius(r);
    const double B = problem.fieldScale(), m = problem.mQuantum;
    const double f = problem.profile.f(r), fp = problem.profile.fPrime(r), rf = problem.profile.uf(r);
    double spinTerm = 2 * B * f + B * r * fp;
    double lower = B * B * rf * rf + 2 * B * m * f - spinTerm + (m * m - 0.25) / (r * r);
    return problem.spin == SpinBranch::Lower ? lower : lower + 2 * spinTerm;
}

double annihilationCoefficient(const SusyProblem& problem, double r)
{
    requirePositiveRadius(r);
    return problem.fieldScale() * problem.profile.uf(r) - angularExponent(problem.mQuantum) / r;
}

double factorizedPotential(const SusyProblem& problem, double r)
{
    double w = annihilationCoefficient(problem, r);
    double wPrime = problem.fieldScale() * problem.profile.fieldShape(r) +
                    angularExponent(problem.mQuantum) / (r * r);
    return w * w - wPrime;
}

// ------------------------------------------------------------------------------------------
// zero mode

ZeroMode::ZeroMode(const SusyProblem& problem)
    : profile_(problem.profile),
      p_(angularExponent(problem.mQuantum)),
      b_(problem.fieldScale()),
      closedForm_(problem.profile.hasRadialAction())
{
    problem.validate();
    if(closedForm_) return;

    // cumulative table of S on a geometric grid; each cell is short enough for a fixed Gauss rule
    constexpr double R0 = 1e-10, R1 = 4e5;
    constexpr size_t CELLS = 2400;
    auto rate = [this](double s) { return b_ * profile_.uf(s); };
    auto r = std::make_shared<std::vector<double>>(CELLS + 1);
    auto S = std::make_shared<std::vector<double>>(CELLS + 1);
    const double ratio = std::pow(R1 / R0, 1.0 / CELLS);
    try {
        (*r)[0] = R0;
        (*S)[0] = math::integrateAdaptive(rate, 0, R0, 1e-13);
        for(size_t k = 1; k <= CELLS; k++) {
            (*r)[k] = k == CELLS ? R1 : (*r)[k - 1] * ratio;
            (*S)[k] = (*S)[k - 1] + math::integrateGauss(rate, (*r)[k - 1], (*r)[k]);
            if(!std::isfinite((*S)[k])) throw NumericError("non-finite action");
        }
    } catch(const Error& e) {
        throw ConfigError("radial action S(r) = B int_0^r s f(s) ds diverges or is undefined for profile '" +
                          profile_.label() + "': " + e.what());
    }
    gridR_ = r;
    gridS_ = S;
}

double ZeroMode::action(double r) const
{
    requirePositiveRadius(r);
    if(closedForm_) return b_ * profile_.radialAction(r);
    auto rate = [this](double s) { return b_ * profile_.uf(s); };
    const std::vector<double>& R = *gridR_;
    const std::vector<double>& S = *gridS_;
    if(r <= R.front()) return S.front() - math::integrateGauss(rate, r, R.front());
    if(r >= R.back()) return S.back() + math::integrateAdaptive(rate, R.back(), r, 1e-13);
    size_t k = static_cast<size_t>(std::upper_bound(R.begin(), R.end(), r) - R.begin()) - 1;
    return S[k] + math::integrateGauss(rate, R[k], r);
}

// ------------------------------------------------------------------------------------------
// normalisability

std::string verdictName(Verdict v)
{
    switch(v) {
        case Verdict::Normalizable: return "NORMALIZABLE";
        case Verdict::NotNormalizable: return "NOT_NORMALIZABLE";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

NormalizabilityVerdict normalizability(const ZeroMode& zm, double base)
{
    if(!(base > 1) || !std::isfinite(base))
        throw ConfigError("ladder base must exceed 1");
    constexpr int RUNGS = 15;
    constexpr double CAUCHY = 1e-10;   // relative change between successive rungs
    constexpr double GROWTH = 1e-3;    // relative growth per rung that counts as divergence
    constexpr double MARGIN = 1e-2;    // delta in the power-law tail criterion

    // integrate psi^2 dr = exp(2 log psi(r) + log r) d(log r)
    auto phi = [&](double rho) {
        double r = std::exp(rho);
        return 2 * zm.logPsi(r) + rho;
    };

    // power-law estimates of what lies outside [1/R, R], from the local slope of 2 log psi
    auto remainders = [&](double R) {
        double rIn = 1 / R;
        double sIn = 2 * (zm.p() - rIn * zm.actionDerivative(rIn));
        double sOut = 2 * (zm.p() - R * zm.actionDerivative(R));
        return logAddExp(logPowerRemainder(2 * zm.logPsi(rIn), rIn, sIn, true),
                         logPowerRemainder(2 * zm.logPsi(R), R, sOut, false));
    };

    NormalizabilityVerdict out;
    double total = -std::numeric_limits<double>::infinity();
    double prevR = 0;
    std::vector<double> completed;
    for(int j = 0; j < RUNGS; j++) {
        double R = base * std::ldexp(1.0, j);
        double lr = std::log(R);
        if(j == 0) {
            total = logIntegral(phi, -lr, lr);
        } else {
            double lp = std::log(prevR);
            total = logAddExp(total, logIntegral(phi, -lr, -lp));
            total = logAddExp(total, logIntegral(phi, lp, lr));
        }
        out.ladder.push_back({R, total, logAddExp(total, remainders(R))});
        prevR = R;
    }

    const double rHi = out.ladder.back().R, rLo = 1 / rHi;
    out.tailSlope = 2 * (zm.p() / rHi - zm.actionDerivative(rHi));
    out.tailLogSlope = rHi * out.tailSlope;
    out.originLogSlope = 2 * (zm.p() - rLo * zm.actionDerivative(rLo));
    const double midSlope = 2 * (zm.p() / (rHi / 2) - zm.actionDerivative(rHi / 2));

    // relative increments over the last three rungs: completed values for convergence,
    // raw truncated integrals for growth
    bool cauchy = std::isfinite(out.ladder.back().logCompleted);
    bool growing = total == std::numeric_limits<double>::infinity();
    if(std::isfinite(total)) {
        growing = true;
        for(int j = RUNGS - 3; j < RUNGS; j++) {
            double incCompleted = std::fabs(std::expm1(out.ladder[j].logCompleted - out.ladder[j - 1].logCompleted));
            double inc = std::expm1(out.ladder[j].logIntegral - out.ladder[j - 1].logIntegral);
            if(!(incCompleted <= CAUCHY)) cauchy = false;
            if(!(inc >= GROWTH)) growing = false;
        }
    }

    // exponential tails keep a slope bounded away from zero; 1/r-type slopes halve per doubling
    const bool tailExponential = out.tailSlope < 0 && midSlope < 0 && out.tailSlope <= 0.75 * midSlope;
    const bool tailPower = out.tailLogSlope < -(1 + MARGIN);
    const bool tailDecays = tailExponential || tailPower;
    const bool originIntegrable = out.originLogSlope > -1 + MARGIN;

    std::ostringstream report;
    report << "large r: d(2 log psi)/dr = " << describeSlope(out.tailSlope) << " at r = " << describeSlope(rHi)
           << " (r d/dr = " << describeSlope(out.tailLogSlope) << ", "
           << (tailExponential ? "exponential decay" : tailPower ? "power-law decay faster than 1/r"
                                                                 : "no integrable decay")
           << "); small r: psi^2 ~ r^" << describeSlope(out.originLogSlope) << " ("
           << (originIntegrable ? "integrable" : "not integrable") << ")";
    out.tailReport = report.str();

    out.logNormValue = out.ladder.back().logCompleted;
    if(cauchy && tailDecays && originIntegrable) {
        out.verdict = Verdict::Normalizable;
        double v = std::exp(out.logNormValue);
        if(std::isfinite(v)) out.normValue = v;
    } else if(growing || (!cauchy && (!tailDecays || !originIntegrable))) {
        out.verdict = Verdict::NotNormalizable;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

double superpotential(const ZeroMode& zm, const SusyProblem& problem, double r)
{
    requirePositiveRadius(r);
    return problem.hbar / std::sqrt(2 * problem.mass) * (zm.actionDerivative(r) - zm.p() / r);
}

// ------------------------------------------------------------------------------------------
// SWKB

SwkbIntegral::SwkbIntegral(const SusyProblem& problem) : problem_(problem)
{
    problem_.validate();
    constexpr size_t SCAN = 3000;
    constexpr double R_LO = 1e-6, R_HI = 1e6;
    scanR_.resize(SCAN + 1);
    std::vector<double> w(SCAN + 1);
    for(size_t i = 0; i <= SCAN; i++) {
        scanR_[i] = R_LO * std::pow(R_HI / R_LO, static_cast<double>(i) / SCAN);
        w[i] = w2(scanR_[i]);
    }
    size_t best = 0;
    for(size_t i = 1; i < SCAN; i++) {
        if(w[i] <= w[i - 1] && w[i] < w[i + 1]) {
            wells_++;
            if(wells_ == 1 || w[i] < w[best]) best = i;
        }
    }
    if(wells_ == 0)
        throw DomainError("W^2 has no potential well for profile '" + problem_.profile.label() + "'");
    rMin_ = math::goldenMinimize([this](double r) { return w2(r); }, scanR_[best - 1], scanR_[best + 1]);
    wMin2_ = w2(rMin_);

    double w7 = w2(1e7), w8 = w2(1e8);
    wInf2_ = w8 > 1.5 * w7 ? std::numeric_limits<double>::infinity() : w2(1e12);
}

double SwkbIntegral::w2(double r) const
{
    double w = annihilationCoefficient(problem_, r);
    return problem_.hbar * problem_.hbar / (2 * problem_.mass) * w * w;
}

std::pair<double, double> SwkbIntegral::turningPoints(double energy) const
{
    if(!(energy > wMin2_)) return {rMin_, rMin_};
    if(energy >= wInf2_)
        throw DomainError("energy " + math::formatDouble(energy) + " is at or above the continuum threshold");
    auto h = [&](double r) { return w2(r) - energy; };
    double lo = rMin_;
    for(int k = 0; h(lo) <= 0; k++) {
        if(k > 2000) throw DomainError("no inner turning point found");
        lo *= 0.5;
    }
    double hi = rMin_;
    for(int k = 0; h(hi) <= 0; k++) {
        if(hi > 1e15) throw DomainError("no outer turning point below r = 1e15 for E = " + math::formatDouble(energy));
        hi *= 2;
    }
    if(wells_ > 1) {
        int changes = 0;
        double prev = h(lo);
        for(double r : scanR_) {
            if(r <= lo || r >= hi) continue;
            double v = h(r);
            if((v > 0) != (prev > 0)) changes++;
            prev = v;
        }
        if((h(hi) > 0) != (prev > 0)) changes++;
        if(changes > 2)
            throw DomainError("multi-well W^2: " + std::to_string(changes) + " turning points at E = " +
                              math::formatDouble(energy));
    }
    double rL = math::bisect(h, lo, rMin_);
    double rR = math::bisect(h, rMin_, hi);
    return {rL, rR};
}

double SwkbIntegral::operator()(double energy) const
{
    auto [rL, rR] = turningPoints(energy);
    if(!(rR > rL)) return 0;
    const double span = rR - rL, twoM = 2 * problem_.mass;
    // r = rL + span sin^2(theta) turns the square-root endpoints into smooth zeros
    auto integrand = [&](double th) {
        double sn = std::sin(th);
        double r = rL + span * sn * sn;
        double k2 = twoM * (energy - w2(r));
        return k2 > 0 ? std::sqrt(k2) * span * std::sin(2 * th) : 0.0;
    };
    return math::integrateAdaptive(integrand, 0, 0.5 * PI, 1e-13);
}

SpectrumResult swkbLevels(const SusyProblem& problem, int nMax, QuantizationConvention convention)
{
    if(nMax < 0) throw ConfigError("n_max must be non-negative");
    SwkbIntegral I(problem);
    SpectrumResult out;
    out.convention = convention;
    const double e0 = I.wellMinimum();
    const double threshold = I.continuumThreshold();

    for(int n = 0; n <= nMax; n++) {
        double target = (convention == QuantizationConvention::HalfInteger ? n + 0.5 : n) * problem.hbar * PI;
        if(target == 0) {
            out.levels.push_back({n, e0, I(e0)});
            continue;
        }
        auto F = [&](double e) { return I(e) - target; };
        double lo = out.levels.empty() ? e0 : out.levels.back().energy, hi = lo;
        bool found = false;
        if(std::isfinite(threshold)) {
            for(int k = 1; k <= 60 && !found; k++) {
                hi = threshold - (threshold - e0) * std::ldexp(1.0, -k);
                if(hi <= lo) continue;
                try {
                    found = F(hi) > 0;
                } catch(const DomainError&) {
                    break;
                }
            }
        } else {
            double step = std::max({std::fabs(e0), problem.hbar * problem.hbar * std::fabs(problem.fieldScale()) /
                                                       problem.mass, 1e-12});
            for(int k = 0; k < 400 && !found; k++) {
                hi = lo + step * std::ldexp(1.0, k);
                found = F(hi) > 0;
            }
        }
        if(!found)
            throw DomainError("could not bracket SWKB level n = " + std::to_string(n) +
                              " below the continuum threshold");
        double e = math::bisect(F, lo, hi);
        out.levels.push_back({n, e, std::fabs(F(e))});
    }
    for(size_t i = 1; i < out.levels.size(); i++)
        if(!(out.levels[i].energy > out.levels[i - 1].energy))
            throw InvariantError("SWKB levels are not strictly increasing at n = " + std::to_string(i));
    return out;
}

double swkbUniformClosedForm(const SusyProblem& problem, double energy)
{
    if(problem.profile.kind() != ProfileKind::Uniform || !(problem.fieldScale() > 0))
        throw DomainError("closed-form SWKB integral is only available for a uniform field with B > 0");
    if(energy <= 0) return 0;
    return PI * problem.mass * energy / (2 * problem.fieldScale() * problem.hbar);
}

std::optional<bool> publishedUnbroken(const FieldProfile& profile)
{
    if(!(profile.b0() > 0)) return std::nullopt;
    switch(profile.kind()) {
        case ProfileKind::Uniform: return true;
        case ProfileKind::RadialExp: return false;
        case ProfileKind::RationalAB: return true;
        default: return std::nullopt;
    }
}

// ------------------------------------------------------------------------------------------
// output

std::string zeroModeCsv(const ZeroMode& zm, const SusyProblem& problem, double rMin, double rMax, size_t points)
{
    if(!(rMin > 0) || !(rMax > rMin) || !std::isfinite(rMax) || points < 2)
        throw ConfigError("zero-mode grid needs 0 < r_min < r_max and at least 2 points");
    std::string out = "r,log_psi,W\n";
    for(size_t i = 0; i < points; i++) {
        double r = i + 1 == points ? rMax : rMin + (rMax - rMin) * static_cast<double>(i) / (points - 1);
        out += math::formatDouble(r) + "," + math::formatDouble(zm.logPsi(r)) + "," +
               math::formatDouble(superpotential(zm, problem, r)) + "\n";
    }
    return out;
}

std::string verdictJson(const SusyProblem& problem, const NormalizabilityVerdict& v)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["profile"] = problem.profile.label();
    j["B"] = problem.fieldScale();
    j["m"] = problem.mQuantum;
    j["spin_branch"] = problem.spin == SpinBranch::Lower ? "lower" : "upper";
    j["hbar"] = problem.hbar;
    j["mass"] = problem.mass;
    j["out_of_factorization_regime"] = problem.outOfFactorizationRegime();
    j["verdict"] = verdictName(v.verdict);
    j["susy"] = v.verdict == Verdict::Normalizable      ? "unbroken"
                : v.verdict == Verdict::NotNormalizable ? "broken"
                                                        : "undetermined";
    j["norm_value"] = v.normValue ? ordered_json(*v.normValue) : ordered_json(nullptr);
    j["log_norm_value"] = std::isfinite(v.logNormValue) ? ordered_json(v.logNormValue) : ordered_json(nullptr);
    j["tail_report"] = v.tailReport;
    j["tail_slope"] = v.tailSlope;
    j["tail_log_slope"] = v.tailLogSlope;
    j["origin_log_slope"] = v.originLogSlope;
    ordered_json ladder = ordered_json::array();
    for(const LadderRung& r : v.ladder)
        ladder.push_back({{"R", r.R},
                          {"log_integral", std::isfinite(r.logIntegral) ? ordered_json(r.logIntegral)
                                                                        : ordered_json(nullptr)},
                          {"log_with_tail_estimate", std::isfinite(r.logCompleted) ? ordered_json(r.logCompleted)
                                                                                   : ordered_json(nullptr)}});
    j["ladder"] = ladder;
    std::optional<bool> claim = publishedUnbroken(problem.profile);
    j["paper_claim"] = claim ? ordered_json(*claim ? "unbroken" : "broken") : ordered_json(nullptr);
    if(claim && v.verdict != Verdict::Inconclusive)
        j["paper_claim_agrees"] = *claim == (v.verdict == Verdict::Normalizable);
    else
        j["paper_claim_agrees"] = nullptr;
    return j.dump(2) + "\n";
}

std::string spectrumCsv(const SpectrumResult& s)
{
    std::string out = "n,E_n,residual\n";
    for(const Level& l : s.levels)
        out += std::to_string(l.n) + "," + math::formatDouble(l.energy) + "," + math::formatDouble(l.residual) + "\n";
    return out;
}

}  // namespace fieldline::susy

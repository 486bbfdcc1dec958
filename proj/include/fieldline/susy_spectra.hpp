#pragma once

#include "fieldline/field_models.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

/** Radial Pauli problem in a field B f(r) e_z with vector potential A_theta = B r f(r).

    For the spin-down branch and m <= 0 the radial operator factorises as a^dagger a with
        a = d/dr + B r f(r) - p/r,     p = |m| + 1/2,
    so the ground state, if it exists, is psi_0 = r^p exp(-S(r)) with S' = B r f(r).
    Supersymmetry is unbroken exactly when psi_0 is square integrable. */
namespace fieldline::susy {

enum class SpinBranch { Lower, Upper };

struct SusyProblem {
    FieldProfile profile;  ///< radial profile; profile.b0() is the field scale B
    int mQuantum = 0;
    SpinBranch spin = SpinBranch::Lower;
    double hbar = 1;
    double mass = 1;

    double fieldScale() const { return profile.b0(); }
    /// the factorisation a^dagger a holds only for the lower branch with m <= 0
    bool outOfFactorizationRegime() const { return spin != SpinBranch::Lower || mQuantum > 0; }
    /// finite positive hbar and mass, radial axis; ConfigError otherwise
    void validate() const;
};

/// B^2 r^2 f^2 + 2Bmf - 2Bf - Brf' + (m^2 - 1/4)/r^2 for the lower branch;
/// the upper branch adds 2(2Bf + Brf')
double effectivePotential(const SusyProblem& problem, double r);

/// B r f(r) - p/r, the non-derivative part of the annihilation operator
double annihilationCoefficient(const SusyProblem& problem, double r);

/// W~^2 - W~' built from the annihilation coefficient (equals the lower-branch
/// potential when the factorisation holds)
double factorizedPotential(const SusyProblem& problem, double r);

/// Zero mode psi_0 = r^p exp(-S). S uses the profile's closed-form radial action when it has one,
/// otherwise a cumulative quadrature table of B s f(s) anchored at S(0) = 0.
class ZeroMode {
public:
    explicit ZeroMode(const SusyProblem& problem);

    double p() const { return p_; }
    double fieldScale() const { return b_; }
    bool closedFormAction() const { return closedForm_; }
    double action(double r) const;       ///< S(r)
    double actionDerivative(double r) const { return b_ * profile_.uf(r); }
    double logPsi(double r) const { return p_ * std::log(r) - action(r); }

private:
    FieldProfile profile_;
    double p_, b_;
    bool closedForm_;
    std::shared_ptr<const std::vector<double>> gridR_, gridS_;
};

enum class Verdict { Normalizable, NotNormalizable, Inconclusive };
std::string verdictName(Verdict v);

struct LadderRung {
    double R;
    double logIntegral;   ///< log of the truncated integral over [1/R, R]
    double logCompleted;  ///< same plus power-law estimates of the pieces outside [1/R, R]
};

struct NormalizabilityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<double> normValue;  ///< integral of psi_0^2 when it converged and is representable
    double logNormValue = NAN;
    std::vector<LadderRung> ladder;
    double tailSlope = NAN;         ///< d(2 log psi)/dr at the largest radius
    double tailLogSlope = NAN;      ///< d(2 log psi)/d(log r) at the largest radius
    double originLogSlope = NAN;    ///< d(2 log psi)/d(log r) at the smallest radius
    std::string tailReport;
};

/** Truncated integrals of psi_0^2 over [1/R, R] for R = base 2^j (j = 0..14), in log space.
    NORMALIZABLE: the rungs, completed by power-law estimates of the two ends, change by less than
    1e-10 (relative) over the last three rungs, and 2 log psi falls faster than -log r at large r
    and slower than -log r at small r. NOT_NORMALIZABLE: the truncated integrals keep growing,
    or they fail to settle while one end is not integrable. Otherwise INCONCLUSIVE. */
NormalizabilityVerdict normalizability(const ZeroMode& zeroMode, double ladderBase = 4);

/// W(r) = hbar/sqrt(2 mass) (S'(r) - p/r)
double superpotential(const ZeroMode& zeroMode, const SusyProblem& problem, double r);

enum class QuantizationConvention { HalfInteger, Integer };

struct Level {
    int n;
    double energy;
    double residual;  ///< |I(E_n) - target|
};

struct SpectrumResult {
    QuantizationConvention convention = QuantizationConvention::HalfInteger;
    std::vector<Level> levels;
};

/// SWKB quantisation integral I(E) = int sqrt(2 mass (E - W^2)) dr between the turning points.
/// I = 0 at and below the well minimum. DomainError when W^2 has no well, when more than two
/// turning points exist at the requested energy, or when E reaches the continuum threshold.
class SwkbIntegral {
public:
    explicit SwkbIntegral(const SusyProblem& problem);

    double operator()(double energy) const;
    std::pair<double, double> turningPoints(double energy) const;
    double wellMinimum() const { return wMin2_; }
    double wellBottom() const { return rMin_; }
    /// lim W^2 as r -> infinity (infinite for confining fields)
    double continuumThreshold() const { return wInf2_; }
    double w2(double r) const;
    /// number of local minima of W^2 found on the scan grid
    int wells() const { return wells_; }

private:
    SusyProblem problem_;
    double rMin_ = NAN, wMin2_ = NAN, wInf2_ = NAN;
    int wells_ = 0;
    std::vector<double> scanR_;
};

/// levels n = 0..nMax solving I(E_n) = (n + 1/2) hbar pi (or n hbar pi)
SpectrumResult swkbLevels(const SusyProblem& problem, int nMax,
                          QuantizationConvention convention = QuantizationConvention::HalfInteger);

/// pi mass E / (2 B hbar), the closed form of I(E) for a uniform field with B > 0
double swkbUniformClosedForm(const SusyProblem& problem, double energy);

/// published statement on supersymmetry for the built-in radial profiles, if any:
/// true = unbroken (normalizable zero mode), false = broken
std::optional<bool> publishedUnbroken(const FieldProfile& profile);

// output tables
std::string zeroModeCsv(const ZeroMode& zeroMode, const SusyProblem& problem, double rMin, double rMax,
                        size_t points);
std::string verdictJson(const SusyProblem& problem, const NormalizabilityVerdict& verdict);
std::string spectrumCsv(const SpectrumResult& spectrum);

}  // namespace fieldline::susy

#include "fieldline/fieldline.h"

#include "fieldline/classical_dynamics.hpp"
#include "fieldline/errors.hpp"
#include "fieldline/field_models.hpp"
#include "fieldline/lorentz_oracle.hpp"
#include "fieldline/susy_spectra.hpp"

#include <cmath>
#include <algorithm>
#include <new>
#include <optional>
#include <string>
#include <vector>

using namespace fieldline;

struct fl_profile {
    FieldProfile profile;
};

struct fl_trajectory {
    Trajectory trajectory;
};

struct fl_susy {
    susy::SusyProblem problem;
    susy::ZeroMode zeroMode;
    susy::NormalizabilityVerdict verdict;
};

namespace {

thread_local std::string lastError;

fl_status fail(fl_status status, const std::string& message)
{
    lastError = message;
    return status;
}

/// run body, translating exceptions into status codes and the thread's last error
template<class Body>
fl_status guarded(Body&& body)
{
    try {
        body();
        return FL_OK;
    } catch(const Error& e) {
        return fail(static_cast<fl_status>(e.kind()), e.what());
    } catch(const std::bad_alloc&) {
        return fail(FL_ERR_INTERNAL, "out of memory");
    } catch(const std::exception& e) {
        return fail(FL_ERR_INTERNAL, e.what());
    } catch(...) {
        return fail(FL_ERR_INTERNAL, "unknown exception");
    }
}

template<class T>
void requireArg(const T* p, const char* name)
{
    if(!p) throw UsageError(std::string("argument '") + name + "' is NULL");
}

GaugeAxis toAxis(fl_axis axis)
{
    switch(axis) {
        case FL_AXIS_Y: return GaugeAxis::Y;
        case FL_AXIS_X: return GaugeAxis::X;
        case FL_AXIS_RADIAL: return GaugeAxis::Radial;
    }
    throw ConfigError("unknown axis code " + std::to_string(static_cast<int>(axis)));
}

fl_axis fromAxis(GaugeAxis axis)
{
    switch(axis) {
        case GaugeAxis::Y: return FL_AXIS_Y;
        case GaugeAxis::X: return FL_AXIS_X;
        case GaugeAxis::Radial: return FL_AXIS_RADIAL;
    }
    return FL_AXIS_Y;
}

ParticleParams toParticle(const fl_particle& p)
{
    return ParticleParams{p.q, p.m, p.x0, p.y0, p.vx0, p.vy0};
}

fl_particle fromParticle(const ParticleParams& p)
{
    return fl_particle{p.q, p.m, p.x0, p.y0, p.vx0, p.vy0};
}

MotionConstants toConstants(const fl_constants& c) { return MotionConstants{c.k1, c.k2, c.k3}; }

fl_profile* wrap(FieldProfile profile) { return new fl_profile{std::move(profile)}; }

std::string pathArg(const char* path)
{
    requireArg(path, "path");
    if(!*path) throw ConfigError("empty output path");
    return path;
}

QuadratureSettings quadratureSettings(const fl_solver_settings* s)
{
    QuadratureSettings q;
    if(s) {
        q.tolerance = s->quadrature_tol;
        q.nodesPerLeg = s->nodes_per_leg;
    }
    if(!(q.tolerance > 0) || !std::isfinite(q.tolerance))
        throw ConfigError("quadrature tolerance must be positive and finite");
    if(q.nodesPerLeg < 8) throw ConfigError("nodes_per_leg must be at least 8");
    return q;
}

OdeSettings odeSettings(const fl_solver_settings* s)
{
    OdeSettings o;
    if(s) {
        o.dtInitial = s->ode_dt_initial;
        o.relTol = s->ode_rel_tol;
        o.absTol = s->ode_abs_tol;
        o.maxSteps = s->ode_max_steps;
    }
    o.validate();
    return o;
}

FieldProfile fieldTableProfile(std::vector<double> u, std::vector<double> field, double c, fl_axis axis,
                               double b0, double anchor)
{
    if(!(std::isfinite(b0) && b0 != 0)) throw ConfigError("field table inversion needs a finite nonzero b0");
    for(double& v : field) v /= b0;
    math::MonotoneCubic shape(std::move(u), std::move(field));
    return profileFromField([shape](double x) { return shape(x); }, c, toAxis(axis), b0, anchor, {},
                            "field_table");
}

}  // namespace

extern "C" {

const char* fl_last_error(void) { return lastError.c_str(); }

const char* fl_status_name(fl_status status)
{
    switch(status) {
        case FL_OK: return "ok";
        case FL_ERR_CONFIG: return "config";
        case FL_ERR_NUMERIC: return "numeric";
        case FL_ERR_INVARIANT: return "invariant";
        case FL_ERR_DOMAIN: return "domain";
        case FL_ERR_USAGE: return "usage";
        case FL_ERR_IO: return "io";
        case FL_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* fl_version(void) { return "0.1.0"; }

// ------------------------------------------------------------------------------ profiles

fl_status fl_profile_builtin(fl_builtin kind, double b0, double a, double b, fl_profile** out)
{
    return guarded([&] {
        requireArg(out, "out");
        BuiltinKind k;
        switch(kind) {
            case FL_UNIFORM: k = BuiltinKind::Uniform; break;
            case FL_ZERO_FIELD: k = BuiltinKind::ZeroField; break;
            case FL_EXP_DECAY: k = BuiltinKind::ExpDecay; break;
            case FL_RADIAL_EXP: k = BuiltinKind::RadialExp; break;
            case FL_RATIONAL_AB: k = BuiltinKind::RationalAB; break;
            default: throw ConfigError("unknown built-in profile code " + std::to_string(static_cast<int>(kind)));
        }
        *out = wrap(makeBuiltin(k, b0, a, b));
    });
}

fl_status fl_profile_by_name(const char* name, double b0, double a, double b, fl_profile** out)
{
    return guarded([&] {
        requireArg(name, "name");
        requireArg(out, "out");
        *out = wrap(makeBuiltin(std::string(name), b0, a, b));
    });
}

fl_status fl_profile_table(const double* u, const double* f, size_t n, fl_axis axis, double b0, fl_profile** out)
{
    return guarded([&] {
        requireArg(u, "u");
        requireArg(f, "f");
        requireArg(out, "out");
        *out = wrap(profileFromTable(std::vector<double>(u, u + n), std::vector<double>(f, f + n), toAxis(axis),
                                     b0));
    });
}

fl_status fl_profile_table_csv(const char* path, fl_axis axis, double b0, fl_profile** out)
{
    return guarded([&] {
        requireArg(out, "out");
        std::vector<double> u, f;
        readTwoColumnCsv(pathArg(path), "u", "f", u, f);
        *out = wrap(profileFromTable(std::move(u), std::move(f), toAxis(axis), b0));
    });
}

fl_status fl_profile_from_field(fl_scalar_fn shape, void* user, double c, fl_axis axis, double b0, double anchor,
                                fl_profile** out)
{
    return guarded([&] {
        if(!shape) throw UsageError("argument 'shape' is NULL");
        requireArg(out, "out");
        *out = wrap(profileFromField([shape, user](double u) { return shape(u, user); }, c, toAxis(axis), b0,
                                     anchor));
    });
}

fl_status fl_profile_from_field_table(const double* u, const double* field, size_t n, double c, fl_axis axis,
                                      double b0, double anchor, fl_profile** out)
{
    return guarded([&] {
        requireArg(u, "u");
        requireArg(field, "field");
        requireArg(out, "out");
        *out = wrap(fieldTableProfile(std::vector<double>(u, u + n), std::vector<double>(field, field + n), c, axis,
                                      b0, anchor));
    });
}

fl_status fl_profile_from_field_csv(const char* path, double c, fl_axis axis, double b0, double anchor,
                                    fl_profile** out)
{
    return guarded([&] {
        requireArg(out, "out");
        std::vector<double> u, field;
        readTwoColumnCsv(pathArg(path), "u", "B", u, field);
        *out = wrap(fieldTableProfile(std::move(u), std::move(field), c, axis, b0, anchor));
    });
}

fl_status fl_profile_with_axis(const fl_profile* profile, fl_axis axis, fl_profile** out)
{
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(out, "out");
        *out = wrap(profile->profile.withAxis(toAxis(axis)));
    });
}

fl_status fl_profile_with_scale(const fl_profile* profile, double b0, fl_profile** out)
{
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(out, "out");
        *out = wrap(profile->profile.withScale(b0));
    });
}

void fl_profile_free(fl_profile* profile) { delete profile; }

fl_status fl_profile_info(const fl_profile* profile, fl_axis* axis, double* b0)
{
    return guarded([&] {
        requireArg(profile, "profile");
        if(axis) *axis = fromAxis(profile->profile.axis());
        if(b0) *b0 = profile->profile.b0();
    });
}

const char* fl_profile_label(const fl_profile* profile)
{
    return profile ? profile->profile.label().c_str() : "";
}

fl_status fl_profile_eval(const fl_profile* profile, double u, double* f, double* f_prime, double* field)
{
    return guarded([&] {
        requireArg(profile, "profile");
        const FieldProfile& p = profile->profile;
        double vf = f ? p.f(u) : 0, vfp = f_prime ? p.fPrime(u) : 0, vb = field ? evalB(p, u) : 0;
        if(f) *f = vf;
        if(f_prime) *f_prime = vfp;
        if(field) *field = vb;
    });
}

fl_status fl_field_write_csv(const fl_profile* profile, double u_min, double u_max, size_t points, const char* path)
{
    return guarded([&] {
        requireArg(profile, "profile");
        std::string p = pathArg(path);
        math::writeFileAtomic(p, fieldTableCsv(profile->profile, u_min, u_max, points));
    });
}

// ------------------------------------------------------------------- particles, constants

fl_status fl_derive_constants(const fl_profile* profile, const fl_particle* particle, fl_constants* out)
{
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(particle, "particle");
        requireArg(out, "out");
        MotionConstants c = deriveConstants(toParticle(*particle), profile->profile);
        *out = fl_constants{c.k1, c.k2, c.k3};
    });
}

fl_status fl_particle_from_constants(const fl_profile* profile, const fl_constants* constants, double q, double m,
                                     int sign, const double* u0, fl_particle* out)
{
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(constants, "constants");
        requireArg(out, "out");
        std::optional<double> start;
        if(u0) start = *u0;
        *out = fromParticle(particleFromConstants(toConstants(*constants), profile->profile, q, m, sign, start));
    });
}

fl_status fl_radicand(const fl_profile* profile, const fl_constants* constants, double u, double* out)
{
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(constants, "constants");
        requireArg(out, "out");
        *out = radicand(toConstants(*constants), profile->profile, u);
    });
}

// -------------------------------------------------------------------------- trajectories

void fl_solver_settings_default(fl_solver_settings* settings)
{
    if(!settings) return;
    QuadratureSettings q;
    OdeSettings o;
    *settings = fl_solver_settings{q.tolerance, q.nodesPerLeg, o.dtInitial, o.relTol, o.absTol, o.maxSteps};
}

fl_status fl_trajectory_compute(const fl_profile* profile, const fl_particle* particle, fl_method method,
                                double t_end, size_t n_samples, const fl_solver_settings* settings,
                                fl_trajectory** out)
{
    if(out) *out = nullptr;
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(particle, "particle");
        requireArg(out, "out");
        ParticleParams params = toParticle(*particle);
        switch(method) {
            case FL_METHOD_QUADRATURE:
                *out = new fl_trajectory{trajectoryQuadrature(params, profile->profile, t_end, n_samples,
                                                              quadratureSettings(settings))};
                break;
            case FL_METHOD_CLOSED_FORM:
                *out = new fl_trajectory{trajectoryClosedForm(params, profile->profile, t_end, n_samples)};
                break;
            case FL_METHOD_ODE:
                try {
                    *out = new fl_trajectory{
                        integrateLorentz(profile->profile, params, t_end, n_samples, odeSettings(settings))};
                } catch(const IntegrationFailure& e) {
                    *out = new fl_trajectory{e.partial()};
                    throw;
                }
                break;
            default: throw ConfigError("unknown method code " + std::to_string(static_cast<int>(method)));
        }
    });
}

void fl_trajectory_free(fl_trajectory* trajectory) { delete trajectory; }

size_t fl_trajectory_size(const fl_trajectory* trajectory)
{
    return trajectory ? trajectory->trajectory.samples.size() : 0;
}

fl_status fl_trajectory_sample(const fl_trajectory* trajectory, size_t index, fl_sample* out)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        requireArg(out, "out");
        const auto& samples = trajectory->trajectory.samples;
        if(index >= samples.size())
            throw UsageError("sample index " + std::to_string(index) + " out of range (size " +
                             std::to_string(samples.size()) + ")");
        const Sample& s = samples[index];
        *out = fl_sample{s.t, s.x, s.y, s.vx, s.vy, s.energyResidual, s.momentumResidual};
    });
}

fl_status fl_trajectory_constants(const fl_trajectory* trajectory, fl_constants* out)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        requireArg(out, "out");
        const MotionConstants& c = trajectory->trajectory.constants;
        *out = fl_constants{c.k1, c.k2, c.k3};
    });
}

fl_status fl_trajectory_orbit(const fl_trajectory* trajectory, fl_orbit* out)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        requireArg(out, "out");
        const OrbitInfo& o = trajectory->trajectory.orbit;
        *out = fl_orbit{o.bounded ? 1 : 0, o.lower, o.upper, o.period};
    });
}

fl_status fl_trajectory_max_residuals(const fl_trajectory* trajectory, double* energy, double* momentum)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        if(energy) *energy = trajectory->trajectory.maxEnergyResidual();
        if(momentum) *momentum = trajectory->trajectory.maxMomentumResidual();
    });
}

fl_status fl_trajectory_check_invariants(const fl_trajectory* trajectory, double energy_tol, double momentum_tol)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        const Trajectory& t = trajectory->trajectory;
        double e = t.maxEnergyResidual(), p = t.maxMomentumResidual();
        double pTol = momentum_tol * std::max(std::sqrt(t.constants.k3), 1e-12);
        if(!(e <= energy_tol))
            throw InvariantError(methodName(t.method) + ": energy residual " + math::formatDouble(e) +
                                 " exceeds " + math::formatDouble(energy_tol));
        if(!(p <= pTol))
            throw InvariantError(methodName(t.method) + ": gauge-momentum residual " + math::formatDouble(p) +
                                 " exceeds " + math::formatDouble(pTol));
    });
}

fl_status fl_trajectory_write_csv(const fl_trajectory* trajectory, const char* path)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        writeTrajectoryCsv(trajectory->trajectory, pathArg(path));
    });
}

fl_status fl_trajectory_write_json(const fl_trajectory* trajectory, const char* path)
{
    return guarded([&] {
        requireArg(trajectory, "trajectory");
        writeTrajectoryJson(trajectory->trajectory, pathArg(path));
    });
}

fl_status fl_trajectory_compare(const fl_trajectory* a, const fl_trajectory* b, fl_deviation* out)
{
    return guarded([&] {
        requireArg(a, "a");
        requireArg(b, "b");
        requireArg(out, "out");
        DeviationReport r = compareTrajectories(a->trajectory, b->trajectory);
        *out = fl_deviation{r.maxPosition, r.rmsPosition, r.maxEnergyResidualDiff, r.timeOfMax, r.samples};
    });
}

fl_status fl_oracle_period(const fl_profile* profile, const fl_particle* particle, double t_end,
                           const fl_solver_settings* settings, int component, double level, double* period)
{
    return guarded([&] {
        requireArg(profile, "profile");
        requireArg(particle, "particle");
        requireArg(period, "period");
        if(component < 0 || component > 3) throw UsageError("component must be 0..3 (x, y, vx, vy)");
        DenseSolution sol = integrateDense(profile->profile, toParticle(*particle), t_end, odeSettings(settings));
        *period = periodFromCrossings(sol.crossings(static_cast<size_t>(component), level, +1));
    });
}

fl_status fl_closed_form_uniform(const fl_constants* constants, double t, double* x, double* y)
{
    return guarded([&] {
        requireArg(constants, "constants");
        PlanePosition p = closedFormUniform(toConstants(*constants), t);
        if(x) *x = p.x;
        if(y) *y = p.y;
    });
}

fl_status fl_closed_form_exponential(const fl_constants* constants, double t, int sign, double* x, double* y)
{
    return guarded([&] {
        requireArg(constants, "constants");
        PlanePosition p = closedFormExponential(toConstants(*constants), t, sign);
        if(x) *x = p.x;
        if(y) *y = p.y;
    });
}

fl_status fl_exp_constants_from(const fl_constants* constants, fl_exp_constants* out)
{
    return guarded([&] {
        requireArg(constants, "constants");
        requireArg(out, "out");
        ExpClosedFormConstants e = ExpClosedFormConstants::from(toConstants(*constants));
        *out = fl_exp_constants{e.alpha2, e.beta, e.l, e.mAux, e.valid() ? 1 : 0};
    });
}

// ---------------------------------------------------------------------------------- SUSY

void fl_susy_params_default(fl_susy_params* params)
{
    if(params) *params = fl_susy_params{0, FL_SPIN_LOWER, 1.0, 1.0, 4.0};
}

fl_status fl_susy_analyze(const fl_profile* radial, const fl_susy_params* params, fl_susy** out)
{
    if(out) *out = nullptr;
    return guarded([&] {
        requireArg(radial, "radial");
        requireArg(out, "out");
        fl_susy_params prm;
        fl_susy_params_default(&prm);
        if(params) prm = *params;
        if(prm.spin != FL_SPIN_LOWER && prm.spin != FL_SPIN_UPPER) throw ConfigError("unknown spin branch");
        if(!(prm.ladder_base > 0) || !std::isfinite(prm.ladder_base))
            throw ConfigError("ladder base must be positive and finite");
        susy::SusyProblem problem{radial->profile, prm.m,
                                  prm.spin == FL_SPIN_LOWER ? susy::SpinBranch::Lower : susy::SpinBranch::Upper,
                                  prm.hbar, prm.mass};
        problem.validate();
        susy::ZeroMode zm(problem);
        susy::NormalizabilityVerdict v = susy::normalizability(zm, prm.ladder_base);
        *out = new fl_susy{std::move(problem), std::move(zm), std::move(v)};
    });
}

void fl_susy_free(fl_susy* susy) { delete susy; }

fl_status fl_susy_get_report(const fl_susy* s, fl_susy_report* out)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(out, "out");
        const susy::NormalizabilityVerdict& v = s->verdict;
        fl_susy_report r{};
        r.verdict = v.verdict == susy::Verdict::Normalizable      ? FL_NORMALIZABLE
                    : v.verdict == susy::Verdict::NotNormalizable ? FL_NOT_NORMALIZABLE
                                                                  : FL_INCONCLUSIVE;
        r.log_norm = v.logNormValue;
        r.tail_slope = v.tailSlope;
        r.origin_log_slope = v.originLogSlope;
        r.out_of_factorization_regime = s->problem.outOfFactorizationRegime() ? 1 : 0;
        r.closed_form_action = s->zeroMode.closedFormAction() ? 1 : 0;
        std::optional<bool> claim = susy::publishedUnbroken(s->problem.profile);
        r.published_claim = claim ? (*claim ? 1 : 0) : -1;
        r.published_claim_agrees = -1;
        if(claim && v.verdict != susy::Verdict::Inconclusive)
            r.published_claim_agrees = *claim == (v.verdict == susy::Verdict::Normalizable) ? 1 : 0;
        *out = r;
    });
}

fl_status fl_susy_action(const fl_susy* s, double r, double* out)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(out, "out");
        *out = s->zeroMode.action(r);
    });
}

fl_status fl_susy_log_psi(const fl_susy* s, double r, double* out)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(out, "out");
        *out = s->zeroMode.logPsi(r);
    });
}

fl_status fl_susy_superpotential(const fl_susy* s, double r, double* out)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(out, "out");
        *out = susy::superpotential(s->zeroMode, s->problem, r);
    });
}

fl_status fl_susy_effective_potential(const fl_susy* s, double r, double* out)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(out, "out");
        *out = susy::effectivePotential(s->problem, r);
    });
}

fl_status fl_susy_swkb_integral(const fl_susy* s, double energy, double* out)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(out, "out");
        *out = susy::SwkbIntegral(s->problem)(energy);
    });
}

fl_status fl_susy_levels(const fl_susy* s, int n_max, fl_convention convention, double* energies, double* residuals)
{
    return guarded([&] {
        requireArg(s, "susy");
        requireArg(energies, "energies");
        susy::SpectrumResult res = susy::swkbLevels(s->problem, n_max,
                                                    convention == FL_INTEGER
                                                        ? susy::QuantizationConvention::Integer
                                                        : susy::QuantizationConvention::HalfInteger);
        for(size_t i = 0; i < res.levels.size(); i++) {
            energies[i] = res.levels[i].energy;
            if(residuals) residuals[i] = res.levels[i].residual;
        }
    });
}

fl_status fl_susy_write_zero_mode_csv(const fl_susy* s, double r_min, double r_max, size_t points, const char* path)
{
    return guarded([&] {
        requireArg(s, "susy");
        std::string p = pathArg(path);
        math::writeFileAtomic(p, susy::zeroModeCsv(s->zeroMode, s->problem, r_min, r_max, points));
    });
}

fl_status fl_susy_write_verdict_json(const fl_susy* s, const char* path)
{
    return guarded([&] {
        requireArg(s, "susy");
        std::string p = pathArg(path);
        math::writeFileAtomic(p, susy::verdictJson(s->problem, s->verdict));
    });
}

fl_status fl_susy_write_spectrum_csv(const fl_susy* s, int n_max, fl_convention convention, const char* path)
{
    return guarded([&] {
        requireArg(s, "susy");
        std::string p = pathArg(path);
        susy::SpectrumResult res = susy::swkbLevels(s->problem, n_max,
                                                    convention == FL_INTEGER
                                                        ? susy::QuantizationConvention::Integer
                                                        : susy::QuantizationConvention::HalfInteger);
        math::writeFileAtomic(p, susy::spectrumCsv(res));
    });
}

}  // extern "C"

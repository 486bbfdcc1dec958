#include "commands.hpp"

#include "log.hpp"
#include "svg_plot.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>

namespace fieldline::cli {

using nlohmann::ordered_json;

namespace {

ordered_json finiteOrNull(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string shortNumber(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void ensureOutputDir(const RunConfig& config)
{
    std::error_code ec;
    std::filesystem::create_directories(config.output.dir, ec);
    if(ec)
        throw Failure(ExitConfig, "output: cannot create directory '" + config.output.dir.string() +
                                      "': " + ec.message());
}

std::string stemPath(const RunConfig& config, const std::string& suffix)
{
    return config.outputStem().string() + suffix;
}

void requireTime(const RunConfig& config)
{
    if(!std::isfinite(config.tEnd)) throw Failure(ExitConfig, "config: 'time.t_end' is required");
}

/// a failed trajectory computation, keeping the library status
class TrajectoryFailure : public Failure {
public:
    TrajectoryFailure(fl_status status, const std::string& what) : Failure(exitCodeFor(status), what), status(status) {}
    fl_status status;
};

TrajectoryHandle computeTrajectory(const RunConfig& config, const fl_profile* profile, const fl_particle& particle,
                                   fl_method method)
{
    fl_trajectory* raw = nullptr;
    fl_status st = fl_trajectory_compute(profile, &particle, method, config.tEnd, config.samples, &config.solver, &raw);
    TrajectoryHandle handle(raw);
    if(st != FL_OK) {
        std::string msg = "trajectory[" + methodLabel(method) + "]: " + fl_last_error();
        if(handle && fl_trajectory_size(handle.get()) > 0) {
            fl_sample last{};
            fl_trajectory_sample(handle.get(), fl_trajectory_size(handle.get()) - 1, &last);
            msg += " (integrated up to t = " + shortNumber(last.t) + ")";
        }
        throw TrajectoryFailure(st, msg);
    }
    return handle;
}

void writeTrajectoryFiles(const RunConfig& config, const fl_trajectory* trajectory, fl_method method,
                          std::vector<std::string>& summary)
{
    std::string base = stemPath(config, "_" + methodLabel(method));
    if(config.output.csv) {
        check(fl_trajectory_write_csv(trajectory, (base + ".csv").c_str()), "output");
        log(LogLevel::Info, "wrote " + base + ".csv");
    }
    if(config.output.json) {
        check(fl_trajectory_write_json(trajectory, (base + ".json").c_str()), "output");
        log(LogLevel::Info, "wrote " + base + ".json");
    }
    if(config.output.plot) {
        size_t n = fl_trajectory_size(trajectory);
        std::vector<double> x(n), y(n);
        for(size_t i = 0; i < n; i++) {
            fl_sample s{};
            check(fl_trajectory_sample(trajectory, i, &s), "plot");
            x[i] = s.x;
            y[i] = s.y;
        }
        std::string title = config.output.prefix + " (" + methodLabel(method) + ")";
        writeFileAtomic(base + ".svg", trajectorySvg(x, y, title));
        log(LogLevel::Info, "wrote " + base + ".svg");
    }
    summary.push_back("wrote " + base + ".*");
}

/// FL_ERR_INVARIANT turns into exit code 4; everything else propagates as a Failure
bool invariantsHold(const RunConfig& config, const fl_trajectory* trajectory, std::string& message)
{
    fl_status st = fl_trajectory_check_invariants(trajectory, config.energyInvariant, config.momentumInvariant);
    if(st == FL_ERR_INVARIANT) {
        message = std::string("invariant: ") + fl_last_error();
        return false;
    }
    check(st, "invariant check");
    return true;
}

ordered_json orbitJson(const fl_trajectory* trajectory)
{
    fl_orbit orbit{};
    check(fl_trajectory_orbit(trajectory, &orbit), "orbit");
    if(!orbit.bounded) return {{"bounded", false}};
    return {{"bounded", true},
            {"lower_turning_point", finiteOrNull(orbit.lower)},
            {"upper_turning_point", finiteOrNull(orbit.upper)},
            {"period", finiteOrNull(orbit.period)}};
}

const fl_trajectory* findRun(const std::vector<MethodRun>& runs, fl_method method)
{
    for(const MethodRun& r : runs)
        if(r.method == method && r.trajectory) return r.trajectory.get();
    return nullptr;
}

/// max |y_ode(t) - log(l sin(sign alpha t) + m_aux)| over the ODE samples
double logFormDeviation(const fl_trajectory* ode, double l, double mAux, double alpha, int sign)
{
    double worst = 0;
    size_t n = fl_trajectory_size(ode);
    for(size_t i = 0; i < n; i++) {
        fl_sample s{};
        check(fl_trajectory_sample(ode, i, &s), "adjudication");
        double arg = l * std::sin(sign * alpha * s.t) + mAux;
        if(!(arg > 0)) return INFINITY;
        worst = std::max(worst, std::fabs(s.y - std::log(arg)));
    }
    return worst;
}

std::optional<ordered_json> yAdjudication(const RunConfig& config, const fl_particle& particle,
                                          const std::vector<MethodRun>& runs)
{
    if(config.profile.name != "exp_decay") return std::nullopt;
    const fl_trajectory* ode = findRun(runs, FL_METHOD_ODE);
    if(!ode) return std::nullopt;

    ordered_json j;
    j["reference"] = "ode";
    fl_constants k{};
    check(fl_trajectory_constants(ode, &k), "adjudication");
    fl_exp_constants e{};
    check(fl_exp_constants_from(&k, &e), "adjudication");
    if(!e.valid) {
        j["skipped"] = "no logarithmic closed form for these constants (alpha^2 <= 0 or m_aux <= |l|)";
        return j;
    }
    const double alpha = std::sqrt(e.alpha2);
    // the log form has its phase origin where y = log(m_aux); the branch follows the sign of vy there
    const int sign = particle.vy0 * e.l >= 0 ? 1 : -1;
    double x0 = 0, y0 = 0;
    check(fl_closed_form_exponential(&k, 0, sign, &x0, &y0), "adjudication");
    if(std::fabs(particle.y0 - y0) > 1e-9 * (1 + std::fabs(y0))) {
        j["skipped"] = "the run does not start at the phase origin of the closed form";
        return j;
    }
    const double tolerance = 1e-5;
    double derived = logFormDeviation(ode, e.l, e.m_aux, alpha, sign);
    j["tolerance"] = tolerance;
    j["derived"] = {{"l", e.l}, {"m_aux", e.m_aux}, {"alpha", alpha}, {"max_abs_y_deviation", finiteOrNull(derived)}};
    bool derivedOk = derived < tolerance, plottedOk = false;
    if(config.compare.plotted) {
        const PlottedLogForm& p = *config.compare.plotted;
        double plotted = logFormDeviation(ode, p.l, p.mAux, alpha, sign);
        plottedOk = plotted < tolerance;
        j["plotted"] = {{"l", p.l}, {"m_aux", p.mAux}, {"alpha", alpha},
                        {"max_abs_y_deviation", finiteOrNull(plotted)}};
    }
    j["y_matches"] = derivedOk && plottedOk ? "both" : derivedOk ? "derived" : plottedOk ? "plotted" : "neither";
    return j;
}

ordered_json particleJson(const fl_particle& p)
{
    return {{"q", p.q}, {"m", p.m}, {"x0", p.x0}, {"y0", p.y0}, {"vx0", p.vx0}, {"vy0", p.vy0}};
}

}  // namespace

ProfileHandle buildProfile(const RunConfig& config)
{
    const ProfileSpec& spec = config.profile;
    double b0 = spec.b0.value_or(1);
    if(config.constants) {
        const ConstantsSpec& c = *config.constants;
        double implied = c.k.k2 * c.m / c.q;
        if(spec.b0 && std::fabs(*spec.b0 - implied) > 1e-12 * std::max(1.0, std::fabs(implied)))
            throw Failure(ExitConfig, "config: profile.b0 = " + shortNumber(*spec.b0) +
                                          " contradicts constants.k2 m / q = " + shortNumber(implied));
        b0 = implied;
    }
    fl_profile* raw = nullptr;
    fl_axis axis = spec.axis.value_or(FL_AXIS_Y);
    if(spec.table)
        check(fl_profile_table_csv(spec.table->c_str(), axis, b0, &raw), "profile");
    else if(spec.fieldTable)
        check(fl_profile_from_field_csv(spec.fieldTable->c_str(), spec.c, axis, b0, spec.anchor, &raw), "profile");
    else
        check(fl_profile_by_name(spec.name.c_str(), b0, spec.a, spec.b, &raw), "profile");
    ProfileHandle profile(raw);
    if(spec.axis && !spec.table && !spec.fieldTable) {
        fl_axis current{};
        check(fl_profile_info(profile.get(), &current, nullptr), "profile");
        if(current != *spec.axis) {
            check(fl_profile_with_axis(profile.get(), *spec.axis, &raw), "profile");
            profile.reset(raw);
        }
    }
    return profile;
}

fl_particle resolveParticle(const RunConfig& config, const fl_profile* profile)
{
    if(config.particle) return *config.particle;
    if(!config.constants) throw Failure(ExitConfig, "config: 'particle' or 'constants' is required");
    const ConstantsSpec& c = *config.constants;
    fl_particle p{};
    const double* u0 = c.u0 ? &*c.u0 : nullptr;
    check(fl_particle_from_constants(profile, &c.k, c.q, c.m, c.sign, u0, &p), "initial conditions");
    return p;
}

ordered_json comparisonReport(const RunConfig& config, const fl_profile* profile, const fl_particle& particle,
                              const std::vector<MethodRun>& runs)
{
    ordered_json report;
    report["label"] = config.output.prefix;
    fl_axis axis{};
    double b0 = 0;
    check(fl_profile_info(profile, &axis, &b0), "report");
    report["profile"] = {{"label", fl_profile_label(profile)},
                         {"axis", axis == FL_AXIS_Y ? "y" : axis == FL_AXIS_X ? "x" : "radial"},
                         {"b0", b0}};
    report["particle"] = particleJson(particle);
    fl_constants k{};
    if(fl_derive_constants(profile, &particle, &k) == FL_OK)
        report["constants"] = {{"k1", k.k1}, {"k2", k.k2}, {"k3", k.k3}};
    report["t_end"] = config.tEnd;
    report["samples"] = config.samples;

    ordered_json methods = ordered_json::array();
    for(const MethodRun& r : runs) {
        ordered_json m;
        m["method"] = methodLabel(r.method);
        if(!r.trajectory) {
            m["status"] = "not_applicable";
            m["note"] = r.note;
        } else {
            double e = 0, p = 0;
            check(fl_trajectory_max_residuals(r.trajectory.get(), &e, &p), "report");
            m["status"] = "ok";
            m["max_energy_residual"] = e;
            m["max_momentum_residual"] = p;
            m["orbit"] = orbitJson(r.trajectory.get());
        }
        methods.push_back(std::move(m));
    }
    report["methods"] = std::move(methods);

    ordered_json pairs = ordered_json::array();
    for(size_t i = 0; i < runs.size(); i++) {
        for(size_t j = i + 1; j < runs.size(); j++) {
            if(!runs[i].trajectory || !runs[j].trajectory) continue;
            fl_deviation d{};
            check(fl_trajectory_compare(runs[i].trajectory.get(), runs[j].trajectory.get(), &d), "compare");
            pairs.push_back({{"a", methodLabel(runs[i].method)},
                             {"b", methodLabel(runs[j].method)},
                             {"max_position_deviation", d.max_position},
                             {"rms_position_deviation", d.rms_position},
                             {"max_energy_residual_diff", d.max_energy_residual_diff},
                             {"time_of_max", d.time_of_max},
                             {"samples", d.samples}});
        }
    }
    report["pairs"] = std::move(pairs);
    if(auto adj = yAdjudication(config, particle, runs)) report["y_adjudication"] = std::move(*adj);
    return report;
}

RunOutcome cmdTrajectory(const RunConfig& config)
{
    RunOutcome out;
    requireTime(config);
    ProfileHandle profile = buildProfile(config);
    fl_particle particle = resolveParticle(config, profile.get());
    ensureOutputDir(config);

    const std::vector<fl_method> methods = config.methods();
    const bool all = methods.size() > 1;
    std::vector<MethodRun> runs;
    for(fl_method method : methods) {
        MethodRun run{method, nullptr, ""};
        try {
            run.trajectory = computeTrajectory(config, profile.get(), particle, method);
        } catch(const TrajectoryFailure& f) {
            // under method=all a method that does not apply to the profile is reported, not fatal
            if(!all || method == FL_METHOD_ODE || f.status != FL_ERR_DOMAIN) throw;
            run.note = f.what();
            log(LogLevel::Warn, std::string(f.what()) + " (skipped)");
        }
        runs.push_back(std::move(run));
    }

    std::string invariantMessage;
    for(const MethodRun& run : runs) {
        if(!run.trajectory) continue;
        writeTrajectoryFiles(config, run.trajectory.get(), run.method, out.summary);
        fl_orbit orbit{};
        check(fl_trajectory_orbit(run.trajectory.get(), &orbit), "orbit");
        if(orbit.bounded)
            out.summary.push_back(methodLabel(run.method) + ": bounded, turning points [" + shortNumber(orbit.lower) +
                                  ", " + shortNumber(orbit.upper) + "], period " + shortNumber(orbit.period));
        std::string msg;
        if(invariantMessage.empty() && !invariantsHold(config, run.trajectory.get(), msg)) invariantMessage = msg;
    }
    if(all) {
        std::string path = stemPath(config, "_comparison.json");
        writeFileAtomic(path, comparisonReport(config, profile.get(), particle, runs).dump(2) + "\n");
        out.summary.push_back("wrote " + path);
    }
    if(!invariantMessage.empty()) {
        out.exitCode = ExitInvariant;
        out.message = invariantMessage;
    }
    return out;
}

RunOutcome cmdField(const RunConfig& config)
{
    RunOutcome out;
    if(!config.fieldGrid) throw Failure(ExitConfig, "config: 'field_grid' is required for the field command");
    ProfileHandle profile = buildProfile(config);
    ensureOutputDir(config);
    const FieldGrid& g = *config.fieldGrid;
    std::string path = stemPath(config, "_field.csv");
    check(fl_field_write_csv(profile.get(), g.uMin, g.uMax, g.points, path.c_str()), "field");
    out.summary.push_back("wrote " + path);
    return out;
}

RunOutcome cmdSusy(const RunConfig& config)
{
    RunOutcome out;
    ProfileHandle profile = buildProfile(config);
    ensureOutputDir(config);
    const SusySpec& s = config.susy;

    fl_susy* raw = nullptr;
    check(fl_susy_analyze(profile.get(), &s.params, &raw), "susy");
    SusyHandle susy(raw);
    fl_susy_report report{};
    check(fl_susy_get_report(susy.get(), &report), "susy");

    std::string zeroPath = stemPath(config, "_zero_mode.csv"), verdictPath = stemPath(config, "_verdict.json");
    check(fl_susy_write_zero_mode_csv(susy.get(), s.rMin, s.rMax, s.points, zeroPath.c_str()), "zero mode");
    check(fl_susy_write_verdict_json(susy.get(), verdictPath.c_str()), "verdict");
    out.summary.push_back("wrote " + zeroPath);
    out.summary.push_back("wrote " + verdictPath);

    static const char* verdictNames[] = {"NORMALIZABLE", "NOT_NORMALIZABLE", "INCONCLUSIVE"};
    std::string line = std::string("verdict: ") + verdictNames[report.verdict];
    if(report.published_claim >= 0) {
        line += std::string(", published claim: ") + (report.published_claim ? "unbroken" : "broken");
        if(report.published_claim_agrees >= 0)
            line += report.published_claim_agrees ? " (agrees)" : " (disagrees)";
    }
    out.summary.push_back(line);

    if(report.out_of_factorization_regime) {
        out.exitCode = ExitNumeric;
        out.message = "susy: out_of_factorization_regime is set (spin branch upper or m > 0); "
                      "the zero mode of a^dagger a does not describe this sector";
        return out;
    }
    if(s.spectrum) {
        std::string specPath = stemPath(config, "_spectrum.csv");
        fl_status st = fl_susy_write_spectrum_csv(susy.get(), s.levels - 1, s.convention, specPath.c_str());
        if(st != FL_OK) {
            out.exitCode = exitCodeFor(st) == ExitConfig ? ExitConfig : ExitNumeric;
            out.message = std::string("swkb: ") + fl_last_error();
            return out;
        }
        out.summary.push_back("wrote " + specPath);
    }
    return out;
}

RunOutcome cmdCompare(const RunConfig& config)
{
    RunOutcome out;
    requireTime(config);
    std::vector<fl_method> methods = config.compare.methods.empty() ? config.methods() : config.compare.methods;
    if(methods.size() < 2)
        throw Failure(ExitConfig, "config: compare needs at least two methods (compare.methods or method = all)");
    ProfileHandle profile = buildProfile(config);
    fl_particle particle = resolveParticle(config, profile.get());
    ensureOutputDir(config);

    std::vector<MethodRun> runs;
    for(fl_method method : methods) {
        MethodRun run{method, nullptr, ""};
        try {
            run.trajectory = computeTrajectory(config, profile.get(), particle, method);
        } catch(const Failure& f) {
            throw Failure(f.exitCode() == ExitConfig ? ExitConfig : ExitNumeric, f.what());
        }
        runs.push_back(std::move(run));
    }
    std::string path = stemPath(config, "_comparison.json");
    ordered_json report = comparisonReport(config, profile.get(), particle, runs);
    writeFileAtomic(path, report.dump(2) + "\n");
    out.summary.push_back("wrote " + path);
    for(const auto& pair : report["pairs"])
        out.summary.push_back(pair["a"].get<std::string>() + " vs " + pair["b"].get<std::string>() +
                              ": max position deviation " + shortNumber(pair["max_position_deviation"].get<double>()));
    if(report.contains("y_adjudication") && report["y_adjudication"].contains("y_matches"))
        out.summary.push_back("y(t) follows the " + report["y_adjudication"]["y_matches"].get<std::string>() +
                              " logarithmic form");

    for(const MethodRun& run : runs) {
        std::string msg;
        if(!invariantsHold(config, run.trajectory.get(), msg)) {
            out.exitCode = ExitInvariant;
            out.message = msg;
            break;
        }
    }
    return out;
}

int dispatch(const RunConfig& config, RunOutcome (*command)(const RunConfig&))
{
    auto guardedRun = [command](const RunConfig& cfg) {
        try {
            return command(cfg);
        } catch(const Failure& f) {
            RunOutcome o;
            o.exitCode = f.exitCode();
            o.message = f.what();
            return o;
        } catch(const std::exception& e) {
            RunOutcome o;
            o.exitCode = ExitInvariant;
            o.message = std::string("internal error: ") + e.what();
            return o;
        }
    };

    std::vector<std::pair<std::string, RunOutcome>> outcomes;
    if(config.runs.empty()) {
        outcomes.emplace_back("", guardedRun(config));
    } else {
        std::vector<std::future<RunOutcome>> futures;
        for(const RunConfig& run : config.runs) {
            log(LogLevel::Debug, "starting run " + run.output.prefix);
            futures.push_back(std::async(std::launch::async, guardedRun, std::cref(run)));
        }
        for(size_t i = 0; i < futures.size(); i++) outcomes.emplace_back(config.runs[i].label, futures[i].get());
    }

    int exitCode = ExitOk;
    for(const auto& [label, o] : outcomes) {
        std::string tag = label.empty() ? "" : "[" + label + "] ";
        for(const std::string& line : o.summary) std::cout << tag << line << '\n';
        if(o.exitCode != ExitOk) {
            log(LogLevel::Error, tag + o.message);
            if(exitCode == ExitOk) exitCode = o.exitCode;
        }
    }
    return exitCode;
}

}  // namespace fieldline::cli

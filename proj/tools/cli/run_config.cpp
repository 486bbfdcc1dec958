#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fieldline::cli {

using nlohmann::json;

int exitCodeFor(fl_status status)
{
    switch(status) {
        case FL_OK: return ExitOk;
        case FL_ERR_CONFIG:
        case FL_ERR_USAGE:
        case FL_ERR_IO: return ExitConfig;
        case FL_ERR_INVARIANT:
        case FL_ERR_INTERNAL: return ExitInvariant;
        case FL_ERR_NUMERIC:
        case FL_ERR_DOMAIN: return ExitNumeric;
    }
    return ExitInvariant;
}

void check(fl_status status, const std::string& stage)
{
    if(status != FL_OK) throw Failure(exitCodeFor(status), stage + ": " + fl_last_error());
}

namespace {

[[noreturn]] void configError(const std::string& message) { throw Failure(ExitConfig, "config: " + message); }

/// Reads the members of one JSON object, remembering which keys were consumed so that
/// anything left over can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if(!obj_.is_object()) configError(where() + " must be an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::optional<double> number(const std::string& key)
    {
        const json* v = find(key);
        if(!v) return std::nullopt;
        if(!v->is_number()) configError(where(key) + " must be a number");
        double d = v->get<double>();
        if(!std::isfinite(d)) configError(where(key) + " must be finite");
        return d;
    }

    double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

    double requiredNumber(const std::string& key)
    {
        auto v = number(key);
        if(!v) configError(where(key) + " is required");
        return *v;
    }

    std::optional<long long> integer(const std::string& key)
    {
        const json* v = find(key);
        if(!v) return std::nullopt;
        if(!v->is_number_integer()) configError(where(key) + " must be an integer");
        return v->get<long long>();
    }

    size_t count(const std::string& key, size_t fallback, size_t minimum)
    {
        auto v = integer(key);
        if(!v) return fallback;
        if(*v < static_cast<long long>(minimum))
            configError(where(key) + " must be at least " + std::to_string(minimum));
        return static_cast<size_t>(*v);
    }

    std::optional<std::string> string(const std::string& key)
    {
        const json* v = find(key);
        if(!v) return std::nullopt;
        if(!v->is_string()) configError(where(key) + " must be a string");
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const std::string& key)
    {
        const json* v = find(key);
        if(!v) return std::nullopt;
        if(!v->is_boolean()) configError(where(key) + " must be true or false");
        return v->get<bool>();
    }

    /// every key not read so far is an error
    void finish() const
    {
        std::vector<std::string> unknown;
        for(auto it = obj_.begin(); it != obj_.end(); ++it)
            if(!seen_.count(it.key())) unknown.push_back(it.key());
        if(unknown.empty()) return;
        std::string list;
        for(const auto& k : unknown) list += (list.empty() ? "" : ", ") + ("'" + where(k) + "'");
        configError("unknown key" + std::string(unknown.size() > 1 ? "s " : " ") + list);
    }

    std::string where(const std::string& key = "") const
    {
        if(key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

fl_axis parseAxisName(const std::string& name, const std::string& where)
{
    if(name == "y") return FL_AXIS_Y;
    if(name == "x") return FL_AXIS_X;
    if(name == "radial" || name == "r") return FL_AXIS_RADIAL;
    configError(where + ": unknown axis '" + name + "' (expected y, x or radial)");
}

std::string resolvePath(const std::string& p, const std::filesystem::path& baseDir)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path.string() : (baseDir / path).lexically_normal().string();
}

ProfileSpec parseProfile(const json& node, const std::filesystem::path& baseDir)
{
    ObjectReader r(node, "profile");
    ProfileSpec s;
    s.name = r.string("name").value_or("");
    if(auto t = r.string("table")) s.table = resolvePath(*t, baseDir);
    if(auto t = r.string("field_table")) s.fieldTable = resolvePath(*t, baseDir);
    int sources = !s.name.empty() + s.table.has_value() + s.fieldTable.has_value();
    if(sources != 1) configError("profile needs exactly one of 'name', 'table', 'field_table'");
    s.b0 = r.number("b0");
    s.a = r.number("a", 0);
    s.b = r.number("b", 0);
    s.c = r.number("c", 0);
    s.anchor = r.number("anchor", 0);
    if(auto axis = r.string("axis")) s.axis = parseAxisName(*axis, r.where("axis"));
    r.finish();
    return s;
}

fl_particle parseParticle(const json& node)
{
    ObjectReader r(node, "particle");
    fl_particle p{};
    p.q = r.number("q", 1);
    p.m = r.number("m", 1);
    p.x0 = r.number("x0", 0);
    p.y0 = r.number("y0", 0);
    p.vx0 = r.number("vx0", 0);
    p.vy0 = r.number("vy0", 0);
    r.finish();
    if(!(p.m > 0)) configError("particle.m must be positive");
    return p;
}

ConstantsSpec parseConstants(const json& node)
{
    ObjectReader r(node, "constants");
    ConstantsSpec c;
    c.k.k1 = r.requiredNumber("k1");
    c.k.k2 = r.requiredNumber("k2");
    c.k.k3 = r.requiredNumber("k3");
    c.q = r.number("q", 1);
    c.m = r.number("m", 1);
    if(auto s = r.integer("sign")) {
        if(*s != 1 && *s != -1) configError("constants.sign must be +1 or -1");
        c.sign = static_cast<int>(*s);
    }
    c.u0 = r.number("u0");
    r.finish();
    if(c.k.k3 < 0) configError("constants.k3 = v^2 must be non-negative");
    if(!(c.m > 0)) configError("constants.m must be positive");
    if(c.q == 0) configError("constants.q must be nonzero");
    return c;
}

fl_method parseSingleMethod(const std::string& name, const std::string& where)
{
    if(name == "quadrature") return FL_METHOD_QUADRATURE;
    if(name == "closed-form" || name == "closed_form") return FL_METHOD_CLOSED_FORM;
    if(name == "ode") return FL_METHOD_ODE;
    configError(where + ": unknown method '" + name + "' (expected quadrature, closed-form or ode)");
}

void parseTolerances(const json& node, RunConfig& cfg)
{
    ObjectReader r(node, "tolerances");
    fl_solver_settings& s = cfg.solver;
    s.quadrature_tol = r.number("quadrature_tol", s.quadrature_tol);
    s.nodes_per_leg = r.count("nodes_per_leg", s.nodes_per_leg, 8);
    s.ode_rel_tol = r.number("ode_rel_tol", s.ode_rel_tol);
    s.ode_abs_tol = r.number("ode_abs_tol", s.ode_abs_tol);
    s.ode_dt_initial = r.number("ode_dt_initial", s.ode_dt_initial);
    s.ode_max_steps = r.count("ode_max_steps", s.ode_max_steps, 1);
    cfg.energyInvariant = r.number("energy_invariant", cfg.energyInvariant);
    cfg.momentumInvariant = r.number("momentum_invariant", cfg.momentumInvariant);
    r.finish();
    if(!(s.quadrature_tol > 0) || !(s.ode_rel_tol > 0) || !(s.ode_abs_tol > 0) || !(s.ode_dt_initial > 0))
        configError("tolerances must be positive");
    if(!(cfg.energyInvariant >= 0) || !(cfg.momentumInvariant >= 0))
        configError("invariant bounds must be non-negative");
}

void parseOutput(const json& node, const std::filesystem::path& baseDir, OutputSpec& out)
{
    ObjectReader r(node, "output");
    if(auto d = r.string("dir")) out.dir = resolvePath(*d, baseDir);
    if(auto p = r.string("prefix")) out.prefix = *p;
    if(const json* formats = r.find("formats")) {
        if(!formats->is_array()) configError("output.formats must be an array");
        out.csv = out.json = false;
        for(const json& f : *formats) {
            if(f == "csv")
                out.csv = true;
            else if(f == "json")
                out.json = true;
            else
                configError("output.formats: unknown format " + f.dump() + " (expected \"csv\" or \"json\")");
        }
    }
    out.plot = r.boolean("plot").value_or(out.plot);
    r.finish();
    if(out.prefix.empty()) configError("output.prefix must not be empty");
    if(out.prefix.find('/') != std::string::npos) configError("output.prefix must not contain '/'");
}

FieldGrid parseFieldGrid(const json& node)
{
    ObjectReader r(node, "field_grid");
    FieldGrid g;
    g.uMin = r.requiredNumber("u_min");
    g.uMax = r.requiredNumber("u_max");
    g.points = r.count("points", g.points, 2);
    r.finish();
    if(!(g.uMax > g.uMin)) configError("field_grid needs u_min < u_max");
    return g;
}

SusySpec parseSusy(const json& node)
{
    ObjectReader r(node, "susy");
    SusySpec s;
    fl_susy_params_default(&s.params);
    if(auto m = r.integer("m")) s.params.m = static_cast<int>(*m);
    if(auto spin = r.string("spin")) {
        if(*spin == "lower" || *spin == "down")
            s.params.spin = FL_SPIN_LOWER;
        else if(*spin == "upper" || *spin == "up")
            s.params.spin = FL_SPIN_UPPER;
        else
            configError("susy.spin must be \"lower\" or \"upper\"");
    }
    s.params.hbar = r.number("hbar", s.params.hbar);
    s.params.mass = r.number("mass", s.params.mass);
    s.params.ladder_base = r.number("ladder_base", s.params.ladder_base);
    s.levels = static_cast<int>(r.count("levels", static_cast<size_t>(s.levels), 1));
    if(auto conv = r.string("convention")) {
        if(*conv == "half-integer")
            s.convention = FL_HALF_INTEGER;
        else if(*conv == "integer")
            s.convention = FL_INTEGER;
        else
            configError("susy.convention must be \"half-integer\" or \"integer\"");
    }
    s.rMin = r.number("r_min", s.rMin);
    s.rMax = r.number("r_max", s.rMax);
    s.points = r.count("points", s.points, 2);
    s.spectrum = r.boolean("spectrum").value_or(true);
    r.finish();
    if(!(s.params.hbar > 0) || !(s.params.mass > 0)) configError("susy.hbar and susy.mass must be positive");
    if(!(s.rMin > 0) || !(s.rMax > s.rMin)) configError("susy needs 0 < r_min < r_max");
    return s;
}

CompareSpec parseCompare(const json& node)
{
    ObjectReader r(node, "compare");
    CompareSpec c;
    if(const json* methods = r.find("methods")) {
        if(!methods->is_array()) configError("compare.methods must be an array");
        for(const json& m : *methods) {
            if(!m.is_string()) configError("compare.methods entries must be strings");
            c.methods.push_back(parseSingleMethod(m.get<std::string>(), "compare.methods"));
        }
    }
    if(const json* plotted = r.find("plotted_y")) {
        ObjectReader p(*plotted, "compare.plotted_y");
        PlottedLogForm form;
        form.l = p.requiredNumber("l");
        form.mAux = p.requiredNumber("m_aux");
        p.finish();
        c.plotted = form;
    }
    r.finish();
    return c;
}

RunConfig parseOne(const json& doc, const std::filesystem::path& baseDir, const std::string& defaultPrefix,
                   bool allowRuns)
{
    ObjectReader r(doc, "");
    RunConfig cfg;
    cfg.baseDir = baseDir;
    fl_solver_settings_default(&cfg.solver);
    fl_susy_params_default(&cfg.susy.params);
    cfg.output.prefix = defaultPrefix;

    cfg.label = r.string("label").value_or("");
    const json* profile = r.find("profile");
    if(!profile) configError("'profile' is required");
    cfg.profile = parseProfile(*profile, baseDir);

    if(const json* p = r.find("particle")) cfg.particle = parseParticle(*p);
    if(const json* c = r.find("constants")) cfg.constants = parseConstants(*c);
    if(cfg.particle && cfg.constants) configError("give either 'particle' or 'constants', not both");

    if(auto m = r.string("method")) cfg.method = parseMethod(*m);
    if(const json* t = r.find("time")) {
        ObjectReader tr(*t, "time");
        cfg.tEnd = tr.requiredNumber("t_end");
        cfg.samples = tr.count("samples", cfg.samples, 2);
        tr.finish();
        if(!(cfg.tEnd > 0)) configError("time.t_end must be positive");
    }
    if(const json* t = r.find("tolerances")) parseTolerances(*t, cfg);
    if(const json* o = r.find("output")) parseOutput(*o, baseDir, cfg.output);
    if(const json* g = r.find("field_grid")) cfg.fieldGrid = parseFieldGrid(*g);
    if(const json* s = r.find("susy")) cfg.susy = parseSusy(*s);
    if(const json* c = r.find("compare")) cfg.compare = parseCompare(*c);

    if(const json* runs = r.find("runs")) {
        if(!allowRuns) configError("'runs' entries cannot contain nested 'runs'");
        if(!runs->is_array() || runs->empty()) configError("'runs' must be a non-empty array");
        json base = doc;
        base.erase("runs");
        std::set<std::string> labels;
        for(size_t i = 0; i < runs->size(); i++) {
            const json& run = (*runs)[i];
            if(!run.is_object()) configError("runs[" + std::to_string(i) + "] must be an object");
            if(!run.contains("label") || !run["label"].is_string() || run["label"].get<std::string>().empty())
                configError("runs[" + std::to_string(i) + "] needs a non-empty string 'label'");
            std::string label = run["label"].get<std::string>();
            if(label.find('/') != std::string::npos) configError("run label '" + label + "' contains '/'");
            if(!labels.insert(label).second) configError("duplicate run label '" + label + "'");
            json merged = base;
            // initial data replaces rather than merges: a run giving constants drops the base particle
            if(run.contains("constants")) merged.erase("particle");
            if(run.contains("particle")) merged.erase("constants");
            merged.merge_patch(run);
            RunConfig sub;
            try {
                sub = parseOne(merged, baseDir, defaultPrefix, false);
            } catch(const Failure& f) {
                throw Failure(f.exitCode(), std::string(f.what()) + " (in run '" + label + "')");
            }
            sub.output.prefix = cfg.output.prefix + "_" + label;
            cfg.runs.push_back(std::move(sub));
        }
    }
    r.finish();
    return cfg;
}

}  // namespace

MethodChoice parseMethod(const std::string& name)
{
    if(name == "all") return MethodChoice::All;
    switch(parseSingleMethod(name, "method")) {
        case FL_METHOD_QUADRATURE: return MethodChoice::Quadrature;
        case FL_METHOD_CLOSED_FORM: return MethodChoice::ClosedForm;
        case FL_METHOD_ODE: return MethodChoice::Ode;
    }
    return MethodChoice::Quadrature;
}

std::string methodLabel(fl_method method)
{
    switch(method) {
        case FL_METHOD_QUADRATURE: return "quadrature";
        case FL_METHOD_CLOSED_FORM: return "closed-form";
        case FL_METHOD_ODE: return "ode";
    }
    return "unknown";
}

std::vector<fl_method> RunConfig::methods() const
{
    switch(method) {
        case MethodChoice::Quadrature: return {FL_METHOD_QUADRATURE};
        case MethodChoice::ClosedForm: return {FL_METHOD_CLOSED_FORM};
        case MethodChoice::Ode: return {FL_METHOD_ODE};
        case MethodChoice::All: return {FL_METHOD_QUADRATURE, FL_METHOD_CLOSED_FORM, FL_METHOD_ODE};
    }
    return {};
}

std::filesystem::path RunConfig::outputStem() const { return output.dir / output.prefix; }

RunConfig parseRunConfig(const json& doc, const std::filesystem::path& baseDir, const std::string& defaultPrefix)
{
    return parseOne(doc, baseDir, defaultPrefix, true);
}

RunConfig loadRunConfig(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if(!in) throw Failure(ExitConfig, "config: cannot open '" + path.string() + "'");
    std::stringstream text;
    text << in.rdbuf();
    json doc;
    try {
        doc = json::parse(text.str());
    } catch(const json::parse_error& e) {
        throw Failure(ExitConfig, "config: '" + path.string() + "' is not valid JSON: " + e.what());
    }
    std::filesystem::path base = path.parent_path();
    if(base.empty()) base = ".";
    return parseRunConfig(doc, base, path.stem().string());
}

void applyOverrides(RunConfig& config, const Overrides& overrides)
{
    if(overrides.method) config.method = parseMethod(*overrides.method);
    if(overrides.outDir) config.output.dir = *overrides.outDir;
    if(overrides.plot) config.output.plot = true;
    for(RunConfig& run : config.runs) applyOverrides(run, overrides);
}

}  // namespace fieldline::cli

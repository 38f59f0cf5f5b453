#include "relaxbench/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace relaxbench {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + " " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) {
            std::ostringstream os;
            os << "config: unknown key \"" << path << "." << it.key()
               << "\" (allowed:";
            for (const char* k : allowed) os << " " << k;
            os << ")";
            throw ConfigError(os.str());
        }
    }
}

double get_num(const json& obj, const std::string& path, const char* key,
               double dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "must be a number");
    return v.get<double>();
}

// numeric value, or the string "auto" mapped to NaN
double get_num_or_auto(const json& obj, const std::string& path,
                       const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "auto")
            return std::numeric_limits<double>::quiet_NaN();
        fail(path + "." + key, "must be a number or \"auto\"");
    }
    if (!v.is_number()) fail(path + "." + key, "must be a number or \"auto\"");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key,
            int dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key,
              bool dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "must be a boolean");
    return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "must be a string");
    return v.get<std::string>();
}

std::vector<double> get_num_list(const json& obj, const std::string& path,
                                 const char* key) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "must be an array of numbers");
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + "." + key, "must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "relax2") return ExperimentKind::Relax2;
    if (s == "relax3") return ExperimentKind::Relax3;
    if (s == "limit2") return ExperimentKind::Limit2;
    if (s == "limit3") return ExperimentKind::Limit3;
    if (s == "steady") return ExperimentKind::Steady;
    if (s == "kp") return ExperimentKind::Kp;
    if (s == "sweep-eps") return ExperimentKind::SweepEps;
    if (s == "validate-model") return ExperimentKind::ValidateModel;
    if (s == "compare") return ExperimentKind::Compare;
    throw ConfigError("config: kind \"" + s +
                      "\" is not one of relax2, relax3, limit2, limit3, "
                      "steady, kp, sweep-eps, validate-model, compare");
}

HetDescriptor parse_het(const json& j) {
    check_keys(j, "heterogeneity",
               {"family", "a0", "a1", "omega", "c", "jumps"});
    HetDescriptor d;
    if (!j.contains("family"))
        fail("heterogeneity.family", "is required");
    d.family = get_str(j, "heterogeneity", "family", "");
    if (d.family != "affine" && d.family != "smooth_nonlinear" &&
        d.family != "piecewise_bv")
        fail("heterogeneity.family",
             "must be affine, smooth_nonlinear or piecewise_bv");
    if (!j.contains("a0")) fail("heterogeneity.a0", "is required");
    d.a0 = get_num(j, "heterogeneity", "a0", 0.0);
    d.a1 = get_num(j, "heterogeneity", "a1", 0.0);
    d.omega = get_num(j, "heterogeneity", "omega", 0.0);
    d.c = get_num(j, "heterogeneity", "c", 0.0);
    if (j.contains("jumps")) {
        const json& arr = j.at("jumps");
        if (!arr.is_array()) fail("heterogeneity.jumps", "must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = "heterogeneity.jumps[" + std::to_string(i) + "]";
            check_keys(arr[i], path, {"position", "delta"});
            PiecewiseJump jm;
            if (!arr[i].contains("position") || !arr[i].contains("delta"))
                fail(path, "needs position and delta");
            jm.position = get_num(arr[i], path, "position", 0.0);
            jm.delta = get_num(arr[i], path, "delta", 0.0);
            d.jumps.push_back(jm);
        }
    }
    return d;
}

InitialDescriptor parse_initial(const json& j, double length) {
    check_keys(j, "initial",
               {"type", "value", "from", "to", "p", "level", "plateau_end",
                "foot"});
    InitialDescriptor d;
    d.type = get_str(j, "initial", "type", "constant");
    if (d.type != "constant" && d.type != "ramp" && d.type != "kp" &&
        d.type != "flux_plateau")
        fail("initial.type", "must be constant, ramp, kp or flux_plateau");
    d.value = get_num(j, "initial", "value", 0.0);
    d.from = get_num(j, "initial", "from", 0.0);
    d.to = get_num(j, "initial", "to", 0.0);
    d.p = get_num(j, "initial", "p", 0.0);
    d.level = get_num(j, "initial", "level", 0.0);
    d.plateau_end = get_num(j, "initial", "plateau_end", 0.0);
    d.foot = get_num(j, "initial", "foot", 0.0);
    if (d.type == "constant" && !(d.value >= 0.0))
        fail("initial.value", "must be >= 0");
    if (d.type == "ramp" && !(d.from >= 0.0 && d.to >= 0.0))
        fail("initial.from/to", "must be >= 0");
    if (d.type == "kp" && !(d.p >= 0.0)) fail("initial.p", "must be >= 0");
    if (d.type == "flux_plateau") {
        if (!(d.level >= 0.0)) fail("initial.level", "must be >= 0");
        if (!(d.plateau_end >= 0.0 && d.plateau_end < d.foot &&
              d.foot <= length))
            fail("initial.plateau_end/foot",
                 "need 0 <= plateau_end < foot <= grid length");
    }
    return d;
}

CheckSettings parse_checks(const json& j) {
    check_keys(j, "checks",
               {"positivity", "positivity_tol", "mass", "mass_tol", "ceiling",
                "ceiling_tol", "ceiling_value", "tbv", "tbv_tol", "entropy",
                "entropy_tol", "steady_residual", "steady_residual_tol",
                "kp_residual", "kp_residual_tol", "eq_dev_order",
                "eq_dev_min_order", "l1_monotone", "l1_drop_factor", "bln",
                "bln_tol", "model_origin", "model_slopes"});
    CheckSettings c;
    c.positivity = get_bool(j, "checks", "positivity", c.positivity);
    c.positivity_tol = get_num(j, "checks", "positivity_tol", c.positivity_tol);
    c.mass = get_bool(j, "checks", "mass", c.mass);
    c.mass_tol = get_num(j, "checks", "mass_tol", c.mass_tol);
    c.ceiling = get_bool(j, "checks", "ceiling", c.ceiling);
    c.ceiling_tol = get_num(j, "checks", "ceiling_tol", c.ceiling_tol);
    c.ceiling_value = get_num_or_auto(j, "checks", "ceiling_value",
                                      c.ceiling_value);
    c.tbv = get_bool(j, "checks", "tbv", c.tbv);
    c.tbv_tol = get_num(j, "checks", "tbv_tol", c.tbv_tol);
    c.entropy = get_bool(j, "checks", "entropy", c.entropy);
    c.entropy_tol = get_num_or_auto(j, "checks", "entropy_tol", c.entropy_tol);
    c.steady_residual = get_bool(j, "checks", "steady_residual",
                                 c.steady_residual);
    c.steady_residual_tol =
        get_num(j, "checks", "steady_residual_tol", c.steady_residual_tol);
    c.kp_residual = get_bool(j, "checks", "kp_residual", c.kp_residual);
    c.kp_residual_tol = get_num(j, "checks", "kp_residual_tol",
                                c.kp_residual_tol);
    c.eq_dev_order = get_bool(j, "checks", "eq_dev_order", c.eq_dev_order);
    c.eq_dev_min_order = get_num(j, "checks", "eq_dev_min_order",
                                 c.eq_dev_min_order);
    c.l1_monotone = get_bool(j, "checks", "l1_monotone", c.l1_monotone);
    c.l1_drop_factor = get_num(j, "checks", "l1_drop_factor",
                               c.l1_drop_factor);
    c.bln = get_bool(j, "checks", "bln", c.bln);
    c.bln_tol = get_num(j, "checks", "bln_tol", c.bln_tol);
    c.model_origin = get_bool(j, "checks", "model_origin", c.model_origin);
    c.model_slopes = get_bool(j, "checks", "model_slopes", c.model_slopes);
    return c;
}

} // namespace

const char* kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Relax2: return "relax2";
    case ExperimentKind::Relax3: return "relax3";
    case ExperimentKind::Limit2: return "limit2";
    case ExperimentKind::Limit3: return "limit3";
    case ExperimentKind::Steady: return "steady";
    case ExperimentKind::Kp: return "kp";
    case ExperimentKind::SweepEps: return "sweep-eps";
    case ExperimentKind::ValidateModel: return "validate-model";
    case ExperimentKind::Compare: return "compare";
    }
    return "?";
}

Heterogeneity make_heterogeneity(const HetDescriptor& d) {
    try {
        if (d.family == "affine")
            return Heterogeneity::affine(d.a0, d.a1, d.omega, 1.0);
        if (d.family == "smooth_nonlinear")
            return Heterogeneity::smooth_nonlinear(d.a0, d.a1, d.omega, d.c,
                                                   1.0);
        return Heterogeneity::piecewise_bv(d.a0, d.c, d.jumps, 1.0);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: heterogeneity: ") + e.what());
    }
}

Grid make_grid(const GridDescriptor& d) {
    try {
        return Grid(d.length, d.n_cells);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: grid: ") + e.what());
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    check_keys(j, "<root>",
               {"kind", "heterogeneity", "grid", "initial", "relax", "limit",
                "checks", "epsilons", "p_samples", "n_p_samples", "p_level",
                "snapshot_every", "output_dir"});

    ExperimentConfig cfg;
    if (!j.contains("kind")) throw ConfigError("config: kind is required");
    cfg.kind = parse_kind(get_str(j, "<root>", "kind", ""));

    if (!j.contains("heterogeneity"))
        throw ConfigError("config: heterogeneity block is required");
    cfg.het = parse_het(j.at("heterogeneity"));

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"length", "n_cells"});
        cfg.grid.length = get_num(g, "grid", "length", cfg.grid.length);
        cfg.grid.n_cells = get_int(g, "grid", "n_cells", cfg.grid.n_cells);
    }

    if (j.contains("initial"))
        cfg.initial = parse_initial(j.at("initial"), cfg.grid.length);

    if (j.contains("relax")) {
        const json& r = j.at("relax");
        check_keys(r, "relax",
                   {"epsilon", "cfl", "t_end", "alpha", "u0", "c01", "c02"});
        cfg.relax.epsilon = get_num(r, "relax", "epsilon", cfg.relax.epsilon);
        cfg.relax.cfl = get_num(r, "relax", "cfl", cfg.relax.cfl);
        cfg.relax.t_end = get_num(r, "relax", "t_end", cfg.relax.t_end);
        cfg.relax.alpha = get_num(r, "relax", "alpha", cfg.relax.alpha);
        cfg.relax.u0 = get_num_or_auto(r, "relax", "u0", cfg.relax.u0);
        cfg.relax.c01 = get_num_or_auto(r, "relax", "c01", cfg.relax.c01);
        cfg.relax.c02 = get_num_or_auto(r, "relax", "c02", cfg.relax.c02);
    }

    if (j.contains("limit")) {
        const json& l = j.at("limit");
        check_keys(l, "limit", {"cfl", "t_end", "inflow_rho"});
        cfg.limit.cfl = get_num(l, "limit", "cfl", cfg.limit.cfl);
        cfg.limit.t_end = get_num(l, "limit", "t_end", cfg.limit.t_end);
        cfg.limit.inflow_rho =
            get_num_or_auto(l, "limit", "inflow_rho", cfg.limit.inflow_rho);
    }

    if (j.contains("checks")) cfg.checks = parse_checks(j.at("checks"));

    cfg.epsilons = get_num_list(j, "<root>", "epsilons");
    cfg.p_samples = get_num_list(j, "<root>", "p_samples");
    cfg.n_p_samples = get_int(j, "<root>", "n_p_samples", cfg.n_p_samples);
    cfg.p_level = get_num(j, "<root>", "p_level", cfg.p_level);
    cfg.snapshot_every = get_int(j, "<root>", "snapshot_every",
                                 cfg.snapshot_every);
    cfg.output_dir = get_str(j, "<root>", "output_dir", cfg.output_dir);

    // range validation with the constraint in the message
    if (!(cfg.relax.alpha > 0.0 && cfg.relax.alpha < 1.0))
        fail("relax.alpha", "must lie in (0, 1)");
    if (!(cfg.relax.epsilon > 0.0)) fail("relax.epsilon", "must be > 0");
    if (!(cfg.relax.cfl > 0.0 && cfg.relax.cfl <= 1.0))
        fail("relax.cfl", "must lie in (0, 1]");
    if (!(cfg.relax.t_end >= 0.0)) fail("relax.t_end", "must be >= 0");
    if (!std::isnan(cfg.relax.u0) && !(cfg.relax.u0 >= 0.0))
        fail("relax.u0", "must be >= 0");
    if (!std::isnan(cfg.relax.c01) && !(cfg.relax.c01 >= 0.0))
        fail("relax.c01", "must be >= 0");
    if (!std::isnan(cfg.relax.c02) && !(cfg.relax.c02 >= 0.0))
        fail("relax.c02", "must be >= 0");
    if (!(cfg.limit.cfl > 0.0 && cfg.limit.cfl <= 1.0))
        fail("limit.cfl", "must lie in (0, 1]");
    if (!(cfg.limit.t_end >= 0.0)) fail("limit.t_end", "must be >= 0");
    if (!std::isnan(cfg.limit.inflow_rho) && !(cfg.limit.inflow_rho >= 0.0))
        fail("limit.inflow_rho", "must be >= 0");
    if (cfg.n_p_samples < 2) fail("n_p_samples", "must be >= 2");
    if (cfg.snapshot_every < 0) fail("snapshot_every", "must be >= 0");
    if (!(cfg.p_level >= 0.0)) fail("p_level", "must be >= 0");
    for (double p : cfg.p_samples)
        if (!(p >= 0.0)) fail("p_samples", "entries must be >= 0");
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (!(cfg.epsilons[i] > 0.0)) fail("epsilons", "entries must be > 0");
        if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
            fail("epsilons", "must be strictly decreasing");
    }
    if ((cfg.kind == ExperimentKind::SweepEps ||
         cfg.kind == ExperimentKind::Compare) &&
        cfg.epsilons.size() < 2)
        fail("epsilons",
             "must list at least two values for sweep-eps/compare");
    if (cfg.kind == ExperimentKind::Steady && std::isnan(cfg.relax.u0))
        fail("relax.u0", "must be a number for the steady experiment");

    // construct model and grid now so descriptor errors surface at parse time
    make_heterogeneity(cfg.het);
    Grid grid = make_grid(cfg.grid);
    if (cfg.initial.type == "flux_plateau" && cfg.initial.foot > grid.length)
        fail("initial.foot", "must be <= grid length");

    return cfg;
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
    auto num_or_auto = [](double v) {
        return std::isnan(v) ? json("auto") : json(v);
    };
    json h{{"family", cfg.het.family}, {"a0", cfg.het.a0},
           {"a1", cfg.het.a1},         {"omega", cfg.het.omega},
           {"c", cfg.het.c}};
    json jumps = json::array();
    for (const auto& jm : cfg.het.jumps)
        jumps.push_back({{"position", jm.position}, {"delta", jm.delta}});
    h["jumps"] = jumps;

    json c{{"positivity", cfg.checks.positivity},
           {"positivity_tol", cfg.checks.positivity_tol},
           {"mass", cfg.checks.mass},
           {"mass_tol", cfg.checks.mass_tol},
           {"ceiling", cfg.checks.ceiling},
           {"ceiling_tol", cfg.checks.ceiling_tol},
           {"ceiling_value", num_or_auto(cfg.checks.ceiling_value)},
           {"tbv", cfg.checks.tbv},
           {"tbv_tol", cfg.checks.tbv_tol},
           {"entropy", cfg.checks.entropy},
           {"entropy_tol", num_or_auto(cfg.checks.entropy_tol)},
           {"steady_residual", cfg.checks.steady_residual},
           {"steady_residual_tol", cfg.checks.steady_residual_tol},
           {"kp_residual", cfg.checks.kp_residual},
           {"kp_residual_tol", cfg.checks.kp_residual_tol},
           {"eq_dev_order", cfg.checks.eq_dev_order},
           {"eq_dev_min_order", cfg.checks.eq_dev_min_order},
           {"l1_monotone", cfg.checks.l1_monotone},
           {"l1_drop_factor", cfg.checks.l1_drop_factor},
           {"bln", cfg.checks.bln},
           {"bln_tol", cfg.checks.bln_tol},
           {"model_origin", cfg.checks.model_origin},
           {"model_slopes", cfg.checks.model_slopes}};

    json out{
        {"kind", kind_name(cfg.kind)},
        {"heterogeneity", h},
        {"grid", {{"length", cfg.grid.length}, {"n_cells", cfg.grid.n_cells}}},
        {"initial",
         {{"type", cfg.initial.type},
          {"value", cfg.initial.value},
          {"from", cfg.initial.from},
          {"to", cfg.initial.to},
          {"p", cfg.initial.p},
          {"level", cfg.initial.level},
          {"plateau_end", cfg.initial.plateau_end},
          {"foot", cfg.initial.foot}}},
        {"relax",
         {{"epsilon", cfg.relax.epsilon},
          {"cfl", cfg.relax.cfl},
          {"t_end", cfg.relax.t_end},
          {"alpha", cfg.relax.alpha},
          {"u0", num_or_auto(cfg.relax.u0)},
          {"c01", num_or_auto(cfg.relax.c01)},
          {"c02", num_or_auto(cfg.relax.c02)}}},
        {"limit",
         {{"cfl", cfg.limit.cfl},
          {"t_end", cfg.limit.t_end},
          {"inflow_rho", num_or_auto(cfg.limit.inflow_rho)}}},
        {"checks", c},
        {"epsilons", cfg.epsilons},
        {"p_samples", cfg.p_samples},
        {"n_p_samples", cfg.n_p_samples},
        {"p_level", cfg.p_level},
        {"snapshot_every", cfg.snapshot_every},
        {"output_dir", cfg.output_dir},
    };
    return out.dump(2);
}

} // namespace relaxbench

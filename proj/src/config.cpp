#include "caproj/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace caproj {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

double number_at(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

Vector vector_from(const json& v, const std::string& where, Index expected = -1) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    Vector out(static_cast<Index>(v.size()));
    Index k = 0;
    for (const auto& item : v) {
        if (!item.is_number()) throw ConfigError(where + " must contain only numbers");
        out(k++) = item.get<double>();
    }
    if (expected >= 0 && out.size() != expected) {
        std::ostringstream why;
        why << where << " must have " << expected << " entries, got " << out.size();
        throw ConfigError(why.str());
    }
    return out;
}

Matrix matrix_from(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be an array of rows");
    const auto rows = static_cast<Index>(v.size());
    Index cols = -1;
    Matrix out;
    Index i = 0;
    for (const auto& row : v) {
        const Vector r = vector_from(row, where + " row");
        if (cols < 0) {
            cols = r.size();
            out.resize(rows, cols);
        } else if (r.size() != cols) {
            throw ConfigError(where + " rows have inconsistent lengths");
        }
        out.row(i++) = r;
    }
    return out;
}

std::vector<Pulse> pulses_from(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of pulses");
    std::vector<Pulse> out;
    for (const auto& item : v) {
        require_keys(item, where, {"amplitude", "start", "duration"});
        Pulse pulse;
        pulse.amplitude = number_at(item, "amplitude", where);
        pulse.start = number_at(item, "start", where);
        pulse.duration = number_at(item, "duration", where);
        out.push_back(pulse);
    }
    return out;
}

}  // namespace

ScenarioParams default_params() {
    ScenarioParams params;

    params.reference.duration = params.duration;
    params.reference.channels[0] = {{10.0 * kDeg, 1.0, 2.0}, {-10.0 * kDeg, 3.0, 2.0}};
    params.reference.channels[1] = {{5.0 * kDeg, 8.0, 2.0}, {-5.0 * kDeg, 10.0, 2.0}};
    params.reference.channels[2] = {};

    params.ky = Vector{{12.0, 11.0, 2.5}};
    params.ki = Vector{{70.0, 50.0, 2.0}};
    params.sat_m = Vector{{0.9, 0.75, 0.15}};
    params.sat_l = Vector{{1.4, 1.0, 0.15}};

    auto [plant, limits] = admire_model();
    params.plant = std::move(plant);
    params.limits = std::move(limits);
    return params;
}

Scenario build_scenario(const ScenarioParams& params, CaseId case_id) {
    Scenario scenario;
    scenario.case_id = case_id;
    scenario.kind = case_id == CaseId::III ? ProjectionKind::modified
                                           : ProjectionKind::conventional;
    scenario.enable_rate_limit = case_id != CaseId::I;
    scenario.dt = params.dt;
    scenario.duration = params.duration;
    scenario.plant = params.plant;
    scenario.limits = params.limits;
    scenario.reference = params.reference;
    scenario.reference.duration = params.duration;
    scenario.gains = {params.ky, params.ki, params.anti_windup_tau};
    scenario.soft_sat = {params.sat_m, params.sat_l};

    const Index m = params.plant.m();
    if (params.fault_lambda) {
        EffectivenessSchedule schedule;
        schedule.segments.push_back({0.0, Vector::Ones(m)});
        schedule.segments.push_back({params.fault_time, *params.fault_lambda});
        scenario.schedule = schedule;
    } else {
        scenario.schedule = step_fault_schedule(m, params.fault_time, params.fault_loss);
    }

    const Index r = params.plant.r();
    AllocatorConfig alloc;
    alloc.a_m = params.a_m_diag * Matrix::Identity(r, r);
    alloc.q = params.q_diag * Matrix::Identity(r, r);
    alloc.gamma = params.gamma * Matrix::Identity(r, r);
    alloc.kind = scenario.kind;

    if (params.uniform_sizing) {
        alloc.bounds = bounds_from_actuator_limits(params.limits, params.sat_m, params.sat_l,
                                                   alloc.gamma, params.safety,
                                                   params.zeta_frac, params.eps_frac);
    } else {
        const Vector design_lambda = Vector::Constant(m, params.lambda_design);
        const Matrix theta_ref =
            params.theta_margin * ideal_theta(params.plant.b, design_lambda).cwiseAbs();
        alloc.bounds = bounds_from_reference_theta(theta_ref, params.limits, params.sat_m,
                                                   params.sat_l, alloc.gamma, params.safety,
                                                   params.zeta_frac, params.eps_frac);
    }
    alloc.theta_init =
        clip_to_inner_region(ideal_theta(params.plant.b, Vector::Ones(m)), alloc.bounds);
    scenario.allocator = std::move(alloc);

    scenario.validate();
    return scenario;
}

namespace {

ScenarioParams params_from_json(const json& root) {
    ScenarioParams params = default_params();
    require_keys(root, "config",
                 {"dt", "duration", "fault", "reference", "controller", "soft_sat",
                  "allocator", "plant"});

    if (root.contains("dt")) params.dt = number_at(root, "dt", "config");
    if (root.contains("duration")) params.duration = number_at(root, "duration", "config");

    if (root.contains("fault")) {
        const auto& fault = root.at("fault");
        require_keys(fault, "fault", {"time", "loss", "lambda"});
        if (fault.contains("time")) params.fault_time = number_at(fault, "time", "fault");
        if (fault.contains("loss")) params.fault_loss = number_at(fault, "loss", "fault");
        if (fault.contains("lambda")) {
            params.fault_lambda = vector_from(fault.at("lambda"), "fault.lambda");
        }
    }

    if (root.contains("reference")) {
        const auto& ref = root.at("reference");
        require_keys(ref, "reference", {"p", "q", "r"});
        if (ref.contains("p")) params.reference.channels[0] = pulses_from(ref.at("p"), "reference.p");
        if (ref.contains("q")) params.reference.channels[1] = pulses_from(ref.at("q"), "reference.q");
        if (ref.contains("r")) params.reference.channels[2] = pulses_from(ref.at("r"), "reference.r");
    }

    if (root.contains("controller")) {
        const auto& ctrl = root.at("controller");
        require_keys(ctrl, "controller", {"ky", "ki", "tau_aw"});
        if (ctrl.contains("ky")) params.ky = vector_from(ctrl.at("ky"), "controller.ky", 3);
        if (ctrl.contains("ki")) params.ki = vector_from(ctrl.at("ki"), "controller.ki", 3);
        if (ctrl.contains("tau_aw")) {
            params.anti_windup_tau = number_at(ctrl, "tau_aw", "controller");
        }
    }

    if (root.contains("soft_sat")) {
        const auto& sat = root.at("soft_sat");
        require_keys(sat, "soft_sat", {"M", "L"});
        if (sat.contains("M")) params.sat_m = vector_from(sat.at("M"), "soft_sat.M", 3);
        if (sat.contains("L")) params.sat_l = vector_from(sat.at("L"), "soft_sat.L", 3);
    }

    if (root.contains("allocator")) {
        const auto& alloc = root.at("allocator");
        require_keys(alloc, "allocator",
                     {"gamma", "a_m_diag", "q_diag", "zeta_frac", "eps_frac", "safety",
                      "lambda_design", "theta_margin", "sizing"});
        if (alloc.contains("gamma")) params.gamma = number_at(alloc, "gamma", "allocator");
        if (alloc.contains("a_m_diag")) params.a_m_diag = number_at(alloc, "a_m_diag", "allocator");
        if (alloc.contains("q_diag")) params.q_diag = number_at(alloc, "q_diag", "allocator");
        if (alloc.contains("zeta_frac")) params.zeta_frac = number_at(alloc, "zeta_frac", "allocator");
        if (alloc.contains("eps_frac")) params.eps_frac = number_at(alloc, "eps_frac", "allocator");
        if (alloc.contains("safety")) params.safety = number_at(alloc, "safety", "allocator");
        if (alloc.contains("lambda_design")) {
            params.lambda_design = number_at(alloc, "lambda_design", "allocator");
        }
        if (alloc.contains("theta_margin")) {
            params.theta_margin = number_at(alloc, "theta_margin", "allocator");
        }
        if (alloc.contains("sizing")) {
            const std::string sizing = alloc.at("sizing").get<std::string>();
            if (sizing == "uniform") {
                params.uniform_sizing = true;
            } else if (sizing == "reference") {
                params.uniform_sizing = false;
            } else {
                throw ConfigError("allocator.sizing must be 'uniform' or 'reference'");
            }
        }
    }

    if (root.contains("plant")) {
        const auto& plant = root.at("plant");
        require_keys(plant, "plant", {"A", "B", "B_v", "limits"});
        if (plant.contains("A")) params.plant.a = matrix_from(plant.at("A"), "plant.A");
        if (plant.contains("B")) params.plant.b = matrix_from(plant.at("B"), "plant.B");
        if (plant.contains("B_v")) params.plant.b_v = matrix_from(plant.at("B_v"), "plant.B_v");
        if (plant.contains("limits")) {
            const auto& lim = plant.at("limits");
            require_keys(lim, "plant.limits", {"u_min", "u_max", "rate_min", "rate_max"});
            const Index m = params.plant.m();
            if (lim.contains("u_min")) params.limits.u_min = vector_from(lim.at("u_min"), "u_min", m);
            if (lim.contains("u_max")) params.limits.u_max = vector_from(lim.at("u_max"), "u_max", m);
            if (lim.contains("rate_min")) {
                params.limits.rate_min = vector_from(lim.at("rate_min"), "rate_min", m);
            }
            if (lim.contains("rate_max")) {
                params.limits.rate_max = vector_from(lim.at("rate_max"), "rate_max", m);
            }
        }
        params.plant.validate();
        params.limits.validate();
    }
    return params;
}

}  // namespace

ScenarioParams params_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed config: ") + ex.what());
    }
    try {
        return params_from_json(root);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("invalid config: ") + ex.what());
    }
}

ScenarioParams load_params(const std::string& path) {
    if (path.empty()) return default_params();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return params_from_json_text(buffer.str());
}

CaseId parse_case(const std::string& text) {
    if (text == "I" || text == "i" || text == "1") return CaseId::I;
    if (text == "II" || text == "ii" || text == "2") return CaseId::II;
    if (text == "III" || text == "iii" || text == "3") return CaseId::III;
    throw ConfigError("unknown case '" + text + "', expected I, II or III");
}

}  // namespace caproj

#include "aisim/config.hpp"

#include "aisim/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace aisim::harness {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

double number(const json& obj, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return it->get<double>();
}

std::size_t index(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer() || it->get<long long>() < 0) {
        throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
    }
    return it->get<std::size_t>();
}

VsgSelection selection(const json& j) {
    if (j.is_null()) return VsgSelection::none();
    if (!j.is_object()) throw ConfigError("'vsgs' must be an object");
    if (j.contains("ids")) return VsgSelection::of(j["ids"].get<std::vector<std::size_t>>());
    if (j.contains("fraction")) return VsgSelection::random_fraction(number(j, "fraction", 0.0));
    if (j.contains("areas")) return VsgSelection::in_areas(j["areas"].get<std::vector<std::string>>());
    if (j.empty()) return VsgSelection::none();
    throw ConfigError("'vsgs' needs one of 'ids', 'fraction', 'areas'");
}

std::vector<double> axis(const json& j, const std::vector<double>& fallback) {
    if (j.is_null()) return fallback;
    if (j.is_array()) {
        auto v = j.get<std::vector<double>>();
        if (v.empty()) throw ConfigError("sweep axis is empty");
        return v;
    }
    if (j.is_object() && j.contains("log")) {
        const auto spec = j["log"].get<std::vector<double>>();
        if (spec.size() != 3) throw ConfigError("'log' axis is [lo, hi, n]");
        std::vector<double> anchors;
        if (j.contains("anchors")) anchors = j["anchors"].get<std::vector<double>>();
        return log_axis(spec[0], spec[1], static_cast<std::size_t>(spec[2]), anchors);
    }
    throw ConfigError("sweep axis must be a list or {\"log\": [lo, hi, n]}");
}

VsgMode mode_from(const std::string& name) {
    if (name == "plain") return VsgMode::Plain;
    if (name == "deadband") return VsgMode::Deadband;
    if (name == "rearm") return VsgMode::Rearm;
    throw ConfigError("unknown policy mode '" + name + "'");
}

Variant variant(const json& j, const std::string& default_name) {
    Variant v;
    v.name = j.value("name", default_name);
    v.vsgs = selection(j.value("vsgs", json()));
    return v;
}

}  // namespace

Config parse_config(std::string_view text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    Config cfg;
    cfg.hash = fnv1a(text);
    try {
        Scenario& s = cfg.scenario;
        s.id = doc.value("id", std::string("scenario"));
        if (!doc.contains("grid") || !doc["grid"].is_string()) throw ConfigError("config needs 'grid'");
        std::filesystem::path grid_path = doc["grid"].get<std::string>();
        if (grid_path.is_relative()) grid_path = std::filesystem::path(base_dir) / grid_path;
        s.grid_source = doc["grid"].get<std::string>();
        s.grid = std::make_shared<const Grid>(load_grid(grid_path.string()));
        s.seed = doc.value("seed", std::uint64_t{0});
        s.sample_params = doc.value("sample_params", false);
        s.vsgs = selection(doc.value("vsgs", json()));
        s.alpha = number(doc, "alpha", s.alpha);
        s.beta = number(doc, "beta", s.beta);
        s.m_min_rule = number(doc, "m_min_rule", s.m_min_rule);
        for (const json& jv : doc.value("per_vsg", json::array())) {
            s.per_vsg[index(jv, "id")] = {number(jv, "alpha", s.alpha), number(jv, "beta", s.beta)};
        }

        const json pol = doc.value("policy", json::object());
        s.policy.mode = mode_from(pol.value("mode", std::string("plain")));
        s.policy.epsilon = number(pol, "epsilon", 0.0);
        s.policy.band = number(pol, "band", s.policy.band);
        s.policy.hold = number(pol, "hold", s.policy.hold);
        if (pol.contains("m_reset") && pol["m_reset"].is_object()) {
            for (const auto& [key, value] : pol["m_reset"].items()) {
                s.policy.m_reset[std::stoul(key)] = value.get<double>();
            }
        }

        const json fault = doc.value("fault", json::object());
        s.fault.node = fault.contains("node") ? index(fault, "node") : 0;
        s.fault.delta_P = number(fault, "delta_P", -1.0);
        s.fault.time = number(fault, "time", 0.0);

        const json integ = doc.value("integration", json::object());
        s.integration.rtol = number(integ, "rtol", s.integration.rtol);
        s.integration.atol = number(integ, "atol", s.integration.atol);
        s.integration.t_end = number(integ, "t_end", s.integration.t_end);
        s.integration.sample_dt = number(integ, "sample_dt", s.integration.sample_dt);
        s.integration.h_max = number(integ, "h_max", s.integration.h_max);

        const json met = doc.value("metrics", json::object());
        s.metrics.tail_fraction = number(met, "tail_fraction", s.metrics.tail_fraction);
        s.metrics.tail_window = number(met, "tail_window", s.metrics.tail_window);
        s.integration.tail_fraction = s.metrics.tail_fraction;

        const json sweep = doc.value("sweep", json::object());
        cfg.alphas = axis(sweep.value("alpha", json()), cfg.alphas);
        cfg.betas = axis(sweep.value("beta", json()), cfg.betas);

        const json camp = doc.value("campaign", json::object());
        CampaignSpec& c = cfg.campaign;
        c.scenario = s;
        c.threshold_mw = number(camp, "threshold_mw", c.threshold_mw);
        c.delta_mw = number(camp, "delta_mw", c.delta_mw);
        c.base_mva = number(camp, "base_mva", c.base_mva);
        c.central_fraction = number(camp, "central_fraction", c.central_fraction);
        c.candidate = camp.contains("candidate") ? variant(camp["candidate"], "adaptive")
                                                 : Variant{"adaptive", s.vsgs};
        c.reference = camp.contains("reference") ? variant(camp["reference"], "constant")
                                                 : Variant{"constant", VsgSelection::none()};

        if (doc.contains("placement")) {
            const json& pl = doc["placement"];
            cfg.has_placement = true;
            cfg.placement = c;
            cfg.placement.candidate = Variant{"peripheral", selection(pl.value("peripheral", json()))};
            cfg.placement.reference = Variant{"homogeneous", selection(pl.value("homogeneous", json()))};
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    Config cfg = parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
    cfg.path = path;
    return cfg;
}

}  // namespace aisim::harness

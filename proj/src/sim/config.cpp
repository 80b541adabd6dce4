// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/sim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bmsim {

std::string SimConfig::antenna_tag() const {
    return std::to_string(gnb_array.m_v) + "x" + std::to_string(gnb_array.m_h);
}

int SimConfig::ssb_size() const {
    const int g_az = (codebook.n_az + codebook.ssb_group_az - 1) / codebook.ssb_group_az;
    const int g_el = (codebook.n_el + codebook.ssb_group_el - 1) / codebook.ssb_group_el;
    return g_az * g_el;
}

DatasetSchema SimConfig::dataset_schema() const {
    DatasetSchema s;
    s.use_case = use_case;
    s.n_b = (use_case == UseCase::sbp1) ? ssb_size() : set_b_size;
    s.n_a = set_a_size();
    s.l_o = (use_case == UseCase::tbp) ? l_o : 1;
    s.l_p = (use_case == UseCase::tbp) ? l_p : 0;
    return s;
}

nn::ModelConfig SimConfig::model_config() const {
    const DatasetSchema s = dataset_schema();
    switch (use_case) {
        case UseCase::sbp1: return nn::ModelConfig::sbp1(s.n_b, s.n_a);
        case UseCase::sbp2: return nn::ModelConfig::sbp2(s.n_b, s.n_a);
        default: return nn::ModelConfig::tbp(s.n_b, s.n_a, s.l_o);
    }
}

void SimConfig::validate() const {
    gnb_array.validate();
    ue_array.validate();
    if (ue_panels < 1 || rx_beams_per_panel < 1)
        throw std::invalid_argument("UE needs at least one panel and one RX beam");
    if (codebook.n_az < 1 || codebook.n_el < 1) throw std::invalid_argument("invalid TX grid");
    if (use_case != UseCase::sbp1) {
        if (set_b_size < 1 || set_b_size > set_a_size())
            throw std::invalid_argument("Set B size must be in [1, Set A size]");
    }
    if (use_case == UseCase::tbp && (l_o < 1 || l_p < 1))
        throw std::invalid_argument("TBP requires l_o >= 1 and l_p >= 1");
    if (run.n_drops < 1 || run.ues_per_sector < 1 || run.instants_per_drop < 1)
        throw std::invalid_argument("run sizes must be positive");
    if (run.dt_s <= 0.0) throw std::invalid_argument("dt must be > 0");
    if (run.l1_filter_window < 1 || run.rx_window < 1)
        throw std::invalid_argument("filter windows must be >= 1");
    if (std::fabs(dataset_split[0] + dataset_split[1] + dataset_split[2] - 1.0) > 1e-9)
        throw std::invalid_argument("dataset split must sum to 1");
    if (monitor.tau < 0.0 || monitor.tau > 1.0) throw std::invalid_argument("tau in [0,1]");
    // model budgets are enforced at config build
    model_config();
}

namespace {

nlohmann::json geometry_to_json(const ArrayGeometry& g) {
    return {{"m_h", g.m_h}, {"m_v", g.m_v}, {"d_h", g.d_h}, {"d_v", g.d_v},
            {"element_pattern", to_string(g.element_pattern)}};
}

ArrayGeometry geometry_from_json(const nlohmann::json& j) {
    ArrayGeometry g;
    g.m_h = j.at("m_h").get<int>();
    g.m_v = j.at("m_v").get<int>();
    g.d_h = j.at("d_h").get<double>();
    g.d_v = j.at("d_v").get<double>();
    g.element_pattern = element_pattern_from_string(j.at("element_pattern").get<std::string>());
    return g;
}

}  // namespace

nlohmann::json SimConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["layout"] = {{"n_sites", layout.n_sites},
                   {"sectors_per_site", layout.sectors_per_site},
                   {"isd_m", layout.isd_m},
                   {"gnb_height_m", layout.gnb_height_m},
                   {"carrier_hz", layout.carrier_hz},
                   {"wrap_around", layout.wrap_around},
                   {"min_drop_distance_m", layout.min_drop_distance_m}};
    j["gnb_array"] = geometry_to_json(gnb_array);
    j["ue_array"] = geometry_to_json(ue_array);
    j["ue_panels"] = ue_panels;
    j["rx_beams_per_panel"] = rx_beams_per_panel;
    j["codebook"] = {{"n_az", codebook.n_az},
                     {"n_el", codebook.n_el},
                     {"az_span_deg", {codebook.az_span_deg_lo, codebook.az_span_deg_hi}},
                     {"zen_span_deg", {codebook.zen_span_deg_lo, codebook.zen_span_deg_hi}},
                     {"ssb_group_az", codebook.ssb_group_az},
                     {"ssb_group_el", codebook.ssb_group_el}};
    j["use_case"] = to_string(use_case);
    j["set_b_size"] = set_b_size;
    j["l_o"] = l_o;
    j["l_p"] = l_p;
    j["channel"] = {{"n_clusters", channel.n_clusters},
                    {"k_factor_db", channel.k_factor_db},
                    {"spread_los_deg", channel.spread_los_deg},
                    {"spread_nlos_deg", channel.spread_nlos_deg},
                    {"shadow_sigma_los_db", channel.shadow_sigma_los_db},
                    {"shadow_sigma_nlos_db", channel.shadow_sigma_nlos_db},
                    {"shadow_decorr_m", channel.shadow_decorr_m}};
    j["link"] = {{"tx_power_dbm", tx_power_dbm},
                 {"ue_noise_figure_db", ue_noise_figure_db},
                 {"bandwidth_hz", bandwidth_hz}};
    j["overhead"] = overhead;
    j["max_se"] = max_se;
    j["run"] = {{"n_drops", run.n_drops},
                {"ues_per_sector", run.ues_per_sector},
                {"instants_per_drop", run.instants_per_drop},
                {"dt_s", run.dt_s},
                {"speed_kmph", run.speed_kmph},
                {"measurement_noise", run.measurement_noise},
                {"l1_filter_window", run.l1_filter_window},
                {"rx_window", run.rx_window},
                {"n_s", run.n_s}};
    j["eval"] = {{"n_drops", eval.n_drops},
                 {"top_k_max", eval.top_k_max},
                 {"second_round_refinement", eval.second_round_refinement}};
    j["monitor"] = {{"enabled", monitor.enabled}, {"tau", monitor.tau}, {"window", monitor.window}};
    j["model"] = {{"lr0", hyper.lr0},
                  {"step_epochs", hyper.step_epochs},
                  {"gamma", hyper.gamma},
                  {"epochs", hyper.epochs},
                  {"batch", hyper.batch}};
    j["dataset_split"] = dataset_split;
    return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
    SimConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& jl = j.at("layout");
    c.layout.n_sites = jl.at("n_sites").get<int>();
    c.layout.sectors_per_site = jl.at("sectors_per_site").get<int>();
    c.layout.isd_m = jl.at("isd_m").get<double>();
    c.layout.gnb_height_m = jl.at("gnb_height_m").get<double>();
    c.layout.carrier_hz = jl.at("carrier_hz").get<double>();
    c.layout.wrap_around = jl.at("wrap_around").get<bool>();
    c.layout.min_drop_distance_m = jl.at("min_drop_distance_m").get<double>();
    c.gnb_array = geometry_from_json(j.at("gnb_array"));
    c.ue_array = geometry_from_json(j.at("ue_array"));
    c.ue_panels = j.at("ue_panels").get<int>();
    c.rx_beams_per_panel = j.at("rx_beams_per_panel").get<int>();
    const auto& jc = j.at("codebook");
    c.codebook.n_az = jc.at("n_az").get<int>();
    c.codebook.n_el = jc.at("n_el").get<int>();
    c.codebook.az_span_deg_lo = jc.at("az_span_deg")[0].get<double>();
    c.codebook.az_span_deg_hi = jc.at("az_span_deg")[1].get<double>();
    c.codebook.zen_span_deg_lo = jc.at("zen_span_deg")[0].get<double>();
    c.codebook.zen_span_deg_hi = jc.at("zen_span_deg")[1].get<double>();
    c.codebook.ssb_group_az = jc.at("ssb_group_az").get<int>();
    c.codebook.ssb_group_el = jc.at("ssb_group_el").get<int>();
    c.use_case = use_case_from_string(j.at("use_case").get<std::string>());
    c.set_b_size = j.at("set_b_size").get<int>();
    c.l_o = j.at("l_o").get<int>();
    c.l_p = j.at("l_p").get<int>();
    const auto& jch = j.at("channel");
    c.channel.n_clusters = jch.at("n_clusters").get<int>();
    c.channel.k_factor_db = jch.at("k_factor_db").get<double>();
    c.channel.spread_los_deg = jch.at("spread_los_deg").get<double>();
    c.channel.spread_nlos_deg = jch.at("spread_nlos_deg").get<double>();
    c.channel.shadow_sigma_los_db = jch.at("shadow_sigma_los_db").get<double>();
    c.channel.shadow_sigma_nlos_db = jch.at("shadow_sigma_nlos_db").get<double>();
    c.channel.shadow_decorr_m = jch.at("shadow_decorr_m").get<double>();
    const auto& jk = j.at("link");
    c.tx_power_dbm = jk.at("tx_power_dbm").get<double>();
    c.ue_noise_figure_db = jk.at("ue_noise_figure_db").get<double>();
    c.bandwidth_hz = jk.at("bandwidth_hz").get<double>();
    c.overhead = j.at("overhead").get<double>();
    c.max_se = j.at("max_se").get<double>();
    const auto& jr = j.at("run");
    c.run.n_drops = jr.at("n_drops").get<int>();
    c.run.ues_per_sector = jr.at("ues_per_sector").get<int>();
    c.run.instants_per_drop = jr.at("instants_per_drop").get<int>();
    c.run.dt_s = jr.at("dt_s").get<double>();
    c.run.speed_kmph = jr.at("speed_kmph").get<double>();
    c.run.measurement_noise = jr.at("measurement_noise").get<bool>();
    c.run.l1_filter_window = jr.at("l1_filter_window").get<int>();
    c.run.rx_window = jr.at("rx_window").get<int>();
    c.run.n_s = jr.at("n_s").get<int>();
    const auto& je = j.at("eval");
    c.eval.n_drops = je.at("n_drops").get<int>();
    c.eval.top_k_max = je.at("top_k_max").get<int>();
    c.eval.second_round_refinement = je.at("second_round_refinement").get<bool>();
    const auto& jm = j.at("monitor");
    c.monitor.enabled = jm.at("enabled").get<bool>();
    c.monitor.tau = jm.at("tau").get<double>();
    c.monitor.window = jm.at("window").get<int>();
    const auto& jh = j.at("model");
    c.hyper.lr0 = jh.at("lr0").get<double>();
    c.hyper.step_epochs = jh.at("step_epochs").get<int>();
    c.hyper.gamma = jh.at("gamma").get<double>();
    c.hyper.epochs = jh.at("epochs").get<int>();
    c.hyper.batch = jh.at("batch").get<int>();
    c.hyper.seed = c.seed;
    const auto& js = j.at("dataset_split");
    c.dataset_split = {js[0].get<double>(), js[1].get<double>(), js[2].get<double>()};
    c.validate();
    return c;
}

SimConfig SimConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

void SimConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_json().dump(2) << '\n';
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t SimConfig::config_hash() const { return fnv1a64(to_json().dump()); }

void apply_override(nlohmann::json& j, const std::string& key, const std::string& value) {
    nlohmann::json* node = &j;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::invalid_argument("empty override key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]))
            throw std::invalid_argument("unknown config path: " + key);
        node = &(*node)[parts[i]];
    }
    if (!node->contains(parts.back()))
        throw std::invalid_argument("unknown config key: " + key);
    const auto parsed = nlohmann::json::parse(value, nullptr, false);
    (*node)[parts.back()] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
}

}  // namespace bmsim

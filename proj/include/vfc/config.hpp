#pragma once

#include "vfc/units.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfc {

/// Raised when a scenario configuration is invalid; what() names the field.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Full scenario description. All numeric fields are SI internally; the
/// file format accepts KB/GHz/MHz/dBm and converts at ingestion.
struct ScenarioConfig {
    // scenario
    double road_length_m = 3000.0;
    int n_tvs = 30;
    int n_fvs = 12;
    int n_rsus = 3;
    double tv_range_m = 200.0;
    double slot_s = 1.0;
    int horizon_slots = 40;
    std::uint64_t rng_seed = 1;
    double fiber_rate_bps = 1e9;

    // channel
    double bandwidth_hz_min = mhz_to_hz(20.0);
    double bandwidth_hz_max = mhz_to_hz(40.0);
    double tx_power_w_min = dbm_to_watts(20.0);
    double tx_power_w_max = dbm_to_watts(50.0);
    double noise_w = dbm_to_watts(-98.0);
    double carrier_hz = 5.9e9;
    double shadow_db = 4.0;
    double h_rsu_m = 10.0;
    double h_vehicle_m = 1.5;
    double m_v2i_los = 3.0;
    double m_v2i_nlos = 1.0;
    double m_v2v_los = 3.0;
    double m_v2v_nlos = 1.0;

    // mobility
    double alpha = 0.9;
    double sigma_mps = 5.0;
    double sigma_y_mps = 0.05;
    double mean_velocity_mps = 25.0;

    // task distribution
    double input_bits_min = kb_to_bits(300.0);
    double input_bits_max = kb_to_bits(1000.0);
    double output_bits_min = kb_to_bits(30.0);
    double output_bits_max = kb_to_bits(100.0);
    double cycles_min = 0.2e9;
    double cycles_max = 1.0e9;
    double deadline_s_min = 0.5;
    double deadline_s_max = 5.0;

    // compute
    double f_tv_hz_min = ghz_to_hz(0.5);
    double f_tv_hz_max = ghz_to_hz(1.0);
    double f_fv_hz_min = ghz_to_hz(1.0);
    double f_fv_hz_max = ghz_to_hz(10.0);
    double f_rsu_hz = ghz_to_hz(30.0);
    double kappa_tv = 1e-28;
    double kappa_fv = 1e-28;
    double kappa_rsu = 1e-28;

    // per-slot energy budgets
    double e_max_tv_j = 500.0;
    double e_max_fv_j = 8.0;
    double e_max_rsu_j = 3.0;

    // contract
    int contract_levels = 3;
    double unit_energy_cost = 1.0;
    double unit_resource_price = 1.2e-9;
    double sigma_min = 0.5;
    double sigma_max = 1.5;
    std::vector<double> type_probs;  // empty = uniform

    // kmmto
    double kmmto_f_unit_hz = 0.0;  // 0 = mean pairwise demand

    void validate() const;
};

inline void ScenarioConfig::validate() const {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw ConfigError(std::string("invalid config field: ") + field);
    };
    require(road_length_m > 0, "scenario.road_length_m");
    require(n_tvs >= 0, "scenario.n_tvs");
    require(n_fvs >= 0, "scenario.n_fvs");
    require(n_rsus >= 1, "scenario.n_rsus");
    require(tv_range_m > 0, "scenario.tv_range_m");
    require(slot_s > 0, "scenario.slot_s");
    require(horizon_slots >= 0, "scenario.horizon_slots");
    require(fiber_rate_bps > 0, "scenario.fiber_rate_mbps");
    require(bandwidth_hz_min > 0 && bandwidth_hz_max >= bandwidth_hz_min, "channel.bandwidth_mhz");
    require(tx_power_w_min > 0 && tx_power_w_max >= tx_power_w_min, "channel.tx_power_dbm");
    require(noise_w > 0, "channel.noise_dbm");
    require(carrier_hz > 0, "channel.carrier_ghz");
    require(shadow_db >= 0, "channel.shadow_db");
    require(h_rsu_m > 0, "channel.antenna_height_rsu_m");
    require(h_vehicle_m > 0, "channel.antenna_height_vehicle_m");
    require(m_v2i_los >= 0.5 && m_v2i_nlos >= 0.5 && m_v2v_los >= 0.5 && m_v2v_nlos >= 0.5,
            "channel.nakagami_m");
    require(alpha >= 0.0 && alpha <= 1.0, "mobility.alpha");
    require(sigma_mps >= 0 && sigma_y_mps >= 0, "mobility.sigma_mps");
    require(input_bits_min > 0 && input_bits_max >= input_bits_min, "task.input_kb");
    require(output_bits_min >= 0 && output_bits_max >= output_bits_min, "task.output_kb");
    require(cycles_min > 0 && cycles_max >= cycles_min, "task.gigacycles");
    require(deadline_s_min > 0 && deadline_s_max >= deadline_s_min, "task.deadline_s");
    require(f_tv_hz_min > 0 && f_tv_hz_max >= f_tv_hz_min, "compute.f_tv_ghz");
    require(f_fv_hz_min > 0 && f_fv_hz_max >= f_fv_hz_min, "compute.f_fv_ghz");
    require(f_rsu_hz > 0, "compute.f_rsu_ghz");
    require(kappa_tv > 0 && kappa_fv > 0 && kappa_rsu > 0, "compute.kappa");
    require(e_max_tv_j > 0 && e_max_fv_j > 0 && e_max_rsu_j > 0, "energy.e_max");
    require(contract_levels >= 1, "contract.levels");
    require(unit_energy_cost > 0, "contract.unit_energy_cost");
    require(unit_resource_price > 0, "contract.unit_resource_price");
    require(sigma_min > 0 && sigma_max >= sigma_min, "contract.sigma");
    require(kmmto_f_unit_hz >= 0, "kmmto.f_unit_ghz");
    if (!type_probs.empty()) {
        require(static_cast<int>(type_probs.size()) == contract_levels, "contract.type_probs");
        double sum = 0.0;
        for (double p : type_probs) {
            require(p >= 0.0, "contract.type_probs");
            sum += p;
        }
        require(std::abs(sum - 1.0) < 1e-9, "contract.type_probs");
    }
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses the flat key/value scenario format: `[section]` headers followed
/// by `key = value` lines, `#` comments. Unknown sections or keys are
/// rejected. Returns a validated config.
inline ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        std::string full = section + "." + key;

        auto num = [&]() {
            try {
                size_t pos = 0;
                double v = std::stod(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("non-numeric value for " + full);
            }
        };

        if (full == "scenario.road_length_m") cfg.road_length_m = num();
        else if (full == "scenario.n_tvs") cfg.n_tvs = static_cast<int>(num());
        else if (full == "scenario.n_fvs") cfg.n_fvs = static_cast<int>(num());
        else if (full == "scenario.n_rsus") cfg.n_rsus = static_cast<int>(num());
        else if (full == "scenario.tv_range_m") cfg.tv_range_m = num();
        else if (full == "scenario.slot_s") cfg.slot_s = num();
        else if (full == "scenario.horizon_slots") cfg.horizon_slots = static_cast<int>(num());
        else if (full == "scenario.rng_seed") cfg.rng_seed = static_cast<std::uint64_t>(num());
        else if (full == "scenario.fiber_rate_mbps") cfg.fiber_rate_bps = num() * 1e6;
        else if (full == "channel.bandwidth_mhz_min") cfg.bandwidth_hz_min = mhz_to_hz(num());
        else if (full == "channel.bandwidth_mhz_max") cfg.bandwidth_hz_max = mhz_to_hz(num());
        else if (full == "channel.tx_power_dbm_min") cfg.tx_power_w_min = dbm_to_watts(num());
        else if (full == "channel.tx_power_dbm_max") cfg.tx_power_w_max = dbm_to_watts(num());
        else if (full == "channel.noise_dbm") cfg.noise_w = dbm_to_watts(num());
        else if (full == "channel.carrier_ghz") cfg.carrier_hz = ghz_to_hz(num());
        else if (full == "channel.shadow_db") cfg.shadow_db = num();
        else if (full == "channel.antenna_height_rsu_m") cfg.h_rsu_m = num();
        else if (full == "channel.antenna_height_vehicle_m") cfg.h_vehicle_m = num();
        else if (full == "channel.nakagami_m_v2i_los") cfg.m_v2i_los = num();
        else if (full == "channel.nakagami_m_v2i_nlos") cfg.m_v2i_nlos = num();
        else if (full == "channel.nakagami_m_v2v_los") cfg.m_v2v_los = num();
        else if (full == "channel.nakagami_m_v2v_nlos") cfg.m_v2v_nlos = num();
        else if (full == "mobility.alpha") cfg.alpha = num();
        else if (full == "mobility.sigma_mps") cfg.sigma_mps = num();
        else if (full == "mobility.sigma_y_mps") cfg.sigma_y_mps = num();
        else if (full == "mobility.mean_velocity_mps") cfg.mean_velocity_mps = num();
        else if (full == "task.input_kb_min") cfg.input_bits_min = kb_to_bits(num());
        else if (full == "task.input_kb_max") cfg.input_bits_max = kb_to_bits(num());
        else if (full == "task.output_kb_min") cfg.output_bits_min = kb_to_bits(num());
        else if (full == "task.output_kb_max") cfg.output_bits_max = kb_to_bits(num());
        else if (full == "task.gigacycles_min") cfg.cycles_min = num() * 1e9;
        else if (full == "task.gigacycles_max") cfg.cycles_max = num() * 1e9;
        else if (full == "task.deadline_s_min") cfg.deadline_s_min = num();
        else if (full == "task.deadline_s_max") cfg.deadline_s_max = num();
        else if (full == "compute.f_tv_ghz_min") cfg.f_tv_hz_min = ghz_to_hz(num());
        else if (full == "compute.f_tv_ghz_max") cfg.f_tv_hz_max = ghz_to_hz(num());
        else if (full == "compute.f_fv_ghz_min") cfg.f_fv_hz_min = ghz_to_hz(num());
        else if (full == "compute.f_fv_ghz_max") cfg.f_fv_hz_max = ghz_to_hz(num());
        else if (full == "compute.f_rsu_ghz") cfg.f_rsu_hz = ghz_to_hz(num());
        else if (full == "compute.kappa_tv") cfg.kappa_tv = num();
        else if (full == "compute.kappa_fv") cfg.kappa_fv = num();
        else if (full == "compute.kappa_rsu") cfg.kappa_rsu = num();
        else if (full == "energy.e_max_tv_j") cfg.e_max_tv_j = num();
        else if (full == "energy.e_max_fv_j") cfg.e_max_fv_j = num();
        else if (full == "energy.e_max_rsu_j") cfg.e_max_rsu_j = num();
        else if (full == "contract.levels") cfg.contract_levels = static_cast<int>(num());
        else if (full == "contract.unit_energy_cost") cfg.unit_energy_cost = num();
        else if (full == "contract.unit_resource_price") cfg.unit_resource_price = num();
        else if (full == "contract.sigma_min") cfg.sigma_min = num();
        else if (full == "contract.sigma_max") cfg.sigma_max = num();
        else if (full == "contract.type_probs") {
            cfg.type_probs.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                try {
                    cfg.type_probs.push_back(std::stod(detail::trim(tok)));
                } catch (const std::exception&) {
                    throw ConfigError("non-numeric value for contract.type_probs");
                }
            }
        }
        else if (full == "kmmto.f_unit_ghz") cfg.kmmto_f_unit_hz = ghz_to_hz(num());
        else throw ConfigError("unknown config key: " + full);
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace vfc

#include "vfc/engine.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitMissingFile = 2;
constexpr int kExitInvalidInput = 3;

const std::vector<std::string> kMetricNames = {
    "avg_delay_s", "completion_ratio", "throughput_bps", "jain_fairness", "avg_energy_j"};

double metric_value(const vfc::RunMetrics& m, const std::string& name) {
    if (name == "avg_delay_s") return m.avg_delay_s;
    if (name == "completion_ratio") return m.completion_ratio;
    if (name == "throughput_bps") return m.throughput_bps;
    if (name == "jain_fairness") return m.jain_fairness;
    return m.avg_energy_j;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
    }
    return out;
}

vfc::ScenarioConfig load_or_exit(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        std::cerr << "error: config file not found: " << path << "\n";
        std::exit(kExitMissingFile);
    }
    try {
        return vfc::load_config(path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        std::exit(kExitInvalidInput);
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int cmd_run(const std::string& config_path, const std::string& policy_name,
            std::optional<std::uint64_t> seed, const std::string& out_dir) {
    vfc::ScenarioConfig cfg = load_or_exit(config_path);
    vfc::Policy policy;
    try {
        policy = vfc::parse_policy(policy_name);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInvalidInput;
    }
    if (seed) cfg.rng_seed = *seed;

    const vfc::RunMetrics m = vfc::run(cfg, policy);

    std::filesystem::create_directories(out_dir);
    nlohmann::ordered_json j;
    j["policy"] = policy_name;
    j["seed"] = cfg.rng_seed;
    for (const auto& name : kMetricNames) j[name] = metric_value(m, name);
    std::ofstream json_out(std::filesystem::path(out_dir) / "metrics.json");
    json_out << j.dump(2) << "\n";

    std::ofstream csv(std::filesystem::path(out_dir) / "slots.csv");
    csv << "slot,avg_delay_s,completion_ratio,throughput_bps,jain_fairness,avg_energy_j\n";
    for (size_t t = 0; t < m.slot_avg_delay_s.size(); ++t)
        csv << t << ',' << format_number(m.slot_avg_delay_s[t]) << ','
            << format_number(m.slot_completion_ratio[t]) << ','
            << format_number(m.slot_throughput_bps[t]) << ','
            << format_number(m.slot_jain_fairness[t]) << ','
            << format_number(m.slot_avg_energy_j[t]) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values_arg, const std::string& policies_arg, int n_seeds,
              const std::string& out_path, int jobs) {
    const vfc::ScenarioConfig base = load_or_exit(config_path);
    const auto values = split_csv(values_arg);
    if (values.empty() || values_arg.empty()) {
        std::cerr << "error: --values must list at least one value\n";
        return kExitInvalidInput;
    }
    static const std::vector<std::string> known_params = {"n_tvs", "task_kb", "policy", "seed"};
    if (std::find(known_params.begin(), known_params.end(), param) == known_params.end()) {
        std::cerr << "error: unknown sweep parameter: " << param
                  << " (valid: n_tvs, task_kb, policy, seed)\n";
        return kExitInvalidInput;
    }
    if (n_seeds < 1) {
        std::cerr << "error: --seeds must be >= 1\n";
        return kExitInvalidInput;
    }

    std::vector<vfc::Policy> policies;
    std::vector<std::string> policy_names;
    try {
        if (param == "policy") {
            for (const auto& v : values) {
                policies.push_back(vfc::parse_policy(v));
                policy_names.push_back(v);
            }
        } else if (policies_arg.empty()) {
            for (const auto& [name, p] : vfc::policy_table()) {
                policies.push_back(p);
                policy_names.push_back(name);
            }
        } else {
            for (const auto& v : split_csv(policies_arg)) {
                policies.push_back(vfc::parse_policy(v));
                policy_names.push_back(v);
            }
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInvalidInput;
    }

    struct Job {
        std::string param_value;
        std::string policy_name;
        vfc::Policy policy;
        std::uint64_t seed;
        vfc::RunMetrics result;
    };
    std::vector<Job> all_jobs;
    auto config_for = [&](const std::string& value) {
        vfc::ScenarioConfig cfg = base;
        try {
            if (param == "n_tvs") {
                cfg.n_tvs = std::stoi(value);
            } else if (param == "task_kb") {
                cfg.input_bits_min = vfc::kb_to_bits(std::stod(value));
                cfg.input_bits_max = cfg.input_bits_min;
            } else if (param == "seed") {
                cfg.rng_seed = static_cast<std::uint64_t>(std::stoull(value));
            }
            cfg.validate();
        } catch (const vfc::ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw vfc::ConfigError("non-numeric sweep value: " + value);
        }
        return cfg;
    };
    try {
        for (const auto& value : values) {
            if (param == "policy") {
                const vfc::Policy p = vfc::parse_policy(value);
                for (int s = 0; s < n_seeds; ++s)
                    all_jobs.push_back({value, value, p, base.rng_seed + s, {}});
            } else {
                config_for(value);  // validate early
                for (size_t pi = 0; pi < policies.size(); ++pi)
                    for (int s = 0; s < n_seeds; ++s)
                        all_jobs.push_back({value, policy_names[pi], policies[pi],
                                            param == "seed" ? std::stoull(value)
                                                            : base.rng_seed + s,
                                            {}});
            }
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInvalidInput;
    }

    const int workers =
        std::max(1, jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()));
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < all_jobs.size(); i = next.fetch_add(1)) {
            Job& job = all_jobs[i];
            vfc::ScenarioConfig cfg = param == "policy" ? base : config_for(job.param_value);
            cfg.rng_seed = job.seed;
            job.result = vfc::run(cfg, job.policy);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ofstream csv(out_path);
    if (!csv) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitMissingFile;
    }
    csv << "param_value,policy,seed,avg_delay_s,completion_ratio,throughput_bps,"
           "jain_fairness,avg_energy_j\n";
    for (const auto& job : all_jobs) {
        csv << job.param_value << ',' << job.policy_name << ',' << job.seed;
        for (const auto& name : kMetricNames)
            csv << ',' << format_number(metric_value(job.result, name));
        csv << '\n';
    }
    return 0;
}

struct Series {
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

int cmd_plot(const std::string& input, const std::string& metric, const std::string& out_path) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), metric) == kMetricNames.end()) {
        std::cerr << "error: unknown metric: " << metric << " (valid:";
        for (const auto& name : kMetricNames) std::cerr << ' ' << name;
        std::cerr << ")\n";
        return kExitInvalidInput;
    }
    std::ifstream in(input);
    if (!in) {
        std::cerr << "error: cannot open " << input << "\n";
        return kExitMissingFile;
    }
    std::string header;
    std::getline(in, header);
    const auto cols = split_csv(header);
    const auto metric_it = std::find(cols.begin(), cols.end(), metric);
    if (cols.size() < 3 || cols[0] != "param_value" || cols[1] != "policy" ||
        metric_it == cols.end()) {
        std::cerr << "error: " << input << " is not a sweep CSV\n";
        return kExitInvalidInput;
    }
    const size_t metric_col = static_cast<size_t>(metric_it - cols.begin());

    // policy -> param value -> samples
    std::map<std::string, std::map<std::string, std::vector<double>>> samples;
    std::vector<std::string> value_order;
    std::vector<std::string> policy_order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() <= metric_col) {
            std::cerr << "error: malformed row in " << input << "\n";
            return kExitInvalidInput;
        }
        if (std::find(value_order.begin(), value_order.end(), fields[0]) == value_order.end())
            value_order.push_back(fields[0]);
        if (std::find(policy_order.begin(), policy_order.end(), fields[1]) == policy_order.end())
            policy_order.push_back(fields[1]);
        try {
            samples[fields[1]][fields[0]].push_back(std::stod(fields[metric_col]));
        } catch (const std::exception&) {
            std::cerr << "error: non-numeric metric value in " << input << "\n";
            return kExitInvalidInput;
        }
    }
    if (samples.empty()) {
        std::cerr << "error: no data rows in " << input << "\n";
        return kExitInvalidInput;
    }

    // Numeric x when every value parses; otherwise categorical positions.
    std::vector<double> xs(value_order.size());
    bool numeric_x = true;
    for (size_t i = 0; i < value_order.size(); ++i) {
        try {
            size_t pos = 0;
            xs[i] = std::stod(value_order[i], &pos);
            if (pos != value_order[i].size()) numeric_x = false;
        } catch (const std::exception&) {
            numeric_x = false;
        }
    }
    if (!numeric_x)
        for (size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);

    std::map<std::string, Series> series;
    double y_min = 1e300, y_max = -1e300;
    for (const auto& policy : policy_order) {
        Series s;
        for (size_t i = 0; i < value_order.size(); ++i) {
            const auto it = samples[policy].find(value_order[i]);
            if (it == samples[policy].end()) continue;
            const auto& v = it->second;
            double mean = 0.0;
            for (double d : v) mean += d;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double d : v) var += (d - mean) * (d - mean);
            const double se =
                v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) /
                                   std::sqrt(static_cast<double>(v.size()))
                             : 0.0;
            s.x.push_back(xs[i]);
            s.mean.push_back(mean);
            s.stderr_.push_back(se);
            y_min = std::min(y_min, mean - se);
            y_max = std::max(y_max, mean + se);
        }
        series[policy] = std::move(s);
    }
    if (y_max <= y_min) {
        y_max = y_min + 1.0;
        y_min -= 1.0;
    }
    double x_min = 1e300, x_max = -1e300;
    for (double v : xs) {
        x_min = std::min(x_min, v);
        x_max = std::max(x_max, v);
    }
    if (x_max <= x_min) {
        x_max = x_min + 1.0;
        x_min -= 1.0;
    }

    const double width = 760, height = 480, ml = 80, mr = 180, mt = 40, mb = 60;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto py = [&](double y) {
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };
    static const std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    std::ofstream svg(out_path);
    if (!svg) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitMissingFile;
    }
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << format_number(yv) << "</text>\n";
        svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
    }
    for (size_t i = 0; i < xs.size(); ++i) {
        svg << "<text x=\"" << px(xs[i]) << "\" y=\"" << height - mb + 18
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << value_order[i] << "</text>\n";
        svg << "<line x1=\"" << px(xs[i]) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xs[i])
            << "\" y2=\"" << height - mb + 4 << "\" stroke=\"black\"/>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 16
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">param_value"
        << "</text>\n";
    svg << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 20 " << (mt + height - mb) / 2 << ")\">" << metric
        << "</text>\n";

    int color_idx = 0;
    for (const auto& policy : policy_order) {
        const auto& s = series[policy];
        const std::string& color = palette[color_idx % palette.size()];
        std::ostringstream points;
        for (size_t i = 0; i < s.x.size(); ++i)
            points << (i ? " " : "") << px(s.x[i]) << ',' << py(s.mean[i]);
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << points.str() << "\"/>\n";
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double cx = px(s.x[i]);
            svg << "<line x1=\"" << cx << "\" y1=\"" << py(s.mean[i] - s.stderr_[i]) << "\" x2=\""
                << cx << "\" y2=\"" << py(s.mean[i] + s.stderr_[i]) << "\" stroke=\"" << color
                << "\"/>\n";
            svg << "<circle cx=\"" << cx << "\" cy=\"" << py(s.mean[i]) << "\" r=\"3\" fill=\""
                << color << "\"/>\n";
        }
        const double ly = mt + 20.0 * color_idx;
        svg << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
            << width - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << policy << "</text>\n";
        ++color_idx;
    }
    svg << "</svg>\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vehicular fog computing offloading simulator"};
    app.require_subcommand(1);

    std::string config_path, policy = "jcratoa", out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write metrics");
    run_cmd->add_option("--config", config_path, "Scenario config file")->required();
    run_cmd->add_option("--policy", policy, "Offloading policy")->required();
    run_cmd->add_option("--seed", seed, "Override the config RNG seed")
        ->each([&](const std::string&) { seed_set = true; });
    run_cmd->add_option("--out-dir", out_dir, "Output directory (default: .)");

    std::string sweep_config, sweep_param, sweep_values, sweep_policies, sweep_out = "sweep.csv";
    int sweep_seeds = 1, sweep_jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write a CSV");
    sweep_cmd->add_option("--config", sweep_config, "Scenario config file")->required();
    sweep_cmd->add_option("--param", sweep_param, "Swept parameter (n_tvs|task_kb|policy|seed)")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep_cmd->add_option("--policies", sweep_policies,
                          "Comma-separated policies (default: all)");
    sweep_cmd->add_option("--seeds", sweep_seeds, "Seed repetitions per value (default: 1)");
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path (default: sweep.csv)");
    sweep_cmd->add_option("--jobs", sweep_jobs, "Worker threads (default: hardware)");

    std::string plot_input, plot_metric, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Render a sweep CSV as an SVG chart");
    plot_cmd->add_option("--input", plot_input, "Sweep CSV")->required();
    plot_cmd->add_option("--metric", plot_metric, "Metric column to plot")->required();
    plot_cmd->add_option("--out", plot_out, "Output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(config_path, policy,
                           seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt, out_dir);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_config, sweep_param, sweep_values, sweep_policies, sweep_seeds,
                             sweep_out, sweep_jobs);
        return cmd_plot(plot_input, plot_metric, plot_out);
    } catch (const vfc::ConfigError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}

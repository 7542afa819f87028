#include "esqubo/backtest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "esqubo/qubo.hpp"
#include "esqubo/risk.hpp"

namespace esqubo::backtest {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + value +
                                    "' as a number");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size() || v < -1'000'000'000L || v > 1'000'000'000L)
            throw std::invalid_argument(value);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + value +
                                    "' as an integer");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(value, &used);
        if (used != value.size() || (!value.empty() && value[0] == '-'))
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + value +
                                    "' as an unsigned integer");
    }
}

// Baseline period indices [first, last] located by inclusive date comparison.
std::pair<std::size_t, std::size_t> baseline_range(const market_data::ReturnsPanel& panel,
                                                   const RunConfig& config) {
    if (config.baseline_start.empty() || config.baseline_end.empty())
        throw std::invalid_argument("baseline range is required (baseline_start/baseline_end)");
    if (config.baseline_end < config.baseline_start)
        throw std::invalid_argument("baseline range is empty: baseline_end '" + config.baseline_end +
                                    "' precedes baseline_start '" + config.baseline_start + "'");
    auto lo = std::lower_bound(panel.dates.begin(), panel.dates.end(), config.baseline_start);
    auto hi = std::upper_bound(panel.dates.begin(), panel.dates.end(), config.baseline_end);
    if (lo >= hi)
        throw std::invalid_argument("baseline range [" + config.baseline_start + ", " +
                                    config.baseline_end + "] lies outside the data");
    auto first = static_cast<std::size_t>(lo - panel.dates.begin());
    auto last = static_cast<std::size_t>(hi - panel.dates.begin()) - 1;
    if (last - first + 1 < 2)
        throw std::invalid_argument("baseline range [" + config.baseline_start + ", " +
                                    config.baseline_end + "] covers fewer than 2 periods");
    return {first, last};
}

nlohmann::json config_json(const RunConfig& c) {
    return nlohmann::json{{"input", c.input},
                          {"benchmark", c.benchmark},
                          {"baseline_start", c.baseline_start},
                          {"baseline_end", c.baseline_end},
                          {"alpha", c.alpha},
                          {"bits", c.bits},
                          {"window", c.window},
                          {"stride", c.stride},
                          {"eta", c.eta},
                          {"rho_step", c.rho_step},
                          {"max_iters", c.max_iters},
                          {"backend", c.backend},
                          {"seed", c.seed},
                          {"reads", c.reads},
                          {"sweeps", c.sweeps},
                          {"out", c.out}};
}

nlohmann::json weights_json(const Eigen::VectorXd& w) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) arr.push_back(w(i));
    return arr;
}

market_data::ReturnsPanel load_panel(const RunConfig& config) {
    if (config.input.empty()) throw std::invalid_argument("input path is required");
    if (config.benchmark.empty()) throw std::invalid_argument("benchmark asset id is required");
    std::ifstream file(config.input);
    if (!file) throw std::runtime_error("cannot open input file '" + config.input + "'");
    return market_data::load_returns(file, config.benchmark);
}

market_data::WindowSpec window_spec(const RunConfig& config) {
    if (config.window < 2) throw std::invalid_argument("window must be at least 2 periods");
    if (config.stride < 1) throw std::invalid_argument("stride must be at least 1 period");
    return market_data::WindowSpec(static_cast<std::size_t>(config.window),
                                   static_cast<std::size_t>(config.stride));
}

}  // namespace

void apply_config_file(RunConfig& config, std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key=value: '" + line + "'");
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));

        if (key == "input") config.input = value;
        else if (key == "benchmark") config.benchmark = value;
        else if (key == "baseline_start") config.baseline_start = value;
        else if (key == "baseline_end") config.baseline_end = value;
        else if (key == "alpha") config.alpha = parse_double(key, value);
        else if (key == "bits") config.bits = parse_int(key, value);
        else if (key == "window") config.window = parse_int(key, value);
        else if (key == "stride") config.stride = parse_int(key, value);
        else if (key == "eta") config.eta = parse_double(key, value);
        else if (key == "rho_step") config.rho_step = parse_double(key, value);
        else if (key == "max_iters") config.max_iters = parse_int(key, value);
        else if (key == "backend") config.backend = value;
        else if (key == "seed") config.seed = parse_u64(key, value);
        else if (key == "reads") config.reads = parse_int(key, value);
        else if (key == "sweeps") config.sweeps = parse_int(key, value);
        else if (key == "out") config.out = value;
        else
            throw std::invalid_argument("unknown config key '" + key + "' on line " +
                                        std::to_string(line_no));
    }
}

std::string format_config(const RunConfig& c) {
    std::ostringstream os;
    os << "input=" << c.input << '\n'
       << "benchmark=" << c.benchmark << '\n'
       << "baseline_start=" << c.baseline_start << '\n'
       << "baseline_end=" << c.baseline_end << '\n'
       << "alpha=" << format_double(c.alpha) << '\n'
       << "bits=" << c.bits << '\n'
       << "window=" << c.window << '\n'
       << "stride=" << c.stride << '\n'
       << "eta=" << format_double(c.eta) << '\n'
       << "rho_step=" << format_double(c.rho_step) << '\n'
       << "max_iters=" << c.max_iters << '\n'
       << "backend=" << c.backend << '\n'
       << "seed=" << c.seed << '\n'
       << "reads=" << c.reads << '\n'
       << "sweeps=" << c.sweeps << '\n'
       << "out=" << c.out << '\n';
    return os.str();
}

risk::RiskConfig build_risk_config(const market_data::ReturnsPanel& panel,
                                   const RunConfig& config) {
    auto [first, last] = baseline_range(panel, config);
    market_data::WindowRange range{-1, first, last + 1};
    double sigma = market_data::window_stats(panel, range).benchmark_sigma;

    std::vector<double> bench(last - first + 1);
    for (std::size_t k = 0; k < bench.size(); ++k)
        bench[k] = panel.values(static_cast<Eigen::Index>(panel.benchmark_index),
                                static_cast<Eigen::Index>(first + k));
    double es = risk::expected_shortfall(bench, config.alpha);
    try {
        return risk::RiskConfig(config.alpha, sigma, es);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("baseline statistics are unusable: " + std::string(e.what()));
    }
}

allocator::AllocatorConfig make_allocator_config(const risk::RiskConfig& risk_config,
                                                 const RunConfig& config) {
    allocator::AllocatorConfig out(risk_config);
    out.eta = config.eta;
    out.rho_step = config.rho_step;
    out.max_iters = config.max_iters;
    out.bits_per_weight = config.bits;
    out.backend = config.backend;
    out.seed = config.seed;
    out.num_reads = config.reads;
    out.sweeps = config.sweeps;
    return out;
}

int run_backtest(const RunConfig& config) {
    if (config.out.empty()) throw std::invalid_argument("output path prefix is required");
    market_data::ReturnsPanel panel = load_panel(config);
    market_data::WindowSpec spec = window_spec(config);
    risk::RiskConfig risk_config = build_risk_config(panel, config);
    allocator::AllocatorConfig acfg = make_allocator_config(risk_config, config);

    std::vector<market_data::WindowRange> ranges = market_data::windows(panel, spec);
    std::vector<allocator::AllocationRecord> records = allocator::allocate_series(panel, spec, acfg);

    nlohmann::json jwindows = nlohmann::json::array();
    for (std::size_t k = 0; k < records.size(); ++k) {
        const allocator::AllocationRecord& rec = records[k];
        nlohmann::json trace = nlohmann::json::array();
        for (const allocator::IterationTrace& it : rec.trace) {
            trace.push_back(nlohmann::json{{"iteration", it.iteration},
                                           {"rho", it.rho},
                                           {"weights", weights_json(it.weights)},
                                           {"bits", encoding::to_bit_string(it.bits)},
                                           {"realized_es", it.realized_es},
                                           {"target_es", it.target_es},
                                           {"ratio", it.ratio},
                                           {"backend", it.backend}});
        }
        jwindows.push_back(nlohmann::json{
            {"window_index", rec.window_index},
            {"start_date", panel.dates[ranges[k].begin]},
            {"end_date", panel.dates[ranges[k].end - 1]},
            {"weights", weights_json(rec.weights)},
            {"bits", encoding::to_bit_string(rec.bits)},
            {"cash_weight", rec.cash_weight},
            {"realized_es", rec.realized_es},
            {"target_es", rec.target_es},
            {"converged", rec.converged},
            {"iterations", rec.trace.size()},
            {"trace", trace}});
    }
    nlohmann::json result{{"config", config_json(config)}, {"windows", jwindows}};

    std::ostringstream csv;
    csv << "window_index,start_date,end_date";
    for (const std::string& id : panel.asset_ids) csv << ",w_" << id;
    csv << ",cash_weight,realized_es,target_es,converged,iterations\n";
    for (std::size_t k = 0; k < records.size(); ++k) {
        const allocator::AllocationRecord& rec = records[k];
        csv << rec.window_index << ',' << panel.dates[ranges[k].begin] << ','
            << panel.dates[ranges[k].end - 1];
        for (Eigen::Index i = 0; i < rec.weights.size(); ++i)
            csv << ',' << format_double(rec.weights(i));
        csv << ',' << format_double(rec.cash_weight) << ',' << format_double(rec.realized_es)
            << ',' << format_double(rec.target_es) << ',' << (rec.converged ? 1 : 0) << ','
            << rec.trace.size() << '\n';
    }

    // all computation is done; only now touch the filesystem
    const std::string json_path = config.out + ".json";
    const std::string csv_path = config.out + ".csv";
    std::ofstream json_file(json_path, std::ios::binary | std::ios::trunc);
    if (!json_file) throw std::runtime_error("cannot write '" + json_path + "'");
    json_file << result.dump(2) << '\n';
    if (!json_file.flush()) throw std::runtime_error("failed writing '" + json_path + "'");
    std::ofstream csv_file(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv_file) throw std::runtime_error("cannot write '" + csv_path + "'");
    csv_file << csv.str();
    if (!csv_file.flush()) throw std::runtime_error("failed writing '" + csv_path + "'");

    bool all_converged = true;
    for (const allocator::AllocationRecord& rec : records) all_converged &= rec.converged;
    return all_converged ? 0 : 2;
}

void dump_qubo(const RunConfig& config, int window_index, std::optional<double> rho,
               std::ostream& out) {
    market_data::ReturnsPanel panel = load_panel(config);
    market_data::WindowSpec spec = window_spec(config);
    std::vector<market_data::WindowRange> ranges = market_data::windows(panel, spec);
    if (window_index < 0 || static_cast<std::size_t>(window_index) >= ranges.size())
        throw std::out_of_range("window index " + std::to_string(window_index) +
                                " out of range: the series has " + std::to_string(ranges.size()) +
                                " windows");
    market_data::WindowStats stats =
        market_data::window_stats(panel, ranges[static_cast<std::size_t>(window_index)]);

    double target = 0.0;
    if (rho) {
        target = *rho;
    } else {
        // the window's initial return target, as the outer loop would set it
        for (Eigen::Index i = 0; i < stats.mu.size(); ++i) target += stats.mu(i);
        target /= static_cast<double>(stats.mu.size());
        if (target <= 0.0) target = 1e-6;
    }
    auto [lb, lr] = qubo::default_penalties(stats.cov, stats.mu, target);
    encoding::Encoding enc(static_cast<int>(panel.n_assets()), config.bits);
    qubo::QuboProblem problem = qubo::build(enc, stats.cov, stats.mu, target, lb, lr);
    out << qubo::to_json(problem).dump(2) << '\n';
}

}  // namespace esqubo::backtest

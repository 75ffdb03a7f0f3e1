#include "smaml/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smaml {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, T (*conv)(const std::string&)) {
    std::vector<T> out;
    for (const std::string& item : split_list(s)) out.push_back(conv(item));
    return out;
}

int to_int(const std::string& s) { return std::stoi(s); }
double to_double(const std::string& s) { return std::stod(s); }
uint64_t to_u64(const std::string& s) { return std::stoull(s); }

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("expected boolean, got '" + s + "'");
}

void apply_synth_key(SynthSpec& spec, const std::string& key,
                     const std::string& value) {
    if (key == "length") spec.length = to_int(value);
    else if (key == "trend_slope") spec.trend_slope = to_double(value);
    else if (key == "season_amplitude") spec.season_amplitude = to_double(value);
    else if (key == "season_period") spec.season_period = to_int(value);
    else if (key == "ar_coeffs") spec.ar_coeffs = parse_list<double>(value, to_double);
    else if (key == "noise_sigma") spec.noise_sigma = to_double(value);
    else if (key == "seed") spec.seed = to_u64(value);
    else throw std::invalid_argument("unknown synth key '" + key + "'");
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config '" + path + "'");

    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "source_csv") { cfg.source_csv = split_list(value); cfg.use_synth = false; }
            else if (key == "target_csv") { cfg.target_csv = value; cfg.use_synth = false; }
            else if (key == "csv_column") cfg.csv_column = value;
            else if (key.rfind("source_synth.", 0) == 0)
                apply_synth_key(cfg.source_synth, key.substr(13), value);
            else if (key.rfind("target_synth.", 0) == 0)
                apply_synth_key(cfg.target_synth, key.substr(13), value);
            else if (key == "dataset_name") cfg.dataset_name = value;
            else if (key == "integrate_conditions") cfg.integrate_conditions = to_bool(value);
            else if (key == "methods") cfg.methods = split_list(value);
            else if (key == "N") cfg.n_values = parse_list<int>(value, to_int);
            else if (key == "K") cfg.k_values = parse_list<int>(value, to_int);
            else if (key == "input_len") cfg.input_len = to_int(value);
            else if (key == "stride") cfg.stride = to_int(value);
            else if (key == "seeds") cfg.seeds = parse_list<uint64_t>(value, to_u64);
            else if (key == "test_tasks") cfg.test_tasks = to_int(value);
            else if (key == "hidden_size") cfg.hidden_size = to_int(value);
            else if (key == "inner_lr") cfg.meta.inner_lr = to_double(value);
            else if (key == "inner_steps") cfg.meta.inner_steps = to_int(value);
            else if (key == "outer_lr") cfg.meta.outer_lr = to_double(value);
            else if (key == "meta_epochs") cfg.meta.meta_epochs = to_int(value);
            else if (key == "meta_batch") cfg.meta.tasks_per_meta_batch = to_int(value);
            else if (key == "first_order") cfg.meta.first_order = to_bool(value);
            else if (key == "differencing") {
                if (value == "auto") cfg.diff_mode = DiffMode::automatic;
                else if (value == "off") cfg.diff_mode = DiffMode::off;
                else { cfg.diff_mode = DiffMode::fixed; cfg.fixed_diff_order = to_int(value); }
            }
            else if (key == "es_alpha") { cfg.es_alpha = to_double(value); cfg.es_alpha_set = true; }
            else if (key == "out") cfg.out_dir = value;
            else if (key == "threads") cfg.threads = to_int(value);
            else if (key == "seed") { cfg.master_seed = to_u64(value); cfg.master_seed_set = true; }
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& e) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": bad value for '" + key + "': " + e.what());
        }
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.input_len < 4 || cfg.input_len % 4 != 0)
        throw std::invalid_argument("input_len must be a positive multiple of 4");
    if (cfg.seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
    if (cfg.methods.empty()) throw std::invalid_argument("methods must be non-empty");
    bool has_es = false;
    for (const std::string& m : cfg.methods) {
        strategy_from_name(m);  // throws on unknown method
        if (m == "esmaml") has_es = true;
    }
    if (cfg.es_alpha_set && !has_es)
        throw std::invalid_argument("es_alpha is only valid with method esmaml");
    if (cfg.es_alpha_set && (!(cfg.es_alpha > 0.0) || cfg.es_alpha > 1.0))
        throw std::invalid_argument("es_alpha must be in (0, 1]");
    for (int n : cfg.n_values)
        if (n < 1) throw std::invalid_argument("N values must be >= 1");
    for (int k : cfg.k_values)
        if (k < 1) throw std::invalid_argument("K values must be >= 1");
    if (cfg.test_tasks < 1) throw std::invalid_argument("test_tasks must be >= 1");
    if (cfg.hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
    if (cfg.stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (!(cfg.meta.inner_lr > 0.0) || cfg.meta.inner_steps < 1)
        throw std::invalid_argument("inner_lr must be > 0 and inner_steps >= 1");
    if (cfg.meta.meta_epochs < 0)
        throw std::invalid_argument("meta_epochs must be >= 0");
    if (!cfg.use_synth) {
        if (cfg.source_csv.empty())
            throw std::invalid_argument("source_csv required for CSV datasets");
        if (cfg.target_csv.empty())
            throw std::invalid_argument("target_csv required for CSV datasets");
    } else {
        if (cfg.source_synth.length < 1 || cfg.target_synth.length < 1)
            throw std::invalid_argument(
                "synthetic specs need source_synth.length and target_synth.length");
    }
    if (cfg.integrate_conditions && cfg.source_csv.size() < 2)
        throw std::invalid_argument(
            "integrate_conditions needs at least two source_csv entries");
}

uint64_t cell_seed(uint64_t master, const std::string& method, int N, int K,
                   size_t seed_index) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(&master, sizeof(master));
    mix(method.data(), method.size());
    mix(&N, sizeof(N));
    mix(&K, sizeof(K));
    mix(&seed_index, sizeof(seed_index));
    return h;
}

}  // namespace smaml

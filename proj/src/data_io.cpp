#include "smaml/data_io.hpp"

#include <Eigen/Eigenvalues>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace smaml {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string full_precision(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string rounded3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
}

}  // namespace

Series load_csv(const std::string& path, const std::string& column) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(f, line))
        throw std::runtime_error("empty file '" + path + "'");
    auto header = split_csv_row(line);
    int col = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == column) col = static_cast<int>(i);
    if (col < 0)
        throw std::runtime_error("column '" + column + "' not found in '" + path + "'");

    std::vector<double> values;
    int line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_row(line);
        if (static_cast<size_t>(col) >= cells.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": missing column '" + column + "'");
        const std::string cell = trim(cells[static_cast<size_t>(col)]);
        try {
            size_t pos = 0;
            const double v = std::stod(cell, &pos);
            if (pos != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
            values.push_back(v);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": cell '" + cell + "' is not a finite number");
        }
    }
    if (values.empty()) throw std::runtime_error("no data rows in '" + path + "'");
    return Series(values, column);
}

void write_csv(const std::string& path, const Series& series,
               const std::string& column) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "t," << column << "\n";
    for (Eigen::Index t = 0; t < series.length(); ++t)
        f << t << "," << full_precision(series.values[t]) << "\n";
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

bool ar_is_stationary(const std::vector<double>& coeffs) {
    const int p = static_cast<int>(coeffs.size());
    if (p == 0) return true;
    // Companion matrix of the AR polynomial; stationary iff all
    // eigenvalue moduli are strictly below 1.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) comp(0, j) = coeffs[static_cast<size_t>(j)];
    for (int i = 1; i < p; ++i) comp(i, i - 1) = 1.0;
    Eigen::VectorXcd eig = comp.eigenvalues();
    for (int i = 0; i < p; ++i)
        if (std::abs(eig[i]) >= 1.0 - 1e-9) return false;
    return true;
}

}  // namespace

SynthResult generate_synthetic(const SynthSpec& spec) {
    if (spec.length < 1) throw std::invalid_argument("synthetic length must be >= 1");
    if (spec.season_amplitude != 0.0 && spec.season_period < 2)
        throw std::invalid_argument("season period must be >= 2");
    if (spec.noise_sigma < 0.0)
        throw std::invalid_argument("noise sigma must be non-negative");
    if (!ar_is_stationary(spec.ar_coeffs))
        throw std::invalid_argument("AR coefficients are not stationary");

    const Eigen::Index n = spec.length;
    const int p = static_cast<int>(spec.ar_coeffs.size());
    SynthResult out;
    out.spec = spec;
    out.trend.resize(n);
    out.season.resize(n);
    out.noise.resize(n);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int burn_in = 200;
    std::vector<double> hist(static_cast<size_t>(std::max(p, 1)), 0.0);
    auto ar_next = [&]() {
        double x = spec.noise_sigma * gauss(rng);
        for (int j = 0; j < p; ++j) x += spec.ar_coeffs[static_cast<size_t>(j)] * hist[static_cast<size_t>(j)];
        for (int j = p - 1; j > 0; --j) hist[static_cast<size_t>(j)] = hist[static_cast<size_t>(j - 1)];
        if (p > 0) hist[0] = x;
        return x;
    };
    for (int i = 0; i < burn_in; ++i) ar_next();

    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        out.trend[t] = spec.trend_slope * static_cast<double>(t);
        out.season[t] =
            spec.season_amplitude *
            std::sin(2.0 * M_PI * static_cast<double>(t) / spec.season_period);
        out.noise[t] = ar_next();
        y[t] = out.trend[t] + out.season[t] + out.noise[t];
    }
    out.series = Series(std::move(y), "synthetic");
    return out;
}

void write_synth_sidecar(const std::string& path, const SynthResult& result) {
    nlohmann::json j;
    j["spec"] = {{"length", result.spec.length},
                 {"trend_slope", result.spec.trend_slope},
                 {"season_amplitude", result.spec.season_amplitude},
                 {"season_period", result.spec.season_period},
                 {"ar_coeffs", result.spec.ar_coeffs},
                 {"noise_sigma", result.spec.noise_sigma},
                 {"seed", result.spec.seed}};
    auto to_vec = [](const Eigen::VectorXd& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    j["trend"] = to_vec(result.trend);
    j["season"] = to_vec(result.season);
    j["noise"] = to_vec(result.noise);

    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << j.dump(2) << "\n";
}

DomainRegistry register_domains(std::vector<DomainSpec> source_specs,
                                std::vector<DomainSpec> target_specs,
                                bool integrate_conditions) {
    if (source_specs.empty())
        throw std::invalid_argument("at least one source domain required");
    std::set<std::string> names;
    for (const auto* list : {&source_specs, &target_specs})
        for (const DomainSpec& d : *list) {
            if (d.series.empty())
                throw std::invalid_argument("domain '" + d.name + "' has no series");
            if (!names.insert(d.name).second)
                throw std::invalid_argument("duplicate domain name '" + d.name + "'");
        }
    DomainRegistry reg;
    reg.sources = std::move(source_specs);
    reg.targets = std::move(target_specs);
    reg.integrate_conditions = integrate_conditions;
    return reg;
}

std::vector<WindowPair> pool_source_windows(const DomainRegistry& registry,
                                            int input_len, int stride) {
    std::vector<WindowPair> pool;
    const size_t count = registry.integrate_conditions ? registry.sources.size() : 1;
    for (size_t i = 0; i < count; ++i)
        for (const Series& s : registry.sources[i].series) {
            auto w = make_windows(s, input_len, stride);
            pool.insert(pool.end(), w.begin(), w.end());
        }
    return pool;
}

double ResultRecord::mae_mean() const {
    if (mae_per_seed.empty()) return 0.0;
    double sum = 0.0;
    for (double m : mae_per_seed) sum += m;
    return sum / static_cast<double>(mae_per_seed.size());
}

void write_results_csv(const std::string& path,
                       const std::vector<ResultRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no result records to write");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "dataset,method,N,K,input_len,seed_count,mae_mean,mae_per_seed\n";
    for (const ResultRecord& r : records) {
        f << r.dataset << "," << r.method << "," << r.N << "," << r.K << ","
          << r.input_len << "," << r.mae_per_seed.size() << ","
          << full_precision(r.mae_mean()) << ",";
        for (size_t i = 0; i < r.mae_per_seed.size(); ++i) {
            if (i) f << ";";
            f << full_precision(r.mae_per_seed[i]);
        }
        f << "\n";
    }
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_results_markdown(const std::string& path,
                            const std::vector<ResultRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no result records to write");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "| dataset | method | N | K | input_len | MAE |\n";
    f << "|---|---|---|---|---|---|\n";
    for (const ResultRecord& r : records)
        f << "| " << r.dataset << " | " << r.method << " | " << r.N << " | "
          << r.K << " | " << r.input_len << " | " << rounded3(r.mae_mean())
          << " |\n";
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace smaml

#ifndef SMAML_DATA_IO_HPP
#define SMAML_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "smaml/partition.hpp"
#include "smaml/series.hpp"

namespace smaml {

enum class DomainRole { source, target };

struct DomainSpec {
    std::string name;
    DomainRole role = DomainRole::source;
    std::vector<Series> series;
    std::string operating_condition;
};

struct SynthSpec {
    Eigen::Index length = 0;
    double trend_slope = 0.0;
    double season_amplitude = 0.0;
    int season_period = 24;
    std::vector<double> ar_coeffs;
    double noise_sigma = 0.0;
    uint64_t seed = 0;
};

struct SynthResult {
    Series series;
    Eigen::VectorXd trend;
    Eigen::VectorXd season;
    Eigen::VectorXd noise;
    SynthSpec spec;
};

// One column of a headered CSV as a Series. Row order is time order.
Series load_csv(const std::string& path, const std::string& column);
void write_csv(const std::string& path, const Series& series,
               const std::string& column = "value");

// y_t = slope*t + amplitude*sin(2*pi*t/period) + AR noise. Rejects AR
// coefficients whose characteristic roots touch the unit circle.
SynthResult generate_synthetic(const SynthSpec& spec);

// Spec + component arrays, for provenance next to a generated CSV.
void write_synth_sidecar(const std::string& path, const SynthResult& result);

struct DomainRegistry {
    std::vector<DomainSpec> sources;
    std::vector<DomainSpec> targets;
    bool integrate_conditions = false;
};

DomainRegistry register_domains(std::vector<DomainSpec> source_specs,
                                std::vector<DomainSpec> target_specs,
                                bool integrate_conditions);

// Per-series windowing over every source series; windows never straddle
// series boundaries.
std::vector<WindowPair> pool_source_windows(const DomainRegistry& registry,
                                            int input_len, int stride = 1);

struct ResultRecord {
    std::string dataset;
    std::string method;
    int N = 0;
    int K = 0;
    int input_len = 0;
    std::vector<double> mae_per_seed;
    double mae_mean() const;
};

// CSV columns: dataset, method, N, K, input_len, seed_count, mae_mean,
// mae_per_seed (semicolon-joined, full precision). The Markdown grid
// rounds cells to 3 decimals.
void write_results_csv(const std::string& path,
                       const std::vector<ResultRecord>& records);
void write_results_markdown(const std::string& path,
                            const std::vector<ResultRecord>& records);

}  // namespace smaml

#endif  // SMAML_DATA_IO_HPP

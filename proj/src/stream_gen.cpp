#include "driftguard/stream_gen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "driftguard/errors.hpp"

namespace driftguard::stream {

namespace {

constexpr double kMeanRadius = 3.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent generator streams derived from the config seed.
enum class Stream : std::uint64_t { Means = 1, Train = 2, Test = 3 };

std::mt19937_64 rng_for(std::uint64_t seed, Stream s) {
    return std::mt19937_64(splitmix64(seed ^ (static_cast<std::uint64_t>(s) << 56)));
}

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

void apply_drift(const DriftSpec& d, std::vector<std::vector<double>>& means,
                 std::mt19937_64& rng) {
    switch (d.kind) {
        case DriftKind::Rotate: {
            const double c = std::cos(d.magnitude);
            const double s = std::sin(d.magnitude);
            for (auto& m : means) {
                const double x = m[0];
                const double y = m[1];
                m[0] = c * x - s * y;
                m[1] = s * x + c * y;
            }
            break;
        }
        case DriftKind::Translate: {
            const auto dir = random_unit(means.front().size(), rng);
            for (auto& m : means) {
                for (std::size_t k = 0; k < m.size(); ++k) m[k] += d.magnitude * dir[k];
            }
            break;
        }
        case DriftKind::Scale:
            for (auto& m : means) {
                for (double& x : m) x *= d.magnitude;
            }
            break;
    }
}

// Stratified labels for one task: counts differ by at most one across classes.
std::vector<int> stratified_labels(std::size_t n, std::size_t classes, std::mt19937_64& rng) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
    std::shuffle(labels.begin(), labels.end(), rng);
    return labels;
}

std::vector<double> draw_point(const std::vector<double>& mean, double sigma,
                               std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> x(mean.size());
    for (std::size_t k = 0; k < mean.size(); ++k) x[k] = mean[k] + noise(rng);
    return x;
}

}  // namespace

std::string_view to_string(DriftKind kind) {
    switch (kind) {
        case DriftKind::Rotate: return "rotate";
        case DriftKind::Translate: return "translate";
        case DriftKind::Scale: return "scale";
    }
    return "rotate";
}

DriftKind drift_kind_from_string(std::string_view name) {
    if (name == "rotate") return DriftKind::Rotate;
    if (name == "translate") return DriftKind::Translate;
    if (name == "scale") return DriftKind::Scale;
    throw ConfigError("unknown drift kind '" + std::string(name) +
                      "' (expected rotate, translate or scale)");
}

void DriftSpec::validate() const {
    if (!std::isfinite(magnitude)) throw ConfigError("drift magnitude must be finite");
    if (kind == DriftKind::Scale && !(magnitude > 0.0)) {
        throw ConfigError("scale drift factor must be positive");
    }
}

void TaskSequenceConfig::validate() const {
    if (class_count < 2) throw ConfigError("class_count must be at least 2");
    if (feature_dim < 1) throw ConfigError("feature_dim must be at least 1");
    if (task_count < 1) throw ConfigError("task_count must be at least 1");
    if (samples_per_task < 1) throw ConfigError("samples_per_task must be at least 1");
    if (drift_between_tasks.size() != task_count - 1) {
        throw ConfigError("expected " + std::to_string(task_count - 1) +
                          " drift specs between tasks, got " +
                          std::to_string(drift_between_tasks.size()));
    }
    if (!(class_noise_sigma > 0.0) || !std::isfinite(class_noise_sigma)) {
        throw ConfigError("class_noise_sigma must be positive");
    }
    for (const auto& d : drift_between_tasks) {
        d.validate();
        if (d.kind == DriftKind::Rotate && feature_dim < 2) {
            throw ConfigError("rotate drift needs feature_dim >= 2");
        }
    }
}

TaskSequenceConfig default_benchmark(std::uint64_t seed) {
    TaskSequenceConfig cfg;
    cfg.seed = seed;
    cfg.drift_between_tasks.assign(cfg.task_count - 1,
                                   DriftSpec{DriftKind::Rotate, std::numbers::pi / 20.0});
    return cfg;
}

std::vector<std::vector<std::vector<double>>> task_means(const TaskSequenceConfig& cfg) {
    cfg.validate();
    auto rng = rng_for(cfg.seed, Stream::Means);
    std::vector<std::vector<double>> means(cfg.class_count,
                                           std::vector<double>(cfg.feature_dim, 0.0));
    if (cfg.feature_dim == 1) {
        // Evenly spaced points on [-3, 3].
        for (std::size_t c = 0; c < cfg.class_count; ++c) {
            means[c][0] = -kMeanRadius + 2.0 * kMeanRadius * static_cast<double>(c) /
                                             static_cast<double>(cfg.class_count - 1);
        }
    } else if (cfg.feature_dim == 2) {
        std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
        const double phase = phase_dist(rng);
        for (std::size_t c = 0; c < cfg.class_count; ++c) {
            const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(c) /
                                         static_cast<double>(cfg.class_count);
            means[c][0] = kMeanRadius * std::cos(a);
            means[c][1] = kMeanRadius * std::sin(a);
        }
    } else {
        for (auto& m : means) {
            m = random_unit(cfg.feature_dim, rng);
            for (double& x : m) x *= kMeanRadius;
        }
    }

    std::vector<std::vector<std::vector<double>>> out;
    out.reserve(cfg.task_count);
    out.push_back(means);
    for (const auto& d : cfg.drift_between_tasks) {
        apply_drift(d, means, rng);
        out.push_back(means);
    }
    return out;
}

std::vector<std::size_t> change_points(const TaskSequenceConfig& cfg) {
    std::vector<std::size_t> out;
    for (std::size_t t = 1; t < cfg.task_count; ++t) out.push_back(t * cfg.samples_per_task);
    return out;
}

std::vector<StreamSample> make_stream(const TaskSequenceConfig& cfg) {
    const auto means = task_means(cfg);
    auto rng = rng_for(cfg.seed, Stream::Train);
    std::vector<StreamSample> out;
    out.reserve(cfg.task_count * cfg.samples_per_task);
    for (std::size_t t = 0; t < cfg.task_count; ++t) {
        const auto labels = stratified_labels(cfg.samples_per_task, cfg.class_count, rng);
        for (int y : labels) {
            StreamSample s;
            s.features = draw_point(means[t][static_cast<std::size_t>(y)], cfg.class_noise_sigma, rng);
            s.label = y;
            s.task_id = static_cast<int>(t);
            s.stream_index = out.size();
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<nn::LabeledBatch> make_test_sets(const TaskSequenceConfig& cfg,
                                             std::size_t samples_per_task) {
    const auto means = task_means(cfg);
    auto rng = rng_for(cfg.seed, Stream::Test);
    std::vector<nn::LabeledBatch> out;
    for (std::size_t t = 0; t < cfg.task_count; ++t) {
        nn::LabeledBatch batch;
        batch.dim = cfg.feature_dim;
        for (int y : stratified_labels(samples_per_task, cfg.class_count, rng)) {
            batch.append(draw_point(means[t][static_cast<std::size_t>(y)], cfg.class_noise_sigma, rng), y);
        }
        out.push_back(std::move(batch));
    }
    return out;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

template <typename T>
bool parse_number(std::string_view cell, T& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

std::vector<StreamSample> ingest_csv(const std::filesystem::path& path, std::size_t feature_dim,
                                     std::size_t class_count) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string(), 0);

    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) throw ParseError(path.string() + ": missing header row", 1);
    const auto header = split_commas(line);
    bool has_task = false;
    {
        std::vector<std::string> expected;
        for (std::size_t k = 0; k < feature_dim; ++k) expected.push_back("f" + std::to_string(k));
        expected.emplace_back("label");
        const bool base_ok =
            header.size() >= expected.size() &&
            std::equal(expected.begin(), expected.end(), header.begin());
        has_task = base_ok && header.size() == expected.size() + 1 && header.back() == "task_id";
        if (!base_ok || (header.size() != expected.size() && !has_task)) {
            throw ParseError(path.string() + ":1: expected header f0,...,f" +
                                 std::to_string(feature_dim - 1) + ",label[,task_id]",
                             1);
        }
    }
    const std::size_t columns = feature_dim + 1 + (has_task ? 1 : 0);

    std::vector<StreamSample> out;
    while (next_line()) {
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        if (cells.size() != columns) {
            throw ParseError(where + "expected " + std::to_string(columns) + " columns, found " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        StreamSample s;
        s.features.resize(feature_dim);
        for (std::size_t k = 0; k < feature_dim; ++k) {
            if (!parse_number(cells[k], s.features[k]) || !std::isfinite(s.features[k])) {
                throw ParseError(where + "feature f" + std::to_string(k) + " is not a number: '" +
                                     std::string(cells[k]) + "'",
                                 line_no);
            }
        }
        if (!parse_number(cells[feature_dim], s.label) || s.label < 0) {
            throw ParseError(where + "label is not a non-negative integer: '" +
                                 std::string(cells[feature_dim]) + "'",
                             line_no);
        }
        if (static_cast<std::size_t>(s.label) >= class_count) {
            throw InputDomainError(where + "label " + std::to_string(s.label) +
                                   " is not below class_count " + std::to_string(class_count));
        }
        if (has_task && !parse_number(cells[feature_dim + 1], s.task_id)) {
            throw ParseError(where + "task_id is not an integer: '" +
                                 std::string(cells[feature_dim + 1]) + "'",
                             line_no);
        }
        s.stream_index = out.size();
        out.push_back(std::move(s));
    }
    return out;
}

nn::LabeledBatch to_batch(std::span<const StreamSample> samples, std::size_t feature_dim) {
    nn::LabeledBatch batch;
    batch.dim = feature_dim;
    for (const auto& s : samples) batch.append(s.features, s.label);
    return batch;
}

}  // namespace driftguard::stream

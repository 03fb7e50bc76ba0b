#include "driftguard/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "driftguard/errors.hpp"

namespace driftguard::report {

using nlohmann::json;
using experiment::ExperimentConfig;
using experiment::RunReport;

namespace {

// Walks one JSON object, rejecting keys that no reader claimed.
class ObjectReader {
  public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
    }
    ObjectReader(const ObjectReader&) = delete;
    ObjectReader& operator=(const ObjectReader&) = delete;

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError("unknown key '" + where_ + "." + key + "'");
        }
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) fail(key, "a number");
            out = v->get<double>();
        }
    }
    void read(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                fail(key, "a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }
    void read(const std::string& key, std::uint64_t& out, bool) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                fail(key, "a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }
    void read(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) fail(key, "a boolean");
            out = v->get<bool>();
        }
    }
    bool read(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail(key, "a string");
            out = v->get<std::string>();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError("'" + where_ + "." + key + "' must be " + what);
    }

    const std::string& where() const { return where_; }

  private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
    json drifts = json::array();
    for (const auto& d : cfg.stream.drift_between_tasks) {
        drifts.push_back({{"kind", stream::to_string(d.kind)}, {"magnitude", d.magnitude}});
    }
    return {
        {"method", experiment::to_string(cfg.method)},
        {"seed", cfg.seed},
        {"adaptation_buffer_size", cfg.adaptation_buffer_size},
        {"adaptation_epochs", cfg.adaptation_epochs},
        {"test_samples_per_task", cfg.test_samples_per_task},
        {"record_wall_time", cfg.record_wall_time},
        {"hidden_widths", cfg.hidden_widths},
        {"detector",
         {{"lambda", cfg.detector.lambda_sens},
          {"delta", cfg.detector.delta},
          {"n_max", cfg.detector.n_max},
          {"check_stride", cfg.detector.check_stride}}},
        {"consolidation",
         {{"lambda_ewc", cfg.consolidation.lambda_ewc},
          {"fisher_samples", cfg.consolidation.fisher_samples},
          {"fisher_mode", ewc::to_string(cfg.consolidation.fisher_mode)}}},
        {"training",
         {{"learning_rate", cfg.training.learning_rate},
          {"epochs", cfg.training.epochs},
          {"batch_size", cfg.training.batch_size}}},
        {"stream",
         {{"class_count", cfg.stream.class_count},
          {"feature_dim", cfg.stream.feature_dim},
          {"samples_per_task", cfg.stream.samples_per_task},
          {"task_count", cfg.stream.task_count},
          {"class_noise_sigma", cfg.stream.class_noise_sigma},
          {"drifts", drifts},
          {"csv", cfg.csv_path ? json(*cfg.csv_path) : json(nullptr)}}},
    };
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    {
        ObjectReader top(j, "config");
        std::string method;
        if (top.read("method", method)) cfg.method = experiment::method_from_string(method);
        top.read("seed", cfg.seed, true);
        top.read("adaptation_buffer_size", cfg.adaptation_buffer_size);
        top.read("adaptation_epochs", cfg.adaptation_epochs);
        top.read("test_samples_per_task", cfg.test_samples_per_task);
        top.read("record_wall_time", cfg.record_wall_time);
        if (const json* h = top.find("hidden_widths")) {
            if (!h->is_array()) top.fail("hidden_widths", "an array of positive integers");
            cfg.hidden_widths.clear();
            for (const auto& w : *h) {
                if (!w.is_number_integer() || w.get<long long>() < 1) {
                    top.fail("hidden_widths", "an array of positive integers");
                }
                cfg.hidden_widths.push_back(w.get<std::size_t>());
            }
        }
        if (const json* d = top.find("detector")) {
            ObjectReader r(*d, "detector");
            r.read("lambda", cfg.detector.lambda_sens);
            r.read("delta", cfg.detector.delta);
            r.read("n_max", cfg.detector.n_max);
            r.read("check_stride", cfg.detector.check_stride);
            r.finish();
        }
        if (const json* c = top.find("consolidation")) {
            ObjectReader r(*c, "consolidation");
            r.read("lambda_ewc", cfg.consolidation.lambda_ewc);
            r.read("fisher_samples", cfg.consolidation.fisher_samples);
            std::string mode;
            if (r.read("fisher_mode", mode)) {
                cfg.consolidation.fisher_mode = ewc::fisher_mode_from_string(mode);
            }
            r.finish();
        }
        if (const json* t = top.find("training")) {
            ObjectReader r(*t, "training");
            r.read("learning_rate", cfg.training.learning_rate);
            r.read("epochs", cfg.training.epochs);
            r.read("batch_size", cfg.training.batch_size);
            r.finish();
        }
        if (const json* s = top.find("stream")) {
            ObjectReader r(*s, "stream");
            auto& sc = cfg.stream;
            r.read("class_count", sc.class_count);
            r.read("feature_dim", sc.feature_dim);
            r.read("samples_per_task", sc.samples_per_task);
            r.read("task_count", sc.task_count);
            r.read("class_noise_sigma", sc.class_noise_sigma);
            if (const json* drifts = r.find("drifts")) {
                if (!drifts->is_array()) r.fail("drifts", "an array");
                sc.drift_between_tasks.clear();
                for (const auto& dj : *drifts) {
                    ObjectReader dr(dj, "stream.drifts[]");
                    stream::DriftSpec spec;
                    std::string kind;
                    if (dr.read("kind", kind)) spec.kind = stream::drift_kind_from_string(kind);
                    dr.read("magnitude", spec.magnitude);
                    dr.finish();
                    sc.drift_between_tasks.push_back(spec);
                }
            } else if (sc.task_count >= 1) {
                const auto fill = stream::default_benchmark().drift_between_tasks.front();
                sc.drift_between_tasks.assign(sc.task_count - 1, fill);
            }
            if (const json* csv = r.find("csv"); csv && !csv->is_null()) {
                if (!csv->is_string()) r.fail("csv", "a path string or null");
                cfg.csv_path = csv->get<std::string>();
            }
            r.finish();
        }
        top.finish();
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json to_json(const RunReport& r) {
    json events = json::array();
    for (const auto& e : r.drift_events) {
        events.push_back({
            {"stream_position", e.stream_position},
            {"estimated_change_position", e.estimated_change_position
                                              ? json(*e.estimated_change_position)
                                              : json(nullptr)},
            {"score_sf", e.score_sf},
            {"threshold", e.threshold},
            {"labeled_buffer", {e.buffer_begin, e.buffer_end}},
            {"gradient_updates", e.updates},
        });
    }
    return {
        {"schema", kSchema},
        {"config", config_to_json(r.config)},
        {"drift_events", events},
        {"accuracy_matrix", r.accuracy.to_rows()},
        {"task_map", r.task_map},
        {"evaluation", r.evaluation},
        {"aa", r.aa},
        {"af", r.af},
        {"cost",
         {{"gradient_updates", r.cost.gradient_updates},
          {"fine_tune_events", r.cost.fine_tune_events},
          {"detector_invocations", r.cost.detector_invocations},
          {"labeled_samples", r.cost.labeled_samples}}},
        {"warnings", r.warnings},
        {"wall_time_ms", r.wall_time_ms ? json(*r.wall_time_ms) : json(nullptr)},
    };
}

RunReport from_json(const json& j) {
    try {
        if (j.at("schema") != kSchema) {
            throw ConfigError("unsupported report schema " + j.at("schema").dump());
        }
        RunReport r;
        r.config = config_from_json(j.at("config"));
        for (const auto& e : j.at("drift_events")) {
            experiment::DriftEvent ev;
            ev.stream_position = e.at("stream_position").get<std::size_t>();
            if (!e.at("estimated_change_position").is_null()) {
                ev.estimated_change_position = e.at("estimated_change_position").get<std::size_t>();
            }
            ev.score_sf = e.at("score_sf").get<double>();
            ev.threshold = e.at("threshold").get<double>();
            ev.buffer_begin = e.at("labeled_buffer").at(0).get<std::size_t>();
            ev.buffer_end = e.at("labeled_buffer").at(1).get<std::size_t>();
            ev.updates = e.at("gradient_updates").get<std::size_t>();
            r.drift_events.push_back(ev);
        }
        r.accuracy = metrics::AccuracyMatrix::from_rows(
            j.at("accuracy_matrix").get<std::vector<std::vector<double>>>());
        r.task_map = j.at("task_map").get<std::vector<int>>();
        r.evaluation = j.at("evaluation").get<std::string>();
        r.aa = j.at("aa").get<double>();
        r.af = j.at("af").get<double>();
        const auto& c = j.at("cost");
        r.cost.gradient_updates = c.at("gradient_updates").get<std::size_t>();
        r.cost.fine_tune_events = c.at("fine_tune_events").get<std::size_t>();
        r.cost.detector_invocations = c.at("detector_invocations").get<std::size_t>();
        r.cost.labeled_samples = c.at("labeled_samples").get<std::size_t>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (!j.at("wall_time_ms").is_null()) r.wall_time_ms = j.at("wall_time_ms").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

std::string dump(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

std::string summary(const RunReport& r) {
    std::ostringstream out;
    out << "method: " << experiment::to_string(r.config.method) << "  seed: " << r.config.seed
        << "\n";
    out << "tasks learned: " << r.accuracy.rows() << "\n";
    out << "AA: " << format_fixed(100.0 * r.aa, 2) << "%\n";
    out << "AF: " << format_fixed(r.af, 4) << "\n";
    out << "drift events: " << r.drift_events.size() << "\n";
    for (const auto& e : r.drift_events) {
        out << "  at " << e.stream_position << "  change~";
        if (e.estimated_change_position) {
            out << *e.estimated_change_position;
        } else {
            out << "?";
        }
        out << "  s_f=" << format_fixed(e.score_sf, 3) << "  T_h=" << format_fixed(e.threshold, 3)
            << "  updates=" << e.updates << "\n";
    }
    out << "accuracy matrix:\n";
    for (const auto& row : r.accuracy.to_rows()) {
        out << " ";
        for (double a : row) out << " " << format_fixed(a, 4);
        out << "\n";
    }
    out << "cost: gradient_updates=" << r.cost.gradient_updates
        << " fine_tune_events=" << r.cost.fine_tune_events
        << " detector_invocations=" << r.cost.detector_invocations
        << " labeled_samples=" << r.cost.labeled_samples << "\n";
    if (r.wall_time_ms) out << "wall time: " << format_fixed(*r.wall_time_ms, 1) << " ms\n";
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::string accuracy_csv(const RunReport& r) {
    std::ostringstream out;
    out << "t,i,accuracy\n";
    const auto rows = r.accuracy.to_rows();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t i = 0; i < rows[t].size(); ++i) {
            out << t + 1 << "," << i + 1 << "," << json(rows[t][i]).dump() << "\n";
        }
    }
    return out.str();
}

}  // namespace driftguard::report

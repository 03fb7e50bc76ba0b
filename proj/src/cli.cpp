#include "driftguard/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "driftguard/beta_dist.hpp"
#include "driftguard/drift_detector.hpp"
#include "driftguard/errors.hpp"
#include "driftguard/experiment.hpp"
#include "driftguard/report.hpp"

namespace driftguard::cli {

namespace {

std::vector<double> read_confidence_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    std::string line;
    std::size_t line_no = 0;
    auto next = [&] {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };
    if (!next() || line != "q") throw ParseError(path + ":1: expected header 'q'", 1);
    std::vector<double> q;
    while (next()) {
        if (line.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != line.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" + line + "'",
                             line_no);
        }
        q.push_back(v);
    }
    return q;
}

int run_command(const std::string& config_path, const std::optional<std::string>& method,
                const std::optional<std::uint64_t>& seed, const std::string& out_path,
                const std::string& matrix_path, std::ostream& out, std::ostream& err) {
    auto cfg = config_path.empty() ? experiment::ExperimentConfig{}
                                   : report::load_config(config_path);
    if (method) cfg.method = experiment::method_from_string(*method);
    if (seed) cfg.seed = *seed;
    cfg.validate();

    const auto result = experiment::run(cfg);
    const auto text = report::dump(result);
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw Error("cannot write report to " + out_path);
        f << text;
        err << "report written to " << out_path << "\n";
    }
    if (!matrix_path.empty()) {
        std::ofstream f(matrix_path, std::ios::binary);
        if (!f) throw Error("cannot write accuracy matrix to " + matrix_path);
        f << report::accuracy_csv(result);
    }
    return kExitOk;
}

int detect_command(const std::string& csv, const drift::DetectorConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto q = read_confidence_csv(csv);
    drift::DriftDetector detector(cfg);
    std::size_t events = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto report = detector.step(0, q[i]);
        if (!report) continue;
        ++events;
        out << "drift at sample " << i;
        if (report->change_index) {
            out << ": estimated change at " << i + 1 - report->window_len + *report->change_index;
        }
        out << ", s_f=" << report->score_sf << ", T_h=" << report->threshold_th << "\n";
    }
    out << "drift events: " << events << "\n";
    out << "detector invocations: " << detector.invocations() << "\n";
    return kExitOk;
}

int report_command(const std::string& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("report " + path + " is not valid JSON: " + e.what());
    }
    out << report::summary(report::from_json(j));
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Drift detection and consolidation-based continual learning experiments",
                 "driftguard"};
    app.require_subcommand(1);

    std::string config_path;
    std::string method;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string matrix_path;
    auto* run = app.add_subcommand("run", "Run an experiment and write its report");
    run->add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    auto* method_opt = run->add_option("--method", method, "dawc, stl or fcb");
    auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_path, "Write the report here instead of stdout");
    run->add_option("--matrix-csv", matrix_path, "Also export the accuracy matrix as CSV");

    std::string csv_path;
    drift::DetectorConfig det;
    auto* detect = app.add_subcommand("detect", "Run the drift detector over a confidence CSV");
    detect->add_option("--csv", csv_path, "CSV with header 'q', one confidence per row")
        ->required();
    detect->add_option("--lambda", det.lambda_sens, "Sensitivity in (0,1)")->required();
    detect->add_option("--delta", det.delta, "Padding (samples)")->required();
    detect->add_option("--nmax", det.n_max, "Window capacity (samples)")->required();
    detect->add_option("--stride", det.check_stride, "Pushes between detector runs");

    std::string in_path;
    auto* rep = app.add_subcommand("report", "Summarize a report file");
    rep->add_option("--in", in_path, "Report JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (*run) {
            std::optional<std::string> m;
            if (*method_opt) m = method;
            std::optional<std::uint64_t> s;
            if (*seed_opt) s = seed;
            return run_command(config_path, m, s, out_path, matrix_path, out, err);
        }
        if (*detect) return detect_command(csv_path, det, out);
        if (*rep) return report_command(in_path, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace driftguard::cli

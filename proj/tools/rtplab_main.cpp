// rtplab: config-driven laboratory for zeros of random trigonometric
// polynomials with dependent coefficients.
//
// Exit codes: 0 all verdicts pass, 1 some verdict failed, 2 config/schema
// error, 3 runtime failure.  Reliability warnings never change the exit code.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtp/experiment.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rtp::SchemaError(path, "cannot open file");
    return nlohmann::json::parse(in);
}

int execute(nlohmann::json doc, const std::optional<std::uint64_t>& seed,
            const std::optional<int>& reps, const std::optional<std::string>& out,
            const std::optional<int>& threads) {
    // Overrides land in the document itself so the report's config echo
    // reproduces exactly what ran.
    if (seed) doc["seed"] = *seed;
    if (reps) doc["reps"] = *reps;
    if (out) doc["out"] = *out;
    if (threads) doc["threads"] = *threads;

    rtp::ExperimentConfig cfg = rtp::parse_config(doc);
    rtp::ExperimentReport rep = rtp::run_experiment(cfg);

    for (const auto& v : rep.document["verdicts"])
        std::cout << (v["pass"].get<bool>() ? "PASS  " : "FAIL  ")
                  << v["name"].get<std::string>() << "  ["
                  << v["detail"].get<std::string>() << "]\n";
    if (rep.reliability_warning)
        std::cout << "WARNING: zero counter flagged suspicious cells in more than 1% "
                     "of replicates; see report.json\n";
    for (const auto& f : rep.files_written)
        std::cout << "wrote " << (cfg.out_dir + "/" + f) << "\n";
    return rep.all_pass ? 0 : 1;
}

int show_report(const std::string& path, const std::optional<std::string>& rerun_dir) {
    nlohmann::json doc = load_json(path);
    if (!doc.is_object() || !doc.contains("config"))
        throw rtp::SchemaError(path, "not an experiment report (no config echo)");

    std::cout << "version:  " << doc.value("version", std::string("?")) << "\n"
              << "kind:     " << doc.value("kind", std::string("?")) << "\n"
              << "model:    " << doc.value("model_fingerprint", std::string("?")) << "\n"
              << "all_pass: " << (doc.value("all_pass", false) ? "yes" : "no") << "\n";
    if (doc.contains("verdicts"))
        for (const auto& v : doc["verdicts"])
            std::cout << "  " << (v.value("pass", false) ? "PASS  " : "FAIL  ")
                      << v.value("name", std::string("?")) << "  ["
                      << v.value("detail", std::string()) << "]\n";

    if (rerun_dir) {
        std::cout << "replaying embedded config into " << *rerun_dir << "\n";
        return execute(doc["config"], std::nullopt, std::nullopt, rerun_dir, std::nullopt);
    }
    return doc.value("all_pass", false) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laboratory for real zeros of random trigonometric polynomials"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<std::string> out;
    std::optional<int> threads;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("-c,--config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed, "override the master seed");
    run->add_option("--reps", reps, "override the replicate count");
    run->add_option("--out", out, "override the output directory");
    run->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::string report_path;
    std::optional<std::string> rerun_dir;
    CLI::App* rep = app.add_subcommand("report", "summarize a report; optionally replay it");
    rep->add_option("file", report_path, "report.json produced by run")->required();
    rep->add_option("--rerun", rerun_dir, "re-execute the embedded config into this directory");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return execute(load_json(config_path), seed, reps, out, threads);
        return show_report(report_path, rerun_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const rtp::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

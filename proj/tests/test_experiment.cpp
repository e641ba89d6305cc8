#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rtp/experiment.hpp"
#include "rtp/oracle.hpp"
#include "rtp/spectral.hpp"
#include "rtp/zeros.hpp"

using namespace rtp;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json base_doc() {
    return json{{"kind", "expect-zeros"},
                {"model", json{{"type", "iid"}, {"family", "gaussian"}}},
                {"n", json::array({16})},
                {"reps", 50},
                {"seed", 7}};
}

// Path reported by parse_config, or a sentinel when it unexpectedly succeeds.
std::string schema_path(const json& doc) {
    try {
        parse_config(doc);
    } catch (const SchemaError& e) {
        return e.path;
    }
    return "<no error>";
}

const ordered_json* find_verdict(const ordered_json& doc, const std::string& name) {
    for (const auto& v : doc.at("verdicts"))
        if (v.at("name").get<std::string>() == name) return &v;
    return nullptr;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    std::filesystem::path dir = std::filesystem::path("exp_out") / name;
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("schema errors carry the offending field path") {
    json doc = base_doc();
    doc.erase("seed");
    CHECK(schema_path(doc) == "seed");

    doc = base_doc();
    doc["seed"] = -1;
    CHECK(schema_path(doc) == "seed");

    doc = base_doc();
    doc["bogus"] = 1;
    CHECK(schema_path(doc) == "bogus");

    doc = base_doc();
    doc["kind"] = "zeros";
    CHECK(schema_path(doc) == "kind");

    doc = base_doc();
    doc["n"] = json::array();
    CHECK(schema_path(doc) == "n");

    doc = base_doc();
    doc["n"] = json::array({16, 0});
    CHECK(schema_path(doc) == "n[1]");

    doc = base_doc();
    doc.erase("reps"); // expect-zeros is Monte Carlo, so reps is required
    CHECK(schema_path(doc) == "reps");

    doc = base_doc();
    doc["threads"] = -2;
    CHECK(schema_path(doc) == "threads");

    doc = base_doc();
    doc["model"]["family"] = "cauchy";
    CHECK(schema_path(doc) == "model.family");

    doc = base_doc();
    doc["model"] = json{{"type", "iid"}, {"family", "two-point"}};
    CHECK(schema_path(doc) == "model.p");

    doc = base_doc();
    doc["model"]["p"] = 0.5; // p on a non-two-point family
    CHECK(schema_path(doc) == "model.p");

    doc = base_doc();
    doc["model"] = json{{"type", "ma"}, {"kernel", json::array()}, {"family", "gaussian"}};
    CHECK(schema_path(doc) == "model.kernel");

    doc = base_doc();
    doc["model"] = json{{"type", "gfun"}, {"rho_g", json::array({0.9, 0.4})}};
    CHECK(schema_path(doc) == "model.rho_g");

    doc = base_doc();
    doc["model"] = json{{"type", "gfun"},
                        {"rho_g", json::array({1.0, 0.4})},
                        {"closed_form", "exponential"}};
    CHECK(schema_path(doc) == "model");

    doc = base_doc();
    doc["kind"] = "sinc-oracle"; // takes no model block
    CHECK(schema_path(doc) == "model");

    // m_list ordering is checked by the engine, one level past parse_config.
    doc = json{{"kind", "tv-bound"},
               {"model", json{{"type", "gfun"}, {"closed_form", "exponential"}}},
               {"n", json::array({32})},
               {"seed", 1},
               {"out", fresh_dir("mlist").string()},
               {"params", json{{"m_list", json::array({4, 2})}}}};
    std::string got = "<no error>";
    try {
        run_experiment(parse_config(doc));
    } catch (const SchemaError& e) {
        got = e.path;
    }
    CHECK(got == "params.m_list[1]");

    doc = base_doc();
    doc["tolerances"] = json{{"universality_rel", 0.1}, {"mystery", 1}};
    CHECK(schema_path(doc) == "tolerances.mystery");
}

TEST_CASE("model blocks build the documented generators") {
    CoefficientModel iid = model_from_json(json{{"type", "iid"}, {"family", "gaussian"}});
    CHECK(iid.fingerprint() == CoefficientModel::iid(Family::Gaussian).fingerprint());

    CoefficientModel ma = model_from_json(
        json{{"type", "ma"}, {"kernel", json::array({1.0, 1.0})}, {"family", "gaussian"}});
    CHECK(ma.covariance().at(1) == doctest::Approx(0.5).epsilon(1e-15));

    // Two-point support values land exactly where the probability dictates.
    CoefficientModel tp = model_from_json(
        json{{"type", "iid"}, {"family", "two-point"}, {"p", 0.9}});
    CHECK(tp.two_point.hi == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(tp.two_point.lo == doctest::Approx(-3.0).epsilon(1e-15));

    // The identity Hermite coefficient list [1] reproduces rho_g itself.
    CoefficientModel id = model_from_json(json{
        {"type", "gfun"},
        {"rho_g", json::array({1.0, 0.3})},
        {"functional", json{{"hermite", json::array({1.0})}}}});
    CHECK(id.covariance().at(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(id.covariance().at(1) == doctest::Approx(0.3).epsilon(1e-12));

    CHECK_THROWS_AS(
        model_from_json(json{{"type", "gfun"}, {"closed_form", "exponential"}, {"order", 0}}),
        SchemaError);
    CHECK_THROWS_AS(
        model_from_json(json{{"type", "gfun"}, {"closed_form", "exponential"}, {"eta", 0.0}}),
        SchemaError);
    CHECK_THROWS_AS(
        model_from_json(json{{"type", "gfun"}, {"closed_form", "exponential"},
                             {"functional", 3.5}}),
        SchemaError);
}

TEST_CASE("expect-zeros runs end to end and reproduces its tables") {
    json doc = base_doc();
    doc["reps"] = 120;
    doc["seed"] = 3;
    doc["threads"] = 1;
    doc["tolerances"] = json{{"universality_rel", 0.2}};
    auto dir_a = fresh_dir("zeros_a");
    doc["out"] = dir_a.string();

    ExperimentReport rep = run_experiment(parse_config(doc));
    CHECK(rep.all_pass);
    CHECK_FALSE(rep.reliability_warning);
    REQUIRE(rep.files_written.size() == 3);
    CHECK(rep.files_written[0] == "report.json");
    CHECK(rep.files_written[1] == "expect_zeros.csv");
    CHECK(rep.files_written[2] == "plot_expect_zeros.csv");
    for (const auto& f : rep.files_written)
        CHECK(std::filesystem::exists(dir_a / f));

    const ordered_json& d = rep.document;
    CHECK(d.at("kind") == "expect-zeros");
    std::string version = d.at("version").get<std::string>();
    CHECK(version.rfind("rtplab", 0) == 0);
    CHECK_FALSE(d.at("model_fingerprint").get<std::string>().empty());
    CHECK(d.at("all_pass").get<bool>());

    const ordered_json* uni = find_verdict(d, "universality n=16");
    const ordered_json* orc = find_verdict(d, "oracle match n=16");
    REQUIRE(uni != nullptr);
    REQUIRE(orc != nullptr);
    CHECK(uni->at("pass").get<bool>());
    CHECK(orc->at("pass").get<bool>());

    // The quadrature oracle lands on the closed form, and its exact decimal
    // image appears in the CSV oracle column.
    double oracle = d.at("rows").at(0).at("oracle").get<double>();
    CHECK(oracle == doctest::Approx(kac_rice_iid_exact(16) / 16.0).epsilon(1e-9));
    std::string csv = slurp(dir_a / "expect_zeros.csv");
    CHECK(csv.rfind("n,mean,stderr,ci_lo,ci_hi,limit,oracle,suspicious_fraction\n", 0) == 0);
    CHECK(csv.find("\n16,") != std::string::npos);
    CHECK(csv.find(format_g17(oracle)) != std::string::npos);

    // Same config, fresh directory: byte-identical tables.
    auto dir_b = fresh_dir("zeros_b");
    doc["out"] = dir_b.string();
    run_experiment(parse_config(doc));
    CHECK(slurp(dir_b / "expect_zeros.csv") == csv);
    CHECK(slurp(dir_b / "plot_expect_zeros.csv") == slurp(dir_a / "plot_expect_zeros.csv"));
}

TEST_CASE("clt with a single degree reports a vacuous trend") {
    json doc{{"kind", "clt"},
             {"model", json{{"type", "iid"}, {"family", "gaussian"}}},
             {"n", json::array({32})},
             {"reps", 150},
             {"seed", 11},
             {"threads", 1},
             {"out", fresh_dir("clt").string()}};
    ExperimentReport rep = run_experiment(parse_config(doc));
    CHECK(rep.all_pass);
    const ordered_json* trend = find_verdict(rep.document, "d_K decreasing");
    REQUIRE(trend != nullptr);
    CHECK(trend->at("pass").get<bool>());
    CHECK(trend->at("detail").get<std::string>() == "single n, trend vacuous");

    double dk = rep.document.at("rows").at(0).at("d_k").get<double>();
    CHECK(dk > 0.0);
    CHECK(dk < 1.0);
}

TEST_CASE("spectral kind flags a density without a positive floor") {
    // rho_g = (1, 0.7) is pointwise admissible but its density 1 + 1.4 cos x
    // dips negative, so the floor check must fail while mass and round-trip
    // stay exact.
    json doc{{"kind", "spectral"},
             {"model", json{{"type", "gfun"},
                            {"rho_g", json::array({1.0, 0.7})},
                            {"functional", json{{"hermite", json::array({1.0})}}}}},
             {"n", json::array({64})},
             {"seed", 1},
             {"out", fresh_dir("spectral").string()}};
    ExperimentReport rep = run_experiment(parse_config(doc));
    CHECK_FALSE(rep.all_pass);

    const ordered_json* mass = find_verdict(rep.document, "unit mass grid=64");
    const ordered_json* rt = find_verdict(rep.document, "covariance round-trip grid=64");
    const ordered_json* floor = find_verdict(rep.document, "positive floor grid=64");
    REQUIRE(mass != nullptr);
    REQUIRE(rt != nullptr);
    REQUIRE(floor != nullptr);
    CHECK(mass->at("pass").get<bool>());
    CHECK(rt->at("pass").get<bool>());
    CHECK_FALSE(floor->at("pass").get<bool>());
    CHECK(rep.document.at("rows").at(0).at("kappa").get<double>() ==
          doctest::Approx(-0.4).epsilon(1e-9));
}

TEST_CASE("small-ball cross-checks the exact enumeration when available") {
    json doc{{"kind", "small-ball"},
             {"model", json{{"type", "iid"}, {"family", "rademacher"}}},
             {"n", json::array({6})},
             {"reps", 200},
             {"seed", 9},
             {"threads", 1},
             {"params", json{{"mode", "at-point"}, {"delta", 0.6}, {"t", 0.9}, {"X", 1.3}}},
             {"out", fresh_dir("smallball").string()}};
    ExperimentReport rep = run_experiment(parse_config(doc));
    CHECK(rep.all_pass);

    const ordered_json* match = find_verdict(rep.document, "enumeration match n=6");
    REQUIRE(match != nullptr);
    CHECK(match->at("pass").get<bool>());

    double exact = rep.document.at("rows").at(0).at("exact").get<double>();
    CHECK(exact == doctest::Approx(rademacher_smallball_exact(6, 1.3, 0.9, 0.6))
                       .epsilon(1e-15));
}

TEST_CASE("tv-bound kind passes its internal consistency verdicts") {
    json doc{{"kind", "tv-bound"},
             {"model", json{{"type", "gfun"}, {"closed_form", "exponential"}}},
             {"n", json::array({48})},
             {"seed", 5},
             {"params", json{{"m_list", json::array({0, 4, 8})}}},
             {"out", fresh_dir("tv").string()}};
    ExperimentReport rep = run_experiment(parse_config(doc));
    CHECK(rep.all_pass);
    const ordered_json* trace = find_verdict(rep.document, "tv <= trace n=48");
    const ordered_json* mono = find_verdict(rep.document, "monotone in m n=48");
    REQUIRE(trace != nullptr);
    REQUIRE(mono != nullptr);
    CHECK(trace->at("pass").get<bool>());
    CHECK(mono->at("pass").get<bool>());
}

TEST_CASE("csv cells use round-tripping decimal text") {
    CHECK(format_g17(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_g17(0.5) == "0.5");
    CHECK(format_g17(0.0) == "0");
    for (double v : {3.141592653589793, 0.1, 1e-300, 2.2250738585072014e-308,
                     -7.0 / 11.0, 1.1547005383792515}) {
        std::string s = format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

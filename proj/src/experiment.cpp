#include "rtp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>

#include "rtp/oracle.hpp"
#include "rtp/stats.hpp"
#include "rtp/tvbound.hpp"
#include "rtp/zeros.hpp"

#ifndef RTP_VERSION
#define RTP_VERSION "0.0.0-dev"
#endif

namespace rtp {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kTwoOverSqrt3 = 1.1547005383792515; // 2/sqrt(3)

// --- schema plumbing --------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw SchemaError(path, msg);
}

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) fail(join(path, it.key()), "unknown field");
    }
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
    const json* p = find(j, key);
    if (!p) fail(join(path, key), "required field is missing");
    return *p;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> as_number_array(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

// --- tolerances --------------------------------------------------------------

struct Tolerances {
    double universality_rel = 0.02; // relative gap to the 2/sqrt(3) limit
    double oracle_se = 5.0;         // |mc - oracle| budget in stderr units
    double sinc_se = 3.0;           // sinc mean budget in stderr units
    int trend_inversions = 1;       // allowed d_K non-decreases along n
    double supball = 0.01;          // sup-norm small-ball frequency ceiling
    double identity = 1e-9;         // exact-identity slack
};

Tolerances parse_tolerances(const json& j, const std::string& path) {
    Tolerances t;
    if (j.is_null()) return t;
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"universality_rel", "oracle_se", "sinc_se",
                         "trend_inversions", "supball", "identity"});
    if (const json* p = find(j, "universality_rel"))
        t.universality_rel = as_number(*p, join(path, "universality_rel"));
    if (const json* p = find(j, "oracle_se")) t.oracle_se = as_number(*p, join(path, "oracle_se"));
    if (const json* p = find(j, "sinc_se")) t.sinc_se = as_number(*p, join(path, "sinc_se"));
    if (const json* p = find(j, "trend_inversions"))
        t.trend_inversions = as_int(*p, join(path, "trend_inversions"));
    if (const json* p = find(j, "supball")) t.supball = as_number(*p, join(path, "supball"));
    if (const json* p = find(j, "identity")) t.identity = as_number(*p, join(path, "identity"));
    return t;
}

ojson tolerances_echo(const Tolerances& t) {
    ojson j;
    j["universality_rel"] = t.universality_rel;
    j["oracle_se"] = t.oracle_se;
    j["sinc_se"] = t.sinc_se;
    j["trend_inversions"] = t.trend_inversions;
    j["supball"] = t.supball;
    j["identity"] = t.identity;
    return j;
}

// --- result assembly ----------------------------------------------------------

struct CsvTable {
    std::string filename;
    std::string header;
    std::vector<std::string> lines;
};

struct KindResult {
    ojson rows = ojson::array();
    ojson verdicts = ojson::array();
    std::vector<CsvTable> tables;
    bool warning = false;
};

void add_verdict(KindResult& res, const std::string& name, bool pass,
                 const std::string& detail) {
    ojson v;
    v["name"] = name;
    v["pass"] = pass;
    v["detail"] = detail;
    res.verdicts.push_back(std::move(v));
}

std::string num_pair(const char* fmt, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

ojson stream_range(int reps) {
    ojson r = ojson::array();
    r.push_back(0);
    r.push_back(reps - 1);
    return r;
}

// --- per-kind engines -----------------------------------------------------------

bool gaussian_linear(const CoefficientModel& m) {
    return (m.kind == CoefficientModel::Kind::Iid ||
            m.kind == CoefficientModel::Kind::MovingAverage) &&
           m.family == Family::Gaussian;
}

KindResult run_expect_zeros(const ExperimentConfig& cfg, const CoefficientModel& model,
                            const Tolerances& tol) {
    if (!cfg.params.is_null()) {
        check_keys(cfg.params, "params", {"localized"});
    }
    bool localized = false;
    if (!cfg.params.is_null())
        if (const json* p = find(cfg.params, "localized"))
            localized = as_bool(*p, "params.localized");

    KindResult res;
    CsvTable table{"expect_zeros.csv",
                   "n,mean,stderr,ci_lo,ci_hi,limit,oracle,suspicious_fraction", {}};
    CsvTable plot{"plot_expect_zeros.csv", "x,y,yerr", {}};

    const bool has_oracle = gaussian_linear(model);
    const CovarianceSequence rho = model.covariance();
    for (int n : cfg.n) {
        MCOptions opt{cfg.reps, cfg.seed, cfg.threads};
        ZeroDensityEstimate z = mc_expected_zero_density(model, n, opt, localized);
        res.warning = res.warning || z.reliability_warning;

        double oracle = std::numeric_limits<double>::quiet_NaN();
        if (has_oracle) oracle = kac_rice_expected_zeros(rho, n) / n;

        ojson row;
        row["n"] = n;
        row["mean"] = z.estimate.mean;
        row["stderr"] = z.estimate.stderr_;
        row["ci95"] = ojson::array({z.estimate.ci95_lo, z.estimate.ci95_hi});
        row["limit"] = kTwoOverSqrt3;
        if (has_oracle) row["oracle"] = oracle;
        row["suspicious_fraction"] = z.suspicious_fraction;
        row["reliability_warning"] = z.reliability_warning;
        row["seed"] = cfg.seed;
        row["streams"] = stream_range(cfg.reps);
        res.rows.push_back(std::move(row));

        double rel = std::abs(z.estimate.mean - kTwoOverSqrt3) / kTwoOverSqrt3;
        add_verdict(res, "universality n=" + std::to_string(n), rel <= tol.universality_rel,
                    num_pair("relative gap %.6g against budget %.6g", rel, tol.universality_rel));
        if (has_oracle) {
            double gap = std::abs(z.estimate.mean - oracle);
            double budget = tol.oracle_se * z.estimate.stderr_;
            add_verdict(res, "oracle match n=" + std::to_string(n), gap <= budget,
                        num_pair("|mc - rice| = %.6g against %.6g", gap, budget));
        }

        table.lines.push_back(
            std::to_string(n) + "," + format_g17(z.estimate.mean) + "," +
            format_g17(z.estimate.stderr_) + "," + format_g17(z.estimate.ci95_lo) + "," +
            format_g17(z.estimate.ci95_hi) + "," + format_g17(kTwoOverSqrt3) + "," +
            format_g17(oracle) + "," + format_g17(z.suspicious_fraction));
        plot.lines.push_back(std::to_string(n) + "," + format_g17(z.estimate.mean) + "," +
                             format_g17(z.estimate.stderr_));
    }
    res.tables.push_back(std::move(table));
    res.tables.push_back(std::move(plot));
    return res;
}

KindResult run_clt(const ExperimentConfig& cfg, const CoefficientModel& model,
                   const Tolerances& tol) {
    std::optional<double> phase;
    double t = 0.0;
    if (!cfg.params.is_null()) {
        check_keys(cfg.params, "params", {"phase", "t"});
        if (const json* p = find(cfg.params, "phase")) {
            if (p->is_string()) {
                if (p->get<std::string>() != "uniform")
                    fail("params.phase", "expected a number or \"uniform\"");
            } else {
                phase = as_number(*p, "params.phase");
            }
        }
        if (const json* p = find(cfg.params, "t")) t = as_number(*p, "params.t");
    }

    KindResult res;
    CsvTable table{"clt.csv", "n,d_k", {}};
    CsvTable plot{"plot_clt.csv", "x,y,yerr", {}};

    std::vector<double> dks;
    for (int n : cfg.n) {
        std::vector<double> samples =
            clt_marginal_samples(model, n, cfg.reps, cfg.seed, phase, t, cfg.threads);
        double dk = kolmogorov_distance_to_normal(std::move(samples));
        dks.push_back(dk);

        ojson row;
        row["n"] = n;
        row["d_k"] = dk;
        row["phase"] = phase ? ojson(*phase) : ojson("uniform");
        row["seed"] = cfg.seed;
        row["streams"] = stream_range(cfg.reps);
        res.rows.push_back(std::move(row));

        table.lines.push_back(std::to_string(n) + "," + format_g17(dk));
        plot.lines.push_back(std::to_string(n) + "," + format_g17(dk) + ",0");
    }

    if (dks.size() >= 2) {
        int inversions = 0;
        for (std::size_t i = 1; i < dks.size(); ++i)
            if (dks[i] >= dks[i - 1]) ++inversions;
        add_verdict(res, "d_K decreasing", inversions <= tol.trend_inversions,
                    num_pair("%.0f inversions against %.0f allowed",
                             static_cast<double>(inversions),
                             static_cast<double>(tol.trend_inversions)));
    } else {
        add_verdict(res, "d_K decreasing", true, "single n, trend vacuous");
    }

    res.tables.push_back(std::move(table));
    res.tables.push_back(std::move(plot));
    return res;
}

KindResult run_small_ball(const ExperimentConfig& cfg, const CoefficientModel& model,
                          const Tolerances& tol) {
    if (cfg.params.is_null()) fail("params", "small-ball needs mode and delta");
    check_keys(cfg.params, "params", {"mode", "delta", "t", "X"});
    const std::string mode_s = as_string(require(cfg.params, "params", "mode"), "params.mode");
    SmallBallMode mode;
    if (mode_s == "at-point")
        mode = SmallBallMode::AtPoint;
    else if (mode_s == "sup-norm")
        mode = SmallBallMode::SupNorm;
    else
        fail("params.mode", "expected \"at-point\" or \"sup-norm\"");
    const double delta = as_number(require(cfg.params, "params", "delta"), "params.delta");
    if (delta <= 0.0) fail("params.delta", "must be > 0");
    double t = 0.0, X = 0.0;
    if (const json* p = find(cfg.params, "t")) t = as_number(*p, "params.t");
    if (const json* p = find(cfg.params, "X")) {
        if (mode == SmallBallMode::SupNorm) fail("params.X", "only meaningful for at-point");
        X = as_number(*p, "params.X");
    }

    const bool enumerable = mode == SmallBallMode::AtPoint &&
                            model.kind == CoefficientModel::Kind::Iid &&
                            model.family == Family::Rademacher;

    KindResult res;
    CsvTable table{"small_ball.csv", "n,freq,stderr,exact", {}};
    CsvTable plot{"plot_small_ball.csv", "x,y,yerr", {}};
    for (int n : cfg.n) {
        MCOptions opt{cfg.reps, cfg.seed, cfg.threads};
        MCEstimate e = empirical_small_ball(model, n, delta, mode, t, X, opt);

        double exact = std::numeric_limits<double>::quiet_NaN();
        if (enumerable && n <= 12) exact = rademacher_smallball_exact(n, X, t, delta);

        ojson row;
        row["n"] = n;
        row["freq"] = e.mean;
        row["stderr"] = e.stderr_;
        row["mode"] = mode_s;
        row["delta"] = delta;
        if (!std::isnan(exact)) row["exact"] = exact;
        row["seed"] = cfg.seed;
        row["streams"] = stream_range(cfg.reps);
        res.rows.push_back(std::move(row));

        if (mode == SmallBallMode::SupNorm) {
            add_verdict(res, "sup-ball ceiling n=" + std::to_string(n), e.mean <= tol.supball,
                        num_pair("frequency %.6g against ceiling %.6g", e.mean, tol.supball));
        } else if (!std::isnan(exact)) {
            double gap = std::abs(e.mean - exact);
            double budget = tol.oracle_se * e.stderr_;
            add_verdict(res, "enumeration match n=" + std::to_string(n), gap <= budget,
                        num_pair("|mc - exact| = %.6g against %.6g", gap, budget));
        }

        table.lines.push_back(std::to_string(n) + "," + format_g17(e.mean) + "," +
                              format_g17(e.stderr_) + "," + format_g17(exact));
        plot.lines.push_back(std::to_string(n) + "," + format_g17(e.mean) + "," +
                             format_g17(e.stderr_));
    }
    res.tables.push_back(std::move(table));
    res.tables.push_back(std::move(plot));
    return res;
}

KindResult run_tv_bound(const ExperimentConfig& cfg, const CoefficientModel& model,
                        const Tolerances&) {
    if (model.kind != CoefficientModel::Kind::GaussianFunctional)
        fail("model", "tv-bound needs a gaussian-functional model carrying rho_g");
    if (cfg.params.is_null()) fail("params", "tv-bound needs m_list");
    check_keys(cfg.params, "params", {"m_list"});
    const json& ml = require(cfg.params, "params", "m_list");
    if (!ml.is_array() || ml.empty()) fail("params.m_list", "expected a nonempty array");
    std::vector<int> m_list;
    for (std::size_t i = 0; i < ml.size(); ++i) {
        int m = as_int(ml[i], "params.m_list[" + std::to_string(i) + "]");
        if (m < 0) fail("params.m_list[" + std::to_string(i) + "]", "must be >= 0");
        if (i > 0 && m < m_list.back())
            fail("params.m_list[" + std::to_string(i) + "]", "must be ascending");
        m_list.push_back(m);
    }

    KindResult res;
    CsvTable table{"tv_bound.csv", "n,m,tv_bound,trace_bound,kappa,valid", {}};
    CsvTable plot{"plot_tv_bound.csv", "x,y,yerr", {}};
    for (int n : cfg.n) {
        std::vector<TruncationRow> rows = truncation_sweep(model.rho_g, n, m_list);
        bool dominated = true, monotone = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const TruncationRow& r = rows[i];
            dominated = dominated && r.tv_bound <= r.trace_bound + 1e-12;
            if (i > 0) monotone = monotone && r.tv_bound <= rows[i - 1].tv_bound + 1e-12;

            ojson row;
            row["n"] = n;
            row["m"] = r.m;
            row["tv_bound"] = r.tv_bound;
            row["trace_bound"] = r.trace_bound;
            row["kappa"] = r.kappa_trunc;
            row["valid"] = r.valid;
            res.rows.push_back(std::move(row));

            table.lines.push_back(std::to_string(n) + "," + std::to_string(r.m) + "," +
                                  format_g17(r.tv_bound) + "," + format_g17(r.trace_bound) +
                                  "," + format_g17(r.kappa_trunc) + "," +
                                  (r.valid ? "1" : "0"));
            plot.lines.push_back(std::to_string(r.m) + "," + format_g17(r.tv_bound) + ",0");
        }
        add_verdict(res, "tv <= trace n=" + std::to_string(n), dominated,
                    "eigenvalue bound dominated by its trace relaxation row by row");
        add_verdict(res, "monotone in m n=" + std::to_string(n), monotone,
                    "tv bound nonincreasing along the sweep");
    }
    res.tables.push_back(std::move(table));
    res.tables.push_back(std::move(plot));
    return res;
}

KindResult run_spectral(const ExperimentConfig& cfg, const CoefficientModel& model,
                        const Tolerances& tol) {
    if (!cfg.params.is_null()) check_keys(cfg.params, "params", {});

    const CovarianceSequence rho = model.covariance();
    const int support = rho.support();

    KindResult res;
    CsvTable table{"spectral.csv", "grid,mass,kappa,roundtrip_err", {}};
    for (int grid : cfg.n) {
        if (grid < 2 * (support + 1))
            fail("n", "grid " + std::to_string(grid) + " too small for support " +
                          std::to_string(support));
        SpectralDensity psi = density_from_finite_covariance(rho, grid);
        double mass = psi.mass();
        double floor = kappa(psi);
        std::vector<double> back = fourier_coefficients(psi, support);
        double err = 0.0;
        for (int k = 0; k <= support; ++k)
            err = std::max(err, std::abs(back[k] - rho.at(k)));

        ojson row;
        row["grid"] = grid;
        row["mass"] = mass;
        row["kappa"] = floor;
        row["roundtrip_err"] = err;
        res.rows.push_back(std::move(row));

        add_verdict(res, "unit mass grid=" + std::to_string(grid),
                    std::abs(mass - 1.0) <= tol.identity,
                    num_pair("|mass - 1| = %.6g against %.6g", std::abs(mass - 1.0),
                             tol.identity));
        add_verdict(res, "covariance round-trip grid=" + std::to_string(grid),
                    err <= tol.identity,
                    num_pair("max |rho_back - rho| = %.6g against %.6g", err, tol.identity));
        add_verdict(res, "positive floor grid=" + std::to_string(grid), floor > 0.0,
                    num_pair("kappa = %.6g against > %.6g", floor, 0.0));

        table.lines.push_back(std::to_string(grid) + "," + format_g17(mass) + "," +
                              format_g17(floor) + "," + format_g17(err));
    }
    res.tables.push_back(std::move(table));

    // Density trace on the finest requested grid, as both table and plot data.
    int finest = *std::max_element(cfg.n.begin(), cfg.n.end());
    SpectralDensity psi = density_from_finite_covariance(rho, finest);
    CsvTable dens{"density.csv", "x,psi", {}};
    CsvTable plot{"plot_spectral.csv", "x,y,yerr", {}};
    for (int j = 0; j < psi.grid_size(); ++j) {
        dens.lines.push_back(format_g17(psi.x(j)) + "," + format_g17(psi.value[j]));
        plot.lines.push_back(format_g17(psi.x(j)) + "," + format_g17(psi.value[j]) + ",0");
    }
    res.tables.push_back(std::move(dens));
    res.tables.push_back(std::move(plot));
    return res;
}

KindResult run_sinc_oracle(const ExperimentConfig& cfg, const Tolerances& tol) {
    double epsilon = 0.0;
    if (!cfg.params.is_null()) {
        check_keys(cfg.params, "params", {"epsilon"});
        if (const json* p = find(cfg.params, "epsilon")) {
            epsilon = as_number(*p, "params.epsilon");
            if (epsilon < 0.0) fail("params.epsilon", "must be >= 0");
        }
    }
    for (std::size_t i = 0; i < cfg.n.size(); ++i)
        if (cfg.n[i] < 8 || cfg.n[i] > 2048)
            fail("n[" + std::to_string(i) + "]", "sinc grid must lie in [8, 2048]");

    KindResult res;
    CsvTable table{"sinc_oracle.csv", "grid,mean,stderr,target", {}};
    CsvTable plot{"plot_sinc_oracle.csv", "x,y,yerr", {}};
    for (int grid : cfg.n) {
        MCOptions opt{cfg.reps, cfg.seed, cfg.threads};
        MCEstimate e = sinc_tail_moment(grid, epsilon, opt);
        const bool mean_mode = epsilon == 0.0;
        double target = mean_mode ? kTwoOverSqrt3 : std::numeric_limits<double>::quiet_NaN();

        ojson row;
        row["grid"] = grid;
        row["mean"] = e.mean;
        row["stderr"] = e.stderr_;
        row["epsilon"] = epsilon;
        if (mean_mode) row["target"] = target;
        row["seed"] = cfg.seed;
        row["streams"] = stream_range(cfg.reps);
        res.rows.push_back(std::move(row));

        if (mean_mode) {
            double gap = std::abs(e.mean - target);
            double budget = tol.sinc_se * e.stderr_;
            add_verdict(res, "sinc mean grid=" + std::to_string(grid), gap <= budget,
                        num_pair("|mean - 2/sqrt(3)| = %.6g against %.6g", gap, budget));
        } else {
            add_verdict(res, "finite moment grid=" + std::to_string(grid),
                        std::isfinite(e.mean), "tail moment must be finite");
        }

        table.lines.push_back(std::to_string(grid) + "," + format_g17(e.mean) + "," +
                              format_g17(e.stderr_) + "," + format_g17(target));
        plot.lines.push_back(std::to_string(grid) + "," + format_g17(e.mean) + "," +
                             format_g17(e.stderr_));
    }
    res.tables.push_back(std::move(table));
    res.tables.push_back(std::move(plot));
    return res;
}

// --- file output -----------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << body;
    out.flush();
    if (!out.good()) throw std::runtime_error("short write to " + path.string());
}

std::string render_csv(const CsvTable& t) {
    std::string body = t.header + "\n";
    for (const std::string& line : t.lines) {
        body += line;
        body += '\n';
    }
    return body;
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CoefficientModel model_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));

    auto family_of = [&](const json& f, const std::string& fpath) {
        const std::string s = as_string(f, fpath);
        if (s == "gaussian") return Family::Gaussian;
        if (s == "rademacher") return Family::Rademacher;
        if (s == "uniform") return Family::Uniform;
        if (s == "two-point") return Family::TwoPoint;
        fail(fpath, "expected gaussian|rademacher|uniform|two-point");
    };

    if (type == "iid") {
        check_keys(j, path, {"type", "family", "p"});
        Family fam = family_of(require(j, path, "family"), join(path, "family"));
        if (fam == Family::TwoPoint) {
            double p = as_number(require(j, path, "p"), join(path, "p"));
            if (!(p > 0.0 && p < 1.0)) fail(join(path, "p"), "must lie strictly inside (0, 1)");
            return CoefficientModel::iid_two_point(TwoPointParams::from_probability(p));
        }
        if (find(j, "p")) fail(join(path, "p"), "only meaningful for the two-point family");
        return CoefficientModel::iid(fam);
    }

    if (type == "ma") {
        check_keys(j, path, {"type", "kernel", "family", "p"});
        std::vector<double> kernel =
            as_number_array(require(j, path, "kernel"), join(path, "kernel"));
        Family fam = family_of(require(j, path, "family"), join(path, "family"));
        if (fam == Family::TwoPoint) {
            double p = as_number(require(j, path, "p"), join(path, "p"));
            if (!(p > 0.0 && p < 1.0)) fail(join(path, "p"), "must lie strictly inside (0, 1)");
            CoefficientModel m;
            m.kind = CoefficientModel::Kind::MovingAverage;
            m.family = Family::TwoPoint;
            m.two_point = TwoPointParams::from_probability(p);
            m.kernel = normalize_ma_kernel(std::move(kernel));
            m.validate();
            return m;
        }
        if (find(j, "p")) fail(join(path, "p"), "only meaningful for the two-point family");
        return CoefficientModel::moving_average(std::move(kernel), fam);
    }

    if (type == "gfun") {
        check_keys(j, path, {"type", "rho_g", "closed_form", "functional", "order", "eta"});
        const json* rg = find(j, "rho_g");
        const json* cf = find(j, "closed_form");
        if (!!rg == !!cf)
            fail(path, "need exactly one of rho_g and closed_form");
        CovarianceSequence rho;
        if (rg) {
            rho.rho = as_number_array(*rg, join(path, "rho_g"));
            if (rho.rho[0] != 1.0) fail(join(path, "rho_g"), "rho_g[0] must equal 1");
        } else {
            const std::string s = as_string(*cf, join(path, "closed_form"));
            if (s == "bargmann-fock")
                rho = closed_form_covariance(ClosedFormKind::BargmannFock);
            else if (s == "exponential")
                rho = closed_form_covariance(ClosedFormKind::Exponential);
            else
                fail(join(path, "closed_form"), "expected bargmann-fock|exponential");
        }

        double eta = 1e6;
        if (const json* p = find(j, "eta")) {
            eta = as_number(*p, join(path, "eta"));
            if (!(eta > 0.0)) fail(join(path, "eta"), "must be > 0");
        }

        FunctionalSpec spec = FunctionalSpec::sign_functional(eta);
        if (const json* p = find(j, "functional")) {
            if (p->is_string()) {
                if (p->get<std::string>() != "sign")
                    fail(join(path, "functional"), "expected \"sign\" or {\"hermite\": [...]}");
            } else if (p->is_object()) {
                check_keys(*p, join(path, "functional"), {"hermite"});
                std::vector<double> cs = as_number_array(
                    require(*p, join(path, "functional"), "hermite"),
                    join(path, "functional.hermite"));
                // JSON lists c_1.. ; internal convention carries c_0 = 0 in front.
                cs.insert(cs.begin(), 0.0);
                spec = FunctionalSpec::hermite(std::move(cs), eta);
            } else {
                fail(join(path, "functional"), "expected \"sign\" or {\"hermite\": [...]}");
            }
        }

        CoefficientModel m = CoefficientModel::gaussian_functional(std::move(rho), std::move(spec));
        if (const json* p = find(j, "order")) {
            int q = as_int(*p, join(path, "order"));
            if (q < 1 || q > 101) fail(join(path, "order"), "expected 1 <= order <= 101");
            m.hermite_order = q;
        }
        return m;
    }

    fail(join(path, "type"), "expected iid|ma|gfun");
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) fail("$", "config must be a JSON object");
    check_keys(doc, "", {"kind", "model", "n", "reps", "seed", "out", "threads",
                         "params", "tolerances"});

    ExperimentConfig cfg;
    cfg.echo = doc;

    cfg.kind = as_string(require(doc, "", "kind"), "kind");
    static const std::set<std::string> kinds = {"expect-zeros", "clt",     "small-ball",
                                                "tv-bound",     "spectral", "sinc-oracle"};
    if (!kinds.count(cfg.kind))
        fail("kind", "expected expect-zeros|clt|small-ball|tv-bound|spectral|sinc-oracle");

    const json& seed = require(doc, "", "seed");
    if (!(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0)))
        fail("seed", "expected a nonnegative integer (runs never seed themselves)");
    cfg.seed = seed.get<std::uint64_t>();

    const json& n = require(doc, "", "n");
    if (!n.is_array() || n.empty()) fail("n", "expected a nonempty array of degrees");
    for (std::size_t i = 0; i < n.size(); ++i) {
        int v = as_int(n[i], "n[" + std::to_string(i) + "]");
        if (v < 1) fail("n[" + std::to_string(i) + "]", "must be >= 1");
        cfg.n.push_back(v);
    }

    const bool monte_carlo = cfg.kind == "expect-zeros" || cfg.kind == "clt" ||
                             cfg.kind == "small-ball" || cfg.kind == "sinc-oracle";
    if (const json* p = find(doc, "reps")) {
        cfg.reps = as_int(*p, "reps");
        if (cfg.reps < 1) fail("reps", "must be >= 1");
    } else if (monte_carlo) {
        fail("reps", "required field is missing");
    }

    if (cfg.kind == "sinc-oracle") {
        if (find(doc, "model")) fail("model", "sinc-oracle takes no model block");
    } else {
        cfg.model = require(doc, "", "model");
        model_from_json(cfg.model); // validate early; engines parse it again
    }

    if (const json* p = find(doc, "out")) cfg.out_dir = as_string(*p, "out");
    if (const json* p = find(doc, "threads")) {
        cfg.threads = as_int(*p, "threads");
        if (cfg.threads < 0) fail("threads", "must be >= 0");
    }
    if (const json* p = find(doc, "params")) {
        if (!p->is_object()) fail("params", "expected an object");
        cfg.params = *p;
    }
    if (const json* p = find(doc, "tolerances")) cfg.tolerances = *p;
    parse_tolerances(cfg.tolerances, "tolerances"); // shape check up front
    return cfg;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Tolerances tol = parse_tolerances(cfg.tolerances, "tolerances");

    CoefficientModel model; // default-initialized; replaced unless sinc-oracle
    std::string fingerprint = "sinc-limit";
    if (cfg.kind != "sinc-oracle") {
        model = model_from_json(cfg.model);
        fingerprint = model.fingerprint();
    }

    KindResult res;
    if (cfg.kind == "expect-zeros")
        res = run_expect_zeros(cfg, model, tol);
    else if (cfg.kind == "clt")
        res = run_clt(cfg, model, tol);
    else if (cfg.kind == "small-ball")
        res = run_small_ball(cfg, model, tol);
    else if (cfg.kind == "tv-bound")
        res = run_tv_bound(cfg, model, tol);
    else if (cfg.kind == "spectral")
        res = run_spectral(cfg, model, tol);
    else if (cfg.kind == "sinc-oracle")
        res = run_sinc_oracle(cfg, tol);
    else
        fail("kind", "unreachable: " + cfg.kind);

    ExperimentReport report;
    report.reliability_warning = res.warning;
    for (const auto& v : res.verdicts)
        report.all_pass = report.all_pass && v.at("pass").get<bool>();

    report.files_written.push_back("report.json");
    for (const auto& t : res.tables) report.files_written.push_back(t.filename);

    ojson doc;
    doc["version"] = RTP_VERSION;
    doc["kind"] = cfg.kind;
    doc["model_fingerprint"] = fingerprint;
    doc["seed"] = cfg.seed;
    doc["reps"] = cfg.reps;
    doc["n"] = cfg.n;
    doc["tolerances"] = tolerances_echo(tol);
    doc["rows"] = res.rows;
    doc["verdicts"] = res.verdicts;
    doc["all_pass"] = report.all_pass;
    doc["reliability_warning"] = res.warning;
    doc["files"] = report.files_written;
    doc["config"] = ojson(cfg.echo);
    doc["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.document = std::move(doc);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& t : res.tables) write_text(dir / t.filename, render_csv(t));
    write_text(dir / "report.json", report.document.dump(2) + "\n");
    return report;
}

} // namespace rtp

#include "rencontre/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rencontre/bounds.hpp"
#include "rencontre/exact.hpp"
#include "rencontre/io.hpp"
#include "rencontre/model.hpp"
#include "rencontre/montecarlo.hpp"
#include "rencontre/series.hpp"

namespace rencontre::cli {

namespace {

constexpr const char* kSchemaVersion = "1";

struct ParamArgs {
    int d = 0;
    std::string p_list;
    std::string config_path;

    std::vector<std::string> literals() const {
        if (!p_list.empty() && !config_path.empty())
            throw ValidationError("conflicting flags: --p and --config are mutually exclusive");
        std::vector<std::string> out;
        if (!p_list.empty()) {
            std::stringstream ss(p_list);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(item);
            if (out.empty())
                throw ValidationError("malformed probability list for --p");
        } else if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw ValidationError("cannot read config file '" + config_path + "'");
            nlohmann::json doc;
            try {
                in >> doc;
            } catch (const std::exception& e) {
                throw ValidationError(std::string("malformed config JSON: ") + e.what());
            }
            if (!doc.contains("p") || !doc["p"].is_array())
                throw ValidationError("config document needs a \"p\" array");
            for (const auto& v : doc["p"]) {
                if (!v.is_number())
                    throw ValidationError("config \"p\" entries must be numbers");
                std::ostringstream os;
                os.precision(17);
                os << v.get<double>();
                out.push_back(os.str());
            }
        } else {
            throw ValidationError("missing probabilities: pass --p or --config");
        }
        return out;
    }

    int resolved_d(std::size_t count) const {
        if (d > 0 && static_cast<std::size_t>(d) != count)
            throw DimensionMismatchError("--d says " + std::to_string(d) + " but " +
                                         std::to_string(count) + " probabilities were given");
        return d > 0 ? d : static_cast<int>(count);
    }

    WalkParams to_params() const {
        const auto lits = literals();
        std::vector<double> p;
        p.reserve(lits.size());
        for (const auto& s : lits) {
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size())
                    throw std::invalid_argument(s);
                p.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError("malformed probability '" + s + "' in --p");
            }
        }
        const int d_resolved = resolved_d(p.size());
        return WalkParams(d_resolved, std::move(p));
    }

    RationalWalkParams to_rational_params() const {
        const auto lits = literals();
        return RationalWalkParams::parse(resolved_d(lits.size()), lits);
    }
};

std::string rational_str(const mpq_class& q) {
    return q.get_str();
}

std::string tail_method_name(TailMethod m) {
    switch (m) {
    case TailMethod::ClosedFormD2: return "closed-form-d2";
    case TailMethod::SeriesAtOne: return "series-at-1";
    case TailMethod::SeriesDivergence: return "divergence-theorem3";
    }
    return "unknown";
}

JsonDoc constants_json(const EnvelopeConstants& c) {
    JsonDoc doc = JsonDoc::object();
    doc.set("lambda", c.lambda)
        .set("alpha", c.alpha)
        .set("N", c.N)
        .set("L", c.L)
        .set("M", c.M)
        .set("C1", c.C1)
        .set("C2", c.C2)
        .set("K", c.K);
    return doc;
}

std::string params_label(const Table1Row& row) {
    std::string label = "d=" + std::to_string(row.p.size()) + " p=";
    for (std::size_t i = 0; i < row.p.size(); ++i) {
        if (i)
            label += ",";
        label += format_double_table(row.p[i]);
    }
    if (row.d_ambiguous)
        label += " (printed d=" + std::to_string(row.printed_d) + "; run as d=" +
                 std::to_string(row.p.size()) + ")";
    return label;
}

// ---------------------------------------------------------------------------
// subcommand runners
// ---------------------------------------------------------------------------

int run_dist(const ParamArgs& pa, long n_max, bool exact, const std::string& format,
             const std::string& out_path) {
    std::string payload;
    if (exact) {
        const auto rp = pa.to_rational_params();
        const auto rs = rencontre_sequence(rp, n_max);
        const auto fp = first_passage_seq(rp, n_max);
        if (format == "csv") {
            CsvWriter csv({"n", "r_n", "f_n", "cumulative", "defect"});
            for (long n = 1; n <= n_max; ++n) {
                const auto i = static_cast<std::size_t>(n);
                csv.row({std::to_string(n), rational_str(rs.r_exact[i]),
                         rational_str(fp.f_exact[i]), rational_str(fp.cumulative_exact[i]),
                         rational_str(1 - fp.cumulative_exact[i])});
            }
            payload = csv.str();
        } else {
            JsonDoc rows = JsonDoc::array();
            for (long n = 1; n <= n_max; ++n) {
                const auto i = static_cast<std::size_t>(n);
                JsonDoc row = JsonDoc::object();
                row.set("n", n)
                    .set("r", rational_str(rs.r_exact[i]))
                    .set("f", rational_str(fp.f_exact[i]))
                    .set("cumulative", rational_str(fp.cumulative_exact[i]))
                    .set("defect", rational_str(1 - fp.cumulative_exact[i]));
                rows.push(std::move(row));
            }
            JsonDoc doc = JsonDoc::object();
            doc.set("schema_version", kSchemaVersion)
                .set("mode", "exact-rational")
                .set("rows", std::move(rows));
            payload = doc.dump();
        }
    } else {
        const auto params = pa.to_params();
        const auto rs = rencontre_sequence(params, n_max);
        const auto fp = first_passage_seq(params, n_max);
        if (format == "csv") {
            CsvWriter csv({"n", "r_n", "f_n", "cumulative", "defect"});
            for (long n = 1; n <= n_max; ++n) {
                const auto i = static_cast<std::size_t>(n);
                csv.row({std::to_string(n), format_double_json(rs.r[i]),
                         format_double_json(fp.f[i]), format_double_json(fp.cumulative[i]),
                         format_double_json(1.0 - fp.cumulative[i])});
            }
            payload = csv.str();
        } else {
            JsonDoc rows = JsonDoc::array();
            for (long n = 1; n <= n_max; ++n) {
                const auto i = static_cast<std::size_t>(n);
                JsonDoc row = JsonDoc::object();
                row.set("n", n)
                    .set("r", rs.r[i])
                    .set("f", fp.f[i])
                    .set("cumulative", fp.cumulative[i])
                    .set("defect", 1.0 - fp.cumulative[i]);
                rows.push(std::move(row));
            }
            JsonDoc doc = JsonDoc::object();
            doc.set("schema_version", kSchemaVersion)
                .set("mode", "float-log")
                .set("rows", std::move(rows));
            payload = doc.dump();
        }
    }
    write_output(out_path, payload);
    return 0;
}

int run_gf(const ParamArgs& pa, double x, int order, double eps, const std::string& format,
           const std::string& out_path) {
    const auto params = pa.to_params();
    const SeriesValue v = varphi_series(params, x, order, eps);
    if (v.outcome == SeriesOutcome::Divergent && format == "csv") {
        std::cerr << "gf: series diverges at x = " << x
                  << "; a plain numeric format cannot represent this outcome\n";
        return 3;
    }
    std::string payload;
    if (format == "csv") {
        CsvWriter csv({"value", "truncation_error", "terms_used"});
        csv.row({format_double_json(v.value), format_double_json(v.truncation_error),
                 std::to_string(v.terms_used)});
        payload = csv.str();
    } else {
        JsonDoc doc = JsonDoc::object();
        doc.set("schema_version", kSchemaVersion)
            .set("outcome", v.outcome == SeriesOutcome::Divergent ? "divergent" : "converged");
        if (v.outcome == SeriesOutcome::Converged) {
            doc.set("value", v.value)
                .set("truncation_error", v.truncation_error)
                .set("terms_used", v.terms_used);
        }
        payload = doc.dump();
    }
    write_output(out_path, payload);
    return 0;
}

int run_tail_prob(const ParamArgs& pa, double eps, const std::string& out_path) {
    const auto params = pa.to_params();
    const TailProbResult res = no_rencontre_prob(params, eps);
    JsonDoc doc = JsonDoc::object();
    doc.set("schema_version", kSchemaVersion)
        .set("p_infinity", res.p_infinity)
        .set("method", tail_method_name(res.method))
        .set("error_bound", res.error_bound);
    write_output(out_path, doc.dump());
    return 0;
}

int run_cond_exp(const ParamArgs& pa, double lambda1, double lambda2,
                 const std::string& out_path) {
    const auto params = pa.to_params();
    const BoundsReport report = cond_exp_bounds(params, make_lambda_config(lambda1, lambda2));
    JsonDoc doc = JsonDoc::object();
    doc.set("schema_version", kSchemaVersion)
        .set("classification",
             report.classification == MeanClass::Infinite ? "infinite" : "finite");
    if (report.classification == MeanClass::Finite) {
        JsonDoc errs = JsonDoc::object();
        errs.set("lower", report.lower_truncation_error)
            .set("upper", report.upper_truncation_error);
        doc.set("lower_E", report.lower_E)
            .set("upper_E", report.upper_E)
            .set("truncation_errors", std::move(errs));
    }
    JsonDoc consts = JsonDoc::object();
    consts.set("upper", constants_json(report.upper_constants))
        .set("lower", constants_json(report.lower_constants));
    doc.set("constants_used", std::move(consts));
    write_output(out_path, doc.dump());
    return 0;
}

int run_table1_cmd(const std::string& format, const std::string& out_path) {
    const auto results = rencontre::run_table1();
    std::string payload;
    if (format == "json") {
        JsonDoc rows = JsonDoc::array();
        for (const auto& res : results) {
            JsonDoc row = JsonDoc::object();
            row.set("row", res.fixture->row)
                .set("params", params_label(*res.fixture))
                .set("lambda1", res.fixture->lambda1)
                .set("lambda2", res.fixture->lambda2)
                .set("lower", res.report.lower_E)
                .set("upper", res.report.upper_E)
                .set("paper_lower", res.fixture->paper_lower)
                .set("paper_upper", res.fixture->paper_upper)
                .set("abs_diff", std::max(res.abs_diff_lower, res.abs_diff_upper));
            rows.push(std::move(row));
        }
        JsonDoc doc = JsonDoc::object();
        doc.set("schema_version", kSchemaVersion).set("rows", std::move(rows));
        payload = doc.dump();
    } else {
        CsvWriter csv({"row", "params", "lambda1", "lambda2", "lower", "upper", "paper_lower",
                       "paper_upper", "abs_diff"});
        for (const auto& res : results) {
            csv.row({std::to_string(res.fixture->row), params_label(*res.fixture),
                     format_double_table(res.fixture->lambda1),
                     format_double_table(res.fixture->lambda2),
                     format_double_table(res.report.lower_E),
                     format_double_table(res.report.upper_E),
                     format_double_table(res.fixture->paper_lower),
                     format_double_table(res.fixture->paper_upper),
                     format_double_table(std::max(res.abs_diff_lower, res.abs_diff_upper))});
        }
        payload = csv.str();
    }
    write_output(out_path, payload);
    return 0;
}

int run_simulate(const ParamArgs& pa, std::uint64_t seed, long horizon, long reps, int workers,
                 const std::string& format, const std::string& out_path) {
    const auto params = pa.to_params();
    SimConfig config;
    config.seed = seed;
    config.horizon = horizon;
    config.replications = reps;
    config.workers = workers;
    const SimSummary summary = run_batch(params, config);

    std::string payload;
    if (format == "csv") {
        CsvWriter csv({"n", "count"});
        for (long n = 1; n <= summary.horizon; ++n) {
            const auto c = summary.histogram[static_cast<std::size_t>(n)];
            if (c)
                csv.row({std::to_string(n), std::to_string(c)});
        }
        payload = csv.str();
    } else {
        JsonDoc hist = JsonDoc::array();
        std::uint64_t hits = 0;
        for (long n = 1; n <= summary.horizon; ++n) {
            const auto c = summary.histogram[static_cast<std::size_t>(n)];
            if (!c)
                continue;
            hits += c;
            JsonDoc cell = JsonDoc::array();
            cell.push(n).push(static_cast<std::int64_t>(c));
            hist.push(std::move(cell));
        }
        JsonDoc doc = JsonDoc::object();
        doc.set("schema_version", kSchemaVersion)
            .set("replications", static_cast<std::int64_t>(summary.replications))
            .set("horizon", summary.horizon)
            .set("hits", static_cast<std::int64_t>(hits))
            .set("censored", static_cast<std::int64_t>(summary.censored))
            .set("conditional_mean", summary.conditional_mean)
            .set("conditional_mean_se", summary.conditional_mean_se)
            .set("histogram", std::move(hist));
        payload = doc.dump();
    }
    write_output(out_path, payload);
    return 0;
}

} // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"first rencontre-time of d independent Bernoulli walks"};
    app.require_subcommand(1);

    ParamArgs pa;
    std::string format;
    std::string out_path;
    long n_max = 1;
    bool exact = false;
    double x = 0.0;
    int order = 0;
    double eps = 1e-10;
    double lambda1 = 0.0, lambda2 = 0.0;
    std::uint64_t seed = 0;
    long horizon = 1, reps = 1;
    int workers = 0;

    const auto add_params = [&](CLI::App* cmd) {
        cmd->add_option("--d", pa.d, "number of walks (inferred from --p when omitted)");
        cmd->add_option("--p", pa.p_list, "comma-separated success probabilities");
        cmd->add_option("--config", pa.config_path, "JSON config file with a \"p\" array");
        cmd->add_option("--out", out_path, "output path (default: stdout)");
    };

    auto* dist = app.add_subcommand("dist", "exact and first-meeting distributions");
    add_params(dist);
    dist->add_option("--n-max", n_max, "horizon")->required();
    dist->add_flag("--exact", exact, "exact-rational mode (decimal or a/b literals)");
    dist->add_option("--format", format, "csv|json")->default_str("csv");

    auto* gf = app.add_subcommand("gf", "occurrence generating function value");
    add_params(gf);
    gf->add_option("--x", x, "evaluation point in [0,1]")->required();
    gf->add_option("--order", order, "0, 1 or 2")->required();
    gf->add_option("--eps", eps, "target truncation error");
    gf->add_option("--format", format, "csv|json")->default_str("json");

    auto* tail = app.add_subcommand("tail-prob", "probability of no meeting ever");
    add_params(tail);
    tail->add_option("--eps", eps, "target truncation error");

    auto* ceb = app.add_subcommand("cond-exp-bounds", "bracket for E(J | J < infinity)");
    add_params(ceb);
    ceb->add_option("--lambda1", lambda1, "upper-bound tightness in (0,1)")->required();
    ceb->add_option("--lambda2", lambda2, "lower-bound tightness in (0,1)")->required();

    auto* t1 = app.add_subcommand("table1", "built-in reference rows comparison");
    t1->add_option("--format", format, "csv|json")->default_str("csv");
    t1->add_option("--out", out_path, "output path (default: stdout)");

    auto* sim = app.add_subcommand("simulate", "seeded Monte-Carlo cross-validation");
    add_params(sim);
    sim->add_option("--seed", seed, "64-bit master seed")->required();
    sim->add_option("--horizon", horizon, "step cap per replication")->required();
    sim->add_option("--reps", reps, "replication count")->required();
    sim->add_option("--workers", workers, "worker threads (0 = auto)");
    sim->add_option("--format", format, "csv|json")->default_str("json");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    }

    if (format.empty())
        format = dist->parsed() ? "csv" : t1->parsed() ? "csv" : "json";
    if (format != "csv" && format != "json") {
        std::cerr << "argument error: --format must be csv or json\n";
        return 2;
    }

    try {
        if (dist->parsed())
            return run_dist(pa, n_max, exact, format, out_path);
        if (gf->parsed())
            return run_gf(pa, x, order, eps, format, out_path);
        if (tail->parsed())
            return run_tail_prob(pa, eps, out_path);
        if (ceb->parsed())
            return run_cond_exp(pa, lambda1, lambda2, out_path);
        if (t1->parsed())
            return run_table1_cmd(format, out_path);
        if (sim->parsed())
            return run_simulate(pa, seed, horizon, reps, workers, format, out_path);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

} // namespace rencontre::cli

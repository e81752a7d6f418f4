#include "gibbslab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "gibbslab/experiments.hpp"
#include "gibbslab/verify.hpp"

namespace gibbslab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config schema ---------------------------------------------------------

const std::set<std::string>& known_top_keys() {
    static const std::set<std::string> keys = {
        "experiment", "model",  "model_q",      "d",        "n",      "n_range", "M",       "seed",
        "t_max",      "q_grid", "u_grid",       "lambda_gamma", "lambda_one", "K",   "pattern", "tolerances",
        "output",     "workers", "burn_in",     "torus",    "count",  "separation", "cubes", "t_side"};
    return keys;
}

std::string default_output_dir() {
    if (const char* env = std::getenv("GIBBSLAB_OUT")) return env;
    return "out";
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
    }
}

Model model_from_json(const json& spec, int default_d) {
    reject_unknown(spec, {"preset", "p", "beta", "J", "h", "q", "matrix", "alphabet", "terms", "d"}, "model");
    const std::string preset = spec.at("preset").get<std::string>();
    const int d = spec.value("d", default_d);
    if (preset == "iid") return Model::iid(d, spec.at("p").get<std::vector<double>>());
    if (preset == "ising")
        return Model::ising(d, spec.at("beta").get<double>(), spec.value("J", 1.0), spec.value("h", 0.0));
    if (preset == "potts")
        return Model::potts(d, spec.at("beta").get<double>(), spec.value("J", 1.0), spec.at("q").get<int>());
    if (preset == "markov_product")
        return Model::markov_product(spec.at("matrix").get<std::vector<std::vector<double>>>());
    if (preset == "custom") {
        std::vector<InteractionTerm> terms;
        for (const auto& t : spec.at("terms")) {
            reject_unknown(t, {"shape", "table"}, "custom term");
            InteractionTerm term;
            for (const auto& site : t.at("shape")) term.shape.push_back(LatticeVector::of(site.get<std::vector<int>>()));
            term.table = t.at("table").get<std::vector<double>>();
            terms.push_back(std::move(term));
        }
        return Model::custom(d, spec.at("alphabet").get<int>(), std::move(terms));
    }
    throw ValidationError("config: unknown model preset '" + preset + "'");
}

Pattern pattern_from_json(const json& spec, int d, int n, int alphabet) {
    if (spec.contains("values")) {
        reject_unknown(spec, {"values", "d", "n", "alphabet"}, "pattern");
        Pattern p(spec.value("d", d), spec.value("n", n), spec.value("alphabet", alphabet));
        const auto vals = spec.at("values").get<std::vector<int>>();
        if (static_cast<long long>(vals.size()) != p.site_count())
            throw ValidationError("config: pattern values have the wrong length");
        for (std::size_t i = 0; i < vals.size(); ++i) p.values()[i] = static_cast<Symbol>(vals[i]);
        return p;
    }
    reject_unknown(spec, {"random_seed"}, "pattern");
    Rng rng(spec.value("random_seed", 17), 0);
    return Pattern::random(d, n, alphabet, rng);
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json survival_curve_json(const SurvivalCurve& c) {
    json j;
    j["t"] = c.t;
    j["survival"] = c.survival;
    j["ci"] = c.ci;
    j["lambda"] = c.lambda;
    j["pattern_prob"] = c.pattern_prob;
    j["censor_fraction"] = c.censor_fraction;
    return j;
}

json estimator_rows_json(const std::vector<EstimatorRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"n", r.n},
                       {"estimate", r.estimate},
                       {"estimate_raw", r.estimate_raw},
                       {"ci", r.ci},
                       {"censor_fraction", r.censor_fraction},
                       {"cap", r.cap},
                       {"target", r.target},
                       {"target_provenance", r.target_provenance}});
    }
    return arr;
}

std::string estimator_rows_csv(const std::vector<EstimatorRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "n,estimate,estimate_raw,ci,censor_fraction,cap,target\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.estimate << ',' << r.estimate_raw << ',' << r.ci << ',' << r.censor_fraction << ','
           << r.cap << ',' << r.target << '\n';
    return os.str();
}

}  // namespace

std::uint64_t config_hash(const json& cfg) {
    // runtime-only knobs do not change what is computed
    json semantic = cfg;
    semantic.erase("workers");
    semantic.erase("output");
    return fnv1a_str(semantic.dump());  // keys are sorted by the json object model
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ValidationError("cannot write " + tmp.string());
        os << content;
    }
    fs::rename(tmp, target);
}

nlohmann::json validate_config(json cfg) {
    if (!cfg.is_object()) throw ValidationError("config: top level must be an object");
    reject_unknown(cfg, known_top_keys(), "top level");
    if (!cfg.contains("experiment")) throw ValidationError("config: missing 'experiment'");
    if (!cfg.contains("model")) throw ValidationError("config: missing 'model'");
    const std::set<std::string> experiments = {"exponential_law", "repetition_law", "entropy_via_repetition",
                                               "waiting_time",    "clt",            "ldp_cumulant",
                                               "rate_function",   "factorization"};
    const std::string exp = cfg.at("experiment").get<std::string>();
    if (!experiments.count(exp)) throw ValidationError("config: unknown experiment '" + exp + "'");
    if (cfg.contains("M") && cfg.at("M").get<long long>() <= 0)
        throw ValidationError("config: M must be positive");
    if (cfg.contains("seed") && !cfg.at("seed").is_number_integer())
        throw ValidationError("config: seed must be an integer");
    if (cfg.contains("workers") && cfg.at("workers").get<long long>() <= 0)
        throw ValidationError("config: workers must be positive");
    // defaults
    if (!cfg.contains("d")) cfg["d"] = 2;
    if (!cfg.contains("seed")) cfg["seed"] = 1;
    if (!cfg.contains("M")) cfg["M"] = 1000;
    if (!cfg.contains("workers")) cfg["workers"] = static_cast<long long>(default_workers());
    // realize models once to validate their parameters
    model_from_json(cfg.at("model"), cfg.at("d").get<int>());
    if (cfg.contains("model_q")) model_from_json(cfg.at("model_q"), cfg.at("d").get<int>());
    return cfg;
}

nlohmann::json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config file " + path);
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error in " + path + ": " + e.what());
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) throw ValidationError("override must look like key.path=value: " + ov);
        const std::string keypath = ov.substr(0, eq);
        const std::string value = ov.substr(eq + 1);
        json* node = &cfg;
        std::size_t pos = 0;
        for (;;) {
            const auto dot = keypath.find('.', pos);
            const std::string key = keypath.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
            if (dot == std::string::npos) {
                try {
                    (*node)[key] = json::parse(value);
                } catch (const json::parse_error&) {
                    (*node)[key] = value;  // bare strings stay strings
                }
                break;
            }
            node = &(*node)[key];
            pos = dot + 1;
        }
    }
    return validate_config(std::move(cfg));
}

nlohmann::json run_experiment_config(const json& cfg) {
    const std::string exp = cfg.at("experiment").get<std::string>();
    const int d = cfg.at("d").get<int>();
    const Model model = model_from_json(cfg.at("model"), d);
    const unsigned workers = static_cast<unsigned>(cfg.at("workers").get<long long>());
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const int replicas = static_cast<int>(cfg.at("M").get<long long>());

    json out;
    out["experiment"] = exp;
    out["version"] = kVersion;
    out["config"] = cfg;
    out["config_hash"] = config_hash(cfg);
    out["model"] = model.descriptor();
    out["model_hash"] = model.content_hash();
    json csv = json::object();
    bool tolerances_ok = true;
    const json tol = cfg.value("tolerances", json::object());

    if (exp == "exponential_law") {
        const int n = cfg.value("n", 1);
        const Pattern a = pattern_from_json(cfg.value("pattern", json::object()), d, n, model.alphabet());
        ExpLawParams p;
        p.n = n;
        p.replicas = replicas;
        p.t_max = cfg.value("t_max", 4.0);
        p.seed = seed;
        p.lambda_gamma = cfg.value("lambda_gamma", 0.5);
        p.lambda_one = cfg.value("lambda_one", false);
        p.workers = workers;
        const auto r = exponential_law_experiment(model, a, p);
        out["sup_gap"] = r.sup_gap;
        out["lambda"] = {{"value", r.lambda.lambda}, {"t", r.lambda.t}, {"survival", r.lambda.survival}};
        out["cap"] = r.cap;
        out["pattern_hash"] = r.pattern_hash;
        out["curve"] = survival_curve_json(r.curve);
        out["target_provenance"] = r.target_provenance;
        csv["survival.csv"] = survival_curve_csv(r.curve);
        std::ostringstream rec;
        rec << "replica,pattern_hash,value,censored,K\n";
        for (const auto& hr : r.records)
            rec << hr.replica << ',' << hr.pattern_hash << ',' << hr.value << ',' << (hr.censored ? 1 : 0) << ','
                << hr.cap << '\n';
        csv["records.csv"] = rec.str();
        if (tol.contains("sup_gap") && r.sup_gap > tol.at("sup_gap").get<double>()) tolerances_ok = false;
    } else if (exp == "repetition_law") {
        RepetitionLawParams p;
        p.n = cfg.value("n", 2);
        p.replicas = replicas;
        p.t_max = cfg.value("t_max", 4.0);
        p.seed = seed;
        p.lambda_one = cfg.value("lambda_one", false);
        p.workers = workers;
        const auto r = repetition_law_experiment(model, p);
        out["sup_gap"] = r.sup_gap;
        out["bad_fraction"] = r.bad_fraction;
        out["bad_mass_exact"] = r.bad_mass_exact;
        out["good_replicas"] = r.good_replicas;
        out["cap"] = r.cap;
        out["curve"] = survival_curve_json(r.curve);
        csv["survival.csv"] = survival_curve_csv(r.curve);
        if (tol.contains("sup_gap") && r.sup_gap > tol.at("sup_gap").get<double>()) tolerances_ok = false;
    } else if (exp == "entropy_via_repetition") {
        EntropyViaRepetitionParams p;
        p.n_range = cfg.value("n_range", std::vector<int>{1, 2, 3});
        p.replicas = replicas;
        p.seed = seed;
        p.workers = workers;
        const auto r = entropy_via_repetition(model, p);
        out["rows"] = estimator_rows_json(r.rows);
        out["target"] = r.target;
        out["target_provenance"] = r.target_provenance;
        csv["estimates.csv"] = estimator_rows_csv(r.rows);
        if (tol.contains("target_rel_error")) {
            const auto& last = r.rows.back();
            if (std::abs(last.estimate - r.target) / std::abs(r.target) > tol.at("target_rel_error").get<double>())
                tolerances_ok = false;
        }
    } else if (exp == "waiting_time") {
        const Model q = model_from_json(cfg.at("model_q"), d);
        WaitingTimeParams p;
        p.n_range = cfg.value("n_range", std::vector<int>{1, 2, 3});
        p.replicas = replicas;
        p.seed = seed;
        p.workers = workers;
        const auto r = waiting_time_experiment(q, model, p);
        out["model_q"] = q.descriptor();
        out["rows"] = estimator_rows_json(r.rows);
        out["target"] = r.target;
        out["target_provenance"] = r.target_provenance;
        csv["estimates.csv"] = estimator_rows_csv(r.rows);
        if (tol.contains("target_rel_error")) {
            const auto& last = r.rows.back();
            if (std::abs(last.estimate - r.target) / std::abs(r.target) > tol.at("target_rel_error").get<double>())
                tolerances_ok = false;
        }
    } else if (exp == "clt") {
        CltParams p;
        p.n = cfg.value("n", 12);
        p.replicas = replicas;
        p.seed = seed;
        p.workers = workers;
        const auto r = clt_experiment(model, p);
        out["sample_variance"] = r.sample_variance;
        out["sample_variance_raw"] = r.sample_variance_raw;
        out["theta2_target"] = r.theta2_target;
        out["theta2_residual"] = r.theta2_residual;
        out["ks_statistic"] = r.ks_statistic;
        out["ks_pvalue"] = r.ks_pvalue;
        out["target_provenance"] = r.target_provenance;
        if (tol.contains("variance_rel_error") && r.theta2_target > 0.0) {
            if (std::abs(r.sample_variance - r.theta2_target) / r.theta2_target >
                tol.at("variance_rel_error").get<double>())
                tolerances_ok = false;
        }
    } else if (exp == "ldp_cumulant") {
        const Model q = cfg.contains("model_q") ? model_from_json(cfg.at("model_q"), d) : model;
        LdpParams p;
        p.q_grid = cfg.value("q_grid", std::vector<double>{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5});
        p.n_range = cfg.value("n_range", std::vector<int>{4, 5, 6});
        p.replicas = replicas;
        p.seed = seed;
        p.workers = workers;
        const auto r = ldp_cumulant(q, model, p);
        json curves = json::array();
        std::ostringstream cumcsv;
        cumcsv.precision(17);
        cumcsv << "n,q,empirical,empirical_raw,predicted,gap,pattern_sum_check\n";
        for (const auto& c : r.curves) {
            json pts = json::array();
            for (const auto& pt : c.points) {
                pts.push_back({{"q", pt.q},
                               {"empirical", pt.empirical},
                               {"empirical_raw", pt.empirical_raw},
                               {"predicted", pt.predicted},
                               {"gap", pt.gap},
                               {"pattern_sum_check", pt.pattern_sum_check}});
                cumcsv << c.n << ',' << pt.q << ',' << pt.empirical << ',' << pt.empirical_raw << ',' << pt.predicted
                       << ',' << pt.gap << ',' << pt.pattern_sum_check << '\n';
            }
            curves.push_back({{"n", c.n}, {"cap", c.cap}, {"censor_fraction", c.censor_fraction}, {"points", pts}});
        }
        out["curves"] = curves;
        out["pressure_u"] = r.pressure_u;
        out["pressure_2u"] = r.pressure_2u;
        out["continuity_gap_at_minus1"] = r.continuity_gap_at_minus1;
        out["target_provenance"] = r.target_provenance;
        csv["cumulants.csv"] = cumcsv.str();
        if (tol.contains("rel_gap")) {
            const double lim = tol.at("rel_gap").get<double>();
            for (const auto& c : r.curves)
                for (const auto& pt : c.points)
                    if (pt.q != 0.0 && pt.gap / std::max(std::abs(pt.predicted), 1e-12) > lim) tolerances_ok = false;
        }
    } else if (exp == "rate_function") {
        RateFunctionParams p;
        if (cfg.contains("u_grid")) p.u_grid = cfg.at("u_grid").get<std::vector<double>>();
        const auto r = rate_function(model, p);
        json pts = json::array();
        std::ostringstream rcsv;
        rcsv.precision(17);
        rcsv << "u,I,maximizer_q\n";
        for (const auto& pt : r.points) {
            pts.push_back({{"u", pt.u}, {"I", pt.value}, {"maximizer_q", pt.maximizer_q}});
            rcsv << pt.u << ',' << pt.value << ',' << pt.maximizer_q << '\n';
        }
        out["points"] = pts;
        out["entropy"] = r.entropy;
        out["value_at_entropy"] = r.value_at_entropy;
        out["convex_on_grid"] = r.convex_on_grid;
        out["target_provenance"] = r.target_provenance;
        csv["rate.csv"] = rcsv.str();
        if (tol.contains("value_at_entropy") &&
            std::abs(r.value_at_entropy) > tol.at("value_at_entropy").get<double>())
            tolerances_ok = false;
    } else if (exp == "factorization") {
        const int n = cfg.value("n", 1);
        const Pattern a = pattern_from_json(cfg.value("pattern", json::object()), d, n, model.alphabet());
        const auto r = factorization_diagnostic(model, a, cfg.value("t_side", 4), cfg.value("separation", 3),
                                                cfg.value("cubes", 2), replicas, seed, cfg.value("burn_in", -1));
        out["lhs"] = r.lhs;
        out["rhs"] = r.rhs;
        out["gap"] = r.gap;
        out["ci"] = r.ci;
        out["cubes"] = r.cubes;
        out["separation"] = r.separation;
    } else {
        throw ValidationError("config: unknown experiment '" + exp + "'");
    }

    out["tolerances_ok"] = tolerances_ok;
    out["csv"] = csv;
    out["generated_at"] = timestamp_utc();
    return out;
}

namespace {

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_dir,
            int workers_flag) {
    json cfg = load_config(config_path, overrides);
    if (workers_flag > 0) cfg["workers"] = workers_flag;
    if (!out_dir.empty()) cfg["output"] = out_dir;
    json result = run_experiment_config(cfg);
    const std::string dir = cfg.value("output", default_output_dir());
    const json csv = result.at("csv");
    result.erase("csv");
    write_file_atomic(dir + "/result.json", result.dump(2) + "\n");
    for (auto it = csv.begin(); it != csv.end(); ++it) {
        write_file_atomic(dir + "/" + it.key(), it.value().get<std::string>());
    }
    std::cout << "wrote " << dir << "/result.json";
    for (auto it = csv.begin(); it != csv.end(); ++it) std::cout << ", " << dir << "/" << it.key();
    std::cout << "\n";
    return result.at("tolerances_ok").get<bool>() ? 0 : 2;
}

int cmd_verify(const std::string& suite, int workers_flag) {
    const unsigned workers = workers_flag > 0 ? static_cast<unsigned>(workers_flag) : default_workers();
    const auto results = run_criteria(suite, workers);
    std::cout << format_criteria_table(results);
    for (const auto& r : results)
        if (!r.pass) return 2;
    return 0;
}

int cmd_sample(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_dir,
               int count) {
    json cfg = load_config(config_path, overrides);
    const int d = cfg.at("d").get<int>();
    const Model model = model_from_json(cfg.at("model"), d);
    const std::string dir = !out_dir.empty() ? out_dir : cfg.value("output", default_output_dir());
    for (int r = 0; r < count; ++r) {
        SamplerSpec spec;
        spec.domain_extent = cfg.value("n", 8) + 1;
        spec.torus = cfg.value("torus", model.kind() != ModelKind::Iid && model.kind() != ModelKind::MarkovProduct);
        spec.seed = cfg.at("seed").get<std::uint64_t>();
        spec.replica = static_cast<std::uint64_t>(r);
        spec.burn_in_sweeps = cfg.value("burn_in", -1);
        SamplerMetadata meta;
        const Configuration c = sample(model, spec, &meta);
        json j;
        j["domain"] = spec.torus ? "torus" : "box";
        j["extent"] = c.extent();
        j["d"] = c.dim();
        j["alphabet"] = c.alphabet();
        std::vector<int> vals(c.values().begin(), c.values().end());
        j["values"] = vals;
        j["sampler"] = {{"method", meta.method},
                        {"seed", meta.seed},
                        {"replica", meta.replica},
                        {"burn_in_sweeps", meta.burn_in_sweeps},
                        {"energy_autocorr_lag1", meta.energy_autocorr_lag1}};
        j["version"] = kVersion;
        j["config_hash"] = config_hash(cfg);
        write_file_atomic(dir + "/sample_" + std::to_string(r) + ".json", j.dump(2) + "\n");
        if (!spec.torus) {
            const Pattern p = restrict_pattern(c, c.extent() - 1);
            write_file_atomic(dir + "/sample_" + std::to_string(r) + ".txt", p.to_text());
        }
    }
    std::cout << "wrote " << count << " sample(s) under " << dir << "\n";
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_dir) {
    json cfg = load_config(config_path, overrides);
    const int d = cfg.at("d").get<int>();
    const Model model = model_from_json(cfg.at("model"), d);
    const int n = cfg.value("n", 1);
    const int cap = cfg.value("K", 2);
    const Pattern a = pattern_from_json(cfg.value("pattern", json::object()), d, n, model.alphabet());
    const auto table = brute_force_hitting_law(model, a, cap);
    const std::string dir = !out_dir.empty() ? out_dir : cfg.value("output", default_output_dir());
    write_file_atomic(dir + "/hitting_law.csv", hitting_law_csv(table));
    write_file_atomic(dir + "/hitting_law.json", hitting_law_json(table, model) + "\n");
    std::cout << "wrote " << dir << "/hitting_law.csv and .json\n";
    return 0;
}

int cmd_dobrushin(const std::string& config_path, const std::vector<std::string>& overrides) {
    json cfg = load_config(config_path, overrides);
    const Model model = model_from_json(cfg.at("model"), cfg.at("d").get<int>());
    const auto dob = check_dobrushin(model.interaction());
    const auto ht = check_high_temperature(model.interaction());
    std::cout << "model: " << model.descriptor() << "\n";
    std::cout << "dobrushin row sum: " << dob.row_sum << " -> " << (dob.satisfied ? "satisfied" : "NOT satisfied")
              << "\n";
    for (const auto& [y, g] : dob.row) std::cout << "  gamma(0, " << y.str() << ") = " << g << "\n";
    std::cout << "high-temperature lhs: " << ht.lhs << " (threshold 2) -> "
              << (ht.satisfied ? "satisfied" : "NOT satisfied") << "\n";
    return 0;
}

void print_usage() {
    std::cout << "usage: gibbslab <command> [args]\n"
                 "  run <config.json> [--set k.path=v ...] [--out DIR] [--workers N]\n"
                 "      run the configured experiment; exit 0, or 2 on tolerance failure\n"
                 "  verify <oracle|exponential|entropy|clt|ldp|all|1..12> [--workers N]\n"
                 "      run built-in acceptance criteria, one pass/fail line each\n"
                 "  sample <config.json> [--count N] [--out DIR]\n"
                 "      dump sampled configurations with sampler metadata\n"
                 "  oracle <config.json> [--out DIR]\n"
                 "      dump the exact hitting-law table for the configured pattern\n"
                 "  dobrushin <config.json>\n"
                 "      print the uniqueness/high-temperature report for the model\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
            print_usage();
            return 0;
        }
        const std::string cmd = args[0];
        std::vector<std::string> overrides;
        std::string config_path, out_dir, suite;
        int workers = 0, count = 1;
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            auto need_value = [&](const char* flag) -> const std::string& {
                if (i + 1 >= args.size()) throw ValidationError(std::string(flag) + " needs a value");
                return args[++i];
            };
            if (a == "--set")
                overrides.push_back(need_value("--set"));
            else if (a == "--out")
                out_dir = need_value("--out");
            else if (a == "--workers")
                workers = std::stoi(need_value("--workers"));
            else if (a == "--count")
                count = std::stoi(need_value("--count"));
            else if (a == "--help" || a == "-h") {
                print_usage();
                return 0;
            } else if (!a.empty() && a[0] == '-')
                throw ValidationError("unknown flag " + a);
            else if (config_path.empty())
                config_path = a;
        }
        if (cmd == "run") {
            if (config_path.empty()) throw ValidationError("run: missing config path");
            return cmd_run(config_path, overrides, out_dir, workers);
        }
        if (cmd == "verify") {
            suite = config_path.empty() ? "all" : config_path;
            return cmd_verify(suite, workers);
        }
        if (cmd == "sample") {
            if (config_path.empty()) throw ValidationError("sample: missing config path");
            return cmd_sample(config_path, overrides, out_dir, count);
        }
        if (cmd == "oracle") {
            if (config_path.empty()) throw ValidationError("oracle: missing config path");
            return cmd_oracle(config_path, overrides, out_dir);
        }
        if (cmd == "dobrushin") {
            if (config_path.empty()) throw ValidationError("dobrushin: missing config path");
            return cmd_dobrushin(config_path, overrides);
        }
        print_usage();
        throw ValidationError("unknown command " + cmd);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gibbslab

#include "hedge/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>

#include "hedge/config.hpp"
#include "hedge/gradcheck_suite.hpp"
#include "hedge/report.hpp"

namespace hedge {

namespace {

namespace fs = std::filesystem;

// Every artifact path the tool touches resolves against this optional
// root, so a single environment variable relocates all outputs.
fs::path resolve_output_path(const std::string& dir) {
    fs::path p(dir);
    if (p.is_relative())
        if (const char* root = std::getenv("HEDGEKIT_OUTPUT_ROOT"))
            if (*root) p = fs::path(root) / p;
    return p;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

void write_manifest(const fs::path& dir, const std::string& status,
                    const std::string& config_path, std::uint64_t seed,
                    const std::vector<std::string>& models,
                    const std::string& error = "") {
    std::string text;
    text += "status = " + status + "\n";
    text += "config = " + config_path + "\n";
    text += "seed = " + std::to_string(seed) + "\n";
    text += "models = " + join(models, ", ") + "\n";
    if (!error.empty()) text += "error = " + error + "\n";
    csv::write_file((dir / "run_manifest.txt").string(), text);
}

// --- run -----------------------------------------------------------------

struct RunOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // section.key=value
    std::string output_dir;              // overrides [run] output_dir when set
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool ablation = false;
};

void apply_override(IniFile& ini, const std::string& expr) {
    const size_t eq = expr.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects section.key=value, got '" + expr + "'");
    const std::string lhs = expr.substr(0, eq);
    const size_t dot = lhs.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size())
        throw ConfigError("--set expects section.key=value, got '" + expr + "'");
    ini.set(lhs.substr(0, dot), lhs.substr(dot + 1), expr.substr(eq + 1));
}

StitchedResult run_one_model(const std::string& name, const ExperimentConfig& cfg,
                             const MarketData& data, const SplitPlan& plan) {
    if (name == "drl")
        return run_walkforward_drl(data, plan, cfg.drl_model(), cfg.episode, cfg.seed,
                                   "drl", cfg.parallelism);
    return run_walkforward_baseline(data, plan, parse_baseline(name), cfg.baseline,
                                    cfg.episode, cfg.rebalance);
}

int cmd_run(const RunOptions& opt) {
    IniFile ini = read_ini(opt.config_path);
    for (const auto& expr : opt.overrides) apply_override(ini, expr);
    ExperimentConfig cfg = ExperimentConfig::from_ini(ini);
    if (!opt.output_dir.empty()) cfg.output_dir = opt.output_dir;
    if (opt.seed_set) cfg.seed = opt.seed;
    if (opt.ablation) cfg.ablation = true;
    cfg.validate();

    // The risky asset is the reference every comparison needs; run it even
    // when the model list leaves it out.
    std::vector<std::string> run_models = cfg.models;
    if (std::find(run_models.begin(), run_models.end(), "risky_only") == run_models.end())
        run_models.push_back("risky_only");

    const fs::path dir = resolve_output_path(cfg.output_dir);
    fs::create_directories(dir);
    write_manifest(dir, "running", opt.config_path, cfg.seed, run_models);
    write_ini((dir / "config_resolved.ini").string(), cfg.to_ini());

    try {
        const MarketData data = cfg.load_data();
        const SplitPlan plan = make_splits(data.dates, cfg.plan);
        std::cout << "data: " << data.n_days() << " days, " << data.n_strategies()
                  << " strategies, " << data.n_context() << " context series\n"
                  << "plan: " << plan.n_splits() << " splits, first test "
                  << format_date(data.dates[plan.splits.front().test.begin]) << "\n";

        std::vector<StitchedResult> results;
        for (const auto& name : run_models) {
            results.push_back(run_one_model(name, cfg, data, plan));
            const auto& r = results.back();
            std::cout << name << ": out-of-sample net profit "
                      << csv::format_number(net_profit(r.stitched.value_series()))
                      << "\n";
        }

        for (const auto& r : results) {
            write_path_csv((dir / ("stitched_path_" + r.model + ".csv")).string(),
                           r.stitched);
            csv::write_file((dir / ("weights_" + r.model + ".svg")).string(),
                            weights_chart(data, r));
            if (r.model != "drl") continue;
            for (const auto& s : r.splits) {
                const std::string k = std::to_string(s.index);
                write_train_log((dir / ("trainlog_drl_split" + k + ".csv")).string(),
                                s.curve);
                s.params.save((dir / ("params_drl_split" + k + ".txt")).string());
            }
        }
        csv::write_file((dir / "weights.csv").string(), weights_csv(data, results));
        csv::write_file((dir / "value_chart.svg").string(), value_chart(results));

        const std::vector<ComparisonRow> rows = comparison_rows(results);
        csv::write_file((dir / "comparison.csv").string(), comparison_csv(rows));
        std::cout << "\n" << comparison_text(rows);

        if (cfg.ablation) {
            const std::vector<AblationCell> cells = ablation_matrix(
                data, plan, cfg.drl_model(), cfg.episode, cfg.seed, cfg.parallelism);
            csv::write_file((dir / "ablation.csv").string(), ablation_csv(cells));
            std::cout << "\nablation: " << cells.size() << " cells, best net profit "
                      << csv::format_number(cells.front().net_profit_total) << "\n";
        }
    } catch (const std::exception& e) {
        write_manifest(dir, "failed", opt.config_path, cfg.seed, run_models, e.what());
        throw;
    }
    write_manifest(dir, "complete", opt.config_path, cfg.seed, run_models);
    std::cout << "\nartifacts in " << dir.string() << "\n";
    return 0;
}

// --- report --------------------------------------------------------------

struct StitchedCsv {
    std::string model;
    std::vector<std::string> dates;
    std::vector<double> values;
};

StitchedCsv read_stitched_csv(const fs::path& file, const std::string& model) {
    const csv::Table t = csv::read_file(file.string());
    const std::vector<std::string> expect{"date", "value", "return", "turnover", "cost"};
    if (t.header != expect)
        throw DataError(file.string() + ": unexpected header '" + join(t.header, ",") +
                        "'");
    StitchedCsv out;
    out.model = model;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        out.dates.push_back(t.rows[i][0]);
        out.values.push_back(csv::parse_number(
            t.rows[i][1], file.string() + ":" + std::to_string(i + 2)));
    }
    if (out.dates.empty()) throw DataError(file.string() + ": no rows");
    return out;
}

int cmd_report(const std::string& dir_arg) {
    const fs::path dir = resolve_output_path(dir_arg);

    std::vector<std::string> stitched_files;
    if (fs::is_directory(dir))
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string f = entry.path().filename().string();
            if (f.rfind("stitched_path_", 0) == 0 && f.size() > 18 &&
                f.substr(f.size() - 4) == ".csv")
                stitched_files.push_back(f);
        }
    std::sort(stitched_files.begin(), stitched_files.end());

    std::vector<std::string> missing;
    if (!fs::exists(dir / "comparison.csv")) missing.push_back("comparison.csv");
    if (!fs::exists(dir / "weights.csv")) missing.push_back("weights.csv");
    if (stitched_files.empty()) missing.push_back("stitched_path_<model>.csv");
    if (!missing.empty())
        throw DataError("report: missing inputs in '" + dir.string() +
                        "': " + join(missing, ", "));

    // Rebuild the value chart from the stitched paths, DRL first.
    std::vector<StitchedCsv> paths;
    for (const auto& f : stitched_files)
        paths.push_back(read_stitched_csv(dir / f, f.substr(14, f.size() - 18)));
    std::stable_partition(paths.begin(), paths.end(),
                          [](const StitchedCsv& p) { return p.model == "drl"; });
    std::vector<svg::Series> series;
    for (const auto& p : paths) {
        if (p.dates != paths.front().dates)
            throw DataError("report: '" + p.model +
                            "' covers different dates than '" + paths.front().model +
                            "'");
        series.push_back({p.model, p.values});
    }
    csv::write_file((dir / "value_chart.svg").string(),
                    svg::line_chart("Out-of-sample portfolio value",
                                    paths.front().dates, series));

    // Annual mean weights per model from the long-format decision log.
    const csv::Table wt = csv::read_file((dir / "weights.csv").string());
    const std::vector<std::string> wexpect{"date", "model", "strategy", "weight"};
    if (wt.header != wexpect)
        throw DataError((dir / "weights.csv").string() + ": unexpected header");
    struct Acc {
        std::vector<std::string> strategies;                   // first-seen order
        std::map<std::string, std::vector<double>> sum_by_year;  // label -> per strategy
        std::map<std::string, int> rows_by_year;
    };
    std::map<std::string, Acc> by_model;
    for (size_t i = 0; i < wt.rows.size(); ++i) {
        const auto& row = wt.rows[i];
        const std::string year = row[0].substr(0, 4);
        Acc& acc = by_model[row[1]];
        auto it = std::find(acc.strategies.begin(), acc.strategies.end(), row[2]);
        size_t s = static_cast<size_t>(it - acc.strategies.begin());
        if (it == acc.strategies.end()) acc.strategies.push_back(row[2]);
        auto& sums = acc.sum_by_year[year];
        if (sums.size() <= s) sums.resize(acc.strategies.size(), 0.0);
        sums[s] += csv::parse_number(
            row[3], (dir / "weights.csv").string() + ":" + std::to_string(i + 2));
        acc.rows_by_year[year] += 1;
    }
    for (const auto& [model, acc] : by_model) {
        std::vector<std::string> years;
        std::vector<svg::Series> segments(acc.strategies.size());
        for (size_t s = 0; s < acc.strategies.size(); ++s)
            segments[s].label = acc.strategies[s];
        for (const auto& [year, sums] : acc.sum_by_year) {
            years.push_back(year);
            const double n_decisions =
                acc.rows_by_year.at(year) / double(acc.strategies.size());
            for (size_t s = 0; s < acc.strategies.size(); ++s)
                segments[s].y.push_back((s < sums.size() ? sums[s] : 0.0) / n_decisions);
        }
        csv::write_file((dir / ("weights_" + model + ".svg")).string(),
                        svg::stacked_bars("Mean decision weights by year (" + model + ")",
                                          years, segments));
    }

    // Reprint the comparison table from its CSV.
    const csv::Table ct = csv::read_file((dir / "comparison.csv").string());
    const std::vector<std::string> cexpect{"model",   "window_years", "return",
                                           "sortino", "sharpe",       "max_dd"};
    if (ct.header != cexpect)
        throw DataError((dir / "comparison.csv").string() + ": unexpected header");
    std::vector<ComparisonRow> rows;
    for (size_t i = 0; i < ct.rows.size(); ++i) {
        const auto& row = ct.rows[i];
        const std::string at =
            (dir / "comparison.csv").string() + ":" + std::to_string(i + 2);
        ComparisonRow r;
        r.model = row[0];
        r.window_years = static_cast<int>(csv::parse_number(row[1], at));
        r.return_ann = csv::parse_number(row[2], at);
        if (!row[3].empty()) r.sortino_ratio = csv::parse_number(row[3], at);
        if (!row[4].empty()) r.sharpe_ratio = csv::parse_number(row[4], at);
        r.max_dd = csv::parse_number(row[5], at);
        rows.push_back(std::move(r));
    }
    std::cout << comparison_text(rows) << "\ncharts written to " << dir.string() << "\n";
    return 0;
}

// --- gradcheck -----------------------------------------------------------

int cmd_gradcheck(bool mutate) {
    constexpr double kTolerance = 1e-4;

    struct FlagGuard {
        ~FlagGuard() { debug::corrupt_mul_backward = false; }
    } guard;
    if (mutate) {
        debug::corrupt_mul_backward = true;
        std::cout << "fault injection: multiply backward rule sign-flipped\n";
    }

    const std::vector<GradCheckCase> checks = gradcheck_suite();

    int failures = 0;
    char line[160];
    for (size_t i = 0; i < checks.size(); ++i) {
        const GradCheckCase& c = checks[i];
        std::mt19937_64 rng(1000 + i);
        GradCheckReport worst;
        for (int p = 0; p < c.n_points; ++p) {
            const GradCheckReport rep = grad_check(c.fn, c.gen(c.dim, rng), c.eps);
            if (rep.max_rel_err >= worst.max_rel_err) worst = rep;
        }
        const bool pass = worst.max_rel_err < kTolerance;
        failures += !pass;
        std::snprintf(line, sizeof(line), "%-34s max rel err %.3e  %s\n", c.name.c_str(),
                      worst.max_rel_err, pass ? "pass" : "FAIL");
        std::cout << line;
        if (!pass) {
            std::snprintf(line, sizeof(line),
                          "    worst coordinate %d: analytic %.9g vs numeric %.9g\n",
                          worst.worst_index, worst.analytic, worst.numeric);
            std::cout << line;
        }
    }
    std::snprintf(line, sizeof(line), "gradcheck: %zu/%zu checks passed (tolerance %g)\n",
                  checks.size() - failures, checks.size(), kTolerance);
    std::cout << line;
    return failures == 0 ? 0 : 1;
}

// --- gen-data ------------------------------------------------------------

struct GenDataOptions {
    std::string preset_name = "separable";
    int days = 1500;
    std::uint64_t seed = 0;
    std::string start = "2000-01-03";
    std::string out = "data";
};

int cmd_gen_data(const GenDataOptions& opt) {
    const SyntheticData d =
        generate(preset(opt.preset_name), opt.days, parse_date(opt.start), opt.seed);
    const fs::path dir = resolve_output_path(opt.out);
    fs::create_directories(dir);
    write_panel((dir / "prices.csv").string(), d.prices);
    write_panel((dir / "context.csv").string(), d.context);

    std::string regimes = "date,regime\n";
    for (size_t i = 0; i < d.regimes.size(); ++i)
        regimes += format_date(d.prices.dates[i + 1]) + "," +
                   std::to_string(d.regimes[i]) + "\n";
    csv::write_file((dir / "regimes.csv").string(), regimes);

    int switches = 0;
    for (size_t i = 1; i < d.regimes.size(); ++i)
        switches += d.regimes[i] != d.regimes[i - 1];
    std::cout << "wrote " << opt.days << " days of preset '" << opt.preset_name
              << "' (" << switches << " regime switches) to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"hedging-overlay experiments: walk-forward training, baselines, reports"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run_cmd = app.add_subcommand("run", "run the experiment in a config file");
    run_cmd->add_option("config", run_opt.config_path, "experiment config (INI)")
        ->required();
    run_cmd->add_option("--set", run_opt.overrides,
                        "override a config value (section.key=value)");
    run_cmd->add_option("--output", run_opt.output_dir, "override the output directory");
    CLI::Option* seed_opt =
        run_cmd->add_option("--seed", run_opt.seed, "override the master seed");
    run_cmd->add_flag("--ablation", run_opt.ablation, "also run the 16-cell design grid");

    std::string report_dir;
    CLI::App* report_cmd =
        app.add_subcommand("report", "re-render tables and charts from run artifacts");
    report_cmd->add_option("dir", report_dir, "results directory of a previous run")
        ->required();

    bool mutate = false;
    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference checks of every gradient rule");
    gradcheck_cmd->add_flag(
        "--mutate", mutate, "corrupt one backward rule to prove the checks can fail");

    GenDataOptions gen_opt;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "write a synthetic market to CSV");
    gen_cmd->add_option("--preset", gen_opt.preset_name,
                        "scenario preset (separable, crisis, no-signal, dominant)");
    gen_cmd->add_option("--days", gen_opt.days, "number of return days");
    gen_cmd->add_option("--seed", gen_opt.seed, "generator seed");
    gen_cmd->add_option("--start", gen_opt.start, "first price date (ISO)");
    gen_cmd->add_option("--out", gen_opt.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a config error
    }

    try {
        if (run_cmd->parsed()) {
            run_opt.seed_set = seed_opt->count() > 0;
            return cmd_run(run_opt);
        }
        if (report_cmd->parsed()) return cmd_report(report_dir);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(mutate);
        if (gen_cmd->parsed()) return cmd_gen_data(gen_opt);
        throw ContractError("no subcommand dispatched");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hedge

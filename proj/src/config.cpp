#include "hedge/config.hpp"

#include <algorithm>
#include <cstdlib>

namespace hedge {

namespace {

std::string where(const std::string& sec, const std::string& key) {
    return "[" + sec + "] " + key;
}

int get_int(const IniFile& ini, const std::string& sec, const std::string& key,
            int fallback) {
    const std::string* v = ini.find(sec, key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        const int out = std::stoi(*v, &used);
        if (used != v->size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError(where(sec, key) + ": not an integer: '" + *v + "'");
    }
}

std::uint64_t get_u64(const IniFile& ini, const std::string& sec, const std::string& key,
                      std::uint64_t fallback) {
    const std::string* v = ini.find(sec, key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        const unsigned long long out = std::stoull(*v, &used);
        if (used != v->size() || v->front() == '-') throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError(where(sec, key) + ": not a non-negative integer: '" + *v + "'");
    }
}

double get_double(const IniFile& ini, const std::string& sec, const std::string& key,
                  double fallback) {
    const std::string* v = ini.find(sec, key);
    if (!v) return fallback;
    try {
        return csv::parse_number(*v, where(sec, key));
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

bool get_bool(const IniFile& ini, const std::string& sec, const std::string& key,
              bool fallback) {
    const std::string* v = ini.find(sec, key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError(where(sec, key) + ": expected true or false, got '" + *v + "'");
}

std::string get_string(const IniFile& ini, const std::string& sec, const std::string& key,
                       const std::string& fallback) {
    const std::string* v = ini.find(sec, key);
    return v ? *v : fallback;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char c : s) {
        if (c == ',') {
            out.push_back(item);
            item.clear();
        } else if (c != ' ' && c != '\t') {
            item += c;
        }
    }
    out.push_back(item);
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::vector<int> get_int_list(const IniFile& ini, const std::string& sec,
                              const std::string& key, const std::vector<int>& fallback) {
    const std::string* v = ini.find(sec, key);
    if (!v) return fallback;
    std::vector<int> out;
    for (const std::string& item : split_list(*v)) {
        try {
            size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError(where(sec, key) + ": not an integer list entry: '" + item +
                              "'");
        }
    }
    if (out.empty()) throw ConfigError(where(sec, key) + ": empty list");
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

std::string join_ints(const std::vector<int>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i)
        out += (i ? "," : "") + std::to_string(items[i]);
    return out;
}

const std::vector<std::string> kKnownModels{"drl", "risky_only", "markowitz",
                                            "follow_winner", "follow_loser"};

}  // namespace

void ExperimentConfig::validate() const {
    if (data.kind != "synthetic" && data.kind != "csv")
        throw ConfigError("[data] kind: expected synthetic or csv, got '" + data.kind +
                          "'");
    if (data.kind == "synthetic") {
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), data.preset) == names.end())
            throw ConfigError("[data] preset: unknown preset '" + data.preset + "'");
        if (data.n_days < 2) throw ConfigError("[data] n_days: need at least 2 days");
        parse_date(data.start_date);
    } else if (data.prices_file.empty()) {
        throw ConfigError("[data] prices_file: required when kind = csv");
    }
    if (data.ffill_limit < 0) throw ConfigError("[data] ffill_limit: must be >= 0");

    obs.validate();
    net.validate();
    trainer.validate();
    episode.validate();
    plan.validate();

    if (baseline.lookback < 1) throw ConfigError("[baseline] lookback: must be >= 1");
    if (rebalance != "annual" && rebalance != "monthly")
        throw ConfigError("[baseline] rebalance: expected annual or monthly, got '" +
                          rebalance + "'");
    if (models.empty()) throw ConfigError("[run] models: need at least one model");
    for (const auto& m : models) {
        if (std::find(kKnownModels.begin(), kKnownModels.end(), m) == kKnownModels.end())
            throw ConfigError("[run] models: unknown model '" + m + "'");
        if (std::count(models.begin(), models.end(), m) != 1)
            throw ConfigError("[run] models: duplicate model '" + m + "'");
    }
    if (parallelism < 1) throw ConfigError("[run] parallelism: must be >= 1");
    if (output_dir.empty()) throw ConfigError("[run] output_dir: must not be empty");
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig cfg;

    // Reject unknown sections/keys up front: the canonical serialization
    // of the defaults enumerates everything this config understands.
    const IniFile known = cfg.to_ini();
    for (const auto& [sec, entries] : ini.sections) {
        const auto* known_sec = [&]() -> const IniFile::Section* {
            for (const auto& [name, e] : known.sections)
                if (name == sec) return &e;
            return nullptr;
        }();
        if (!known_sec) throw ConfigError("unknown config section [" + sec + "]");
        for (const auto& [key, _] : entries) {
            const bool ok = std::any_of(known_sec->begin(), known_sec->end(),
                                        [&](const auto& kv) { return kv.first == key; });
            if (!ok) throw ConfigError("unknown config key " + where(sec, key));
        }
    }

    cfg.data.kind = get_string(ini, "data", "kind", cfg.data.kind);
    cfg.data.preset = get_string(ini, "data", "preset", cfg.data.preset);
    cfg.data.n_days = get_int(ini, "data", "n_days", cfg.data.n_days);
    cfg.data.seed = get_u64(ini, "data", "seed", cfg.data.seed);
    cfg.data.start_date = get_string(ini, "data", "start_date", cfg.data.start_date);
    cfg.data.prices_file = get_string(ini, "data", "prices_file", cfg.data.prices_file);
    cfg.data.context_file = get_string(ini, "data", "context_file", cfg.data.context_file);
    cfg.data.risky_column = get_string(ini, "data", "risky_column", cfg.data.risky_column);
    cfg.data.ffill_limit = get_int(ini, "data", "ffill_limit", cfg.data.ffill_limit);

    cfg.obs.return_lags = get_int_list(ini, "observations", "return_lags", cfg.obs.return_lags);
    cfg.obs.context_lags =
        get_int_list(ini, "observations", "context_lags", cfg.obs.context_lags);
    cfg.obs.vol_window = get_int(ini, "observations", "vol_window", cfg.obs.vol_window);

    cfg.net.asset_filters = get_int(ini, "network", "asset_filters", cfg.net.asset_filters);
    cfg.net.asset_kernel = get_int(ini, "network", "asset_kernel", cfg.net.asset_kernel);
    cfg.net.asset_hidden = get_int(ini, "network", "asset_hidden", cfg.net.asset_hidden);
    cfg.net.context_filters =
        get_int(ini, "network", "context_filters", cfg.net.context_filters);
    cfg.net.context_kernel =
        get_int(ini, "network", "context_kernel", cfg.net.context_kernel);
    cfg.net.context_hidden =
        get_int(ini, "network", "context_hidden", cfg.net.context_hidden);
    cfg.net.merge_hidden = get_int(ini, "network", "merge_hidden", cfg.net.merge_hidden);
    cfg.net.activation = get_string(ini, "network", "activation", cfg.net.activation);
    cfg.net.l2_coeff = get_double(ini, "network", "l2_coeff", cfg.net.l2_coeff);

    cfg.trainer.learning_rate =
        get_double(ini, "trainer", "learning_rate", cfg.trainer.learning_rate);
    cfg.trainer.noise_std = get_double(ini, "trainer", "noise_std", cfg.trainer.noise_std);
    cfg.trainer.max_iterations =
        get_int(ini, "trainer", "max_iterations", cfg.trainer.max_iterations);
    cfg.trainer.patience = get_int(ini, "trainer", "patience", cfg.trainer.patience);
    cfg.trainer.p_policy = get_double(ini, "trainer", "p_policy", cfg.trainer.p_policy);
    cfg.trainer.adversarial =
        get_bool(ini, "trainer", "adversarial", cfg.trainer.adversarial);
    if (const std::string* v = ini.find("trainer", "reward")) {
        try {
            cfg.trainer.reward = parse_reward_kind(*v);
        } catch (const ConfigError&) {
            throw ConfigError(where("trainer", "reward") + ": unknown reward '" + *v + "'");
        }
    }
    cfg.trainer.selection = get_string(ini, "trainer", "selection", cfg.trainer.selection);

    cfg.episode.action_lag = get_int(ini, "episode", "action_lag", cfg.episode.action_lag);
    cfg.episode.cost_rate = get_double(ini, "episode", "cost_rate", cfg.episode.cost_rate);
    cfg.episode.leverage_cap =
        get_double(ini, "episode", "leverage_cap", cfg.episode.leverage_cap);
    cfg.episode.initial_value =
        get_double(ini, "episode", "initial_value", cfg.episode.initial_value);

    cfg.plan.anchor_date = get_string(ini, "plan", "anchor_date", cfg.plan.anchor_date);
    cfg.plan.first_test_year =
        get_int(ini, "plan", "first_test_year", cfg.plan.first_test_year);
    cfg.plan.test_span_years =
        get_int(ini, "plan", "test_span_years", cfg.plan.test_span_years);
    cfg.plan.min_train_years =
        get_int(ini, "plan", "min_train_years", cfg.plan.min_train_years);

    cfg.baseline.lookback = get_int(ini, "baseline", "lookback", cfg.baseline.lookback);
    if (const std::string* v = ini.find("baseline", "r_min")) {
        if (*v == "auto")
            cfg.baseline.r_min = std::numeric_limits<double>::quiet_NaN();
        else
            cfg.baseline.r_min = get_double(ini, "baseline", "r_min", 0.0);
    }
    cfg.rebalance = get_string(ini, "baseline", "rebalance", cfg.rebalance);

    if (const std::string* v = ini.find("run", "models")) cfg.models = split_list(*v);
    cfg.use_context = get_bool(ini, "run", "use_context", cfg.use_context);
    cfg.ablation = get_bool(ini, "run", "ablation", cfg.ablation);
    cfg.parallelism = get_int(ini, "run", "parallelism", cfg.parallelism);
    cfg.output_dir = get_string(ini, "run", "output_dir", cfg.output_dir);
    cfg.seed = get_u64(ini, "run", "seed", cfg.seed);

    cfg.validate();
    return cfg;
}

IniFile ExperimentConfig::to_ini() const {
    IniFile ini;
    ini.set("data", "kind", data.kind);
    ini.set("data", "preset", data.preset);
    ini.set("data", "n_days", std::to_string(data.n_days));
    ini.set("data", "seed", std::to_string(data.seed));
    ini.set("data", "start_date", data.start_date);
    ini.set("data", "prices_file", data.prices_file);
    ini.set("data", "context_file", data.context_file);
    ini.set("data", "risky_column", data.risky_column);
    ini.set("data", "ffill_limit", std::to_string(data.ffill_limit));

    ini.set("observations", "return_lags", join_ints(obs.return_lags));
    ini.set("observations", "context_lags", join_ints(obs.context_lags));
    ini.set("observations", "vol_window", std::to_string(obs.vol_window));

    ini.set("network", "asset_filters", std::to_string(net.asset_filters));
    ini.set("network", "asset_kernel", std::to_string(net.asset_kernel));
    ini.set("network", "asset_hidden", std::to_string(net.asset_hidden));
    ini.set("network", "context_filters", std::to_string(net.context_filters));
    ini.set("network", "context_kernel", std::to_string(net.context_kernel));
    ini.set("network", "context_hidden", std::to_string(net.context_hidden));
    ini.set("network", "merge_hidden", std::to_string(net.merge_hidden));
    ini.set("network", "activation", net.activation);
    ini.set("network", "l2_coeff", csv::format_number(net.l2_coeff));

    ini.set("trainer", "learning_rate", csv::format_number(trainer.learning_rate));
    ini.set("trainer", "noise_std", csv::format_number(trainer.noise_std));
    ini.set("trainer", "max_iterations", std::to_string(trainer.max_iterations));
    ini.set("trainer", "patience", std::to_string(trainer.patience));
    ini.set("trainer", "p_policy", csv::format_number(trainer.p_policy));
    ini.set("trainer", "adversarial", trainer.adversarial ? "true" : "false");
    ini.set("trainer", "reward", reward_kind_name(trainer.reward));
    ini.set("trainer", "selection", trainer.selection);

    ini.set("episode", "action_lag", std::to_string(episode.action_lag));
    ini.set("episode", "cost_rate", csv::format_number(episode.cost_rate));
    ini.set("episode", "leverage_cap", csv::format_number(episode.leverage_cap));
    ini.set("episode", "initial_value", csv::format_number(episode.initial_value));

    ini.set("plan", "anchor_date", plan.anchor_date);
    ini.set("plan", "first_test_year", std::to_string(plan.first_test_year));
    ini.set("plan", "test_span_years", std::to_string(plan.test_span_years));
    ini.set("plan", "min_train_years", std::to_string(plan.min_train_years));

    ini.set("baseline", "lookback", std::to_string(baseline.lookback));
    ini.set("baseline", "r_min",
            std::isnan(baseline.r_min) ? "auto" : csv::format_number(baseline.r_min));
    ini.set("baseline", "rebalance", rebalance);

    ini.set("run", "models", join(models));
    ini.set("run", "use_context", use_context ? "true" : "false");
    ini.set("run", "ablation", ablation ? "true" : "false");
    ini.set("run", "parallelism", std::to_string(parallelism));
    ini.set("run", "output_dir", output_dir);
    ini.set("run", "seed", std::to_string(seed));
    return ini;
}

DrlModelConfig ExperimentConfig::drl_model() const {
    DrlModelConfig model;
    model.obs = obs;
    model.net = net;
    model.trainer = trainer;
    model.use_context = use_context;
    return model;
}

MarketData ExperimentConfig::load_data() const {
    if (data.kind == "synthetic") {
        SyntheticData d = generate(preset(data.preset), data.n_days,
                                   parse_date(data.start_date), data.seed);
        return build_market_data(d.prices, &d.context, data.risky_column,
                                 data.ffill_limit);
    }
    RawPanel prices = read_panel(data.prices_file);
    if (data.context_file.empty())
        return build_market_data(prices, nullptr, data.risky_column, data.ffill_limit);
    RawPanel context = read_panel(data.context_file);
    return build_market_data(prices, &context, data.risky_column, data.ffill_limit);
}

}  // namespace hedge

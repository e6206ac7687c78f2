#pragma once

#include "hedge/ini.hpp"
#include "hedge/synthgen.hpp"
#include "hedge/walkforward.hpp"

namespace hedge {

struct DataConfig {
    std::string kind = "synthetic";  // synthetic | csv
    // synthetic source
    std::string preset = "separable";
    int n_days = 1500;
    std::uint64_t seed = 0;
    std::string start_date = "2000-01-03";
    // csv source
    std::string prices_file;
    std::string context_file;  // optional; empty = no context columns
    std::string risky_column = "RISKY";
    int ffill_limit = 5;
};

// The complete description of one experiment. A resolved config snapshot
// plus the build fully determine every emitted byte, so this struct and
// its INI form are the reproducibility boundary.
struct ExperimentConfig {
    DataConfig data;
    ObservationSpec obs;
    NetworkConfig net;  // data-dependent geometry filled per split at run time
    TrainerConfig trainer;
    EpisodeConfig episode;
    SplitPlanConfig plan;
    BaselineParams baseline;  // baseline leverage itself is fixed at 1
    std::string rebalance = "annual";
    std::vector<std::string> models{"drl", "risky_only", "markowitz", "follow_winner",
                                    "follow_loser"};
    bool use_context = true;
    bool ablation = false;
    int parallelism = 1;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    void validate() const;
    // Unknown sections or keys are config errors; missing keys keep their
    // defaults. to_ini() emits every key, so from_ini(to_ini(c)) == c.
    static ExperimentConfig from_ini(const IniFile& ini);
    IniFile to_ini() const;

    DrlModelConfig drl_model() const;
    MarketData load_data() const;
};

}  // namespace hedge

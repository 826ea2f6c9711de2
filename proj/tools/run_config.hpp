#pragma once

#include <string>
#include <vector>

#include "neglectnet/data_synth.hpp"
#include "neglectnet/training.hpp"

namespace neglectnet::cli {

/// Every setting of every subcommand. Serialized as one flat JSON object;
/// each key is also accepted on the command line as `--key value`.
struct RunConfig {
    TrainConfig train;
    SynthConfig synth;
    int64_t n = 64;               // samples written by synth
    std::string data_dir = "data";
    std::string split = "train";  // split read by train, written by synth, scored by eval
    std::string out_dir = "run";
    std::string checkpoint;       // default <out_dir>/checkpoint.bin
    std::string input;            // image for infer
    std::string report;           // default <out_dir>/eval_<split>.csv
    bool resume = false;
    bool ground_truth = false;    // eval scores y_g against itself
    int eval_batch = 8;

    RunConfig();

    std::string checkpoint_path() const;
    std::string report_path() const;

    /// Resolves a textual value for `key`; ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    std::string to_json() const;
    /// Applies every key of a flat JSON object; unknown keys are rejected.
    void merge_json(const std::string& text);
    void load_file(const std::string& path);
    void save_file(const std::string& path) const;

    void validate() const;
};

struct KeyInfo {
    std::string name;
    std::string help;
};

/// All configuration keys in documentation order.
const std::vector<KeyInfo>& config_keys();

}  // namespace neglectnet::cli

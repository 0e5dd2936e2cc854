// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ucsfl/channel.hpp"
#include "ucsfl/convergence.hpp"
#include "ucsfl/latency.hpp"
#include "ucsfl/mais.hpp"
#include "ucsfl/nbcd.hpp"
#include "ucsfl/objective.hpp"

namespace ucsfl {

constexpr int kCsvSchemaVersion = 1;

/// Flat "section.key = value" settings. Every known key has a default; unknown
/// keys are rejected.
class KeyValueConfig {
public:
    KeyValueConfig();  // all defaults

    /// Parses "key = value" lines; '#' starts a comment.
    void merge_text(const std::string& text, const std::string& origin = "config");
    void merge_file(const std::string& path);
    /// "key=value" override.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return values_; }
    /// Sorted "key = value" lines, parseable by merge_text.
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
};

enum class SweepAxis { none, f_ue, bandwidth, ell };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

enum class Scheme { ucsfl, fixed, bl1, bl2, bl3 };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct ExperimentConfig {
    std::size_t num_aps = 10;
    std::size_t num_ues = 4;
    double radius = 200.0;
    ApPlacement placement = ApPlacement::uniform;
    bool wrap_around = true;
    std::uint64_t seed = 1;
    FadingParams fading;
    RadioConfig radio;
    ComputeConfig compute;
    double ell = 1.0;
    std::size_t n_draws = 10;
    std::string profile = "vgg16";  // or a path to a profile file
    NbcdConfig nbcd;
    PpoConfig ppo;
    std::vector<Scheme> schemes;
    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;
    Splits strategy_splits;          // fixed strategy for run-nbcd and run-latency-sweep
    std::string strategy_association;  // "all" or rows of 0/1 separated by ';'
    QuadraticTaskConfig task;
    std::uint64_t task_seed = 1;
    std::size_t conv_rounds = 50;
    std::size_t conv_seeds = 200;
    std::vector<std::size_t> conv_cluster_sizes;
    std::size_t conv_local_steps = 1;
    std::size_t threads = 1;

    void validate() const;
    SplitProfile load_profile() const;
    StrategyAssignment fixed_strategy(std::size_t num_points) const;
};

ExperimentConfig to_experiment(const KeyValueConfig& kv);

/// Copy of cfg with the sweep axis set to value.
ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, double value);

Environment make_environment(const ExperimentConfig& cfg);

/// Output files by name; nothing touches the disk until write_outputs.
using OutputFiles = std::map<std::string, std::string>;

/// Writes every file through a temporary name and renames it into place.
void write_outputs(const std::string& dir, const OutputFiles& files);

struct SchemeRow {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::bl3;
    StrategyAssignment strategy;
    StrategyEvaluation evaluation;
};

std::string scheme_csv_header();
std::string scheme_csv_row(SweepAxis axis, const SchemeRow& row);

/// One short-term solve on the first fading draw with the fixed strategy:
/// nbcd_trace.csv and nbcd_links.csv.
OutputFiles run_nbcd(const ExperimentConfig& cfg);

/// MAIS per sweep point plus the requested baselines: results.csv and
/// reward_trace_<i>.csv.
OutputFiles run_mais(const ExperimentConfig& cfg);

/// Fixed strategies only (the configured one and the baselines): results.csv.
OutputFiles run_latency_sweep(const ExperimentConfig& cfg);

/// convergence.csv and convergence_summary.csv.
OutputFiles run_convergence(const ExperimentConfig& cfg);

}  // namespace ucsfl

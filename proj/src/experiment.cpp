// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ucsfl/csv.hpp"
#include "ucsfl/random.hpp"

namespace ucsfl {
namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> table = {
        {"network.num_aps", "10"},
        {"network.num_ues", "4"},
        {"network.radius", "200"},
        {"network.placement", "uniform"},
        {"network.wrap_around", "true"},
        {"network.seed", "1"},
        {"network.n_ant", "4"},
        {"channel.shadow_std_db", "4"},
        {"channel.num_paths", "1"},
        {"channel.max_delay", "1e-6"},
        {"channel.carrier_shift", "0"},
        {"radio.bandwidth", "15000"},
        {"radio.p_ul_max", "0.1"},
        {"radio.p_dl_max", "0.3"},
        {"radio.noise_dbm", "-121"},
        {"compute.f_ue", "1e9"},
        {"compute.f_dpu", "5e9"},
        {"compute.cycles_per_op", "1"},
        {"compute.t_back", "0.5"},
        {"objective.ell", "1"},
        {"objective.n_draws", "10"},
        {"objective.profile", "vgg16"},
        {"nbcd.penalty_rule", "multiplicative"},
        {"nbcd.rho_theta", "0.3"},
        {"nbcd.rho_pi", "0.3"},
        {"nbcd.step_decay", "0.85"},
        {"nbcd.step_shrink", "0.5"},
        {"nbcd.tol_inner", "1e-5"},
        {"nbcd.tol_outer", "1e-4"},
        {"nbcd.max_inner", "50"},
        {"nbcd.max_outer", "100"},
        {"nbcd.bisect_tol", "1e-8"},
        {"nbcd.bisect_max", "100"},
        {"nbcd.ridge", "1e-12"},
        {"ppo.gamma", "0.99"},
        {"ppo.lambda", "0.9"},
        {"ppo.horizon", "4"},
        {"ppo.clip", "0.1"},
        {"ppo.critic_lr", "1e-5"},
        {"ppo.actor_lr", "5e-5"},
        {"ppo.episodes", "200"},
        {"ppo.hidden", "64,64"},
        {"ppo.normalize_reward", "true"},
        {"ppo.normalize_advantage", "true"},
        {"ppo.rate_scale_ul", "0"},
        {"ppo.rate_scale_dl", "0"},
        {"experiment.schemes", "UCSFL,BL1,BL2,BL3"},
        {"experiment.sweep_axis", "none"},
        {"experiment.sweep_values", ""},
        {"experiment.threads", "1"},
        {"strategy.splits", "2"},
        {"strategy.association", "all"},
        {"convergence.num_aps", "10"},
        {"convergence.num_ues", "4"},
        {"convergence.dim", "6"},
        {"convergence.layers", "3"},
        {"convergence.mu", "1"},
        {"convergence.beta", "2"},
        {"convergence.eps", "0.5"},
        {"convergence.heterogeneity", "0"},
        {"convergence.init_distance", "0.5"},
        {"convergence.rounds", "50"},
        {"convergence.seeds", "200"},
        {"convergence.cluster_sizes", "1,2,5,10"},
        {"convergence.local_steps", "1"},
        {"convergence.seed", "1"},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": integer out of range '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(key + ": expected true or false, got '" + v + "'");
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

KeyValueConfig::KeyValueConfig() : values_(defaults()) {}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    it->second = value;
}

void KeyValueConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void KeyValueConfig::merge_text(const std::string& text, const std::string& origin) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            set(line);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void KeyValueConfig::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    merge_text(buf.str(), path);
}

const std::string& KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::to_text() const {
    std::string out = "# ucsfl effective configuration, csv schema v" + std::to_string(kCsvSchemaVersion) + "\n";
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "none") return SweepAxis::none;
    if (name == "f_ue") return SweepAxis::f_ue;
    if (name == "bandwidth" || name == "w") return SweepAxis::bandwidth;
    if (name == "ell") return SweepAxis::ell;
    throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::none: return "none";
        case SweepAxis::f_ue: return "f_ue";
        case SweepAxis::bandwidth: return "bandwidth";
        case SweepAxis::ell: return "ell";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "UCSFL" || name == "ucsfl") return Scheme::ucsfl;
    if (name == "FIXED" || name == "fixed") return Scheme::fixed;
    switch (parse_baseline(name)) {
        case Baseline::bl1: return Scheme::bl1;
        case Baseline::bl2: return Scheme::bl2;
        case Baseline::bl3: return Scheme::bl3;
    }
    return Scheme::bl3;
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::ucsfl: return "UCSFL";
        case Scheme::fixed: return "FIXED";
        case Scheme::bl1: return "BL1";
        case Scheme::bl2: return "BL2";
        case Scheme::bl3: return "BL3";
    }
    return "?";
}

ExperimentConfig to_experiment(const KeyValueConfig& kv) {
    auto num = [&](const char* k) { return to_double(k, kv.get(k)); };
    auto uint = [&](const char* k) { return static_cast<std::size_t>(to_uint(k, kv.get(k))); };
    auto flag = [&](const char* k) { return to_bool(k, kv.get(k)); };

    ExperimentConfig c;
    c.num_aps = uint("network.num_aps");
    c.num_ues = uint("network.num_ues");
    c.radius = num("network.radius");
    const std::string& placement = kv.get("network.placement");
    if (placement == "uniform")
        c.placement = ApPlacement::uniform;
    else if (placement == "grid")
        c.placement = ApPlacement::grid;
    else
        throw std::invalid_argument("network.placement: expected uniform or grid");
    c.wrap_around = flag("network.wrap_around");
    c.seed = to_uint("network.seed", kv.get("network.seed"));
    c.fading.n_ant = uint("network.n_ant");
    c.fading.shadow_std_db = num("channel.shadow_std_db");
    c.fading.num_paths = uint("channel.num_paths");
    c.fading.max_delay = num("channel.max_delay");
    c.fading.carrier_shift_f = num("channel.carrier_shift");
    c.fading.noise_power = dbm_to_watt(num("radio.noise_dbm"));
    c.radio.bandwidth = num("radio.bandwidth");
    c.radio.p_ul_max = num("radio.p_ul_max");
    c.radio.p_dl_max = num("radio.p_dl_max");
    c.radio.noise_power = c.fading.noise_power;
    c.compute.f_ue = num("compute.f_ue");
    c.compute.f_dpu = num("compute.f_dpu");
    c.compute.cycles_per_op = num("compute.cycles_per_op");
    c.compute.t_back = num("compute.t_back");
    c.ell = num("objective.ell");
    c.n_draws = uint("objective.n_draws");
    c.profile = kv.get("objective.profile");

    const std::string& rule = kv.get("nbcd.penalty_rule");
    if (rule == "multiplicative")
        c.nbcd.penalty_rule = PenaltyRule::multiplicative;
    else if (rule == "additive")
        c.nbcd.penalty_rule = PenaltyRule::additive;
    else
        throw std::invalid_argument("nbcd.penalty_rule: expected multiplicative or additive");
    c.nbcd.rho_theta = num("nbcd.rho_theta");
    c.nbcd.rho_pi = num("nbcd.rho_pi");
    c.nbcd.step_decay = num("nbcd.step_decay");
    c.nbcd.step_shrink = num("nbcd.step_shrink");
    c.nbcd.tol_inner = num("nbcd.tol_inner");
    c.nbcd.tol_outer = num("nbcd.tol_outer");
    c.nbcd.max_inner = static_cast<int>(uint("nbcd.max_inner"));
    c.nbcd.max_outer = static_cast<int>(uint("nbcd.max_outer"));
    c.nbcd.bisect_tol = num("nbcd.bisect_tol");
    c.nbcd.bisect_max = static_cast<int>(uint("nbcd.bisect_max"));
    c.nbcd.ridge = num("nbcd.ridge");

    c.ppo.gamma = num("ppo.gamma");
    c.ppo.lambda = num("ppo.lambda");
    c.ppo.horizon = uint("ppo.horizon");
    c.ppo.clip = num("ppo.clip");
    c.ppo.critic_lr = num("ppo.critic_lr");
    c.ppo.actor_lr = num("ppo.actor_lr");
    c.ppo.episodes = uint("ppo.episodes");
    c.ppo.hidden.clear();
    for (const auto& h : split_list(kv.get("ppo.hidden")))
        c.ppo.hidden.push_back(static_cast<std::size_t>(to_uint("ppo.hidden", h)));
    c.ppo.normalize_reward = flag("ppo.normalize_reward");
    c.ppo.normalize_advantage = flag("ppo.normalize_advantage");
    c.ppo.rate_scale_ul = num("ppo.rate_scale_ul");
    c.ppo.rate_scale_dl = num("ppo.rate_scale_dl");

    for (const auto& s : split_list(kv.get("experiment.schemes"))) c.schemes.push_back(parse_scheme(s));
    c.sweep_axis = parse_sweep_axis(kv.get("experiment.sweep_axis"));
    for (const auto& v : split_list(kv.get("experiment.sweep_values")))
        c.sweep_values.push_back(to_double("experiment.sweep_values", v));
    c.threads = uint("experiment.threads");

    const auto splits = split_list(kv.get("strategy.splits"));
    for (const auto& s : splits) c.strategy_splits.push_back(static_cast<std::size_t>(to_uint("strategy.splits", s)));
    if (c.strategy_splits.size() == 1) c.strategy_splits.assign(c.num_ues, c.strategy_splits.front());
    c.strategy_association = kv.get("strategy.association");

    c.task.dim = uint("convergence.dim");
    c.task.layers = uint("convergence.layers");
    c.task.mu = num("convergence.mu");
    c.task.beta = num("convergence.beta");
    c.task.eps = num("convergence.eps");
    c.task.heterogeneity = num("convergence.heterogeneity");
    c.task.init_distance = num("convergence.init_distance");
    c.task.num_aps = uint("convergence.num_aps");
    c.task.num_ues = uint("convergence.num_ues");
    c.task_seed = to_uint("convergence.seed", kv.get("convergence.seed"));
    c.conv_rounds = uint("convergence.rounds");
    c.conv_seeds = uint("convergence.seeds");
    for (const auto& s : split_list(kv.get("convergence.cluster_sizes")))
        c.conv_cluster_sizes.push_back(static_cast<std::size_t>(to_uint("convergence.cluster_sizes", s)));
    c.conv_local_steps = uint("convergence.local_steps");
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (num_aps < 1 || num_ues < 1) throw std::invalid_argument("network: need at least one AP and one UE");
    if (!(radius > 0.0)) throw std::invalid_argument("network.radius must be positive");
    fading.validate();
    radio.validate();
    compute.validate();
    if (!(ell > 0.0)) throw std::invalid_argument("objective.ell must be positive");
    if (n_draws < 1) throw std::invalid_argument("objective.n_draws must be >= 1");
    nbcd.validate();
    ppo.validate();
    if (schemes.empty()) throw std::invalid_argument("experiment.schemes is empty");
    if (sweep_axis != SweepAxis::none && sweep_values.empty())
        throw std::invalid_argument("experiment.sweep_values is empty for sweep axis " + to_string(sweep_axis));
    for (double v : sweep_values)
        if (!(v > 0.0)) throw std::invalid_argument("experiment.sweep_values must be positive");
    if (threads < 1) throw std::invalid_argument("experiment.threads must be >= 1");
    if (strategy_splits.size() != num_ues)
        throw std::invalid_argument("strategy.splits needs one value or one per UE");
    task.validate();
    if (conv_rounds < 1 || conv_seeds < 1 || conv_local_steps < 1)
        throw std::invalid_argument("convergence: rounds, seeds and local_steps must be >= 1");
    if (conv_cluster_sizes.empty()) throw std::invalid_argument("convergence.cluster_sizes is empty");
    for (std::size_t c : conv_cluster_sizes)
        if (c < 1 || c > task.num_aps)
            throw std::invalid_argument("convergence.cluster_sizes must lie in 1..convergence.num_aps");
}

SplitProfile ExperimentConfig::load_profile() const {
    return profile == "vgg16" ? vgg16_profile() : ucsfl::load_profile(profile);
}

StrategyAssignment ExperimentConfig::fixed_strategy(std::size_t num_points) const {
    StrategyAssignment s;
    s.splits = strategy_splits;
    if (strategy_association == "all") {
        s.assoc = AssociationMatrix::all_ones(num_aps, num_ues);
    } else {
        s.assoc = AssociationMatrix(num_aps, num_ues);
        std::stringstream ss(strategy_association);
        std::string row;
        std::size_t m = 0;
        while (std::getline(ss, row, ';')) {
            row = trim(row);
            if (m >= num_aps || row.size() != num_ues || row.find_first_not_of("01") != std::string::npos)
                throw std::invalid_argument("strategy.association: expected " + std::to_string(num_aps) +
                                            " rows of " + std::to_string(num_ues) + " 0/1 digits");
            for (std::size_t u = 0; u < num_ues; ++u) s.assoc.set(m, u, row[u] == '1');
            ++m;
        }
        if (m != num_aps) throw std::invalid_argument("strategy.association: wrong number of rows");
    }
    s.validate(num_points);
    return s;
}

ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, double value) {
    ExperimentConfig c = cfg;
    switch (cfg.sweep_axis) {
        case SweepAxis::none: break;
        case SweepAxis::f_ue: c.compute.f_ue = value; break;
        case SweepAxis::bandwidth: c.radio.bandwidth = value; break;
        case SweepAxis::ell: c.ell = value; break;
    }
    c.validate();
    return c;
}

Environment make_environment(const ExperimentConfig& cfg) {
    return make_environment(cfg.seed, cfg.num_aps, cfg.num_ues, cfg.radius, cfg.fading, cfg.radio, cfg.compute,
                            cfg.load_profile(), cfg.nbcd, cfg.ell, cfg.n_draws, cfg.placement, cfg.wrap_around);
}

void write_outputs(const std::string& dir, const OutputFiles& files) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
        for (const auto& [name, body] : files) {
            const fs::path final_path = fs::path(dir) / name;
            fs::path tmp = final_path;
            tmp += ".tmp";
            std::ofstream out(tmp, std::ios::binary);
            out << body;
            out.close();
            if (!out) throw std::runtime_error("failed to write " + tmp.string());
            staged.emplace_back(tmp, final_path);
        }
    } catch (...) {
        for (const auto& [tmp, _] : staged) fs::remove(tmp);
        throw;
    }
    for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

std::string scheme_csv_header() {
    return "sweep_axis,sweep_value,scheme,max_ratio,t_ue_s,t_ul_max_s,t_dpu_max_s,t_back_s,t_dl_max_s,t_total_max_s,"
           "min_split,avg_split,min_cluster,avg_cluster,unconverged_draws,strategy\n";
}

std::string scheme_csv_row(SweepAxis axis, const SchemeRow& row) {
    const LatencyBreakdown& lat = row.evaluation.mean_latency;
    const Splits& sp = row.strategy.splits;
    const std::size_t U = sp.size();
    std::size_t min_split = sp.front(), min_cluster = row.strategy.assoc.cluster_size(0);
    double sum_split = 0.0, sum_cluster = 0.0;
    for (std::size_t u = 0; u < U; ++u) {
        const std::size_t c = row.strategy.assoc.cluster_size(u);
        min_split = std::min(min_split, sp[u]);
        min_cluster = std::min(min_cluster, c);
        sum_split += static_cast<double>(sp[u]);
        sum_cluster += static_cast<double>(c);
    }
    std::string s = to_string(axis) + ',' + fmt_num(row.sweep_value) + ',' + to_string(row.scheme) + ',' +
                    fmt_num(row.evaluation.ratio.max_ratio) + ',' + fmt_num(lat.t_ue) + ',' + fmt_num(lat.t_ul_max) +
                    ',' + fmt_num(lat.t_dpu_max) + ',' + fmt_num(lat.t_back) + ',' + fmt_num(lat.t_dl.maxCoeff()) +
                    ',' + fmt_num(lat.t_total.maxCoeff()) + ',' + std::to_string(min_split) + ',' +
                    fmt_num(sum_split / static_cast<double>(U)) + ',' + std::to_string(min_cluster) + ',' +
                    fmt_num(sum_cluster / static_cast<double>(U)) + ',' +
                    std::to_string(row.evaluation.unconverged_draws) + ',' + row.strategy.key() + '\n';
    return s;
}

OutputFiles run_nbcd(const ExperimentConfig& cfg) {
    cfg.validate();
    const Environment env = make_environment(cfg);
    const StrategyAssignment strategy = cfg.fixed_strategy(env.profile.num_points());
    const ChannelRealization ch = draw_fading(env.large_scale, env.fading, derive_seed(env.seed, "channel.draw", 0));
    NbcdConfig nc = cfg.nbcd;
    nc.record_trace = true;
    const NbcdResult res = solve(ch, strategy.assoc, strategy.splits, env.profile, env.radio, nc);
    const LatencyBreakdown lat = total_latency(env.profile, strategy.splits, res.rates, env.compute);

    OutputFiles out;
    std::ostringstream trace;
    write_nbcd_trace_csv(trace, res.trace);
    out["nbcd_trace.csv"] = trace.str();
    std::ostringstream links;
    links << "ue,split,cluster_size,p_ul_w,sinr_ul,rate_ul_bps,sinr_dl,rate_dl_bps,t_ul_s,t_dl_s\n";
    for (std::size_t u = 0; u < env.num_ues(); ++u) {
        const auto i = static_cast<Eigen::Index>(u);
        links << u << ',' << strategy.splits[u] << ',' << strategy.assoc.cluster_size(u) << ',' << fmt_num(res.p[i])
              << ',' << fmt_num(res.rates.uplink_sinr[i]) << ',' << fmt_num(res.rates.uplink_rate[i]) << ','
              << fmt_num(res.rates.downlink_sinr[i]) << ',' << fmt_num(res.rates.downlink_rate[i]) << ','
              << fmt_num(lat.t_ul[i]) << ',' << fmt_num(lat.t_dl[i]) << '\n';
    }
    out["nbcd_links.csv"] = links.str();
    return out;
}

namespace {

std::vector<double> sweep_points(const ExperimentConfig& cfg) {
    return cfg.sweep_axis == SweepAxis::none ? std::vector<double>{0.0} : cfg.sweep_values;
}

bool wants(const ExperimentConfig& cfg, Scheme s) {
    return std::find(cfg.schemes.begin(), cfg.schemes.end(), s) != cfg.schemes.end();
}

// Evaluates the requested schemes at one sweep point; `searched` provides the
// strategy that BL1 and BL2 inherit.
std::vector<SchemeRow> scheme_rows(const ExperimentConfig& cfg, double value, StrategyEvaluator& ev,
                                   const StrategyAssignment& searched, Scheme searched_label) {
    const Environment& env = ev.environment();
    std::vector<SchemeRow> rows;
    for (Scheme s : cfg.schemes) {
        SchemeRow row;
        row.sweep_value = value;
        row.scheme = s;
        switch (s) {
            case Scheme::ucsfl:
            case Scheme::fixed:
                if (s != searched_label) continue;
                row.strategy = searched;
                break;
            case Scheme::bl1:
                row.strategy = baseline(Baseline::bl1, env.num_aps(), env.num_ues(), env.profile.num_points(),
                                        searched.splits);
                break;
            case Scheme::bl2:
                row.strategy = baseline(Baseline::bl2, env.num_aps(), env.num_ues(), env.profile.num_points(),
                                        std::nullopt, searched.assoc);
                break;
            case Scheme::bl3:
                row.strategy = baseline(Baseline::bl3, env.num_aps(), env.num_ues(), env.profile.num_points());
                break;
        }
        row.evaluation = ev.evaluate(row.strategy);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

OutputFiles run_mais(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<double> points = sweep_points(cfg);
    std::vector<std::vector<SchemeRow>> rows(points.size());
    std::vector<std::vector<double>> traces(points.size());
    const bool search = wants(cfg, Scheme::ucsfl) || wants(cfg, Scheme::bl1) || wants(cfg, Scheme::bl2);
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
        const ExperimentConfig pc = at_sweep_point(cfg, points[i]);
        StrategyEvaluator ev(make_environment(pc));
        StrategyAssignment best;
        if (search) {
            MaisResult res = train(ev, pc.ppo, derive_seed(pc.seed, "ppo"));
            best = res.best;
            traces[i] = std::move(res.rewards);
        } else {
            best = baseline(Baseline::bl3, pc.num_aps, pc.num_ues, ev.environment().profile.num_points());
        }
        rows[i] = scheme_rows(pc, points[i], ev, best, Scheme::ucsfl);
    });

    OutputFiles out;
    std::string results = scheme_csv_header();
    for (const auto& point_rows : rows)
        for (const auto& r : point_rows) results += scheme_csv_row(cfg.sweep_axis, r);
    out["results.csv"] = results;
    if (search)
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::ostringstream os;
            write_reward_trace_csv(os, traces[i]);
            out["reward_trace_" + std::to_string(i) + ".csv"] = os.str();
        }
    return out;
}

OutputFiles run_latency_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (wants(cfg, Scheme::ucsfl))
        throw std::invalid_argument("run-latency-sweep evaluates fixed strategies; use FIXED instead of UCSFL");
    const std::vector<double> points = sweep_points(cfg);
    std::vector<std::vector<SchemeRow>> rows(points.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
        const ExperimentConfig pc = at_sweep_point(cfg, points[i]);
        StrategyEvaluator ev(make_environment(pc));
        const StrategyAssignment fixed = pc.fixed_strategy(ev.environment().profile.num_points());
        rows[i] = scheme_rows(pc, points[i], ev, fixed, Scheme::fixed);
    });
    std::string results = scheme_csv_header();
    for (const auto& point_rows : rows)
        for (const auto& r : point_rows) results += scheme_csv_row(cfg.sweep_axis, r);
    return {{"results.csv", results}};
}

OutputFiles run_convergence(const ExperimentConfig& cfg) {
    cfg.validate();
    const QuadraticTask task = make_quadratic_task(cfg.task, cfg.task_seed);
    const auto sweep = cluster_sweep(task, cfg.conv_cluster_sizes, cfg.conv_rounds, cfg.conv_seeds,
                                     derive_seed(cfg.task_seed, "sweep"), cfg.conv_local_steps);
    const MonotonicityReport rep = monotonicity_check(task, sweep);
    std::ostringstream trace;
    write_convergence_csv(trace, sweep);
    std::ostringstream summary;
    summary << "cluster_size,final_gap,final_bound,worst_gap_to_bound,spearman\n";
    for (std::size_t i = 0; i < sweep.size(); ++i)
        summary << sweep[i].cluster_size << ',' << fmt_num(rep.final_gap[i]) << ',' << fmt_num(rep.final_bound[i])
                << ',' << fmt_num(sweep[i].worst_ratio) << ',' << fmt_num(rep.spearman_rho) << '\n';
    return {{"convergence.csv", trace.str()}, {"convergence_summary.csv", summary.str()}};
}

}  // namespace ucsfl

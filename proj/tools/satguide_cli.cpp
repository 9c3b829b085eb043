#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "satguide/cdcl.hpp"
#include "satguide/config.hpp"
#include "satguide/generators.hpp"
#include "satguide/grpo.hpp"
#include "satguide/pool.hpp"
#include "satguide/supervised.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace satguide;

namespace {

constexpr const char* kVersion = "satguide 0.1.0";

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

uint64_t fnv1a(uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = (const unsigned char*)data;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t digest_files(const std::vector<std::string>& paths) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const std::string& path : paths) {
        std::string name = fs::path(path).filename().string();
        h = fnv1a(h, name.data(), name.size());
        std::ifstream in(path, std::ios::binary);
        std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        h = fnv1a(h, data.data(), data.size());
    }
    return h;
}

std::vector<std::string> list_cnf_files(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir);
    }
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cnf") {
            out.push_back(entry.path().string());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw std::runtime_error("no .cnf files in " + dir);
    return out;
}

std::vector<CnfFormula> load_formulas(const std::vector<std::string>& paths,
                                      int workers) {
    std::vector<CnfFormula> out(paths.size());
    parallel_for(paths.size(), workers, [&](std::size_t i) {
        std::ifstream in(paths[i]);
        if (!in) throw std::runtime_error("cannot open " + paths[i]);
        out[i] = parse_dimacs(in);
    });
    return out;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& config, uint64_t seed, uint64_t digest,
                    const std::string& started) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = seed;
    m["instance_digest"] = digest;
    m["version"] = kVersion;
    m["started"] = started;
    m["finished"] = iso_timestamp();
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    out << m.dump(2) << "\n";
}

SolveVerdict solve_verdict_of(const CnfFormula& f) {
    SolverConfig cfg;
    SolveReport rep = solve_cdcl_baseline(f, cfg);
    return rep.verdict;
}

int cmd_gen(const std::string& family_name_arg, int n, int count,
            uint64_t seed, const std::string& out_dir, bool balance,
            int workers) {
    std::string started = iso_timestamp();
    Family family = family_from_name(family_name_arg);
    fs::create_directories(out_dir);
    std::ofstream index(fs::path(out_dir) / "index.jsonl");
    if (!index) throw std::runtime_error("cannot write index in " + out_dir);

    std::vector<std::string> written;
    if (!balance) {
        std::vector<CnfFormula> fs_(count);
        std::vector<GenSpec> specs(count);
        parallel_for((std::size_t)count, workers, [&](std::size_t i) {
            specs[i] = GenSpec{family, n, seed + i};
            fs_[i] = generate(specs[i]);
        });
        for (int i = 0; i < count; ++i) {
            std::string name = instance_filename(specs[i]);
            std::string path = (fs::path(out_dir) / name).string();
            std::ofstream out(path);
            write_dimacs(fs_[i], out);
            written.push_back(path);
            json row;
            row["file"] = name;
            row["n"] = n;
            row["seed"] = specs[i].seed;
            index << row.dump() << "\n";
        }
    } else {
        if (count % 2 != 0) {
            throw std::runtime_error("--balance requires an even count");
        }
        int want_sat = count / 2, want_unsat = count / 2;
        uint64_t next_seed = seed;
        int chunk = std::max(4 * std::max(workers, 1), 8);
        while (want_sat > 0 || want_unsat > 0) {
            std::vector<GenSpec> specs(chunk);
            std::vector<CnfFormula> fs_(chunk);
            std::vector<SolveVerdict> verdicts(chunk);
            for (int i = 0; i < chunk; ++i) {
                specs[i] = GenSpec{family, n, next_seed + i};
            }
            parallel_for((std::size_t)chunk, workers, [&](std::size_t i) {
                fs_[i] = generate(specs[i]);
                verdicts[i] = solve_verdict_of(fs_[i]);
            });
            next_seed += chunk;
            for (int i = 0; i < chunk; ++i) {
                bool sat = verdicts[i] == SolveVerdict::Sat;
                int& quota = sat ? want_sat : want_unsat;
                if (quota == 0) continue;
                --quota;
                std::string name = instance_filename(specs[i]);
                std::string path = (fs::path(out_dir) / name).string();
                std::ofstream out(path);
                write_dimacs(fs_[i], out);
                written.push_back(path);
                json row;
                row["file"] = name;
                row["n"] = n;
                row["seed"] = specs[i].seed;
                row["verdict"] = sat ? "sat" : "unsat";
                index << row.dump() << "\n";
                if (want_sat == 0 && want_unsat == 0) break;
            }
        }
    }
    index.close();

    json cfg;
    cfg["family"] = family_name_arg;
    cfg["n"] = n;
    cfg["count"] = count;
    cfg["balance"] = balance;
    write_manifest(out_dir, "gen", cfg, seed, digest_files(written), started);
    std::cout << "wrote " << written.size() << " instances to " << out_dir
              << "\n";
    return 0;
}

int cmd_solve(const std::string& instance, const std::string& solver,
              const std::string& params_file, int64_t budget) {
    std::ifstream in(instance);
    if (!in) throw std::runtime_error("cannot open " + instance);
    CnfFormula f = parse_dimacs(in);

    SolverKind kind = solver_kind_from_name(solver);
    SolverConfig scfg;
    scfg.decision_budget = budget;
    LookaheadConfig lcfg;

    SolveReport rep;
    if (params_file.empty()) {
        rep = run_solver_baseline(kind, f, scfg, lcfg);
    } else {
        Parameterization p = read_params_file(params_file, f.num_vars());
        rep = run_solver(kind, f, p, scfg, lcfg);
    }
    std::cout << report_to_json(rep) << "\n";
    if (rep.verdict == SolveVerdict::Sat) return 10;
    if (rep.verdict == SolveVerdict::Unsat) return 20;
    return 0;
}

struct CkptFile {
    int iteration;
    std::string path;
};

std::optional<CkptFile> latest_checkpoint(const std::string& dir) {
    std::optional<CkptFile> best;
    if (!fs::is_directory(dir)) return best;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("ckpt_", 0) != 0 ||
            entry.path().extension() != ".bin" || name == "ckpt_best.bin") {
            continue;
        }
        int iter = std::atoi(name.c_str() + 5);
        if (!best || iter > best->iteration) {
            best = CkptFile{iter, entry.path().string()};
        }
    }
    return best;
}

std::string ckpt_path(const std::string& dir, int iteration) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "ckpt_%06d.bin", iteration);
    return (fs::path(dir) / buf).string();
}

void save_trainer_checkpoint(const TrainerState& st, const std::string& path) {
    Checkpoint c;
    c.cfg = st.params.cfg;
    c.theta = st.params.theta;
    c.opt = st.opt;
    c.iteration = st.iteration;
    save_checkpoint(c, path);
}

int cmd_train(const std::string& config_file) {
    std::string started = iso_timestamp();
    TrainConfig cfg = parse_train_config(config_file);
    if (cfg.train_dir.empty() || cfg.out_dir.empty()) {
        throw std::runtime_error("config must set train_dir and out_dir");
    }
    int workers = cfg.workers > 0 ? cfg.workers : default_worker_count();
    std::vector<std::string> train_paths = list_cnf_files(cfg.train_dir);
    std::vector<CnfFormula> corpus = load_formulas(train_paths, workers);
    std::vector<CnfFormula> val;
    if (!cfg.val_dir.empty()) {
        val = load_formulas(list_cnf_files(cfg.val_dir), workers);
    }
    fs::create_directories(cfg.out_dir);

    Trainer trainer(cfg, std::move(corpus));

    double best_val = std::numeric_limits<double>::infinity();
    std::string metrics_path =
        (fs::path(cfg.out_dir) / "metrics.jsonl").string();
    if (auto resume = latest_checkpoint(cfg.out_dir)) {
        Checkpoint c = load_checkpoint(resume->path);
        if (c.cfg.dim != cfg.dim || c.cfg.layers != cfg.layers) {
            throw std::runtime_error("checkpoint shape does not match config");
        }
        TrainerState st;
        st.params.cfg = c.cfg;
        st.params.theta = std::move(c.theta);
        st.opt = std::move(c.opt);
        st.iteration = (int)c.iteration;
        trainer.restore(std::move(st));
        std::cerr << "resuming from iteration " << resume->iteration << "\n";
        std::ifstream prev(metrics_path);
        std::string line;
        while (std::getline(prev, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            if (j.contains("val_cost") && !j["val_cost"].is_null()) {
                best_val = std::min(best_val, j["val_cost"].get<double>());
            }
        }
    } else {
        save_trainer_checkpoint(trainer.state(), ckpt_path(cfg.out_dir, 0));
    }

    std::ofstream metrics(metrics_path, std::ios::app);
    while (trainer.state().iteration < cfg.iterations) {
        IterationMetrics m = trainer.run_iteration();
        int k = m.iteration;
        bool do_val = !val.empty() && cfg.val_interval > 0 &&
                      (k % cfg.val_interval == 0 || k == cfg.iterations);
        if (do_val) {
            m.val_cost = trainer.validate(val);
            if (*m.val_cost < best_val) {
                best_val = *m.val_cost;
                save_trainer_checkpoint(
                    trainer.state(),
                    (fs::path(cfg.out_dir) / "ckpt_best.bin").string());
            }
        }
        json row;
        row["k"] = k;
        row["mean_cost"] = m.mean_cost;
        row["mean_abs_adv"] = m.mean_abs_advantage;
        row["clip_frac"] = m.clip_fraction;
        row["clip_frac_first"] = m.clip_fraction_first;
        row["kl"] = m.mean_kl;
        row["grad_norm"] = m.grad_norm;
        row["groups_skipped"] = m.groups_skipped;
        row["rollout_seconds"] = m.rollout_seconds;
        row["train_seconds"] = m.train_seconds;
        if (m.val_cost) {
            row["val_cost"] = *m.val_cost;
        } else {
            row["val_cost"] = nullptr;
        }
        metrics << row.dump() << "\n";
        metrics.flush();
        std::cerr << "iter " << k << " mean_cost " << m.mean_cost;
        if (m.val_cost) std::cerr << " val_cost " << *m.val_cost;
        std::cerr << "\n";
        if (cfg.checkpoint_interval > 0 && k % cfg.checkpoint_interval == 0) {
            save_trainer_checkpoint(trainer.state(), ckpt_path(cfg.out_dir, k));
        }
    }
    save_trainer_checkpoint(
        trainer.state(), ckpt_path(cfg.out_dir, trainer.state().iteration));

    json cfg_json = json::parse("{}");
    cfg_json["config_text"] = train_config_to_kv(cfg);
    write_manifest(cfg.out_dir, "train", cfg_json, cfg.seed,
                   digest_files(train_paths), started);
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& instance_dir,
             const std::string& solver, double sigma, int64_t budget,
             int workers, const std::string& out_dir) {
    std::string started = iso_timestamp();
    std::vector<std::string> paths = list_cnf_files(instance_dir);
    std::vector<CnfFormula> instances = load_formulas(paths, workers);
    std::vector<std::string> names;
    for (const std::string& p : paths) {
        names.push_back(fs::path(p).filename().string());
    }

    std::optional<NetParams> params;
    if (checkpoint != "baseline") {
        Checkpoint c = load_checkpoint(checkpoint);
        params.emplace();
        params->cfg = c.cfg;
        params->theta = std::move(c.theta);
    }

    SolverKind kind = solver_kind_from_name(solver);
    SolverConfig scfg;
    scfg.decision_budget = budget;
    LookaheadConfig lcfg;
    EvalSummary s =
        evaluate_instances(params ? &*params : nullptr, sigma, kind, instances,
                           names, scfg, lcfg, workers);

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "eval.csv");
    csv << "instance,verdict,decisions,solver_time,net_time\n";
    for (const EvalRow& row : s.rows) {
        csv << row.name << "," << verdict_name(row.verdict) << ","
            << row.decisions << "," << row.solver_seconds << ","
            << row.net_seconds << "\n";
    }

    json agg;
    agg["instances"] = s.rows.size();
    agg["mean_decisions"] = s.mean_decisions;
    agg["mean_solver_time"] = s.mean_solver_seconds;
    agg["mean_net_time"] = s.mean_net_seconds;
    agg["mean_total_time"] = s.mean_solver_seconds + s.mean_net_seconds;
    agg["sat"]["count"] = s.count_sat;
    agg["sat"]["mean_decisions"] = s.mean_decisions_sat;
    agg["unsat"]["count"] = s.count_unsat;
    agg["unsat"]["mean_decisions"] = s.mean_decisions_unsat;
    std::ofstream aggf(fs::path(out_dir) / "aggregate.json");
    aggf << agg.dump(2) << "\n";
    std::cout << agg.dump(2) << "\n";

    json cfg;
    cfg["checkpoint"] = checkpoint;
    cfg["solver"] = solver;
    cfg["sigma"] = sigma;
    cfg["budget"] = budget;
    write_manifest(out_dir, "eval", cfg, 0, digest_files(paths), started);
    return 0;
}

int cmd_analyze_weights(const std::string& ckpt_a, const std::string& ckpt_b,
                        const std::string& instance_dir, double sigma,
                        std::size_t sample_size, uint64_t seed,
                        const std::string& out_dir) {
    std::string started = iso_timestamp();
    std::vector<std::string> paths = list_cnf_files(instance_dir);
    int workers = default_worker_count();
    std::vector<CnfFormula> instances = load_formulas(paths, workers);

    auto load_params = [](const std::string& path) {
        Checkpoint c = load_checkpoint(path);
        NetParams p;
        p.cfg = c.cfg;
        p.theta = std::move(c.theta);
        return p;
    };
    NetParams pa = load_params(ckpt_a);
    NetParams pb = load_params(ckpt_b);

    WeightCorrelation wc =
        weight_correlation(pa, pb, sigma, instances, sample_size, seed);

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "scatter.csv");
    csv << "ew_a,ew_b\n";
    for (const auto& [a, b] : wc.samples) csv << a << "," << b << "\n";

    json result;
    result["pearson_r"] =
        wc.degenerate ? json(nullptr) : json(wc.pearson_r);
    result["degenerate"] = wc.degenerate;
    result["samples"] = wc.samples.size();
    std::ofstream rf(fs::path(out_dir) / "correlation.json");
    rf << result.dump(2) << "\n";
    std::cout << result.dump(2) << "\n";

    json cfg;
    cfg["ckpt_a"] = ckpt_a;
    cfg["ckpt_b"] = ckpt_b;
    cfg["sigma"] = sigma;
    cfg["sample_size"] = sample_size;
    write_manifest(out_dir, "analyze-weights", cfg, seed, digest_files(paths),
                   started);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guided SAT solving toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate instance corpora");
    std::string gen_family = "3sat";
    int gen_n = 50, gen_count = 10;
    uint64_t gen_seed = 0;
    std::string gen_out = "instances";
    bool gen_balance = false;
    int gen_workers = 0;
    gen->add_option("--family", gen_family, "3sat or 3col");
    gen->add_option("--n", gen_n, "instance size parameter")->required();
    gen->add_option("--count", gen_count, "number of instances")->required();
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_flag("--balance", gen_balance,
                  "solve and keep equal SAT/UNSAT counts");
    gen->add_option("--workers", gen_workers, "worker threads");

    auto* solve = app.add_subcommand("solve", "Solve one DIMACS instance");
    std::string solve_instance, solve_solver = "cdcl", solve_params;
    int64_t solve_budget = 0;
    solve->add_option("instance", solve_instance, "DIMACS CNF file")
        ->required();
    solve->add_option("--solver", solve_solver, "cdcl or lookahead");
    solve->add_option("--params", solve_params,
                      "per-variable weight/polarity file");
    solve->add_option("--budget", solve_budget, "decision budget, 0 = none");

    auto* train = app.add_subcommand("train", "Run the GRPO training loop");
    std::string train_config;
    train->add_option("--config", train_config, "flat key-value config file")
        ->required();

    auto* eval = app.add_subcommand("eval", "Batch-evaluate a checkpoint");
    std::string eval_ckpt, eval_dir, eval_solver = "cdcl", eval_out = "eval";
    double eval_sigma = 0.1;
    int64_t eval_budget = 0;
    int eval_workers = 0;
    eval->add_option("checkpoint", eval_ckpt,
                     "checkpoint path or 'baseline'")
        ->required();
    eval->add_option("instances", eval_dir, "instance directory")->required();
    eval->add_option("--solver", eval_solver, "cdcl or lookahead");
    eval->add_option("--sigma", eval_sigma, "policy sigma for the mode");
    eval->add_option("--budget", eval_budget, "decision budget, 0 = none");
    eval->add_option("--workers", eval_workers, "worker threads");
    eval->add_option("--out", eval_out, "output directory");

    auto* analyze =
        app.add_subcommand("analyze-weights", "Correlate two checkpoints");
    std::string an_a, an_b, an_dir, an_out = "analysis";
    double an_sigma = 0.1;
    std::size_t an_samples = 5000;
    uint64_t an_seed = 0;
    analyze->add_option("ckpt_a", an_a, "first checkpoint")->required();
    analyze->add_option("ckpt_b", an_b, "second checkpoint")->required();
    analyze->add_option("instances", an_dir, "instance directory")->required();
    analyze->add_option("--sigma", an_sigma, "policy sigma");
    analyze->add_option("--sample-size", an_samples,
                        "variables to sample (0 = all)");
    analyze->add_option("--seed", an_seed, "sampling seed");
    analyze->add_option("--out", an_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            int workers =
                gen_workers > 0 ? gen_workers : default_worker_count();
            return cmd_gen(gen_family, gen_n, gen_count, gen_seed, gen_out,
                           gen_balance, workers);
        }
        if (solve->parsed()) {
            return cmd_solve(solve_instance, solve_solver, solve_params,
                             solve_budget);
        }
        if (train->parsed()) return cmd_train(train_config);
        if (eval->parsed()) {
            int workers =
                eval_workers > 0 ? eval_workers : default_worker_count();
            return cmd_eval(eval_ckpt, eval_dir, eval_solver, eval_sigma,
                            eval_budget, workers, eval_out);
        }
        if (analyze->parsed()) {
            return cmd_analyze_weights(an_a, an_b, an_dir, an_sigma,
                                       an_samples, an_seed, an_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

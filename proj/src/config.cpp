#include "satguide/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace satguide {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key");
        }
        if (kv.count(key)) {
            throw std::runtime_error("duplicate config key " + key);
        }
        kv[key] = value;
    }
    return kv;
}

TrainConfig parse_train_config(const std::string& path) {
    auto kv = parse_kv_file(path);
    TrainConfig cfg;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto as_int = [](const std::string& v, const char* key) {
        try {
            return std::stoi(v);
        } catch (const std::exception&) {
            throw std::runtime_error(std::string("bad integer for ") + key);
        }
    };
    auto as_double = [](const std::string& v, const char* key) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw std::runtime_error(std::string("bad number for ") + key);
        }
    };
    auto as_bool = [](const std::string& v, const char* key) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw std::runtime_error(std::string("bad boolean for ") + key);
    };

    if (auto v = take("iterations"); !v.empty()) cfg.iterations = as_int(v, "iterations");
    if (auto v = take("formulas_per_iter"); !v.empty()) cfg.formulas_per_iter = as_int(v, "formulas_per_iter");
    if (auto v = take("samples_per_formula"); !v.empty()) cfg.samples_per_formula = as_int(v, "samples_per_formula");
    if (auto v = take("steps_per_iter"); !v.empty()) cfg.steps_per_iter = as_int(v, "steps_per_iter");
    if (auto v = take("batch_size"); !v.empty()) cfg.batch_size = as_int(v, "batch_size");
    if (auto v = take("clip_epsilon"); !v.empty()) cfg.clip_epsilon = as_double(v, "clip_epsilon");
    if (auto v = take("kl_weight"); !v.empty()) cfg.kl_weight = as_double(v, "kl_weight");
    if (auto v = take("kl_direction"); !v.empty()) cfg.kl_direction = v;
    if (auto v = take("learning_rate"); !v.empty()) cfg.learning_rate = as_double(v, "learning_rate");
    if (auto v = take("warmup_iters"); !v.empty()) cfg.warmup_iters = as_int(v, "warmup_iters");
    if (auto v = take("max_grad_norm"); !v.empty()) cfg.max_grad_norm = as_double(v, "max_grad_norm");
    if (auto v = take("sigma_w"); !v.empty()) cfg.sigma_w = as_double(v, "sigma_w");
    if (auto v = take("solver"); !v.empty()) cfg.solver = v;
    if (auto v = take("decision_budget"); !v.empty()) cfg.decision_budget = std::stoll(v);
    if (auto v = take("seed"); !v.empty()) cfg.seed = std::stoull(v);
    if (auto v = take("dim"); !v.empty()) cfg.dim = as_int(v, "dim");
    if (auto v = take("layers"); !v.empty()) cfg.layers = as_int(v, "layers");
    if (auto v = take("val_interval"); !v.empty()) cfg.val_interval = as_int(v, "val_interval");
    if (auto v = take("checkpoint_interval"); !v.empty()) cfg.checkpoint_interval = as_int(v, "checkpoint_interval");
    if (auto v = take("plain_sgd"); !v.empty()) cfg.plain_sgd = as_bool(v, "plain_sgd");
    if (auto v = take("workers"); !v.empty()) cfg.workers = as_int(v, "workers");
    if (auto v = take("train_dir"); !v.empty()) cfg.train_dir = v;
    if (auto v = take("val_dir"); !v.empty()) cfg.val_dir = v;
    if (auto v = take("out_dir"); !v.empty()) cfg.out_dir = v;

    if (!kv.empty()) {
        throw std::runtime_error("unknown config key " + kv.begin()->first);
    }
    cfg.validate();
    return cfg;
}

std::string train_config_to_kv(const TrainConfig& cfg) {
    std::ostringstream out;
    out << "iterations = " << cfg.iterations << "\n"
        << "formulas_per_iter = " << cfg.formulas_per_iter << "\n"
        << "samples_per_formula = " << cfg.samples_per_formula << "\n"
        << "steps_per_iter = " << cfg.steps_per_iter << "\n"
        << "batch_size = " << cfg.batch_size << "\n"
        << "clip_epsilon = " << cfg.clip_epsilon << "\n"
        << "kl_weight = " << cfg.kl_weight << "\n"
        << "kl_direction = " << cfg.kl_direction << "\n"
        << "learning_rate = " << cfg.learning_rate << "\n"
        << "warmup_iters = " << cfg.warmup_iters << "\n"
        << "max_grad_norm = " << cfg.max_grad_norm << "\n"
        << "sigma_w = " << cfg.sigma_w << "\n"
        << "solver = " << cfg.solver << "\n"
        << "decision_budget = " << cfg.decision_budget << "\n"
        << "seed = " << cfg.seed << "\n"
        << "dim = " << cfg.dim << "\n"
        << "layers = " << cfg.layers << "\n"
        << "val_interval = " << cfg.val_interval << "\n"
        << "checkpoint_interval = " << cfg.checkpoint_interval << "\n"
        << "plain_sgd = " << (cfg.plain_sgd ? "true" : "false") << "\n"
        << "workers = " << cfg.workers << "\n";
    if (!cfg.train_dir.empty()) out << "train_dir = " << cfg.train_dir << "\n";
    if (!cfg.val_dir.empty()) out << "val_dir = " << cfg.val_dir << "\n";
    if (!cfg.out_dir.empty()) out << "out_dir = " << cfg.out_dir << "\n";
    return out.str();
}

} // namespace satguide

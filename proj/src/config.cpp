#include "evopref/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace evopref {

std::vector<LayerShape> ExperimentConfig::genome_shape() const {
    std::vector<LayerShape> shape(layers, LayerShape{layer_dim, layer_dim, rank});
    return shape;
}

int ExperimentConfig::genome_dim() const {
    int total = 0;
    for (const auto& s : genome_shape())
        total += s.param_count();
    return total;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> algos = {
        "evopref", "moead", "smsemoa", "cmaes", "random", "gradient"};
    if (std::find(algos.begin(), algos.end(), algorithm) == algos.end())
        throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    if (mu < 2)
        throw std::invalid_argument("mu must be at least 2");
    if (generations < 0)
        throw std::invalid_argument("generations must be nonnegative");
    if (grid < 1)
        throw std::invalid_argument("grid must be positive");
    if (tournament_size < 1)
        throw std::invalid_argument("tournament size must be positive");
    if (!(sigma0 > 0.0))
        throw std::invalid_argument("sigma0 must be positive");
    if (!(init_sigma > 0.0))
        throw std::invalid_argument("init_sigma must be positive");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
        throw std::invalid_argument("crossover_prob must lie in [0,1]");
    if (layers < 1 || layer_dim < 1 || rank < 1 ||
        rank > std::min(layer_dim, layer_dim))
        throw std::invalid_argument("invalid genome shape");
    if (landscape.genome_dim != genome_dim())
        throw std::invalid_argument(
            "landscape genome_dim " + std::to_string(landscape.genome_dim) +
            " does not match genome shape dimension " +
            std::to_string(genome_dim()));
    if (seeds.empty())
        throw std::invalid_argument("need at least one seed");
    if (static_cast<int>(scalar_weights.size()) != landscape.objectives)
        throw std::invalid_argument("scalar_weights length must equal objectives");
    if (gradient_restarts < 1)
        throw std::invalid_argument("gradient_restarts must be positive");
    if (effective_budget() < mu)
        throw std::invalid_argument("budget must cover at least one batch");
    if (threads < 1)
        throw std::invalid_argument("threads must be positive");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int to_int(const std::string& v) {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("not an integer: '" + v + "'");
    return x;
}

std::int64_t to_i64(const std::string& v) {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("not an integer: '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& v) {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("not an integer: '" + v + "'");
    return x;
}

double to_double(const std::string& v) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("not a number: '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "off")
        return false;
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

// "1-30" or "1,2,5" or a single value.
std::vector<int> parse_seed_list(const std::string& v) {
    std::vector<int> seeds;
    const auto dash = v.find('-');
    if (dash != std::string::npos && dash > 0) {
        const int lo = to_int(trim(v.substr(0, dash)));
        const int hi = to_int(trim(v.substr(dash + 1)));
        if (hi < lo)
            throw std::invalid_argument("empty seed range '" + v + "'");
        for (int s = lo; s <= hi; ++s)
            seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        seeds.push_back(to_int(trim(item)));
    if (seeds.empty())
        throw std::invalid_argument("empty seed list");
    return seeds;
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(trim(item)));
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeySpec {
    Setter set;
    Getter get;
};

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table = {
        {"algorithm",
         {[](ExperimentConfig& c, const std::string& v) { c.algorithm = v; },
          [](const ExperimentConfig& c) { return c.algorithm; }}},
        {"label",
         {[](ExperimentConfig& c, const std::string& v) { c.label = v; },
          [](const ExperimentConfig& c) { return c.label; }}},
        {"mu",
         {[](ExperimentConfig& c, const std::string& v) { c.mu = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.mu); }}},
        {"generations",
         {[](ExperimentConfig& c, const std::string& v) { c.generations = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.generations); }}},
        {"grid",
         {[](ExperimentConfig& c, const std::string& v) { c.grid = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.grid); }}},
        {"tournament_size",
         {[](ExperimentConfig& c, const std::string& v) { c.tournament_size = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.tournament_size); }}},
        {"sigma0",
         {[](ExperimentConfig& c, const std::string& v) { c.sigma0 = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.sigma0); }}},
        {"sigma_min",
         {[](ExperimentConfig& c, const std::string& v) { c.sigma_min = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.sigma_min); }}},
        {"sigma_max",
         {[](ExperimentConfig& c, const std::string& v) { c.sigma_max = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.sigma_max); }}},
        {"adapt_window",
         {[](ExperimentConfig& c, const std::string& v) { c.adapt_window = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.adapt_window); }}},
        {"crossover_prob",
         {[](ExperimentConfig& c, const std::string& v) { c.crossover_prob = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.crossover_prob); }}},
        {"init_sigma",
         {[](ExperimentConfig& c, const std::string& v) { c.init_sigma = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.init_sigma); }}},
        {"genome.layers",
         {[](ExperimentConfig& c, const std::string& v) { c.layers = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.layers); }}},
        {"genome.dim",
         {[](ExperimentConfig& c, const std::string& v) { c.layer_dim = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.layer_dim); }}},
        {"genome.rank",
         {[](ExperimentConfig& c, const std::string& v) { c.rank = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.rank); }}},
        {"genome.alpha",
         {[](ExperimentConfig& c, const std::string& v) { c.alpha = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.alpha); }}},
        {"landscape.modes",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.modes = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.landscape.modes); }}},
        {"landscape.feature_dim",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.feature_dim = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.landscape.feature_dim); }}},
        {"landscape.objectives",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.objectives = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.landscape.objectives); }}},
        {"landscape.width",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.width = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.width); }}},
        {"landscape.noise_scale",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.noise_scale = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.noise_scale); }}},
        {"landscape.floor",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.floor_value = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.floor_value); }}},
        {"landscape.capture_factor",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.capture_factor = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.capture_factor); }}},
        {"landscape.center_box",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.center_box = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.center_box); }}},
        {"landscape.feature_gain",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.feature_gain = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.feature_gain); }}},
        {"landscape.score_base",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.score_base = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.score_base); }}},
        {"landscape.score_amp_min",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.score_amp_min = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.score_amp_min); }}},
        {"landscape.score_amp_max",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.score_amp_max = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.score_amp_max); }}},
        {"landscape.lse_temperature",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.lse_temperature = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.landscape.lse_temperature); }}},
        {"landscape.seed",
         {[](ExperimentConfig& c, const std::string& v) { c.landscape.seed = to_u64(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.landscape.seed); }}},
        {"seeds",
         {[](ExperimentConfig& c, const std::string& v) { c.seeds = parse_seed_list(v); },
          [](const ExperimentConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.seeds.size(); ++i) {
                  out += std::to_string(c.seeds[i]);
                  if (i + 1 < c.seeds.size())
                      out += ",";
              }
              return out;
          }}},
        {"budget",
         {[](ExperimentConfig& c, const std::string& v) { c.budget = to_i64(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.budget); }}},
        {"output_dir",
         {[](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
          [](const ExperimentConfig& c) { return c.output_dir; }}},
        {"snapshot_every",
         {[](ExperimentConfig& c, const std::string& v) { c.snapshot_every = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.snapshot_every); }}},
        {"threads",
         {[](ExperimentConfig& c, const std::string& v) { c.threads = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.threads); }}},
        {"ablation.no_archive",
         {[](ExperimentConfig& c, const std::string& v) { c.no_archive = to_bool(v); },
          [](const ExperimentConfig& c) { return c.no_archive ? "true" : "false"; }}},
        {"ablation.no_crossover",
         {[](ExperimentConfig& c, const std::string& v) { c.no_crossover = to_bool(v); },
          [](const ExperimentConfig& c) { return c.no_crossover ? "true" : "false"; }}},
        {"ablation.no_crowding",
         {[](ExperimentConfig& c, const std::string& v) { c.no_crowding = to_bool(v); },
          [](const ExperimentConfig& c) { return c.no_crowding ? "true" : "false"; }}},
        {"ablation.generational",
         {[](ExperimentConfig& c, const std::string& v) { c.generational = to_bool(v); },
          [](const ExperimentConfig& c) { return c.generational ? "true" : "false"; }}},
        {"weights",
         {[](ExperimentConfig& c, const std::string& v) { c.scalar_weights = parse_double_list(v); },
          [](const ExperimentConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.scalar_weights.size(); ++i) {
                  out += format_double(c.scalar_weights[i]);
                  if (i + 1 < c.scalar_weights.size())
                      out += ",";
              }
              return out;
          }}},
        {"gradient.restarts",
         {[](ExperimentConfig& c, const std::string& v) { c.gradient_restarts = to_int(v); },
          [](const ExperimentConfig& c) { return std::to_string(c.gradient_restarts); }}},
        {"gradient.learning_rate",
         {[](ExperimentConfig& c, const std::string& v) { c.learning_rate = to_double(v); },
          [](const ExperimentConfig& c) { return format_double(c.learning_rate); }}},
        {"gradient.cosine_decay",
         {[](ExperimentConfig& c, const std::string& v) { c.cosine_decay = to_bool(v); },
          [](const ExperimentConfig& c) { return c.cosine_decay ? "true" : "false"; }}},
    };
    return table;
}

}  // namespace

std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, spec] : key_table())
        keys.push_back(key);
    return keys;
}

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end())
        throw std::invalid_argument("unknown config key '" + key + "'");
    it->second.set(config, value);
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key = value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_entry(config, key, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": " + e.what());
        }
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string ExperimentConfig::canonical_text() const {
    std::string out;
    for (const auto& [key, spec] : key_table()) {
        out += key;
        out += " = ";
        out += spec.get(*this);
        out += "\n";
    }
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    // FNV-1a over the canonical dump.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_text()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace evopref

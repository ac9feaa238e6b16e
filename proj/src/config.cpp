#include "pgkit/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "pgkit/errors.hpp"

namespace pgkit {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

// Raw key/value pairs with consumption tracking, so anything left over at the
// end can be reported as unknown or inapplicable.
class KeyValues {
public:
    explicit KeyValues(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected key = value, got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (value.empty())
                throw ConfigError("key '" + key + "': empty value");
            if (!entries_.emplace(key, value).second)
                throw ConfigError("duplicate key '" + key + "'");
        }
    }

    const std::string* find(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        consumed_.insert(key);
        return &it->second;
    }

    std::string require(const std::string& key) {
        const std::string* v = find(key);
        if (!v) throw ConfigError("missing required key '" + key + "'");
        return *v;
    }

    std::vector<std::string> leftovers() const {
        std::vector<std::string> keys;
        for (const auto& [key, value] : entries_)
            if (!consumed_.count(key)) keys.push_back(key);
        return keys;
    }

private:
    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
};

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value[0] == '-')
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

std::size_t parse_positive(const std::string& key, const std::string& value) {
    const std::uint64_t v = parse_u64(key, value);
    if (v == 0) throw ConfigError("key '" + key + "': must be positive");
    return static_cast<std::size_t>(v);
}

double parse_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        throw ConfigError("key '" + key + "': expected a finite number, got '" + value + "'");
    return v;
}

SamplerKind parse_sampler(const std::string& value) {
    if (value == "smc") return SamplerKind::smc;
    if (value == "pg") return SamplerKind::pg;
    if (value == "pgas") return SamplerKind::pgas;
    if (value == "ipmcmc") return SamplerKind::ipmcmc;
    if (value == "blocked_pg") return SamplerKind::blocked_pg;
    if (value == "collapsed_pg") return SamplerKind::collapsed_pg;
    throw ConfigError("key 'sampler': unknown sampler '" + value +
                      "' (expected smc, pg, pgas, ipmcmc, blocked_pg or collapsed_pg)");
}

ThetaSpec parse_theta_mode(const std::string& value) {
    if (value == "infer") return ThetaSpec::inferred();
    if (value.rfind("fixed(", 0) == 0 && value.back() == ')') {
        const std::string inner = value.substr(6, value.size() - 7);
        const auto comma = inner.find(',');
        if (comma != std::string::npos) {
            const std::string qs = trim(inner.substr(0, comma));
            const std::string rs = trim(inner.substr(comma + 1));
            if (!qs.empty() && !rs.empty() && rs.find(',') == std::string::npos)
                return ThetaSpec::fixed_at(parse_double("theta_mode", qs),
                                           parse_double("theta_mode", rs));
        }
    }
    throw ConfigError("key 'theta_mode': expected infer or fixed(Q, R), got '" + value + "'");
}

// Fills every field except sampler/N/M, which the bench path supplies per cell.
void read_shared_fields(KeyValues& kv, RunConfig& cfg) {
    if (const std::string* v = kv.find("model")) {
        if (*v == "benchmark")
            cfg.model = ModelKind::benchmark;
        else if (*v == "linear_gaussian")
            cfg.model = ModelKind::linear_gaussian;
        else
            throw ConfigError("key 'model': expected benchmark or linear_gaussian, got '" + *v +
                              "'");
    }
    if (const std::string* v = kv.find("T")) cfg.T = parse_positive("T", *v);
    cfg.seed = parse_u64("seed", kv.require("seed"));
    if (const std::string* v = kv.find("theta_mode")) cfg.theta = parse_theta_mode(*v);
    if (const std::string* v = kv.find("prior_alpha_q"))
        cfg.prior.alpha_q = parse_double("prior_alpha_q", *v);
    if (const std::string* v = kv.find("prior_beta_q"))
        cfg.prior.beta_q = parse_double("prior_beta_q", *v);
    if (const std::string* v = kv.find("prior_alpha_r"))
        cfg.prior.alpha_r = parse_double("prior_alpha_r", *v);
    if (const std::string* v = kv.find("prior_beta_r"))
        cfg.prior.beta_r = parse_double("prior_beta_r", *v);
    if (const std::string* v = kv.find("state_thin"))
        cfg.state_thin = static_cast<std::size_t>(parse_u64("state_thin", *v));
    if (const std::string* v = kv.find("resampling")) {
        if (*v == "multinomial")
            cfg.resampling = Resampling::multinomial;
        else if (*v == "systematic")
            cfg.resampling = Resampling::systematic;
        else
            throw ConfigError("key 'resampling': expected multinomial or systematic, got '" + *v +
                              "'");
    }
    if (cfg.model == ModelKind::linear_gaussian) {
        cfg.model_a = parse_double("model_a", kv.require("model_a"));
        cfg.model_c = parse_double("model_c", kv.require("model_c"));
        cfg.model_m0 = parse_double("model_m0", kv.require("model_m0"));
        cfg.model_p0 = parse_double("model_p0", kv.require("model_p0"));
    }
}

// Consumes sampler-specific keys; `active` says which samplers this file uses.
void read_sampler_fields(KeyValues& kv, RunConfig& cfg, bool has_ipmcmc, bool has_blocked) {
    if (has_ipmcmc) {
        cfg.node_count = parse_positive("R", kv.require("R"));
        cfg.conditional_count = parse_positive("P", kv.require("P"));
    }
    if (has_blocked) {
        cfg.block_len = parse_positive("block_len", kv.require("block_len"));
        cfg.overlap = static_cast<std::size_t>(parse_u64("overlap", kv.require("overlap")));
    }
}

void reject_leftovers(const KeyValues& kv) {
    static const std::map<std::string, std::string> scoped = {
        {"R", "sampler = ipmcmc"},
        {"P", "sampler = ipmcmc"},
        {"block_len", "sampler = blocked_pg"},
        {"overlap", "sampler = blocked_pg"},
        {"model_a", "model = linear_gaussian"},
        {"model_c", "model = linear_gaussian"},
        {"model_m0", "model = linear_gaussian"},
        {"model_p0", "model = linear_gaussian"},
    };
    const auto keys = kv.leftovers();
    if (keys.empty()) return;
    const std::string& key = keys.front();
    const auto it = scoped.find(key);
    if (it != scoped.end())
        throw ConfigError("key '" + key + "' only applies to " + it->second);
    throw ConfigError("unknown key '" + key + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const std::string item =
            trim(comma == std::string::npos ? value.substr(start)
                                            : value.substr(start, comma - start));
        if (item.empty()) throw ConfigError("key '" + key + "': empty list entry");
        items.push_back(parse(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j)
            if (items[i] == items[j])
                throw ConfigError("key '" + key + "': duplicate entry");
    return items;
}

}  // namespace

const char* to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::smc: return "smc";
        case SamplerKind::pg: return "pg";
        case SamplerKind::pgas: return "pgas";
        case SamplerKind::ipmcmc: return "ipmcmc";
        case SamplerKind::blocked_pg: return "blocked_pg";
        case SamplerKind::collapsed_pg: return "collapsed_pg";
    }
    return "?";
}

const char* to_string(ModelKind kind) {
    return kind == ModelKind::benchmark ? "benchmark" : "linear_gaussian";
}

void RunConfig::validate() const {
    if (N == 0) throw ConfigError("key 'N': must be positive");
    if (M == 0) throw ConfigError("key 'M': must be positive");
    if (T == 0) throw ConfigError("key 'T': must be positive");
    if (sampler != SamplerKind::smc && N < 2)
        throw ConfigError("sampler = " + std::string(to_string(sampler)) +
                          " needs N >= 2 (one slot is the reference path)");
    if (theta.mode == ThetaSpec::Mode::fixed) {
        if (!(theta.fixed_q > 0.0) || !(theta.fixed_r > 0.0))
            throw ConfigError("theta_mode: fixed Q and R must be positive");
        if (sampler == SamplerKind::collapsed_pg)
            throw ConfigError("sampler = collapsed_pg requires theta_mode = infer");
    } else {
        if (sampler == SamplerKind::smc)
            throw ConfigError("sampler = smc requires theta_mode = fixed(Q, R)");
        if (!(prior.alpha_q > 0.0) || !(prior.beta_q > 0.0) || !(prior.alpha_r > 0.0) ||
            !(prior.beta_r > 0.0))
            throw ConfigError("prior hyperparameters must be positive");
    }
    if (sampler == SamplerKind::ipmcmc) {
        if (conditional_count > node_count)
            throw ConfigError("key 'P': conditional nodes cannot exceed R");
    }
    if (sampler == SamplerKind::blocked_pg) {
        if (block_len < 2) throw ConfigError("key 'block_len': must be at least 2");
        if (block_len > T) throw ConfigError("key 'block_len': cannot exceed T");
        if (2 * overlap >= block_len)
            throw ConfigError("key 'overlap': must satisfy 2 * overlap < block_len");
    }
    if (model == ModelKind::linear_gaussian && model_p0 < 0.0)
        throw ConfigError("key 'model_p0': must be nonnegative");
}

RunConfig parse_run_config(const std::string& text) {
    KeyValues kv(text);
    RunConfig cfg;
    cfg.sampler = parse_sampler(kv.require("sampler"));
    cfg.N = parse_positive("N", kv.require("N"));
    cfg.M = parse_positive("M", kv.require("M"));
    read_shared_fields(kv, cfg);
    read_sampler_fields(kv, cfg, cfg.sampler == SamplerKind::ipmcmc,
                        cfg.sampler == SamplerKind::blocked_pg);
    reject_leftovers(kv);
    cfg.validate();
    return cfg;
}

BenchConfig parse_bench_config(const std::string& text) {
    KeyValues kv(text);
    BenchConfig bench;
    bench.samplers = parse_list<SamplerKind>("samplers", kv.require("samplers"), parse_sampler);
    bench.m_values = parse_list<std::size_t>("M_values", kv.require("M_values"),
                                             [](const std::string& s) {
                                                 return parse_positive("M_values", s);
                                             });
    bench.n_values = parse_list<std::size_t>("N_values", kv.require("N_values"),
                                             [](const std::string& s) {
                                                 return parse_positive("N_values", s);
                                             });
    bool has_ipmcmc = false, has_blocked = false;
    for (SamplerKind s : bench.samplers) {
        has_ipmcmc = has_ipmcmc || s == SamplerKind::ipmcmc;
        has_blocked = has_blocked || s == SamplerKind::blocked_pg;
    }
    read_shared_fields(kv, bench.base);
    read_sampler_fields(kv, bench.base, has_ipmcmc, has_blocked);
    reject_leftovers(kv);
    return bench;
}

std::optional<std::uint64_t> env_seed_override() {
    const char* env = std::getenv("PGKIT_SEED");
    if (!env || *env == '\0') return std::nullopt;
    return parse_u64("PGKIT_SEED", env);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg = parse_run_config(read_file(path));
    if (const auto seed = env_seed_override()) cfg.seed = *seed;
    return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
    BenchConfig bench = parse_bench_config(read_file(path));
    if (const auto seed = env_seed_override()) bench.base.seed = *seed;
    return bench;
}

}  // namespace pgkit

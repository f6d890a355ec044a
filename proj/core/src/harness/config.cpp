#include "lens/harness/config.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "lens/error.hpp"
#include "lens/io.hpp"

namespace lens::harness {

namespace {

constexpr MetricKind kAllMetrics[] = {
    MetricKind::topk,     MetricKind::lens_prec, MetricKind::lens_recall,   MetricKind::topk_div,
    MetricKind::lens_prec_div, MetricKind::lens_recall_div, MetricKind::spearman, MetricKind::kendall,
    MetricKind::lens_spearman, MetricKind::lens_kendall,
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        if (t.empty()) throw ConfigError("empty item in list '" + value + "'");
        out.push_back(t);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

std::size_t to_size(const std::string& v, const std::string& key) {
    try {
        const long long n = parse_int(v);
        if (n < 0) throw ConfigError(key + " must be non-negative");
        return static_cast<std::size_t>(n);
    } catch (const ParseError&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

double to_real(const std::string& v, const std::string& key) {
    try {
        return parse_double(v);
    } catch (const ParseError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, F convert) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(convert(item));
    return out;
}

template <typename F>
auto rethrow_as_config(const std::string& key, F f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

// Fields of an AttackConfig that may be set globally (`attack_<field>`) or
// per variant (`<variant>.<field>`).
bool apply_attack_field(AttackConfig& a, const std::string& field, const std::string& value, const std::string& key) {
    if (field == "steps") a.steps = to_size(value, key);
    else if (field == "step_size") a.step_size = to_real(value, key);
    else if (field == "t") a.t = to_size(value, key);
    else if (field == "k_eval") a.k_eval = to_size(value, key);
    else if (field == "w_eval") a.w_eval = to_size(value, key);
    else if (field == "restarts") a.restarts = to_size(value, key);
    else if (field == "hvp_r") a.hvp_r = to_real(value, key);
    else return false;
    return true;
}

}  // namespace

std::string to_string(MetricKind metric) {
    switch (metric) {
        case MetricKind::topk: return "topk";
        case MetricKind::lens_prec: return "lens-prec";
        case MetricKind::lens_recall: return "lens-recall";
        case MetricKind::topk_div: return "topk-div";
        case MetricKind::lens_prec_div: return "lens-prec-div";
        case MetricKind::lens_recall_div: return "lens-recall-div";
        case MetricKind::spearman: return "spearman";
        case MetricKind::kendall: return "kendall";
        case MetricKind::lens_spearman: return "lens-spearman";
        case MetricKind::lens_kendall: return "lens-kendall";
    }
    return "unknown";
}

MetricKind parse_metric(const std::string& name) {
    for (auto m : kAllMetrics) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown metric '" + name + "'");
}

bool is_rank_correlation(MetricKind m) {
    return m == MetricKind::spearman || m == MetricKind::kendall || m == MetricKind::lens_spearman ||
           m == MetricKind::lens_kendall;
}

std::string to_string(Regime regime) { return regime == Regime::natural ? "natural" : "pgd"; }

Regime parse_regime(const std::string& name) {
    if (name == "natural") return Regime::natural;
    if (name == "pgd") return Regime::pgd;
    throw ConfigError("unknown training regime '" + name + "'");
}

std::filesystem::path ExperimentConfig::model_path(Regime regime) const {
    const auto& p = regime == Regime::natural ? model_natural : model_pgd;
    if (!p.empty()) return p;
    return out / "models" / (to_string(regime) + ".toynet");
}

double ExperimentConfig::fixed_epsilon() const {
    if (sweep_epsilon) return *sweep_epsilon;
    return *std::max_element(epsilons.begin(), epsilons.end());
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const Overrides& overrides) {
    ExperimentConfig cfg;
    cfg.out = base_dir / "out";
    std::vector<std::string> attack_names{"random_sign", "top_k"};
    AttackConfig attack_defaults;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> per_attack;
    std::set<std::string> seen;
    bool have_metrics = false, have_k = false, have_w = false, have_eps = false;
    bool have_train_dataset = false;

    auto path_of = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_absolute() ? p : (base_dir / p).lexically_normal();
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");

        if (key == "dataset") cfg.dataset = path_of(value);
        else if (key == "train_dataset") { cfg.train_dataset = path_of(value); have_train_dataset = true; }
        else if (key == "model_natural") cfg.model_natural = path_of(value);
        else if (key == "model_pgd") cfg.model_pgd = path_of(value);
        else if (key == "out") cfg.out = path_of(value);
        else if (key == "regimes") cfg.regimes = to_list<Regime>(value, parse_regime);
        else if (key == "hidden") cfg.hidden = to_list<std::size_t>(value, [&](const std::string& s) { return to_size(s, key); });
        else if (key == "activation") cfg.activation.kind = rethrow_as_config(key, [&] { return parse_activation(value); });
        else if (key == "softplus_beta") cfg.activation.beta = to_real(value, key);
        else if (key == "train_epochs") cfg.train.epochs = to_size(value, key);
        else if (key == "train_batch_size") cfg.train.batch_size = to_size(value, key);
        else if (key == "train_learning_rate") cfg.train.learning_rate = to_real(value, key);
        else if (key == "pgd_epsilon") cfg.pgd.epsilon = to_real(value, key);
        else if (key == "pgd_steps") cfg.pgd.pgd_steps = to_size(value, key);
        else if (key == "pgd_step_size") cfg.pgd.pgd_step_size = to_real(value, key);
        else if (key == "attacks") attack_names = split_list(value);
        else if (key == "attribution") cfg.attribution = rethrow_as_config(key, [&] { return AttributionMethod::parse(value); });
        else if (key == "ranking") {
            if (value == "raw") cfg.ranking = Ranking::raw;
            else if (value == "absolute") cfg.ranking = Ranking::absolute;
            else throw ConfigError("ranking must be raw or absolute");
        }
        else if (key == "metrics") { cfg.metrics = to_list<MetricKind>(value, parse_metric); have_metrics = true; }
        else if (key == "k_values") { cfg.k_values = to_list<std::size_t>(value, [&](const std::string& s) { return to_size(s, key); }); have_k = true; }
        else if (key == "w_values") { cfg.w_values = to_list<std::size_t>(value, [&](const std::string& s) { return to_size(s, key); }); have_w = true; }
        else if (key == "epsilons") { cfg.epsilons = to_list<double>(value, [&](const std::string& s) { return to_real(s, key); }); have_eps = true; }
        else if (key == "w_div") {
            if (value != "same") cfg.w_div = to_size(value, key);
        }
        else if (key == "samples") cfg.sample_count = to_size(value, key);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_size(value, key));
        else if (key == "sweep_k") cfg.sweep_k = to_size(value, key);
        else if (key == "sweep_w") cfg.sweep_w = to_size(value, key);
        else if (key == "sweep_epsilon") cfg.sweep_epsilon = to_real(value, key);
        else if (key.starts_with("attack_")) {
            if (!apply_attack_field(attack_defaults, key.substr(7), value, key)) throw ConfigError("unknown key '" + key + "'");
        } else if (const auto dot = key.find('.'); dot != std::string::npos) {
            const auto variant = key.substr(0, dot);
            rethrow_as_config(key, [&] { return parse_attack_variant(variant); });
            per_attack[variant].emplace_back(key.substr(dot + 1), value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out) cfg.out = *overrides.out;
    if (overrides.samples) cfg.sample_count = *overrides.samples;

    if (cfg.dataset.empty()) throw ConfigError("missing required key 'dataset'");
    if (!have_train_dataset) cfg.train_dataset = cfg.dataset;
    if (!have_metrics) cfg.metrics = {MetricKind::topk, MetricKind::lens_recall, MetricKind::lens_prec};
    if (!have_k) cfg.k_values = {10};
    if (!have_w) cfg.w_values = {0, 1};
    if (!have_eps) cfg.epsilons = {0.3};
    if (cfg.regimes.empty()) throw ConfigError("regimes must not be empty");
    if (cfg.sample_count == 0) throw ConfigError("samples must be positive");
    for (double e : cfg.epsilons) {
        if (!(e >= 0.0)) throw ConfigError("epsilons must be non-negative");
    }
    for (std::size_t k : cfg.k_values) {
        if (k == 0) throw ConfigError("k_values must be positive");
    }
    cfg.activation = cfg.activation.kind == ActivationKind::relu ? Activation::relu()
                                                                 : Activation::softplus(cfg.activation.beta);
    if (cfg.activation.kind == ActivationKind::softplus && !(cfg.activation.beta > 0.0)) {
        throw ConfigError("softplus_beta must be positive");
    }
    rethrow_as_config("train", [&] {
        TrainConfig t = cfg.train;
        t.adversarial = cfg.pgd;
        t.validate();
        return 0;
    });

    std::set<std::string> unique;
    for (const auto& name : attack_names) {
        if (!unique.insert(name).second) throw ConfigError("attack '" + name + "' listed twice");
        AttackConfig a = attack_defaults;
        a.variant = rethrow_as_config("attacks", [&] { return parse_attack_variant(name); });
        a.attribution = cfg.attribution;
        a.ranking = cfg.ranking;
        if (!seen.contains("attack_k_eval")) a.k_eval = cfg.k_values.front();
        if (auto it = per_attack.find(name); it != per_attack.end()) {
            for (const auto& [field, value] : it->second) {
                if (!apply_attack_field(a, field, value, name + "." + field)) {
                    throw ConfigError("unknown key '" + name + "." + field + "'");
                }
            }
        }
        cfg.attacks.push_back(a);
    }
    for (const auto& [variant, _] : per_attack) {
        if (!unique.contains(variant)) throw ConfigError("settings given for attack '" + variant + "' which is not listed");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.parent_path(), overrides);
}

}  // namespace lens::harness

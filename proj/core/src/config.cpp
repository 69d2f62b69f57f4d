#include "neaiaas/config.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "neaiaas/toml.hpp"

namespace neaiaas {

namespace {

// The shipped default ASP. Also the fallback when a config omits [asp].
AiServiceProfile default_asp() {
    AiServiceProfile p;
    p.ttfb_bound = 100.0;
    p.p95_bound = 180.0;
    p.p99_bound = 200.0;
    p.completion_prob_min = 0.9;
    p.hard_timeout = 500.0;
    p.rate_min = 5.0;
    p.modality = Modality::Text;
    p.quality_tier = 2;
    p.privacy_scope = PrivacyScope::Regional;
    p.mobility_class = MobilityClass::Mobile;
    p.cost_envelope = 10.0;
    p.fallback_ladder = {1};
    return p;
}

TimerConfig default_timers() {
    TimerConfig t;
    t.tau_disc = 10.0;
    t.tau_page = 20.0;
    t.tau_prep = 40.0;
    t.tau_com = 60.0;
    t.tau_mig = 80.0;
    t.lease_duration = 2000.0;
    return t;
}

SweepConfig default_sweep() {
    SweepConfig s;
    // Spelled out so the values bit-match their decimal spellings in config
    // files; 0.05 * i lands one ulp off for several grid points.
    s.rho_grid = {0.05, 0.1,  0.15, 0.2,  0.25, 0.3,  0.35, 0.4,  0.45, 0.5,
                  0.55, 0.6,  0.65, 0.7,  0.75, 0.8,  0.85, 0.9,  0.95};
    s.samples_per_point = 100000;
    s.admission_cap = 0.8;
    s.speed_grid = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    s.mobility_samples_per_point = 100000;
    s.session_window_s = 10.0;
    s.handover_rate_per_m = 0.01;
    s.teardown_interrupt_prob = 0.3;
    s.mbb_fail_prob = 0.01;
    s.mbb_loss_mode = MbbLossMode::TransferDestructive;
    s.seed = 1;
    return s;
}

std::vector<CatalogEntry> default_catalog_entries() {
    auto mk = [](std::string model, std::string ver, std::string site, SiteClass cls,
                 int tier, SovereigntyZone zone, double cost,
                 std::set<std::string> deps = {}, std::set<std::string> tags = {}) {
        CatalogEntry e;
        e.model_id = std::move(model);
        e.model_version = std::move(ver);
        e.site_id = std::move(site);
        e.site_class = cls;
        e.quality_tier = tier;
        e.sovereignty_zone = zone;
        e.base_cost = cost;
        e.hardware_deps = std::move(deps);
        e.site_tags = std::move(tags);
        return e;
    };
    std::vector<CatalogEntry> v;
    v.push_back(mk("svc-std", "1.2.0", "edge-a", SiteClass::Edge, 2,
                   SovereigntyZone::Domestic, 6.0, {}, {"npu"}));
    v.push_back(mk("svc-std", "1.2.0", "edge-b", SiteClass::Edge, 2,
                   SovereigntyZone::Domestic, 6.5, {}, {"npu"}));
    v.push_back(mk("svc-std", "1.2.0", "regional-a", SiteClass::Regional, 2,
                   SovereigntyZone::Domestic, 4.0, {}, {"gpu-a"}));
    v.push_back(mk("svc-std", "1.2.0", "regional-b", SiteClass::Regional, 2,
                   SovereigntyZone::Partner, 3.5, {}, {"gpu-a"}));
    v.push_back(mk("svc-std", "1.2.0", "central-a", SiteClass::Central, 2,
                   SovereigntyZone::Global, 2.0, {}, {"gpu-a", "gpu-h"}));
    v.push_back(mk("svc-lite", "1.0.0", "edge-a", SiteClass::Edge, 1,
                   SovereigntyZone::Domestic, 3.0, {}, {"npu"}));
    v.push_back(mk("svc-lite", "1.0.0", "regional-a", SiteClass::Regional, 1,
                   SovereigntyZone::Domestic, 2.0, {}, {"gpu-a"}));
    v.push_back(mk("svc-pro", "2.0.0", "central-a", SiteClass::Central, 3,
                   SovereigntyZone::Global, 8.0, {"gpu-h"}, {"gpu-a", "gpu-h"}));
    return v;
}

Catalog default_catalog() {
    auto r = Catalog::from_entries(default_catalog_entries());
    if (!r.ok()) throw ProtocolError("built-in catalog failed validation");
    return std::move(r).take();
}

// ---- schema walking -------------------------------------------------------

struct Reader {
    const TomlTable& t;
    std::optional<ConfigError> err;

    bool fail(const std::string& path, const std::string& msg) {
        if (!err) err = ConfigError{path, msg, std::nullopt};
        return false;
    }

    bool number(const char* sec, const char* key, double& out) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_number(sec, key);
        if (!v) return fail(path, "expected a number");
        out = *v;
        return true;
    }

    bool integer(const char* sec, const char* key, int& out) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_number(sec, key);
        if (!v) return fail(path, "expected a number");
        if (std::floor(*v) != *v || *v < -2147483648.0 || *v > 2147483647.0) {
            return fail(path, "expected an integer");
        }
        out = static_cast<int>(*v);
        return true;
    }

    bool u64(const char* sec, const char* key, std::uint64_t& out) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_number(sec, key);
        if (!v) return fail(path, "expected a number");
        // doubles carry 53 bits exactly; larger seeds would alias.
        if (std::floor(*v) != *v || *v < 0 || *v > 9007199254740992.0) {
            return fail(path, "expected a nonnegative integer below 2^53");
        }
        out = static_cast<std::uint64_t>(*v);
        return true;
    }

    bool text(const char* sec, const char* key, std::string& out) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_string(sec, key);
        if (!v) return fail(path, "expected a string");
        out = *v;
        return true;
    }

    bool numbers(const char* sec, const char* key, std::vector<double>& out) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_array(sec, key);
        if (!v) return fail(path, "expected an array of numbers");
        out = *v;
        return true;
    }

    bool integers(const char* sec, const char* key, std::vector<int>& out) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_array(sec, key);
        if (!v) return fail(path, "expected an array of integers");
        std::vector<int> ints;
        for (double d : *v) {
            if (std::floor(d) != d) return fail(path, "expected integer elements");
            ints.push_back(static_cast<int>(d));
        }
        out = std::move(ints);
        return true;
    }

    template <typename Enum, typename Fn>
    bool named(const char* sec, const char* key, Enum& out, Fn from_name,
               const char* what) {
        std::string path = std::string(sec) + "." + key;
        if (!t.has(sec, key)) return true;
        auto v = t.get_string(sec, key);
        if (!v) return fail(path, "expected a string");
        auto e = from_name(*v);
        if (!e) return fail(path, std::string("unknown ") + what + " '" + *v + "'");
        out = *e;
        return true;
    }
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> k = {
        "asp.ttfb_bound_ms", "asp.p95_bound_ms", "asp.p99_bound_ms",
        "asp.completion_prob_min", "asp.hard_timeout_ms", "asp.rate_min",
        "asp.modality", "asp.quality_tier", "asp.privacy_scope",
        "asp.mobility_class", "asp.cost_envelope", "asp.fallback_ladder",
        "timers.tau_disc_ms", "timers.tau_page_ms", "timers.tau_prep_ms",
        "timers.tau_com_ms", "timers.tau_mig_ms", "timers.lease_duration_ms",
        "latency_model.service_mean_ms", "latency_model.infer_median_ms",
        "latency_model.infer_sigma", "latency_model.net_be_median_ms",
        "latency_model.net_be_sigma", "latency_model.net_qos_base_ms",
        "latency_model.net_qos_jitter_ms", "latency_model.site_offset_edge_ms",
        "latency_model.site_offset_regional_ms",
        "latency_model.site_offset_central_ms", "latency_model.ttfb_fraction",
        "latency_model.rate_nominal",
        "load_sweep.rho_grid", "load_sweep.samples_per_point",
        "load_sweep.admission_cap",
        "mobility.speed_grid", "mobility.samples_per_point",
        "mobility.session_window_s", "mobility.handover_rate_per_m",
        "mobility.teardown_interrupt_prob", "mobility.mbb_fail_prob",
        "mobility.loss_mode",
        "migration_policy.delta", "migration_policy.delta_prime",
        "risk.w1", "risk.w2", "risk.w3", "risk.lambda",
        "hazard.ref_speed_mps", "hazard.kappa_edge", "hazard.kappa_regional",
        "hazard.kappa_central",
        "context.default_load", "context.mobility_speed_mps",
        "context.backhaul_rtt_edge_ms", "context.backhaul_rtt_regional_ms",
        "context.backhaul_rtt_central_ms",
        "trace.serve_samples", "trace.serve_load", "trace.post_serve_load",
        "trace.site_capacity", "trace.qos_budget",
        "experiment.seed", "experiment.output_dir", "experiment.catalog",
    };
    return k;
}

ConfigError from_failure(const std::string& section, const Failure& f) {
    return ConfigError{section, f.detail, f.cause};
}

std::optional<ConfigError> check_domain(const ExperimentConfig& c) {
    auto bad = [](const std::string& path, const std::string& msg) {
        return ConfigError{path, msg, FailureCause::PolicyDenial};
    };
    const auto& ctx = c.ctx;
    if (!(ctx.default_load >= 0 && ctx.default_load < 1)) {
        return bad("context.default_load", "must lie in [0, 1)");
    }
    if (!(ctx.mobility_speed >= 0) || !std::isfinite(ctx.mobility_speed)) {
        return bad("context.mobility_speed_mps", "must be finite and >= 0");
    }
    for (auto [v, name] : {std::pair{ctx.backhaul_rtt_edge, "edge"},
                           {ctx.backhaul_rtt_regional, "regional"},
                           {ctx.backhaul_rtt_central, "central"}}) {
        if (v && (!std::isfinite(*v) || *v < 0)) {
            return bad(std::string("context.backhaul_rtt_") + name + "_ms",
                       "must be finite and >= 0");
        }
    }
    const auto& h = c.hazard;
    if (!(h.ref_speed > 0) || !std::isfinite(h.ref_speed)) {
        return bad("hazard.ref_speed_mps", "must be finite and > 0");
    }
    if (!(h.kappa_central >= 0) || !(h.kappa_regional >= h.kappa_central) ||
        !(h.kappa_edge >= h.kappa_regional) || !std::isfinite(h.kappa_edge)) {
        return bad("hazard.kappa_edge", "need kappa_edge >= kappa_regional >= kappa_central >= 0");
    }
    if (!(c.lambda >= 0) || !std::isfinite(c.lambda)) {
        return bad("risk.lambda", "must be finite and >= 0");
    }
    if (c.trace_serve_samples < 1) {
        return bad("trace.serve_samples", "must be >= 1");
    }
    if (!(c.trace_serve_load >= 0 && c.trace_serve_load < 1)) {
        return bad("trace.serve_load", "must lie in [0, 1)");
    }
    if (!(c.trace_post_serve_load >= 0 && c.trace_post_serve_load < 1)) {
        return bad("trace.post_serve_load", "must lie in [0, 1)");
    }
    if (c.trace_site_capacity < 1) return bad("trace.site_capacity", "must be >= 1");
    if (c.trace_qos_budget < 1) return bad("trace.qos_budget", "must be >= 1");
    if (c.output_dir.empty()) return bad("experiment.output_dir", "must not be empty");
    return std::nullopt;
}

}  // namespace

std::string ConfigError::to_string() const {
    std::string s = "config error";
    if (!field_path.empty()) s += " at " + field_path;
    s += ": " + message;
    if (cause) s += std::string(" [") + std::string(failure_cause_name(*cause)) + "]";
    return s;
}

ValidatedProfile ExperimentConfig::make_default_validated_profile() {
    auto r = validate_asp(default_asp());
    if (!r.ok()) throw ProtocolError("built-in default profile failed validation");
    return std::move(r).take();
}

RunnerEnv ExperimentConfig::runner_env() const {
    RunnerEnv env;
    env.asp = &asp;
    env.timers = &timers;
    env.catalog = &catalog;
    env.model = &model;
    env.ctx = &ctx;
    env.weights = &weights;
    env.hazard = &hazard;
    env.policy = &policy;
    env.lambda = lambda;
    env.serve_samples = trace_serve_samples;
    env.serve_load = trace_serve_load;
    env.post_serve_load = trace_post_serve_load;
    env.site_capacity = trace_site_capacity;
    env.qos_budget = trace_qos_budget;
    return env;
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.timers = default_timers();
    c.model = LatencyModel{};
    c.sweep = default_sweep();
    c.policy = MigrationPolicy{};
    c.policy.tau_mig = c.timers.tau_mig;
    c.weights = RiskWeights{};
    c.hazard = HandoverHazard{};
    c.ctx.default_load = 0.2;
    c.ctx.mobility_speed = 12.0;
    c.lambda = 0.05;
    c.catalog = default_catalog();
    c.catalog_path.clear();
    c.seed = 1;
    c.sweep.seed = c.seed;
    c.output_dir = "out";
    return c;
}

ConfigResult parse_config(const std::filesystem::path& toml_path) {
    auto parsed = TomlTable::parse_string("");
    {
        auto file = TomlTable::parse_file(toml_path.string());
        if (const auto* e = std::get_if<TomlError>(&file)) {
            return ConfigError{"", toml_path.string() + ": line " +
                                       std::to_string(e->line) + ": " + e->message,
                               std::nullopt};
        }
        parsed = std::move(file);
    }
    const TomlTable& t = std::get<TomlTable>(parsed);

    for (const auto& path : t.paths()) {
        if (!known_keys().count(path)) {
            return ConfigError{path, "unknown key", std::nullopt};
        }
    }

    ExperimentConfig cfg = default_config();
    Reader r{t, std::nullopt};

    // [asp]
    AiServiceProfile asp = cfg.asp.profile();
    r.number("asp", "ttfb_bound_ms", asp.ttfb_bound);
    r.number("asp", "p95_bound_ms", asp.p95_bound);
    r.number("asp", "p99_bound_ms", asp.p99_bound);
    r.number("asp", "completion_prob_min", asp.completion_prob_min);
    r.number("asp", "hard_timeout_ms", asp.hard_timeout);
    r.number("asp", "rate_min", asp.rate_min);
    r.integer("asp", "quality_tier", asp.quality_tier);
    r.number("asp", "cost_envelope", asp.cost_envelope);
    r.named("asp", "modality", asp.modality, modality_from_name, "modality");
    r.named("asp", "privacy_scope", asp.privacy_scope, privacy_scope_from_name,
            "privacy scope");
    r.named("asp", "mobility_class", asp.mobility_class, mobility_class_from_name,
            "mobility class");
    r.integers("asp", "fallback_ladder", asp.fallback_ladder);

    // [timers]
    r.number("timers", "tau_disc_ms", cfg.timers.tau_disc);
    r.number("timers", "tau_page_ms", cfg.timers.tau_page);
    r.number("timers", "tau_prep_ms", cfg.timers.tau_prep);
    r.number("timers", "tau_com_ms", cfg.timers.tau_com);
    r.number("timers", "tau_mig_ms", cfg.timers.tau_mig);
    r.number("timers", "lease_duration_ms", cfg.timers.lease_duration);

    // [latency_model]
    r.number("latency_model", "service_mean_ms", cfg.model.service_mean);
    r.number("latency_model", "infer_median_ms", cfg.model.infer_median);
    r.number("latency_model", "infer_sigma", cfg.model.infer_sigma);
    r.number("latency_model", "net_be_median_ms", cfg.model.net_be_median);
    r.number("latency_model", "net_be_sigma", cfg.model.net_be_sigma);
    r.number("latency_model", "net_qos_base_ms", cfg.model.net_qos_base);
    r.number("latency_model", "net_qos_jitter_ms", cfg.model.net_qos_jitter);
    r.number("latency_model", "site_offset_edge_ms", cfg.model.site_offset_edge);
    r.number("latency_model", "site_offset_regional_ms", cfg.model.site_offset_regional);
    r.number("latency_model", "site_offset_central_ms", cfg.model.site_offset_central);
    r.number("latency_model", "ttfb_fraction", cfg.model.ttfb_fraction);
    r.number("latency_model", "rate_nominal", cfg.model.rate_nominal);

    // [load_sweep] / [mobility]
    r.numbers("load_sweep", "rho_grid", cfg.sweep.rho_grid);
    r.integer("load_sweep", "samples_per_point", cfg.sweep.samples_per_point);
    r.number("load_sweep", "admission_cap", cfg.sweep.admission_cap);
    r.numbers("mobility", "speed_grid", cfg.sweep.speed_grid);
    r.integer("mobility", "samples_per_point", cfg.sweep.mobility_samples_per_point);
    r.number("mobility", "session_window_s", cfg.sweep.session_window_s);
    r.number("mobility", "handover_rate_per_m", cfg.sweep.handover_rate_per_m);
    r.number("mobility", "teardown_interrupt_prob", cfg.sweep.teardown_interrupt_prob);
    r.number("mobility", "mbb_fail_prob", cfg.sweep.mbb_fail_prob);
    r.named("mobility", "loss_mode", cfg.sweep.mbb_loss_mode, mbb_loss_mode_from_name,
            "loss mode");

    // [migration_policy]; the budget itself rides on timers.tau_mig_ms.
    r.number("migration_policy", "delta", cfg.policy.delta);
    r.number("migration_policy", "delta_prime", cfg.policy.delta_prime);

    // [risk] / [hazard] / [context]
    r.number("risk", "w1", cfg.weights.w1);
    r.number("risk", "w2", cfg.weights.w2);
    r.number("risk", "w3", cfg.weights.w3);
    r.number("risk", "lambda", cfg.lambda);
    r.number("hazard", "ref_speed_mps", cfg.hazard.ref_speed);
    r.number("hazard", "kappa_edge", cfg.hazard.kappa_edge);
    r.number("hazard", "kappa_regional", cfg.hazard.kappa_regional);
    r.number("hazard", "kappa_central", cfg.hazard.kappa_central);
    r.number("context", "default_load", cfg.ctx.default_load);
    r.number("context", "mobility_speed_mps", cfg.ctx.mobility_speed);
    for (auto [key, slot] : {std::pair{"backhaul_rtt_edge_ms", &cfg.ctx.backhaul_rtt_edge},
                             {"backhaul_rtt_regional_ms", &cfg.ctx.backhaul_rtt_regional},
                             {"backhaul_rtt_central_ms", &cfg.ctx.backhaul_rtt_central}}) {
        double v = 0;
        if (t.has("context", key)) {
            if (r.number("context", key, v)) *slot = v;
        }
    }

    // [trace] / [experiment]
    r.integer("trace", "serve_samples", cfg.trace_serve_samples);
    r.number("trace", "serve_load", cfg.trace_serve_load);
    r.number("trace", "post_serve_load", cfg.trace_post_serve_load);
    r.integer("trace", "site_capacity", cfg.trace_site_capacity);
    r.integer("trace", "qos_budget", cfg.trace_qos_budget);
    r.u64("experiment", "seed", cfg.seed);
    std::string out_dir = cfg.output_dir.string();
    std::string catalog_rel;
    r.text("experiment", "output_dir", out_dir);
    r.text("experiment", "catalog", catalog_rel);

    if (r.err) return *r.err;

    cfg.output_dir = out_dir;
    cfg.sweep.seed = cfg.seed;

    auto asp_result = validate_asp(asp);
    if (!asp_result.ok()) return from_failure("asp", asp_result.failure());
    cfg.asp = std::move(asp_result).take();

    cfg.policy.tau_mig = cfg.timers.tau_mig;

    if (auto s = validate_timers(cfg.timers, cfg.asp); !s.ok()) {
        return from_failure("timers", s.failure());
    }
    if (auto s = validate_model(cfg.model); !s.ok()) {
        return from_failure("latency_model", s.failure());
    }
    if (auto s = validate_sweep(cfg.sweep); !s.ok()) {
        return from_failure("load_sweep/mobility", s.failure());
    }
    if (auto s = validate_policy(cfg.policy); !s.ok()) {
        return from_failure("migration_policy", s.failure());
    }
    if (auto s = validate_weights(cfg.weights); !s.ok()) {
        return from_failure("risk", s.failure());
    }
    if (auto e = check_domain(cfg)) return *e;

    if (!catalog_rel.empty()) {
        std::filesystem::path p = catalog_rel;
        if (p.is_relative()) p = toml_path.parent_path() / p;
        auto loaded = Catalog::load(p);
        if (!loaded.ok()) return from_failure("experiment.catalog", loaded.failure());
        cfg.catalog = std::move(loaded).take();
        cfg.catalog_path = p;
    }
    if (cfg.catalog.entries().empty()) {
        return ConfigError{"experiment.catalog", "catalog has no entries",
                           FailureCause::ModelUnavailable};
    }
    return cfg;
}

}  // namespace neaiaas

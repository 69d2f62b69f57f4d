#include "neaiaas/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

namespace neaiaas {

std::string_view site_class_name(SiteClass c) {
    switch (c) {
        case SiteClass::Edge: return "edge";
        case SiteClass::Regional: return "regional";
        case SiteClass::Central: return "central";
    }
    throw ProtocolError("unknown SiteClass value");
}

std::optional<SiteClass> site_class_from_name(std::string_view s) {
    if (s == "edge") return SiteClass::Edge;
    if (s == "regional") return SiteClass::Regional;
    if (s == "central") return SiteClass::Central;
    return std::nullopt;
}

namespace {

using nlohmann::json;

Result<Catalog> catalog_fail(const std::string& detail) {
    return Result<Catalog>::fail(FailureCause::PolicyDenial, detail);
}

Result<CatalogEntry> entry_from_json(const json& j, std::size_t index) {
    auto bad = [&](const std::string& why) {
        return Result<CatalogEntry>::fail(
            FailureCause::PolicyDenial,
            "catalog entry " + std::to_string(index) + ": " + why);
    };
    if (!j.is_object()) return bad("not an object");

    CatalogEntry e;
    try {
        e.model_id = j.at("model_id").get<std::string>();
        e.model_version = j.at("model_version").get<std::string>();
        e.site_id = j.at("site_id").get<std::string>();
        std::string cls = j.at("site_class").get<std::string>();
        auto sc = site_class_from_name(cls);
        if (!sc) return bad("unknown site_class '" + cls + "'");
        e.site_class = *sc;
        e.quality_tier = j.at("quality_tier").get<int>();
        for (const auto& t : j.at("hardware_deps")) {
            e.hardware_deps.insert(t.get<std::string>());
        }
        for (const auto& t : j.value("site_tags", json::array())) {
            e.site_tags.insert(t.get<std::string>());
        }
        std::string zone = j.at("sovereignty_zone").get<std::string>();
        auto z = sovereignty_zone_from_name(zone);
        if (!z) return bad("unknown sovereignty_zone '" + zone + "'");
        e.sovereignty_zone = *z;
        e.base_cost = j.at("base_cost").get<double>();
    } catch (const json::exception& ex) {
        return bad(ex.what());
    }
    if (e.model_id.empty() || e.site_id.empty()) return bad("empty model_id or site_id");
    if (e.quality_tier < 0) return bad("quality_tier must be >= 0");
    if (e.base_cost < 0) return bad("base_cost must be >= 0");
    return e;
}

}  // namespace

Result<Catalog> Catalog::load(const std::filesystem::path& json_file) {
    std::ifstream in(json_file);
    if (!in) return catalog_fail("catalog file not readable: " + json_file.string());
    json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        return catalog_fail("catalog file is not valid JSON: " + json_file.string());
    }
    if (!doc.is_array()) return catalog_fail("catalog root must be a JSON array of entries");

    std::vector<CatalogEntry> entries;
    entries.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        auto e = entry_from_json(doc[i], i);
        if (!e.ok()) return Failure(e.failure());
        entries.push_back(std::move(e).take());
    }
    return from_entries(std::move(entries));
}

Result<Catalog> Catalog::from_entries(std::vector<CatalogEntry> entries) {
    std::set<std::tuple<std::string, std::string, std::string>> keys;
    for (const CatalogEntry& e : entries) {
        if (!keys.insert({e.model_id, e.model_version, e.site_id}).second) {
            return catalog_fail("duplicate catalog key (" + e.model_id + ", " + e.model_version +
                                ", " + e.site_id + ")");
        }
    }
    Catalog c;
    c.entries_ = std::move(entries);
    return c;
}

bool Catalog::has_model(const std::string& model_id) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const CatalogEntry& e) { return e.model_id == model_id; });
}

namespace {

// The four hard constraints, with the quality tier taken as a parameter so
// the fallback ladder can substitute degraded tiers.
bool admissible_at_tier(const CatalogEntry& entry, const AiServiceProfile& p, int tier) {
    if (!zone_allowed(p.privacy_scope, entry.sovereignty_zone)) return false;
    if (entry.quality_tier < tier) return false;
    if (!std::includes(entry.site_tags.begin(), entry.site_tags.end(),
                       entry.hardware_deps.begin(), entry.hardware_deps.end())) {
        return false;
    }
    if (entry.base_cost > p.cost_envelope) return false;
    return true;
}

// True when sovereignty is the single constraint keeping the entry out.
bool excluded_solely_by_sovereignty(const CatalogEntry& entry, const AiServiceProfile& p,
                                    int tier) {
    if (zone_allowed(p.privacy_scope, entry.sovereignty_zone)) return false;
    if (entry.quality_tier < tier) return false;
    if (!std::includes(entry.site_tags.begin(), entry.site_tags.end(),
                       entry.hardware_deps.begin(), entry.hardware_deps.end())) {
        return false;
    }
    if (entry.base_cost > p.cost_envelope) return false;
    return true;
}

bool candidate_order(const CandidateBinding& a, const CandidateBinding& b) {
    if (a.slack != b.slack) return a.slack > b.slack;
    if (a.est_cost != b.est_cost) return a.est_cost < b.est_cost;
    if (a.entry.model_id != b.entry.model_id) return a.entry.model_id < b.entry.model_id;
    if (a.entry.site_id != b.entry.site_id) return a.entry.site_id < b.entry.site_id;
    return a.entry.model_version < b.entry.model_version;
}

}  // namespace

bool admissibility_filter(const CatalogEntry& entry, const ValidatedProfile& asp) {
    return admissible_at_tier(entry, asp.profile(), asp->quality_tier);
}

double slack_score(const Estimates& est, const ValidatedProfile& asp, double lambda) {
    if (lambda < 0) throw ProtocolError("slack_score lambda must be >= 0");
    double margin = std::min(asp->p99_bound - est.est_p99, asp->ttfb_bound - est.est_ttfb);
    return margin - lambda * est.est_cost;
}

Result<std::vector<CandidateBinding>> discover(const ValidatedProfile& asp,
                                               const Catalog& catalog,
                                               const EstimateSource& predictor,
                                               const DiscoverOptions& opts) {
    using R = Result<std::vector<CandidateBinding>>;

    // An explicitly requested model that the catalog does not carry at all
    // is its own failure class, checked before any filtering.
    if (opts.requested_model && !catalog.has_model(*opts.requested_model)) {
        return R::fail(FailureCause::ModelUnavailable,
                       "model '" + *opts.requested_model + "' not in catalog");
    }

    std::vector<const CatalogEntry*> scope;
    for (const CatalogEntry& e : catalog.entries()) {
        if (opts.requested_model && e.model_id != *opts.requested_model) continue;
        scope.push_back(&e);
    }

    // Primary tier first, then each ladder step once.
    std::vector<int> tiers{asp->quality_tier};
    tiers.insert(tiers.end(), asp->fallback_ladder.begin(), asp->fallback_ladder.end());

    int last_tier = tiers.back();
    for (int tier : tiers) {
        std::vector<CandidateBinding> out;
        for (const CatalogEntry* e : scope) {
            if (!admissible_at_tier(*e, asp.profile(), tier)) continue;
            CandidateBinding c;
            c.entry = *e;
            Estimates est = predictor.estimate(*e);
            if (!(est.est_ttfb > 0) || !(est.est_p99 > 0) || est.est_cost < 0) {
                throw ProtocolError("predictor produced out-of-domain estimates");
            }
            c.est_ttfb = est.est_ttfb;
            c.est_p99 = est.est_p99;
            c.est_cost = est.est_cost;
            c.slack = slack_score(est, asp, opts.lambda);
            out.push_back(std::move(c));
        }
        if (!out.empty()) {
            std::sort(out.begin(), out.end(), candidate_order);
            return out;
        }
    }

    // Ladder exhausted. Distinguish "kept out by sovereignty alone" from
    // plain infeasibility, judged at the most permissive tier tried.
    bool any = false;
    bool all_sovereignty = true;
    for (const CatalogEntry* e : scope) {
        any = true;
        if (!excluded_solely_by_sovereignty(*e, asp.profile(), last_tier)) {
            all_sovereignty = false;
        }
    }
    if (any && all_sovereignty) {
        return R::fail(FailureCause::SovereigntyViolation,
                       "every candidate excluded solely by sovereignty zone");
    }
    return R::fail(FailureCause::NoFeasibleBinding, "no admissible catalog entry");
}

}  // namespace neaiaas

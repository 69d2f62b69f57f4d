#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "neaiaas/profile.hpp"
#include "neaiaas/result.hpp"

namespace neaiaas {

enum class SiteClass { Edge, Regional, Central };
std::string_view site_class_name(SiteClass c);
std::optional<SiteClass> site_class_from_name(std::string_view s);

// One deployable (model, site) pairing advertised by the operator.
struct CatalogEntry {
    std::string model_id;
    std::string model_version;
    std::string site_id;
    SiteClass site_class = SiteClass::Edge;
    int quality_tier = 0;
    std::set<std::string> hardware_deps;  // tags the model needs
    std::set<std::string> site_tags;      // tags the site offers
    SovereigntyZone sovereignty_zone = SovereigntyZone::Global;
    double base_cost = 0;  // per-session cost estimate
};

class Catalog {
public:
    // Reads a JSON catalog file. Malformed JSON or a duplicate
    // (model_id, model_version, site_id) key is a policy_denial naming the
    // offending entry; a missing file is reported the same way.
    static Result<Catalog> load(const std::filesystem::path& json_file);
    static Result<Catalog> from_entries(std::vector<CatalogEntry> entries);

    const std::vector<CatalogEntry>& entries() const { return entries_; }
    bool has_model(const std::string& model_id) const;

private:
    std::vector<CatalogEntry> entries_;
};

// Predicted boundary quantities for one candidate entry.
struct Estimates {
    Ms est_ttfb = 0;
    Ms est_p99 = 0;
    double est_cost = 0;
};

// Supplies estimates for admissible entries during discovery.
class EstimateSource {
public:
    virtual ~EstimateSource() = default;
    virtual Estimates estimate(const CatalogEntry& entry) const = 0;
};

struct CandidateBinding {
    CatalogEntry entry;
    Ms est_ttfb = 0;
    Ms est_p99 = 0;
    double est_cost = 0;
    double slack = 0;

    // Negative slack means the candidate is predicted to miss its bounds.
    bool compliant() const { return slack >= 0; }
};

// Pure admissibility predicate: modality support, quality tier, sovereignty
// zone against privacy scope, hardware deps against site tags, base cost
// against the cost envelope. No scoring, no side effects.
bool admissibility_filter(const CatalogEntry& entry, const ValidatedProfile& asp);

// Headroom score: min(p99 margin, ttfb margin) - lambda * cost.
double slack_score(const Estimates& est, const ValidatedProfile& asp, double lambda);

struct DiscoverOptions {
    double lambda = 0.0;  // cost weight inside the slack score
    std::optional<std::string> requested_model;
};

// Discovery: filters the catalog, walks the fallback ladder if the primary
// tier yields nothing, annotates the survivors with estimates and slack and
// ranks them best-first. Failure causes:
//   model_unavailable      requested model absent from the catalog
//   sovereignty_violation  sovereignty is the only constraint keeping every
//                          otherwise-admissible entry out
//   no_feasible_binding    anything else that leaves the candidate set empty
Result<std::vector<CandidateBinding>> discover(const ValidatedProfile& asp,
                                               const Catalog& catalog,
                                               const EstimateSource& predictor,
                                               const DiscoverOptions& opts = {});

}  // namespace neaiaas

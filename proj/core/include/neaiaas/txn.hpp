#pragma once

#include <map>
#include <string>
#include <vector>

#include "neaiaas/lease.hpp"
#include "neaiaas/result.hpp"

namespace neaiaas {

// Compute slots at one hosting site.
struct ComputeSite {
    std::string site_id;
    int capacity = 0;
    int committed_slots = 0;
    int provisional_slots = 0;

    int free_slots() const { return capacity - committed_slots - provisional_slots; }
};

// Dedicated-flow budget of the transport plane.
struct QosPlane {
    int flow_budget = 0;
    int committed_flows = 0;
    int provisional_flows = 0;

    int free_flows() const { return flow_budget - committed_flows - provisional_flows; }
};

// Both resource managers plus the authoritative lease table.
class ResourcePool {
public:
    void add_site(std::string site_id, int capacity);
    void set_qos_budget(int flows);

    const ComputeSite* find_site(const std::string& site_id) const;
    const QosPlane& qos() const { return qos_; }
    const std::map<LeaseId, LeaseToken>& leases() const { return leases_; }

    // Total slots/flows held in the given lease state, for conservation
    // checks.
    int held(Plane plane, LeaseState state) const;

private:
    friend struct PoolOps;
    std::map<std::string, ComputeSite> sites_;
    QosPlane qos_;
    std::map<LeaseId, LeaseToken> leases_;
    LeaseId next_lease_id_ = 1;
    Ms last_tick_ = 0;
};

// The two provisional (or, after commit, confirmed) leases of one binding.
struct PreparedPair {
    LeaseToken compute;
    LeaseToken qos;
};

// Phase one: reserve a compute slot then a qos flow, provisionally. On
// compute exhaustion fails with compute_scarcity and takes nothing; on qos
// exhaustion fails with qos_scarcity and releases the compute reservation,
// so a failed prepare never leaks. Unknown site ids throw ProtocolError.
Result<PreparedPair> prepare(ResourcePool& pool, const std::string& site_id, Ms now,
                             Ms lease_duration);

// Phase two: atomically confirm both leases. If either provisional has
// lapsed, both are cleaned up and the commit fails with deadline_expiry;
// there is no state in which exactly one lease of the pair is confirmed.
// Committing a pair that is not provisional in the table throws
// ProtocolError.
Result<PreparedPair> commit(ResourcePool& pool, const PreparedPair& pair, Ms now);

// Releases whatever provisionals of the pair still stand. Idempotent:
// already released or expired leases are skipped. Rolling back a confirmed
// lease is misuse (use release_pair) and throws ProtocolError.
void rollback(ResourcePool& pool, const PreparedPair& pair);

// Tears down a pair in any live state, provisional or confirmed. Idempotent.
void release_pair(ResourcePool& pool, const PreparedPair& pair);

struct LeaseExpiry {
    LeaseId lease_id = 0;
    Plane plane = Plane::Compute;
    std::string site_or_flow;
};

// Advances the lease clock: every live lease with expires_at <= now flips
// to Expired, its slot or flow returns to the free pool, and one expiry
// event is emitted (exactly once per lease). The clock may not move
// backwards; that throws ProtocolError.
std::vector<LeaseExpiry> lease_tick(ResourcePool& pool, Ms now);

// Refreshed token states for a pair, looked up in the lease table.
PreparedPair refresh_pair(const ResourcePool& pool, const PreparedPair& pair);

}  // namespace neaiaas

#include "neaiaas/txn.hpp"

#include <string>

namespace neaiaas {

std::string_view plane_name(Plane p) {
    switch (p) {
        case Plane::Compute: return "compute";
        case Plane::Qos: return "qos";
    }
    throw ProtocolError("unknown Plane value");
}

std::string_view lease_state_name(LeaseState s) {
    switch (s) {
        case LeaseState::Provisional: return "provisional";
        case LeaseState::Confirmed: return "confirmed";
        case LeaseState::Released: return "released";
        case LeaseState::Expired: return "expired";
    }
    throw ProtocolError("unknown LeaseState value");
}

// All mutations of pool internals funnel through here.
struct PoolOps {
    static ComputeSite& site(ResourcePool& p, const std::string& id) {
        auto it = p.sites_.find(id);
        if (it == p.sites_.end()) throw ProtocolError("unknown compute site '" + id + "'");
        return it->second;
    }

    static LeaseToken& row(ResourcePool& p, const LeaseToken& t) {
        auto it = p.leases_.find(t.lease_id);
        if (it == p.leases_.end()) {
            throw ProtocolError("lease " + std::to_string(t.lease_id) + " not in the table");
        }
        return it->second;
    }

    static LeaseToken issue(ResourcePool& p, Plane plane, const std::string& site_or_flow,
                            Ms now, Ms duration) {
        LeaseToken t;
        t.lease_id = p.next_lease_id_++;
        t.plane = plane;
        t.site_or_flow = site_or_flow;
        t.granted_at = now;
        t.expires_at = now + duration;
        t.state = LeaseState::Provisional;
        if (plane == Plane::Compute) {
            site(p, site_or_flow).provisional_slots += 1;
        } else {
            p.qos_.provisional_flows += 1;
        }
        p.leases_[t.lease_id] = t;
        return t;
    }

    // Removes the lease's hold on its manager according to its current
    // state, then applies the terminal state.
    static void retire(ResourcePool& p, LeaseToken& row, LeaseState terminal) {
        if (row.state == LeaseState::Released || row.state == LeaseState::Expired) return;
        if (row.plane == Plane::Compute) {
            ComputeSite& s = site(p, row.site_or_flow);
            if (row.state == LeaseState::Provisional) s.provisional_slots -= 1;
            else s.committed_slots -= 1;
        } else {
            if (row.state == LeaseState::Provisional) p.qos_.provisional_flows -= 1;
            else p.qos_.committed_flows -= 1;
        }
        row.state = terminal;
    }

    static void confirm(ResourcePool& p, LeaseToken& row) {
        if (row.plane == Plane::Compute) {
            ComputeSite& s = site(p, row.site_or_flow);
            s.provisional_slots -= 1;
            s.committed_slots += 1;
        } else {
            p.qos_.provisional_flows -= 1;
            p.qos_.committed_flows += 1;
        }
        row.state = LeaseState::Confirmed;
    }

    static Ms& last_tick(ResourcePool& p) { return p.last_tick_; }
    static std::map<LeaseId, LeaseToken>& table(ResourcePool& p) { return p.leases_; }
};

void ResourcePool::add_site(std::string site_id, int capacity) {
    if (capacity < 0) throw ProtocolError("site capacity must be >= 0");
    if (sites_.count(site_id)) throw ProtocolError("duplicate site '" + site_id + "'");
    ComputeSite s;
    s.site_id = site_id;
    s.capacity = capacity;
    sites_.emplace(std::move(site_id), std::move(s));
}

void ResourcePool::set_qos_budget(int flows) {
    if (flows < 0) throw ProtocolError("qos flow budget must be >= 0");
    if (qos_.committed_flows + qos_.provisional_flows > flows) {
        throw ProtocolError("qos budget below currently held flows");
    }
    qos_.flow_budget = flows;
}

const ComputeSite* ResourcePool::find_site(const std::string& site_id) const {
    auto it = sites_.find(site_id);
    return it == sites_.end() ? nullptr : &it->second;
}

int ResourcePool::held(Plane plane, LeaseState state) const {
    int n = 0;
    for (const auto& [id, t] : leases_) {
        if (t.plane == plane && t.state == state) ++n;
    }
    return n;
}

Result<PreparedPair> prepare(ResourcePool& pool, const std::string& site_id, Ms now,
                             Ms lease_duration) {
    if (!(lease_duration > 0)) throw ProtocolError("lease_duration must be > 0");

    ComputeSite& site = PoolOps::site(pool, site_id);
    if (site.free_slots() <= 0) {
        return Result<PreparedPair>::fail(FailureCause::ComputeScarcity,
                                          "site '" + site_id + "' has no free slots");
    }
    LeaseToken compute = PoolOps::issue(pool, Plane::Compute, site_id, now, lease_duration);

    if (pool.qos().free_flows() <= 0) {
        // Never hold one plane after the other failed.
        PoolOps::retire(pool, PoolOps::row(pool, compute), LeaseState::Released);
        return Result<PreparedPair>::fail(FailureCause::QosScarcity, "qos flow budget exhausted");
    }
    std::string flow_id = "flow-" + std::to_string(compute.lease_id);
    LeaseToken qos = PoolOps::issue(pool, Plane::Qos, flow_id, now, lease_duration);

    return PreparedPair{compute, qos};
}

Result<PreparedPair> commit(ResourcePool& pool, const PreparedPair& pair, Ms now) {
    if (pair.compute.lease_id == pair.qos.lease_id) {
        throw ProtocolError("commit with a degenerate lease pair");
    }
    LeaseToken& c = PoolOps::row(pool, pair.compute);
    LeaseToken& q = PoolOps::row(pool, pair.qos);

    if (c.state == LeaseState::Released || q.state == LeaseState::Released) {
        throw ProtocolError("commit on a released lease pair");
    }
    if (c.state == LeaseState::Confirmed || q.state == LeaseState::Confirmed) {
        throw ProtocolError("commit on an already confirmed lease");
    }

    // A lapsed provisional anywhere voids the whole pair; nothing survives.
    bool c_dead = c.state == LeaseState::Expired || c.expires_at <= now;
    bool q_dead = q.state == LeaseState::Expired || q.expires_at <= now;
    if (c_dead || q_dead) {
        PoolOps::retire(pool, c, c_dead ? LeaseState::Expired : LeaseState::Released);
        PoolOps::retire(pool, q, q_dead ? LeaseState::Expired : LeaseState::Released);
        return Result<PreparedPair>::fail(FailureCause::DeadlineExpiry,
                                          "provisional lease lapsed before commit");
    }

    // Both alive: confirm the pair in one step. No observable state has
    // exactly one confirmed lease.
    PoolOps::confirm(pool, c);
    PoolOps::confirm(pool, q);
    return PreparedPair{c, q};
}

void rollback(ResourcePool& pool, const PreparedPair& pair) {
    for (const LeaseToken* t : {&pair.compute, &pair.qos}) {
        LeaseToken& row = PoolOps::row(pool, *t);
        if (row.state == LeaseState::Confirmed) {
            throw ProtocolError("rollback on a confirmed lease; use release_pair");
        }
        PoolOps::retire(pool, row, LeaseState::Released);
    }
}

void release_pair(ResourcePool& pool, const PreparedPair& pair) {
    for (const LeaseToken* t : {&pair.compute, &pair.qos}) {
        PoolOps::retire(pool, PoolOps::row(pool, *t), LeaseState::Released);
    }
}

std::vector<LeaseExpiry> lease_tick(ResourcePool& pool, Ms now) {
    if (now < PoolOps::last_tick(pool)) {
        throw ProtocolError("lease_tick clock moved backwards");
    }
    PoolOps::last_tick(pool) = now;

    std::vector<LeaseExpiry> out;
    for (auto& [id, row] : PoolOps::table(pool)) {
        bool live = row.state == LeaseState::Provisional || row.state == LeaseState::Confirmed;
        if (!live || row.expires_at > now) continue;
        PoolOps::retire(pool, row, LeaseState::Expired);
        out.push_back(LeaseExpiry{id, row.plane, row.site_or_flow});
    }
    return out;
}

PreparedPair refresh_pair(const ResourcePool& pool, const PreparedPair& pair) {
    const auto& table = pool.leases();
    auto c = table.find(pair.compute.lease_id);
    auto q = table.find(pair.qos.lease_id);
    if (c == table.end() || q == table.end()) {
        throw ProtocolError("refresh_pair on leases not in the table");
    }
    return PreparedPair{c->second, q->second};
}

}  // namespace neaiaas

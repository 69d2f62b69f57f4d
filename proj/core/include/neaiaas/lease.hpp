#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "neaiaas/profile.hpp"

namespace neaiaas {

enum class Plane { Compute, Qos };
enum class LeaseState { Provisional, Confirmed, Released, Expired };

using LeaseId = std::uint64_t;

// Validity-bounded reservation on one resource plane. Tokens are value
// snapshots; the resource pool's lease table is authoritative.
struct LeaseToken {
    LeaseId lease_id = 0;
    Plane plane = Plane::Compute;
    std::string site_or_flow;  // compute site id, or qos flow id
    Ms granted_at = 0;
    Ms expires_at = 0;         // expiry is inclusive: expired once now >= expires_at
    LeaseState state = LeaseState::Provisional;

    bool confirmed_valid(Ms now) const {
        return state == LeaseState::Confirmed && now < expires_at;
    }
    bool provisional_alive(Ms now) const {
        return state == LeaseState::Provisional && now < expires_at;
    }
};

std::string_view plane_name(Plane p);
std::string_view lease_state_name(LeaseState s);

}  // namespace neaiaas

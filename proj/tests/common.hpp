#pragma once

#include <doctest.h>

#include "finsheaf/grpsites.hpp"
#include "finsheaf/linmod.hpp"

namespace testing {

using namespace finsheaf;

inline GroupPtr z(std::size_t n) { return share(FiniteGroup::cyclic(n)); }
inline GroupPtr s3() { return share(FiniteGroup::symmetric(3)); }
inline GroupPtr d4() { return share(FiniteGroup::dihedral(4)); }

inline GroupSiteBundle orbit_bundle(const GroupPtr& g) {
    return make_bundle(g, PosetChoice::AllSubgroups, 0, QuotientChoice::Orbit);
}
inline GroupSiteBundle transporter_bundle(const GroupPtr& g) {
    return make_bundle(g, PosetChoice::AllSubgroups, 0, QuotientChoice::Transporter);
}

// The subgroup with the given members (indices), for readability in tests.
inline Subgroup subgroup(const GroupPtr& g, std::vector<Elem> elems) { return Subgroup::from_elements(g, std::move(elems)); }

}  // namespace testing

#pragma once

// Brute-force reference implementations used to cross-check the library.
// They enumerate everything and are only meant for tiny inputs.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "finsheaf/grpsites.hpp"
#include "finsheaf/linmod.hpp"

namespace oracle {

using namespace finsheaf;

// Every subset of G closed under the product and containing e, as sorted lists.
inline std::set<std::vector<Elem>> subgroups(const FiniteGroup& g) {
    const std::size_t n = g.order();
    std::set<std::vector<Elem>> out;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (!(mask & (1u << g.identity()))) continue;
        bool closed = true;
        for (Elem a = 0; a < n && closed; ++a)
            for (Elem b = 0; b < n && closed; ++b)
                if ((mask >> a & 1) && (mask >> b & 1) && !(mask >> g.mul(a, b) & 1)) closed = false;
        if (!closed) continue;
        std::vector<Elem> s;
        for (Elem a = 0; a < n; ++a)
            if (mask >> a & 1) s.push_back(a);
        out.insert(s);
    }
    return out;
}

// Every subset of into(x) closed under precomposition.
inline std::set<std::vector<Mor>> sieves(const FinCat& c, Obj x) {
    const auto& in = c.into(x);
    const std::size_t k = in.size();
    std::set<std::vector<Mor>> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        std::set<Mor> members;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) members.insert(in[i]);
        bool closed = true;
        for (Mor f : members) {
            for (Mor g : c.into(c.dom(f)))
                if (!members.count(c.compose(f, g))) closed = false;
        }
        if (closed) out.insert(std::vector<Mor>(members.begin(), members.end()));
    }
    return out;
}

// Number of natural transformations by trying every family of functions.
inline std::size_t nat_count(const Presheaf& a, const Presheaf& b) {
    const FinCat& c = *a.category();
    std::vector<std::pair<Obj, Item>> slots;
    for (Obj x = 0; x < c.num_objects(); ++x)
        for (Item i = 0; i < a.size(x); ++i) slots.push_back({x, i});
    NatTrans eta{std::vector<std::vector<Item>>(c.num_objects())};
    for (Obj x = 0; x < c.num_objects(); ++x) eta.components[x].assign(a.size(x), 0);
    std::size_t count = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == slots.size()) {
            for (Mor u = 0; u < c.num_morphisms(); ++u)
                for (Item i = 0; i < a.size(c.cod(u)); ++i)
                    if (eta.components[c.dom(u)][a.at(u, i)] != b.at(u, eta.components[c.cod(u)][i])) return;
            ++count;
            return;
        }
        const auto [x, i] = slots[k];
        for (Item v = 0; v < b.size(x); ++v) {
            eta.components[x][i] = v;
            rec(k + 1);
        }
    };
    rec(0);
    return count;
}

// Equivariant bijection by trying every permutation.
inline bool gsets_isomorphic(const GSet& a, const GSet& b) {
    if (a.size() != b.size()) return false;
    std::vector<std::size_t> p(a.size());
    std::iota(p.begin(), p.end(), 0);
    const std::size_t n = a.group()->order();
    do {
        bool ok = true;
        for (std::size_t x = 0; x < a.size() && ok; ++x)
            for (Elem g = 0; g < n && ok; ++g) ok = p[a.act(x, g)] == b.act(p[x], g);
        if (ok) return true;
    } while (std::next_permutation(p.begin(), p.end()));
    return false;
}

inline std::size_t orbit_count(const GSet& m, const Subgroup& h) {
    std::vector<bool> seen(m.size(), false);
    std::size_t count = 0;
    for (std::size_t x = 0; x < m.size(); ++x) {
        if (seen[x]) continue;
        ++count;
        std::vector<std::size_t> stack{x};
        seen[x] = true;
        while (!stack.empty()) {
            const std::size_t y = stack.back();
            stack.pop_back();
            for (Elem k : h.elements())
                if (!seen[m.act(y, k)]) {
                    seen[m.act(y, k)] = true;
                    stack.push_back(m.act(y, k));
                }
        }
    }
    return count;
}

// Every vector of R^d, in lexicographic order.
inline std::vector<Row> all_vectors(const FiniteRing& r, std::size_t d) {
    std::vector<Row> out;
    Row v(d, 0);
    while (true) {
        out.push_back(v);
        std::size_t i = 0;
        while (i < d && ++v[i] == r.modulus()) v[i++] = 0;
        if (i == d) break;
    }
    return out;
}

inline std::size_t fixed_vector_count(const RGModule& m, const Subgroup& h) {
    std::size_t count = 0;
    for (const Row& v : all_vectors(m.ring(), m.rank())) {
        bool fixed = true;
        for (Elem x : h.elements()) fixed = fixed && apply(m.ring(), v, m.action(x)) == v;
        count += fixed;
    }
    return count;
}

// The additive closure of the generators (every R-combination is a sum of copies).
inline std::set<Row> span(const FiniteRing& r, std::size_t d, const std::vector<Row>& gens) {
    std::set<Row> seen{Row(d, 0)};
    std::vector<Row> frontier{Row(d, 0)};
    while (!frontier.empty()) {
        const Row v = frontier.back();
        frontier.pop_back();
        for (const Row& g : gens) {
            Row w(d);
            for (std::size_t i = 0; i < d; ++i) w[i] = r.add(v[i], g[i]);
            if (seen.insert(w).second) frontier.push_back(w);
        }
    }
    return seen;
}

inline std::size_t left_kernel_size(const FiniteRing& r, const Matrix& a) {
    std::size_t count = 0;
    for (const Row& v : all_vectors(r, a.rows)) {
        const Row w = apply(r, v, a);
        count += std::all_of(w.begin(), w.end(), [](Scalar s) { return s == 0; });
    }
    return count;
}

// Number of isomorphism classes of G-sets with at most `bound` points: multisets
// of transitive types (one per conjugacy class of subgroups, of size the index).
inline std::size_t gset_class_count(const GroupPtr& g, std::size_t bound) {
    std::set<std::vector<Elem>> reps;
    for (const Subgroup& h : enumerate_subgroups(g)) reps.insert(conjugacy_representative(h).elements());
    std::vector<std::size_t> sizes;
    for (const auto& r : reps) sizes.push_back(g->order() / r.size());
    // ways[s] = number of multisets of types with total size s
    std::vector<std::size_t> ways(bound + 1, 0);
    ways[0] = 1;
    for (std::size_t s : sizes)
        for (std::size_t t = s; t <= bound; ++t) ways[t] += ways[t - s];
    return std::accumulate(ways.begin(), ways.end(), std::size_t{0});
}

}  // namespace oracle

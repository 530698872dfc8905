#include "finsheaf/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "finsheaf/error.hpp"

namespace finsheaf {

namespace {

using Perm = std::vector<std::size_t>;

std::string cycle_label(const Perm& p) {
    std::vector<bool> seen(p.size(), false);
    std::ostringstream out;
    bool any = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i] || p[i] == i) continue;
        any = true;
        out << '(';
        std::size_t j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = true;
            if (!first) out << ' ';
            out << j + 1;
            first = false;
            j = p[j];
        }
        out << ')';
    }
    return any ? out.str() : "()";
}

}  // namespace

FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<Elem>>& mul,
                                    std::vector<std::string> labels) {
    const std::size_t n = mul.size();
    if (n == 0) throw InputError("group table is empty");
    FiniteGroup g;
    g.order_ = n;
    g.mul_.reserve(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        if (mul[a].size() != n) throw InputError("group table row " + std::to_string(a) + " has wrong length");
        for (std::size_t b = 0; b < n; ++b) {
            if (mul[a][b] >= n)
                throw AxiomError("group table entry out of range", {{"a", a}, {"b", b}});
            g.mul_.push_back(mul[a][b]);
        }
    }
    std::optional<Elem> identity;
    for (Elem e = 0; e < n && !identity; ++e) {
        bool neutral = true;
        for (Elem a = 0; a < n && neutral; ++a) neutral = g.mul(e, a) == a && g.mul(a, e) == a;
        if (neutral) identity = e;
    }
    if (!identity) throw AxiomError("group table has no two-sided identity", nlohmann::json::object());
    g.identity_ = *identity;
    for (Elem a = 0; a < n; ++a)
        for (Elem b = 0; b < n; ++b)
            for (Elem c = 0; c < n; ++c)
                if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                    throw AxiomError("group table is not associative", {{"a", a}, {"b", b}, {"c", c}});
    g.inv_.assign(n, 0);
    for (Elem a = 0; a < n; ++a) {
        std::optional<Elem> inverse;
        for (Elem b = 0; b < n && !inverse; ++b)
            if (g.mul(a, b) == g.identity_ && g.mul(b, a) == g.identity_) inverse = b;
        if (!inverse) throw AxiomError("element has no inverse", {{"a", a}});
        g.inv_[a] = *inverse;
    }
    if (labels.empty()) {
        labels.resize(n);
        for (std::size_t a = 0; a < n; ++a) labels[a] = a == g.identity_ ? "e" : "g" + std::to_string(a);
    }
    if (labels.size() != n) throw InputError("label count does not match group order");
    g.labels_ = std::move(labels);
    return g;
}

FiniteGroup FiniteGroup::from_permutations(std::size_t degree,
                                           const std::vector<std::vector<std::size_t>>& generators) {
    for (const auto& p : generators) {
        if (p.size() != degree) throw InputError("generator has wrong degree");
        Perm sorted = p;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < degree; ++i)
            if (sorted[i] != i) throw InputError("generator is not a permutation");
    }
    auto compose = [degree](const Perm& a, const Perm& b) {
        Perm c(degree);
        for (std::size_t i = 0; i < degree; ++i) c[i] = a[b[i]];
        return c;
    };
    Perm id(degree);
    std::iota(id.begin(), id.end(), 0);
    std::set<Perm> seen{id};
    std::deque<Perm> queue{id};
    while (!queue.empty()) {
        Perm p = queue.front();
        queue.pop_front();
        for (const auto& s : generators) {
            Perm q = compose(p, s);
            if (seen.insert(q).second) queue.push_back(std::move(q));
        }
    }
    std::vector<Perm> elems(seen.begin(), seen.end());
    std::map<Perm, Elem> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index.emplace(elems[i], static_cast<Elem>(i));
    std::vector<std::vector<Elem>> table(elems.size(), std::vector<Elem>(elems.size()));
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < elems.size(); ++a) {
        labels.push_back(cycle_label(elems[a]));
        for (std::size_t b = 0; b < elems.size(); ++b) table[a][b] = index.at(compose(elems[a], elems[b]));
    }
    return from_table(table, std::move(labels));
}

FiniteGroup FiniteGroup::trivial() { return from_table({{0}}, {"e"}); }

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
    if (n == 0) throw InputError("cyclic group of order 0");
    if (n == 1) return trivial();
    Perm r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = (i + 1) % n;
    return from_permutations(n, {r});
}

FiniteGroup FiniteGroup::symmetric(std::size_t n) {
    if (n == 0) throw InputError("symmetric group of degree 0");
    if (n == 1) return trivial();
    Perm t(n), c(n);
    std::iota(t.begin(), t.end(), 0);
    std::swap(t[0], t[1]);
    for (std::size_t i = 0; i < n; ++i) c[i] = (i + 1) % n;
    return from_permutations(n, {t, c});
}

FiniteGroup FiniteGroup::dihedral(std::size_t n) {
    if (n < 3) throw InputError("dihedral group needs n >= 3");
    Perm r(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = (i + 1) % n;
        s[i] = (n - i) % n;
    }
    return from_permutations(n, {r, s});
}

std::vector<std::vector<Elem>> FiniteGroup::table() const {
    std::vector<std::vector<Elem>> t(order_, std::vector<Elem>(order_));
    for (Elem a = 0; a < order_; ++a)
        for (Elem b = 0; b < order_; ++b) t[a][b] = mul(a, b);
    return t;
}

std::optional<Elem> FiniteGroup::find(const std::string& label) const {
    for (Elem a = 0; a < order_; ++a)
        if (labels_[a] == label) return a;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Subgroups

Subgroup::Subgroup(GroupPtr group, std::vector<Elem> sorted_elements)
    : group_(std::move(group)), elements_(std::move(sorted_elements)), mask_(group_->order(), false) {
    for (Elem g : elements_) mask_[g] = true;
}

Subgroup Subgroup::from_elements(GroupPtr group, std::vector<Elem> elements) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    for (Elem g : elements)
        if (g >= group->order()) throw InputError("subgroup element out of range");
    Subgroup h(group, std::move(elements));
    if (!h.contains(group->identity())) throw AxiomError("subset does not contain the identity", nlohmann::json::object());
    for (Elem a : h.elements_) {
        if (!h.contains(group->inv(a))) throw AxiomError("subset not closed under inverses", {{"a", a}});
        for (Elem b : h.elements_)
            if (!h.contains(group->mul(a, b)))
                throw AxiomError("subset not closed under multiplication", {{"a", a}, {"b", b}});
    }
    return h;
}

Subgroup Subgroup::generated_by(GroupPtr group, std::span<const Elem> generators) {
    std::vector<bool> in(group->order(), false);
    std::vector<Elem> members{group->identity()};
    in[group->identity()] = true;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (Elem s : generators) {
            Elem p = group->mul(members[i], s);
            if (!in[p]) {
                in[p] = true;
                members.push_back(p);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return Subgroup(std::move(group), std::move(members));
}

Subgroup Subgroup::trivial(GroupPtr group) {
    Elem e = group->identity();
    return Subgroup(std::move(group), {e});
}

Subgroup Subgroup::whole(GroupPtr group) {
    std::vector<Elem> all(group->order());
    std::iota(all.begin(), all.end(), 0);
    return Subgroup(std::move(group), std::move(all));
}

bool Subgroup::is_subset_of(const Subgroup& other) const {
    return std::all_of(elements_.begin(), elements_.end(), [&](Elem g) { return other.contains(g); });
}

std::string Subgroup::label() const {
    std::string s = "{";
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (i) s += ",";
        s += group_->label(elements_[i]);
    }
    return s + "}";
}

std::strong_ordering operator<=>(const Subgroup& a, const Subgroup& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return a.elements_ <=> b.elements_;
}

std::vector<Subgroup> enumerate_subgroups(const GroupPtr& group) {
    std::set<Subgroup> found{Subgroup::trivial(group)};
    std::deque<Subgroup> queue{Subgroup::trivial(group)};
    while (!queue.empty()) {
        Subgroup h = queue.front();
        queue.pop_front();
        for (Elem g = 0; g < group->order(); ++g) {
            if (h.contains(g)) continue;
            std::vector<Elem> gens = h.elements();
            gens.push_back(g);
            Subgroup k = Subgroup::generated_by(group, gens);
            if (found.insert(k).second) queue.push_back(k);
        }
    }
    return {found.begin(), found.end()};
}

bool is_prime(std::size_t p) {
    if (p < 2) return false;
    for (std::size_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::vector<Subgroup> p_subgroups(const GroupPtr& group, std::size_t p) {
    if (!is_prime(p)) throw InputError(std::to_string(p) + " is not prime");
    std::vector<Subgroup> out;
    for (auto& h : enumerate_subgroups(group)) {
        std::size_t n = h.size();
        while (n % p == 0) n /= p;
        if (n == 1) out.push_back(std::move(h));
    }
    return out;
}

Subgroup conjugate_subgroup(const Subgroup& h, Elem g) {
    const auto& group = h.group();
    std::vector<Elem> members;
    members.reserve(h.size());
    for (Elem x : h.elements()) members.push_back(group->conj(g, x));
    return Subgroup::from_elements(group, std::move(members));
}

Subgroup conjugacy_representative(const Subgroup& h) {
    Subgroup best = h;
    for (Elem g = 0; g < h.group()->order(); ++g) {
        Subgroup c = conjugate_subgroup(h, g);
        if (c < best) best = std::move(c);
    }
    return best;
}

Subgroup normalizer(const Subgroup& h) {
    std::vector<Elem> members;
    for (Elem g = 0; g < h.group()->order(); ++g)
        if (conjugate_subgroup(h, g) == h) members.push_back(g);
    return Subgroup::from_elements(h.group(), std::move(members));
}

// ---------------------------------------------------------------------------
// G-sets

GSet::GSet(GroupPtr group, std::size_t size, std::vector<std::size_t> flat, bool validate)
    : group_(std::move(group)), size_(size), order_(group_->order()), act_(std::move(flat)) {
    if (!validate) return;
    if (act_.size() != size_ * order_) throw InputError("G-set table has wrong shape");
    for (std::size_t x = 0; x < size_; ++x) {
        for (Elem g = 0; g < order_; ++g)
            if (act(x, g) >= size_) throw AxiomError("G-set action out of range", {{"x", x}, {"g", g}});
        if (act(x, group_->identity()) != x) throw AxiomError("identity does not act trivially", {{"x", x}});
    }
    for (std::size_t x = 0; x < size_; ++x)
        for (Elem g = 0; g < order_; ++g)
            for (Elem h = 0; h < order_; ++h)
                if (act(act(x, g), h) != act(x, group_->mul(g, h)))
                    throw AxiomError("action is not a right action", {{"x", x}, {"g", g}, {"h", h}});
}

GSet::GSet(GroupPtr group, const std::vector<std::vector<std::size_t>>& act)
    : GSet(group, act.size(),
           [&] {
               std::vector<std::size_t> flat;
               for (const auto& row : act) {
                   if (row.size() != group->order()) throw InputError("G-set row has wrong length");
                   flat.insert(flat.end(), row.begin(), row.end());
               }
               return flat;
           }(),
           true) {}

GSet GSet::empty(GroupPtr group) { return GSet(std::move(group), 0, {}, false); }

GSet GSet::point(GroupPtr group) {
    std::size_t n = group->order();
    return GSet(std::move(group), 1, std::vector<std::size_t>(n, 0), false);
}

GSet GSet::regular(GroupPtr group) { return coset_gset(Subgroup::trivial(std::move(group))); }

GSet GSet::disjoint_union(const GSet& a, const GSet& b) {
    if (*a.group_ != *b.group_) throw InputError("disjoint union of G-sets over different groups");
    std::vector<std::size_t> flat = a.act_;
    for (std::size_t v : b.act_) flat.push_back(v + a.size_);
    return GSet(a.group_, a.size_ + b.size_, std::move(flat), false);
}

std::vector<std::vector<std::size_t>> GSet::table() const {
    std::vector<std::vector<std::size_t>> t(size_, std::vector<std::size_t>(order_));
    for (std::size_t x = 0; x < size_; ++x)
        for (Elem g = 0; g < order_; ++g) t[x][g] = act(x, g);
    return t;
}

CosetSpace coset_space(const Subgroup& h) {
    const auto& group = h.group();
    const std::size_t n = group->order();
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> coset_of(n, unset);
    std::vector<Elem> reps;
    for (Elem g = 0; g < n; ++g) {
        if (coset_of[g] != unset) continue;
        for (Elem x : h.elements()) coset_of[group->mul(x, g)] = reps.size();
        reps.push_back(g);
    }
    std::vector<std::size_t> flat(reps.size() * n);
    for (std::size_t c = 0; c < reps.size(); ++c)
        for (Elem g = 0; g < n; ++g) flat[c * n + g] = coset_of[group->mul(reps[c], g)];
    std::vector<std::vector<std::size_t>> act(reps.size(), std::vector<std::size_t>(n));
    for (std::size_t c = 0; c < reps.size(); ++c)
        for (Elem g = 0; g < n; ++g) act[c][g] = flat[c * n + g];
    return {GSet(group, act), std::move(reps), std::move(coset_of)};
}

std::vector<std::size_t> fixed_points(const GSet& m, const Subgroup& h) {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < m.size(); ++x)
        if (std::all_of(h.elements().begin(), h.elements().end(), [&](Elem g) { return m.act(x, g) == x; }))
            out.push_back(x);
    return out;
}

Subgroup stabilizer(const GSet& m, std::size_t x) {
    std::vector<Elem> members;
    for (Elem g = 0; g < m.group()->order(); ++g)
        if (m.act(x, g) == x) members.push_back(g);
    return Subgroup::from_elements(m.group(), std::move(members));
}

std::vector<Orbit> orbits(const GSet& m) {
    std::vector<Orbit> out;
    std::vector<bool> seen(m.size(), false);
    for (std::size_t x = 0; x < m.size(); ++x) {
        if (seen[x]) continue;
        std::vector<std::size_t> pts;
        for (Elem g = 0; g < m.group()->order(); ++g) {
            std::size_t y = m.act(x, g);
            if (!seen[y]) {
                seen[y] = true;
                pts.push_back(y);
            }
        }
        std::sort(pts.begin(), pts.end());
        Subgroup stab = stabilizer(m, x);
        Subgroup type = conjugacy_representative(stab);
        out.push_back({std::move(pts), std::move(stab), std::move(type)});
    }
    return out;
}

std::vector<Subgroup> orbit_type(const GSet& m) {
    std::vector<Subgroup> types;
    for (auto& o : orbits(m)) types.push_back(std::move(o.type));
    std::sort(types.begin(), types.end());
    return types;
}

bool gsets_isomorphic(const GSet& a, const GSet& b) {
    if (*a.group() != *b.group()) throw InputError("comparing G-sets over different groups");
    if (a.size() != b.size()) return false;
    return orbit_type(a) == orbit_type(b);
}

GMap::GMap(GSet source, GSet target, std::vector<std::size_t> f)
    : source_(std::move(source)), target_(std::move(target)), f_(std::move(f)) {
    if (f_.size() != source_.size()) throw InputError("G-map table has wrong length");
    for (std::size_t x = 0; x < source_.size(); ++x) {
        if (f_[x] >= target_.size()) throw AxiomError("G-map value out of range", {{"x", x}});
        for (Elem g = 0; g < source_.group()->order(); ++g)
            if (f_[source_.act(x, g)] != target_.act(f_[x], g))
                throw AxiomError("map is not equivariant", {{"x", x}, {"g", g}});
    }
}

bool GMap::is_bijective() const {
    if (source_.size() != target_.size()) return false;
    std::vector<bool> hit(target_.size(), false);
    for (std::size_t y : f_) {
        if (hit[y]) return false;
        hit[y] = true;
    }
    return true;
}

// ---------------------------------------------------------------------------
// G-posets

GPoset::GPoset(GSet carrier, std::vector<std::vector<bool>> le, std::vector<std::string> labels)
    : carrier_(std::move(carrier)), labels_(std::move(labels)) {
    const std::size_t m = carrier_.size();
    if (le.size() != m) throw InputError("order table has wrong shape");
    le_.reserve(m * m);
    for (const auto& row : le) {
        if (row.size() != m) throw InputError("order table has wrong shape");
        le_.insert(le_.end(), row.begin(), row.end());
    }
    for (std::size_t x = 0; x < m; ++x) {
        if (!this->le(x, x)) throw AxiomError("order is not reflexive", {{"x", x}});
        for (std::size_t y = 0; y < m; ++y) {
            if (x != y && this->le(x, y) && this->le(y, x))
                throw AxiomError("order is not antisymmetric", {{"x", x}, {"y", y}});
            for (std::size_t z = 0; z < m; ++z)
                if (this->le(x, y) && this->le(y, z) && !this->le(x, z))
                    throw AxiomError("order is not transitive", {{"x", x}, {"y", y}, {"z", z}});
            if (this->le(x, y))
                for (Elem g = 0; g < group()->order(); ++g)
                    if (!this->le(carrier_.act(x, g), carrier_.act(y, g)))
                        throw AxiomError("action does not preserve the order", {{"x", x}, {"y", y}, {"g", g}});
        }
    }
    if (labels_.empty())
        for (std::size_t x = 0; x < m; ++x) labels_.push_back("p" + std::to_string(x));
    if (labels_.size() != m) throw InputError("poset label count mismatch");
}

std::optional<std::size_t> GPoset::minimum() const {
    for (std::size_t x = 0; x < size(); ++x) {
        bool least = true;
        for (std::size_t y = 0; y < size() && least; ++y) least = le(x, y);
        if (least) return x;
    }
    return std::nullopt;
}

std::vector<std::vector<bool>> GPoset::order_table() const {
    std::vector<std::vector<bool>> t(size(), std::vector<bool>(size()));
    for (std::size_t x = 0; x < size(); ++x)
        for (std::size_t y = 0; y < size(); ++y) t[x][y] = le(x, y);
    return t;
}

GPoset GPoset::opposite() const {
    auto t = order_table();
    std::vector<std::vector<bool>> op(size(), std::vector<bool>(size()));
    for (std::size_t x = 0; x < size(); ++x)
        for (std::size_t y = 0; y < size(); ++y) op[x][y] = t[y][x];
    return GPoset(carrier_, std::move(op), labels_);
}

SubgroupPoset subgroup_poset(const GroupPtr& group, std::vector<Subgroup> family) {
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
    auto index_of = [&](const Subgroup& h) -> std::size_t {
        auto it = std::lower_bound(family.begin(), family.end(), h);
        if (it == family.end() || *it != h)
            throw InputError("subgroup family is not closed under conjugation");
        return static_cast<std::size_t>(it - family.begin());
    };
    std::vector<std::vector<std::size_t>> act(family.size(), std::vector<std::size_t>(group->order()));
    for (std::size_t i = 0; i < family.size(); ++i)
        for (Elem g = 0; g < group->order(); ++g) act[i][g] = index_of(conjugate_subgroup(family[i], group->inv(g)));
    std::vector<std::vector<bool>> le(family.size(), std::vector<bool>(family.size()));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < family.size(); ++i) {
        labels.push_back(family[i].label());
        for (std::size_t j = 0; j < family.size(); ++j) le[i][j] = family[i].is_subset_of(family[j]);
    }
    return {GPoset(GSet(group, act), std::move(le), std::move(labels)), std::move(family)};
}

}  // namespace finsheaf

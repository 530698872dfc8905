#include "finsheaf/linmod.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace finsheaf {

namespace {

struct Egcd {
    std::int64_t g, s, t;
};

// s a + t b = g with g = gcd(a, b); (1, 0) when a divides b so pivots never grow.
Egcd egcd(std::int64_t a, std::int64_t b) {
    if (a != 0 && b % a == 0) return {a, 1, 0};
    std::int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
        std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
    }
    return {r0, s0, t0};
}

Scalar reduce(std::int64_t v, Scalar n) {
    const std::int64_t m = v % static_cast<std::int64_t>(n);
    return static_cast<Scalar>(m < 0 ? m + n : m);
}

Scalar gcd_mod(Scalar d, Scalar n) { return static_cast<Scalar>(std::gcd(d, n)); }

// rows i, j <- (a ri + b rj, c ri + d rj)
void row_combine(const FiniteRing& r, Matrix& m, std::size_t i, std::size_t j, Scalar a, Scalar b, Scalar c, Scalar d) {
    for (std::size_t k = 0; k < m.cols; ++k) {
        const Scalar x = m(i, k), y = m(j, k);
        m(i, k) = r.add(r.mul(a, x), r.mul(b, y));
        m(j, k) = r.add(r.mul(c, x), r.mul(d, y));
    }
}

// columns i, j <- (a ci + b cj, c ci + d cj)
void col_combine(const FiniteRing& r, Matrix& m, std::size_t i, std::size_t j, Scalar a, Scalar b, Scalar c, Scalar d) {
    for (std::size_t k = 0; k < m.rows; ++k) {
        const Scalar x = m(k, i), y = m(k, j);
        m(k, i) = r.add(r.mul(a, x), r.mul(b, y));
        m(k, j) = r.add(r.mul(c, x), r.mul(d, y));
    }
}

Matrix hstack(const std::vector<Matrix>& blocks, std::size_t rows) {
    std::size_t cols = 0;
    for (const Matrix& b : blocks) cols += b.cols;
    Matrix out(rows, cols);
    std::size_t off = 0;
    for (const Matrix& b : blocks) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < b.cols; ++j) out(i, off + j) = b(i, j);
        off += b.cols;
    }
    return out;
}

Matrix minus_identity(const FiniteRing& r, Matrix m) {
    for (std::size_t i = 0; i < m.rows; ++i) m(i, i) = r.sub(m(i, i), 1);
    return m;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

// Row echelon form over a field; returns pivot columns.
std::vector<std::size_t> echelon(const FiniteRing& r, Matrix& a) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols && row < a.rows; ++col) {
        std::size_t p = row;
        while (p < a.rows && a(p, col) == 0) ++p;
        if (p == a.rows) continue;
        for (std::size_t k = 0; k < a.cols; ++k) std::swap(a(row, k), a(p, k));
        const Scalar inv = *r.inverse(a(row, col));
        for (std::size_t k = 0; k < a.cols; ++k) a(row, k) = r.mul(a(row, k), inv);
        for (std::size_t i = 0; i < a.rows; ++i) {
            if (i == row || a(i, col) == 0) continue;
            const Scalar f = a(i, col);
            for (std::size_t k = 0; k < a.cols; ++k) a(i, k) = r.sub(a(i, k), r.mul(f, a(row, k)));
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

FiniteRing::FiniteRing(Scalar modulus) : n_(modulus), field_(is_prime(modulus)) {
    if (modulus < 2) throw InputError("ring modulus must be at least 2");
    if (modulus > 65536) throw InputError("ring modulus too large");
}

FiniteRing FiniteRing::prime_field(Scalar p) {
    if (!is_prime(p)) throw InputError("F_p needs a prime p, got " + std::to_string(p));
    return FiniteRing(p);
}

std::optional<Scalar> FiniteRing::inverse(Scalar a) const {
    const Egcd e = egcd(a % n_, n_);
    if (e.g != 1) return std::nullopt;
    return reduce(e.s, n_);
}

std::string FiniteRing::name() const { return (field_ ? "F" : "Z/") + std::to_string(n_); }

FiniteRing parse_ring(const std::string& text) {
    try {
        if (text.size() > 1 && (text[0] == 'F' || text[0] == 'f')) return FiniteRing::prime_field(std::stoul(text.substr(1)));
        if (text.rfind("Z/", 0) == 0 || text.rfind("z/", 0) == 0) return FiniteRing(std::stoul(text.substr(2)));
        if (text.size() > 1 && (text[0] == 'Z' || text[0] == 'z')) return FiniteRing(std::stoul(text.substr(1)));
    } catch (const std::logic_error&) {
    }
    throw InputError("unknown ring '" + text + "' (expected F<p> or Z/<n>)");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Row>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw InputError("row length mismatch");
        std::copy(rows[i].begin(), rows[i].end(), m.a.begin() + static_cast<std::ptrdiff_t>(i * cols));
    }
    return m;
}

Row Matrix::row(std::size_t i) const {
    return Row(a.begin() + static_cast<std::ptrdiff_t>(i * cols), a.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
}

Matrix multiply(const FiniteRing& r, const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw InputError("matrix dimension mismatch");
    Matrix out(x.rows, y.cols);
    const std::uint64_t n = r.modulus();
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < y.cols; ++j) {
            std::uint64_t acc = 0;
            for (std::size_t k = 0; k < x.cols; ++k) acc = (acc + std::uint64_t{x(i, k)} * y(k, j)) % n;
            out(i, j) = static_cast<Scalar>(acc);
        }
    return out;
}

Row apply(const FiniteRing& r, const Row& v, const Matrix& m) {
    if (v.size() != m.rows) throw InputError("vector length mismatch");
    Row out(m.cols, 0);
    const std::uint64_t n = r.modulus();
    for (std::size_t j = 0; j < m.cols; ++j) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < m.rows; ++k) acc = (acc + std::uint64_t{v[k]} * m(k, j)) % n;
        out[j] = static_cast<Scalar>(acc);
    }
    return out;
}

Diagonalization diagonalize(const FiniteRing& r, Matrix a) {
    const Scalar n = r.modulus();
    Diagonalization d{Matrix::identity(a.rows), Matrix::identity(a.rows), Matrix::identity(a.cols),
                      Matrix::identity(a.cols), {}};
    const std::size_t steps = std::min(a.rows, a.cols);

    auto row_op = [&](std::size_t i, std::size_t j, Scalar p, Scalar q, Scalar s, Scalar t, Scalar ip, Scalar iq,
                      Scalar is, Scalar it) {
        // T = [[p, q], [s, t]] on rows i, j; T^-1 = [[ip, iq], [is, it]].
        row_combine(r, a, i, j, p, q, s, t);
        row_combine(r, d.u, i, j, p, q, s, t);
        col_combine(r, d.u_inv, i, j, ip, is, iq, it);
    };
    auto col_op = [&](std::size_t i, std::size_t j, Scalar p, Scalar q, Scalar s, Scalar t, Scalar ip, Scalar iq,
                      Scalar is, Scalar it) {
        col_combine(r, a, i, j, p, q, s, t);
        col_combine(r, d.v, i, j, p, q, s, t);
        row_combine(r, d.v_inv, i, j, ip, is, iq, it);
    };

    for (std::size_t t = 0; t < steps; ++t) {
        std::size_t pi = a.rows, pj = a.cols;
        for (std::size_t i = t; i < a.rows && pi == a.rows; ++i)
            for (std::size_t j = t; j < a.cols; ++j)
                if (a(i, j) != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi == a.rows) break;
        if (pi != t) row_op(t, pi, 0, 1, 1, 0, 0, 1, 1, 0);
        if (pj != t) col_op(t, pj, 0, 1, 1, 0, 0, 1, 1, 0);
        for (bool dirty = true; dirty;) {
            dirty = false;
            for (std::size_t i = t + 1; i < a.rows; ++i) {
                if (a(i, t) == 0) continue;
                const Scalar x = a(t, t), y = a(i, t);
                const Egcd e = egcd(x, y);
                const Scalar s = reduce(e.s, n), tt = reduce(e.t, n);
                const Scalar xg = reduce(x / e.g, n), yg = reduce(y / e.g, n);
                row_op(t, i, s, tt, r.neg(yg), xg, xg, r.neg(tt), yg, s);
            }
            for (std::size_t j = t + 1; j < a.cols; ++j) {
                if (a(t, j) == 0) continue;
                const Scalar x = a(t, t), y = a(t, j);
                const Egcd e = egcd(x, y);
                const Scalar s = reduce(e.s, n), tt = reduce(e.t, n);
                const Scalar xg = reduce(x / e.g, n), yg = reduce(y / e.g, n);
                col_op(t, j, s, tt, r.neg(yg), xg, xg, r.neg(tt), yg, s);
            }
            for (std::size_t i = t + 1; i < a.rows; ++i)
                if (a(i, t) != 0) dirty = true;
        }
    }
    d.diagonal.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) d.diagonal[i] = a(i, i);
    return d;
}

std::vector<Row> left_kernel(const FiniteRing& r, const Matrix& a) {
    const Scalar n = r.modulus();
    const Diagonalization d = diagonalize(r, a);
    std::vector<Row> out;
    for (std::size_t i = 0; i < a.rows; ++i) {
        const Scalar di = i < d.diagonal.size() ? d.diagonal[i] : 0;
        const Scalar factor = n / gcd_mod(di, n);
        if (factor == n) continue;
        Row v = d.u.row(i);
        for (Scalar& x : v) x = r.mul(x, factor);
        if (std::any_of(v.begin(), v.end(), [](Scalar x) { return x != 0; })) out.push_back(std::move(v));
    }
    return out;
}

std::size_t field_rank(const FiniteRing& r, Matrix a) {
    if (!r.is_field()) throw InputError("field_rank needs a prime field");
    return echelon(r, a).size();
}

std::vector<Row> field_left_kernel(const FiniteRing& r, const Matrix& a) {
    if (!r.is_field()) throw InputError("field_left_kernel needs a prime field");
    Matrix t = transpose(a);
    const auto pivots = echelon(r, t);
    std::vector<bool> is_pivot(t.cols, false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<Row> basis;
    for (std::size_t free = 0; free < t.cols; ++free) {
        if (is_pivot[free]) continue;
        Row v(t.cols, 0);
        v[free] = 1;
        for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = r.neg(t(k, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

Submodule Submodule::span(const FiniteRing& r, std::size_t ambient, const std::vector<Row>& generators) {
    Submodule s(r, ambient);
    std::vector<Row> rows;
    for (const Row& g : generators) {
        if (g.size() != ambient) throw InputError("generator length mismatch");
        for (Scalar x : g)
            if (x >= r.modulus()) throw InputError("generator entry out of range");
        if (std::any_of(g.begin(), g.end(), [](Scalar x) { return x != 0; })) rows.push_back(g);
    }
    if (rows.empty()) return zero(r, ambient);
    const Scalar n = r.modulus();
    const Diagonalization d = diagonalize(r, Matrix::from_rows(rows, ambient));
    s.v_ = d.v;
    for (std::size_t i = 0; i < ambient; ++i) {
        const Scalar step = i < d.diagonal.size() ? gcd_mod(d.diagonal[i], n) : n;
        if (step == n) {
            s.zero_columns_.push_back(i);
            continue;
        }
        Row g = d.v_inv.row(i);
        for (Scalar& x : g) x = r.mul(x, step);
        s.gens_.push_back(std::move(g));
        s.orders_.push_back(n / step);
        s.steps_.push_back(step);
        s.columns_.push_back(i);
    }
    return s;
}

Submodule Submodule::whole(const FiniteRing& r, std::size_t ambient) {
    Submodule s(r, ambient);
    s.v_ = Matrix::identity(ambient);
    for (std::size_t i = 0; i < ambient; ++i) {
        Row g(ambient, 0);
        g[i] = 1;
        s.gens_.push_back(std::move(g));
        s.orders_.push_back(r.modulus());
        s.steps_.push_back(1);
        s.columns_.push_back(i);
    }
    return s;
}

Submodule Submodule::zero(const FiniteRing& r, std::size_t ambient) {
    Submodule s(r, ambient);
    s.v_ = Matrix::identity(ambient);
    for (std::size_t i = 0; i < ambient; ++i) s.zero_columns_.push_back(i);
    return s;
}

std::uint64_t Submodule::size() const {
    std::uint64_t total = 1;
    for (Scalar o : orders_) total = sat_mul(total, o);
    return total;
}

bool Submodule::contains(const Row& x) const {
    if (x.size() != ambient_) return false;
    const Row y = apply(ring_, x, v_);
    for (std::size_t c : zero_columns_)
        if (y[c] != 0) return false;
    for (std::size_t i = 0; i < gens_.size(); ++i)
        if (y[columns_[i]] % steps_[i] != 0) return false;
    return true;
}

bool Submodule::is_subset_of(const Submodule& other) const {
    if (ambient_ != other.ambient_ || !(ring_ == other.ring_)) return false;
    return std::all_of(gens_.begin(), gens_.end(), [&](const Row& g) { return other.contains(g); });
}

std::vector<Scalar> Submodule::coordinates(const Row& x) const {
    if (!contains(x)) throw InputError("vector is not in the submodule");
    const Row y = apply(ring_, x, v_);
    std::vector<Scalar> c(gens_.size());
    for (std::size_t i = 0; i < gens_.size(); ++i) c[i] = (y[columns_[i]] / steps_[i]) % orders_[i];
    return c;
}

std::uint64_t Submodule::index_of(const Row& x) const {
    const auto c = coordinates(x);
    std::uint64_t index = 0;
    for (std::size_t i = c.size(); i-- > 0;) index = index * orders_[i] + c[i];
    return index;
}

Row Submodule::element(std::uint64_t index) const {
    Row x(ambient_, 0);
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const Scalar c = static_cast<Scalar>(index % orders_[i]);
        index /= orders_[i];
        for (std::size_t k = 0; k < ambient_; ++k) x[k] = ring_.add(x[k], ring_.mul(c, gens_[i][k]));
    }
    if (index != 0) throw InputError("element index out of range");
    return x;
}

bool Submodule::is_free() const {
    return std::all_of(orders_.begin(), orders_.end(), [&](Scalar o) { return o == ring_.modulus(); });
}

RGModule::RGModule(GroupPtr group, FiniteRing ring, std::size_t rank, std::vector<Matrix> action)
    : group_(std::move(group)), ring_(ring), rank_(rank), action_(std::move(action)) {
    const FiniteGroup& g = *group_;
    if (action_.size() != g.order()) throw InputError("module needs one matrix per group element");
    for (std::size_t i = 0; i < action_.size(); ++i) {
        const Matrix& m = action_[i];
        if (m.rows != rank_ || m.cols != rank_) throw InputError("action matrix has the wrong shape");
        for (Scalar x : m.a)
            if (x >= ring_.modulus()) throw InputError("action entry out of range");
    }
    if (!(action_[g.identity()] == Matrix::identity(rank_)))
        throw AxiomError("identity does not act trivially", {{"element", g.identity()}});
    for (Elem a = 0; a < g.order(); ++a)
        for (Elem b = 0; b < g.order(); ++b)
            if (!(multiply(ring_, action_[a], action_[b]) == action_[g.mul(a, b)]))
                throw AxiomError("action is not multiplicative", {{"g", a}, {"h", b}});
}

RGModule RGModule::zero(const GroupPtr& g, const FiniteRing& r) {
    return RGModule(g, r, 0, std::vector<Matrix>(g->order(), Matrix(0, 0)));
}

RGModule RGModule::trivial(const GroupPtr& g, const FiniteRing& r, std::size_t rank) {
    return RGModule(g, r, rank, std::vector<Matrix>(g->order(), Matrix::identity(rank)));
}

RGModule RGModule::sign(const Subgroup& index_two, const FiniteRing& r) {
    const GroupPtr& g = index_two.group();
    if (index_two.size() * 2 != g->order()) throw InputError("sign module needs a subgroup of index 2");
    std::vector<Matrix> act;
    for (Elem x = 0; x < g->order(); ++x) {
        Matrix m(1, 1);
        m(0, 0) = index_two.contains(x) ? 1 : r.neg(1);
        act.push_back(m);
    }
    return RGModule(g, r, 1, std::move(act));
}

RGModule RGModule::permutation(const GSet& m, const FiniteRing& r) {
    const GroupPtr& g = m.group();
    std::vector<Matrix> act;
    for (Elem x = 0; x < g->order(); ++x) {
        Matrix p(m.size(), m.size());
        for (std::size_t i = 0; i < m.size(); ++i) p(i, m.act(i, x)) = 1;
        act.push_back(std::move(p));
    }
    return RGModule(g, r, m.size(), std::move(act));
}

RGModule RGModule::regular(const GroupPtr& g, const FiniteRing& r) { return permutation(GSet::regular(g), r); }

RGModule RGModule::direct_sum(const RGModule& a, const RGModule& b) {
    if (a.group_ != b.group_ && !(*a.group_ == *b.group_)) throw InputError("direct sum over different groups");
    if (!(a.ring_ == b.ring_)) throw InputError("direct sum over different rings");
    const std::size_t d = a.rank_ + b.rank_;
    std::vector<Matrix> act;
    for (Elem x = 0; x < a.group_->order(); ++x) {
        Matrix m(d, d);
        for (std::size_t i = 0; i < a.rank_; ++i)
            for (std::size_t j = 0; j < a.rank_; ++j) m(i, j) = a.action_[x](i, j);
        for (std::size_t i = 0; i < b.rank_; ++i)
            for (std::size_t j = 0; j < b.rank_; ++j) m(a.rank_ + i, a.rank_ + j) = b.action_[x](i, j);
        act.push_back(std::move(m));
    }
    return RGModule(a.group_, a.ring_, d, std::move(act));
}

RGModule RGModule::random_conjugate(const RGModule& m, std::mt19937_64& rng) {
    const FiniteRing& r = m.ring_;
    const std::size_t d = m.rank_;
    Matrix p = Matrix::identity(d), p_inv = Matrix::identity(d);
    if (d > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, d - 1);
        std::uniform_int_distribution<Scalar> coeff(1, r.modulus() - 1);
        for (std::size_t step = 0; step < 3 * d; ++step) {
            const std::size_t i = pick(rng), j = pick(rng);
            const Scalar c = coeff(rng);
            if (i != j) {
                // P <- E P, P^-1 <- P^-1 E^-1 with E = I + c e_ij
                for (std::size_t k = 0; k < d; ++k) p(i, k) = r.add(p(i, k), r.mul(c, p(j, k)));
                for (std::size_t k = 0; k < d; ++k) p_inv(k, j) = r.sub(p_inv(k, j), r.mul(c, p_inv(k, i)));
            } else if (auto ci = r.inverse(c)) {
                for (std::size_t k = 0; k < d; ++k) p(i, k) = r.mul(p(i, k), c);
                for (std::size_t k = 0; k < d; ++k) p_inv(k, i) = r.mul(p_inv(k, i), *ci);
            }
        }
    }
    std::vector<Matrix> act;
    for (const Matrix& a : m.action_) act.push_back(multiply(r, multiply(r, p_inv, a), p));
    return RGModule(m.group_, r, d, std::move(act));
}

namespace {

std::vector<Matrix> fixing_blocks(const RGModule& m, const Subgroup& h) {
    std::vector<Matrix> blocks;
    for (Elem x : h.elements())
        if (x != m.group()->identity()) blocks.push_back(minus_identity(m.ring(), m.action(x)));
    return blocks;
}

}  // namespace

Submodule fixed_submodule(const RGModule& m, const Subgroup& h) {
    const auto blocks = fixing_blocks(m, h);
    if (blocks.empty() || m.rank() == 0) return Submodule::whole(m.ring(), m.rank());
    return Submodule::span(m.ring(), m.rank(), left_kernel(m.ring(), hstack(blocks, m.rank())));
}

Submodule fixed_submodule_field(const RGModule& m, const Subgroup& h) {
    if (!m.ring().is_field()) throw InputError("Gaussian elimination needs a prime field, got " + m.ring().name());
    const auto blocks = fixing_blocks(m, h);
    if (blocks.empty() || m.rank() == 0) return Submodule::whole(m.ring(), m.rank());
    return Submodule::span(m.ring(), m.rank(), field_left_kernel(m.ring(), hstack(blocks, m.rank())));
}

ModulePresheaf::ModulePresheaf(CatPtr cat, FiniteRing ring, std::vector<Submodule> values, std::vector<Matrix> maps)
    : cat_(std::move(cat)), ring_(ring), values_(std::move(values)), maps_(std::move(maps)) {
    const FinCat& c = *cat_;
    if (values_.size() != c.num_objects()) throw InputError("module presheaf needs one value per object");
    if (maps_.size() != c.num_morphisms()) throw InputError("module presheaf needs one map per morphism");
    for (const Submodule& v : values_)
        if (!(v.ring() == ring_)) throw InputError("module presheaf values over different rings");
    for (Mor u = 0; u < c.num_morphisms(); ++u) {
        const Submodule& src = values_[c.cod(u)];
        const Submodule& dst = values_[c.dom(u)];
        const Matrix& a = maps_[u];
        if (a.rows != src.ambient() || a.cols != dst.ambient())
            throw InputError("map of morphism " + std::to_string(u) + " has the wrong shape");
        for (const Row& g : src.generators()) {
            const Row img = apply(ring_, g, a);
            if (!dst.contains(img)) throw AxiomError("restriction leaves the target module", {{"morphism", u}});
            if (c.is_identity(u) && img != g) throw AxiomError("identity does not restrict to identity", {{"morphism", u}});
        }
    }
    for (Obj y = 0; y < c.num_objects(); ++y)
        for (Mor u : c.into(y))  // u: x -> y
            for (Mor v : c.into(c.dom(u)))
                for (const Row& g : values_[y].generators()) {
                    const Row lhs = apply(ring_, apply(ring_, g, maps_[u]), maps_[v]);
                    if (lhs != apply(ring_, g, maps_[c.compose_unchecked(u, v)]))
                        throw AxiomError("restriction is not functorial", {{"u", u}, {"v", v}});
                }
}

std::uint64_t ModulePresheaf::total_size() const {
    std::uint64_t total = 0;
    for (const Submodule& v : values_) {
        const std::uint64_t s = v.size();
        total = s > std::numeric_limits<std::uint64_t>::max() - total ? std::numeric_limits<std::uint64_t>::max()
                                                                      : total + s;
    }
    return total;
}

Presheaf ModulePresheaf::materialize(std::size_t cap) const {
    if (total_size() > cap) throw BudgetExceeded("module materialization", cap);
    const FinCat& c = *cat_;
    std::vector<std::size_t> sizes;
    std::vector<std::vector<Row>> elems(values_.size());
    for (Obj x = 0; x < values_.size(); ++x) {
        sizes.push_back(values_[x].size());
        for (std::uint64_t i = 0; i < sizes.back(); ++i) elems[x].push_back(values_[x].element(i));
    }
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u)
        for (const Row& e : elems[c.cod(u)])
            maps[u].push_back(static_cast<Item>(values_[c.dom(u)].index_of(apply(ring_, e, maps_[u]))));
    return unchecked_presheaf(cat_, std::move(sizes), std::move(maps));
}

ModulePresheaf module_fixed_point_sheaf(const RGModule& m, const CatExtension& e) {
    std::vector<Submodule> values;
    for (const Subgroup& k : e.kernels) values.push_back(fixed_submodule(m, k));
    std::vector<Matrix> maps;
    for (Elem g : e.representative) maps.push_back(m.action(g));
    return ModulePresheaf(e.target, m.ring(), std::move(values), std::move(maps));
}

ModulePresheaf structure_sheaf(const CatPtr& cat, const FiniteRing& r) {
    return ModulePresheaf(cat, r, std::vector<Submodule>(cat->num_objects(), Submodule::whole(r, 1)),
                          std::vector<Matrix>(cat->num_morphisms(), Matrix::identity(1)));
}

ModulePresheaf zero_module_presheaf(const CatPtr& cat, const FiniteRing& r) {
    return ModulePresheaf(cat, r, std::vector<Submodule>(cat->num_objects(), Submodule::zero(r, 0)),
                          std::vector<Matrix>(cat->num_morphisms(), Matrix(0, 0)));
}

nlohmann::json ModuleSheafReport::to_json() const {
    nlohmann::json j{{"ok", ok}, {"mode", mode}};
    if (!witness.is_null()) j["witness"] = witness;
    return j;
}

namespace {

// F(x) -> F(x0)^{Stab(s0)}, t -> t·A_{s0}, must be a bijection for every x.
// Returns nullopt when End(x0) does not act transitively on some Hom(x0, x).
std::optional<nlohmann::json> linear_sheaf_witness(const ModulePresheaf& f, Obj x0) {
    const FinCat& c = *f.category();
    const FiniteRing& r = f.ring();
    const HomRange ends = c.hom(x0, x0);
    const Submodule& base = f.value(x0);
    const std::size_t d0 = base.ambient();
    const Matrix gens = Matrix::from_rows(base.generators(), d0);
    for (Obj x = 0; x < c.num_objects(); ++x) {
        const HomRange to_x = c.hom(x0, x);
        if (to_x.empty()) return std::nullopt;
        const Mor s0 = to_x[0];
        std::vector<bool> reached(to_x.size(), false);
        std::vector<Matrix> blocks;
        for (Mor a : ends) {
            const Mor s = c.compose_unchecked(s0, a);
            reached[s - to_x.first] = true;
            if (s == s0 && !c.is_identity(a) && gens.rows > 0)
                blocks.push_back(multiply(r, gens, minus_identity(r, f.map(a))));
        }
        if (std::find(reached.begin(), reached.end(), false) != reached.end()) return std::nullopt;

        Submodule fixed = base;
        if (!blocks.empty()) {
            std::vector<Row> fixed_gens;
            for (const Row& coeff : left_kernel(r, hstack(blocks, gens.rows))) fixed_gens.push_back(apply(r, coeff, gens));
            fixed = Submodule::span(r, d0, fixed_gens);
        }
        std::vector<Row> image;
        for (const Row& g : f.value(x).generators()) image.push_back(apply(r, g, f.map(s0)));
        const Submodule img = Submodule::span(r, d0, image);
        if (img.size() != f.value(x).size() || !(img == fixed))
            return nlohmann::json{{"object", x},
                                  {"value_size", f.value(x).size()},
                                  {"image_size", img.size()},
                                  {"fixed_size", fixed.size()},
                                  {"reason", img.size() != f.value(x).size() ? "comparison map not injective"
                                                                             : "comparison map not surjective"}};
    }
    return nlohmann::json();
}

}  // namespace

ModuleSheafReport is_module_sheaf(const ModulePresheaf& f, const Site& site, std::size_t cap, const SheafOptions& options) {
    ModuleSheafReport report;
    std::optional<bool> set_ok, linear_ok;
    nlohmann::json witness;
    if (f.total_size() <= cap) {
        const SheafReport s = is_sheaf(f.materialize(cap), site, options);
        set_ok = s.ok;
        if (!s.ok) witness = s.witness;
    }
    if (site.initial_object && site.topology.kind() != TopologyKind::Explicit) {
        if (auto w = linear_sheaf_witness(f, *site.initial_object)) {
            linear_ok = w->is_null();
            if (!*linear_ok && witness.is_null()) witness = *w;
        }
    }
    if (!set_ok && !linear_ok) throw BudgetExceeded("module sheaf check: materialization", cap);
    if (set_ok && linear_ok && *set_ok != *linear_ok)
        throw AxiomError("set-level and linear sheaf criteria disagree", {{"set", *set_ok}, {"linear", *linear_ok}});
    report.mode = set_ok && linear_ok ? "set+linear" : set_ok ? "set" : "linear";
    report.ok = set_ok.value_or(true) && linear_ok.value_or(true);
    report.witness = witness;
    return report;
}

RGModule module_at_x0(const ModulePresheaf& f, const CatExtension& e, Obj x0) {
    if (e.kernels[x0].size() != 1) throw InputError("value at x0 needs a trivial kernel at x0");
    const Submodule& v = f.value(x0);
    if (!v.is_free()) throw InputError("value at x0 is not a free module");
    const GroupPtr& g = e.source.group();
    const FiniteRing& r = f.ring();
    const std::size_t k = v.generators().size();
    std::vector<Matrix> act;
    for (Elem x = 0; x < g->order(); ++x) {
        const Matrix& a = f.map(e.rho.map(e.source.encode(x0, x0, x)));
        Matrix m(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto c = v.coordinates(apply(r, v.generators()[i], a));
            for (std::size_t j = 0; j < k; ++j) m(i, j) = c[j];
        }
        act.push_back(std::move(m));
    }
    return RGModule(g, r, k, std::move(act));
}

std::vector<CoherentEntry> coherent_check(const ModulePresheaf& f) {
    std::vector<CoherentEntry> out;
    for (Obj x = 0; x < f.values().size(); ++x)
        out.push_back({x, f.value(x).generators().size(), f.value(x).orders()});
    return out;
}

nlohmann::json coherent_report(const ModulePresheaf& f) {
    nlohmann::json objects = nlohmann::json::array();
    for (const CoherentEntry& c : coherent_check(f))
        objects.push_back({{"object", c.object},
                           {"label", f.category()->object_label(c.object)},
                           {"generators", c.generators},
                           {"orders", c.orders}});
    return {{"ring", f.ring().name()}, {"objects", objects}, {"finitely_generated", true}};
}

namespace {

struct NamedModule {
    std::string name;
    RGModule module;
    std::optional<GSet> points;  // set for permutation modules
};

std::vector<NamedModule> module_corpus(const GroupSiteBundle& b, const FiniteRing& r, std::size_t bound,
                                       std::size_t random_count, std::mt19937_64& rng) {
    const GroupPtr& g = b.group;
    std::vector<NamedModule> corpus;
    corpus.push_back({"zero", RGModule::zero(g, r), std::nullopt});
    if (bound >= 1) corpus.push_back({"trivial", RGModule::trivial(g, r), std::nullopt});
    std::vector<GSet> perms;
    for (const Subgroup& h : enumerate_subgroups(g)) {
        if (bound >= 1 && h.size() * 2 == g->order())
            corpus.push_back({"sign[" + h.label() + "]", RGModule::sign(h, r), std::nullopt});
        if (conjugacy_representative(h) == h && g->order() / h.size() <= bound) {
            perms.push_back(coset_gset(h));
            corpus.push_back({h.size() == 1 ? "regular" : "perm[" + h.label() + "\\G]",
                              RGModule::permutation(perms.back(), r), perms.back()});
        }
    }
    // Random sums of permutation and 1-dimensional modules, conjugated by a random P.
    for (std::size_t i = 0; i < random_count && bound >= 1; ++i) {
        RGModule m = RGModule::trivial(g, r, 0);
        std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
        for (int tries = 0; tries < 4; ++tries) {
            const GSet& p = perms[pick(rng)];
            if (m.rank() + p.size() <= bound) m = RGModule::direct_sum(m, RGModule::permutation(p, r));
        }
        if (m.rank() < bound) m = RGModule::direct_sum(m, RGModule::trivial(g, r));
        corpus.push_back({"random" + std::to_string(i), RGModule::random_conjugate(m, rng), std::nullopt});
    }
    return corpus;
}

// The map F+ -> F_M extending the inclusion of the presheaf concentrated at x0.
// F+(x0) = F(x0) through the unit, and elements of both sheaves are determined
// by their restriction along the first morphism x0 -> x.
std::optional<NatTrans> induced_comparison(const PlusResult& plus, const Presheaf& target, Obj x0) {
    const FinCat& c = *target.category();
    const Presheaf& p = plus.value;
    const auto& unit0 = plus.unit.components[x0];
    if (p.size(x0) != target.size(x0) || unit0.size() != p.size(x0)) return std::nullopt;
    std::vector<Item> from_plus(p.size(x0));
    for (Item i = 0; i < unit0.size(); ++i) from_plus[unit0[i]] = i;
    NatTrans eta{std::vector<std::vector<Item>>(c.num_objects())};
    for (Obj x = 0; x < c.num_objects(); ++x) {
        if (c.hom(x0, x).empty() || p.size(x) != target.size(x)) return std::nullopt;
        const Mor s0 = c.hom(x0, x)[0];
        std::vector<Item> lift(target.size(x0), static_cast<Item>(-1));
        for (Item t = 0; t < target.size(x); ++t) lift[target.at(s0, t)] = t;
        for (Item a = 0; a < p.size(x); ++a) {
            const Item t = lift[from_plus[p.at(s0, a)]];
            if (t == static_cast<Item>(-1)) return std::nullopt;
            eta.components[x].push_back(t);
        }
    }
    return eta;
}

}  // namespace

nlohmann::json verify_module_equivalence(const GroupSiteBundle& b, const FiniteRing& r, const ModuleOptions& options) {
    if (!b.pg_site.initial_object) throw InputError("verification needs a subgroup family with a least member");
    const GroupPtr& g = b.group;
    const std::size_t bound = options.rank_bound ? options.rank_bound : g->order();
    const CatExtension& e = b.extension;
    const FinCat& c = *e.target;
    nlohmann::json report{{"group_order", g->order()}, {"poset", b.poset_name}, {"quotient", b.quotient_name},
                          {"ring", r.name()},          {"rank_bound", bound},    {"seed", options.seed}};
    std::mt19937_64 rng(options.seed);
    const auto corpus = module_corpus(b, r, bound, options.random_modules, rng);

    bool ok = true;
    nlohmann::json modules = nlohmann::json::array();
    for (const NamedModule& item : corpus) {
        const RGModule& m = item.module;
        const ModulePresheaf f = module_fixed_point_sheaf(m, e);
        nlohmann::json entry{{"name", item.name}, {"rank", m.rank()}};

        const ModuleSheafReport sheaf = is_module_sheaf(f, b.c_site, options.cap, options.sheaf);
        entry["is_sheaf"] = sheaf.ok;
        entry["sheaf_mode"] = sheaf.mode;

        // Module -> sheaf -> value at x0 gives the same matrices.
        const RGModule back = module_at_x0(f, e, b.x0);
        entry["roundtrip"] = back.actions() == m.actions();

        // Sheaf -> value at x0 -> sheaf gives the same submodules objectwise.
        const ModulePresheaf again = module_fixed_point_sheaf(back, e);
        bool same_values = true;
        for (Obj x = 0; x < c.num_objects(); ++x) same_values = same_values && again.value(x) == f.value(x);
        entry["sheaf_roundtrip"] = same_values;

        // Second route for fixed points over a field.
        bool field_route = true;
        if (r.is_field())
            for (Obj x = 0; x < c.num_objects(); ++x)
                field_route = field_route && fixed_submodule_field(m, e.kernels[x]) == f.value(x);
        entry["field_route"] = field_route;

        nlohmann::json ranks = nlohmann::json::array();
        for (Obj x = 0; x < c.num_objects(); ++x) ranks.push_back(f.value(x).generators().size());
        entry["generators"] = ranks;

        // For permutation modules the value at x is free on the 𝒦(x)-orbit sums.
        bool orbit_ranks = true;
        if (item.points) {
            for (Obj x = 0; x < c.num_objects(); ++x) {
                std::size_t orbit_count = 0;
                std::vector<bool> seen(item.points->size(), false);
                for (std::size_t p = 0; p < seen.size(); ++p) {
                    if (seen[p]) continue;
                    ++orbit_count;
                    for (Elem k : e.kernels[x].elements()) seen[item.points->act(p, k)] = true;
                }
                orbit_ranks = orbit_ranks && f.value(x).is_free() && f.value(x).generators().size() == orbit_count;
            }
        }
        entry["orbit_ranks"] = orbit_ranks;

        // The presheaf concentrated at x0 sheafifies to F_M.
        bool concentrated = true;
        std::string concentrated_mode = "skipped";
        if (f.total_size() <= options.cap && f.value(b.x0).size() <= options.cap) {
            std::vector<Submodule> values(c.num_objects(), Submodule::zero(r, m.rank()));
            values[b.x0] = f.value(b.x0);
            std::vector<Matrix> maps;
            for (Mor u = 0; u < c.num_morphisms(); ++u)
                maps.push_back(c.dom(u) == b.x0 && c.cod(u) == b.x0 ? f.map(u) : Matrix(m.rank(), m.rank()));
            const ModulePresheaf gm(e.target, r, std::move(values), std::move(maps));
            const PlusResult plus = sheafify(gm.materialize(options.cap), b.c_site, options.sheaf);
            const Presheaf target = f.materialize(options.cap);
            const auto eta = induced_comparison(plus, target, b.x0);
            concentrated = eta && is_natural(plus.value, target, *eta) &&
                           is_componentwise_bijective(plus.value, target, *eta);
            concentrated_mode = "set";
        }
        entry["concentrated"] = concentrated;
        entry["concentrated_mode"] = concentrated_mode;

        const bool item_ok = sheaf.ok && entry["roundtrip"].get<bool>() && same_values && field_route && orbit_ranks &&
                             concentrated;
        entry["ok"] = item_ok;
        ok = ok && item_ok;
        modules.push_back(std::move(entry));
    }
    report["modules"] = modules;

    const ModuleSheafReport structure = is_module_sheaf(structure_sheaf(e.target, r), b.c_site, options.cap, options.sheaf);
    report["structure_sheaf"] = structure.to_json();
    ok = ok && structure.ok;
    report["ok"] = ok;
    return report;
}

}  // namespace finsheaf

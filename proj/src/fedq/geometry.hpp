#ifndef FEDQ_GEOMETRY_HPP
#define FEDQ_GEOMETRY_HPP

#include <array>
#include <optional>
#include <vector>

#include "fedq/scalarform.hpp"

namespace fedq {

struct ChartManifold {
    Ring kind = Ring::Euclidean;
    int n = 0;  // half-dimension
    int dim() const { return 2 * n; }
};

template <class S>
using Mat = std::vector<std::vector<S>>;

template <class S>
Mat<S> mat_identity(int m) {
    Mat<S> a(m, std::vector<S>(m, ScalarOps<S>::zero()));
    for (int i = 0; i < m; ++i) a[i][i] = ScalarOps<S>::one();
    return a;
}

template <class S>
Mat<S> standard_J(int n) {
    Mat<S> j(2 * n, std::vector<S>(2 * n, ScalarOps<S>::zero()));
    for (int i = 0; i < n; ++i) {
        j[i][n + i] = ScalarOps<S>::one();
        j[n + i][i] = -ScalarOps<S>::one();
    }
    return j;
}

template <class S>
Mat<S> mat_mul(const Mat<S>& a, const Mat<S>& b) {
    int m = (int)a.size(), p = (int)b[0].size(), inner = (int)b.size();
    Mat<S> c(m, std::vector<S>(p, ScalarOps<S>::zero()));
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < inner; ++k) {
            if (a[i][k].is_zero()) continue;
            for (int j = 0; j < p; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

template <class S>
Mat<S> mat_transpose(const Mat<S>& a) {
    int m = (int)a.size(), p = (int)a[0].size();
    Mat<S> c(p, std::vector<S>(m, ScalarOps<S>::zero()));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < p; ++j) c[j][i] = a[i][j];
    return c;
}

template <class S>
std::vector<S> mat_vec(const Mat<S>& a, const std::vector<S>& v) {
    std::vector<S> r(a.size(), ScalarOps<S>::zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
    return r;
}

template <class S>
Mat<S> mat_inverse(Mat<S> a) {
    int m = (int)a.size();
    Mat<S> inv = mat_identity<S>(m);
    for (int col = 0; col < m; ++col) {
        int pivot = -1;
        for (int r = col; r < m; ++r)
            if (!a[r][col].is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw DomainError("singular matrix");
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        S d = a[col][col];
        for (int j = 0; j < m; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int r = 0; r < m; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            S f = a[r][col];
            for (int j = 0; j < m; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

template <class S>
bool scalar_as_long(const S& v, long& out);

template <>
inline bool scalar_as_long<RationalComplex>(const RationalComplex& v, long& out) {
    if (v.im() != 0) return false;
    if (v.re().get_den() != 1) return false;
    if (!v.re().get_num().fits_slong_p()) return false;
    out = v.re().get_num().get_si();
    return true;
}
template <>
inline bool scalar_as_long<ApproxComplex>(const ApproxComplex& v, long& out) {
    if (std::abs(v.value().imag()) > ApproxComplex::kEps) return false;
    double r = std::round(v.value().real());
    if (std::abs(v.value().real() - r) > ApproxComplex::kEps) return false;
    out = long(r);
    return true;
}

// Substitutes x_i -> sum_j A[i][j] x_j + b[i] into a polynomial; also used to
// expand linear substitutions of the (symmetrically ordered) fiber variables.
template <class S>
BaseFunction<S> affine_substitute(const BaseFunction<S>& f, const Mat<S>& A,
                                  const std::vector<S>& b) {
    if (f.ring() != Ring::Euclidean) throw DomainError("affine_substitute needs polynomials");
    const int d = f.dim();
    std::vector<BaseFunction<S>> rows;
    rows.reserve(d);
    for (int i = 0; i < d; ++i) {
        BaseFunction<S> row(Ring::Euclidean, d);
        for (int j = 0; j < d; ++j) {
            if (A[i][j].is_zero()) continue;
            IdxVec key(d, 0);
            key[j] = 1;
            row.add_term(key, A[i][j]);
        }
        if (!b[i].is_zero()) row.add_term(IdxVec(d, 0), b[i]);
        rows.push_back(row);
    }
    BaseFunction<S> out(Ring::Euclidean, d);
    for (auto& [key, c] : f.terms()) {
        BaseFunction<S> term = BaseFunction<S>::constant(Ring::Euclidean, d, c);
        for (int i = 0; i < d; ++i)
            for (int q = 0; q < key[i]; ++q) term = term * rows[i];
        out += term;
    }
    return out;
}

// An affine symplectomorphism x -> A x + b. On the torus the linear part must
// be integral and the translation is carried by the per-coordinate unit
// phases u_j = e^{i b_j}, which keeps pullbacks exact in Q(i).
template <class S>
class AffineSymplecto {
  public:
    AffineSymplecto() = default;

    static AffineSymplecto euclidean(const Mat<S>& A, const std::vector<S>& b) {
        AffineSymplecto g;
        g.ring_ = Ring::Euclidean;
        g.A_ = A;
        g.b_ = b;
        g.validate();
        return g;
    }
    static AffineSymplecto torus(const Mat<S>& A, const std::vector<S>& phases) {
        AffineSymplecto g;
        g.ring_ = Ring::Torus;
        g.A_ = A;
        g.phases_ = phases;
        g.b_.assign(A.size(), ScalarOps<S>::zero());
        g.validate();
        return g;
    }
    static AffineSymplecto identity(Ring ring, int n) {
        AffineSymplecto g;
        g.ring_ = ring;
        g.A_ = mat_identity<S>(2 * n);
        g.b_.assign(2 * n, ScalarOps<S>::zero());
        if (ring == Ring::Torus) g.phases_.assign(2 * n, ScalarOps<S>::one());
        g.validate();
        return g;
    }

    Ring ring() const { return ring_; }
    int dim() const { return (int)A_.size(); }
    int n() const { return dim() / 2; }
    const Mat<S>& linear() const { return A_; }
    const std::vector<S>& translation() const { return b_; }
    const std::vector<S>& phases() const { return phases_; }

    bool is_identity() const {
        Mat<S> id = mat_identity<S>(dim());
        for (int i = 0; i < dim(); ++i) {
            for (int j = 0; j < dim(); ++j)
                if (A_[i][j] != id[i][j]) return false;
            if (!b_[i].is_zero()) return false;
            if (ring_ == Ring::Torus && phases_[i] != ScalarOps<S>::one()) return false;
        }
        return true;
    }

    // Composition as maps: (a.compose(b))(x) = a(b(x)).
    AffineSymplecto compose(const AffineSymplecto& o) const {
        if (ring_ != o.ring_ || dim() != o.dim()) throw DomainError("composing unlike maps");
        AffineSymplecto g;
        g.ring_ = ring_;
        g.A_ = mat_mul(A_, o.A_);
        g.b_ = mat_vec(A_, o.b_);
        for (int i = 0; i < dim(); ++i) g.b_[i] += b_[i];
        if (ring_ == Ring::Torus) {
            // phases of A b_o + b: u_i' = u_i * prod_j (u_o,j)^{A_ij}
            g.phases_.assign(dim(), ScalarOps<S>::one());
            for (int i = 0; i < dim(); ++i) {
                S u = phases_[i];
                for (int j = 0; j < dim(); ++j) {
                    long a;
                    if (!scalar_as_long(A_[i][j], a))
                        throw DomainError("torus linear part must be integral");
                    u *= int_power(o.phases_[j], a);
                }
                g.phases_[i] = u;
            }
        }
        g.validate();
        return g;
    }

    AffineSymplecto inverse() const {
        AffineSymplecto g;
        g.ring_ = ring_;
        g.A_ = mat_inverse(A_);
        g.b_ = mat_vec(g.A_, b_);
        for (auto& v : g.b_) v = -v;
        if (ring_ == Ring::Torus) {
            g.phases_.assign(dim(), ScalarOps<S>::one());
            for (int i = 0; i < dim(); ++i) {
                S u = ScalarOps<S>::one();
                for (int j = 0; j < dim(); ++j) {
                    long a;
                    if (!scalar_as_long(g.A_[i][j], a))
                        throw DomainError("torus linear part must be integral");
                    u *= int_power(phases_[j], -a);
                }
                g.phases_[i] = u;
            }
        }
        g.validate();
        return g;
    }

    std::vector<S> apply(const std::vector<S>& x) const {
        auto y = mat_vec(A_, x);
        for (int i = 0; i < dim(); ++i) y[i] += b_[i];
        return y;
    }

    // For torus points given as unit phases p_j = e^{i x_j}: the image point
    // has phases u_i * prod_j p_j^{A_ij}.
    std::vector<S> apply_phases(const std::vector<S>& p) const {
        std::vector<S> out(dim());
        for (int i = 0; i < dim(); ++i) {
            S u = phases_[i];
            for (int j = 0; j < dim(); ++j) {
                long a;
                if (!scalar_as_long(A_[i][j], a))
                    throw DomainError("torus linear part must be integral");
                u *= int_power(p[j], a);
            }
            out[i] = u;
        }
        return out;
    }

    friend bool operator==(const AffineSymplecto& a, const AffineSymplecto& b) {
        if (a.ring_ != b.ring_ || a.dim() != b.dim()) return false;
        for (int i = 0; i < a.dim(); ++i) {
            for (int j = 0; j < a.dim(); ++j)
                if (a.A_[i][j] != b.A_[i][j]) return false;
            if (a.b_[i] != b.b_[i]) return false;
            if (a.ring_ == Ring::Torus && a.phases_[i] != b.phases_[i]) return false;
        }
        return true;
    }

  private:
    static S int_power(const S& u, long e) {
        S acc = ScalarOps<S>::one();
        S base = e >= 0 ? u : ScalarOps<S>::one() / u;
        long m = e >= 0 ? e : -e;
        for (long q = 0; q < m; ++q) acc *= base;
        return acc;
    }

    void validate() const {
        int d = dim();
        if (d == 0 || (int)b_.size() != d) throw DomainError("malformed affine map");
        Mat<S> J = standard_J<S>(d / 2);
        Mat<S> t = mat_mul(mat_transpose(A_), mat_mul(J, A_));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (t[i][j] != J[i][j]) throw DomainError("linear part is not symplectic");
        if (ring_ == Ring::Torus) {
            if ((int)phases_.size() != d) throw DomainError("torus map needs unit phases");
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    long a;
                    if (!scalar_as_long(A_[i][j], a))
                        throw DomainError("torus linear part must be integral");
                }
                if (phases_[i] * phases_[i].conj() != ScalarOps<S>::one())
                    throw DomainError("torus translation phase must have unit modulus");
            }
        }
    }

    Ring ring_ = Ring::Euclidean;
    Mat<S> A_;
    std::vector<S> b_;
    std::vector<S> phases_;  // torus only
};

// ---- pullbacks -------------------------------------------------------------

template <class S>
BaseFunction<S> pullback(const AffineSymplecto<S>& g, const BaseFunction<S>& f) {
    if (f.ring() != g.ring() || f.dim() != g.dim())
        throw DomainError("pullback ring/dimension mismatch");
    if (f.ring() == Ring::Euclidean) return affine_substitute(f, g.linear(), g.translation());
    // e^{i m.x} -> (prod_j u_j^{m_j}) e^{i (A^T m).x}
    BaseFunction<S> out(Ring::Torus, f.dim());
    for (auto& [m, c] : f.terms()) {
        S phase = ScalarOps<S>::one();
        IdxVec freq(f.dim(), 0);
        for (int i = 0; i < f.dim(); ++i) {
            if (m[i] == 0) continue;
            long e = m[i];
            S u = g.phases()[i];
            S p = e >= 0 ? u : ScalarOps<S>::one() / u;
            for (long q = 0; q < std::abs(e); ++q) phase *= p;
            for (int j = 0; j < f.dim(); ++j) {
                long a;
                scalar_as_long(g.linear()[i][j], a);
                freq[j] += (int32_t)(a * m[i]);
            }
        }
        out.add_term(freq, c * phase);
    }
    return out;
}

template <class S>
FnSeries<S> pullback(const AffineSymplecto<S>& g, const FnSeries<S>& f) {
    FnSeries<S> out(f.ring(), f.dim(), f.order());
    for (auto& [k, c] : f.coeffs()) out.set(k, pullback(g, c));
    return out;
}

namespace detail {
// dx^{w} -> sum over assignments of targets with minors of A.
template <class S, class AddFn>
void pull_wedge(const Mat<S>& A, const Wedge& w, const AddFn& add) {
    int p = (int)w.size();
    std::vector<int> target(p, 0);
    int d = (int)A.size();
    std::function<void(int, const S&)> rec = [&](int pos, const S& coef) {
        if (coef.is_zero()) return;
        if (pos == p) {
            Wedge sorted;
            int sign = 1;
            Wedge tmp;
            for (int r = 0; r < p; ++r) {
                int s;
                Wedge nxt;
                if (!wedge_insert(target[r], sorted, nxt, s)) return;
                // appending on the right: account for the slot parity
                if (sorted.size() % 2 == 1) s = -s;
                sign *= s;
                sorted = nxt;
            }
            add(sorted, sign > 0 ? coef : -coef);
            return;
        }
        for (int j = 0; j < d; ++j) {
            if (A[w[pos]][j].is_zero()) continue;
            target[pos] = j;
            rec(pos + 1, coef * A[w[pos]][j]);
        }
    };
    rec(0, ScalarOps<S>::one());
}
}  // namespace detail

template <class S>
ScalarForm<S> pullback(const AffineSymplecto<S>& g, const ScalarForm<S>& s) {
    ScalarForm<S> out(s.ring(), s.dim(), s.degree(), s.order());
    for (auto& [w, f] : s.comps()) {
        FnSeries<S> pf = pullback(g, f);
        detail::pull_wedge(g.linear(), w,
                           [&](const Wedge& tw, const S& c) { out.add_comp(tw, pf.scaled(c)); });
    }
    return out;
}

// Pullback on Weyl sections: substitute on the base, transform the fiber
// variables by the linear part (the symmetric ordering is GL-equivariant, so
// the expansion is the commutative one), and transform the form indices.
template <class S>
WeylElement<S> pullback(const AffineSymplecto<S>& g, const WeylElement<S>& a) {
    const int d = 2 * a.n();
    WeylElement<S> out(a.n(), a.ring(), a.truncation());
    std::vector<S> zero(d, ScalarOps<S>::zero());
    for (auto& [key, f] : a.terms()) {
        BaseFunction<S> pulled = pullback(g, f);
        // expand y^alpha under y -> A y as a commutative polynomial
        BaseFunction<S> mono(Ring::Euclidean, d);
        mono.add_term(key.alpha, ScalarOps<S>::one());
        BaseFunction<S> expanded = affine_substitute(mono, g.linear(), zero);
        for (auto& [beta, c] : expanded.terms()) {
            IdxVec alpha(beta.begin(), beta.end());
            out.add_term(WeylKey{key.k, alpha}, pulled.scaled(c));
        }
    }
    return out;
}

template <class S>
WeylForm<S> pullback(const AffineSymplecto<S>& g, const WeylForm<S>& s) {
    WeylForm<S> out(s.n(), s.ring(), s.truncation(), s.degree());
    for (auto& [w, a] : s.comps()) {
        WeylElement<S> pa = pullback(g, a);
        detail::pull_wedge(g.linear(), w,
                           [&](const Wedge& tw, const S& c) { out.add_comp(tw, pa.scaled(c)); });
    }
    return out;
}

// ---- connections -----------------------------------------------------------

// Christoffel symbols Gamma^k_{ij} with base-function entries.
template <class S>
class Christoffel {
  public:
    using Key = std::array<int, 3>;  // (k, i, j)

    Christoffel() : ring_(Ring::Euclidean), dim_(0) {}
    Christoffel(Ring ring, int dim) : ring_(ring), dim_(dim) {}

    Ring ring() const { return ring_; }
    int dim() const { return dim_; }
    const std::map<Key, BaseFunction<S>>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    BaseFunction<S> at(int k, int i, int j) const {
        auto it = entries_.find(Key{k, i, j});
        return it == entries_.end() ? BaseFunction<S>(ring_, dim_) : it->second;
    }
    void add(int k, int i, int j, const BaseFunction<S>& f) {
        if (f.is_zero()) return;
        if (f.ring() != ring_ || f.dim() != dim_) throw DomainError("christoffel entry mismatch");
        Key key{k, i, j};
        auto it = entries_.find(key);
        if (it == entries_.end())
            entries_.emplace(key, f);
        else {
            it->second += f;
            if (it->second.is_zero()) entries_.erase(it);
        }
    }

    Christoffel operator-() const {
        Christoffel r(ring_, dim_);
        for (auto& [key, f] : entries_) r.entries_.emplace(key, -f);
        return r;
    }
    Christoffel& operator+=(const Christoffel& o) {
        for (auto& [key, f] : o.entries_) add(key[0], key[1], key[2], f);
        return *this;
    }
    Christoffel& operator-=(const Christoffel& o) { return *this += -o; }
    friend Christoffel operator+(Christoffel a, const Christoffel& b) { return a += b; }
    friend Christoffel operator-(Christoffel a, const Christoffel& b) { return a -= b; }
    Christoffel scaled(const S& c) const {
        Christoffel r(ring_, dim_);
        for (auto& [key, f] : entries_) r.add(key[0], key[1], key[2], f.scaled(c));
        return r;
    }
    friend bool operator==(const Christoffel& a, const Christoffel& b) {
        Christoffel d = a;
        d -= b;
        return d.entries_.empty();
    }
    friend bool operator!=(const Christoffel& a, const Christoffel& b) { return !(a == b); }

    // Lowered symbols Gamma_{kij} = sum_l J_{kl} Gamma^l_{ij}.
    BaseFunction<S> lowered(int k, int i, int j) const {
        int n = dim_ / 2;
        BaseFunction<S> f(ring_, dim_);
        if (k < n)
            f += at(k + n, i, j);
        else
            f -= at(k - n, i, j);
        return f;
    }

  private:
    Ring ring_;
    int dim_;
    std::map<Key, BaseFunction<S>> entries_;
};

struct ConnectionReport {
    bool torsion_free = true;
    bool symplectic = true;
    std::array<int, 3> violating{-1, -1, -1};
};

// Torsion-free: Gamma^k_{ij} symmetric in (i,j). Symplectic (with constant
// omega): the lowered symbols are totally symmetric.
template <class S>
ConnectionReport check_symplectic_connection(const Christoffel<S>& c) {
    ConnectionReport rep;
    int d = c.dim();
    for (int k = 0; k < d && rep.torsion_free; ++k)
        for (int i = 0; i < d && rep.torsion_free; ++i)
            for (int j = i + 1; j < d; ++j)
                if (c.at(k, i, j) != c.at(k, j, i)) {
                    rep.torsion_free = false;
                    rep.violating = {k, i, j};
                    break;
                }
    for (int k = 0; k < d && rep.symplectic; ++k)
        for (int i = 0; i < d && rep.symplectic; ++i)
            for (int j = 0; j < d; ++j) {
                if (c.lowered(k, i, j) != c.lowered(i, k, j) ||
                    c.lowered(k, i, j) != c.lowered(k, j, i)) {
                    rep.symplectic = false;
                    if (rep.violating[0] < 0) rep.violating = {k, i, j};
                    break;
                }
            }
    return rep;
}

// Builds the Christoffel table from a totally symmetric lowered tensor
// T_{kij}: Gamma^k = (J^{-1} T)^k = -J T.
template <class S>
Christoffel<S> christoffel_from_lowered(Ring ring, int dim,
                                        const std::map<std::array<int, 3>, BaseFunction<S>>& T) {
    int n = dim / 2;
    Christoffel<S> c(ring, dim);
    for (auto& [key, f] : T) {
        auto [k, i, j] = key;
        // Gamma^m_{ij} with J_{mk'} Gamma^{k'} = T: Gamma = J^{-1} T, J^{-1} = -J
        if (k < n)
            c.add(k + n, i, j, f);  // (-J)_{k+n, k} = ... resolved: -J maps e_k -> e_{k+n}
        else
            c.add(k - n, i, j, -f);
    }
    return c;
}

// Transformation of Christoffel symbols under an affine map (no inhomogeneous
// term since the Hessian of the map vanishes).
template <class S>
Christoffel<S> pullback(const AffineSymplecto<S>& g, const Christoffel<S>& c) {
    int d = c.dim();
    Mat<S> Ainv = mat_inverse(g.linear());
    Christoffel<S> out(c.ring(), d);
    for (auto& [key, f] : c.entries()) {
        auto [kc, ka, kb] = key;
        BaseFunction<S> pf = pullback(g, f);
        for (int k = 0; k < d; ++k) {
            if (Ainv[k][kc].is_zero()) continue;
            for (int i = 0; i < d; ++i) {
                if (g.linear()[ka][i].is_zero()) continue;
                for (int j = 0; j < d; ++j) {
                    if (g.linear()[kb][j].is_zero()) continue;
                    out.add(k, i, j, pf.scaled(Ainv[k][kc] * g.linear()[ka][i] *
                                               g.linear()[kb][j]));
                }
            }
        }
    }
    return out;
}

// ---- group actions ---------------------------------------------------------

enum class GroupKind : uint8_t { Finite, FreeAbelian };

// A finitely presented group acting by affine symplectomorphisms: a finite
// group given by its full multiplication table with a map on every element,
// or Z^k given on commuting generators.
template <class S>
class GroupAction {
  public:
    static GroupAction finite(std::vector<std::vector<int>> table,
                              std::vector<AffineSymplecto<S>> maps) {
        GroupAction a;
        a.kind_ = GroupKind::Finite;
        a.table_ = std::move(table);
        a.maps_ = std::move(maps);
        a.validate_finite();
        return a;
    }
    static GroupAction free_abelian(std::vector<AffineSymplecto<S>> generators) {
        GroupAction a;
        a.kind_ = GroupKind::FreeAbelian;
        a.maps_ = std::move(generators);
        a.validate_free_abelian();
        return a;
    }
    // Z/m generated by one map of exact order m.
    static GroupAction cyclic(const AffineSymplecto<S>& gen, int m) {
        std::vector<std::vector<int>> table(m, std::vector<int>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) table[i][j] = (i + j) % m;
        std::vector<AffineSymplecto<S>> maps;
        maps.push_back(AffineSymplecto<S>::identity(gen.ring(), gen.n()));
        for (int i = 1; i < m; ++i) maps.push_back(maps.back().compose(gen));
        return finite(std::move(table), std::move(maps));
    }

    GroupKind kind() const { return kind_; }
    int size() const { return kind_ == GroupKind::Finite ? (int)maps_.size() : -1; }
    int rank() const { return kind_ == GroupKind::FreeAbelian ? (int)maps_.size() : 0; }
    const std::vector<AffineSymplecto<S>>& maps() const { return maps_; }
    const AffineSymplecto<S>& map_of(int idx) const { return maps_.at(idx); }
    int compose_idx(int a, int b) const { return table_.at(a).at(b); }
    int identity_idx() const { return id_; }

    // generator indices: for finite groups every element counts as available;
    // for Z^k the stored maps are the generators.
    int generator_count() const { return (int)maps_.size(); }

  private:
    void validate_finite() {
        int m = (int)maps_.size();
        if ((int)table_.size() != m) throw DomainError("multiplication table size mismatch");
        id_ = -1;
        for (int e = 0; e < m; ++e) {
            bool is_id = true;
            for (int a = 0; a < m; ++a)
                is_id = is_id && table_[e][a] == a && table_[a][e] == a;
            if (is_id) {
                id_ = e;
                break;
            }
        }
        if (id_ < 0) throw DomainError("multiplication table has no identity");
        if (!maps_[id_].is_identity())
            throw DomainError("identity element must act by the identity map");
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                if (table_[a][b] < 0 || table_[a][b] >= m)
                    throw DomainError("multiplication table entry out of range");
                // composition of maps must respect the table exactly
                if (!(maps_[a].compose(maps_[b]) == maps_[table_[a][b]]))
                    throw DomainError("assignment does not respect the group relations");
            }
    }
    void validate_free_abelian() {
        for (size_t i = 0; i < maps_.size(); ++i)
            for (size_t j = i + 1; j < maps_.size(); ++j)
                if (!(maps_[i].compose(maps_[j]) == maps_[j].compose(maps_[i])))
                    throw DomainError("free-abelian generators must commute");
    }

    GroupKind kind_ = GroupKind::Finite;
    std::vector<std::vector<int>> table_;
    std::vector<AffineSymplecto<S>> maps_;
    int id_ = 0;
};

// Averages an affine connection over a finite group.
template <class S>
Christoffel<S> average_connection(const GroupAction<S>& act, const Christoffel<S>& c) {
    if (act.kind() != GroupKind::Finite)
        throw DomainError("averaging needs a finite group");
    Christoffel<S> acc(c.ring(), c.dim());
    for (auto& g : act.maps()) acc += pullback(g, c);
    return acc.scaled(ScalarOps<S>::one() / ScalarOps<S>::integer(act.size()));
}

// The connection obstruction D(gamma) = gamma^* c - c, one tensor per group
// element (finite) or generator (Z^k).
template <class S>
std::vector<Christoffel<S>> connection_obstruction_cocycle(const GroupAction<S>& act,
                                                           const Christoffel<S>& c) {
    std::vector<Christoffel<S>> out;
    for (auto& g : act.maps()) out.push_back(pullback(g, c) - c);
    return out;
}

}  // namespace fedq

#endif

#include "fedq/cohomology.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <set>

namespace fedq {

// ---- simplicial complexes ----------------------------------------------------

void SimplicialComplex::validate() const {
    std::set<std::array<int, 2>> edge_set(edges.begin(), edges.end());
    for (auto& e : edges) {
        if (e[0] < 0 || e[1] >= vertices || e[0] >= e[1])
            throw DomainError("malformed edge");
    }
    if (edge_set.size() != edges.size()) throw DomainError("duplicate edge");
    std::set<std::array<int, 3>> tri_set(triangles.begin(), triangles.end());
    if (tri_set.size() != triangles.size()) throw DomainError("duplicate triangle");
    for (auto& t : triangles) {
        if (!(t[0] < t[1] && t[1] < t[2]) || t[0] < 0 || t[2] >= vertices)
            throw DomainError("malformed triangle");
        for (auto& f : std::vector<std::array<int, 2>>{
                 {t[0], t[1]}, {t[0], t[2]}, {t[1], t[2]}})
            if (!edge_set.count(f)) throw DomainError("triangle face missing from edge list");
    }
}

SimplicialComplex SimplicialComplex::from_triangles(
    int vertices, const std::vector<std::array<int, 3>>& tris) {
    SimplicialComplex K;
    K.vertices = vertices;
    std::set<std::array<int, 2>> edge_set;
    std::set<std::array<int, 3>> tri_set;
    for (auto t : tris) {
        std::sort(t.begin(), t.end());
        tri_set.insert(t);
        edge_set.insert({t[0], t[1]});
        edge_set.insert({t[0], t[2]});
        edge_set.insert({t[1], t[2]});
    }
    K.edges.assign(edge_set.begin(), edge_set.end());
    K.triangles.assign(tri_set.begin(), tri_set.end());
    K.validate();
    return K;
}

SimplicialComplex SimplicialComplex::tetrahedron_boundary() {
    return from_triangles(4, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

SimplicialComplex SimplicialComplex::torus_minimal() {
    // the 7-vertex 2-neighborly triangulation: orbits of {0,1,3} and {0,2,3}
    // under i -> i+1 (mod 7)
    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < 7; ++i) {
        tris.push_back({i, (i + 1) % 7, (i + 3) % 7});
        tris.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return from_triangles(7, tris);
}

// ---- Smith normal form -------------------------------------------------------

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

// In-place Smith normal form; returns the diagonal invariant factors.
std::vector<mpz_class> smith_normal_form(ZMat m) {
    std::vector<mpz_class> factors;
    size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    size_t r = 0, c = 0;
    while (r < rows && c < cols) {
        // find a pivot of minimal absolute value
        size_t pr = rows, pc = cols;
        mpz_class best = 0;
        for (size_t i = r; i < rows; ++i)
            for (size_t j = c; j < cols; ++j) {
                if (m[i][j] == 0) continue;
                mpz_class a = abs(m[i][j]);
                if (best == 0 || a < best) {
                    best = a;
                    pr = i;
                    pc = j;
                }
            }
        if (pr == rows) break;  // all zero
        std::swap(m[r], m[pr]);
        for (size_t i = 0; i < rows; ++i) std::swap(m[i][c], m[i][pc]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (size_t i = r + 1; i < rows; ++i) {
                if (m[i][c] == 0) continue;
                mpz_class q = m[i][c] / m[r][c];
                if (q != 0)
                    for (size_t j = c; j < cols; ++j) m[i][j] -= q * m[r][j];
                if (m[i][c] != 0) {
                    std::swap(m[r], m[i]);  // smaller remainder becomes pivot
                    clean = false;
                }
            }
            for (size_t j = c + 1; j < cols; ++j) {
                if (m[r][j] == 0) continue;
                mpz_class q = m[r][j] / m[r][c];
                if (q != 0)
                    for (size_t i = r; i < rows; ++i) m[i][j] -= q * m[i][c];
                if (m[r][j] != 0) {
                    for (size_t i = 0; i < rows; ++i) std::swap(m[i][c], m[i][j]);
                    clean = false;
                }
            }
        }
        factors.push_back(abs(m[r][c]));
        ++r;
        ++c;
    }
    // enforce divisibility of successive factors
    for (size_t i = 0; i + 1 < factors.size(); ++i)
        for (size_t j = i + 1; j < factors.size(); ++j)
            if (factors[j] % factors[i] != 0) {
                mpz_class g = gcd(factors[i], factors[j]);
                mpz_class l = factors[i] / g * factors[j];
                factors[i] = g;
                factors[j] = l;
            }
    std::sort(factors.begin(), factors.end());
    return factors;
}

}  // namespace

CohomologyReport simplicial_cohomology(const SimplicialComplex& K, CoeffRing coeff) {
    K.validate();
    int V = K.vertices, E = (int)K.edges.size(), T = (int)K.triangles.size();
    std::map<std::array<int, 2>, int> edge_idx;
    for (int e = 0; e < E; ++e) edge_idx[K.edges[e]] = e;

    // coboundary d0: C^0 -> C^1, rows = edges
    ZMat d0(E, std::vector<mpz_class>(V, 0));
    for (int e = 0; e < E; ++e) {
        d0[e][K.edges[e][1]] += 1;
        d0[e][K.edges[e][0]] -= 1;
    }
    // coboundary d1: C^1 -> C^2, rows = triangles
    ZMat d1(T, std::vector<mpz_class>(E, 0));
    for (int t = 0; t < T; ++t) {
        auto& tr = K.triangles[t];
        d1[t][edge_idx[{tr[1], tr[2]}]] += 1;
        d1[t][edge_idx[{tr[0], tr[2]}]] -= 1;
        d1[t][edge_idx[{tr[0], tr[1]}]] += 1;
    }

    auto f0 = smith_normal_form(d0);
    auto f1 = smith_normal_form(d1);
    int rank0 = 0, rank1 = 0;
    for (auto& f : f0) rank0 += f != 0;
    for (auto& f : f1) rank1 += f != 0;

    CohomologyReport rep;
    rep.free_rank[0] = V - rank0;
    rep.free_rank[1] = (E - rank1) - rank0;
    rep.free_rank[2] = T - rank1;
    if (coeff == CoeffRing::Z) {
        for (auto& f : f0)
            if (f > 1) rep.torsion[1].push_back(f.get_si());
        for (auto& f : f1)
            if (f > 1) rep.torsion[2].push_back(f.get_si());
    }
    return rep;
}

// ---- finite groups and the H^2 connecting map --------------------------------

int FiniteGroup::inv(int a) const {
    for (int b = 0; b < size(); ++b)
        if (mul(a, b) == identity) return b;
    throw DomainError("group element has no inverse");
}

void FiniteGroup::validate() const {
    int m = size();
    for (auto& row : table) {
        if ((int)row.size() != m) throw DomainError("ragged multiplication table");
        for (int v : row)
            if (v < 0 || v >= m) throw DomainError("table entry out of range");
    }
    for (int a = 0; a < m; ++a)
        if (mul(identity, a) != a || mul(a, identity) != a)
            throw DomainError("identity element is wrong");
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                    throw DomainError("multiplication table is not associative");
    for (int a = 0; a < m; ++a) inv(a);
}

FiniteGroup FiniteGroup::cyclic(int m) {
    FiniteGroup g;
    g.table.assign(m, std::vector<int>(m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) g.table[a][b] = (a + b) % m;
    g.identity = 0;
    return g;
}

void CentralExtension::validate() const {
    A.validate();
    E.validate();
    G.validate();
    if ((int)inject.size() != A.size() || (int)project.size() != E.size())
        throw DomainError("extension maps have wrong domain");
    // injectivity and homomorphism
    std::set<int> seen;
    for (int a = 0; a < A.size(); ++a) {
        if (!seen.insert(inject[a]).second) throw DomainError("A -> E is not injective");
        for (int b = 0; b < A.size(); ++b)
            if (inject[A.mul(a, b)] != E.mul(inject[a], inject[b]))
                throw DomainError("A -> E is not a homomorphism");
    }
    for (int e = 0; e < E.size(); ++e)
        for (int f = 0; f < E.size(); ++f)
            if (project[E.mul(e, f)] != G.mul(project[e], project[f]))
                throw DomainError("E -> G is not a homomorphism");
    // centrality of the image of A
    for (int a = 0; a < A.size(); ++a)
        for (int e = 0; e < E.size(); ++e)
            if (E.mul(inject[a], e) != E.mul(e, inject[a]))
                throw DomainError("extension is not central");
    // exactness: ker(project) = image(inject)
    int ker = 0;
    for (int e = 0; e < E.size(); ++e) ker += project[e] == G.identity;
    if (ker != A.size()) throw DomainError("extension is not exact");
    for (int a = 0; a < A.size(); ++a)
        if (project[inject[a]] != G.identity) throw DomainError("composite A -> G is nonzero");
}

void GammaOnExtension::validate(const CentralExtension& ext) const {
    if (!is_z) gamma.validate();
    int m = is_z ? 1 : gamma.size();
    if ((int)action_E.size() != m) throw DomainError("action table has wrong size");
    for (auto& row : action_E) {
        if ((int)row.size() != ext.E.size()) throw DomainError("action row has wrong size");
        for (int e = 0; e < ext.E.size(); ++e)
            for (int f = 0; f < ext.E.size(); ++f)
                if (row[ext.E.mul(e, f)] != ext.E.mul(row[e], row[f]))
                    throw DomainError("action is not by automorphisms");
    }
    if (!is_z) {
        // homomorphism property on the table
        for (int g = 0; g < m; ++g)
            for (int h = 0; h < m; ++h)
                for (int e = 0; e < ext.E.size(); ++e)
                    if (action_E[gamma.mul(g, h)][e] != action_E[g][action_E[h][e]])
                        throw DomainError("action tables do not compose");
    }
}

namespace {

// index of e in the image of inject, or -1
int preimage_in_A(const CentralExtension& ext, int e) {
    for (int a = 0; a < ext.A.size(); ++a)
        if (ext.inject[a] == e) return a;
    return -1;
}

int induced_on_A(const CentralExtension& ext, const GammaOnExtension& act, int gidx, int a) {
    int img = act.act(gidx, ext.inject[a]);
    int back = preimage_in_A(ext, img);
    if (back < 0) throw DomainError("action does not preserve the central subgroup");
    return back;
}

}  // namespace

H2ClassReport connecting_map_H2(const CentralExtension& ext, const GammaOnExtension& act,
                                const std::vector<int>& eta) {
    ext.validate();
    act.validate(ext);
    H2ClassReport rep;

    if (act.is_z) {
        // one free generator: any preimage of eta[0] defines a genuine lift,
        // so the connecting class is trivial
        if (eta.size() != 1) throw DomainError("Z-action takes one generator value");
        rep.trivial = true;
        rep.note = "free generator: every lift is a cocycle";
        return rep;
    }

    const FiniteGroup& Gm = act.gamma;
    int m = Gm.size();
    if ((int)eta.size() != m) throw DomainError("cocycle must be defined on every element");

    // induced action on G
    auto act_G = [&](int gidx, int g) {
        for (int e = 0; e < ext.E.size(); ++e)
            if (ext.project[e] == g) return ext.project[act.act(gidx, e)];
        throw DomainError("projection is not surjective");
    };
    // verify eta is a 1-cocycle: eta(mu o gamma) = eta(gamma) gamma(eta(mu))
    for (int g = 0; g < m; ++g)
        for (int u = 0; u < m; ++u)
            if (eta[Gm.mul(u, g)] != ext.G.mul(eta[g], act_G(g, eta[u])))
                throw DomainError("eta is not a 1-cocycle");

    // lift through the projection (first preimage)
    std::vector<int> lift(m);
    for (int g = 0; g < m; ++g) {
        int found = -1;
        for (int e = 0; e < ext.E.size(); ++e)
            if (ext.project[e] == eta[g]) {
                found = e;
                break;
            }
        lift[g] = found;
    }

    // a(gamma, mu) = E_gamma gamma(E_mu) E_{mu gamma}^{-1} in A
    std::vector<std::vector<int>> a(m, std::vector<int>(m));
    for (int g = 0; g < m; ++g)
        for (int u = 0; u < m; ++u) {
            int v = ext.E.mul(ext.E.mul(lift[g], act.act(g, lift[u])),
                              ext.E.inv(lift[Gm.mul(u, g)]));
            int back = preimage_in_A(ext, v);
            if (back < 0) throw ConsistencyError("lift defect left the central subgroup");
            a[g][u] = back;
        }

    // 2-cocycle identity (values in the abelian group A):
    // a(gm, x)^{-1} g(a(m, x)) a(g, mx) a(g, m)^{-1} = 1
    for (int g = 0; g < m; ++g)
        for (int u = 0; u < m; ++u)
            for (int x = 0; x < m; ++x) {
                int lhs = ext.A.mul(
                    ext.A.mul(ext.A.inv(a[Gm.mul(g, u)][x]), induced_on_A(ext, act, g, a[u][x])),
                    ext.A.mul(a[g][Gm.mul(u, x)], ext.A.inv(a[g][u])));
                if (lhs != ext.A.identity)
                    throw ConsistencyError("connecting value fails the 2-cocycle identity");
            }

    // exhaustive coboundary test: a ~ (delta lambda)(g,u) = lambda_g g(lambda_u)
    // lambda_{u g}^{-1} over all lambda: Gamma -> A
    long total = 1;
    for (int g = 0; g < m; ++g) {
        total *= ext.A.size();
        if (total > 4000000L) throw DomainError("coboundary enumeration too large");
    }
    rep.trivial = false;
    for (long code = 0; code < total && !rep.trivial; ++code) {
        long rem = code;
        std::vector<int> lam(m);
        for (int g = 0; g < m; ++g) {
            lam[g] = rem % ext.A.size();
            rem /= ext.A.size();
        }
        bool match = true;
        for (int g = 0; g < m && match; ++g)
            for (int u = 0; u < m && match; ++u) {
                int cb = ext.A.mul(ext.A.mul(lam[g], induced_on_A(ext, act, g, lam[u])),
                                   ext.A.inv(lam[Gm.mul(u, g)]));
                match = cb == a[g][u];
            }
        if (match) rep.trivial = true;
    }
    rep.cocycle = a;
    rep.note = rep.trivial ? "cobounds after exhaustive enumeration"
                           : "no coboundary matches (exhaustive)";
    return rep;
}

}  // namespace fedq

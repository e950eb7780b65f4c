#include "pinchlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace pinchlab {

PantsGroup build_pants(double l1, double l2, double l3) {
    PantsGroup p;
    p.hexagon = hexagon(l1, l2, l3);
    p.lengths = {l1, l2, l3};
    for (int i = 0; i < 3; ++i) p.reflections[i] = p.hexagon.T[i].reflection();
    for (int i = 0; i < 3; ++i) p.gamma[i] = p.reflections[(i + 2) % 3] * p.reflections[(i + 1) % 3];
    return p;
}

cplx SlotChart::point(double x, double a) const {
    if (ell == 0.0) {
        if (a == 0.0) throw Error(ErrorKind::Domain, "SlotChart: a = 0 in a cusp chart");
        return P.apply({a < 0.0 ? -x : x, 1.0 / std::abs(a)});
    }
    return P.apply(model_to_halfplane(ell, {x, a}));
}

namespace {

MobiusMatrix positive_trace(const MobiusMatrix& m) {
    const MobiusMatrix n = m.normalized();
    if (n.trace() >= 0.0) return n;
    return {-n.a, -n.b, -n.c, -n.d};
}

std::array<double, 2> eigenvector(const MobiusMatrix& m, double lambda) {
    const std::array<double, 2> v1{m.b, lambda - m.a};
    const std::array<double, 2> v2{lambda - m.d, m.c};
    const double n1 = std::hypot(v1[0], v1[1]);
    const double n2 = std::hypot(v2[0], v2[1]);
    if (n1 >= n2) return {v1[0] / n1, v1[1] / n1};
    return {v2[0] / n2, v2[1] / n2};
}

} // namespace

SlotChart slot_chart(const PantsGroup& pants, int slot) {
    if (slot < 0 || slot > 2) throw Error(ErrorKind::Domain, "slot_chart: slot must be 0, 1 or 2");
    const MobiusMatrix g = positive_trace(pants.gamma[slot]);
    const ProjectiveCircle& seam = pants.hexagon.T[(slot + 1) % 3];
    const auto ends = seam.endpoints();
    SlotChart chart;
    chart.ell = pants.lengths[slot];
    if (chart.ell > 0.0) {
        const double t = g.trace();
        const double lam = 0.5 * (t + std::sqrt(std::max(t * t - 4.0, 0.0)));
        const auto va = eigenvector(g, lam);
        const auto vr = eigenvector(g, 1.0 / lam);
        MobiusMatrix P{va[0], vr[0], va[1], vr[1]};
        if (P.det() < 0.0) {
            P.b = -P.b;
            P.d = -P.d;
        }
        P = P.normalized();
        const MobiusMatrix Pi = P.inverse();
        const cplx e1 = Pi.apply({ends[0], 0.0});
        const cplx e2 = Pi.apply({ends[1], 0.0});
        const double r = std::sqrt(std::abs(e1.real() * e2.real()));
        if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::Degeneracy, "slot_chart: seam not centred on the axis");
        const double s = std::sqrt(r);
        chart.P = P * MobiusMatrix{s, 0.0, 0.0, 1.0 / s};
        return chart;
    }
    // parabolic: conjugate gamma to z -> z - 1 (the orientation forced by the hexagon)
    const double al = g.a - 1.0, be = g.b, ka = g.c;
    MobiusMatrix P;
    if (std::hypot(be, al) >= std::hypot(al, ka)) {
        P = {be, 0.0, -al, 1.0};
    } else {
        P = {al, 1.0, ka, 0.0};
    }
    if (P.det() < 0.0) {
        P.b = -P.b;
        P.d = -P.d;
    }
    {
        const MobiusMatrix hn = positive_trace(P.inverse() * g * P);
        const double shift = hn.b / hn.a;
        if (!(shift < 0.0)) throw Error(ErrorKind::Degeneracy, "slot_chart: bad parabolic orientation");
        const double s = std::sqrt(-shift);
        P = P * MobiusMatrix{s, 0.0, 0.0, 1.0 / s};
    }
    P = P.normalized();
    const MobiusMatrix Pi = P.inverse();
    const cplx e1 = Pi.apply({ends[0], 0.0});
    const cplx e2 = Pi.apply({ends[1], 0.0});
    const double c = std::abs(e1.real()) < std::abs(e2.real()) ? e1.real() : e2.real();
    chart.P = P * MobiusMatrix{1.0, c, 0.0, 1.0};
    return chart;
}

// ---------------------------------------------------------------------------

int AugmentedGraph::vertex_index(const std::string& id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == id) return static_cast<int>(i);
    throw Error(ErrorKind::Graph, "unknown vertex '" + id + "'");
}

int AugmentedGraph::edge_index(const std::string& id) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].id == id) return static_cast<int>(i);
    throw Error(ErrorKind::Graph, "unknown edge '" + id + "'");
}

int AugmentedGraph::partner(int edge) const {
    const auto& p = edges.at(edge).pair;
    return p ? edge_index(*p) : -1;
}

int AugmentedGraph::edge_at(int vertex, int slot) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].from_vertex == vertices.at(vertex) && edges[i].slot == slot) return static_cast<int>(i);
    throw Error(ErrorKind::Graph, "vertex '" + vertices.at(vertex) + "' has no edge in slot " + std::to_string(slot));
}

std::pair<int, int> AugmentedGraph::type() const {
    int proper = 0, phantom = 0;
    for (const auto& e : edges) (e.pair ? proper : phantom)++;
    const int V = static_cast<int>(vertices.size());
    const int n = phantom;
    const int twice_p = V + 2 - n;
    if (twice_p < 0 || twice_p % 2 != 0)
        throw Error(ErrorKind::Graph, "vertex count incompatible with any type (p, n)");
    const int p = twice_p / 2;
    if (proper % 2 != 0 || proper / 2 != 3 * p - 3 + n)
        throw Error(ErrorKind::Graph, "edge count incompatible with derived type (p, n)");
    return {p, n};
}

void AugmentedGraph::validate() const {
    if (vertices.empty()) throw Error(ErrorKind::Graph, "graph has no vertices");
    std::set<std::string> vset(vertices.begin(), vertices.end());
    if (vset.size() != vertices.size()) throw Error(ErrorKind::Graph, "duplicate vertex id");
    std::set<std::string> eset;
    for (const auto& e : edges)
        if (!eset.insert(e.id).second) throw Error(ErrorKind::Graph, "duplicate edge id '" + e.id + "'");
    std::set<std::pair<std::string, int>> slots;
    for (const auto& e : edges) {
        if (!vset.count(e.from_vertex))
            throw Error(ErrorKind::Graph, "edge '" + e.id + "' starts at unknown vertex '" + e.from_vertex + "'");
        if (e.slot < 0 || e.slot > 2) throw Error(ErrorKind::Graph, "edge '" + e.id + "' has slot outside {0,1,2}");
        if (!slots.insert({e.from_vertex, e.slot}).second)
            throw Error(ErrorKind::Graph, "two edges share slot " + std::to_string(e.slot) + " of vertex '" + e.from_vertex + "'");
        if (e.pair) {
            if (*e.pair == e.id) throw Error(ErrorKind::Graph, "edge '" + e.id + "' is paired with itself");
            if (!eset.count(*e.pair)) throw Error(ErrorKind::Graph, "edge '" + e.id + "' paired with unknown edge");
        }
    }
    for (const auto& e : edges) {
        if (!e.pair) continue;
        const auto& f = edges[edge_index(*e.pair)];
        if (!f.pair || *f.pair != e.id) throw Error(ErrorKind::Graph, "pairing of edge '" + e.id + "' is not an involution");
    }
    if (slots.size() != 3 * vertices.size()) throw Error(ErrorKind::Graph, "every vertex needs exactly three edges");
    // connectivity through proper edges
    std::vector<char> seen(vertices.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (edges[i].from_vertex != vertices[v] || !edges[i].pair) continue;
            const int w = vertex_index(edges[edge_index(*edges[i].pair)].from_vertex);
            if (!seen[w]) {
                seen[w] = 1;
                queue.push_back(w);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw Error(ErrorKind::Graph, "graph is not connected");
    (void)type();
}

EdgeLabel FNLabel::at(const AugmentedGraph& g, int edge) const {
    const auto& e = g.edges.at(edge);
    const auto it = labels.find(e.id);
    std::optional<EdgeLabel> mine, theirs;
    if (it != labels.end()) mine = it->second;
    if (e.pair) {
        const auto jt = labels.find(*e.pair);
        if (jt != labels.end()) theirs = jt->second;
    }
    if (mine && theirs && (mine->ell != theirs->ell || mine->tau != theirs->tau))
        throw Error(ErrorKind::Graph, "inconsistent labels on the two orientations of edge '" + e.id + "'");
    const auto out = mine ? mine : theirs;
    if (!out) throw Error(ErrorKind::Graph, "edge '" + e.id + "' has no label");
    if (!(out->ell >= 0.0) || !std::isfinite(out->ell))
        throw Error(ErrorKind::Graph, "edge '" + e.id + "' has invalid length");
    if (!std::isfinite(out->tau)) throw Error(ErrorKind::Graph, "edge '" + e.id + "' has invalid twist");
    return *out;
}

// ---------------------------------------------------------------------------

MobiusMatrix gluing_isometry(const PantsGroup& q, int slot_i, const PantsGroup& qp, int slot_j, double tau) {
    const double ell = q.lengths[slot_i];
    if (ell < 1e-6) throw Error(ErrorKind::Degeneracy, "gluing needs l >= 1e-6");
    if (std::abs(qp.lengths[slot_j] - ell) > 1e-12 * std::max(1.0, ell))
        throw Error(ErrorKind::Degeneracy, "glued boundaries have different lengths");
    const SlotChart ci = slot_chart(q, slot_i);
    const SlotChart cj = slot_chart(qp, slot_j);
    const double h = std::exp(0.5 * ell * tau);
    const MobiusMatrix D{h, 0.0, 0.0, 1.0 / h};
    const MobiusMatrix J{0.0, -1.0, 1.0, 0.0};
    return (ci.P * D * J * cj.P.inverse()).normalized();
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t descriptor(const AugmentedGraph& g, const FNLabel& l) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& v : g.vertices) os << "v:" << v << ';';
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        const EdgeLabel lab = l.at(g, static_cast<int>(i));
        os << "e:" << e.id << ',' << e.from_vertex << ',' << e.slot << ',' << (e.pair ? *e.pair : "-") << ','
           << lab.ell << ',' << lab.tau << ';';
    }
    return fnv1a(os.str());
}

/// Eliminate generators one relation at a time (Tietze moves).
struct Presentation {
    int symbols = 0;
    std::vector<Word> expr;
    std::vector<Word> relations;
    std::vector<char> alive;

    static Word substitute(const Word& w, int sym, const Word& e) {
        Word out;
        const Word ei = inverse_word(e);
        for (int x : w) {
            const int s = std::abs(x) - 1;
            if (s == sym) {
                const Word& part = x > 0 ? e : ei;
                out.insert(out.end(), part.begin(), part.end());
            } else {
                out.push_back(x);
            }
        }
        return free_reduce(out);
    }

    void eliminate() {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t r = 0; r < relations.size(); ++r) {
                const Word& rel = relations[r];
                std::vector<int> count(symbols, 0);
                for (int x : rel) count[std::abs(x) - 1]++;
                int pick = -1;
                for (std::size_t k = 0; k < rel.size(); ++k) {
                    const int s = std::abs(rel[k]) - 1;
                    if (count[s] == 1 && (pick < 0 || s > std::abs(rel[pick]) - 1)) pick = static_cast<int>(k);
                }
                if (pick < 0) continue;
                const int s = std::abs(rel[pick]) - 1;
                // rel = u x v = 1  =>  x = u^{-1} v^{-1}
                const Word u(rel.begin(), rel.begin() + pick);
                const Word v(rel.begin() + pick + 1, rel.end());
                Word x = inverse_word(u);
                const Word vi = inverse_word(v);
                x.insert(x.end(), vi.begin(), vi.end());
                x = free_reduce(x);
                const Word e = rel[pick] > 0 ? x : inverse_word(x);
                relations.erase(relations.begin() + static_cast<long>(r));
                for (auto& w : expr) w = substitute(w, s, e);
                for (auto& w : relations) w = substitute(w, s, e);
                relations.erase(std::remove_if(relations.begin(), relations.end(), [](const Word& w) { return w.empty(); }),
                                relations.end());
                alive[s] = 0;
                progress = true;
                break;
            }
        }
    }
};

cplx hyperboloid_midpoint(cplx z1, cplx z2) {
    auto lift = [](cplx z) {
        const double x = z.real(), y = z.imag();
        const double r2 = x * x + y * y;
        return std::array<double, 3>{(r2 + 1.0) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y};
    };
    const auto p = lift(z1), q = lift(z2);
    std::array<double, 3> m{p[0] + q[0], p[1] + q[1], p[2] + q[2]};
    const double n = std::sqrt(m[0] * m[0] - m[1] * m[1] - m[2] * m[2]);
    for (auto& v : m) v /= n;
    const double y = 1.0 / (m[0] - m[1]);
    return {m[2] * y, y};
}

/// Sample points on the boundary of the truncated core of a pants (both hexagons).
std::vector<cplx> core_samples(const PantsGroup& p) {
    std::vector<cplx> pts;
    constexpr int n = 32;
    for (int j = 0; j < 3; ++j) {
        const SlotChart ch = slot_chart(p, j);
        const double A = collar_interval(ch.ell).upper;
        for (int k = 0; k <= n; ++k) pts.push_back(ch.point(0.5 * k / n, -A));
    }
    const std::size_t half = pts.size();
    for (std::size_t i = 0; i < half; ++i) pts.push_back(p.reflections[2].apply(std::conj(pts[i])));
    return pts;
}

} // namespace

MobiusMatrix AssembledSurface::evaluate(int component, const Word& w) const {
    const auto& c = components.at(component);
    MobiusMatrix m;
    for (int x : w) {
        const MobiusMatrix& g = c.symbol_matrices.at(std::abs(x) - 1);
        m = m * (x > 0 ? g : g.inverse());
    }
    return m;
}

std::string AssembledSurface::word_string(int component, const Word& w) const {
    const auto& c = components.at(component);
    std::string out;
    for (std::size_t i = 0; i < w.size();) {
        std::size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        if (!out.empty()) out += ' ';
        out += c.symbol_names.at(std::abs(w[i]) - 1);
        const long e = static_cast<long>(j - i) * (w[i] > 0 ? 1 : -1);
        if (e != 1) out += '^' + std::to_string(e);
        i = j;
    }
    return out;
}

AssembledSurface assemble(const AugmentedGraph& graph, const FNLabel& label) {
    graph.validate();
    AssembledSurface s;
    s.graph = graph;
    s.label = label;
    const int V = static_cast<int>(graph.vertices.size());
    for (int q = 0; q < V; ++q) {
        std::array<double, 3> l{};
        for (int k = 0; k < 3; ++k) l[k] = label.at(graph, graph.edge_at(q, k)).ell;
        s.pants.push_back(build_pants(l[0], l[1], l[2]));
    }
    s.descriptor_hash = descriptor(graph, label);

    auto glued = [&](int e) { return graph.partner(e) >= 0 && label.at(graph, e).ell > 0.0; };

    s.conjugators.assign(V, MobiusMatrix::identity());
    s.component_of.assign(V, -1);
    std::vector<char> tree_edge(graph.edges.size(), 0);
    for (int root = 0; root < V; ++root) {
        if (s.component_of[root] >= 0) continue;
        const int cid = static_cast<int>(s.components.size());
        SurfaceComponent comp;
        comp.root = root;
        std::deque<int> queue{root};
        s.component_of[root] = cid;
        while (!queue.empty()) {
            const int q = queue.front();
            queue.pop_front();
            comp.vertices.push_back(q);
            for (int k = 0; k < 3; ++k) {
                const int e = graph.edge_at(q, k);
                if (!glued(e)) continue;
                const int f = graph.partner(e);
                const int qp = graph.vertex_index(graph.edges[f].from_vertex);
                if (s.component_of[qp] >= 0) continue;
                s.component_of[qp] = cid;
                tree_edge[e] = tree_edge[f] = 1;
                const MobiusMatrix g =
                    gluing_isometry(s.pants[q], k, s.pants[qp], graph.edges[f].slot, label.at(graph, e).tau);
                s.conjugators[qp] = (s.conjugators[q] * g).normalized();
                queue.push_back(qp);
            }
        }
        s.components.push_back(std::move(comp));
    }

    s.vertex_generators.resize(V);
    for (int q = 0; q < V; ++q)
        for (int k = 0; k < 3; ++k) {
            const MobiusMatrix& G = s.conjugators[q];
            s.vertex_generators[q][k] = (G * s.pants[q].gamma[k] * G.inverse()).normalized();
        }

    for (auto& comp : s.components) {
        const int cid = s.component_of[comp.root];
        // symbols: a_q, b_q per vertex, then one stable letter per non-tree glued edge
        std::vector<std::string> names;
        std::vector<MobiusMatrix> mats;
        std::map<int, int> sym_a;
        for (int q : comp.vertices) {
            sym_a[q] = static_cast<int>(names.size());
            names.push_back("a." + graph.vertices[q]);
            mats.push_back(s.vertex_generators[q][0]);
            names.push_back("b." + graph.vertices[q]);
            mats.push_back(s.vertex_generators[q][1]);
        }
        auto slot_word = [&](int q, int k) -> Word {
            const int a = sym_a.at(q) + 1;
            if (k == 0) return {a};
            if (k == 1) return {a + 1};
            return {-a, -(a + 1)};
        };
        std::vector<Word> relations;
        std::vector<std::pair<int, int>> cross;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            const int ei = static_cast<int>(e);
            if (!glued(ei) || s.component_of[graph.vertex_index(graph.edges[e].from_vertex)] != cid) continue;
            const int f = graph.partner(ei);
            if (f < ei) continue;
            const int q = graph.vertex_index(graph.edges[e].from_vertex);
            const int qp = graph.vertex_index(graph.edges[f].from_vertex);
            const int i = graph.edges[e].slot, j = graph.edges[f].slot;
            if (tree_edge[e]) {
                Word r = slot_word(q, i);
                const Word w2 = slot_word(qp, j);
                r.insert(r.end(), w2.begin(), w2.end());
                relations.push_back(free_reduce(r));
            } else {
                const MobiusMatrix g =
                    gluing_isometry(s.pants[q], i, s.pants[qp], j, label.at(graph, ei).tau);
                const int t = static_cast<int>(names.size()) + 1;
                names.push_back("t." + graph.edges[e].id);
                mats.push_back((s.conjugators[q] * g * s.conjugators[qp].inverse()).normalized());
                Word r{t};
                const Word w2 = slot_word(qp, j);
                r.insert(r.end(), w2.begin(), w2.end());
                r.push_back(-t);
                const Word w1 = slot_word(q, i);
                r.insert(r.end(), w1.begin(), w1.end());
                relations.push_back(free_reduce(r));
            }
        }
        Presentation pres;
        pres.symbols = static_cast<int>(names.size());
        pres.relations = relations;
        pres.alive.assign(names.size(), 1);
        for (int k = 0; k < pres.symbols; ++k) pres.expr.push_back({k + 1});
        pres.eliminate();

        std::vector<int> renumber(names.size(), -1);
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (!pres.alive[k]) continue;
            renumber[k] = static_cast<int>(comp.symbol_names.size());
            comp.symbol_names.push_back(names[k]);
            comp.symbol_matrices.push_back(mats[k]);
        }
        auto rewrite = [&](const Word& w) {
            Word out;
            for (int x : w) {
                const int r = renumber[std::abs(x) - 1];
                if (r < 0) throw Error(ErrorKind::Graph, "assemble: elimination left a dangling symbol");
                out.push_back(x > 0 ? r + 1 : -(r + 1));
            }
            return out;
        };
        for (const auto& r : pres.relations) comp.residual_relations.push_back(rewrite(r));
        for (int q : comp.vertices)
            for (int k = 0; k < 3; ++k) {
                Word w;
                for (int x : slot_word(q, k)) {
                    const Word& e = pres.expr[std::abs(x) - 1];
                    const Word part = x > 0 ? e : inverse_word(e);
                    w.insert(w.end(), part.begin(), part.end());
                }
                comp.slot_words[{q, k}] = rewrite(free_reduce(w));
            }

        // base point on the seam T_3 of the root hexagon, and the core radius
        const PantsGroup& rp = s.pants[comp.root];
        const SlotChart c0 = slot_chart(rp, 0);
        const SlotChart c1 = slot_chart(rp, 1);
        const cplx e0 = c0.point(0.5, -collar_interval(c0.ell).upper);
        const cplx e1 = c1.point(0.0, -collar_interval(c1.ell).upper);
        comp.base_point = hyperboloid_midpoint(e0, e1);
        double D = 0.0;
        for (int q : comp.vertices)
            for (const cplx& z : core_samples(s.pants[q]))
                D = std::max(D, halfplane_distance(comp.base_point, s.conjugators[q].apply(z)));
        comp.core_radius = D;
    }
    return s;
}

AssembledSurface pants_surface(double l1, double l2, double l3) {
    AugmentedGraph g;
    g.vertices = {"v0"};
    g.edges = {{"e0", "v0", 0, std::nullopt}, {"e1", "v0", 1, std::nullopt}, {"e2", "v0", 2, std::nullopt}};
    FNLabel l;
    l.labels = {{"e0", {l1, 0.0}}, {"e1", {l2, 0.0}}, {"e2", {l3, 0.0}}};
    return assemble(g, l);
}

} // namespace pinchlab

#include "pinchlab/surface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>

#include "pinchlab/parallel.hpp"

namespace pinchlab {

Word free_reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (int x : w) {
        if (!out.empty() && out.back() == -x)
            out.pop_back();
        else
            out.push_back(x);
    }
    return out;
}

Word inverse_word(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (int& x : out) x = -x;
    return out;
}

Word cyclic_reduce(const Word& w) {
    const Word r = free_reduce(w);
    std::size_t i = 0, j = r.size();
    while (j - i >= 2 && r[i] == -r[j - 1]) {
        ++i;
        --j;
    }
    return Word(r.begin() + static_cast<long>(i), r.begin() + static_cast<long>(j));
}

namespace {

/// Booth's least rotation.
std::size_t least_rotation(const Word& s) {
    const std::size_t n = s.size();
    if (n == 0) return 0;
    std::vector<long> f(2 * n, -1);
    std::size_t k = 0;
    auto at = [&](std::size_t i) { return s[i % n]; };
    for (std::size_t j = 1; j < 2 * n; ++j) {
        long i = f[j - k - 1];
        while (i != -1 && at(j) != at(k + static_cast<std::size_t>(i) + 1)) {
            if (at(j) < at(k + static_cast<std::size_t>(i) + 1)) k = j - static_cast<std::size_t>(i) - 1;
            i = f[static_cast<std::size_t>(i)];
        }
        if (i == -1 && at(j) != at(k + static_cast<std::size_t>(i) + 1)) {
            if (at(j) < at(k + static_cast<std::size_t>(i) + 1)) k = j;
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    return k % n;
}

Word rotate(const Word& w, std::size_t k) {
    Word out(w.begin() + static_cast<long>(k), w.end());
    out.insert(out.end(), w.begin(), w.begin() + static_cast<long>(k));
    return out;
}

} // namespace

Word conjugacy_key(const Word& cyclic) {
    const Word a = rotate(cyclic, least_rotation(cyclic));
    const Word inv = inverse_word(cyclic);
    const Word b = rotate(inv, least_rotation(inv));
    return std::min(a, b);
}

bool is_primitive_cyclic(const Word& w) {
    const std::size_t n = w.size();
    if (n <= 1) return true;
    std::vector<std::size_t> pi(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t k = pi[i - 1];
        while (k > 0 && w[i] != w[k]) k = pi[k - 1];
        if (w[i] == w[k]) ++k;
        pi[i] = k;
    }
    const std::size_t p = n - pi[n - 1];
    return !(p < n && n % p == 0);
}

SpectrumBudget SpectrumBudget::doubled() const {
    SpectrumBudget b = *this;
    b.max_word_length *= 2;
    b.max_elements *= 2;
    if (b.prune_margin >= 0.0) b.prune_margin *= 2.0;
    return b;
}

std::int64_t LengthSpectrum::count_primitive(double r) const {
    std::int64_t n = 0;
    for (const auto& e : entries)
        if (e.primitive && e.length <= r) n += e.multiplicity;
    return n;
}

namespace {

struct ClassInfo {
    double length = 0.0;
    bool primitive = true;
    int component = 0;
    Word word;
};

struct BudgetHit {
    std::string what;
};

using ClassMap = std::map<std::pair<int, Word>, ClassInfo>;

void record(ClassMap& classes, const AssembledSurface& s, int comp, const Word& w, double r_max) {
    const Word cyc = cyclic_reduce(w);
    if (cyc.empty()) return;
    const MobiusMatrix m = s.evaluate(comp, cyc).normalized();
    const double tr = std::abs(m.trace());
    if (tr <= 2.0 + parabolic_band) return;
    const double len = 2.0 * std::acosh(0.5 * tr);
    if (len > r_max * (1.0 + 1e-12)) return;
    Word canon = conjugacy_key(cyc);
    auto key = std::make_pair(comp, canon);
    if (classes.count(key)) return;
    classes.emplace(std::move(key), ClassInfo{len, is_primitive_cyclic(cyc), comp, std::move(canon)});
}

void enumerate_component(const AssembledSurface& s, int comp, double r_max, double margin,
                         const SpectrumBudget& budget, ClassMap& classes, std::int64_t& visited) {
    const SurfaceComponent& c = s.components[comp];
    if (!c.residual_relations.empty())
        throw Error(ErrorKind::Domain, "length_spectrum: closed surfaces (non-free fundamental group) are unsupported");
    const int r = static_cast<int>(c.symbol_matrices.size());
    const cplx z0 = c.base_point;
    const double R = r_max + 2.0 * c.core_radius;

    // core geodesics of the collars never meet the compact core: seed them and their powers
    for (const auto& [slot, w] : c.slot_words) {
        const double ell = s.pants[slot.first].lengths[slot.second];
        if (ell <= 0.0) continue;
        Word p;
        for (int k = 1; k * ell <= r_max * (1.0 + 1e-12); ++k) {
            p.insert(p.end(), w.begin(), w.end());
            record(classes, s, comp, p, r_max);
        }
    }
    if (r == 0) return;

    std::vector<int> letters;
    std::vector<MobiusMatrix> mats;
    for (int k = 1; k <= r; ++k) {
        letters.push_back(k);
        mats.push_back(c.symbol_matrices[k - 1]);
        letters.push_back(-k);
        mats.push_back(c.symbol_matrices[k - 1].inverse());
    }
    const int L = static_cast<int>(letters.size());
    std::atomic<std::int64_t> count{visited};

    // returns false if the node is pruned
    auto visit = [&](const MobiusMatrix& m, Word& path, ClassMap& out) {
        const double d = halfplane_distance(z0, m.apply(z0));
        if (!(d <= R + margin)) return false;
        if (++count > budget.max_elements) throw BudgetHit{"element budget exhausted"};
        if (static_cast<int>(path.size()) > budget.max_word_length) throw BudgetHit{"word-length budget exhausted"};
        if (d <= R) {
            const double tr = std::abs(m.normalized().trace());
            if (tr > 2.0 + parabolic_band && 2.0 * std::acosh(0.5 * tr) <= r_max * (1.0 + 1e-12))
                record(out, s, comp, path, r_max);
        }
        return true;
    };

    // roots of the parallel subtrees: surviving words of length 2
    struct Root {
        Word path;
        MobiusMatrix m;
    };
    std::vector<Root> roots;
    for (int i = 0; i < L; ++i) {
        Word p{letters[i]};
        if (!visit(mats[i], p, classes)) continue;
        for (int j = 0; j < L; ++j) {
            if (letters[j] == -letters[i]) continue;
            Word q{letters[i], letters[j]};
            const MobiusMatrix m = mats[i] * mats[j];
            if (visit(m, q, classes)) roots.push_back({q, m});
        }
    }

    std::vector<ClassMap> partial(roots.size());
    parallel_for(roots.size(), [&](std::size_t k) {
        struct Frame {
            MobiusMatrix m;
            int last;
            int next;
        };
        Word path = roots[k].path;
        std::vector<Frame> stack{{roots[k].m, path.back(), 0}};
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next >= L) {
                stack.pop_back();
                path.pop_back();
                continue;
            }
            const int idx = f.next++;
            const int x = letters[idx];
            if (x == -f.last) continue;
            const MobiusMatrix m = f.m * mats[idx];
            path.push_back(x);
            if (!visit(m, path, partial[k])) {
                path.pop_back();
                continue;
            }
            stack.push_back({m, x, 0});
        }
    });
    for (auto& p : partial) classes.merge(p);
    visited = count.load();
}

double auto_margin(const AssembledSurface& s, int comp) {
    const SurfaceComponent& c = s.components[comp];
    double g = 0.0;
    for (const auto& m : c.symbol_matrices) g = std::max(g, halfplane_distance(c.base_point, m.apply(c.base_point)));
    return 2.0 * c.core_radius + g;
}

LengthSpectrum run(const AssembledSurface& s, double r_max, double dedup_tol, const SpectrumBudget& budget) {
    LengthSpectrum out;
    out.cutoff = r_max;
    out.descriptor_hash = s.descriptor_hash;
    ClassMap classes;
    for (std::size_t k = 0; k < s.components.size(); ++k) {
        const int comp = static_cast<int>(k);
        const double margin = budget.prune_margin >= 0.0 ? budget.prune_margin : auto_margin(s, comp);
        out.prune_margin = std::max(out.prune_margin, margin);
        out.search_radius = std::max(out.search_radius, r_max + 2.0 * s.components[k].core_radius);
        enumerate_component(s, comp, r_max, margin, budget, classes, out.visited);
    }
    out.classes = static_cast<std::int64_t>(classes.size());

    std::vector<const ClassInfo*> sorted;
    for (const auto& kv : classes) sorted.push_back(&kv.second);
    std::stable_sort(sorted.begin(), sorted.end(), [](const ClassInfo* a, const ClassInfo* b) {
        if (a->length != b->length) return a->length < b->length;
        return a->primitive > b->primitive;
    });
    std::vector<char> used(sorted.size(), 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (used[i]) continue;
        SpectrumEntry e;
        e.length = sorted[i]->length;
        e.primitive = sorted[i]->primitive;
        e.word = s.word_string(sorted[i]->component, sorted[i]->word);
        for (std::size_t j = i; j < sorted.size() && sorted[j]->length - e.length <= dedup_tol * std::max(1.0, e.length);
             ++j) {
            if (used[j] || sorted[j]->primitive != e.primitive) continue;
            used[j] = 1;
            ++e.multiplicity;
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

} // namespace

LengthSpectrum length_spectrum(const AssembledSurface& surface, double r_max, double dedup_tol,
                               const SpectrumBudget& budget) {
    if (!(r_max > 0.0)) throw Error(ErrorKind::Domain, "length_spectrum: r_max must be positive");
    if (!(dedup_tol >= 0.0)) throw Error(ErrorKind::Domain, "length_spectrum: dedup_tol must be non-negative");
    try {
        return run(surface, r_max, dedup_tol, budget);
    } catch (const BudgetHit& hit) {
        double certified = 0.0;
        for (double r = 0.5 * r_max; r > 1e-3 * r_max; r *= 0.5) {
            try {
                run(surface, r, dedup_tol, budget);
                certified = r;
                break;
            } catch (const BudgetHit&) {
            }
        }
        std::ostringstream msg;
        msg << "length_spectrum: " << hit.what << " before covering r_max = " << r_max
            << "; certified partial r = " << certified;
        throw Error(ErrorKind::Budget, msg.str());
    }
}

} // namespace pinchlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "pinchlab/surface.hpp"

using namespace pinchlab;

namespace {

AugmentedGraph torus_graph() {
    AugmentedGraph g;
    g.vertices = {"v"};
    g.edges = {{"d0", "v", 0, std::string("d1")}, {"d1", "v", 1, std::string("d0")}, {"p", "v", 2, std::nullopt}};
    return g;
}

FNLabel torus_label(double ell, double tau, double phantom) {
    FNLabel l;
    l.labels = {{"d0", {ell, tau}}, {"p", {phantom, 0.0}}};
    return l;
}

/// genus 0, two pants glued along one edge: four funnels
AugmentedGraph four_holed_sphere() {
    AugmentedGraph g;
    g.vertices = {"u", "w"};
    g.edges = {{"x", "u", 0, std::string("y")}, {"u1", "u", 1, std::nullopt}, {"u2", "u", 2, std::nullopt},
               {"y", "w", 2, std::string("x")}, {"w0", "w", 0, std::nullopt}, {"w1", "w", 1, std::nullopt}};
    return g;
}

} // namespace

TEST_CASE("pants generators") {
    const PantsGroup p = build_pants(1.0, 2.0, 3.0);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(translation_length(p.gamma[i]) - (i + 1.0)) < 1e-9);
    const PantsGroup q = build_pants(0.7, 1.1, 2.3);
    CHECK(identity_residual(q.gamma[2] * q.gamma[1] * q.gamma[0]) < 1e-9);
    const PantsGroup c = build_pants(0.0, 0.8, 0.8);
    CHECK(classify(c.gamma[0]) == IsometryClass::Parabolic);
    CHECK(std::abs(translation_length(c.gamma[1]) - 0.8) < 1e-9);
}

TEST_CASE("slot charts") {
    for (const auto& l : std::vector<std::array<double, 3>>{{1, 2, 3}, {0.7, 1.1, 2.3}, {0.1, 0.2, 5}, {0, 1, 1}, {0, 0, 0}}) {
        const PantsGroup p = build_pants(l[0], l[1], l[2]);
        for (int j = 0; j < 3; ++j) {
            const SlotChart ch = slot_chart(p, j);
            CHECK(ch.P.det() == doctest::Approx(1.0).epsilon(1e-12));
            // conjugated generator is the standard translation by l (or by 1 for a cusp)
            const MobiusMatrix h = ch.P.inverse() * p.gamma[j] * ch.P;
            const cplx z(0.3, 0.8);
            const cplx expect = l[j] > 0 ? z * std::exp(l[j]) : z - 1.0;
            CHECK(std::abs(h.apply(z) - expect) < 1e-9);
            // seams land on x = 0 and x = 1/2
            const auto e1 = p.hexagon.T[(j + 1) % 3].endpoints();
            const auto e2 = p.hexagon.T[(j + 2) % 3].endpoints();
            const MobiusMatrix Pi = ch.P.inverse();
            if (l[j] > 0) {
                CHECK(std::abs(std::abs(Pi.apply({e1[0], 0.0})) - 1.0) < 1e-9);
                CHECK(std::abs(std::abs(Pi.apply({e2[0], 0.0})) - std::exp(0.5 * l[j])) < 1e-9);
            } else {
                const cplx a = Pi.apply({e1[0], 0.0}), b = Pi.apply({e1[1], 0.0});
                CHECK(std::min(std::abs(a), std::abs(b)) < 1e-9);
            }
        }
    }
}

TEST_CASE("graph validation") {
    AugmentedGraph g = torus_graph();
    CHECK_NOTHROW(g.validate());
    CHECK(g.type() == std::pair<int, int>{1, 1});
    CHECK(four_holed_sphere().type() == std::pair<int, int>{0, 4});

    AugmentedGraph bad = g;
    bad.edges[1].pair = std::nullopt;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = g;
    bad.edges[2].slot = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = g;
    bad.edges[0].pair = "d0";
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = g;
    bad.edges.pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);

    FNLabel l = torus_label(1.0, 0.0, 1.0);
    l.labels.erase("p");
    CHECK_THROWS_AS(assemble(g, l), Error);
    l = torus_label(1.0, 0.0, 1.0);
    l.labels["d1"] = {2.0, 0.0};
    CHECK_THROWS_AS(assemble(g, l), Error);
}

TEST_CASE("free group words") {
    CHECK(free_reduce({1, 2, -2, -1, 3}) == Word{3});
    CHECK(cyclic_reduce({-1, 2, 3, 1}) == Word{2, 3});
    CHECK(conjugacy_key({2, 1, 1}) == Word{-2, -1, -1});
    CHECK(conjugacy_key({2, 1, 1}) == conjugacy_key({1, 2, 1}));
    CHECK(conjugacy_key({1, 2}) == conjugacy_key({-2, -1}));
    CHECK(is_primitive_cyclic({1, 2, 1, 2}) == false);
    CHECK(is_primitive_cyclic({1, 2, 1}) == true);
    CHECK(is_primitive_cyclic({1}) == true);
    CHECK(is_primitive_cyclic({1, 1}) == false);
}

TEST_CASE("assemble pants") {
    const AssembledSurface s = pants_surface(1.0, 2.0, 3.0);
    REQUIRE(s.components.size() == 1);
    const auto& c = s.components[0];
    CHECK(c.symbol_names.size() == 2);
    CHECK(c.residual_relations.empty());
    for (int k = 0; k < 3; ++k) {
        const MobiusMatrix m = s.evaluate(0, c.slot_words.at({0, k}));
        CHECK(std::abs(translation_length(m) - (k + 1.0)) < 1e-9);
    }
    CHECK(c.core_radius > 0.0);
    CHECK(c.core_radius < 10.0);
}

TEST_CASE("assemble torus") {
    const AugmentedGraph g = torus_graph();
    for (double phantom : {0.5, 1.0, 2.5}) {
        const AssembledSurface s = assemble(g, torus_label(1.0, 0.3, phantom));
        REQUIRE(s.components.size() == 1);
        const auto& c = s.components[0];
        CHECK(c.symbol_names.size() == 2);
        CHECK(c.residual_relations.empty());
        const MobiusMatrix boundary = s.evaluate(0, c.slot_words.at({0, 2}));
        CHECK(std::abs(translation_length(boundary) - phantom) < 1e-6);
        // the boundary word is a commutator in the free basis
        const Word w = cyclic_reduce(c.slot_words.at({0, 2}));
        CHECK(w.size() == 4);
        const MobiusMatrix glued = s.evaluate(0, c.slot_words.at({0, 0}));
        CHECK(std::abs(translation_length(glued) - 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(assemble(g, torus_label(1e-8, 0.0, 1.0)), Error);
}

TEST_CASE("assemble glued pants") {
    const AugmentedGraph g = four_holed_sphere();
    FNLabel l;
    l.labels = {{"x", {1.5, 0.25}}, {"u1", {1.0, 0}}, {"u2", {2.0, 0}}, {"w0", {1.2, 0}}, {"w1", {0.9, 0}}};
    const AssembledSurface s = assemble(g, l);
    REQUIRE(s.components.size() == 1);
    const auto& c = s.components[0];
    CHECK(c.symbol_names.size() == 3);
    for (int q = 0; q < 2; ++q)
        for (int k = 0; k < 3; ++k) {
            const MobiusMatrix m = s.evaluate(0, c.slot_words.at({q, k}));
            const MobiusMatrix direct = s.vertex_generators[q][k];
            CHECK(identity_residual(m * direct.inverse()) < 1e-8);
            CHECK(std::abs(translation_length(m) - s.pants[q].lengths[k]) < 1e-8);
        }
    // gluing condition: the two boundary elements are mutually inverse
    const MobiusMatrix gx = s.vertex_generators[0][0];
    const MobiusMatrix gy = s.vertex_generators[1][2];
    CHECK(identity_residual(gx * gy) < 1e-9);

    // a cusped edge disconnects the surface into two pants
    l.labels["x"] = {0.0, 0.0};
    const AssembledSurface split = assemble(g, l);
    CHECK(split.components.size() == 2);
}

TEST_CASE("spectrum of pants(1,2,3)") {
    const AssembledSurface s = pants_surface(1.0, 2.0, 3.0);
    const LengthSpectrum sp = length_spectrum(s, 3.5);
    REQUIRE(sp.entries.size() >= 3);
    std::vector<double> prim;
    for (const auto& e : sp.entries)
        if (e.primitive) prim.push_back(e.length);
    REQUIRE(prim.size() >= 3);
    CHECK(prim[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prim[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(prim[2] == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 1; i < sp.entries.size(); ++i) CHECK(sp.entries[i - 1].length <= sp.entries[i].length);

    const LengthSpectrum sp2 = length_spectrum(s, 2.5);
    bool square = false;
    for (const auto& e : sp2.entries)
        if (!e.primitive && std::abs(e.length - 2.0) < 1e-9) square = true;
    CHECK(square);
    // non-primitive lengths are multiples of primitive ones
    for (const auto& e : sp.entries) {
        if (e.primitive) continue;
        bool found = false;
        for (double p : prim)
            for (int k = 2; k * p <= e.length + 1e-9; ++k)
                if (std::abs(k * p - e.length) < 1e-9) found = true;
        CHECK(found);
    }
}

TEST_CASE("spectrum completeness against brute force") {
    for (const auto& l : std::vector<std::array<double, 3>>{{1, 2, 3}, {1, 1, 1}, {1.5, 1.0, 2.0}}) {
        const AssembledSurface s = pants_surface(l[0], l[1], l[2]);
        const double r = 4.0;
        const LengthSpectrum sp = length_spectrum(s, r);
        // brute force: all cyclically reduced words up to length 14
        std::map<Word, double> brute;
        Word w;
        std::function<void(MobiusMatrix)> rec = [&](MobiusMatrix m) {
            if (!w.empty() && w.front() != -w.back()) {
                const double tr = std::abs(m.normalized().trace());
                if (tr > 2.0 + 1e-9) {
                    const double len = 2.0 * std::acosh(0.5 * tr);
                    if (len <= r * (1.0 + 1e-12)) brute.emplace(conjugacy_key(w), len);
                }
            }
            if (w.size() == 14) return;
            for (int x : {1, -1, 2, -2}) {
                if (!w.empty() && w.back() == -x) continue;
                w.push_back(x);
                const MobiusMatrix& g = s.components[0].symbol_matrices[std::abs(x) - 1];
                rec(m * (x > 0 ? g : g.inverse()));
                w.pop_back();
            }
        };
        rec(MobiusMatrix::identity());
        std::int64_t total = 0;
        for (const auto& e : sp.entries) total += e.multiplicity;

        CHECK(total == static_cast<std::int64_t>(brute.size()));
    }
}

TEST_CASE("spectrum budget doubling and growth bound") {
    const AssembledSurface s = pants_surface(1.0, 2.0, 3.0);
    const SpectrumBudget b;
    const LengthSpectrum a = length_spectrum(s, 6.0, 1e-8, b);
    const LengthSpectrum d = length_spectrum(s, 6.0, 1e-8, b.doubled());
    REQUIRE(a.entries.size() == d.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].length == d.entries[i].length);
        CHECK(a.entries[i].multiplicity == d.entries[i].multiplicity);
    }
    const double C = static_cast<double>(a.count_primitive(4.0)) / std::exp(4.0);
    CHECK(static_cast<double>(a.count_primitive(6.0)) <= C * std::exp(6.0));

    SpectrumBudget tiny;
    tiny.max_elements = 50;
    CHECK_THROWS_AS(length_spectrum(s, 6.0, 1e-8, tiny), Error);
}

TEST_CASE("twist shift by one is an isometry") {
    const AugmentedGraph g = torus_graph();
    const LengthSpectrum a = length_spectrum(assemble(g, torus_label(1.0, 0.2, 1.0)), 6.0);
    const LengthSpectrum b = length_spectrum(assemble(g, torus_label(1.0, 1.2, 1.0)), 6.0);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(std::abs(a.entries[i].length - b.entries[i].length) < 1e-8);
        CHECK(a.entries[i].multiplicity == b.entries[i].multiplicity);
    }
    const LengthSpectrum c = length_spectrum(assemble(g, torus_label(1.0, 0.7, 1.0)), 6.0);
    bool differs = c.entries.size() != a.entries.size();
    for (std::size_t i = 0; !differs && i < a.entries.size(); ++i)
        differs = std::abs(a.entries[i].length - c.entries[i].length) > 1e-6;
    CHECK(differs);
}

TEST_CASE("cusps contribute no geodesic") {
    const LengthSpectrum sp = length_spectrum(pants_surface(0.0, 1.0, 1.0), 3.0);
    for (const auto& e : sp.entries) CHECK(e.length > 0.5);
    const LengthSpectrum sp0 = length_spectrum(pants_surface(0.0, 1.0, 1.0), 3.0);
    CHECK(sp0.entries.size() == sp.entries.size());
    CHECK(sp.descriptor_hash == sp0.descriptor_hash);
    CHECK(sp.descriptor_hash != length_spectrum(pants_surface(0.0, 1.0, 1.5), 3.0).descriptor_hash);
}

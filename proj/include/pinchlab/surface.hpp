#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pinchlab/hyperbolic.hpp"

namespace pinchlab {

struct PantsGroup {
    std::array<MobiusMatrix, 3> gamma{};
    std::array<double, 3> lengths{};
    Hexagon hexagon;
    /// reflections in the seams T_1, T_2, T_3 (z -> M(conj z))
    std::array<MobiusMatrix, 3> reflections{};
};

/// Pants group with generators gamma_i = sigma_{i+2} sigma_{i+1}.
PantsGroup build_pants(double l1, double l2, double l3);

/// Chart of the collar around boundary i of a pants: z = P(model_to_halfplane(l, (x, a))).
/// The pants lies on a < 0 with the hexagon at x in [0, 1/2]. For a cusp P conjugates
/// gamma_i to z -> z - 1 and the pants side reads z = P(-x + i/|a|).
struct SlotChart {
    double ell = 0.0;
    MobiusMatrix P;

    cplx point(double x, double a) const;
};

SlotChart slot_chart(const PantsGroup& pants, int slot);

// ---------------------------------------------------------------------------
// Graphs

struct GraphEdge {
    std::string id;
    std::string from_vertex;
    int slot = 0;
    std::optional<std::string> pair;
};

struct AugmentedGraph {
    std::vector<std::string> vertices;
    std::vector<GraphEdge> edges;

    /// Throws ErrorKind::Graph on any violated invariant.
    void validate() const;

    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;
    /// index of iota(e), or -1 for a phantom edge
    int partner(int edge) const;
    /// edge index at (vertex, slot)
    int edge_at(int vertex, int slot) const;
    /// derived signature (p, n)
    std::pair<int, int> type() const;
};

struct EdgeLabel {
    double ell = 0.0;
    double tau = 0.0;
};

/// Fenchel-Nielsen labels keyed by edge id; a proper edge may be labelled
/// through either of its two orientations.
struct FNLabel {
    std::map<std::string, EdgeLabel> labels;

    EdgeLabel at(const AugmentedGraph& g, int edge) const;
};

// ---------------------------------------------------------------------------
// Free groups

/// Reduced word: letters +-(k+1) for basis symbol k.
using Word = std::vector<int>;

Word free_reduce(const Word& w);
Word inverse_word(const Word& w);
Word cyclic_reduce(const Word& w);
/// canonical key of the unoriented conjugacy class of a cyclically reduced word
Word conjugacy_key(const Word& cyclic);
/// true if the cyclically reduced word is not a proper power
bool is_primitive_cyclic(const Word& cyclic);

struct SurfaceComponent {
    std::vector<int> vertices;
    int root = 0;
    /// free basis symbols and their matrices in the root plane
    std::vector<std::string> symbol_names;
    std::vector<MobiusMatrix> symbol_matrices;
    /// words of the boundary generators gamma_{q,i} of every vertex, in the free basis
    std::map<std::pair<int, int>, Word> slot_words;
    /// relations left over after elimination (non-empty for closed surfaces)
    std::vector<Word> residual_relations;
    cplx base_point{0.0, 1.0};
    /// max distance from the base point to the sampled compact core
    double core_radius = 0.0;
};

struct AssembledSurface {
    AugmentedGraph graph;
    FNLabel label;
    std::vector<PantsGroup> pants;
    /// maps plane of vertex q into the plane of its component root
    std::vector<MobiusMatrix> conjugators;
    std::vector<int> component_of;
    std::vector<SurfaceComponent> components;
    /// Gamma_q generators conjugated into the root plane
    std::vector<std::array<MobiusMatrix, 3>> vertex_generators;
    std::uint64_t descriptor_hash = 0;

    MobiusMatrix evaluate(int component, const Word& w) const;
    std::string word_string(int component, const Word& w) const;
};

AssembledSurface assemble(const AugmentedGraph& graph, const FNLabel& label);

/// Gluing isometry g with g gamma'_j g^{-1} = gamma_i^{-1}, twist tau (fraction of a full turn).
MobiusMatrix gluing_isometry(const PantsGroup& q, int slot_i, const PantsGroup& qp, int slot_j, double tau);

// ---------------------------------------------------------------------------
// Length spectra

struct SpectrumEntry {
    double length = 0.0;
    int multiplicity = 0;
    bool primitive = true;
    std::string word;
};

struct SpectrumBudget {
    int max_word_length = 100000;
    /// extra displacement allowed for prefixes; negative means automatic
    double prune_margin = -1.0;
    std::int64_t max_elements = 400000000;

    SpectrumBudget doubled() const;
};

struct LengthSpectrum {
    std::vector<SpectrumEntry> entries;
    double cutoff = 0.0;
    std::uint64_t descriptor_hash = 0;
    /// diagnostics
    double search_radius = 0.0;
    double prune_margin = 0.0;
    std::int64_t visited = 0;
    std::int64_t classes = 0;

    /// number of primitive unoriented geodesics with length <= r (with multiplicity)
    std::int64_t count_primitive(double r) const;
};

LengthSpectrum length_spectrum(const AssembledSurface& surface, double r_max, double dedup_tol = 1e-8,
                               const SpectrumBudget& budget = {});

/// Single pants shortcut.
AssembledSurface pants_surface(double l1, double l2, double l3);

} // namespace pinchlab

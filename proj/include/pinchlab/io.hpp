#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pinchlab/error.hpp"
#include "pinchlab/scattering.hpp"
#include "pinchlab/surface.hpp"
#include "pinchlab/transform.hpp"

namespace pinchlab::io {

using json = nlohmann::json;

/// "re+imi" with round-trip precision, e.g. "2+0i", "0.3-0.5i".
std::string format_complex(cplx z);
/// Accepts "a", "bi", "a+bi", "a-bi" (also "i" and "-i"). Usage error otherwise.
cplx parse_complex(const std::string& text);
/// Comma separated reals, e.g. "1,2,3".
std::vector<double> parse_list(const std::string& text);
std::string format_double(double x);

json to_json(cplx z);
cplx complex_from_json(const json& j);
json to_json(const CMatrix& m);
json to_json(const MobiusMatrix& m);

struct GraphFile {
    AugmentedGraph graph;
    FNLabel label;
};

/// {"vertices":[..], "edges":[{"id","from_vertex","slot","pair"}], "labels":{id:{"ell","tau"}}}
GraphFile graph_from_json(const json& j);
json graph_to_json(const AugmentedGraph& graph, const FNLabel& label);

json pants_to_json(const PantsGroup& pants);

/// length,multiplicity,primitive,word
std::string spectrum_csv(const LengthSpectrum& spectrum);
json spectrum_to_json(const LengthSpectrum& spectrum);

struct SweepRow {
    double ell = 0.0;
    cplx s{};
    cplx value{};
    double err_bound = 0.0;
};
/// ell,s_re,s_im,value_re,value_im,err_bound
std::string sweep_csv(const std::vector<SweepRow>& rows);
json sweep_to_json(const std::vector<SweepRow>& rows);

struct ScatteringResiduals {
    double dcalc = 0.0;
    double symmetry = 0.0;
    double commutation = 0.0;
    double ms = -1.0;
    double chi_independence = -1.0;
};
json scattering_report(const ScatteringPair& pair, const ScatteringResiduals& residuals);
json trace_report(double ell, const TraceConfig& config, const TraceCheck& check);
json error_json(const Error& e);
json error_json(const std::string& kind, const std::string& message);

std::string read_file(const std::string& path);
/// Writes text to path; "-" writes to standard output.
void write_file(const std::string& path, const std::string& text);
json read_json(const std::string& path);

} // namespace pinchlab::io

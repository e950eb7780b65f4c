#include "pinchlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pinchlab::io {

namespace {

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json matrix_rows(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_complex(cplx z) {
    std::string im = format_double(z.imag());
    if (im.front() != '-') im = "+" + im;
    return format_double(z.real()) + im + "i";
}

cplx parse_complex(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty()) usage("empty complex number");
    if (text.back() != 'i') {
        double re = 0.0;
        if (!parse_real(text, re)) usage("cannot parse complex number '" + raw + "'");
        return {re, 0.0};
    }
    const std::string body = text.substr(0, text.size() - 1);
    // split at the last sign that is not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_part = [&](const std::string& s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        double v = 0.0;
        if (!parse_real(s, v)) usage("cannot parse complex number '" + raw + "'");
        return v;
    };
    if (split == std::string::npos) return {0.0, imag_part(body)};
    double re = 0.0;
    if (!parse_real(body.substr(0, split), re)) usage("cannot parse complex number '" + raw + "'");
    return {re, imag_part(body.substr(split))};
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!parse_real(trim(item), v)) usage("cannot parse number '" + item + "' in list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) usage("empty list");
    return out;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_string()) return parse_complex(j.get<std::string>());
    usage("expected [re, im], got " + j.dump());
}

json to_json(const CMatrix& m) { return matrix_rows(m); }

json to_json(const MobiusMatrix& m) { return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})}); }

GraphFile graph_from_json(const json& j) {
    try {
        GraphFile out;
        for (const auto& v : j.at("vertices")) out.graph.vertices.push_back(v.get<std::string>());
        for (const auto& e : j.at("edges")) {
            GraphEdge edge;
            edge.id = e.at("id").get<std::string>();
            edge.from_vertex = e.at("from_vertex").get<std::string>();
            edge.slot = e.at("slot").get<int>();
            if (e.contains("pair") && !e.at("pair").is_null()) edge.pair = e.at("pair").get<std::string>();
            out.graph.edges.push_back(edge);
        }
        if (j.contains("labels")) {
            for (const auto& [id, lab] : j.at("labels").items()) {
                EdgeLabel l;
                l.ell = lab.at("ell").get<double>();
                l.tau = lab.value("tau", 0.0);
                out.label.labels[id] = l;
            }
        }
        return out;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed graph JSON: ") + e.what());
    }
}

json graph_to_json(const AugmentedGraph& graph, const FNLabel& label) {
    json j;
    j["vertices"] = graph.vertices;
    j["edges"] = json::array();
    for (const auto& e : graph.edges) {
        j["edges"].push_back({{"id", e.id},
                              {"from_vertex", e.from_vertex},
                              {"slot", e.slot},
                              {"pair", e.pair ? json(*e.pair) : json(nullptr)}});
    }
    j["labels"] = json::object();
    for (const auto& [id, l] : label.labels) j["labels"][id] = {{"ell", l.ell}, {"tau", l.tau}};
    return j;
}

json pants_to_json(const PantsGroup& pants) {
    json j;
    j["lengths"] = pants.lengths;
    j["generators"] = json::array();
    for (const auto& g : pants.gamma) j["generators"].push_back(to_json(g));
    j["reflections"] = json::array();
    for (const auto& r : pants.reflections) j["reflections"].push_back(to_json(r));
    json hex;
    hex["lengths"] = pants.hexagon.lengths;
    hex["m"] = pants.hexagon.m;
    hex["cosh_TL"] = pants.hexagon.cosh_TL;
    hex["T"] = json::array();
    hex["L"] = json::array();
    for (const auto& c : pants.hexagon.T) hex["T"].push_back(c.a);
    for (const auto& c : pants.hexagon.L) hex["L"].push_back(c.a);
    j["hexagon"] = hex;
    return j;
}

std::string spectrum_csv(const LengthSpectrum& spectrum) {
    std::string out = "length,multiplicity,primitive,word\n";
    for (const auto& e : spectrum.entries) {
        out += format_double(e.length) + "," + std::to_string(e.multiplicity) + "," + (e.primitive ? "1" : "0") + "," +
               csv_field(e.word) + "\n";
    }
    return out;
}

json spectrum_to_json(const LengthSpectrum& spectrum) {
    json j;
    j["cutoff"] = spectrum.cutoff;
    j["descriptor_hash"] = spectrum.descriptor_hash;
    j["entries"] = json::array();
    for (const auto& e : spectrum.entries) {
        j["entries"].push_back(
            {{"length", e.length}, {"multiplicity", e.multiplicity}, {"primitive", e.primitive}, {"word", e.word}});
    }
    return j;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "ell,s_re,s_im,value_re,value_im,err_bound\n";
    for (const auto& r : rows) {
        out += format_double(r.ell) + "," + format_double(r.s.real()) + "," + format_double(r.s.imag()) + "," +
               format_double(r.value.real()) + "," + format_double(r.value.imag()) + "," + format_double(r.err_bound) +
               "\n";
    }
    return out;
}

json sweep_to_json(const std::vector<SweepRow>& rows) {
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"ell", r.ell}, {"s", to_json(r.s)}, {"value", to_json(r.value)},
                     {"err_bound", finite_or_null(r.err_bound)}});
    }
    return j;
}

json scattering_report(const ScatteringPair& pair, const ScatteringResiduals& residuals) {
    json j;
    j["ell"] = pair.ell.empty() ? 0.0 : pair.ell.front();
    j["ends"] = pair.ends;
    j["s"] = to_json(pair.s);
    j["C"] = matrix_rows(pair.C);
    j["D"] = matrix_rows(pair.D);
    json r;
    r["dcalc"] = residuals.dcalc;
    r["symmetry"] = residuals.symmetry;
    r["commutation"] = residuals.commutation;
    if (residuals.ms >= 0.0) r["ms"] = residuals.ms;
    if (residuals.chi_independence >= 0.0) r["chi_independence"] = residuals.chi_independence;
    j["residuals"] = r;
    return j;
}

json trace_report(double ell, const TraceConfig& config, const TraceCheck& check) {
    json j;
    j["ell"] = ell;
    j["s"] = to_json(config.s);
    j["s0"] = to_json(config.s0);
    j["A"] = config.A;
    j["lhs"] = to_json(check.lhs);
    j["rhs"] = to_json(check.rhs);
    j["residual"] = check.residual;
    j["near_part"] = to_json(check.near_part);
    j["far_part"] = to_json(check.far_part);
    j["tail_bounds"] = {{"near", check.near_tail_bound},
                        {"far", check.far_tail_bound},
                        {"geometric", check.geometric_tail_bound}};
    return j;
}

json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

json error_json(const Error& e) { return error_json(std::string(to_string(e.kind())), e.what()); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

json read_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Io, "'" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace pinchlab::io

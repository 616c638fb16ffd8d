#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "shtuka/lattice.hpp"

namespace shtuka {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Field / ring / series / matrix encodings.
//   field  {"p":2,"deg":4,"modulus":[1,1,0,0,1],"q":2}
//   ring   adds "eps": e for dual numbers
//   series {"ord":-1,"prec":6,"exact":true,"terms":{"-1":[...], "0":[...]}}
//          term values: coordinate arrays over F_p; for dual numbers, arrays
//          of coordinate arrays (one per eps power).
// ---------------------------------------------------------------------------

inline json field_to_json(const FieldSpec& f) {
    return json{{"p", f.p}, {"deg", f.deg}, {"modulus", f.modulus}, {"q", f.q}};
}

inline const FieldSpec* field_from_json(const json& j) {
    require(j.contains("p") && j.contains("deg"), "field JSON needs p and deg");
    Poly modulus;
    if (j.contains("modulus")) modulus = j["modulus"].get<Poly>();
    long long q = j.value("q", static_cast<long long>(j["p"].get<int>()));
    return get_field(j["p"].get<int>(), j["deg"].get<int>(), modulus, q);
}

inline json ring_to_json(const CoeffRing& R) {
    json j = field_to_json(*R.field);
    if (R.eps > 1) j["eps"] = R.eps;
    return j;
}

inline CoeffRing ring_from_json(const json& j) {
    const FieldSpec* f = field_from_json(j);
    int eps = j.value("eps", 1);
    return eps > 1 ? dual_ring(f, eps) : field_ring(f);
}

inline json relem_to_json(const CoeffRing& R, const RElem& x) {
    auto coords = [&](std::uint32_t code) { return json(R.field->coords(code)); };
    if (R.eps == 1) return coords(x.c[0]);
    json arr = json::array();
    for (int i = 0; i < R.eps; ++i) arr.push_back(coords(x.c[static_cast<size_t>(i)]));
    return arr;
}

inline RElem relem_from_json(const CoeffRing& R, const json& j) {
    RElem x;
    auto decode = [&](const json& c) { return R.field->from_coords(c.get<std::vector<int>>()); };
    if (R.eps == 1) {
        x.c[0] = decode(j);
    } else {
        require(j.is_array() && static_cast<int>(j.size()) <= R.eps,
                "dual-number coefficient needs one coordinate array per eps power");
        for (size_t i = 0; i < j.size(); ++i) x.c[i] = decode(j[i]);
    }
    return x;
}

inline json series_to_json(const LaurentSeries& f) {
    json terms = json::object();
    for (long long k = f.ord; k < f.prec; ++k) {
        const RElem& c = f.at(k);
        if (!r_is_zero(c)) terms[std::to_string(k)] = relem_to_json(f.ring, c);
    }
    return json{{"ord", f.ord}, {"prec", f.prec}, {"exact", f.exact}, {"terms", terms}};
}

inline LaurentSeries series_from_json(const CoeffRing& R, const json& j) {
    long long ord = j.at("ord").get<long long>();
    long long prec = j.at("prec").get<long long>();
    bool exact = j.value("exact", true);  // finite fixture data is polynomial
    LaurentSeries f(R, ord, prec, exact);
    if (j.contains("terms"))
        for (auto it = j["terms"].begin(); it != j["terms"].end(); ++it) {
            long long k = std::stoll(it.key());
            require(k >= ord && k < prec, "series term exponent outside [ord, prec)");
            f.set(k, relem_from_json(R, it.value()));
        }
    return f;
}

inline json matrix_to_json(const SeriesMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.r; ++i) {
        json row = json::array();
        for (int j = 0; j < m.r; ++j) row.push_back(series_to_json(m.at(i, j)));
        rows.push_back(row);
    }
    json j{{"r", m.r}, {"field", ring_to_json(m.ring)}, {"entries", rows}};
    j["subfield_s"] = m.subfield_s;
    return j;
}

inline SeriesMatrix matrix_from_json(const json& j) {
    CoeffRing R = ring_from_json(j.at("field"));
    int r = j.at("r").get<int>();
    SeriesMatrix m(R, r);
    const json& rows = j.at("entries");
    require(static_cast<int>(rows.size()) == r, "entries row count mismatch");
    for (int i = 0; i < r; ++i) {
        require(static_cast<int>(rows[static_cast<size_t>(i)].size()) == r, "entries column count mismatch");
        for (int c = 0; c < r; ++c)
            m.at(i, c) = series_from_json(R, rows[static_cast<size_t>(i)][static_cast<size_t>(c)]);
    }
    m.subfield_s = j.value("subfield_s", 1);
    validate_subfield(m, m.subfield_s);
    return m;
}

// ---------------------------------------------------------------------------
// Root data.
// ---------------------------------------------------------------------------

inline json root_datum_to_json(const RootDatum& d) {
    json j{{"rank", d.rank},
           {"simple_roots", d.simple_roots},
           {"simple_coroots", d.simple_coroots},
           {"positive_roots", d.positive_roots},
           {"positive_coroots", d.positive_coroots},
           {"two_rho", d.two_rho}};
    if (!d.name.empty()) j["name"] = d.name;
    return j;
}

inline RootDatum root_datum_from_json(const json& j) {
    if (j.contains("simple_roots") && !j["simple_roots"].empty())
        return RootDatum::from_simple(j["simple_roots"].get<IMat>(),
                                      j["simple_coroots"].get<IMat>(), j.value("name", ""));
    return RootDatum::torus(j.at("rank").get<int>(), j.value("name", ""));
}

/// Builtin group names accepted by the CLI.
inline RootDatum group_by_name(const std::string& name) {
    if (name.rfind("GL", 0) == 0) {
        int r = std::atoi(name.c_str() + 2);
        require(r >= 1 && r <= 8, "GL rank out of range");
        return glr_datum(r);
    }
    throw ValidationError("unknown group '" + name + "' (builtins: GL1..GL8)");
}

// ---------------------------------------------------------------------------
// Newton poset artifacts.
// ---------------------------------------------------------------------------

inline std::string qvec_str(const QVec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + ")";
}

inline json poset_to_json(const IVec& mu, int r) {
    auto nodes = newton_points_between(mu, r);
    const RootDatum& d = glr(r);
    json jn = json::array(), je = json::array(), table = json::object();
    for (const auto& nu : nodes) jn.push_back(qvec_str(nu));
    // Hasse edges of the dominance order.
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = 0; j < nodes.size(); ++j) {
            if (i == j || !glr_dominance_leq(nodes[i], nodes[j])) continue;
            bool covering = true;
            for (size_t k = 0; k < nodes.size() && covering; ++k) {
                if (k == i || k == j) continue;
                if (glr_dominance_leq(nodes[i], nodes[k]) && glr_dominance_leq(nodes[k], nodes[j]))
                    covering = false;
            }
            if (covering) {
                json diff = json::array();
                for (size_t t = 0; t < nodes[j].size(); ++t)
                    diff.push_back((nodes[j][t] - nodes[i][t]).str());
                je.push_back(json{{"from", qvec_str(nodes[i])},
                                  {"to", qvec_str(nodes[j])},
                                  {"difference", diff}});
            }
        }
    for (const auto& nu : nodes) {
        table[qvec_str(nu)] =
            json{{"longest_chain", longest_chain(mu, nu, r)},
                 {"ceil_formula", omega_ceil_sum(d, to_qvec(mu), nu)}};
    }
    return json{{"group", "GL" + std::to_string(r)},
                {"mu", mu},
                {"nodes", jn},
                {"edges", je},
                {"longest_chain_table", table}};
}

inline std::string poset_to_dot(const IVec& mu, int r) {
    json p = poset_to_json(mu, r);
    std::string s = "digraph newton_poset {\n  rankdir=BT;\n";
    for (const auto& n : p["nodes"]) s += "  \"" + n.get<std::string>() + "\";\n";
    for (const auto& e : p["edges"]) {
        std::string label;
        for (const auto& c : e["difference"]) {
            if (!label.empty()) label += ",";
            label += c.get<std::string>();
        }
        s += "  \"" + e["from"].get<std::string>() + "\" -> \"" + e["to"].get<std::string>() +
             "\" [label=\"(" + label + ")\"];\n";
    }
    s += "}\n";
    return s;
}

// ---------------------------------------------------------------------------
// Count tables.
// ---------------------------------------------------------------------------

inline json count_table_to_json(const CountTable& t) {
    json rows = json::array();
    for (const auto& [stratum, per_m] : t.strata)
        for (const auto& [m, c] : per_m)
            rows.push_back(json{{"m", m}, {"stratum", stratum}, {"count", c}});
    json j{{"fixture", t.fixture}, {"level", t.level},     {"r", t.r},
           {"q", t.q},             {"window", t.window},   {"s", t.s},
           {"m_values", t.m_values}, {"rows", rows}};
    if (!t.mu.empty()) j["mu"] = t.mu;
    if (!t.x_str.empty()) j["x"] = t.x_str;
    json rej = json::object(), maz = json::object(), sc = json::object();
    for (auto [m, c] : t.rejected) rej[std::to_string(m)] = c;
    for (auto [m, c] : t.mazur_violations) maz[std::to_string(m)] = c;
    for (auto [m, c] : t.scanned) sc[std::to_string(m)] = c;
    j["rejections"] = rej;
    j["mazur_violations"] = maz;
    j["scanned"] = sc;
    return j;
}

inline CountTable count_table_from_json(const json& j) {
    CountTable t;
    t.fixture = j.value("fixture", "");
    t.level = j.value("level", "K");
    t.r = j.at("r").get<int>();
    t.q = j.at("q").get<long long>();
    t.window = j.at("window").get<int>();
    t.s = j.value("s", 1);
    if (j.contains("mu")) t.mu = j["mu"].get<IVec>();
    if (j.contains("x")) t.x_str = j["x"].get<std::string>();
    t.m_values = j.at("m_values").get<std::vector<int>>();
    for (const auto& row : j.at("rows"))
        t.strata[row.at("stratum").get<IVec>()][row.at("m").get<int>()] =
            row.at("count").get<unsigned long long>();
    auto load_map = [&](const char* key, std::map<int, unsigned long long>& dst) {
        if (!j.contains(key)) return;
        for (auto it = j[key].begin(); it != j[key].end(); ++it)
            dst[std::atoi(it.key().c_str())] = it.value().get<unsigned long long>();
    };
    load_map("rejections", t.rejected);
    load_map("mazur_violations", t.mazur_violations);
    load_map("scanned", t.scanned);
    return t;
}

inline std::string count_table_to_csv(const CountTable& t) {
    std::string s = "m,stratum,count\n";
    for (const auto& [stratum, per_m] : t.strata)
        for (const auto& [m, c] : per_m) {
            s += std::to_string(m) + ",\"(";
            for (size_t i = 0; i < stratum.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(stratum[i]);
            }
            s += ")\"," + std::to_string(c) + "\n";
        }
    return s;
}

// ---------------------------------------------------------------------------
// File helpers. Artifacts are written atomically (tmp + rename) and embed the
// producing configuration for reproducibility.
// ---------------------------------------------------------------------------

inline void write_text_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), "cannot open " + tmp + " for writing");
        out << text;
        require(out.good(), "write failed for " + tmp);
    }
    require(std::rename(tmp.c_str(), path.c_str()) == 0, "atomic rename failed for " + path);
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ValidationError("file not found: " + path);
    json j;
    in >> j;
    return j;
}

/// Load a matrix from a preset name or a JSON file path. Presets need the
/// ambient ring handed in; files carry their own.
inline SeriesMatrix load_matrix(const std::string& spec_str, std::optional<CoeffRing> preset_ring) {
    bool is_preset = false;
    for (const char* p :
         {"superbasic2", "split2", "central2", "superbasic3", "exunbounded", "exdefospnotsmooth"})
        if (spec_str == p) is_preset = true;
    if (is_preset) {
        require(preset_ring.has_value(), "preset fixtures need a field (--q/--m flags)");
        return realize_preset(spec_str, *preset_ring);
    }
    return matrix_from_json(load_json_file(spec_str));
}

}  // namespace shtuka

#pragma once

// Report documents: a versioned machine-readable serialization of the
// analysis pipeline's results (JSON, alphabetically ordered keys so that
// parse -> emit is byte-identical), plus a fixed-width text rendering.

#include <json.hpp>

#include <string>
#include <vector>

#include "ellrank/bounds.hpp"
#include "ellrank/descent.hpp"
#include "ellrank/errors.hpp"
#include "ellrank/tate.hpp"
#include "ellrank/zeta.hpp"

namespace ellrank {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "ellrank/1";

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

template <class K>
std::string field_description(const K& k) {
    if constexpr (K::is_char_zero) {
        return "Q";
    } else if constexpr (requires { k.modulus(); k.base(); }) {
        return "F_" + k.cardinality().get_str() + " = F_" +
               k.base().cardinality().get_str() + "[w]/(" +
               poly_to_string(k.base(), k.modulus(), "w") + ")";
    } else {
        return "F_" + k.cardinality().get_str();
    }
}

template <class K>
Json curve_to_json(const K& k, const EllipticSurfaceModel<K>& E) {
    Json j;
    j["a"] = poly_to_string(k, E.A, "t");
    j["b"] = poly_to_string(k, E.B, "t");
    j["field"] = field_description(k);
    return j;
}

template <class K>
Json local_to_json(const K& k, const LocalReductionData<K>& d) {
    Json j;
    j["c"] = d.c_v;
    j["c_geom"] = d.c_v_geom;
    j["degree"] = d.place.degree();
    j["eps"] = d.eps_arith;
    j["eps_geom"] = d.eps_geom;
    j["f"] = d.f_v;
    j["full_two_rational"] = d.full_two_rational;
    j["m"] = d.m_v;
    j["minimal_rescalings"] = d.reductions;
    j["place"] = place_to_string(k, d.place);
    j["type"] = kodaira_to_string(d.type);
    j["v_delta_min"] = d.delta_min_v;
    return j;
}

template <class K>
Json summary_to_json(const K& k, const GlobalReductionSummary<K>& s) {
    Json j;
    j["chi"] = s.chi;
    j["deg_delta_min"] = s.delta_min_deg;
    j["deg_f"] = s.deg_f;
    j["eps_sum"] = s.eps_sum_arith;
    j["eps_sum_geom"] = s.eps_sum_geom;
    j["p_g"] = s.p_g;
    Json c;
    c["even_star_weighted"] = s.count_even_star_weighted;
    c["full_two"] = s.count_full_two;
    c["full_two_weighted"] = s.count_full_two_weighted;
    c["p"] = s.p;
    c["p_div_c"] = s.count_p_div_c;
    c["p_div_c_geom_weighted"] = s.count_p_div_c_geom_weighted;
    c["p_div_c_weighted"] = s.count_p_div_c_weighted;
    j["corrections"] = c;
    Json locals = Json::array();
    for (const auto& d : s.locals) locals.push_back(local_to_json(k, d));
    j["places"] = locals;
    return j;
}

template <class K>
Json descent_to_json(const K& k, const DescentCurveData<K>& C) {
    Json j;
    j["cubic"] = descent_cubic_to_string(k, C);
    j["deg_ramification"] = C.deg_R;
    j["genus"] = C.genus;
    j["integrality_certificate"] = C.integrality_certificate;
    Json ram = Json::array();
    for (const auto& [v, r] : C.ram_degrees) {
        Json e;
        e["degree"] = v.degree();
        e["place"] = place_to_string(k, v);
        e["ram"] = r;
        ram.push_back(e);
    }
    j["ramification"] = ram;
    return j;
}

inline Json bound_entry_to_json(const BoundEntry& e) {
    Json j;
    j["applicable"] = e.applicable;
    j["inputs"] = e.inputs;
    j["name"] = e.name;
    j["notes"] = e.notes;
    j["rank_zero"] = e.rank_zero;
    j["raw"] = e.raw;
    j["reason"] = e.reason;
    j["value"] = e.value;
    return j;
}

template <class K>
Json bounds_to_json(const RankBoundReport<K>& rep) {
    Json j;
    j["best_bound"] = rep.best_bound;
    j["best_bound_name"] = rep.best_bound_name;
    Json entries = Json::array();
    for (const auto& e : rep.entries) entries.push_back(bound_entry_to_json(e));
    j["entries"] = entries;
    j["hypothesis_note"] = rep.hypothesis_note;
    j["hypothesis_violated"] = rep.hypothesis_violated;
    j["identity_checked"] = rep.identity_checked;
    return j;
}

inline Json lpolynomial_to_json(const LPolynomial& P) {
    Json j;
    Json a = Json::array();
    for (const auto& c : P.a) a.push_back(c.get_str());
    j["coefficients"] = a;
    j["class_number"] = lpoly_class_number(P).get_str();
    j["genus"] = P.g;
    j["q"] = P.q.get_str();
    return j;
}

inline Json two_torsion_to_json(const TwoTorsionBound& t) {
    Json j;
    j["exact"] = t.exact;
    j["lower"] = t.lower;
    j["notes"] = t.notes;
    j["upper"] = t.upper;
    return j;
}

inline Json make_document(const std::string& command) {
    Json doc;
    doc["command"] = command;
    doc["schema"] = kReportSchema;
    return doc;
}

// ---------------------------------------------------------------------------
// Emission and parsing
// ---------------------------------------------------------------------------

inline std::string emit_document(const Json& doc) { return doc.dump(2) + "\n"; }

inline Json parse_document(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // recover line/column from the byte offset
        int line = 1, col = 1;
        size_t stop = e.byte > 0 ? e.byte - 1 : 0;
        for (size_t i = 0; i < stop && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw parse_error(std::string("invalid report document: ") + e.what(),
                          line, col);
    }
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

namespace rtdetail {

inline std::string pad(const std::string& s, size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
}

inline std::string table(const std::vector<std::string>& head,
                         const std::vector<std::vector<std::string>>& rows,
                         const std::string& indent) {
    std::vector<size_t> w(head.size());
    for (size_t i = 0; i < head.size(); ++i) w[i] = head[i].size();
    for (const auto& r : rows)
        for (size_t i = 0; i < r.size() && i < w.size(); ++i)
            w[i] = std::max(w[i], r[i].size());
    std::string out = indent;
    for (size_t i = 0; i < head.size(); ++i) {
        out += pad(head[i], w[i]);
        if (i + 1 < head.size()) out += "  ";
    }
    out += "\n" + indent;
    size_t total = 0;
    for (size_t i = 0; i < w.size(); ++i) total += w[i] + (i + 1 < w.size() ? 2 : 0);
    out += std::string(total, '-') + "\n";
    for (const auto& r : rows) {
        out += indent;
        for (size_t i = 0; i < r.size(); ++i) {
            out += pad(r[i], w[i]);
            if (i + 1 < r.size()) out += "  ";
        }
        out += "\n";
    }
    return out;
}

inline std::string num(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

}  // namespace rtdetail

inline std::string render_text(const Json& doc) {
    std::string out;
    out += "ellrank report";
    if (doc.contains("command"))
        out += " (" + doc["command"].get<std::string>() + ")";
    out += "\n";

    if (doc.contains("curve")) {
        const auto& c = doc["curve"];
        out += "\ncurve over " + c["field"].get<std::string>() + ":\n";
        out += "  y^2 = x^3 + (" + c["a"].get<std::string>() + ")*x + (" +
               c["b"].get<std::string>() + ")\n";
    }

    if (doc.contains("summary")) {
        const auto& s = doc["summary"];
        out += "\nlocal reduction:\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& d : s["places"]) {
            rows.push_back({d["place"].get<std::string>(),
                            d["type"].get<std::string>(),
                            rtdetail::num(d["degree"]), rtdetail::num(d["m"]),
                            rtdetail::num(d["f"]), rtdetail::num(d["c"]),
                            rtdetail::num(d["c_geom"]), rtdetail::num(d["eps"]),
                            rtdetail::num(d["eps_geom"])});
        }
        out += rtdetail::table(
            {"place", "type", "deg", "m", "f", "c", "c_geom", "eps", "eps_geom"},
            rows, "  ");
        out += "  deg f = " + rtdetail::num(s["deg_f"]) +
               ", chi = " + rtdetail::num(s["chi"]) +
               ", p_g = " + rtdetail::num(s["p_g"]) +
               ", deg delta_min = " + rtdetail::num(s["deg_delta_min"]) + "\n";
        out += "  eps sum = " + rtdetail::num(s["eps_sum"]) +
               " (arithmetic), " + rtdetail::num(s["eps_sum_geom"]) +
               " (geometric)\n";
    }

    if (doc.contains("descent")) {
        const auto& d = doc["descent"];
        out += "\ntrisection curve:\n";
        out += "  " + d["cubic"].get<std::string>() + " = 0\n";
        out += "  genus = " + rtdetail::num(d["genus"]) +
               ", ramification degree = " + rtdetail::num(d["deg_ramification"]) +
               "\n";
        out += "  integrality: " + d["integrality_certificate"].get<std::string>() +
               "\n";
    }

    if (doc.contains("hypothesis")) {
        out += "\nhypothesis violated: " + doc["hypothesis"].get<std::string>() +
               "\n";
    }

    if (doc.contains("identity_check")) {
        out += std::string("\ngenus/conductor identity: ") +
               (doc["identity_check"].get<bool>() ? "verified" : "not checked") +
               "\n";
    }

    if (doc.contains("bounds")) {
        const auto& b = doc["bounds"];
        out += "\nrank bounds:\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& e : b["entries"]) {
            bool app = e["applicable"].get<bool>();
            rows.push_back({e["name"].get<std::string>(),
                            app ? "yes" : "no",
                            app ? rtdetail::num(e["value"]) : "-",
                            app ? format_fixed(e["raw"].get<double>(), 6)
                                : e["reason"].get<std::string>()});
        }
        out += rtdetail::table({"bound", "applicable", "value", "raw / reason"},
                               rows, "  ");
        for (const auto& e : b["entries"]) {
            std::string extra;
            if (!e["inputs"].get<std::string>().empty())
                extra += e["inputs"].get<std::string>();
            if (!e["notes"].get<std::string>().empty()) {
                if (!extra.empty()) extra += "; ";
                extra += e["notes"].get<std::string>();
            }
            if (!extra.empty())
                out += "    " + e["name"].get<std::string>() + ": " + extra + "\n";
        }
        if (b["hypothesis_violated"].get<bool>())
            out += "  hypothesis violated: " +
                   b["hypothesis_note"].get<std::string>() + "\n";
        out += "  best bound: " + rtdetail::num(b["best_bound"]) + " (" +
               b["best_bound_name"].get<std::string>() + ")\n";
    }

    if (doc.contains("zeta")) {
        const auto& z = doc["zeta"];
        out += "\nzeta data (q = " + rtdetail::num(z["l_polynomial"]["q"]) +
               ", genus = " + rtdetail::num(z["l_polynomial"]["genus"]) + "):\n";
        std::vector<std::vector<std::string>> rows;
        int i = 1;
        for (const auto& n : z["counts"])
            rows.push_back({std::to_string(i++), rtdetail::num(n)});
        out += rtdetail::table({"i", "N_i"}, rows, "  ");
        out += "  L-polynomial coefficients: [";
        bool first = true;
        for (const auto& c : z["l_polynomial"]["coefficients"]) {
            if (!first) out += ", ";
            out += rtdetail::num(c);
            first = false;
        }
        out += "]\n";
        out += "  class number P(1) = " +
               rtdetail::num(z["l_polynomial"]["class_number"]) + "\n";
        const auto& t = z["two_torsion"];
        out += "  2-torsion dimension in [" + rtdetail::num(t["lower"]) + ", " +
               rtdetail::num(t["upper"]) + "]" +
               (t["exact"].get<bool>() ? " (exact)" : "");
        if (!t["notes"].get<std::string>().empty())
            out += "; " + t["notes"].get<std::string>();
        out += "\n";
    }

    if (doc.contains("oracle")) {
        const auto& o = doc["oracle"];
        out += "\ndivisor class oracle:\n";
        out += "  places up to degree " + rtdetail::num(o["max_place_degree"]) +
               ": " + rtdetail::num(o["places"]) + " (" +
               rtdetail::num(o["degree_one_places"]) + " of degree 1)\n";
        out += "  class number = " + rtdetail::num(o["class_number"]) +
               ", 2-torsion count = " + rtdetail::num(o["two_torsion_count"]) +
               ", 2-rank = " + rtdetail::num(o["two_rank"]) + "\n";
        out += std::string("  class number matches P(1): ") +
               (o["class_number_matches_zeta"].get<bool>() ? "yes" : "NO") + "\n";
        out += std::string("  2-rank within zeta interval: ") +
               (o["rank_in_zeta_interval"].get<bool>() ? "yes" : "NO") + "\n";
    }

    return out;
}

}  // namespace ellrank

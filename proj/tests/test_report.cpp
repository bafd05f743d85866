#include <catch2/catch_amalgamated.hpp>

#include "ellrank/pipeline.hpp"

using namespace ellrank;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

CurveInputFile file_from(const std::string& text) {
    return parse_curve_file(text);
}

}  // namespace

TEST_CASE("analyze document for a curve with two extreme cusps over Q") {
    auto doc = cmd_analyze_json(
        file_from("base_field: rationals\nb: t^5 + 1\n"));
    CHECK(doc["schema"] == kReportSchema);
    CHECK(doc["command"] == "analyze");
    CHECK(doc["curve"]["field"] == "Q");
    CHECK(doc["curve"]["b"] == "t^5 + 1");

    const auto& s = doc["summary"];
    CHECK(s["deg_f"] == 12);
    CHECK(s["chi"] == 1);
    CHECK(s["p_g"] == 0);

    // type II at both finite bad places, each with f = 2, c = 1
    int seen_II = 0;
    for (const auto& d : s["places"]) {
        if (d["place"].get<std::string>().find("infinity") != std::string::npos)
            continue;
        CHECK(d["type"] == "II");
        CHECK(d["f"] == 2);
        CHECK(d["c"] == 1);
        ++seen_II;
    }
    CHECK(seen_II == 2);

    CHECK(doc["descent"]["genus"] == 4);
    CHECK(doc["identity_check"] == true);
    CHECK_FALSE(doc.contains("hypothesis"));
}

TEST_CASE("analyze document reports a reducible two-torsion hypothesis") {
    auto doc = cmd_analyze_json(file_from("base_field: rationals\na: t\n"));
    REQUIRE(doc.contains("hypothesis"));
    CHECK_THAT(doc["hypothesis"].get<std::string>(),
               ContainsSubstring("E[2] not irreducible"));
    CHECK_FALSE(doc.contains("descent"));
    CHECK(doc.contains("summary"));  // local data still present
}

TEST_CASE("document round-trips byte-identically") {
    auto doc = cmd_analyze_json(
        file_from("base_field: finite 5\nb: t^2 + 1\n"));
    auto text = emit_document(doc);
    auto again = emit_document(parse_document(text));
    CHECK(text == again);

    // determinism across independent runs
    auto doc2 = cmd_analyze_json(
        file_from("base_field: finite 5\nb: t^2 + 1\n"));
    CHECK(emit_document(doc2) == text);
}

TEST_CASE("bounds documents round-trip and stay deterministic") {
    auto f = file_from("base_field: rationals\nb: t^5 + 1\n");
    PipelineOptions opt;
    auto doc = cmd_bounds_json(f, opt);
    auto text = emit_document(doc);
    CHECK(emit_document(parse_document(text)) == text);
    CHECK(emit_document(cmd_bounds_json(f, opt)) == text);
}

TEST_CASE("malformed report text yields a parse error with position") {
    try {
        parse_document("{\n  \"a\": ]\n}");
        FAIL("expected a parse error");
    } catch (const parse_error& e) {
        CHECK(e.line == 2);
        CHECK_THAT(e.what(), ContainsSubstring("invalid report document"));
    }
}

TEST_CASE("bounds document over Q with an asserted torsion dimension") {
    auto f = file_from(
        "base_field: rationals\n"
        "b: t^5 + 1\n"
        "torsion_dim_p2: 0\n"
        "external_notes: certified externally\n");
    auto doc = cmd_bounds_json(f);
    const auto& b = doc["bounds"];
    CHECK(b["best_bound"] == 0);
    CHECK(b["hypothesis_violated"] == false);
    CHECK(doc["identity_check"] == true);

    bool found = false;
    for (const auto& e : b["entries"]) {
        if (e["name"] != "descent") continue;
        found = true;
        CHECK(e["applicable"] == true);
        CHECK(e["value"] == 0);
        CHECK_THAT(e["inputs"].get<std::string>(),
                   ContainsSubstring("from the input file"));
        CHECK_THAT(e["inputs"].get<std::string>(),
                   ContainsSubstring("certified externally"));
    }
    CHECK(found);

    // the command-line assertion takes precedence over the file
    PipelineOptions opt;
    opt.torsion_dim = 2;
    auto doc2 = cmd_bounds_json(f, opt);
    for (const auto& e : doc2["bounds"]["entries"]) {
        if (e["name"] != "descent") continue;
        CHECK(e["value"] == 2);
        CHECK_THAT(e["inputs"].get<std::string>(),
                   ContainsSubstring("user-asserted"));
    }
}

TEST_CASE("bounds document in geometric mode") {
    auto f = file_from("base_field: rationals\nb: t^5 + 1\n");
    PipelineOptions opt;
    opt.geometric = true;
    auto doc = cmd_bounds_json(f, opt);
    const auto& b = doc["bounds"];
    CHECK(b["best_bound"] == 8);
    for (const auto& e : b["entries"]) {
        if (e["name"] == "descent") {
            CHECK(e["value"] == 8);
            CHECK_THAT(e["inputs"].get<std::string>(),
                       ContainsSubstring("algebraic closure"));
        }
    }
}

TEST_CASE("bounds over a finite field certify torsion by counting") {
    auto f = file_from("base_field: finite 5\nb: t^2 + 1\n");
    auto doc = cmd_bounds_json(f);
    const auto& b = doc["bounds"];
    bool found = false;
    for (const auto& e : b["entries"]) {
        if (e["name"] != "descent") continue;
        found = true;
        CHECK(e["applicable"] == true);
        // genus 1 trisection with class number 6: interval [1, 1], exact
        CHECK_THAT(e["inputs"].get<std::string>(),
                   ContainsSubstring("computed 2-torsion interval"));
    }
    CHECK(found);
}

TEST_CASE("bounds over Q via certified good primes") {
    auto f = file_from("base_field: rationals\nb: t^2 + 1\n");
    PipelineOptions opt;
    opt.good_primes = {5, 7};
    auto doc = cmd_bounds_json(f, opt);
    bool found = false;
    for (const auto& e : doc["bounds"]["entries"]) {
        if (e["name"] != "descent") continue;
        found = true;
        CHECK_THAT(e["inputs"].get<std::string>(),
                   ContainsSubstring("certified at the good prime"));
    }
    CHECK(found);

    // an empty prime list falls back to the unconditional dimension cap
    auto doc2 = cmd_bounds_json(f);
    for (const auto& e : doc2["bounds"]["entries"]) {
        if (e["name"] != "descent") continue;
        CHECK_THAT(e["inputs"].get<std::string>(), ContainsSubstring("2 g(C)"));
    }

    // a list with no certifiable prime is an undetermined certificate
    PipelineOptions bad;
    bad.good_primes = {2};
    CHECK_THROWS_AS(cmd_bounds_json(f, bad), undetermined_error);
}

TEST_CASE("zeta document for a genus-1 trisection over F_7") {
    auto f = file_from("base_field: finite 7\nb: t^2 + 1\n");
    PipelineOptions opt;
    opt.extension_max = 2;
    auto doc = cmd_zeta_json(f, opt);
    const auto& z = doc["zeta"];
    REQUIRE(z["counts"].size() == 2);
    CHECK(z["l_polynomial"]["genus"] == 1);
    CHECK(z["l_polynomial"]["q"] == "7");
    CHECK(z["l_polynomial"]["class_number"] == "4");
    // class number 4 guarantees a 2-torsion point but fixes only the interval
    CHECK(z["two_torsion"]["lower"] == 1);
    CHECK(z["two_torsion"]["upper"] == 2);
    CHECK(z["two_torsion"]["exact"] == false);

    auto text = emit_document(doc);
    CHECK(emit_document(parse_document(text)) == text);

    CHECK_THROWS_AS(
        cmd_zeta_json(file_from("base_field: rationals\nb: t^2 + 1\n")),
        capability_error);
}

TEST_CASE("oracle document cross-checks the class table against the counts") {
    auto f = file_from("base_field: finite 5\nb: t^2 + 1\n");
    auto doc = cmd_oracle_json(f);
    const auto& o = doc["oracle"];
    CHECK(o["class_number"] == 6);
    CHECK(o["two_rank"] == 1);
    CHECK(o["two_torsion_count"] == 2);
    CHECK(o["class_number_matches_zeta"] == true);
    CHECK(o["rank_in_zeta_interval"] == true);
    CHECK(doc["zeta"]["l_polynomial"]["class_number"] == "6");

    CHECK_THROWS_AS(
        cmd_oracle_json(file_from("base_field: rationals\nb: t^2 + 1\n")),
        capability_error);
}

TEST_CASE("text rendering shows every section with aligned tables") {
    auto f = file_from(
        "base_field: rationals\nb: t^5 + 1\ntorsion_dim_p2: 0\n");
    auto text = render_text(cmd_bounds_json(f));
    CHECK_THAT(text, ContainsSubstring("curve over Q"));
    CHECK_THAT(text, ContainsSubstring("y^2 = x^3 + (0)*x + (t^5 + 1)"));
    CHECK_THAT(text, ContainsSubstring("local reduction:"));
    CHECK_THAT(text, ContainsSubstring("II"));
    CHECK_THAT(text, ContainsSubstring("deg f = 12"));
    CHECK_THAT(text, ContainsSubstring("trisection curve:"));
    CHECK_THAT(text, ContainsSubstring("genus = 4"));
    CHECK_THAT(text, ContainsSubstring("genus/conductor identity: verified"));
    CHECK_THAT(text, ContainsSubstring("rank bounds:"));
    CHECK_THAT(text, ContainsSubstring("best bound: 0 (descent)"));

    // header and rows of the local table align on the same column widths
    auto pos = text.find("place");
    REQUIRE(pos != std::string::npos);

    auto zeta_text = render_text(
        cmd_zeta_json(file_from("base_field: finite 7\nb: t^2 + 1\n")));
    CHECK_THAT(zeta_text, ContainsSubstring("N_i"));
    CHECK_THAT(zeta_text, ContainsSubstring("class number P(1) = 4"));
    CHECK_THAT(zeta_text, ContainsSubstring("2-torsion dimension in [1, 2]"));

    auto oracle_text = render_text(
        cmd_oracle_json(file_from("base_field: finite 5\nb: t^2 + 1\n")));
    CHECK_THAT(oracle_text, ContainsSubstring("divisor class oracle:"));
    CHECK_THAT(oracle_text, ContainsSubstring("class number matches P(1): yes"));

    auto hyp_text = render_text(
        cmd_analyze_json(file_from("base_field: rationals\na: t\n")));
    CHECK_THAT(hyp_text, ContainsSubstring("hypothesis violated"));
    CHECK_THAT(hyp_text, ContainsSubstring("E[2] not irreducible"));
}

TEST_CASE("rendering a parsed document equals rendering the original") {
    auto doc = cmd_analyze_json(
        file_from("base_field: finite 5\nb: t^2 + 1\n"));
    CHECK(render_text(parse_document(emit_document(doc))) == render_text(doc));
}

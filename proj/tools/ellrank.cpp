// ellrank: rank bounds for nonconstant elliptic curves y^2 = x^3 + A(t)x + B(t)
// over Q(t) and F_q(t), char not in {2, 3}.
//
// Subcommands:
//   analyze  local reduction data at every place, conductor, trisection curve
//   bounds   every applicable rank bound plus the best one
//   zeta     point counts and the L-polynomial of the trisection curve
//   oracle   exhaustive divisor-class computation (small finite fields only)
//
// Exit codes: 0 success; 1 usage, parse, or internal error; 2 hypothesis
// violated (reducible two-torsion or singular model); 3 certificate
// undetermined within budget; 4 outside the capability envelope.
// The environment variable ELLRANK_WORK_BUDGET overrides the default
// point-counting work budget.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ellrank/pipeline.hpp"

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "rank bounds for nonconstant elliptic curves over Q(t) and F_q(t)"};
    app.require_subcommand(1);

    std::string path;
    bool json_mode = false;
    ellrank::PipelineOptions opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", path,
                        "curve description file ('-' reads standard input)")
            ->required();
        sub->add_flag("--json", json_mode,
                      "emit the machine-readable report document");
    };

    auto* analyze = app.add_subcommand(
        "analyze",
        "local reduction data, conductor, and the trisection curve");
    add_common(analyze);

    auto* bounds =
        app.add_subcommand("bounds", "evaluate every applicable rank bound");
    add_common(bounds);
    bounds->add_option("--p", opt.p, "descent prime (default 2)")
        ->check(CLI::PositiveNumber);
    bounds->add_option("--torsion-dim", opt.torsion_dim,
                       "externally determined dim Pic(C)[p], recorded as "
                       "user-asserted");
    bounds->add_flag("--geometric", opt.geometric,
                     "bound the geometric rank over the algebraic closure");
    bounds
        ->add_option("--good-primes", opt.good_primes,
                     "primes to try when certifying good reduction of the "
                     "trisection curve over Q")
        ->delimiter(',');
    bounds->add_option("--explicit-formula-c", opt.explicit_formula_c,
                       "second-order constant for the counting bound");
    bounds->add_option("--threads", opt.threads, "point-counting threads")
        ->check(CLI::PositiveNumber);

    auto* zeta = app.add_subcommand(
        "zeta", "point counts and the trisection curve's L-polynomial");
    add_common(zeta);
    zeta->add_option("--extension-max", opt.extension_max,
                     "count points over extensions up to this degree");
    zeta->add_option("--threads", opt.threads, "point-counting threads")
        ->check(CLI::PositiveNumber);

    auto* oracle = app.add_subcommand(
        "oracle",
        "exhaustive divisor-class computation within its caps, cross-checked "
        "against the point-count route");
    add_common(oracle);

    CLI11_PARSE(app, argc, argv);

    try {
        auto file = ellrank::parse_curve_file(read_input(path));
        ellrank::Json doc;
        int exit_code = 0;
        if (app.got_subcommand(analyze)) {
            doc = ellrank::cmd_analyze_json(file);
            if (doc.contains("hypothesis")) exit_code = 2;
        } else if (app.got_subcommand(bounds)) {
            doc = ellrank::cmd_bounds_json(file, opt);
            if (doc["bounds"]["hypothesis_violated"].get<bool>()) exit_code = 2;
        } else if (app.got_subcommand(zeta)) {
            doc = ellrank::cmd_zeta_json(file, opt);
        } else {
            doc = ellrank::cmd_oracle_json(file, opt);
        }
        if (json_mode)
            std::cout << ellrank::emit_document(doc);
        else
            std::cout << ellrank::render_text(doc);
        return exit_code;
    } catch (const ellrank::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const ellrank::hypothesis_error& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return 2;
    } catch (const ellrank::undetermined_error& e) {
        std::cerr << "undetermined certificate: " << e.what() << "\n";
        return 3;
    } catch (const ellrank::capability_error& e) {
        std::cerr << "capability limit: " << e.what() << "\n";
        return 4;
    } catch (const ellrank::internal_error& e) {
        std::cerr << "internal error (please report this): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

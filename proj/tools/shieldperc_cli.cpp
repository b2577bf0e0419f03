// Command-line front end: bound reports, table generation, Monte Carlo
// simulation, exhaustive combinatorial sweeps, and walk distributions.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shieldperc/bounds_engine.hpp"
#include "shieldperc/combinatorial_oracle.hpp"
#include "shieldperc/percolation_sim.hpp"
#include "shieldperc/walk_model.hpp"

using nlohmann::json;
using namespace shieldperc;

namespace {

std::string fmt9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

json tagged(double value, const char* provenance) {
    return json{{"value", value}, {"provenance", provenance}};
}

std::map<int, double> load_pc_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open pc-file: " + path);
    std::map<int, double> pc;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        int d;
        char comma;
        double v;
        if (ss >> d >> comma >> v) pc[d] = v;
    }
    return pc;
}

json report_to_json(const BoundReport& r) {
    json j{{"d", r.d},
           {"g", tagged(r.g, "closed_form")},
           {"B", tagged(r.B, "closed_form")},
           {"t_B", tagged(r.p2_upper, "closed_form")},
           {"lhs1", tagged(r.lhs1_at_g, "closed_form")},
           {"lhs2", tagged(r.lhs2_at_g, "closed_form")},
           {"p_lower", tagged(r.p_lower, "closed_form")},
           {"max_lhs", tagged(r.max_lhs_at_p_lower, "closed_form")},
           {"upper_bound", tagged(r.upper_bound, "closed_form")}};
    if (!std::isnan(r.p_c)) {
        j["p_c"] = tagged(r.p_c, "golden_constant");
        j["exceeds_pc"] = r.exceeds_pc;
    }
    return j;
}

void print_report_rows(const std::vector<BoundReport>& rows, const std::string& format) {
    if (format == "csv") {
        std::cout << "d,g,B,t_B,lhs1,lhs2,p_lower,max_lhs,upper_bound,p_c,exceeds_pc\n";
        for (const auto& r : rows)
            std::cout << r.d << ',' << fmt9(r.g) << ',' << fmt9(r.B) << ','
                      << fmt9(r.p2_upper) << ',' << fmt9(r.lhs1_at_g) << ','
                      << fmt9(r.lhs2_at_g) << ',' << fmt9(r.p_lower) << ','
                      << fmt9(r.max_lhs_at_p_lower) << ',' << fmt9(r.upper_bound)
                      << ',' << fmt9(r.p_c) << ',' << (r.exceeds_pc ? 1 : 0) << '\n';
    } else if (format == "json") {
        json j = json::array();
        for (const auto& r : rows) j.push_back(report_to_json(r));
        std::cout << j.dump(2) << '\n';
    } else {
        for (const auto& r : rows)
            std::cout << "d=" << r.d << "  p_lower=" << fmt9(r.p_lower)
                      << "  max_lhs=" << fmt9(r.max_lhs_at_p_lower)
                      << "  p_c=" << fmt9(r.p_c)
                      << "  exceeds_pc=" << (r.exceeds_pc ? "yes" : "no") << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shielded-percolation bound calculator and simulation harness"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags (e.g. --format) after a subcommand

    std::string format = "json";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));

    int dim = 0, n = 0, kmax = 8;
    double p = 0.0, margin = 1e-5, tol = 0.0, q = 0.0;
    long trials = 1000;
    std::uint64_t seed = 1, stream = 0;
    long cap_pairs = 100'000'000;
    long cap_states = static_cast<long>(kDefaultStateCap);
    std::string pc_file, task = "edges";
    std::optional<double> lambda_value;

    auto* c_bounds = app.add_subcommand("bounds", "Bound report for one dimension");
    c_bounds->add_option("--dim", dim, "Lattice dimension")->required();
    c_bounds->add_option("--margin", margin, "Admissibility margin");
    c_bounds->add_option("--tol", tol, "Series truncation tolerance (0 = automatic)");
    c_bounds->add_option("--pc-file", pc_file, "CSV file d,p_c of reference thresholds");

    auto* c_t1 = app.add_subcommand("table1", "Admissibility columns for d = 9..18");
    (void)c_t1;
    auto* c_t2 = app.add_subcommand("table2", "Lower-bound reports for d = 5..9");
    c_t2->add_option("--margin", margin, "Admissibility margin");
    c_t2->add_option("--pc-file", pc_file, "CSV file d,p_c of reference thresholds");

    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo shielded-path moments");
    c_sim->add_option("--dim", dim, "Lattice dimension")->required();
    c_sim->add_option("--n", n, "Path horizon / box extent")->required();
    c_sim->add_option("--p", p, "Edge-open probability")->required();
    c_sim->add_option("--trials", trials, "Number of configurations");
    c_sim->add_option("--seed", seed, "RNG seed");
    c_sim->add_option("--stream", stream, "RNG stream id offset");

    auto* c_oracle = app.add_subcommand("oracle", "Exhaustive combinatorial sweeps");
    c_oracle->add_option("--dim", dim, "Lattice dimension")->required();
    c_oracle->add_option("--n", n, "Path length")->required();
    c_oracle->add_option("--task", task, "edges | xi | saw | second-moment")
        ->check(CLI::IsMember({"edges", "xi", "saw", "second-moment"}));
    c_oracle->add_option("--q", q, "Edge-closed probability for second-moment task");
    c_oracle->add_option("--cap-pairs", cap_pairs, "Pair-sweep size cap");

    auto* c_walks = app.add_subcommand("walks", "Exact paired-walk distributions");
    c_walks->add_option("--dim", dim, "Lattice dimension")->required();
    c_walks->add_option("--kmax", kmax, "Largest step computed");
    c_walks->add_option("--tol", tol, "Series truncation tolerance (0 = automatic)");
    c_walks->add_option("--cap-states", cap_states, "DP state cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\nRun with --help for usage.\n";
        return 64;
    }

    try {
        if (c_bounds->parsed()) {
            const Dimension d(dim);
            std::optional<double> pc;
            const auto pc_map = pc_file.empty() ? default_pc_values() : load_pc_file(pc_file);
            if (auto it = pc_map.find(dim); it != pc_map.end()) pc = it->second;
            const auto r = bound_report(d, margin, pc, tol);
            print_report_rows({r}, format == "csv" ? "csv" : format);
        } else if (c_t1->parsed()) {
            const auto rows = table1();
            if (format == "csv") {
                std::cout << "d,lhs1,lhs2,pass\n";
                for (const auto& r : rows)
                    std::cout << r.d << ',' << fmt9(r.lhs1) << ',' << fmt9(r.lhs2)
                              << ',' << (r.pass ? 1 : 0) << '\n';
            } else if (format == "json") {
                json j = json::array();
                for (const auto& r : rows)
                    j.push_back({{"d", r.d},
                                 {"lhs1", tagged(r.lhs1, "closed_form")},
                                 {"lhs2", tagged(r.lhs2, "closed_form")},
                                 {"pass", r.pass}});
                std::cout << j.dump(2) << '\n';
            } else {
                for (const auto& r : rows)
                    std::cout << "d=" << r.d << "  lhs1=" << fmt9(r.lhs1)
                              << "  lhs2=" << fmt9(r.lhs2)
                              << "  pass=" << (r.pass ? "yes" : "no") << '\n';
            }
        } else if (c_t2->parsed()) {
            const auto pc_map = pc_file.empty() ? default_pc_values() : load_pc_file(pc_file);
            print_report_rows(table2(pc_map, margin), format);
        } else if (c_sim->parsed()) {
            const Dimension d(dim);
            const auto m = estimate_moments(d, n, p, trials, seed + stream);
            json j{{"d", m.d},
                   {"n", m.n},
                   {"p", m.p},
                   {"trials", m.trials},
                   {"mean_N", tagged(m.mean_n, "monte_carlo")},
                   {"se_mean_N", tagged(m.se_mean, "monte_carlo")},
                   {"mean_N2", tagged(m.mean_n2, "monte_carlo")},
                   {"se_mean_N2", tagged(m.se_mean2, "monte_carlo")},
                   {"survival", tagged(m.survival, "monte_carlo")},
                   {"se_survival", tagged(m.se_survival, "monte_carlo")},
                   {"expected_mean_N", tagged(m.expected_mean, "closed_form")},
                   {"paley_zygmund", tagged(m.paley_zygmund, "monte_carlo")}};
            std::cout << j.dump(2) << '\n';
        } else if (c_oracle->parsed()) {
            const Dimension d(dim);
            if (task == "edges") {
                const auto rep = verify_edge_bound(d, n, cap_pairs);
                json j{{"d", rep.d},
                       {"n", rep.n},
                       {"instances_checked", rep.instances_checked},
                       {"violations", rep.violations},
                       {"worst_slack", rep.min_slack},
                       {"e2_equality_cases", rep.e2_equality_cases}};
                std::cout << j.dump(2) << '\n';
            } else if (task == "xi" || task == "saw") {
                const long c = task == "xi" ? enumerate_xi(d, n) : enumerate_saw(d, n);
                json j{{"d", dim}, {"n", n}, {"count", c}, {"provenance", "dp_exact"}};
                std::cout << j.dump(2) << '\n';
            } else {  // second-moment
                if (q <= 0.0 || q >= 1.0)
                    throw std::domain_error("second-moment task needs --q in (0,1)");
                using rational = boost::multiprecision::cpp_rational;
                // represent q exactly from its decimal text
                std::ostringstream qs;
                qs << q;
                rational qr(qs.str().find('.') == std::string::npos
                                ? qs.str()
                                : [&] {
                                      std::string s = qs.str();
                                      const auto dot = s.find('.');
                                      const std::string digits = s.substr(0, dot) + s.substr(dot + 1);
                                      std::string den = "1";
                                      den.append(s.size() - dot - 1, '0');
                                      return digits + "/" + den;
                                  }());
                const rational ps = pair_sum_second_moment<rational>(d, n, qr);
                const rational bf = brute_force_second_moment<rational>(d, n, qr);
                json j{{"d", dim},
                       {"n", n},
                       {"q", q},
                       {"pair_sum", ps.str()},
                       {"brute_force", bf.str()},
                       {"equal", ps == bf},
                       {"provenance", "dp_exact"}};
                std::cout << j.dump(2) << '\n';
            }
        } else if (c_walks->parsed()) {
            const Dimension d(dim);
            const auto tau = tau_distribution<double>(d, kmax,
                                                      static_cast<std::size_t>(cap_states));
            const auto tau_hat = tau_hat_distribution<double>(
                d, kmax, static_cast<std::size_t>(cap_states));
            json j{{"d", dim},
                   {"k_max", kmax},
                   {"tau", json::array()},
                   {"tau_hat", json::array()},
                   {"provenance", "dp_exact"}};
            for (std::size_t i = 0; i < tau.probs.size(); ++i)
                j["tau"].push_back({{"k", tau.k_min + static_cast<int>(i)},
                                    {"prob", tau.probs[i]}});
            j["tau_tail_bound"] = tau.tail_bound;
            for (std::size_t i = 0; i < tau_hat.probs.size(); ++i)
                j["tau_hat"].push_back({{"k", tau_hat.k_min + static_cast<int>(i)},
                                        {"prob", tau_hat.probs[i]}});
            j["tau_hat_tail_bound"] = tau_hat.tail_bound;
            if (dim >= 4) {
                const auto cb = collision_bounds(d, tol > 0.0 ? tol : default_series_tol(dim));
                j["B"] = tagged(cb.B, "closed_form");
                j["t_B"] = tagged(cb.p2_upper, "closed_form");
                j["g"] = tagged(cb.g, "closed_form");
                j["series_terms_used"] = cb.series_terms_used;
                j["tail_error"] = cb.tail_error;
            }
            std::cout << j.dump(2) << '\n';
        }
    } catch (const resource_error& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

// permrat: decide, classify, canonicalize, count and generate degree-3
// permutation rational functions of P^1(F_q).
//
// Exit codes: 0 success, 1 domain error (bad input data, guard exceeded),
// 2 usage error, 3 crosscheck disagreement.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "permrat/census.hpp"
#include "permrat/classify.hpp"
#include "permrat/field.hpp"
#include "permrat/parse.hpp"
#include "permrat/selfcheck.hpp"
#include "permrat/serialize.hpp"

namespace {

using namespace permrat;

DecisionMode parse_mode(const std::string& s) {
    if (s == "auto") return DecisionMode::automatic;
    if (s == "criterion") return DecisionMode::criterion;
    if (s == "brute") return DecisionMode::brute;
    if (s == "crosscheck") return DecisionMode::crosscheck;
    throw CLI::ValidationError("--mode", "expected auto|criterion|brute|crosscheck");
}

void print_report(const Field& F, const RatFunc& phi, const ClassReport& rep, bool json) {
    if (json) {
        nlohmann::json out = to_json(rep);
        out["field"] = field_json(F);
        out["function"] = format_ratfunc(phi);
        std::cout << out.dump() << "\n";
        return;
    }
    std::cout << "field:     " << F.describe() << "\n";
    std::cout << "function:  " << format_ratfunc(phi) << "\n";
    std::cout << "separable: " << (rep.separable ? "yes" : "no") << "\n";
    std::cout << "verdict:   " << (rep.permutation ? "permutation" : "not a permutation") << "\n";
    if (rep.canon) {
        std::cout << "canonical: " << to_string(rep.canon->tag) << "  "
                  << format_ratfunc(rep.canon->representative) << "\n";
        auto mob = [](const Mobius& m) {
            return "(" + format_elem(m.a()) + "*x+" + format_elem(m.b()) + ")/(" +
                   format_elem(m.c()) + "*x+" + format_elem(m.d()) + ")";
        };
        std::cout << "witnesses: m1 = " << mob(rep.witnesses->first)
                  << "   m2 = " << mob(rep.witnesses->second) << "\n";
    }
    if (rep.evidence.delta)
        std::cout << "Delta(t):  " << format_poly(*rep.evidence.delta, 't') << "\n";
    if (rep.evidence.square_decomp)
        std::cout << "decomp:    u = " << format_elem(rep.evidence.square_decomp->first)
                  << ", r(t) = " << format_poly(rep.evidence.square_decomp->second, 't') << "\n";
    if (rep.evidence.resolvent_root)
        std::cout << "resolvent: S(t) = " << format_poly(*rep.evidence.resolvent_root, 't')
                  << "  (over F_q^2)\n";
    if (rep.evidence.note) std::cout << "note:      " << *rep.evidence.note << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"degree-3 permutation rational functions over finite fields"};
    app.require_subcommand(1);

    std::string field_spec;
    std::string expr;
    std::string mode_str = "auto";
    bool json = false, csv = false;
    unsigned threads = 1;
    std::uint64_t max_q = 0;  // 0 = keep defaults
    unsigned ext_n = 3;
    std::string check = "both";

    auto add_field = [&](CLI::App* cmd) {
        cmd->add_option("--field", field_spec, "field spec: p, p^k or p^k:[c0,...,1]")
            ->required();
    };

    auto* t_cmd = app.add_subcommand("test", "decide the permutation property");
    add_field(t_cmd);
    t_cmd->add_option("expr", expr, "rational function")->required();
    t_cmd->add_option("--mode", mode_str, "auto|criterion|brute|crosscheck");
    t_cmd->add_flag("--json", json);

    auto* c_cmd = app.add_subcommand("classify", "canonical form with Moebius witnesses");
    add_field(c_cmd);
    c_cmd->add_option("expr", expr, "rational function")->required();
    c_cmd->add_option("--mode", mode_str, "auto|criterion|brute|crosscheck");
    c_cmd->add_flag("--json", json);
    auto* canon_cmd = app.add_subcommand("canonical", "alias of classify");
    add_field(canon_cmd);
    canon_cmd->add_option("expr", expr, "rational function")->required();
    canon_cmd->add_option("--mode", mode_str, "auto|criterion|brute|crosscheck");
    canon_cmd->add_flag("--json", json);

    auto* n_cmd = app.add_subcommand("count", "census of monic coprime pairs vs formula");
    add_field(n_cmd);
    n_cmd->add_option("--mode", mode_str, "auto|criterion|brute|crosscheck");
    n_cmd->add_flag("--json", json);
    n_cmd->add_flag("--csv", csv);
    n_cmd->add_option("--threads", threads, "census worker threads");
    n_cmd->add_option("--max-q", max_q, "override the census size guards");

    auto* o_cmd = app.add_subcommand("classes", "Moebius equivalence classes");
    add_field(o_cmd);
    o_cmd->add_flag("--json", json);
    o_cmd->add_option("--max-q", max_q, "override the orbit size guard");

    auto* p_cmd = app.add_subcommand("complete", "complete permutation census");
    add_field(p_cmd);
    p_cmd->add_flag("--json", json);
    p_cmd->add_option("--max-q", max_q, "override the census size guard");

    auto* j_cmd = app.add_subcommand("jump", "fractional-jump permutation table of F_q");
    add_field(j_cmd);
    j_cmd->add_option("expr", expr, "permutation rational function")->required();
    j_cmd->add_flag("--json", json);

    auto* e_cmd = app.add_subcommand("extend", "permutation behaviour over F_{q^n}");
    add_field(e_cmd);
    e_cmd->add_option("expr", expr, "rational function")->required();
    e_cmd->add_option("--n", ext_n, "extension degree")->required();
    e_cmd->add_option("--check", check, "predict|verify|both");
    e_cmd->add_flag("--json", json);

    auto* s_cmd = app.add_subcommand("selfcheck", "replay the acceptance suite");
    s_cmd->add_option("--max-q", max_q, "restrict criteria to fields with q <= max-q");
    s_cmd->add_option("--threads", threads, "census worker threads");
    s_cmd->add_flag("--json", json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    DecisionMode mode = parse_mode(mode_str);

    if (s_cmd->parsed()) {
        SelfcheckOptions opt;
        if (max_q) opt.max_q = max_q;
        opt.threads = threads;
        std::vector<CheckResult> results = run_acceptance(opt);
        bool all_ok = true;
        nlohmann::json jout = nlohmann::json::array();
        for (const CheckResult& r : results) {
            const char* st = r.status == CheckResult::Status::pass   ? "PASS"
                             : r.status == CheckResult::Status::skip ? "SKIP"
                                                                     : "FAIL";
            if (r.status == CheckResult::Status::fail) all_ok = false;
            if (json) {
                jout.push_back({{"criterion", r.name},
                                {"status", st},
                                {"detail", r.detail},
                                {"seconds", r.seconds}});
            } else {
                std::printf("[%s] %-38s (%.2fs) %s\n", st, r.name.c_str(), r.seconds,
                            r.detail.c_str());
            }
        }
        if (json) std::cout << jout.dump() << "\n";
        return all_ok ? 0 : 1;
    }

    FieldPtr F = Field::parse_spec(field_spec);

    if (t_cmd->parsed() || c_cmd->parsed() || canon_cmd->parsed()) {
        RatFunc phi = parse_ratfunc(expr, *F);
        ClassReport rep = (t_cmd->parsed()) ? is_permutation(phi, mode)
                                            : canonicalize(phi, mode);
        print_report(*F, phi, rep, json);
        return 0;
    }

    if (n_cmd->parsed()) {
        CensusGuards guards;
        if (max_q) {
            guards.brute_max_q = max_q;
            guards.criterion_max_q = max_q;
        }
        CensusMethod method = CensusMethod::brute;
        if (mode == DecisionMode::criterion) method = CensusMethod::criterion;
        if (mode == DecisionMode::crosscheck) method = CensusMethod::crosscheck;
        if (mode == DecisionMode::automatic && F->size() > guards.brute_max_q)
            method = CensusMethod::criterion;
        CensusResult res = count_permutations(*F, method, guards, threads);
        if (csv) {
            std::cout << census_csv(res);
        } else if (json) {
            for (const ShapeCount& row : res.rows)
                std::cout << to_json(row, res.q, res.method).dump() << "\n";
            std::cout << summary_json(res).dump() << "\n";
        } else {
            std::cout << "field: " << F->describe() << "\n";
            std::printf("%-8s %12s %12s %12s\n", "shape", "pairs", "coprime", "perms");
            for (const ShapeCount& row : res.rows)
                std::printf("(%d,%d)    %12llu %12llu %12llu\n", row.deg_f, row.deg_g,
                            static_cast<unsigned long long>(row.pairs),
                            static_cast<unsigned long long>(row.coprime),
                            static_cast<unsigned long long>(row.perms));
            std::uint64_t formula = formula_Nq(res.q);
            std::cout << "N_q (census):  " << res.n_q << "\n";
            std::cout << "N_q (formula): " << formula << "\n";
            std::cout << "match:         " << (res.n_q == formula ? "yes" : "NO") << "\n";
            if (res.n_q != formula) return 3;
        }
        return 0;
    }

    if (o_cmd->parsed()) {
        CensusGuards guards;
        if (max_q) guards.orbit_max_q = max_q;
        OrbitTable table = equivalence_classes(*F, guards);
        if (json) {
            std::cout << to_json(table).dump() << "\n";
        } else {
            std::cout << "field: " << F->describe() << "\n";
            std::cout << "classes: " << table.orbits.size() << "  (population "
                      << table.population << ")\n";
            for (const Orbit& o : table.orbits)
                std::cout << "  size " << o.size << "  min " << format_ratfunc(o.min_rep) << "\n";
        }
        return 0;
    }

    if (p_cmd->parsed()) {
        CensusGuards guards;
        if (max_q) guards.complete_max_q = max_q;
        std::vector<RatFunc> found = complete_census(*F, guards);
        if (json) {
            nlohmann::json arr = nlohmann::json::array();
            for (const RatFunc& r : found) arr.push_back(format_ratfunc(r));
            std::cout << nlohmann::json{{"q", F->size()}, {"complete", arr}}.dump() << "\n";
        } else {
            std::cout << "complete degree-3 permutation rational functions over F_"
                      << F->size() << ": " << found.size() << "\n";
            for (const RatFunc& r : found) std::cout << "  " << format_ratfunc(r) << "\n";
        }
        return 0;
    }

    if (j_cmd->parsed()) {
        RatFunc phi = parse_ratfunc(expr, *F);
        std::vector<elem_idx> table = fractional_jump(phi);
        if (json) {
            nlohmann::json arr = nlohmann::json::array();
            for (std::size_t x = 0; x < table.size(); ++x)
                arr.push_back({to_json(FE{F.get(), static_cast<elem_idx>(x)}),
                               to_json(FE{F.get(), table[x]})});
            std::cout << nlohmann::json{{"q", F->size()}, {"table", arr}}.dump() << "\n";
        } else {
            for (std::size_t x = 0; x < table.size(); ++x)
                std::cout << format_elem(FE{F.get(), static_cast<elem_idx>(x)}) << " -> "
                          << format_elem(FE{F.get(), table[x]}) << "\n";
        }
        return 0;
    }

    if (e_cmd->parsed()) {
        RatFunc phi = parse_ratfunc(expr, *F);
        nlohmann::json jout{{"q", F->size()}, {"n", ext_n}};
        if (check != "predict" && check != "verify" && check != "both")
            throw CLI::ValidationError("--check", "expected predict|verify|both");
        if (check == "predict" || check == "both") {
            try {
                bool pred = extension_permutation(phi, ext_n, ExtensionMode::predict);
                jout["predict"] = pred;
                if (!json)
                    std::cout << "predict: " << (pred ? "permutes" : "does not permute")
                              << " P^1(F_q^" << ext_n << ")\n";
            } catch (const permrat::domain_error&) {
                if (check == "predict") throw;  // explicitly requested
                jout["predict"] = nullptr;
                if (!json) std::cout << "predict: not applicable to this input\n";
            }
        }
        if (check == "verify" || check == "both") {
            bool ver = extension_permutation(phi, ext_n, ExtensionMode::verify);
            jout["verify"] = ver;
            if (!json)
                std::cout << "verify:  " << (ver ? "permutes" : "does not permute")
                          << " P^1(F_q^" << ext_n << ")\n";
        }
        if (json) std::cout << jout.dump() << "\n";
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const permrat::crosscheck_error& e) {
        std::cerr << "crosscheck failure: " << e.what() << "\n";
        return 3;
    } catch (const permrat::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

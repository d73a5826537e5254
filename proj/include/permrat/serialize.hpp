#pragma once

// JSON views of the library's result types.  Field elements appear as
// ascending coefficient vectors of residues mod p; elements of a relative
// extension as vectors of base-field vectors.

#include <json.hpp>

#include "permrat/census.hpp"
#include "permrat/classify.hpp"
#include "permrat/parse.hpp"

namespace permrat {

inline nlohmann::json to_json(FE a) {
    const Field& F = *a.field;
    nlohmann::json out = nlohmann::json::array();
    if (F.is_extension_ctx()) {
        for (elem_idx d : F.coeffs(a.v)) out.push_back(to_json(FE{F.base(), d}));
    } else {
        for (elem_idx d : F.coeffs(a.v)) out.push_back(d);
    }
    return out;
}

inline nlohmann::json to_json(const Poly& p) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i <= p.deg(); ++i) out.push_back(to_json(p.at(static_cast<std::size_t>(i))));
    return out;
}

inline nlohmann::json to_json(const Mobius& m) {
    return nlohmann::json::array({to_json(m.a()), to_json(m.b()), to_json(m.c()), to_json(m.d())});
}

inline nlohmann::json field_json(const Field& F) {
    nlohmann::json mod = nlohmann::json::array();
    for (elem_idx c : F.modulus()) mod.push_back(c);
    return {{"p", F.characteristic()},
            {"k", F.abs_degree()},
            {"q", F.size()},
            {"modulus", mod}};
}

inline nlohmann::json to_json(const ClassReport& rep) {
    nlohmann::json out;
    out["verdict"] = rep.permutation ? "permutation" : "not_permutation";
    out["separable"] = rep.separable;
    if (rep.canon) {
        nlohmann::json c;
        c["tag"] = to_string(rep.canon->tag);
        if (rep.canon->a) c["a"] = to_json(*rep.canon->a);
        if (rep.canon->b) c["b"] = to_json(*rep.canon->b);
        c["representative"] = format_ratfunc(rep.canon->representative);
        out["canon"] = c;
    }
    if (rep.witnesses) {
        out["witnesses"] = {{"m1", to_json(rep.witnesses->first)},
                            {"m2", to_json(rep.witnesses->second)}};
    }
    nlohmann::json ev;
    if (rep.evidence.delta) ev["delta"] = to_json(*rep.evidence.delta);
    if (rep.evidence.square_decomp) {
        ev["u"] = to_json(rep.evidence.square_decomp->first);
        ev["r"] = to_json(rep.evidence.square_decomp->second);
    }
    if (rep.evidence.resolvent_root) ev["resolvent_root"] = to_json(*rep.evidence.resolvent_root);
    if (rep.evidence.note) ev["note"] = *rep.evidence.note;
    if (!ev.is_null()) out["evidence"] = ev;
    return out;
}

// One JSON object per shape row, suitable for JSON-lines output.
inline nlohmann::json to_json(const ShapeCount& row, std::uint64_t q, CensusMethod method) {
    return {{"q", q},
            {"shape", {row.deg_f, row.deg_g}},
            {"pairs", row.pairs},
            {"coprime", row.coprime},
            {"perms", row.perms},
            {"method", to_string(method)}};
}

inline nlohmann::json summary_json(const CensusResult& res) {
    nlohmann::json out{{"q", res.q},
                       {"N_q", res.n_q},
                       {"method", to_string(res.method)},
                       {"r33_equal_lead", res.r33_equal_lead}};
    out["formula_N_q"] = formula_Nq(res.q);
    out["match"] = res.n_q == formula_Nq(res.q);
    return out;
}

inline std::string census_csv(const CensusResult& res) {
    std::ostringstream os;
    os << "q,deg_f,deg_g,pairs,coprime,perms,method\n";
    for (const ShapeCount& row : res.rows)
        os << res.q << ',' << row.deg_f << ',' << row.deg_g << ',' << row.pairs << ','
           << row.coprime << ',' << row.perms << ',' << to_string(res.method) << '\n';
    os << res.q << ",,,,," << res.n_q << ",total\n";
    return os.str();
}

inline nlohmann::json to_json(const OrbitTable& table) {
    nlohmann::json orbits = nlohmann::json::array();
    for (const Orbit& o : table.orbits)
        orbits.push_back({{"size", o.size}, {"representative", format_ratfunc(o.min_rep)}});
    return {{"q", table.q},
            {"classes", table.orbits.size()},
            {"population", table.population},
            {"orbits", orbits}};
}

} // namespace permrat

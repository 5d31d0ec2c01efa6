#pragma once

#include <nlohmann/json.hpp>

#include "torus/automata.hpp"

namespace torus {

// Schema: {arity, digit_bound, states:[ids], initial, accepting:[ids],
//          transitions:[{from, symbol:[digit or "pad", ...], to}]}
inline nlohmann::json to_json(const Dfa& d) {
    nlohmann::json j;
    j["arity"] = d.alpha.arity;
    j["digit_bound"] = d.alpha.digit_bound;
    std::vector<std::uint32_t> states(d.num_states);
    for (std::uint32_t s = 0; s < d.num_states; ++s) states[s] = s;
    j["states"] = states;
    j["initial"] = d.initial;
    std::vector<std::uint32_t> acc;
    for (std::uint32_t s = 0; s < d.num_states; ++s)
        if (d.accepting[s]) acc.push_back(s);
    j["accepting"] = acc;
    nlohmann::json ts = nlohmann::json::array();
    for (std::uint32_t s = 0; s < d.num_states; ++s) {
        for (const auto& [sym, t] : d.trans[s]) {
            nlohmann::json e;
            e["from"] = s;
            nlohmann::json symbol = nlohmann::json::array();
            for (int v : d.alpha.decode(sym)) {
                if (v == kPad)
                    symbol.push_back("pad");
                else
                    symbol.push_back(v);
            }
            e["symbol"] = std::move(symbol);
            e["to"] = t;
            ts.push_back(std::move(e));
        }
    }
    j["transitions"] = std::move(ts);
    return j;
}

inline nlohmann::json to_json(const RelationAutomaton& r) {
    nlohmann::json j = to_json(r.dfa);
    j["tracks"] = r.tracks;
    return j;
}

inline Dfa dfa_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("arity") || !j.contains("digit_bound") || !j.contains("states") ||
        !j.contains("initial") || !j.contains("accepting") || !j.contains("transitions"))
        throw invalid_params("automaton JSON: missing required field");
    Dfa d;
    d.alpha = Alphabet{j.at("arity").get<int>(), j.at("digit_bound").get<int>()};
    if (d.alpha.arity < 1 || d.alpha.digit_bound < 1) throw invalid_params("automaton JSON: bad alphabet");

    std::unordered_map<std::uint64_t, std::uint32_t> id_map;
    for (const auto& s : j.at("states")) {
        std::uint64_t raw = s.get<std::uint64_t>();
        if (!id_map.emplace(raw, static_cast<std::uint32_t>(id_map.size())).second)
            throw invalid_params("automaton JSON: duplicate state id");
    }
    if (id_map.empty()) throw invalid_params("automaton JSON: no states");
    auto lookup = [&](std::uint64_t raw) {
        auto it = id_map.find(raw);
        if (it == id_map.end()) throw invalid_params("automaton JSON: unknown state id");
        return it->second;
    };
    d.num_states = static_cast<std::uint32_t>(id_map.size());
    d.initial = lookup(j.at("initial").get<std::uint64_t>());
    d.accepting.assign(d.num_states, false);
    for (const auto& s : j.at("accepting")) d.accepting[lookup(s.get<std::uint64_t>())] = true;
    d.trans.assign(d.num_states, {});
    for (const auto& e : j.at("transitions")) {
        std::uint32_t from = lookup(e.at("from").get<std::uint64_t>());
        std::uint32_t to = lookup(e.at("to").get<std::uint64_t>());
        const auto& sym = e.at("symbol");
        if (!sym.is_array() || static_cast<int>(sym.size()) != d.alpha.arity)
            throw invalid_params("automaton JSON: symbol arity mismatch");
        ConvSymbol cs(d.alpha.arity);
        for (int t = 0; t < d.alpha.arity; ++t) {
            if (sym[t].is_string()) {
                if (sym[t].get<std::string>() != "pad") throw invalid_params("automaton JSON: bad symbol entry");
                cs[t] = kPad;
            } else {
                cs[t] = sym[t].get<int>();
                if (cs[t] < -d.alpha.digit_bound || cs[t] > d.alpha.digit_bound)
                    throw invalid_params("automaton JSON: digit out of range");
            }
        }
        d.trans[from].push_back({d.alpha.encode(cs), to});
    }
    d.sort_transitions();
    for (const auto& row : d.trans)
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i].first == row[i - 1].first) throw invalid_params("automaton JSON: nondeterministic transitions");
    return d;
}

inline RelationAutomaton relation_from_json(const nlohmann::json& j) {
    RelationAutomaton r;
    r.dfa = dfa_from_json(j);
    if (j.contains("tracks")) r.tracks = j.at("tracks").get<std::vector<std::string>>();
    return r;
}

inline std::string symbol_label(const Alphabet& alpha, std::uint32_t sym) {
    std::ostringstream os;
    ConvSymbol cs = alpha.decode(sym);
    os << "(";
    for (int t = 0; t < alpha.arity; ++t) {
        if (t) os << ",";
        if (cs[t] == kPad)
            os << "#";
        else
            os << cs[t];
    }
    os << ")";
    return os.str();
}

inline std::string to_dot(const Dfa& d, const std::string& name = "automaton") {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=circle];\n";
    os << "  __start [shape=point];\n  __start -> s" << d.initial << ";\n";
    for (std::uint32_t s = 0; s < d.num_states; ++s)
        if (d.accepting[s]) os << "  s" << s << " [shape=doublecircle];\n";
    for (std::uint32_t s = 0; s < d.num_states; ++s) {
        // group parallel edges into one label
        std::map<std::uint32_t, std::string> edges;
        for (const auto& [sym, t] : d.trans[s]) {
            auto& label = edges[t];
            if (!label.empty()) label += " ";
            label += symbol_label(d.alpha, sym);
        }
        for (const auto& [t, label] : edges)
            os << "  s" << s << " -> s" << t << " [label=\"" << label << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace torus

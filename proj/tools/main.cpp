// torus-automata: compile Nies-Semukhin style presentations of (Z^n, +),
// classify the FA-recognizable automorphisms via Pell-type equations, and
// assemble/verify Cayley automatic representations of Z^n x|_A Z.

#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "torus/automata_io.hpp"
#include "torus/evidence.hpp"
#include "torus/pell.hpp"
#include "torus/semidirect.hpp"

using namespace torus;
using nlohmann::json;

namespace {

std::vector<BigInt> parse_int_list(const std::string& text) {
    std::vector<BigInt> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            out.emplace_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.emplace_back(cur);
    return out;
}

ReprParams params_from(const std::string& p_list, const std::string& q_text) {
    return ReprParams(parse_int_list(p_list), BigInt(q_text));
}

Mat2 parse_matrix(const std::string& text) {
    auto v = parse_int_list(text);
    if (v.size() != 4) throw invalid_params("matrix must be a11,a12,a21,a22");
    return Mat2{v[0], v[1], v[2], v[3]};
}

json matrix_json(const Mat2& m) {
    return json::array({json::array({m.a11.str(), m.a12.str()}), json::array({m.a21.str(), m.a22.str()})});
}

json solution_json(const PellSolution& s) {
    return json{{"x", s.x.str()}, {"y", s.y.str()}, {"rhs", s.rhs}, {"n", s.n.str()}};
}

json params_json(const ReprParams& params) {
    json p = json::array();
    for (const auto& pi : params.p) p.push_back(pi.str());
    return json{{"n", params.degree}, {"p", p}, {"q", params.q.str()}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FA-presentations of (Z^n,+), Pell classification, and Cayley automatic semidirect products"};
    app.require_subcommand(1);

    std::string p_list = "1", q_text = "3";
    auto add_params = [&](CLI::App* cmd) {
        cmd->add_option("--p", p_list, "coefficients p_1,...,p_{n-1} of t(x)");
        cmd->add_option("--q", q_text, "constant term q of t(x)");
    };

    // reduce
    auto* cmd_reduce = app.add_subcommand("reduce", "reduce a polynomial modulo t(x)");
    std::string poly_text;
    add_params(cmd_reduce);
    cmd_reduce->add_option("--poly", poly_text, "coefficients a_0,a_1,... (low degree first)")->required();

    // encode / decode / add
    auto* cmd_encode = app.add_subcommand("encode", "canonical digit string of a vector in Z^n");
    std::string vec_text;
    add_params(cmd_encode);
    cmd_encode->add_option("--vec", vec_text, "components r_0,...,r_{n-1}")->required();

    auto* cmd_decode = app.add_subcommand("decode", "vector in Z^n for a digit string");
    std::string w_text;
    add_params(cmd_decode);
    cmd_decode->add_option("--w", w_text, "digit string [d0,d1,...]")->required();

    auto* cmd_add = app.add_subcommand("add", "canonical sum of two digit strings");
    std::string x_text, y_text;
    add_params(cmd_add);
    cmd_add->add_option("--x", x_text)->required();
    cmd_add->add_option("--y", y_text)->required();

    // build
    auto* cmd_build = app.add_subcommand("build", "compile an automaton and export it as JSON");
    std::string what = "equiv", out_path, g_text = "0,1", matrix_text;
    int generator_index = 0;
    std::uint64_t budget_opt = 0;
    add_params(cmd_build);
    cmd_build->add_option("--what", what, "equiv | add | dom | phi-g | multiplier");
    cmd_build->add_option("--out", out_path, "output JSON file")->required();
    cmd_build->add_option("--g", g_text, "phi-g: coefficients of g, low degree first");
    cmd_build->add_option("--generator", generator_index, "multiplier: generator index 0..n");
    cmd_build->add_option("--matrix", matrix_text, "multiplier: a11,a12,a21,a22");
    cmd_build->add_option("--state-budget", budget_opt, "override the subset-construction cap");

    // pell
    auto* cmd_pell = app.add_subcommand("pell", "fundamental and generated Pell solutions");
    std::string n_text;
    int rhs = 1, count = 1;
    cmd_pell->add_option("--n", n_text)->required();
    cmd_pell->add_option("--rhs", rhs, "+1, -1, +4 or -4");
    cmd_pell->add_option("--count", count, "number of solutions to generate");

    // classify
    auto* cmd_classify = app.add_subcommand("classify", "enumerate the recognizable-matrix families");
    std::string cls_n_text;
    std::string bound_text = "12";
    int cls_count = 2;
    cmd_classify->add_option("--n", cls_n_text)->required();
    cmd_classify->add_option("--bound", bound_text, "bound on |r| (or |p|)");
    cmd_classify->add_option("--count", cls_count, "Pell solutions per family");

    // semidirect
    auto* cmd_semi = app.add_subcommand("semidirect", "verify a representation of Z^2 x|_A Z");
    std::string action = "verify", semi_matrix;
    std::uint64_t seed = 20240601;
    int samples = 1000, b_bound = 5, h_bound = 50, workers = 1;
    add_params(cmd_semi);
    cmd_semi->add_option("action", action, "verify");
    cmd_semi->add_option("--matrix", semi_matrix, "a11,a12,a21,a22")->required();
    cmd_semi->add_option("--seed", seed, "seed for randomized verification");
    cmd_semi->add_option("--samples", samples);
    cmd_semi->add_option("--b-bound", b_bound);
    cmd_semi->add_option("--h-bound", h_bound);
    cmd_semi->add_option("--workers", workers, "parallel verification workers");

    // evidence
    auto* cmd_evidence = app.add_subcommand("evidence", "Nerode lower-bound report for a subgroup language");
    std::string subgroup = "xi";
    int maxlen = 8, suffix_len = 4;
    add_params(cmd_evidence);
    cmd_evidence->add_option("--subgroup", subgroup, "xi | eta | dom | components k0,k1,...");
    cmd_evidence->add_option("--maxlen", maxlen);
    cmd_evidence->add_option("--suffix", suffix_len);

    // export-dot
    auto* cmd_dot = app.add_subcommand("export-dot", "print a stored automaton as DOT");
    std::string dot_path;
    cmd_dot->add_option("file", dot_path, "automaton JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_reduce->parsed()) {
            ReprParams params = params_from(p_list, q_text);
            Polynomial f(parse_int_list(poly_text));
            Polynomial r = reduce(f, params);
            std::cout << r.str() << "\n";
        } else if (cmd_encode->parsed()) {
            ReprParams params = params_from(p_list, q_text);
            Presentation pres = compile_presentation(params);
            std::cout << format_digits(encode(IntVec(parse_int_list(vec_text)), pres)) << "\n";
        } else if (cmd_decode->parsed()) {
            ReprParams params = params_from(p_list, q_text);
            Presentation pres = compile_presentation(params);
            std::cout << decode(parse_digits(w_text), pres).str() << "\n";
        } else if (cmd_add->parsed()) {
            ReprParams params = params_from(p_list, q_text);
            Presentation pres = compile_presentation(params);
            DigitString sum = add_strings(parse_digits(x_text), parse_digits(y_text), params);
            std::cout << format_digits(encode(decode(sum, pres), pres)) << "\n";
        } else if (cmd_build->parsed()) {
            ReprParams params = params_from(p_list, q_text);
            std::uint64_t budget = budget_opt ? budget_opt : default_state_budget();
            json j;
            std::uint32_t states = 0;
            if (what == "equiv") {
                RelationAutomaton rel = build_equiv_automaton(params, budget);
                j = to_json(rel);
                states = rel.dfa.num_states;
            } else if (what == "add") {
                RelationAutomaton rel = build_add_relation(params, budget);
                j = to_json(rel);
                states = rel.dfa.num_states;
            } else if (what == "dom") {
                Dfa dom = build_dom(params, budget);
                j = to_json(dom);
                states = dom.num_states;
            } else if (what == "phi-g") {
                Presentation pres = compile_presentation(params, budget);
                RelationAutomaton rel = build_phi_g_relation(Polynomial(parse_int_list(g_text)), pres, budget);
                j = to_json(rel);
                states = rel.dfa.num_states;
            } else if (what == "multiplier") {
                Presentation pres = compile_presentation(params, budget);
                SemiRepresentation rep = build_representation(parse_matrix(matrix_text), pres, budget);
                const RelationAutomaton& rel = build_multiplier(rep, generator_index);
                j = to_json(rel);
                states = rel.dfa.num_states;
            } else {
                throw invalid_params("unknown --what: " + what);
            }
            j["params"] = params_json(params);
            std::ofstream out(out_path);
            if (!out) throw invalid_params("cannot open output file: " + out_path);
            out << j.dump(2) << "\n";
            std::cout << "states: " << states << "\n";
        } else if (cmd_pell->parsed()) {
            BigInt n(n_text);
            auto fund = fundamental_solution(n, rhs);
            json j{{"n", n.str()}, {"rhs", rhs}};
            if (!fund) {
                j["solutions"] = json::array();
                j["solvable"] = false;
            } else {
                j["solvable"] = true;
                json arr = json::array();
                for (const auto& s : generate_solutions(*fund, count)) arr.push_back(solution_json(s));
                j["solutions"] = std::move(arr);
            }
            std::cout << j.dump(2) << "\n";
        } else if (cmd_classify->parsed()) {
            auto res = enumerate_theorem3(BigInt(cls_n_text), {BigInt(bound_text), cls_count});
            json out = json::array();
            for (const auto& fam : res.families) {
                for (const auto& m : fam.matrices) {
                    out.push_back(json{{"n", fam.n.str()},
                                       {"case", fam.case_tag},
                                       {"p", fam.p.str()},
                                       {"q", fam.q.str()},
                                       {"c", m.trace().str()},
                                       {"a", m.a12.str()},
                                       {"matrix", matrix_json(m)},
                                       {"det", m.det().str()}});
                }
            }
            json j{{"families", out}, {"discrepancies", res.discrepancies}};
            std::cout << j.dump(2) << "\n";
        } else if (cmd_semi->parsed()) {
            if (action != "verify") throw invalid_params("semidirect: only the 'verify' action exists");
            ReprParams params = params_from(p_list, q_text);
            Presentation pres = compile_presentation(params);
            SemiRepresentation rep = build_representation(parse_matrix(semi_matrix), pres);
            PropertyAReport pa = verify_property_a(rep, 100, seed);

            // multiplier spot checks against the multiply oracle, sampled in
            // parallel; output is aggregated deterministically
            int per_worker = samples / std::max(workers, 1) + 1;
            std::vector<int> failures(std::max(workers, 1), 0);
            std::vector<std::thread> pool;
            for (int wkr = 0; wkr < std::max(workers, 1); ++wkr) {
                pool.emplace_back([&, wkr] {
                    std::mt19937_64 rng(seed + wkr);
                    std::uniform_int_distribution<long> db(-b_bound, b_bound), dh(-h_bound, h_bound);
                    for (int i = 0; i < per_worker; ++i) {
                        SemiElement e{db(rng), IntVec({dh(rng), dh(rng)})};
                        for (int gi = 0; gi <= rep.params.degree; ++gi) {
                            SemiElement image = apply_generator(e, gi, rep);
                            DigitString w = encode_element(e, rep), w2 = encode_element(image, rep);
                            if (!accepts_tuple(rep.multipliers[gi].dfa, {w, w2})) failures[wkr]++;
                        }
                    }
                });
            }
            for (auto& t : pool) t.join();
            int total_failures = 0;
            for (int f : failures) total_failures += f;

            json j{{"params", params_json(params)},
                   {"matrix", matrix_json(rep.A)},
                   {"property_a",
                    {{"l_zn_states", pa.l_zn.num_states},
                     {"l_zn_nonempty", pa.l_zn_nonempty},
                     {"r_a_states", pa.r_a.dfa.num_states},
                     {"r_a_nonempty", pa.r_a_nonempty},
                     {"spot_checks", pa.spot_checks},
                     {"spot_failures", pa.spot_failures}}},
                   {"multiplier_states", json::array()},
                   {"multiplier_samples", per_worker * std::max(workers, 1)},
                   {"multiplier_failures", total_failures},
                   {"note", "EVIDENCE (sampled verification), not proof"}};
            for (const auto& m : rep.multipliers) j["multiplier_states"].push_back(m.dfa.num_states);
            std::cout << j.dump(2) << "\n";
            if (total_failures > 0 || pa.spot_failures > 0) return 3;
        } else if (cmd_evidence->parsed()) {
            ReprParams params = params_from(p_list, q_text);
            Presentation pres = compile_presentation(params);
            LabeledSample sample = [&] {
                if (subgroup == "xi") return subgroup_language_sample(pres, IntVec::unit(params.degree, 0), maxlen);
                if (subgroup == "eta") return subgroup_language_sample(pres, IntVec::unit(params.degree, 1), maxlen);
                if (subgroup == "dom") return dom_language_sample(pres, maxlen);
                return subgroup_language_sample(pres, IntVec(parse_int_list(subgroup)), maxlen);
            }();
            NerodeBound nb = nerode_lower_bound(sample, suffix_len);
            json witnesses = json::array();
            for (const auto& w : nb.witnesses) witnesses.push_back(format_digits(w));
            json j{{"language", sample.descriptor},
                   {"params", params_json(params)},
                   {"maxlen", maxlen},
                   {"suffix_len", suffix_len},
                   {"lower_bound", nb.bound},
                   {"witnesses", witnesses},
                   {"note", "EVIDENCE (finite lower bound), not proof"}};
            std::cout << j.dump(2) << "\n";
        } else if (cmd_dot->parsed()) {
            std::ifstream in(dot_path);
            if (!in) throw invalid_params("cannot open " + dot_path);
            json j = json::parse(in);
            std::cout << to_dot(dfa_from_json(j), dot_path);
        }
    } catch (const invalid_params& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 1;
    } catch (const state_budget_exceeded& e) {
        std::cerr << "state budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const internal_error& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "malformed JSON: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// homlab command line front end.
// Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or format error, 3 guard exceeded.

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "homlab/classify.hpp"
#include "homlab/consistency.hpp"
#include "homlab/core.hpp"
#include "homlab/error.hpp"
#include "homlab/homsearch.hpp"
#include "homlab/identities.hpp"
#include "homlab/maltsev.hpp"
#include "homlab/polymorphism.hpp"
#include "homlab/powerset.hpp"
#include "homlab/pplogic.hpp"
#include "homlab/structure_io.hpp"

using namespace homlab;

namespace {

enum Exit { Yes = 0, No = 1, Usage = 2, Guard = 3 };

struct Caps {
    std::optional<std::size_t> domain, arity, powerset;
    std::optional<std::uint64_t> states;
};

std::optional<std::uint64_t> env_number(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    auto x = std::strtoull(v, &end, 10);
    if (*end) throw FormatError(std::string("environment variable ") + name + " is not a number");
    return x;
}

Limits limits_from(const Caps& c) {
    Limits lim;
    if (auto e = env_number("HOMLAB_CAP_DOMAIN")) lim.domain = *e;
    if (auto e = env_number("HOMLAB_CAP_ARITY")) lim.arity = *e;
    if (auto e = env_number("HOMLAB_CAP_STATES")) lim.states = *e;
    if (auto e = env_number("HOMLAB_CAP_POWERSET")) lim.powerset_domain = *e;
    if (c.domain) lim.domain = *c.domain;
    if (c.arity) lim.arity = *c.arity;
    if (c.states) lim.states = *c.states;
    if (c.powerset) lim.powerset_domain = *c.powerset;
    return lim;
}

Structure load_structure(const std::string& path) { return parse_structure(read_source(path)); }

void print_map(const Mapping& m) {
    for (Element x = 0; x < m.source_size(); ++x) std::cout << x << " -> " << m(x) << '\n';
}

void print_ops(const OperationMap& ops) {
    for (const auto& [name, f] : ops) {
        Operation g = f;
        g.set_name(name);
        std::cout << to_text(g);
    }
}

int verdict_exit(Complexity c) {
    return c == Complexity::P ? Yes : c == Complexity::NPComplete ? No : Guard;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homomorphisms, polymorphisms and CSP classification for finite structures"};
    app.require_subcommand(1);
    Caps caps;
    app.add_option("--cap-domain", caps.domain, "domain cap for exhaustive searches (env HOMLAB_CAP_DOMAIN)");
    app.add_option("--cap-arity", caps.arity, "operation arity cap (env HOMLAB_CAP_ARITY)");
    app.add_option("--cap-states", caps.states, "cap on materialised tuples (env HOMLAB_CAP_STATES)");
    app.add_option("--cap-powerset", caps.powerset, "domain cap for P(B) (env HOMLAB_CAP_POWERSET)");

    std::function<int(const Limits&)> action;
    std::string tmpl_path, inst_path, file_path, op_path, sys_path, special;
    std::size_t k = 0, arity = 0;
    bool use_ac = false, use_pc = false, use_sac = false, idempotent = false;

    auto* solve = app.add_subcommand("solve", "decide whether the instance maps to the template");
    solve->add_option("--template,-t", tmpl_path, "template structure")->required();
    solve->add_option("--instance,-i", inst_path, "instance (structure format, optional fix/allow lines)")->required();
    solve->add_option("--maltsev", op_path, "solve with the compact-representation algorithm for this Maltsev operation");
    auto* f_ac = solve->add_flag("--ac", use_ac, "arc consistency verdict only");
    auto* f_pc = solve->add_flag("--pc", use_pc, "path consistency verdict only (digraphs)");
    auto* f_sac = solve->add_flag("--sac", use_sac, "singleton arc consistency verdict only");
    f_ac->excludes(f_pc)->excludes(f_sac);
    f_pc->excludes(f_sac);
    solve->callback([&] {
        action = [&](const Limits&) {
            auto tmpl = load_structure(tmpl_path);
            auto inst = parse_instance(read_source(inst_path));
            auto lists = inst.lists(tmpl.size());
            if (!op_path.empty()) {
                if (inst.has_lists()) throw Error("--maltsev does not take fix/allow lines");
                auto m = parse_operation(read_source(op_path));
                auto res = solve_maltsev(inst.structure, tmpl, m);
                if (!res.map) {
                    std::cout << "no homomorphism\n";
                    return int{No};
                }
                std::cout << "homomorphism found\n";
                print_map(*res.map);
                return int{Yes};
            }
            if (use_ac || use_pc || use_sac) {
                bool accept = use_ac    ? ac(inst.structure, tmpl, lists).has_value()
                              : use_sac ? sac(inst.structure, tmpl, lists).has_value()
                                        : pc(inst.structure, tmpl, lists).has_value();
                std::cout << (accept ? "accept\n" : "reject\n");
                return accept ? int{Yes} : int{No};
            }
            auto h = search_hom(inst.structure, tmpl, lists);
            if (!h) {
                std::cout << "no homomorphism\n";
                return int{No};
            }
            std::cout << "homomorphism found\n";
            print_map(*h);
            return int{Yes};
        };
    });

    auto* core_cmd = app.add_subcommand("core", "compute the core");
    core_cmd->add_option("--structure,-s,--template", file_path, "structure")->required();
    core_cmd->callback([&] {
        action = [&](const Limits& lim) {
            auto c = core(load_structure(file_path), lim);
            std::cout << "core-elements";
            for (Element x : c.elements) std::cout << ' ' << x;
            std::cout << '\n' << to_text(c.core);
            return int{Yes};
        };
    });

    auto* ps = app.add_subcommand("powerset", "print the powerset structure P(B)");
    ps->add_option("--template,-t", tmpl_path, "structure")->required();
    ps->callback([&] {
        action = [&](const Limits& lim) {
            std::cout << to_text(powerset_structure(load_structure(tmpl_path), lim));
            return int{Yes};
        };
    });

    auto* td = app.add_subcommand("tree-duality", "decide whether arc consistency solves CSP(B)");
    td->add_option("--template,-t", tmpl_path, "structure")->required();
    td->callback([&] {
        action = [&](const Limits& lim) {
            auto r = ac_solvability(load_structure(tmpl_path), lim);
            std::cout << (r.solvable ? "tree duality: yes\n" : "tree duality: no\n");
            std::cout << "core-size " << r.core.core.size() << '\n';
            return r.solvable ? int{Yes} : int{No};
        };
    });

    auto* poly = app.add_subcommand("poly", "polymorphisms");
    poly->require_subcommand(1);
    auto* pfind = poly->add_subcommand("find", "search for polymorphisms satisfying identities");
    pfind->add_option("--template,-t", tmpl_path, "structure")->required();
    auto* o_sys = pfind->add_option("--system", sys_path, "identity system file");
    auto* o_special = pfind->add_option("--special", special, "named condition, e.g. majority, siggers4, wnu");
    o_sys->excludes(o_special);
    pfind->add_option("--arity", arity, "arity for parametrised conditions");
    pfind->add_flag("--idempotent", idempotent, "add a singleton relation for every element");
    pfind->callback([&] {
        action = [&](const Limits& lim) {
            auto b = load_structure(tmpl_path);
            if (idempotent) b = with_singletons(b);
            if (!sys_path.empty()) {
                auto sys = IdentitySystem::parse(read_source(sys_path));
                auto ops = find_polymorphism(b, sys, false, lim);
                if (!ops) {
                    std::cout << "none\n";
                    return int{No};
                }
                std::cout << "found\n";
                print_ops(*ops);
                return int{Yes};
            }
            if (special.empty()) throw Error("poly find needs --system or --special");
            auto kind = special_from_name(special);
            if (!kind) throw Error("unknown condition '" + special + "'");
            SpecialOptions opt;
            opt.arity = arity;
            auto res = find_special(b, *kind, opt, lim);
            if (res.verdict == SearchVerdict::Inconclusive) {
                std::cout << "inconclusive: " << res.note << '\n';
                return int{Guard};
            }
            std::cout << (res.verdict == SearchVerdict::Found ? "found\n" : "none\n");
            print_ops(res.ops);
            return res.verdict == SearchVerdict::Found ? int{Yes} : int{No};
        };
    });
    auto* ptest = poly->add_subcommand("test", "check operations against a structure");
    ptest->add_option("--template,-t", tmpl_path, "structure")->required();
    ptest->add_option("--op", op_path, "operation file, one or more op blocks")->required();
    ptest->add_option("--system", sys_path, "identity system the operations must also satisfy");
    ptest->callback([&] {
        action = [&](const Limits&) {
            auto b = load_structure(tmpl_path);
            auto ops = parse_operations(read_source(op_path));
            bool ok = true;
            for (const auto& [name, f] : ops) {
                bool p = is_polymorphism(f, b);
                std::cout << name << (p ? " is a polymorphism\n" : " is not a polymorphism\n");
                ok = ok && p;
            }
            if (!sys_path.empty()) {
                bool id = check_identities(ops, IdentitySystem::parse(read_source(sys_path)));
                std::cout << (id ? "identities hold\n" : "identities fail\n");
                ok = ok && id;
            }
            return ok ? int{Yes} : int{No};
        };
    });

    auto* pp = app.add_subcommand("pp", "primitive positive definability");
    pp->require_subcommand(1);
    auto* pdef = pp->add_subcommand("define", "decide pp-definability of a relation");
    pdef->add_option("--template,-t", tmpl_path, "structure")->required();
    pdef->add_option("--relation,-r", file_path, "structure file holding the relation as its first symbol")->required();
    pdef->callback([&] {
        action = [&](const Limits& lim) {
            auto b = load_structure(tmpl_path);
            auto holder = load_structure(file_path);
            if (holder.signature().size() == 0) throw FormatError("relation file declares no relation");
            Relation r(holder.signature()[0].arity, holder.size(), holder.tuples(0));
            PPOptions opt;
            if (caps.states || std::getenv("HOMLAB_CAP_STATES")) opt.power_cap = lim.states;
            auto res = is_pp_definable(r, b, opt);
            if (res.definable) {
                std::cout << "definable\n" << to_text(*res.witness) << '\n';
                return int{Yes};
            }
            std::cout << "not definable\n" << to_text(*res.violation);
            return int{No};
        };
    });
    auto* penc = pp->add_subcommand("encode-binary", "print the binary encoding C^[d]");
    penc->add_option("--template,-t", tmpl_path, "structure")->required();
    penc->add_option("--d", k, "tuple length")->required();
    penc->callback([&] {
        action = [&](const Limits& lim) {
            std::cout << to_text(binary_encoding(load_structure(tmpl_path), k, lim).structure);
            return int{Yes};
        };
    });

    auto* cls = app.add_subcommand("classify", "complexity classification");
    cls->require_subcommand(1);
    auto add_classifier = [&](const std::string& name, const std::string& help, std::function<Verdict(const Structure&, const Limits&)> run) {
        auto* sub = cls->add_subcommand(name, help);
        sub->add_option("--template,-t", tmpl_path, "structure")->required();
        sub->callback([&, run] {
            action = [&, run](const Limits& lim) {
                auto v = run(load_structure(tmpl_path), lim);
                std::cout << report(v);
                return verdict_exit(v.complexity);
            };
        });
    };
    add_classifier("schaefer", "Boolean templates", [](const Structure& b, const Limits&) { return schaefer(b); });
    add_classifier("graph", "undirected graphs", [](const Structure& b, const Limits&) { return hell_nesetril(b); });
    add_classifier("smooth", "digraphs without sources or sinks", [](const Structure& b, const Limits& l) { return smooth_digraph(b, l); });
    add_classifier("dichotomy", "core, constants and a Siggers search", [](const Structure& b, const Limits& l) { return dichotomy(b, l); });
    auto* width = cls->add_subcommand("width", "bounded width via 3-4 weak near-unanimity polymorphisms");
    width->add_option("--template,-t", tmpl_path, "structure")->required();
    width->callback([&] {
        action = [&](const Limits& lim) {
            auto w = bounded_width(load_structure(tmpl_path), lim);
            std::cout << report(w);
            return w.bounded ? (*w.bounded ? int{Yes} : int{No}) : int{Guard};
        };
    });

    auto* orb = app.add_subcommand("orbits", "orbits of k-tuples under the automorphism group");
    orb->add_option("--structure,-s,--template", file_path, "structure")->required();
    orb->add_option("--k", k, "tuple length")->required();
    orb->callback([&] {
        action = [&](const Limits& lim) {
            auto s = load_structure(file_path);
            for (const auto& o : orbits(s, k, lim)) {
                for (std::size_t i = 0; i < o.size(); ++i) {
                    auto t = decode_tuple(o[i], k, s.size());
                    std::cout << (i ? " " : "") << '(';
                    for (std::size_t j = 0; j < t.size(); ++j) std::cout << (j ? "," : "") << t[j];
                    std::cout << ')';
                }
                std::cout << '\n';
            }
            return int{Yes};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : int{Usage};
    }
    try {
        return action(limits_from(caps));
    } catch (const GuardExceeded& e) {
        std::cerr << "guard exceeded: " << e.what() << '\n';
        return Guard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Usage;
    }
}

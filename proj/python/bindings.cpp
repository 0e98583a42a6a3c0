#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

namespace py = pybind11;
using namespace homlab;

namespace {

std::optional<std::vector<Element>> table_of(const std::optional<Mapping>& m) {
    if (!m) return std::nullopt;
    return m->table;
}

std::string verdict_name(SearchVerdict v) {
    return v == SearchVerdict::Found ? "found" : v == SearchVerdict::None ? "none" : "inconclusive";
}

py::dict verdict_dict(const Verdict& v, const Structure& b) {
    py::dict d;
    d["complexity"] = complexity_name(v.complexity);
    d["reason"] = v.reason;
    d["report"] = report(v);
    d["certified"] = check_certificate(v, b);
    d["ops"] = v.ops;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "homomorphisms, polymorphisms and CSP classification for finite structures";

    // base first: later registrations are tried first
    auto base = py::register_exception<Error>(m, "HomlabError");
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<GuardExceeded>(m, "GuardExceeded", base.ptr());

    py::class_<Structure>(m, "Structure")
        .def(py::init([](std::size_t size, const std::vector<std::pair<std::string, std::size_t>>& symbols, std::string name) {
                 Signature sig;
                 for (const auto& [s, k] : symbols) sig.add(s, k);
                 return Structure(size, sig, std::move(name));
             }),
             py::arg("size"), py::arg("symbols"), py::arg("name") = "")
        .def_property_readonly("size", &Structure::size)
        .def_property_readonly("name", &Structure::name)
        .def_property_readonly("symbols", [](const Structure& s) {
            std::vector<std::pair<std::string, std::size_t>> out;
            for (const auto& sym : s.signature().symbols()) out.emplace_back(sym.name, sym.arity);
            return out;
        })
        .def("add_tuple", [](Structure& s, const std::string& rel, Tuple t) {
            s.add_tuple(rel, std::move(t));
            s.normalize();
        })
        .def("tuples", [](const Structure& s, const std::string& rel) { return s.tuples(rel); })
        .def("to_text", [](const Structure& s) { return to_text(s); })
        .def("__eq__", &Structure::operator==)
        .def("__repr__", [](const Structure& s) {
            return "<Structure " + (s.name().empty() ? std::string("?") : s.name()) + " on " + std::to_string(s.size()) + " elements>";
        });

    py::class_<Operation>(m, "Operation")
        .def(py::init<std::size_t, std::size_t, std::vector<Element>, std::string>(), py::arg("arity"), py::arg("domain"),
             py::arg("table"), py::arg("name") = "")
        .def_property_readonly("arity", &Operation::arity)
        .def_property_readonly("domain", &Operation::domain)
        .def_property_readonly("name", &Operation::name)
        .def_property_readonly("table", [](const Operation& f) { return f.table(); })
        .def("__call__", [](const Operation& f, const Tuple& args) {
            if (args.size() != f.arity()) throw Error("wrong number of arguments");
            for (Element a : args)
                if (a >= f.domain()) throw Error("argument outside the domain");
            return f(args);
        })
        .def("to_text", [](const Operation& f) { return to_text(f); })
        .def("__eq__", &Operation::operator==);

    m.def("parse_structure", [](const std::string& text) { return parse_structure(text); });
    m.def("parse_operation", [](const std::string& text) { return parse_operation(text); });
    m.def("digraph", [](std::size_t n, const std::vector<std::pair<Element, Element>>& e) { return digraph(n, e); });
    m.def("complete_graph", &complete_graph);
    m.def("cycle_graph", &cycle_graph);
    m.def("directed_cycle", &directed_cycle);
    m.def("directed_path", &directed_path);
    m.def("transitive_tournament", &transitive_tournament);
    m.def("with_singletons", &with_singletons);

    m.def("is_homomorphism", [](const Structure& a, const Structure& b, const std::vector<Element>& t) {
        return is_homomorphism(a, b, Mapping{t, b.size()});
    });
    m.def("find_homomorphism", [](const Structure& a, const Structure& b) { return table_of(search_hom(a, b)); },
          "a homomorphism as a list of images, or None");
    m.def("ac", [](const Structure& a, const Structure& b) { return ac(a, b).has_value(); });
    m.def("pc", [](const Structure& a, const Structure& b) { return pc(a, b).has_value(); });
    m.def("sac", [](const Structure& a, const Structure& b) { return sac(a, b).has_value(); });

    m.def("core", [](const Structure& a) {
        auto c = core(a);
        return py::make_tuple(c.core, c.elements, c.retraction.table);
    });
    m.def("is_core", [](const Structure& a) { return is_core(a); });
    m.def("isomorphic", [](const Structure& a, const Structure& b) { return isomorphic(a, b); });
    m.def("powerset_structure", [](const Structure& b) { return powerset_structure(b); });
    m.def("ac_solvable", [](const Structure& b) { return ac_solvability(b).solvable; });

    m.def("is_polymorphism", &is_polymorphism);
    m.def("check_identities", [](const OperationMap& ops, const std::string& system) {
        return check_identities(ops, IdentitySystem::parse(system));
    });
    m.def("find_polymorphism",
          [](const Structure& b, const std::string& system, bool idempotent) {
              return find_polymorphism(b, IdentitySystem::parse(system), idempotent);
          },
          py::arg("template"), py::arg("system"), py::arg("idempotent") = false);
    m.def("find_special",
          [](const Structure& b, const std::string& kind, std::size_t arity, bool idempotent) {
              auto k = special_from_name(kind);
              if (!k) throw Error("unknown condition '" + kind + "'");
              SpecialOptions opt;
              opt.arity = arity;
              opt.idempotent = idempotent;
              auto r = find_special(b, *k, opt);
              return py::make_tuple(verdict_name(r.verdict), r.ops);
          },
          py::arg("template"), py::arg("kind"), py::arg("arity") = 0, py::arg("idempotent") = false);

    m.def("solve_maltsev", [](const Structure& inst, const Structure& tmpl, const Operation& op) {
        return table_of(solve_maltsev(inst, tmpl, op).map);
    });

    m.def("defined_relation", [](const std::string& formula, const Structure& b) {
        return defined_relation(parse_pp(formula), b).tuples;
    });
    m.def("evaluate", [](const std::string& formula, const Structure& b, const std::vector<Element>& values) {
        return evaluate(parse_pp(formula), b, values);
    });
    m.def("is_pp_definable", [](const std::vector<Tuple>& tuples, std::size_t arity, const Structure& b) {
        auto r = is_pp_definable(Relation(arity, b.size(), tuples), b);
        py::object witness = py::none();
        if (r.witness) witness = py::str(to_text(*r.witness));
        py::object violation = py::none();
        if (r.violation) violation = py::cast(*r.violation);
        return py::make_tuple(r.definable, witness, violation);
    });

    m.def("schaefer", [](const Structure& b) {
        auto v = schaefer(b);
        auto d = verdict_dict(v, b);
        d["classes"] = v.classes;
        return d;
    });
    m.def("hell_nesetril", [](const Structure& h) {
        auto v = hell_nesetril(h);
        auto d = verdict_dict(v, h);
        return d;
    });
    m.def("smooth_digraph", [](const Structure& h) {
        auto v = smooth_digraph(h);
        auto d = verdict_dict(v, h);
        return d;
    });
    m.def("dichotomy", [](const Structure& b) {
        auto v = dichotomy(b);
        auto d = verdict_dict(v, b);
        return d;
    });
    m.def("bounded_width", [](const Structure& b) {
        auto w = bounded_width(b);
        return py::make_tuple(w.bounded, w.ops);
    });
}

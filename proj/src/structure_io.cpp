#include "homlab/structure_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "homlab/error.hpp"

namespace homlab {

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::string body = line.substr(0, line.find('#'));
    std::istringstream ss(body);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

std::size_t number(const std::string& s, std::size_t line) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("expected a number, got '" + s + "'", line);
    return v;
}

bool valid_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-')) return false;
    return true;
}

InstanceFile parse_impl(std::istream& in, bool allow_lists) {
    InstanceFile f;
    std::string line;
    std::size_t lineno = 0;
    enum class State { Start, Header, InRel, AfterEnd } st = State::Start;
    std::string name;
    bool have_domain = false;
    std::size_t domain = 0;
    Signature sig;
    std::vector<std::vector<Tuple>> rels;
    std::size_t cur = 0;

    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokens(line);
        if (tok.empty()) continue;
        const std::string& kw = tok[0];
        switch (st) {
        case State::Start:
            if (kw != "structure" || tok.size() != 2) throw FormatError("expected 'structure <name>'", lineno);
            name = tok[1];
            st = State::Header;
            break;
        case State::Header:
            if (kw == "domain") {
                if (tok.size() != 2 || have_domain) throw FormatError("expected a single 'domain <n>' line", lineno);
                domain = number(tok[1], lineno);
                if (domain == 0) throw FormatError("empty domain is not supported", lineno);
                have_domain = true;
            } else if (kw == "rel") {
                if (!have_domain) throw FormatError("'domain' must precede relations", lineno);
                if (tok.size() != 3) throw FormatError("expected 'rel <NAME> <arity>'", lineno);
                if (!valid_identifier(tok[1])) throw FormatError("bad relation name '" + tok[1] + "'", lineno);
                if (sig.find(tok[1])) throw FormatError("duplicate symbol " + tok[1], lineno);
                std::size_t k = number(tok[2], lineno);
                if (k == 0) throw FormatError("arity must be positive", lineno);
                cur = sig.add(tok[1], k);
                rels.emplace_back();
                st = State::InRel;
            } else if (kw == "endstructure") {
                if (!have_domain) throw FormatError("missing 'domain' line", lineno);
                st = State::AfterEnd;
            } else if (allow_lists && (kw == "fix" || kw == "allow")) {
                throw FormatError("'" + kw + "' lines go after 'endstructure'", lineno);
            } else {
                throw FormatError("unexpected '" + kw + "'", lineno);
            }
            break;
        case State::InRel:
            if (kw == "end") {
                if (tok.size() != 1) throw FormatError("trailing tokens after 'end'", lineno);
                st = State::Header;
            } else {
                if (tok.size() != sig[cur].arity)
                    throw FormatError("arity mismatch: relation " + sig[cur].name + " has arity " +
                                          std::to_string(sig[cur].arity),
                                      lineno);
                Tuple t;
                for (const auto& s : tok) {
                    std::size_t v = number(s, lineno);
                    if (v >= domain) throw FormatError("entry out of range: " + s, lineno);
                    t.push_back(static_cast<Element>(v));
                }
                rels[cur].push_back(std::move(t));
            }
            break;
        case State::AfterEnd:
            if (allow_lists && kw == "fix") {
                if (tok.size() != 3) throw FormatError("expected 'fix <var> <value>'", lineno);
                std::size_t x = number(tok[1], lineno), v = number(tok[2], lineno);
                if (x >= domain) throw FormatError("fix: variable out of range", lineno);
                f.fixes.emplace_back(static_cast<Element>(x), static_cast<Element>(v));
            } else if (allow_lists && kw == "allow") {
                if (tok.size() < 3) throw FormatError("expected 'allow <var> <v1,v2,...>'", lineno);
                std::size_t x = number(tok[1], lineno);
                if (x >= domain) throw FormatError("allow: variable out of range", lineno);
                std::string joined;
                for (std::size_t i = 2; i < tok.size(); ++i) joined += tok[i];
                std::vector<Element> vals;
                std::stringstream ss(joined);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) vals.push_back(static_cast<Element>(number(item, lineno)));
                f.allows.emplace_back(static_cast<Element>(x), std::move(vals));
            } else {
                throw FormatError("unexpected '" + kw + "' after 'endstructure'", lineno);
            }
            break;
        }
    }
    if (st == State::Start) throw FormatError("empty input");
    if (st != State::AfterEnd) throw FormatError("missing 'endstructure'", lineno);
    Structure s(domain, sig, name);
    for (std::size_t r = 0; r < rels.size(); ++r)
        for (auto& t : rels[r]) s.add_tuple(r, std::move(t));
    auto v = validate(s);
    if (!v.empty()) throw FormatError(v.front().message);
    s.normalize();
    f.structure = std::move(s);
    return f;
}

}  // namespace

UnaryLists InstanceFile::lists(std::size_t template_size) const {
    UnaryLists L = UnaryLists::full(structure.size(), template_size);
    for (const auto& [x, vals] : allows) {
        ValueSet s;
        for (Element v : vals) {
            if (v >= template_size) throw FormatError("allow: value " + std::to_string(v) + " outside the template");
            s.insert(v);
        }
        L[x] &= s;
    }
    for (auto [x, v] : fixes) {
        if (v >= template_size) throw FormatError("fix: value " + std::to_string(v) + " outside the template");
        L.fix(x, v);
    }
    return L;
}

Structure parse_structure(std::istream& in) { return parse_impl(in, false).structure; }

Structure parse_structure(const std::string& text) {
    std::istringstream ss(text);
    return parse_structure(ss);
}

InstanceFile parse_instance(std::istream& in) { return parse_impl(in, true); }

InstanceFile parse_instance(const std::string& text) {
    std::istringstream ss(text);
    return parse_instance(ss);
}

void write_structure(std::ostream& out, const Structure& s0) {
    Structure s = s0;
    s.normalize();
    out << "structure " << (s.name().empty() ? "unnamed" : s.name()) << "\n";
    out << "domain " << s.size() << "\n";
    for (std::size_t r = 0; r < s.signature().size(); ++r) {
        out << "rel " << s.signature()[r].name << " " << s.signature()[r].arity << "\n";
        for (const auto& t : s.tuples(r)) {
            for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
            out << "\n";
        }
        out << "end\n";
    }
    out << "endstructure\n";
}

std::string to_text(const Structure& s) {
    std::ostringstream ss;
    write_structure(ss, s);
    return ss.str();
}

std::string read_source(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "'");
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace homlab

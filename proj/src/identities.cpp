#include "homlab/identities.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "homlab/error.hpp"

namespace homlab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_name(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
    return out;
}

std::vector<std::string> xs(std::size_t k) {
    std::vector<std::string> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = "x" + std::to_string(i + 1);
    return v;
}

std::string app(const std::string& f, const std::vector<std::string>& args) { return f + "(" + join(args) + ")"; }

// f applied to k copies of x with y at position i
std::string near(const std::string& f, std::size_t k, std::size_t i) {
    std::vector<std::string> a(k, "x");
    a[i] = "y";
    return app(f, a);
}

}  // namespace

std::size_t IdentitySystem::add_symbol(const std::string& name, std::size_t arity) {
    if (!is_name(name)) throw FormatError("bad symbol name '" + name + "'");
    if (arity == 0) throw FormatError("symbol '" + name + "' needs a positive arity");
    if (symbol_index(name) >= 0) throw FormatError("symbol '" + name + "' declared twice");
    symbols_.push_back({name, arity});
    return symbols_.size() - 1;
}

int IdentitySystem::symbol_index(const std::string& name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i].name == name) return static_cast<int>(i);
    return -1;
}

bool IdentitySystem::has_bare_side() const {
    return std::any_of(ids_.begin(), ids_.end(), [](const Identity& id) { return id.lhs.bare() || id.rhs.bare(); });
}

Term IdentitySystem::parse_term(const std::string& raw, std::vector<std::string>& vars) const {
    const std::string s = trim(raw);
    auto var = [&](const std::string& name) {
        if (!is_name(name)) throw FormatError("bad variable '" + name + "'");
        auto it = std::find(vars.begin(), vars.end(), name);
        if (it != vars.end()) return static_cast<std::size_t>(it - vars.begin());
        vars.push_back(name);
        return vars.size() - 1;
    };
    Term t;
    auto open = s.find('(');
    if (open == std::string::npos) {
        if (symbol_index(s) >= 0) throw FormatError("symbol '" + s + "' used without arguments");
        t.vars.push_back(var(s));
        return t;
    }
    if (s.back() != ')') throw FormatError("unbalanced term '" + s + "'");
    const std::string f = trim(s.substr(0, open));
    t.symbol = symbol_index(f);
    if (t.symbol < 0) throw FormatError("undeclared symbol '" + f + "'");
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    if (inner.find_first_of("()") != std::string::npos)
        throw FormatError("nested term '" + s + "': only linear identities are supported");
    std::stringstream ss(inner);
    std::string arg;
    while (std::getline(ss, arg, ',')) t.vars.push_back(var(trim(arg)));
    if (t.vars.size() != symbols_[static_cast<std::size_t>(t.symbol)].arity)
        throw FormatError("symbol '" + f + "' applied to " + std::to_string(t.vars.size()) + " arguments");
    return t;
}

void IdentitySystem::add(const std::string& lhs, const std::string& rhs) {
    Identity id;
    id.lhs = parse_term(lhs, id.var_names);
    id.rhs = parse_term(rhs, id.var_names);
    ids_.push_back(std::move(id));
}

IdentitySystem IdentitySystem::parse(const std::string& text) {
    IdentitySystem sys;
    std::string cleaned;
    for (char c : text) cleaned += (c == '\n') ? ';' : c;
    std::stringstream ss(cleaned);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item.substr(0, item.find('#')));
        if (item.empty()) continue;
        std::istringstream words(item);
        std::string kw;
        words >> kw;
        if (kw == "sym") {
            std::string name;
            long long arity = -1;
            std::string extra;
            if (!(words >> name >> arity) || (words >> extra) || arity <= 0)
                throw FormatError("expected 'sym <name> <arity>', got '" + item + "'");
            sys.add_symbol(name, static_cast<std::size_t>(arity));
        } else if (kw == "id") {
            std::string rest = item.substr(2);
            auto eq = rest.find('=');
            if (eq == std::string::npos || rest.find('=', eq + 1) != std::string::npos)
                throw FormatError("expected 'id <term> = <term>', got '" + item + "'");
            sys.add(rest.substr(0, eq), rest.substr(eq + 1));
        } else {
            throw FormatError("unknown directive '" + kw + "'");
        }
    }
    if (sys.symbols_.empty()) throw FormatError("identity system declares no symbols");
    return sys;
}

std::string IdentitySystem::term_string(const Term& t, const Identity& id) const {
    if (t.bare()) return id.var_names[t.vars[0]];
    std::vector<std::string> a;
    for (auto v : t.vars) a.push_back(id.var_names[v]);
    return app(symbols_[static_cast<std::size_t>(t.symbol)].name, a);
}

std::string IdentitySystem::to_string() const {
    std::string out;
    for (const auto& s : symbols_) out += (out.empty() ? "" : " ; ") + ("sym " + s.name + " " + std::to_string(s.arity));
    for (const auto& id : ids_) out += " ; id " + term_string(id.lhs, id) + " = " + term_string(id.rhs, id);
    return out;
}

bool check_identities(const OperationMap& ops, const IdentitySystem& sys) {
    std::vector<const Operation*> f(sys.symbols().size());
    std::size_t n = 0;
    for (std::size_t s = 0; s < f.size(); ++s) {
        auto it = ops.find(sys.symbols()[s].name);
        if (it == ops.end()) throw Error("no operation for symbol '" + sys.symbols()[s].name + "'");
        if (it->second.arity() != sys.symbols()[s].arity)
            throw Error("operation '" + sys.symbols()[s].name + "' has the wrong arity");
        if (s && it->second.domain() != n) throw Error("operations have different domains");
        n = it->second.domain();
        f[s] = &it->second;
    }
    if (f.empty()) return true;
    for (const auto& id : sys.identities()) {
        const std::size_t v = id.var_count();
        Tuple val(v, 0), args;
        auto eval = [&](const Term& t) -> Element {
            if (t.bare()) return val[t.vars[0]];
            args.resize(t.vars.size());
            for (std::size_t i = 0; i < t.vars.size(); ++i) args[i] = val[t.vars[i]];
            return (*f[static_cast<std::size_t>(t.symbol)])(args);
        };
        for (;;) {
            if (eval(id.lhs) != eval(id.rhs)) return false;
            std::size_t i = v;
            while (i > 0 && ++val[i - 1] == n) val[--i] = 0;
            if (i == 0) break;
        }
    }
    return true;
}

namespace identities {

IdentitySystem majority() {
    IdentitySystem s;
    s.add_symbol("f", 3);
    s.add("f(x,x,y)", "x");
    s.add("f(x,y,x)", "x");
    s.add("f(y,x,x)", "x");
    return s;
}

IdentitySystem quasi_majority() {
    IdentitySystem s;
    s.add_symbol("f", 3);
    s.add("f(x,x,y)", "f(x,x,x)");
    s.add("f(x,y,x)", "f(x,x,x)");
    s.add("f(y,x,x)", "f(x,x,x)");
    return s;
}

IdentitySystem maltsev() {
    IdentitySystem s;
    s.add_symbol("m", 3);
    s.add("m(y,x,x)", "y");
    s.add("m(x,x,y)", "y");
    return s;
}

IdentitySystem minority() {
    IdentitySystem s;
    s.add_symbol("f", 3);
    s.add("f(y,x,x)", "y");
    s.add("f(x,y,x)", "y");
    s.add("f(x,x,y)", "y");
    return s;
}

IdentitySystem commutative_idempotent() {
    IdentitySystem s;
    s.add_symbol("f", 2);
    s.add("f(x,y)", "f(y,x)");
    s.add("f(x,x)", "x");
    return s;
}

IdentitySystem totally_symmetric(std::size_t k) {
    IdentitySystem s;
    s.add_symbol("f", k);
    auto x = xs(k);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        auto y = x;
        std::swap(y[i], y[i + 1]);
        s.add(app("f", x), app("f", y));
    }
    if (k >= 3) {
        // move one multiplicity: f(x1,x1,x3,...) = f(x1,x3,x3,...)
        auto a = x, b = x;
        a[1] = x[0];
        b[1] = x[2];
        s.add(app("f", a), app("f", b));
    }
    return s;
}

IdentitySystem cyclic(std::size_t k) {
    IdentitySystem s;
    s.add_symbol("f", k);
    auto x = xs(k);
    auto y = x;
    std::rotate(y.begin(), y.begin() + 1, y.end());
    s.add(app("f", x), app("f", y));
    return s;
}

IdentitySystem wnu(std::size_t k) {
    if (k < 2) throw Error("wnu needs arity at least 2");
    IdentitySystem s;
    s.add_symbol("f", k);
    for (std::size_t i = 0; i + 1 < k; ++i) s.add(near("f", k, i), near("f", k, i + 1));
    return s;
}

IdentitySystem wnu_3_4() {
    IdentitySystem s;
    s.add_symbol("f", 3);
    s.add_symbol("g", 4);
    for (std::size_t i = 0; i < 2; ++i) s.add(near("f", 3, i), near("f", 3, i + 1));
    for (std::size_t i = 0; i < 3; ++i) s.add(near("g", 4, i), near("g", 4, i + 1));
    s.add("f(y,x,x)", "g(y,x,x,x)");
    return s;
}

IdentitySystem siggers4() {
    IdentitySystem s;
    s.add_symbol("s", 4);
    s.add("s(x,x,y,z)", "s(y,z,z,x)");
    return s;
}

IdentitySystem siggers6() {
    IdentitySystem s;
    s.add_symbol("s", 6);
    s.add("s(x,y,x,z,y,z)", "s(y,x,z,x,z,y)");
    return s;
}

IdentitySystem pq() {
    IdentitySystem s;
    s.add_symbol("p", 3);
    s.add_symbol("q", 3);
    s.add("q(y,x,x)", "q(x,x,y)");
    s.add("q(x,x,y)", "p(x,y,y)");
    s.add("p(x,y,x)", "q(x,y,x)");
    return s;
}

IdentitySystem near_unanimity(std::size_t k) {
    if (k < 3) throw Error("near-unanimity needs arity at least 3");
    IdentitySystem s;
    s.add_symbol("f", k);
    for (std::size_t i = 0; i < k; ++i) s.add(near("f", k, i), "x");
    return s;
}

IdentitySystem quasi_near_unanimity(std::size_t k) {
    if (k < 3) throw Error("near-unanimity needs arity at least 3");
    IdentitySystem s;
    s.add_symbol("f", k);
    const std::string diag = app("f", std::vector<std::string>(k, "x"));
    for (std::size_t i = 0; i < k; ++i) s.add(near("f", k, i), diag);
    return s;
}

}  // namespace identities

}  // namespace homlab

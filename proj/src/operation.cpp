#include "homlab/operation.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "homlab/error.hpp"

namespace homlab {

Operation::Operation(std::size_t arity, std::size_t domain, std::string name)
    : arity_(arity), domain_(domain), table_(ipow(domain, arity), 0), name_(std::move(name)) {
    if (arity == 0) throw Error("operation arity must be positive");
    if (domain == 0) throw Error("operation domain must be nonempty");
}

Operation::Operation(std::size_t arity, std::size_t domain, std::vector<Element> table, std::string name)
    : arity_(arity), domain_(domain), table_(std::move(table)), name_(std::move(name)) {
    if (arity == 0 || domain == 0) throw Error("operation arity and domain must be positive");
    if (table_.size() != ipow(domain, arity)) throw Error("operation table has the wrong length");
    for (Element v : table_)
        if (v >= domain) throw Error("operation value out of range");
}

Element Operation::operator()(std::initializer_list<Element> args) const {
    if (args.size() != arity_) throw Error("operation applied to the wrong number of arguments");
    return table_[encode_tuple(args.begin(), arity_, domain_)];
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line.substr(0, line.find('#')));
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

}  // namespace

Operation parse_operation(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false, done = false;
    std::size_t k = 0, n = 0;
    std::string name;
    std::vector<Element> table;
    std::vector<std::uint8_t> seen;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokens(line);
        if (tok.empty()) continue;
        if (done) throw FormatError("content after 'end'", lineno);
        if (!header) {
            if (tok.size() != 4 || tok[0] != "op") throw FormatError("expected 'op <NAME> <arity> <domain-size>'", lineno);
            name = tok[1];
            k = number(tok[2], lineno);
            n = number(tok[3], lineno);
            if (k == 0 || n == 0) throw FormatError("arity and domain size must be positive", lineno);
            if (!checked_pow(n, k, 50'000'000)) throw FormatError("operation table too large", lineno);
            table.assign(ipow(n, k), 0);
            seen.assign(table.size(), 0);
            header = true;
            continue;
        }
        if (tok.size() == 1 && tok[0] == "end") {
            done = true;
            continue;
        }
        if (tok.size() != k + 1) throw FormatError("expected " + std::to_string(k) + " arguments and a value", lineno);
        Tuple args(k);
        for (std::size_t i = 0; i < k; ++i) {
            args[i] = static_cast<Element>(number(tok[i], lineno));
            if (args[i] >= n) throw FormatError("argument out of range", lineno);
        }
        std::size_t v = number(tok[k], lineno);
        if (v >= n) throw FormatError("value out of range", lineno);
        std::size_t c = encode_tuple(args.data(), k, n);
        if (seen[c]) throw FormatError("argument tuple listed twice", lineno);
        seen[c] = 1;
        table[c] = static_cast<Element>(v);
    }
    if (!header) throw FormatError("empty operation file");
    if (!done) throw FormatError("missing 'end'", lineno);
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw FormatError("operation table is incomplete");
    return Operation(k, n, std::move(table), name);
}

Operation parse_operation(const std::string& text) {
    std::istringstream ss(text);
    return parse_operation(ss);
}

OperationMap parse_operations(const std::string& text) {
    OperationMap out;
    std::istringstream in(text);
    std::string line, block;
    std::size_t lineno = 0, start = 1;
    bool open = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokens(line);
        if (tok.empty()) continue;
        if (!open) start = lineno;
        open = true;
        block += line + "\n";
        if (tok.size() == 1 && tok[0] == "end") {
            Operation op;
            try {
                op = parse_operation(block);
            } catch (const FormatError& e) {
                throw FormatError(std::string(e.what()) + " (operation starting at line " + std::to_string(start) + ")");
            }
            if (out.count(op.name())) throw FormatError("operation '" + op.name() + "' defined twice", start);
            out.emplace(op.name(), std::move(op));
            block.clear();
            open = false;
        }
    }
    if (open) throw FormatError("missing 'end'", start);
    if (out.empty()) throw FormatError("no operation found");
    return out;
}

void write_operation(std::ostream& out, const Operation& op) {
    out << "op " << (op.name().empty() ? "f" : op.name()) << " " << op.arity() << " " << op.domain() << "\n";
    for (std::size_t c = 0; c < op.table().size(); ++c) {
        auto t = decode_tuple(c, op.arity(), op.domain());
        for (Element e : t) out << e << " ";
        out << op.at(c) << "\n";
    }
    out << "end\n";
}

std::string to_text(const Operation& op) {
    std::ostringstream ss;
    write_operation(ss, op);
    return ss.str();
}

Operation projection(std::size_t arity, std::size_t index, std::size_t domain) {
    return Operation::from_function(arity, domain, [&](const Tuple& t) { return t[index]; },
                                    "pi" + std::to_string(index + 1));
}

Operation min_operation(std::size_t domain) {
    return Operation::from_function(2, domain, [](const Tuple& t) { return std::min(t[0], t[1]); }, "min");
}

Operation max_operation(std::size_t domain) {
    return Operation::from_function(2, domain, [](const Tuple& t) { return std::max(t[0], t[1]); }, "max");
}

Operation median_operation(std::size_t domain) {
    return Operation::from_function(3, domain,
                                    [](Tuple t) {
                                        std::sort(t.begin(), t.end());
                                        return t[1];
                                    },
                                    "median");
}

Operation affine_maltsev(std::size_t domain) {
    const auto n = static_cast<Element>(domain);
    return Operation::from_function(3, domain, [n](const Tuple& t) { return (t[0] + n - t[1] + t[2]) % n; }, "m");
}

Operation boolean_majority() { return median_operation(2); }

Operation boolean_minority() {
    return Operation::from_function(3, 2, [](const Tuple& t) { return t[0] ^ t[1] ^ t[2]; }, "minority");
}

Operation constant_operation(std::size_t arity, std::size_t domain, Element value) {
    return Operation::from_function(arity, domain, [value](const Tuple&) { return value; },
                                    "const" + std::to_string(value));
}

Operation cyclic_composition(const Operation& s, const Operation& t) {
    if (s.domain() != t.domain()) throw Error("cyclic_composition: domain mismatch");
    const std::size_t k = s.arity(), l = t.arity();
    return Operation::from_function(l, t.domain(), [&](const Tuple& x) {
        Tuple args(k), rot(l);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < l; ++j) rot[j] = x[(i + j) % l];
            args[i] = t(rot);
        }
        return s(args);
    });
}

bool preserves(const Operation& f, std::size_t n, const std::vector<Tuple>& rel, std::size_t r) {
    if (f.domain() != n) throw Error("operation and structure have different domains");
    const std::size_t k = f.arity();
    if (rel.empty()) return true;
    // membership: bitmap over n^r when small, sorted codes otherwise
    std::vector<bool> bitmap;
    std::vector<std::uint64_t> codes;
    const bool use_bitmap = checked_pow(n, r, std::uint64_t{1} << 26).has_value();
    if (use_bitmap) bitmap.assign(ipow(n, r), false);
    for (const auto& t : rel) {
        std::uint64_t c = encode_tuple(t.data(), r, n);
        if (use_bitmap) bitmap[c] = true;
        else codes.push_back(c);
    }
    std::sort(codes.begin(), codes.end());
    auto member = [&](std::uint64_t c) {
        return use_bitmap ? static_cast<bool>(bitmap[c]) : std::binary_search(codes.begin(), codes.end(), c);
    };

    std::vector<std::size_t> weight(k);
    for (std::size_t i = 0; i < k; ++i) weight[i] = ipow(n, k - 1 - i);
    std::vector<std::size_t> idx(k, 0);
    std::vector<std::size_t> arg(r, 0);  // argument code per row
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t i = 0; i < k; ++i) arg[p] += rel[0][p] * weight[i];
    const std::size_t m = rel.size();
    for (;;) {
        std::uint64_t img = 0;
        for (std::size_t p = 0; p < r; ++p) img = img * n + f.at(arg[p]);
        if (!member(img)) return false;
        std::size_t i = k;
        for (;;) {
            if (i == 0) return true;
            --i;
            const Tuple& old = rel[idx[i]];
            if (++idx[i] < m) {
                const Tuple& cur = rel[idx[i]];
                for (std::size_t p = 0; p < r; ++p) arg[p] += (std::size_t{cur[p]} - old[p]) * weight[i];
                break;
            }
            idx[i] = 0;
            const Tuple& cur = rel[0];
            for (std::size_t p = 0; p < r; ++p) arg[p] += (std::size_t{cur[p]} - old[p]) * weight[i];
        }
    }
}

bool is_polymorphism(const Operation& f, const Structure& b) {
    if (f.domain() != b.size()) throw Error("operation and structure have different domains");
    for (std::size_t r = 0; r < b.signature().size(); ++r)
        if (!preserves(f, b.size(), b.tuples(r), b.signature()[r].arity)) return false;
    return true;
}

bool is_essentially_unary(const Operation& f) {
    const std::size_t k = f.arity(), n = f.domain();
    std::size_t dependent = 0;
    for (std::size_t i = 0; i < k; ++i) {
        bool depends = false;
        const std::size_t w = ipow(n, k - 1 - i);
        for (std::size_t c = 0; c < f.table().size() && !depends; ++c) {
            std::size_t digit = (c / w) % n;
            if (digit != 0) continue;
            for (std::size_t v = 1; v < n && !depends; ++v) depends = f.at(c) != f.at(c + v * w);
        }
        if (depends) ++dependent;
    }
    return dependent <= 1;
}

bool is_idempotent(const Operation& f) {
    for (Element a = 0; a < f.domain(); ++a)
        if (f(Tuple(f.arity(), a)) != a) return false;
    return true;
}

}  // namespace homlab

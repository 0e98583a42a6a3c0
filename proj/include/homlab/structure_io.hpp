#pragma once

#include <iosfwd>
#include <string>

#include "homlab/consistency.hpp"
#include "homlab/structure.hpp"

namespace homlab {

// Instance file: a structure block plus optional `fix <var> <value>` and
// `allow <var> <v1,v2,...>` lines after `endstructure`.
struct InstanceFile {
    Structure structure;
    std::vector<std::pair<Element, Element>> fixes;
    std::vector<std::pair<Element, std::vector<Element>>> allows;

    bool has_lists() const { return !fixes.empty() || !allows.empty(); }
    // lists over a template domain of the given size
    UnaryLists lists(std::size_t template_size) const;
};

Structure parse_structure(std::istream& in);
Structure parse_structure(const std::string& text);
InstanceFile parse_instance(std::istream& in);
InstanceFile parse_instance(const std::string& text);

void write_structure(std::ostream& out, const Structure& s);
std::string to_text(const Structure& s);

// reads `path`, or standard input when path is "-"
std::string read_source(const std::string& path);

}  // namespace homlab

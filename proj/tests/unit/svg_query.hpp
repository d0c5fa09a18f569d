#pragma once

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace svgq {

using boost::property_tree::ptree;

struct Element {
  std::string tag;
  const ptree* node;

  std::string attr(const std::string& name) const { return node->get<std::string>("<xmlattr>." + name, ""); }
  bool has_class(const std::string& cls) const {
    std::istringstream ss(attr("class"));
    for (std::string c; ss >> c;) {
      if (c == cls) return true;
    }
    return false;
  }
};

// Parses SVG text; throws on malformed XML.
inline ptree parse(const std::string& svg) {
  ptree tree;
  std::istringstream in(svg);
  boost::property_tree::read_xml(in, tree);
  return tree;
}

inline void walk(const ptree& node, const std::string& tag, std::vector<Element>& out) {
  if (tag != "<xmlattr>" && tag != "<xmlcomment>" && tag != "<xmltext>") out.push_back({tag, &node});
  for (const auto& [child_tag, child] : node) {
    if (child_tag == "<xmlattr>") continue;
    walk(child, child_tag, out);
  }
}

// Elements with `tag` (any tag when empty) carrying class `cls`.
inline std::vector<Element> select(const ptree& root, const std::string& tag, const std::string& cls) {
  std::vector<Element> all, out;
  for (const auto& [t, child] : root) walk(child, t, all);
  for (const auto& e : all) {
    if ((tag.empty() || e.tag == tag) && (cls.empty() || e.has_class(cls))) out.push_back(e);
  }
  return out;
}

}  // namespace svgq

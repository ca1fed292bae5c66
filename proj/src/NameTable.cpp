//===--- NameTable.cpp - Loop and section name resolution --------------------===//
//
// Part of the looplang project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "looplang/NameTable.h"

#include <algorithm>
#include <sstream>

namespace looplang {

NameTable NameTable::build(LoopTree &tree, DiagEngine &diags) {
  NameTable nt;

  // Pre-order collection of explicit claims and implicit candidates.
  std::vector<std::pair<std::string, Node *>> explicitNames;
  std::vector<std::pair<std::string, Node *>> counterNames;
  int pre = 0;
  tree.preOrder([&](Node &n) {
    nt.PreIdx[&n] = pre++;
    if (n.nameOrigin != NameOrigin::None && !n.name.empty())
      explicitNames.emplace_back(n.name, &n);
    if (n.isBand() && n.nameOrigin == NameOrigin::None)
      counterNames.emplace_back(n.counter, &n);
  });

  for (auto &[name, node] : explicitNames) {
    auto it = nt.ByName.find(name);
    if (it != nt.ByName.end()) {
      Node *prev = nt.Entries[it->second].nodes[0];
      diags.error(DiagCode::DuplicateExplicitName, node->loc,
                  "name '" + name + "' is already given to the construct at " +
                      prev->loc.str());
      continue;
    }
    nt.ByName[name] = nt.Entries.size();
    nt.Entries.push_back(Entry{name, {node}, node->nameOrigin});
  }

  for (auto &[name, node] : counterNames) {
    auto it = nt.ByName.find(name);
    if (it == nt.ByName.end()) {
      nt.ByName[name] = nt.Entries.size();
      nt.Entries.push_back(Entry{name, {node}, NameOrigin::None});
      continue;
    }
    Entry &e = nt.Entries[it->second];
    if (e.origin != NameOrigin::None)
      continue; // an explicit claim suppresses the counter name
    e.nodes.push_back(node); // ambiguous until someone asks
  }

  // Walk of named loops, for `...` ranges. A loop with an ambiguous implicit
  // name still takes part; expanding across it surfaces the ambiguity at
  // resolution instead of silently dropping the loop.
  tree.preOrder([&](Node &n) {
    if (!n.isBand())
      return;
    std::string name = n.nameOrigin != NameOrigin::None ? n.name : n.counter;
    auto it = nt.ByName.find(name);
    if (it == nt.ByName.end())
      return;
    const Entry &e = nt.Entries[it->second];
    if (std::find(e.nodes.begin(), e.nodes.end(), &n) != e.nodes.end())
      nt.NamedLoopWalk.emplace_back(name, &n);
  });
  return nt;
}

Node *NameTable::lookup(const std::string &name) const {
  auto it = ByName.find(name);
  if (it == ByName.end())
    return nullptr;
  const Entry &e = Entries[it->second];
  return e.nodes.size() == 1 ? e.nodes[0] : nullptr;
}

Node *NameTable::resolve(const std::string &name, SourceLoc refLoc,
                         DiagEngine &diags) const {
  auto it = ByName.find(name);
  if (it == ByName.end()) {
    diags.error(DiagCode::UnknownName, refLoc,
                "unknown loop or section name '" + name + "'");
    return nullptr;
  }
  const Entry &e = Entries[it->second];
  if (e.nodes.size() > 1) {
    std::ostringstream os;
    os << "loop name '" << name << "' is ambiguous; candidates:";
    for (Node *n : e.nodes)
      os << " " << n->loc.str();
    diags.error(DiagCode::AmbiguousName, refLoc, os.str());
    return nullptr;
  }
  return e.nodes[0];
}

std::vector<std::string>
NameTable::expand(const std::vector<std::string> &targets, SourceLoc loc,
                  DiagEngine &diags) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] != "...") {
      out.push_back(targets[i]);
      continue;
    }
    if (i == 0 || i + 1 == targets.size()) {
      diags.error(DiagCode::BadRange, loc,
                  "'...' needs a name on both sides");
      return {};
    }
    const std::string &from = targets[i - 1];
    const std::string &to = targets[i + 1];
    auto pos = [&](const std::string &name) -> long {
      for (size_t k = 0; k < NamedLoopWalk.size(); ++k)
        if (NamedLoopWalk[k].first == name)
          return static_cast<long>(k);
      return -1;
    };
    long a = pos(from), b = pos(to);
    if (a < 0 || b < 0) {
      diags.error(DiagCode::BadRange, loc,
                  "range endpoint '" + (a < 0 ? from : to) +
                      "' does not name a loop");
      return {};
    }
    if (a >= b) {
      diags.error(DiagCode::BadRange, loc,
                  "range '" + from + ",...," + to +
                      "' is empty or inverted");
      return {};
    }
    // Both endpoints are already in `out` / upcoming; add the interior.
    for (long k = a + 1; k < b; ++k)
      out.push_back(NamedLoopWalk[static_cast<size_t>(k)].first);
  }
  return out;
}

std::string NameTable::dump() const {
  // One line per (name, construct) pair, in tree pre-order.
  std::vector<std::pair<int, std::string>> lines;
  for (const Entry &e : Entries) {
    for (Node *n : e.nodes) {
      const char *kind = n->isBand() ? "loop" : "section";
      const char *origin = e.nodes.size() > 1 ? "ambiguous"
                           : e.origin == NameOrigin::Explicit ? "explicit"
                           : e.origin == NameOrigin::Output   ? "output"
                                                              : "implicit";
      lines.emplace_back(PreIdx.at(n), e.name + " " + kind + " " + origin +
                                           " " + n->loc.str() + "\n");
    }
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream os;
  for (auto &[id, text] : lines)
    os << text;
  return os.str();
}

} // namespace looplang

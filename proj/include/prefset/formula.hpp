#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefset/catalog.hpp"

namespace prefset {

enum class Rel : uint8_t { eq, ne, lt, le, gt, ge };

Rel negate(Rel rel);
bool rel_holds(long lhs, Rel rel, long rhs);
const char* rel_text(Rel rel);
Rel rel_from_text(const std::string& text);

// Boolean formula over attribute atoms, stored as a node arena.
// Atoms are either "categorical-attr = value" or "integer-attr REL k";
// "true" is the always-satisfied leaf.
struct Formula {
  enum class Kind : uint8_t { truth, cat_atom, int_atom, neg, conj, disj };

  struct Node {
    Kind kind = Kind::truth;
    int attr = -1;
    int value_index = -1;      // cat_atom
    std::string value_text;    // cat_atom, for printing
    Rel rel = Rel::eq;         // int_atom
    long bound = 0;            // int_atom
    std::vector<int> kids;     // neg: 1, conj/disj: >= 2
  };

  std::vector<Node> nodes;
  int root = -1;

  bool empty() const { return root < 0; }
  // n-ary conj/disj with c children counts as c-1 connectives.
  int connective_count() const;
  bool operator==(const Formula& other) const;  // structural
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int position)
      : std::runtime_error(what), position(position) {}
  int position;  // character offset into the source text
};

Formula parse_formula(const std::string& text, const AttributeSchema& schema);
// Canonical form; parse(print(f)) is structurally equal to f.
std::string print_formula(const Formula& f, const AttributeSchema& schema);

bool eval_formula(const Formula& f, const Item& item);
int count_satisfying(const Formula& f, const Catalog& catalog,
                     const std::vector<int>& subset);
// Per-item satisfaction flags, aligned with the catalog order.
std::vector<uint8_t> satisfier_flags(const Formula& f, const Catalog& catalog);

}  // namespace prefset

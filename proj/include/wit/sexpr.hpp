#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Tiny S-expression reader/printer shared by the term, formula, theory and
// derivation file formats.  Atoms are runs of characters other than
// whitespace, parentheses and ';'.  ';' starts a comment running to end of
// line.
namespace wit::sexpr {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    bool is_atom = false;
    std::string atom;           // set when is_atom
    std::vector<NodePtr> items; // set when !is_atom
};

NodePtr atom(std::string s);
NodePtr list(std::vector<NodePtr> items);

// Parses exactly one expression (error on trailing garbage).
NodePtr parse(const std::string& text);
// Parses a whole file: any number of expressions.
std::vector<NodePtr> parse_many(const std::string& text);

// Canonical single-line rendering; parse(show(n)) reproduces n exactly.
std::string show(const NodePtr& n);

// Convenience accessors (throw error with `what` context on shape mismatch).
const std::string& atom_of(const NodePtr& n, const char* what);
const std::vector<NodePtr>& items_of(const NodePtr& n, const char* what);
// Head symbol of a list node, or "" when not a list / empty / head not atom.
std::string head(const NodePtr& n);

} // namespace wit::sexpr

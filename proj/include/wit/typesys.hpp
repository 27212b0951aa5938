#pragma once

#include <memory>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wit/sexpr.hpp"

// Finite-type skeleton over an open registry of ground types, with the star
// (finite multiset) constructor used by witness signatures, the bounded/
// uniform classification (dagger), and the textual type syntax
//   N, B, (a -> b) right-associative, a*.
namespace wit {

struct type_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Ty;
using TyPtr = std::shared_ptr<const Ty>;

struct Ty {
    enum class Kind { Ground, Func, Star };
    Kind kind;
    std::string name; // Ground
    TyPtr dom, cod;   // Func
    TyPtr elem;       // Star
};

TyPtr ground(const std::string& name);
TyPtr func(TyPtr dom, TyPtr cod);
TyPtr func(const std::vector<TyPtr>& doms, TyPtr cod); // curried right-assoc
TyPtr star(TyPtr elem);
TyPtr nat();
TyPtr boolean();

bool equal(const TyPtr& a, const TyPtr& b);
// Total structural order (Ground < Func < Star, then components); used for
// canonical finite-set normal forms.
int compare(const TyPtr& a, const TyPtr& b);

std::string show(const TyPtr& t);
TyPtr parse_ty(const std::string& text);

// Ordered, possibly empty tuple of types (witness signatures).
using TyTuple = std::vector<TyPtr>;
std::string show(const TyTuple& tt);
bool equal(const TyTuple& a, const TyTuple& b);

// S-expression embedding: ground and star-of-ground types print as atoms
// ("N", "B", "N*"); function types as flat right-associative lists
// (a -> b -> c); star of a compound type as (star t).
sexpr::NodePtr ty_to_sexpr(const TyPtr& t);
TyPtr ty_from_sexpr(const sexpr::NodePtr& n);

// One declared ground type.  `is_source` marks types the source language may
// quantify over, `is_witnessing` marks types witness tuples may use.
// `default_const` is the surface name of the declared default constant.
struct GroundDecl {
    std::string name;
    bool is_source = true;
    bool is_witnessing = true;
    std::string default_const;
};

// Open registry keyed by symbol; N and B are pre-registered with arithmetic
// semantics (defaults 0 and boolean 0).
class TypeRegistry {
  public:
    TypeRegistry();
    void declare(const GroundDecl& d);
    bool known(const std::string& name) const;
    const GroundDecl& lookup(const std::string& name) const;
    const std::map<std::string, GroundDecl>& all() const { return decls_; }
    // Checks every ground type occurring in t is registered.
    void validate(const TyPtr& t) const;

  private:
    std::map<std::string, GroundDecl> decls_;
};

// Bounded/uniform classification for types built from N and B only.
// Returns the shadow type when the argument is unbounded, nullopt when the
// type is bounded (shadow absent).  Rejects star types and foreign grounds.
std::optional<TyPtr> dagger(const TyPtr& t);
// True iff dagger(t) is absent.  Same precondition as dagger.
bool is_bounded(const TyPtr& t);
// True iff t is built from N only (arithmetical); such types admit the
// hereditary pointwise maximum.
bool is_arithmetical(const TyPtr& t);

} // namespace wit

#include "wit/typesys.hpp"

namespace wit {

TyPtr ground(const std::string& name) {
    auto t = std::make_shared<Ty>();
    t->kind = Ty::Kind::Ground;
    t->name = name;
    return t;
}

TyPtr func(TyPtr dom, TyPtr cod) {
    if (!dom || !cod) throw type_error("func: null component");
    auto t = std::make_shared<Ty>();
    t->kind = Ty::Kind::Func;
    t->dom = std::move(dom);
    t->cod = std::move(cod);
    return t;
}

TyPtr func(const std::vector<TyPtr>& doms, TyPtr cod) {
    TyPtr out = std::move(cod);
    for (auto it = doms.rbegin(); it != doms.rend(); ++it) out = func(*it, out);
    return out;
}

TyPtr star(TyPtr elem) {
    if (!elem) throw type_error("star: null component");
    auto t = std::make_shared<Ty>();
    t->kind = Ty::Kind::Star;
    t->elem = std::move(elem);
    return t;
}

TyPtr nat() {
    static const TyPtr n = ground("N");
    return n;
}

TyPtr boolean() {
    static const TyPtr b = ground("B");
    return b;
}

bool equal(const TyPtr& a, const TyPtr& b) { return compare(a, b) == 0; }

int compare(const TyPtr& a, const TyPtr& b) {
    if (a.get() == b.get()) return 0;
    if (!a || !b) throw type_error("compare: null type");
    auto rank = [](Ty::Kind k) {
        switch (k) {
        case Ty::Kind::Ground: return 0;
        case Ty::Kind::Func: return 1;
        case Ty::Kind::Star: return 2;
        }
        return 3;
    };
    if (rank(a->kind) != rank(b->kind)) return rank(a->kind) < rank(b->kind) ? -1 : 1;
    switch (a->kind) {
    case Ty::Kind::Ground:
        return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Ty::Kind::Func: {
        int c = compare(a->dom, b->dom);
        return c != 0 ? c : compare(a->cod, b->cod);
    }
    case Ty::Kind::Star:
        return compare(a->elem, b->elem);
    }
    throw type_error("compare: bad kind");
}

std::string show(const TyPtr& t) {
    if (!t) throw type_error("show: null type");
    switch (t->kind) {
    case Ty::Kind::Ground:
        return t->name;
    case Ty::Kind::Star: {
        std::string inner = show(t->elem);
        // Parenthesised function types carry the star directly: (a -> b)*.
        return inner + "*";
    }
    case Ty::Kind::Func: {
        // Right-associative chains share one pair of parentheses.
        std::string out = "(";
        TyPtr cur = t;
        for (;;) {
            out += show(cur->dom);
            out += " -> ";
            if (cur->cod->kind == Ty::Kind::Func) {
                cur = cur->cod;
            } else {
                out += show(cur->cod);
                break;
            }
        }
        out += ")";
        return out;
    }
    }
    throw type_error("show: bad kind");
}

namespace {

struct TyReader {
    const std::string& text;
    size_t pos = 0;

    void skip_blank() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    }

    bool peek(char c) {
        skip_blank();
        return pos < text.size() && text[pos] == c;
    }

    bool peek_arrow() {
        skip_blank();
        return pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>';
    }

    TyPtr parse_arrow() {
        TyPtr lhs = parse_post();
        if (peek_arrow()) {
            pos += 2;
            return func(lhs, parse_arrow());
        }
        return lhs;
    }

    TyPtr parse_post() {
        TyPtr t = parse_prim();
        for (;;) {
            skip_blank();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                t = star(t);
            } else {
                break;
            }
        }
        return t;
    }

    TyPtr parse_prim() {
        skip_blank();
        if (pos >= text.size()) throw type_error("type syntax: unexpected end in '" + text + "'");
        if (text[pos] == '(') {
            ++pos;
            TyPtr t = parse_arrow();
            skip_blank();
            if (pos >= text.size() || text[pos] != ')')
                throw type_error("type syntax: missing ')' in '" + text + "'");
            ++pos;
            return t;
        }
        size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            bool name_char = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
            if (!name_char) break;
            ++pos;
        }
        if (pos == start) throw type_error("type syntax: expected a name at '" + text.substr(pos) + "'");
        return ground(text.substr(start, pos - start));
    }
};

} // namespace

TyPtr parse_ty(const std::string& text) {
    TyReader r{text};
    TyPtr t = r.parse_arrow();
    r.skip_blank();
    if (r.pos != text.size()) throw type_error("type syntax: trailing input in '" + text + "'");
    return t;
}

std::string show(const TyTuple& tt) {
    std::string out = "(";
    for (size_t i = 0; i < tt.size(); ++i) {
        if (i) out += ", ";
        out += show(tt[i]);
    }
    out += ")";
    return out;
}

bool equal(const TyTuple& a, const TyTuple& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!equal(a[i], b[i])) return false;
    return true;
}

sexpr::NodePtr ty_to_sexpr(const TyPtr& t) {
    switch (t->kind) {
    case Ty::Kind::Ground:
        return sexpr::atom(t->name);
    case Ty::Kind::Star:
        if (t->elem->kind == Ty::Kind::Func)
            return sexpr::list({sexpr::atom("star"), ty_to_sexpr(t->elem)});
        return sexpr::atom(show(t));
    case Ty::Kind::Func: {
        std::vector<sexpr::NodePtr> items;
        TyPtr cur = t;
        for (;;) {
            items.push_back(ty_to_sexpr(cur->dom));
            items.push_back(sexpr::atom("->"));
            if (cur->cod->kind == Ty::Kind::Func) {
                cur = cur->cod;
            } else {
                items.push_back(ty_to_sexpr(cur->cod));
                break;
            }
        }
        return sexpr::list(std::move(items));
    }
    }
    throw type_error("ty_to_sexpr: bad kind");
}

TyPtr ty_from_sexpr(const sexpr::NodePtr& n) {
    if (!n) throw type_error("ty_from_sexpr: null node");
    if (n->is_atom) return parse_ty(n->atom);
    const auto& items = n->items;
    if (!items.empty() && items[0]->is_atom && items[0]->atom == "star") {
        if (items.size() != 2) throw type_error("ty_from_sexpr: (star t) takes one argument");
        return star(ty_from_sexpr(items[1]));
    }
    // flat right-associative arrow list: a -> b -> ... -> c
    std::vector<TyPtr> parts;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i % 2 == 1) {
            if (!items[i]->is_atom || items[i]->atom != "->")
                throw type_error("ty_from_sexpr: expected '->' in " + sexpr::show(n));
        } else {
            parts.push_back(ty_from_sexpr(items[i]));
        }
    }
    if (items.size() < 3 || items.size() % 2 == 0)
        throw type_error("ty_from_sexpr: malformed type " + sexpr::show(n));
    TyPtr out = parts.back();
    for (size_t i = parts.size() - 1; i-- > 0;) out = func(parts[i], out);
    return out;
}

TypeRegistry::TypeRegistry() {
    decls_["N"] = GroundDecl{"N", true, true, "zero"};
    decls_["B"] = GroundDecl{"B", true, true, "bool0"};
}

void TypeRegistry::declare(const GroundDecl& d) {
    auto it = decls_.find(d.name);
    if (it != decls_.end()) {
        const GroundDecl& old = it->second;
        if (old.is_source != d.is_source || old.is_witnessing != d.is_witnessing ||
            old.default_const != d.default_const)
            throw type_error("ground type '" + d.name + "' redeclared with different data");
        return;
    }
    if (d.name.empty()) throw type_error("ground type declaration needs a name");
    decls_[d.name] = d;
}

bool TypeRegistry::known(const std::string& name) const { return decls_.count(name) != 0; }

const GroundDecl& TypeRegistry::lookup(const std::string& name) const {
    auto it = decls_.find(name);
    if (it == decls_.end()) throw type_error("unknown ground type '" + name + "'");
    return it->second;
}

void TypeRegistry::validate(const TyPtr& t) const {
    switch (t->kind) {
    case Ty::Kind::Ground:
        lookup(t->name);
        return;
    case Ty::Kind::Func:
        validate(t->dom);
        validate(t->cod);
        return;
    case Ty::Kind::Star:
        validate(t->elem);
        return;
    }
}

std::optional<TyPtr> dagger(const TyPtr& t) {
    switch (t->kind) {
    case Ty::Kind::Ground:
        if (t->name == "N") return nat();
        if (t->name == "B") return std::nullopt;
        throw type_error("dagger: defined for types built from N and B only, got ground '" + t->name + "'");
    case Ty::Kind::Star:
        throw type_error("dagger: star types are not classified, got " + show(t));
    case Ty::Kind::Func: {
        auto dc = dagger(t->cod);
        if (!dc) {
            dagger(t->dom); // still reject foreign grounds / stars inside
            return std::nullopt;
        }
        auto dd = dagger(t->dom);
        if (!dd) return dc;
        return func(*dd, *dc);
    }
    }
    throw type_error("dagger: bad kind");
}

bool is_bounded(const TyPtr& t) { return !dagger(t).has_value(); }

bool is_arithmetical(const TyPtr& t) {
    switch (t->kind) {
    case Ty::Kind::Ground:
        return t->name == "N";
    case Ty::Kind::Func:
        return is_arithmetical(t->dom) && is_arithmetical(t->cod);
    case Ty::Kind::Star:
        return false;
    }
    return false;
}

} // namespace wit

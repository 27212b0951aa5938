#include "wit/sexpr.hpp"

namespace wit::sexpr {

NodePtr atom(std::string s) {
    auto n = std::make_shared<Node>();
    n->is_atom = true;
    n->atom = std::move(s);
    return n;
}

NodePtr list(std::vector<NodePtr> items) {
    auto n = std::make_shared<Node>();
    n->is_atom = false;
    n->items = std::move(items);
    return n;
}

namespace {

struct Reader {
    const std::string& text;
    size_t pos = 0;

    void skip_blank() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_blank();
        return pos >= text.size();
    }

    NodePtr read() {
        skip_blank();
        if (pos >= text.size()) throw error("unexpected end of input");
        char c = text[pos];
        if (c == ')') throw error("unexpected ')' at offset " + std::to_string(pos));
        if (c == '(') {
            ++pos;
            std::vector<NodePtr> items;
            for (;;) {
                skip_blank();
                if (pos >= text.size()) throw error("missing ')'");
                if (text[pos] == ')') {
                    ++pos;
                    return list(std::move(items));
                }
                items.push_back(read());
            }
        }
        size_t start = pos;
        while (pos < text.size()) {
            char d = text[pos];
            if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\n' || d == '\r')
                break;
            ++pos;
        }
        if (pos == start) throw error("empty atom at offset " + std::to_string(pos));
        return atom(text.substr(start, pos - start));
    }
};

} // namespace

NodePtr parse(const std::string& text) {
    Reader r{text};
    NodePtr n = r.read();
    if (!r.done()) throw error("trailing input after expression");
    return n;
}

std::vector<NodePtr> parse_many(const std::string& text) {
    Reader r{text};
    std::vector<NodePtr> out;
    while (!r.done()) out.push_back(r.read());
    return out;
}

std::string show(const NodePtr& n) {
    if (!n) throw error("show: null node");
    if (n->is_atom) return n->atom;
    std::string out = "(";
    for (size_t i = 0; i < n->items.size(); ++i) {
        if (i) out += ' ';
        out += show(n->items[i]);
    }
    out += ')';
    return out;
}

const std::string& atom_of(const NodePtr& n, const char* what) {
    if (!n || !n->is_atom) throw error(std::string(what) + ": expected an atom" + (n ? ", got " + show(n) : ""));
    return n->atom;
}

const std::vector<NodePtr>& items_of(const NodePtr& n, const char* what) {
    if (!n || n->is_atom) throw error(std::string(what) + ": expected a list" + (n ? ", got " + show(n) : ""));
    return n->items;
}

std::string head(const NodePtr& n) {
    if (!n || n->is_atom || n->items.empty() || !n->items[0]->is_atom) return "";
    return n->items[0]->atom;
}

} // namespace wit::sexpr

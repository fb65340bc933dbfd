#include "retab/print.hpp"

#include <sstream>

#include "retab/table.hpp"

namespace retab {

namespace {

const char* prefix_op(Kind k) {
    switch (k) {
        case Kind::Product: return "prod";
        case Kind::Div: return "div";
        case Kind::Mod: return "mod";
        case Kind::Abs: return "abs";
        case Kind::Neg: return "neg";
        case Kind::Eq: return "=";
        case Kind::Neq: return "!=";
        case Kind::Lt: return "<";
        case Kind::Leq: return "<=";
        case Kind::Gt: return ">";
        case Kind::Geq: return ">=";
        case Kind::Not: return "not";
        case Kind::And: return "and";
        case Kind::Or: return "or";
        case Kind::Implies: return "->";
        case Kind::Iff: return "<->";
        case Kind::AllDiff: return "alldiff";
        default: return "?";
    }
}

void prefix(const Expr& e, std::ostream& out) {
    switch (e->kind) {
        case Kind::Const:
            if (e->bool_typed)
                out << (e->value ? "true" : "false");
            else
                out << e->value;
            return;
        case Kind::Var:
        case Kind::Ident:
            out << e->name;
            return;
        case Kind::Sum:
            out << "(sum " << e->offset;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                out << " (t " << e->coeffs[i] << " ";
                prefix(e->children[i], out);
                out << ")";
            }
            out << ")";
            return;
        case Kind::Element:
            out << "(element (";
            for (std::size_t i = 0; i + 1 < e->children.size(); ++i) {
                if (i) out << " ";
                prefix(e->children[i], out);
            }
            out << ") ";
            prefix(e->children.back(), out);
            out << ")";
            return;
        case Kind::InSet:
            out << "(in ";
            prefix(e->children[0], out);
            out << " {";
            for (std::size_t i = 0; i < e->set.size(); ++i) {
                if (i) out << " ";
                out << e->set[i];
            }
            out << "})";
            return;
        case Kind::TableCtr:
            out << "(table t" << e->table->id;
            for (int v : e->table->scope) out << " v" << v;
            out << ")";
            return;
        case Kind::MatrixAccess:
            out << "(idx " << e->name;
            for (const auto& c : e->children) {
                out << " ";
                prefix(c, out);
            }
            out << ")";
            return;
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Comprehension:
            out << "(" << (e->kind == Kind::ForAll ? "forall"
                           : e->kind == Kind::Exists ? "exists" : "compr");
            for (const auto& g : e->gens) {
                out << " [" << g.index << " ";
                prefix(g.lo, out);
                out << " ";
                prefix(g.hi, out);
                out << "]";
            }
            out << " ";
            prefix(e->children[0], out);
            out << ")";
            return;
        default:
            out << "(" << prefix_op(e->kind);
            for (const auto& c : e->children) {
                out << " ";
                prefix(c, out);
            }
            out << ")";
            return;
    }
}

// precedence levels, loosest first
int prec(Kind k) {
    switch (k) {
        case Kind::ForAll:
        case Kind::Exists: return 0;
        case Kind::Iff: return 1;
        case Kind::Implies: return 2;
        case Kind::Or: return 3;
        case Kind::And: return 4;
        case Kind::Eq:
        case Kind::Neq:
        case Kind::Lt:
        case Kind::Leq:
        case Kind::Gt:
        case Kind::Geq:
        case Kind::InSet: return 5;
        case Kind::Sum: return 6;
        case Kind::Product:
        case Kind::Div:
        case Kind::Mod: return 7;
        case Kind::Not:
        case Kind::Neg: return 9;
        default: return 10;
    }
}

const char* infix_op(Kind k) {
    switch (k) {
        case Kind::Eq: return " = ";
        case Kind::Neq: return " != ";
        case Kind::Lt: return " < ";
        case Kind::Leq: return " <= ";
        case Kind::Gt: return " > ";
        case Kind::Geq: return " >= ";
        case Kind::And: return " /\\ ";
        case Kind::Or: return " \\/ ";
        case Kind::Implies: return " -> ";
        case Kind::Iff: return " <-> ";
        case Kind::Product: return "*";
        case Kind::Div: return "/";
        case Kind::Mod: return "%";
        default: return "?";
    }
}

void infix(const Expr& e, std::ostream& out, int parent_prec) {
    int p = prec(e->kind);
    bool parens = p < parent_prec;
    switch (e->kind) {
        case Kind::Const:
            if (e->bool_typed)
                out << (e->value ? "true" : "false");
            else
                out << e->value;
            return;
        case Kind::Var:
        case Kind::Ident:
            out << e->name;
            return;
        case Kind::Abs:
            out << "|";
            infix(e->children[0], out, 0);
            out << "|";
            return;
        case Kind::Neg:
            out << "-";
            infix(e->children[0], out, p + 1);
            return;
        case Kind::Not:
            out << "!";
            infix(e->children[0], out, p + 1);
            return;
        case Kind::Sum: {
            // surface form of sum(...) over a comprehension or whole matrix
            if (e->children.size() == 1 && e->coeffs[0] == 1 && e->offset == 0 &&
                (e->children[0]->kind == Kind::Comprehension ||
                 e->children[0]->kind == Kind::Ident)) {
                out << "sum(";
                infix(e->children[0], out, 0);
                out << ")";
                return;
            }
            if (parens) out << "(";
            bool first = true;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                Int c = e->coeffs[i];
                bool scaled = false;
                if (first) {
                    if (c == -1) { out << "-"; scaled = true; }
                    else if (c != 1) { out << c << "*"; scaled = true; }
                } else {
                    if (c < 0) out << " - ";
                    else out << " + ";
                    Int a = c < 0 ? -c : c;
                    if (a != 1) { out << a << "*"; scaled = true; }
                }
                // a scaled term must bind tighter than '*'
                infix(e->children[i], out, scaled ? prec(Kind::Product) + 1 : prec(Kind::Product));
                first = false;
            }
            if (e->offset != 0 || e->children.empty()) {
                if (first)
                    out << e->offset;
                else
                    out << (e->offset < 0 ? " - " : " + ")
                        << (e->offset < 0 ? -e->offset : e->offset);
            }
            if (parens) out << ")";
            return;
        }
        case Kind::AllDiff: {
            if (e->children.size() == 1 && (e->children[0]->kind == Kind::Comprehension ||
                                            e->children[0]->kind == Kind::Ident)) {
                out << "allDiff(";
                infix(e->children[0], out, 0);
                out << ")";
                return;
            }
            out << "allDiff([";
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                if (i) out << ", ";
                infix(e->children[i], out, 0);
            }
            out << "])";
            return;
        }
        case Kind::Element: {
            out << "element([";
            for (std::size_t i = 0; i + 1 < e->children.size(); ++i) {
                if (i) out << ", ";
                infix(e->children[i], out, 0);
            }
            out << "], ";
            infix(e->children.back(), out, 0);
            out << ")";
            return;
        }
        case Kind::InSet: {
            if (parens) out << "(";
            infix(e->children[0], out, p + 1);
            out << " in {";
            for (std::size_t i = 0; i < e->set.size(); ++i) {
                if (i) out << ", ";
                out << e->set[i];
            }
            out << "}";
            if (parens) out << ")";
            return;
        }
        case Kind::TableCtr: {
            out << "table([";
            for (std::size_t i = 0; i < e->table->scope.size(); ++i) {
                if (i) out << ", ";
                out << "#" << e->table->scope[i];
            }
            out << "], t" << e->table->id << ")";
            return;
        }
        case Kind::MatrixAccess: {
            out << e->name << "[";
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                if (i) out << ", ";
                infix(e->children[i], out, 0);
            }
            out << "]";
            return;
        }
        case Kind::ForAll:
        case Kind::Exists: {
            if (parens) out << "(";
            for (const auto& g : e->gens) {
                out << (e->kind == Kind::ForAll ? "forAll " : "exists ") << g.index
                    << " : int(";
                infix(g.lo, out, 0);
                out << "..";
                infix(g.hi, out, 0);
                out << ") . ";
            }
            infix(e->children[0], out, p);
            if (parens) out << ")";
            return;
        }
        case Kind::Comprehension: {
            out << "[";
            if (e->gens.empty()) {  // plain list
                for (std::size_t i = 0; i < e->children.size(); ++i) {
                    if (i) out << ", ";
                    infix(e->children[i], out, 0);
                }
                out << "]";
                return;
            }
            infix(e->children[0], out, 0);
            out << " | ";
            for (std::size_t i = 0; i < e->gens.size(); ++i) {
                if (i) out << ", ";
                out << e->gens[i].index << " : int(";
                infix(e->gens[i].lo, out, 0);
                out << "..";
                infix(e->gens[i].hi, out, 0);
                out << ")";
            }
            out << "]";
            return;
        }
        default: {
            if (parens) out << "(";
            bool right_assoc = e->kind == Kind::Implies;
            bool non_assoc = e->kind == Kind::Eq || e->kind == Kind::Neq ||
                             e->kind == Kind::Lt || e->kind == Kind::Leq ||
                             e->kind == Kind::Gt || e->kind == Kind::Geq;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                if (i) out << infix_op(e->kind);
                int child_min = (i == 0 && !right_assoc) || (i == 1 && right_assoc)
                                    ? p
                                    : p + 1;
                if (e->kind == Kind::And || e->kind == Kind::Or) child_min = p;
                if (non_assoc) child_min = p + 1;
                infix(e->children[i], out, child_min);
            }
            if (parens) out << ")";
            return;
        }
    }
}

} // namespace

std::string print_prefix(const Expr& e) {
    std::ostringstream out;
    prefix(e, out);
    return out.str();
}

std::string print_infix(const Expr& e) {
    std::ostringstream out;
    infix(e, out, 0);
    return out.str();
}

} // namespace retab
